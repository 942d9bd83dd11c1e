//! Patch-level composition.
//!
//! YONA cuts an image in two along a randomly chosen axis, replaces one
//! piece with noise, augments the other piece as if it were a standalone
//! image, and joins the pieces back in their original order. YOCO, the
//! comparison method, cuts the same way but augments both halves
//! independently and masks nothing.
//!
//! Two coins come from the structure stream, always in the order `p` then
//! `q`: `p <= 0.5` selects a height cut (otherwise width) and `q <= 0.5`
//! masks the low-index side (otherwise the high-index side). Both are drawn
//! even when a fixed policy overrides them, so streams stay aligned across
//! policies.

use std::fmt;

use crate::augment::{apply_augmentation, apply_augmentation_with_reference, AugmentationSpec, ReferenceSize};
use crate::error::{Error, Result};
use crate::image::{copy_run, concat, cut, split_boundary, Axis, ImageTensor, NoiseKind, Provenance};
use crate::rng::{ImageStreams, RngStream};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum AxisPolicy {
    /// Height or width with equal probability.
    #[default]
    RandomEqual,
    FixedHeight,
    FixedWidth,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum MaskedPiecePolicy {
    /// Low-index or high-index side with equal probability.
    #[default]
    RandomEqual,
    AlwaysFirst,
    AlwaysSecond,
}

/// What region-based augmentations (Cutout, Erasing) measure themselves against.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum RegionScale {
    /// The piece being augmented.
    #[default]
    Piece,
    /// The full image the piece was cut from.
    Image,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct YonaConfig {
    /// Extent of the masked piece along the cut axis, as a fraction.
    pub mask_fraction: f64,
    pub axis_policy: AxisPolicy,
    pub noise: NoiseKind,
    pub masked_piece_policy: MaskedPiecePolicy,
    pub region_scale: RegionScale,
}

impl Default for YonaConfig {
    fn default() -> Self {
        YonaConfig {
            mask_fraction: 0.5,
            axis_policy: AxisPolicy::RandomEqual,
            noise: NoiseKind::UniformPerPixel,
            masked_piece_policy: MaskedPiecePolicy::RandomEqual,
            region_scale: RegionScale::Piece,
        }
    }
}

impl YonaConfig {
    pub fn with_fraction(mut self, fraction: f64) -> Self {
        self.mask_fraction = fraction;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.mask_fraction > 0.0 && self.mask_fraction < 1.0) {
            return Err(Error::argument(format!(
                "mask fraction {} not in (0, 1)",
                self.mask_fraction
            )));
        }
        self.noise.validate()
    }

    fn axes(&self) -> &'static [Axis] {
        match self.axis_policy {
            AxisPolicy::RandomEqual => &[Axis::Height, Axis::Width],
            AxisPolicy::FixedHeight => &[Axis::Height],
            AxisPolicy::FixedWidth => &[Axis::Width],
        }
    }

    /// Number of masked rows (or columns) for an extent.
    pub fn masked_extent(&self, extent: usize) -> Result<usize> {
        let n = split_boundary(self.mask_fraction, extent);
        if n < 1 || n + 1 > extent {
            return Err(Error::geometry(format!(
                "mask fraction {} leaves no valid cut in extent {extent}",
                self.mask_fraction
            )));
        }
        Ok(n)
    }
}

impl fmt::Display for YonaConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let axis = match self.axis_policy {
            AxisPolicy::RandomEqual => "random",
            AxisPolicy::FixedHeight => "height",
            AxisPolicy::FixedWidth => "width",
        };
        let masked = match self.masked_piece_policy {
            MaskedPiecePolicy::RandomEqual => "random",
            MaskedPiecePolicy::AlwaysFirst => "first",
            MaskedPiecePolicy::AlwaysSecond => "second",
        };
        let scale = match self.region_scale {
            RegionScale::Piece => "piece",
            RegionScale::Image => "image",
        };
        write!(
            f,
            "fraction:{},axis:{axis},masked:{masked},noise:{},scale:{scale}",
            self.mask_fraction, self.noise
        )
    }
}

/// What one YONA composition decided.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct YonaTrace {
    pub p: f64,
    pub q: f64,
    pub axis: Axis,
    /// Whether the masked piece is the low-index one.
    pub masked_first: bool,
    /// Cut position along `axis`.
    pub boundary: usize,
    /// The masked band `[masked_start, masked_start + masked_len)` along `axis`.
    pub masked_start: usize,
    pub masked_len: usize,
}

impl YonaTrace {
    /// Bytes that came from the noise stream.
    pub fn masked_bytes(&self, image: &ImageTensor) -> usize {
        let other = match self.axis {
            Axis::Height => image.width(),
            Axis::Width => image.height(),
        };
        self.masked_len * other * image.channels()
    }
}

/// Composes one image: cut, mask one piece, augment the other, concatenate.
pub fn yona_apply(
    image: &ImageTensor,
    aug: &AugmentationSpec,
    config: &YonaConfig,
    structure_rng: &mut RngStream,
    augment_rng: &mut RngStream,
    noise_rng: &mut RngStream,
) -> Result<ImageTensor> {
    yona_apply_traced(image, aug, config, structure_rng, augment_rng, noise_rng).map(|(img, _)| img)
}

/// [`yona_apply`] with the masked piece spanning `fraction` of the cut axis.
pub fn yona_apply_fraction(
    image: &ImageTensor,
    aug: &AugmentationSpec,
    fraction: f64,
    config: &YonaConfig,
    structure_rng: &mut RngStream,
    augment_rng: &mut RngStream,
    noise_rng: &mut RngStream,
) -> Result<ImageTensor> {
    let config = config.with_fraction(fraction);
    yona_apply(image, aug, &config, structure_rng, augment_rng, noise_rng)
}

pub fn yona_apply_traced(
    image: &ImageTensor,
    aug: &AugmentationSpec,
    config: &YonaConfig,
    structure_rng: &mut RngStream,
    augment_rng: &mut RngStream,
    noise_rng: &mut RngStream,
) -> Result<(ImageTensor, YonaTrace)> {
    config.validate()?;
    for &axis in config.axes() {
        config.masked_extent(image.extent(axis))?;
    }

    let p = structure_rng.next_unit_uniform();
    let q = structure_rng.next_unit_uniform();
    let axis = match config.axis_policy {
        AxisPolicy::RandomEqual if p <= 0.5 => Axis::Height,
        AxisPolicy::RandomEqual => Axis::Width,
        AxisPolicy::FixedHeight => Axis::Height,
        AxisPolicy::FixedWidth => Axis::Width,
    };
    let masked_first = match config.masked_piece_policy {
        MaskedPiecePolicy::RandomEqual => q <= 0.5,
        MaskedPiecePolicy::AlwaysFirst => true,
        MaskedPiecePolicy::AlwaysSecond => false,
    };

    let extent = image.extent(axis);
    let masked_len = config.masked_extent(extent)?;
    let boundary = if masked_first {
        masked_len
    } else {
        extent - masked_len
    };
    let masked_start = if masked_first { 0 } else { boundary };
    let kept_start = if masked_first { boundary } else { 0 };
    let kept = image.extract(axis, kept_start, extent - masked_len)?;

    let reference = match config.region_scale {
        RegionScale::Piece => None,
        RegionScale::Image => Some(ReferenceSize {
            height: image.height(),
            width: image.width(),
        }),
    };
    let augmented = apply_augmentation_with_reference(aug, &kept, reference, augment_rng)?;
    if augmented.shape() != kept.shape() {
        return Err(Error::geometry(format!(
            "augmentation changed piece shape {:?} -> {:?}",
            kept.shape(),
            augmented.shape()
        )));
    }
    let out = assemble(
        image,
        axis,
        masked_start,
        masked_len,
        &augmented,
        config.noise,
        noise_rng,
    )?;

    let trace = YonaTrace {
        p,
        q,
        axis,
        masked_first,
        boundary,
        masked_start,
        masked_len,
    };
    Ok((out, trace))
}

/// Output of one composition: the masked band is filled from `noise` in
/// planar order and the rest is copied from `augmented`. Equivalent to
/// concatenating a noise-filled piece with the augmented piece.
fn assemble(
    image: &ImageTensor,
    axis: Axis,
    masked_start: usize,
    masked_len: usize,
    augmented: &ImageTensor,
    noise: NoiseKind,
    noise_rng: &mut RngStream,
) -> Result<ImageTensor> {
    let (c, h, w) = image.shape();
    // Per output line: `line` bytes, of which `band` at `band_at` are noise.
    let (line, band, band_at) = match axis {
        Axis::Height => (h * w, masked_len * w, masked_start * w),
        Axis::Width => (w, masked_len, masked_start),
    };
    let kept = line - band;
    let src = augmented.data();
    let mut data = vec![0u8; c * h * w];
    let kept_at = if band_at == 0 { band } else { 0 };
    let split = band_at.max(kept_at);
    // Noise goes straight into each row when per-row fills replay the same
    // bytes as one fill of the whole piece; otherwise through a scratch buffer.
    let direct = noise.is_row_splittable(band);
    let mut scratch = Vec::new();
    if !direct {
        scratch = vec![0u8; c * h * w - src.len()];
        noise.fill(&mut scratch, noise_rng);
    }
    for (i, (dst, kept_row)) in data.chunks_exact_mut(line).zip(src.chunks_exact(kept)).enumerate() {
        let (head, tail) = dst.split_at_mut(split);
        let (noise_dst, kept_dst) = if band_at == 0 { (head, tail) } else { (tail, head) };
        if direct {
            noise.fill(noise_dst, noise_rng);
        } else {
            copy_run(noise_dst, &scratch[i * band..(i + 1) * band]);
        }
        copy_run(kept_dst, kept_row);
    }
    ImageTensor::new(c, h, w, data)
}

/// Cuts at the midpoint of an rng-chosen axis and augments each half with
/// its own sub-stream of `augment_rng`.
pub fn yoco_apply(
    image: &ImageTensor,
    aug: &AugmentationSpec,
    structure_rng: &mut RngStream,
    augment_rng: &mut RngStream,
) -> Result<ImageTensor> {
    for axis in [Axis::Height, Axis::Width] {
        if image.extent(axis) < 2 {
            return Err(Error::geometry(format!("cannot bisect along {axis}")));
        }
    }
    let axis = if structure_rng.next_unit_uniform() <= 0.5 {
        Axis::Height
    } else {
        Axis::Width
    };
    let (first, second) = cut(image, axis, 0.5)?;
    let mut first_rng = augment_rng.split();
    let mut second_rng = augment_rng.split();
    let first_out = apply_augmentation(aug, &first.image, &mut first_rng)?;
    let second_out = apply_augmentation(aug, &second.image, &mut second_rng)?;
    concat(
        &first.with_image(first_out, Provenance::Augmented)?,
        &second.with_image(second_out, Provenance::Augmented)?,
        axis,
    )
}

/// How augmentation is wrapped for a dataset run.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub enum Composition {
    /// `a(.)` on the whole image.
    #[default]
    Plain,
    Yona(YonaConfig),
    Yoco,
}

impl fmt::Display for Composition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Composition::Plain => f.write_str("none"),
            Composition::Yona(cfg) => cfg.fmt(f),
            Composition::Yoco => f.write_str("yoco"),
        }
    }
}

/// An augmentation plus its composition; applies to image `index` using
/// streams derived from `(global_seed, index)` only.
#[derive(Debug, Clone, PartialEq)]
pub struct Pipeline {
    pub aug: AugmentationSpec,
    pub composition: Composition,
}

impl Pipeline {
    pub fn new(aug: AugmentationSpec, composition: Composition) -> Self {
        Pipeline { aug, composition }
    }

    pub fn validate(&self) -> Result<()> {
        self.aug.validate()?;
        if let Composition::Yona(cfg) = &self.composition {
            cfg.validate()?;
        }
        Ok(())
    }

    pub fn apply(&self, image: &ImageTensor, global_seed: u64, index: u64) -> Result<ImageTensor> {
        self.apply_traced(image, global_seed, index).map(|(img, _)| img)
    }

    pub fn apply_traced(
        &self,
        image: &ImageTensor,
        global_seed: u64,
        index: u64,
    ) -> Result<(ImageTensor, Option<YonaTrace>)> {
        let mut s = ImageStreams::derive(global_seed, index);
        match &self.composition {
            Composition::Plain => Ok((apply_augmentation(&self.aug, image, &mut s.augment)?, None)),
            Composition::Yona(cfg) => {
                let (img, trace) = yona_apply_traced(
                    image,
                    &self.aug,
                    cfg,
                    &mut s.structure,
                    &mut s.augment,
                    &mut s.noise,
                )?;
                Ok((img, Some(trace)))
            }
            Composition::Yoco => Ok((
                yoco_apply(image, &self.aug, &mut s.structure, &mut s.augment)?,
                None,
            )),
        }
    }
}
