//! The eight baseline augmentations and the primitive bank behind
//! RandAugment and AutoAugment.
//!
//! Every augmentation is shape-preserving and a pure function of
//! `(spec, image, rng state)`. Application is gated by one uniform draw
//! against `apply_probability`; the draw is consumed whether or not the
//! augmentation fires.

pub mod color;
pub mod geometric;
pub mod grid;
pub mod policy;
pub mod primitive;
pub mod region;

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::image::ImageTensor;
use crate::rng::RngStream;

pub use color::{color_jitter, JitterParams};
pub use geometric::{hflip, vflip, Rect};
pub use grid::{grid_transform, GridParams};
pub use policy::{auto_augment, rand_augment, PolicyTable, RandAugParams};
pub use primitive::{apply_primitive, PrimitiveKind, PrimitiveOp};
pub use region::{cutout, random_erasing, CutoutParams, ErasingParams};

/// Default apply probability for the gated augmentations.
pub const DEFAULT_APPLY_PROBABILITY: f64 = 0.5;

#[derive(Debug, Clone, PartialEq)]
pub enum AugmentKind {
    Identity,
    HFlip,
    VFlip,
    Jitter(JitterParams),
    Erasing(ErasingParams),
    Cutout(CutoutParams),
    Grid(GridParams),
    RandAug(RandAugParams),
    AutoAug(Arc<PolicyTable>),
}

impl AugmentKind {
    pub fn name(&self) -> &'static str {
        match self {
            AugmentKind::Identity => "identity",
            AugmentKind::HFlip => "hflip",
            AugmentKind::VFlip => "vflip",
            AugmentKind::Jitter(_) => "jitter",
            AugmentKind::Erasing(_) => "erasing",
            AugmentKind::Cutout(_) => "cutout",
            AugmentKind::Grid(_) => "grid",
            AugmentKind::RandAug(_) => "randaug",
            AugmentKind::AutoAug(_) => "autoaug",
        }
    }
}

/// Names accepted by [`AugmentationSpec::by_name`], the eight baselines first.
pub const AUGMENTATION_NAMES: [&str; 9] = [
    "hflip", "vflip", "jitter", "erasing", "cutout", "grid", "randaug", "autoaug", "identity",
];

/// One augmentation `a(.)` with its parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct AugmentationSpec {
    pub kind: AugmentKind,
    pub apply_probability: f64,
}

/// Dimensions that region-based augmentations scale against. `None` means
/// the image being augmented.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct ReferenceSize {
    pub height: usize,
    pub width: usize,
}

impl AugmentationSpec {
    pub fn new(kind: AugmentKind, apply_probability: f64) -> Self {
        AugmentationSpec {
            kind,
            apply_probability,
        }
    }

    pub fn identity() -> Self {
        Self::new(AugmentKind::Identity, 1.0)
    }

    pub fn hflip() -> Self {
        Self::new(AugmentKind::HFlip, DEFAULT_APPLY_PROBABILITY)
    }

    pub fn vflip() -> Self {
        Self::new(AugmentKind::VFlip, DEFAULT_APPLY_PROBABILITY)
    }

    pub fn jitter() -> Self {
        Self::new(AugmentKind::Jitter(JitterParams::default()), DEFAULT_APPLY_PROBABILITY)
    }

    pub fn erasing() -> Self {
        Self::new(AugmentKind::Erasing(ErasingParams::default()), DEFAULT_APPLY_PROBABILITY)
    }

    pub fn cutout() -> Self {
        Self::new(AugmentKind::Cutout(CutoutParams::default()), DEFAULT_APPLY_PROBABILITY)
    }

    pub fn grid() -> Self {
        Self::new(AugmentKind::Grid(GridParams::default()), DEFAULT_APPLY_PROBABILITY)
    }

    /// RandAugment is applied to every image; its randomness is in the op draw.
    pub fn randaug() -> Self {
        Self::new(AugmentKind::RandAug(RandAugParams::default()), 1.0)
    }

    /// AutoAugment is applied to every image; each sub-policy entry carries its own probability.
    pub fn autoaug() -> Self {
        Self::new(AugmentKind::AutoAug(Arc::new(PolicyTable::cifar10())), 1.0)
    }

    /// The default spec for a name, or `UnsupportedAugmentation`.
    pub fn by_name(name: &str) -> Result<Self> {
        Ok(match name.to_ascii_lowercase().as_str() {
            "identity" | "none" => Self::identity(),
            "hflip" => Self::hflip(),
            "vflip" => Self::vflip(),
            "jitter" => Self::jitter(),
            "erasing" => Self::erasing(),
            "cutout" => Self::cutout(),
            "grid" => Self::grid(),
            "randaug" => Self::randaug(),
            "autoaug" => Self::autoaug(),
            _ => return Err(Error::UnsupportedAugmentation(name.to_string())),
        })
    }

    pub fn name(&self) -> &'static str {
        self.kind.name()
    }

    pub fn with_probability(mut self, p: f64) -> Self {
        self.apply_probability = p;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.apply_probability) {
            return Err(Error::argument(format!(
                "apply probability {} not in [0, 1]",
                self.apply_probability
            )));
        }
        match &self.kind {
            AugmentKind::Jitter(p) => p.validate(),
            AugmentKind::Erasing(p) => p.validate(),
            AugmentKind::Cutout(p) => p.validate(),
            AugmentKind::RandAug(p) => p.validate(),
            _ => Ok(()),
        }
    }
}

impl fmt::Display for AugmentationSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}(p={}", self.name(), self.apply_probability)?;
        match &self.kind {
            AugmentKind::Jitter(j) => write!(
                f,
                ",brightness={},contrast={},saturation={},hue={}",
                j.brightness, j.contrast, j.saturation, j.hue
            )?,
            AugmentKind::Erasing(e) => write!(
                f,
                ",scale={}..{},ratio={}..{},fill={}",
                e.scale.0, e.scale.1, e.ratio.0, e.ratio.1, e.fill
            )?,
            AugmentKind::Cutout(c) => write!(f, ",area={},fill={}", c.mask_area_fraction, c.fill)?,
            AugmentKind::Grid(g) => write!(
                f,
                ",grid={}x{},cell_p={}",
                g.rows, g.cols, g.cell_probability
            )?,
            AugmentKind::RandAug(r) => write!(f, ",n={},m={}", r.num_ops, r.magnitude)?,
            AugmentKind::AutoAug(t) => write!(f, ",sub_policies={}", t.len())?,
            _ => {}
        }
        f.write_str(")")
    }
}

/// Applies `spec` to `image`, scaling region sizes against the image itself.
pub fn apply_augmentation(
    spec: &AugmentationSpec,
    image: &ImageTensor,
    rng: &mut RngStream,
) -> Result<ImageTensor> {
    apply_augmentation_with_reference(spec, image, None, rng)
}

/// Applies `spec`; Cutout and Erasing size their regions against
/// `reference` when given (e.g. the full image a piece was cut from).
pub fn apply_augmentation_with_reference(
    spec: &AugmentationSpec,
    image: &ImageTensor,
    reference: Option<ReferenceSize>,
    rng: &mut RngStream,
) -> Result<ImageTensor> {
    spec.validate()?;
    // Checked before the gate so an unfit image fails on every draw.
    if let AugmentKind::Grid(p) = &spec.kind {
        p.validate_for(image.height(), image.width())?;
    }
    if rng.next_unit_uniform() >= spec.apply_probability {
        return Ok(image.clone());
    }
    let reference = reference.unwrap_or(ReferenceSize {
        height: image.height(),
        width: image.width(),
    });
    match &spec.kind {
        AugmentKind::Identity => Ok(image.clone()),
        AugmentKind::HFlip => Ok(hflip(image)),
        AugmentKind::VFlip => Ok(vflip(image)),
        AugmentKind::Jitter(p) => color_jitter(image, p, rng),
        AugmentKind::Erasing(p) => region::random_erasing_with_reference(
            image,
            p,
            (reference.height * reference.width) as f64,
            rng,
        ),
        AugmentKind::Cutout(p) => region::cutout_with_reference(
            image,
            p,
            reference.height.min(reference.width),
            rng,
        ),
        AugmentKind::Grid(p) => grid_transform(image, p, rng),
        AugmentKind::RandAug(p) => rand_augment(image, p, rng),
        AugmentKind::AutoAug(t) => auto_augment(image, t, rng),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::{derive_stream, SeedSpec};

    fn img() -> ImageTensor {
        ImageTensor::from_fn(3, 32, 32, |c, y, x| ((c * 80 + y * 7 + x * 3 + 1) % 256) as u8).unwrap()
    }

    #[test]
    fn documented_defaults() {
        for spec in [
            AugmentationSpec::hflip(),
            AugmentationSpec::vflip(),
            AugmentationSpec::jitter(),
            AugmentationSpec::erasing(),
            AugmentationSpec::cutout(),
            AugmentationSpec::grid(),
        ] {
            assert_eq!(spec.apply_probability, 0.5, "{}", spec.name());
        }
        assert_eq!(
            JitterParams::default(),
            JitterParams {
                brightness: 0.4,
                contrast: 0.4,
                saturation: 0.4,
                hue: 0.1
            }
        );
        let e = ErasingParams::default();
        assert_eq!((e.scale, e.ratio, e.fill), ((0.02, 0.4), (0.3, 3.3), 0));
        assert_eq!(CutoutParams::default().mask_area_fraction, 0.25);
        assert_eq!(CutoutParams::default().fill, 0);
        let r = RandAugParams::default();
        assert_eq!((r.num_ops, r.magnitude), (2, 9.0));
    }

    #[test]
    fn unknown_name_is_unsupported() {
        assert!(matches!(
            AugmentationSpec::by_name("mixup"),
            Err(Error::UnsupportedAugmentation(_))
        ));
        for name in AUGMENTATION_NAMES {
            assert_eq!(AugmentationSpec::by_name(name).unwrap().name(), name);
        }
    }

    #[test]
    fn identity_is_byte_identical() {
        let mut rng = derive_stream(SeedSpec::new(0, 0));
        assert_eq!(apply_augmentation(&AugmentationSpec::identity(), &img(), &mut rng).unwrap(), img());
    }

    #[test]
    fn forced_hflip_twice_is_identity() {
        let spec = AugmentationSpec::hflip().with_probability(1.0);
        let mut rng = derive_stream(SeedSpec::new(0, 0));
        let once = apply_augmentation(&spec, &img(), &mut rng).unwrap();
        assert_ne!(once, img());
        assert_eq!(apply_augmentation(&spec, &once, &mut rng).unwrap(), img());
    }

    #[test]
    fn forced_cutout_is_single_inbounds_square() {
        let spec = AugmentationSpec::cutout().with_probability(1.0);
        let base = ImageTensor::filled(3, 32, 32, 1).unwrap();
        for seed in 0..100 {
            let mut rng = derive_stream(SeedSpec::new(seed, 0));
            let out = apply_augmentation(&spec, &base, &mut rng).unwrap();
            let zeros: Vec<(usize, usize)> = (0..32)
                .flat_map(|y| (0..32).map(move |x| (y, x)))
                .filter(|&(y, x)| out.get(0, y, x) == 0)
                .collect();
            let (ys, xs): (Vec<_>, Vec<_>) = zeros.iter().copied().unzip();
            let h = ys.iter().max().unwrap() - ys.iter().min().unwrap() + 1;
            let w = xs.iter().max().unwrap() - xs.iter().min().unwrap() + 1;
            assert_eq!(h * w, zeros.len(), "one solid rectangle");
            assert!(h <= 16 && w <= 16);
        }
    }

    #[test]
    fn reference_size_scales_cutout() {
        let spec = AugmentationSpec::cutout().with_probability(1.0);
        let piece = ImageTensor::filled(3, 16, 32, 1).unwrap();
        let count_zeros = |img: &ImageTensor| img.plane(0).iter().filter(|&&v| v == 0).count();
        // piece-relative: side round(0.5 * 16) = 8; centered cutouts are 8x8
        let mut max_piece = 0;
        let mut max_image = 0;
        for seed in 0..200 {
            let mut rng = derive_stream(SeedSpec::new(seed, 0));
            max_piece = max_piece.max(count_zeros(&apply_augmentation(&spec, &piece, &mut rng).unwrap()));
            let mut rng = derive_stream(SeedSpec::new(seed, 0));
            let r = Some(ReferenceSize { height: 32, width: 32 });
            max_image = max_image.max(count_zeros(
                &apply_augmentation_with_reference(&spec, &piece, r, &mut rng).unwrap(),
            ));
        }
        assert_eq!(max_piece, 64);
        assert_eq!(max_image, 256);
    }

    #[test]
    fn gate_probability_zero_never_applies() {
        let spec = AugmentationSpec::vflip().with_probability(0.0);
        for seed in 0..20 {
            let mut rng = derive_stream(SeedSpec::new(seed, 0));
            assert_eq!(apply_augmentation(&spec, &img(), &mut rng).unwrap(), img());
        }
    }

    #[test]
    fn every_kind_preserves_shape_and_replays() {
        for name in AUGMENTATION_NAMES {
            let spec = AugmentationSpec::by_name(name).unwrap();
            for seed in 0..10 {
                let run = || apply_augmentation(&spec, &img(), &mut derive_stream(SeedSpec::new(seed, 1))).unwrap();
                let a = run();
                assert_eq!(a.shape(), img().shape(), "{name}");
                assert_eq!(a, run(), "{name}");
            }
        }
    }

    #[test]
    fn invalid_probability_rejected() {
        let spec = AugmentationSpec::hflip().with_probability(1.5);
        let mut rng = derive_stream(SeedSpec::new(0, 0));
        assert!(apply_augmentation(&spec, &img(), &mut rng).is_err());
    }
}
