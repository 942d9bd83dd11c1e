//! Channel-planar 8-bit images and the three structural primitives:
//! cutting an image in two, masking a piece with noise, and concatenating
//! pieces back together.

use std::fmt;

use crate::error::{Error, Result};
use crate::rng::RngStream;

/// A `C x H x W` image stored plane by plane, row-major within a plane.
#[derive(Clone, PartialEq, Eq)]
pub struct ImageTensor {
    channels: usize,
    height: usize,
    width: usize,
    data: Vec<u8>,
}

impl fmt::Debug for ImageTensor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "ImageTensor({}x{}x{})",
            self.channels, self.height, self.width
        )
    }
}

impl ImageTensor {
    /// Wraps `data`; requires `C >= 1`, `H >= 2`, `W >= 2` and `data.len() == C*H*W`.
    pub fn new(channels: usize, height: usize, width: usize, data: Vec<u8>) -> Result<Self> {
        if channels < 1 || height < 2 || width < 2 {
            return Err(Error::geometry(format!(
                "image must have C >= 1, H >= 2, W >= 2; got {channels}x{height}x{width}"
            )));
        }
        Self::with_data(channels, height, width, data)
    }

    /// Like [`ImageTensor::new`] but allows 1-pixel extents. Used for pieces,
    /// which may be thinner than a full image.
    pub(crate) fn with_data(
        channels: usize,
        height: usize,
        width: usize,
        data: Vec<u8>,
    ) -> Result<Self> {
        if channels == 0 || height == 0 || width == 0 {
            return Err(Error::geometry("image extents must be non-zero"));
        }
        let expected = channels * height * width;
        if data.len() != expected {
            return Err(Error::geometry(format!(
                "data length {} does not match {channels}x{height}x{width} = {expected}",
                data.len()
            )));
        }
        Ok(Self {
            channels,
            height,
            width,
            data,
        })
    }

    pub fn filled(channels: usize, height: usize, width: usize, value: u8) -> Result<Self> {
        Self::new(channels, height, width, vec![value; channels * height * width])
    }

    pub fn from_fn(
        channels: usize,
        height: usize,
        width: usize,
        mut f: impl FnMut(usize, usize, usize) -> u8,
    ) -> Result<Self> {
        let mut data = Vec::with_capacity(channels * height * width);
        for c in 0..channels {
            for y in 0..height {
                for x in 0..width {
                    data.push(f(c, y, x));
                }
            }
        }
        Self::new(channels, height, width, data)
    }

    /// Uniformly random bytes from `rng`.
    pub fn random(channels: usize, height: usize, width: usize, rng: &mut RngStream) -> Result<Self> {
        let mut data = vec![0u8; channels * height * width];
        rng.fill_bytes(&mut data);
        Self::new(channels, height, width, data)
    }

    #[inline]
    pub fn channels(&self) -> usize {
        self.channels
    }

    #[inline]
    pub fn height(&self) -> usize {
        self.height
    }

    #[inline]
    pub fn width(&self) -> usize {
        self.width
    }

    #[inline]
    pub fn shape(&self) -> (usize, usize, usize) {
        (self.channels, self.height, self.width)
    }

    #[inline]
    pub fn plane_len(&self) -> usize {
        self.height * self.width
    }

    #[inline]
    pub fn data(&self) -> &[u8] {
        &self.data
    }

    #[inline]
    pub fn data_mut(&mut self) -> &mut [u8] {
        &mut self.data
    }

    pub fn into_data(self) -> Vec<u8> {
        self.data
    }

    #[inline]
    pub fn index(&self, c: usize, y: usize, x: usize) -> usize {
        (c * self.height + y) * self.width + x
    }

    #[inline]
    pub fn get(&self, c: usize, y: usize, x: usize) -> u8 {
        self.data[self.index(c, y, x)]
    }

    #[inline]
    pub fn set(&mut self, c: usize, y: usize, x: usize, v: u8) {
        let i = self.index(c, y, x);
        self.data[i] = v;
    }

    pub fn plane(&self, c: usize) -> &[u8] {
        let n = self.plane_len();
        &self.data[c * n..(c + 1) * n]
    }

    pub fn plane_mut(&mut self, c: usize) -> &mut [u8] {
        let n = self.plane_len();
        &mut self.data[c * n..(c + 1) * n]
    }

    pub fn extent(&self, axis: Axis) -> usize {
        match axis {
            Axis::Height => self.height,
            Axis::Width => self.width,
        }
    }

    /// Copies the band `[start, start + len)` along `axis`.
    pub fn extract(&self, axis: Axis, start: usize, len: usize) -> Result<ImageTensor> {
        let extent = self.extent(axis);
        if len == 0 || start + len > extent {
            return Err(Error::geometry(format!(
                "band [{start}, {}) outside extent {extent}",
                start + len
            )));
        }
        let (c, h, w) = self.shape();
        let data = match axis {
            Axis::Height => {
                let mut out = vec![0u8; c * len * w];
                for (dst, plane) in out.chunks_exact_mut(len * w).zip(self.data.chunks_exact(h * w)) {
                    dst.copy_from_slice(&plane[start * w..(start + len) * w]);
                }
                out
            }
            Axis::Width => {
                let mut out = vec![0u8; c * h * len];
                for (dst, row) in out.chunks_exact_mut(len).zip(self.data.chunks_exact(w)) {
                    copy_run(dst, &row[start..start + len]);
                }
                out
            }
        };
        let (oh, ow) = match axis {
            Axis::Height => (len, w),
            Axis::Width => (h, len),
        };
        ImageTensor::with_data(c, oh, ow, data)
    }

    /// Overwrites the band starting at `start` along `axis` with `band`.
    pub fn paste(&mut self, axis: Axis, start: usize, band: &ImageTensor) -> Result<()> {
        let (c, h, w) = self.shape();
        let (bc, bh, bw) = band.shape();
        let fits = match axis {
            Axis::Height => bc == c && bw == w && start + bh <= h,
            Axis::Width => bc == c && bh == h && start + bw <= w,
        };
        if !fits {
            return Err(Error::geometry(format!(
                "cannot paste {bc}x{bh}x{bw} at {start} along {axis} into {c}x{h}x{w}"
            )));
        }
        match axis {
            Axis::Height => {
                for (dst, src) in self
                    .data
                    .chunks_exact_mut(h * w)
                    .zip(band.data.chunks_exact(bh * w))
                {
                    dst[start * w..(start + bh) * w].copy_from_slice(src);
                }
            }
            Axis::Width => {
                for (dst, src) in self.data.chunks_exact_mut(w).zip(band.data.chunks_exact(bw)) {
                    dst[start..start + bw].copy_from_slice(src);
                }
            }
        }
        Ok(())
    }
}

/// `dst.copy_from_slice(src)`, inlined for short runs such as the rows of a
/// narrow band, where a library call per row would dominate.
#[inline]
pub(crate) fn copy_run(dst: &mut [u8], src: &[u8]) {
    let n = dst.len();
    assert_eq!(n, src.len());
    if n > 64 {
        dst.copy_from_slice(src);
        return;
    }
    // Fixed-size, possibly overlapping chunks compile to plain vector moves.
    if n >= 16 {
        let mut i = 0;
        while i + 16 < n {
            dst[i..i + 16].copy_from_slice(&src[i..i + 16]);
            i += 16;
        }
        dst[n - 16..].copy_from_slice(&src[n - 16..]);
    } else if n >= 8 {
        dst[..8].copy_from_slice(&src[..8]);
        dst[n - 8..].copy_from_slice(&src[n - 8..]);
    } else if n >= 4 {
        dst[..4].copy_from_slice(&src[..4]);
        dst[n - 4..].copy_from_slice(&src[n - 4..]);
    } else {
        for (d, s) in dst.iter_mut().zip(src) {
            *d = *s;
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Axis {
    Height,
    Width,
}

impl Axis {
    pub fn name(self) -> &'static str {
        match self {
            Axis::Height => "height",
            Axis::Width => "width",
        }
    }
}

impl fmt::Display for Axis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Where a piece sits inside the image it was cut from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Origin {
    pub axis: Axis,
    pub offset: usize,
    pub parent_extent: usize,
}

/// What has happened to a piece since it was cut.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Provenance {
    Cut,
    Masked,
    Augmented,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Piece {
    pub image: ImageTensor,
    pub origin: Origin,
    pub provenance: Provenance,
}

impl Piece {
    pub fn extent(&self) -> usize {
        self.image.extent(self.origin.axis)
    }

    /// Replaces the pixels, keeping the origin.
    pub fn with_image(&self, image: ImageTensor, provenance: Provenance) -> Result<Piece> {
        if image.shape() != self.image.shape() {
            return Err(Error::geometry(format!(
                "replacement {:?} does not match piece {:?}",
                image, self.image
            )));
        }
        Ok(Piece {
            image,
            origin: self.origin,
            provenance,
        })
    }
}

/// `round(fraction * extent)` with exact halves rounded down, so an odd
/// extent split at 0.5 gives the first piece the smaller half.
pub fn split_boundary(fraction: f64, extent: usize) -> usize {
    let scaled = fraction * extent as f64;
    let lower = scaled.floor();
    if scaled - lower > 0.5 {
        lower as usize + 1
    } else {
        lower as usize
    }
}

fn checked_boundary(fraction: f64, extent: usize) -> Result<usize> {
    if !(fraction > 0.0 && fraction < 1.0) {
        return Err(Error::geometry(format!(
            "cut fraction {fraction} not in (0, 1)"
        )));
    }
    let boundary = split_boundary(fraction, extent);
    if boundary < 1 || boundary + 1 > extent {
        return Err(Error::geometry(format!(
            "cut boundary {boundary} outside [1, {}] for extent {extent}",
            extent.saturating_sub(1)
        )));
    }
    Ok(boundary)
}

/// Cuts `image` along `axis` at `round(fraction * extent)`.
pub fn cut(image: &ImageTensor, axis: Axis, fraction: f64) -> Result<(Piece, Piece)> {
    let extent = image.extent(axis);
    let boundary = checked_boundary(fraction, extent)?;
    cut_at(image, axis, boundary)
}

/// Cuts at an explicit pixel boundary `1 <= boundary <= extent - 1`.
pub fn cut_at(image: &ImageTensor, axis: Axis, boundary: usize) -> Result<(Piece, Piece)> {
    let extent = image.extent(axis);
    if boundary < 1 || boundary >= extent {
        return Err(Error::geometry(format!(
            "cut boundary {boundary} outside [1, {}] for extent {extent}",
            extent.saturating_sub(1)
        )));
    }
    let first = image.extract(axis, 0, boundary)?;
    let second = image.extract(axis, boundary, extent - boundary)?;
    let origin = |offset| Origin {
        axis,
        offset,
        parent_extent: extent,
    };
    Ok((
        Piece {
            image: first,
            origin: origin(0),
            provenance: Provenance::Cut,
        },
        Piece {
            image: second,
            origin: origin(boundary),
            provenance: Provenance::Cut,
        },
    ))
}

/// Noise used to replace a masked piece.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub enum NoiseKind {
    /// Independent uniform bytes over `[0, 255]`.
    #[default]
    UniformPerPixel,
    Constant(u8),
    /// Rounded and clamped to `[0, 255]`.
    GaussianClamped { mean: u8, stddev: f64 },
}

impl NoiseKind {
    pub fn validate(&self) -> Result<()> {
        match *self {
            NoiseKind::GaussianClamped { stddev, .. } if !(stddev > 0.0 && stddev.is_finite()) => {
                Err(Error::argument(format!(
                    "gaussian noise stddev must be > 0, got {stddev}"
                )))
            }
            _ => Ok(()),
        }
    }

    /// Fills `buf` from this distribution.
    #[inline]
    pub fn fill(&self, buf: &mut [u8], rng: &mut RngStream) {
        match *self {
            NoiseKind::UniformPerPixel => rng.fill_bytes(buf),
            NoiseKind::Constant(v) => buf.fill(v),
            NoiseKind::GaussianClamped { mean, stddev } => {
                for b in buf {
                    let v = rng.next_gaussian(mean as f64, stddev);
                    *b = v.round().clamp(0.0, 255.0) as u8;
                }
            }
        }
    }

    /// True when filling consecutive runs of `run` bytes yields the same
    /// bytes as one fill of their concatenation.
    pub fn is_row_splittable(&self, run: usize) -> bool {
        match self {
            NoiseKind::UniformPerPixel => run.is_multiple_of(8),
            NoiseKind::Constant(_) | NoiseKind::GaussianClamped { .. } => true,
        }
    }

    /// Parses `uniform`, `constant:V` or `gaussian:MEAN:STDDEV`.
    pub fn parse(s: &str) -> Result<NoiseKind> {
        let mut parts = s.split(':');
        let kind = parts.next().unwrap_or_default();
        let rest: Vec<&str> = parts.collect();
        let bad = || Error::argument(format!("bad noise spec `{s}`"));
        let noise = match (kind, rest.as_slice()) {
            ("uniform", []) => NoiseKind::UniformPerPixel,
            ("constant", [v]) => NoiseKind::Constant(v.parse().map_err(|_| bad())?),
            ("gaussian", [m, sd]) => NoiseKind::GaussianClamped {
                mean: m.parse().map_err(|_| bad())?,
                stddev: sd.parse().map_err(|_| bad())?,
            },
            _ => return Err(bad()),
        };
        noise.validate()?;
        Ok(noise)
    }
}

impl fmt::Display for NoiseKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NoiseKind::UniformPerPixel => f.write_str("uniform"),
            NoiseKind::Constant(v) => write!(f, "constant:{v}"),
            NoiseKind::GaussianClamped { mean, stddev } => write!(f, "gaussian:{mean}:{stddev}"),
        }
    }
}

/// Replaces every byte of `piece` with noise drawn from `rng`.
pub fn mask_noise(piece: &Piece, noise: NoiseKind, rng: &mut RngStream) -> Result<Piece> {
    noise.validate()?;
    let (c, h, w) = piece.image.shape();
    let mut data = vec![0u8; c * h * w];
    noise.fill(&mut data, rng);
    piece.with_image(ImageTensor::with_data(c, h, w, data)?, Provenance::Masked)
}

/// Joins two adjacent pieces along `axis`, first piece at the lower indices.
pub fn concat(first: &Piece, second: &Piece, axis: Axis) -> Result<ImageTensor> {
    if first.origin.axis != axis || second.origin.axis != axis {
        return Err(Error::geometry(format!(
            "pieces cut along {} / {} cannot be joined along {axis}",
            first.origin.axis, second.origin.axis
        )));
    }
    if first.origin.offset + first.extent() != second.origin.offset {
        return Err(Error::geometry(format!(
            "pieces are not adjacent: first covers [{}, {}), second starts at {}",
            first.origin.offset,
            first.origin.offset + first.extent(),
            second.origin.offset
        )));
    }
    let (c1, h1, w1) = first.image.shape();
    let (c2, h2, w2) = second.image.shape();
    let compatible = c1 == c2
        && match axis {
            Axis::Height => w1 == w2,
            Axis::Width => h1 == h2,
        };
    if !compatible {
        return Err(Error::geometry(format!(
            "shape mismatch joining {c1}x{h1}x{w1} and {c2}x{h2}x{w2} along {axis}"
        )));
    }
    let (h, w) = match axis {
        Axis::Height => (h1 + h2, w1),
        Axis::Width => (h1, w1 + w2),
    };
    let mut data = vec![0u8; c1 * h * w];
    let (a, b) = (first.image.data(), second.image.data());
    let (la, lb) = match axis {
        Axis::Height => (h1 * w, h2 * w),
        Axis::Width => (w1, w2),
    };
    for ((dst, a), b) in data
        .chunks_exact_mut(la + lb)
        .zip(a.chunks_exact(la))
        .zip(b.chunks_exact(lb))
    {
        dst[..la].copy_from_slice(a);
        dst[la..].copy_from_slice(b);
    }
    ImageTensor::with_data(c1, h, w, data)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::{derive_stream, SeedSpec};

    fn ramp(c: usize, h: usize, w: usize) -> ImageTensor {
        ImageTensor::from_fn(c, h, w, |c, y, x| (c * 97 + y * 13 + x * 7) as u8).unwrap()
    }

    #[test]
    fn rejects_bad_shapes() {
        assert!(ImageTensor::new(3, 1, 4, vec![0; 12]).is_err());
        assert!(ImageTensor::new(0, 4, 4, vec![]).is_err());
        assert!(ImageTensor::new(3, 4, 4, vec![0; 47]).is_err());
    }

    #[test]
    fn half_cut_of_cifar_shape() {
        let img = ramp(3, 32, 32);
        let (a, b) = cut(&img, Axis::Height, 0.5).unwrap();
        assert_eq!(a.image.shape(), (3, 16, 32));
        assert_eq!(b.image.shape(), (3, 16, 32));
        assert_eq!(b.origin.offset, 16);
    }

    #[test]
    fn width_cut_of_zero_image() {
        let img = ImageTensor::filled(3, 4, 4, 0).unwrap();
        let (a, b) = cut(&img, Axis::Width, 0.5).unwrap();
        assert_eq!(a.image.shape(), (3, 4, 2));
        assert!(a.image.data().iter().chain(b.image.data()).all(|&v| v == 0));
    }

    #[test]
    fn quarter_cut_heights() {
        let img = ramp(3, 32, 32);
        let (a, b) = cut(&img, Axis::Height, 0.25).unwrap();
        assert_eq!((a.image.height(), b.image.height()), (8, 24));
    }

    #[test]
    fn odd_extent_first_piece_is_smaller() {
        let img = ramp(1, 5, 4);
        let (a, b) = cut(&img, Axis::Height, 0.5).unwrap();
        assert_eq!((a.image.height(), b.image.height()), (2, 3));
        assert_eq!(split_boundary(0.5, 7), 3);
        assert_eq!(split_boundary(0.8, 5), 4);
        assert_eq!(split_boundary(0.75, 32), 24);
    }

    #[test]
    fn degenerate_fraction_rejected() {
        let img = ramp(1, 2, 2);
        assert!(matches!(cut(&img, Axis::Height, 0.1), Err(Error::InvalidGeometry(_))));
        assert!(matches!(cut(&img, Axis::Height, 1.0), Err(Error::InvalidGeometry(_))));
        assert!(matches!(cut(&img, Axis::Width, 0.0), Err(Error::InvalidGeometry(_))));
    }

    #[test]
    fn uneven_concat_places_first_piece_on_top() {
        let img = ramp(3, 32, 32);
        let (a, b) = cut(&img, Axis::Height, 0.25).unwrap();
        let out = concat(&a, &b, Axis::Height).unwrap();
        assert_eq!(out.height(), 32);
        for c in 0..3 {
            for y in 0..8 {
                for x in 0..32 {
                    assert_eq!(out.get(c, y, x), a.image.get(c, y, x));
                }
            }
        }
        assert_eq!(out, img);
    }

    #[test]
    fn concat_rejects_mismatch_and_order() {
        let img = ramp(3, 8, 8);
        let (a, b) = cut(&img, Axis::Height, 0.5).unwrap();
        assert!(concat(&b, &a, Axis::Height).is_err());
        assert!(concat(&a, &b, Axis::Width).is_err());
        let (_, wide) = cut(&ramp(3, 8, 6), Axis::Height, 0.5).unwrap();
        let wide = Piece {
            origin: b.origin,
            ..wide
        };
        assert!(matches!(
            concat(&a, &wide, Axis::Height),
            Err(Error::InvalidGeometry(_))
        ));
    }

    #[test]
    fn constant_mask_fills_value() {
        let img = ramp(3, 32, 32);
        let (a, _) = cut(&img, Axis::Height, 0.5).unwrap();
        let mut rng = derive_stream(SeedSpec::new(0, 0));
        let m = mask_noise(&a, NoiseKind::Constant(0), &mut rng).unwrap();
        assert_eq!(m.image.shape(), a.image.shape());
        assert!(m.image.data().iter().all(|&v| v == 0));
        assert_eq!(m.provenance, Provenance::Masked);
    }

    #[test]
    fn uniform_mask_replays() {
        let img = ramp(3, 32, 32);
        let (a, _) = cut(&img, Axis::Height, 0.5).unwrap();
        let run = || {
            let mut rng = derive_stream(SeedSpec::new(42, 0));
            mask_noise(&a, NoiseKind::UniformPerPixel, &mut rng).unwrap()
        };
        assert_eq!(run(), run());
    }

    #[test]
    fn uniform_mask_mean() {
        let piece = cut(&ramp(3, 32, 32), Axis::Height, 0.5).unwrap().0;
        let mut rng = derive_stream(SeedSpec::new(9, 9));
        let mut total = 0u64;
        let mut count = 0u64;
        while count < 1_000_000 {
            let m = mask_noise(&piece, NoiseKind::UniformPerPixel, &mut rng).unwrap();
            total += m.image.data().iter().map(|&v| v as u64).sum::<u64>();
            count += m.image.data().len() as u64;
        }
        let mean = total as f64 / count as f64;
        assert!((126.0..=129.0).contains(&mean), "mean {mean}");
    }

    #[test]
    fn gaussian_noise_validation_and_parse() {
        assert!(NoiseKind::parse("gaussian:128:0").is_err());
        assert_eq!(
            NoiseKind::parse("gaussian:128:20").unwrap(),
            NoiseKind::GaussianClamped {
                mean: 128,
                stddev: 20.0
            }
        );
        assert_eq!(NoiseKind::parse("constant:7").unwrap(), NoiseKind::Constant(7));
        assert_eq!(NoiseKind::parse("uniform").unwrap(), NoiseKind::UniformPerPixel);
        assert!(NoiseKind::parse("pink").is_err());
        for n in ["uniform", "constant:3", "gaussian:10:2.5"] {
            assert_eq!(NoiseKind::parse(n).unwrap().to_string(), n);
        }
    }
}
