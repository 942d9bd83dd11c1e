//! Occlusion augmentations: random erasing and cutout.

use crate::error::{Error, Result};
use crate::image::ImageTensor;
use crate::rng::RngStream;

use super::geometric::Rect;

const ERASING_ATTEMPTS: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ErasingParams {
    /// Erased area as a fraction of the reference area.
    pub scale: (f64, f64),
    /// Aspect ratio range, sampled log-uniformly.
    pub ratio: (f64, f64),
    pub fill: u8,
}

impl Default for ErasingParams {
    fn default() -> Self {
        ErasingParams {
            scale: (0.02, 0.4),
            ratio: (0.3, 3.3),
            fill: 0,
        }
    }
}

impl ErasingParams {
    pub fn validate(&self) -> Result<()> {
        let (s0, s1) = self.scale;
        let (r0, r1) = self.ratio;
        if !(s0 > 0.0 && s0 <= s1 && s1 < 1.0) {
            return Err(Error::argument(format!(
                "erasing scale {:?} must satisfy 0 < lo <= hi < 1",
                self.scale
            )));
        }
        if !(r0 > 0.0 && r0 <= r1 && r1.is_finite()) {
            return Err(Error::argument(format!(
                "erasing ratio {:?} must be a positive interval",
                self.ratio
            )));
        }
        Ok(())
    }
}

/// Chooses the rectangle random erasing would clear, if any attempt fits.
///
/// `reference_area` is the area the scale interval is relative to (normally
/// the image's own `H*W`). An attempt is rejected when the rounded rectangle
/// does not fit strictly inside the image or when its realized area falls
/// outside the scale interval.
pub fn erasing_rect(
    height: usize,
    width: usize,
    reference_area: f64,
    params: &ErasingParams,
    rng: &mut RngStream,
) -> Result<Option<Rect>> {
    params.validate()?;
    let (lo, hi) = params.scale;
    let (log_r0, log_r1) = (params.ratio.0.ln(), params.ratio.1.ln());
    for _ in 0..ERASING_ATTEMPTS {
        let target = reference_area * rng.next_range(lo, hi);
        let aspect = rng.next_range(log_r0, log_r1).exp();
        let h = (target * aspect).sqrt().round() as usize;
        let w = (target / aspect).sqrt().round() as usize;
        if h == 0 || w == 0 || h >= height || w >= width {
            continue;
        }
        let realized = (h * w) as f64 / reference_area;
        if realized < lo || realized > hi {
            continue;
        }
        let y0 = rng.next_index(height - h + 1)?;
        let x0 = rng.next_index(width - w + 1)?;
        return Ok(Some(Rect {
            y0,
            x0,
            height: h,
            width: w,
        }));
    }
    Ok(None)
}

pub fn fill_rect(image: &mut ImageTensor, rect: Rect, value: u8) {
    let w = image.width();
    for c in 0..image.channels() {
        let plane = image.plane_mut(c);
        for y in rect.y0..rect.y0 + rect.height {
            plane[y * w + rect.x0..y * w + rect.x0 + rect.width].fill(value);
        }
    }
}

/// Random erasing; returns the input unchanged when no attempt fits.
pub fn random_erasing(
    image: &ImageTensor,
    params: &ErasingParams,
    rng: &mut RngStream,
) -> Result<ImageTensor> {
    let area = image.plane_len() as f64;
    random_erasing_with_reference(image, params, area, rng)
}

pub fn random_erasing_with_reference(
    image: &ImageTensor,
    params: &ErasingParams,
    reference_area: f64,
    rng: &mut RngStream,
) -> Result<ImageTensor> {
    let mut out = image.clone();
    if let Some(rect) = erasing_rect(image.height(), image.width(), reference_area, params, rng)? {
        fill_rect(&mut out, rect, params.fill);
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CutoutParams {
    /// Square area as a fraction of the (square of the) shorter side.
    pub mask_area_fraction: f64,
    pub fill: u8,
}

impl Default for CutoutParams {
    fn default() -> Self {
        CutoutParams {
            mask_area_fraction: 0.25,
            fill: 0,
        }
    }
}

impl CutoutParams {
    pub fn validate(&self) -> Result<()> {
        let f = self.mask_area_fraction;
        if !(f > 0.0 && f < 1.0) {
            return Err(Error::argument(format!(
                "cutout area fraction {f} not in (0, 1)"
            )));
        }
        Ok(())
    }

    /// `round(sqrt(fraction) * min_side)`.
    pub fn side(&self, min_side: usize) -> usize {
        (self.mask_area_fraction.sqrt() * min_side as f64).round() as usize
    }
}

/// The square of side `side` centered on `(cy, cx)`, clipped to the image.
pub fn cutout_rect(height: usize, width: usize, side: usize, cy: usize, cx: usize) -> Option<Rect> {
    let y0 = cy as i64 - (side / 2) as i64;
    let x0 = cx as i64 - (side / 2) as i64;
    let y1 = (y0 + side as i64).min(height as i64);
    let x1 = (x0 + side as i64).min(width as i64);
    let (y0, x0) = (y0.max(0), x0.max(0));
    if y1 <= y0 || x1 <= x0 {
        return None;
    }
    Some(Rect {
        y0: y0 as usize,
        x0: x0 as usize,
        height: (y1 - y0) as usize,
        width: (x1 - x0) as usize,
    })
}

/// Zeroes (fills) a square centered at `(cy, cx)`.
pub fn cutout_at(image: &ImageTensor, side: usize, cy: usize, cx: usize, fill: u8) -> ImageTensor {
    let mut out = image.clone();
    if let Some(rect) = cutout_rect(image.height(), image.width(), side, cy, cx) {
        fill_rect(&mut out, rect, fill);
    }
    out
}

/// Cutout with a uniformly sampled center.
pub fn cutout(image: &ImageTensor, params: &CutoutParams, rng: &mut RngStream) -> Result<ImageTensor> {
    let min_side = image.height().min(image.width());
    cutout_with_reference(image, params, min_side, rng)
}

/// Cutout whose side is computed from `reference_min_side` instead of the
/// image's own shorter side.
pub fn cutout_with_reference(
    image: &ImageTensor,
    params: &CutoutParams,
    reference_min_side: usize,
    rng: &mut RngStream,
) -> Result<ImageTensor> {
    params.validate()?;
    let side = params.side(reference_min_side);
    let cy = rng.next_index(image.height())?;
    let cx = rng.next_index(image.width())?;
    Ok(cutout_at(image, side, cy, cx, params.fill))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::{derive_stream, SeedSpec};

    fn full(v: u8) -> ImageTensor {
        ImageTensor::filled(3, 32, 32, v).unwrap()
    }

    fn zero_rect(img: &ImageTensor) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for y in 0..img.height() {
            for x in 0..img.width() {
                if img.get(0, y, x) == 0 {
                    out.push((y, x));
                }
            }
        }
        out
    }

    #[test]
    fn centered_cutout_rows_8_to_24() {
        let p = CutoutParams::default();
        assert_eq!(p.side(32), 16);
        let out = cutout_at(&full(200), 16, 16, 16, 0);
        let zeros = zero_rect(&out);
        assert_eq!(zeros.len(), 256);
        assert!(zeros.iter().all(|&(y, x)| (8..24).contains(&y) && (8..24).contains(&x)));
    }

    #[test]
    fn corner_cutout_is_clipped() {
        let out = cutout_at(&full(200), 16, 0, 0, 0);
        let zeros = zero_rect(&out);
        assert_eq!(zeros.len(), 64);
        assert!(zeros.iter().all(|&(y, x)| y < 8 && x < 8));
    }

    #[test]
    fn near_full_cutout_clears_image() {
        let p = CutoutParams {
            mask_area_fraction: 0.9999,
            fill: 0,
        };
        let side = p.side(32);
        assert_eq!(side, 32);
        let out = cutout_at(&full(200), side, 16, 16, 0);
        assert!(out.data().iter().all(|&v| v == 0));
    }

    #[test]
    fn sampled_cutout_square_is_inside_and_at_most_16() {
        let p = CutoutParams::default();
        for seed in 0..200 {
            let mut rng = derive_stream(SeedSpec::new(seed, 0));
            let out = cutout(&full(200), &p, &mut rng).unwrap();
            let zeros = zero_rect(&out);
            assert!(!zeros.is_empty() && zeros.len() <= 256);
        }
    }

    #[test]
    fn fixed_scale_erasing_is_16_square() {
        let p = ErasingParams {
            scale: (0.25, 0.25),
            ratio: (1.0, 1.0),
            fill: 0,
        };
        for seed in 0..50 {
            let mut rng = derive_stream(SeedSpec::new(seed, 1));
            let rect = erasing_rect(32, 32, 1024.0, &p, &mut rng).unwrap().unwrap();
            assert_eq!((rect.height, rect.width), (16, 16));
            let mut rng = derive_stream(SeedSpec::new(seed, 1));
            let out = random_erasing(&full(7), &p, &mut rng).unwrap();
            assert_eq!(zero_rect(&out).len(), 256);
        }
    }

    #[test]
    fn default_erasing_area_within_scale() {
        let p = ErasingParams::default();
        for seed in 0..500 {
            let mut rng = derive_stream(SeedSpec::new(seed, 2));
            if let Some(rect) = erasing_rect(32, 32, 1024.0, &p, &mut rng).unwrap() {
                let frac = (rect.height * rect.width) as f64 / 1024.0;
                assert!((0.02..=0.4).contains(&frac), "{frac}");
            }
        }
    }

    #[test]
    fn erasing_gives_up_gracefully() {
        // a 2x2 image cannot hold any strictly smaller rectangle of area >= 0.9 * 4
        let img = ImageTensor::filled(1, 2, 2, 5).unwrap();
        let p = ErasingParams {
            scale: (0.9, 0.95),
            ..Default::default()
        };
        let mut rng = derive_stream(SeedSpec::new(0, 0));
        assert_eq!(random_erasing(&img, &p, &mut rng).unwrap(), img);
    }

    #[test]
    fn bad_params_rejected() {
        assert!(ErasingParams {
            scale: (0.5, 0.2),
            ..Default::default()
        }
        .validate()
        .is_err());
        assert!(ErasingParams {
            ratio: (0.0, 1.0),
            ..Default::default()
        }
        .validate()
        .is_err());
        assert!(CutoutParams {
            mask_area_fraction: 1.0,
            fill: 0
        }
        .validate()
        .is_err());
    }
}
