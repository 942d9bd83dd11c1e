//! Photometric adjustments: color jitter and the pixel-level ops of the
//! primitive bank.
//!
//! Blends run in `f32` on the `[0, 255]` scale, clamp after each step and
//! round once when converting back to bytes.

use crate::error::{Error, Result};
use crate::image::ImageTensor;
use crate::rng::RngStream;

/// Float working copy of an image.
#[derive(Debug, Clone)]
struct FloatImage {
    channels: usize,
    plane: usize,
    data: Vec<f32>,
}

impl FloatImage {
    fn from_bytes(image: &ImageTensor) -> Self {
        FloatImage {
            channels: image.channels(),
            plane: image.plane_len(),
            data: image.data().iter().map(|&b| b as f32).collect(),
        }
    }

    fn to_bytes(&self, like: &ImageTensor) -> ImageTensor {
        let mut out = like.clone();
        for (dst, &v) in out.data_mut().iter_mut().zip(&self.data) {
            *dst = v.round().clamp(0.0, 255.0) as u8;
        }
        out
    }

    fn is_rgb(&self) -> bool {
        self.channels == 3
    }

    fn gray_at(&self, i: usize) -> f32 {
        let p = self.plane;
        0.299 * self.data[i] + 0.587 * self.data[p + i] + 0.114 * self.data[2 * p + i]
    }

    fn mean_gray(&self) -> f32 {
        if self.is_rgb() {
            let sum: f64 = (0..self.plane).map(|i| self.gray_at(i) as f64).sum();
            (sum / self.plane as f64) as f32
        } else {
            let sum: f64 = self.data.iter().map(|&v| v as f64).sum();
            (sum / self.data.len() as f64) as f32
        }
    }

    fn clamp(&mut self) {
        for v in &mut self.data {
            *v = v.clamp(0.0, 255.0);
        }
    }

    fn brightness(&mut self, factor: f32) {
        for v in &mut self.data {
            *v *= factor;
        }
        self.clamp();
    }

    fn contrast(&mut self, factor: f32) {
        let mean = self.mean_gray();
        for v in &mut self.data {
            *v = factor * *v + (1.0 - factor) * mean;
        }
        self.clamp();
    }

    fn saturation(&mut self, factor: f32) {
        if !self.is_rgb() {
            return;
        }
        let p = self.plane;
        for i in 0..p {
            let gray = self.gray_at(i);
            for c in 0..3 {
                let v = &mut self.data[c * p + i];
                *v = factor * *v + (1.0 - factor) * gray;
            }
        }
        self.clamp();
    }

    fn hue(&mut self, shift: f32) {
        if !self.is_rgb() || shift == 0.0 {
            return;
        }
        let p = self.plane;
        for i in 0..p {
            let (h, s, v) = rgb_to_hsv(
                self.data[i] / 255.0,
                self.data[p + i] / 255.0,
                self.data[2 * p + i] / 255.0,
            );
            let (r, g, b) = hsv_to_rgb((h + shift).rem_euclid(1.0), s, v);
            self.data[i] = r * 255.0;
            self.data[p + i] = g * 255.0;
            self.data[2 * p + i] = b * 255.0;
        }
        self.clamp();
    }
}

/// Hue in turns `[0, 1)`.
fn rgb_to_hsv(r: f32, g: f32, b: f32) -> (f32, f32, f32) {
    let max = r.max(g).max(b);
    let min = r.min(g).min(b);
    let delta = max - min;
    let s = if max > 0.0 { delta / max } else { 0.0 };
    let h = if delta == 0.0 {
        0.0
    } else if max == r {
        ((g - b) / delta).rem_euclid(6.0) / 6.0
    } else if max == g {
        ((b - r) / delta + 2.0) / 6.0
    } else {
        ((r - g) / delta + 4.0) / 6.0
    };
    (h, s, max)
}

fn hsv_to_rgb(h: f32, s: f32, v: f32) -> (f32, f32, f32) {
    let h6 = h * 6.0;
    let sector = h6.floor();
    let f = h6 - sector;
    let p = v * (1.0 - s);
    let q = v * (1.0 - s * f);
    let t = v * (1.0 - s * (1.0 - f));
    match sector as i32 % 6 {
        0 => (v, t, p),
        1 => (q, v, p),
        2 => (p, v, t),
        3 => (p, q, v),
        4 => (t, p, v),
        _ => (v, p, q),
    }
}

/// Multiplies every byte by `factor`.
pub fn adjust_brightness(image: &ImageTensor, factor: f64) -> ImageTensor {
    let mut f = FloatImage::from_bytes(image);
    f.brightness(factor as f32);
    f.to_bytes(image)
}

/// Blends toward the mean gray level.
pub fn adjust_contrast(image: &ImageTensor, factor: f64) -> ImageTensor {
    let mut f = FloatImage::from_bytes(image);
    f.contrast(factor as f32);
    f.to_bytes(image)
}

/// Blends each pixel toward its own gray level. No-op unless the image is RGB.
pub fn adjust_saturation(image: &ImageTensor, factor: f64) -> ImageTensor {
    let mut f = FloatImage::from_bytes(image);
    f.saturation(factor as f32);
    f.to_bytes(image)
}

/// Rotates hue by `shift` turns. No-op unless the image is RGB.
pub fn adjust_hue(image: &ImageTensor, shift: f64) -> ImageTensor {
    let mut f = FloatImage::from_bytes(image);
    f.hue(shift as f32);
    f.to_bytes(image)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JitterParams {
    pub brightness: f64,
    pub contrast: f64,
    pub saturation: f64,
    pub hue: f64,
}

impl Default for JitterParams {
    fn default() -> Self {
        JitterParams {
            brightness: 0.4,
            contrast: 0.4,
            saturation: 0.4,
            hue: 0.1,
        }
    }
}

impl JitterParams {
    pub fn validate(&self) -> Result<()> {
        let factors = [self.brightness, self.contrast, self.saturation, self.hue];
        if factors.iter().any(|f| !f.is_finite() || *f < 0.0) {
            return Err(Error::argument(format!(
                "jitter factors must be finite and >= 0: {self:?}"
            )));
        }
        if self.hue > 0.5 {
            return Err(Error::argument(format!("jitter hue {} > 0.5", self.hue)));
        }
        Ok(())
    }
}

fn factor_range(f: f64) -> (f64, f64) {
    ((1.0 - f).max(0.0), 1.0 + f)
}

/// Applies brightness, contrast, saturation and hue in an rng-shuffled order.
pub fn color_jitter(
    image: &ImageTensor,
    params: &JitterParams,
    rng: &mut RngStream,
) -> Result<ImageTensor> {
    params.validate()?;
    let mut order = [0usize, 1, 2, 3];
    for i in (1..order.len()).rev() {
        let j = rng.next_index(i + 1)?;
        order.swap(i, j);
    }
    let sample = |rng: &mut RngStream, (lo, hi): (f64, f64)| rng.next_range(lo, hi) as f32;
    let b = sample(rng, factor_range(params.brightness));
    let c = sample(rng, factor_range(params.contrast));
    let s = sample(rng, factor_range(params.saturation));
    let h = sample(rng, (-params.hue, params.hue));

    let mut f = FloatImage::from_bytes(image);
    for op in order {
        match op {
            0 => f.brightness(b),
            1 => f.contrast(c),
            2 => f.saturation(s),
            _ => f.hue(h),
        }
    }
    Ok(f.to_bytes(image))
}

pub fn invert(image: &ImageTensor) -> ImageTensor {
    let mut out = image.clone();
    for v in out.data_mut() {
        *v = 255 - *v;
    }
    out
}

/// Inverts every byte `>= threshold`.
pub fn solarize(image: &ImageTensor, threshold: f64) -> ImageTensor {
    let mut out = image.clone();
    for v in out.data_mut() {
        if *v as f64 >= threshold {
            *v = 255 - *v;
        }
    }
    out
}

/// Keeps the top `bits` bits of each byte.
pub fn posterize(image: &ImageTensor, bits: u8) -> ImageTensor {
    let mask = if bits >= 8 { 0xFF } else { !(0xFFu8 >> bits) };
    let mut out = image.clone();
    for v in out.data_mut() {
        *v &= mask;
    }
    out
}

/// Per-channel linear stretch of `[min, max]` onto `[0, 255]`.
pub fn autocontrast(image: &ImageTensor) -> ImageTensor {
    let mut out = image.clone();
    for c in 0..image.channels() {
        let plane = out.plane_mut(c);
        let lo = *plane.iter().min().unwrap();
        let hi = *plane.iter().max().unwrap();
        if hi == lo {
            continue;
        }
        let scale = 255.0 / (hi - lo) as f64;
        for v in plane {
            *v = ((*v - lo) as f64 * scale).round().clamp(0.0, 255.0) as u8;
        }
    }
    out
}

/// Per-channel histogram equalization (the PIL lookup-table construction).
pub fn equalize(image: &ImageTensor) -> ImageTensor {
    let mut out = image.clone();
    for c in 0..image.channels() {
        let plane = out.plane_mut(c);
        let mut hist = [0usize; 256];
        for &v in plane.iter() {
            hist[v as usize] += 1;
        }
        let last_nonzero = hist.iter().rev().find(|&&n| n > 0).copied().unwrap_or(0);
        let step = (plane.len() - last_nonzero) / 255;
        if step == 0 {
            continue;
        }
        let mut lut = [0u8; 256];
        let mut acc = step / 2;
        for (entry, &count) in lut.iter_mut().zip(hist.iter()) {
            *entry = (acc / step).min(255) as u8;
            acc += count;
        }
        for v in plane {
            *v = lut[*v as usize];
        }
    }
    out
}

/// Blend toward the per-pixel gray image. No-op unless RGB.
pub fn color_balance(image: &ImageTensor, factor: f64) -> ImageTensor {
    adjust_saturation(image, factor)
}

/// Blend toward a 3x3 smoothed copy; border pixels keep their values.
pub fn sharpness(image: &ImageTensor, factor: f64) -> ImageTensor {
    let (_, h, w) = image.shape();
    if h < 3 || w < 3 {
        return image.clone();
    }
    let mut out = image.clone();
    let factor = factor as f32;
    for c in 0..image.channels() {
        let src = image.plane(c);
        let dst = out.plane_mut(c);
        for y in 1..h - 1 {
            for x in 1..w - 1 {
                let mut sum = 0u32;
                for yy in y - 1..=y + 1 {
                    for xx in x - 1..=x + 1 {
                        sum += src[yy * w + xx] as u32;
                    }
                }
                let center = src[y * w + x] as u32;
                let smooth = ((sum + 4 * center) as f32 / 13.0).round();
                let v = smooth + factor * (center as f32 - smooth);
                dst[y * w + x] = v.round().clamp(0.0, 255.0) as u8;
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::{derive_stream, SeedSpec};

    fn colorful() -> ImageTensor {
        ImageTensor::from_fn(3, 6, 7, |c, y, x| ((c * 71 + y * 29 + x * 17) % 256) as u8).unwrap()
    }

    #[test]
    fn brightness_doubles_gray() {
        let img = ImageTensor::filled(3, 4, 4, 100).unwrap();
        let out = adjust_brightness(&img, 2.0);
        assert!(out.data().iter().all(|&v| v == 200));
        let sat = adjust_brightness(&ImageTensor::filled(1, 2, 2, 200).unwrap(), 2.0);
        assert!(sat.data().iter().all(|&v| v == 255));
    }

    #[test]
    fn neutral_jitter_is_near_identity() {
        let img = colorful();
        let params = JitterParams {
            brightness: 0.0,
            contrast: 0.0,
            saturation: 0.0,
            hue: 0.0,
        };
        for seed in 0..20 {
            let mut rng = derive_stream(SeedSpec::new(seed, 0));
            let out = color_jitter(&img, &params, &mut rng).unwrap();
            for (a, b) in img.data().iter().zip(out.data()) {
                assert!((*a as i32 - *b as i32).abs() <= 1);
            }
        }
    }

    #[test]
    fn hue_round_trip_is_near_identity() {
        let img = colorful();
        let back = adjust_hue(&adjust_hue(&img, 0.25), -0.25);
        for (a, b) in img.data().iter().zip(back.data()) {
            assert!((*a as i32 - *b as i32).abs() <= 1);
        }
    }

    #[test]
    fn hue_shift_of_pure_red_by_third_is_green() {
        let img = ImageTensor::from_fn(3, 2, 2, |c, _, _| if c == 0 { 255 } else { 0 }).unwrap();
        let out = adjust_hue(&img, 1.0 / 3.0);
        assert_eq!(out.plane(0), &[0; 4]);
        assert_eq!(out.plane(1), &[255; 4]);
        assert_eq!(out.plane(2), &[0; 4]);
    }

    #[test]
    fn jitter_rejects_bad_factors() {
        let img = colorful();
        let mut rng = derive_stream(SeedSpec::new(0, 0));
        for p in [
            JitterParams {
                hue: 0.6,
                ..Default::default()
            },
            JitterParams {
                brightness: -0.1,
                ..Default::default()
            },
        ] {
            assert!(matches!(
                color_jitter(&img, &p, &mut rng),
                Err(Error::InvalidArgument(_))
            ));
        }
    }

    #[test]
    fn zero_contrast_gives_flat_image() {
        let out = adjust_contrast(&colorful(), 0.0);
        let first = out.data()[0];
        assert!(out.data().iter().all(|&v| v == first));
    }

    #[test]
    fn posterize_keeps_top_bits() {
        let img = ImageTensor::filled(1, 2, 2, 0b1011_0111).unwrap();
        assert!(posterize(&img, 4).data().iter().all(|&v| v == 0b1011_0000));
        assert_eq!(posterize(&img, 8), img);
    }

    #[test]
    fn solarize_zero_inverts_everything() {
        let img = colorful();
        assert_eq!(solarize(&img, 0.0), invert(&img));
        assert_eq!(invert(&invert(&img)), img);
    }

    #[test]
    fn autocontrast_stretches() {
        let img = ImageTensor::new(1, 2, 2, vec![50, 110, 150, 110]).unwrap();
        assert_eq!(autocontrast(&img).data(), &[0, 153, 255, 153]);
        let flat = ImageTensor::filled(1, 2, 2, 9).unwrap();
        assert_eq!(autocontrast(&flat), flat);
    }

    #[test]
    fn equalize_spreads_two_levels() {
        let img = ImageTensor::new(1, 2, 4, vec![10, 10, 10, 10, 20, 20, 20, 20]).unwrap();
        // hist: 4 at 10, 4 at 20; step = (8 - 4) / 255 = 0 -> unchanged
        assert_eq!(equalize(&img), img);
        let ramp = ImageTensor::from_fn(1, 32, 32, |_, y, x| ((y * 32 + x) / 8) as u8).unwrap();
        let eq = equalize(&ramp);
        assert_eq!(*eq.data().iter().max().unwrap(), 255);
        assert_eq!(*eq.data().iter().min().unwrap(), 0);
    }

    #[test]
    fn sharpness_one_is_identity() {
        let img = colorful();
        assert_eq!(sharpness(&img, 1.0), img);
    }
}
