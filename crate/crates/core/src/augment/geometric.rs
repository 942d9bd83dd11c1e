//! Flips and inverse-mapped affine warps with nearest-neighbor sampling.

use crate::image::ImageTensor;

/// Mirror left-right: `(c, y, x) -> (c, y, W-1-x)`.
pub fn hflip(image: &ImageTensor) -> ImageTensor {
    let (c, h, w) = image.shape();
    let mut data = vec![0u8; c * h * w];
    for (dst, src) in data.chunks_exact_mut(w).zip(image.data().chunks_exact(w)) {
        for (d, s) in dst.iter_mut().zip(src.iter().rev()) {
            *d = *s;
        }
    }
    ImageTensor::with_data(c, h, w, data).expect("same shape")
}

/// Mirror top-bottom: `(c, y, x) -> (c, H-1-y, x)`.
pub fn vflip(image: &ImageTensor) -> ImageTensor {
    let mut out = image.clone();
    let (_, h, w) = image.shape();
    for (dst, src) in out
        .data_mut()
        .chunks_exact_mut(h * w)
        .zip(image.data().chunks_exact(h * w))
    {
        for y in 0..h {
            dst[y * w..(y + 1) * w].copy_from_slice(&src[(h - 1 - y) * w..(h - y) * w]);
        }
    }
    out
}

/// An axis-aligned sub-rectangle `[y0, y0+h) x [x0, x0+w)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Rect {
    pub y0: usize,
    pub x0: usize,
    pub height: usize,
    pub width: usize,
}

impl Rect {
    pub fn full(image: &ImageTensor) -> Rect {
        Rect {
            y0: 0,
            x0: 0,
            height: image.height(),
            width: image.width(),
        }
    }

    pub fn contains(&self, y: usize, x: usize) -> bool {
        y >= self.y0 && y < self.y0 + self.height && x >= self.x0 && x < self.x0 + self.width
    }
}

/// What a source coordinate outside the warped region samples.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Border {
    Constant(u8),
    /// Mirror about the region edges, edge pixels repeated (`cba|abcd|dcb`).
    Reflect,
}

/// Maps an output offset from the region center to a source offset:
/// `src = [a b; c d] * dst + [tx, ty]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InverseAffine {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
    pub tx: f64,
    pub ty: f64,
}

impl InverseAffine {
    pub const IDENTITY: InverseAffine = InverseAffine {
        a: 1.0,
        b: 0.0,
        c: 0.0,
        d: 1.0,
        tx: 0.0,
        ty: 0.0,
    };

    /// Rotation by `degrees` (counter-clockwise on screen) about the center.
    pub fn rotation(degrees: f64) -> Self {
        let (sin, cos) = degrees.to_radians().sin_cos();
        InverseAffine {
            a: cos,
            b: -sin,
            c: sin,
            d: cos,
            ..Self::IDENTITY
        }
    }

    pub fn shear_x(factor: f64) -> Self {
        InverseAffine {
            b: factor,
            ..Self::IDENTITY
        }
    }

    pub fn shear_y(factor: f64) -> Self {
        InverseAffine {
            c: factor,
            ..Self::IDENTITY
        }
    }

    /// Content moves by `(dx, dy)` pixels.
    pub fn translation(dx: f64, dy: f64) -> Self {
        InverseAffine {
            tx: -dx,
            ty: -dy,
            ..Self::IDENTITY
        }
    }
}

fn reflect(i: i64, n: usize) -> usize {
    let n = n as i64;
    let period = 2 * n;
    let m = i.rem_euclid(period);
    (if m >= n { period - 1 - m } else { m }) as usize
}

/// Warps the pixels of `rect`; pixels outside `rect` are left untouched.
pub fn warp_region(
    image: &ImageTensor,
    rect: Rect,
    transform: InverseAffine,
    border: Border,
) -> ImageTensor {
    let mut out = image.clone();
    let cy = (rect.height as f64 - 1.0) / 2.0;
    let cx = (rect.width as f64 - 1.0) / 2.0;
    // Per-pixel source lookup shared across channels.
    let mut sources: Vec<Option<(usize, usize)>> = Vec::with_capacity(rect.height * rect.width);
    for y in 0..rect.height {
        let dy = y as f64 - cy;
        for x in 0..rect.width {
            let dx = x as f64 - cx;
            let sx = (transform.a * dx + transform.b * dy + transform.tx + cx).round() as i64;
            let sy = (transform.c * dx + transform.d * dy + transform.ty + cy).round() as i64;
            let inside =
                sx >= 0 && sy >= 0 && (sx as usize) < rect.width && (sy as usize) < rect.height;
            sources.push(match (inside, border) {
                (true, _) => Some((sy as usize, sx as usize)),
                (false, Border::Reflect) => {
                    Some((reflect(sy, rect.height), reflect(sx, rect.width)))
                }
                (false, Border::Constant(_)) => None,
            });
        }
    }
    let fill = match border {
        Border::Constant(v) => v,
        Border::Reflect => 0,
    };
    for c in 0..image.channels() {
        for y in 0..rect.height {
            for x in 0..rect.width {
                let v = match sources[y * rect.width + x] {
                    Some((sy, sx)) => image.get(c, rect.y0 + sy, rect.x0 + sx),
                    None => fill,
                };
                out.set(c, rect.y0 + y, rect.x0 + x, v);
            }
        }
    }
    out
}

pub fn warp(image: &ImageTensor, transform: InverseAffine, fill: u8) -> ImageTensor {
    warp_region(image, Rect::full(image), transform, Border::Constant(fill))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> ImageTensor {
        ImageTensor::from_fn(3, 8, 8, |c, y, x| (c * 64 + y * 8 + x) as u8).unwrap()
    }

    #[test]
    fn hflip_row() {
        let img = ImageTensor::new(1, 2, 3, vec![1, 2, 3, 4, 5, 6]).unwrap();
        assert_eq!(hflip(&img).data(), &[3, 2, 1, 6, 5, 4]);
    }

    #[test]
    fn symmetric_image_is_hflip_fixed_point() {
        let img = ImageTensor::from_fn(3, 4, 6, |c, y, x| (c + y + x.min(5 - x)) as u8).unwrap();
        assert_eq!(hflip(&img), img);
    }

    #[test]
    fn flips_commute_and_involute() {
        let img = sample();
        assert_eq!(hflip(&vflip(&img)), vflip(&hflip(&img)));
        assert_eq!(hflip(&hflip(&img)), img);
        assert_eq!(vflip(&vflip(&img)), img);
        assert_eq!(vflip(&img).get(1, 0, 3), img.get(1, 7, 3));
    }

    #[test]
    fn zero_transforms_are_identity() {
        let img = sample();
        for t in [
            InverseAffine::rotation(0.0),
            InverseAffine::shear_x(0.0),
            InverseAffine::shear_y(0.0),
            InverseAffine::translation(0.0, 0.0),
        ] {
            assert_eq!(warp(&img, t, 0), img);
        }
    }

    #[test]
    fn translation_shifts_and_fills() {
        let img = sample();
        let out = warp(&img, InverseAffine::translation(2.0, 0.0), 0);
        for y in 0..8 {
            assert_eq!(out.get(0, y, 0), 0);
            assert_eq!(out.get(0, y, 1), 0);
            assert_eq!(out.get(0, y, 5), img.get(0, y, 3));
        }
    }

    #[test]
    fn quarter_turn_on_square_is_exact() {
        let img = sample();
        let out = warp(&img, InverseAffine::rotation(90.0), 0);
        let back = warp(&out, InverseAffine::rotation(-90.0), 0);
        assert_eq!(back, img);
        assert_ne!(out, img);
    }

    #[test]
    fn reflect_indices() {
        let got: Vec<usize> = (-4..8).map(|i| reflect(i, 4)).collect();
        assert_eq!(got, vec![3, 2, 1, 0, 0, 1, 2, 3, 3, 2, 1, 0]);
        assert_eq!(reflect(-3, 1), 0);
    }

    #[test]
    fn region_warp_stays_in_region() {
        let img = sample();
        let rect = Rect {
            y0: 4,
            x0: 0,
            height: 4,
            width: 4,
        };
        let out = warp_region(&img, rect, InverseAffine::rotation(15.0), Border::Reflect);
        for c in 0..3 {
            for y in 0..8 {
                for x in 0..8 {
                    if !rect.contains(y, x) {
                        assert_eq!(out.get(c, y, x), img.get(c, y, x));
                    }
                }
            }
        }
    }
}
