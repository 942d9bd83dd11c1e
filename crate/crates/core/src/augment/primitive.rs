//! The 14-operation bank shared by RandAugment and AutoAugment.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::image::ImageTensor;
use crate::rng::RngStream;

use super::color;
use super::geometric::{warp, InverseAffine};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PrimitiveKind {
    ShearX,
    ShearY,
    TranslateX,
    TranslateY,
    Rotate,
    AutoContrast,
    Invert,
    Equalize,
    Solarize,
    Posterize,
    Contrast,
    Color,
    Brightness,
    Sharpness,
}

impl PrimitiveKind {
    pub const ALL: [PrimitiveKind; 14] = [
        PrimitiveKind::ShearX,
        PrimitiveKind::ShearY,
        PrimitiveKind::TranslateX,
        PrimitiveKind::TranslateY,
        PrimitiveKind::Rotate,
        PrimitiveKind::AutoContrast,
        PrimitiveKind::Invert,
        PrimitiveKind::Equalize,
        PrimitiveKind::Solarize,
        PrimitiveKind::Posterize,
        PrimitiveKind::Contrast,
        PrimitiveKind::Color,
        PrimitiveKind::Brightness,
        PrimitiveKind::Sharpness,
    ];

    pub fn name(self) -> &'static str {
        match self {
            PrimitiveKind::ShearX => "ShearX",
            PrimitiveKind::ShearY => "ShearY",
            PrimitiveKind::TranslateX => "TranslateX",
            PrimitiveKind::TranslateY => "TranslateY",
            PrimitiveKind::Rotate => "Rotate",
            PrimitiveKind::AutoContrast => "AutoContrast",
            PrimitiveKind::Invert => "Invert",
            PrimitiveKind::Equalize => "Equalize",
            PrimitiveKind::Solarize => "Solarize",
            PrimitiveKind::Posterize => "Posterize",
            PrimitiveKind::Contrast => "Contrast",
            PrimitiveKind::Color => "Color",
            PrimitiveKind::Brightness => "Brightness",
            PrimitiveKind::Sharpness => "Sharpness",
        }
    }

    pub fn is_geometric(self) -> bool {
        matches!(
            self,
            PrimitiveKind::ShearX
                | PrimitiveKind::ShearY
                | PrimitiveKind::TranslateX
                | PrimitiveKind::TranslateY
                | PrimitiveKind::Rotate
        )
    }

    /// Whether the magnitude gets a random sign when sampled from a level.
    pub fn is_signed(self) -> bool {
        self.is_geometric()
            || matches!(
                self,
                PrimitiveKind::Contrast
                    | PrimitiveKind::Color
                    | PrimitiveKind::Brightness
                    | PrimitiveKind::Sharpness
            )
    }

    /// Inclusive magnitude range on the op's own scale.
    ///
    /// Shear: factor. Translate: fraction of the image extent. Rotate:
    /// degrees. Solarize: threshold. Posterize: bits kept. Enhance ops:
    /// blend factor (1 = identity). Parameterless ops take 0.
    pub fn magnitude_range(self) -> (f64, f64) {
        match self {
            PrimitiveKind::ShearX | PrimitiveKind::ShearY => (-0.3, 0.3),
            PrimitiveKind::TranslateX | PrimitiveKind::TranslateY => (-0.45, 0.45),
            PrimitiveKind::Rotate => (-30.0, 30.0),
            PrimitiveKind::AutoContrast | PrimitiveKind::Invert | PrimitiveKind::Equalize => {
                (0.0, 0.0)
            }
            PrimitiveKind::Solarize => (0.0, 255.0),
            PrimitiveKind::Posterize => (4.0, 8.0),
            PrimitiveKind::Contrast
            | PrimitiveKind::Color
            | PrimitiveKind::Brightness
            | PrimitiveKind::Sharpness => (0.1, 1.9),
        }
    }

    /// Magnitude at `level` on a `0..=max_level` scale, before any sign flip.
    fn magnitude_at(self, level: f64, max_level: f64) -> f64 {
        let t = (level / max_level).clamp(0.0, 1.0);
        match self {
            PrimitiveKind::ShearX | PrimitiveKind::ShearY => 0.3 * t,
            PrimitiveKind::TranslateX | PrimitiveKind::TranslateY => 0.45 * t,
            PrimitiveKind::Rotate => 30.0 * t,
            PrimitiveKind::AutoContrast | PrimitiveKind::Invert | PrimitiveKind::Equalize => 0.0,
            PrimitiveKind::Solarize => 255.0 * (1.0 - t),
            PrimitiveKind::Posterize => 8.0 - (4.0 * t).round(),
            PrimitiveKind::Contrast
            | PrimitiveKind::Color
            | PrimitiveKind::Brightness
            | PrimitiveKind::Sharpness => 0.9 * t,
        }
    }

    /// The concrete op for `level` out of `max_level`. Signed ops flip
    /// direction on a fair coin from `rng`; unsigned ops draw nothing.
    pub fn at_level(self, level: f64, max_level: f64, rng: &mut RngStream) -> PrimitiveOp {
        let base = self.magnitude_at(level, max_level);
        let negate = self.is_signed() && rng.next_unit_uniform() < 0.5;
        let signed = if negate { -base } else { base };
        let magnitude = match self {
            PrimitiveKind::Contrast
            | PrimitiveKind::Color
            | PrimitiveKind::Brightness
            | PrimitiveKind::Sharpness => 1.0 + signed,
            _ => signed,
        };
        PrimitiveOp {
            kind: self,
            magnitude,
        }
    }
}

impl fmt::Display for PrimitiveKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for PrimitiveKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        PrimitiveKind::ALL
            .iter()
            .copied()
            .find(|k| k.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::argument(format!("unknown primitive op `{s}`")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PrimitiveOp {
    pub kind: PrimitiveKind,
    pub magnitude: f64,
}

impl PrimitiveOp {
    pub fn new(kind: PrimitiveKind, magnitude: f64) -> Result<Self> {
        let op = PrimitiveOp { kind, magnitude };
        op.validate()?;
        Ok(op)
    }

    pub fn validate(&self) -> Result<()> {
        let (lo, hi) = self.kind.magnitude_range();
        if !(self.magnitude >= lo - 1e-9 && self.magnitude <= hi + 1e-9) {
            return Err(Error::argument(format!(
                "{} magnitude {} outside [{lo}, {hi}]",
                self.kind, self.magnitude
            )));
        }
        if self.kind == PrimitiveKind::Posterize && self.magnitude.fract() != 0.0 {
            return Err(Error::argument(format!(
                "posterize bits must be an integer, got {}",
                self.magnitude
            )));
        }
        Ok(())
    }
}

/// Applies one primitive. Geometric ops are inverse-mapped affine warps
/// about the image center with nearest-neighbor sampling and zero fill.
pub fn apply_primitive(op: PrimitiveOp, image: &ImageTensor) -> Result<ImageTensor> {
    op.validate()?;
    let m = op.magnitude;
    let out = match op.kind {
        PrimitiveKind::ShearX => warp(image, InverseAffine::shear_x(m), 0),
        PrimitiveKind::ShearY => warp(image, InverseAffine::shear_y(m), 0),
        PrimitiveKind::TranslateX => {
            let dx = (m * image.width() as f64).round();
            warp(image, InverseAffine::translation(dx, 0.0), 0)
        }
        PrimitiveKind::TranslateY => {
            let dy = (m * image.height() as f64).round();
            warp(image, InverseAffine::translation(0.0, dy), 0)
        }
        PrimitiveKind::Rotate => warp(image, InverseAffine::rotation(m), 0),
        PrimitiveKind::AutoContrast => color::autocontrast(image),
        PrimitiveKind::Invert => color::invert(image),
        PrimitiveKind::Equalize => color::equalize(image),
        PrimitiveKind::Solarize => color::solarize(image, m),
        PrimitiveKind::Posterize => color::posterize(image, m as u8),
        PrimitiveKind::Contrast => color::adjust_contrast(image, m),
        PrimitiveKind::Color => color::color_balance(image, m),
        PrimitiveKind::Brightness => color::adjust_brightness(image, m),
        PrimitiveKind::Sharpness => color::sharpness(image, m),
    };
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::{derive_stream, SeedSpec};

    fn img() -> ImageTensor {
        ImageTensor::from_fn(3, 12, 10, |c, y, x| ((c * 50 + y * 19 + x * 23) % 256) as u8).unwrap()
    }

    #[test]
    fn rotate_zero_is_identity() {
        let op = PrimitiveOp::new(PrimitiveKind::Rotate, 0.0).unwrap();
        assert_eq!(apply_primitive(op, &img()).unwrap(), img());
    }

    #[test]
    fn solarize_zero_is_full_inversion() {
        let op = PrimitiveOp::new(PrimitiveKind::Solarize, 0.0).unwrap();
        let out = apply_primitive(op, &img()).unwrap();
        for (a, b) in img().data().iter().zip(out.data()) {
            assert_eq!(*b, 255 - *a);
        }
    }

    #[test]
    fn posterize_four_bits() {
        let x = ImageTensor::filled(1, 2, 2, 0b1011_0111).unwrap();
        let op = PrimitiveOp::new(PrimitiveKind::Posterize, 4.0).unwrap();
        assert!(apply_primitive(op, &x).unwrap().data().iter().all(|&v| v == 0b1011_0000));
    }

    #[test]
    fn out_of_range_rejected() {
        assert!(PrimitiveOp::new(PrimitiveKind::Rotate, 31.0).is_err());
        assert!(PrimitiveOp::new(PrimitiveKind::Posterize, 3.0).is_err());
        assert!(PrimitiveOp::new(PrimitiveKind::Posterize, 5.5).is_err());
        assert!(PrimitiveOp::new(PrimitiveKind::Solarize, 256.0).is_err());
        let bad = PrimitiveOp {
            kind: PrimitiveKind::ShearX,
            magnitude: 0.5,
        };
        assert!(matches!(apply_primitive(bad, &img()), Err(Error::InvalidArgument(_))));
    }

    #[test]
    fn level_zero_geometric_ops_are_identity() {
        let mut rng = derive_stream(SeedSpec::new(0, 0));
        for kind in PrimitiveKind::ALL.iter().filter(|k| k.is_geometric()) {
            let op = kind.at_level(0.0, 30.0, &mut rng);
            assert_eq!(apply_primitive(op, &img()).unwrap(), img(), "{kind}");
        }
    }

    #[test]
    fn level_mapping_endpoints() {
        let mut rng = derive_stream(SeedSpec::new(1, 0));
        let op = PrimitiveKind::Posterize.at_level(30.0, 30.0, &mut rng);
        assert_eq!(op.magnitude, 4.0);
        let op = PrimitiveKind::Solarize.at_level(0.0, 9.0, &mut rng);
        assert_eq!(op.magnitude, 255.0);
        let op = PrimitiveKind::Rotate.at_level(9.0, 30.0, &mut rng);
        assert!((op.magnitude.abs() - 9.0).abs() < 1e-12);
        for kind in PrimitiveKind::ALL {
            for level in [0.0, 9.0, 30.0] {
                kind.at_level(level, 30.0, &mut rng).validate().unwrap();
            }
        }
    }

    #[test]
    fn names_parse() {
        for kind in PrimitiveKind::ALL {
            assert_eq!(kind.name().parse::<PrimitiveKind>().unwrap(), kind);
        }
        assert!("Blur".parse::<PrimitiveKind>().is_err());
    }

    #[test]
    fn every_op_preserves_shape() {
        let mut rng = derive_stream(SeedSpec::new(2, 0));
        for kind in PrimitiveKind::ALL {
            let op = kind.at_level(20.0, 30.0, &mut rng);
            assert_eq!(apply_primitive(op, &img()).unwrap().shape(), img().shape());
        }
    }
}
