//! Patch-level image augmentation.
//!
//! An image is cut in two along its height or width; one piece is replaced
//! with noise and the other is augmented on its own, then the two are joined
//! back in place. Every random decision comes from streams derived from a
//! global seed and the image index, so runs replay byte for byte regardless
//! of thread count.
//!
//! ```
//! use yona_core::{AugmentationSpec, Composition, ImageTensor, Pipeline, YonaConfig};
//!
//! let image = ImageTensor::filled(3, 32, 32, 128).unwrap();
//! let pipeline = Pipeline::new(AugmentationSpec::hflip(), Composition::Yona(YonaConfig::default()));
//! let out = pipeline.apply(&image, 7, 0).unwrap();
//! assert_eq!(out.shape(), image.shape());
//! assert_eq!(out, pipeline.apply(&image, 7, 0).unwrap());
//! ```

pub mod augment;
pub mod compositor;
pub mod dataset;
pub mod error;
pub mod eval;
pub mod image;
pub mod parallel;
pub mod rng;

pub use augment::{apply_augmentation, AugmentKind, AugmentationSpec, PolicyTable, PrimitiveKind, PrimitiveOp};
pub use compositor::{
    yoco_apply, yona_apply, yona_apply_fraction, AxisPolicy, Composition, MaskedPiecePolicy, Pipeline,
    RegionScale, YonaConfig, YonaTrace,
};
pub use error::{Error, Result};
pub use image::{concat, cut, mask_noise, Axis, ImageTensor, NoiseKind, Piece};
pub use parallel::Execution;
pub use rng::{derive_stream, RngStream, SeedSpec};
