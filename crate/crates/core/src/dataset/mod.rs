//! Dataset ingestion and emission.

mod cifar;
mod manifest;
mod png;

use std::fs;
use std::path::Path;

pub use self::cifar::{
    encode_cifar, parse_cifar, read_cifar, synthetic_cifar, write_cifar, CifarReader, CifarRecord,
    CifarVariant, CIFAR_CHANNELS, CIFAR_PIXELS, CIFAR_SIDE,
};
pub use self::manifest::{digest_file, fnv1a64, DatasetManifest, Fnv1a64};
pub use self::png::{decode_png, encode_png, read_png, write_png};

use crate::compositor::Pipeline;
use crate::error::{Error, Result};
use crate::parallel::{try_map_indexed, Execution};

pub const AUGMENTED_FILE: &str = "augmented.bin";
pub const MANIFEST_FILE: &str = "manifest.txt";

/// Augments every record (labels untouched) in memory, in index order.
pub fn augment_records(
    records: &[CifarRecord],
    pipeline: &Pipeline,
    seed: u64,
    exec: Execution,
) -> Result<Vec<CifarRecord>> {
    pipeline.validate()?;
    try_map_indexed(records, exec, |i, rec| {
        Ok(CifarRecord {
            coarse_label: rec.coarse_label,
            fine_label: rec.fine_label,
            image: pipeline.apply(&rec.image, seed, i as u64)?,
        })
    })
}

/// Writes `augmented.bin` and `manifest.txt` into `out_dir`.
///
/// Image `i` uses the streams for `(seed, i)`, so the output bytes do not
/// depend on `exec`.
pub fn write_augmented_dataset(
    records: &[CifarRecord],
    variant: CifarVariant,
    pipeline: &Pipeline,
    seed: u64,
    out_dir: impl AsRef<Path>,
    exec: Execution,
) -> Result<DatasetManifest> {
    let out_dir = out_dir.as_ref();
    let augmented = augment_records(records, pipeline, seed, exec)?;
    let bytes = encode_cifar(&augmented, variant);
    fs::create_dir_all(out_dir).map_err(|e| Error::io(out_dir, e))?;
    let data_path = out_dir.join(AUGMENTED_FILE);
    fs::write(&data_path, &bytes).map_err(|e| Error::io(&data_path, e))?;
    let manifest = DatasetManifest {
        dataset: variant.name().to_string(),
        count: augmented.len(),
        seed,
        augmentation: pipeline.aug.to_string(),
        yona: pipeline.composition.to_string(),
        digest: fnv1a64(&bytes),
    };
    manifest.write(out_dir.join(MANIFEST_FILE))?;
    Ok(manifest)
}
