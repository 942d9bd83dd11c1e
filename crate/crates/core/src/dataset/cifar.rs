//! CIFAR-10 / CIFAR-100 binary records.
//!
//! CIFAR-10: `[label][1024 R][1024 G][1024 B]`, 3073 bytes per record.
//! CIFAR-100: `[coarse][fine][3072 pixels]`, 3074 bytes per record.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::image::ImageTensor;
use crate::rng::{derive_stream, SeedSpec};

pub const CIFAR_CHANNELS: usize = 3;
pub const CIFAR_SIDE: usize = 32;
pub const CIFAR_PIXELS: usize = CIFAR_CHANNELS * CIFAR_SIDE * CIFAR_SIDE;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CifarVariant {
    C10,
    C100,
}

impl CifarVariant {
    pub fn record_len(self) -> usize {
        match self {
            CifarVariant::C10 => CIFAR_PIXELS + 1,
            CifarVariant::C100 => CIFAR_PIXELS + 2,
        }
    }

    pub fn num_classes(self) -> usize {
        match self {
            CifarVariant::C10 => 10,
            CifarVariant::C100 => 100,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            CifarVariant::C10 => "cifar10",
            CifarVariant::C100 => "cifar100",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "cifar10" | "c10" => Ok(CifarVariant::C10),
            "cifar100" | "c100" => Ok(CifarVariant::C100),
            _ => Err(Error::argument(format!("unknown dataset variant `{s}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CifarRecord {
    /// CIFAR-100 only.
    pub coarse_label: Option<u8>,
    pub fine_label: u8,
    pub image: ImageTensor,
}

impl CifarRecord {
    pub fn encode_into(&self, variant: CifarVariant, out: &mut Vec<u8>) {
        if variant == CifarVariant::C100 {
            out.push(self.coarse_label.unwrap_or(0));
        }
        out.push(self.fine_label);
        out.extend_from_slice(self.image.data());
    }

    fn decode(buf: &[u8], variant: CifarVariant, index: usize, offset: u64) -> Result<Self> {
        let corrupt = |message: String| Error::CorruptRecord {
            index,
            offset,
            message,
        };
        let (coarse, fine, pixels) = match variant {
            CifarVariant::C10 => (None, buf[0], &buf[1..]),
            CifarVariant::C100 => (Some(buf[0]), buf[1], &buf[2..]),
        };
        if fine as usize >= variant.num_classes() {
            return Err(corrupt(format!(
                "label {fine} out of range for {}",
                variant.name()
            )));
        }
        if let Some(c) = coarse {
            if c >= 20 {
                return Err(corrupt(format!("coarse label {c} out of range")));
            }
        }
        Ok(CifarRecord {
            coarse_label: coarse,
            fine_label: fine,
            image: ImageTensor::new(CIFAR_CHANNELS, CIFAR_SIDE, CIFAR_SIDE, pixels.to_vec())?,
        })
    }
}

/// Streams records from any reader, in order.
pub struct CifarReader<R> {
    inner: R,
    variant: CifarVariant,
    offset: u64,
    index: usize,
    buf: Vec<u8>,
    done: bool,
}

impl<R: Read> CifarReader<R> {
    pub fn new(inner: R, variant: CifarVariant) -> Self {
        CifarReader {
            inner,
            variant,
            offset: 0,
            index: 0,
            buf: vec![0; variant.record_len()],
            done: false,
        }
    }

    fn fill(&mut self) -> std::io::Result<usize> {
        let mut filled = 0;
        while filled < self.buf.len() {
            match self.inner.read(&mut self.buf[filled..]) {
                Ok(0) => break,
                Ok(n) => filled += n,
                Err(e) if e.kind() == std::io::ErrorKind::Interrupted => {}
                Err(e) => return Err(e),
            }
        }
        Ok(filled)
    }
}

impl<R: Read> Iterator for CifarReader<R> {
    type Item = Result<CifarRecord>;

    fn next(&mut self) -> Option<Self::Item> {
        if self.done {
            return None;
        }
        let filled = match self.fill() {
            Ok(n) => n,
            Err(e) => {
                self.done = true;
                return Some(Err(Error::Format {
                    offset: self.offset,
                    message: e.to_string(),
                }));
            }
        };
        if filled == 0 {
            self.done = true;
            return None;
        }
        if filled < self.buf.len() {
            self.done = true;
            return Some(Err(Error::Format {
                offset: self.offset,
                message: format!(
                    "truncated record: {filled} of {} bytes",
                    self.buf.len()
                ),
            }));
        }
        let rec = CifarRecord::decode(&self.buf, self.variant, self.index, self.offset);
        self.offset += self.buf.len() as u64;
        self.index += 1;
        if rec.is_err() {
            self.done = true;
        }
        Some(rec)
    }
}

/// Reads every record of a CIFAR binary file.
pub fn read_cifar(path: impl AsRef<Path>, variant: CifarVariant) -> Result<Vec<CifarRecord>> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let len = file.metadata().map_err(|e| Error::io(path, e))?.len();
    let rec = variant.record_len() as u64;
    if len % rec != 0 {
        return Err(Error::Format {
            offset: len / rec * rec,
            message: format!(
                "{}: length {len} is not a multiple of the {rec}-byte record size",
                path.display()
            ),
        });
    }
    CifarReader::new(BufReader::new(file), variant).collect()
}

pub fn parse_cifar(bytes: &[u8], variant: CifarVariant) -> Result<Vec<CifarRecord>> {
    CifarReader::new(bytes, variant).collect()
}

pub fn encode_cifar(records: &[CifarRecord], variant: CifarVariant) -> Vec<u8> {
    let mut out = Vec::with_capacity(records.len() * variant.record_len());
    for r in records {
        r.encode_into(variant, &mut out);
    }
    out
}

pub fn write_cifar(path: impl AsRef<Path>, records: &[CifarRecord], variant: CifarVariant) -> Result<()> {
    let path = path.as_ref();
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = BufWriter::new(file);
    w.write_all(&encode_cifar(records, variant))
        .and_then(|_| w.flush())
        .map_err(|e| Error::io(path, e))
}

/// Class-structured stand-in data in CIFAR layout.
///
/// Each class has a fixed color and stripe orientation; every image adds
/// its own random offset and per-pixel noise, so the classes are learnable
/// but not trivially separable.
pub fn synthetic_cifar(count: usize, variant: CifarVariant, seed: u64) -> Vec<CifarRecord> {
    let classes = variant.num_classes();
    (0..count)
        .map(|i| {
            let mut rng = derive_stream(SeedSpec::new(seed, i as u64));
            let label = rng.next_index(classes).expect("classes >= 1");
            let mut class_rng = derive_stream(SeedSpec::new(0x5EED_C1A5, label as u64));
            let base: [f64; 3] = std::array::from_fn(|_| class_rng.next_range(40.0, 215.0));
            let freq = class_rng.next_range(0.15, 0.6);
            let angle = class_rng.next_range(0.0, std::f64::consts::PI);
            let (sin, cos) = angle.sin_cos();
            let phase = rng.next_range(0.0, std::f64::consts::TAU);
            let shift = rng.next_range(-30.0, 30.0);
            let mut data = Vec::with_capacity(CIFAR_PIXELS);
            for &b in &base {
                for y in 0..CIFAR_SIDE {
                    for x in 0..CIFAR_SIDE {
                        let t = (x as f64 * cos + y as f64 * sin) * freq + phase;
                        let v = b + shift + 35.0 * t.sin() + rng.next_gaussian(0.0, 18.0);
                        data.push(v.round().clamp(0.0, 255.0) as u8);
                    }
                }
            }
            CifarRecord {
                coarse_label: (variant == CifarVariant::C100).then_some((label / 5) as u8),
                fine_label: label as u8,
                image: ImageTensor::new(CIFAR_CHANNELS, CIFAR_SIDE, CIFAR_SIDE, data)
                    .expect("cifar shape"),
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_input_has_no_records() {
        assert!(parse_cifar(&[], CifarVariant::C10).unwrap().is_empty());
    }

    #[test]
    fn one_byte_short_fails_at_offset_zero() {
        let bytes = vec![0u8; 3072];
        match parse_cifar(&bytes, CifarVariant::C10) {
            Err(Error::Format { offset, .. }) => assert_eq!(offset, 0),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn truncation_offset_is_record_start() {
        let recs = synthetic_cifar(3, CifarVariant::C10, 1);
        let mut bytes = encode_cifar(&recs, CifarVariant::C10);
        bytes.truncate(2 * 3073 + 100);
        match parse_cifar(&bytes, CifarVariant::C10) {
            Err(Error::Format { offset, .. }) => assert_eq!(offset, 2 * 3073),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn label_out_of_range_is_corrupt() {
        let mut bytes = encode_cifar(&synthetic_cifar(2, CifarVariant::C10, 1), CifarVariant::C10);
        bytes[3073] = 10;
        match parse_cifar(&bytes, CifarVariant::C10) {
            Err(Error::CorruptRecord { index, offset, .. }) => assert_eq!((index, offset), (1, 3073)),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn cifar100_labels() {
        let recs = synthetic_cifar(20, CifarVariant::C100, 4);
        let bytes = encode_cifar(&recs, CifarVariant::C100);
        assert_eq!(bytes.len(), 20 * 3074);
        assert_eq!(parse_cifar(&bytes, CifarVariant::C100).unwrap(), recs);
        let mut bad = bytes.clone();
        bad[0] = 20;
        assert!(matches!(
            parse_cifar(&bad, CifarVariant::C100),
            Err(Error::CorruptRecord { .. })
        ));
    }

    #[test]
    fn layout_is_label_then_planes() {
        let recs = synthetic_cifar(1, CifarVariant::C10, 9);
        let bytes = encode_cifar(&recs, CifarVariant::C10);
        assert_eq!(bytes[0], recs[0].fine_label);
        assert_eq!(bytes[1 + 1024 + 5], recs[0].image.get(1, 0, 5));
        assert_eq!(bytes[1 + 2048 + 32 * 3 + 2], recs[0].image.get(2, 3, 2));
    }

    #[test]
    fn variant_names() {
        assert_eq!(CifarVariant::parse("cifar10").unwrap(), CifarVariant::C10);
        assert_eq!(CifarVariant::parse("CIFAR100").unwrap(), CifarVariant::C100);
        assert!(CifarVariant::parse("coco").is_err());
    }
}
