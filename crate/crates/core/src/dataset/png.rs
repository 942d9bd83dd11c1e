//! 8-bit PNG export and import (grayscale or RGB, non-interlaced on write).

use std::fs;
use std::path::Path;

use png::{BitDepth, ColorType, Decoder, Encoder};

use crate::error::{Error, Result};
use crate::image::ImageTensor;

fn png_err(e: impl std::fmt::Display) -> Error {
    Error::Png(e.to_string())
}

pub fn encode_png(image: &ImageTensor) -> Result<Vec<u8>> {
    let (c, h, w) = image.shape();
    let color = match c {
        1 => ColorType::Grayscale,
        3 => ColorType::Rgb,
        _ => {
            return Err(Error::UnsupportedFormat(format!(
                "PNG export needs 1 or 3 channels, got {c}"
            )))
        }
    };
    let plane = h * w;
    let mut interleaved = Vec::with_capacity(c * plane);
    for i in 0..plane {
        for ch in 0..c {
            interleaved.push(image.data()[ch * plane + i]);
        }
    }
    let mut out = Vec::new();
    {
        let mut enc = Encoder::new(&mut out, w as u32, h as u32);
        enc.set_color(color);
        enc.set_depth(BitDepth::Eight);
        let mut writer = enc.write_header().map_err(png_err)?;
        writer.write_image_data(&interleaved).map_err(png_err)?;
        writer.finish().map_err(png_err)?;
    }
    Ok(out)
}

pub fn decode_png(bytes: &[u8]) -> Result<ImageTensor> {
    let decoder = Decoder::new(bytes);
    let mut reader = decoder.read_info().map_err(png_err)?;
    let mut buf = vec![0; reader.output_buffer_size()];
    let info = reader.next_frame(&mut buf).map_err(png_err)?;
    if info.bit_depth != BitDepth::Eight {
        return Err(Error::UnsupportedFormat(format!(
            "PNG bit depth {:?}; only 8-bit is supported",
            info.bit_depth
        )));
    }
    let c = match info.color_type {
        ColorType::Grayscale => 1,
        ColorType::Rgb => 3,
        other => {
            return Err(Error::UnsupportedFormat(format!(
                "PNG color type {other:?}; only grayscale and RGB are supported"
            )))
        }
    };
    let (w, h) = (info.width as usize, info.height as usize);
    let plane = w * h;
    let mut data = vec![0u8; c * plane];
    for (i, px) in buf[..info.buffer_size()].chunks_exact(c).enumerate() {
        for ch in 0..c {
            data[ch * plane + i] = px[ch];
        }
    }
    ImageTensor::new(c, h, w, data)
}

pub fn write_png(image: &ImageTensor, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let bytes = encode_png(image)?;
    fs::write(path, bytes).map_err(|e| Error::io(path, e))
}

pub fn read_png(path: impl AsRef<Path>) -> Result<ImageTensor> {
    let path = path.as_ref();
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    decode_png(&bytes)
}
