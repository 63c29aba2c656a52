//! PNG encodings: 1-bit patterns, 16-bit depth (mm), RGB8 color and 8-bit
//! indexed temporal maps.

use std::fs::File;
use std::io::{BufReader, BufWriter};
use std::path::Path;

use png::{BitDepth, ColorType, Transformations};

use crate::patterns::PatternImage;
use crate::recon::{ColorFrame, DepthFrame, TemporalMap};
use crate::{Error, Result};

fn encode(
    path: &Path,
    (w, h): (usize, usize),
    color: ColorType,
    depth: BitDepth,
    palette: Option<Vec<u8>>,
    data: &[u8],
) -> Result<()> {
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut enc = png::Encoder::new(BufWriter::new(file), w as u32, h as u32);
    enc.set_color(color);
    enc.set_depth(depth);
    if let Some(p) = palette {
        enc.set_palette(p);
    }
    let fmt = |e: png::EncodingError| Error::Format(format!("{}: {e}", path.display()));
    let mut writer = enc.write_header().map_err(fmt)?;
    writer.write_image_data(data).map_err(fmt)?;
    writer.finish().map_err(fmt)
}

struct Decoded {
    width: usize,
    height: usize,
    color: ColorType,
    depth: BitDepth,
    line_size: usize,
    data: Vec<u8>,
}

fn decode(path: &Path) -> Result<Decoded> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut dec = png::Decoder::new(BufReader::new(file));
    dec.set_transformations(Transformations::IDENTITY);
    let fmt = |e: png::DecodingError| Error::Format(format!("{}: {e}", path.display()));
    let mut reader = dec.read_info().map_err(fmt)?;
    let size = reader
        .output_buffer_size()
        .ok_or_else(|| Error::Format(format!("{}: image too large", path.display())))?;
    let mut data = vec![0; size];
    let info = reader.next_frame(&mut data).map_err(fmt)?;
    data.truncate(info.buffer_size());
    Ok(Decoded {
        width: info.width as usize,
        height: info.height as usize,
        color: info.color_type,
        depth: info.bit_depth,
        line_size: info.line_size,
        data,
    })
}

fn expect(path: &Path, d: &Decoded, color: ColorType, depth: BitDepth) -> Result<()> {
    if d.color == color && d.depth == depth {
        Ok(())
    } else {
        Err(Error::Format(format!(
            "{}: expected {color:?}/{depth:?}, found {:?}/{:?}",
            path.display(),
            d.color,
            d.depth
        )))
    }
}

/// 1-bit grayscale, white = ON.
pub fn save_pattern_png(path: impl AsRef<Path>, p: &PatternImage) -> Result<()> {
    let (w, h) = (p.width(), p.height());
    let stride = w.div_ceil(8);
    let mut data = vec![0u8; stride * h];
    for (x, y) in p.on_pixels() {
        data[y * stride + x / 8] |= 0x80 >> (x % 8);
    }
    encode(
        path.as_ref(),
        (w, h),
        ColorType::Grayscale,
        BitDepth::One,
        None,
        &data,
    )
}

pub fn load_pattern_png(path: impl AsRef<Path>) -> Result<PatternImage> {
    let path = path.as_ref();
    let d = decode(path)?;
    expect(path, &d, ColorType::Grayscale, BitDepth::One)?;
    Ok(PatternImage::from_fn(d.width, d.height, |x, y| {
        d.data[y * d.line_size + x / 8] & (0x80 >> (x % 8)) != 0
    }))
}

/// 16-bit grayscale, value = depth rounded to whole mm (saturating), 0 = none.
pub fn save_depth_png(path: impl AsRef<Path>, f: &DepthFrame) -> Result<()> {
    let data: Vec<u8> = f
        .data
        .iter()
        .flat_map(|&d| (d.round().clamp(0.0, u16::MAX as f64) as u16).to_be_bytes())
        .collect();
    encode(
        path.as_ref(),
        (f.width, f.height),
        ColorType::Grayscale,
        BitDepth::Sixteen,
        None,
        &data,
    )
}

pub fn load_depth_png(path: impl AsRef<Path>) -> Result<DepthFrame> {
    let path = path.as_ref();
    let d = decode(path)?;
    expect(path, &d, ColorType::Grayscale, BitDepth::Sixteen)?;
    let data = (0..d.height)
        .flat_map(|y| {
            let row = &d.data[y * d.line_size..][..2 * d.width];
            row.chunks_exact(2)
                .map(|b| u16::from_be_bytes([b[0], b[1]]) as f64)
                .collect::<Vec<_>>()
        })
        .collect();
    DepthFrame::from_data(d.width, d.height, data)
}

/// RGB8; invalid pixels are black.
pub fn save_color_png(path: impl AsRef<Path>, f: &ColorFrame) -> Result<()> {
    let data: Vec<u8> = f
        .data
        .iter()
        .zip(&f.mask)
        .flat_map(|(p, &m)| if m { *p } else { [0; 3] })
        .collect();
    encode(
        path.as_ref(),
        (f.width, f.height),
        ColorType::Rgb,
        BitDepth::Eight,
        None,
        &data,
    )
}

/// Black pixels read back as invalid.
pub fn load_color_png(path: impl AsRef<Path>) -> Result<ColorFrame> {
    let path = path.as_ref();
    let d = decode(path)?;
    expect(path, &d, ColorType::Rgb, BitDepth::Eight)?;
    let pixels = (0..d.height)
        .flat_map(|y| {
            d.data[y * d.line_size..][..3 * d.width]
                .chunks_exact(3)
                .map(|c| [c[0], c[1], c[2]])
                .collect::<Vec<_>>()
        })
        .collect();
    ColorFrame::from_pixels(d.width, d.height, pixels)
}

/// Palette entry for index `m`: black for 0, otherwise a hue wheel.
fn palette() -> Vec<u8> {
    let mut p = vec![0u8; 3];
    for i in 1..256u32 {
        // Golden-angle hue steps keep neighbouring columns distinct.
        let h = (i as f64 * 137.507_764) % 360.0 / 60.0;
        let x = 1.0 - (h % 2.0 - 1.0).abs();
        let (r, g, b) = match h as u32 {
            0 => (1.0, x, 0.0),
            1 => (x, 1.0, 0.0),
            2 => (0.0, 1.0, x),
            3 => (0.0, x, 1.0),
            4 => (x, 0.0, 1.0),
            _ => (1.0, 0.0, x),
        };
        p.extend([r, g, b].map(|c: f64| (55.0 + 200.0 * c).round() as u8));
    }
    p
}

pub fn save_temporal_png(path: impl AsRef<Path>, map: &TemporalMap) -> Result<()> {
    let data = map
        .data
        .iter()
        .map(|&m| u8::try_from(m))
        .collect::<std::result::Result<Vec<u8>, _>>()
        .map_err(|_| Error::Format("temporal map index above 255".into()))?;
    encode(
        path.as_ref(),
        (map.width, map.height),
        ColorType::Indexed,
        BitDepth::Eight,
        Some(palette()),
        &data,
    )
}

pub fn load_temporal_png(path: impl AsRef<Path>) -> Result<TemporalMap> {
    let path = path.as_ref();
    let d = decode(path)?;
    expect(path, &d, ColorType::Indexed, BitDepth::Eight)?;
    let data = (0..d.height)
        .flat_map(|y| {
            d.data[y * d.line_size..][..d.width]
                .iter()
                .map(|&v| v as u16)
                .collect::<Vec<_>>()
        })
        .collect();
    Ok(TemporalMap {
        width: d.width,
        height: d.height,
        data,
    })
}
