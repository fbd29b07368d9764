//! Image and label-map files.
//!
//! Intensity images travel as binary PGM (P5), binary PPM (P6), or 8-bit
//! gray/RGB PNG; decoded bytes map to `[0, 1]` by division by 255 and writes
//! quantize with `round(v * 255)`. Label maps are written twice over: raw
//! indices in PGM (lossless round trip) and an indexed PNG colored with the
//! fixed 16-entry palette below for quick viewing. 16-bit inputs are
//! rejected.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::field::{LabelMap, ScalarField};

/// Output format for [`write_image`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ImageFormat {
    Pgm,
    Ppm,
    Png,
}

impl ImageFormat {
    /// Guess from a path extension.
    pub fn from_path(path: &Path) -> Result<Self> {
        match path
            .extension()
            .and_then(|e| e.to_str())
            .map(|e| e.to_ascii_lowercase())
            .as_deref()
        {
            Some("pgm") => Ok(Self::Pgm),
            Some("ppm") => Ok(Self::Ppm),
            Some("png") => Ok(Self::Png),
            other => Err(Error::Format {
                path: path.to_path_buf(),
                detail: format!("unsupported image extension {other:?}"),
            }),
        }
    }
}

/// Fixed palette used to colorize label maps written as PNG. Labels beyond
/// 15 cycle through the same 16 colors.
pub const LABEL_PALETTE: [[u8; 3]; 16] = [
    [230, 25, 75],
    [60, 180, 75],
    [255, 225, 25],
    [0, 130, 200],
    [245, 130, 48],
    [145, 30, 180],
    [70, 240, 240],
    [240, 50, 230],
    [210, 245, 60],
    [250, 190, 190],
    [0, 128, 128],
    [170, 110, 40],
    [128, 0, 0],
    [128, 128, 0],
    [0, 0, 128],
    [128, 128, 128],
];

fn io_err(path: &Path, source: std::io::Error) -> Error {
    Error::Io {
        path: path.to_path_buf(),
        source,
    }
}

fn format_err(path: &Path, detail: impl Into<String>) -> Error {
    Error::Format {
        path: path.to_path_buf(),
        detail: detail.into(),
    }
}

// ---------------------------------------------------------------------------
// Netpbm (binary P5 / P6)
// ---------------------------------------------------------------------------

/// Read one whitespace-delimited ASCII token, skipping `#` comments.
fn netpbm_token(bytes: &[u8], pos: &mut usize) -> Option<String> {
    while *pos < bytes.len() {
        let b = bytes[*pos];
        if b == b'#' {
            while *pos < bytes.len() && bytes[*pos] != b'\n' {
                *pos += 1;
            }
        } else if b.is_ascii_whitespace() {
            *pos += 1;
        } else {
            break;
        }
    }
    let start = *pos;
    while *pos < bytes.len() && !bytes[*pos].is_ascii_whitespace() {
        *pos += 1;
    }
    if *pos > start {
        Some(String::from_utf8_lossy(&bytes[start..*pos]).into_owned())
    } else {
        None
    }
}

struct NetpbmImage {
    width: usize,
    height: usize,
    channels: usize,
    bytes: Vec<u8>,
}

fn read_netpbm(path: &Path, bytes: &[u8]) -> Result<NetpbmImage> {
    let channels = match &bytes[..2.min(bytes.len())] {
        b"P5" => 1,
        b"P6" => 3,
        _ => return Err(format_err(path, "not a binary PGM/PPM file")),
    };
    let mut pos = 2;
    let mut header = || {
        netpbm_token(bytes, &mut pos)
            .and_then(|t| t.parse::<usize>().ok())
            .ok_or_else(|| format_err(path, "malformed Netpbm header"))
    };
    let width = header()?;
    let height = header()?;
    let maxval = header()?;
    if maxval == 0 || maxval > 255 {
        return Err(format_err(
            path,
            format!("only 8-bit Netpbm supported (maxval {maxval})"),
        ));
    }
    // exactly one whitespace byte separates the header from the raster
    pos += 1;
    let expected = width * height * channels;
    let raster = bytes
        .get(pos..pos + expected)
        .ok_or_else(|| format_err(path, "truncated Netpbm raster"))?;
    Ok(NetpbmImage {
        width,
        height,
        channels,
        bytes: raster.to_vec(),
    })
}

fn write_netpbm(path: &Path, width: usize, height: usize, channels: usize, bytes: &[u8]) -> Result<()> {
    let magic = match channels {
        1 => "P5",
        3 => "P6",
        _ => {
            return Err(format_err(
                path,
                format!("Netpbm supports 1 or 3 channels, got {channels}"),
            ))
        }
    };
    let file = File::create(path).map_err(|e| io_err(path, e))?;
    let mut w = BufWriter::new(file);
    write!(w, "{magic}\n{width} {height}\n255\n").map_err(|e| io_err(path, e))?;
    w.write_all(bytes).map_err(|e| io_err(path, e))?;
    w.flush().map_err(|e| io_err(path, e))
}

// ---------------------------------------------------------------------------
// PNG (8-bit gray / RGB via the `png` crate)
// ---------------------------------------------------------------------------

fn read_png(path: &Path) -> Result<NetpbmImage> {
    let file = File::open(path).map_err(|e| io_err(path, e))?;
    let decoder = png::Decoder::new(BufReader::new(file));
    let mut reader = decoder
        .read_info()
        .map_err(|e| format_err(path, format!("png: {e}")))?;
    let info = reader.info();
    if info.bit_depth != png::BitDepth::Eight {
        return Err(format_err(
            path,
            format!("only 8-bit PNG supported, got {:?}", info.bit_depth),
        ));
    }
    let channels = match info.color_type {
        png::ColorType::Grayscale => 1,
        png::ColorType::Rgb => 3,
        other => {
            return Err(format_err(
                path,
                format!("unsupported PNG color type {other:?} (want gray or RGB)"),
            ))
        }
    };
    let mut buf = vec![0; reader.output_buffer_size().unwrap_or(0)];
    let frame = reader
        .next_frame(&mut buf)
        .map_err(|e| format_err(path, format!("png: {e}")))?;
    buf.truncate(frame.buffer_size());
    Ok(NetpbmImage {
        width: frame.width as usize,
        height: frame.height as usize,
        channels,
        bytes: buf,
    })
}

fn write_png(path: &Path, width: usize, height: usize, channels: usize, bytes: &[u8]) -> Result<()> {
    let color = match channels {
        1 => png::ColorType::Grayscale,
        3 => png::ColorType::Rgb,
        _ => {
            return Err(format_err(
                path,
                format!("PNG output supports 1 or 3 channels, got {channels}"),
            ))
        }
    };
    let file = File::create(path).map_err(|e| io_err(path, e))?;
    let mut encoder = png::Encoder::new(BufWriter::new(file), width as u32, height as u32);
    encoder.set_color(color);
    encoder.set_depth(png::BitDepth::Eight);
    let mut writer = encoder
        .write_header()
        .map_err(|e| format_err(path, format!("png: {e}")))?;
    writer
        .write_image_data(bytes)
        .map_err(|e| format_err(path, format!("png: {e}")))?;
    Ok(())
}

// ---------------------------------------------------------------------------
// Public surface
// ---------------------------------------------------------------------------

/// Interleaved bytes -> planar normalized field.
fn field_from_bytes(img: NetpbmImage) -> ScalarField {
    let NetpbmImage {
        width,
        height,
        channels,
        bytes,
    } = img;
    let mut field = ScalarField::zeros(width, height, channels);
    for ch in 0..channels {
        let plane = field.channel_mut(ch);
        for (p, v) in plane.iter_mut().enumerate() {
            *v = bytes[p * channels + ch] as f64 / 255.0;
        }
    }
    field
}

/// Load a PGM/PPM/PNG image as a normalized field (values in `[0, 1]`,
/// channels 1 or 3).
pub fn load_image(path: impl AsRef<Path>) -> Result<ScalarField> {
    let path = path.as_ref();
    let mut bytes = Vec::new();
    File::open(path)
        .and_then(|mut f| f.read_to_end(&mut bytes))
        .map_err(|e| io_err(path, e))?;
    let img = match &bytes[..2.min(bytes.len())] {
        b"P5" | b"P6" => read_netpbm(path, &bytes)?,
        _ if bytes.starts_with(&[0x89, b'P', b'N', b'G']) => read_png(path)?,
        _ => return Err(format_err(path, "unrecognized image format")),
    };
    Ok(field_from_bytes(img))
}

/// Quantize a `[0, 1]` field to interleaved bytes with `round(v * 255)`.
fn quantize(field: &ScalarField) -> Result<Vec<u8>> {
    if field.data().iter().any(|&v| !(0.0..=1.0).contains(&v)) {
        return Err(Error::Contract(
            "image values must lie in [0, 1] before writing".into(),
        ));
    }
    let channels = field.channels();
    let pixels = field.pixel_count();
    let mut bytes = vec![0u8; pixels * channels];
    for ch in 0..channels {
        let plane = field.channel(ch);
        for p in 0..pixels {
            bytes[p * channels + ch] = (plane[p] * 255.0).round() as u8;
        }
    }
    Ok(bytes)
}

/// Write an intensity field; channel count must suit the chosen format.
pub fn write_image(field: &ScalarField, path: impl AsRef<Path>, format: ImageFormat) -> Result<()> {
    let path = path.as_ref();
    let bytes = quantize(field)?;
    let (w, h, c) = (field.width(), field.height(), field.channels());
    match format {
        ImageFormat::Pgm => {
            if c != 1 {
                return Err(format_err(path, format!("PGM wants 1 channel, field has {c}")));
            }
            write_netpbm(path, w, h, 1, &bytes)
        }
        ImageFormat::Ppm => {
            if c != 3 {
                return Err(format_err(path, format!("PPM wants 3 channels, field has {c}")));
            }
            write_netpbm(path, w, h, 3, &bytes)
        }
        ImageFormat::Png => write_png(path, w, h, c, &bytes),
    }
}

/// Write a label map. `.pgm` stores raw indices losslessly; `.png` writes an
/// indexed image colored with [`LABEL_PALETTE`] (cycled past 16 labels).
/// Maps with more than 256 labels are rejected.
pub fn write_label_map(labels: &LabelMap, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let max = labels.max_label().unwrap_or(0);
    if max > 255 {
        return Err(Error::InvalidParameter(format!(
            "label map has {} labels; at most 256 can be written",
            max + 1
        )));
    }
    let bytes: Vec<u8> = labels.data().iter().map(|&l| l as u8).collect();
    match ImageFormat::from_path(path)? {
        ImageFormat::Pgm => write_netpbm(path, labels.width(), labels.height(), 1, &bytes),
        ImageFormat::Png => {
            let mut palette = Vec::with_capacity((max as usize + 1) * 3);
            for i in 0..=max as usize {
                palette.extend_from_slice(&LABEL_PALETTE[i % LABEL_PALETTE.len()]);
            }
            let file = File::create(path).map_err(|e| io_err(path, e))?;
            let mut encoder =
                png::Encoder::new(BufWriter::new(file), labels.width() as u32, labels.height() as u32);
            encoder.set_color(png::ColorType::Indexed);
            encoder.set_depth(png::BitDepth::Eight);
            encoder.set_palette(palette);
            let mut writer = encoder
                .write_header()
                .map_err(|e| format_err(path, format!("png: {e}")))?;
            writer
                .write_image_data(&bytes)
                .map_err(|e| format_err(path, format!("png: {e}")))?;
            Ok(())
        }
        ImageFormat::Ppm => Err(format_err(path, "label maps go to .pgm or .png")),
    }
}

/// Read back a label map written as PGM (raw indices).
pub fn load_label_map(path: impl AsRef<Path>) -> Result<LabelMap> {
    let path = path.as_ref();
    let mut bytes = Vec::new();
    File::open(path)
        .and_then(|mut f| f.read_to_end(&mut bytes))
        .map_err(|e| io_err(path, e))?;
    if !bytes.starts_with(b"P5") {
        return Err(format_err(path, "label maps are read from binary PGM (P5)"));
    }
    let img = read_netpbm(path, &bytes)?;
    LabelMap::from_vec(
        img.width,
        img.height,
        img.bytes.iter().map(|&b| b as u32).collect(),
    )
}
