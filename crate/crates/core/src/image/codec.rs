//! PNG and binary PPM (P6) codecs.

use std::fs::File;
use std::io::{BufWriter, Read, Write};
use std::path::Path;

use super::Image;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Codec {
    Png,
    Ppm,
}

fn codec_for_extension(path: &Path) -> Option<Codec> {
    let ext = path.extension()?.to_str()?.to_ascii_lowercase();
    match ext.as_str() {
        "png" => Some(Codec::Png),
        "ppm" => Some(Codec::Ppm),
        _ => None,
    }
}

/// Decodes a PNG or P6 file, sniffing the format from the leading bytes.
///
/// 16-bit PNG channels keep their high byte and alpha is composited over black.
pub fn load_image(path: impl AsRef<Path>) -> Result<Image> {
    let path = path.as_ref();
    let mut bytes = Vec::new();
    File::open(path)
        .and_then(|mut f| f.read_to_end(&mut bytes))
        .map_err(|e| Error::io(path, e))?;
    decode(&bytes).map_err(|e| match e {
        Error::Format(msg) => Error::Format(format!("{}: {msg}", path.display())),
        other => other,
    })
}

pub(crate) fn decode(bytes: &[u8]) -> Result<Image> {
    if bytes.starts_with(b"\x89PNG\r\n\x1a\n") {
        decode_png(bytes)
    } else if bytes.starts_with(b"P6") {
        decode_ppm(bytes)
    } else {
        Err(Error::Format("not a PNG or binary PPM (P6) stream".into()))
    }
}

fn decode_png(bytes: &[u8]) -> Result<Image> {
    let fmt = |e: png::DecodingError| Error::Format(format!("png: {e}"));
    let mut decoder = png::Decoder::new(bytes);
    decoder.set_transformations(png::Transformations::EXPAND | png::Transformations::STRIP_16);
    let mut reader = decoder.read_info().map_err(fmt)?;
    let mut buf = vec![0; reader.output_buffer_size()];
    let info = reader.next_frame(&mut buf).map_err(fmt)?;
    let (width, height) = (info.width as usize, info.height as usize);
    if width == 0 || height == 0 {
        return Err(Error::Format("png has a zero dimension".into()));
    }
    let (color, depth) = reader.output_color_type();
    if depth != png::BitDepth::Eight {
        return Err(Error::Format(format!("unsupported output bit depth {depth:?}")));
    }
    let samples = color.samples();
    let mut data = Vec::with_capacity(width * height * 3);
    for row in buf.chunks_exact(info.line_size).take(height) {
        for px in row[..width * samples].chunks_exact(samples) {
            let rgb = match color {
                png::ColorType::Grayscale => [px[0]; 3],
                png::ColorType::GrayscaleAlpha => [over_black(px[0], px[1]); 3],
                png::ColorType::Rgb => [px[0], px[1], px[2]],
                png::ColorType::Rgba => [
                    over_black(px[0], px[3]),
                    over_black(px[1], px[3]),
                    over_black(px[2], px[3]),
                ],
                png::ColorType::Indexed => return Err(Error::Format("palette was not expanded".into())),
            };
            data.extend_from_slice(&rgb);
        }
    }
    Image::from_raw(width, height, data)
}

#[inline]
fn over_black(v: u8, alpha: u8) -> u8 {
    ((u32::from(v) * u32::from(alpha) + 127) / 255) as u8
}

/// Minimal netpbm header tokenizer: whitespace separated, `#` comments to end of line.
struct Header<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl Header<'_> {
    fn number(&mut self) -> Result<usize> {
        loop {
            match self.bytes.get(self.pos) {
                Some(b'#') => {
                    while !matches!(self.bytes.get(self.pos), Some(b'\n') | None) {
                        self.pos += 1;
                    }
                }
                Some(c) if c.is_ascii_whitespace() => self.pos += 1,
                Some(_) => break,
                None => return Err(Error::Format("ppm header truncated".into())),
            }
        }
        let start = self.pos;
        while self.bytes.get(self.pos).is_some_and(u8::is_ascii_digit) {
            self.pos += 1;
        }
        std::str::from_utf8(&self.bytes[start..self.pos])
            .ok()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| Error::Format("malformed ppm header field".into()))
    }
}

fn decode_ppm(bytes: &[u8]) -> Result<Image> {
    let mut header = Header { bytes, pos: 2 };
    let width = header.number()?;
    let height = header.number()?;
    let maxval = header.number()?;
    if width == 0 || height == 0 {
        return Err(Error::Format("ppm has a zero dimension".into()));
    }
    if maxval == 0 || maxval > 65535 {
        return Err(Error::Format(format!("ppm maxval {maxval} out of range")));
    }
    // exactly one whitespace byte separates the header from the raster
    if !bytes.get(header.pos).is_some_and(u8::is_ascii_whitespace) {
        return Err(Error::Format("ppm header not terminated".into()));
    }
    let payload = &bytes[header.pos + 1..];
    let samples = width
        .checked_mul(height)
        .and_then(|n| n.checked_mul(3))
        .ok_or_else(|| Error::Format("ppm dimensions overflow".into()))?;
    let sample_bytes = if maxval < 256 { 1 } else { 2 };
    if payload.len() < samples * sample_bytes {
        return Err(Error::Format(format!(
            "ppm payload has {} bytes, expected {}",
            payload.len(),
            samples * sample_bytes
        )));
    }
    let data = if maxval == 255 {
        payload[..samples].to_vec()
    } else if sample_bytes == 1 {
        payload[..samples]
            .iter()
            .map(|&v| ((usize::from(v) * 255 + maxval / 2) / maxval).min(255) as u8)
            .collect()
    } else {
        payload[..samples * 2]
            .chunks_exact(2)
            .map(|c| {
                let v = usize::from(u16::from_be_bytes([c[0], c[1]]));
                ((v * 255 + maxval / 2) / maxval).min(255) as u8
            })
            .collect()
    };
    Image::from_raw(width, height, data)
}

/// Writes `img` as 8-bit RGB; the extension (`.png` or `.ppm`) selects the codec.
pub fn save_image(img: &Image, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let codec = codec_for_extension(path)
        .ok_or_else(|| Error::Format(format!("{}: unknown image extension", path.display())))?;
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut out = BufWriter::new(file);
    match codec {
        Codec::Png => encode_png(&mut out, img.width(), img.height(), png::ColorType::Rgb, img.as_bytes()),
        Codec::Ppm => write!(out, "P6\n{} {}\n255\n", img.width(), img.height())
            .and_then(|_| out.write_all(img.as_bytes()))
            .map_err(|e| Error::io(path, e)),
    }
    .map_err(|e| match e {
        Error::Format(msg) => Error::Format(format!("{}: {msg}", path.display())),
        other => other,
    })?;
    out.flush().map_err(|e| Error::io(path, e))
}

pub(crate) fn encode_png<W: Write>(
    out: W,
    width: usize,
    height: usize,
    color: png::ColorType,
    data: &[u8],
) -> Result<()> {
    let fmt = |e: png::EncodingError| match e {
        png::EncodingError::IoError(io) => Error::io("<png stream>", io),
        other => Error::Format(format!("png: {other}")),
    };
    let mut encoder = png::Encoder::new(out, width as u32, height as u32);
    encoder.set_color(color);
    encoder.set_depth(png::BitDepth::Eight);
    let mut writer = encoder.write_header().map_err(fmt)?;
    writer.write_image_data(data).map_err(fmt)?;
    writer.finish().map_err(fmt)
}

pub(crate) fn save_gray_png(path: &Path, width: usize, height: usize, data: &[u8]) -> Result<()> {
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut out = BufWriter::new(file);
    encode_png(&mut out, width, height, png::ColorType::Grayscale, data)?;
    out.flush().map_err(|e| Error::io(path, e))
}
