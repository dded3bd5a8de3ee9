//! Binary netpbm (PPM `P6` / PGM `P5`) reading and writing.
//!
//! These are the bit-exact golden-test formats: an 8-bit raster survives a
//! save/load round trip unchanged. Only maxval 255 is supported; anything
//! else is reported as an unsupported depth rather than silently rescaled.

use std::fs;
use std::io;
use std::path::Path;

use thiserror::Error;

use crate::raster::{RasterError, RgbImage};

#[derive(Debug, Error)]
pub enum NetpbmError {
    #[error("cannot access {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: io::Error,
    },
    #[error("malformed netpbm data: {0}")]
    Malformed(String),
    #[error("unsupported netpbm format magic {0:?} (only binary P5/P6)")]
    UnsupportedFormat(String),
    #[error("unsupported sample depth: maxval {0} (only 255)")]
    UnsupportedDepth(u32),
    #[error(transparent)]
    Raster(#[from] RasterError),
}

fn io_err(path: &Path, source: io::Error) -> NetpbmError {
    NetpbmError::Io {
        path: path.display().to_string(),
        source,
    }
}

/// Loads a binary PPM or PGM into an [`RgbImage`]; PGM gray values are
/// replicated across the three channels.
pub fn load_raster(path: impl AsRef<Path>) -> Result<RgbImage, NetpbmError> {
    let path = path.as_ref();
    let data = fs::read(path).map_err(|e| io_err(path, e))?;
    decode(&data)
}

/// Writes the image as binary PPM (magic `P6`, maxval 255).
pub fn save_raster(path: impl AsRef<Path>, image: &RgbImage) -> Result<(), NetpbmError> {
    let path = path.as_ref();
    let bytes = encode_ppm(image.width(), image.height(), &image.to_rgb8());
    fs::write(path, bytes).map_err(|e| io_err(path, e))
}

/// Writes packed 8-bit RGB triples as binary PPM.
pub fn write_ppm(
    path: impl AsRef<Path>,
    width: usize,
    height: usize,
    rgb: &[u8],
) -> Result<(), NetpbmError> {
    assert_eq!(rgb.len(), width * height * 3);
    let path = path.as_ref();
    fs::write(path, encode_ppm(width, height, rgb)).map_err(|e| io_err(path, e))
}

/// Writes 8-bit gray samples as binary PGM (magic `P5`, maxval 255).
pub fn write_pgm(
    path: impl AsRef<Path>,
    width: usize,
    height: usize,
    gray: &[u8],
) -> Result<(), NetpbmError> {
    assert_eq!(gray.len(), width * height);
    let path = path.as_ref();
    let mut bytes = format!("P5\n{width} {height}\n255\n").into_bytes();
    bytes.extend_from_slice(gray);
    fs::write(path, bytes).map_err(|e| io_err(path, e))
}

fn encode_ppm(width: usize, height: usize, rgb: &[u8]) -> Vec<u8> {
    let mut bytes = format!("P6\n{width} {height}\n255\n").into_bytes();
    bytes.extend_from_slice(rgb);
    bytes
}

/// Decodes in-memory binary PPM/PGM bytes.
pub fn decode(data: &[u8]) -> Result<RgbImage, NetpbmError> {
    let mut cursor = Cursor { data, pos: 0 };
    let magic = cursor.magic()?;
    let channels = match magic.as_str() {
        "P6" => 3,
        "P5" => 1,
        _ => return Err(NetpbmError::UnsupportedFormat(magic)),
    };
    let width = cursor.ascii_field("width")?;
    let height = cursor.ascii_field("height")?;
    let maxval = cursor.ascii_field("maxval")?;
    if width == 0 || height == 0 {
        return Err(NetpbmError::Malformed(format!(
            "zero dimension {width}x{height}"
        )));
    }
    if maxval != 255 {
        return Err(NetpbmError::UnsupportedDepth(maxval));
    }
    cursor.single_whitespace()?;
    let expected = width as usize * height as usize * channels;
    let payload = cursor.rest();
    if payload.len() < expected {
        return Err(NetpbmError::Malformed(format!(
            "truncated pixel data: {} of {expected} bytes",
            payload.len()
        )));
    }
    let payload = &payload[..expected];
    let image = match channels {
        3 => RgbImage::from_rgb8(width as usize, height as usize, payload)?,
        _ => {
            let rgb: Vec<u8> = payload.iter().flat_map(|&v| [v, v, v]).collect();
            RgbImage::from_rgb8(width as usize, height as usize, &rgb)?
        }
    };
    Ok(image)
}

/// Header scanner. Netpbm headers are ASCII tokens separated by whitespace,
/// with `#` comments running to end of line.
struct Cursor<'a> {
    data: &'a [u8],
    pos: usize,
}

impl Cursor<'_> {
    fn magic(&mut self) -> Result<String, NetpbmError> {
        if self.data.len() < 2 {
            return Err(NetpbmError::Malformed("missing magic".into()));
        }
        self.pos = 2;
        Ok(String::from_utf8_lossy(&self.data[..2]).into_owned())
    }

    fn skip_blanks(&mut self) -> Result<(), NetpbmError> {
        loop {
            match self.data.get(self.pos) {
                Some(b) if b.is_ascii_whitespace() => self.pos += 1,
                Some(b'#') => {
                    while !matches!(self.data.get(self.pos), None | Some(b'\n')) {
                        self.pos += 1;
                    }
                }
                Some(_) => return Ok(()),
                None => return Err(NetpbmError::Malformed("header ended early".into())),
            }
        }
    }

    fn ascii_field(&mut self, name: &str) -> Result<u32, NetpbmError> {
        self.skip_blanks()?;
        let start = self.pos;
        while matches!(self.data.get(self.pos), Some(b) if b.is_ascii_digit()) {
            self.pos += 1;
        }
        if self.pos == start {
            return Err(NetpbmError::Malformed(format!("missing {name} field")));
        }
        std::str::from_utf8(&self.data[start..self.pos])
            .ok()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| NetpbmError::Malformed(format!("unreadable {name} field")))
    }

    /// Exactly one whitespace byte separates the header from pixel data.
    fn single_whitespace(&mut self) -> Result<(), NetpbmError> {
        match self.data.get(self.pos) {
            Some(b) if b.is_ascii_whitespace() => {
                self.pos += 1;
                Ok(())
            }
            _ => Err(NetpbmError::Malformed(
                "missing separator before pixel data".into(),
            )),
        }
    }

    fn rest(&self) -> &[u8] {
        &self.data[self.pos..]
    }
}
