//! Binary PGM (`P5`) with an 8-bit maxval of 255.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use super::GrayImage;
use crate::error::{LowRankError, Result};

fn malformed(reason: impl Into<String>) -> LowRankError {
    LowRankError::format("PGM", reason)
}

/// Header tokenizer: whitespace separated, `#` comments run to end of line.
struct Header<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl Header<'_> {
    fn skip_space(&mut self) {
        while let Some(&b) = self.bytes.get(self.pos) {
            if b == b'#' {
                while self.bytes.get(self.pos).is_some_and(|&c| c != b'\n') {
                    self.pos += 1;
                }
            } else if b.is_ascii_whitespace() {
                self.pos += 1;
            } else {
                break;
            }
        }
    }

    fn token(&mut self) -> Result<&str> {
        self.skip_space();
        let start = self.pos;
        while self
            .bytes
            .get(self.pos)
            .is_some_and(|b| !b.is_ascii_whitespace() && *b != b'#')
        {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(malformed("truncated header"));
        }
        std::str::from_utf8(&self.bytes[start..self.pos]).map_err(|_| malformed("non-ASCII header"))
    }

    fn number(&mut self, what: &str) -> Result<usize> {
        let tok = self.token()?;
        tok.parse().map_err(|_| malformed(format!("bad {what} '{tok}'")))
    }
}

pub fn decode_pgm(bytes: &[u8]) -> Result<GrayImage> {
    let mut h = Header { bytes, pos: 0 };
    if h.token()? != "P5" {
        return Err(malformed("not a binary PGM (expected P5)"));
    }
    let width = h.number("width")?;
    let height = h.number("height")?;
    let maxval = h.number("maxval")?;
    if maxval != 255 {
        return Err(malformed(format!("unsupported maxval {maxval}")));
    }
    // exactly one whitespace byte separates the header from the raster
    match bytes.get(h.pos) {
        Some(b) if b.is_ascii_whitespace() => h.pos += 1,
        _ => return Err(malformed("truncated header")),
    }
    let len = width
        .checked_mul(height)
        .ok_or_else(|| malformed("dimensions overflow"))?;
    let raster = &bytes[h.pos..];
    if raster.len() < len {
        return Err(malformed(format!("truncated payload: {} of {len} bytes", raster.len())));
    }
    GrayImage::new(width, height, raster[..len].to_vec())
}

pub fn encode_pgm(img: &GrayImage) -> Vec<u8> {
    let mut out = format!("P5\n{} {}\n255\n", img.width(), img.height()).into_bytes();
    out.extend_from_slice(img.pixels());
    out
}

pub fn read_pgm(path: impl AsRef<Path>) -> Result<GrayImage> {
    let mut bytes = Vec::new();
    BufReader::new(File::open(path)?).read_to_end(&mut bytes)?;
    decode_pgm(&bytes)
}

pub fn write_pgm(img: &GrayImage, path: impl AsRef<Path>) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    w.write_all(&encode_pgm(img))?;
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::image::synth;

    #[test]
    fn single_pixel_layout() {
        let img = GrayImage::new(1, 1, vec![128]).unwrap();
        let bytes = encode_pgm(&img);
        assert_eq!(bytes, b"P5\n1 1\n255\n\x80");
        assert_eq!(decode_pgm(&bytes).unwrap(), img);
    }

    #[test]
    fn gradient_round_trip_on_disk() {
        let img = synth::gradient(512, 512);
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("g.pgm");
        write_pgm(&img, &path).unwrap();
        assert_eq!(read_pgm(&path).unwrap(), img);
    }

    #[test]
    fn comments_and_odd_spacing() {
        let bytes = b"P5 # made by hand\n# another\n3\t2 255\n\x01\x02\x03\x04\x05\x06";
        let img = decode_pgm(bytes).unwrap();
        assert_eq!((img.width(), img.height()), (3, 2));
        assert_eq!(img.get(2, 1), 6);
    }

    #[test]
    fn malformed_files() {
        for bad in [
            &b"P2\n1 1\n255\n\x00"[..],
            b"P5\n1 1\n65535\n\x00\x00",
            b"P5\n2 2\n255\n\x00\x00\x00",
            b"P5\n2",
            b"P5\nx 2\n255\n",
            b"",
        ] {
            assert!(matches!(decode_pgm(bad), Err(LowRankError::Format { .. })), "{bad:?}");
        }
    }
}
