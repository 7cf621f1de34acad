//! Binary PGM (P5) reading and writing.
//!
//! Label maps use 16-bit big-endian samples (maxval 65535); masks and
//! probability maps use 8-bit samples. Big-endian sample order follows the
//! Netpbm specification for maxval > 255.

use std::io::{Read, Write};

use crate::error::{Error, Result};

#[derive(Debug, Clone)]
pub struct Pgm {
    pub width: usize,
    pub height: usize,
    pub maxval: u16,
    /// Samples widened to u16 regardless of source depth.
    pub data: Vec<u16>,
}

pub fn write_pgm16<W: Write>(mut w: W, width: usize, height: usize, data: &[u16]) -> Result<()> {
    assert_eq!(data.len(), width * height);
    write!(w, "P5\n{width} {height}\n65535\n")?;
    let mut buf = Vec::with_capacity(data.len() * 2);
    for &v in data {
        buf.extend_from_slice(&v.to_be_bytes());
    }
    w.write_all(&buf)?;
    Ok(())
}

pub fn write_pgm8<W: Write>(mut w: W, width: usize, height: usize, data: &[u8]) -> Result<()> {
    assert_eq!(data.len(), width * height);
    write!(w, "P5\n{width} {height}\n255\n")?;
    w.write_all(data)?;
    Ok(())
}

pub fn read_pgm<R: Read>(mut r: R) -> Result<Pgm> {
    let mut bytes = Vec::new();
    r.read_to_end(&mut bytes)?;
    let mut pos = 0usize;

    if bytes.len() < 2 || &bytes[0..2] != b"P5" {
        return Err(Error::parse(1, "not a binary PGM (missing P5 signature)"));
    }
    pos += 2;

    let mut fields = [0usize; 3];
    for field in fields.iter_mut() {
        *field = read_header_int(&bytes, &mut pos)?;
    }
    let (width, height, maxval) = (fields[0], fields[1], fields[2]);
    if width == 0 || height == 0 {
        return Err(Error::parse(1, format!("bad PGM dimensions {width}x{height}")));
    }
    if maxval == 0 || maxval > 65535 {
        return Err(Error::parse(1, format!("bad PGM maxval {maxval}")));
    }
    // Exactly one whitespace byte separates the header from the raster.
    match bytes.get(pos) {
        Some(b) if b.is_ascii_whitespace() => pos += 1,
        _ => return Err(Error::parse(1, "missing whitespace after PGM maxval")),
    }

    let samples = width * height;
    let data = if maxval > 255 {
        let need = samples * 2;
        let raster = bytes
            .get(pos..pos + need)
            .ok_or_else(|| Error::parse(1, "PGM raster shorter than header implies"))?;
        raster
            .chunks_exact(2)
            .map(|c| u16::from_be_bytes([c[0], c[1]]))
            .collect()
    } else {
        let raster = bytes
            .get(pos..pos + samples)
            .ok_or_else(|| Error::parse(1, "PGM raster shorter than header implies"))?;
        raster.iter().map(|&b| u16::from(b)).collect()
    };

    Ok(Pgm {
        width,
        height,
        maxval: maxval as u16,
        data,
    })
}

fn read_header_int(bytes: &[u8], pos: &mut usize) -> Result<usize> {
    // Skip whitespace and '#' comment lines.
    loop {
        match bytes.get(*pos) {
            Some(b) if b.is_ascii_whitespace() => *pos += 1,
            Some(b'#') => {
                while let Some(&b) = bytes.get(*pos) {
                    *pos += 1;
                    if b == b'\n' {
                        break;
                    }
                }
            }
            Some(_) => break,
            None => return Err(Error::parse(1, "unexpected end of PGM header")),
        }
    }
    let start = *pos;
    while let Some(b) = bytes.get(*pos) {
        if b.is_ascii_digit() {
            *pos += 1;
        } else {
            break;
        }
    }
    if *pos == start {
        return Err(Error::parse(1, "expected integer in PGM header"));
    }
    let text = std::str::from_utf8(&bytes[start..*pos]).expect("digits are ascii");
    text.parse::<usize>()
        .map_err(|_| Error::parse(1, format!("integer {text} out of range")))
}
