//! Binary PGM (P5) and PPM (P6) serialization.
//!
//! 8-bit gray and RGB frames round-trip through [`Frame`]; 16-bit PGM
//! (big-endian samples, used for millimeter-quantized depth) round-trips
//! through raw `u16` buffers.

use super::{Frame, ImagingError};
use std::fs;
use std::path::Path;

fn encode_header(magic: &str, width: usize, height: usize, maxval: u32) -> Vec<u8> {
    format!("{magic}\n{width} {height}\n{maxval}\n").into_bytes()
}

pub fn write_pgm(path: &Path, frame: &Frame) -> Result<(), ImagingError> {
    if frame.channels() != 1 {
        return Err(ImagingError::ChannelMismatch {
            expected: 1,
            got: frame.channels(),
        });
    }
    let mut bytes = encode_header("P5", frame.width(), frame.height(), 255);
    bytes.extend_from_slice(frame.data());
    fs::write(path, bytes)?;
    Ok(())
}

pub fn write_ppm(path: &Path, frame: &Frame) -> Result<(), ImagingError> {
    if frame.channels() != 3 {
        return Err(ImagingError::ChannelMismatch {
            expected: 3,
            got: frame.channels(),
        });
    }
    let mut bytes = encode_header("P6", frame.width(), frame.height(), 255);
    bytes.extend_from_slice(frame.data());
    fs::write(path, bytes)?;
    Ok(())
}

/// 16-bit PGM with big-endian samples, row-major.
pub fn write_pgm16(
    path: &Path,
    width: usize,
    height: usize,
    samples: &[u16],
) -> Result<(), ImagingError> {
    if samples.len() != width * height {
        return Err(ImagingError::DataLength {
            width,
            height,
            channels: 1,
            got: samples.len(),
        });
    }
    let mut bytes = encode_header("P5", width, height, 65535);
    for s in samples {
        bytes.extend_from_slice(&s.to_be_bytes());
    }
    fs::write(path, bytes)?;
    Ok(())
}

struct Header {
    width: usize,
    height: usize,
    maxval: u32,
    data_offset: usize,
}

/// Parses `magic`, width, height, maxval; tolerates `#` comments between
/// tokens. Binary data starts one whitespace byte after the maxval token.
fn parse_header(bytes: &[u8], magic: &[u8]) -> Result<Header, ImagingError> {
    let mut pos = 0usize;
    let mut next_token = |bytes: &[u8]| -> Result<(usize, usize), ImagingError> {
        loop {
            while pos < bytes.len() && bytes[pos].is_ascii_whitespace() {
                pos += 1;
            }
            if pos < bytes.len() && bytes[pos] == b'#' {
                while pos < bytes.len() && bytes[pos] != b'\n' {
                    pos += 1;
                }
                continue;
            }
            break;
        }
        if pos >= bytes.len() {
            return Err(ImagingError::Malformed("truncated header".into()));
        }
        let start = pos;
        while pos < bytes.len() && !bytes[pos].is_ascii_whitespace() {
            pos += 1;
        }
        Ok((start, pos))
    };

    let (s, e) = next_token(bytes)?;
    if &bytes[s..e] != magic {
        return Err(ImagingError::Malformed(format!(
            "expected magic {:?}, got {:?}",
            String::from_utf8_lossy(magic),
            String::from_utf8_lossy(&bytes[s..e])
        )));
    }
    let mut read_number = |bytes: &[u8]| -> Result<u64, ImagingError> {
        let (s, e) = next_token(bytes)?;
        std::str::from_utf8(&bytes[s..e])
            .ok()
            .and_then(|t| t.parse::<u64>().ok())
            .ok_or_else(|| ImagingError::Malformed("non-numeric header field".into()))
    };
    let width = read_number(bytes)? as usize;
    let height = read_number(bytes)? as usize;
    let maxval = read_number(bytes)? as u32;
    if width == 0 || height == 0 {
        return Err(ImagingError::Malformed("zero image dimension".into()));
    }
    if maxval == 0 || maxval > 65535 {
        return Err(ImagingError::Malformed(format!("invalid maxval {maxval}")));
    }
    // Exactly one whitespace byte separates the header from the raster.
    if pos >= bytes.len() || !bytes[pos].is_ascii_whitespace() {
        return Err(ImagingError::Malformed("missing raster separator".into()));
    }
    Ok(Header {
        width,
        height,
        maxval,
        data_offset: pos + 1,
    })
}

fn read_samples_8(bytes: &[u8], header: &Header, channels: usize) -> Result<Vec<u8>, ImagingError> {
    let expected = header.width * header.height * channels;
    let raster = &bytes[header.data_offset..];
    if raster.len() < expected {
        return Err(ImagingError::Malformed(format!(
            "raster holds {} bytes, expected {expected}",
            raster.len()
        )));
    }
    Ok(raster[..expected].to_vec())
}

pub fn read_pgm(path: &Path) -> Result<Frame, ImagingError> {
    let bytes = fs::read(path)?;
    let header = parse_header(&bytes, b"P5")?;
    if header.maxval > 255 {
        return Err(ImagingError::Malformed(format!(
            "16-bit PGM (maxval {}), use the 16-bit reader",
            header.maxval
        )));
    }
    let data = read_samples_8(&bytes, &header, 1)?;
    Frame::new(header.width, header.height, 1, data)
}

pub fn read_ppm(path: &Path) -> Result<Frame, ImagingError> {
    let bytes = fs::read(path)?;
    let header = parse_header(&bytes, b"P6")?;
    if header.maxval > 255 {
        return Err(ImagingError::Malformed(format!(
            "unsupported PPM maxval {}",
            header.maxval
        )));
    }
    let data = read_samples_8(&bytes, &header, 3)?;
    Frame::new(header.width, header.height, 3, data)
}

pub fn read_pgm16(path: &Path) -> Result<(usize, usize, Vec<u16>), ImagingError> {
    let bytes = fs::read(path)?;
    let header = parse_header(&bytes, b"P5")?;
    if header.maxval <= 255 {
        return Err(ImagingError::Malformed(format!(
            "8-bit PGM (maxval {}), use the 8-bit reader",
            header.maxval
        )));
    }
    let expected = header.width * header.height * 2;
    let raster = &bytes[header.data_offset..];
    if raster.len() < expected {
        return Err(ImagingError::Malformed(format!(
            "raster holds {} bytes, expected {expected}",
            raster.len()
        )));
    }
    let samples = raster[..expected]
        .chunks_exact(2)
        .map(|pair| u16::from_be_bytes([pair[0], pair[1]]))
        .collect();
    Ok((header.width, header.height, samples))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tmp(name: &str) -> std::path::PathBuf {
        let dir = std::env::temp_dir().join("safeland-pnm-tests");
        fs::create_dir_all(&dir).unwrap();
        dir.join(name)
    }

    #[test]
    fn pgm_round_trip() {
        let data: Vec<u8> = (0..30).map(|i| (i * 8) as u8).collect();
        let frame = Frame::new(6, 5, 1, data).unwrap();
        let path = tmp("round.pgm");
        write_pgm(&path, &frame).unwrap();
        assert_eq!(read_pgm(&path).unwrap(), frame);
    }

    #[test]
    fn ppm_round_trip() {
        let data: Vec<u8> = (0..36).map(|i| (i * 7) as u8).collect();
        let frame = Frame::new(4, 3, 3, data).unwrap();
        let path = tmp("round.ppm");
        write_ppm(&path, &frame).unwrap();
        assert_eq!(read_ppm(&path).unwrap(), frame);
    }

    #[test]
    fn pgm16_round_trip() {
        let samples: Vec<u16> = (0..12).map(|i| i * 5000).collect();
        let path = tmp("round16.pgm");
        write_pgm16(&path, 4, 3, &samples).unwrap();
        let (w, h, back) = read_pgm16(&path).unwrap();
        assert_eq!((w, h), (4, 3));
        assert_eq!(back, samples);
    }

    #[test]
    fn header_comments_are_skipped() {
        let path = tmp("comment.pgm");
        let mut bytes = b"P5\n# produced by a test\n3 2\n# maxval next\n255\n".to_vec();
        bytes.extend_from_slice(&[1, 2, 3, 4, 5, 6]);
        fs::write(&path, bytes).unwrap();
        let frame = read_pgm(&path).unwrap();
        assert_eq!((frame.width(), frame.height()), (3, 2));
        assert_eq!(frame.data(), &[1, 2, 3, 4, 5, 6]);
    }

    #[test]
    fn truncated_raster_is_rejected() {
        let path = tmp("short.pgm");
        fs::write(&path, b"P5\n4 4\n255\nabc").unwrap();
        assert!(matches!(read_pgm(&path), Err(ImagingError::Malformed(_))));
    }

    #[test]
    fn wrong_magic_is_rejected() {
        let path = tmp("magic.pgm");
        fs::write(&path, b"P6\n1 1\n255\nxyz").unwrap();
        assert!(matches!(read_pgm(&path), Err(ImagingError::Malformed(_))));
    }
}
