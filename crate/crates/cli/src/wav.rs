//! Minimal RIFF/WAVE reader and writer.
//!
//! Files are written as mono IEEE float (format code 3) with a `fact`
//! chunk. The reader accepts 8/16/24/32-bit PCM and 32/64-bit float,
//! including the extensible header, and mixes channels down to mono.

use std::fs::File;
use std::io::{self, BufWriter, Read, Write};
use std::path::Path;

const PCM: u16 = 1;
const FLOAT: u16 = 3;
const EXTENSIBLE: u16 = 0xFFFE;

fn invalid(msg: impl Into<String>) -> io::Error {
    io::Error::new(io::ErrorKind::InvalidData, msg.into())
}

/// Encodes `samples` as 32-bit float WAV, clipping to [-1, 1]. Returns the
/// bytes and the number of clipped samples.
pub fn encode(samples: &[f64], sample_rate: u32) -> (Vec<u8>, usize) {
    let data_len = 4 * samples.len() as u32;
    let mut out = Vec::with_capacity(58 + data_len as usize);
    out.extend_from_slice(b"RIFF");
    out.extend_from_slice(&(50 + data_len).to_le_bytes());
    out.extend_from_slice(b"WAVE");

    out.extend_from_slice(b"fmt ");
    out.extend_from_slice(&18u32.to_le_bytes());
    out.extend_from_slice(&FLOAT.to_le_bytes());
    out.extend_from_slice(&1u16.to_le_bytes());
    out.extend_from_slice(&sample_rate.to_le_bytes());
    out.extend_from_slice(&(4 * sample_rate).to_le_bytes());
    out.extend_from_slice(&4u16.to_le_bytes());
    out.extend_from_slice(&32u16.to_le_bytes());
    out.extend_from_slice(&0u16.to_le_bytes());

    out.extend_from_slice(b"fact");
    out.extend_from_slice(&4u32.to_le_bytes());
    out.extend_from_slice(&(samples.len() as u32).to_le_bytes());

    out.extend_from_slice(b"data");
    out.extend_from_slice(&data_len.to_le_bytes());
    let mut clipped = 0;
    for &s in samples {
        let v = if s.is_nan() {
            clipped += 1;
            0.0
        } else if s.abs() > 1.0 {
            clipped += 1;
            s.clamp(-1.0, 1.0)
        } else {
            s
        };
        out.extend_from_slice(&(v as f32).to_le_bytes());
    }
    (out, clipped)
}

/// Writes a mono float WAV; returns the clip count.
pub fn write_wav(path: &Path, samples: &[f64], sample_rate: u32) -> io::Result<usize> {
    let (bytes, clipped) = encode(samples, sample_rate);
    let mut w = BufWriter::new(File::create(path)?);
    w.write_all(&bytes)?;
    w.flush()?;
    Ok(clipped)
}

#[derive(Debug, Clone, PartialEq)]
pub struct Wav {
    pub sample_rate: u32,
    pub channels: u16,
    /// Mono mixdown.
    pub samples: Vec<f64>,
}

fn u16_at(b: &[u8], i: usize) -> u16 {
    u16::from_le_bytes([b[i], b[i + 1]])
}

fn u32_at(b: &[u8], i: usize) -> u32 {
    u32::from_le_bytes([b[i], b[i + 1], b[i + 2], b[i + 3]])
}

pub fn decode(bytes: &[u8]) -> io::Result<Wav> {
    if bytes.len() < 12 || &bytes[..4] != b"RIFF" || &bytes[8..12] != b"WAVE" {
        return Err(invalid("not a RIFF/WAVE file"));
    }
    let mut fmt: Option<(u16, u16, u32, u16)> = None;
    let mut data: Option<&[u8]> = None;
    let mut pos = 12;
    while pos + 8 <= bytes.len() {
        let id = &bytes[pos..pos + 4];
        let len = u32_at(bytes, pos + 4) as usize;
        let body = &bytes[pos + 8..(pos + 8 + len).min(bytes.len())];
        match id {
            b"fmt " => {
                if body.len() < 16 {
                    return Err(invalid("fmt chunk too short"));
                }
                let mut code = u16_at(body, 0);
                if code == EXTENSIBLE {
                    if body.len() < 26 {
                        return Err(invalid("extensible fmt chunk too short"));
                    }
                    code = u16_at(body, 24);
                }
                fmt = Some((code, u16_at(body, 2), u32_at(body, 4), u16_at(body, 14)));
            }
            b"data" => data = Some(body),
            _ => {}
        }
        pos += 8 + len + (len & 1);
    }
    let (code, channels, sample_rate, bits) = fmt.ok_or_else(|| invalid("missing fmt chunk"))?;
    let data = data.ok_or_else(|| invalid("missing data chunk"))?;
    if channels == 0 {
        return Err(invalid("zero channels"));
    }
    let width = (bits as usize).div_ceil(8);
    let decode_one: fn(&[u8]) -> f64 = match (code, bits) {
        (PCM, 8) => |b| (b[0] as f64 - 128.0) / 128.0,
        (PCM, 16) => |b| i16::from_le_bytes([b[0], b[1]]) as f64 / 32768.0,
        (PCM, 24) => |b| (i32::from_le_bytes([0, b[0], b[1], b[2]]) >> 8) as f64 / 8_388_608.0,
        (PCM, 32) => |b| i32::from_le_bytes([b[0], b[1], b[2], b[3]]) as f64 / 2_147_483_648.0,
        (FLOAT, 32) => |b| f32::from_le_bytes([b[0], b[1], b[2], b[3]]) as f64,
        (FLOAT, 64) => |b| f64::from_le_bytes(b[..8].try_into().unwrap()),
        _ => return Err(invalid(format!("unsupported sample format (code {code}, {bits} bits)"))),
    };
    let frame = width * channels as usize;
    let samples = data
        .chunks_exact(frame)
        .map(|f| f.chunks_exact(width).map(decode_one).sum::<f64>() / channels as f64)
        .collect();
    Ok(Wav {
        sample_rate,
        channels,
        samples,
    })
}

pub fn read_wav(path: &Path) -> io::Result<Wav> {
    let mut bytes = Vec::new();
    File::open(path)?.read_to_end(&mut bytes)?;
    decode(&bytes)
}
