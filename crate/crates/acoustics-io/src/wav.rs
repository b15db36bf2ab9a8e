//! Mono 16-bit PCM WAV writing and reading.
//!
//! Files use the canonical 44-byte header; every multi-byte field is
//! little-endian.
//!
//! | offset | size | field                          |
//! |--------|------|--------------------------------|
//! | 0      | 4    | "RIFF"                         |
//! | 4      | 4    | 36 + 2·n (u32)                 |
//! | 8      | 4    | "WAVE"                         |
//! | 12     | 4    | "fmt "                         |
//! | 16     | 4    | 16 (u32, fmt chunk size)       |
//! | 20     | 2    | 1 (u16, PCM)                   |
//! | 22     | 2    | 1 (u16, mono)                  |
//! | 24     | 4    | sample rate (u32)              |
//! | 28     | 4    | byte rate = 2·rate (u32)       |
//! | 32     | 2    | block align = 2 (u16)          |
//! | 34     | 2    | 16 (u16, bits per sample)      |
//! | 36     | 4    | "data"                         |
//! | 40     | 4    | 2·n (u32)                      |
//! | 44     | 2·n  | samples (i16 LE)               |
//!
//! The reader is stricter than the writer is simple: it walks the chunk
//! list, skips unknown chunks (pad byte included), and rejects anything
//! that is not mono 16-bit integer PCM. It never trusts the RIFF size
//! field and never panics on malformed bytes.

use std::fs;
use std::io;
use std::path::Path;

/// Decoded (or to-be-encoded) mono PCM16 audio.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AudioBuffer {
    pub samples: Vec<i16>,
    pub sample_rate: u32,
}

#[derive(Debug, thiserror::Error)]
pub enum WavError {
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: io::Error,
    },
    #[error("file truncated at byte {offset}")]
    Truncated { offset: usize },
    #[error("not a RIFF/WAVE file")]
    Magic,
    #[error("missing required chunk {name:?}")]
    MissingChunk { name: &'static str },
    #[error("unsupported format: {detail}")]
    Unsupported { detail: String },
}

/// Writes `buffer` as a canonical 44-byte-header mono PCM16 WAV file.
///
/// The buffer must be nonempty; I/O failures carry the path.
pub fn write_wav(buffer: &AudioBuffer, path: &Path) -> Result<(), WavError> {
    assert!(!buffer.samples.is_empty(), "cannot write an empty WAV file");
    let data_len = buffer.samples.len() * 2;
    assert!(data_len <= u32::MAX as usize - 36, "WAV payload too large");

    let mut bytes = Vec::with_capacity(44 + data_len);
    bytes.extend_from_slice(b"RIFF");
    bytes.extend_from_slice(&(36 + data_len as u32).to_le_bytes());
    bytes.extend_from_slice(b"WAVE");
    bytes.extend_from_slice(b"fmt ");
    bytes.extend_from_slice(&16u32.to_le_bytes());
    bytes.extend_from_slice(&1u16.to_le_bytes()); // PCM
    bytes.extend_from_slice(&1u16.to_le_bytes()); // mono
    bytes.extend_from_slice(&buffer.sample_rate.to_le_bytes());
    bytes.extend_from_slice(&(2 * buffer.sample_rate).to_le_bytes());
    bytes.extend_from_slice(&2u16.to_le_bytes()); // block align
    bytes.extend_from_slice(&16u16.to_le_bytes()); // bits per sample
    bytes.extend_from_slice(b"data");
    bytes.extend_from_slice(&(data_len as u32).to_le_bytes());
    for &sample in &buffer.samples {
        bytes.extend_from_slice(&sample.to_le_bytes());
    }

    fs::write(path, &bytes).map_err(|source| WavError::Io {
        path: path.display().to_string(),
        source,
    })
}

/// Reads the WAV file at `path`. See [`parse_wav`] for format requirements.
pub fn read_wav(path: &Path) -> Result<AudioBuffer, WavError> {
    let bytes = fs::read(path).map_err(|source| WavError::Io {
        path: path.display().to_string(),
        source,
    })?;
    parse_wav(&bytes)
}

/// Decodes a mono 16-bit PCM WAV from raw bytes.
///
/// Walks the chunk list after the 12-byte RIFF header, requiring one
/// "fmt " chunk (integer PCM, one channel, 16 bits, positive rate) and
/// one "data" chunk; other chunks are skipped. The RIFF size field is
/// ignored in favor of the actual byte count.
pub fn parse_wav(bytes: &[u8]) -> Result<AudioBuffer, WavError> {
    if bytes.len() < 12 {
        return Err(WavError::Truncated { offset: bytes.len() });
    }
    if &bytes[0..4] != b"RIFF" || &bytes[8..12] != b"WAVE" {
        return Err(WavError::Magic);
    }

    let mut sample_rate: Option<u32> = None;
    let mut data: Option<&[u8]> = None;
    let mut offset = 12usize;
    while offset < bytes.len() {
        if bytes.len() - offset < 8 {
            return Err(WavError::Truncated { offset });
        }
        let id = &bytes[offset..offset + 4];
        let size = u32::from_le_bytes(bytes[offset + 4..offset + 8].try_into().unwrap()) as usize;
        let body_start = offset + 8;
        let body_end = body_start
            .checked_add(size)
            .ok_or(WavError::Truncated { offset })?;
        if body_end > bytes.len() {
            return Err(WavError::Truncated { offset: bytes.len() });
        }
        let body = &bytes[body_start..body_end];

        match id {
            b"fmt " => {
                if body.len() < 16 {
                    return Err(WavError::Truncated { offset: body_start });
                }
                let format = u16::from_le_bytes(body[0..2].try_into().unwrap());
                let channels = u16::from_le_bytes(body[2..4].try_into().unwrap());
                let rate = u32::from_le_bytes(body[4..8].try_into().unwrap());
                let bits = u16::from_le_bytes(body[14..16].try_into().unwrap());
                if format != 1 {
                    return Err(WavError::Unsupported {
                        detail: format!("audio format {format}, only integer PCM (1) is supported"),
                    });
                }
                if channels != 1 {
                    return Err(WavError::Unsupported {
                        detail: format!("{channels} channels, only mono is supported"),
                    });
                }
                if bits != 16 {
                    return Err(WavError::Unsupported {
                        detail: format!("{bits} bits per sample, only 16 is supported"),
                    });
                }
                if rate == 0 {
                    return Err(WavError::Unsupported {
                        detail: "sample rate 0".to_string(),
                    });
                }
                sample_rate = Some(rate);
            }
            b"data" => {
                if size % 2 != 0 {
                    return Err(WavError::Truncated { offset: body_end });
                }
                data = Some(body);
            }
            _ => {}
        }

        // Chunks are word-aligned: odd sizes are followed by a pad byte.
        offset = body_end + (size % 2);
    }

    let sample_rate = sample_rate.ok_or(WavError::MissingChunk { name: "fmt " })?;
    let data = data.ok_or(WavError::MissingChunk { name: "data" })?;
    let samples = data
        .chunks_exact(2)
        .map(|pair| i16::from_le_bytes([pair[0], pair[1]]))
        .collect();
    Ok(AudioBuffer { samples, sample_rate })
}
