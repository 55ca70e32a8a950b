//! Trie node kinds and their canonical encodings.
//!
//! Node encoding byte layouts (integers big-endian):
//!
//! * leaf:      `0x01 | path | u32 value_len | value`
//! * extension: `0x02 | path | 32-byte child digest`
//! * branch:    `0x03 | u16 child bitmap | 32-byte digest per set bit
//!               (ascending nibble) | u8 has_value | [u32 len | value]`
//!
//! where `path` is `u8 nibble_count | packed nibbles` (two per byte, high
//! nibble first, odd tails padded with a zero low nibble). A node's digest is
//! the SHA-256 of its encoding; the all-zero-input empty trie is represented
//! by the digest of the single byte `0x00`.

use crate::crypto::{sha256, Digest32};
use crate::encoding::{ByteReader, ByteWriter, DecodeError};

pub const LEAF_TAG: u8 = 0x01;
pub const EXTENSION_TAG: u8 = 0x02;
pub const BRANCH_TAG: u8 = 0x03;
const EMPTY_TRIE_TAG: u8 = 0x00;

/// Root digest of a trie holding no keys.
pub fn empty_root() -> Digest32 {
    sha256(&[EMPTY_TRIE_TAG])
}

/// Split a key into 4-bit path elements, high nibble first.
pub fn key_to_nibbles(key: &[u8]) -> Vec<u8> {
    let mut nibbles = Vec::with_capacity(key.len() * 2);
    for byte in key {
        nibbles.push(byte >> 4);
        nibbles.push(byte & 0x0F);
    }
    nibbles
}

pub fn common_prefix_len(a: &[u8], b: &[u8]) -> usize {
    a.iter().zip(b.iter()).take_while(|(x, y)| x == y).count()
}

fn write_path(w: &mut ByteWriter, path: &[u8]) {
    debug_assert!(path.iter().all(|n| *n < 16));
    w.put_u8(path.len() as u8);
    let mut packed = Vec::with_capacity(path.len().div_ceil(2));
    for pair in path.chunks(2) {
        let hi = pair[0] << 4;
        let lo = if pair.len() == 2 { pair[1] } else { 0 };
        packed.push(hi | lo);
    }
    w.put_fixed(&packed);
}

fn read_path(r: &mut ByteReader<'_>) -> Result<Vec<u8>, DecodeError> {
    let count = r.u8()? as usize;
    let packed_len = count.div_ceil(2);
    let mut path = Vec::with_capacity(count);
    for i in 0..packed_len {
        let byte = r.u8()?;
        path.push(byte >> 4);
        if path.len() < count {
            path.push(byte & 0x0F);
        } else if byte & 0x0F != 0 {
            // Odd-length paths must pad with a zero nibble.
            return Err(DecodeError::InvalidValue("path padding"));
        }
        let _ = i;
    }
    Ok(path)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Node {
    Leaf {
        path: Vec<u8>,
        value: Vec<u8>,
    },
    Extension {
        path: Vec<u8>,
        child: Digest32,
    },
    Branch {
        children: [Option<Digest32>; 16],
        value: Option<Vec<u8>>,
    },
}

impl Node {
    pub fn encode(&self) -> Vec<u8> {
        let mut w = ByteWriter::with_capacity(64);
        match self {
            Node::Leaf { path, value } => {
                w.put_u8(LEAF_TAG);
                write_path(&mut w, path);
                w.put_var(value);
            }
            Node::Extension { path, child } => {
                w.put_u8(EXTENSION_TAG);
                write_path(&mut w, path);
                w.put_fixed(child);
            }
            Node::Branch { children, value } => {
                w.put_u8(BRANCH_TAG);
                let mut bitmap = 0u16;
                for (i, child) in children.iter().enumerate() {
                    if child.is_some() {
                        bitmap |= 1 << i;
                    }
                }
                w.put_u16(bitmap);
                for child in children.iter().flatten() {
                    w.put_fixed(child);
                }
                match value {
                    Some(v) => {
                        w.put_u8(1);
                        w.put_var(v);
                    }
                    None => w.put_u8(0),
                }
            }
        }
        w.finish()
    }

    pub fn decode(bytes: &[u8]) -> Result<Node, DecodeError> {
        let mut r = ByteReader::new(bytes);
        let node = match r.u8()? {
            LEAF_TAG => {
                let path = read_path(&mut r)?;
                let value = r.var()?.to_vec();
                if value.is_empty() {
                    return Err(DecodeError::InvalidValue("empty leaf value"));
                }
                Node::Leaf { path, value }
            }
            EXTENSION_TAG => {
                let path = read_path(&mut r)?;
                if path.is_empty() {
                    return Err(DecodeError::InvalidValue("empty extension path"));
                }
                Node::Extension {
                    path,
                    child: r.fixed::<32>()?,
                }
            }
            BRANCH_TAG => {
                let bitmap = r.u16()?;
                let mut children: [Option<Digest32>; 16] = Default::default();
                for (i, slot) in children.iter_mut().enumerate() {
                    if bitmap & (1 << i) != 0 {
                        *slot = Some(r.fixed::<32>()?);
                    }
                }
                let value = match r.u8()? {
                    0 => None,
                    1 => {
                        let v = r.var()?.to_vec();
                        if v.is_empty() {
                            return Err(DecodeError::InvalidValue("empty branch value"));
                        }
                        Some(v)
                    }
                    _ => return Err(DecodeError::InvalidValue("branch value flag")),
                };
                Node::Branch { children, value }
            }
            _ => return Err(DecodeError::InvalidValue("node tag")),
        };
        r.expect_end()?;
        Ok(node)
    }

    pub fn digest(&self) -> Digest32 {
        sha256(&self.encode())
    }
}
