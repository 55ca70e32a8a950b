//! Merkle state proofs and their stateless verification.
//!
//! A proof is the ordered list of canonical node encodings from the root to
//! a terminal node: the matching leaf (or valued branch) for inclusion, or
//! the node where the key's path diverges for absence. Verification needs no
//! trie — only the 32-byte root digest from a block header.
//!
//! Proof blob layout: `u32 key_len | key | u8 value_flag | [u32 len | value]
//! | u32 node_count | (u32 len | node bytes)*`.

use super::node::{empty_root, key_to_nibbles, Node};
use super::{KEY_LEN, MAX_PROOF_NODES};
use crate::crypto::{sha256, Digest32};
use crate::encoding::{ByteReader, ByteWriter, DecodeError};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MerkleProof {
    /// The key the proof speaks for.
    pub key: Vec<u8>,
    /// Claimed value; `None` claims absence.
    pub value: Option<Vec<u8>>,
    /// Canonical node encodings, root first.
    pub path_nodes: Vec<Vec<u8>>,
}

impl MerkleProof {
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut w = ByteWriter::new();
        w.put_var(&self.key);
        match &self.value {
            Some(v) => {
                w.put_u8(1);
                w.put_var(v);
            }
            None => w.put_u8(0),
        }
        w.put_u32(self.path_nodes.len() as u32);
        for node in &self.path_nodes {
            w.put_var(node);
        }
        w.finish()
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self, DecodeError> {
        let mut r = ByteReader::new(bytes);
        let proof = Self::read_from(&mut r)?;
        r.expect_end()?;
        Ok(proof)
    }

    pub(crate) fn read_from(r: &mut ByteReader<'_>) -> Result<MerkleProof, DecodeError> {
        let key = r.var()?.to_vec();
        let value = match r.u8()? {
            0 => None,
            1 => Some(r.var()?.to_vec()),
            _ => return Err(DecodeError::InvalidValue("value flag")),
        };
        let count = r.u32()? as usize;
        if count > MAX_PROOF_NODES {
            return Err(DecodeError::InvalidValue("proof node count"));
        }
        let mut path_nodes = Vec::with_capacity(count);
        for _ in 0..count {
            path_nodes.push(r.var()?.to_vec());
        }
        Ok(Self {
            key,
            value,
            path_nodes,
        })
    }

}

/// Outcome of stateless proof verification.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ProofOutcome {
    /// The proof is sound; the payload is the proven value (or absence).
    Verified(Option<Vec<u8>>),
    /// Hash mismatch, malformed node, path/key disagreement, or a claimed
    /// value that differs from what the path proves.
    Rejected,
}

impl ProofOutcome {
    pub fn is_verified(&self) -> bool {
        matches!(self, ProofOutcome::Verified(_))
    }
}

/// Verify `proof` against a state root. Stateless: everything needed is in
/// the proof itself.
pub fn verify_proof(root: &Digest32, key: &[u8; KEY_LEN], proof: &MerkleProof) -> ProofOutcome {
    if proof.key != key {
        return ProofOutcome::Rejected;
    }
    if proof.path_nodes.is_empty() {
        // Only the empty trie proves anything with no nodes: absence.
        if *root == empty_root() && proof.value.is_none() {
            return ProofOutcome::Verified(None);
        }
        return ProofOutcome::Rejected;
    }
    if proof.path_nodes.len() > MAX_PROOF_NODES {
        return ProofOutcome::Rejected;
    }

    let nibbles = key_to_nibbles(key);
    let mut rest: &[u8] = &nibbles;
    let mut expected_digest = *root;
    let mut resolved: Option<Option<Vec<u8>>> = None;

    for encoded in &proof.path_nodes {
        if resolved.is_some() {
            // Terminal node already reached; extra nodes are not allowed.
            return ProofOutcome::Rejected;
        }
        if sha256(encoded) != expected_digest {
            return ProofOutcome::Rejected;
        }
        let Ok(node) = Node::decode(encoded) else {
            return ProofOutcome::Rejected;
        };
        match node {
            Node::Leaf { path, value } => {
                resolved = Some((path.as_slice() == rest).then_some(value));
            }
            Node::Extension { path, child } => {
                if rest.len() >= path.len() && rest[..path.len()] == path[..] {
                    rest = &rest[path.len()..];
                    expected_digest = child;
                } else {
                    // Divergent extension terminates an absence proof.
                    resolved = Some(None);
                }
            }
            Node::Branch { children, value } => {
                if rest.is_empty() {
                    resolved = Some(value);
                } else {
                    match children[rest[0] as usize] {
                        Some(child) => {
                            rest = &rest[1..];
                            expected_digest = child;
                        }
                        None => resolved = Some(None),
                    }
                }
            }
        }
    }

    match resolved {
        // The path must end at a terminal node, and the claimed value must
        // match what the path actually proves.
        Some(value) if value == proof.value => ProofOutcome::Verified(value),
        _ => ProofOutcome::Rejected,
    }
}
