//! Authenticated key-value store: a modified Patricia trie over 32-byte
//! keys with SHA-256 node hashing.
//!
//! The node store is content-addressed and append-only — records are never
//! deleted, and inserting produces a new root while old roots stay provable
//! from the same store. That property is what lets a full node serve proofs
//! for any historical block height.

mod node;
mod proof;

pub use node::{common_prefix_len, empty_root, key_to_nibbles, Node};
pub use proof::{verify_proof, MerkleProof, ProofOutcome};

use crate::crypto::Digest32;
use std::collections::HashMap;
use thiserror::Error;

pub const KEY_LEN: usize = 32;
/// 64 nibbles plus a possible terminal branch.
pub const MAX_PROOF_NODES: usize = 2 * KEY_LEN + 1;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TrieError {
    #[error("values must be non-empty")]
    EmptyValue,
    #[error("root {0} is not present in the node store")]
    UnknownRoot(String),
    #[error("node store is missing an interior node")]
    MissingNode,
}

#[derive(Clone, Debug, Default)]
pub struct StateTrie {
    root: Option<Digest32>,
    nodes: HashMap<Digest32, Node>,
}

impl StateTrie {
    pub fn new() -> Self {
        Self::default()
    }

    /// Current root digest; a constant marker digest when the trie is empty.
    pub fn root_hash(&self) -> Digest32 {
        self.root.unwrap_or_else(empty_root)
    }

    /// Reset the current version to an earlier root. The store keeps every
    /// node ever written, so any previously returned root is valid here.
    pub fn reset_to_root(&mut self, root: Digest32) {
        if root == empty_root() {
            self.root = None;
        } else {
            debug_assert!(self.nodes.contains_key(&root));
            self.root = Some(root);
        }
    }

    fn store(&mut self, node: Node) -> Digest32 {
        let digest = node.digest();
        self.nodes.entry(digest).or_insert(node);
        digest
    }

    fn node(&self, digest: &Digest32) -> Result<&Node, TrieError> {
        self.nodes.get(digest).ok_or(TrieError::MissingNode)
    }

    /// Insert or overwrite `key`. Later writes win; empty values are
    /// rejected because record removal is not part of the model.
    pub fn insert(&mut self, key: &[u8; KEY_LEN], value: Vec<u8>) -> Result<(), TrieError> {
        if value.is_empty() {
            return Err(TrieError::EmptyValue);
        }
        let nibbles = key_to_nibbles(key);
        let new_root = self.insert_rec(self.root, &nibbles, value)?;
        self.root = Some(new_root);
        Ok(())
    }

    fn insert_rec(
        &mut self,
        at: Option<Digest32>,
        path: &[u8],
        value: Vec<u8>,
    ) -> Result<Digest32, TrieError> {
        let Some(digest) = at else {
            return Ok(self.store(Node::Leaf {
                path: path.to_vec(),
                value,
            }));
        };
        match self.node(&digest)?.clone() {
            Node::Leaf {
                path: leaf_path,
                value: leaf_value,
            } => {
                if leaf_path == path {
                    return Ok(self.store(Node::Leaf {
                        path: leaf_path,
                        value,
                    }));
                }
                let split = common_prefix_len(&leaf_path, path);
                let mut children: [Option<Digest32>; 16] = Default::default();
                let mut branch_value = None;
                if leaf_path.len() == split {
                    branch_value = Some(leaf_value);
                } else {
                    let idx = leaf_path[split] as usize;
                    children[idx] = Some(self.store(Node::Leaf {
                        path: leaf_path[split + 1..].to_vec(),
                        value: leaf_value,
                    }));
                }
                if path.len() == split {
                    branch_value = Some(value);
                } else {
                    let idx = path[split] as usize;
                    children[idx] = Some(self.store(Node::Leaf {
                        path: path[split + 1..].to_vec(),
                        value,
                    }));
                }
                let branch = self.store(Node::Branch {
                    children,
                    value: branch_value,
                });
                self.wrap_extension(&path[..split], branch)
            }
            Node::Extension {
                path: ext_path,
                child,
            } => {
                let split = common_prefix_len(&ext_path, path);
                if split == ext_path.len() {
                    let new_child = self.insert_rec(Some(child), &path[split..], value)?;
                    return Ok(self.store(Node::Extension {
                        path: ext_path,
                        child: new_child,
                    }));
                }
                // Diverges inside the extension: build a branch at the fork.
                let mut children: [Option<Digest32>; 16] = Default::default();
                let mut branch_value = None;
                let ext_idx = ext_path[split] as usize;
                let ext_rest = &ext_path[split + 1..];
                children[ext_idx] = Some(if ext_rest.is_empty() {
                    child
                } else {
                    self.store(Node::Extension {
                        path: ext_rest.to_vec(),
                        child,
                    })
                });
                if path.len() == split {
                    branch_value = Some(value);
                } else {
                    let idx = path[split] as usize;
                    children[idx] = Some(self.store(Node::Leaf {
                        path: path[split + 1..].to_vec(),
                        value,
                    }));
                }
                let branch = self.store(Node::Branch {
                    children,
                    value: branch_value,
                });
                self.wrap_extension(&path[..split], branch)
            }
            Node::Branch {
                mut children,
                value: branch_value,
            } => {
                if path.is_empty() {
                    return Ok(self.store(Node::Branch {
                        children,
                        value: Some(value),
                    }));
                }
                let idx = path[0] as usize;
                children[idx] = Some(self.insert_rec(children[idx], &path[1..], value)?);
                Ok(self.store(Node::Branch {
                    children,
                    value: branch_value,
                }))
            }
        }
    }

    fn wrap_extension(&mut self, prefix: &[u8], child: Digest32) -> Result<Digest32, TrieError> {
        if prefix.is_empty() {
            Ok(child)
        } else {
            Ok(self.store(Node::Extension {
                path: prefix.to_vec(),
                child,
            }))
        }
    }

    pub fn get(&self, key: &[u8; KEY_LEN]) -> Option<&[u8]> {
        self.get_at(self.root_hash(), key).ok().flatten()
    }

    /// Read `key` as of an arbitrary historical `root`.
    pub fn get_at(
        &self,
        root: Digest32,
        key: &[u8; KEY_LEN],
    ) -> Result<Option<&[u8]>, TrieError> {
        if root == empty_root() {
            return Ok(None);
        }
        if !self.nodes.contains_key(&root) {
            return Err(TrieError::UnknownRoot(hex::encode(root)));
        }
        let nibbles = key_to_nibbles(key);
        let mut rest: &[u8] = &nibbles;
        let mut current = root;
        loop {
            match self.node(&current)? {
                Node::Leaf { path, value } => {
                    return Ok((path.as_slice() == rest).then_some(value.as_slice()));
                }
                Node::Extension { path, child } => {
                    if rest.len() < path.len() || &rest[..path.len()] != path.as_slice() {
                        return Ok(None);
                    }
                    rest = &rest[path.len()..];
                    current = *child;
                }
                Node::Branch { children, value } => {
                    if rest.is_empty() {
                        return Ok(value.as_deref());
                    }
                    match children[rest[0] as usize] {
                        Some(child) => {
                            rest = &rest[1..];
                            current = child;
                        }
                        None => return Ok(None),
                    }
                }
            }
        }
    }

    /// Merkle proof of inclusion or absence for `key` at the current root.
    pub fn prove(&self, key: &[u8; KEY_LEN]) -> MerkleProof {
        self.prove_at(self.root_hash(), key)
            .expect("current root is always in the store")
    }

    /// Proof against an arbitrary historical root. Absence proofs include
    /// the terminal divergence node so verifiers can distinguish "absent"
    /// from "proof withheld".
    pub fn prove_at(
        &self,
        root: Digest32,
        key: &[u8; KEY_LEN],
    ) -> Result<MerkleProof, TrieError> {
        if root == empty_root() {
            return Ok(MerkleProof {
                key: key.to_vec(),
                value: None,
                path_nodes: Vec::new(),
            });
        }
        if !self.nodes.contains_key(&root) {
            return Err(TrieError::UnknownRoot(hex::encode(root)));
        }
        let nibbles = key_to_nibbles(key);
        let mut rest: &[u8] = &nibbles;
        let mut current = root;
        let mut path_nodes = Vec::new();
        let value = loop {
            let node = self.node(&current)?;
            path_nodes.push(node.encode());
            match node {
                Node::Leaf { path, value } => {
                    break (path.as_slice() == rest).then(|| value.clone());
                }
                Node::Extension { path, child } => {
                    if rest.len() < path.len() || &rest[..path.len()] != path.as_slice() {
                        break None;
                    }
                    rest = &rest[path.len()..];
                    current = *child;
                }
                Node::Branch { children, value } => {
                    if rest.is_empty() {
                        break value.clone();
                    }
                    match children[rest[0] as usize] {
                        Some(child) => {
                            rest = &rest[1..];
                            current = child;
                        }
                        None => break None,
                    }
                }
            }
        };
        Ok(MerkleProof {
            key: key.to_vec(),
            value,
            path_nodes,
        })
    }

    /// Number of nodes reachable plus retired; the store never shrinks.
    pub fn store_len(&self) -> usize {
        self.nodes.len()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::crypto::sha256;
    use rand::seq::SliceRandom;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha20Rng;
    use std::collections::BTreeMap;

    fn key(n: u64) -> [u8; 32] {
        sha256(&n.to_be_bytes())
    }

    #[test]
    fn insert_then_get() {
        let mut trie = StateTrie::new();
        assert_eq!(trie.get(&key(1)), None);
        trie.insert(&key(1), b"one".to_vec()).unwrap();
        assert_eq!(trie.get(&key(1)), Some(b"one".as_slice()));
        assert_eq!(trie.get(&key(2)), None);
    }

    #[test]
    fn last_write_wins() {
        let mut trie = StateTrie::new();
        trie.insert(&key(1), b"v1".to_vec()).unwrap();
        trie.insert(&key(1), b"v2".to_vec()).unwrap();
        assert_eq!(trie.get(&key(1)), Some(b"v2".as_slice()));
    }

    #[test]
    fn empty_value_rejected() {
        let mut trie = StateTrie::new();
        assert_eq!(trie.insert(&key(1), vec![]), Err(TrieError::EmptyValue));
    }

    #[test]
    fn root_is_insertion_order_independent() {
        let mut rng = ChaCha20Rng::seed_from_u64(31337);
        let mut entries: Vec<([u8; 32], Vec<u8>)> = (0..64)
            .map(|i| (key(i), format!("value-{i}").into_bytes()))
            .collect();

        let mut reference = StateTrie::new();
        for (k, v) in &entries {
            reference.insert(k, v.clone()).unwrap();
        }
        let expected = reference.root_hash();

        for _ in 0..100 {
            entries.shuffle(&mut rng);
            let mut trie = StateTrie::new();
            for (k, v) in &entries {
                trie.insert(k, v.clone()).unwrap();
            }
            assert_eq!(trie.root_hash(), expected);
        }
    }

    #[test]
    fn agrees_with_flat_map_oracle() {
        let mut rng = ChaCha20Rng::seed_from_u64(99);
        let mut trie = StateTrie::new();
        let mut oracle: BTreeMap<[u8; 32], Vec<u8>> = BTreeMap::new();
        // Keys drawn from a small id space so overwrites happen often.
        for _ in 0..10_000 {
            let k = key(rng.random_range(0..512));
            if rng.random_bool(0.5) {
                let v = vec![rng.random::<u8>().max(1); rng.random_range(1..24)];
                trie.insert(&k, v.clone()).unwrap();
                oracle.insert(k, v);
            } else {
                assert_eq!(trie.get(&k), oracle.get(&k).map(|v| v.as_slice()));
            }
        }
        for (k, v) in &oracle {
            assert_eq!(trie.get(k), Some(v.as_slice()));
        }
    }

    #[test]
    fn old_roots_stay_readable() {
        let mut trie = StateTrie::new();
        trie.insert(&key(1), b"v1".to_vec()).unwrap();
        let root_before = trie.root_hash();
        trie.insert(&key(1), b"v2".to_vec()).unwrap();
        trie.insert(&key(2), b"other".to_vec()).unwrap();

        assert_eq!(
            trie.get_at(root_before, &key(1)).unwrap(),
            Some(b"v1".as_slice())
        );
        assert_eq!(trie.get_at(root_before, &key(2)).unwrap(), None);
        assert_eq!(trie.get(&key(1)), Some(b"v2".as_slice()));
    }

    #[test]
    fn reset_to_root_restores_an_earlier_version() {
        let mut trie = StateTrie::new();
        trie.insert(&key(1), b"v1".to_vec()).unwrap();
        let saved = trie.root_hash();
        trie.insert(&key(2), b"v2".to_vec()).unwrap();
        trie.reset_to_root(saved);
        assert_eq!(trie.root_hash(), saved);
        assert_eq!(trie.get(&key(2)), None);
    }

    #[test]
    fn unknown_root_is_reported() {
        let trie = StateTrie::new();
        assert!(matches!(
            trie.get_at([1u8; 32], &key(1)),
            Err(TrieError::UnknownRoot(_))
        ));
    }
}
