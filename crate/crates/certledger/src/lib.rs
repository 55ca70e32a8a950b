//! CertLedger: a blockchain-backed public log for TLS certificates.
//!
//! The ledger validates, stores and revokes TLS certificates, manages the
//! trusted CA set under threshold board control, and lets header-only light
//! clients verify certificate state through Merkle proofs against block
//! headers. A deterministic simulator drives adversarial scenarios, and a
//! capacity estimator reproduces the storage arithmetic the design targets.

pub mod cert;
pub mod crypto;
pub mod encoding;
pub mod genesis;
pub mod state;
pub mod trie;
