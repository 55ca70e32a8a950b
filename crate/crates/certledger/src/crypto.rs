//! Hashing and the signature scheme used throughout the ledger.
//!
//! All digests are 256-bit SHA-256 so that state roots, certificate ids and
//! transaction ids are reproducible across implementations. Signing is kept
//! behind the [`SignatureScheme`] trait; the default backend is Ed25519,
//! which is deterministic (same key + message always yields the same
//! signature) and uses 32-byte public keys.

use ed25519_dalek::{Signer as _, Verifier as _};
use sha2::{Digest as _, Sha256};

pub const DIGEST_LEN: usize = 32;
pub const PUBLIC_KEY_LEN: usize = 32;
pub const SIGNATURE_LEN: usize = 64;

/// 256-bit digest, the universal identifier size in the ledger.
pub type Digest32 = [u8; DIGEST_LEN];

pub fn sha256(data: &[u8]) -> Digest32 {
    Sha256::digest(data).into()
}

/// Hash a domain-separation tag followed by payload parts.
pub fn tagged_hash(tag: &str, parts: &[&[u8]]) -> Digest32 {
    let mut hasher = Sha256::new();
    hasher.update(tag.as_bytes());
    for part in parts {
        hasher.update(part);
    }
    hasher.finalize().into()
}

/// Declares newtypes over fixed byte arrays with hex formatting and
/// hex-string serde, used for the various 32-byte identifiers.
macro_rules! hex_bytes_newtype {
    ($(#[$meta:meta])* $name:ident, $len:expr) => {
        $(#[$meta])*
        #[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
        pub struct $name(pub [u8; $len]);

        impl $name {
            pub fn as_bytes(&self) -> &[u8; $len] {
                &self.0
            }

            pub fn to_hex(&self) -> String {
                hex::encode(self.0)
            }

            pub fn from_hex(s: &str) -> Result<Self, hex::FromHexError> {
                let raw = hex::decode(s)?;
                let arr: [u8; $len] = raw
                    .try_into()
                    .map_err(|_| hex::FromHexError::InvalidStringLength)?;
                Ok(Self(arr))
            }
        }

        impl std::fmt::Debug for $name {
            fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
                write!(f, concat!(stringify!($name), "({})"), self.to_hex())
            }
        }

        impl std::fmt::Display for $name {
            fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
                f.write_str(&self.to_hex())
            }
        }

        impl std::str::FromStr for $name {
            type Err = hex::FromHexError;

            fn from_str(s: &str) -> Result<Self, Self::Err> {
                Self::from_hex(s)
            }
        }

        impl serde::Serialize for $name {
            fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
                s.serialize_str(&self.to_hex())
            }
        }

        impl<'de> serde::Deserialize<'de> for $name {
            fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
                let s = String::deserialize(d)?;
                Self::from_hex(&s).map_err(serde::de::Error::custom)
            }
        }
    };
}

pub(crate) use hex_bytes_newtype;

hex_bytes_newtype!(
    /// Public half of a signing keypair (32-byte Ed25519 point by default).
    PublicKey,
    PUBLIC_KEY_LEN
);

hex_bytes_newtype!(
    /// Detached signature over a message digest.
    Signature,
    SIGNATURE_LEN
);

/// Secret half of a keypair. Not serializable by accident; the CLI writes it
/// out explicitly where key files are requested.
#[derive(Clone)]
pub struct SecretKey(pub(crate) [u8; 32]);

impl SecretKey {
    pub fn from_bytes(bytes: [u8; 32]) -> Self {
        Self(bytes)
    }

    pub fn to_hex(&self) -> String {
        hex::encode(self.0)
    }

    pub fn from_hex(s: &str) -> Result<Self, hex::FromHexError> {
        let raw = hex::decode(s)?;
        let arr: [u8; 32] = raw
            .try_into()
            .map_err(|_| hex::FromHexError::InvalidStringLength)?;
        Ok(Self(arr))
    }
}

impl std::fmt::Debug for SecretKey {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str("SecretKey(..)")
    }
}

#[derive(Clone, Debug)]
pub struct KeyPair {
    pub secret: SecretKey,
    pub public: PublicKey,
}

impl KeyPair {
    /// Deterministically derive a keypair from a 32-byte seed.
    pub fn from_seed(seed: [u8; 32]) -> Self {
        DefaultScheme::keypair_from_seed(seed)
    }

    /// Derive a keypair from a small integer seed, for fixtures and CLI use.
    pub fn from_seed_u64(seed: u64) -> Self {
        Self::from_seed(tagged_hash("certledger.keyseed.v1:", &[&seed.to_be_bytes()]))
    }

    pub fn sign(&self, message: &[u8]) -> Signature {
        DefaultScheme::sign(&self.secret, message)
    }
}

/// The signing interface the rest of the crate is written against. Swapping
/// the curve means providing another implementation and retargeting
/// [`DefaultScheme`]; key and signature widths are fixed at 32/64 bytes.
pub trait SignatureScheme {
    fn keypair_from_seed(seed: [u8; 32]) -> KeyPair;
    fn sign(secret: &SecretKey, message: &[u8]) -> Signature;
    fn verify(public: &PublicKey, message: &[u8], signature: &Signature) -> bool;
}

/// Ed25519 backend (RFC 8032, deterministic signatures).
pub struct Ed25519Scheme;

impl SignatureScheme for Ed25519Scheme {
    fn keypair_from_seed(seed: [u8; 32]) -> KeyPair {
        let signing = ed25519_dalek::SigningKey::from_bytes(&seed);
        KeyPair {
            secret: SecretKey(seed),
            public: PublicKey(signing.verifying_key().to_bytes()),
        }
    }

    fn sign(secret: &SecretKey, message: &[u8]) -> Signature {
        let signing = ed25519_dalek::SigningKey::from_bytes(&secret.0);
        Signature(signing.sign(message).to_bytes())
    }

    fn verify(public: &PublicKey, message: &[u8], signature: &Signature) -> bool {
        let Ok(key) = ed25519_dalek::VerifyingKey::from_bytes(&public.0) else {
            return false;
        };
        let sig = ed25519_dalek::Signature::from_bytes(&signature.0);
        key.verify(message, &sig).is_ok()
    }
}

pub type DefaultScheme = Ed25519Scheme;

pub fn sign(secret: &SecretKey, message: &[u8]) -> Signature {
    DefaultScheme::sign(secret, message)
}

pub fn verify(public: &PublicKey, message: &[u8], signature: &Signature) -> bool {
    DefaultScheme::verify(public, message, signature)
}
