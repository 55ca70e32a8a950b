//! Canonical certificate representation and profile validation.
//!
//! Certificates here carry the semantic fields of a TLS certificate in a
//! canonical structured encoding instead of ASN.1/DER: the ledger's rules
//! operate on subject names, validity windows, key usage and issuer linkage,
//! not on parser quirks. Chains are single-level: every leaf is expected to
//! be signed directly by a CA certificate held in the trusted set.
//!
//! Canonical certificate encoding (all integers big-endian):
//!
//! | offset | size        | field                                   |
//! |--------|-------------|-----------------------------------------|
//! | 0      | 16          | serial                                  |
//! | 16     | 4 + n       | subject_common_name (u32 len + UTF-8)   |
//! | ..     | 4           | SAN count                               |
//! | ..     | (4 + n)*    | each SAN (u32 len + UTF-8)              |
//! | ..     | 32          | issuer_id                               |
//! | ..     | 8           | validity_not_before (UNIX seconds)      |
//! | ..     | 8           | validity_not_after (UNIX seconds)       |
//! | ..     | 1 + 32      | public key length tag + key bytes       |
//! | ..     | 1           | is_ca flag (0/1)                        |
//! | ..     | 1           | key_usage bits (bit0 digital_signature, |
//! |        |             | bit1 cert_sign)                         |
//! | ..     | 2 + 64      | signature length tag + signature        |
//!
//! The to-be-signed bytes are everything before the signature length tag.
//! `cert_id` is the SHA-256 digest of the full encoding including the
//! signature.

mod fixture;

pub use fixture::FixtureError;

use crate::crypto::{self, hex_bytes_newtype, PublicKey, SecretKey, Signature};
use crate::encoding::{ByteReader, ByteWriter, DecodeError};

/// Maximum leaf lifetime accepted by the TLS profile: 825 days.
pub const MAX_LEAF_LIFETIME_SECONDS: u64 = 825 * 86_400;

hex_bytes_newtype!(
    /// Identifier of a certificate: SHA-256 of its canonical encoding.
    CertId,
    32
);

impl CertId {
    pub const ZERO: CertId = CertId([0u8; 32]);
}

/// Key usage bit-set. Only the two bits the ledger rules consult are modeled.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub struct KeyUsage {
    pub digital_signature: bool,
    pub cert_sign: bool,
}

impl KeyUsage {
    pub const LEAF: KeyUsage = KeyUsage {
        digital_signature: true,
        cert_sign: false,
    };
    pub const CA: KeyUsage = KeyUsage {
        digital_signature: true,
        cert_sign: true,
    };

    fn to_bits(self) -> u8 {
        (self.digital_signature as u8) | ((self.cert_sign as u8) << 1)
    }

    fn from_bits(bits: u8) -> Result<Self, DecodeError> {
        if bits > 0b11 {
            return Err(DecodeError::InvalidValue("key_usage"));
        }
        Ok(Self {
            digital_signature: bits & 0b01 != 0,
            cert_sign: bits & 0b10 != 0,
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Certificate {
    pub serial: [u8; 16],
    pub subject_common_name: String,
    pub subject_alternative_names: Vec<String>,
    pub issuer_id: CertId,
    pub validity_not_before: u64,
    pub validity_not_after: u64,
    pub public_key: PublicKey,
    pub is_ca: bool,
    pub key_usage: KeyUsage,
    pub signature: Signature,
}

impl Certificate {
    /// Canonical encoding; deterministic and injective over all fields.
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut w = ByteWriter::with_capacity(192);
        self.write_to_be_signed(&mut w);
        w.put_u16(crypto::SIGNATURE_LEN as u16);
        w.put_fixed(&self.signature.0);
        w.finish()
    }

    /// The bytes covered by the issuer's signature: every field except the
    /// signature itself.
    pub fn to_be_signed_bytes(&self) -> Vec<u8> {
        let mut w = ByteWriter::with_capacity(160);
        self.write_to_be_signed(&mut w);
        w.finish()
    }

    fn write_to_be_signed(&self, w: &mut ByteWriter) {
        w.put_fixed(&self.serial);
        w.put_str(&self.subject_common_name);
        w.put_u32(self.subject_alternative_names.len() as u32);
        for san in &self.subject_alternative_names {
            w.put_str(san);
        }
        w.put_fixed(&self.issuer_id.0);
        w.put_u64(self.validity_not_before);
        w.put_u64(self.validity_not_after);
        w.put_u8(crypto::PUBLIC_KEY_LEN as u8);
        w.put_fixed(&self.public_key.0);
        w.put_bool(self.is_ca);
        w.put_u8(self.key_usage.to_bits());
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self, DecodeError> {
        let mut r = ByteReader::new(bytes);
        let cert = Self::read_from(&mut r)?;
        r.expect_end()?;
        Ok(cert)
    }

    pub(crate) fn read_from(r: &mut ByteReader<'_>) -> Result<Self, DecodeError> {
        let serial = r.fixed::<16>()?;
        let subject_common_name = r.string()?;
        let san_count = r.u32()?;
        let mut subject_alternative_names = Vec::with_capacity(san_count as usize);
        for _ in 0..san_count {
            subject_alternative_names.push(r.string()?);
        }
        let issuer_id = CertId(r.fixed::<32>()?);
        let validity_not_before = r.u64()?;
        let validity_not_after = r.u64()?;
        if r.u8()? as usize != crypto::PUBLIC_KEY_LEN {
            return Err(DecodeError::InvalidValue("public key length"));
        }
        let public_key = PublicKey(r.fixed::<32>()?);
        let is_ca = r.bool()?;
        let key_usage = KeyUsage::from_bits(r.u8()?)?;
        if r.u16()? as usize != crypto::SIGNATURE_LEN {
            return Err(DecodeError::InvalidValue("signature length"));
        }
        let signature = Signature(r.fixed::<64>()?);
        Ok(Self {
            serial,
            subject_common_name,
            subject_alternative_names,
            issuer_id,
            validity_not_before,
            validity_not_after,
            public_key,
            is_ca,
            key_usage,
            signature,
        })
    }

    /// SHA-256 of the canonical encoding including the signature; unique per
    /// distinct certificate.
    pub fn cert_id(&self) -> CertId {
        CertId(crypto::sha256(&self.to_bytes()))
    }

    /// True iff the signature verifies over the to-be-signed bytes under the
    /// given issuer key. Malformed signatures simply fail.
    pub fn verify_signature(&self, issuer_key: &PublicKey) -> bool {
        crypto::verify(issuer_key, &self.to_be_signed_bytes(), &self.signature)
    }

    /// Structural field invariants, checked at issuance.
    pub fn check_invariants(&self) -> Result<(), String> {
        if self.validity_not_before >= self.validity_not_after {
            return Err("validity_not_before must precede validity_not_after".into());
        }
        if !self.is_ca {
            if self.subject_alternative_names.is_empty() {
                return Err("leaf certificate must carry subject alternative names".into());
            }
            if self.key_usage.cert_sign {
                return Err("leaf certificate must not assert cert_sign".into());
            }
        } else if !self.key_usage.cert_sign {
            return Err("CA certificate must assert cert_sign".into());
        }
        Ok(())
    }

    pub fn lifetime_seconds(&self) -> u64 {
        self.validity_not_after
            .saturating_sub(self.validity_not_before)
    }

    pub fn in_validity_window(&self, now: u64) -> bool {
        now >= self.validity_not_before && now <= self.validity_not_after
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum Verdict {
    Valid,
    Expired,
    NotYetValid,
    ProfileViolation,
    UnknownIssuer,
    BadSignature,
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            Verdict::Valid => "valid",
            Verdict::Expired => "expired",
            Verdict::NotYetValid => "not yet valid",
            Verdict::ProfileViolation => "profile violation",
            Verdict::UnknownIssuer => "unknown issuer",
            Verdict::BadSignature => "bad signature",
        };
        f.write_str(s)
    }
}

/// Result of a profile validation. `Valid` always has an empty detail.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ValidationOutcome {
    pub verdict: Verdict,
    pub detail: String,
}

impl ValidationOutcome {
    pub fn valid() -> Self {
        Self {
            verdict: Verdict::Valid,
            detail: String::new(),
        }
    }

    pub fn fail(verdict: Verdict, detail: impl Into<String>) -> Self {
        debug_assert!(verdict != Verdict::Valid);
        Self {
            verdict,
            detail: detail.into(),
        }
    }

    pub fn is_valid(&self) -> bool {
        self.verdict == Verdict::Valid
    }
}

fn check_period(cert: &Certificate, now: u64) -> Option<ValidationOutcome> {
    if now < cert.validity_not_before {
        return Some(ValidationOutcome::fail(
            Verdict::NotYetValid,
            format!("not valid before {}", cert.validity_not_before),
        ));
    }
    if now > cert.validity_not_after {
        return Some(ValidationOutcome::fail(
            Verdict::Expired,
            format!("not valid after {}", cert.validity_not_after),
        ));
    }
    None
}

/// Leaf (end-entity) TLS profile. Checks run in a fixed order — validity
/// period, then profile fields, then lifetime cap — and the first failure
/// decides the verdict.
pub fn validate_tls_profile(cert: &Certificate, now: u64) -> ValidationOutcome {
    if let Some(outcome) = check_period(cert, now) {
        return outcome;
    }
    if cert.validity_not_before >= cert.validity_not_after {
        return ValidationOutcome::fail(Verdict::ProfileViolation, "inverted validity window");
    }
    if cert.is_ca {
        return ValidationOutcome::fail(
            Verdict::ProfileViolation,
            "CA certificate presented as TLS leaf",
        );
    }
    if cert.subject_alternative_names.is_empty() {
        return ValidationOutcome::fail(Verdict::ProfileViolation, "no subject alternative names");
    }
    if !cert.key_usage.digital_signature {
        return ValidationOutcome::fail(Verdict::ProfileViolation, "digital_signature not set");
    }
    if cert.key_usage.cert_sign {
        return ValidationOutcome::fail(Verdict::ProfileViolation, "leaf asserts cert_sign");
    }
    if cert.lifetime_seconds() > MAX_LEAF_LIFETIME_SECONDS {
        return ValidationOutcome::fail(
            Verdict::ProfileViolation,
            format!(
                "lifetime {} days exceeds the 825-day cap",
                cert.lifetime_seconds() / 86_400
            ),
        );
    }
    ValidationOutcome::valid()
}

/// CA certificate profile: in its validity window, marked as a CA, and
/// allowed to sign certificates. Same check order as the TLS profile.
pub fn validate_ca_profile(cert: &Certificate, now: u64) -> ValidationOutcome {
    if let Some(outcome) = check_period(cert, now) {
        return outcome;
    }
    if cert.validity_not_before >= cert.validity_not_after {
        return ValidationOutcome::fail(Verdict::ProfileViolation, "inverted validity window");
    }
    if !cert.is_ca {
        return ValidationOutcome::fail(Verdict::ProfileViolation, "not a CA certificate");
    }
    if !cert.key_usage.cert_sign {
        return ValidationOutcome::fail(Verdict::ProfileViolation, "cert_sign not set");
    }
    ValidationOutcome::valid()
}

/// Resolve the certificate's issuer inside the trusted set and verify the
/// signature. Single-level chains only: the issuer must itself be the
/// trusted certificate, never an intermediate.
pub fn build_trusted_path<'a, I>(
    cert: &Certificate,
    trusted_set: I,
) -> Result<&'a Certificate, ValidationOutcome>
where
    I: IntoIterator<Item = &'a Certificate>,
{
    let issuer = trusted_set
        .into_iter()
        .find(|ca| ca.cert_id() == cert.issuer_id);
    let Some(issuer) = issuer else {
        return Err(ValidationOutcome::fail(
            Verdict::UnknownIssuer,
            format!("issuer {} not in trusted set", cert.issuer_id),
        ));
    };
    if !cert.verify_signature(&issuer.public_key) {
        return Err(ValidationOutcome::fail(
            Verdict::BadSignature,
            "signature does not verify under the claimed issuer key",
        ));
    }
    Ok(issuer)
}

/// Unsigned certificate fields handed to the issuance helpers.
#[derive(Clone, Debug)]
pub struct CertificateParams {
    pub serial: [u8; 16],
    pub subject_common_name: String,
    pub subject_alternative_names: Vec<String>,
    pub validity_not_before: u64,
    pub validity_not_after: u64,
    pub public_key: PublicKey,
    pub is_ca: bool,
    pub key_usage: KeyUsage,
}

/// Sign `params` as `issuer_id`'s subordinate using the issuer's secret key.
pub fn issue_certificate(
    params: CertificateParams,
    issuer_id: CertId,
    issuer_secret: &SecretKey,
) -> Result<Certificate, String> {
    let mut cert = Certificate {
        serial: params.serial,
        subject_common_name: params.subject_common_name,
        subject_alternative_names: params.subject_alternative_names,
        issuer_id,
        validity_not_before: params.validity_not_before,
        validity_not_after: params.validity_not_after,
        public_key: params.public_key,
        is_ca: params.is_ca,
        key_usage: params.key_usage,
        signature: Signature([0u8; 64]),
    };
    cert.check_invariants()?;
    cert.signature = crypto::sign(issuer_secret, &cert.to_be_signed_bytes());
    Ok(cert)
}

/// Self-signed root CA certificate. Roots carry an all-zero issuer id; trust
/// in them comes from ledger admission, not from chain linkage.
pub fn issue_self_signed_ca(
    params: CertificateParams,
    own_secret: &SecretKey,
) -> Result<Certificate, String> {
    issue_certificate(params, CertId::ZERO, own_secret)
}
