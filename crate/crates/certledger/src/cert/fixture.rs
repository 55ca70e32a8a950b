//! Textual fixture format for certificates: one `key = value` pair per line.
//!
//! ```text
//! serial = 0101…01 (32 hex chars)
//! common_name = example.com
//! san = example.com            # repeated per name
//! issuer_id = <64 hex chars>
//! not_before = 1700000000
//! not_after = 1735000000
//! public_key = <64 hex chars>
//! is_ca = false
//! key_usage = digital_signature,cert_sign
//! signature = <128 hex chars>
//! ```
//!
//! Lines starting with `#` and blank lines are ignored. The CLI reads and
//! writes certificates in this format.

use super::{CertId, Certificate, KeyUsage};
use crate::crypto::{PublicKey, Signature};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum FixtureError {
    #[error("line {0}: expected `key = value`")]
    MalformedLine(usize),
    #[error("line {line}: bad value for {field}")]
    BadValue { line: usize, field: &'static str },
    #[error("missing field {0}")]
    MissingField(&'static str),
    #[error("duplicate field {0}")]
    DuplicateField(&'static str),
}

impl Certificate {
    pub fn to_fixture_string(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!("serial = {}\n", hex::encode(self.serial)));
        out.push_str(&format!("common_name = {}\n", self.subject_common_name));
        for san in &self.subject_alternative_names {
            out.push_str(&format!("san = {san}\n"));
        }
        out.push_str(&format!("issuer_id = {}\n", self.issuer_id));
        out.push_str(&format!("not_before = {}\n", self.validity_not_before));
        out.push_str(&format!("not_after = {}\n", self.validity_not_after));
        out.push_str(&format!("public_key = {}\n", self.public_key));
        out.push_str(&format!("is_ca = {}\n", self.is_ca));
        let mut usages = Vec::new();
        if self.key_usage.digital_signature {
            usages.push("digital_signature");
        }
        if self.key_usage.cert_sign {
            usages.push("cert_sign");
        }
        out.push_str(&format!("key_usage = {}\n", usages.join(",")));
        out.push_str(&format!("signature = {}\n", self.signature));
        out
    }

    pub fn from_fixture_str(text: &str) -> Result<Self, FixtureError> {
        let mut serial: Option<[u8; 16]> = None;
        let mut common_name: Option<String> = None;
        let mut sans: Vec<String> = Vec::new();
        let mut issuer_id: Option<CertId> = None;
        let mut not_before: Option<u64> = None;
        let mut not_after: Option<u64> = None;
        let mut public_key: Option<PublicKey> = None;
        let mut is_ca: Option<bool> = None;
        let mut key_usage: Option<KeyUsage> = None;
        let mut signature: Option<Signature> = None;

        fn set_once<T>(
            slot: &mut Option<T>,
            value: T,
            field: &'static str,
        ) -> Result<(), FixtureError> {
            if slot.is_some() {
                return Err(FixtureError::DuplicateField(field));
            }
            *slot = Some(value);
            Ok(())
        }

        for (idx, raw_line) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = raw_line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or(FixtureError::MalformedLine(line_no))?;
            let key = key.trim();
            let value = value.trim();
            let bad = |field| FixtureError::BadValue {
                line: line_no,
                field,
            };
            match key {
                "serial" => {
                    let raw = hex::decode(value).map_err(|_| bad("serial"))?;
                    let arr: [u8; 16] = raw.try_into().map_err(|_| bad("serial"))?;
                    set_once(&mut serial, arr, "serial")?;
                }
                "common_name" => set_once(&mut common_name, value.to_string(), "common_name")?,
                "san" => sans.push(value.to_string()),
                "issuer_id" => set_once(
                    &mut issuer_id,
                    CertId::from_hex(value).map_err(|_| bad("issuer_id"))?,
                    "issuer_id",
                )?,
                "not_before" => set_once(
                    &mut not_before,
                    value.parse().map_err(|_| bad("not_before"))?,
                    "not_before",
                )?,
                "not_after" => set_once(
                    &mut not_after,
                    value.parse().map_err(|_| bad("not_after"))?,
                    "not_after",
                )?,
                "public_key" => set_once(
                    &mut public_key,
                    PublicKey::from_hex(value).map_err(|_| bad("public_key"))?,
                    "public_key",
                )?,
                "is_ca" => set_once(
                    &mut is_ca,
                    value.parse().map_err(|_| bad("is_ca"))?,
                    "is_ca",
                )?,
                "key_usage" => {
                    let mut usage = KeyUsage::default();
                    for item in value.split(',').filter(|s| !s.trim().is_empty()) {
                        match item.trim() {
                            "digital_signature" => usage.digital_signature = true,
                            "cert_sign" => usage.cert_sign = true,
                            _ => return Err(bad("key_usage")),
                        }
                    }
                    set_once(&mut key_usage, usage, "key_usage")?;
                }
                "signature" => set_once(
                    &mut signature,
                    Signature::from_hex(value).map_err(|_| bad("signature"))?,
                    "signature",
                )?,
                _ => return Err(FixtureError::MalformedLine(line_no)),
            }
        }

        Ok(Certificate {
            serial: serial.ok_or(FixtureError::MissingField("serial"))?,
            subject_common_name: common_name.ok_or(FixtureError::MissingField("common_name"))?,
            subject_alternative_names: sans,
            issuer_id: issuer_id.ok_or(FixtureError::MissingField("issuer_id"))?,
            validity_not_before: not_before.ok_or(FixtureError::MissingField("not_before"))?,
            validity_not_after: not_after.ok_or(FixtureError::MissingField("not_after"))?,
            public_key: public_key.ok_or(FixtureError::MissingField("public_key"))?,
            is_ca: is_ca.ok_or(FixtureError::MissingField("is_ca"))?,
            key_usage: key_usage.ok_or(FixtureError::MissingField("key_usage"))?,
            signature: signature.ok_or(FixtureError::MissingField("signature"))?,
        })
    }
}
