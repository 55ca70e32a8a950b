//! The five state-object record types and their canonical encodings.
//!
//! Every record is stored in the state trie under a domain-separated 32-byte
//! address and starts with a one-byte kind tag, so a record decodes to
//! exactly one state-object kind.

use crate::cert::{CertId, Certificate};
use crate::crypto::{tagged_hash, hex_bytes_newtype, PublicKey, Signature};
use crate::encoding::{ByteReader, ByteWriter, DecodeError};
use crate::genesis::GenesisError;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

hex_bytes_newtype!(
    /// 32-byte state address: hash of a public key for accounts, hash of the
    /// DNS name for domain records, or a fixed tag for singletons.
    Address,
    32
);

pub fn account_address(key: &PublicKey) -> Address {
    Address(tagged_hash("certledger.addr.account:", &[&key.0]))
}

pub fn domain_address(domain: &str) -> Address {
    Address(tagged_hash("certledger.addr.domain:", &[domain.as_bytes()]))
}

pub fn trusted_cas_address() -> Address {
    Address(tagged_hash("certledger.addr.trusted-cas", &[]))
}

pub fn token_address() -> Address {
    Address(tagged_hash("certledger.addr.token", &[]))
}

pub fn fraud_reports_address() -> Address {
    Address(tagged_hash("certledger.addr.fraud-reports", &[]))
}

const DOMAIN_TAG: u8 = 0x01;
const TRUSTED_CAS_TAG: u8 = 0x02;
const ACCOUNT_TAG: u8 = 0x03;
const TOKEN_TAG: u8 = 0x04;
const FRAUD_TAG: u8 = 0x05;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CertStatus {
    NotRevoked,
    Revoked,
}

/// A certificate's entry inside a domain record.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CertRecord {
    pub certificate: Certificate,
    pub status: CertStatus,
    pub added_at_block: u64,
    pub revoked_at_block: Option<u64>,
}

/// All certificates the ledger holds for one DNS name, with their
/// revocation status. Revoked records never return to NotRevoked.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct DomainState {
    pub domain: String,
    pub certificates: BTreeMap<CertId, CertRecord>,
}

impl DomainState {
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut w = ByteWriter::new();
        w.put_u8(DOMAIN_TAG);
        w.put_str(&self.domain);
        w.put_u32(self.certificates.len() as u32);
        for (cert_id, record) in &self.certificates {
            w.put_fixed(&cert_id.0);
            w.put_var(&record.certificate.to_bytes());
            w.put_u8(match record.status {
                CertStatus::NotRevoked => 0,
                CertStatus::Revoked => 1,
            });
            w.put_u64(record.added_at_block);
            match record.revoked_at_block {
                Some(height) => {
                    w.put_u8(1);
                    w.put_u64(height);
                }
                None => w.put_u8(0),
            }
        }
        w.finish()
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self, DecodeError> {
        let mut r = ByteReader::new(bytes);
        if r.u8()? != DOMAIN_TAG {
            return Err(DecodeError::InvalidValue("domain record tag"));
        }
        let domain = r.string()?;
        let count = r.u32()?;
        let mut certificates = BTreeMap::new();
        for _ in 0..count {
            let cert_id = CertId(r.fixed::<32>()?);
            let certificate = Certificate::from_bytes(r.var()?)?;
            let status = match r.u8()? {
                0 => CertStatus::NotRevoked,
                1 => CertStatus::Revoked,
                _ => return Err(DecodeError::InvalidValue("cert status")),
            };
            let added_at_block = r.u64()?;
            let revoked_at_block = match r.u8()? {
                0 => None,
                1 => Some(r.u64()?),
                _ => return Err(DecodeError::InvalidValue("revocation height flag")),
            };
            certificates.insert(
                cert_id,
                CertRecord {
                    certificate,
                    status,
                    added_at_block,
                    revoked_at_block,
                },
            );
        }
        r.expect_end()?;
        Ok(Self {
            domain,
            certificates,
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TrustStatus {
    Trusted,
    Untrusted,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TrustedCaEntry {
    pub certificate: Certificate,
    pub status: TrustStatus,
}

/// The trusted CA set plus the board that governs it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TrustedCasState {
    pub entries: BTreeMap<CertId, TrustedCaEntry>,
    pub board_keys: Vec<PublicKey>,
    pub threshold: u32,
}

impl TrustedCasState {
    /// Certificates currently usable for trusted-path construction.
    pub fn trusted_certificates(&self) -> impl Iterator<Item = &Certificate> {
        self.entries
            .values()
            .filter(|e| e.status == TrustStatus::Trusted)
            .map(|e| &e.certificate)
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut w = ByteWriter::new();
        w.put_u8(TRUSTED_CAS_TAG);
        w.put_u32(self.entries.len() as u32);
        for (cert_id, entry) in &self.entries {
            w.put_fixed(&cert_id.0);
            w.put_var(&entry.certificate.to_bytes());
            w.put_u8(match entry.status {
                TrustStatus::Trusted => 0,
                TrustStatus::Untrusted => 1,
            });
        }
        w.put_u32(self.board_keys.len() as u32);
        for key in &self.board_keys {
            w.put_fixed(&key.0);
        }
        w.put_u32(self.threshold);
        w.finish()
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self, DecodeError> {
        let mut r = ByteReader::new(bytes);
        if r.u8()? != TRUSTED_CAS_TAG {
            return Err(DecodeError::InvalidValue("trusted CAs record tag"));
        }
        let count = r.u32()?;
        let mut entries = BTreeMap::new();
        for _ in 0..count {
            let cert_id = CertId(r.fixed::<32>()?);
            let certificate = Certificate::from_bytes(r.var()?)?;
            let status = match r.u8()? {
                0 => TrustStatus::Trusted,
                1 => TrustStatus::Untrusted,
                _ => return Err(DecodeError::InvalidValue("trust status")),
            };
            entries.insert(
                cert_id,
                TrustedCaEntry {
                    certificate,
                    status,
                },
            );
        }
        let key_count = r.u32()?;
        let mut board_keys = Vec::with_capacity(key_count as usize);
        for _ in 0..key_count {
            board_keys.push(PublicKey(r.fixed::<32>()?));
        }
        let threshold = r.u32()?;
        r.expect_end()?;
        Ok(Self {
            entries,
            board_keys,
            threshold,
        })
    }
}

/// Token balance and replay counter for one keyholder.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct AccountState {
    /// Bound on first outbound transaction; accounts created by receiving
    /// tokens have no key on record yet.
    pub owner_key: Option<PublicKey>,
    pub balance: u64,
    pub nonce: u64,
}

impl AccountState {
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut w = ByteWriter::with_capacity(64);
        w.put_u8(ACCOUNT_TAG);
        match &self.owner_key {
            Some(key) => {
                w.put_u8(1);
                w.put_fixed(&key.0);
            }
            None => w.put_u8(0),
        }
        w.put_u64(self.balance);
        w.put_u64(self.nonce);
        w.finish()
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self, DecodeError> {
        let mut r = ByteReader::new(bytes);
        if r.u8()? != ACCOUNT_TAG {
            return Err(DecodeError::InvalidValue("account record tag"));
        }
        let owner_key = match r.u8()? {
            0 => None,
            1 => Some(PublicKey(r.fixed::<32>()?)),
            _ => return Err(DecodeError::InvalidValue("owner key flag")),
        };
        let balance = r.u64()?;
        let nonce = r.u64()?;
        r.expect_end()?;
        Ok(Self {
            owner_key,
            balance,
            nonce,
        })
    }
}

/// Per-operation fees in token units. All operation fees must be positive;
/// plain transfers may be free.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct FeeSchedule {
    pub add_trusted_ca: u64,
    pub untrust_ca: u64,
    pub add_tls_cert: u64,
    pub revoke_cert: u64,
    pub report_fraud: u64,
    pub plead_fraud: u64,
    pub transfer_token: u64,
}

impl Default for FeeSchedule {
    fn default() -> Self {
        Self {
            add_trusted_ca: 1,
            untrust_ca: 1,
            add_tls_cert: 1,
            revoke_cert: 1,
            report_fraud: 1,
            plead_fraud: 1,
            transfer_token: 0,
        }
    }
}

impl FeeSchedule {
    pub fn validate(&self) -> Result<(), GenesisError> {
        let operation_fees: [(&'static str, u64); 6] = [
            ("add_trusted_ca", self.add_trusted_ca),
            ("untrust_ca", self.untrust_ca),
            ("add_tls_cert", self.add_tls_cert),
            ("revoke_cert", self.revoke_cert),
            ("report_fraud", self.report_fraud),
            ("plead_fraud", self.plead_fraud),
        ];
        for (name, fee) in operation_fees {
            if fee == 0 {
                return Err(GenesisError::ZeroFee(name));
            }
        }
        Ok(())
    }

    fn write_to(&self, w: &mut ByteWriter) {
        w.put_u64(self.add_trusted_ca);
        w.put_u64(self.untrust_ca);
        w.put_u64(self.add_tls_cert);
        w.put_u64(self.revoke_cert);
        w.put_u64(self.report_fraud);
        w.put_u64(self.plead_fraud);
        w.put_u64(self.transfer_token);
    }

    fn read_from(r: &mut ByteReader<'_>) -> Result<Self, DecodeError> {
        Ok(Self {
            add_trusted_ca: r.u64()?,
            untrust_ca: r.u64()?,
            add_tls_cert: r.u64()?,
            revoke_cert: r.u64()?,
            report_fraud: r.u64()?,
            plead_fraud: r.u64()?,
            transfer_token: r.u64()?,
        })
    }
}

/// Token supply bookkeeping: constant total supply, fee schedule and the two
/// fee-collecting singleton accounts.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TokenState {
    pub total_supply: u64,
    pub fee_schedule: FeeSchedule,
    pub foundation_account: Address,
    pub board_account: Address,
}

impl TokenState {
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut w = ByteWriter::with_capacity(144);
        w.put_u8(TOKEN_TAG);
        w.put_u64(self.total_supply);
        self.fee_schedule.write_to(&mut w);
        w.put_fixed(&self.foundation_account.0);
        w.put_fixed(&self.board_account.0);
        w.finish()
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self, DecodeError> {
        let mut r = ByteReader::new(bytes);
        if r.u8()? != TOKEN_TAG {
            return Err(DecodeError::InvalidValue("token record tag"));
        }
        let total_supply = r.u64()?;
        let fee_schedule = FeeSchedule::read_from(&mut r)?;
        let foundation_account = Address(r.fixed::<32>()?);
        let board_account = Address(r.fixed::<32>()?);
        r.expect_end()?;
        Ok(Self {
            total_supply,
            fee_schedule,
            foundation_account,
            board_account,
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FraudResolution {
    Open,
    Dismissed,
    Upheld,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Plea {
    pub document_hash: [u8; 32],
    pub ca_sig: Signature,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FraudReport {
    pub fake_cert: Certificate,
    pub genuine_cert_id: CertId,
    pub reporter_account: Address,
    pub evidence_sig: Signature,
    pub plea: Option<Plea>,
    pub resolution: FraudResolution,
}

/// Append-only list of fraud reports against trusted CAs.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct FraudReportState {
    pub reports: Vec<FraudReport>,
}

impl FraudReportState {
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut w = ByteWriter::new();
        w.put_u8(FRAUD_TAG);
        w.put_u32(self.reports.len() as u32);
        for report in &self.reports {
            w.put_var(&report.fake_cert.to_bytes());
            w.put_fixed(&report.genuine_cert_id.0);
            w.put_fixed(&report.reporter_account.0);
            w.put_fixed(&report.evidence_sig.0);
            match &report.plea {
                Some(plea) => {
                    w.put_u8(1);
                    w.put_fixed(&plea.document_hash);
                    w.put_fixed(&plea.ca_sig.0);
                }
                None => w.put_u8(0),
            }
            w.put_u8(match report.resolution {
                FraudResolution::Open => 0,
                FraudResolution::Dismissed => 1,
                FraudResolution::Upheld => 2,
            });
        }
        w.finish()
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self, DecodeError> {
        let mut r = ByteReader::new(bytes);
        if r.u8()? != FRAUD_TAG {
            return Err(DecodeError::InvalidValue("fraud record tag"));
        }
        let count = r.u32()?;
        let mut reports = Vec::with_capacity(count as usize);
        for _ in 0..count {
            let fake_cert = Certificate::from_bytes(r.var()?)?;
            let genuine_cert_id = CertId(r.fixed::<32>()?);
            let reporter_account = Address(r.fixed::<32>()?);
            let evidence_sig = Signature(r.fixed::<64>()?);
            let plea = match r.u8()? {
                0 => None,
                1 => Some(Plea {
                    document_hash: r.fixed::<32>()?,
                    ca_sig: Signature(r.fixed::<64>()?),
                }),
                _ => return Err(DecodeError::InvalidValue("plea flag")),
            };
            let resolution = match r.u8()? {
                0 => FraudResolution::Open,
                1 => FraudResolution::Dismissed,
                2 => FraudResolution::Upheld,
                _ => return Err(DecodeError::InvalidValue("resolution")),
            };
            reports.push(FraudReport {
                fake_cert,
                genuine_cert_id,
                reporter_account,
                evidence_sig,
                plea,
                resolution,
            });
        }
        r.expect_end()?;
        Ok(Self { reports })
    }
}
