//! Signed state-change requests.
//!
//! Canonical transaction encoding (integers big-endian):
//!
//! | field             | size                         |
//! |-------------------|------------------------------|
//! | sender_account    | 32                           |
//! | sender_public_key | 32                           |
//! | nonce             | 8                            |
//! | kind              | 1                            |
//! | payload           | u32 length + payload bytes   |
//! | board signatures  | u8 count + (32 key + 64 sig)*|
//! | sender_signature  | 64                           |
//!
//! The sender signature covers the digest of (sender_account, nonce, kind,
//! payload); board signatures for governance kinds cover the same digest.
//! The transaction id is the SHA-256 of the full encoding.

use super::objects::Address;
use crate::cert::{CertId, Certificate};
use crate::crypto::{
    hex_bytes_newtype, tagged_hash, Digest32, KeyPair, PublicKey, Signature,
};
use crate::encoding::{ByteReader, ByteWriter, DecodeError};

hex_bytes_newtype!(
    /// Transaction id: SHA-256 of the canonical encoding.
    TxId,
    32
);

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TxKind {
    AddTrustedCa = 1,
    UntrustCa = 2,
    AddTlsCert = 3,
    RevokeCert = 4,
    ReportFraud = 5,
    PleadFraud = 6,
    TransferToken = 7,
    ResolveFraud = 8,
}

impl TxKind {
    fn from_tag(tag: u8) -> Result<Self, DecodeError> {
        Ok(match tag {
            1 => TxKind::AddTrustedCa,
            2 => TxKind::UntrustCa,
            3 => TxKind::AddTlsCert,
            4 => TxKind::RevokeCert,
            5 => TxKind::ReportFraud,
            6 => TxKind::PleadFraud,
            7 => TxKind::TransferToken,
            8 => TxKind::ResolveFraud,
            _ => return Err(DecodeError::InvalidValue("transaction kind")),
        })
    }

    /// Governance kinds require a board signature threshold.
    pub fn requires_board_signatures(self) -> bool {
        matches!(
            self,
            TxKind::AddTrustedCa | TxKind::UntrustCa | TxKind::ResolveFraud
        )
    }
}

impl std::fmt::Display for TxKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            TxKind::AddTrustedCa => "add_trusted_ca",
            TxKind::UntrustCa => "untrust_ca",
            TxKind::AddTlsCert => "add_tls_cert",
            TxKind::RevokeCert => "revoke_cert",
            TxKind::ReportFraud => "report_fraud",
            TxKind::PleadFraud => "plead_fraud",
            TxKind::TransferToken => "transfer_token",
            TxKind::ResolveFraud => "resolve_fraud",
        };
        f.write_str(s)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TxPayload {
    AddTrustedCa {
        certificate: Certificate,
    },
    UntrustCa {
        ca_cert_id: CertId,
    },
    AddTlsCert {
        certificate: Certificate,
    },
    RevokeCert {
        cert_id: CertId,
        /// Signature over [`revocation_digest`] by the certificate's own key
        /// or its issuing CA's key.
        revocation_sig: Signature,
    },
    ReportFraud {
        fake_cert_id: CertId,
        genuine_cert_id: CertId,
        /// Signature over [`fraud_evidence_digest`] by the genuine
        /// certificate's key, proving domain ownership.
        evidence_sig: Signature,
    },
    PleadFraud {
        report_index: u64,
        document_hash: [u8; 32],
        /// Signature over [`plea_digest`] by the accused issuer CA's key.
        ca_sig: Signature,
    },
    TransferToken {
        recipient: Address,
        amount: u64,
    },
    ResolveFraud {
        report_index: u64,
        upheld: bool,
    },
}

impl TxPayload {
    pub fn kind(&self) -> TxKind {
        match self {
            TxPayload::AddTrustedCa { .. } => TxKind::AddTrustedCa,
            TxPayload::UntrustCa { .. } => TxKind::UntrustCa,
            TxPayload::AddTlsCert { .. } => TxKind::AddTlsCert,
            TxPayload::RevokeCert { .. } => TxKind::RevokeCert,
            TxPayload::ReportFraud { .. } => TxKind::ReportFraud,
            TxPayload::PleadFraud { .. } => TxKind::PleadFraud,
            TxPayload::TransferToken { .. } => TxKind::TransferToken,
            TxPayload::ResolveFraud { .. } => TxKind::ResolveFraud,
        }
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut w = ByteWriter::new();
        match self {
            TxPayload::AddTrustedCa { certificate } | TxPayload::AddTlsCert { certificate } => {
                w.put_fixed(&certificate.to_bytes());
            }
            TxPayload::UntrustCa { ca_cert_id } => w.put_fixed(&ca_cert_id.0),
            TxPayload::RevokeCert {
                cert_id,
                revocation_sig,
            } => {
                w.put_fixed(&cert_id.0);
                w.put_fixed(&revocation_sig.0);
            }
            TxPayload::ReportFraud {
                fake_cert_id,
                genuine_cert_id,
                evidence_sig,
            } => {
                w.put_fixed(&fake_cert_id.0);
                w.put_fixed(&genuine_cert_id.0);
                w.put_fixed(&evidence_sig.0);
            }
            TxPayload::PleadFraud {
                report_index,
                document_hash,
                ca_sig,
            } => {
                w.put_u64(*report_index);
                w.put_fixed(document_hash);
                w.put_fixed(&ca_sig.0);
            }
            TxPayload::TransferToken { recipient, amount } => {
                w.put_fixed(&recipient.0);
                w.put_u64(*amount);
            }
            TxPayload::ResolveFraud {
                report_index,
                upheld,
            } => {
                w.put_u64(*report_index);
                w.put_bool(*upheld);
            }
        }
        w.finish()
    }

    pub fn from_bytes(kind: TxKind, bytes: &[u8]) -> Result<Self, DecodeError> {
        let mut r = ByteReader::new(bytes);
        let payload = match kind {
            TxKind::AddTrustedCa => TxPayload::AddTrustedCa {
                certificate: Certificate::read_from(&mut r)?,
            },
            TxKind::AddTlsCert => TxPayload::AddTlsCert {
                certificate: Certificate::read_from(&mut r)?,
            },
            TxKind::UntrustCa => TxPayload::UntrustCa {
                ca_cert_id: CertId(r.fixed::<32>()?),
            },
            TxKind::RevokeCert => TxPayload::RevokeCert {
                cert_id: CertId(r.fixed::<32>()?),
                revocation_sig: Signature(r.fixed::<64>()?),
            },
            TxKind::ReportFraud => TxPayload::ReportFraud {
                fake_cert_id: CertId(r.fixed::<32>()?),
                genuine_cert_id: CertId(r.fixed::<32>()?),
                evidence_sig: Signature(r.fixed::<64>()?),
            },
            TxKind::PleadFraud => TxPayload::PleadFraud {
                report_index: r.u64()?,
                document_hash: r.fixed::<32>()?,
                ca_sig: Signature(r.fixed::<64>()?),
            },
            TxKind::TransferToken => TxPayload::TransferToken {
                recipient: Address(r.fixed::<32>()?),
                amount: r.u64()?,
            },
            TxKind::ResolveFraud => TxPayload::ResolveFraud {
                report_index: r.u64()?,
                upheld: r.bool()?,
            },
        };
        r.expect_end()?;
        Ok(payload)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Transaction {
    pub sender_account: Address,
    pub sender_public_key: PublicKey,
    pub nonce: u64,
    pub payload: TxPayload,
    /// Distinct board-member signatures over the signing digest; only
    /// meaningful for governance kinds.
    pub board_signatures: Vec<(PublicKey, Signature)>,
    pub sender_signature: Signature,
}

impl Transaction {
    /// Build and sign a transaction. The sender account address is derived
    /// from the keypair.
    pub fn build(sender: &KeyPair, nonce: u64, payload: TxPayload) -> Transaction {
        Self::build_with_board(sender, nonce, payload, &[])
    }

    /// Build a governance transaction carrying board signatures.
    pub fn build_with_board(
        sender: &KeyPair,
        nonce: u64,
        payload: TxPayload,
        board: &[&KeyPair],
    ) -> Transaction {
        let sender_account = super::account_address(&sender.public);
        let digest = signing_digest(&sender_account, nonce, payload.kind(), &payload.to_bytes());
        let board_signatures = board
            .iter()
            .map(|member| (member.public, member.sign(&digest)))
            .collect();
        Transaction {
            sender_account,
            sender_public_key: sender.public,
            nonce,
            payload,
            board_signatures,
            sender_signature: sender.sign(&digest),
        }
    }

    pub fn kind(&self) -> TxKind {
        self.payload.kind()
    }

    pub fn signing_digest(&self) -> Digest32 {
        signing_digest(
            &self.sender_account,
            self.nonce,
            self.kind(),
            &self.payload.to_bytes(),
        )
    }

    /// Checks the account/key binding and the sender signature.
    pub fn verify_sender_signature(&self) -> bool {
        self.sender_account == super::account_address(&self.sender_public_key)
            && crate::crypto::verify(
                &self.sender_public_key,
                &self.signing_digest(),
                &self.sender_signature,
            )
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut w = ByteWriter::new();
        w.put_fixed(&self.sender_account.0);
        w.put_fixed(&self.sender_public_key.0);
        w.put_u64(self.nonce);
        w.put_u8(self.kind() as u8);
        w.put_var(&self.payload.to_bytes());
        w.put_u8(self.board_signatures.len() as u8);
        for (key, sig) in &self.board_signatures {
            w.put_fixed(&key.0);
            w.put_fixed(&sig.0);
        }
        w.put_fixed(&self.sender_signature.0);
        w.finish()
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self, DecodeError> {
        let mut r = ByteReader::new(bytes);
        let tx = Self::read_from(&mut r)?;
        r.expect_end()?;
        Ok(tx)
    }

    pub(crate) fn read_from(r: &mut ByteReader<'_>) -> Result<Self, DecodeError> {
        let sender_account = Address(r.fixed::<32>()?);
        let sender_public_key = PublicKey(r.fixed::<32>()?);
        let nonce = r.u64()?;
        let kind = TxKind::from_tag(r.u8()?)?;
        let payload = TxPayload::from_bytes(kind, r.var()?)?;
        let sig_count = r.u8()?;
        let mut board_signatures = Vec::with_capacity(sig_count as usize);
        for _ in 0..sig_count {
            board_signatures.push((PublicKey(r.fixed::<32>()?), Signature(r.fixed::<64>()?)));
        }
        let sender_signature = Signature(r.fixed::<64>()?);
        Ok(Transaction {
            sender_account,
            sender_public_key,
            nonce,
            payload,
            board_signatures,
            sender_signature,
        })
    }

    pub fn txid(&self) -> TxId {
        TxId(crate::crypto::sha256(&self.to_bytes()))
    }
}

fn signing_digest(sender: &Address, nonce: u64, kind: TxKind, payload: &[u8]) -> Digest32 {
    tagged_hash(
        "certledger.tx.v1:",
        &[&sender.0, &nonce.to_be_bytes(), &[kind as u8], payload],
    )
}

/// Digest a revocation request signs: binds the certificate id.
pub fn revocation_digest(cert_id: &CertId) -> Digest32 {
    tagged_hash("certledger.revoke.v1:", &[&cert_id.0])
}

/// Digest fraud evidence signs: binds the fake and genuine certificates.
pub fn fraud_evidence_digest(fake_cert_id: &CertId, genuine_cert_id: &CertId) -> Digest32 {
    tagged_hash(
        "certledger.fraud.v1:",
        &[&fake_cert_id.0, &genuine_cert_id.0],
    )
}

/// Digest a plea signs: binds the report index and the evidence documents.
pub fn plea_digest(report_index: u64, document_hash: &[u8; 32]) -> Digest32 {
    tagged_hash(
        "certledger.plea.v1:",
        &[&report_index.to_be_bytes(), document_hash],
    )
}
