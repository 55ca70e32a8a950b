//! Event notifications emitted by state transitions.
//!
//! Events are append-only and totally ordered by (block number, intra-block
//! index). The event log's external form is line-delimited JSON.

use crate::cert::CertId;
use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "event", rename_all = "snake_case")]
pub enum EventKind {
    CertAdded {
        domain: String,
        cert_id: CertId,
    },
    CertRevoked {
        domain: String,
        cert_id: CertId,
    },
    CaTrusted {
        ca_cert_id: CertId,
    },
    CaUntrusted {
        ca_cert_id: CertId,
    },
    FraudReported {
        report_index: u64,
        fake_cert_id: CertId,
        domain: String,
    },
    PleaAdded {
        report_index: u64,
        ca_cert_id: CertId,
    },
}

impl EventKind {
    /// The DNS name this event concerns, when there is one. Used by
    /// per-domain event watchers.
    pub fn domain(&self) -> Option<&str> {
        match self {
            EventKind::CertAdded { domain, .. }
            | EventKind::CertRevoked { domain, .. }
            | EventKind::FraudReported { domain, .. } => Some(domain),
            _ => None,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            EventKind::CertAdded { .. } => "cert_added",
            EventKind::CertRevoked { .. } => "cert_revoked",
            EventKind::CaTrusted { .. } => "ca_trusted",
            EventKind::CaUntrusted { .. } => "ca_untrusted",
            EventKind::FraudReported { .. } => "fraud_reported",
            EventKind::PleaAdded { .. } => "plea_added",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Event {
    pub block_number: u64,
    /// Position within the block's event list.
    pub index: u32,
    #[serde(flatten)]
    pub kind: EventKind,
}

impl Event {
    pub fn to_json_line(&self) -> String {
        serde_json::to_string(self).expect("events serialize")
    }

    pub fn from_json_line(line: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(line)
    }
}
