//! World state and the transition rules for every transaction kind.
//!
//! All records live in the state trie; the indexes kept alongside it
//! (domains, accounts, certificate locations) are derived data used for
//! scans and are only mutated when a transaction commits. Each operation
//! validates completely before touching state, so a failing transaction
//! leaves the state root bit-identical.

mod events;
mod objects;
mod transaction;

pub use events::{Event, EventKind};
pub use objects::{
    account_address, domain_address, fraud_reports_address, token_address, trusted_cas_address,
    AccountState, Address, CertRecord, CertStatus, DomainState, FeeSchedule, FraudReport,
    FraudReportState, FraudResolution, Plea, TokenState, TrustStatus, TrustedCaEntry,
    TrustedCasState,
};
pub use transaction::{
    fraud_evidence_digest, plea_digest, revocation_digest, Transaction, TxId, TxKind, TxPayload,
};

use crate::cert::{
    self, validate_ca_profile, validate_tls_profile, CertId, Certificate, Verdict,
};
use crate::crypto::{self, Digest32};
use crate::genesis::{GenesisConfig, GenesisError};
use crate::trie::StateTrie;
use std::collections::{BTreeMap, BTreeSet};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TxError {
    #[error("signature verification failed: {0}")]
    BadSignature(String),
    #[error("nonce mismatch: account at {expected}, transaction carries {got}")]
    BadNonce { expected: u64, got: u64 },
    #[error("board threshold not met: {valid} distinct valid signatures, {required} required")]
    BelowThreshold { valid: usize, required: usize },
    #[error("CA certificate already present in the trusted set")]
    DuplicateCa,
    #[error("certificate profile violation: {0}")]
    ProfileViolation(String),
    #[error("insufficient balance: account has {available}, operation needs {needed}")]
    InsufficientBalance { available: u64, needed: u64 },
    #[error("CA certificate not in the trusted set")]
    UnknownCa,
    #[error("CA certificate is already untrusted")]
    AlreadyUntrusted,
    #[error("CA certificate has expired")]
    ExpiredCa,
    #[error("certificate already in the ledger")]
    DuplicateCert,
    #[error("certificate expired")]
    CertExpired,
    #[error("certificate not yet valid")]
    CertNotYetValid,
    #[error("issuer not in the trusted CA set")]
    UnknownIssuer,
    #[error("certificate not in the ledger")]
    UnknownCert,
    #[error("certificate already revoked")]
    AlreadyRevoked,
    #[error("revocation signed by neither the certificate key nor its issuer")]
    UnauthorizedRevoker,
    #[error("fake certificate not in the ledger")]
    FakeCertNotInLedger,
    #[error("no overlap between fake and genuine subject alternative names")]
    SanMismatch,
    #[error("fraud evidence rejected: {0}")]
    BadEvidenceSignature(String),
    #[error("unknown or closed fraud report")]
    UnknownReport,
    #[error("plea not signed by the fake certificate's issuer")]
    NotIssuer,
    #[error("pleading CA is not in the trusted set")]
    CaNotTrusted,
    #[error("report already carries a plea")]
    AlreadyPleaded,
    #[error("report already resolved")]
    AlreadyResolved,
}

/// Restorable position of a [`WorldState`]: the trie keeps all nodes, so the
/// root digest plus the derived indexes pin an exact version.
#[derive(Clone, Debug)]
pub struct StateCheckpoint {
    root: Digest32,
    domain_index: BTreeSet<String>,
    account_index: BTreeSet<Address>,
    cert_locator: BTreeMap<CertId, BTreeSet<String>>,
}

#[derive(Clone, Debug)]
pub struct WorldState {
    trie: StateTrie,
    domain_index: BTreeSet<String>,
    account_index: BTreeSet<Address>,
    cert_locator: BTreeMap<CertId, BTreeSet<String>>,
}

impl WorldState {
    /// Build the genesis state: token supply, board configuration, empty
    /// trusted-CA and fraud-report singletons, and the initial allocations.
    pub fn genesis(config: &GenesisConfig) -> Result<Self, GenesisError> {
        config.validate()?;
        let mut state = Self {
            trie: StateTrie::new(),
            domain_index: BTreeSet::new(),
            account_index: BTreeSet::new(),
            cert_locator: BTreeMap::new(),
        };

        let foundation_account = account_address(&config.foundation_key);
        let board_account = account_address(&config.board_account_key);
        state.put_token_state(&TokenState {
            total_supply: config.total_supply(),
            fee_schedule: config.fees.clone(),
            foundation_account,
            board_account,
        });
        state.put_trusted_cas(&TrustedCasState {
            entries: BTreeMap::new(),
            board_keys: config.board_keys.clone(),
            threshold: config.board_threshold,
        });
        state.put_fraud_reports(&FraudReportState::default());

        state.put_account(
            &foundation_account,
            &AccountState {
                owner_key: Some(config.foundation_key),
                balance: config.foundation_balance,
                nonce: 0,
            },
        );
        state.put_account(
            &board_account,
            &AccountState {
                owner_key: Some(config.board_account_key),
                balance: 0,
                nonce: 0,
            },
        );
        for allocation in &config.allocations {
            let mut account = state.account_or_default(&allocation.account);
            account.balance += allocation.balance;
            state.put_account(&allocation.account, &account);
        }
        Ok(state)
    }

    pub fn state_root(&self) -> Digest32 {
        self.trie.root_hash()
    }

    pub fn trie(&self) -> &StateTrie {
        &self.trie
    }

    pub fn checkpoint(&self) -> StateCheckpoint {
        StateCheckpoint {
            root: self.trie.root_hash(),
            domain_index: self.domain_index.clone(),
            account_index: self.account_index.clone(),
            cert_locator: self.cert_locator.clone(),
        }
    }

    pub fn restore(&mut self, checkpoint: StateCheckpoint) {
        self.trie.reset_to_root(checkpoint.root);
        self.domain_index = checkpoint.domain_index;
        self.account_index = checkpoint.account_index;
        self.cert_locator = checkpoint.cert_locator;
    }

    // ---- record accessors ----------------------------------------------

    pub fn token_state(&self) -> TokenState {
        let bytes = self
            .trie
            .get(token_address().as_bytes())
            .expect("token state exists after genesis");
        TokenState::from_bytes(bytes).expect("token state decodes")
    }

    pub fn trusted_cas(&self) -> TrustedCasState {
        let bytes = self
            .trie
            .get(trusted_cas_address().as_bytes())
            .expect("trusted CA state exists after genesis");
        TrustedCasState::from_bytes(bytes).expect("trusted CA state decodes")
    }

    pub fn fraud_reports(&self) -> FraudReportState {
        let bytes = self
            .trie
            .get(fraud_reports_address().as_bytes())
            .expect("fraud report state exists after genesis");
        FraudReportState::from_bytes(bytes).expect("fraud report state decodes")
    }

    pub fn account(&self, address: &Address) -> Option<AccountState> {
        self.trie
            .get(address.as_bytes())
            .map(|bytes| AccountState::from_bytes(bytes).expect("account record decodes"))
    }

    fn account_or_default(&self, address: &Address) -> AccountState {
        self.account(address).unwrap_or_default()
    }

    pub fn domain_state(&self, domain: &str) -> Option<DomainState> {
        self.trie
            .get(domain_address(domain).as_bytes())
            .map(|bytes| DomainState::from_bytes(bytes).expect("domain record decodes"))
    }

    /// Domains that hold a record for this certificate.
    pub fn cert_domains(&self, cert_id: &CertId) -> Option<&BTreeSet<String>> {
        self.cert_locator.get(cert_id)
    }

    /// The certificate record, read from its first domain copy (copies are
    /// kept consistent).
    pub fn cert_record(&self, cert_id: &CertId) -> Option<CertRecord> {
        let domains = self.cert_locator.get(cert_id)?;
        let domain = domains.iter().next()?;
        self.domain_state(domain)?.certificates.remove(cert_id)
    }

    pub fn domains(&self) -> impl Iterator<Item = &String> {
        self.domain_index.iter()
    }

    pub fn accounts(&self) -> impl Iterator<Item = &Address> {
        self.account_index.iter()
    }

    /// Read-only search over a domain's certificate records.
    pub fn search_certificates(
        &self,
        domain: &str,
        filter: Option<CertStatus>,
    ) -> Vec<(CertId, CertRecord)> {
        let Some(state) = self.domain_state(domain) else {
            return Vec::new();
        };
        state
            .certificates
            .into_iter()
            .filter(|(_, record)| filter.is_none_or(|want| record.status == want))
            .collect()
    }

    /// Every certificate record in the ledger, one entry per (domain, cert).
    pub fn all_cert_records(&self) -> Vec<(String, CertId, CertRecord)> {
        let mut out = Vec::new();
        for domain in &self.domain_index {
            if let Some(state) = self.domain_state(domain) {
                for (cert_id, record) in state.certificates {
                    out.push((domain.clone(), cert_id, record));
                }
            }
        }
        out
    }

    pub fn total_account_balance(&self) -> u64 {
        self.account_index
            .iter()
            .filter_map(|addr| self.account(addr))
            .map(|acct| acct.balance)
            .sum()
    }

    /// Invariant check: the sum of all balances equals the total supply.
    pub fn token_conservation_holds(&self) -> bool {
        self.total_account_balance() == self.token_state().total_supply
    }

    // ---- record writers (commit phase only) ------------------------------

    fn put_record(&mut self, address: &Address, bytes: Vec<u8>) {
        self.trie
            .insert(address.as_bytes(), bytes)
            .expect("record encodings are non-empty");
    }

    fn put_token_state(&mut self, token: &TokenState) {
        self.put_record(&token_address(), token.to_bytes());
    }

    fn put_trusted_cas(&mut self, cas: &TrustedCasState) {
        self.put_record(&trusted_cas_address(), cas.to_bytes());
    }

    fn put_fraud_reports(&mut self, reports: &FraudReportState) {
        self.put_record(&fraud_reports_address(), reports.to_bytes());
    }

    fn put_account(&mut self, address: &Address, account: &AccountState) {
        self.put_record(address, account.to_bytes());
        self.account_index.insert(*address);
    }

    fn put_domain_state(&mut self, state: &DomainState) {
        self.put_record(&domain_address(&state.domain), state.to_bytes());
        self.domain_index.insert(state.domain.clone());
    }

    fn credit(&mut self, address: &Address, amount: u64) {
        let mut account = self.account_or_default(address);
        account.balance += amount;
        self.put_account(address, &account);
    }

    /// Caller must have checked the balance in its validation phase.
    fn debit(&mut self, address: &Address, amount: u64) {
        let mut account = self.account_or_default(address);
        debug_assert!(account.balance >= amount);
        account.balance -= amount;
        self.put_account(address, &account);
    }

    fn check_balance(&self, address: &Address, needed: u64) -> Result<(), TxError> {
        let available = self.account_or_default(address).balance;
        if available < needed {
            return Err(TxError::InsufficientBalance { available, needed });
        }
        Ok(())
    }

    /// Count distinct board members whose signature over the transaction
    /// digest verifies. Duplicate signatures from one key count once.
    fn distinct_valid_board_signatures(
        &self,
        tx: &Transaction,
        cas: &TrustedCasState,
    ) -> usize {
        let digest = tx.signing_digest();
        let mut seen = BTreeSet::new();
        for (key, sig) in &tx.board_signatures {
            if cas.board_keys.contains(key) && crypto::verify(key, &digest, sig) {
                seen.insert(*key);
            }
        }
        seen.len()
    }

    fn require_board_threshold(
        &self,
        tx: &Transaction,
        cas: &TrustedCasState,
    ) -> Result<(), TxError> {
        let valid = self.distinct_valid_board_signatures(tx, cas);
        let required = cas.threshold as usize;
        if valid < required {
            return Err(TxError::BelowThreshold { valid, required });
        }
        Ok(())
    }

    // ---- transaction application -----------------------------------------

    /// Apply one transaction. On error the state is untouched; on success
    /// the emitted events are returned in order.
    pub fn apply_transaction(
        &mut self,
        tx: &Transaction,
        now: u64,
        block_number: u64,
    ) -> Result<Vec<EventKind>, TxError> {
        if !tx.verify_sender_signature() {
            return Err(TxError::BadSignature(
                "sender signature or account binding invalid".into(),
            ));
        }
        let sender = self.account_or_default(&tx.sender_account);
        if tx.nonce != sender.nonce {
            return Err(TxError::BadNonce {
                expected: sender.nonce,
                got: tx.nonce,
            });
        }

        let events = match &tx.payload {
            TxPayload::AddTrustedCa { certificate } => {
                self.apply_add_trusted_ca(tx, certificate, now)?
            }
            TxPayload::UntrustCa { ca_cert_id } => {
                self.apply_untrust_ca(tx, ca_cert_id, now, block_number)?
            }
            TxPayload::AddTlsCert { certificate } => {
                self.apply_add_tls_certificate(tx, certificate, now, block_number)?
            }
            TxPayload::RevokeCert {
                cert_id,
                revocation_sig,
            } => self.apply_revoke_certificate(tx, cert_id, revocation_sig, now, block_number)?,
            TxPayload::ReportFraud {
                fake_cert_id,
                genuine_cert_id,
                evidence_sig,
            } => self.apply_report_fraud(tx, fake_cert_id, genuine_cert_id, evidence_sig)?,
            TxPayload::PleadFraud {
                report_index,
                document_hash,
                ca_sig,
            } => self.apply_plead_fraud(tx, *report_index, document_hash, ca_sig)?,
            TxPayload::TransferToken { recipient, amount } => {
                self.apply_transfer(tx, recipient, *amount)?
            }
            TxPayload::ResolveFraud {
                report_index,
                upheld,
            } => self.apply_resolve_fraud(tx, *report_index, *upheld, block_number)?,
        };

        // Commit the replay counter and bind the sender key on first use.
        let mut sender = self.account_or_default(&tx.sender_account);
        sender.nonce += 1;
        if sender.owner_key.is_none() {
            sender.owner_key = Some(tx.sender_public_key);
        }
        self.put_account(&tx.sender_account, &sender);
        Ok(events)
    }

    /// Board admits a CA certificate into the trusted set. The operation fee
    /// is paid by the CA's own account, not the submitter.
    fn apply_add_trusted_ca(
        &mut self,
        tx: &Transaction,
        certificate: &Certificate,
        now: u64,
    ) -> Result<Vec<EventKind>, TxError> {
        let mut cas = self.trusted_cas();
        self.require_board_threshold(tx, &cas)?;

        let outcome = validate_ca_profile(certificate, now);
        if !outcome.is_valid() {
            return Err(TxError::ProfileViolation(format!(
                "{}: {}",
                outcome.verdict, outcome.detail
            )));
        }
        let cert_id = certificate.cert_id();
        if cas.entries.contains_key(&cert_id) {
            return Err(TxError::DuplicateCa);
        }
        let token = self.token_state();
        let fee = token.fee_schedule.add_trusted_ca;
        let ca_account = account_address(&certificate.public_key);
        self.check_balance(&ca_account, fee)?;

        // Commit.
        cas.entries.insert(
            cert_id,
            TrustedCaEntry {
                certificate: certificate.clone(),
                status: TrustStatus::Trusted,
            },
        );
        self.put_trusted_cas(&cas);
        self.debit(&ca_account, fee);
        self.credit(&token.board_account, fee);
        Ok(vec![EventKind::CaTrusted {
            ca_cert_id: cert_id,
        }])
    }

    /// Board withdraws trust from a CA; every not-revoked certificate issued
    /// by it is revoked in the same transition. The fee is charged to the
    /// CA's account up to its available balance — a drained account must not
    /// be able to block its own distrust.
    fn apply_untrust_ca(
        &mut self,
        tx: &Transaction,
        ca_cert_id: &CertId,
        now: u64,
        block_number: u64,
    ) -> Result<Vec<EventKind>, TxError> {
        let mut cas = self.trusted_cas();
        self.require_board_threshold(tx, &cas)?;

        let entry = cas.entries.get(ca_cert_id).ok_or(TxError::UnknownCa)?;
        if entry.status == TrustStatus::Untrusted {
            return Err(TxError::AlreadyUntrusted);
        }
        if now > entry.certificate.validity_not_after {
            return Err(TxError::ExpiredCa);
        }
        let token = self.token_state();
        let ca_account = account_address(&entry.certificate.public_key);
        let fee = token
            .fee_schedule
            .untrust_ca
            .min(self.account_or_default(&ca_account).balance);

        // Commit.
        cas.entries.get_mut(ca_cert_id).expect("checked above").status = TrustStatus::Untrusted;
        self.put_trusted_cas(&cas);
        self.debit(&ca_account, fee);
        self.credit(&token.board_account, fee);

        let mut events = vec![EventKind::CaUntrusted {
            ca_cert_id: *ca_cert_id,
        }];
        events.extend(self.revoke_all_issued_by(ca_cert_id, block_number));
        Ok(events)
    }

    /// Cascade revocation: mark every NotRevoked certificate with the given
    /// issuer as Revoked, across all domain records.
    fn revoke_all_issued_by(&mut self, issuer_id: &CertId, block_number: u64) -> Vec<EventKind> {
        let mut events = Vec::new();
        let domains: Vec<String> = self.domain_index.iter().cloned().collect();
        for domain in domains {
            let Some(mut state) = self.domain_state(&domain) else {
                continue;
            };
            let mut changed = false;
            for (cert_id, record) in state.certificates.iter_mut() {
                if record.certificate.issuer_id == *issuer_id
                    && record.status == CertStatus::NotRevoked
                {
                    record.status = CertStatus::Revoked;
                    record.revoked_at_block = Some(block_number);
                    changed = true;
                    events.push(EventKind::CertRevoked {
                        domain: domain.clone(),
                        cert_id: *cert_id,
                    });
                }
            }
            if changed {
                self.put_domain_state(&state);
            }
        }
        events
    }

    /// Admit a TLS certificate: duplicate check, validity period, TLS
    /// profile, then trusted-path construction, in that order. The record is
    /// filed under every subject alternative name.
    fn apply_add_tls_certificate(
        &mut self,
        tx: &Transaction,
        certificate: &Certificate,
        now: u64,
        block_number: u64,
    ) -> Result<Vec<EventKind>, TxError> {
        let cert_id = certificate.cert_id();
        if self.cert_locator.contains_key(&cert_id) {
            return Err(TxError::DuplicateCert);
        }
        if now > certificate.validity_not_after {
            return Err(TxError::CertExpired);
        }
        if now < certificate.validity_not_before {
            return Err(TxError::CertNotYetValid);
        }
        let outcome = validate_tls_profile(certificate, now);
        match outcome.verdict {
            Verdict::Valid => {}
            Verdict::Expired => return Err(TxError::CertExpired),
            Verdict::NotYetValid => return Err(TxError::CertNotYetValid),
            _ => {
                return Err(TxError::ProfileViolation(outcome.detail));
            }
        }
        let cas = self.trusted_cas();
        if let Err(outcome) = cert::build_trusted_path(certificate, cas.trusted_certificates()) {
            return Err(match outcome.verdict {
                Verdict::UnknownIssuer => TxError::UnknownIssuer,
                _ => TxError::BadSignature(outcome.detail),
            });
        }
        let token = self.token_state();
        let fee = token.fee_schedule.add_tls_cert;
        self.check_balance(&tx.sender_account, fee)?;

        // Commit.
        self.debit(&tx.sender_account, fee);
        self.credit(&token.foundation_account, fee);
        let names: BTreeSet<String> = certificate
            .subject_alternative_names
            .iter()
            .cloned()
            .collect();
        let mut events = Vec::new();
        for name in &names {
            let mut state = self.domain_state(name).unwrap_or_else(|| DomainState {
                domain: name.clone(),
                certificates: BTreeMap::new(),
            });
            state.certificates.insert(
                cert_id,
                CertRecord {
                    certificate: certificate.clone(),
                    status: CertStatus::NotRevoked,
                    added_at_block: block_number,
                    revoked_at_block: None,
                },
            );
            self.put_domain_state(&state);
            events.push(EventKind::CertAdded {
                domain: name.clone(),
                cert_id,
            });
        }
        self.cert_locator.insert(cert_id, names);
        Ok(events)
    }

    /// Revoke a live certificate. The request must carry a signature by the
    /// certificate's own key or its issuing CA's key; compromised-key
    /// revocation by an adversary is deliberately possible.
    fn apply_revoke_certificate(
        &mut self,
        tx: &Transaction,
        cert_id: &CertId,
        revocation_sig: &crate::crypto::Signature,
        now: u64,
        block_number: u64,
    ) -> Result<Vec<EventKind>, TxError> {
        let domains = self
            .cert_locator
            .get(cert_id)
            .cloned()
            .ok_or(TxError::UnknownCert)?;
        let record = self.cert_record(cert_id).ok_or(TxError::UnknownCert)?;
        if record.status == CertStatus::Revoked {
            return Err(TxError::AlreadyRevoked);
        }
        if now > record.certificate.validity_not_after {
            return Err(TxError::CertExpired);
        }
        let digest = revocation_digest(cert_id);
        let by_own_key = crypto::verify(&record.certificate.public_key, &digest, revocation_sig);
        let by_issuer = self
            .trusted_cas()
            .entries
            .get(&record.certificate.issuer_id)
            .is_some_and(|entry| {
                crypto::verify(&entry.certificate.public_key, &digest, revocation_sig)
            });
        if !by_own_key && !by_issuer {
            return Err(TxError::UnauthorizedRevoker);
        }
        let token = self.token_state();
        let fee = token.fee_schedule.revoke_cert;
        self.check_balance(&tx.sender_account, fee)?;

        // Commit.
        self.debit(&tx.sender_account, fee);
        self.credit(&token.foundation_account, fee);
        let mut events = Vec::new();
        for domain in &domains {
            let mut state = self.domain_state(domain).expect("located domain exists");
            let entry = state
                .certificates
                .get_mut(cert_id)
                .expect("located record exists");
            entry.status = CertStatus::Revoked;
            entry.revoked_at_block = Some(block_number);
            self.put_domain_state(&state);
            events.push(EventKind::CertRevoked {
                domain: domain.clone(),
                cert_id: *cert_id,
            });
        }
        Ok(events)
    }

    /// File a fraud report: the fake certificate must be on the ledger, the
    /// genuine and fake certificates must share a subject alternative name,
    /// and the evidence signature must verify under the genuine
    /// certificate's key while that certificate is still NotRevoked.
    fn apply_report_fraud(
        &mut self,
        tx: &Transaction,
        fake_cert_id: &CertId,
        genuine_cert_id: &CertId,
        evidence_sig: &crate::crypto::Signature,
    ) -> Result<Vec<EventKind>, TxError> {
        let fake_record = self
            .cert_record(fake_cert_id)
            .ok_or(TxError::FakeCertNotInLedger)?;
        let genuine_record = self.cert_record(genuine_cert_id).ok_or_else(|| {
            TxError::BadEvidenceSignature("genuine certificate not in the ledger".into())
        })?;

        let fake_sans: BTreeSet<&String> = fake_record
            .certificate
            .subject_alternative_names
            .iter()
            .collect();
        let shared: Vec<&String> = genuine_record
            .certificate
            .subject_alternative_names
            .iter()
            .filter(|san| fake_sans.contains(san))
            .collect();
        if shared.is_empty() {
            return Err(TxError::SanMismatch);
        }
        if genuine_record.status == CertStatus::Revoked {
            return Err(TxError::BadEvidenceSignature(
                "genuine certificate is revoked".into(),
            ));
        }
        let digest = fraud_evidence_digest(fake_cert_id, genuine_cert_id);
        if !crypto::verify(
            &genuine_record.certificate.public_key,
            &digest,
            evidence_sig,
        ) {
            return Err(TxError::BadEvidenceSignature(
                "signature does not verify under the genuine certificate's key".into(),
            ));
        }
        let token = self.token_state();
        let fee = token.fee_schedule.report_fraud;
        self.check_balance(&tx.sender_account, fee)?;

        // Commit.
        self.debit(&tx.sender_account, fee);
        self.credit(&token.board_account, fee);
        let mut reports = self.fraud_reports();
        let report_index = reports.reports.len() as u64;
        let domain = shared
            .iter()
            .min()
            .map(|s| s.to_string())
            .expect("non-empty intersection");
        reports.reports.push(FraudReport {
            fake_cert: fake_record.certificate.clone(),
            genuine_cert_id: *genuine_cert_id,
            reporter_account: tx.sender_account,
            evidence_sig: *evidence_sig,
            plea: None,
            resolution: FraudResolution::Open,
        });
        self.put_fraud_reports(&reports);
        Ok(vec![EventKind::FraudReported {
            report_index,
            fake_cert_id: *fake_cert_id,
            domain,
        }])
    }

    /// The accused issuer attaches its rebuttal to an open report. The plea
    /// must be signed by the fake certificate's issuer, and that issuer must
    /// be present in the trusted set. The fee is charged to the pleading
    /// CA's account.
    fn apply_plead_fraud(
        &mut self,
        _tx: &Transaction,
        report_index: u64,
        document_hash: &[u8; 32],
        ca_sig: &crate::crypto::Signature,
    ) -> Result<Vec<EventKind>, TxError> {
        let mut reports = self.fraud_reports();
        let report = reports
            .reports
            .get_mut(report_index as usize)
            .ok_or(TxError::UnknownReport)?;
        if report.resolution != FraudResolution::Open {
            return Err(TxError::UnknownReport);
        }
        if report.plea.is_some() {
            return Err(TxError::AlreadyPleaded);
        }
        let issuer_id = report.fake_cert.issuer_id;
        let cas = self.trusted_cas();
        let issuer_entry = cas.entries.get(&issuer_id).ok_or(TxError::CaNotTrusted)?;
        if issuer_entry.status != TrustStatus::Trusted {
            return Err(TxError::CaNotTrusted);
        }
        let digest = plea_digest(report_index, document_hash);
        if !crypto::verify(&issuer_entry.certificate.public_key, &digest, ca_sig) {
            return Err(TxError::NotIssuer);
        }
        let token = self.token_state();
        let fee = token.fee_schedule.plead_fraud;
        let ca_account = account_address(&issuer_entry.certificate.public_key);
        self.check_balance(&ca_account, fee)?;

        // Commit.
        report.plea = Some(Plea {
            document_hash: *document_hash,
            ca_sig: *ca_sig,
        });
        self.put_fraud_reports(&reports);
        self.debit(&ca_account, fee);
        self.credit(&token.board_account, fee);
        Ok(vec![EventKind::PleaAdded {
            report_index,
            ca_cert_id: issuer_id,
        }])
    }

    /// Board verdict on an open report. Upholding it withdraws trust from
    /// the fake certificate's issuer with the full revocation cascade;
    /// dismissal closes the report without touching the CA.
    fn apply_resolve_fraud(
        &mut self,
        tx: &Transaction,
        report_index: u64,
        upheld: bool,
        block_number: u64,
    ) -> Result<Vec<EventKind>, TxError> {
        let cas = self.trusted_cas();
        self.require_board_threshold(tx, &cas)?;
        let mut reports = self.fraud_reports();
        let report = reports
            .reports
            .get_mut(report_index as usize)
            .ok_or(TxError::UnknownReport)?;
        if report.resolution != FraudResolution::Open {
            return Err(TxError::AlreadyResolved);
        }

        // Commit.
        report.resolution = if upheld {
            FraudResolution::Upheld
        } else {
            FraudResolution::Dismissed
        };
        let issuer_id = report.fake_cert.issuer_id;
        self.put_fraud_reports(&reports);

        let mut events = Vec::new();
        if upheld {
            let mut cas = self.trusted_cas();
            if let Some(entry) = cas.entries.get_mut(&issuer_id) {
                if entry.status == TrustStatus::Trusted {
                    entry.status = TrustStatus::Untrusted;
                    self.put_trusted_cas(&cas);
                    events.push(EventKind::CaUntrusted {
                        ca_cert_id: issuer_id,
                    });
                    events.extend(self.revoke_all_issued_by(&issuer_id, block_number));
                }
            }
        }
        Ok(events)
    }

    /// Move tokens between accounts. Recipients are created on first
    /// receipt; the transfer fee (zero by default) goes to the foundation.
    fn apply_transfer(
        &mut self,
        tx: &Transaction,
        recipient: &Address,
        amount: u64,
    ) -> Result<Vec<EventKind>, TxError> {
        let token = self.token_state();
        let fee = token.fee_schedule.transfer_token;
        let needed = amount.checked_add(fee).ok_or(TxError::InsufficientBalance {
            available: self.account_or_default(&tx.sender_account).balance,
            needed: u64::MAX,
        })?;
        self.check_balance(&tx.sender_account, needed)?;

        // Commit.
        self.debit(&tx.sender_account, needed);
        self.credit(recipient, amount);
        if fee > 0 {
            self.credit(&token.foundation_account, fee);
        }
        Ok(Vec::new())
    }
}

#[cfg(test)]
mod tests;
