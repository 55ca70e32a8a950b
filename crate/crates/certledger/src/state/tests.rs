use super::*;
use crate::cert::{issue_certificate, issue_self_signed_ca, CertificateParams, KeyUsage};
use crate::crypto::{KeyPair, Signature};
use crate::genesis::{Allocation, AuthorityId, GenesisConfig};

const NOW: u64 = 1_700_000_000;
const YEAR: u64 = 365 * 86_400;

struct Env {
    state: WorldState,
    board: Vec<KeyPair>,
    foundation: KeyPair,
    ca: KeyPair,
    ca_cert: Certificate,
    ca2: KeyPair,
    ca2_cert: Certificate,
    owner: KeyPair,
    block: u64,
}

fn ca_cert_for(kp: &KeyPair, name: &str, serial: u8) -> Certificate {
    issue_self_signed_ca(
        CertificateParams {
            serial: [serial; 16],
            subject_common_name: name.into(),
            subject_alternative_names: vec![],
            validity_not_before: NOW - 1_000,
            validity_not_after: NOW + 10 * YEAR,
            public_key: kp.public,
            is_ca: true,
            key_usage: KeyUsage::CA,
        },
        &kp.secret,
    )
    .unwrap()
}

fn leaf_for(
    issuer: &KeyPair,
    issuer_cert: &Certificate,
    subject: &KeyPair,
    sans: &[&str],
    serial: u8,
) -> Certificate {
    issue_certificate(
        CertificateParams {
            serial: [serial; 16],
            subject_common_name: sans[0].into(),
            subject_alternative_names: sans.iter().map(|s| s.to_string()).collect(),
            validity_not_before: NOW - 100,
            validity_not_after: NOW + 400 * 86_400,
            public_key: subject.public,
            is_ca: false,
            key_usage: KeyUsage::LEAF,
        },
        issuer_cert.cert_id(),
        &issuer.secret,
    )
    .unwrap()
}

impl Env {
    fn new() -> Env {
        let board: Vec<KeyPair> = (0..3).map(|i| KeyPair::from_seed_u64(100 + i)).collect();
        let foundation = KeyPair::from_seed_u64(1);
        let ca = KeyPair::from_seed_u64(10);
        let ca2 = KeyPair::from_seed_u64(11);
        let owner = KeyPair::from_seed_u64(20);
        let ca_cert = ca_cert_for(&ca, "Root CA One", 1);
        let ca2_cert = ca_cert_for(&ca2, "Root CA Two", 2);

        let config = GenesisConfig {
            timestamp: NOW - 600,
            block_time: 600,
            board_threshold: 2,
            board_keys: board.iter().map(|kp| kp.public).collect(),
            board_account_key: board[0].public,
            foundation_key: foundation.public,
            foundation_balance: 1_000,
            authorities: vec![AuthorityId([1u8; 32])],
            fees: FeeSchedule::default(),
            allocations: vec![
                Allocation {
                    account: account_address(&ca.public),
                    balance: 100,
                },
                Allocation {
                    account: account_address(&ca2.public),
                    balance: 100,
                },
                Allocation {
                    account: account_address(&owner.public),
                    balance: 100,
                },
            ],
        };
        Env {
            state: WorldState::genesis(&config).unwrap(),
            board,
            foundation,
            ca,
            ca_cert,
            ca2,
            ca2_cert,
            owner,
            block: 1,
        }
    }

    fn nonce(&self, kp: &KeyPair) -> u64 {
        self.state
            .account(&account_address(&kp.public))
            .map(|a| a.nonce)
            .unwrap_or(0)
    }

    fn balance(&self, kp: &KeyPair) -> u64 {
        self.state
            .account(&account_address(&kp.public))
            .map(|a| a.balance)
            .unwrap_or(0)
    }

    fn apply(&mut self, tx: &Transaction) -> Result<Vec<EventKind>, TxError> {
        let result = self.state.apply_transaction(tx, NOW, self.block);
        if result.is_ok() {
            self.block += 1;
        }
        result
    }

    fn governance(&self, sender: &KeyPair, payload: TxPayload, signers: &[usize]) -> Transaction {
        let refs: Vec<&KeyPair> = signers.iter().map(|i| &self.board[*i]).collect();
        Transaction::build_with_board(sender, self.nonce(sender), payload, &refs)
    }

    fn trust_ca(&mut self, cert: &Certificate) {
        let tx = self.governance(
            &self.board[0].clone(),
            TxPayload::AddTrustedCa {
                certificate: cert.clone(),
            },
            &[0, 1],
        );
        self.apply(&tx).unwrap();
    }

    fn add_leaf(&mut self, cert: &Certificate) {
        let owner = self.owner.clone();
        let tx = Transaction::build(
            &owner,
            self.nonce(&owner),
            TxPayload::AddTlsCert {
                certificate: cert.clone(),
            },
        );
        self.apply(&tx).unwrap();
    }
}

fn assert_atomic<F>(env: &mut Env, expected: TxError, build: F)
where
    F: FnOnce(&Env) -> Transaction,
{
    let root_before = env.state.state_root();
    let tx = build(env);
    let err = env.apply(&tx).unwrap_err();
    assert_eq!(err, expected);
    assert_eq!(env.state.state_root(), root_before, "state must be untouched");
}

#[test]
fn genesis_conserves_tokens() {
    let env = Env::new();
    assert!(env.state.token_conservation_holds());
    assert_eq!(env.state.token_state().total_supply, 1_300);
}

#[test]
fn add_trusted_ca_with_threshold_signatures() {
    let mut env = Env::new();
    let board_balance_before = env.balance(&env.board[0].clone());
    let ca_balance_before = env.balance(&env.ca.clone());

    let tx = env.governance(
        &env.board[0].clone(),
        TxPayload::AddTrustedCa {
            certificate: env.ca_cert.clone(),
        },
        &[0, 2],
    );
    let events = env.apply(&tx).unwrap();
    assert_eq!(
        events,
        vec![EventKind::CaTrusted {
            ca_cert_id: env.ca_cert.cert_id()
        }]
    );
    let cas = env.state.trusted_cas();
    assert_eq!(
        cas.entries[&env.ca_cert.cert_id()].status,
        TrustStatus::Trusted
    );
    // Fee moved CA account -> board account.
    assert_eq!(env.balance(&env.ca.clone()), ca_balance_before - 1);
    assert_eq!(env.balance(&env.board[0].clone()), board_balance_before + 1);
    assert!(env.state.token_conservation_holds());
}

#[test]
fn add_trusted_ca_below_threshold_is_rejected_atomically() {
    let mut env = Env::new();
    let cert = env.ca_cert.clone();
    assert_atomic(
        &mut env,
        TxError::BelowThreshold {
            valid: 1,
            required: 2,
        },
        |env| {
            env.governance(
                &env.board[0],
                TxPayload::AddTrustedCa {
                    certificate: cert.clone(),
                },
                &[0],
            )
        },
    );
}

#[test]
fn duplicate_board_signatures_do_not_reach_threshold() {
    let mut env = Env::new();
    let cert = env.ca_cert.clone();
    // Same key signing three times still counts once.
    assert_atomic(
        &mut env,
        TxError::BelowThreshold {
            valid: 1,
            required: 2,
        },
        |env| {
            env.governance(
                &env.board[0],
                TxPayload::AddTrustedCa {
                    certificate: cert.clone(),
                },
                &[1, 1, 1],
            )
        },
    );
}

#[test]
fn non_board_signatures_do_not_count() {
    let mut env = Env::new();
    let outsiders: Vec<KeyPair> = (0..3).map(|i| KeyPair::from_seed_u64(900 + i)).collect();
    let outsider_refs: Vec<&KeyPair> = outsiders.iter().collect();
    let sender = env.board[0].clone();
    let tx = Transaction::build_with_board(
        &sender,
        env.nonce(&sender),
        TxPayload::AddTrustedCa {
            certificate: env.ca_cert.clone(),
        },
        &outsider_refs,
    );
    let err = env.apply(&tx).unwrap_err();
    assert_eq!(
        err,
        TxError::BelowThreshold {
            valid: 0,
            required: 2
        }
    );
}

#[test]
fn readding_existing_ca_is_duplicate() {
    let mut env = Env::new();
    let cert = env.ca_cert.clone();
    env.trust_ca(&cert);
    assert_atomic(&mut env, TxError::DuplicateCa, |env| {
        env.governance(
            &env.board[0],
            TxPayload::AddTrustedCa {
                certificate: cert.clone(),
            },
            &[0, 1],
        )
    });
}

#[test]
fn add_trusted_ca_rejects_leaf_profile() {
    let mut env = Env::new();
    let subject = KeyPair::from_seed_u64(30);
    let ca = env.ca.clone();
    let ca_cert = env.ca_cert.clone();
    let leaf = leaf_for(&ca, &ca_cert, &subject, &["example.com"], 9);
    let tx = env.governance(
        &env.board[0].clone(),
        TxPayload::AddTrustedCa { certificate: leaf },
        &[0, 1],
    );
    assert!(matches!(
        env.apply(&tx).unwrap_err(),
        TxError::ProfileViolation(_)
    ));
}

#[test]
fn add_trusted_ca_requires_ca_balance() {
    let mut env = Env::new();
    // A CA with no funded account cannot pay the admission fee.
    let broke = KeyPair::from_seed_u64(77);
    let cert = ca_cert_for(&broke, "Broke CA", 7);
    let tx = env.governance(
        &env.board[0].clone(),
        TxPayload::AddTrustedCa { certificate: cert },
        &[0, 1],
    );
    assert_eq!(
        env.apply(&tx).unwrap_err(),
        TxError::InsufficientBalance {
            available: 0,
            needed: 1
        }
    );
}

#[test]
fn untrust_ca_cascades_over_all_issued_certificates() {
    let mut env = Env::new();
    let (ca, ca_cert, ca2_cert) = (env.ca.clone(), env.ca_cert.clone(), env.ca2_cert.clone());
    env.trust_ca(&ca_cert);
    env.trust_ca(&ca2_cert);

    // Three live leaves from CA one, plus one from CA two.
    let leaves: Vec<Certificate> = (0..3)
        .map(|i| {
            let subject = KeyPair::from_seed_u64(40 + i);
            leaf_for(&ca, &ca_cert, &subject, &[&format!("site{i}.example")], 10 + i as u8)
        })
        .collect();
    for leaf in &leaves {
        env.add_leaf(leaf);
    }
    let other_subject = KeyPair::from_seed_u64(50);
    let ca2 = env.ca2.clone();
    let other_leaf = leaf_for(&ca2, &ca2_cert, &other_subject, &["other.example"], 20);
    env.add_leaf(&other_leaf);

    let tx = env.governance(
        &env.board[0].clone(),
        TxPayload::UntrustCa {
            ca_cert_id: ca_cert.cert_id(),
        },
        &[1, 2],
    );
    let events = env.apply(&tx).unwrap();
    assert_eq!(
        events[0],
        EventKind::CaUntrusted {
            ca_cert_id: ca_cert.cert_id()
        }
    );
    let revoked: Vec<_> = events[1..]
        .iter()
        .filter(|e| matches!(e, EventKind::CertRevoked { .. }))
        .collect();
    assert_eq!(revoked.len(), 3);

    // Full-state scan: no NotRevoked cert from the untrusted issuer.
    for (_, _, record) in env.state.all_cert_records() {
        if record.certificate.issuer_id == ca_cert.cert_id() {
            assert_eq!(record.status, CertStatus::Revoked);
        }
    }
    // The other CA's leaf is untouched.
    let other = env.state.cert_record(&other_leaf.cert_id()).unwrap();
    assert_eq!(other.status, CertStatus::NotRevoked);
    assert!(env.state.token_conservation_holds());
}

#[test]
fn untrust_unknown_ca() {
    let mut env = Env::new();
    assert_atomic(&mut env, TxError::UnknownCa, |env| {
        env.governance(
            &env.board[0],
            TxPayload::UntrustCa {
                ca_cert_id: CertId([9u8; 32]),
            },
            &[0, 1],
        )
    });
}

#[test]
fn untrust_twice_is_rejected() {
    let mut env = Env::new();
    let ca_cert = env.ca_cert.clone();
    env.trust_ca(&ca_cert);
    let tx = env.governance(
        &env.board[0].clone(),
        TxPayload::UntrustCa {
            ca_cert_id: ca_cert.cert_id(),
        },
        &[0, 1],
    );
    env.apply(&tx).unwrap();
    assert_atomic(&mut env, TxError::AlreadyUntrusted, |env| {
        env.governance(
            &env.board[0],
            TxPayload::UntrustCa {
                ca_cert_id: ca_cert.cert_id(),
            },
            &[0, 1],
        )
    });
}

#[test]
fn untrust_below_threshold() {
    let mut env = Env::new();
    let ca_cert = env.ca_cert.clone();
    env.trust_ca(&ca_cert);
    assert_atomic(
        &mut env,
        TxError::BelowThreshold {
            valid: 1,
            required: 2,
        },
        |env| {
            env.governance(
                &env.board[0],
                TxPayload::UntrustCa {
                    ca_cert_id: ca_cert.cert_id(),
                },
                &[2],
            )
        },
    );
}

#[test]
fn untrust_succeeds_even_with_drained_ca_account() {
    let mut env = Env::new();
    let ca_cert = env.ca_cert.clone();
    env.trust_ca(&ca_cert);
    // CA empties its own account.
    let ca = env.ca.clone();
    let drain = Transaction::build(
        &ca,
        env.nonce(&ca),
        TxPayload::TransferToken {
            recipient: account_address(&env.foundation.public),
            amount: env.balance(&ca),
        },
    );
    env.apply(&drain).unwrap();
    assert_eq!(env.balance(&ca), 0);

    let tx = env.governance(
        &env.board[0].clone(),
        TxPayload::UntrustCa {
            ca_cert_id: ca_cert.cert_id(),
        },
        &[0, 1],
    );
    env.apply(&tx).unwrap();
    assert_eq!(
        env.state.trusted_cas().entries[&ca_cert.cert_id()].status,
        TrustStatus::Untrusted
    );
    assert!(env.state.token_conservation_holds());
}

#[test]
fn add_tls_certificate_happy_path() {
    let mut env = Env::new();
    let (ca, ca_cert) = (env.ca.clone(), env.ca_cert.clone());
    env.trust_ca(&ca_cert);
    let subject = KeyPair::from_seed_u64(30);
    let leaf = leaf_for(&ca, &ca_cert, &subject, &["example.com"], 3);

    let foundation_before = env.balance(&env.foundation.clone());
    let owner = env.owner.clone();
    let tx = Transaction::build(
        &owner,
        env.nonce(&owner),
        TxPayload::AddTlsCert {
            certificate: leaf.clone(),
        },
    );
    let events = env.apply(&tx).unwrap();
    assert_eq!(
        events,
        vec![EventKind::CertAdded {
            domain: "example.com".into(),
            cert_id: leaf.cert_id()
        }]
    );
    let record = env.state.cert_record(&leaf.cert_id()).unwrap();
    assert_eq!(record.status, CertStatus::NotRevoked);
    assert_eq!(record.added_at_block, 2);
    assert_eq!(env.balance(&env.foundation.clone()), foundation_before + 1);
}

#[test]
fn add_tls_certificate_from_untrusted_issuer() {
    let mut env = Env::new();
    // CA two never admitted.
    let (ca2, ca2_cert) = (env.ca2.clone(), env.ca2_cert.clone());
    let subject = KeyPair::from_seed_u64(30);
    let leaf = leaf_for(&ca2, &ca2_cert, &subject, &["example.com"], 3);
    assert_atomic(&mut env, TxError::UnknownIssuer, |env| {
        Transaction::build(
            &env.owner,
            env.nonce(&env.owner),
            TxPayload::AddTlsCert { certificate: leaf.clone() },
        )
    });
    assert!(env.state.cert_record(&CertId([0u8; 32])).is_none());
}

#[test]
fn add_tls_certificate_twice_is_duplicate() {
    let mut env = Env::new();
    let (ca, ca_cert) = (env.ca.clone(), env.ca_cert.clone());
    env.trust_ca(&ca_cert);
    let subject = KeyPair::from_seed_u64(30);
    let leaf = leaf_for(&ca, &ca_cert, &subject, &["example.com"], 3);
    env.add_leaf(&leaf);
    assert_atomic(&mut env, TxError::DuplicateCert, |env| {
        Transaction::build(
            &env.owner,
            env.nonce(&env.owner),
            TxPayload::AddTlsCert { certificate: leaf.clone() },
        )
    });
}

#[test]
fn add_tls_certificate_checks_window_and_profile() {
    let mut env = Env::new();
    let (ca, ca_cert) = (env.ca.clone(), env.ca_cert.clone());
    env.trust_ca(&ca_cert);
    let subject = KeyPair::from_seed_u64(30);

    let mut expired = leaf_for(&ca, &ca_cert, &subject, &["old.example"], 4);
    expired = issue_certificate(
        CertificateParams {
            serial: expired.serial,
            subject_common_name: expired.subject_common_name.clone(),
            subject_alternative_names: expired.subject_alternative_names.clone(),
            validity_not_before: NOW - 2 * YEAR,
            validity_not_after: NOW - YEAR,
            public_key: subject.public,
            is_ca: false,
            key_usage: KeyUsage::LEAF,
        },
        ca_cert.cert_id(),
        &ca.secret,
    )
    .unwrap();
    assert_atomic(&mut env, TxError::CertExpired, |env| {
        Transaction::build(
            &env.owner,
            env.nonce(&env.owner),
            TxPayload::AddTlsCert { certificate: expired.clone() },
        )
    });

    let long_lived = issue_certificate(
        CertificateParams {
            serial: [8u8; 16],
            subject_common_name: "long.example".into(),
            subject_alternative_names: vec!["long.example".into()],
            validity_not_before: NOW - 100,
            validity_not_after: NOW - 100 + 900 * 86_400,
            public_key: subject.public,
            is_ca: false,
            key_usage: KeyUsage::LEAF,
        },
        ca_cert.cert_id(),
        &ca.secret,
    )
    .unwrap();
    let owner = env.owner.clone();
    let tx = Transaction::build(
        &owner,
        env.nonce(&owner),
        TxPayload::AddTlsCert {
            certificate: long_lived,
        },
    );
    assert!(matches!(
        env.apply(&tx).unwrap_err(),
        TxError::ProfileViolation(_)
    ));
}

#[test]
fn multi_san_certificate_is_filed_under_each_name() {
    let mut env = Env::new();
    let (ca, ca_cert) = (env.ca.clone(), env.ca_cert.clone());
    env.trust_ca(&ca_cert);
    let subject = KeyPair::from_seed_u64(30);
    let leaf = leaf_for(
        &ca,
        &ca_cert,
        &subject,
        &["example.com", "www.example.com"],
        3,
    );
    env.add_leaf(&leaf);

    assert_eq!(env.state.search_certificates("example.com", None).len(), 1);
    assert_eq!(
        env.state.search_certificates("www.example.com", None).len(),
        1
    );
    assert_eq!(
        env.state.cert_domains(&leaf.cert_id()).unwrap().len(),
        2
    );
}

#[test]
fn revoke_with_owner_key() {
    let mut env = Env::new();
    let (ca, ca_cert) = (env.ca.clone(), env.ca_cert.clone());
    env.trust_ca(&ca_cert);
    let subject = KeyPair::from_seed_u64(30);
    let leaf = leaf_for(&ca, &ca_cert, &subject, &["example.com"], 3);
    env.add_leaf(&leaf);

    let owner = env.owner.clone();
    let revocation_sig = subject.sign(&revocation_digest(&leaf.cert_id()));
    let tx = Transaction::build(
        &owner,
        env.nonce(&owner),
        TxPayload::RevokeCert {
            cert_id: leaf.cert_id(),
            revocation_sig,
        },
    );
    let events = env.apply(&tx).unwrap();
    assert_eq!(
        events,
        vec![EventKind::CertRevoked {
            domain: "example.com".into(),
            cert_id: leaf.cert_id()
        }]
    );
    let record = env.state.cert_record(&leaf.cert_id()).unwrap();
    assert_eq!(record.status, CertStatus::Revoked);
    assert_eq!(record.revoked_at_block, Some(3));
}

#[test]
fn revoke_with_issuer_key() {
    let mut env = Env::new();
    let (ca, ca_cert) = (env.ca.clone(), env.ca_cert.clone());
    env.trust_ca(&ca_cert);
    let subject = KeyPair::from_seed_u64(30);
    let leaf = leaf_for(&ca, &ca_cert, &subject, &["example.com"], 3);
    env.add_leaf(&leaf);

    let revocation_sig = ca.sign(&revocation_digest(&leaf.cert_id()));
    let owner = env.owner.clone();
    let tx = Transaction::build(
        &owner,
        env.nonce(&owner),
        TxPayload::RevokeCert {
            cert_id: leaf.cert_id(),
            revocation_sig,
        },
    );
    env.apply(&tx).unwrap();
    assert_eq!(
        env.state.cert_record(&leaf.cert_id()).unwrap().status,
        CertStatus::Revoked
    );
}

#[test]
fn revoke_with_unrelated_key_is_unauthorized() {
    let mut env = Env::new();
    let (ca, ca_cert) = (env.ca.clone(), env.ca_cert.clone());
    env.trust_ca(&ca_cert);
    let subject = KeyPair::from_seed_u64(30);
    let leaf = leaf_for(&ca, &ca_cert, &subject, &["example.com"], 3);
    env.add_leaf(&leaf);

    let stranger = KeyPair::from_seed_u64(999);
    let revocation_sig = stranger.sign(&revocation_digest(&leaf.cert_id()));
    assert_atomic(&mut env, TxError::UnauthorizedRevoker, |env| {
        Transaction::build(
            &env.owner,
            env.nonce(&env.owner),
            TxPayload::RevokeCert {
                cert_id: leaf.cert_id(),
                revocation_sig,
            },
        )
    });
}

#[test]
fn revoke_unknown_and_rerevoke() {
    let mut env = Env::new();
    let (ca, ca_cert) = (env.ca.clone(), env.ca_cert.clone());
    env.trust_ca(&ca_cert);

    let subject = KeyPair::from_seed_u64(30);
    assert_atomic(&mut env, TxError::UnknownCert, |env| {
        Transaction::build(
            &env.owner,
            env.nonce(&env.owner),
            TxPayload::RevokeCert {
                cert_id: CertId([3u8; 32]),
                revocation_sig: Signature([0u8; 64]),
            },
        )
    });

    let leaf = leaf_for(&ca, &ca_cert, &subject, &["example.com"], 3);
    env.add_leaf(&leaf);
    let revocation_sig = subject.sign(&revocation_digest(&leaf.cert_id()));
    let owner = env.owner.clone();
    let tx = Transaction::build(
        &owner,
        env.nonce(&owner),
        TxPayload::RevokeCert {
            cert_id: leaf.cert_id(),
            revocation_sig,
        },
    );
    env.apply(&tx).unwrap();
    // Re-revocation is an error, not a no-op.
    assert_atomic(&mut env, TxError::AlreadyRevoked, |env| {
        Transaction::build(
            &env.owner,
            env.nonce(&env.owner),
            TxPayload::RevokeCert {
                cert_id: leaf.cert_id(),
                revocation_sig,
            },
        )
    });
}

fn fraud_setup(env: &mut Env) -> (Certificate, Certificate) {
    // Genuine cert for example.com from CA one, fake cert for the same
    // domain from CA two (also trusted — "fake but valid").
    let (ca, ca_cert) = (env.ca.clone(), env.ca_cert.clone());
    let (ca2, ca2_cert) = (env.ca2.clone(), env.ca2_cert.clone());
    env.trust_ca(&ca_cert);
    env.trust_ca(&ca2_cert);
    let genuine_subject = KeyPair::from_seed_u64(30);
    let genuine = leaf_for(&ca, &ca_cert, &genuine_subject, &["example.com"], 3);
    let attacker_subject = KeyPair::from_seed_u64(31);
    let fake = leaf_for(&ca2, &ca2_cert, &attacker_subject, &["example.com"], 4);
    env.add_leaf(&genuine);
    env.add_leaf(&fake);
    (genuine, fake)
}

#[test]
fn report_fraud_happy_path_and_plea_and_resolution() {
    let mut env = Env::new();
    let (genuine, fake) = fraud_setup(&mut env);
    let genuine_subject = KeyPair::from_seed_u64(30);

    // Report.
    let evidence_sig =
        genuine_subject.sign(&fraud_evidence_digest(&fake.cert_id(), &genuine.cert_id()));
    let owner = env.owner.clone();
    let tx = Transaction::build(
        &owner,
        env.nonce(&owner),
        TxPayload::ReportFraud {
            fake_cert_id: fake.cert_id(),
            genuine_cert_id: genuine.cert_id(),
            evidence_sig,
        },
    );
    let events = env.apply(&tx).unwrap();
    assert_eq!(
        events,
        vec![EventKind::FraudReported {
            report_index: 0,
            fake_cert_id: fake.cert_id(),
            domain: "example.com".into(),
        }]
    );
    assert_eq!(
        env.state.fraud_reports().reports[0].resolution,
        FraudResolution::Open
    );

    // Issuer (CA two) pleads.
    let ca2 = env.ca2.clone();
    let document_hash = [7u8; 32];
    let ca_sig = ca2.sign(&plea_digest(0, &document_hash));
    let tx = Transaction::build(
        &ca2,
        env.nonce(&ca2),
        TxPayload::PleadFraud {
            report_index: 0,
            document_hash,
            ca_sig,
        },
    );
    let events = env.apply(&tx).unwrap();
    assert_eq!(
        events,
        vec![EventKind::PleaAdded {
            report_index: 0,
            ca_cert_id: env.ca2_cert.cert_id()
        }]
    );
    assert!(env.state.fraud_reports().reports[0].plea.is_some());

    // Board upholds: issuer untrusted, its certs revoked (incl. the fake).
    let tx = env.governance(
        &env.board[0].clone(),
        TxPayload::ResolveFraud {
            report_index: 0,
            upheld: true,
        },
        &[0, 1],
    );
    let events = env.apply(&tx).unwrap();
    assert!(events.contains(&EventKind::CaUntrusted {
        ca_cert_id: env.ca2_cert.cert_id()
    }));
    assert_eq!(
        env.state.trusted_cas().entries[&env.ca2_cert.cert_id()].status,
        TrustStatus::Untrusted
    );
    assert_eq!(
        env.state.cert_record(&fake.cert_id()).unwrap().status,
        CertStatus::Revoked
    );
    // The genuine cert from CA one is untouched.
    assert_eq!(
        env.state.cert_record(&genuine.cert_id()).unwrap().status,
        CertStatus::NotRevoked
    );
    assert_eq!(
        env.state.fraud_reports().reports[0].resolution,
        FraudResolution::Upheld
    );
    assert!(env.state.token_conservation_holds());

    // Second verdict fails.
    assert_atomic(&mut env, TxError::AlreadyResolved, |env| {
        env.governance(
            &env.board[0],
            TxPayload::ResolveFraud {
                report_index: 0,
                upheld: false,
            },
            &[0, 1],
        )
    });
}

#[test]
fn report_fraud_rejects_disjoint_sans() {
    let mut env = Env::new();
    let (ca, ca_cert) = (env.ca.clone(), env.ca_cert.clone());
    let (ca2, ca2_cert) = (env.ca2.clone(), env.ca2_cert.clone());
    env.trust_ca(&ca_cert);
    env.trust_ca(&ca2_cert);
    let genuine_subject = KeyPair::from_seed_u64(30);
    let genuine = leaf_for(&ca, &ca_cert, &genuine_subject, &["example.com"], 3);
    let unrelated_subject = KeyPair::from_seed_u64(31);
    let unrelated = leaf_for(&ca2, &ca2_cert, &unrelated_subject, &["elsewhere.net"], 4);
    env.add_leaf(&genuine);
    env.add_leaf(&unrelated);

    let evidence_sig = genuine_subject.sign(&fraud_evidence_digest(
        &unrelated.cert_id(),
        &genuine.cert_id(),
    ));
    assert_atomic(&mut env, TxError::SanMismatch, |env| {
        Transaction::build(
            &env.owner,
            env.nonce(&env.owner),
            TxPayload::ReportFraud {
                fake_cert_id: unrelated.cert_id(),
                genuine_cert_id: genuine.cert_id(),
                evidence_sig,
            },
        )
    });
}

#[test]
fn report_fraud_rejects_wrong_evidence_key_and_missing_fake() {
    let mut env = Env::new();
    let (genuine, fake) = fraud_setup(&mut env);

    let wrong_key = KeyPair::from_seed_u64(888);
    let evidence_sig = wrong_key.sign(&fraud_evidence_digest(&fake.cert_id(), &genuine.cert_id()));
    assert_atomic(
        &mut env,
        TxError::BadEvidenceSignature(
            "signature does not verify under the genuine certificate's key".into(),
        ),
        |env| {
            Transaction::build(
                &env.owner,
                env.nonce(&env.owner),
                TxPayload::ReportFraud {
                    fake_cert_id: fake.cert_id(),
                    genuine_cert_id: genuine.cert_id(),
                    evidence_sig,
                },
            )
        },
    );

    let ghost = CertId([66u8; 32]);
    let genuine_subject = KeyPair::from_seed_u64(30);
    let evidence_sig = genuine_subject.sign(&fraud_evidence_digest(&ghost, &genuine.cert_id()));
    assert_atomic(&mut env, TxError::FakeCertNotInLedger, |env| {
        Transaction::build(
            &env.owner,
            env.nonce(&env.owner),
            TxPayload::ReportFraud {
                fake_cert_id: ghost,
                genuine_cert_id: genuine.cert_id(),
                evidence_sig,
            },
        )
    });
}

#[test]
fn plead_requires_issuer_signature_and_open_report() {
    let mut env = Env::new();
    let (genuine, fake) = fraud_setup(&mut env);
    let genuine_subject = KeyPair::from_seed_u64(30);
    let evidence_sig =
        genuine_subject.sign(&fraud_evidence_digest(&fake.cert_id(), &genuine.cert_id()));
    let owner = env.owner.clone();
    let tx = Transaction::build(
        &owner,
        env.nonce(&owner),
        TxPayload::ReportFraud {
            fake_cert_id: fake.cert_id(),
            genuine_cert_id: genuine.cert_id(),
            evidence_sig,
        },
    );
    env.apply(&tx).unwrap();

    // A different CA (CA one) attempts the plea: signature check fails.
    let ca = env.ca.clone();
    let document_hash = [1u8; 32];
    let ca_sig = ca.sign(&plea_digest(0, &document_hash));
    assert_atomic(&mut env, TxError::NotIssuer, |env| {
        Transaction::build(
            &env.ca,
            env.nonce(&env.ca),
            TxPayload::PleadFraud {
                report_index: 0,
                document_hash,
                ca_sig,
            },
        )
    });

    // Unknown report index.
    let ca2 = env.ca2.clone();
    let ca_sig = ca2.sign(&plea_digest(5, &document_hash));
    assert_atomic(&mut env, TxError::UnknownReport, |env| {
        Transaction::build(
            &env.ca2,
            env.nonce(&env.ca2),
            TxPayload::PleadFraud {
                report_index: 5,
                document_hash,
                ca_sig,
            },
        )
    });

    // Dismiss, then plead: the report is closed.
    let tx = env.governance(
        &env.board[0].clone(),
        TxPayload::ResolveFraud {
            report_index: 0,
            upheld: false,
        },
        &[0, 1],
    );
    env.apply(&tx).unwrap();
    assert_eq!(
        env.state.trusted_cas().entries[&env.ca2_cert.cert_id()].status,
        TrustStatus::Trusted
    );
    let ca_sig = ca2.sign(&plea_digest(0, &document_hash));
    assert_atomic(&mut env, TxError::UnknownReport, |env| {
        Transaction::build(
            &env.ca2,
            env.nonce(&env.ca2),
            TxPayload::PleadFraud {
                report_index: 0,
                document_hash,
                ca_sig,
            },
        )
    });
}

#[test]
fn plead_twice_is_rejected() {
    let mut env = Env::new();
    let (genuine, fake) = fraud_setup(&mut env);
    let genuine_subject = KeyPair::from_seed_u64(30);
    let evidence_sig =
        genuine_subject.sign(&fraud_evidence_digest(&fake.cert_id(), &genuine.cert_id()));
    let owner = env.owner.clone();
    let tx = Transaction::build(
        &owner,
        env.nonce(&owner),
        TxPayload::ReportFraud {
            fake_cert_id: fake.cert_id(),
            genuine_cert_id: genuine.cert_id(),
            evidence_sig,
        },
    );
    env.apply(&tx).unwrap();

    let ca2 = env.ca2.clone();
    let document_hash = [1u8; 32];
    let ca_sig = ca2.sign(&plea_digest(0, &document_hash));
    let tx = Transaction::build(
        &ca2,
        env.nonce(&ca2),
        TxPayload::PleadFraud {
            report_index: 0,
            document_hash,
            ca_sig,
        },
    );
    env.apply(&tx).unwrap();
    assert_atomic(&mut env, TxError::AlreadyPleaded, |env| {
        Transaction::build(
            &env.ca2,
            env.nonce(&env.ca2),
            TxPayload::PleadFraud {
                report_index: 0,
                document_hash,
                ca_sig,
            },
        )
    });
}

#[test]
fn transfer_arithmetic() {
    let mut env = Env::new();
    let owner = env.owner.clone();
    let recipient = KeyPair::from_seed_u64(60);
    let tx = Transaction::build(
        &owner,
        env.nonce(&owner),
        TxPayload::TransferToken {
            recipient: account_address(&recipient.public),
            amount: 4,
        },
    );
    env.apply(&tx).unwrap();
    assert_eq!(env.balance(&owner), 96);
    assert_eq!(env.balance(&recipient), 4);
    // Auto-created recipient account has no owner key yet.
    assert_eq!(
        env.state
            .account(&account_address(&recipient.public))
            .unwrap()
            .owner_key,
        None
    );
    assert!(env.state.token_conservation_holds());
}

#[test]
fn transfer_insufficient_balance_is_atomic() {
    let mut env = Env::new();
    let recipient = account_address(&KeyPair::from_seed_u64(60).public);
    assert_atomic(
        &mut env,
        TxError::InsufficientBalance {
            available: 100,
            needed: 101,
        },
        |env| {
            Transaction::build(
                &env.owner,
                env.nonce(&env.owner),
                TxPayload::TransferToken {
                    recipient,
                    amount: 101,
                },
            )
        },
    );
}

#[test]
fn transfer_zero_bumps_nonce_only() {
    let mut env = Env::new();
    let owner = env.owner.clone();
    let recipient = account_address(&KeyPair::from_seed_u64(60).public);
    let tx = Transaction::build(
        &owner,
        0,
        TxPayload::TransferToken {
            recipient,
            amount: 0,
        },
    );
    env.apply(&tx).unwrap();
    assert_eq!(env.balance(&owner), 100);
    assert_eq!(env.nonce(&owner), 1);
}

#[test]
fn replaying_an_applied_transaction_fails_nonce_check() {
    let mut env = Env::new();
    let owner = env.owner.clone();
    let recipient = account_address(&KeyPair::from_seed_u64(60).public);
    let tx = Transaction::build(
        &owner,
        0,
        TxPayload::TransferToken {
            recipient,
            amount: 1,
        },
    );
    env.apply(&tx).unwrap();
    let err = env.apply(&tx).unwrap_err();
    assert_eq!(err, TxError::BadNonce {
        expected: 1,
        got: 0
    });
}

#[test]
fn tampered_sender_signature_is_rejected() {
    let mut env = Env::new();
    let owner = env.owner.clone();
    let recipient = account_address(&KeyPair::from_seed_u64(60).public);
    let mut tx = Transaction::build(
        &owner,
        0,
        TxPayload::TransferToken {
            recipient,
            amount: 1,
        },
    );
    tx.sender_signature.0[0] ^= 1;
    assert!(matches!(
        env.apply(&tx).unwrap_err(),
        TxError::BadSignature(_)
    ));
}

#[test]
fn search_certificates_filters_by_status() {
    let mut env = Env::new();
    let (ca, ca_cert) = (env.ca.clone(), env.ca_cert.clone());
    env.trust_ca(&ca_cert);
    let mut leaves = Vec::new();
    for i in 0..3u8 {
        let subject = KeyPair::from_seed_u64(30 + i as u64);
        let leaf = leaf_for(&ca, &ca_cert, &subject, &["example.com"], 10 + i);
        env.add_leaf(&leaf);
        leaves.push((subject, leaf));
    }
    // Revoke the last one.
    let (subject, leaf) = &leaves[2];
    let revocation_sig = subject.sign(&revocation_digest(&leaf.cert_id()));
    let owner = env.owner.clone();
    let tx = Transaction::build(
        &owner,
        env.nonce(&owner),
        TxPayload::RevokeCert {
            cert_id: leaf.cert_id(),
            revocation_sig,
        },
    );
    env.apply(&tx).unwrap();

    assert_eq!(env.state.search_certificates("example.com", None).len(), 3);
    assert_eq!(
        env.state
            .search_certificates("example.com", Some(CertStatus::NotRevoked))
            .len(),
        2
    );
    assert_eq!(
        env.state
            .search_certificates("example.com", Some(CertStatus::Revoked))
            .len(),
        1
    );
    assert!(env.state.search_certificates("unknown.example", None).is_empty());
}

#[test]
fn checkpoint_restore_roundtrip() {
    let mut env = Env::new();
    let checkpoint = env.state.checkpoint();
    let root_before = env.state.state_root();
    let ca_cert = env.ca_cert.clone();
    env.trust_ca(&ca_cert);
    assert_ne!(env.state.state_root(), root_before);
    env.state.restore(checkpoint);
    assert_eq!(env.state.state_root(), root_before);
    assert!(env.state.trusted_cas().entries.is_empty());
}
