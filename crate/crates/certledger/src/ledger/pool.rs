//! Pending-transaction pool.
//!
//! Admission is a plausibility gate (valid signature, nonce not already
//! consumed, not a duplicate); full validation happens at block production.
//! Iteration order is (sender address, nonce), which fixes the intra-block
//! transaction order.

use crate::state::{Address, Transaction, TxId, WorldState};
use std::collections::{BTreeMap, BTreeSet};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PoolError {
    #[error("transaction signature invalid")]
    BadSignature,
    #[error("nonce {got} below account nonce {current}")]
    StaleNonce { current: u64, got: u64 },
    #[error("transaction already in pool")]
    DuplicateInPool,
}

#[derive(Clone, Debug, Default)]
pub struct TransactionPool {
    by_slot: BTreeMap<(Address, u64), Transaction>,
    ids: BTreeSet<TxId>,
}

impl TransactionPool {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.by_slot.len()
    }

    pub fn is_empty(&self) -> bool {
        self.by_slot.is_empty()
    }

    pub fn submit(&mut self, tx: Transaction, state: &WorldState) -> Result<TxId, PoolError> {
        if !tx.verify_sender_signature() {
            return Err(PoolError::BadSignature);
        }
        let txid = tx.txid();
        if self.ids.contains(&txid) {
            return Err(PoolError::DuplicateInPool);
        }
        let current = state
            .account(&tx.sender_account)
            .map(|a| a.nonce)
            .unwrap_or(0);
        if tx.nonce < current {
            return Err(PoolError::StaleNonce {
                current,
                got: tx.nonce,
            });
        }
        let slot = (tx.sender_account, tx.nonce);
        if self.by_slot.contains_key(&slot) {
            // A different transaction already claims this (sender, nonce).
            return Err(PoolError::DuplicateInPool);
        }
        self.by_slot.insert(slot, tx);
        self.ids.insert(txid);
        Ok(txid)
    }

    /// Drain all pending transactions in (sender, nonce) order.
    pub fn drain_ordered(&mut self) -> Vec<Transaction> {
        self.ids.clear();
        std::mem::take(&mut self.by_slot).into_values().collect()
    }

    pub fn contains(&self, txid: &TxId) -> bool {
        self.ids.contains(txid)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::crypto::KeyPair;
    use crate::genesis::{Allocation, AuthorityId, GenesisConfig};
    use crate::state::{account_address, FeeSchedule, TxPayload};

    fn state_with_account(kp: &KeyPair) -> WorldState {
        let board: Vec<KeyPair> = (0..3).map(|i| KeyPair::from_seed_u64(100 + i)).collect();
        let config = GenesisConfig {
            timestamp: 0,
            block_time: 600,
            board_threshold: 2,
            board_keys: board.iter().map(|b| b.public).collect(),
            board_account_key: board[0].public,
            foundation_key: KeyPair::from_seed_u64(1).public,
            foundation_balance: 1_000,
            authorities: vec![AuthorityId([1u8; 32])],
            fees: FeeSchedule::default(),
            allocations: vec![Allocation {
                account: account_address(&kp.public),
                balance: 100,
            }],
        };
        WorldState::genesis(&config).unwrap()
    }

    fn transfer(kp: &KeyPair, nonce: u64, amount: u64) -> Transaction {
        Transaction::build(
            kp,
            nonce,
            TxPayload::TransferToken {
                recipient: account_address(&KeyPair::from_seed_u64(9).public),
                amount,
            },
        )
    }

    #[test]
    fn fresh_transaction_is_admitted() {
        let kp = KeyPair::from_seed_u64(2);
        let state = state_with_account(&kp);
        let mut pool = TransactionPool::new();
        pool.submit(transfer(&kp, 0, 1), &state).unwrap();
        assert_eq!(pool.len(), 1);
    }

    #[test]
    fn duplicate_submission_is_rejected() {
        let kp = KeyPair::from_seed_u64(2);
        let state = state_with_account(&kp);
        let mut pool = TransactionPool::new();
        let tx = transfer(&kp, 0, 1);
        pool.submit(tx.clone(), &state).unwrap();
        assert_eq!(pool.submit(tx, &state), Err(PoolError::DuplicateInPool));
        // A different tx for the same (sender, nonce) slot is also rejected.
        assert_eq!(
            pool.submit(transfer(&kp, 0, 2), &state),
            Err(PoolError::DuplicateInPool)
        );
    }

    #[test]
    fn stale_nonce_is_rejected() {
        let kp = KeyPair::from_seed_u64(2);
        let mut state = state_with_account(&kp);
        state.apply_transaction(&transfer(&kp, 0, 1), 0, 1).unwrap();
        let mut pool = TransactionPool::new();
        assert_eq!(
            pool.submit(transfer(&kp, 0, 1), &state),
            Err(PoolError::StaleNonce { current: 1, got: 0 })
        );
        // Future nonces are plausible.
        pool.submit(transfer(&kp, 2, 1), &state).unwrap();
    }

    #[test]
    fn bad_signature_is_rejected() {
        let kp = KeyPair::from_seed_u64(2);
        let state = state_with_account(&kp);
        let mut pool = TransactionPool::new();
        let mut tx = transfer(&kp, 0, 1);
        tx.nonce = 1;
        assert_eq!(pool.submit(tx, &state), Err(PoolError::BadSignature));
    }

    #[test]
    fn drain_orders_by_sender_then_nonce() {
        let a = KeyPair::from_seed_u64(2);
        let b = KeyPair::from_seed_u64(3);
        let mut state = state_with_account(&a);
        // Fund b as well.
        state.apply_transaction(
            &Transaction::build(
                &a,
                0,
                TxPayload::TransferToken {
                    recipient: account_address(&b.public),
                    amount: 10,
                },
            ),
            0,
            1,
        )
        .unwrap();

        let mut pool = TransactionPool::new();
        pool.submit(transfer(&b, 0, 1), &state).unwrap();
        pool.submit(transfer(&a, 2, 1), &state).unwrap();
        pool.submit(transfer(&a, 1, 1), &state).unwrap();
        let drained = pool.drain_ordered();
        assert!(pool.is_empty());
        let order: Vec<(Address, u64)> = drained
            .iter()
            .map(|tx| (tx.sender_account, tx.nonce))
            .collect();
        let mut sorted = order.clone();
        sorted.sort();
        assert_eq!(order, sorted);
    }
}
