//! Genesis configuration: board membership, fee schedule, authority set and
//! the initial token allocation. Serialized as TOML for the CLI and the
//! scenario runner.

use crate::crypto::{hex_bytes_newtype, PublicKey};
use crate::state::{Address, FeeSchedule};
use serde::{Deserialize, Serialize};
use thiserror::Error;

hex_bytes_newtype!(
    /// Identity of a block proposer in the round-robin authority schedule.
    AuthorityId,
    32
);

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GenesisError {
    #[error("board threshold {threshold} out of range for {members} members")]
    InvalidThreshold { threshold: u32, members: usize },
    #[error("duplicate board key {0}")]
    DuplicateBoardKey(PublicKey),
    #[error("authority set must be non-empty")]
    NoAuthorities,
    #[error("fee for {0} must be positive")]
    ZeroFee(&'static str),
    #[error("block time must be positive")]
    ZeroBlockTime,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct Allocation {
    pub account: Address,
    pub balance: u64,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct GenesisConfig {
    /// Timestamp of the genesis block, UNIX seconds.
    pub timestamp: u64,
    /// Target seconds between blocks (simulated time).
    pub block_time: u64,
    /// Minimum number of distinct board signatures for governance.
    pub board_threshold: u32,
    pub board_keys: Vec<PublicKey>,
    /// Key of the account that collects board fees.
    pub board_account_key: PublicKey,
    /// Owner of the initial token supply; collects certificate fees.
    pub foundation_key: PublicKey,
    pub foundation_balance: u64,
    /// Round-robin block proposers.
    pub authorities: Vec<AuthorityId>,
    pub fees: FeeSchedule,
    /// Extra accounts funded at genesis (CAs, domain owners, ...).
    #[serde(default)]
    pub allocations: Vec<Allocation>,
}

impl GenesisConfig {
    pub fn validate(&self) -> Result<(), GenesisError> {
        let members = self.board_keys.len();
        if self.board_threshold == 0 || self.board_threshold as usize > members {
            return Err(GenesisError::InvalidThreshold {
                threshold: self.board_threshold,
                members,
            });
        }
        for (i, key) in self.board_keys.iter().enumerate() {
            if self.board_keys[..i].contains(key) {
                return Err(GenesisError::DuplicateBoardKey(*key));
            }
        }
        if self.authorities.is_empty() {
            return Err(GenesisError::NoAuthorities);
        }
        if self.block_time == 0 {
            return Err(GenesisError::ZeroBlockTime);
        }
        self.fees.validate()?;
        Ok(())
    }

    pub fn total_supply(&self) -> u64 {
        self.foundation_balance + self.allocations.iter().map(|a| a.balance).sum::<u64>()
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string_pretty(self).expect("genesis config serializes")
    }

    pub fn from_toml_str(text: &str) -> Result<Self, toml::de::Error> {
        toml::from_str(text)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::crypto::KeyPair;
    use crate::state::account_address;

    fn sample() -> GenesisConfig {
        let board: Vec<PublicKey> = (0..3)
            .map(|i| KeyPair::from_seed_u64(100 + i).public)
            .collect();
        GenesisConfig {
            timestamp: 1_700_000_000,
            block_time: 600,
            board_threshold: 2,
            board_keys: board.clone(),
            board_account_key: board[0],
            foundation_key: KeyPair::from_seed_u64(1).public,
            foundation_balance: 1_000_000,
            authorities: vec![AuthorityId([1u8; 32]), AuthorityId([2u8; 32])],
            fees: FeeSchedule::default(),
            allocations: vec![Allocation {
                account: account_address(&KeyPair::from_seed_u64(2).public),
                balance: 500,
            }],
        }
    }

    #[test]
    fn toml_roundtrip() {
        let config = sample();
        let text = config.to_toml_string();
        let parsed = GenesisConfig::from_toml_str(&text).unwrap();
        assert_eq!(parsed, config);
    }

    #[test]
    fn validation_catches_bad_threshold() {
        let mut config = sample();
        config.board_threshold = 4;
        assert!(matches!(
            config.validate(),
            Err(GenesisError::InvalidThreshold { .. })
        ));
        config.board_threshold = 0;
        assert!(config.validate().is_err());
    }

    #[test]
    fn total_supply_sums_allocations() {
        let config = sample();
        assert_eq!(config.total_supply(), 1_000_500);
    }
}
