use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// One access frame scenario: `M` tokens, `K` data slots, `T` users.
///
/// No ordering between `M` and `K` is assumed.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "RawConfig")]
pub struct SystemConfig {
    #[serde(rename = "M")]
    pub tokens: u32,
    #[serde(rename = "K")]
    pub data_slots: u32,
    #[serde(rename = "T")]
    pub users: u32,
}

#[derive(Deserialize)]
struct RawConfig {
    #[serde(rename = "M")]
    tokens: u32,
    #[serde(rename = "K")]
    data_slots: u32,
    #[serde(rename = "T")]
    users: u32,
}

impl TryFrom<RawConfig> for SystemConfig {
    type Error = Error;

    fn try_from(r: RawConfig) -> Result<Self> {
        SystemConfig::new(r.tokens, r.data_slots, r.users)
    }
}

impl SystemConfig {
    pub fn new(tokens: u32, data_slots: u32, users: u32) -> Result<Self> {
        let cfg = SystemConfig {
            tokens,
            data_slots,
            users,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.tokens == 0 {
            return Err(Error::NoTokens);
        }
        if self.data_slots == 0 {
            return Err(Error::NoDataSlots);
        }
        Ok(())
    }

    /// `min(M, T)`: the most tokens that can be active.
    pub fn max_active(&self) -> u32 {
        self.tokens.min(self.users)
    }

    /// `min(M, K, T)`: the largest possible number of successes.
    pub fn max_successes(&self) -> u32 {
        self.max_active().min(self.data_slots)
    }

    /// Access frame length in slots: one contention slot plus `K` data slots.
    pub fn frame_len(&self) -> u32 {
        self.data_slots + 1
    }

    pub fn with_users(self, users: u32) -> Result<Self> {
        Self::new(self.tokens, self.data_slots, users)
    }

    pub fn with_data_slots(self, data_slots: u32) -> Result<Self> {
        Self::new(self.tokens, data_slots, self.users)
    }
}
