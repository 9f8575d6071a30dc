use std::time::{Duration, Instant};

use crate::error::{Error, Result};

/// Wall-clock limit checked between fixpoint iterations.
#[derive(Debug, Clone, Copy)]
pub struct Deadline {
    at: Option<Instant>,
    secs: u64,
}

impl Deadline {
    pub fn none() -> Self {
        Deadline { at: None, secs: 0 }
    }

    pub fn after(limit: Duration) -> Self {
        Deadline {
            at: Some(Instant::now() + limit),
            secs: limit.as_secs(),
        }
    }

    pub fn remaining(&self) -> Option<Duration> {
        self.at.map(|t| t.saturating_duration_since(Instant::now()))
    }

    pub fn check(&self) -> Result<()> {
        match self.at {
            Some(t) if Instant::now() >= t => Err(Error::Timeout(self.secs)),
            _ => Ok(()),
        }
    }
}

impl Default for Deadline {
    fn default() -> Self {
        Deadline::none()
    }
}
