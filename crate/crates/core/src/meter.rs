//! Step counting for enumeration delay.
//!
//! Cost model: one step per adjacency entry visited, per product-node array
//! cell read or written, and per queue push or pop. An ordered-buffer
//! operation on a buffer capped at `K` costs `ceil(log2(K + 1))` steps.

use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, Default)]
pub struct DelayMeter {
    total: u64,
    since_output: u64,
    outputs: u64,
    first_gap: Option<u64>,
    max_gap: u64,
    last_gap: Option<u64>,
}

impl DelayMeter {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn charge(&mut self, steps: u64) {
        self.total += steps;
        self.since_output += steps;
    }

    pub fn record_output(&mut self) {
        if self.outputs == 0 {
            self.first_gap = Some(self.since_output);
        } else {
            self.max_gap = self.max_gap.max(self.since_output);
        }
        self.outputs += 1;
        self.since_output = 0;
    }

    /// Closes the stream; later calls are ignored.
    pub fn record_done(&mut self) {
        if self.last_gap.is_none() {
            self.last_gap = Some(self.since_output);
            if self.outputs == 0 {
                self.first_gap = Some(self.since_output);
            }
        }
    }

    pub fn total_steps(&self) -> u64 {
        self.total
    }

    pub fn steps_since_output(&self) -> u64 {
        self.since_output
    }

    pub fn outputs(&self) -> u64 {
        self.outputs
    }

    /// Steps before the first output (the whole run if nothing was emitted).
    pub fn first_gap(&self) -> u64 {
        self.first_gap.unwrap_or(self.since_output)
    }

    /// Largest gap between two consecutive outputs.
    pub fn max_gap(&self) -> u64 {
        self.max_gap
    }

    /// Steps after the last output until the end was reported.
    pub fn last_gap(&self) -> u64 {
        self.last_gap.unwrap_or(self.since_output)
    }

    pub fn is_done(&self) -> bool {
        self.last_gap.is_some()
    }

    pub fn summary(&self) -> DelaySummary {
        DelaySummary {
            outputs: self.outputs,
            first_gap: self.first_gap(),
            max_gap: self.max_gap,
            last_gap: self.last_gap(),
            total_steps: self.total,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DelaySummary {
    pub outputs: u64,
    pub first_gap: u64,
    pub max_gap: u64,
    pub last_gap: u64,
    pub total_steps: u64,
}

/// `ceil(log2(cap + 1))`, at least 1.
pub fn tree_op_cost(cap: usize) -> u64 {
    let bits = usize::BITS - cap.leading_zeros();
    u64::from(bits.max(1))
}
