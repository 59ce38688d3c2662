//! Pull-based enumeration of query answers with delay metering.

mod baseline;
mod scc;
mod sublinear;

pub use baseline::{baseline_on_update, enum_baseline, BaselineEnumerator, DynamicBaseline, UPDATE_BOOKKEEPING_STEPS};
pub use scc::{tarjan_scc, SccDag};
pub use sublinear::{enum_sublinear, sublinear_prepare, SublinearEnumerator, SublinearMode, SublinearState};

use crate::error::{Result, RpqError};
use crate::meter::DelayMeter;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Pull {
    Pair(usize, usize),
    Done,
    /// The database was modified after the enumerator was created.
    Stale,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OrderContract {
    /// Lexicographic by node order.
    Sorted,
    /// Non-decreasing left components.
    SemiSorted,
    Unordered,
}

impl OrderContract {
    pub fn as_str(self) -> &'static str {
        match self {
            OrderContract::Sorted => "sorted",
            OrderContract::SemiSorted => "semi-sorted",
            OrderContract::Unordered => "unordered",
        }
    }

    /// Whether `pairs` is consistent with this contract.
    pub fn admits(self, pairs: &[(usize, usize)]) -> bool {
        match self {
            OrderContract::Sorted => pairs.windows(2).all(|w| w[0] < w[1]),
            OrderContract::SemiSorted => pairs.windows(2).all(|w| w[0].0 <= w[1].0),
            OrderContract::Unordered => true,
        }
    }
}

pub trait Enumerator {
    fn pull(&mut self) -> Pull;
    fn order(&self) -> OrderContract;
    fn meter(&self) -> &DelayMeter;
}

impl<E: Enumerator + ?Sized> Enumerator for Box<E> {
    fn pull(&mut self) -> Pull {
        (**self).pull()
    }
    fn order(&self) -> OrderContract {
        (**self).order()
    }
    fn meter(&self) -> &DelayMeter {
        (**self).meter()
    }
}

/// Pulls until `Done`.
pub fn collect_pairs<E: Enumerator + ?Sized>(e: &mut E) -> Result<Vec<(usize, usize)>> {
    let mut out = Vec::new();
    loop {
        match e.pull() {
            Pull::Pair(u, v) => out.push((u, v)),
            Pull::Done => return Ok(out),
            Pull::Stale => return Err(RpqError::Stale),
        }
    }
}
