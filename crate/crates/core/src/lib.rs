//! Regular path query evaluation and enumeration over edge-labelled graph
//! databases.

pub mod approx;
pub mod enumerate;
pub mod error;
pub mod eval;
pub mod graph;
pub mod meter;
pub mod product;
pub mod query;
pub mod reductions;
pub mod restricted;
pub mod script;
pub mod workload;

pub use enumerate::{Enumerator, OrderContract, Pull};
pub use error::{Result, RpqError};
pub use graph::{Alphabet, DegreeStats, GraphDatabase, Label, SigmaGraph, Update};
pub use meter::{DelayMeter, DelaySummary};
pub use query::{classify, compile_nfa, parse_rpq, Nfa, Query, QueryClass, RegexNode};
