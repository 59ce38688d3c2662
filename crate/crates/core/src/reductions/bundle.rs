//! Generated instance bundles: database file, optional update script and a
//! JSON sidecar describing the source instance and the expected answer.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Result, RpqError};
use crate::eval::{boole, check, count, eval_all};
use crate::graph::GraphDatabase;
use crate::query::{parse_rpq, RegexNode};
use crate::script::ScriptLine;
use crate::workload::seeded_rng;

use super::build::*;
use super::instances::*;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ReductionKind {
    Ov,
    Tri,
    Bmm,
    Sbmm,
    OvCount,
    Omv,
    TriDyn,
}

impl ReductionKind {
    pub const ALL: [ReductionKind; 7] = [
        ReductionKind::Ov,
        ReductionKind::Tri,
        ReductionKind::Bmm,
        ReductionKind::Sbmm,
        ReductionKind::OvCount,
        ReductionKind::Omv,
        ReductionKind::TriDyn,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            ReductionKind::Ov => "ov",
            ReductionKind::Tri => "tri",
            ReductionKind::Bmm => "bmm",
            ReductionKind::Sbmm => "sbmm",
            ReductionKind::OvCount => "ovcount",
            ReductionKind::Omv => "omv",
            ReductionKind::TriDyn => "tridyn",
        }
    }

    pub fn is_dynamic(self) -> bool {
        matches!(self, ReductionKind::Omv | ReductionKind::TriDyn)
    }
}

impl fmt::Display for ReductionKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ReductionKind {
    type Err = RpqError;

    fn from_str(s: &str) -> Result<Self> {
        ReductionKind::ALL
            .into_iter()
            .find(|k| k.as_str() == s)
            .ok_or_else(|| RpqError::InvalidInstance(format!("unknown reduction '{s}'")))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "problem", rename_all = "lowercase")]
pub enum SourceInstance {
    Ov(OvInstance),
    Tri(TriInstance),
    Bmm(BmmInstance),
    SparseBmm(SparseBmmInstance),
    Omv(OmvInstance),
}

/// A decoded answer of the source problem.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Answer {
    /// OV: an orthogonal pair exists. Triangle: a triangle exists.
    Flag(bool),
    /// A matrix product, or one `M vⁱ` row per OMv round.
    Matrix(BoolMatrix),
    /// Per vertex: lies on a triangle.
    Flags(Vec<bool>),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Sidecar {
    pub reduction: ReductionKind,
    pub n: usize,
    pub d: usize,
    pub seed: u64,
    pub query: String,
    /// Node names of the Check pair, if the engine problem is Check.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pair: Option<(String, String)>,
    pub instance: SourceInstance,
    pub expected: Answer,
}

#[derive(Clone, Debug)]
pub struct GeneratedInstance {
    pub sidecar: Sidecar,
    pub database: GraphDatabase,
    pub script: Option<Vec<ScriptLine>>,
}

/// Outcome of running the engine on a bundle.
#[derive(Clone, Debug, PartialEq)]
pub struct Verdict {
    pub engine: Answer,
    pub oracle: Answer,
    pub expected: Answer,
}

impl Verdict {
    pub fn ok(&self) -> bool {
        self.engine == self.oracle && self.oracle == self.expected
    }
}

pub fn brute_answer(kind: ReductionKind, inst: &SourceInstance) -> Result<Answer> {
    Ok(match (kind, inst) {
        (ReductionKind::Ov | ReductionKind::OvCount, SourceInstance::Ov(i)) => Answer::Flag(ov_brute(i)),
        (ReductionKind::Tri, SourceInstance::Tri(i)) => Answer::Flag(tri_brute(i)),
        (ReductionKind::TriDyn, SourceInstance::Tri(i)) => Answer::Flags(tri_brute_per_vertex(i)),
        (ReductionKind::Bmm, SourceInstance::Bmm(i)) => Answer::Matrix(bmm_brute(&i.a, &i.b)),
        (ReductionKind::Sbmm, SourceInstance::SparseBmm(i)) => {
            let dense = i.to_dense();
            Answer::Matrix(bmm_brute(&dense.a, &dense.b))
        }
        (ReductionKind::Omv, SourceInstance::Omv(i)) => Answer::Matrix(omv_brute(i)),
        _ => return Err(RpqError::InvalidInstance(format!("{kind} does not take this source instance"))),
    })
}

/// Random source instance of size `n` (and dimension `d` for OV).
pub fn random_source(kind: ReductionKind, n: usize, d: usize, seed: u64) -> SourceInstance {
    let mut rng = seeded_rng(seed);
    match kind {
        ReductionKind::Ov | ReductionKind::OvCount => SourceInstance::Ov(OvInstance::random(n, d, &mut rng)),
        ReductionKind::Tri | ReductionKind::TriDyn => SourceInstance::Tri(TriInstance::random(n, &mut rng)),
        ReductionKind::Bmm => SourceInstance::Bmm(BmmInstance::random(n, &mut rng)),
        ReductionKind::Sbmm => SourceInstance::SparseBmm(BmmInstance::random(n, &mut rng).to_sparse()),
        ReductionKind::Omv => SourceInstance::Omv(OmvInstance::random(n, &mut rng)),
    }
}

fn mismatch(kind: ReductionKind) -> RpqError {
    RpqError::InvalidInstance(format!("{kind} does not take this source instance"))
}

/// Runs the construction for `kind` on `inst`.
pub fn build_bundle(kind: ReductionKind, inst: SourceInstance, n: usize, d: usize, seed: u64) -> Result<GeneratedInstance> {
    let expected = brute_answer(kind, &inst)?;
    let (database, query, pair, script) = match (kind, &inst) {
        (ReductionKind::Ov, SourceInstance::Ov(i)) => {
            let r = ov_to_check(i)?;
            let pair = (r.db.name(r.source).to_string(), r.db.name(r.target).to_string());
            (r.db, r.query, Some(pair), None)
        }
        (ReductionKind::Tri, SourceInstance::Tri(i)) => {
            let r = tri_to_boole(i)?;
            (r.db, r.query, None, None)
        }
        (ReductionKind::Bmm, SourceInstance::Bmm(i)) => {
            let r = bmm_to_eval(i)?;
            (r.db, r.query, None, None)
        }
        (ReductionKind::Sbmm, SourceInstance::SparseBmm(i)) => {
            let r = sbmm_to_eval(i)?;
            (r.db, r.query, None, None)
        }
        (ReductionKind::OvCount, SourceInstance::Ov(i)) => {
            let r = ov_to_count(i)?;
            (r.db, r.query, None, None)
        }
        (ReductionKind::Omv, SourceInstance::Omv(i)) => {
            let r = omv_to_dynamic_enum(i)?;
            (r.initial, r.query, None, Some(r.script))
        }
        (ReductionKind::TriDyn, SourceInstance::Tri(i)) => {
            let r = tri_to_dynamic_enum(i)?;
            (r.initial, r.query, None, Some(r.script))
        }
        _ => return Err(mismatch(kind)),
    };
    let sidecar = Sidecar { reduction: kind, n, d, seed, query: query.to_string(), pair, instance: inst, expected };
    Ok(GeneratedInstance { sidecar, database, script })
}

pub fn generate_instance(kind: ReductionKind, n: usize, d: usize, seed: u64) -> Result<GeneratedInstance> {
    build_bundle(kind, random_source(kind, n, d, seed), n, d, seed)
}

fn matrix_dims(inst: &SourceInstance) -> (usize, usize) {
    match inst {
        SourceInstance::Bmm(b) => (b.n(), b.n()),
        SourceInstance::SparseBmm(s) => (s.n, s.n),
        SourceInstance::Ov(o) => (o.n(), o.n()),
        SourceInstance::Tri(t) => (t.n, t.n),
        SourceInstance::Omv(m) => (m.n(), m.n()),
    }
}

/// Runs the engine on the bundle's database, query and script, decodes the
/// result, and compares it with a fresh brute-force answer and the answer
/// recorded in the sidecar.
pub fn verify(bundle: &GeneratedInstance) -> Result<Verdict> {
    let side = &bundle.sidecar;
    let db = &bundle.database;
    let query: RegexNode = parse_rpq(&side.query, db.alphabet())?;
    let kind = side.reduction;
    let (rows, cols) = matrix_dims(&side.instance);
    let engine = match kind {
        ReductionKind::Ov => {
            let (s, t) = side.pair.as_ref().ok_or_else(|| RpqError::InvalidInstance("missing check pair".into()))?;
            Answer::Flag(check(db, &query, db.node_index(s)?, db.node_index(t)?)?)
        }
        ReductionKind::Tri => Answer::Flag(boole(db, &query)?),
        ReductionKind::Bmm | ReductionKind::Sbmm => {
            let red = LayeredReduction { db: db.clone(), query: query.clone(), rows, cols };
            Answer::Matrix(decode_matrix(&red, &eval_all(db, &query)?.pairs)?)
        }
        ReductionKind::OvCount => {
            let red = LayeredReduction { db: db.clone(), query: query.clone(), rows, cols };
            Answer::Flag(decode_ov_count(&red, count(db, &query)?))
        }
        ReductionKind::Omv | ReductionKind::TriDyn => {
            let script = bundle.script.clone().ok_or_else(|| RpqError::InvalidInstance("missing update script".into()))?;
            let red = DynamicReduction { initial: db.clone(), query, script };
            if kind == ReductionKind::Omv {
                Answer::Matrix(replay_dynamic(&red, |db, pairs| decode_omv_round(db, pairs, rows))?)
            } else {
                Answer::Flags(replay_dynamic(&red, |_, pairs| Ok(!pairs.is_empty()))?)
            }
        }
    };
    Ok(Verdict { engine, oracle: brute_answer(kind, &side.instance)?, expected: side.expected.clone() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::GraphDatabase;
    use crate::script::{format_script, parse_script};

    #[test]
    fn every_kind_round_trips_through_files() {
        for kind in ReductionKind::ALL {
            for seed in 0..5 {
                let bundle = generate_instance(kind, 5, 4, seed).unwrap();
                let json = serde_json::to_string(&bundle.sidecar).unwrap();
                let sidecar: Sidecar = serde_json::from_str(&json).unwrap();
                assert_eq!(sidecar, bundle.sidecar);
                let database = GraphDatabase::load_edge_list(&bundle.database.save_edge_list()).unwrap();
                let script = bundle.script.as_ref().map(|s| parse_script(&format_script(s)).unwrap());
                let reloaded = GeneratedInstance { sidecar, database, script };
                let verdict = verify(&reloaded).unwrap();
                assert!(verdict.ok(), "{kind} seed {seed}: {verdict:?}");
            }
        }
    }

    #[test]
    fn kinds_parse() {
        for kind in ReductionKind::ALL {
            assert_eq!(kind.as_str().parse::<ReductionKind>().unwrap(), kind);
        }
        assert!("sat".parse::<ReductionKind>().is_err());
        let json = serde_json::to_string(&ReductionKind::OvCount).unwrap();
        assert_eq!(json, "\"ovcount\"");
    }

    #[test]
    fn tampered_expectation_is_reported() {
        let mut bundle = generate_instance(ReductionKind::Tri, 4, 0, 1).unwrap();
        let Answer::Flag(x) = bundle.sidecar.expected else { panic!() };
        bundle.sidecar.expected = Answer::Flag(!x);
        assert!(!verify(&bundle).unwrap().ok());
    }
}
