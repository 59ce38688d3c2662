//! Seeded random databases, queries and update scripts.

use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Result, RpqError};
use crate::graph::{Alphabet, GraphDatabase, Update};
use crate::query::RegexNode;
use crate::script::ScriptLine;

pub fn seeded_rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Named graph families used by the benchmarks.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Family {
    /// About `avg_degree · n` random arcs.
    SparseRandom,
    /// Every ordered pair independently with a fixed probability.
    DenseRandom,
    /// Arcs from a left half to a right half, shaped like a matrix product.
    Bipartite,
    /// Every node gets exactly `Δ` distinct random successors.
    BoundedDegree,
}

impl Family {
    pub const ALL: [Family; 4] = [Family::SparseRandom, Family::DenseRandom, Family::Bipartite, Family::BoundedDegree];

    pub fn as_str(self) -> &'static str {
        match self {
            Family::SparseRandom => "sparse-random",
            Family::DenseRandom => "dense-random",
            Family::Bipartite => "bipartite",
            Family::BoundedDegree => "bounded-degree",
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Family {
    type Err = RpqError;

    fn from_str(s: &str) -> Result<Family> {
        Family::ALL
            .into_iter()
            .find(|f| f.as_str() == s)
            .ok_or_else(|| RpqError::InvalidInstance(format!("unknown family '{s}'")))
    }
}

/// Knobs shared by the family generators.
#[derive(Clone, Debug)]
pub struct FamilyParams {
    pub alphabet: String,
    pub avg_degree: f64,
    pub edge_probability: f64,
    pub max_degree: usize,
}

impl Default for FamilyParams {
    fn default() -> Self {
        FamilyParams { alphabet: "ab".into(), avg_degree: 4.0, edge_probability: 0.2, max_degree: 8 }
    }
}

fn numbered(alphabet: &str, n: usize) -> Result<GraphDatabase> {
    let mut db = GraphDatabase::new(Alphabet::new(alphabet.chars())?);
    for i in 1..=n {
        db.add_node(&i.to_string())?;
    }
    Ok(db)
}

pub fn generate(family: Family, n: usize, params: &FamilyParams, rng: &mut impl Rng) -> Result<GraphDatabase> {
    match family {
        Family::SparseRandom => sparse_random(n, params.avg_degree, &params.alphabet, rng),
        Family::DenseRandom => dense_random(n, params.edge_probability, &params.alphabet, rng),
        Family::Bipartite => bipartite(n, params.edge_probability, &params.alphabet, rng),
        Family::BoundedDegree => bounded_degree(n, params.max_degree, &params.alphabet, rng),
    }
}

pub fn sparse_random(n: usize, avg_degree: f64, alphabet: &str, rng: &mut impl Rng) -> Result<GraphDatabase> {
    let mut db = numbered(alphabet, n)?;
    if n == 0 {
        return Ok(db);
    }
    let symbols = db.alphabet().symbols().to_vec();
    let target = (avg_degree * n as f64).round() as usize;
    for _ in 0..target {
        let u = rng.gen_range(0..n);
        let v = rng.gen_range(0..n);
        let x = *symbols.choose(rng).expect("nonempty alphabet");
        db.add_arc_ids(u, x, v)?;
    }
    Ok(db)
}

pub fn dense_random(n: usize, p: f64, alphabet: &str, rng: &mut impl Rng) -> Result<GraphDatabase> {
    let mut db = numbered(alphabet, n)?;
    let symbols = db.alphabet().symbols().to_vec();
    for u in 0..n {
        for v in 0..n {
            if u != v && rng.gen_bool(p) {
                let x = *symbols.choose(rng).expect("nonempty alphabet");
                db.add_arc_ids(u, x, v)?;
            }
        }
    }
    Ok(db)
}

/// `n` left nodes followed by `n` right nodes; only left-to-right arcs.
pub fn bipartite(n: usize, p: f64, alphabet: &str, rng: &mut impl Rng) -> Result<GraphDatabase> {
    let mut db = numbered(alphabet, 2 * n)?;
    let symbols = db.alphabet().symbols().to_vec();
    for u in 0..n {
        for v in n..2 * n {
            if rng.gen_bool(p) {
                let x = *symbols.choose(rng).expect("nonempty alphabet");
                db.add_arc_ids(u, x, v)?;
            }
        }
    }
    Ok(db)
}

pub fn bounded_degree(n: usize, max_degree: usize, alphabet: &str, rng: &mut impl Rng) -> Result<GraphDatabase> {
    let mut db = numbered(alphabet, n)?;
    let symbols = db.alphabet().symbols().to_vec();
    let all: Vec<usize> = (0..n).collect();
    for u in 0..n {
        for &v in all.choose_multiple(rng, max_degree.min(n)) {
            let x = *symbols.choose(rng).expect("nonempty alphabet");
            db.add_arc_ids(u, x, v)?;
        }
    }
    Ok(db)
}

/// Small database with `n` numbered nodes and up to `arcs` random arcs.
pub fn random_database(n: usize, arcs: usize, alphabet: &str, rng: &mut impl Rng) -> Result<GraphDatabase> {
    let mut db = numbered(alphabet, n)?;
    let symbols = db.alphabet().symbols().to_vec();
    if n > 0 {
        for _ in 0..arcs {
            let (u, v) = (rng.gen_range(0..n), rng.gen_range(0..n));
            db.add_arc_ids(u, *symbols.choose(rng).expect("nonempty alphabet"), v)?;
        }
    }
    Ok(db)
}

/// Random expression tree of depth at most `depth`.
pub fn random_ast(depth: usize, symbols: &[char], rng: &mut impl Rng) -> RegexNode {
    let leaf = depth == 0 || rng.gen_ratio(1, 4);
    if leaf {
        return if rng.gen_ratio(1, 6) {
            RegexNode::Epsilon
        } else {
            RegexNode::Literal(*symbols.choose(rng).expect("nonempty symbol set"))
        };
    }
    match rng.gen_range(0..4) {
        0 => RegexNode::concat(random_ast(depth - 1, symbols, rng), random_ast(depth - 1, symbols, rng)),
        1 => RegexNode::alt(random_ast(depth - 1, symbols, rng), random_ast(depth - 1, symbols, rng)),
        2 => RegexNode::plus(random_ast(depth - 1, symbols, rng)),
        _ => RegexNode::star(random_ast(depth - 1, symbols, rng)),
    }
}

fn label_group(symbols: &[char], rng: &mut impl Rng) -> String {
    let k = rng.gen_range(1..=symbols.len());
    let mut picked: Vec<char> = symbols.choose_multiple(rng, k).copied().collect();
    picked.sort_unstable();
    let parts: Vec<String> = picked.iter().map(char::to_string).collect();
    format!("({})", parts.join("|"))
}

/// A random query from the restricted classes, as text.
pub fn random_restricted_query(symbols: &[char], rng: &mut impl Rng) -> String {
    let members = rng.gen_range(1..=3);
    let mut out = Vec::new();
    for _ in 0..members {
        let l = label_group(symbols, rng);
        out.push(match rng.gen_range(0..4) {
            0 => format!("{l}+"),
            1 => format!("{l}*"),
            2 => l,
            _ => format!("{l}{}", label_group(symbols, rng)),
        });
    }
    out.join("|")
}

/// A valid script of `steps` updates against `db`, with an `!enum`
/// checkpoint every `checkpoint_every` updates and at the end.
///
/// Node names introduced by the script start with `n`.
pub fn random_update_script(
    db: &GraphDatabase,
    steps: usize,
    checkpoint_every: usize,
    rng: &mut impl Rng,
) -> Result<Vec<ScriptLine>> {
    let mut sim = db.clone();
    let symbols = db.alphabet().symbols().to_vec();
    let mut fresh = 0usize;
    let mut out = Vec::new();
    for step in 1..=steps {
        let n = sim.node_count();
        let roll = rng.gen_range(0..10);
        let update = if n == 0 || roll == 0 {
            loop {
                fresh += 1;
                let name = format!("n{fresh}");
                if sim.node_index(&name).is_err() {
                    break Update::AddNode(name);
                }
            }
        } else if roll == 1 {
            let isolated: Vec<usize> = (0..n).filter(|&i| sim.graph().is_isolated(i)).collect();
            match isolated.choose(rng) {
                Some(&i) => Update::DeleteNode(sim.name(i).to_string()),
                None => random_insert(&sim, &symbols, rng),
            }
        } else if roll < 5 && sim.arc_count() > 0 {
            let arcs: Vec<_> = sim.graph().arcs().collect();
            let &(u, label, v) = arcs.choose(rng).expect("nonempty");
            let label = match label {
                crate::graph::Label::Symbol(c) => c,
                crate::graph::Label::Epsilon => unreachable!("databases carry no epsilon arcs"),
            };
            Update::DeleteArc { src: sim.name(u).to_string(), label, dst: sim.name(v).to_string() }
        } else {
            random_insert(&sim, &symbols, rng)
        };
        sim.apply_update(&update)?;
        out.push(ScriptLine::Update(update));
        if checkpoint_every > 0 && (step % checkpoint_every == 0 || step == steps) {
            out.push(ScriptLine::Enumerate);
        }
    }
    Ok(out)
}

fn random_insert(db: &GraphDatabase, symbols: &[char], rng: &mut impl Rng) -> Update {
    let n = db.node_count();
    let (u, v) = (rng.gen_range(0..n), rng.gen_range(0..n));
    Update::InsertArc {
        src: db.name(u).to_string(),
        label: *symbols.choose(rng).expect("nonempty alphabet"),
        dst: db.name(v).to_string(),
    }
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use proptest::prelude::*;

    pub fn arb_ast(depth: u32, symbols: Vec<char>) -> impl Strategy<Value = RegexNode> {
        let leaf = prop_oneof![
            4 => prop::sample::select(symbols).prop_map(RegexNode::Literal),
            1 => Just(RegexNode::Epsilon),
        ];
        leaf.prop_recursive(depth, 24, 2, |inner| {
            prop_oneof![
                (inner.clone(), inner.clone()).prop_map(|(l, r)| RegexNode::concat(l, r)),
                (inner.clone(), inner.clone()).prop_map(|(l, r)| RegexNode::alt(l, r)),
                inner.clone().prop_map(RegexNode::plus),
                inner.prop_map(RegexNode::star),
            ]
        })
    }

    #[test]
    fn families_have_expected_shape() {
        let mut rng = seeded_rng(7);
        let p = FamilyParams::default();
        let d = generate(Family::BoundedDegree, 50, &p, &mut rng).unwrap();
        assert_eq!(d.degree_stats().max_degree, 8);
        let b = generate(Family::Bipartite, 10, &p, &mut rng).unwrap();
        assert_eq!(b.node_count(), 20);
        assert!(b.graph().arcs().all(|(u, _, v)| u < 10 && v >= 10));
        let s = generate(Family::SparseRandom, 100, &p, &mut rng).unwrap();
        assert!(s.arc_count() <= 400 && s.arc_count() > 300);
        let dense = generate(Family::DenseRandom, 60, &p, &mut rng).unwrap();
        let expected = 0.2 * 60.0 * 59.0;
        assert!((dense.arc_count() as f64 - expected).abs() < expected * 0.2);
        assert_eq!("dense-random".parse::<Family>().unwrap(), Family::DenseRandom);
        assert!("bogus".parse::<Family>().is_err());
    }

    #[test]
    fn generation_is_reproducible() {
        let p = FamilyParams::default();
        let a = generate(Family::SparseRandom, 30, &p, &mut seeded_rng(3)).unwrap();
        let b = generate(Family::SparseRandom, 30, &p, &mut seeded_rng(3)).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn restricted_queries_classify_as_restricted() {
        let mut rng = seeded_rng(11);
        for _ in 0..200 {
            let text = random_restricted_query(&['a', 'b', 'c'], &mut rng);
            let ast = crate::query::parse_rpq_unchecked(&text).unwrap();
            assert!(crate::query::classify(&ast).is_restricted(), "{text}");
        }
    }

    #[test]
    fn update_scripts_replay_cleanly() {
        let mut rng = seeded_rng(5);
        let db = random_database(6, 10, "ab", &mut rng).unwrap();
        let script = random_update_script(&db, 100, 10, &mut rng).unwrap();
        let mut replay = db.clone();
        let mut checkpoints = 0;
        for line in &script {
            match line {
                ScriptLine::Update(u) => replay.apply_update(u).unwrap(),
                ScriptLine::Enumerate => checkpoints += 1,
            }
        }
        assert_eq!(checkpoints, 10);
    }

    proptest! {
        #[test]
        fn random_asts_respect_depth(seed in any::<u64>(), depth in 0usize..5) {
            let ast = random_ast(depth, &['a', 'b'], &mut seeded_rng(seed));
            // stars add one level when desugared
            prop_assert!(ast.depth() <= 2 * depth + 1);
        }
    }
}
