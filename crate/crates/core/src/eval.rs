//! Boole, Check, Witness, Eval and Count, the two transformations between
//! Boole and Check, and a closure-based reference evaluator.

use std::collections::VecDeque;

use crate::error::{Result, RpqError};
use crate::graph::{GraphDatabase, Label};
use crate::product::{build_product, pair_reachable, ProductGraph};
use crate::query::{compile_nfa, RegexNode};

/// Default limit on product nodes for [`oracle_eval`].
pub const ORACLE_PRODUCT_LIMIT: usize = 4096;

/// Fresh symbol added by [`boole_to_check`] and [`check_to_boole`].
pub const FRESH_SYMBOL: char = '#';

/// A set of database-node pairs, sorted lexicographically by node order.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct EvalResult {
    pub pairs: Vec<(usize, usize)>,
}

impl EvalResult {
    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn contains(&self, pair: (usize, usize)) -> bool {
        self.pairs.binary_search(&pair).is_ok()
    }
}

pub fn product_for(db: &GraphDatabase, query: &RegexNode) -> Result<ProductGraph> {
    let nfa = compile_nfa(query, db.alphabet())?;
    build_product(db.graph(), &nfa)
}

/// Some pair of `q(D)`, found by a single BFS from a virtual source linked to
/// every `(u, p_0)` in node order. Each product node remembers the database
/// node its BFS tree started from.
pub fn witness(db: &GraphDatabase, query: &RegexNode) -> Result<Option<(usize, usize)>> {
    let pg = product_for(db, query)?;
    let mut origin = vec![usize::MAX; pg.node_count()];
    let mut queue = VecDeque::with_capacity(db.node_count());
    for u in 0..db.node_count() {
        origin[pg.source(u)] = u;
        queue.push_back(pg.source(u));
    }
    while let Some(x) = queue.pop_front() {
        let (v, p) = pg.split(x);
        if p == pg.accept {
            return Ok(Some((origin[x], v)));
        }
        for y in pg.graph.all_successors(x) {
            if origin[y] == usize::MAX {
                origin[y] = origin[x];
                queue.push_back(y);
            }
        }
    }
    Ok(None)
}

pub fn boole(db: &GraphDatabase, query: &RegexNode) -> Result<bool> {
    Ok(witness(db, query)?.is_some())
}

pub fn check(db: &GraphDatabase, query: &RegexNode, u: usize, v: usize) -> Result<bool> {
    pair_reachable(&product_for(db, query)?, u, v)
}

/// Runs one BFS per source row and hands each row's targets, ascending, to `sink`.
fn for_each_row(pg: &ProductGraph, mut sink: impl FnMut(usize, &[usize])) {
    let n = pg.db_nodes;
    let mut stamp = vec![usize::MAX; pg.node_count()];
    let mut queue = VecDeque::new();
    let mut row = Vec::new();
    for u in 0..n {
        row.clear();
        let s = pg.source(u);
        stamp[s] = u;
        queue.push_back(s);
        while let Some(x) = queue.pop_front() {
            let (v, p) = pg.split(x);
            if p == pg.accept {
                row.push(v);
            }
            for y in pg.graph.all_successors(x) {
                if stamp[y] != u {
                    stamp[y] = u;
                    queue.push_back(y);
                }
            }
        }
        row.sort_unstable();
        sink(u, &row);
    }
}

/// `q(D)`, sorted.
pub fn eval_all(db: &GraphDatabase, query: &RegexNode) -> Result<EvalResult> {
    let pg = product_for(db, query)?;
    let mut pairs = Vec::new();
    for_each_row(&pg, |u, row| pairs.extend(row.iter().map(|&v| (u, v))));
    Ok(EvalResult { pairs })
}

/// `|q(D)|`.
pub fn count(db: &GraphDatabase, query: &RegexNode) -> Result<usize> {
    let pg = product_for(db, query)?;
    let mut total = 0;
    for_each_row(&pg, |_, row| total += row.len());
    Ok(total)
}

fn fresh_name(db: &GraphDatabase, base: &str) -> String {
    let mut name = base.to_string();
    while db.node_index(&name).is_ok() {
        name.push('_');
    }
    name
}

fn hash_wrapped(query: &RegexNode) -> RegexNode {
    RegexNode::concat(RegexNode::concat(RegexNode::Literal(FRESH_SYMBOL), query.clone()), RegexNode::Literal(FRESH_SYMBOL))
}

/// Turns Boole into Check: two new nodes joined by `#`-arcs to and from every
/// old node, and the query `#q#`. Returns the new pair as indices.
pub fn boole_to_check(db: &GraphDatabase, query: &RegexNode) -> Result<(GraphDatabase, RegexNode, usize, usize)> {
    if db.alphabet().contains(FRESH_SYMBOL) {
        return Err(RpqError::FreshSymbolTaken);
    }
    let mut out = db.extend_alphabet(FRESH_SYMBOL)?;
    let n = db.node_count();
    let src = out.add_node(&fresh_name(db, "src"))?;
    let dst = out.add_node(&fresh_name(db, "dst"))?;
    for x in 0..n {
        out.add_arc_ids(src, FRESH_SYMBOL, x)?;
        out.add_arc_ids(x, FRESH_SYMBOL, dst)?;
    }
    Ok((out, hash_wrapped(query), src, dst))
}

/// Turns Check into Boole: `s -#-> u` and `v -#-> t` with the query `#q#`.
pub fn check_to_boole(db: &GraphDatabase, query: &RegexNode, u: usize, v: usize) -> Result<(GraphDatabase, RegexNode)> {
    if db.alphabet().contains(FRESH_SYMBOL) {
        return Err(RpqError::FreshSymbolTaken);
    }
    for x in [u, v] {
        if x >= db.node_count() {
            return Err(RpqError::UnknownNode(x.to_string()));
        }
    }
    let mut out = db.extend_alphabet(FRESH_SYMBOL)?;
    let s = out.add_node(&fresh_name(db, "s"))?;
    let t = out.add_node(&fresh_name(db, "t"))?;
    out.add_arc_ids(s, FRESH_SYMBOL, u)?;
    out.add_arc_ids(v, FRESH_SYMBOL, t)?;
    Ok((out, hash_wrapped(query)))
}

/// Reference evaluator: reflexive-transitive closure of the product by
/// Floyd-Warshall over bitset rows. Product arcs are derived here directly
/// from the database and automaton arc lists.
pub fn oracle_eval(db: &GraphDatabase, query: &RegexNode) -> Result<EvalResult> {
    oracle_eval_bounded(db, query, ORACLE_PRODUCT_LIMIT)
}

pub fn oracle_eval_bounded(db: &GraphDatabase, query: &RegexNode, limit: usize) -> Result<EvalResult> {
    let nfa = compile_nfa(query, db.alphabet())?;
    let n = db.node_count();
    let m = nfa.state_count();
    let size = n * m;
    if size > limit {
        return Err(RpqError::OracleTooLarge(size));
    }
    let words = size.div_ceil(64).max(1);
    let mut reach = vec![0u64; size * words];
    let set = |reach: &mut [u64], i: usize, j: usize| reach[i * words + j / 64] |= 1 << (j % 64);
    for i in 0..size {
        set(&mut reach, i, i);
    }
    let automaton_arcs: Vec<(usize, Label, usize)> = nfa.graph.arcs().collect();
    for &(p, label, p2) in &automaton_arcs {
        if label == Label::Epsilon {
            for u in 0..n {
                set(&mut reach, u * m + p, u * m + p2);
            }
        }
    }
    for (u, label, v) in db.graph().arcs() {
        for &(p, l2, p2) in &automaton_arcs {
            if l2 == label {
                set(&mut reach, u * m + p, v * m + p2);
            }
        }
    }
    for k in 0..size {
        let (kw, kb) = (k / 64, 1u64 << (k % 64));
        let row_k: Vec<u64> = reach[k * words..(k + 1) * words].to_vec();
        for i in 0..size {
            let row = &mut reach[i * words..(i + 1) * words];
            if row[kw] & kb != 0 {
                for (a, b) in row.iter_mut().zip(&row_k) {
                    *a |= *b;
                }
            }
        }
    }
    let mut pairs = Vec::new();
    for u in 0..n {
        let i = u * m + nfa.start;
        for v in 0..n {
            let j = v * m + nfa.accept;
            if reach[i * words + j / 64] & (1 << (j % 64)) != 0 {
                pairs.push((u, v));
            }
        }
    }
    Ok(EvalResult { pairs })
}
