//! Product of a database with a query automaton.

use std::collections::VecDeque;

use crate::error::{Result, RpqError};
use crate::graph::{GraphDatabase, SigmaGraph, EPSILON_SLOT};
use crate::query::Nfa;

/// Product graph on `V_D × V_q`; node `(u, p)` has index `u * m + p`.
#[derive(Clone, Debug)]
pub struct ProductGraph {
    pub graph: SigmaGraph,
    pub db_nodes: usize,
    pub nfa_states: usize,
    pub start: usize,
    pub accept: usize,
}

impl ProductGraph {
    #[inline]
    pub fn index(&self, u: usize, p: usize) -> usize {
        u * self.nfa_states + p
    }

    #[inline]
    pub fn split(&self, idx: usize) -> (usize, usize) {
        (idx / self.nfa_states, idx % self.nfa_states)
    }

    /// `(u, p_0)`.
    #[inline]
    pub fn source(&self, u: usize) -> usize {
        self.index(u, self.start)
    }

    /// `(v, p_f)`.
    #[inline]
    pub fn target(&self, v: usize) -> usize {
        self.index(v, self.accept)
    }

    pub fn node_count(&self) -> usize {
        self.graph.node_count()
    }

    /// Debug dump in edge-list form; ε-arcs use `%` and nodes are `name@state`.
    pub fn dump(&self, db: &GraphDatabase) -> String {
        let mut out = String::from("alphabet");
        for c in self.graph.alphabet().symbols() {
            out.push(' ');
            out.push(*c);
        }
        out.push('\n');
        let name = |i: usize| {
            let (u, p) = self.split(i);
            format!("{}@{}", db.name(u), p)
        };
        for i in 0..self.node_count() {
            out.push_str(&format!("node {}\n", name(i)));
        }
        for (i, label, j) in self.graph.arcs() {
            out.push_str(&format!("edge {} {} {}\n", name(i), label, name(j)));
        }
        out
    }
}

/// Builds the product in one pass over the database's adjacency lists.
pub fn build_product(db: &SigmaGraph, nfa: &Nfa) -> Result<ProductGraph> {
    if db.alphabet() != nfa.alphabet() {
        return Err(RpqError::AlphabetMismatch);
    }
    let n = db.node_count();
    let m = nfa.state_count();
    let q = &nfa.graph;
    let slots = db.alphabet().slot_count();
    let mut g = SigmaGraph::new(db.alphabet().clone(), n * m);
    for u in 0..n {
        for p in 0..m {
            let from = u * m + p;
            for &p2 in q.successors(p, EPSILON_SLOT) {
                g.push_arc(from, EPSILON_SLOT, u * m + p2);
            }
            for slot in 1..slots {
                let moves = q.successors(p, slot);
                if moves.is_empty() {
                    continue;
                }
                for &v in db.successors(u, slot) {
                    for &p2 in moves {
                        g.push_arc(from, slot, v * m + p2);
                    }
                }
            }
        }
    }
    Ok(ProductGraph { graph: g, db_nodes: n, nfa_states: m, start: nfa.start, accept: nfa.accept })
}

/// Whether `(v, p_f)` is reachable from `(u, p_0)`.
pub fn pair_reachable(pg: &ProductGraph, u: usize, v: usize) -> Result<bool> {
    for x in [u, v] {
        if x >= pg.db_nodes {
            return Err(RpqError::UnknownNode(x.to_string()));
        }
    }
    let goal = pg.target(v);
    let mut seen = vec![false; pg.node_count()];
    let mut queue = VecDeque::from([pg.source(u)]);
    seen[pg.source(u)] = true;
    while let Some(x) = queue.pop_front() {
        if x == goal {
            return Ok(true);
        }
        for y in pg.graph.all_successors(x) {
            if !seen[y] {
                seen[y] = true;
                queue.push_back(y);
            }
        }
    }
    Ok(false)
}
