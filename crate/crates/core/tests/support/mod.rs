//! Reference semantics used only by the integration tests. Nothing here goes
//! through the automaton or the product graph.

#![allow(dead_code)]

use std::collections::BTreeSet;

use rpq_core::graph::Label;
use rpq_core::{GraphDatabase, RegexNode};

/// Row-major Boolean relation over `0..n`, one `u64` word per row.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Relation {
    n: usize,
    rows: Vec<u64>,
}

impl Relation {
    fn empty(n: usize) -> Self {
        assert!(n <= 64, "reference relation supports at most 64 nodes");
        Relation { n, rows: vec![0; n] }
    }

    fn identity(n: usize) -> Self {
        let mut r = Relation::empty(n);
        for i in 0..n {
            r.rows[i] |= 1 << i;
        }
        r
    }

    fn union(&self, other: &Relation) -> Relation {
        Relation { n: self.n, rows: self.rows.iter().zip(&other.rows).map(|(a, b)| a | b).collect() }
    }

    fn compose(&self, other: &Relation) -> Relation {
        let mut out = Relation::empty(self.n);
        for i in 0..self.n {
            let mut acc = 0u64;
            let mut bits = self.rows[i];
            while bits != 0 {
                let k = bits.trailing_zeros() as usize;
                acc |= other.rows[k];
                bits &= bits - 1;
            }
            out.rows[i] = acc;
        }
        out
    }

    /// Smallest transitive relation containing `self`.
    fn transitive(&self) -> Relation {
        let mut r = self.clone();
        loop {
            let next = r.union(&r.compose(self));
            if next == r {
                return r;
            }
            r = next;
        }
    }

    pub fn pairs(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for i in 0..self.n {
            for j in 0..self.n {
                if self.rows[i] >> j & 1 == 1 {
                    out.push((i, j));
                }
            }
        }
        out
    }
}

/// `q(D)` by structural recursion on the expression: literals are arc
/// relations, concatenation is composition, alternation is union and `+` is
/// transitive closure.
pub fn relational_eval(db: &GraphDatabase, q: &RegexNode) -> Vec<(usize, usize)> {
    relation(db, q).pairs()
}

fn relation(db: &GraphDatabase, q: &RegexNode) -> Relation {
    let n = db.node_count();
    match q {
        RegexNode::Literal(c) => {
            let mut r = Relation::empty(n);
            for (u, label, v) in db.graph().arcs() {
                if label == Label::Symbol(*c) {
                    r.rows[u] |= 1 << v;
                }
            }
            r
        }
        RegexNode::Epsilon => Relation::identity(n),
        RegexNode::Concat(l, r) => relation(db, l).compose(&relation(db, r)),
        RegexNode::Alt(l, r) => relation(db, l).union(&relation(db, r)),
        RegexNode::Plus(c) => relation(db, c).transitive(),
    }
}

/// Positions `j` such that `word[start..j]` matches `q`.
fn ends(q: &RegexNode, word: &[char], start: usize) -> BTreeSet<usize> {
    match q {
        RegexNode::Literal(c) => {
            if word.get(start) == Some(c) {
                BTreeSet::from([start + 1])
            } else {
                BTreeSet::new()
            }
        }
        RegexNode::Epsilon => BTreeSet::from([start]),
        RegexNode::Concat(l, r) => ends(l, word, start).into_iter().flat_map(|m| ends(r, word, m)).collect(),
        RegexNode::Alt(l, r) => {
            let mut s = ends(l, word, start);
            s.extend(ends(r, word, start));
            s
        }
        RegexNode::Plus(c) => {
            let mut reached = ends(c, word, start);
            let mut frontier: Vec<usize> = reached.iter().copied().collect();
            while let Some(m) = frontier.pop() {
                for e in ends(c, word, m) {
                    if reached.insert(e) {
                        frontier.push(e);
                    }
                }
            }
            reached
        }
    }
}

pub fn word_matches(q: &RegexNode, word: &str) -> bool {
    let w: Vec<char> = word.chars().collect();
    ends(q, &w, 0).contains(&w.len())
}

pub fn words_up_to(symbols: &[char], len: usize) -> Vec<String> {
    let mut all = vec![String::new()];
    let mut frontier = vec![String::new()];
    for _ in 0..len {
        let next: Vec<String> =
            frontier.iter().flat_map(|w| symbols.iter().map(move |c| format!("{w}{c}"))).collect();
        all.extend(next.iter().cloned());
        frontier = next;
    }
    all
}
