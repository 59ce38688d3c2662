//! Answer approximations: a subset of `q(D)` that still covers every source
//! and every target, computed in linear time and emitted with constant delay.

use std::collections::{HashSet, VecDeque};

use crate::enumerate::{Enumerator, OrderContract, Pull};
use crate::error::Result;
use crate::graph::{reverse, EpochWatch, GraphDatabase, SigmaGraph};
use crate::meter::DelayMeter;
use crate::product::ProductGraph;
use crate::query::RegexNode;

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Approximation {
    pub pairs: Vec<(usize, usize)>,
}

const NONE: usize = usize::MAX;

/// BFS over `g` from `seeds`, in order; every reached node inherits the
/// representative of the node that discovered it.
fn propagate(g: &SigmaGraph, seeds: impl Iterator<Item = (usize, usize)>, meter: &mut DelayMeter) -> Vec<usize> {
    let mut rep = vec![NONE; g.node_count()];
    let mut queue = VecDeque::new();
    for (x, r) in seeds {
        if rep[x] == NONE {
            rep[x] = r;
            queue.push_back(x);
            meter.charge(2);
        }
    }
    while let Some(x) = queue.pop_front() {
        meter.charge(1);
        for y in g.all_successors(x) {
            meter.charge(1);
            if rep[y] == NONE {
                rep[y] = rep[x];
                queue.push_back(y);
                meter.charge(2);
            }
        }
    }
    rep
}

fn approximate(pg: &ProductGraph, meter: &mut DelayMeter) -> Approximation {
    let n = pg.db_nodes;
    let source_rep = propagate(&pg.graph, (0..n).map(|u| (pg.source(u), u)), meter);
    let rev = reverse(&pg.graph);
    meter.charge((rev.node_count() + rev.arc_count()) as u64);
    let target_rep = propagate(&rev, (0..n).map(|v| (pg.target(v), v)), meter);

    let mut seen = HashSet::new();
    let mut pairs = Vec::new();
    for i in 0..n {
        meter.charge(2);
        let t = target_rep[pg.source(i)];
        if t != NONE && seen.insert((i, t)) {
            pairs.push((i, t));
        }
        let s = source_rep[pg.target(i)];
        if s != NONE && seen.insert((s, i)) {
            pairs.push((s, i));
        }
    }
    Approximation { pairs }
}

pub fn compute_approximation(db: &GraphDatabase, query: &RegexNode) -> Result<Approximation> {
    let pg = crate::eval::product_for(db, query)?;
    Ok(approximate(&pg, &mut DelayMeter::new()))
}

/// Emits an approximation with constant delay after linear preprocessing.
pub struct ApproxEnumerator {
    pairs: Vec<(usize, usize)>,
    next: usize,
    watch: EpochWatch,
    meter: DelayMeter,
    stale: bool,
}

pub fn enum_approx(db: &GraphDatabase, query: &RegexNode) -> Result<ApproxEnumerator> {
    let mut meter = DelayMeter::new();
    let pg = crate::eval::product_for(db, query)?;
    meter.charge((pg.node_count() + pg.graph.arc_count()) as u64);
    let approx = approximate(&pg, &mut meter);
    Ok(ApproxEnumerator { pairs: approx.pairs, next: 0, watch: db.watch(), meter, stale: false })
}

impl Enumerator for ApproxEnumerator {
    fn pull(&mut self) -> Pull {
        if self.stale || self.watch.is_stale() {
            self.stale = true;
            return Pull::Stale;
        }
        self.meter.charge(1);
        match self.pairs.get(self.next) {
            Some(&(u, v)) => {
                self.next += 1;
                self.meter.charge(1);
                self.meter.record_output();
                Pull::Pair(u, v)
            }
            None => {
                self.meter.record_done();
                Pull::Done
            }
        }
    }

    fn order(&self) -> OrderContract {
        OrderContract::Unordered
    }

    fn meter(&self) -> &DelayMeter {
        &self.meter
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::enumerate::collect_pairs;
    use crate::eval::oracle_eval;
    use crate::graph::fixtures::d1;
    use crate::graph::Alphabet;
    use crate::query::parse_rpq;
    use proptest::prelude::*;
    use std::collections::BTreeSet;

    fn q(db: &GraphDatabase, s: &str) -> RegexNode {
        parse_rpq(s, db.alphabet()).unwrap()
    }

    fn sorted(mut v: Vec<(usize, usize)>) -> Vec<(usize, usize)> {
        v.sort_unstable();
        v
    }

    fn covers(approx: &[(usize, usize)], full: &[(usize, usize)]) -> bool {
        let left = |p: &[(usize, usize)]| p.iter().map(|x| x.0).collect::<BTreeSet<_>>();
        let right = |p: &[(usize, usize)]| p.iter().map(|x| x.1).collect::<BTreeSet<_>>();
        approx.iter().all(|p| full.contains(p)) && left(approx) == left(full) && right(approx) == right(full)
    }

    #[test]
    fn d1_single_letter_is_forced() {
        let db = d1();
        let a = compute_approximation(&db, &q(&db, "a")).unwrap();
        assert_eq!(sorted(a.pairs), vec![(0, 1), (1, 2)]);
        assert!(compute_approximation(&db, &q(&db, "c")).unwrap().pairs.is_empty());
        let mut e = enum_approx(&db, &q(&db, "a")).unwrap();
        assert_eq!(sorted(collect_pairs(&mut e).unwrap()), vec![(0, 1), (1, 2)]);
    }

    #[test]
    fn complete_digraph() {
        let names = ["1", "2", "3"];
        let mut arcs = Vec::new();
        for u in names {
            for v in names {
                arcs.push((u, 'a', v));
            }
        }
        let db = GraphDatabase::from_arcs("a", &names, &arcs).unwrap();
        let a = compute_approximation(&db, &q(&db, "a")).unwrap();
        assert!(a.pairs.len() <= 6);
        assert!(covers(&a.pairs, &oracle_eval(&db, &q(&db, "a")).unwrap().pairs));
    }

    #[test]
    fn empty_and_reflexive() {
        let empty = GraphDatabase::new(Alphabet::new("a".chars()).unwrap());
        let mut e = enum_approx(&empty, &q(&empty, "a")).unwrap();
        assert_eq!(e.pull(), Pull::Done);

        let db = d1();
        let mut e = enum_approx(&db, &q(&db, "a*")).unwrap();
        let out = collect_pairs(&mut e).unwrap();
        let left: BTreeSet<usize> = out.iter().map(|p| p.0).collect();
        let right: BTreeSet<usize> = out.iter().map(|p| p.1).collect();
        assert_eq!(left, BTreeSet::from([0, 1, 2]));
        assert_eq!(right, BTreeSet::from([0, 1, 2]));
    }

    #[test]
    fn emission_gap_is_constant() {
        let db = d1();
        let mut e = enum_approx(&db, &q(&db, "(a|b)+")).unwrap();
        collect_pairs(&mut e).unwrap();
        assert!(e.meter().max_gap() <= 2);
        assert!(e.meter().last_gap() <= 1);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(96))]
        #[test]
        fn sound_and_covering((db, ast) in crate::eval::tests::arb_instance()) {
            let full = oracle_eval(&db, &ast).unwrap().pairs;
            let mut e = enum_approx(&db, &ast).unwrap();
            let out = collect_pairs(&mut e).unwrap();
            prop_assert!(covers(&out, &full));
            prop_assert!(out.len() <= 2 * db.node_count());
            let unique: BTreeSet<_> = out.iter().collect();
            prop_assert_eq!(unique.len(), out.len());
        }
    }
}
