use std::collections::VecDeque;
use std::sync::Arc;

use super::{Enumerator, OrderContract, Pull};
use crate::error::Result;
use crate::graph::{reverse, EpochWatch, GraphDatabase, SigmaGraph, Update};
use crate::meter::DelayMeter;
use crate::product::{build_product, ProductGraph};
use crate::query::{compile_nfa, Nfa, RegexNode};

/// Sorted enumeration with `O(|D||q|)` delay. All preprocessing happens
/// inside the first pull, so creating one is constant work.
pub struct BaselineEnumerator {
    graph: Arc<SigmaGraph>,
    nfa: Arc<Nfa>,
    watch: EpochWatch,
    meter: DelayMeter,
    state: State,
}

enum State {
    Fresh,
    Running(Box<Run>),
    Finished,
    Stale,
}

struct Run {
    pg: ProductGraph,
    /// Row `u` has at least one answer.
    nonempty: Vec<bool>,
    row: usize,
    /// Position of the sweep over `targets`, or `None` while between rows.
    sweep: Option<usize>,
    targets: Vec<bool>,
    stamp: Vec<usize>,
    queue: VecDeque<usize>,
}

pub fn enum_baseline(db: &GraphDatabase, query: &RegexNode) -> Result<BaselineEnumerator> {
    let nfa = compile_nfa(query, db.alphabet())?;
    Ok(BaselineEnumerator::with_nfa(db, Arc::new(nfa)))
}

impl BaselineEnumerator {
    pub(crate) fn with_nfa(db: &GraphDatabase, nfa: Arc<Nfa>) -> Self {
        BaselineEnumerator {
            graph: db.shared_graph(),
            nfa,
            watch: db.watch(),
            meter: DelayMeter::new(),
            state: State::Fresh,
        }
    }

    fn preprocess(&mut self) -> Run {
        let meter = &mut self.meter;
        let pg = build_product(&self.graph, &self.nfa).expect("alphabet checked at construction");
        let n = pg.db_nodes;
        let size = pg.node_count();
        meter.charge((size + pg.graph.arc_count()) as u64);
        let rev = reverse(&pg.graph);
        meter.charge((size + rev.arc_count()) as u64);

        // backward search from a virtual sink fed by every (v, p_f)
        let mut seen = vec![false; size];
        let mut queue = VecDeque::new();
        for v in 0..n {
            seen[pg.target(v)] = true;
            queue.push_back(pg.target(v));
            meter.charge(2);
        }
        while let Some(x) = queue.pop_front() {
            meter.charge(1);
            for y in rev.all_successors(x) {
                meter.charge(1);
                if !seen[y] {
                    seen[y] = true;
                    queue.push_back(y);
                    meter.charge(2);
                }
            }
        }
        let nonempty: Vec<bool> = (0..n).map(|u| seen[pg.source(u)]).collect();
        meter.charge(n as u64);
        Run {
            nonempty,
            row: 0,
            sweep: None,
            targets: vec![false; n],
            stamp: vec![usize::MAX; size],
            queue,
            pg,
        }
    }
}

impl Run {
    fn fill_row(&mut self, meter: &mut DelayMeter) {
        let u = self.row;
        let pg = &self.pg;
        let s = pg.source(u);
        self.stamp[s] = u;
        self.queue.push_back(s);
        meter.charge(2);
        while let Some(x) = self.queue.pop_front() {
            meter.charge(1);
            let (v, p) = pg.split(x);
            if p == pg.accept {
                self.targets[v] = true;
                meter.charge(1);
            }
            for y in pg.graph.all_successors(x) {
                meter.charge(1);
                if self.stamp[y] != u {
                    self.stamp[y] = u;
                    self.queue.push_back(y);
                    meter.charge(2);
                }
            }
        }
    }

    fn next(&mut self, meter: &mut DelayMeter) -> Option<(usize, usize)> {
        let n = self.pg.db_nodes;
        loop {
            match self.sweep {
                Some(mut j) => {
                    while j < n {
                        meter.charge(1);
                        if self.targets[j] {
                            self.targets[j] = false;
                            self.sweep = Some(j + 1);
                            return Some((self.row, j));
                        }
                        j += 1;
                    }
                    self.sweep = None;
                    self.row += 1;
                }
                None => {
                    if self.row >= n {
                        return None;
                    }
                    meter.charge(1);
                    if self.nonempty[self.row] {
                        self.fill_row(meter);
                        self.sweep = Some(0);
                    } else {
                        self.row += 1;
                    }
                }
            }
        }
    }
}

impl Enumerator for BaselineEnumerator {
    fn pull(&mut self) -> Pull {
        if matches!(self.state, State::Stale) || self.watch.is_stale() {
            self.state = State::Stale;
            return Pull::Stale;
        }
        if matches!(self.state, State::Fresh) {
            let run = self.preprocess();
            self.state = State::Running(Box::new(run));
        }
        match &mut self.state {
            State::Running(run) => match run.next(&mut self.meter) {
                Some((u, v)) => {
                    self.meter.record_output();
                    Pull::Pair(u, v)
                }
                None => {
                    self.state = State::Finished;
                    self.meter.record_done();
                    Pull::Done
                }
            },
            State::Finished => Pull::Done,
            State::Fresh | State::Stale => unreachable!(),
        }
    }

    fn order(&self) -> OrderContract {
        OrderContract::Sorted
    }

    fn meter(&self) -> &DelayMeter {
        &self.meter
    }
}

/// Bookkeeping steps charged per update: record it, mark preprocessing as
/// pending, drop the current run.
pub const UPDATE_BOOKKEEPING_STEPS: u64 = 3;

/// A database under updates paired with a query. Updates only invalidate;
/// the next enumerator redoes preprocessing inside its first delay.
pub struct DynamicBaseline {
    db: GraphDatabase,
    nfa: Arc<Nfa>,
    update_meter: DelayMeter,
    updates: u64,
    pending_restart: bool,
    max_update_steps: u64,
}

impl DynamicBaseline {
    pub fn new(db: GraphDatabase, query: &RegexNode) -> Result<Self> {
        let nfa = Arc::new(compile_nfa(query, db.alphabet())?);
        Ok(DynamicBaseline {
            db,
            nfa,
            update_meter: DelayMeter::new(),
            updates: 0,
            pending_restart: false,
            max_update_steps: 0,
        })
    }

    pub fn database(&self) -> &GraphDatabase {
        &self.db
    }

    /// Applies the update to the database and records it.
    pub fn apply_update(&mut self, update: &Update) -> Result<()> {
        self.db.apply_update(update)?;
        let before = self.update_meter.total_steps();
        self.updates += 1;
        self.update_meter.charge(1);
        self.pending_restart = true;
        self.update_meter.charge(1);
        // outstanding enumerators observe the epoch bump and report staleness
        self.update_meter.charge(1);
        self.max_update_steps = self.max_update_steps.max(self.update_meter.total_steps() - before);
        Ok(())
    }

    /// A fresh sorted enumerator over the current database.
    pub fn enumerate(&mut self) -> BaselineEnumerator {
        self.pending_restart = false;
        BaselineEnumerator::with_nfa(&self.db, Arc::clone(&self.nfa))
    }

    pub fn updates(&self) -> u64 {
        self.updates
    }

    pub fn restart_pending(&self) -> bool {
        self.pending_restart
    }

    /// Largest number of metered bookkeeping steps spent on one update.
    pub fn max_update_steps(&self) -> u64 {
        self.max_update_steps
    }
}

/// Applies `update` and returns an enumerator reflecting it.
pub fn baseline_on_update(state: &mut DynamicBaseline, update: &Update) -> Result<BaselineEnumerator> {
    state.apply_update(update)?;
    Ok(state.enumerate())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::enumerate::collect_pairs;
    use crate::eval::oracle_eval;
    use crate::graph::fixtures::d1;
    use crate::query::parse_rpq;

    fn q(db: &GraphDatabase, s: &str) -> RegexNode {
        parse_rpq(s, db.alphabet()).unwrap()
    }

    fn ids(pairs: &[(usize, usize)]) -> Vec<(usize, usize)> {
        pairs.iter().map(|&(u, v)| (u - 1, v - 1)).collect()
    }

    #[test]
    fn d1_sequences() {
        let db = d1();
        let mut e = enum_baseline(&db, &q(&db, "a+")).unwrap();
        assert_eq!(collect_pairs(&mut e).unwrap(), ids(&[(1, 2), (1, 3), (2, 3)]));
        assert_eq!(e.pull(), Pull::Done);

        let mut e = enum_baseline(&db, &q(&db, "c")).unwrap();
        assert_eq!(e.pull(), Pull::Done);
        assert_eq!(e.meter().outputs(), 0);

        let mut e = enum_baseline(&db, &q(&db, "a*")).unwrap();
        assert_eq!(
            collect_pairs(&mut e).unwrap(),
            ids(&[(1, 1), (1, 2), (1, 3), (2, 2), (2, 3), (3, 3)])
        );
    }

    #[test]
    fn updates_restart() {
        let db = d1();
        let query = q(&db, "a+");
        let mut dynamic = DynamicBaseline::new(db.clone(), &query).unwrap();
        let mut live = dynamic.enumerate();
        assert!(matches!(live.pull(), Pull::Pair(0, 1)));

        let insert = Update::InsertArc { src: "3".into(), label: 'a', dst: "1".into() };
        let mut e = baseline_on_update(&mut dynamic, &insert).unwrap();
        assert_eq!(live.pull(), Pull::Stale);
        assert_eq!(live.pull(), Pull::Stale);
        let all: Vec<(usize, usize)> = (0..3).flat_map(|u| (0..3).map(move |v| (u, v))).collect();
        assert_eq!(collect_pairs(&mut e).unwrap(), all);
        assert_eq!(all, oracle_eval(dynamic.database(), &query).unwrap().pairs);

        let back = Update::DeleteArc { src: "3".into(), label: 'a', dst: "1".into() };
        let mut e = baseline_on_update(&mut dynamic, &back).unwrap();
        assert_eq!(collect_pairs(&mut e).unwrap(), oracle_eval(&db, &query).unwrap().pairs);

        let mut other = DynamicBaseline::new(d1(), &query).unwrap();
        let del = Update::DeleteArc { src: "1".into(), label: 'a', dst: "2".into() };
        let mut e = baseline_on_update(&mut other, &del).unwrap();
        assert_eq!(collect_pairs(&mut e).unwrap(), vec![(1, 2)]);
        assert_eq!(other.max_update_steps(), UPDATE_BOOKKEEPING_STEPS);
        assert_eq!(other.updates(), 1);
    }

    #[test]
    fn invalid_update_is_rejected() {
        let db = d1();
        let mut dynamic = DynamicBaseline::new(db.clone(), &q(&db, "a")).unwrap();
        assert!(dynamic.apply_update(&Update::DeleteNode("2".into())).is_err());
        assert_eq!(dynamic.updates(), 0);
    }

    #[test]
    fn delay_is_bounded_by_product_size() {
        let db = d1();
        let mut e = enum_baseline(&db, &q(&db, "(a|b)+")).unwrap();
        collect_pairs(&mut e).unwrap();
        let pg_size = 3 * 8 * 4;
        assert!(e.meter().max_gap() <= pg_size as u64);
    }
}
