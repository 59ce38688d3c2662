//! Enumeration with super-linear preprocessing and `O(|V_D|)` delay.
//!
//! Every strongly connected component `j` of the product keeps a buffer of at
//! most `K` database nodes `i'` such that some `(i', p_f)` is reachable from
//! `j`. Rows whose buffer is not full are answered from the buffer alone; a
//! full buffer pays for a BFS by releasing one element every `|V_D| · m`
//! steps.

use std::collections::{BTreeSet, VecDeque};
use std::sync::Arc;

use super::scc::{tarjan_scc_metered, SccDag};
use super::{Enumerator, OrderContract, Pull};
use crate::error::Result;
use crate::graph::{EpochWatch, GraphDatabase, SigmaGraph};
use crate::meter::{tree_op_cost, DelayMeter};
use crate::product::{build_product, ProductGraph};
use crate::query::{compile_nfa, RegexNode};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SublinearMode {
    /// Ordered buffers holding the `K` smallest targets; sorted output.
    SortedTree,
    /// Unordered buffers with lazily initialised membership; semi-sorted output.
    LazyUnsorted,
}

/// Sparse-set membership over `0..n`: O(1) insert, test and clear without
/// touching the whole range.
struct LazyMarks {
    dense: Vec<usize>,
    sparse: Vec<usize>,
    len: usize,
}

impl LazyMarks {
    fn new(n: usize) -> Self {
        LazyMarks { dense: vec![0; n], sparse: vec![0; n], len: 0 }
    }

    fn contains(&self, x: usize) -> bool {
        let i = self.sparse[x];
        i < self.len && self.dense[i] == x
    }

    fn insert(&mut self, x: usize) {
        if !self.contains(x) {
            self.dense[self.len] = x;
            self.sparse[x] = self.len;
            self.len += 1;
        }
    }

    fn clear(&mut self) {
        self.len = 0;
    }
}

pub struct SublinearState {
    graph: Arc<SigmaGraph>,
    watch: EpochWatch,
    meter: DelayMeter,
    pg: ProductGraph,
    scc: SccDag,
    /// Per component: the buffer, ascending in sorted mode.
    buffers: Vec<Vec<usize>>,
    cap: usize,
    mode: SublinearMode,
}

impl SublinearState {
    pub fn cap(&self) -> usize {
        self.cap
    }

    pub fn mode(&self) -> SublinearMode {
        self.mode
    }

    pub fn scc(&self) -> &SccDag {
        &self.scc
    }

    /// The buffer consulted for row `u`.
    pub fn row_buffer(&self, u: usize) -> &[usize] {
        &self.buffers[self.scc.component[self.pg.source(u)]]
    }

    /// Whether row `u` has at least one answer.
    pub fn row_flag(&self, u: usize) -> bool {
        !self.row_buffer(u).is_empty()
    }

    pub fn meter(&self) -> &DelayMeter {
        &self.meter
    }

    pub fn graph(&self) -> &SigmaGraph {
        &self.graph
    }
}

/// `max(1, ceil(d_avg) · m)` with `m` the automaton's state count.
pub fn default_cap(db: &GraphDatabase, nfa_states: usize) -> usize {
    (db.degree_stats().avg_degree_ceil() * nfa_states).max(1)
}

/// Builds the product, condenses it, and fills the capped buffers.
/// `cap` overrides the default `max(1, ceil(d_avg) · m)`.
pub fn sublinear_prepare(
    db: &GraphDatabase,
    query: &RegexNode,
    mode: SublinearMode,
    cap: Option<usize>,
) -> Result<SublinearState> {
    let nfa = compile_nfa(query, db.alphabet())?;
    let mut meter = DelayMeter::new();
    let pg = build_product(db.graph(), &nfa)?;
    let n = pg.db_nodes;
    meter.charge((pg.node_count() + pg.graph.arc_count()) as u64);
    let cap = cap.unwrap_or_else(|| default_cap(db, nfa.state_count())).max(1);
    // degree statistics: one pass over the database
    meter.charge(db.size() as u64);

    let scc = tarjan_scc_metered(&pg.graph, &mut meter);
    let count = scc.count();
    let buffers = match mode {
        SublinearMode::SortedTree => sorted_buffers(&pg, &scc, cap, &mut meter),
        SublinearMode::LazyUnsorted => lazy_buffers(&pg, &scc, cap, &mut meter),
    };
    debug_assert_eq!(buffers.len(), count);
    meter.charge(n as u64);
    Ok(SublinearState { graph: db.shared_graph(), watch: db.watch(), meter, pg, scc, buffers, cap, mode })
}

fn sorted_buffers(pg: &ProductGraph, scc: &SccDag, cap: usize, meter: &mut DelayMeter) -> Vec<Vec<usize>> {
    let op = tree_op_cost(cap);
    let count = scc.count();
    let mut trees: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); count];
    let insert_capped = |tree: &mut BTreeSet<usize>, x: usize, meter: &mut DelayMeter| {
        if tree.len() == cap && tree.last().is_some_and(|&m| x >= m) {
            meter.charge(op);
            return;
        }
        meter.charge(op);
        if tree.insert(x) && tree.len() > cap {
            tree.pop_last();
            meter.charge(op);
        }
    };
    for v in 0..pg.db_nodes {
        meter.charge(1);
        let j = scc.component[pg.target(v)];
        insert_capped(&mut trees[j], v, meter);
    }
    let mut buffers = vec![Vec::new(); count];
    // components complete in ascending order: successors carry smaller ids
    for j in 0..count {
        let (done, rest) = trees.split_at_mut(j + 1);
        let tree = &done[j];
        for &j2 in &scc.predecessors[j] {
            meter.charge(1);
            let target = &mut rest[j2 - j - 1];
            for &x in tree {
                meter.charge(1);
                insert_capped(target, x, meter);
            }
        }
        buffers[j] = std::mem::take(&mut trees[j]).into_iter().collect();
        meter.charge(buffers[j].len() as u64 + 1);
    }
    buffers
}

fn lazy_buffers(pg: &ProductGraph, scc: &SccDag, cap: usize, meter: &mut DelayMeter) -> Vec<Vec<usize>> {
    let count = scc.count();
    let mut marks = LazyMarks::new(pg.db_nodes);
    let mut buffers: Vec<Vec<usize>> = vec![Vec::new(); count];
    for j in 0..count {
        marks.clear();
        let mut buf = Vec::new();
        for &x in &scc.members[j] {
            meter.charge(1);
            let (v, p) = pg.split(x);
            if p == pg.accept && buf.len() < cap && !marks.contains(v) {
                marks.insert(v);
                buf.push(v);
                meter.charge(2);
            }
        }
        for &j2 in &scc.successors[j] {
            meter.charge(1);
            if buf.len() >= cap {
                break;
            }
            for &v in &buffers[j2] {
                meter.charge(1);
                if buf.len() >= cap {
                    break;
                }
                if !marks.contains(v) {
                    marks.insert(v);
                    buf.push(v);
                    meter.charge(2);
                }
            }
        }
        buffers[j] = buf;
    }
    buffers
}

pub struct SublinearEnumerator {
    state: SublinearState,
    row: usize,
    phase: Phase,
    /// Output row: 0 unseen, 1 reached by the BFS, 2 already emitted (lazy mode).
    marks: Vec<u8>,
    stamp: Vec<usize>,
    queue: VecDeque<usize>,
    pay_interval: u64,
    pay_interval_override: bool,
    finished: bool,
    stale: bool,
}

enum Phase {
    NextRow,
    Buffered { next: usize },
    Paid { next: usize },
    Drain { next: usize },
    Sweep { j: usize, above: usize },
}

pub fn enum_sublinear(state: SublinearState) -> SublinearEnumerator {
    let n = state.pg.db_nodes;
    let size = state.pg.node_count();
    let pay_interval = (n * state.pg.nfa_states).max(1) as u64;
    SublinearEnumerator {
        row: 0,
        phase: Phase::NextRow,
        marks: vec![0; n],
        stamp: vec![usize::MAX; size],
        queue: VecDeque::new(),
        pay_interval,
        pay_interval_override: false,
        finished: false,
        stale: false,
        state,
    }
}

impl SublinearEnumerator {
    pub fn state(&self) -> &SublinearState {
        &self.state
    }

    /// Runs BFS work until one buffered element has been paid for or the
    /// search is exhausted. Returns `true` when the search is exhausted.
    fn bfs_until_paid(&mut self) -> bool {
        let pg = &self.state.pg;
        let meter = &mut self.state.meter;
        let u = self.row;
        while self.pay_interval_override || meter.steps_since_output() < self.pay_interval {
            let Some(x) = self.queue.pop_front() else {
                self.pay_interval_override = false;
                return true;
            };
            meter.charge(1);
            let (v, p) = pg.split(x);
            if p == pg.accept && self.marks[v] == 0 {
                self.marks[v] = 1;
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
        self.queue.is_empty()
    }

    fn next(&mut self) -> Option<(usize, usize)> {
        let n = self.state.pg.db_nodes;
        let lazy = self.state.mode == SublinearMode::LazyUnsorted;
        loop {
            match self.phase {
                Phase::NextRow => {
                    if self.row >= n {
                        return None;
                    }
                    self.state.meter.charge(1);
                    let len = self.state.row_buffer(self.row).len();
                    if len == 0 {
                        self.row += 1;
                    } else if len < self.state.cap {
                        self.phase = Phase::Buffered { next: 0 };
                    } else {
                        let s = self.state.pg.source(self.row);
                        self.stamp[s] = self.row;
                        self.queue.push_back(s);
                        self.state.meter.charge(2);
                        self.phase = Phase::Paid { next: 0 };
                    }
                }
                Phase::Buffered { next } => {
                    let buf = self.state.row_buffer(self.row);
                    if next < buf.len() {
                        let v = buf[next];
                        self.state.meter.charge(1);
                        self.phase = Phase::Buffered { next: next + 1 };
                        return Some((self.row, v));
                    }
                    self.row += 1;
                    self.phase = Phase::NextRow;
                }
                Phase::Paid { next } => {
                    if next >= self.state.row_buffer(self.row).len() {
                        // buffer spent before the search finished
                        self.pay_interval_override = true;
                    }
                    let exhausted = self.bfs_until_paid();
                    if exhausted {
                        self.phase = Phase::Drain { next };
                        continue;
                    }
                    let buf = self.state.row_buffer(self.row);
                    if next < buf.len() {
                        let v = buf[next];
                        self.marks[v] = 2;
                        self.state.meter.charge(2);
                        self.phase = Phase::Paid { next: next + 1 };
                        return Some((self.row, v));
                    }
                }
                Phase::Drain { next } => {
                    let buf = self.state.row_buffer(self.row);
                    if next < buf.len() {
                        let v = buf[next];
                        self.marks[v] = 2;
                        self.state.meter.charge(2);
                        self.phase = Phase::Drain { next: next + 1 };
                        return Some((self.row, v));
                    }
                    // sorted buffers hold the smallest answers: the sweep resumes above them
                    let above = if lazy { 0 } else { buf[buf.len() - 1] + 1 };
                    self.phase = Phase::Sweep { j: 0, above };
                }
                Phase::Sweep { mut j, above } => {
                    while j < n {
                        self.state.meter.charge(1);
                        let mark = self.marks[j];
                        self.marks[j] = 0;
                        j += 1;
                        if mark == 1 && j > above {
                            self.phase = Phase::Sweep { j, above };
                            return Some((self.row, j - 1));
                        }
                    }
                    self.row += 1;
                    self.phase = Phase::NextRow;
                }
            }
        }
    }
}

impl Enumerator for SublinearEnumerator {
    fn pull(&mut self) -> Pull {
        if self.stale || self.state.watch.is_stale() {
            self.stale = true;
            return Pull::Stale;
        }
        if self.finished {
            return Pull::Done;
        }
        match self.next() {
            Some((u, v)) => {
                self.state.meter.record_output();
                Pull::Pair(u, v)
            }
            None => {
                self.finished = true;
                self.state.meter.record_done();
                Pull::Done
            }
        }
    }

    fn order(&self) -> OrderContract {
        match self.state.mode {
            SublinearMode::SortedTree => OrderContract::Sorted,
            SublinearMode::LazyUnsorted => OrderContract::SemiSorted,
        }
    }

    fn meter(&self) -> &DelayMeter {
        &self.state.meter
    }
}
