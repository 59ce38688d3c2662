//! Enumerators for label-restricted closures, one- and two-step queries, and
//! top-level alternations of those.

use std::collections::VecDeque;
use std::sync::Arc;

use crate::enumerate::{Enumerator, OrderContract, Pull};
use crate::error::{Result, RpqError};
use crate::graph::{EpochWatch, GraphDatabase, SigmaGraph};
use crate::meter::DelayMeter;
use crate::query::{classify, QueryClass, RegexNode};

const UNSET: usize = usize::MAX;

fn label_slots(db: &GraphDatabase, labels: &[char]) -> Result<Vec<usize>> {
    labels.iter().map(|&c| db.alphabet().symbol_slot(c).ok_or(RpqError::UnknownSymbol(c))).collect()
}

/// Shared staleness and metering plumbing for the enumerators below.
struct Stream {
    watch: EpochWatch,
    meter: DelayMeter,
    finished: bool,
    stale: bool,
}

impl Stream {
    fn new(db: &GraphDatabase, meter: DelayMeter) -> Self {
        Stream { watch: db.watch(), meter, finished: false, stale: false }
    }

    fn pull_with(&mut self, next: impl FnOnce(&mut DelayMeter) -> Option<(usize, usize)>) -> Pull {
        if self.stale || self.watch.is_stale() {
            self.stale = true;
            return Pull::Stale;
        }
        if self.finished {
            return Pull::Done;
        }
        match next(&mut self.meter) {
            Some((u, v)) => {
                self.meter.record_output();
                Pull::Pair(u, v)
            }
            None => {
                self.finished = true;
                self.meter.record_done();
                Pull::Done
            }
        }
    }
}

/// Label-restricted (reflexive-)transitive closure, row by row.
///
/// Within a row every dequeued node is a fresh answer, so consecutive outputs
/// are separated by a single neighbourhood scan.
pub struct BtEnumerator {
    walk: BtWalk,
    stream: Stream,
}

struct BtWalk {
    graph: Arc<SigmaGraph>,
    slots: Vec<usize>,
    reflexive: bool,
    /// Rows with at least one answer.
    rows: Vec<usize>,
    next_row: usize,
    row: Option<usize>,
    /// Node whose neighbourhood is scanned at the start of the next pull.
    pending_scan: Option<usize>,
    queue: VecDeque<usize>,
    seen: Vec<usize>,
}

pub fn enum_bt(db: &GraphDatabase, labels: &[char], reflexive: bool) -> Result<BtEnumerator> {
    let slots = label_slots(db, labels)?;
    let g = db.shared_graph();
    let mut meter = DelayMeter::new();
    let rows: Vec<usize> = if reflexive {
        (0..g.node_count()).collect()
    } else {
        (0..g.node_count())
            .filter(|&u| {
                meter.charge(1 + slots.len() as u64);
                slots.iter().any(|&s| !g.successors(u, s).is_empty())
            })
            .collect()
    };
    meter.charge(rows.len() as u64);
    let walk = BtWalk {
        seen: vec![UNSET; g.node_count()],
        graph: g,
        slots,
        reflexive,
        rows,
        next_row: 0,
        row: None,
        pending_scan: None,
        queue: VecDeque::new(),
    };
    Ok(BtEnumerator { walk, stream: Stream::new(db, meter) })
}

impl BtWalk {
    fn scan(&mut self, x: usize, row: usize, meter: &mut DelayMeter) {
        for &slot in &self.slots {
            for &y in self.graph.successors(x, slot) {
                meter.charge(1);
                if self.seen[y] != row {
                    self.seen[y] = row;
                    self.queue.push_back(y);
                    meter.charge(2);
                }
            }
        }
    }

    fn next(&mut self, meter: &mut DelayMeter) -> Option<(usize, usize)> {
        loop {
            let Some(u) = self.row else {
                if self.next_row >= self.rows.len() {
                    return None;
                }
                let u = self.rows[self.next_row];
                self.next_row += 1;
                self.row = Some(u);
                meter.charge(1);
                if self.reflexive {
                    self.seen[u] = u;
                    self.pending_scan = Some(u);
                    meter.charge(1);
                    return Some((u, u));
                }
                // `u` stays unmarked: it is an answer only if a cycle returns to it
                self.scan(u, u, meter);
                continue;
            };
            if let Some(x) = self.pending_scan.take() {
                self.scan(x, u, meter);
            }
            meter.charge(1);
            match self.queue.pop_front() {
                Some(v) => {
                    self.pending_scan = Some(v);
                    return Some((u, v));
                }
                None => self.row = None,
            }
        }
    }
}

impl Enumerator for BtEnumerator {
    fn pull(&mut self) -> Pull {
        let walk = &mut self.walk;
        self.stream.pull_with(|m| walk.next(m))
    }

    fn order(&self) -> OrderContract {
        OrderContract::SemiSorted
    }

    fn meter(&self) -> &DelayMeter {
        &self.stream.meter
    }
}

/// Pairs joined by one arc carrying any of the labels.
pub struct SSingleEnumerator {
    pairs: Vec<(usize, usize)>,
    next: usize,
    stream: Stream,
}

pub fn enum_s_single(db: &GraphDatabase, labels: &[char]) -> Result<SSingleEnumerator> {
    let slots = label_slots(db, labels)?;
    let g = db.graph();
    let mut meter = DelayMeter::new();
    let mut seen = vec![UNSET; g.node_count()];
    let mut pairs = Vec::new();
    for u in 0..g.node_count() {
        meter.charge(1);
        for &s in &slots {
            for &v in g.successors(u, s) {
                meter.charge(1);
                if seen[v] != u {
                    seen[v] = u;
                    pairs.push((u, v));
                    meter.charge(2);
                }
            }
        }
    }
    Ok(SSingleEnumerator { pairs, next: 0, stream: Stream::new(db, meter) })
}

impl Enumerator for SSingleEnumerator {
    fn pull(&mut self) -> Pull {
        let (pairs, next) = (&self.pairs, &mut self.next);
        self.stream.pull_with(|m| {
            m.charge(1);
            let p = pairs.get(*next).copied();
            *next += 1;
            p
        })
    }

    fn order(&self) -> OrderContract {
        OrderContract::SemiSorted
    }

    fn meter(&self) -> &DelayMeter {
        &self.stream.meter
    }
}

/// Two-step queries `(x1|…)(y1|…)` over a trimmed three-layer graph.
///
/// Targets found while scanning middle nodes wait in a queue; one of them is
/// released after a middle scan once at least `Δ` middle entries have been
/// read since the previous output.
pub struct SDoubleEnumerator {
    walk: SDoubleWalk,
    stream: Stream,
}

struct SDoubleWalk {
    /// Per surviving first-layer node: distinct middle nodes.
    first: Vec<(usize, Vec<usize>)>,
    /// Per middle node: distinct targets (empty for trimmed nodes).
    second: Vec<Vec<usize>>,
    max_degree: u64,
    next_row: usize,
    row: Option<(usize, usize)>,
    middle_pos: usize,
    entries_since_output: u64,
    queue: VecDeque<usize>,
    queued: Vec<usize>,
    produced: Vec<usize>,
    empty_queue_events: u64,
}

pub fn enum_s_double(db: &GraphDatabase, xs: &[char], ys: &[char]) -> Result<SDoubleEnumerator> {
    let first_slots = label_slots(db, xs)?;
    let second_slots = label_slots(db, ys)?;
    let g = db.graph();
    let n = g.node_count();
    let mut meter = DelayMeter::new();

    let mut has_in = vec![false; n];
    for u in 0..n {
        for &s in &first_slots {
            for &m in g.successors(u, s) {
                has_in[m] = true;
                meter.charge(1);
            }
        }
    }
    let mut seen = vec![UNSET; n];
    let mut second: Vec<Vec<usize>> = vec![Vec::new(); n];
    for m in 0..n {
        meter.charge(1);
        if !has_in[m] {
            continue;
        }
        for &s in &second_slots {
            for &v in g.successors(m, s) {
                meter.charge(1);
                if seen[v] != m {
                    seen[v] = m;
                    second[m].push(v);
                }
            }
        }
    }
    seen.fill(UNSET);
    let mut first = Vec::new();
    for u in 0..n {
        meter.charge(1);
        let mut mids = Vec::new();
        for &s in &first_slots {
            for &m in g.successors(u, s) {
                meter.charge(1);
                if !second[m].is_empty() && seen[m] != u {
                    seen[m] = u;
                    mids.push(m);
                }
            }
        }
        if !mids.is_empty() {
            first.push((u, mids));
        }
    }
    let max_degree = db.degree_stats().max_degree.max(1) as u64;
    meter.charge(db.size() as u64);
    let walk = SDoubleWalk {
        first,
        second,
        max_degree,
        next_row: 0,
        row: None,
        middle_pos: 0,
        entries_since_output: 0,
        queue: VecDeque::new(),
        queued: vec![UNSET; n],
        produced: vec![UNSET; n],
        empty_queue_events: 0,
    };
    Ok(SDoubleEnumerator { walk, stream: Stream::new(db, meter) })
}

impl SDoubleWalk {
    fn release(&mut self, u: usize, meter: &mut DelayMeter) -> Option<(usize, usize)> {
        let v = self.queue.pop_front()?;
        self.produced[v] = u;
        self.entries_since_output = 0;
        meter.charge(2);
        Some((u, v))
    }

    fn next(&mut self, meter: &mut DelayMeter) -> Option<(usize, usize)> {
        loop {
            let Some((row_idx, u)) = self.row else {
                if self.next_row >= self.first.len() {
                    return None;
                }
                meter.charge(1);
                self.row = Some((self.next_row, self.first[self.next_row].0));
                self.next_row += 1;
                self.middle_pos = 0;
                self.entries_since_output = 0;
                continue;
            };
            let mids = &self.first[row_idx].1;
            if self.middle_pos < mids.len() {
                let m = mids[self.middle_pos];
                self.middle_pos += 1;
                meter.charge(1);
                for &v in &self.second[m] {
                    meter.charge(1);
                    self.entries_since_output += 1;
                    if self.queued[v] != u && self.produced[v] != u {
                        self.queued[v] = u;
                        self.queue.push_back(v);
                        meter.charge(2);
                    }
                }
                if self.entries_since_output >= self.max_degree {
                    if let Some(out) = self.release(u, meter) {
                        return Some(out);
                    }
                    self.empty_queue_events += 1;
                }
                continue;
            }
            meter.charge(1);
            match self.release(u, meter) {
                Some(out) => return Some(out),
                None => self.row = None,
            }
        }
    }
}

impl SDoubleEnumerator {
    /// Times the release point was reached with nothing queued.
    pub fn empty_queue_events(&self) -> u64 {
        self.walk.empty_queue_events
    }

    pub fn max_degree(&self) -> u64 {
        self.walk.max_degree
    }
}

impl Enumerator for SDoubleEnumerator {
    fn pull(&mut self) -> Pull {
        let walk = &mut self.walk;
        self.stream.pull_with(|m| walk.next(m))
    }

    fn order(&self) -> OrderContract {
        OrderContract::SemiSorted
    }

    fn meter(&self) -> &DelayMeter {
        &self.stream.meter
    }
}

/// Duplicate-free union of semi-sorted streams over the same node set.
///
/// Phases follow the left component. In each round every sub-enumerator
/// positioned in the current phase hands over its right component, which is
/// staged unless already emitted in this phase; then one staged element is
/// emitted.
pub struct PhaseMerger {
    subs: Vec<Box<dyn Enumerator>>,
    node_count: usize,
    /// Phase of each sub's pending pair, shifted by one; `node_count + 1` once exhausted.
    left: Vec<usize>,
    right: Vec<usize>,
    sub_steps: Vec<u64>,
    /// Current phase, shifted by one; 0 before the first pull.
    phase: usize,
    staged_flag: Vec<bool>,
    staged: Vec<usize>,
    /// Phase in which each node was last emitted.
    emitted_in: Vec<usize>,
    empty_stage_events: u64,
    meter: DelayMeter,
    finished: bool,
    stale: bool,
}

pub fn enum_disjunction(subs: Vec<Box<dyn Enumerator>>, node_count: usize) -> PhaseMerger {
    let k = subs.len();
    PhaseMerger {
        subs,
        node_count,
        left: vec![0; k],
        right: vec![0; k],
        sub_steps: vec![0; k],
        phase: 0,
        staged_flag: vec![false; node_count],
        staged: Vec::new(),
        emitted_in: vec![0; node_count],
        empty_stage_events: 0,
        meter: DelayMeter::new(),
        finished: false,
        stale: false,
    }
}

impl PhaseMerger {
    fn done_phase(&self) -> usize {
        self.node_count + 1
    }

    /// Pulls the next pair of sub `k`; `false` on staleness.
    fn advance(&mut self, k: usize) -> bool {
        let pulled = self.subs[k].pull();
        let total = self.subs[k].meter().total_steps();
        self.meter.charge(total - self.sub_steps[k] + 1);
        self.sub_steps[k] = total;
        match pulled {
            Pull::Pair(u, v) => {
                debug_assert!(u + 1 >= self.phase, "sub-enumerator is not semi-sorted");
                self.left[k] = u + 1;
                self.right[k] = v;
                true
            }
            Pull::Done => {
                self.left[k] = self.done_phase();
                true
            }
            Pull::Stale => false,
        }
    }

    fn min_phase(&mut self) -> usize {
        self.meter.charge(self.left.len() as u64);
        self.left.iter().copied().min().unwrap_or(self.done_phase())
    }

    fn next(&mut self) -> std::result::Result<Option<(usize, usize)>, ()> {
        if self.phase == 0 {
            for k in 0..self.subs.len() {
                if !self.advance(k) {
                    return Err(());
                }
            }
            self.phase = self.min_phase();
        }
        loop {
            if self.phase == self.done_phase() {
                return Ok(None);
            }
            let c = self.phase;
            let mut active = false;
            for k in 0..self.subs.len() {
                self.meter.charge(1);
                if self.left[k] != c {
                    continue;
                }
                active = true;
                let v = self.right[k];
                if self.emitted_in[v] != c && !self.staged_flag[v] {
                    self.staged_flag[v] = true;
                    self.staged.push(v);
                    self.meter.charge(2);
                }
                if !self.advance(k) {
                    return Err(());
                }
            }
            if let Some(v) = self.staged.pop() {
                self.staged_flag[v] = false;
                self.emitted_in[v] = c;
                self.meter.charge(2);
                return Ok(Some((c - 1, v)));
            }
            if active {
                self.empty_stage_events += 1;
            } else {
                self.phase = self.min_phase();
            }
        }
    }

    /// Rounds that reached the emission step with nothing staged although some
    /// sub-enumerator was still in the current phase.
    pub fn empty_stage_events(&self) -> u64 {
        self.empty_stage_events
    }
}

impl Enumerator for PhaseMerger {
    fn pull(&mut self) -> Pull {
        if self.stale {
            return Pull::Stale;
        }
        if self.finished {
            return Pull::Done;
        }
        match self.next() {
            Err(()) => {
                self.stale = true;
                Pull::Stale
            }
            Ok(Some((u, v))) => {
                self.meter.record_output();
                Pull::Pair(u, v)
            }
            Ok(None) => {
                self.finished = true;
                self.meter.record_done();
                Pull::Done
            }
        }
    }

    fn order(&self) -> OrderContract {
        OrderContract::SemiSorted
    }

    fn meter(&self) -> &DelayMeter {
        &self.meter
    }
}

fn member_enumerator(db: &GraphDatabase, class: &QueryClass) -> Result<Box<dyn Enumerator>> {
    Ok(match class {
        QueryClass::Bt { labels, reflexive } => Box::new(enum_bt(db, labels, *reflexive)?),
        QueryClass::SSingle { labels } => Box::new(enum_s_single(db, labels)?),
        QueryClass::SDouble { first, second } => Box::new(enum_s_double(db, first, second)?),
        QueryClass::Disjunction(members) => {
            let subs = members.iter().map(|m| member_enumerator(db, m)).collect::<Result<Vec<_>>>()?;
            Box::new(enum_disjunction(subs, db.node_count()))
        }
        QueryClass::General => return Err(RpqError::UnsupportedClass),
    })
}

/// Picks the enumerator matching the query's class.
pub fn enum_restricted(db: &GraphDatabase, query: &RegexNode) -> Result<Box<dyn Enumerator>> {
    for c in query.symbols() {
        if !db.alphabet().contains(c) {
            return Err(RpqError::UnknownSymbol(c));
        }
    }
    member_enumerator(db, &classify(query))
}
