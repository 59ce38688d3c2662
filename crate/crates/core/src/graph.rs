//! Edge-labelled multigraphs (Σ-graphs), graph databases and the edge-list
//! text format.
//!
//! A [`SigmaGraph`] stores, for every node `u` and every label slot `x`
//! (slot 0 is ε, slot `k + 1` is the `k`-th alphabet symbol), the ordered
//! list of `x`-successors of `u`. The same type represents databases,
//! query automata and product graphs.

use std::collections::{HashMap, HashSet};
use std::fmt;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Arc;

use crate::error::{Result, RpqError};

/// Character used for ε in query strings and debug dumps.
pub const EPSILON_MARKER: char = '%';

/// Characters that have a meaning in the query grammar and therefore cannot be symbols.
pub const RESERVED_CHARS: &[char] = &['|', '(', ')', '+', '*', '%'];

/// Slot index of ε in every adjacency table.
pub const EPSILON_SLOT: usize = 0;

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Label {
    Epsilon,
    Symbol(char),
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Label::Epsilon => write!(f, "{EPSILON_MARKER}"),
            Label::Symbol(c) => write!(f, "{c}"),
        }
    }
}

/// A finite alphabet Σ in declaration order. ε is never a member.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Alphabet {
    symbols: Vec<char>,
}

impl Alphabet {
    pub fn new(symbols: impl IntoIterator<Item = char>) -> Result<Self> {
        let mut out: Vec<char> = Vec::new();
        for c in symbols {
            if c.is_whitespace() || RESERVED_CHARS.contains(&c) {
                return Err(RpqError::InvalidAlphabet(format!("'{c}' cannot be a symbol")));
            }
            if out.contains(&c) {
                return Err(RpqError::InvalidAlphabet(format!("'{c}' declared twice")));
            }
            out.push(c);
        }
        Ok(Alphabet { symbols: out })
    }

    pub fn symbols(&self) -> &[char] {
        &self.symbols
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    /// Number of adjacency slots per node: one per symbol plus ε.
    pub fn slot_count(&self) -> usize {
        self.symbols.len() + 1
    }

    pub fn contains(&self, c: char) -> bool {
        self.symbols.contains(&c)
    }

    pub fn symbol_slot(&self, c: char) -> Option<usize> {
        self.symbols.iter().position(|&s| s == c).map(|i| i + 1)
    }

    pub fn slot(&self, label: Label) -> Option<usize> {
        match label {
            Label::Epsilon => Some(EPSILON_SLOT),
            Label::Symbol(c) => self.symbol_slot(c),
        }
    }

    pub fn label(&self, slot: usize) -> Label {
        if slot == EPSILON_SLOT {
            Label::Epsilon
        } else {
            Label::Symbol(self.symbols[slot - 1])
        }
    }

    /// The alphabet extended by one fresh symbol.
    pub fn with_symbol(&self, c: char) -> Result<Alphabet> {
        Alphabet::new(self.symbols.iter().copied().chain(std::iter::once(c)))
    }
}

/// Directed edge-labelled multigraph over Σ ∪ {ε} in adjacency-list form.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SigmaGraph {
    alphabet: Alphabet,
    adj: Vec<Vec<Vec<usize>>>,
    in_degree: Vec<usize>,
    arc_count: usize,
}

impl SigmaGraph {
    pub fn new(alphabet: Alphabet, node_count: usize) -> Self {
        let slots = alphabet.slot_count();
        SigmaGraph {
            alphabet,
            adj: vec![vec![Vec::new(); slots]; node_count],
            in_degree: vec![0; node_count],
            arc_count: 0,
        }
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn node_count(&self) -> usize {
        self.adj.len()
    }

    pub fn arc_count(&self) -> usize {
        self.arc_count
    }

    /// |G| = max(|V|, |E|).
    pub fn size(&self) -> usize {
        self.node_count().max(self.arc_count)
    }

    pub fn add_node(&mut self) -> usize {
        self.adj.push(vec![Vec::new(); self.alphabet.slot_count()]);
        self.in_degree.push(0);
        self.adj.len() - 1
    }

    /// Appends `v` to the slot list of `u` without a duplicate check.
    pub(crate) fn push_arc(&mut self, u: usize, slot: usize, v: usize) {
        self.adj[u][slot].push(v);
        self.in_degree[v] += 1;
        self.arc_count += 1;
    }

    /// Inserts `(u, label, v)`; returns `false` if the arc was already present.
    pub fn add_arc(&mut self, u: usize, label: Label, v: usize) -> Result<bool> {
        let slot = self.slot_of(label)?;
        self.check_node(u)?;
        self.check_node(v)?;
        if self.adj[u][slot].contains(&v) {
            return Ok(false);
        }
        self.push_arc(u, slot, v);
        Ok(true)
    }

    /// Removes `(u, label, v)`; returns `false` if no such arc exists.
    pub fn remove_arc(&mut self, u: usize, label: Label, v: usize) -> Result<bool> {
        let slot = self.slot_of(label)?;
        self.check_node(u)?;
        self.check_node(v)?;
        let list = &mut self.adj[u][slot];
        match list.iter().position(|&w| w == v) {
            Some(pos) => {
                list.remove(pos);
                self.in_degree[v] -= 1;
                self.arc_count -= 1;
                Ok(true)
            }
            None => Ok(false),
        }
    }

    /// Removes a node without incident arcs; ids above it shift down by one.
    pub(crate) fn remove_isolated_node(&mut self, k: usize) {
        debug_assert!(self.is_isolated(k));
        self.adj.remove(k);
        self.in_degree.remove(k);
        for lists in &mut self.adj {
            for list in lists.iter_mut() {
                for w in list.iter_mut() {
                    if *w > k {
                        *w -= 1;
                    }
                }
            }
        }
    }

    pub fn is_isolated(&self, u: usize) -> bool {
        self.in_degree[u] == 0 && self.adj[u].iter().all(Vec::is_empty)
    }

    pub fn has_arc(&self, u: usize, label: Label, v: usize) -> bool {
        match self.alphabet.slot(label) {
            Some(slot) => u < self.adj.len() && self.adj[u][slot].contains(&v),
            None => false,
        }
    }

    /// E_x(u) for the given slot.
    pub fn successors(&self, u: usize, slot: usize) -> &[usize] {
        &self.adj[u][slot]
    }

    /// All slot lists of `u`, indexed by slot.
    pub fn slot_lists(&self, u: usize) -> &[Vec<usize>] {
        &self.adj[u]
    }

    /// Successors of `u` in the underlying unlabelled graph (with repetitions
    /// when several labels lead to the same node).
    pub fn all_successors(&self, u: usize) -> impl Iterator<Item = usize> + '_ {
        self.adj[u].iter().flat_map(|l| l.iter().copied())
    }

    pub fn out_entries(&self, u: usize) -> usize {
        self.adj[u].iter().map(Vec::len).sum()
    }

    pub fn in_degree(&self, u: usize) -> usize {
        self.in_degree[u]
    }

    pub fn has_epsilon_arcs(&self) -> bool {
        self.adj.iter().any(|l| !l[EPSILON_SLOT].is_empty())
    }

    /// All arcs in node order, then slot order, then list order.
    pub fn arcs(&self) -> impl Iterator<Item = (usize, Label, usize)> + '_ {
        self.adj.iter().enumerate().flat_map(move |(u, lists)| {
            lists.iter().enumerate().flat_map(move |(slot, list)| {
                let label = self.alphabet.label(slot);
                list.iter().map(move |&v| (u, label, v))
            })
        })
    }

    fn slot_of(&self, label: Label) -> Result<usize> {
        self.alphabet.slot(label).ok_or(match label {
            Label::Symbol(c) => RpqError::UnknownSymbol(c),
            Label::Epsilon => RpqError::UnknownSymbol(EPSILON_MARKER),
        })
    }

    fn check_node(&self, u: usize) -> Result<()> {
        if u < self.adj.len() {
            Ok(())
        } else {
            Err(RpqError::UnknownNode(u.to_string()))
        }
    }
}

/// G^R: every arc `(u, x, v)` becomes `(v, x, u)`; one pass over all lists.
pub fn reverse(g: &SigmaGraph) -> SigmaGraph {
    let mut r = SigmaGraph::new(g.alphabet.clone(), g.node_count());
    for (u, lists) in g.adj.iter().enumerate() {
        for (slot, list) in lists.iter().enumerate() {
            for &v in list {
                r.push_arc(v, slot, u);
            }
        }
    }
    r
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct DegreeStats {
    /// Δ(D): the largest number of distinct successors of a node.
    pub max_degree: usize,
    /// Σ_u degree(u); together with `node_count` this is the exact average degree.
    pub degree_sum: usize,
    pub node_count: usize,
    /// Number of labelled arcs.
    pub arc_count: usize,
}

impl DegreeStats {
    pub fn avg_degree(&self) -> f64 {
        if self.node_count == 0 {
            0.0
        } else {
            self.degree_sum as f64 / self.node_count as f64
        }
    }

    /// ⌈d_avg⌉ computed exactly.
    pub fn avg_degree_ceil(&self) -> usize {
        if self.node_count == 0 {
            0
        } else {
            self.degree_sum.div_ceil(self.node_count)
        }
    }
}

/// degree(u) = |∪_x E_x(u)|, i.e. distinct successors over all labels.
pub fn degree_stats(g: &SigmaGraph) -> DegreeStats {
    let n = g.node_count();
    let mut seen = vec![usize::MAX; n];
    let mut max_degree = 0;
    let mut degree_sum = 0;
    for u in 0..n {
        let mut d = 0;
        for v in g.all_successors(u) {
            if seen[v] != u {
                seen[v] = u;
                d += 1;
            }
        }
        max_degree = max_degree.max(d);
        degree_sum += d;
    }
    DegreeStats { max_degree, degree_sum, node_count: n, arc_count: g.arc_count() }
}

/// A single database modification.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Update {
    InsertArc { src: String, label: char, dst: String },
    DeleteArc { src: String, label: char, dst: String },
    AddNode(String),
    DeleteNode(String),
}

impl fmt::Display for Update {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Update::InsertArc { src, label, dst } => write!(f, "+edge {src} {label} {dst}"),
            Update::DeleteArc { src, label, dst } => write!(f, "-edge {src} {label} {dst}"),
            Update::AddNode(u) => write!(f, "+node {u}"),
            Update::DeleteNode(u) => write!(f, "-node {u}"),
        }
    }
}

/// Observes a database's modification counter.
#[derive(Clone, Debug)]
pub struct EpochWatch {
    epoch: Arc<AtomicU64>,
    seen: u64,
}

impl EpochWatch {
    pub fn is_stale(&self) -> bool {
        self.epoch.load(Ordering::Acquire) != self.seen
    }
}

/// Maps well-formed ids `0..n` (printed as `1..n`) back to the original names.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Isomorphism {
    pub to_original: Vec<String>,
}

impl Isomorphism {
    pub fn original(&self, i: usize) -> &str {
        &self.to_original[i]
    }
}

/// A Σ-graph without ε-arcs whose node sequence defines the node order.
///
/// Nodes are addressed internally by their dense position `0..n`; names are
/// kept for the file boundary. The graph is shared copy-on-write with live
/// enumerators, and every mutation bumps an epoch so that those enumerators
/// report staleness instead of reading a changed database.
#[derive(Debug)]
pub struct GraphDatabase {
    graph: Arc<SigmaGraph>,
    names: Vec<String>,
    index: HashMap<String, usize>,
    epoch: Arc<AtomicU64>,
}

impl Clone for GraphDatabase {
    fn clone(&self) -> Self {
        GraphDatabase {
            graph: Arc::clone(&self.graph),
            names: self.names.clone(),
            index: self.index.clone(),
            epoch: Arc::new(AtomicU64::new(0)),
        }
    }
}

impl PartialEq for GraphDatabase {
    fn eq(&self, other: &Self) -> bool {
        self.names == other.names && *self.graph == *other.graph
    }
}

impl GraphDatabase {
    pub fn new(alphabet: Alphabet) -> Self {
        GraphDatabase {
            graph: Arc::new(SigmaGraph::new(alphabet, 0)),
            names: Vec::new(),
            index: HashMap::new(),
            epoch: Arc::new(AtomicU64::new(0)),
        }
    }

    /// Convenience constructor; duplicate arcs are dropped.
    pub fn from_arcs(alphabet: &str, nodes: &[&str], arcs: &[(&str, char, &str)]) -> Result<Self> {
        let mut db = GraphDatabase::new(Alphabet::new(alphabet.chars())?);
        for &n in nodes {
            db.add_node(n)?;
        }
        for &(u, x, v) in arcs {
            db.add_arc(u, x, v)?;
        }
        Ok(db)
    }

    pub fn graph(&self) -> &SigmaGraph {
        &self.graph
    }

    pub fn shared_graph(&self) -> Arc<SigmaGraph> {
        Arc::clone(&self.graph)
    }

    pub fn alphabet(&self) -> &Alphabet {
        self.graph.alphabet()
    }

    pub fn node_count(&self) -> usize {
        self.names.len()
    }

    pub fn arc_count(&self) -> usize {
        self.graph.arc_count()
    }

    pub fn size(&self) -> usize {
        self.graph.size()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn name(&self, i: usize) -> &str {
        &self.names[i]
    }

    pub fn node_index(&self, name: &str) -> Result<usize> {
        self.index.get(name).copied().ok_or_else(|| RpqError::UnknownNode(name.to_string()))
    }

    pub fn watch(&self) -> EpochWatch {
        EpochWatch { epoch: Arc::clone(&self.epoch), seen: self.epoch.load(Ordering::Acquire) }
    }

    fn touch(&mut self) -> &mut SigmaGraph {
        self.epoch.fetch_add(1, Ordering::AcqRel);
        Arc::make_mut(&mut self.graph)
    }

    pub fn add_node(&mut self, name: &str) -> Result<usize> {
        if name.is_empty() || name.chars().any(char::is_whitespace) {
            return Err(RpqError::InvalidInstance(format!("bad node name '{name}'")));
        }
        if self.index.contains_key(name) {
            return Err(RpqError::DuplicateNode(name.to_string()));
        }
        let id = self.touch().add_node();
        self.names.push(name.to_string());
        self.index.insert(name.to_string(), id);
        Ok(id)
    }

    /// Inserts an arc; returns `false` if it was already present.
    pub fn add_arc(&mut self, src: &str, label: char, dst: &str) -> Result<bool> {
        let u = self.node_index(src)?;
        let v = self.node_index(dst)?;
        if !self.alphabet().contains(label) {
            return Err(RpqError::UnknownSymbol(label));
        }
        if self.graph.has_arc(u, Label::Symbol(label), v) {
            return Ok(false);
        }
        self.touch().add_arc(u, Label::Symbol(label), v)
    }

    pub fn add_arc_ids(&mut self, u: usize, label: char, v: usize) -> Result<bool> {
        if !self.alphabet().contains(label) {
            return Err(RpqError::UnknownSymbol(label));
        }
        if self.graph.has_arc(u, Label::Symbol(label), v) {
            return Ok(false);
        }
        self.touch().add_arc(u, Label::Symbol(label), v)
    }

    pub fn remove_arc(&mut self, src: &str, label: char, dst: &str) -> Result<()> {
        let u = self.node_index(src)?;
        let v = self.node_index(dst)?;
        if !self.alphabet().contains(label) {
            return Err(RpqError::UnknownSymbol(label));
        }
        if !self.graph.has_arc(u, Label::Symbol(label), v) {
            return Err(RpqError::MissingArc(src.to_string(), label, dst.to_string()));
        }
        self.touch().remove_arc(u, Label::Symbol(label), v)?;
        Ok(())
    }

    pub fn remove_isolated_node(&mut self, name: &str) -> Result<()> {
        let k = self.node_index(name)?;
        if !self.graph.is_isolated(k) {
            return Err(RpqError::NodeNotIsolated(name.to_string()));
        }
        self.touch().remove_isolated_node(k);
        self.names.remove(k);
        self.index.remove(name);
        for (i, n) in self.names.iter().enumerate().skip(k) {
            self.index.insert(n.clone(), i);
        }
        Ok(())
    }

    /// Applies one update in place. Inserting an existing arc is a no-op.
    pub fn apply_update(&mut self, update: &Update) -> Result<()> {
        match update {
            Update::InsertArc { src, label, dst } => self.add_arc(src, *label, dst).map(|_| ()),
            Update::DeleteArc { src, label, dst } => self.remove_arc(src, *label, dst),
            Update::AddNode(u) => self.add_node(u).map(|_| ()),
            Update::DeleteNode(u) => self.remove_isolated_node(u),
        }
    }

    pub fn degree_stats(&self) -> DegreeStats {
        degree_stats(&self.graph)
    }

    /// The database with all arcs reversed; names and order are unchanged.
    pub fn reversed(&self) -> GraphDatabase {
        GraphDatabase {
            graph: Arc::new(reverse(&self.graph)),
            names: self.names.clone(),
            index: self.index.clone(),
            epoch: Arc::new(AtomicU64::new(0)),
        }
    }

    /// Relabels nodes to `1..n` in node order and returns the map back to the old names.
    pub fn well_form(&self) -> (GraphDatabase, Isomorphism) {
        let names: Vec<String> = (1..=self.node_count()).map(|i| i.to_string()).collect();
        let index = names.iter().enumerate().map(|(i, n)| (n.clone(), i)).collect();
        let db = GraphDatabase {
            graph: Arc::new((*self.graph).clone()),
            names,
            index,
            epoch: Arc::new(AtomicU64::new(0)),
        };
        (db, Isomorphism { to_original: self.names.clone() })
    }

    /// Adds a symbol to the alphabet, keeping every arc.
    pub fn extend_alphabet(&self, c: char) -> Result<GraphDatabase> {
        let alphabet = self.alphabet().with_symbol(c)?;
        let mut g = SigmaGraph::new(alphabet.clone(), self.node_count());
        for (u, label, v) in self.graph.arcs() {
            let slot = alphabet.slot(label).expect("old symbols are kept");
            g.push_arc(u, slot, v);
        }
        Ok(GraphDatabase {
            graph: Arc::new(g),
            names: self.names.clone(),
            index: self.index.clone(),
            epoch: Arc::new(AtomicU64::new(0)),
        })
    }

    /// Parses the edge-list text format.
    pub fn load_edge_list(text: &str) -> Result<GraphDatabase> {
        let mut alphabet: Option<Alphabet> = None;
        let mut nodes: Vec<(usize, &str)> = Vec::new();
        let mut edges: Vec<(usize, &str, &str, &str)> = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line_no = i + 1;
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let toks: Vec<&str> = line.split_whitespace().collect();
            let bad = |message: &str| RpqError::Format { line: line_no, message: message.to_string() };
            match toks[0] {
                "alphabet" => {
                    if alphabet.is_some() {
                        return Err(bad("second alphabet line"));
                    }
                    let mut syms = Vec::new();
                    for t in &toks[1..] {
                        let mut cs = t.chars();
                        match (cs.next(), cs.next()) {
                            (Some(c), None) => syms.push(c),
                            _ => return Err(bad(&format!("symbol '{t}' is not a single character"))),
                        }
                    }
                    alphabet = Some(Alphabet::new(syms).map_err(|e| bad(&e.to_string()))?);
                }
                "node" | "edge" if alphabet.is_none() => {
                    return Err(bad("the alphabet line must come first"));
                }
                "node" => {
                    if toks.len() != 2 {
                        return Err(bad("expected `node <id>`"));
                    }
                    nodes.push((line_no, toks[1]));
                }
                "edge" => {
                    if toks.len() != 4 {
                        return Err(bad("expected `edge <src> <label> <dst>`"));
                    }
                    edges.push((line_no, toks[1], toks[2], toks[3]));
                }
                other => return Err(bad(&format!("unknown directive '{other}'"))),
            }
        }
        let alphabet = alphabet.ok_or(RpqError::Format { line: 0, message: "missing alphabet line".into() })?;
        let mut db = GraphDatabase::new(alphabet);
        for (line, name) in nodes {
            db.add_node(name).map_err(|e| RpqError::Format { line, message: e.to_string() })?;
        }
        let mut seen: HashSet<(usize, usize, usize)> = HashSet::new();
        let mut g = (*db.graph).clone();
        for (line, src, label, dst) in edges {
            let err = |message: String| RpqError::Format { line, message };
            let mut cs = label.chars();
            let c = match (cs.next(), cs.next()) {
                (Some(c), None) => c,
                _ => return Err(err(format!("label '{label}' is not a single character"))),
            };
            let slot = db.alphabet().symbol_slot(c).ok_or_else(|| err(format!("undeclared label '{c}'")))?;
            let u = db.node_index(src).map_err(|_| err(format!("undeclared node '{src}'")))?;
            let v = db.node_index(dst).map_err(|_| err(format!("undeclared node '{dst}'")))?;
            if seen.insert((u, slot, v)) {
                g.push_arc(u, slot, v);
            }
        }
        db.graph = Arc::new(g);
        Ok(db)
    }

    /// Writes the normalized edge-list form: alphabet, nodes in order, then
    /// arcs grouped by source and label.
    pub fn save_edge_list(&self) -> String {
        let mut out = String::from("alphabet");
        for c in self.alphabet().symbols() {
            out.push(' ');
            out.push(*c);
        }
        out.push('\n');
        for n in &self.names {
            out.push_str("node ");
            out.push_str(n);
            out.push('\n');
        }
        for (u, label, v) in self.graph.arcs() {
            out.push_str(&format!("edge {} {} {}\n", self.names[u], label, self.names[v]));
        }
        out
    }

    /// Formats index pairs as `u<TAB>v` lines using node names.
    pub fn format_pairs(&self, pairs: &[(usize, usize)]) -> String {
        let mut out = String::new();
        for &(u, v) in pairs {
            out.push_str(&self.names[u]);
            out.push('\t');
            out.push_str(&self.names[v]);
            out.push('\n');
        }
        out
    }
}
