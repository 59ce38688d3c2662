//! Database and query constructions together with their decoders.

use crate::enumerate::collect_pairs;
use crate::enumerate::DynamicBaseline;
use crate::error::{Result, RpqError};
use crate::graph::{Alphabet, GraphDatabase, Update};
use crate::query::RegexNode;
use crate::script::ScriptLine;

use super::instances::{BmmInstance, BoolMatrix, OmvInstance, OvInstance, SparseBmmInstance, TriInstance};

/// A Check instance: is `(source, target)` in `q(D)`?
#[derive(Clone, Debug)]
pub struct CheckReduction {
    pub db: GraphDatabase,
    pub query: RegexNode,
    pub source: usize,
    pub target: usize,
}

/// A Boole instance: is `q(D)` nonempty?
#[derive(Clone, Debug)]
pub struct BooleReduction {
    pub db: GraphDatabase,
    pub query: RegexNode,
}

/// An Eval or Count instance over a three-layer database with `rows` left
/// nodes named `r<i>` and `cols` right nodes named `c<j>`.
#[derive(Clone, Debug)]
pub struct LayeredReduction {
    pub db: GraphDatabase,
    pub query: RegexNode,
    pub rows: usize,
    pub cols: usize,
}

/// A start database plus an update script; each `!enum` is one round.
#[derive(Clone, Debug)]
pub struct DynamicReduction {
    pub initial: GraphDatabase,
    pub query: RegexNode,
    pub script: Vec<ScriptLine>,
}

fn bit(b: bool) -> char {
    if b {
        '1'
    } else {
        '0'
    }
}

/// Chains `v<i>_0 … v<i>_d` per A-vector: a 0-arc at every position and a
/// 1-arc where the A-vector has a 0. The query spells the B-vectors between
/// `#` markers, so `s` reaches `t` exactly through a chain orthogonal to some
/// B-vector.
pub fn ov_to_check(inst: &OvInstance) -> Result<CheckReduction> {
    inst.validate()?;
    let d = inst.dim();
    let mut db = GraphDatabase::new(Alphabet::new(['0', '1', '#'])?);
    let s = db.add_node("s")?;
    let t = db.add_node("t")?;
    for (i, a) in inst.a.iter().enumerate() {
        let chain: Vec<usize> =
            (0..=d).map(|j| db.add_node(&format!("v{}_{}", i + 1, j))).collect::<Result<_>>()?;
        db.add_arc_ids(s, '#', chain[0])?;
        for j in 0..d {
            db.add_arc_ids(chain[j], '0', chain[j + 1])?;
            if !a[j] {
                db.add_arc_ids(chain[j], '1', chain[j + 1])?;
            }
        }
        db.add_arc_ids(chain[d], '#', t)?;
    }
    let words = inst.b.iter().map(|b| RegexNode::word(&b.iter().map(|&x| bit(x)).collect::<String>()));
    let body = RegexNode::alt_all(words).expect("validated nonempty");
    let query = RegexNode::concat_all([RegexNode::lit('#'), body, RegexNode::lit('#')]).expect("three parts");
    Ok(CheckReduction { db, query, source: s, target: t })
}

fn layer_name(prefix: char, i: usize, layer: usize) -> String {
    format!("{prefix}{}_{layer}", i + 1)
}

/// Layered copy of the graph with entry chain `s1…sn`, exit chain `t1…tn` and
/// the query `# a^(n+4) #`: a path of that length must leave and re-enter
/// the layers at the same vertex, i.e. close a triangle.
pub fn tri_to_boole(inst: &TriInstance) -> Result<BooleReduction> {
    let n = inst.n;
    if n == 0 {
        return Err(RpqError::InvalidInstance("triangle instance needs a vertex".into()));
    }
    let mut db = GraphDatabase::new(Alphabet::new(['a', '#'])?);
    let entry = db.add_node("s0")?;
    let exit = db.add_node("t0")?;
    let s: Vec<usize> = (1..=n).map(|j| db.add_node(&format!("s{j}"))).collect::<Result<_>>()?;
    let t: Vec<usize> = (1..=n).map(|j| db.add_node(&format!("t{j}"))).collect::<Result<_>>()?;
    let copies = layered_copies(&mut db, inst)?;
    db.add_arc_ids(entry, '#', s[0])?;
    db.add_arc_ids(t[n - 1], '#', exit)?;
    for j in 0..n - 1 {
        db.add_arc_ids(s[j], 'a', s[j + 1])?;
        db.add_arc_ids(t[j], 'a', t[j + 1])?;
    }
    for j in 0..n {
        db.add_arc_ids(s[j], 'a', copies[j][0])?;
        db.add_arc_ids(copies[j][3], 'a', t[j])?;
    }
    let query = RegexNode::concat_all(
        std::iter::once(RegexNode::lit('#'))
            .chain(std::iter::repeat_with(|| RegexNode::lit('a')).take(n + 4))
            .chain(std::iter::once(RegexNode::lit('#'))),
    )
    .expect("nonempty");
    Ok(BooleReduction { db, query })
}

/// Four copies `x<u>_0 … x<u>_3` of every vertex with an `a`-arc between
/// consecutive layers for each edge direction.
fn layered_copies(db: &mut GraphDatabase, inst: &TriInstance) -> Result<Vec<[usize; 4]>> {
    let mut copies = Vec::with_capacity(inst.n);
    for u in 0..inst.n {
        let mut ids = [0; 4];
        for (layer, id) in ids.iter_mut().enumerate() {
            *id = db.add_node(&layer_name('x', u, layer))?;
        }
        copies.push(ids);
    }
    for &(u, v) in &inst.edges {
        for layer in 0..3 {
            db.add_arc_ids(copies[u][layer], 'a', copies[v][layer + 1])?;
            db.add_arc_ids(copies[v][layer], 'a', copies[u][layer + 1])?;
        }
    }
    Ok(copies)
}

fn aa() -> RegexNode {
    RegexNode::word("aa")
}

/// Three layers `r<i>`, `m<k>`, `c<j>`; `left` holds the 1-entries of a
/// `rows × mid` matrix, `right` those of a `mid × cols` one. In sparse mode
/// only nodes touched by some entry are created.
fn layered(left: &[(usize, usize)], right: &[(usize, usize)], rows: usize, mid: usize, cols: usize, sparse: bool) -> Result<LayeredReduction> {
    let mut db = GraphDatabase::new(Alphabet::new(['a'])?);
    let mut keep_r = vec![!sparse; rows];
    let mut keep_m = vec![!sparse; mid];
    let mut keep_c = vec![!sparse; cols];
    for &(i, k) in left {
        keep_r[i] = true;
        keep_m[k] = true;
    }
    for &(k, j) in right {
        keep_m[k] = true;
        keep_c[j] = true;
    }
    let mut add = |prefix: char, keep: &[bool]| -> Result<Vec<usize>> {
        let mut ids = vec![usize::MAX; keep.len()];
        for (i, &k) in keep.iter().enumerate() {
            if k {
                ids[i] = db.add_node(&format!("{prefix}{}", i + 1))?;
            }
        }
        Ok(ids)
    };
    let r = add('r', &keep_r)?;
    let m = add('m', &keep_m)?;
    let c = add('c', &keep_c)?;
    for &(i, k) in left {
        db.add_arc_ids(r[i], 'a', m[k])?;
    }
    for &(k, j) in right {
        db.add_arc_ids(m[k], 'a', c[j])?;
    }
    Ok(LayeredReduction { db, query: aa(), rows, cols })
}

fn entries(m: &BoolMatrix) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    for (i, row) in m.iter().enumerate() {
        for (j, &x) in row.iter().enumerate() {
            if x {
                out.push((i, j));
            }
        }
    }
    out
}

/// `(r<i>, c<j>)` is an answer of `aa` iff `(A × B)[i, j] = 1`.
pub fn bmm_to_eval(inst: &BmmInstance) -> Result<LayeredReduction> {
    let n = inst.n();
    layered(&entries(&inst.a), &entries(&inst.b), n, n, n, false)
}

/// As [`bmm_to_eval`], but only nodes touched by some 1-entry exist.
pub fn sbmm_to_eval(inst: &SparseBmmInstance) -> Result<LayeredReduction> {
    inst.validate()?;
    layered(&inst.a, &inst.b, inst.n, inst.n, inst.n, true)
}

/// Rows are the A-vectors and columns the B-vectors, so a pair is missing
/// from the answer exactly when the two vectors are orthogonal.
pub fn ov_to_count(inst: &OvInstance) -> Result<LayeredReduction> {
    inst.validate()?;
    let n = inst.n();
    let d = inst.dim();
    let left = entries(&inst.a);
    let right: Vec<(usize, usize)> = entries(&inst.b).into_iter().map(|(j, k)| (k, j)).collect();
    layered(&left, &right, n, d, n, false)
}

fn parse_index(name: &str, prefix: char) -> Option<usize> {
    let rest = name.strip_prefix(prefix)?;
    rest.parse::<usize>().ok().filter(|&i| i >= 1).map(|i| i - 1)
}

/// Reads the product matrix back from `(r<i>, c<j>)` answer pairs.
pub fn decode_matrix(red: &LayeredReduction, pairs: &[(usize, usize)]) -> Result<BoolMatrix> {
    let mut out = vec![vec![false; red.cols]; red.rows];
    for &(u, v) in pairs {
        let (su, sv) = (red.db.name(u), red.db.name(v));
        match (parse_index(su, 'r'), parse_index(sv, 'c')) {
            (Some(i), Some(j)) if i < red.rows && j < red.cols => out[i][j] = true,
            _ => return Err(RpqError::InvalidInstance(format!("unexpected answer ({su}, {sv})"))),
        }
    }
    Ok(out)
}

/// An orthogonal pair exists iff fewer than `n²` pairs are answers.
pub fn decode_ov_count(red: &LayeredReduction, count: usize) -> bool {
    count < red.rows * red.cols
}

/// Starts from the empty database and builds `u<i> -a-> v<j>` for `M[i][j]`
/// and `v<j> -a-> w` for the current vector. Each round swaps only the
/// vector arcs that change, then enumerates `aa`.
pub fn omv_to_dynamic_enum(inst: &OmvInstance) -> Result<DynamicReduction> {
    let n = inst.n();
    if !inst.matrix.iter().chain(&inst.vectors).all(|r| r.len() == n) {
        return Err(RpqError::InvalidInstance("OMv dimensions disagree".into()));
    }
    let initial = GraphDatabase::new(Alphabet::new(['a'])?);
    let u = |i: usize| format!("u{}", i + 1);
    let v = |j: usize| format!("v{}", j + 1);
    let edge = |src: String, dst: String| Update::InsertArc { src, label: 'a', dst };
    let mut script = Vec::new();
    for i in 0..n {
        script.push(ScriptLine::Update(Update::AddNode(u(i))));
    }
    for j in 0..n {
        script.push(ScriptLine::Update(Update::AddNode(v(j))));
    }
    script.push(ScriptLine::Update(Update::AddNode("w".into())));
    for (i, row) in inst.matrix.iter().enumerate() {
        for (j, &x) in row.iter().enumerate() {
            if x {
                script.push(ScriptLine::Update(edge(u(i), v(j))));
            }
        }
    }
    let mut current = vec![false; n];
    for vector in &inst.vectors {
        for j in 0..n {
            if current[j] && !vector[j] {
                script.push(ScriptLine::Update(Update::DeleteArc { src: v(j), label: 'a', dst: "w".into() }));
            } else if !current[j] && vector[j] {
                script.push(ScriptLine::Update(edge(v(j), "w".into())));
            }
        }
        current.clone_from(vector);
        script.push(ScriptLine::Enumerate);
    }
    Ok(DynamicReduction { initial, query: aa(), script })
}

/// `M vⁱ` from one round's answers `(u<i>, w)`.
pub fn decode_omv_round(db: &GraphDatabase, pairs: &[(usize, usize)], n: usize) -> Result<Vec<bool>> {
    let mut out = vec![false; n];
    for &(a, b) in pairs {
        match (parse_index(db.name(a), 'u'), db.name(b)) {
            (Some(i), "w") if i < n => out[i] = true,
            (_, other) => {
                return Err(RpqError::InvalidInstance(format!("unexpected answer ({}, {other})", db.name(a))))
            }
        }
    }
    Ok(out)
}

/// Layered copies plus `s` and `t`; round `i` attaches `s` to `x<i>_0` and
/// `x<i>_3` to `t`, so `aaaaa` has an answer iff vertex `i` lies on a triangle.
pub fn tri_to_dynamic_enum(inst: &TriInstance) -> Result<DynamicReduction> {
    if inst.n == 0 {
        return Err(RpqError::InvalidInstance("triangle instance needs a vertex".into()));
    }
    let mut initial = GraphDatabase::new(Alphabet::new(['a'])?);
    initial.add_node("s")?;
    initial.add_node("t")?;
    layered_copies(&mut initial, inst)?;
    let attach = |i: usize, insert: bool| {
        let first = ("s".to_string(), layer_name('x', i, 0));
        let last = (layer_name('x', i, 3), "t".to_string());
        [first, last].map(|(src, dst)| {
            ScriptLine::Update(if insert {
                Update::InsertArc { src, label: 'a', dst }
            } else {
                Update::DeleteArc { src, label: 'a', dst }
            })
        })
    };
    let mut script = Vec::new();
    for i in 0..inst.n {
        if i > 0 {
            script.extend(attach(i - 1, false));
        }
        script.extend(attach(i, true));
        script.push(ScriptLine::Enumerate);
    }
    Ok(DynamicReduction { initial, query: RegexNode::word("aaaaa"), script })
}

/// Replays the script through the restart-on-update baseline enumerator and
/// hands every checkpoint's database and answer set to `decode`.
pub fn replay_dynamic<T>(
    red: &DynamicReduction,
    mut decode: impl FnMut(&GraphDatabase, &[(usize, usize)]) -> Result<T>,
) -> Result<Vec<T>> {
    let mut state = DynamicBaseline::new(red.initial.clone(), &red.query)?;
    let mut out = Vec::new();
    for line in &red.script {
        match line {
            ScriptLine::Update(u) => state.apply_update(u)?,
            ScriptLine::Enumerate => {
                let mut e = state.enumerate();
                let pairs = collect_pairs(&mut e)?;
                out.push(decode(state.database(), &pairs)?);
            }
        }
    }
    Ok(out)
}
