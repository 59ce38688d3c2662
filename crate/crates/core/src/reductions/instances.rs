//! Source-problem instances, random generators and definition-level solvers.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Result, RpqError};

pub type BoolMatrix = Vec<Vec<bool>>;

fn random_matrix(rows: usize, cols: usize, p: f64, rng: &mut impl Rng) -> BoolMatrix {
    (0..rows).map(|_| (0..cols).map(|_| rng.gen_bool(p)).collect()).collect()
}

fn rectangular(m: &BoolMatrix, cols: usize) -> bool {
    m.iter().all(|r| r.len() == cols)
}

/// Orthogonal vectors: two lists of `n` Boolean vectors of dimension `d`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OvInstance {
    pub a: BoolMatrix,
    pub b: BoolMatrix,
}

impl OvInstance {
    pub fn new(a: BoolMatrix, b: BoolMatrix) -> Result<Self> {
        let inst = OvInstance { a, b };
        inst.validate()?;
        Ok(inst)
    }

    pub fn validate(&self) -> Result<()> {
        let d = self.dim();
        if self.a.is_empty() || self.a.len() != self.b.len() {
            return Err(RpqError::InvalidInstance("OV needs two nonempty lists of equal length".into()));
        }
        if d == 0 || !rectangular(&self.a, d) || !rectangular(&self.b, d) {
            return Err(RpqError::InvalidInstance("OV vectors must share a positive dimension".into()));
        }
        Ok(())
    }

    pub fn n(&self) -> usize {
        self.a.len()
    }

    pub fn dim(&self) -> usize {
        self.a.first().map_or(0, Vec::len)
    }

    /// Bit density is drawn per instance so that both answers occur.
    pub fn random(n: usize, d: usize, rng: &mut impl Rng) -> Self {
        let p = rng.gen_range(0.15..0.85);
        OvInstance { a: random_matrix(n, d, p, rng), b: random_matrix(n, d, p, rng) }
    }
}

/// Boolean matrix product of two `n × n` matrices.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BmmInstance {
    pub a: BoolMatrix,
    pub b: BoolMatrix,
}

/// The same problem with both matrices given by their 1-entries.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SparseBmmInstance {
    pub n: usize,
    pub a: Vec<(usize, usize)>,
    pub b: Vec<(usize, usize)>,
}

fn ones(m: &BoolMatrix) -> Vec<(usize, usize)> {
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

impl BmmInstance {
    pub fn new(a: BoolMatrix, b: BoolMatrix) -> Result<Self> {
        let n = a.len();
        if n == 0 || b.len() != n || !rectangular(&a, n) || !rectangular(&b, n) {
            return Err(RpqError::InvalidInstance("BMM needs two square matrices of equal size".into()));
        }
        Ok(BmmInstance { a, b })
    }

    pub fn n(&self) -> usize {
        self.a.len()
    }

    pub fn random(n: usize, rng: &mut impl Rng) -> Self {
        let p = rng.gen_range(0.05..0.6);
        BmmInstance { a: random_matrix(n, n, p, rng), b: random_matrix(n, n, p, rng) }
    }

    pub fn to_sparse(&self) -> SparseBmmInstance {
        SparseBmmInstance { n: self.n(), a: ones(&self.a), b: ones(&self.b) }
    }
}

impl SparseBmmInstance {
    pub fn validate(&self) -> Result<()> {
        if self.a.iter().chain(&self.b).any(|&(i, j)| i >= self.n || j >= self.n) {
            return Err(RpqError::InvalidInstance("sparse BMM entry out of range".into()));
        }
        Ok(())
    }

    pub fn to_dense(&self) -> BmmInstance {
        let mut a = vec![vec![false; self.n]; self.n];
        let mut b = a.clone();
        for &(i, j) in &self.a {
            a[i][j] = true;
        }
        for &(i, j) in &self.b {
            b[i][j] = true;
        }
        BmmInstance { a, b }
    }
}

/// Triangle detection in an undirected simple graph on vertices `0..n`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TriInstance {
    pub n: usize,
    /// Each edge once, smaller endpoint first.
    pub edges: Vec<(usize, usize)>,
}

impl TriInstance {
    /// Normalizes orientation and drops duplicates; self-loops are rejected.
    pub fn new(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        if n == 0 {
            return Err(RpqError::InvalidInstance("triangle instance needs a vertex".into()));
        }
        let mut out = Vec::new();
        for &(u, v) in edges {
            if u == v || u >= n || v >= n {
                return Err(RpqError::InvalidInstance(format!("bad edge ({u}, {v})")));
            }
            out.push((u.min(v), u.max(v)));
        }
        out.sort_unstable();
        out.dedup();
        Ok(TriInstance { n, edges: out })
    }

    pub fn random(n: usize, rng: &mut impl Rng) -> Self {
        let p = rng.gen_range(0.05..0.6);
        let mut edges = Vec::new();
        for u in 0..n {
            for v in u + 1..n {
                if rng.gen_bool(p) {
                    edges.push((u, v));
                }
            }
        }
        TriInstance { n, edges }
    }

    fn adjacency(&self) -> BoolMatrix {
        let mut adj = vec![vec![false; self.n]; self.n];
        for &(u, v) in &self.edges {
            adj[u][v] = true;
            adj[v][u] = true;
        }
        adj
    }
}

/// Online matrix-vector multiplication: `M` against vectors `v¹..vⁿ`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OmvInstance {
    pub matrix: BoolMatrix,
    pub vectors: BoolMatrix,
}

impl OmvInstance {
    pub fn new(matrix: BoolMatrix, vectors: BoolMatrix) -> Result<Self> {
        let n = matrix.len();
        if n == 0 || !rectangular(&matrix, n) || vectors.is_empty() || !rectangular(&vectors, n) {
            return Err(RpqError::InvalidInstance("OMv needs an n × n matrix and n-dimensional vectors".into()));
        }
        Ok(OmvInstance { matrix, vectors })
    }

    pub fn n(&self) -> usize {
        self.matrix.len()
    }

    pub fn random(n: usize, rng: &mut impl Rng) -> Self {
        let p = rng.gen_range(0.1..0.6);
        OmvInstance { matrix: random_matrix(n, n, p, rng), vectors: random_matrix(n, n, p, rng) }
    }
}

pub fn ov_brute(inst: &OvInstance) -> bool {
    inst.a.iter().any(|x| inst.b.iter().any(|y| x.iter().zip(y).all(|(&p, &q)| !(p && q))))
}

/// All vertex triples.
pub fn tri_brute(inst: &TriInstance) -> bool {
    tri_brute_per_vertex(inst).into_iter().any(|x| x)
}

/// For every vertex, whether some triangle contains it.
pub fn tri_brute_per_vertex(inst: &TriInstance) -> Vec<bool> {
    let adj = inst.adjacency();
    let n = inst.n;
    let mut out = vec![false; n];
    for u in 0..n {
        for v in u + 1..n {
            for w in v + 1..n {
                if adj[u][v] && adj[v][w] && adj[u][w] {
                    out[u] = true;
                    out[v] = true;
                    out[w] = true;
                }
            }
        }
    }
    out
}

/// Triple loop; `a` is `r × k`, `b` is `k × c`.
pub fn bmm_brute(a: &BoolMatrix, b: &BoolMatrix) -> BoolMatrix {
    let cols = b.first().map_or(0, Vec::len);
    a.iter()
        .map(|row| (0..cols).map(|j| row.iter().enumerate().any(|(k, &x)| x && b[k][j])).collect())
        .collect()
}

/// `M vⁱ` for every round.
pub fn omv_brute(inst: &OmvInstance) -> BoolMatrix {
    inst.vectors
        .iter()
        .map(|v| inst.matrix.iter().map(|row| row.iter().zip(v).any(|(&m, &x)| m && x)).collect())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn brute_examples() {
        assert!(ov_brute(&OvInstance::new(vec![vec![false, true]], vec![vec![true, false]]).unwrap()));
        assert!(!ov_brute(&OvInstance::new(vec![vec![true, true]], vec![vec![true, true]]).unwrap()));
        assert!(tri_brute(&TriInstance::new(3, &[(0, 1), (1, 2), (0, 2)]).unwrap()));
        assert!(!tri_brute(&TriInstance::new(3, &[(0, 1), (1, 2)]).unwrap()));
        let id = vec![vec![true, false], vec![false, true]];
        let x = vec![vec![true, true], vec![false, true]];
        assert_eq!(bmm_brute(&id, &x), x);
        let omv = OmvInstance::new(id.clone(), vec![vec![true, false]]).unwrap();
        assert_eq!(omv_brute(&omv), vec![vec![true, false]]);
    }

    #[test]
    fn validation() {
        assert!(OvInstance::new(vec![vec![true]], vec![]).is_err());
        assert!(OvInstance::new(vec![vec![true]], vec![vec![true, false]]).is_err());
        assert!(BmmInstance::new(vec![vec![true]], vec![vec![true, true]]).is_err());
        assert!(TriInstance::new(2, &[(1, 1)]).is_err());
        assert_eq!(TriInstance::new(3, &[(2, 0), (0, 2)]).unwrap().edges, vec![(0, 2)]);
        let s = SparseBmmInstance { n: 2, a: vec![(0, 2)], b: vec![] };
        assert!(s.validate().is_err());
    }

    #[test]
    fn sparse_round_trip() {
        let mut rng = crate::workload::seeded_rng(1);
        let dense = BmmInstance::random(6, &mut rng);
        assert_eq!(dense.to_sparse().to_dense(), dense);
    }
}
