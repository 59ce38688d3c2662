use pyo3::create_exception;
use pyo3::exceptions::PyException;
use pyo3::prelude::*;
use pyo3::types::PyDict;

use rpq_core::enumerate::{enum_baseline, enum_sublinear, sublinear_prepare, SublinearMode};
use rpq_core::reductions::{generate_instance, verify, GeneratedInstance, ReductionKind, Sidecar};
use rpq_core::script::{format_script, parse_script};
use rpq_core::{classify, eval, parse_rpq, Enumerator, GraphDatabase, Pull, RegexNode, Update};

create_exception!(rpq, RpqError, PyException);

fn err(e: rpq_core::RpqError) -> PyErr {
    RpqError::new_err(e.to_string())
}

/// An edge-labelled graph database.
#[pyclass(name = "Database")]
struct PyDatabase {
    inner: GraphDatabase,
}

impl PyDatabase {
    fn query(&self, text: &str) -> PyResult<RegexNode> {
        parse_rpq(text, self.inner.alphabet()).map_err(err)
    }

    fn index(&self, name: &str) -> PyResult<usize> {
        self.inner.node_index(name).map_err(err)
    }

    fn named(&self, pairs: &[(usize, usize)]) -> Vec<(String, String)> {
        pairs.iter().map(|&(u, v)| (self.inner.name(u).to_string(), self.inner.name(v).to_string())).collect()
    }
}

#[pymethods]
impl PyDatabase {
    /// Empty database over the symbols of `alphabet`.
    #[new]
    fn new(alphabet: &str) -> PyResult<Self> {
        let inner = GraphDatabase::from_arcs(alphabet, &[], &[]).map_err(err)?;
        Ok(PyDatabase { inner })
    }

    #[staticmethod]
    fn from_edge_list(text: &str) -> PyResult<Self> {
        Ok(PyDatabase { inner: GraphDatabase::load_edge_list(text).map_err(err)? })
    }

    fn to_edge_list(&self) -> String {
        self.inner.save_edge_list()
    }

    fn add_node(&mut self, name: &str) -> PyResult<()> {
        self.inner.add_node(name).map_err(err)?;
        Ok(())
    }

    /// Returns False if the arc was already present.
    fn add_arc(&mut self, src: &str, label: char, dst: &str) -> PyResult<bool> {
        self.inner.add_arc(src, label, dst).map_err(err)
    }

    fn remove_arc(&mut self, src: &str, label: char, dst: &str) -> PyResult<()> {
        self.inner.remove_arc(src, label, dst).map_err(err)
    }

    fn remove_node(&mut self, name: &str) -> PyResult<()> {
        self.inner.apply_update(&Update::DeleteNode(name.to_string())).map_err(err)
    }

    /// Applies every update line of a script; `!enum` lines are ignored.
    fn apply_script(&mut self, text: &str) -> PyResult<()> {
        for line in parse_script(text).map_err(err)? {
            if let rpq_core::script::ScriptLine::Update(u) = line {
                self.inner.apply_update(&u).map_err(err)?;
            }
        }
        Ok(())
    }

    #[getter]
    fn alphabet(&self) -> String {
        self.inner.alphabet().symbols().iter().collect()
    }

    #[getter]
    fn nodes(&self) -> Vec<String> {
        self.inner.names().to_vec()
    }

    #[getter]
    fn arc_count(&self) -> usize {
        self.inner.arc_count()
    }

    fn __len__(&self) -> usize {
        self.inner.node_count()
    }

    fn __repr__(&self) -> String {
        format!(
            "Database(alphabet={:?}, nodes={}, arcs={})",
            self.alphabet(),
            self.inner.node_count(),
            self.inner.arc_count()
        )
    }

    fn boole(&self, query: &str) -> PyResult<bool> {
        eval::boole(&self.inner, &self.query(query)?).map_err(err)
    }

    fn check(&self, query: &str, u: &str, v: &str) -> PyResult<bool> {
        eval::check(&self.inner, &self.query(query)?, self.index(u)?, self.index(v)?).map_err(err)
    }

    fn witness(&self, query: &str) -> PyResult<Option<(String, String)>> {
        let w = eval::witness(&self.inner, &self.query(query)?).map_err(err)?;
        Ok(w.map(|p| self.named(&[p]).remove(0)))
    }

    /// All answers as name pairs, sorted by node order.
    fn eval(&self, query: &str) -> PyResult<Vec<(String, String)>> {
        let res = eval::eval_all(&self.inner, &self.query(query)?).map_err(err)?;
        Ok(self.named(&res.pairs))
    }

    fn count(&self, query: &str) -> PyResult<usize> {
        eval::count(&self.inner, &self.query(query)?).map_err(err)
    }

    /// Iterator over answers. `mode` is one of baseline, sublinear,
    /// sublinear-lazy, restricted, approx.
    #[pyo3(signature = (query, mode = "baseline", cap = None))]
    fn enumerate(&self, query: &str, mode: &str, cap: Option<usize>) -> PyResult<Enumeration> {
        let q = self.query(query)?;
        let db = &self.inner;
        let inner: Box<dyn Enumerator> = match mode {
            "baseline" => Box::new(enum_baseline(db, &q).map_err(err)?),
            "sublinear" => {
                Box::new(enum_sublinear(sublinear_prepare(db, &q, SublinearMode::SortedTree, cap).map_err(err)?))
            }
            "sublinear-lazy" => {
                Box::new(enum_sublinear(sublinear_prepare(db, &q, SublinearMode::LazyUnsorted, cap).map_err(err)?))
            }
            "restricted" => rpq_core::restricted::enum_restricted(db, &q).map_err(err)?,
            "approx" => Box::new(rpq_core::approx::enum_approx(db, &q).map_err(err)?),
            other => return Err(pyo3::exceptions::PyValueError::new_err(format!("unknown mode '{other}'"))),
        };
        Ok(Enumeration { inner, names: db.names().to_vec() })
    }
}

/// A running enumeration. Raises `RpqError` if the database changed under it.
#[pyclass(unsendable)]
struct Enumeration {
    inner: Box<dyn Enumerator>,
    names: Vec<String>,
}

#[pymethods]
impl Enumeration {
    fn __iter__(slf: PyRef<'_, Self>) -> PyRef<'_, Self> {
        slf
    }

    fn __next__(&mut self) -> PyResult<Option<(String, String)>> {
        match self.inner.pull() {
            Pull::Pair(u, v) => Ok(Some((self.names[u].clone(), self.names[v].clone()))),
            Pull::Done => Ok(None),
            Pull::Stale => Err(err(rpq_core::RpqError::Stale)),
        }
    }

    #[getter]
    fn order(&self) -> &'static str {
        self.inner.order().as_str()
    }

    /// Step counts measured so far.
    fn delay<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyDict>> {
        let s = self.inner.meter().summary();
        let d = PyDict::new(py);
        d.set_item("outputs", s.outputs)?;
        d.set_item("first_gap", s.first_gap)?;
        d.set_item("max_gap", s.max_gap)?;
        d.set_item("last_gap", s.last_gap)?;
        d.set_item("total_steps", s.total_steps)?;
        Ok(d)
    }
}

/// Syntactic class of a query, e.g. `BT (a|b)+` or `general`.
#[pyfunction]
fn classify_query(query: &str) -> PyResult<String> {
    let q = rpq_core::query::parse_rpq_unchecked(query).map_err(err)?;
    Ok(classify(&q).to_string())
}

/// Returns `(edge_list, sidecar_json, update_script_or_None)`.
#[pyfunction]
#[pyo3(signature = (kind, n, d = 0, seed = 0))]
fn generate(kind: &str, n: usize, d: usize, seed: u64) -> PyResult<(String, String, Option<String>)> {
    let kind: ReductionKind = kind.parse().map_err(err)?;
    let bundle = generate_instance(kind, n, d, seed).map_err(err)?;
    let json = serde_json::to_string(&bundle.sidecar).map_err(|e| RpqError::new_err(e.to_string()))?;
    Ok((bundle.database.save_edge_list(), json, bundle.script.as_deref().map(format_script)))
}

/// Runs the engine on a generated instance and compares with its sidecar.
#[pyfunction]
#[pyo3(signature = (edge_list, sidecar_json, script = None))]
fn verify_instance(edge_list: &str, sidecar_json: &str, script: Option<&str>) -> PyResult<bool> {
    let sidecar: Sidecar = serde_json::from_str(sidecar_json).map_err(|e| RpqError::new_err(e.to_string()))?;
    let database = GraphDatabase::load_edge_list(edge_list).map_err(err)?;
    let script = script.map(parse_script).transpose().map_err(err)?;
    let verdict = verify(&GeneratedInstance { sidecar, database, script }).map_err(err)?;
    Ok(verdict.ok())
}

#[pymodule]
fn rpq(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("RpqError", m.py().get_type::<RpqError>())?;
    m.add_class::<PyDatabase>()?;
    m.add_class::<Enumeration>()?;
    m.add_function(wrap_pyfunction!(classify_query, m)?)?;
    m.add_function(wrap_pyfunction!(generate, m)?)?;
    m.add_function(wrap_pyfunction!(verify_instance, m)?)?;
    Ok(())
}
