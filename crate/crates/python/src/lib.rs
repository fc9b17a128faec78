//! Python bindings.

use engulf_core::boundary::{self, AbsorbingPair, Cylinder};
use engulf_core::finite_index;
use engulf_core::lab::{self, SubgpsepOptions};
use engulf_core::report::{self, Report};
use engulf_core::word::{parse_word_list, Alphabet};
use engulf_core::Error;
use pyo3::create_exception;
use pyo3::exceptions::{PyException, PyValueError};
use pyo3::prelude::*;

create_exception!(engulf, BoundedSearch, PyException);
create_exception!(engulf, PreconditionError, PyException);

fn err(e: Error) -> PyErr {
    match e {
        Error::BoundedSearch { .. } => BoundedSearch::new_err(e.to_string()),
        Error::Precondition(_) | Error::Hypothesis(_) | Error::NoAxis => {
            PreconditionError::new_err(e.to_string())
        }
        _ => PyValueError::new_err(e.to_string()),
    }
}

fn alphabet(rank: usize) -> PyResult<Alphabet> {
    Alphabet::new(rank).map_err(err)
}

fn words(text: &[String], a: Alphabet) -> PyResult<Vec<engulf_core::Word>> {
    parse_word_list(&text.join(","), a).map_err(err)
}

fn json_loads<'py>(py: Python<'py>, text: String) -> PyResult<Bound<'py, PyAny>> {
    py.import("json")?.call_method1("loads", (text,))
}

/// Freely reduced word; the identity is "1".
#[pyclass(name = "Word", frozen, eq, ord, hash, from_py_object)]
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
struct PyWord(engulf_core::Word);

#[pymethods]
impl PyWord {
    #[new]
    fn new(text: &str) -> PyResult<Self> {
        engulf_core::Word::parse_any(text).map(PyWord).map_err(err)
    }

    fn __str__(&self) -> String {
        self.0.to_string()
    }

    fn __repr__(&self) -> String {
        format!("Word('{}')", self.0)
    }

    fn __len__(&self) -> usize {
        self.0.len()
    }

    fn __mul__(&self, other: &PyWord) -> PyWord {
        PyWord(self.0.mul(&other.0))
    }

    fn __pow__(&self, n: i64, _modulo: Option<i64>) -> PyWord {
        PyWord(self.0.pow(n))
    }

    fn inverse(&self) -> PyWord {
        PyWord(self.0.inverse())
    }

    fn is_identity(&self) -> bool {
        self.0.is_identity()
    }

    fn fixed_points(&self) -> PyResult<(String, String)> {
        let (p, m) = boundary::fixed_points(&self.0).map_err(err)?;
        Ok((p.to_string(), m.to_string()))
    }
}

/// Stallings core graph of a finitely generated subgroup.
#[pyclass(name = "CoreGraph", frozen)]
struct PyCoreGraph(engulf_core::CoreGraph);

#[pymethods]
impl PyCoreGraph {
    #[new]
    #[pyo3(signature = (rank, generators))]
    fn new(rank: usize, generators: Vec<String>) -> PyResult<Self> {
        let a = alphabet(rank)?;
        engulf_core::CoreGraph::fold(a, &words(&generators, a)?)
            .map(PyCoreGraph)
            .map_err(err)
    }

    #[getter]
    fn rank(&self) -> usize {
        self.0.rank()
    }

    #[getter]
    fn vertex_count(&self) -> usize {
        self.0.vertex_count()
    }

    fn edges(&self) -> Vec<(usize, char, usize)> {
        self.0.edges().into_iter().map(|(u, l, v)| (u, l.to_char(), v)).collect()
    }

    fn contains(&self, word: &str) -> PyResult<bool> {
        let w = engulf_core::Word::parse(word, self.0.alphabet()).map_err(err)?;
        Ok(self.0.contains(&w))
    }

    fn __contains__(&self, word: &str) -> PyResult<bool> {
        self.contains(word)
    }

    fn index(&self) -> Option<usize> {
        self.0.index()
    }

    fn basis(&self) -> Vec<String> {
        self.0.basis().iter().map(ToString::to_string).collect()
    }

    fn is_proper_limit_set(&self) -> bool {
        self.0.is_proper_limit_set()
    }

    fn limit_stems(&self, depth: usize) -> Vec<String> {
        self.0
            .limit_set(depth)
            .stems
            .iter()
            .filter(|s| s.len() == depth)
            .map(ToString::to_string)
            .collect()
    }

    fn intersect(&self, other: &PyCoreGraph) -> PyResult<PyCoreGraph> {
        self.0.intersect(&other.0).map(PyCoreGraph).map_err(err)
    }

    fn conjugate(&self, g: &str) -> PyResult<PyCoreGraph> {
        let g = engulf_core::Word::parse(g, self.0.alphabet()).map_err(err)?;
        self.0.conjugate(&g).map(PyCoreGraph).map_err(err)
    }

    fn is_subgroup_of(&self, other: &PyCoreGraph) -> bool {
        self.0.is_subgroup_of(&other.0)
    }

    fn to_json(&self) -> String {
        self.0.to_json()
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<PyCoreGraph> {
        engulf_core::CoreGraph::from_json(text).map(PyCoreGraph).map_err(err)
    }
}

/// Finite presentation over letters a, b, ...
#[pyclass(name = "Presentation", frozen)]
struct PyPresentation(engulf_core::Presentation);

#[pymethods]
impl PyPresentation {
    #[new]
    #[pyo3(signature = (rank, relators=Vec::new()))]
    fn new(rank: usize, relators: Vec<String>) -> PyResult<Self> {
        let a = alphabet(rank)?;
        engulf_core::Presentation::new(a, words(&relators, a)?)
            .map(PyPresentation)
            .map_err(err)
    }

    #[staticmethod]
    fn parse(text: &str) -> PyResult<PyPresentation> {
        engulf_core::Presentation::parse(text).map(PyPresentation).map_err(err)
    }

    #[getter]
    fn rank(&self) -> usize {
        self.0.rank()
    }

    fn relators(&self) -> Vec<String> {
        self.0.relators().iter().map(ToString::to_string).collect()
    }

    fn __str__(&self) -> String {
        self.0.to_text()
    }
}

/// Transitive action on the cosets of a finite-index subgroup; coset 0 is
/// the subgroup.
#[pyclass(name = "CosetTable", frozen)]
struct PyCosetTable(engulf_core::CosetTable);

#[pymethods]
impl PyCosetTable {
    #[getter]
    fn size(&self) -> usize {
        self.0.size()
    }

    fn permutation(&self, word: &str) -> PyResult<Vec<usize>> {
        let w = engulf_core::Word::parse(word, self.0.alphabet()).map_err(err)?;
        Ok(self.0.permutation(&w))
    }

    fn contains(&self, word: &str) -> PyResult<bool> {
        let w = engulf_core::Word::parse(word, self.0.alphabet()).map_err(err)?;
        Ok(self.0.stabilizes(&w))
    }

    fn is_normal(&self) -> bool {
        self.0.is_normal()
    }

    fn coset_reps(&self) -> Vec<String> {
        self.0.coset_reps().iter().map(ToString::to_string).collect()
    }

    fn to_json(&self) -> String {
        self.0.to_json()
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<PyCosetTable> {
        engulf_core::CosetTable::from_json(text).map(PyCosetTable).map_err(err)
    }
}

#[pyfunction]
fn reduce(text: &str) -> PyResult<String> {
    engulf_core::Word::parse_any(text).map(|w| w.to_string()).map_err(err)
}

#[pyfunction]
#[pyo3(signature = (rank, word, plus, minus, max_power=16))]
fn absorbing_power(rank: usize, word: &str, plus: &str, minus: &str, max_power: u32) -> PyResult<u32> {
    let a = alphabet(rank)?;
    let w = engulf_core::Word::parse(word, a).map_err(err)?;
    let cyl = |s: &str| Cylinder::parse(s, a).map_err(err);
    let pair = AbsorbingPair::new(cyl(plus)?, cyl(minus)?).map_err(err)?;
    boundary::absorbing_power(a, &w, &pair, max_power).map_err(err)
}

#[pyfunction]
#[pyo3(signature = (presentation, generators, max_cosets=1000))]
fn coset_enumerate(presentation: &PyPresentation, generators: Vec<String>, max_cosets: usize) -> PyResult<PyCosetTable> {
    let gens = words(&generators, presentation.0.alphabet())?;
    finite_index::coset_enumerate(&presentation.0, &gens, max_cosets)
        .map(PyCosetTable)
        .map_err(err)
}

#[pyfunction]
fn low_index(presentation: &PyPresentation, max_index: usize) -> PyResult<Vec<PyCosetTable>> {
    Ok(finite_index::low_index(&presentation.0, max_index)
        .map_err(err)?
        .into_iter()
        .map(PyCosetTable)
        .collect())
}

/// Least proper subgroup of index at most `max_index` containing the
/// generators, or None.
#[pyfunction(name = "engulf")]
fn engulf_witness(presentation: &PyPresentation, generators: Vec<String>, max_index: usize) -> PyResult<Option<PyCosetTable>> {
    let gens = words(&generators, presentation.0.alphabet())?;
    let r = finite_index::engulf(&presentation.0, &gens, max_index).map_err(err)?;
    Ok(r.witness.map(PyCosetTable))
}

#[pyfunction]
fn hall_witness(h: &PyCoreGraph, word: &str) -> PyResult<PyCosetTable> {
    let w = engulf_core::Word::parse(word, h.0.alphabet()).map_err(err)?;
    finite_index::hall_witness(&h.0, &w).map(PyCosetTable).map_err(err)
}

/// Runs an experiment and returns its report as a JSON string.
#[pyfunction]
#[pyo3(signature = (name, rank=2, generators=Vec::new(), normal=Vec::new(), max_index=4, seed=0, stage=None))]
#[allow(clippy::too_many_arguments)]
fn experiment(
    name: &str,
    rank: usize,
    generators: Vec<String>,
    normal: Vec<String>,
    max_index: usize,
    seed: u64,
    stage: Option<usize>,
) -> PyResult<String> {
    let a = alphabet(rank)?;
    let gens = words(&generators, a)?;
    let report = match name {
        "resfin" => {
            let gens = if gens.is_empty() { a.generators() } else { gens };
            let n = engulf_core::CoreGraph::fold(a, &words(&normal, a)?).map_err(err)?;
            lab::resfin_experiment(a, &gens, &n, max_index, seed)
        }
        "subgpsep" => lab::subgpsep_experiment(
            a,
            &gens,
            SubgpsepOptions {
                max_index,
                seed,
                ..Default::default()
            },
        ),
        "nonengulfed" => {
            let avoid = Cylinder::parse("b", a).map_err(err)?;
            lab::nonengulfed_experiment(a, max_index, stage, &avoid)
        }
        _ => return Err(PyValueError::new_err(format!("unknown experiment {name:?}"))),
    }
    .map_err(err)?;
    Ok(report.to_json())
}

/// Replays the checks of a report; returns the verification as a dict.
#[pyfunction]
fn verify<'py>(py: Python<'py>, report_json: &str) -> PyResult<Bound<'py, PyAny>> {
    let r = Report::from_json(report_json).map_err(err)?;
    let v = report::verify(&r).map_err(err)?;
    json_loads(py, serde_json::to_string(&v).map_err(|e| PyValueError::new_err(e.to_string()))?)
}

#[pymodule]
fn engulf(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyWord>()?;
    m.add_class::<PyCoreGraph>()?;
    m.add_class::<PyPresentation>()?;
    m.add_class::<PyCosetTable>()?;
    m.add_function(wrap_pyfunction!(reduce, m)?)?;
    m.add_function(wrap_pyfunction!(absorbing_power, m)?)?;
    m.add_function(wrap_pyfunction!(coset_enumerate, m)?)?;
    m.add_function(wrap_pyfunction!(low_index, m)?)?;
    m.add_function(wrap_pyfunction!(engulf_witness, m)?)?;
    m.add_function(wrap_pyfunction!(hall_witness, m)?)?;
    m.add_function(wrap_pyfunction!(experiment, m)?)?;
    m.add_function(wrap_pyfunction!(verify, m)?)?;
    m.add("BoundedSearch", m.py().get_type::<BoundedSearch>())?;
    m.add("PreconditionError", m.py().get_type::<PreconditionError>())?;
    Ok(())
}
