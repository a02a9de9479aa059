//! Python bindings for `cox_core`.
//!
//! Subsets and words cross the boundary as lists of generator labels; the
//! identity is the empty list.

use std::sync::Arc;

use pyo3::create_exception;
use pyo3::exceptions::PyException;
use pyo3::prelude::*;
use pyo3::types::PyDict;

use cox_core::classify::{
    classify_subset, essential_subset, maximal_spherical_subsets, spherical_subsets, Cardinality,
};
use cox_core::hypothesis;
use cox_core::parabolic;
use cox_core::system::{parse_system, CoxeterSystem, GenSubset};
use cox_core::words::{enumerate_ball, Element, Numerics, ReflectionRep, Side};

create_exception!(cox, CoxError, PyException);
create_exception!(cox, NumericalAmbiguityError, CoxError);
create_exception!(cox, ResourceLimitError, CoxError);
create_exception!(cox, PreconditionError, CoxError);

fn to_py(e: cox_core::CoxError) -> PyErr {
    use cox_core::CoxError as E;
    let msg = e.to_string();
    match e {
        E::NumericalAmbiguity { .. } => NumericalAmbiguityError::new_err(msg),
        E::ResourceLimit { .. } => ResourceLimitError::new_err(msg),
        E::Precondition(_) => PreconditionError::new_err(msg),
        _ => CoxError::new_err(msg),
    }
}

trait OrPy<T> {
    fn py_err(self) -> PyResult<T>;
}

impl<T> OrPy<T> for cox_core::Result<T> {
    fn py_err(self) -> PyResult<T> {
        self.map_err(to_py)
    }
}

fn cardinality<'py>(py: Python<'py>, c: Cardinality) -> PyResult<Bound<'py, PyAny>> {
    match c {
        Cardinality::Finite(n) => Ok(n.into_pyobject(py)?.into_any()),
        Cardinality::Infinite => Ok(f64::INFINITY.into_pyobject(py)?.into_any()),
    }
}

/// A validated Coxeter system with its reflection representation.
#[pyclass(name = "CoxeterSystem", module = "cox", frozen)]
pub struct PySystem {
    rep: Arc<ReflectionRep>,
}

impl PySystem {
    fn sys(&self) -> &CoxeterSystem {
        self.rep.system()
    }

    fn subset(&self, labels: Vec<String>) -> PyResult<GenSubset> {
        labels
            .iter()
            .try_fold(GenSubset::EMPTY, |t, l| Ok(t.with(self.sys().generator(l).py_err()?)))
    }

    fn labels(&self, t: GenSubset) -> Vec<String> {
        t.iter().map(|i| self.sys().name(i).to_string()).collect()
    }

    fn word_labels(&self, w: &[u8]) -> Vec<String> {
        w.iter().map(|&i| self.sys().name(i as usize).to_string()).collect()
    }

    fn gen(&self, label: &str) -> PyResult<usize> {
        self.sys().generator(label).py_err()
    }

    fn wrap(&self, element: Element) -> PyElement {
        PyElement { element }
    }
}

#[pymethods]
impl PySystem {
    /// Parses the diagram format.
    #[new]
    #[pyo3(signature = (text, epsilon = cox_core::words::DEFAULT_EPSILON, ball_cap = cox_core::words::DEFAULT_BALL_CAP))]
    fn new(text: &str, epsilon: f64, ball_cap: usize) -> PyResult<Self> {
        let system = parse_system(text).py_err()?;
        Ok(Self { rep: ReflectionRep::with_numerics(system, Numerics { epsilon, ball_cap }) })
    }

    #[staticmethod]
    #[pyo3(signature = (path, epsilon = cox_core::words::DEFAULT_EPSILON, ball_cap = cox_core::words::DEFAULT_BALL_CAP))]
    fn from_file(path: &str, epsilon: f64, ball_cap: usize) -> PyResult<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| CoxError::new_err(format!("{path}: {e}")))?;
        Self::new(&text, epsilon, ball_cap)
    }

    #[getter]
    fn names(&self) -> Vec<String> {
        self.sys().names().to_vec()
    }

    #[getter]
    fn rank(&self) -> usize {
        self.sys().rank()
    }

    /// `m(s,t)`, with `float('inf')` for an infinite bond.
    fn m<'py>(&self, py: Python<'py>, s: &str, t: &str) -> PyResult<Bound<'py, PyAny>> {
        let order = self.sys().m(self.gen(s)?, self.gen(t)?);
        match order {
            cox_core::system::Order::Finite(m) => Ok(m.into_pyobject(py)?.into_any()),
            cox_core::system::Order::Infinite => Ok(f64::INFINITY.into_pyobject(py)?.into_any()),
        }
    }

    fn digest(&self) -> String {
        self.sys().digest()
    }

    fn to_diagram(&self) -> String {
        self.sys().to_diagram()
    }

    fn components(&self) -> Vec<Vec<String>> {
        self.sys().irreducible_components().into_iter().map(|c| self.labels(c)).collect()
    }

    /// Finiteness verdict for `W_T`; `t` defaults to all generators.
    #[pyo3(signature = (t = None))]
    fn classify<'py>(&self, py: Python<'py>, t: Option<Vec<String>>) -> PyResult<Bound<'py, PyDict>> {
        let t = match t {
            Some(t) => self.subset(t)?,
            None => self.sys().all(),
        };
        let v = classify_subset(self.sys(), t).py_err()?;
        let out = PyDict::new(py);
        out.set_item("finite", v.finite)?;
        out.set_item("order", cardinality(py, v.total_order)?)?;
        let comps = v
            .components
            .iter()
            .map(|c| {
                let d = PyDict::new(py);
                d.set_item("generators", self.labels(c.generators))?;
                d.set_item("type", c.kind.to_string())?;
                d.set_item("order", cardinality(py, c.order)?)?;
                Ok(d)
            })
            .collect::<PyResult<Vec<_>>>()?;
        out.set_item("components", comps)?;
        Ok(out)
    }

    #[pyo3(signature = (maximal = false))]
    fn spherical(&self, maximal: bool) -> Vec<Vec<String>> {
        let list = if maximal { maximal_spherical_subsets(self.sys()) } else { spherical_subsets(self.sys()) };
        list.into_iter().map(|t| self.labels(t)).collect()
    }

    fn essential(&self) -> Vec<String> {
        self.labels(essential_subset(self.sys()))
    }

    /// `[W : W_T]`, `float('inf')` when infinite.
    fn index<'py>(&self, py: Python<'py>, t: Vec<String>) -> PyResult<Bound<'py, PyAny>> {
        cardinality(py, parabolic::index(self.sys(), self.subset(t)?).py_err()?)
    }

    /// Element from a word of labels.
    fn element(&self, word: Vec<String>) -> PyResult<PyElement> {
        let word = word.iter().map(|l| self.gen(l)).collect::<PyResult<Vec<_>>>()?;
        Ok(self.wrap(self.rep.from_word(&word).py_err()?))
    }

    fn identity(&self) -> PyElement {
        self.wrap(self.rep.identity())
    }

    /// Cumulative ball sizes `|ball(r)|` for `r = 0..=radius`.
    fn ball_sizes(&self, radius: usize) -> PyResult<Vec<usize>> {
        let ball = enumerate_ball(&self.rep, radius).py_err()?;
        Ok((0..=radius).map(|r| ball.count_within(r)).collect())
    }

    /// Normal forms of the elements of `ball(radius)`, in ShortLex order.
    fn ball(&self, radius: usize) -> PyResult<Vec<Vec<String>>> {
        let ball = enumerate_ball(&self.rep, radius).py_err()?;
        Ok(ball.elements().iter().map(|w| self.word_labels(w.normal_form())).collect())
    }

    fn theorem_set(&self, t: Vec<String>) -> PyResult<Vec<String>> {
        Ok(self.labels(hypothesis::theorem_generator_set(self.sys(), self.subset(t)?).py_err()?))
    }

    fn check_corollary<'py>(&self, py: Python<'py>, t: Vec<String>) -> PyResult<Vec<Bound<'py, PyDict>>> {
        let witnesses = hypothesis::check_corollary(self.sys(), self.subset(t)?).py_err()?;
        witnesses
            .iter()
            .map(|w| {
                let d = PyDict::new(py);
                d.set_item("U", self.labels(w.u))?;
                d.set_item("s", self.sys().name(w.s))?;
                d.set_item("u0", self.sys().name(w.u0))?;
                d.set_item("condition", w.condition)?;
                d.set_item("T_tilde", self.labels(w.t_tilde))?;
                Ok(d)
            })
            .collect()
    }

    /// Quasi-density certificates as `(U, s0)` pairs.
    fn certificates(&self) -> Vec<(Vec<String>, String)> {
        hypothesis::check_quasidense_certificate(self.sys())
            .into_iter()
            .map(|c| (self.labels(c.u), self.sys().name(c.s0).to_string()))
            .collect()
    }

    fn invariance(&self, t: Vec<String>) -> PyResult<bool> {
        hypothesis::check_w_invariance(self.sys(), self.subset(t)?).py_err()
    }

    /// Distance profile to the union of `W^{s}` over `generators`.
    #[pyo3(signature = (generators, radius, margin = hypothesis::DEFAULT_MARGIN))]
    fn density_profile<'py>(
        &self,
        py: Python<'py>,
        generators: Vec<String>,
        radius: usize,
        margin: usize,
    ) -> PyResult<Vec<Bound<'py, PyDict>>> {
        let gens = self.subset(generators)?;
        let p = hypothesis::density_profile(
            &self.rep,
            "target",
            |w| hypothesis::in_singleton_descent_classes(w, gens),
            radius,
            margin,
        )
        .py_err()?;
        p.rows
            .iter()
            .map(|row| {
                let d = PyDict::new(py);
                d.set_item("radius", row.radius)?;
                d.set_item("max_distance", row.max_distance)?;
                d.set_item("witness", self.word_labels(&row.witness))?;
                d.set_item("boundary_reliable", row.boundary_reliable)?;
                Ok(d)
            })
            .collect()
    }

    /// Counterexample normal forms for the chain lemma.
    fn verify_lemma_2_7(&self, t: Vec<String>, chain: Vec<String>, radius: usize) -> PyResult<Vec<Vec<String>>> {
        let chain = chain.iter().map(|l| self.gen(l)).collect::<PyResult<Vec<_>>>()?;
        let bad = hypothesis::verify_lemma_2_7(&self.rep, self.subset(t)?, &chain, radius).py_err()?;
        Ok(bad.iter().map(|w| self.word_labels(w)).collect())
    }

    fn verify_descent_extension(&self, radius: usize) -> PyResult<Vec<(Vec<String>, String)>> {
        let bad = hypothesis::verify_descent_extension(&self.rep, radius).py_err()?;
        Ok(bad
            .iter()
            .map(|(w, s0)| (self.word_labels(w), self.sys().name(*s0).to_string()))
            .collect())
    }

    /// Cumulative counts of `W^{s}s ∩ W_T` for `r = 1..=radius`.
    fn verify_infinite_intersection(&self, t: Vec<String>, s: &str, radius: usize) -> PyResult<(Vec<usize>, bool)> {
        let table =
            hypothesis::verify_infinite_intersection(&self.rep, self.subset(t)?, self.gen(s)?, radius).py_err()?;
        Ok((table.counts.iter().map(|&(_, c)| c).collect(), table.holds()))
    }

    /// `(U_est, discrepancies)`.
    #[pyo3(signature = (t, radius, window = hypothesis::DEFAULT_STABILIZATION_WINDOW))]
    fn estimate_commuting_set(
        &self,
        t: Vec<String>,
        radius: usize,
        window: usize,
    ) -> PyResult<(Vec<String>, Vec<(String, String)>)> {
        let r = hypothesis::estimate_commuting_set(&self.rep, self.subset(t)?, radius, window).py_err()?;
        let name = |i: usize| self.sys().name(i).to_string();
        Ok((self.labels(r.u_estimate), r.discrepancies.iter().map(|&(a, b)| (name(a), name(b))).collect()))
    }

    fn verify_index_lemma(&self, t: Vec<String>) -> PyResult<bool> {
        Ok(hypothesis::verify_index_lemma(&self.rep, self.subset(t)?).py_err()?.holds)
    }

    fn __repr__(&self) -> String {
        format!("CoxeterSystem(names={:?})", self.sys().names())
    }
}

/// A group element, compared by normal form.
#[pyclass(name = "Element", module = "cox", frozen, eq, hash)]
#[derive(PartialEq, Eq, Hash)]
pub struct PyElement {
    element: Element,
}

impl PyElement {
    fn labels(&self, w: &[u8]) -> Vec<String> {
        let sys = self.element.system();
        w.iter().map(|&i| sys.name(i as usize).to_string()).collect()
    }
}

#[pymethods]
impl PyElement {
    #[getter]
    fn normal_form(&self) -> Vec<String> {
        self.labels(self.element.normal_form())
    }

    #[getter]
    fn length(&self) -> usize {
        self.element.length()
    }

    #[pyo3(signature = (side = "right"))]
    fn descents(&self, side: &str) -> PyResult<Vec<String>> {
        let side = match side {
            "right" => Side::Right,
            "left" => Side::Left,
            other => return Err(CoxError::new_err(format!("side must be 'left' or 'right', got {other:?}"))),
        };
        let d = self.element.descent_set(side).py_err()?;
        let sys = self.element.system();
        Ok(d.iter().map(|i| sys.name(i).to_string()).collect())
    }

    fn support(&self) -> Vec<String> {
        let sys = self.element.system();
        self.element.support().iter().map(|i| sys.name(i).to_string()).collect()
    }

    fn inverse(&self) -> PyResult<PyElement> {
        Ok(PyElement { element: self.element.inverse().py_err()? })
    }

    fn distance(&self, other: &PyElement) -> PyResult<usize> {
        self.element.word_distance(&other.element).py_err()
    }

    fn __mul__(&self, other: &PyElement) -> PyResult<PyElement> {
        Ok(PyElement { element: self.element.mul(&other.element).py_err()? })
    }

    /// `(u, v)` with `w = u·v`, `u ∈ A_T`, `v ∈ W_T`.
    fn coset_decompose(&self, t: Vec<String>) -> PyResult<(PyElement, PyElement)> {
        let sys = self.element.system();
        let t = t
            .iter()
            .try_fold(GenSubset::EMPTY, |acc, l| Ok::<_, PyErr>(acc.with(sys.generator(l).py_err()?)))?;
        let (u, v) = parabolic::coset_decompose(&self.element, t).py_err()?;
        Ok((PyElement { element: u }, PyElement { element: v }))
    }

    fn __len__(&self) -> usize {
        self.element.length()
    }

    fn __repr__(&self) -> String {
        format!("Element({})", self.element.format())
    }
}

#[pymodule]
fn cox(m: &Bound<'_, PyModule>) -> PyResult<()> {
    let py = m.py();
    m.add_class::<PySystem>()?;
    m.add_class::<PyElement>()?;
    m.add("CoxError", py.get_type::<CoxError>())?;
    m.add("NumericalAmbiguityError", py.get_type::<NumericalAmbiguityError>())?;
    m.add("ResourceLimitError", py.get_type::<ResourceLimitError>())?;
    m.add("PreconditionError", py.get_type::<PreconditionError>())?;
    Ok(())
}
