//! Python bindings. Rationals cross the boundary as strings such as `"3/10"`.

use std::collections::BTreeMap;

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

use catprob::finprob::{self, FinMap, KleisliLaw, LawConfig, MonadSpec};
use catprob::metrics::{self, FiniteMetricSpace, MetricConfig};
use catprob::polymeasure::{self, Polymeasure as CorePoly};
use catprob::rational::{fmt_rational, parse_rational, Rational};
use catprob::report;
use catprob::starmonad::{self, MultVariant, StarConfig};
use catprob::value::Value;

fn err(e: catprob::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn rat(s: &str) -> PyResult<Rational> {
    parse_rational(s).map_err(err)
}

fn values(xs: &[String]) -> PyResult<Vec<Value>> {
    xs.iter().map(|s| Value::parse(s).map_err(err)).collect()
}

fn strings(xs: &[Value]) -> Vec<String> {
    xs.iter().map(Value::to_string).collect()
}

/// A probability distribution with exact rational weights.
#[pyclass(name = "Distribution", frozen, eq, from_py_object)]
#[derive(Clone, PartialEq)]
pub struct PyDistribution(finprob::Distribution);

#[pymethods]
impl PyDistribution {
    /// `weights` maps elements to rationals; `carrier` defaults to the keys.
    #[new]
    #[pyo3(signature = (weights, carrier=None))]
    fn new(weights: BTreeMap<String, String>, carrier: Option<Vec<String>>) -> PyResult<Self> {
        let carrier = values(&carrier.unwrap_or_else(|| weights.keys().cloned().collect()))?;
        let entries = weights
            .iter()
            .map(|(k, w)| Ok((Value::parse(k).map_err(err)?, rat(w)?)))
            .collect::<PyResult<Vec<_>>>()?;
        finprob::Distribution::new(carrier, entries).map(Self).map_err(err)
    }

    #[staticmethod]
    fn dirac(x: &str, carrier: Vec<String>) -> PyResult<Self> {
        let x = Value::parse(x).map_err(err)?;
        finprob::dirac(&x, &values(&carrier)?).map(Self).map_err(err)
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        let json: serde_json::Value = serde_json::from_str(text).map_err(|e| PyValueError::new_err(e.to_string()))?;
        match catprob::io::parse_spec(&json, None).map_err(err)? {
            catprob::io::Spec::Distribution(d) => Ok(Self(d)),
            s => Err(PyValueError::new_err(format!("expected a distribution, got {}", s.kind()))),
        }
    }

    fn carrier(&self) -> Vec<String> {
        strings(self.0.carrier())
    }

    fn weight(&self, x: &str) -> PyResult<String> {
        Ok(fmt_rational(&self.0.weight(&Value::parse(x).map_err(err)?)))
    }

    fn weights(&self) -> BTreeMap<String, String> {
        self.0.weights().iter().map(|(x, w)| (x.to_string(), fmt_rational(w))).collect()
    }

    /// Push forward along `mapping`, a dict from carrier elements to `codomain`.
    fn pushforward(&self, mapping: BTreeMap<String, String>, codomain: Vec<String>) -> PyResult<Self> {
        let pairs = mapping
            .iter()
            .map(|(a, b)| Ok((Value::parse(a).map_err(err)?, Value::parse(b).map_err(err)?)))
            .collect::<PyResult<Vec<_>>>()?;
        let f = FinMap::new(pairs, values(&codomain)?).map_err(err)?;
        finprob::pushforward(&f, &self.0).map(Self).map_err(err)
    }

    /// Product distribution on pairs `(x,y)`.
    fn tensor(&self, other: &PyDistribution) -> Self {
        Self(finprob::tensor_strength(&self.0, &other.0))
    }

    fn to_json(&self) -> String {
        self.0.to_json().to_string()
    }

    fn __repr__(&self) -> String {
        Value::Dist(std::sync::Arc::new(self.0.clone())).to_string()
    }
}

/// Weighted average of distributions on a common carrier.
#[pyfunction]
fn flatten(mixture: Vec<(PyDistribution, String)>) -> PyResult<PyDistribution> {
    let outer: Vec<Value> = mixture.iter().map(|(d, _)| d.0.clone().into_value()).collect();
    let entries = mixture.iter().map(|(d, w)| Ok((d.0.clone().into_value(), rat(w)?))).collect::<PyResult<Vec<_>>>()?;
    let pp = finprob::Distribution::new(outer, entries).map_err(err)?;
    finprob::flatten(&pp).map(PyDistribution).map_err(err)
}

/// A finite metric space with rational distances.
#[pyclass(name = "MetricSpace", frozen, skip_from_py_object)]
#[derive(Clone)]
pub struct PyMetricSpace(FiniteMetricSpace);

#[pymethods]
impl PyMetricSpace {
    #[new]
    fn new(points: Vec<String>, dist: Vec<Vec<String>>) -> PyResult<Self> {
        let d = dist.iter().map(|row| row.iter().map(|s| rat(s)).collect()).collect::<PyResult<Vec<Vec<_>>>>()?;
        FiniteMetricSpace::new(values(&points)?, d).map(Self).map_err(err)
    }

    /// Points of the real line, named by their coordinates.
    #[staticmethod]
    fn real_line(coords: Vec<String>) -> PyResult<Self> {
        let c = coords.iter().map(|s| rat(s)).collect::<PyResult<Vec<_>>>()?;
        FiniteMetricSpace::real_line(&c).map(Self).map_err(err)
    }

    fn points(&self) -> Vec<String> {
        strings(self.0.points())
    }

    fn diameter(&self) -> String {
        fmt_rational(&self.0.diameter())
    }

    fn to_json(&self) -> String {
        self.0.to_json().to_string()
    }
}

#[pyfunction]
fn kantorovich(p: &PyDistribution, q: &PyDistribution, space: &PyMetricSpace) -> PyResult<String> {
    metrics::kantorovich_dual(&p.0, &q.0, &space.0).map(|r| fmt_rational(&r)).map_err(err)
}

#[pyfunction]
fn wasserstein_primal(p: &PyDistribution, q: &PyDistribution, space: &PyMetricSpace) -> PyResult<String> {
    metrics::wasserstein_primal(&p.0, &q.0, &space.0).map(|r| fmt_rational(&r)).map_err(err)
}

#[pyfunction]
fn prokhorov(p: &PyDistribution, q: &PyDistribution, space: &PyMetricSpace) -> PyResult<String> {
    metrics::prokhorov(&p.0, &q.0, &space.0).map(|r| fmt_rational(&r)).map_err(err)
}

/// The three-point example space with its two distributions.
#[pyfunction]
fn paper_example() -> (PyMetricSpace, PyDistribution, PyDistribution) {
    let (m, p, q) = metrics::paper_example();
    (PyMetricSpace(m), PyDistribution(p), PyDistribution(q))
}

/// A discrete polymeasure given by its density on the product of carriers.
#[pyclass(name = "Polymeasure", frozen, eq, skip_from_py_object)]
#[derive(Clone, PartialEq)]
pub struct PyPolymeasure(CorePoly);

#[pymethods]
impl PyPolymeasure {
    #[new]
    fn new(carriers: Vec<Vec<String>>, density: Vec<(Vec<String>, String)>) -> PyResult<Self> {
        let carriers = carriers.iter().map(|c| values(c)).collect::<PyResult<Vec<_>>>()?;
        let entries = density.iter().map(|(t, w)| Ok((values(t)?, rat(w)?))).collect::<PyResult<Vec<_>>>()?;
        CorePoly::from_density(carriers, entries).map(Self).map_err(err)
    }

    /// Rectangle restriction of a joint distribution on tuples.
    #[staticmethod]
    fn restrict(p: &PyDistribution, carriers: Vec<Vec<String>>) -> PyResult<Self> {
        let carriers = carriers.iter().map(|c| values(c)).collect::<PyResult<Vec<_>>>()?;
        polymeasure::restrict_to_rectangles(&p.0, &carriers).map(Self).map_err(err)
    }

    fn arity(&self) -> usize {
        self.0.arity()
    }

    fn carriers(&self) -> Vec<Vec<String>> {
        self.0.carriers().iter().map(|c| strings(c)).collect()
    }

    fn mass(&self) -> String {
        fmt_rational(&self.0.mass())
    }

    /// `γ(A₁,…,Aₙ)` for subsets of the carriers.
    fn eval(&self, sets: Vec<Vec<String>>) -> PyResult<String> {
        let sets = sets.iter().map(|s| values(s)).collect::<PyResult<Vec<_>>>()?;
        self.0.eval(&sets).map(|r| fmt_rational(&r)).map_err(err)
    }

    fn marginal(&self, slot: usize) -> PyResult<PyDistribution> {
        self.0.marginal(slot).map(PyDistribution).map_err(err)
    }

    /// The joint distribution on tuples agreeing with this polymeasure on rectangles.
    fn extend(&self) -> PyResult<PyDistribution> {
        polymeasure::extend_to_measure(&self.0).map(PyDistribution).map_err(err)
    }

    /// `∫ f₁⊗…⊗fₙ dγ`, each `fᵢ` listed in carrier order.
    fn integrate(&self, fs: Vec<Vec<String>>) -> PyResult<String> {
        let fs = fs.iter().map(|f| f.iter().map(|s| rat(s)).collect()).collect::<PyResult<Vec<Vec<_>>>>()?;
        polymeasure::integrate(&fs, &self.0).map(|r| fmt_rational(&r)).map_err(err)
    }

    fn product(&self, other: &PyPolymeasure) -> Self {
        Self(polymeasure::product_polymeasure(&[&self.0, &other.0]))
    }

    fn to_json(&self) -> String {
        self.0.to_json().to_string()
    }
}

/// One named check from a suite.
#[pyclass(name = "Verdict", frozen, get_all)]
pub struct PyVerdict {
    check: String,
    passed: bool,
    instances: u64,
    detail: Option<String>,
    witness: Option<String>,
}

#[pymethods]
impl PyVerdict {
    fn __repr__(&self) -> String {
        format!("Verdict({}, passed={}, instances={})", self.check, self.passed, self.instances)
    }
}

fn verdicts(vs: Vec<report::Verdict>) -> Vec<PyVerdict> {
    vs.into_iter()
        .map(|v| PyVerdict { check: v.check, passed: v.passed, instances: v.instances, detail: v.detail, witness: v.witness.map(|w| w.to_string()) })
        .collect()
}

/// Exhaustive monad-law checks for `distribution`, `subdistribution` or `broken-mult`.
#[pyfunction]
#[pyo3(signature = (monad="distribution", max_carrier=2, grid=4, kleisli=None))]
fn law_suite(monad: &str, max_carrier: usize, grid: u32, kleisli: Option<&str>) -> PyResult<Vec<PyVerdict>> {
    let m = MonadSpec::by_name(monad).map_err(err)?;
    let law = match kleisli {
        None => None,
        Some("inclusion") => Some(KleisliLaw::inclusion()),
        Some("halving") => Some(KleisliLaw::halving()),
        Some(other) => return Err(PyValueError::new_err(format!("unknown Kleisli law {other}"))),
    };
    let cfg = LawConfig { max_carrier, grid, ..LawConfig::default() };
    Ok(verdicts(finprob::law_suite(&m, &cfg, law.as_ref())))
}

#[pyfunction]
#[pyo3(signature = (seed, draws=500, max_points=6, grid=6))]
fn metric_suite(seed: u64, draws: usize, max_points: usize, grid: u32) -> PyResult<Vec<PyVerdict>> {
    let cfg = MetricConfig { seed, draws, max_points, grid };
    metrics::metric_inequality_suite(&cfg).map(verdicts).map_err(err)
}

/// Seeded *-monad and op-multicategory checks; `mult` is `exact` or `squared-density`.
#[pyfunction]
#[pyo3(signature = (seed, draws=200, mult="exact"))]
fn star_law_suite(seed: u64, draws: usize, mult: &str) -> PyResult<Vec<PyVerdict>> {
    let variant = match mult {
        "exact" => MultVariant::Exact,
        "squared-density" => MultVariant::SquaredDensity,
        other => return Err(PyValueError::new_err(format!("unknown multiplication {other}"))),
    };
    Ok(verdicts(starmonad::star_law_suite(&StarConfig { seed, draws, ..StarConfig::default() }, variant)))
}

/// Run a CLI subcommand; returns the JSON-lines report and whether every check passed.
#[pyfunction]
fn run_cli(args: Vec<String>) -> PyResult<(String, bool)> {
    let args: Vec<&str> = args.iter().map(String::as_str).collect();
    catprob::cli::run_to_text(&args).map_err(err)
}

#[pymodule]
fn catprob_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyDistribution>()?;
    m.add_class::<PyMetricSpace>()?;
    m.add_class::<PyPolymeasure>()?;
    m.add_class::<PyVerdict>()?;
    m.add_function(wrap_pyfunction!(flatten, m)?)?;
    m.add_function(wrap_pyfunction!(kantorovich, m)?)?;
    m.add_function(wrap_pyfunction!(wasserstein_primal, m)?)?;
    m.add_function(wrap_pyfunction!(prokhorov, m)?)?;
    m.add_function(wrap_pyfunction!(paper_example, m)?)?;
    m.add_function(wrap_pyfunction!(law_suite, m)?)?;
    m.add_function(wrap_pyfunction!(metric_suite, m)?)?;
    m.add_function(wrap_pyfunction!(star_law_suite, m)?)?;
    m.add_function(wrap_pyfunction!(run_cli, m)?)?;
    Ok(())
}
