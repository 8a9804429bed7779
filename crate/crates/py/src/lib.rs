//! Python bindings. Big integers cross the boundary as decimal strings and
//! exact rationals as `"num/den"` strings; signs are the integers `1` and `-1`.

use std::path::PathBuf;

use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;

use trinodisc_core::cache::{read_cache, RootsRecord};
use trinodisc_core::correspondence::{self, PairWitness, ResidueSet};
use trinodisc_core::density::{self, CpSet, DensityBounds};
use trinodisc_core::roots::{self, RootMethod};
use trinodisc_core::scan::ScanConfig;
use trinodisc_core::trinomials;
use trinodisc_core::{Error, Sign};

fn err(e: Error) -> PyErr {
    match e {
        Error::Io(_) | Error::Interrupted { .. } | Error::CacheCorrupt { .. } => {
            PyRuntimeError::new_err(e.to_string())
        }
        _ => PyValueError::new_err(e.to_string()),
    }
}

fn sign(v: i64) -> PyResult<Sign> {
    Sign::from_i64(v).map_err(err)
}

fn method(name: &str) -> PyResult<RootMethod> {
    match name {
        "direct" => Ok(RootMethod::Direct),
        "sieve" => Ok(RootMethod::Sieve),
        _ => Err(PyValueError::new_err(format!("unknown method {name:?}"))),
    }
}

/// Roots `x` in `0..p` of `(x+1)^p - x^p - 1 = 0 (mod p^2)`.
#[pyfunction]
#[pyo3(signature = (p, method = "sieve"))]
fn fp_roots(p: u64, method: &str) -> PyResult<Vec<u64>> {
    roots::fp_roots(p, self::method(method)?).map_err(err)
}

/// Orbit counts as a dict: trivial, cyclotomic, wieferich, sixpacks, total.
#[pyfunction]
fn classify_roots(py: Python<'_>, p: u64) -> PyResult<Py<PyAny>> {
    let rs = roots::fp_roots(p, RootMethod::Sieve).map_err(err)?;
    let c = roots::classify_roots(p, &rs).map_err(err)?;
    let d = pyo3::types::PyDict::new(py);
    d.set_item("trivial", c.counts.trivial)?;
    d.set_item("cyclotomic", c.counts.cyclotomic)?;
    d.set_item("wieferich", c.counts.wieferich)?;
    d.set_item("sixpacks", c.counts.sixpacks)?;
    d.set_item("total", c.total())?;
    Ok(d.into_any().unbind())
}

/// `(x^p, (x+1)^p, x) mod p^2` for every nontrivial root `x`.
#[pyfunction]
fn consecutive_pairs(p: u64) -> PyResult<Vec<(u64, u64, u64)>> {
    Ok(roots::consecutive_pairs(p)
        .map_err(err)?
        .into_iter()
        .map(|c| (c.lo, c.hi, c.source_root))
        .collect())
}

#[pyfunction]
fn is_wieferich(p: u64) -> bool {
    roots::is_wieferich(p)
}

#[pyfunction]
fn d_value(n: u64, m: u64, eps: i64) -> PyResult<String> {
    Ok(trinomials::d_value(n, m, sign(eps)?).map_err(err)?.to_string())
}

/// Whether `p^2` divides `n^n + eps (n-m)^(n-m) m^m`.
#[pyfunction]
fn d_eps_divisible(p: u64, n: u64, m: u64, eps: i64) -> PyResult<bool> {
    correspondence::d_eps_divisible(p, n, m, sign(eps)?).map_err(err)
}

#[pyclass(frozen, get_all, skip_from_py_object, name = "PairWitness")]
#[derive(Clone)]
struct PyPairWitness {
    x: u64,
    k: u64,
    eps: i64,
    m: u64,
}

impl From<PairWitness> for PyPairWitness {
    fn from(w: PairWitness) -> Self {
        PyPairWitness { x: w.x, k: w.k, eps: w.eps.value(), m: w.m }
    }
}

#[pymethods]
impl PyPairWitness {
    fn __repr__(&self) -> String {
        format!("PairWitness(x={}, k={}, eps={}, m={})", self.x, self.k, self.eps, self.m)
    }
}

#[pyfunction]
fn alpha(p: u64, m: u64, eps: i64, n: u64) -> PyResult<PyPairWitness> {
    Ok(correspondence::alpha(p, m, sign(eps)?, n).map_err(err)?.into())
}

#[pyfunction]
fn beta(p: u64, m: u64, eps: i64, x: u64, k: u64) -> PyResult<u64> {
    correspondence::beta(p, m, sign(eps)?, x, k).map_err(err)
}

#[pyfunction]
fn b_set(p: u64, m: u64, eps: i64) -> PyResult<Vec<PyPairWitness>> {
    Ok(correspondence::b_set(p, m, sign(eps)?)
        .map_err(err)?
        .into_iter()
        .map(Into::into)
        .collect())
}

/// Residues modulo `p(p-1)`, shared by `a_set` and `build_cp`.
#[pyclass(frozen, name = "ResidueSet")]
struct PyResidueSet {
    p: u64,
    modulus: u64,
    residues: Vec<u64>,
}

impl From<ResidueSet> for PyResidueSet {
    fn from(s: ResidueSet) -> Self {
        PyResidueSet { p: s.p, modulus: s.modulus(), residues: s.residues }
    }
}

impl From<CpSet> for PyResidueSet {
    fn from(s: CpSet) -> Self {
        PyResidueSet { p: s.p, modulus: s.modulus(), residues: s.residues }
    }
}

#[pymethods]
impl PyResidueSet {
    #[getter]
    fn p(&self) -> u64 {
        self.p
    }

    #[getter]
    fn modulus(&self) -> u64 {
        self.modulus
    }

    #[getter]
    fn residues(&self) -> Vec<u64> {
        self.residues.clone()
    }

    fn __len__(&self) -> usize {
        self.residues.len()
    }

    fn __contains__(&self, n: u64) -> bool {
        self.residues.binary_search(&(n % self.modulus)).is_ok()
    }

    fn __repr__(&self) -> String {
        format!("ResidueSet(p={}, modulus={}, len={})", self.p, self.modulus, self.residues.len())
    }
}

#[pyfunction]
fn a_set(p: u64, m: u64, eps: i64) -> PyResult<PyResidueSet> {
    Ok(correspondence::a_set(p, m, sign(eps)?).map_err(err)?.into())
}

#[pyfunction]
fn build_cp(p: u64) -> PyResult<PyResidueSet> {
    Ok(density::build_cp(p).map_err(err)?.into())
}

/// `(n, m)` witness for membership, or `None`.
#[pyfunction]
fn in_p(p: u64, eps: i64) -> PyResult<Option<(u64, u64)>> {
    Ok(correspondence::in_p(p, sign(eps)?).map_err(err)?.map(|w| (w.n, w.m)))
}

#[pyfunction]
fn in_p_tilde(p: u64) -> PyResult<bool> {
    correspondence::in_p_tilde(p).map_err(err)
}

/// `None` when irreducible, otherwise `(factor, cofactor)` rendered as text.
#[pyfunction]
fn classify_trinomial(n: u64, m: u64, a: i64, b: i64) -> PyResult<Option<(String, String)>> {
    let c = trinomials::ljunggren_classify(n, m, sign(a)?, sign(b)?).map_err(err)?;
    Ok(c.factor().zip(c.cofactor()).map(|(f, g)| (f.to_string(), g.to_string())))
}

/// `|Disc(x^n + a x^m + b)|`.
#[pyfunction]
fn trinomial_discriminant(n: u64, m: u64, a: i64, b: i64) -> PyResult<String> {
    let (d, _) = trinomials::trinomial_discriminant(n, m, sign(a)?, sign(b)?).map_err(err)?;
    Ok(d.to_string())
}

/// Coefficients from the constant term up.
#[pyfunction]
fn resultant(f: Vec<i64>, g: Vec<i64>) -> String {
    let (f, g) = (trinomials::IntPoly::from_i64(&f), trinomials::IntPoly::from_i64(&g));
    trinomials::resultant(&f, &g).to_string()
}

#[pyfunction]
fn strange_divisibility_check(k: u64) -> bool {
    trinomials::strange_divisibility_check(k)
}

#[pyclass(frozen, name = "DensityBounds")]
struct PyDensityBounds(DensityBounds);

#[pymethods]
impl PyDensityBounds {
    #[getter]
    fn prime_bound(&self) -> u64 {
        self.0.prime_bound
    }

    /// 10 significant digits, rounded down.
    #[getter]
    fn lower(&self) -> String {
        self.0.lower_decimal()
    }

    /// 10 significant digits, rounded up.
    #[getter]
    fn upper(&self) -> String {
        self.0.upper_decimal()
    }

    #[getter]
    fn triple_correction(&self) -> String {
        self.0.triple_decimal()
    }

    #[getter]
    fn lower_exact(&self) -> String {
        self.0.lower.to_string()
    }

    #[getter]
    fn upper_exact(&self) -> String {
        self.0.upper.to_string()
    }

    #[getter]
    fn exact(&self) -> bool {
        self.0.exact
    }

    #[getter]
    fn nonempty_sets(&self) -> usize {
        self.0.nonempty_sets
    }

    #[getter]
    fn intersecting_pairs(&self) -> u64 {
        self.0.intersecting_pairs
    }

    fn __repr__(&self) -> String {
        format!("DensityBounds(x={}, lower={}, upper={})", self.0.prime_bound, self.lower(), self.upper())
    }
}

fn cps_for(x: u64, cp_cache: Option<PathBuf>) -> PyResult<Vec<CpSet>> {
    match cp_cache {
        Some(path) => Ok(read_cache::<CpSet>(&path).map_err(err)?.records),
        None => {
            let primes = trinodisc_core::modarith::primes::primes_in_range(3, x);
            primes.into_iter().map(|p| density::build_cp(p).map_err(err)).collect()
        }
    }
}

/// Rigorous bounds for primes below `x`; sets come from `cp_cache` or are built on the fly.
#[pyfunction]
#[pyo3(signature = (x, cp_cache = None))]
fn ie_bounds(py: Python<'_>, x: u64, cp_cache: Option<PathBuf>) -> PyResult<PyDensityBounds> {
    py.detach(|| {
        let cps = cps_for(x, cp_cache)?;
        Ok(PyDensityBounds(density::ie_bounds(x, &cps).map_err(err)?))
    })
}

/// `((lower, upper), (lower_text, upper_text))` with the tail beyond `x` folded in.
#[pyfunction]
#[pyo3(signature = (x, cp_cache = None))]
fn density_estimate(py: Python<'_>, x: u64, cp_cache: Option<PathBuf>) -> PyResult<((f64, f64), (String, String))> {
    py.detach(|| {
        let cps = cps_for(x, cp_cache)?;
        let e = density::density_estimate(x, &cps).map_err(err)?;
        Ok((e.reported, e.reported_text))
    })
}

/// `sum 1/(p(p-1))` over primes in `[lo, hi)`.
#[pyfunction]
fn tail_sum(py: Python<'_>, lo: u64, hi: u64) -> PyResult<f64> {
    py.detach(|| density::tail_sum(lo, hi).map(|d| d.value()).map_err(err))
}

/// `(n, p)` with `p` the least of the first `prime_count` primes whose square divides
/// `n^n + (-1)^n (n-1)^(n-1)`.
#[pyfunction]
#[pyo3(signature = (n_max, prime_count = 10000))]
fn squarefree_scan(py: Python<'_>, n_max: u64, prime_count: usize) -> PyResult<Vec<(u64, u64)>> {
    py.detach(|| density::squarefree_scan(n_max, prime_count).map_err(err))
}

/// Rows `(label, actual, predicted, sd)` for primes below `x` using a roots cache.
#[pyfunction]
fn census(py: Python<'_>, x: u64, roots_cache: PathBuf) -> PyResult<Vec<(String, u64, f64, f64)>> {
    py.detach(|| {
        let recs = read_cache::<RootsRecord>(&roots_cache).map_err(err)?.records;
        let counts: Vec<(u64, usize)> = recs.iter().map(|r| (r.p, r.roots.len())).collect();
        let c = density::census(x, &counts).map_err(err)?;
        Ok(c.rows.iter().map(|r| (r.label(), r.actual, r.predicted, r.sd)).collect())
    })
}

/// Writes root and `C_p` caches for primes in `[min_p, max_p)`; returns `(primes, nonempty_cp)`.
#[pyfunction]
#[pyo3(signature = (max_p, roots_cache, cp_cache, min_p = 3, workers = 1, resume = false))]
fn scan(
    py: Python<'_>,
    max_p: u64,
    roots_cache: PathBuf,
    cp_cache: PathBuf,
    min_p: u64,
    workers: usize,
    resume: bool,
) -> PyResult<(usize, usize)> {
    py.detach(|| {
        let mut cfg = ScanConfig::new(min_p, max_p);
        cfg.workers = workers;
        cfg.roots_path = Some(roots_cache);
        cfg.cp_path = Some(cp_cache);
        cfg.resume = resume;
        let out = trinodisc_core::scan::scan(&cfg).map_err(err)?;
        Ok((out.summary.primes, out.summary.nonempty_cp))
    })
}

#[pymodule]
fn trinodisc(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyPairWitness>()?;
    m.add_class::<PyResidueSet>()?;
    m.add_class::<PyDensityBounds>()?;
    m.add_function(wrap_pyfunction!(fp_roots, m)?)?;
    m.add_function(wrap_pyfunction!(classify_roots, m)?)?;
    m.add_function(wrap_pyfunction!(consecutive_pairs, m)?)?;
    m.add_function(wrap_pyfunction!(is_wieferich, m)?)?;
    m.add_function(wrap_pyfunction!(d_value, m)?)?;
    m.add_function(wrap_pyfunction!(d_eps_divisible, m)?)?;
    m.add_function(wrap_pyfunction!(alpha, m)?)?;
    m.add_function(wrap_pyfunction!(beta, m)?)?;
    m.add_function(wrap_pyfunction!(b_set, m)?)?;
    m.add_function(wrap_pyfunction!(a_set, m)?)?;
    m.add_function(wrap_pyfunction!(build_cp, m)?)?;
    m.add_function(wrap_pyfunction!(in_p, m)?)?;
    m.add_function(wrap_pyfunction!(in_p_tilde, m)?)?;
    m.add_function(wrap_pyfunction!(classify_trinomial, m)?)?;
    m.add_function(wrap_pyfunction!(trinomial_discriminant, m)?)?;
    m.add_function(wrap_pyfunction!(resultant, m)?)?;
    m.add_function(wrap_pyfunction!(strange_divisibility_check, m)?)?;
    m.add_function(wrap_pyfunction!(ie_bounds, m)?)?;
    m.add_function(wrap_pyfunction!(density_estimate, m)?)?;
    m.add_function(wrap_pyfunction!(tail_sum, m)?)?;
    m.add_function(wrap_pyfunction!(squarefree_scan, m)?)?;
    m.add_function(wrap_pyfunction!(census, m)?)?;
    m.add_function(wrap_pyfunction!(scan, m)?)?;
    Ok(())
}
