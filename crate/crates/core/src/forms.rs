//! Small n-linear forms: the coefficient mixed norm, sup norms over the
//! cube and the polydisc, and randomized batches comparing their ratio
//! with an upper bound. Plain `f64` arithmetic throughout.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::precision::{Decimal, FieldTag, Round};
use crate::sequences::{m_sequence, SequenceError};

pub const TENSOR_FORMAT: &str = "bhbound-tensor/1";

/// Default cap on `n * N` for exhaustive vertex enumeration.
pub const DEFAULT_VERTEX_CAP: usize = 22;

/// Relative slack allowed when comparing a float ratio with a bound.
pub const RATIO_SLACK: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum FormsError {
    #[error("{0}")]
    Domain(String),
    #[error("n * N = {arity} * {dim} exceeds the enumeration cap {cap}")]
    TooLarge { arity: usize, dim: usize, cap: usize },
    #[error("expected a {expected} tensor")]
    WrongField { expected: FieldTag },
    #[error("tensor fixture: {0}")]
    Fixture(String),
    #[error(transparent)]
    Sequence(#[from] SequenceError),
}

#[derive(Clone, Debug, PartialEq)]
pub enum Coefficients {
    Real(Vec<f64>),
    Complex(Vec<Complex64>),
}

/// The coefficients `U(e_{i1}, ..., e_{in})` of an n-linear form on
/// `K^N x ... x K^N`, stored row-major with slot 1 most significant.
#[derive(Clone, Debug, PartialEq)]
pub struct CoefficientTensor {
    arity: usize,
    dim: usize,
    coeffs: Coefficients,
}

fn entry_count(arity: usize, dim: usize) -> Result<usize, FormsError> {
    if arity == 0 || dim == 0 {
        return Err(FormsError::Domain("arity and dimension must be positive".into()));
    }
    u32::try_from(arity)
        .ok()
        .and_then(|a| dim.checked_pow(a))
        .filter(|&len| len <= 1 << 28)
        .ok_or_else(|| FormsError::Domain(format!("{dim}^{arity} entries is too many")))
}

impl CoefficientTensor {
    pub fn new(arity: usize, dim: usize, coeffs: Coefficients) -> Result<Self, FormsError> {
        let len = entry_count(arity, dim)?;
        let (got, finite) = match &coeffs {
            Coefficients::Real(v) => (v.len(), v.iter().all(|x| x.is_finite())),
            Coefficients::Complex(v) => (v.len(), v.iter().all(|z| z.re.is_finite() && z.im.is_finite())),
        };
        if got != len {
            return Err(FormsError::Domain(format!("expected {len} coefficients, got {got}")));
        }
        if !finite {
            return Err(FormsError::Domain("coefficients must be finite".into()));
        }
        Ok(Self { arity, dim, coeffs })
    }

    pub fn real(arity: usize, dim: usize, values: Vec<f64>) -> Result<Self, FormsError> {
        Self::new(arity, dim, Coefficients::Real(values))
    }

    pub fn complex(arity: usize, dim: usize, values: Vec<Complex64>) -> Result<Self, FormsError> {
        Self::new(arity, dim, Coefficients::Complex(values))
    }

    /// The 2x2 bilinear form `[[1, 1], [1, -1]]`, zero-padded to `dim`.
    pub fn littlewood(field: FieldTag, dim: usize) -> Result<Self, FormsError> {
        if dim < 2 {
            return Err(FormsError::Domain("the Littlewood form needs N >= 2".into()));
        }
        let mut v = vec![0.0; dim * dim];
        v[0] = 1.0;
        v[1] = 1.0;
        v[dim] = 1.0;
        v[dim + 1] = -1.0;
        let t = Self::real(2, dim, v)?;
        Ok(match field {
            FieldTag::Real => t,
            FieldTag::Complex => t.to_complex(),
        })
    }

    pub fn field(&self) -> FieldTag {
        match self.coeffs {
            Coefficients::Real(_) => FieldTag::Real,
            Coefficients::Complex(_) => FieldTag::Complex,
        }
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        match &self.coeffs {
            Coefficients::Real(v) => v.len(),
            Coefficients::Complex(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn coefficients(&self) -> &Coefficients {
        &self.coeffs
    }

    pub fn abs_values(&self) -> Vec<f64> {
        match &self.coeffs {
            Coefficients::Real(v) => v.iter().map(|x| x.abs()).collect(),
            Coefficients::Complex(v) => v.iter().map(|z| z.norm()).collect(),
        }
    }

    pub fn max_abs(&self) -> f64 {
        self.abs_values().into_iter().fold(0.0, f64::max)
    }

    pub fn is_zero(&self) -> bool {
        self.max_abs() == 0.0
    }

    /// Same coefficients viewed as complex scalars.
    pub fn to_complex(&self) -> Self {
        let coeffs = match &self.coeffs {
            Coefficients::Real(v) => Coefficients::Complex(v.iter().map(|&x| x.into()).collect()),
            c => c.clone(),
        };
        Self { coeffs, ..*self }
    }

    pub fn scaled(&self, t: f64) -> Self {
        let coeffs = match &self.coeffs {
            Coefficients::Real(v) => Coefficients::Real(v.iter().map(|x| x * t).collect()),
            Coefficients::Complex(v) => Coefficients::Complex(v.iter().map(|z| z * t).collect()),
        };
        Self { coeffs, ..*self }
    }

    /// Reorders slots: slot `k` of the result is slot `perm[k]` of `self`.
    pub fn permute_slots(&self, perm: &[usize]) -> Result<Self, FormsError> {
        let n = self.arity;
        let mut seen = vec![false; n];
        if perm.len() != n || perm.iter().any(|&p| p >= n || std::mem::replace(&mut seen[p], true)) {
            return Err(FormsError::Domain(format!("{perm:?} is not a permutation of 0..{n}")));
        }
        let strides = self.strides();
        let src = |flat: usize| -> usize {
            let mut rest = flat;
            let mut old = 0;
            for k in (0..n).rev() {
                let i = rest % self.dim;
                rest /= self.dim;
                old += i * strides[perm[k]];
            }
            old
        };
        let coeffs = match &self.coeffs {
            Coefficients::Real(v) => Coefficients::Real((0..v.len()).map(|f| v[src(f)]).collect()),
            Coefficients::Complex(v) => {
                Coefficients::Complex((0..v.len()).map(|f| v[src(f)]).collect())
            }
        };
        Ok(Self { coeffs, ..*self })
    }

    fn strides(&self) -> Vec<usize> {
        let mut s = vec![1; self.arity];
        for k in (0..self.arity.saturating_sub(1)).rev() {
            s[k] = s[k + 1] * self.dim;
        }
        s
    }

    /// `U(z_1, ..., z_n)` for complex arguments.
    pub fn evaluate_complex(&self, z: &[Vec<Complex64>]) -> Complex64 {
        let c = self.to_complex();
        let Coefficients::Complex(mut cur) = c.coeffs else {
            unreachable!()
        };
        for zk in z {
            cur = contract_leading(&cur, zk, self.dim);
        }
        cur[0]
    }

    /// `U(x_1, ..., x_n)` for a real tensor and real arguments.
    pub fn evaluate_real(&self, x: &[Vec<f64>]) -> Result<f64, FormsError> {
        let Coefficients::Real(v) = &self.coeffs else {
            return Err(FormsError::WrongField { expected: FieldTag::Real });
        };
        let mut cur = v.clone();
        for xk in x {
            cur = contract_leading(&cur, xk, self.dim);
        }
        Ok(cur[0])
    }

    pub fn to_toml_string(&self) -> String {
        let coefficients = match &self.coeffs {
            Coefficients::Real(v) => v.iter().map(|x| RawCoeff::Real(float_string(*x))).collect(),
            Coefficients::Complex(v) => v
                .iter()
                .map(|z| RawCoeff::Complex([float_string(z.re), float_string(z.im)]))
                .collect(),
        };
        let file = TensorFile {
            format: TENSOR_FORMAT.into(),
            field: self.field(),
            arity: self.arity,
            dim: self.dim,
            coefficients,
        };
        toml::to_string(&file).expect("tensor serializes")
    }

    pub fn from_toml_str(s: &str) -> Result<Self, FormsError> {
        let file: TensorFile =
            toml::from_str(s).map_err(|e| FormsError::Fixture(e.message().to_string()))?;
        if file.format != TENSOR_FORMAT {
            return Err(FormsError::Fixture(format!("unsupported format {:?}", file.format)));
        }
        let parse = |s: &str| -> Result<f64, FormsError> {
            let d: Decimal = s.parse().map_err(|_| FormsError::Fixture(format!("bad numeral {s:?}")))?;
            Ok(decimal_to_f64(&d))
        };
        let coeffs = match file.field {
            FieldTag::Real => Coefficients::Real(
                file.coefficients
                    .iter()
                    .map(|c| match c {
                        RawCoeff::Real(s) => parse(s),
                        RawCoeff::Complex(_) => {
                            Err(FormsError::Fixture("real tensor with a complex entry".into()))
                        }
                    })
                    .collect::<Result<_, _>>()?,
            ),
            FieldTag::Complex => Coefficients::Complex(
                file.coefficients
                    .iter()
                    .map(|c| match c {
                        RawCoeff::Real(s) => Ok::<_, FormsError>(Complex64::new(parse(s)?, 0.0)),
                        RawCoeff::Complex([re, im]) => Ok(Complex64::new(parse(re)?, parse(im)?)),
                    })
                    .collect::<Result<_, _>>()?,
            ),
        };
        Self::new(file.arity, file.dim, coeffs)
    }
}

#[derive(Serialize, Deserialize)]
struct TensorFile {
    format: String,
    field: FieldTag,
    arity: usize,
    dim: usize,
    coefficients: Vec<RawCoeff>,
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum RawCoeff {
    Real(String),
    Complex([String; 2]),
}

/// Shortest string that parses back to the same `f64`.
fn float_string(x: f64) -> String {
    format!("{x:?}")
}

fn decimal_to_f64(d: &Decimal) -> f64 {
    let lo = d.to_dyadic(64, Round::Down).to_f64();
    let hi = d.to_dyadic(64, Round::Up).to_f64();
    if lo == hi {
        lo
    } else {
        (lo + hi) / 2.0
    }
}

/// Contracts the leading slot of a row-major tensor with `x`.
fn contract_leading<T>(t: &[T], x: &[T], dim: usize) -> Vec<T>
where
    T: Copy + std::ops::Mul<Output = T> + std::ops::AddAssign + Default,
{
    let rest = t.len() / dim;
    let mut out = vec![T::default(); rest];
    for (i, &xi) in x.iter().enumerate() {
        let row = &t[i * rest..(i + 1) * rest];
        for (o, &v) in out.iter_mut().zip(row) {
            *o += xi * v;
        }
    }
    out
}

/// `(sum |c|^p)^(1/p)` with `p = 2n/(n+1)`.
pub fn mixed_norm_lhs(form: &CoefficientTensor) -> f64 {
    let n = form.arity as f64;
    let p = 2.0 * n / (n + 1.0);
    let abs = form.abs_values();
    let m = abs.iter().copied().fold(0.0, f64::max);
    if m == 0.0 {
        return 0.0;
    }
    // scale by the largest entry to keep the powers in range
    let s: f64 = abs.iter().map(|a| (a / m).powf(p)).sum();
    m * s.powf(1.0 / p)
}

/// Exact `sup |U|` over `[-1, 1]^N` in every slot for a real form, by
/// enumerating sign vectors of all slots but the last (the last slot is
/// maximized in closed form as an l1 norm). The first slot's first sign is
/// fixed since `U(-x, ...) = -U(x, ...)`.
pub fn sup_norm_real_exact(form: &CoefficientTensor) -> Result<f64, FormsError> {
    sup_norm_real_exact_with_cap(form, DEFAULT_VERTEX_CAP)
}

pub fn sup_norm_real_exact_with_cap(
    form: &CoefficientTensor,
    cap: usize,
) -> Result<f64, FormsError> {
    let Coefficients::Real(v) = &form.coeffs else {
        return Err(FormsError::WrongField { expected: FieldTag::Real });
    };
    if form.arity * form.dim > cap {
        return Err(FormsError::TooLarge {
            arity: form.arity,
            dim: form.dim,
            cap,
        });
    }
    Ok(vertex_search(v, form.dim, form.arity, true))
}

fn vertex_search(t: &[f64], dim: usize, slots: usize, fix_first: bool) -> f64 {
    if slots == 1 {
        return t.iter().map(|x| x.abs()).sum();
    }
    let patterns = 1u64 << (dim - usize::from(fix_first));
    let mut best = 0.0f64;
    let mut signs = vec![1.0; dim];
    for mask in 0..patterns {
        for (i, s) in signs.iter_mut().enumerate() {
            let bit = if fix_first { i.checked_sub(1) } else { Some(i) };
            *s = match bit {
                Some(b) if mask >> b & 1 == 1 => -1.0,
                _ => 1.0,
            };
        }
        let next = contract_leading(t, &signs, dim);
        best = best.max(vertex_search(&next, dim, slots - 1, false));
    }
    best
}

/// `max |U|` over the grid `{-1, -1 + 2/steps, ..., 1}^N` in every slot.
/// A lower bound for the true sup, equal to it when the grid contains the
/// maximizing vertex (always, since the corners are grid points).
pub fn sup_norm_real_grid(form: &CoefficientTensor, steps: usize) -> Result<f64, FormsError> {
    let Coefficients::Real(v) = &form.coeffs else {
        return Err(FormsError::WrongField { expected: FieldTag::Real });
    };
    let vars = form.arity * form.dim;
    let points = steps + 1;
    let total = u32::try_from(vars)
        .ok()
        .and_then(|k| points.checked_pow(k))
        .filter(|&t| t <= 50_000_000)
        .ok_or_else(|| FormsError::Domain("grid too large".into()))?;
    let level = |i: usize| -1.0 + 2.0 * i as f64 / steps as f64;
    let mut best = 0.0f64;
    let mut digits = vec![0usize; vars];
    for _ in 0..total {
        let x: Vec<Vec<f64>> = digits.chunks(form.dim).map(|c| c.iter().map(|&i| level(i)).collect()).collect();
        let mut cur = v.clone();
        for xk in &x {
            cur = contract_leading(&cur, xk, form.dim);
        }
        best = best.max(cur[0].abs());
        for d in digits.iter_mut() {
            *d += 1;
            if *d < points {
                break;
            }
            *d = 0;
        }
    }
    Ok(best)
}

/// `max |U|` over unit-modulus arguments whose phases are multiples of
/// `2 pi / phases`, with the first coordinate of slot 1 fixed to 1.
pub fn sup_norm_complex_grid(form: &CoefficientTensor, phases: usize) -> Result<f64, FormsError> {
    let c = form.to_complex();
    let Coefficients::Complex(v) = &c.coeffs else {
        unreachable!()
    };
    let vars = form.arity * form.dim - 1;
    let total = u32::try_from(vars)
        .ok()
        .and_then(|k| phases.checked_pow(k))
        .filter(|&t| t <= 50_000_000)
        .ok_or_else(|| FormsError::Domain("grid too large".into()))?;
    let roots: Vec<Complex64> =
        (0..phases).map(|k| Complex64::from_polar(1.0, 2.0 * PI * k as f64 / phases as f64)).collect();
    let mut best = 0.0f64;
    let mut digits = vec![0usize; vars];
    let mut z = vec![Complex64::new(1.0, 0.0); form.arity * form.dim];
    for _ in 0..total {
        for (zi, &d) in z[1..].iter_mut().zip(&digits) {
            *zi = roots[d];
        }
        let mut cur = v.clone();
        for zk in z.chunks(form.dim) {
            cur = contract_leading(&cur, zk, form.dim);
        }
        best = best.max(cur[0].norm());
        for d in digits.iter_mut() {
            *d += 1;
            if *d < phases {
                break;
            }
            *d = 0;
        }
    }
    Ok(best)
}

#[derive(Clone, Debug, PartialEq)]
pub struct AscentOptions {
    pub restarts: usize,
    pub tol: f64,
    pub max_sweeps: usize,
    pub seed: u64,
}

impl Default for AscentOptions {
    fn default() -> Self {
        Self {
            restarts: 16,
            tol: 1e-10,
            max_sweeps: 500,
            seed: 0,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct AscentResult {
    /// Best `|U|` found; a lower bound for the polydisc sup.
    pub value: f64,
    /// `|U|` after each sweep, one list per restart.
    pub traces: Vec<Vec<f64>>,
    /// Some restart hit the sweep cap before converging.
    pub cap_reached: bool,
}

/// Lower bound for `sup |U|` over the closed complex polydisc by alternating
/// maximization: with all slots but `j` fixed, `U` is linear in `z_j` and
/// is maximized by `z_j[i] = conj(g_i)/|g_i|` for the partial gradient `g`.
/// Restart 0 starts from all ones, the others from seeded random phases.
pub fn sup_norm_complex_ascent(
    form: &CoefficientTensor,
    opts: &AscentOptions,
) -> Result<AscentResult, FormsError> {
    let Coefficients::Complex(v) = &form.coeffs else {
        return Err(FormsError::WrongField { expected: FieldTag::Complex });
    };
    let (n, dim) = (form.arity, form.dim);
    let mut result = AscentResult {
        value: 0.0,
        traces: Vec::new(),
        cap_reached: false,
    };
    for r in 0..opts.restarts.max(1) {
        let mut rng = ChaCha8Rng::seed_from_u64(trial_seed(opts.seed, r as u64));
        let mut z: Vec<Vec<Complex64>> = (0..n)
            .map(|_| {
                (0..dim)
                    .map(|_| {
                        if r == 0 {
                            Complex64::new(1.0, 0.0)
                        } else {
                            Complex64::from_polar(1.0, rng.random_range(0.0..2.0 * PI))
                        }
                    })
                    .collect()
            })
            .collect();
        let mut trace = Vec::new();
        let mut prev = form.evaluate_complex(&z).norm();
        let mut converged = false;
        for _ in 0..opts.max_sweeps {
            for j in 0..n {
                let g = partial_gradient(v, &z, j, dim);
                for (zi, gi) in z[j].iter_mut().zip(&g) {
                    let m = gi.norm();
                    if m > 0.0 {
                        *zi = gi.conj() / m;
                    }
                }
            }
            let val = form.evaluate_complex(&z).norm();
            trace.push(val);
            let done = val - prev < opts.tol;
            prev = val;
            if done {
                converged = true;
                break;
            }
        }
        result.cap_reached |= !converged;
        result.value = result.value.max(prev);
        result.traces.push(trace);
    }
    Ok(result)
}

/// `g_i = U(z_1, ..., e_i (slot j), ..., z_n)`.
fn partial_gradient(t: &[Complex64], z: &[Vec<Complex64>], j: usize, dim: usize) -> Vec<Complex64> {
    let mut cur = t.to_vec();
    // contract slots before j from the front
    for zk in &z[..j] {
        cur = contract_leading(&cur, zk, dim);
    }
    // now slot j leads; contract the trailing slots for each i
    let rest = cur.len() / dim;
    let mut tail = vec![Complex64::new(1.0, 0.0)];
    for zk in &z[j + 1..] {
        // outer product builds the weight of each trailing multi-index
        tail = tail.iter().flat_map(|&a| zk.iter().map(move |&b| a * b)).collect();
    }
    debug_assert_eq!(tail.len(), rest);
    (0..dim)
        .map(|i| cur[i * rest..(i + 1) * rest].iter().zip(&tail).map(|(a, b)| a * b).sum())
        .collect()
}

/// Both sides of the inequality for one form.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RatioSample {
    pub lhs: f64,
    pub sup_norm: f64,
    pub ratio: f64,
    pub form_seed: Option<u64>,
    /// The sup norm is exact (real vertex enumeration) rather than a lower
    /// bound from ascent.
    pub sup_exact: bool,
    pub cap_reached: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct OracleOptions {
    pub vertex_cap: usize,
    pub ascent: AscentOptions,
}

impl Default for OracleOptions {
    fn default() -> Self {
        Self {
            vertex_cap: DEFAULT_VERTEX_CAP,
            ascent: AscentOptions::default(),
        }
    }
}

pub fn bh_ratio(form: &CoefficientTensor) -> Result<RatioSample, FormsError> {
    bh_ratio_with(form, &OracleOptions::default())
}

pub fn bh_ratio_with(
    form: &CoefficientTensor,
    opts: &OracleOptions,
) -> Result<RatioSample, FormsError> {
    if form.is_zero() {
        return Err(FormsError::Domain("the zero form has no ratio".into()));
    }
    let lhs = mixed_norm_lhs(form);
    let (sup, exact, cap) = match form.field() {
        FieldTag::Real => (sup_norm_real_exact_with_cap(form, opts.vertex_cap)?, true, false),
        FieldTag::Complex => {
            let r = sup_norm_complex_ascent(form, &opts.ascent)?;
            (r.value, false, r.cap_reached)
        }
    };
    Ok(RatioSample {
        lhs,
        sup_norm: sup,
        ratio: lhs / sup,
        form_seed: None,
        sup_exact: exact,
        cap_reached: cap,
    })
}

/// Seed of trial `index` under `master`.
pub fn trial_seed(master: u64, index: u64) -> u64 {
    splitmix64(master ^ splitmix64(index))
}

fn splitmix64(x: u64) -> u64 {
    let mut z = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Real entries uniform on `[-1, 1]`; complex entries uniform on the closed
/// unit disc (radius `sqrt(u)`, uniform angle). ChaCha8 seeded from `seed`.
pub fn random_form(
    arity: usize,
    dim: usize,
    field: FieldTag,
    seed: u64,
) -> Result<CoefficientTensor, FormsError> {
    let len = entry_count(arity, dim)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let coeffs = match field {
        FieldTag::Real => Coefficients::Real((0..len).map(|_| rng.random_range(-1.0..=1.0)).collect()),
        FieldTag::Complex => Coefficients::Complex(
            (0..len)
                .map(|_| {
                    let r = rng.random::<f64>().sqrt();
                    Complex64::from_polar(r, rng.random_range(0.0..2.0 * PI))
                })
                .collect(),
        ),
    };
    CoefficientTensor::new(arity, dim, coeffs)
}

/// An upper bound for `K_n` as a float, with a label for reports.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BatchBound {
    pub value: f64,
    pub label: String,
}

/// `M_n` rounded up to `f64`.
pub fn sequence_bound(field: FieldTag, arity: usize) -> Result<BatchBound, FormsError> {
    let m = m_sequence(arity as u64, field, 128)?;
    Ok(BatchBound {
        value: m.to_f64_bounds().1,
        label: format!("M_{arity} ({field}) = {}", m.hi_string(20)),
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Violation {
    pub trial: u64,
    pub seed: Option<u64>,
    pub ratio: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BatchResult {
    pub arity: usize,
    pub dim: usize,
    pub field: FieldTag,
    pub trials: u64,
    pub seed: u64,
    pub bound: BatchBound,
    pub max_ratio: f64,
    pub argmax_trial: u64,
    /// `None` when the maximum came from the injected Littlewood form.
    pub argmax_seed: Option<u64>,
    pub littlewood_ratio: Option<f64>,
    pub cap_reached: u64,
    pub violations: Vec<Violation>,
}

impl BatchResult {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Samples `trials` forms and checks every ratio against `bound`. For
/// bilinear forms with `N >= 2`, trial 0 is the Littlewood form. Trials run
/// in parallel; each uses `trial_seed(seed, index)`, so results do not
/// depend on scheduling.
pub fn verify_batch(
    arity: usize,
    dim: usize,
    field: FieldTag,
    trials: u64,
    seed: u64,
    bound: &BatchBound,
    opts: &OracleOptions,
) -> Result<BatchResult, FormsError> {
    let inject = arity == 2 && dim >= 2;
    let samples: Vec<RatioSample> = (0..trials)
        .into_par_iter()
        .map(|t| {
            if inject && t == 0 {
                return bh_ratio_with(&CoefficientTensor::littlewood(field, dim)?, opts);
            }
            let s = trial_seed(seed, t);
            let form = random_form(arity, dim, field, s)?;
            let mut sample = bh_ratio_with(&form, opts)?;
            sample.form_seed = Some(s);
            Ok(sample)
        })
        .collect::<Result<_, FormsError>>()?;
    let mut result = BatchResult {
        arity,
        dim,
        field,
        trials,
        seed,
        bound: bound.clone(),
        max_ratio: 0.0,
        argmax_trial: 0,
        argmax_seed: None,
        littlewood_ratio: None,
        cap_reached: 0,
        violations: Vec::new(),
    };
    let limit = bound.value * (1.0 + RATIO_SLACK);
    for (t, s) in samples.iter().enumerate() {
        let t = t as u64;
        if inject && t == 0 {
            result.littlewood_ratio = Some(s.ratio);
        }
        if s.ratio > result.max_ratio {
            result.max_ratio = s.ratio;
            result.argmax_trial = t;
            result.argmax_seed = s.form_seed;
        }
        result.cap_reached += u64::from(s.cap_reached);
        // written so that a NaN ratio counts as a violation
        if s.ratio.is_nan() || s.ratio > limit {
            result.violations.push(Violation {
                trial: t,
                seed: s.form_seed,
                ratio: s.ratio,
            });
        }
    }
    Ok(result)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn real2(v: [f64; 4]) -> CoefficientTensor {
        CoefficientTensor::real(2, 2, v.to_vec()).unwrap()
    }

    #[test]
    fn construction_checks() {
        assert!(CoefficientTensor::real(2, 2, vec![1.0; 3]).is_err());
        assert!(CoefficientTensor::real(2, 2, vec![1.0, f64::NAN, 0.0, 0.0]).is_err());
        assert!(CoefficientTensor::real(0, 2, vec![]).is_err());
    }

    #[test]
    fn mixed_norm_examples() {
        assert!((mixed_norm_lhs(&real2([0.0, -3.5, 0.0, 0.0])) - 3.5).abs() < 1e-15);
        let pm = real2([1.0, -1.0, -1.0, 1.0]);
        assert!((mixed_norm_lhs(&pm) - 4f64.powf(0.75)).abs() < 1e-12);
        let t = 2.5;
        assert!((mixed_norm_lhs(&pm.scaled(t)) - t * mixed_norm_lhs(&pm)).abs() < 1e-12);
    }

    #[test]
    fn real_sup_examples() {
        assert_eq!(sup_norm_real_exact(&real2([1.0, 1.0, 1.0, -1.0])).unwrap(), 2.0);
        assert_eq!(sup_norm_real_exact(&real2([1.0; 4])).unwrap(), 4.0);
        assert_eq!(sup_norm_real_exact(&real2([0.0, 0.0, -0.5, 0.0])).unwrap(), 0.5);
        let one = CoefficientTensor::real(1, 3, vec![1.0, -2.0, 0.5]).unwrap();
        assert_eq!(sup_norm_real_exact(&one).unwrap(), 3.5);
        let big = random_form(2, 12, FieldTag::Real, 1).unwrap();
        assert!(matches!(sup_norm_real_exact(&big), Err(FormsError::TooLarge { .. })));
    }

    #[test]
    fn vertex_search_matches_plain_enumeration() {
        for seed in 0..20 {
            let f = random_form(3, 2, FieldTag::Real, seed).unwrap();
            let mut best = 0.0f64;
            for mask in 0..64u32 {
                let x: Vec<Vec<f64>> = (0..3)
                    .map(|k| (0..2).map(|i| if mask >> (2 * k + i) & 1 == 1 { -1.0 } else { 1.0 }).collect())
                    .collect();
                best = best.max(f.evaluate_real(&x).unwrap().abs());
            }
            assert!((best - sup_norm_real_exact(&f).unwrap()).abs() < 1e-12);
        }
    }

    #[test]
    fn complex_ascent_examples() {
        let opts = AscentOptions::default();
        let single = CoefficientTensor::complex(2, 2, vec![0.0.into(), Complex64::new(0.0, 2.0), 0.0.into(), 0.0.into()]).unwrap();
        let r = sup_norm_complex_ascent(&single, &opts).unwrap();
        assert!((r.value - 2.0).abs() < 1e-12);
        let ones = real2([1.0; 4]).to_complex();
        assert!((sup_norm_complex_ascent(&ones, &opts).unwrap().value - 4.0).abs() < 1e-9);
        let lw = CoefficientTensor::littlewood(FieldTag::Complex, 2).unwrap();
        let v = sup_norm_complex_ascent(&lw, &opts).unwrap().value;
        assert!((v - 2.0 * 2f64.sqrt()).abs() < 1e-9, "{v}");
        assert!(sup_norm_complex_ascent(&real2([1.0; 4]), &opts).is_err());
    }

    #[test]
    fn ratio_examples() {
        let lw = CoefficientTensor::littlewood(FieldTag::Real, 2).unwrap();
        assert!((bh_ratio(&lw).unwrap().ratio - 2f64.sqrt()).abs() < 1e-12);
        assert!((bh_ratio(&real2([0.0, 0.0, 7.0, 0.0])).unwrap().ratio - 1.0).abs() < 1e-15);
        let ones = bh_ratio(&real2([1.0; 4])).unwrap();
        assert!((ones.ratio - 4f64.powf(-0.25)).abs() < 1e-12);
        assert!(bh_ratio(&real2([0.0; 4])).is_err());
    }

    #[test]
    fn permutation_moves_slots() {
        // U(x, y) = x1 y2  ->  swapped: x2 y1
        let f = real2([0.0, 1.0, 0.0, 0.0]);
        let g = f.permute_slots(&[1, 0]).unwrap();
        assert_eq!(g, real2([0.0, 0.0, 1.0, 0.0]));
        assert!(f.permute_slots(&[0, 0]).is_err());
        let h = random_form(3, 2, FieldTag::Real, 9).unwrap();
        let x = vec![vec![0.3, -0.7], vec![1.0, 0.2], vec![-0.4, 0.9]];
        let px = vec![x[2].clone(), x[0].clone(), x[1].clone()];
        let hp = h.permute_slots(&[2, 0, 1]).unwrap();
        assert!((h.evaluate_real(&x).unwrap() - hp.evaluate_real(&px).unwrap()).abs() < 1e-14);
    }

    #[test]
    fn fixtures_round_trip() {
        for field in FieldTag::ALL {
            let f = random_form(2, 3, field, 4).unwrap();
            let text = f.to_toml_string();
            assert_eq!(CoefficientTensor::from_toml_str(&text).unwrap(), f);
        }
        let bad = "format = \"bhbound-tensor/1\"\nfield = \"real\"\narity = 1\ndim = 1\ncoefficients = [0.5]\n";
        assert!(CoefficientTensor::from_toml_str(bad).is_err());
    }

    #[test]
    fn random_forms_are_seeded() {
        let a = random_form(2, 2, FieldTag::Real, 3).unwrap();
        assert_eq!(a, random_form(2, 2, FieldTag::Real, 3).unwrap());
        assert!(a.abs_values().iter().all(|x| *x <= 1.0));
        let c = random_form(2, 3, FieldTag::Complex, 3).unwrap();
        assert!(c.abs_values().iter().all(|x| *x <= 1.0));
    }

    #[test]
    fn batch_injects_littlewood() {
        let bound = sequence_bound(FieldTag::Real, 2).unwrap();
        let r = verify_batch(2, 2, FieldTag::Real, 50, 7, &bound, &OracleOptions::default()).unwrap();
        assert!(r.passed());
        assert!((r.littlewood_ratio.unwrap() - 2f64.sqrt()).abs() < 1e-12);
        let tight = BatchBound { value: 1.0, label: "1".into() };
        let r = verify_batch(2, 2, FieldTag::Real, 5, 7, &tight, &OracleOptions::default()).unwrap();
        assert!(!r.passed());
        assert_eq!(r.violations[0].trial, 0);
    }
}
