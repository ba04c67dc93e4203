//! Gaussian networks: degradedness detection, covariance-based evaluation of
//! rate expressions, and the closed-form sum-rate optimizations for the two
//! worked network families, including the common-message power sweep.

use crate::error::{Error, Result};
use crate::expr::{MITerm, OutputRef, RateExpression, VarRef};
use crate::net::GaussianChannel;
use crate::set::IdxSet;
use rayon::prelude::*;
use serde::Serialize;

/// Diagonal regularization applied before determinant ratios; deterministic
/// encoders produce rank-deficient joints.
const COV_REGULARIZATION: f64 = 1e-12;

/// Default relative tolerance for the rank-one degradedness test.
pub const RANK_ONE_TOL: f64 = 1e-9;

/// AWGN rate function in bits: `psi(x) = 0.5 log2(1 + x)`.
pub fn psi(x: f64) -> f64 {
    assert!(x >= 0.0, "psi is defined for nonnegative arguments");
    0.5 * (1.0 + x).log2()
}

/// Round to 12 significant digits and print the shortest representation that
/// round-trips; keeps every emitted float byte-deterministic.
pub fn fmt_sig12(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    let rounded: f64 = format!("{x:.11e}").parse().expect("rounded float");
    format!("{rounded}")
}

/// Witness that a gain matrix admits a degraded ordering.
#[derive(Clone, Debug, Serialize)]
pub struct DegradedChain {
    /// Receiver indices, strongest first.
    pub order: Vec<usize>,
    /// Consecutive strength ratios, `|b| >= 1`, one per adjacent pair.
    pub ratios: Vec<f64>,
    /// `(1/b, sqrt(1 - 1/b^2))` per adjacent pair: the mixing that rebuilds
    /// each weaker output from the stronger one plus fresh unit noise.
    pub mixing: Vec<(f64, f64)>,
}

/// Detect whether the gain matrix has (numerical) rank one and return the
/// induced degraded ordering, strongest receiver first.
///
/// Each row must be a scalar multiple of a common direction; `tol` is
/// relative to the row magnitude. Ties in strength keep the lower receiver
/// index first.
pub fn check_rank_one_degraded(
    net: &GaussianChannel,
    tol: f64,
) -> Result<Option<DegradedChain>> {
    let rows = &net.gains;
    if rows.is_empty() {
        return Err(Error::Invalid("empty gain matrix".into()));
    }
    for (j, row) in rows.iter().enumerate() {
        if row.iter().all(|&v| v == 0.0) {
            return Err(Error::ZeroGainRow(j + 1));
        }
    }
    let norm_inf = |r: &[f64]| r.iter().fold(0.0f64, |m, &v| m.max(v.abs()));
    let reference = rows
        .iter()
        .enumerate()
        .max_by(|(_, a), (_, b)| norm_inf(a).partial_cmp(&norm_inf(b)).unwrap())
        .map(|(i, _)| i)
        .unwrap();
    let r = &rows[reference];
    let rr: f64 = r.iter().map(|v| v * v).sum();
    let mut scales = Vec::with_capacity(rows.len());
    for row in rows {
        let c: f64 = row.iter().zip(r).map(|(a, b)| a * b).sum::<f64>() / rr;
        let resid = row
            .iter()
            .zip(r)
            .fold(0.0f64, |m, (a, b)| m.max((a - c * b).abs()));
        if resid > tol * norm_inf(row).max(1.0) {
            return Ok(None);
        }
        scales.push(c);
    }
    let mut order: Vec<usize> = (1..=rows.len()).collect();
    order.sort_by(|&a, &b| {
        scales[b - 1]
            .abs()
            .partial_cmp(&scales[a - 1].abs())
            .unwrap()
            .then(a.cmp(&b))
    });
    let mut ratios = Vec::new();
    let mut mixing = Vec::new();
    for pair in order.windows(2) {
        let b = scales[pair[0] - 1] / scales[pair[1] - 1];
        if b.abs() < 1.0 - tol {
            return Ok(None);
        }
        ratios.push(b);
        mixing.push((1.0 / b, (1.0 - 1.0 / (b * b)).max(0.0).sqrt()));
    }
    Ok(Some(DegradedChain {
        order,
        ratios,
        mixing,
    }))
}

/// Inputs and auxiliaries as linear combinations of independent unit-variance
/// Gaussian factors. Variable names use the crate's rendering (`X_1`,
/// `W_{1,2}`, ...); the rows span a common factor space, so the implied
/// covariance is positive semidefinite by construction.
#[derive(Clone, Debug)]
pub struct GaussianParameterization {
    pub dim: usize,
    pub vars: Vec<(String, Vec<f64>)>,
}

impl GaussianParameterization {
    pub fn new(dim: usize, vars: Vec<(String, Vec<f64>)>) -> Result<Self> {
        for (name, row) in &vars {
            if row.len() != dim {
                return Err(Error::Invalid(format!(
                    "coefficient row for {name} has length {}, expected {dim}",
                    row.len()
                )));
            }
        }
        Ok(GaussianParameterization { dim, vars })
    }

    fn lookup(&self, name: &str) -> Option<&Vec<f64>> {
        self.vars.iter().find(|(n, _)| n == name).map(|(_, r)| r)
    }

    fn resolve(&self, var: &VarRef) -> Result<&Vec<f64>> {
        let candidates: Vec<String> = match var {
            VarRef::Message(m) => {
                vec![m.render(), VarRef::Codeword(m.tx.clone()).render()]
            }
            other => vec![other.render()],
        };
        for name in &candidates {
            if let Some(row) = self.lookup(name) {
                return Ok(row);
            }
        }
        Err(Error::Invalid(format!(
            "parameterization does not define {}",
            candidates[0]
        )))
    }

    /// E[v^2] for a defined variable.
    pub fn power(&self, name: &str) -> Option<f64> {
        self.lookup(name)
            .map(|row| row.iter().map(|c| c * c).sum())
    }

    /// Equal-power-split default: one independent factor per message, each
    /// input the scaled sum of the factors of the messages it carries
    /// (`carried[i]` holds factor indices for transmitter `i+1`).
    pub fn equal_power_split(
        carried: &[Vec<usize>],
        message_names: &[String],
        powers: &[f64],
    ) -> GaussianParameterization {
        let dim = message_names.len();
        let mut vars: Vec<(String, Vec<f64>)> = message_names
            .iter()
            .enumerate()
            .map(|(k, name)| {
                let mut row = vec![0.0; dim];
                row[k] = 1.0;
                (name.clone(), row)
            })
            .collect();
        for (i, msgs) in carried.iter().enumerate() {
            let mut row = vec![0.0; dim];
            if !msgs.is_empty() {
                let scale = (powers[i] / msgs.len() as f64).sqrt();
                for &k in msgs {
                    row[k] = scale;
                }
            }
            vars.push((format!("X_{}", i + 1), row));
        }
        GaussianParameterization { dim, vars }
    }
}

/// log2-determinant of the (regularized) Gram matrix of `rows`, via
/// Cholesky. Callers keep these Grams well conditioned: every output row
/// carries a private unit-variance noise axis.
fn log_det_gram(rows: &[Vec<f64>]) -> f64 {
    if rows.is_empty() {
        return 0.0;
    }
    let n = rows.len();
    let mut cov = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in 0..=i {
            let dot: f64 = rows[i].iter().zip(&rows[j]).map(|(a, b)| a * b).sum();
            cov[i][j] = dot;
            cov[j][i] = dot;
        }
        cov[i][i] += COV_REGULARIZATION;
    }
    // In-place lower Cholesky; the log-determinant accumulates the squared
    // diagonal before the square root.
    let mut logdet = 0.0;
    for i in 0..n {
        for j in 0..=i {
            let dot: f64 = (0..j).map(|k| cov[i][k] * cov[j][k]).sum();
            let sum = cov[i][j] - dot;
            if i == j {
                let d = sum.max(COV_REGULARIZATION);
                cov[i][i] = d.sqrt();
                logdet += d.ln();
            } else {
                cov[i][j] = sum / cov[j][j];
            }
        }
    }
    logdet / std::f64::consts::LN_2
}

/// Orthonormal basis of the row span, dropping directions whose residual is
/// negligible relative to the original row.
fn orthonormal_basis(rows: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let mut basis: Vec<Vec<f64>> = Vec::new();
    for row in rows {
        let mut v = row.clone();
        let orig: f64 = v.iter().map(|x| x * x).sum();
        for b in &basis {
            let dot: f64 = v.iter().zip(b).map(|(a, c)| a * c).sum();
            for (x, c) in v.iter_mut().zip(b) {
                *x -= dot * c;
            }
        }
        let norm_sq: f64 = v.iter().map(|x| x * x).sum();
        if norm_sq > orig.max(1e-300) * 1e-24 {
            let norm = norm_sq.sqrt();
            for x in v.iter_mut() {
                *x /= norm;
            }
            basis.push(v);
        }
    }
    basis
}

/// Residuals of `rows` after projecting out the span of `onto`.
fn project_out(rows: &[Vec<f64>], onto: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let basis = orthonormal_basis(onto);
    rows.iter()
        .map(|row| {
            let mut v = row.clone();
            for b in &basis {
                let dot: f64 = v.iter().zip(b).map(|(a, c)| a * c).sum();
                for (x, c) in v.iter_mut().zip(b) {
                    *x -= dot * c;
                }
            }
            v
        })
        .collect()
}

/// `I(A; B | C)` for jointly Gaussian rows, as `h(B|C) - h(B|A,C)`.
///
/// Conditioning is projection onto the orthogonal complement, so degenerate
/// (deterministically related) `A` and `C` rows are handled exactly; the `B`
/// rows keep their private unit-noise axes, which keeps both Gram
/// determinants well conditioned.
fn gaussian_mi(a: &[Vec<f64>], b: &[Vec<f64>], c: &[Vec<f64>]) -> f64 {
    if a.is_empty() || b.is_empty() {
        return 0.0;
    }
    let b_given_c = project_out(b, c);
    let mut ac = c.to_vec();
    ac.extend(a.iter().cloned());
    let b_given_ac = project_out(b, &ac);
    let value = 0.5 * (log_det_gram(&b_given_c) - log_det_gram(&b_given_ac));
    value.max(0.0)
}

/// Evaluate a rate expression on a Gaussian network at a fixed
/// parameterization: each term is a conditional mutual information computed
/// from covariance determinant ratios, in bits. The time-share variable is
/// treated as a constant.
pub fn evaluate_gaussian_expr(
    expr: &RateExpression,
    param: &GaussianParameterization,
    net: &GaussianChannel,
) -> Result<f64> {
    let k2 = net.gains.len();
    let dim = param.dim + k2;
    let extend = |row: &Vec<f64>| -> Vec<f64> {
        let mut out = vec![0.0; dim];
        out[..row.len()].copy_from_slice(row);
        out
    };
    // Output rows: gains applied to the input rows plus a private noise axis.
    let mut outputs = Vec::with_capacity(k2);
    for (j, gains) in net.gains.iter().enumerate() {
        let mut row = vec![0.0; dim];
        for (i, &g) in gains.iter().enumerate() {
            let x = param
                .lookup(&format!("X_{}", i + 1))
                .ok_or_else(|| Error::Invalid(format!("parameterization misses X_{}", i + 1)))?;
            for (k, &c) in x.iter().enumerate() {
                row[k] += g * c;
            }
        }
        row[param.dim + j] = 1.0;
        outputs.push(row);
    }
    let var_rows = |vars: &[VarRef]| -> Result<Vec<Vec<f64>>> {
        let mut rows = Vec::new();
        for v in vars {
            if matches!(v, VarRef::TimeShare) {
                continue;
            }
            rows.push(extend(param.resolve(v)?));
        }
        Ok(rows)
    };
    let output_rows = |o: &OutputRef| -> Vec<Vec<f64>> {
        o.receivers()
            .iter()
            .map(|&j| outputs[j - 1].clone())
            .collect()
    };
    let mut total = 0.0;
    for term in &expr.terms {
        let a = var_rows(&term.info)?;
        let b = output_rows(&term.output);
        let c = var_rows(&term.given)?;
        total += gaussian_mi(&a, &b, &c);
    }
    Ok(total)
}

fn sign(x: f64) -> f64 {
    if x >= 0.0 {
        1.0
    } else {
        -1.0
    }
}

/// Parameters of the degraded 4-transmitter / 3-receiver Gaussian network:
/// strongest-receiver gains `a`, degradation ratios `b2, b3 >= 1`, and the
/// transmit powers.
#[derive(Clone, Copy, Debug)]
pub struct FourByThreeParams {
    pub a: [f64; 4],
    pub b2: f64,
    pub b3: f64,
    pub p: [f64; 4],
}

impl FourByThreeParams {
    fn validate(&self) -> Result<()> {
        if !(self.b2 >= 1.0 && self.b3 >= 1.0) {
            return Err(Error::Invalid("degradation ratios must be >= 1".into()));
        }
        if self.p.iter().any(|&x| x < 0.0) || self.a.iter().any(|x| !x.is_finite()) {
            return Err(Error::Invalid(
                "powers must be >= 0 and gains finite".into(),
            ));
        }
        Ok(())
    }

    /// The three-row gain matrix with rows scaled by 1, 1/b2, 1/(b2 b3).
    pub fn channel(&self) -> GaussianChannel {
        let row = |s: f64| self.a.iter().map(|&g| g * s).collect::<Vec<_>>();
        GaussianChannel {
            gains: vec![row(1.0), row(1.0 / self.b2), row(1.0 / (self.b2 * self.b3))],
            powers: self.p.to_vec(),
        }
    }

    /// Closed-form sum-rate objective at correlation parameters `(alpha,
    /// beta)`, `alpha, beta in [0,1]`, `alpha^2 + beta^2 <= 1`: the private
    /// layer of the fourth input at the strongest receiver, the third input's
    /// layer at the middle one, and the fully cooperative layer at the
    /// weakest.
    pub fn objective(&self, alpha: f64, beta: f64) -> f64 {
        let [a1, a2, a3, a4] = self.a;
        let [p1, p2, p3, p4] = self.p;
        let b2sq = self.b2 * self.b2;
        let b23sq = (self.b2 * self.b3) * (self.b2 * self.b3);
        let s = (1.0 - alpha * alpha - beta * beta).max(0.0);
        let leak = a4 * a4 * s * p4;
        let coop3 = {
            let c = a3.abs() * p3.sqrt() + a4.abs() * beta * p4.sqrt();
            c * c
        };
        let coop1 = a1 * a1 * p1
            + a2 * a2 * p2
            + a4 * a4 * alpha * alpha * p4
            + 2.0 * (a1 * a2).abs() * (p1 * p2).sqrt()
            + 2.0 * (a1 * a4).abs() * alpha * (p1 * p4).sqrt()
            + 2.0 * (a2 * a4).abs() * alpha * (p2 * p4).sqrt();
        psi(leak)
            + psi(coop3 / b2sq / (leak / b2sq + 1.0))
            + psi(coop1 / b23sq / ((coop3 + leak) / b23sq + 1.0))
    }

    /// Input construction achieving the objective: the second input rides on
    /// the first, and the fourth splits its power between the two cooperative
    /// directions plus a private remainder. Factors: (first direction, third
    /// direction, private).
    pub fn parameterization(&self, alpha: f64, beta: f64) -> GaussianParameterization {
        let [a1, a2, a3, a4] = self.a;
        let [p1, p2, p3, p4] = self.p;
        let s = (1.0 - alpha * alpha - beta * beta).max(0.0);
        GaussianParameterization {
            dim: 3,
            vars: vec![
                ("X_1".into(), vec![p1.sqrt(), 0.0, 0.0]),
                ("X_2".into(), vec![sign(a1 * a2) * p2.sqrt(), 0.0, 0.0]),
                ("X_3".into(), vec![0.0, p3.sqrt(), 0.0]),
                (
                    "X_4".into(),
                    vec![
                        sign(a1 * a4) * alpha * p4.sqrt(),
                        sign(a3 * a4) * beta * p4.sqrt(),
                        (s * p4).sqrt(),
                    ],
                ),
            ],
        }
    }

    /// Successive-decoding objective in input form, for the covariance
    /// route: `I(X_4; Y_1 | X_1,X_2,X_3) + I(X_3; Y_2 | X_1,X_2) +
    /// I(X_1,X_2; Y_3)`.
    pub fn input_form_terms() -> Vec<MITerm> {
        let x = VarRef::Input;
        vec![
            MITerm::new(vec![x(4)], OutputRef::Receiver(1), vec![x(1), x(2), x(3)]),
            MITerm::new(vec![x(3)], OutputRef::Receiver(2), vec![x(1), x(2)]),
            MITerm::new(vec![x(1), x(2)], OutputRef::Receiver(3), vec![]),
        ]
    }
}

/// Parameters of the 2x2 network where both transmitters cooperatively send
/// a common message to the weaker receiver plus private messages to the
/// stronger one; degraded when `a b = 1` and `|a| >= 1`.
#[derive(Clone, Copy, Debug)]
pub struct TwoByTwoParams {
    pub a: f64,
    pub b: f64,
    pub p1: f64,
    pub p2: f64,
}

impl TwoByTwoParams {
    fn precondition_warnings(&self) -> Vec<String> {
        let mut w = Vec::new();
        if (self.a * self.b - 1.0).abs() > 1e-6 {
            w.push(format!(
                "a*b = {} is not 1: the network is not degraded; value is the formula only",
                self.a * self.b
            ));
        }
        if self.a.abs() < 1.0 {
            w.push("|a| < 1: the first receiver is not the stronger one".into());
        }
        w
    }

    pub fn channel(&self) -> GaussianChannel {
        GaussianChannel {
            gains: vec![vec![1.0, self.a], vec![self.b, 1.0]],
            powers: vec![self.p1, self.p2],
        }
    }

    /// Closed-form objective at `(alpha, beta) in [-1,1]^2`: the private
    /// layers at the strong receiver plus the shared layer at the weak one.
    pub fn objective(&self, alpha: f64, beta: f64) -> f64 {
        let (a, b, p1, p2) = (self.a, self.b, self.p1, self.p2);
        let private = (1.0 - alpha * alpha) * p1 + a * a * (1.0 - beta * beta) * p2;
        let num = b * b * alpha * alpha * p1
            + beta * beta * p2
            + 2.0 * b * alpha * beta * (p1 * p2).sqrt();
        let den = b * b * (1.0 - alpha * alpha) * p1 + (1.0 - beta * beta) * p2 + 1.0;
        psi(private.max(0.0)) + psi(num.max(0.0) / den)
    }

    /// Input construction: both inputs ride on a shared factor with weights
    /// `alpha, beta`, plus private remainders.
    pub fn parameterization(&self, alpha: f64, beta: f64) -> GaussianParameterization {
        let (p1, p2) = (self.p1, self.p2);
        GaussianParameterization {
            dim: 3,
            vars: vec![
                (
                    VarRef::Codeword(IdxSet::from([1, 2])).render(),
                    vec![1.0, 0.0, 0.0],
                ),
                (
                    "X_1".into(),
                    vec![
                        alpha * p1.sqrt(),
                        ((1.0 - alpha * alpha) * p1).max(0.0).sqrt(),
                        0.0,
                    ],
                ),
                (
                    "X_2".into(),
                    vec![
                        beta * p2.sqrt(),
                        0.0,
                        ((1.0 - beta * beta) * p2).max(0.0).sqrt(),
                    ],
                ),
            ],
        }
    }

    /// `I(X_1,X_2; Y_1 | W) + I(W; Y_2)` on the covariance route.
    pub fn input_form_terms() -> Vec<MITerm> {
        let w = VarRef::Codeword(IdxSet::from([1, 2]));
        vec![
            MITerm::new(
                vec![VarRef::Input(1), VarRef::Input(2)],
                OutputRef::Receiver(1),
                vec![w.clone()],
            ),
            MITerm::new(vec![w], OutputRef::Receiver(2), vec![]),
        ]
    }
}

/// Result of a closed-form maximization.
#[derive(Clone, Debug, Serialize)]
pub struct ClosedFormResult {
    pub value: f64,
    pub alpha: f64,
    pub beta: f64,
    pub warnings: Vec<String>,
}

/// Grid resolution of the 2-D optimizer (201 points per axis).
pub const GRID_POINTS: usize = 201;

/// Maximize a smooth objective over `[lo,hi]^2` intersected with `feasible`:
/// uniform grid then coordinate-descent polish with shrinking step
/// (terminates below 1e-8). The grid scan runs data-parallel; ties keep the
/// lowest grid index.
pub fn maximize_2d(
    f: &(dyn Fn(f64, f64) -> f64 + Sync),
    lo: f64,
    hi: f64,
    feasible: &(dyn Fn(f64, f64) -> bool + Sync),
) -> (f64, f64, f64) {
    let n = GRID_POINTS;
    let coord = |k: usize| lo + (hi - lo) * k as f64 / (n - 1) as f64;
    let best = (0..n * n)
        .into_par_iter()
        .filter_map(|idx| {
            let (i, j) = (idx / n, idx % n);
            let (x, y) = (coord(i), coord(j));
            feasible(x, y).then(|| (f(x, y), idx))
        })
        .reduce(
            || (f64::NEG_INFINITY, usize::MAX),
            |a, b| {
                if b.0 > a.0 || (b.0 == a.0 && b.1 < a.1) {
                    b
                } else {
                    a
                }
            },
        );
    let (mut value, idx) = best;
    let (mut x, mut y) = (coord(idx / n), coord(idx % n));
    let mut step = (hi - lo) / (n - 1) as f64;
    while step >= 1e-8 {
        let mut improved = false;
        for (dx, dy) in [(step, 0.0), (-step, 0.0), (0.0, step), (0.0, -step)] {
            let (nx, ny) = ((x + dx).clamp(lo, hi), (y + dy).clamp(lo, hi));
            if !feasible(nx, ny) {
                continue;
            }
            let v = f(nx, ny);
            if v > value {
                value = v;
                x = nx;
                y = ny;
                improved = true;
            }
        }
        if !improved {
            step *= 0.5;
        }
    }
    (value, x, y)
}

/// 1-D restriction of the optimizer: grid plus shrinking-step polish.
pub fn maximize_1d(f: &dyn Fn(f64) -> f64, lo: f64, hi: f64) -> f64 {
    let n = GRID_POINTS * 10;
    let coord = |k: usize| lo + (hi - lo) * k as f64 / (n - 1) as f64;
    let mut best = f64::NEG_INFINITY;
    let mut x = lo;
    for k in 0..n {
        let v = f(coord(k));
        if v > best {
            best = v;
            x = coord(k);
        }
    }
    let mut step = (hi - lo) / (n - 1) as f64;
    while step >= 1e-8 {
        let mut improved = false;
        for nx in [(x + step).clamp(lo, hi), (x - step).clamp(lo, hi)] {
            let v = f(nx);
            if v > best {
                best = v;
                x = nx;
                improved = true;
            }
        }
        if !improved {
            step *= 0.5;
        }
    }
    best
}

/// Exact sum-rate of the degraded 4x3 network: maximize the closed form over
/// the quarter disc `alpha, beta in [0,1]`, `alpha^2 + beta^2 <= 1`.
pub fn prop4_capacity(params: &FourByThreeParams) -> Result<ClosedFormResult> {
    params.validate()?;
    let f = |a: f64, b: f64| params.objective(a, b);
    let feasible = |a: f64, b: f64| a * a + b * b <= 1.0 + 1e-12;
    let (value, alpha, beta) = maximize_2d(&f, 0.0, 1.0, &feasible);
    Ok(ClosedFormResult {
        value,
        alpha,
        beta,
        warnings: Vec::new(),
    })
}

/// Exact sum-rate of the degraded 2x2 common-message network: maximize the
/// closed form over `alpha, beta in [-1,1]`. A violated degradedness
/// precondition produces a warning, not an error.
pub fn prop5_capacity(params: &TwoByTwoParams) -> Result<ClosedFormResult> {
    if params.p1 < 0.0 || params.p2 < 0.0 {
        return Err(Error::Invalid("powers must be >= 0".into()));
    }
    let f = |a: f64, b: f64| params.objective(a, b);
    let (value, alpha, beta) = maximize_2d(&f, -1.0, 1.0, &|_, _| true);
    Ok(ClosedFormResult {
        value,
        alpha,
        beta,
        warnings: params.precondition_warnings(),
    })
}

/// One row of the power sweep.
#[derive(Clone, Debug, Serialize)]
pub struct SweepRow {
    pub p: f64,
    pub optimal: f64,
    /// Maximum with the first input fully committed to the shared factor.
    pub alpha1: f64,
    /// Maximum with the second input fully committed to the shared factor.
    pub beta1: f64,
}

/// Sweep the 2x2 closed form over a power range with `p1 = P` and
/// `p2 = P / ratio`, reporting the unconstrained optimum next to the two
/// boundary-restricted optima.
pub fn sweep_prop5(
    a: f64,
    b: f64,
    ratio: f64,
    p_min: f64,
    p_max: f64,
    points: usize,
) -> Result<Vec<SweepRow>> {
    if points == 0 {
        return Err(Error::Invalid("sweep needs at least one point".into()));
    }
    if ratio <= 0.0 {
        return Err(Error::Invalid("power ratio must be positive".into()));
    }
    let mut rows = Vec::with_capacity(points);
    for k in 0..points {
        let p = if points == 1 {
            p_min
        } else {
            p_min + (p_max - p_min) * k as f64 / (points - 1) as f64
        };
        let params = TwoByTwoParams {
            a,
            b,
            p1: p,
            p2: p / ratio,
        };
        let optimal = prop5_capacity(&params)?.value;
        let alpha1 = maximize_1d(&|beta| params.objective(1.0, beta), -1.0, 1.0);
        let beta1 = maximize_1d(&|alpha| params.objective(alpha, 1.0), -1.0, 1.0);
        rows.push(SweepRow {
            p,
            optimal,
            alpha1,
            beta1,
        });
    }
    Ok(rows)
}

/// CSV rendering of a sweep, 12 significant digits.
pub fn sweep_to_csv(rows: &[SweepRow]) -> String {
    let mut out = String::from("P,optimal,alpha1,beta1\n");
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{}\n",
            fmt_sig12(r.p),
            fmt_sig12(r.optimal),
            fmt_sig12(r.alpha1),
            fmt_sig12(r.beta1)
        ));
    }
    out
}
