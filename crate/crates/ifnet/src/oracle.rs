//! Brute-force verification engine for small finite-alphabet networks.
//!
//! Everything here trades generality for checkability: joint tables are flat
//! mixed-radix arrays, maximization is exhaustive over deterministic encoder
//! tables, and every quantity is in bits.

use crate::error::{Error, Result};
use crate::expr::{MITerm, RateExpression, VarRef};
use crate::net::{DiscreteChannel, MessageLabel, NetworkSpec};
use crate::sumrate::{degraded_prune, sumrate_expression, SumRateMode};
use serde::Serialize;

/// Default exhaustive-enumeration budget (encoder configurations).
pub const ENUMERATION_BUDGET: u128 = 10_000_000;

const LOG2: f64 = std::f64::consts::LN_2;

fn log2(x: f64) -> f64 {
    x.ln() / LOG2
}

/// A joint distribution over named finite variables, stored flat in
/// mixed-radix order with the first variable most significant.
#[derive(Clone, Debug)]
pub struct JointPMF {
    pub vars: Vec<(String, usize)>,
    pub probs: Vec<f64>,
}

impl JointPMF {
    pub fn new(vars: Vec<(String, usize)>, probs: Vec<f64>) -> Result<Self> {
        let size: usize = vars.iter().map(|v| v.1).product();
        if probs.len() != size {
            return Err(Error::Invalid(format!(
                "joint table needs {size} entries, got {}",
                probs.len()
            )));
        }
        if probs.iter().any(|&p| p < 0.0) {
            return Err(Error::Invalid("negative probability".into()));
        }
        let total: f64 = probs.iter().sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::Invalid(format!("joint sums to {total}")));
        }
        Ok(JointPMF { vars, probs })
    }

    fn var_index(&self, name: &str) -> Result<usize> {
        self.vars
            .iter()
            .position(|(n, _)| n == name)
            .ok_or_else(|| Error::Invalid(format!("unknown variable {name}")))
    }

    fn strides(&self) -> Vec<usize> {
        let mut strides = vec![1; self.vars.len()];
        for i in (0..self.vars.len().saturating_sub(1)).rev() {
            strides[i] = strides[i + 1] * self.vars[i + 1].1;
        }
        strides
    }

    /// Entropy (bits) of the marginal over `var_ids`.
    fn marginal_entropy(&self, var_ids: &[usize]) -> f64 {
        if var_ids.is_empty() {
            return 0.0;
        }
        let strides = self.strides();
        let mut dims = Vec::with_capacity(var_ids.len());
        for &v in var_ids {
            dims.push(self.vars[v].1);
        }
        let size: usize = dims.iter().product();
        let mut marg = vec![0.0; size];
        for (idx, &p) in self.probs.iter().enumerate() {
            if p == 0.0 {
                continue;
            }
            let mut key = 0usize;
            for (k, &v) in var_ids.iter().enumerate() {
                let digit = (idx / strides[v]) % self.vars[v].1;
                key = key * dims[k] + digit;
            }
            marg[key] += p;
        }
        -marg
            .iter()
            .filter(|&&p| p > 0.0)
            .map(|&p| p * log2(p))
            .sum::<f64>()
    }

    /// `I(info ; output | given)` in bits.
    pub fn mutual_information(
        &self,
        info: &[&str],
        output: &[&str],
        given: &[&str],
    ) -> Result<f64> {
        let a: Vec<usize> = info
            .iter()
            .map(|n| self.var_index(n))
            .collect::<Result<_>>()?;
        let b: Vec<usize> = output
            .iter()
            .map(|n| self.var_index(n))
            .collect::<Result<_>>()?;
        let c: Vec<usize> = given
            .iter()
            .map(|n| self.var_index(n))
            .collect::<Result<_>>()?;
        for &x in &a {
            if b.contains(&x) || c.contains(&x) {
                return Err(Error::Invalid("overlapping variable sets".into()));
            }
        }
        for &x in &b {
            if c.contains(&x) {
                return Err(Error::Invalid("overlapping variable sets".into()));
            }
        }
        if a.is_empty() || b.is_empty() {
            return Ok(0.0);
        }
        let mut ac = a.clone();
        ac.extend(&c);
        let mut bc = b.clone();
        bc.extend(&c);
        let mut abc = a.clone();
        abc.extend(&b);
        abc.extend(&c);
        let value = self.marginal_entropy(&ac) + self.marginal_entropy(&bc)
            - self.marginal_entropy(&c)
            - self.marginal_entropy(&abc);
        // Tiny negatives are floating-point noise.
        Ok(value.max(0.0))
    }
}

/// Binary entropy in bits.
pub fn binary_entropy(p: f64) -> f64 {
    if p <= 0.0 || p >= 1.0 {
        0.0
    } else {
        -p * log2(p) - (1.0 - p) * log2(1.0 - p)
    }
}

fn check_channel_rows(channel: &[Vec<f64>]) -> Result<()> {
    if channel.is_empty() || channel[0].is_empty() {
        return Err(Error::Invalid("empty channel".into()));
    }
    let cols = channel[0].len();
    for (r, row) in channel.iter().enumerate() {
        if row.len() != cols {
            return Err(Error::Invalid("ragged channel matrix".into()));
        }
        let mut sum = 0.0;
        for (c, &v) in row.iter().enumerate() {
            if v < 0.0 {
                return Err(Error::NegativePmfEntry { row: r, col: c });
            }
            sum += v;
        }
        if (sum - 1.0).abs() > 1e-9 {
            return Err(Error::NonStochasticRow { row: r, sum });
        }
    }
    Ok(())
}

/// Channel capacity (bits) of a discrete memoryless channel `rows[x][y]`.
///
/// Alternating maximization over the input distribution; the duality-gap
/// stopping rule guarantees the result is within `tol` of capacity, and the
/// lower-bound iterates are nondecreasing.
pub fn blahut_arimoto_capacity(channel: &[Vec<f64>], tol: f64) -> Result<f64> {
    check_channel_rows(channel)?;
    let n_in = channel.len();
    let n_out = channel[0].len();
    let mut p = vec![1.0 / n_in as f64; n_in];
    for _ in 0..100_000 {
        // Output distribution under p.
        let mut q = vec![0.0; n_out];
        for x in 0..n_in {
            for y in 0..n_out {
                q[y] += p[x] * channel[x][y];
            }
        }
        // Per-input divergence D(W(.|x) || q).
        let mut d = vec![0.0; n_in];
        for x in 0..n_in {
            for y in 0..n_out {
                let w = channel[x][y];
                if w > 0.0 {
                    d[x] += w * log2(w / q[y]);
                }
            }
        }
        let lower: f64 = (0..n_in).map(|x| p[x] * d[x]).sum();
        let upper = d.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        if upper - lower <= tol {
            return Ok(lower.max(0.0));
        }
        // Multiplicative update.
        let mut next = vec![0.0; n_in];
        let mut total = 0.0;
        for x in 0..n_in {
            next[x] = p[x] * (d[x] * LOG2).exp();
            total += next[x];
        }
        for x in 0..n_in {
            p[x] = next[x] / total;
        }
    }
    Err(Error::Invalid(
        "capacity iteration failed to converge".into(),
    ))
}

fn spectral_norm_sq(a: &[Vec<f64>]) -> f64 {
    // Power iteration on A^T A; a handful of rounds is plenty here.
    let cols = a[0].len();
    let mut v = vec![1.0 / (cols as f64).sqrt(); cols];
    let mut lambda = 0.0;
    for _ in 0..50 {
        let av: Vec<f64> = a
            .iter()
            .map(|row| row.iter().zip(&v).map(|(x, y)| x * y).sum())
            .collect();
        let mut w = vec![0.0; cols];
        for (row, &avi) in a.iter().zip(&av) {
            for (j, &x) in row.iter().enumerate() {
                w[j] += x * avi;
            }
        }
        let norm = w.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm == 0.0 {
            return 0.0;
        }
        lambda = norm;
        for (vi, wi) in v.iter_mut().zip(&w) {
            *vi = wi / norm;
        }
    }
    lambda
}

/// Euclidean projection of `v` onto the probability simplex.
fn project_simplex(v: &mut [f64]) {
    let mut sorted = v.to_vec();
    sorted.sort_by(|a, b| b.partial_cmp(a).unwrap());
    let mut cum = 0.0;
    let mut theta = 0.0;
    for (k, &u) in sorted.iter().enumerate() {
        cum += u;
        let t = (cum - 1.0) / (k + 1) as f64;
        if u - t > 0.0 {
            theta = t;
        }
    }
    for x in v.iter_mut() {
        *x = (*x - theta).max(0.0);
    }
}

/// Search for a stochastic map `T` turning the stronger channel into the
/// weaker one: `weak ≈ strong · T` with each row of `T` a distribution over
/// the weak output alphabet.
///
/// Projected-gradient least squares (step 0.5/L, at most 10^4 iterations);
/// returns the map when the residual ∞-norm is within `tol`, `None` when the
/// weaker channel cannot be produced by post-processing the stronger one.
pub fn stochastic_degradedness_fit(
    strong: &[Vec<f64>],
    weak: &[Vec<f64>],
    tol: f64,
) -> Result<Option<Vec<Vec<f64>>>> {
    check_channel_rows(strong)?;
    check_channel_rows(weak)?;
    if strong.len() != weak.len() {
        return Err(Error::AlphabetMismatch(format!(
            "{} vs {} input rows",
            strong.len(),
            weak.len()
        )));
    }
    let n_a = strong[0].len();
    let n_b = weak[0].len();
    let lipschitz = 2.0 * spectral_norm_sq(strong);
    let step = if lipschitz > 0.0 { 0.5 / lipschitz } else { 0.0 };
    let mut t = vec![vec![1.0 / n_b as f64; n_b]; n_a];
    let residual_inf = |t: &Vec<Vec<f64>>| -> f64 {
        let mut max = 0.0f64;
        for (x, srow) in strong.iter().enumerate() {
            for yb in 0..n_b {
                let mut r = -weak[x][yb];
                for ya in 0..n_a {
                    r += srow[ya] * t[ya][yb];
                }
                max = max.max(r.abs());
            }
        }
        max
    };
    for _ in 0..10_000 {
        if residual_inf(&t) <= tol {
            return Ok(Some(t));
        }
        // gradient of ||strong*T - weak||_F^2
        let mut grad = vec![vec![0.0; n_b]; n_a];
        for (x, srow) in strong.iter().enumerate() {
            for yb in 0..n_b {
                let mut r = -weak[x][yb];
                for ya in 0..n_a {
                    r += srow[ya] * t[ya][yb];
                }
                for ya in 0..n_a {
                    grad[ya][yb] += 2.0 * srow[ya] * r;
                }
            }
        }
        for ya in 0..n_a {
            for yb in 0..n_b {
                t[ya][yb] -= step * grad[ya][yb];
            }
            project_simplex(&mut t[ya]);
        }
    }
    Ok(if residual_inf(&t) <= tol { Some(t) } else { None })
}

pub(crate) fn mixed_radix_decode(mut idx: usize, dims: &[usize]) -> Vec<usize> {
    let mut out = vec![0; dims.len()];
    for k in (0..dims.len()).rev() {
        out[k] = idx % dims[k];
        idx /= dims[k];
    }
    out
}

pub(crate) fn mixed_radix_encode(digits: &[usize], dims: &[usize]) -> usize {
    digits
        .iter()
        .zip(dims)
        .fold(0, |acc, (&d, &n)| acc * n + d)
}

/// Per-receiver marginal channel `P(y_j | joint input)` as rows over the
/// joint input index.
pub fn receiver_marginal(d: &DiscreteChannel, receiver: usize) -> Vec<Vec<f64>> {
    let n_in = d.n_inputs();
    let mut rows = vec![vec![0.0; d.out_alphabets[receiver - 1]]; n_in];
    for (x, row) in d.pmf.iter().enumerate() {
        for (y_joint, &p) in row.iter().enumerate() {
            let digits = mixed_radix_decode(y_joint, &d.out_alphabets);
            rows[x][digits[receiver - 1]] += p;
        }
    }
    rows
}

/// Dependence pattern of one factor in a chain factorization of the channel.
pub struct ChainFactor {
    /// Receiver whose conditional this factor describes.
    pub target: usize,
    /// Earlier receivers (in chain order) the conditional may depend on.
    pub out_deps: Vec<usize>,
    /// Transmitters the conditional may depend on (1-based).
    pub in_deps: Vec<usize>,
}

/// Check that the channel factorizes as a chain of conditionals with the
/// given dependence patterns, in the order the factors are listed.
///
/// Each factor is tested on the support: the chain-rule conditional
/// `P(y_target | previous outputs, x)` must agree, within `tol`, across all
/// assignments that coincide on the declared dependencies.
pub fn chain_factorization_holds(d: &DiscreteChannel, factors: &[ChainFactor], tol: f64) -> bool {
    let k1 = d.in_alphabets.len();
    let n_in = d.n_inputs();
    let order: Vec<usize> = factors.iter().map(|f| f.target).collect();
    for (step, factor) in factors.iter().enumerate() {
        let prev = &order[..step];
        let t_dim = d.out_alphabets[factor.target - 1];
        let prev_dims: Vec<usize> = prev.iter().map(|&j| d.out_alphabets[j - 1]).collect();
        let prev_size: usize = prev_dims.iter().product();
        // Reference conditional keyed by (declared out deps, declared in deps).
        let mut refs: std::collections::HashMap<Vec<usize>, Vec<(bool, f64)>> =
            std::collections::HashMap::new();
        for x in 0..n_in {
            let x_digits = mixed_radix_decode(x, &d.in_alphabets);
            let mut joint = vec![0.0; prev_size * t_dim];
            let mut base = vec![0.0; prev_size];
            for (y_joint, &p) in d.pmf[x].iter().enumerate() {
                if p == 0.0 {
                    continue;
                }
                let y = mixed_radix_decode(y_joint, &d.out_alphabets);
                let prev_digits: Vec<usize> = prev.iter().map(|&j| y[j - 1]).collect();
                let pk = mixed_radix_encode(&prev_digits, &prev_dims);
                joint[pk * t_dim + y[factor.target - 1]] += p;
                base[pk] += p;
            }
            for pk in 0..prev_size {
                if base[pk] <= 0.0 {
                    continue;
                }
                let prev_digits = mixed_radix_decode(pk, &prev_dims);
                let mut key: Vec<usize> = factor
                    .out_deps
                    .iter()
                    .map(|dep| {
                        let pos = prev.iter().position(|j| j == dep).expect("dep precedes");
                        prev_digits[pos]
                    })
                    .collect();
                for i in 1..=k1 {
                    if factor.in_deps.contains(&i) {
                        key.push(x_digits[i - 1]);
                    }
                }
                let entry = refs
                    .entry(key)
                    .or_insert_with(|| vec![(false, 0.0); t_dim]);
                for v in 0..t_dim {
                    let cond = joint[pk * t_dim + v] / base[pk];
                    let (seen, value) = entry[v];
                    if !seen {
                        entry[v] = (true, cond);
                    } else if (cond - value).abs() > tol {
                        return false;
                    }
                }
            }
        }
    }
    true
}

/// True when the channel is physically degraded along `order` (strongest
/// receiver first): inputs -> Y_order[0] -> Y_order[1] -> ... forms a Markov
/// chain on the support of the table.
pub fn is_physically_degraded(d: &DiscreteChannel, order: &[usize], tol: f64) -> bool {
    let factors: Vec<ChainFactor> = order
        .iter()
        .enumerate()
        .map(|(p, &j)| ChainFactor {
            target: j,
            out_deps: if p == 0 { vec![] } else { vec![order[p - 1]] },
            in_deps: if p == 0 {
                (1..=d.in_alphabets.len()).collect()
            } else {
                vec![]
            },
        })
        .collect();
    chain_factorization_holds(d, &factors, tol)
}

/// One fully specified transmission scheme: uniform message alphabets plus a
/// deterministic encoder table per transmitter.
#[derive(Clone, Debug, Serialize)]
pub struct EncoderAssignment {
    pub messages: Vec<MessageLabel>,
    pub alphabets: Vec<usize>,
    pub tables: Vec<EncoderTable>,
}

/// `table[mixed-radix index of the carried message values] = input symbol`.
#[derive(Clone, Debug, Serialize)]
pub struct EncoderTable {
    pub transmitter: usize,
    /// Indices into the assignment's message list.
    pub carries: Vec<usize>,
    pub table: Vec<usize>,
}

impl EncoderAssignment {
    /// Joint distribution over (messages, receiver outputs) induced by the
    /// assignment through the channel.
    pub fn joint(&self, d: &DiscreteChannel) -> JointPMF {
        let mut vars: Vec<(String, usize)> = self
            .messages
            .iter()
            .zip(&self.alphabets)
            .map(|(m, &a)| (m.render(), a))
            .collect();
        let k2 = d.out_alphabets.len();
        for j in 1..=k2 {
            vars.push((format!("Y_{j}"), d.out_alphabets[j - 1]));
        }
        let msg_size: usize = self.alphabets.iter().product();
        let out_size = d.n_outputs();
        let mut probs = vec![0.0; msg_size * out_size];
        let p_m = 1.0 / msg_size as f64;
        for mi in 0..msg_size {
            let m_digits = mixed_radix_decode(mi, &self.alphabets);
            let mut x_digits = vec![0usize; d.in_alphabets.len()];
            for t in &self.tables {
                let local: Vec<usize> = t.carries.iter().map(|&c| m_digits[c]).collect();
                let local_dims: Vec<usize> =
                    t.carries.iter().map(|&c| self.alphabets[c]).collect();
                x_digits[t.transmitter - 1] = t.table[mixed_radix_encode(&local, &local_dims)];
            }
            let x = mixed_radix_encode(&x_digits, &d.in_alphabets);
            let row = &d.pmf[x];
            let base = mi * out_size;
            for (y, &p) in row.iter().enumerate() {
                probs[base + y] += p_m * p;
            }
        }
        JointPMF { vars, probs }
    }
}

fn term_var_names(vars: &[VarRef]) -> Result<Vec<String>> {
    vars.iter()
        .map(|v| match v {
            VarRef::Message(m) => Ok(m.render()),
            VarRef::TimeShare => Err(Error::Invalid(
                "time-share variable is dropped in oracle evaluations".into(),
            )),
            other => Err(Error::Invalid(format!(
                "oracle evaluation supports message variables only, got {}",
                other.render()
            ))),
        })
        .collect()
}

/// Evaluate one term against a joint over messages and outputs.
pub fn evaluate_term(joint: &JointPMF, term: &MITerm) -> Result<f64> {
    let info = term_var_names(&term.info)?;
    let output: Vec<String> = term
        .output
        .receivers()
        .iter()
        .map(|j| format!("Y_{j}"))
        .collect();
    let given = term_var_names(&term.given)?;
    let info_refs: Vec<&str> = info.iter().map(|s| s.as_str()).collect();
    let out_refs: Vec<&str> = output.iter().map(|s| s.as_str()).collect();
    let given_refs: Vec<&str> = given.iter().map(|s| s.as_str()).collect();
    joint.mutual_information(&info_refs, &out_refs, &given_refs)
}

/// Evaluate a full expression (sum of terms) against a joint.
pub fn evaluate_expression(joint: &JointPMF, expr: &RateExpression) -> Result<f64> {
    let mut total = 0.0;
    for t in &expr.terms {
        total += evaluate_term(joint, t)?;
    }
    Ok(total)
}

/// The space of deterministic encoder configurations of an expression's law
/// at given per-message alphabet caps.
pub struct EncoderSpace {
    pub messages: Vec<MessageLabel>,
    pub alphabets: Vec<usize>,
    /// Per transmitter: indices of the messages it carries.
    pub carries: Vec<Vec<usize>>,
    pub input_alphabets: Vec<usize>,
}

impl EncoderSpace {
    pub fn from_expression(
        expr: &RateExpression,
        d: &DiscreteChannel,
        caps: &[usize],
    ) -> Result<Self> {
        let messages: Vec<MessageLabel> = expr
            .law
            .independent
            .iter()
            .map(|v| match v {
                VarRef::Message(m) => Ok(m.clone()),
                other => Err(Error::Invalid(format!(
                    "law factor {} is not a message",
                    other.render()
                ))),
            })
            .collect::<Result<_>>()?;
        if caps.len() != messages.len() {
            return Err(Error::Invalid(format!(
                "expected {} alphabet caps, got {}",
                messages.len(),
                caps.len()
            )));
        }
        let carries: Vec<Vec<usize>> = expr
            .law
            .encoders
            .iter()
            .map(|e| {
                e.given
                    .iter()
                    .filter_map(|v| match v {
                        VarRef::Message(m) => messages.iter().position(|x| x == m),
                        _ => None,
                    })
                    .collect()
            })
            .collect();
        Ok(EncoderSpace {
            messages,
            alphabets: caps.to_vec(),
            carries,
            input_alphabets: d.in_alphabets.clone(),
        })
    }

    /// Number of table choices per transmitter.
    fn table_counts(&self) -> Vec<u128> {
        self.carries
            .iter()
            .enumerate()
            .map(|(i, carried)| {
                let domain: usize = carried.iter().map(|&c| self.alphabets[c]).product();
                (self.input_alphabets[i] as u128).pow(domain as u32)
            })
            .collect()
    }

    pub fn total_configs(&self) -> u128 {
        self.table_counts().iter().product()
    }

    /// Decode the configuration with the given mixed-radix index.
    pub fn assignment(&self, config: u128) -> EncoderAssignment {
        let counts = self.table_counts();
        let mut digits = vec![0u128; counts.len()];
        let mut rest = config;
        for k in (0..counts.len()).rev() {
            digits[k] = rest % counts[k];
            rest /= counts[k];
        }
        let tables = self
            .carries
            .iter()
            .enumerate()
            .map(|(i, carried)| {
                let domain: usize = carried.iter().map(|&c| self.alphabets[c]).product();
                let base = self.input_alphabets[i] as u128;
                let mut t = vec![0usize; domain];
                let mut v = digits[i];
                for slot in (0..domain).rev() {
                    t[slot] = (v % base) as usize;
                    v /= base;
                }
                EncoderTable {
                    transmitter: i + 1,
                    carries: carried.clone(),
                    table: t,
                }
            })
            .collect();
        EncoderAssignment {
            messages: self.messages.clone(),
            alphabets: self.alphabets.clone(),
            tables,
        }
    }
}

/// Result of an exhaustive maximization.
#[derive(Debug, Serialize)]
pub struct OracleReport {
    pub value: f64,
    pub assignment: EncoderAssignment,
    pub per_term: Vec<TermValue>,
}

#[derive(Debug, Serialize)]
pub struct TermValue {
    pub term: String,
    pub value: f64,
}

/// Exact maximum of `expr` over all deterministic encoder tables at the given
/// per-message alphabet caps, with uniform message distributions. The value
/// is a lower bound for the cap-free supremum. Ties keep the lowest encoder
/// index.
pub fn maximize_expression(
    expr: &RateExpression,
    spec: &NetworkSpec,
    caps: &[usize],
    budget: u128,
) -> Result<OracleReport> {
    let d = spec.discrete()?;
    let space = EncoderSpace::from_expression(expr, d, caps)?;
    let total = space.total_configs();
    if total > budget {
        return Err(Error::BudgetExceeded {
            needed: total,
            budget,
        });
    }
    let mut best: Option<(f64, u128)> = None;
    for config in 0..total {
        let assignment = space.assignment(config);
        let joint = assignment.joint(d);
        let value = evaluate_expression(&joint, expr)?;
        if best.is_none_or(|(bv, _)| value > bv) {
            best = Some((value, config));
        }
    }
    let (value, config) = best.ok_or(Error::NoMessages)?;
    let assignment = space.assignment(config);
    let joint = assignment.joint(d);
    let per_term = expr
        .terms
        .iter()
        .map(|t| {
            Ok(TermValue {
                term: t.render(),
                value: evaluate_term(&joint, t)?,
            })
        })
        .collect::<Result<_>>()?;
    Ok(OracleReport {
        value,
        assignment,
        per_term,
    })
}

/// Outcome of the pruning-equivalence sweep.
#[derive(Debug, Serialize)]
pub struct PruningCheckReport {
    pub configs_checked: u128,
    /// Minimum of (pruned value - full value) over all configurations;
    /// nonnegative when the collapsed-tuple construction dominates.
    pub min_gap: f64,
    pub max_gap: f64,
    pub dominated_everywhere: bool,
}

/// For every full-message encoder configuration at uniform alphabet `cap`,
/// build the pruned configuration that collapses all messages absorbed by
/// each kept message into one tuple-valued message, and compare the pruned
/// successive-decoding value against the full chain value.
///
/// On a degraded network the pruned configuration can only do better; the
/// report records the observed gap range.
pub fn pruning_equivalence_check(
    spec: &NetworkSpec,
    cap: usize,
    budget: u128,
) -> Result<PruningCheckReport> {
    let d = spec.discrete()?;
    let order = spec.effective_order();
    if !is_physically_degraded(d, &order, 1e-9) {
        return Err(Error::Invalid(
            "pruning check requires a physically degraded channel".into(),
        ));
    }
    let full_expr = sumrate_expression(spec, &order, SumRateMode::Full)?;
    let pruned_expr = sumrate_expression(spec, &order, SumRateMode::Pruned)?;
    let report = degraded_prune(spec, &order)?;

    // Absorption map: every message lands on exactly one kept message. First
    // to the survivor of its transmitter-set group, then (if the survivor was
    // dropped as a satellite) to the widest kept cloud center available at
    // the survivor's position.
    let weakest = |m: &MessageLabel| -> usize {
        m.rx.iter()
            .map(|j| order.iter().position(|&r| r == j).unwrap() + 1)
            .max()
            .unwrap()
    };
    let absorb = |m: &MessageLabel| -> MessageLabel {
        let survivor = report
            .group_choices
            .iter()
            .find(|g| g.tx == m.tx)
            .expect("group exists")
            .chosen
            .clone();
        if report.m_star.contains(&survivor) {
            return survivor;
        }
        let p = weakest(&survivor);
        let pool: Vec<&MessageLabel> = report
            .m_tilde
            .iter()
            .filter(|c| weakest(c) <= p && survivor.tx.is_strict_subset(&c.tx))
            .collect();
        pool.iter()
            .max_by(|a, b| a.tx.len().cmp(&b.tx.len()).then_with(|| b.tx.cmp(&a.tx)))
            .map(|c| (*c).clone())
            .expect("dropped satellite has a kept cloud center")
    };
    let full_space =
        EncoderSpace::from_expression(&full_expr, d, &vec![cap; spec.messages.len()])?;
    let total = full_space.total_configs();
    if total > budget {
        return Err(Error::BudgetExceeded {
            needed: total,
            budget,
        });
    }

    // Index bookkeeping follows each space's own (canonical) message order:
    // absorbed[slot in pruned space] = indices into the full space's list.
    let pruned_order: Vec<MessageLabel> = pruned_expr
        .law
        .independent
        .iter()
        .filter_map(|v| match v {
            VarRef::Message(m) => Some(m.clone()),
            _ => None,
        })
        .collect();
    let mut absorbed: Vec<Vec<usize>> = vec![Vec::new(); pruned_order.len()];
    for (idx, m) in full_space.messages.iter().enumerate() {
        let target = absorb(m);
        let slot = pruned_order
            .iter()
            .position(|s| *s == target)
            .expect("absorption target kept");
        absorbed[slot].push(idx);
    }

    // Pruned message alphabets are the product of what they absorb.
    let pruned_space = EncoderSpace::from_expression(
        &pruned_expr,
        d,
        &absorbed
            .iter()
            .map(|list| cap.pow(list.len() as u32))
            .collect::<Vec<_>>(),
    )?;

    let mut min_gap = f64::INFINITY;
    let mut max_gap = f64::NEG_INFINITY;
    for config in 0..total {
        let full_assignment = full_space.assignment(config);
        let full_value = evaluate_expression(&full_assignment.joint(d), &full_expr)?;

        // The pruned tables replay the full encoders: a tuple value decodes
        // to the values of all absorbed original messages.
        let pruned_assignment =
            collapse_assignment(&full_assignment, &pruned_space, &absorbed, cap);
        let pruned_value = evaluate_expression(&pruned_assignment.joint(d), &pruned_expr)?;

        let gap = pruned_value - full_value;
        min_gap = min_gap.min(gap);
        max_gap = max_gap.max(gap);
    }
    Ok(PruningCheckReport {
        configs_checked: total,
        min_gap,
        max_gap,
        dominated_everywhere: min_gap >= -1e-9,
    })
}

/// Build the pruned assignment whose tuple-valued messages replay a full
/// configuration.
fn collapse_assignment(
    full: &EncoderAssignment,
    pruned_space: &EncoderSpace,
    absorbed: &[Vec<usize>],
    cap: usize,
) -> EncoderAssignment {
    let tables = pruned_space
        .carries
        .iter()
        .enumerate()
        .map(|(i, carried)| {
            let local_dims: Vec<usize> =
                carried.iter().map(|&c| pruned_space.alphabets[c]).collect();
            let domain: usize = local_dims.iter().product();
            let mut table = vec![0usize; domain];
            for (slot, entry) in table.iter_mut().enumerate() {
                let tuple_vals = mixed_radix_decode(slot, &local_dims);
                // Recover every original message value carried by this
                // transmitter from the tuples.
                let mut full_vals = vec![0usize; full.messages.len()];
                for (pos, &kept_idx) in carried.iter().enumerate() {
                    let originals = &absorbed[kept_idx];
                    let dims = vec![cap; originals.len()];
                    let digits = mixed_radix_decode(tuple_vals[pos], &dims);
                    for (d_idx, &orig) in originals.iter().enumerate() {
                        full_vals[orig] = digits[d_idx];
                    }
                }
                let full_table = &full.tables[i];
                let local: Vec<usize> =
                    full_table.carries.iter().map(|&c| full_vals[c]).collect();
                let dims: Vec<usize> = full_table
                    .carries
                    .iter()
                    .map(|&c| full.alphabets[c])
                    .collect();
                *entry = full_table.table[mixed_radix_encode(&local, &dims)];
            }
            EncoderTable {
                transmitter: i + 1,
                carries: carried.clone(),
                table,
            }
        })
        .collect();
    EncoderAssignment {
        messages: pruned_space.messages.clone(),
        alphabets: pruned_space.alphabets.clone(),
        tables,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::net::parse_network_spec;

    fn bsc(p: f64) -> Vec<Vec<f64>> {
        vec![vec![1.0 - p, p], vec![p, 1.0 - p]]
    }

    /// Cascade composition: rows of `a` through map `b`.
    fn compose(a: &[Vec<f64>], b: &[Vec<f64>]) -> Vec<Vec<f64>> {
        a.iter()
            .map(|row| {
                let mut out = vec![0.0; b[0].len()];
                for (ya, &p) in row.iter().enumerate() {
                    for (yb, &q) in b[ya].iter().enumerate() {
                        out[yb] += p * q;
                    }
                }
                out
            })
            .collect()
    }

    #[test]
    fn mi_of_independent_bits_is_zero() {
        let joint = JointPMF::new(
            vec![("A".into(), 2), ("B".into(), 2)],
            vec![0.25, 0.25, 0.25, 0.25],
        )
        .unwrap();
        let mi = joint.mutual_information(&["A"], &["B"], &[]).unwrap();
        assert!(mi.abs() < 1e-12);
    }

    #[test]
    fn mi_of_copied_bit_is_one() {
        let joint = JointPMF::new(
            vec![("X".into(), 2), ("Y".into(), 2)],
            vec![0.5, 0.0, 0.0, 0.5],
        )
        .unwrap();
        let mi = joint.mutual_information(&["X"], &["Y"], &[]).unwrap();
        assert!((mi - 1.0).abs() < 1e-12);
    }

    #[test]
    fn mi_matches_bsc_closed_form() {
        let p = 0.11;
        let mut probs = Vec::new();
        for x in 0..2 {
            for y in 0..2 {
                let w = if x == y { 1.0 - p } else { p };
                probs.push(0.5 * w);
            }
        }
        let joint = JointPMF::new(vec![("X".into(), 2), ("Y".into(), 2)], probs).unwrap();
        let mi = joint.mutual_information(&["X"], &["Y"], &[]).unwrap();
        assert!((mi - (1.0 - binary_entropy(p))).abs() < 1e-12);
    }

    #[test]
    fn mi_rejects_unknown_variable() {
        let joint = JointPMF::new(vec![("A".into(), 2)], vec![0.5, 0.5]).unwrap();
        assert!(joint.mutual_information(&["A"], &["Z"], &[]).is_err());
    }

    #[test]
    fn ba_noiseless_binary() {
        let c = blahut_arimoto_capacity(&[vec![1.0, 0.0], vec![0.0, 1.0]], 1e-9).unwrap();
        assert!((c - 1.0).abs() < 1e-6);
    }

    #[test]
    fn ba_bsc() {
        for p in [0.05, 0.11, 0.25] {
            let c = blahut_arimoto_capacity(&bsc(p), 1e-9).unwrap();
            assert!((c - (1.0 - binary_entropy(p))).abs() < 1e-6, "p={p}");
        }
    }

    #[test]
    fn ba_z_channel() {
        let c = blahut_arimoto_capacity(&[vec![1.0, 0.0], vec![0.5, 0.5]], 1e-9).unwrap();
        let p: f64 = 0.5;
        let expect = log2(1.0 + (1.0 - p) * p.powf(p / (1.0 - p)));
        assert!((c - expect).abs() < 1e-6);
    }

    #[test]
    fn ba_rejects_bad_rows() {
        assert!(blahut_arimoto_capacity(&[vec![0.9, 0.2]], 1e-9).is_err());
    }

    #[test]
    fn degradedness_fit_recovers_composite() {
        let strong = bsc(0.05);
        let weak = compose(&strong, &bsc(0.1));
        let t = stochastic_degradedness_fit(&strong, &weak, 1e-6)
            .unwrap()
            .expect("constructed cascade is feasible");
        let replay = compose(&strong, &t);
        for (r1, r2) in replay.iter().zip(&weak) {
            for (a, b) in r1.iter().zip(r2) {
                assert!((a - b).abs() < 1e-6);
            }
        }
    }

    #[test]
    fn degradedness_fit_identity_when_equal() {
        let ch = bsc(0.2);
        assert!(stochastic_degradedness_fit(&ch, &ch, 1e-6)
            .unwrap()
            .is_some());
    }

    #[test]
    fn degradedness_fit_rejects_less_noisy_target() {
        let strong = bsc(0.1);
        let weak = bsc(0.05);
        assert!(stochastic_degradedness_fit(&strong, &weak, 1e-6)
            .unwrap()
            .is_none());
    }

    #[test]
    fn degradedness_fit_rejects_alphabet_mismatch() {
        assert!(matches!(
            stochastic_degradedness_fit(&bsc(0.1), &[vec![1.0, 0.0]], 1e-6),
            Err(Error::AlphabetMismatch(_))
        ));
    }

    #[test]
    fn physical_degradedness_detected() {
        // X binary, Y_1 = X exactly, Y_2 = BSC(0.11) of Y_1.
        let spec = parse_network_spec(
            r#"{"k1":1,"k2":2,"messages":[{"tx":[1],"rx":[2]}],
                "discrete":{"in_alphabets":[2],"out_alphabets":[2,2],
                    "pmf":[[0.89,0.11,0.0,0.0],[0.0,0.0,0.11,0.89]]}}"#,
        )
        .unwrap();
        let d = spec.discrete().unwrap();
        assert!(is_physically_degraded(d, &[1, 2], 1e-9));
        assert!(!is_physically_degraded(d, &[2, 1], 1e-9));
    }

    #[test]
    fn maximize_single_message_over_degraded_bc() {
        let spec = parse_network_spec(
            r#"{"k1":1,"k2":2,"messages":[{"tx":[1],"rx":[2]}],
                "discrete":{"in_alphabets":[2],"out_alphabets":[2,2],
                    "pmf":[[0.89,0.11,0.0,0.0],[0.0,0.0,0.11,0.89]]}}"#,
        )
        .unwrap();
        let expr = sumrate_expression(&spec, &[1, 2], SumRateMode::Pruned).unwrap();
        let report = maximize_expression(&expr, &spec, &[2], ENUMERATION_BUDGET).unwrap();
        assert!((report.value - (1.0 - binary_entropy(0.11))).abs() < 1e-9);
    }

    #[test]
    fn maximize_constant_output_is_zero() {
        let spec = parse_network_spec(
            r#"{"k1":1,"k2":1,"messages":[{"tx":[1],"rx":[1]}],
                "discrete":{"in_alphabets":[2],"out_alphabets":[2],
                    "pmf":[[1.0,0.0],[1.0,0.0]]}}"#,
        )
        .unwrap();
        let expr = sumrate_expression(&spec, &[1], SumRateMode::Pruned).unwrap();
        let report = maximize_expression(&expr, &spec, &[2], ENUMERATION_BUDGET).unwrap();
        assert!(report.value.abs() < 1e-12);
    }

    #[test]
    fn maximize_budget_guard() {
        let spec = parse_network_spec(
            r#"{"k1":1,"k2":1,"messages":[{"tx":[1],"rx":[1]}],
                "discrete":{"in_alphabets":[2],"out_alphabets":[2],
                    "pmf":[[1.0,0.0],[0.0,1.0]]}}"#,
        )
        .unwrap();
        let expr = sumrate_expression(&spec, &[1], SumRateMode::Pruned).unwrap();
        assert!(matches!(
            maximize_expression(&expr, &spec, &[2], 2),
            Err(Error::BudgetExceeded { .. })
        ));
    }

    #[test]
    fn maximize_matches_product_distribution_grid() {
        // Two-user degraded setup: Y_1 = (X_1 xor N(0.08), X_2) as a 4-ary
        // pair, Y_2 = second component. Binary encoders at caps 2 reach the
        // same value (up to grid resolution) as scanning all product input
        // distributions on a 1/64 grid.
        let spec = parse_network_spec(
            r#"{"k1":2,"k2":2,"messages":[{"tx":[1],"rx":[1]},{"tx":[2],"rx":[2]}],
                "discrete":{"in_alphabets":[2,2],"out_alphabets":[4,2],
                    "pmf":[
                        [0.92,0.0,0.0,0.0,0.08,0.0,0.0,0.0],
                        [0.0,0.0,0.0,0.92,0.0,0.0,0.0,0.08],
                        [0.08,0.0,0.0,0.0,0.92,0.0,0.0,0.0],
                        [0.0,0.0,0.0,0.08,0.0,0.0,0.0,0.92]]}}"#,
        )
        .unwrap();
        let d = spec.discrete().unwrap();
        let expr = sumrate_expression(&spec, &[1, 2], SumRateMode::Pruned).unwrap();
        let encoder_max = maximize_expression(&expr, &spec, &[2, 2], ENUMERATION_BUDGET)
            .unwrap()
            .value;

        // Grid route: I(X_1; Y_1 | X_2) + I(X_2; Y_2) over product inputs.
        let mut grid_max = 0.0f64;
        for s1 in 0..=64 {
            for s2 in 0..=64 {
                let (p1, p2) = (s1 as f64 / 64.0, s2 as f64 / 64.0);
                let mut probs = vec![0.0; 2 * 2 * 4 * 2];
                for x1 in 0..2 {
                    for x2 in 0..2 {
                        let px = (if x1 == 1 { p1 } else { 1.0 - p1 })
                            * (if x2 == 1 { p2 } else { 1.0 - p2 });
                        let row = &d.pmf[x1 * 2 + x2];
                        for (y, &w) in row.iter().enumerate() {
                            let (y1, y2) = (y / 2, y % 2);
                            probs[((x1 * 2 + x2) * 4 + y1) * 2 + y2] += px * w;
                        }
                    }
                }
                let joint = JointPMF::new(
                    vec![
                        ("X1".into(), 2),
                        ("X2".into(), 2),
                        ("Y_1".into(), 4),
                        ("Y_2".into(), 2),
                    ],
                    probs,
                )
                .unwrap();
                let v = joint.mutual_information(&["X1"], &["Y_1"], &["X2"]).unwrap()
                    + joint.mutual_information(&["X2"], &["Y_2"], &[]).unwrap();
                grid_max = grid_max.max(v);
            }
        }
        assert!(
            (encoder_max - grid_max).abs() < 0.02,
            "encoders {encoder_max} vs grid {grid_max}"
        );
    }

    #[test]
    fn pruning_check_on_two_message_bc() {
        // Single transmitter with two messages; the kept message absorbs
        // both, so the pruned alphabet is 4. Channel: Y_1 = X (4-ary),
        // Y_2 = BSC(0.05) of the top bit of Y_1.
        let spec = parse_network_spec(
            r#"{"k1":1,"k2":2,"messages":[{"tx":[1],"rx":[1]},{"tx":[1],"rx":[2]}],
                "discrete":{"in_alphabets":[4],"out_alphabets":[4,2],
                    "pmf":[
                        [0.95,0.05,0.0,0.0,0.0,0.0,0.0,0.0],
                        [0.0,0.0,0.95,0.05,0.0,0.0,0.0,0.0],
                        [0.0,0.0,0.0,0.0,0.05,0.95,0.0,0.0],
                        [0.0,0.0,0.0,0.0,0.0,0.0,0.05,0.95]]}}"#,
        )
        .unwrap();
        assert!(is_physically_degraded(spec.discrete().unwrap(), &[1, 2], 1e-9));
        let report = pruning_equivalence_check(&spec, 2, ENUMERATION_BUDGET).unwrap();
        assert!(report.dominated_everywhere, "min gap {}", report.min_gap);
    }

    #[test]
    fn pruning_check_identity_when_nothing_pruned() {
        // Two transmitters, private messages only: everything is kept, so
        // the collapsed configuration replays the full one exactly.
        // Y_1 = (X_1 xor N(0.1), X_2) as a 4-ary pair, Y_2 = second
        // component of Y_1.
        let spec = parse_network_spec(
            r#"{"k1":2,"k2":2,"messages":[{"tx":[1],"rx":[1]},{"tx":[2],"rx":[2]}],
                "discrete":{"in_alphabets":[2,2],"out_alphabets":[4,2],
                    "pmf":[
                        [0.9,0.0,0.0,0.0,0.1,0.0,0.0,0.0],
                        [0.0,0.0,0.0,0.9,0.0,0.0,0.0,0.1],
                        [0.1,0.0,0.0,0.0,0.9,0.0,0.0,0.0],
                        [0.0,0.0,0.0,0.1,0.0,0.0,0.0,0.9]]}}"#,
        )
        .unwrap();
        assert!(is_physically_degraded(spec.discrete().unwrap(), &[1, 2], 1e-9));
        let report = pruning_equivalence_check(&spec, 2, ENUMERATION_BUDGET).unwrap();
        assert!(report.min_gap.abs() < 1e-9 && report.max_gap.abs() < 1e-9);
    }
}
