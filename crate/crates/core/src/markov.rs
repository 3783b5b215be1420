//! The chain of tower indices `(τ_n)` under the invariant measure.
//!
//! Given `τ_{n−1} = t`, the next index is `t̄` with probability
//! `m_{t̄,t}(n)·μ_{t̄}(n) / μ_t(n−1)`; rows sum to one because
//! `μ(n−1) = M(n)ᵀ μ(n)`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::scalar::{Scalar, ScalarError};
use crate::tower::{TowerError, TowerSystem};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MarkovError {
    #[error("measure unavailable: {0}")]
    MeasureUnavailable(TowerError),
    #[error("row {row} of Q({level}) sums to {sum}, not 1")]
    RowSumViolation { level: usize, row: usize, sum: String },
    #[error("need 1 <= K < n, got K = {k}, n = {n}")]
    BadRange { k: usize, n: usize },
    #[error(transparent)]
    Tower(TowerError),
    #[error(transparent)]
    Scalar(#[from] ScalarError),
}

impl From<TowerError> for MarkovError {
    fn from(e: TowerError) -> Self {
        match e {
            TowerError::NoExactStructure | TowerError::DepthInsufficient { .. } => MarkovError::MeasureUnavailable(e),
            e => MarkovError::Tower(e),
        }
    }
}

/// Where `μ(n)` comes from.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(rename_all = "kebab-case", tag = "mode")]
pub enum MeasureSource {
    Exact,
    /// Frequencies read from `P(depth, n)`, with spread at most `tol`.
    Approximate { depth: usize, tol: f64 },
}

impl MeasureSource {
    pub fn measure(&self, sys: &TowerSystem, n: usize) -> Result<Vec<Scalar>, MarkovError> {
        if n == 0 {
            return Ok(vec![Scalar::integer(1)]);
        }
        Ok(match *self {
            MeasureSource::Exact => sys.exact_measure(n)?.values,
            MeasureSource::Approximate { depth, tol } => sys.invariant_measure(n, depth, tol)?.values,
        })
    }

    fn row_tolerance(&self, size: usize) -> Option<f64> {
        match *self {
            MeasureSource::Exact => None,
            MeasureSource::Approximate { tol, .. } => Some(size as f64 * tol),
        }
    }
}

/// Rows indexed by `τ_{n−1}`, columns by `τ_n`.
#[derive(Clone, Debug, PartialEq)]
pub struct TransitionMatrix {
    pub level: usize,
    pub q: Vec<Vec<Scalar>>,
}

impl TransitionMatrix {
    pub fn to_f64(&self) -> Vec<Vec<f64>> {
        self.q.iter().map(|r| r.iter().map(Scalar::to_f64).collect()).collect()
    }
}

fn row_sum(row: &[Scalar]) -> Result<Scalar, ScalarError> {
    row.iter().try_fold(Scalar::zero(), |acc, x| acc.checked_add(x))
}

pub fn transition_matrix(sys: &TowerSystem, source: &MeasureSource, n: usize) -> Result<TransitionMatrix, MarkovError> {
    let m = sys.try_matrix(n)?;
    let below = source.measure(sys, n - 1)?;
    let here = source.measure(sys, n)?;
    let q = (0..sys.alphabet_size(n - 1))
        .map(|t| {
            (0..sys.alphabet_size(n))
                .map(|tb| here[tb].mul_int(m.get(tb, t)).checked_div(&below[t]))
                .collect::<Result<Vec<_>, _>>()
        })
        .collect::<Result<Vec<_>, _>>()?;
    for (t, row) in q.iter().enumerate() {
        let sum = row_sum(row)?;
        let ok = match source.row_tolerance(row.len()) {
            None => sum == Scalar::integer(1),
            Some(tol) => (sum.to_f64() - 1.0).abs() <= tol,
        };
        if !ok {
            return Err(MarkovError::RowSumViolation { level: n, row: t + 1, sum: sum.render() });
        }
    }
    Ok(TransitionMatrix { level: n, q })
}

/// Law of `τ_n`: the measure of each level-`n` tower, `h_t(n)·μ_t(n)`.
pub fn marginal(sys: &TowerSystem, source: &MeasureSource, n: usize) -> Result<Vec<Scalar>, MarkovError> {
    let mu = source.measure(sys, n)?;
    if n == 0 {
        return Ok(mu);
    }
    let h = sys.heights(n)?;
    Ok(mu.iter().zip(h.iter()).map(|(m, h)| m.mul_int(h)).collect())
}

/// Half the largest L1 distance between two rows.
pub fn dobrushin(q: &TransitionMatrix) -> Result<Scalar, MarkovError> {
    let mut best = Scalar::zero();
    for a in 0..q.q.len() {
        for b in a + 1..q.q.len() {
            let mut d = Scalar::zero();
            for (x, y) in q.q[a].iter().zip(&q.q[b]) {
                d = d.checked_add(&x.checked_sub(y)?.abs()?)?;
            }
            if d.try_cmp(&best)?.is_gt() {
                best = d;
            }
        }
    }
    Ok(best.checked_mul(&Scalar::ratio(1, 2))?)
}

fn mat_mul(a: &[Vec<Scalar>], b: &[Vec<Scalar>]) -> Result<Vec<Vec<Scalar>>, ScalarError> {
    a.iter()
        .map(|row| {
            (0..b[0].len())
                .map(|j| {
                    row.iter().zip(b).try_fold(Scalar::zero(), |acc, (x, brow)| {
                        if x.is_zero() {
                            Ok(acc)
                        } else {
                            acc.checked_add(&x.checked_mul(&brow[j])?)
                        }
                    })
                })
                .collect()
        })
        .collect()
}

/// `Q(m+1)⋯Q(n)`: rows indexed by `τ_m`, columns by `τ_n`.
pub fn transition_product(sys: &TowerSystem, source: &MeasureSource, m: usize, n: usize) -> Result<Vec<Vec<Scalar>>, MarkovError> {
    if n <= m {
        return Err(MarkovError::BadRange { k: n.saturating_sub(m), n });
    }
    let mut acc = transition_matrix(sys, source, n)?.q;
    for j in (m + 1..n).rev() {
        acc = mat_mul(&transition_matrix(sys, source, j)?.q, &acc)?;
    }
    Ok(acc)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MixingRow {
    pub k: usize,
    #[serde(serialize_with = "render_scalar")]
    pub sup_difference: Scalar,
    #[serde(serialize_with = "render_scalar")]
    pub dobrushin_product: Scalar,
}

fn render_scalar<S: serde::Serializer>(x: &Scalar, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&x.render())
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MixingEstimate {
    pub n: usize,
    pub rows: Vec<MixingRow>,
    /// Least-squares fit of `ln d_k ≈ ln c + k ln β` over positive differences.
    pub c: f64,
    pub beta: f64,
    pub fit_residual: f64,
}

impl MixingEstimate {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("k,sup_difference,dobrushin_product\n");
        for r in &self.rows {
            out.push_str(&format!("{},{:.12e},{:.12e}\n", r.k, r.sup_difference.to_f64(), r.dobrushin_product.to_f64()));
        }
        out
    }
}

/// `sup_{t,t̄} |P[τ_n = t̄ | τ_{n−k} = t] − P[τ_n = t̄]|` for `k = 1..=K`, with
/// the matching products of Dobrushin coefficients.
pub fn mixing_estimate(sys: &TowerSystem, source: &MeasureSource, n: usize, k_max: usize) -> Result<MixingEstimate, MarkovError> {
    if k_max == 0 || k_max >= n {
        return Err(MarkovError::BadRange { k: k_max, n });
    }
    let law = marginal(sys, source, n)?;
    let first = transition_matrix(sys, source, n)?;
    let mut product = first.q.clone();
    let mut dob = dobrushin(&first)?;
    let mut rows = Vec::with_capacity(k_max);
    for k in 1..=k_max {
        if k > 1 {
            let q = transition_matrix(sys, source, n - k + 1)?;
            dob = dob.checked_mul(&dobrushin(&q)?)?;
            product = mat_mul(&q.q, &product)?;
        }
        let mut sup = Scalar::zero();
        for row in &product {
            for (x, p) in row.iter().zip(&law) {
                let d = x.checked_sub(p)?.abs()?;
                if d.try_cmp(&sup)?.is_gt() {
                    sup = d;
                }
            }
        }
        rows.push(MixingRow { k, sup_difference: sup, dobrushin_product: dob.clone() });
    }
    let (c, beta, fit_residual) = fit_geometric(&rows);
    Ok(MixingEstimate { n, rows, c, beta, fit_residual })
}

fn fit_geometric(rows: &[MixingRow]) -> (f64, f64, f64) {
    let pts: Vec<(f64, f64)> = rows
        .iter()
        .filter_map(|r| {
            let d = r.sup_difference.to_f64();
            (d > 0.0).then(|| (r.k as f64, d.ln()))
        })
        .collect();
    match pts.len() {
        0 => (0.0, 0.0, 0.0),
        1 => (pts[0].1.exp(), 0.0, 0.0),
        len => {
            let n = len as f64;
            let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
            let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
            let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
            let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
            let slope = sxy / sxx;
            let intercept = my - slope * mx;
            let rss: f64 = pts.iter().map(|p| (p.1 - intercept - slope * p.0).powi(2)).sum();
            (intercept.exp(), slope.exp(), (rss / n).sqrt())
        }
    }
}

/// Precomputed cumulative rows of `Q(1..=N)` for fast sampling.
#[derive(Clone, Debug)]
pub struct ChainSampler {
    cumulative: Vec<Vec<Vec<f64>>>,
}

impl ChainSampler {
    pub fn new(sys: &TowerSystem, source: &MeasureSource, depth: usize) -> Result<Self, MarkovError> {
        let cumulative = (1..=depth)
            .map(|n| {
                let q = transition_matrix(sys, source, n)?;
                Ok(q
                    .to_f64()
                    .into_iter()
                    .map(|row| {
                        let mut acc = 0.0;
                        row.into_iter()
                            .map(|p| {
                                acc += p;
                                acc
                            })
                            .collect()
                    })
                    .collect())
            })
            .collect::<Result<Vec<_>, MarkovError>>()?;
        Ok(Self { cumulative })
    }

    pub fn depth(&self) -> usize {
        self.cumulative.len()
    }

    /// Path `τ_0..=τ_N` (1-based indices, `τ_0 = 1`); path `index` uses its own
    /// ChaCha stream of `seed`, so paths are reproducible independently.
    pub fn sample(&self, seed: u64, index: u64) -> Vec<usize> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(index);
        let mut path = Vec::with_capacity(self.depth() + 1);
        let mut t = 1;
        path.push(t);
        for level in &self.cumulative {
            let row = &level[t - 1];
            let u: f64 = rng.random::<f64>() * row[row.len() - 1];
            t = row.iter().position(|&c| u < c).unwrap_or(row.len() - 1) + 1;
            path.push(t);
        }
        path
    }

    pub fn sample_many(&self, seed: u64, paths: usize) -> Vec<Vec<usize>> {
        (0..paths as u64).into_par_iter().map(|i| self.sample(seed, i)).collect()
    }
}

pub fn chain_sample(sys: &TowerSystem, source: &MeasureSource, seed: u64, depth: usize) -> Result<Vec<usize>, MarkovError> {
    Ok(ChainSampler::new(sys, source, depth)?.sample(seed, 0))
}
