//! Eigenvalue diagnostics for `λ = exp(2iπα)`.
//!
//! The measurable criterion asks for `Σ_n |||α·H(n)|||²` to converge and the
//! continuous one for `Σ_n |||α·H(n)|||` (with `H(n) = P(n)H(1)` and `|||·|||`
//! the distance to the nearest integer, maximized over towers). A finite
//! computation can only watch the partial sums; [`classify`] turns their
//! tails into a heuristic verdict with recorded thresholds.

use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};
use thiserror::Error;

use crate::linalg::solve_exact;
use crate::coding::{entrance_times, s_vector, CodingError, PointCode};
use crate::scalar::{frac_distance, nearest_integer, Refine, Scalar, ScalarError};
use crate::tower::{TowerError, TowerSystem};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SpectralError {
    #[error("no decomposition found for m <= {max_m}")]
    NotFound { max_m: usize },
    #[error("decomposition is not in level-one form: {0}")]
    NotRebased(String),
    #[error("need N >= {min}, got {got}")]
    TooShallow { min: usize, got: usize },
    #[error(transparent)]
    Scalar(#[from] ScalarError),
    #[error(transparent)]
    Tower(#[from] TowerError),
    #[error(transparent)]
    Coding(#[from] CodingError),
}

/// Guard bits on top of the height bit length when enclosing `α·h`.
pub const GUARD_BITS: u32 = 32;

/// A candidate `α`, exact or available to any requested precision.
#[derive(Clone)]
pub struct EigenCandidate {
    pub alpha: Scalar,
    pub description: String,
    source: Option<Arc<dyn Refine>>,
}

impl fmt::Debug for EigenCandidate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("EigenCandidate")
            .field("alpha", &self.alpha)
            .field("description", &self.description)
            .field("refinable", &self.source.is_some())
            .finish()
    }
}

impl EigenCandidate {
    pub fn exact(alpha: impl Into<Scalar>, description: impl Into<String>) -> Self {
        Self { alpha: alpha.into(), description: description.into(), source: None }
    }

    /// A real known only through enclosures; `alpha` holds a 64-bit preview when available.
    pub fn refinable(source: Arc<dyn Refine>, description: impl Into<String>) -> Self {
        let alpha = [64, 32, 16, 8]
            .into_iter()
            .find_map(|bits| source.enclose(bits).ok())
            .map_or_else(Scalar::zero, Scalar::Adaptive);
        Self { alpha, description: description.into(), source: Some(source) }
    }

    pub fn is_exact(&self) -> bool {
        self.source.is_none() && self.alpha.is_exact()
    }

    /// `α` at the precision needed to resolve `|||α·h|||` for `|h| < 2^height_bits`.
    fn resolved(&self, height_bits: u64) -> Result<(Scalar, Option<u32>), ScalarError> {
        match &self.source {
            None => Ok((self.alpha.clone(), None)),
            Some(src) => {
                let bits = u32::try_from(height_bits).unwrap_or(u32::MAX - GUARD_BITS) + GUARD_BITS;
                Ok((Scalar::Adaptive(src.enclose(bits)?), Some(bits)))
            }
        }
    }

    pub fn render(&self) -> String {
        if self.description.is_empty() {
            self.alpha.render()
        } else {
            format!("{} ({})", self.alpha.render(), self.description)
        }
    }
}

fn scalar_max(a: Scalar, b: Scalar) -> Result<Scalar, ScalarError> {
    match (&a, &b) {
        (Scalar::Adaptive(x), Scalar::Adaptive(y)) => Ok(Scalar::Adaptive(x.max(y))),
        (Scalar::Adaptive(_), _) | (_, Scalar::Adaptive(_)) => {
            let bits = 128;
            Ok(Scalar::Adaptive(a.to_adaptive(bits).max(&b.to_adaptive(bits))))
        }
        _ => Ok(if b.try_cmp(&a)?.is_gt() { b } else { a }),
    }
}

/// `max_t |||α·h_t|||`.
pub fn vector_frac_distance(alpha: &Scalar, h: &[BigInt]) -> Result<Scalar, ScalarError> {
    let mut best = Scalar::zero();
    for x in h {
        best = scalar_max(best, frac_distance(&alpha.mul_int(x))?)?;
    }
    Ok(best)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    ContinuousLikely,
    MeasurableNotContinuousLikely,
    NonEigenvalueLikely,
    Inconclusive,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::ContinuousLikely => "continuous-likely",
            Verdict::MeasurableNotContinuousLikely => "measurable-not-continuous-likely",
            Verdict::NonEigenvalueLikely => "non-eigenvalue-likely",
            Verdict::Inconclusive => "inconclusive",
        })
    }
}

/// Thresholds for [`classify`]; the window is the last `⌊len/2⌋` terms.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Policy {
    /// `S1` counts as Cauchy when its increment over the window is below this.
    pub eps1: f64,
    /// `S2` fails to be Cauchy when its increment over the window reaches this.
    pub eps2: f64,
    /// `S1` counts as growing when its window increment is at least
    /// `log_slope · ln(N / (N − window))`.
    pub log_slope: f64,
    pub min_terms: usize,
}

impl Default for Policy {
    fn default() -> Self {
        Self { eps1: 1e-6, eps2: 1e-2, log_slope: 0.05, min_terms: 10 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Diagnostics {
    pub window: usize,
    pub s1_tail: f64,
    pub s2_tail: f64,
    pub growth_threshold: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SpectralReport {
    pub alpha: String,
    pub depth: usize,
    /// `terms[i]` belongs to level `n = i + 2`.
    pub terms: Vec<Scalar>,
    pub terms_f64: Vec<f64>,
    /// Running sums of the terms and of their squares.
    pub s1: Vec<f64>,
    pub s2: Vec<f64>,
    pub precision_bits: Option<u32>,
    /// `(n, ‖P(n,m)v‖)` when a decomposition is attached.
    pub kappa: Option<Vec<(usize, f64)>>,
    pub verdict: Option<Verdict>,
    pub policy: Option<Policy>,
    pub diagnostics: Option<Diagnostics>,
}

impl SpectralReport {
    pub fn s1_total(&self) -> f64 {
        self.s1.last().copied().unwrap_or(0.0)
    }

    pub fn s2_total(&self) -> f64 {
        self.s2.last().copied().unwrap_or(0.0)
    }

    /// `S1(n)`; zero below level 2.
    pub fn s1_at(&self, n: usize) -> f64 {
        if n < 2 {
            0.0
        } else {
            self.s1[n - 2]
        }
    }

    pub fn s2_at(&self, n: usize) -> f64 {
        if n < 2 {
            0.0
        } else {
            self.s2[n - 2]
        }
    }

    pub fn term(&self, n: usize) -> &Scalar {
        &self.terms[n - 2]
    }

    pub fn classify_with(mut self, policy: Policy) -> Self {
        let (verdict, diag) = classify(&self, &policy);
        self.verdict = Some(verdict);
        self.policy = Some(policy);
        self.diagnostics = diag;
        self
    }

    pub fn attach_kappa(&mut self, sys: &TowerSystem, dec: &Decomposition) -> Result<(), SpectralError> {
        let mut x = dec.v.clone();
        let mut out = Vec::new();
        for n in dec.m + 1..=self.depth.min(sys.depth()) {
            x = sys.matrix(n).mul_scalars(&x)?;
            out.push((n, max_abs_f64(&x)));
        }
        self.kappa = Some(out);
        Ok(())
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("n,term,S1,S2\n");
        for (i, t) in self.terms_f64.iter().enumerate() {
            out.push_str(&format!("{},{:.17e},{:.17e},{:.17e}\n", i + 2, t, self.s1[i], self.s2[i]));
        }
        out
    }

    pub fn to_json(&self) -> Value {
        let mut v = json!({
            "alpha": self.alpha,
            "N": self.depth,
            "terms": self.terms.iter().map(Scalar::render).collect::<Vec<_>>(),
            "S1": self.s1_total(),
            "S2": self.s2_total(),
            "verdict": self.verdict.map(|v| v.to_string()),
            "policy": self.policy,
            "diagnostics": self.diagnostics,
        });
        if let Some(bits) = self.precision_bits {
            v["precision_bits"] = json!(bits);
        }
        if let Some(k) = &self.kappa {
            v["kappa"] = json!(k);
        }
        v
    }
}

fn max_abs_f64(x: &[Scalar]) -> f64 {
    x.iter().map(|s| s.to_f64().abs()).fold(0.0, f64::max)
}

/// `max_t |||α·h_t(n)|||` for `n = 2..=depth`, with running sums.
pub fn norm_series(sys: &TowerSystem, cand: &EigenCandidate, depth: usize) -> Result<SpectralReport, SpectralError> {
    if depth < 2 {
        return Err(SpectralError::TooShallow { min: 2, got: depth });
    }
    let top = sys.heights(depth)?;
    let height_bits = top.iter().map(|h| h.bits()).max().unwrap_or(1);
    let (alpha, precision_bits) = cand.resolved(height_bits)?;
    let terms = (2..=depth)
        .into_par_iter()
        .map(|n| -> Result<Scalar, SpectralError> { Ok(vector_frac_distance(&alpha, &sys.heights(n)?)?) })
        .collect::<Result<Vec<_>, _>>()?;
    let terms_f64: Vec<f64> = terms.par_iter().map(Scalar::to_f64).collect();
    let mut s1 = Vec::with_capacity(terms.len());
    let mut s2 = Vec::with_capacity(terms.len());
    let (mut a, mut b) = (0.0, 0.0);
    for t in &terms_f64 {
        a += t;
        b += t * t;
        s1.push(a);
        s2.push(b);
    }
    Ok(SpectralReport {
        alpha: cand.render(),
        depth,
        terms,
        terms_f64,
        s1,
        s2,
        precision_bits,
        kappa: None,
        verdict: None,
        policy: None,
        diagnostics: None,
    })
}

/// Heuristic verdict from the tails of the partial sums.
pub fn classify(report: &SpectralReport, policy: &Policy) -> (Verdict, Option<Diagnostics>) {
    let len = report.terms_f64.len();
    if len < policy.min_terms.max(2) {
        return (Verdict::Inconclusive, None);
    }
    let window = len / 2;
    let before = len - window;
    let tail = |s: &[f64]| s[len - 1] - s[before - 1];
    let s1_tail = tail(&report.s1);
    let s2_tail = tail(&report.s2);
    let n = report.depth as f64;
    let growth_threshold = policy.log_slope * (n / (n - window as f64)).ln();
    let verdict = if s1_tail < policy.eps1 {
        Verdict::ContinuousLikely
    } else if s2_tail >= policy.eps2 {
        Verdict::NonEigenvalueLikely
    } else if s1_tail >= growth_threshold {
        Verdict::MeasurableNotContinuousLikely
    } else {
        Verdict::Inconclusive
    };
    (verdict, Some(Diagnostics { window, s1_tail, s2_tail, growth_threshold }))
}

/// `P(m)(αH(1)) = v + w` with `w` integral and `‖P(n,m)v‖ → 0`.
#[derive(Clone, Debug, PartialEq)]
pub struct Decomposition {
    pub m: usize,
    pub w: Vec<BigInt>,
    pub v: Vec<Scalar>,
    /// Strictly decreasing upper envelope `(n, max_{n' ≥ n} ‖P(n',m)v‖)` over the window.
    pub decay: Vec<(usize, f64)>,
}

impl Decomposition {
    pub fn to_json(&self) -> Value {
        json!({
            "m": self.m,
            "w": self.w.iter().map(ToString::to_string).collect::<Vec<_>>(),
            "v": self.v.iter().map(Scalar::render).collect::<Vec<_>>(),
            "decay": self.decay,
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct DecayOptions {
    pub max_m: usize,
    /// Levels `m+1..=m+window` are inspected.
    pub window: usize,
    /// Minimum number of strictly decreasing envelope points.
    pub samples: usize,
    /// The second half of the window must stay below this.
    pub tol: f64,
}

impl Default for DecayOptions {
    fn default() -> Self {
        Self { max_m: 6, window: 200, samples: 20, tol: 0.05 }
    }
}

/// Alphabets beyond this size only try the plain nearest-integer split.
const MAX_SHIFT_SEARCH: usize = 8;

/// `δ ∈ {−1,0,1}^c` ordered by `|δ|₁`, then lexicographically.
fn shifts(c: usize) -> Vec<Vec<i8>> {
    if c > MAX_SHIFT_SEARCH {
        return vec![vec![0; c]];
    }
    let mut all: Vec<Vec<i8>> = vec![vec![]];
    for _ in 0..c {
        all = all.into_iter().flat_map(|p| [-1i8, 0, 1].map(|d| [p.clone(), vec![d]].concat())).collect();
    }
    all.sort_by_key(|d| (d.iter().map(|x| x.unsigned_abs()).sum::<u8>(), d.clone()));
    all
}

/// Envelope points of the window and the largest norm over its second half,
/// or `None` once the orbit clearly escapes.
type Envelope = (Vec<(usize, f64)>, f64);

fn decay_envelope(sys: &TowerSystem, m: usize, v: &[Scalar], last: usize) -> Result<Option<Envelope>, SpectralError> {
    const ESCAPE: f64 = 1e3;
    let mut x = v.to_vec();
    let mut norms = Vec::with_capacity(last - m);
    for n in m + 1..=last {
        x = sys.matrix(n).mul_scalars(&x)?;
        let norm = max_abs_f64(&x);
        if norm > ESCAPE {
            return Ok(None);
        }
        norms.push((n, norm));
    }
    let mut envelope = Vec::new();
    let mut running = f64::NEG_INFINITY;
    let mut tail_max = vec![0.0; norms.len()];
    for (i, &(_, x)) in norms.iter().enumerate().rev() {
        running = running.max(x);
        tail_max[i] = running;
    }
    for (i, &(n, _)) in norms.iter().enumerate() {
        if envelope.last().is_none_or(|&(_, prev): &(usize, f64)| tail_max[i] < prev) {
            envelope.push((n, tail_max[i]));
        }
    }
    let half = norms.len() / 2;
    let late = norms[half..].iter().map(|p| p.1).fold(0.0, f64::max);
    Ok(Some((envelope, late)))
}

/// Searches `m = 2..=max_m` for an integer split `P(m)(αH(1)) = v + w` whose
/// residual `v` is contracted by the later matrices.
pub fn tendto0_decompose(sys: &TowerSystem, cand: &EigenCandidate, opts: &DecayOptions) -> Result<Decomposition, SpectralError> {
    for m in 2..=opts.max_m.min(sys.depth()) {
        let h = sys.heights(m)?;
        let (alpha, _) = cand.resolved(h.iter().map(|x| x.bits()).max().unwrap_or(1))?;
        let u: Vec<Scalar> = h.iter().map(|x| alpha.mul_int(x)).collect();
        let nearest: Vec<BigInt> = u.iter().map(|x| nearest_integer(x).map(|p| p.0)).collect::<Result<_, _>>()?;
        let last = (m + opts.window).min(sys.depth());
        for delta in shifts(u.len()) {
            let w: Vec<BigInt> = nearest.iter().zip(&delta).map(|(k, d)| k + d).collect();
            let v: Vec<Scalar> = u.iter().zip(&w).map(|(x, k)| x.add_int(&-k)).collect();
            if v.iter().all(Scalar::is_zero) {
                let decay = (m + 1..=(m + opts.samples).min(sys.depth().max(m + 1))).map(|n| (n, 0.0)).collect();
                return Ok(Decomposition { m, w, v, decay });
            }
            if last <= m {
                continue;
            }
            let Some((envelope, late)) = decay_envelope(sys, m, &v, last)? else { continue };
            if envelope.len() >= opts.samples && late < opts.tol {
                return Ok(Decomposition { m, w, v, decay: envelope });
            }
        }
    }
    Err(SpectralError::NotFound { max_m: opts.max_m })
}

/// Moves a decomposition to `m = 1`: `v ← P(m)^{-1} v`, provided
/// `αH(1) − v` stays integral and the level-1 towers have unit height.
pub fn rebase_to_level_one(sys: &TowerSystem, cand: &EigenCandidate, dec: &Decomposition) -> Result<Decomposition, SpectralError> {
    if !sys.words(1).iter().all(|w| w.len() == 1) {
        return Err(SpectralError::NotRebased("level-1 towers do not have unit height".into()));
    }
    let mut v = dec.v.clone();
    for n in (2..=dec.m).rev() {
        v = solve_exact(sys.matrix(n), &v, false)?
            .ok_or_else(|| SpectralError::NotRebased(format!("M({n}) is not invertible")))?;
    }
    let w = v
        .iter()
        .map(|x| cand.alpha.checked_sub(x).ok().and_then(|d| d.as_integer()))
        .collect::<Option<Vec<_>>>()
        .ok_or_else(|| SpectralError::NotRebased("αH(1) − v is not integral".into()))?;
    Ok(Decomposition { m: 1, w, v, decay: dec.decay.clone() })
}

/// `g_n = Σ_{j=1}^{n−1} <s_j, P(j)v>` for a level-one decomposition; it agrees
/// with `α·r_n` modulo the integers.
pub fn eigenfunction_g(sys: &TowerSystem, dec: &Decomposition, code: &PointCode, n: usize) -> Result<Scalar, SpectralError> {
    if dec.m != 1 || !sys.words(1).iter().all(|w| w.len() == 1) {
        return Err(SpectralError::NotRebased(format!("decomposition at m = {}", dec.m)));
    }
    if n == 0 || n > code.depth() {
        return Err(CodingError::LevelOutOfRange { level: n, depth: code.depth() }.into());
    }
    let mut image = dec.v.clone();
    let mut g = Scalar::zero();
    for j in 1..n {
        if j > 1 {
            image = sys.matrix(j).mul_scalars(&image)?;
        }
        let s = s_vector(sys, code, j + 1)?;
        for (c, x) in s.counts.iter().zip(&image) {
            if *c > 0 {
                g = g.checked_add(&x.mul_int(&BigInt::from(*c)))?;
            }
        }
    }
    Ok(g)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ContgenResult {
    pub passes: bool,
    pub partial_sum: f64,
    pub tail: f64,
    pub terms: Vec<f64>,
}

/// Sufficient condition for continuity:
/// `Σ_m (max_k h_k(m+1) / min_k h_k(m)) · max_k |λ^{h_k(m)} − 1|` with
/// `|λ^h − 1| = 2 sin(π |||αh|||)`, for `m = 1..=depth`. Passes when the sum
/// over the last half of the range stays below `eps`.
pub fn contgen_sufficient(sys: &TowerSystem, cand: &EigenCandidate, depth: usize, eps: f64) -> Result<ContgenResult, SpectralError> {
    if depth < 2 {
        return Err(SpectralError::TooShallow { min: 2, got: depth });
    }
    let top = sys.heights(depth + 1)?;
    let (alpha, _) = cand.resolved(top.iter().map(|h| h.bits()).max().unwrap_or(1))?;
    let terms = (1..=depth)
        .into_par_iter()
        .map(|m| -> Result<f64, SpectralError> {
            let h = sys.heights(m)?;
            let up = sys.heights(m + 1)?;
            let ratio = crate::scalar::rational_to_f64(&num_rational::BigRational::new(
                up.iter().max().unwrap().clone(),
                h.iter().min().unwrap().clone(),
            ));
            let d = vector_frac_distance(&alpha, &h)?.to_f64().min(0.5);
            Ok(ratio * 2.0 * (std::f64::consts::PI * d).sin())
        })
        .collect::<Result<Vec<_>, _>>()?;
    let partial_sum: f64 = terms.iter().sum();
    let tail: f64 = terms[depth - depth / 2..].iter().sum();
    Ok(ContgenResult { passes: tail < eps, partial_sum, tail, terms })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ProbeReport {
    pub window: usize,
    /// Per code: largest circular distance between two values of `α r_n` (mod 1) in the window.
    pub oscillations: Vec<f64>,
    pub sup: f64,
}

/// Watches `α·r_n (mod 1)` for `n = 2..=depth` along each code; a large
/// spread over the last half of the levels means the convergence is not
/// uniform at this scale.
pub fn uniform_probe(sys: &TowerSystem, cand: &EigenCandidate, codes: &[PointCode], depth: usize) -> Result<ProbeReport, SpectralError> {
    if depth < 3 {
        return Err(SpectralError::TooShallow { min: 3, got: depth });
    }
    let window = (depth - 1) / 2;
    let oscillations = codes
        .par_iter()
        .map(|code| -> Result<f64, SpectralError> {
            if code.depth() < depth {
                return Err(CodingError::LevelOutOfRange { level: depth, depth: code.depth() }.into());
            }
            let r = entrance_times(sys, code)?;
            let bits = r[depth - 1].bits().max(1);
            let (alpha, _) = cand.resolved(bits)?;
            let xs = (depth - window + 1..=depth)
                .map(|n| {
                    let x = alpha.mul_int(&r[n - 1]);
                    let (k, _) = nearest_integer(&x)?;
                    Ok(x.add_int(&-k).to_f64())
                })
                .collect::<Result<Vec<f64>, ScalarError>>()?;
            let mut osc: f64 = 0.0;
            for (i, a) in xs.iter().enumerate() {
                for b in &xs[i + 1..] {
                    let d = (a - b).rem_euclid(1.0);
                    osc = osc.max(d.min(1.0 - d));
                }
            }
            Ok(osc)
        })
        .collect::<Result<Vec<_>, _>>()?;
    let sup = oscillations.iter().copied().fold(0.0, f64::max);
    Ok(ProbeReport { window, oscillations, sup })
}
