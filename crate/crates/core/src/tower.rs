//! Ordered Kakutani-Rohlin tower systems.
//!
//! A system is a finite stack of levels. Level `n` lists, for every tower
//! `t ∈ 1..=C(n)`, the ordered word of level-`(n−1)` towers it crosses from
//! bottom to top. Everything else (the matrices `M(n)`, the heights `H(n)`,
//! the products `P(n,m)`, invariant measures) is derived from those words.
//!
//! Tower indices and letters are 1-based throughout the public API, matching
//! the usual `1..=C(n)` labelling; level 0 is the trivial partition with a
//! single tower of height 1.

use std::fmt;
use std::sync::{Arc, RwLock};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::linalg::IntMatrix;
use crate::scalar::{Scalar, ScalarError};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TowerError {
    #[error("level {level}, word {word}: letter {letter} outside 1..={alphabet}")]
    InvalidWord { level: usize, word: usize, letter: usize, alphabet: usize },
    #[error("level {level}, word {word}: cannot parse {text:?}")]
    UnparsableWord { level: usize, word: usize, text: String },
    #[error("level {level} has an empty word or no words")]
    EmptyWord { level: usize },
    #[error("KR5 violated at level {level}: word {word} misses letter {missing}")]
    Kr5Violation { level: usize, word: usize, missing: usize },
    #[error("KR6 violated at level {level}: word {word} ends in {last}, not 1")]
    Kr6Violation { level: usize, word: usize, last: usize },
    #[error("KR5' violated at level {level}: M({level}) has an entry below 2")]
    Kr5PrimeViolation { level: usize },
    #[error("level {level} outside 1..={depth}")]
    LevelOutOfRange { level: usize, depth: usize },
    #[error("bad product range P({n},{m}); need n > m")]
    BadRange { n: usize, m: usize },
    #[error("frequency spread {spread:e} exceeds tolerance {tol:e}; use a deeper level")]
    DepthInsufficient { spread: f64, tol: f64 },
    #[error("no exact invariant measure is available for this system")]
    NoExactStructure,
    #[error("system has no levels")]
    NoLevels,
    #[error("invalid system spec: {0}")]
    Spec(String),
    #[error(transparent)]
    Scalar(#[from] ScalarError),
}

/// The ordered words of one level; `words[t-1]` is the word of tower `t`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LevelSpec {
    pub words: Vec<Vec<usize>>,
}

impl LevelSpec {
    pub fn new(words: Vec<Vec<usize>>) -> Self {
        Self { words }
    }

    /// Parses digit strings (`"2211111"`) or comma-separated tokens (`"1,12,3"`).
    pub fn parse(words: &[&str]) -> Result<Self, TowerError> {
        Self::parse_at(0, words)
    }

    pub(crate) fn parse_at(level: usize, words: &[&str]) -> Result<Self, TowerError> {
        words
            .iter()
            .enumerate()
            .map(|(i, w)| parse_word(w).ok_or(TowerError::UnparsableWord { level, word: i + 1, text: w.to_string() }))
            .collect::<Result<Vec<_>, _>>()
            .map(Self::new)
    }
}

pub fn parse_word(w: &str) -> Option<Vec<usize>> {
    let w = w.trim();
    if w.is_empty() {
        return Some(Vec::new());
    }
    if w.contains(',') {
        w.split(',').map(|tok| tok.trim().parse().ok()).collect()
    } else {
        w.chars().map(|c| c.to_digit(10).map(|d| d as usize)).collect()
    }
}

/// Renders letters as a digit string when every letter is a single digit.
pub fn format_word(w: &[usize]) -> String {
    if w.iter().all(|&l| l <= 9) {
        w.iter().map(|l| char::from(b'0' + *l as u8)).collect()
    } else {
        w.iter().map(ToString::to_string).collect::<Vec<_>>().join(",")
    }
}

/// Whether the matrices of a system come from a known finite set.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum MatrixSet {
    /// The generator cycles through finitely many matrices forever.
    Finite,
    /// Only the listed prefix exists; nothing is known beyond it.
    PrefixOnly,
}

/// Programmatic level source.
pub trait LevelGenerator: Send + Sync + fmt::Debug {
    fn name(&self) -> String;
    fn levels(&self, depth: usize) -> Vec<LevelSpec>;
    fn matrix_set(&self) -> MatrixSet;
    /// Exact `μ(1)`, normalized so that `Σ h_t(1) μ_t = 1`, when the generator knows it.
    fn exact_base_measure(&self) -> Option<Vec<Scalar>> {
        None
    }
}

#[derive(Clone, Debug)]
pub enum LevelSource {
    Explicit(Vec<LevelSpec>),
    /// `levels` followed by endless repetition of its last `period` entries.
    Periodic { levels: Vec<LevelSpec>, period: usize },
    /// One tower, level-1 word `1`, level-n word `11`.
    Odometer,
    Generator(Arc<dyn LevelGenerator>),
}

#[derive(Clone, Debug)]
struct Level {
    words: Vec<Vec<usize>>,
    matrix: IntMatrix,
}

#[derive(Clone, Debug, PartialEq)]
pub enum MeasureMode {
    Exact,
    /// Frequency estimate; `spread` is the observed disagreement across rows.
    Approximate { tol: f64, spread: f64 },
}

#[derive(Clone, Debug, PartialEq)]
pub struct MeasureVector {
    pub level: usize,
    pub values: Vec<Scalar>,
    pub mode: MeasureMode,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LrEstimate {
    /// Largest observed `h_l(n) / h_k(n−1)`, as `p/q`.
    pub constant: String,
    pub constant_f64: f64,
    pub depth: usize,
    pub matrix_set: MatrixSet,
    /// Distinct matrices seen among `M(2..=depth)`.
    pub distinct_matrices: usize,
}

#[derive(Debug)]
pub struct TowerSystem {
    name: String,
    levels: Vec<Level>,
    matrix_set: MatrixSet,
    exact_base: Option<Vec<Scalar>>,
    heights: RwLock<Vec<Arc<Vec<BigInt>>>>,
    exact_measures: RwLock<Vec<Arc<Vec<Scalar>>>>,
}

impl Clone for TowerSystem {
    fn clone(&self) -> Self {
        Self {
            name: self.name.clone(),
            levels: self.levels.clone(),
            matrix_set: self.matrix_set,
            exact_base: self.exact_base.clone(),
            heights: RwLock::new(self.heights.read().unwrap().clone()),
            exact_measures: RwLock::new(self.exact_measures.read().unwrap().clone()),
        }
    }
}

fn validate_level(level: usize, words: &[Vec<usize>], prev_alphabet: usize) -> Result<IntMatrix, TowerError> {
    if words.is_empty() {
        return Err(TowerError::EmptyWord { level });
    }
    let mut m = IntMatrix::zeros(words.len(), prev_alphabet);
    for (i, w) in words.iter().enumerate() {
        if w.is_empty() {
            return Err(TowerError::EmptyWord { level });
        }
        let mut counts = vec![0u64; prev_alphabet];
        for &letter in w {
            if letter == 0 || letter > prev_alphabet {
                return Err(TowerError::InvalidWord { level, word: i + 1, letter, alphabet: prev_alphabet });
            }
            counts[letter - 1] += 1;
        }
        if let Some(k) = counts.iter().position(|&c| c == 0) {
            return Err(TowerError::Kr5Violation { level, word: i + 1, missing: k + 1 });
        }
        let last = *w.last().unwrap();
        if last != 1 {
            return Err(TowerError::Kr6Violation { level, word: i + 1, last });
        }
        for (k, c) in counts.into_iter().enumerate() {
            m.set(i, k, BigInt::from(c));
        }
    }
    Ok(m)
}

impl TowerSystem {
    /// Materializes and validates levels `1..=depth` of `source`.
    ///
    /// Explicit sources ignore `depth` when it exceeds the listed levels.
    pub fn build(source: LevelSource, depth: usize) -> Result<Self, TowerError> {
        let (name, specs, matrix_set, exact_base) = match source {
            LevelSource::Explicit(levels) => {
                let d = depth.min(levels.len());
                ("explicit".to_string(), levels.into_iter().take(d).collect::<Vec<_>>(), MatrixSet::PrefixOnly, None)
            }
            LevelSource::Periodic { levels, period } => {
                if period == 0 || period > levels.len() {
                    return Err(TowerError::Spec(format!("period {period} must be in 1..={}", levels.len())));
                }
                let start = levels.len() - period;
                let specs = (0..depth)
                    .map(|i| if i < levels.len() { levels[i].clone() } else { levels[start + (i - start) % period].clone() })
                    .collect();
                ("periodic".to_string(), specs, MatrixSet::Finite, None)
            }
            LevelSource::Odometer => {
                let specs = (1..=depth)
                    .map(|n| LevelSpec::new(vec![if n == 1 { vec![1] } else { vec![1, 1] }]))
                    .collect();
                let base = Some(vec![Scalar::integer(1)]);
                ("odometer".to_string(), specs, MatrixSet::Finite, base)
            }
            LevelSource::Generator(g) => (g.name(), g.levels(depth), g.matrix_set(), g.exact_base_measure()),
        };
        Self::from_specs(name, specs, matrix_set, exact_base)
    }

    pub fn from_levels(levels: Vec<LevelSpec>) -> Result<Self, TowerError> {
        let depth = levels.len();
        Self::build(LevelSource::Explicit(levels), depth)
    }

    fn from_specs(
        name: String,
        specs: Vec<LevelSpec>,
        matrix_set: MatrixSet,
        exact_base: Option<Vec<Scalar>>,
    ) -> Result<Self, TowerError> {
        if specs.is_empty() {
            return Err(TowerError::NoLevels);
        }
        let mut levels = Vec::with_capacity(specs.len());
        let mut prev = 1;
        for (i, spec) in specs.into_iter().enumerate() {
            let matrix = validate_level(i + 1, &spec.words, prev)?;
            prev = spec.words.len();
            levels.push(Level { words: spec.words, matrix });
        }
        if let Some(base) = &exact_base {
            if base.len() != levels[0].words.len() {
                return Err(TowerError::Spec("exact base measure has the wrong dimension".into()));
            }
        }
        Ok(Self {
            name,
            levels,
            matrix_set,
            exact_base,
            heights: RwLock::new(Vec::new()),
            exact_measures: RwLock::new(Vec::new()),
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn depth(&self) -> usize {
        self.levels.len()
    }

    pub fn matrix_set(&self) -> MatrixSet {
        self.matrix_set
    }

    pub fn has_exact_structure(&self) -> bool {
        self.exact_base.is_some()
    }

    fn check_level(&self, n: usize) -> Result<(), TowerError> {
        if n == 0 || n > self.depth() {
            Err(TowerError::LevelOutOfRange { level: n, depth: self.depth() })
        } else {
            Ok(())
        }
    }

    /// `C(n)`; `C(0) = 1`.
    pub fn alphabet_size(&self, n: usize) -> usize {
        if n == 0 {
            1
        } else {
            self.levels[n - 1].words.len()
        }
    }

    pub fn words(&self, n: usize) -> &[Vec<usize>] {
        &self.levels[n - 1].words
    }

    /// Word of tower `t` at level `n` (both 1-based).
    pub fn word(&self, n: usize, t: usize) -> &[usize] {
        &self.levels[n - 1].words[t - 1]
    }

    /// `m_t(n)`, the length of the word of tower `t` at level `n`.
    pub fn word_len(&self, n: usize, t: usize) -> usize {
        self.word(n, t).len()
    }

    /// `M(n)`, of size `C(n) × C(n−1)`.
    pub fn matrix(&self, n: usize) -> &IntMatrix {
        &self.levels[n - 1].matrix
    }

    pub fn try_matrix(&self, n: usize) -> Result<&IntMatrix, TowerError> {
        self.check_level(n)?;
        Ok(self.matrix(n))
    }

    /// `H(n)`, memoized; `H(0) = (1)`.
    pub fn heights(&self, n: usize) -> Result<Arc<Vec<BigInt>>, TowerError> {
        if n == 0 {
            return Ok(Arc::new(vec![BigInt::one()]));
        }
        self.check_level(n)?;
        if let Some(h) = self.heights.read().unwrap().get(n - 1) {
            return Ok(h.clone());
        }
        let mut cache = self.heights.write().unwrap();
        while cache.len() < n {
            let k = cache.len() + 1;
            let prev = if k == 1 { Arc::new(vec![BigInt::one()]) } else { cache[k - 2].clone() };
            cache.push(Arc::new(self.matrix(k).mul_vec(&prev)));
        }
        Ok(cache[n - 1].clone())
    }

    /// `P(n,m) = M(n)⋯M(m+1)` for `n > m ≥ 1`.
    pub fn product(&self, n: usize, m: usize) -> Result<IntMatrix, TowerError> {
        if n <= m || m == 0 {
            return Err(TowerError::BadRange { n, m });
        }
        self.product_or_identity(n, m)
    }

    /// Like [`product`](Self::product) but allowing `n == m` (identity) and `m = 0`.
    pub fn product_or_identity(&self, n: usize, m: usize) -> Result<IntMatrix, TowerError> {
        if n < m {
            return Err(TowerError::BadRange { n, m });
        }
        self.check_level(n.max(1))?;
        let mut acc = IntMatrix::identity(self.alphabet_size(m));
        for k in m + 1..=n {
            acc = self.matrix(k).mul(&acc);
        }
        Ok(acc)
    }

    /// Largest `h_l(n)/h_k(n−1)` over `2 ≤ n ≤ depth`.
    pub fn lr_constant(&self, depth: usize) -> Result<LrEstimate, TowerError> {
        if depth < 2 {
            return Err(TowerError::LevelOutOfRange { level: depth, depth: self.depth() });
        }
        self.check_level(depth)?;
        let mut best: Option<BigRational> = None;
        let mut seen: Vec<&IntMatrix> = Vec::new();
        for n in 2..=depth {
            let h = self.heights(n)?;
            let g = self.heights(n - 1)?;
            let ratio = BigRational::new(h.iter().max().unwrap().clone(), g.iter().min().unwrap().clone());
            if best.as_ref().is_none_or(|b| &ratio > b) {
                best = Some(ratio);
            }
            let m = self.matrix(n);
            if !seen.contains(&m) {
                seen.push(m);
            }
        }
        let best = best.unwrap();
        Ok(LrEstimate {
            constant_f64: crate::scalar::rational_to_f64(&best),
            constant: best.to_string(),
            depth,
            matrix_set: self.matrix_set,
            distinct_matrices: seen.len(),
        })
    }

    /// First level `n ≥ 2` whose matrix has an entry below 2.
    pub fn check_kr5_prime(&self) -> Result<(), TowerError> {
        for n in 2..=self.depth() {
            if self.matrix(n).min_entry().is_some_and(|e| e < &BigInt::from(2)) {
                return Err(TowerError::Kr5PrimeViolation { level: n });
            }
        }
        Ok(())
    }

    /// Pairs consecutive levels: `M'(1) = M(1)`, `M'(n) = M(2n−1)·M(2n−2)`.
    ///
    /// The level-`n` words of the result substitute every letter `k` of a word
    /// of level `2n−1` by the word of tower `k` at level `2n−2`.
    pub fn telescope(&self) -> Result<TowerSystem, TowerError> {
        if self.depth() < 3 {
            return Err(TowerError::LevelOutOfRange { level: 3, depth: self.depth() });
        }
        let mut specs = vec![LevelSpec::new(self.words(1).to_vec())];
        let mut n = 2;
        while 2 * n - 1 <= self.depth() {
            let outer = self.words(2 * n - 1);
            let inner = self.words(2 * n - 2);
            let words = outer.iter().map(|w| w.iter().flat_map(|&k| inner[k - 1].iter().copied()).collect()).collect();
            specs.push(LevelSpec::new(words));
            n += 1;
        }
        Self::from_specs(format!("telescope({})", self.name), specs, self.matrix_set, self.exact_base.clone())
    }

    /// Frequency estimate of `μ(n)` from the columns of `P(N,n)`.
    ///
    /// Row `l` of `P(N,n)/h_l(N)` estimates `μ(n)`; the rows must agree to
    /// within `tol` componentwise, otherwise `DepthInsufficient` is returned.
    /// The result averages the rows and is exactly normalized.
    pub fn invariant_measure(&self, n: usize, depth: usize, tol: f64) -> Result<MeasureVector, TowerError> {
        if depth <= n {
            return Err(TowerError::BadRange { n: depth, m: n });
        }
        self.check_level(depth)?;
        let p = self.product_or_identity(depth, n)?;
        let h = self.heights(depth)?;
        let rows = p.rows();
        let cols = p.cols();
        let mut spread = BigRational::zero();
        let mut values = Vec::with_capacity(cols);
        for k in 0..cols {
            let col: Vec<BigRational> =
                (0..rows).map(|l| BigRational::new(p.get(l, k).clone(), h[l].clone())).collect();
            let lo = col.iter().min().unwrap();
            let hi = col.iter().max().unwrap();
            spread = spread.max(hi - lo);
            let mean = col.iter().fold(BigRational::zero(), |a, b| a + b) / BigRational::from_integer(rows.into());
            values.push(Scalar::Rational(mean));
        }
        let spread = crate::scalar::rational_to_f64(&spread);
        if spread > tol {
            return Err(TowerError::DepthInsufficient { spread, tol });
        }
        Ok(MeasureVector { level: n, values, mode: MeasureMode::Approximate { tol, spread } })
    }

    /// Exact `μ(n)`, from the generator's `μ(1)` and `μ(n) = (M(n)ᵀ)⁻¹ μ(n−1)`.
    pub fn exact_measure(&self, n: usize) -> Result<MeasureVector, TowerError> {
        if n == 0 {
            return Ok(MeasureVector { level: 0, values: vec![Scalar::integer(1)], mode: MeasureMode::Exact });
        }
        self.check_level(n)?;
        let base = self.exact_base.as_ref().ok_or(TowerError::NoExactStructure)?;
        if let Some(v) = self.exact_measures.read().unwrap().get(n - 1) {
            return Ok(MeasureVector { level: n, values: v.as_ref().clone(), mode: MeasureMode::Exact });
        }
        let mut cache = self.exact_measures.write().unwrap();
        while cache.len() < n {
            let k = cache.len() + 1;
            let next = if k == 1 {
                base.clone()
            } else {
                let m = self.matrix(k);
                if m.rows() != m.cols() {
                    return Err(TowerError::NoExactStructure);
                }
                crate::linalg::solve_exact(m, &cache[k - 2], true)?.ok_or(TowerError::NoExactStructure)?
            };
            cache.push(Arc::new(next));
        }
        Ok(MeasureVector { level: n, values: cache[n - 1].as_ref().clone(), mode: MeasureMode::Exact })
    }

    /// `Σ_t h_t(n) μ_t`.
    pub fn measure_mass(&self, mv: &MeasureVector) -> Result<Scalar, TowerError> {
        let h = self.heights(mv.level)?;
        Ok(crate::linalg::dot_int_scalar(&h, &mv.values)?)
    }

    /// Validation summary used by the `validate` command.
    pub fn validation_report(&self, matrix_prefix: usize) -> Result<ValidationReport, TowerError> {
        let kr5_prime = match self.check_kr5_prime() {
            Ok(()) => None,
            Err(TowerError::Kr5PrimeViolation { level }) => Some(level),
            Err(e) => return Err(e),
        };
        let lr = if self.depth() >= 2 { Some(self.lr_constant(self.depth())?) } else { None };
        Ok(ValidationReport {
            system: self.name.clone(),
            depth: self.depth(),
            kr5: "ok",
            kr6: "ok",
            kr5_prime_first_failure: kr5_prime,
            alphabet_sizes: (1..=self.depth()).map(|n| self.alphabet_size(n)).collect(),
            matrices: (1..=self.depth().min(matrix_prefix)).map(|n| self.matrix(n).clone()).collect(),
            lr,
        })
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ValidationReport {
    pub system: String,
    pub depth: usize,
    pub kr5: &'static str,
    pub kr6: &'static str,
    pub kr5_prime_first_failure: Option<usize>,
    pub alphabet_sizes: Vec<usize>,
    pub matrices: Vec<IntMatrix>,
    pub lr: Option<LrEstimate>,
}

#[cfg(test)]
mod tests {
    use super::*;

    fn level(words: &[&str]) -> LevelSpec {
        LevelSpec::parse(words).unwrap()
    }

    #[test]
    fn odometer_matrices() {
        let sys = TowerSystem::build(LevelSource::Odometer, 6).unwrap();
        assert_eq!(sys.alphabet_size(3), 1);
        assert_eq!(sys.matrix(2), &IntMatrix::from_rows(&[vec![2]]));
        assert_eq!(sys.product(5, 1).unwrap(), IntMatrix::from_rows(&[vec![16]]));
        assert_eq!(*sys.heights(6).unwrap(), vec![BigInt::from(32)]);
    }

    #[test]
    fn words_give_the_matrix() {
        let sys = TowerSystem::from_levels(vec![level(&["1", "1"]), level(&["2211111", "22211"])]).unwrap();
        assert_eq!(sys.matrix(2), &IntMatrix::from_rows(&[vec![5, 2], vec![2, 3]]));
        assert_eq!(*sys.heights(2).unwrap(), vec![BigInt::from(7), BigInt::from(5)]);
    }

    #[test]
    fn validation_errors() {
        let kr6 = TowerSystem::from_levels(vec![level(&["1", "1"]), level(&["211", "12"])]);
        assert_eq!(kr6.unwrap_err(), TowerError::Kr6Violation { level: 2, word: 2, last: 2 });
        let kr5 = TowerSystem::from_levels(vec![level(&["1", "1"]), level(&["211", "11"])]);
        assert_eq!(kr5.unwrap_err(), TowerError::Kr5Violation { level: 2, word: 2, missing: 2 });
        let bad = TowerSystem::from_levels(vec![level(&["1", "1"]), level(&["210"])]);
        assert!(matches!(bad.unwrap_err(), TowerError::InvalidWord { letter: 0, .. }));
        let range = TowerSystem::from_levels(vec![level(&["1", "1"]), level(&["231"])]);
        assert!(matches!(range.unwrap_err(), TowerError::InvalidWord { letter: 3, alphabet: 2, .. }));
        assert!(matches!(LevelSpec::parse(&["2a1"]), Err(TowerError::UnparsableWord { .. })));
    }

    #[test]
    fn multi_digit_tokens() {
        assert_eq!(parse_word("1,12,3"), Some(vec![1, 12, 3]));
        assert_eq!(format_word(&[1, 12, 3]), "1,12,3");
        assert_eq!(format_word(&[2, 2, 1]), "221");
    }

    #[test]
    fn product_errors() {
        let sys = TowerSystem::build(LevelSource::Odometer, 4).unwrap();
        assert_eq!(sys.product(2, 2).unwrap_err(), TowerError::BadRange { n: 2, m: 2 });
        assert!(matches!(sys.product(9, 1).unwrap_err(), TowerError::LevelOutOfRange { .. }));
        assert!(matches!(sys.heights(5).unwrap_err(), TowerError::LevelOutOfRange { .. }));
    }

    #[test]
    fn odometer_lr_and_telescope() {
        let sys = TowerSystem::build(LevelSource::Odometer, 9).unwrap();
        let lr = sys.lr_constant(9).unwrap();
        assert_eq!(lr.constant, "2");
        assert_eq!(lr.matrix_set, MatrixSet::Finite);
        let t = sys.telescope().unwrap();
        assert_eq!(t.depth(), 5);
        assert_eq!(t.word(2, 1), &[1, 1, 1, 1]);
        assert!(t.check_kr5_prime().is_ok());
    }

    #[test]
    fn odometer_measure() {
        let sys = TowerSystem::build(LevelSource::Odometer, 8).unwrap();
        for n in 1..=5 {
            let mv = sys.exact_measure(n).unwrap();
            assert_eq!(mv.values, vec![Scalar::ratio(1, 1u64 << (n - 1))]);
            let approx = sys.invariant_measure(n, 8, 1e-12).unwrap();
            assert_eq!(approx.values, mv.values);
        }
    }

    #[test]
    fn periodic_source_repeats_tail() {
        let levels = vec![level(&["1", "1"]), level(&["2211111", "22211"]), level(&["211", "21"])];
        let sys = TowerSystem::build(LevelSource::Periodic { levels, period: 2 }, 6).unwrap();
        assert_eq!(sys.word(4, 1), &[2, 2, 1, 1, 1, 1, 1]);
        assert_eq!(sys.word(5, 2), &[2, 1]);
        assert_eq!(sys.matrix_set(), MatrixSet::Finite);
    }
}
