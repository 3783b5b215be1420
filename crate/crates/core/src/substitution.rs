//! Substitutions, their composition along a tower system, and prefixes of the
//! associated one-sided sequence.

use std::collections::HashMap;

use serde::Serialize;
use thiserror::Error;

use crate::linalg::IntMatrix;
use crate::tower::{TowerError, TowerSystem};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SubstitutionError {
    #[error("outer substitution reads {outer} letters but inner writes {inner}")]
    AlphabetMismatch { outer: usize, inner: usize },
    #[error("image of letter {0} is empty or uses letters out of range")]
    BadImage(usize),
    #[error("level-1 towers must all have height 1")]
    HeightNotUnit,
    #[error("words of level {0} do not share a first letter")]
    PrefixNotNested(usize),
    #[error("system depth {depth} only yields {available} symbols")]
    DepthInsufficient { depth: usize, available: usize },
    #[error("word of length {len} is too short for factors up to {max_len}")]
    WordTooShort { len: usize, max_len: usize },
    #[error(transparent)]
    Tower(#[from] TowerError),
}

/// Letter `t ∈ 1..=source` maps to `images[t-1]`, a word over `1..=target`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Substitution {
    target: usize,
    images: Vec<Vec<usize>>,
}

impl Substitution {
    pub fn new(target: usize, images: Vec<Vec<usize>>) -> Result<Self, SubstitutionError> {
        for (i, w) in images.iter().enumerate() {
            if w.is_empty() || w.iter().any(|&l| l == 0 || l > target) {
                return Err(SubstitutionError::BadImage(i + 1));
            }
        }
        Ok(Self { target, images })
    }

    pub fn identity(size: usize) -> Self {
        Self { target: size, images: (1..=size).map(|t| vec![t]).collect() }
    }

    /// Level `n` read as a substitution from level-`n` towers to level-`(n−1)` towers.
    pub fn from_level(sys: &TowerSystem, n: usize) -> Self {
        Self { target: sys.alphabet_size(n - 1), images: sys.words(n).to_vec() }
    }

    pub fn source(&self) -> usize {
        self.images.len()
    }

    pub fn target(&self) -> usize {
        self.target
    }

    pub fn image(&self, t: usize) -> &[usize] {
        &self.images[t - 1]
    }

    pub fn apply(&self, word: &[usize]) -> Vec<usize> {
        word.iter().flat_map(|&t| self.images[t - 1].iter().copied()).collect()
    }

    /// Row `t`, column `k`: occurrences of `k` in the image of `t`.
    pub fn incidence(&self) -> IntMatrix {
        let mut m = IntMatrix::zeros(self.source(), self.target);
        for (t, w) in self.images.iter().enumerate() {
            let mut counts = vec![0u64; self.target];
            for &l in w {
                counts[l - 1] += 1;
            }
            for (k, c) in counts.into_iter().enumerate() {
                m.set(t, k, c.into());
            }
        }
        m
    }
}

/// `outer ∘ inner`: apply `inner`, then `outer` letterwise.
///
/// Incidence matrices compose as `incidence(inner) · incidence(outer)`.
pub fn compose(outer: &Substitution, inner: &Substitution) -> Result<Substitution, SubstitutionError> {
    if outer.source() != inner.target {
        return Err(SubstitutionError::AlphabetMismatch { outer: outer.source(), inner: inner.target });
    }
    Ok(Substitution { target: outer.target, images: inner.images.iter().map(|w| outer.apply(w)).collect() })
}

/// `W(n)`: level-`n` towers expanded to level-1 symbols.
pub fn level_expansion(sys: &TowerSystem, n: usize) -> Result<Substitution, SubstitutionError> {
    if n == 0 || n > sys.depth() {
        return Err(TowerError::LevelOutOfRange { level: n, depth: sys.depth() }.into());
    }
    let mut acc = Substitution::identity(sys.alphabet_size(1));
    for k in 2..=n {
        acc = compose(&acc, &Substitution::from_level(sys, k))?;
    }
    Ok(acc)
}

fn require_unit_heights(sys: &TowerSystem) -> Result<(), SubstitutionError> {
    if sys.words(1).iter().all(|w| w.len() == 1) {
        Ok(())
    } else {
        Err(SubstitutionError::HeightNotUnit)
    }
}

fn common_first_letter(sys: &TowerSystem, n: usize) -> Result<usize, SubstitutionError> {
    let first = sys.word(n, 1)[0];
    if sys.words(n).iter().all(|w| w[0] == first) {
        Ok(first)
    } else {
        Err(SubstitutionError::PrefixNotNested(n))
    }
}

/// First `k` symbols to the right of the origin.
///
/// With `f_n` the common first letter of the level-`n` words, the words
/// `W_{f_{n+1}}(n)` are nested prefixes of one another; the first long
/// enough one is returned, truncated to `k`.
pub fn generate_prefix(sys: &TowerSystem, k: usize) -> Result<Vec<usize>, SubstitutionError> {
    require_unit_heights(sys)?;
    // expansions[t-1] = W_t(n) truncated to k, as level-1 symbols
    let mut expansions: Vec<Vec<usize>> = (1..=sys.alphabet_size(1)).map(|t| vec![t]).collect();
    for n in 1..sys.depth() {
        let f = common_first_letter(sys, n + 1)?;
        if expansions[f - 1].len() >= k {
            let mut out = expansions[f - 1].clone();
            out.truncate(k);
            return Ok(out);
        }
        expansions = sys
            .words(n + 1)
            .iter()
            .map(|w| {
                let mut out = Vec::with_capacity(k);
                for &s in w {
                    if out.len() >= k {
                        break;
                    }
                    out.extend_from_slice(&expansions[s - 1]);
                }
                out.truncate(k);
                out
            })
            .collect();
    }
    let available = expansions.iter().map(Vec::len).min().unwrap_or(0);
    Err(SubstitutionError::DepthInsufficient { depth: sys.depth(), available })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RecurrenceRow {
    pub ell: usize,
    pub max_gap: usize,
    pub ratio: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RecurrenceTable {
    pub rows: Vec<RecurrenceRow>,
    pub max_ratio: f64,
}

impl RecurrenceTable {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("ell,max_gap,ratio\n");
        for r in &self.rows {
            out.push_str(&format!("{},{},{:.6}\n", r.ell, r.max_gap, r.ratio));
        }
        out
    }
}

/// For each length `ℓ ≤ max_len`, the largest distance between consecutive
/// occurrences of a length-`ℓ` factor, divided by `ℓ`.
pub fn recurrence_constant(word: &[usize], max_len: usize) -> Result<RecurrenceTable, SubstitutionError> {
    if max_len == 0 || word.len() < 2 * max_len {
        return Err(SubstitutionError::WordTooShort { len: word.len(), max_len });
    }
    let rows: Vec<RecurrenceRow> = (1..=max_len)
        .map(|ell| {
            let mut last: HashMap<&[usize], usize> = HashMap::new();
            let mut max_gap = 0;
            for i in 0..=word.len() - ell {
                if let Some(prev) = last.insert(&word[i..i + ell], i) {
                    max_gap = max_gap.max(i - prev);
                }
            }
            RecurrenceRow { ell, max_gap, ratio: max_gap as f64 / ell as f64 }
        })
        .collect();
    let max_ratio = rows.iter().map(|r| r.ratio).fold(0.0, f64::max);
    Ok(RecurrenceTable { rows, max_ratio })
}
