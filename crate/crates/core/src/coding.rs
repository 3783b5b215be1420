//! Finite point codes and the adic successor.
//!
//! A code of depth `N` lists `(τ_n, l_n)` for `n = 1..=N`: the tower at level
//! `n` and the position (1 = bottom, `m_τ(n)` = top) inside its word where
//! the point sits. Position `l_n` of tower `τ_n` must hold the letter
//! `τ_{n−1}`, with `τ_0 = 1`.

use num_bigint::BigInt;
use num_traits::Zero;
use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::tower::{TowerError, TowerSystem};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CodingError {
    #[error("code incompatible at level {0}")]
    Incompatible(usize),
    #[error("code entry out of range at level {0}")]
    OutOfRange(usize),
    #[error("level {level} outside the code depth {depth}")]
    LevelOutOfRange { level: usize, depth: usize },
    #[error("every level of the code is at the top of its tower; deepen the code")]
    CarryOverflow,
    #[error("level-1 towers must all have height 1")]
    HeightNotUnit,
    #[error("KR5' fails at level {0}; telescope the system first")]
    Kr5PrimeViolation(usize),
    #[error("level {level}: no adjacent occurrence of tower {tower} in the first word")]
    NoAdjacentOccurrence { level: usize, tower: usize },
    #[error("witness level {0} must be even, at least 2, and below the system depth")]
    BadWitnessLevel(usize),
    #[error(transparent)]
    Tower(#[from] TowerError),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PointCode {
    /// `pairs[n-1] = (τ_n, l_n)`.
    pub pairs: Vec<(usize, usize)>,
}

impl PointCode {
    pub fn new(pairs: Vec<(usize, usize)>) -> Self {
        Self { pairs }
    }

    pub fn depth(&self) -> usize {
        self.pairs.len()
    }

    pub fn tower(&self, n: usize) -> usize {
        if n == 0 {
            1
        } else {
            self.pairs[n - 1].0
        }
    }

    pub fn position(&self, n: usize) -> usize {
        self.pairs[n - 1].1
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("plain data")
    }

    pub fn from_json(s: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(s)
    }
}

/// Letter counts over the level `level` alphabet.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SVector {
    pub level: usize,
    pub counts: Vec<u64>,
}

impl SVector {
    pub fn is_zero(&self) -> bool {
        self.counts.iter().all(|&c| c == 0)
    }

    pub fn dot(&self, h: &[BigInt]) -> BigInt {
        self.counts.iter().zip(h).map(|(&c, x)| x * c).sum()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Fill {
    Min,
    Max,
}

pub fn validate_code(sys: &TowerSystem, code: &PointCode) -> Result<(), CodingError> {
    if code.depth() > sys.depth() {
        return Err(CodingError::LevelOutOfRange { level: code.depth(), depth: sys.depth() });
    }
    for n in 1..=code.depth() {
        let (t, l) = code.pairs[n - 1];
        if t == 0 || t > sys.alphabet_size(n) || l == 0 || l > sys.word_len(n, t) {
            return Err(CodingError::OutOfRange(n));
        }
        if sys.word(n, t)[l - 1] != code.tower(n - 1) {
            return Err(CodingError::Incompatible(n));
        }
    }
    Ok(())
}

fn check_level(code: &PointCode, n: usize, min: usize) -> Result<(), CodingError> {
    if n < min || n > code.depth() {
        Err(CodingError::LevelOutOfRange { level: n, depth: code.depth() })
    } else {
        Ok(())
    }
}

/// Letters of the level-`n` word strictly above position `l_n`, counted per
/// level-`(n−1)` tower.
pub fn s_vector(sys: &TowerSystem, code: &PointCode, n: usize) -> Result<SVector, CodingError> {
    check_level(code, n, 2)?;
    Ok(s_vector_unchecked(sys, code, n))
}

fn s_vector_unchecked(sys: &TowerSystem, code: &PointCode, n: usize) -> SVector {
    let (t, l) = code.pairs[n - 1];
    let mut counts = vec![0u64; sys.alphabet_size(n - 1)];
    for &letter in &sys.word(n, t)[l..] {
        counts[letter - 1] += 1;
    }
    SVector { level: n - 1, counts }
}

/// Return time `r_n` to the roof of level `n`: `r_1` counts the level-1 letters
/// above `l_1`, and each higher level adds `<s_{n−1}, H(n−1)>`.
pub fn entrance_time(sys: &TowerSystem, code: &PointCode, n: usize) -> Result<BigInt, CodingError> {
    check_level(code, n, 1)?;
    let (t1, l1) = code.pairs[0];
    let mut r = BigInt::from(sys.word_len(1, t1) - l1);
    for k in 2..=n {
        let s = s_vector_unchecked(sys, code, k);
        if !s.is_zero() {
            r += s.dot(&sys.heights(k - 1)?);
        }
    }
    Ok(r)
}

/// All `r_1..=r_depth` in one pass.
pub fn entrance_times(sys: &TowerSystem, code: &PointCode) -> Result<Vec<BigInt>, CodingError> {
    let mut out = Vec::with_capacity(code.depth());
    let (t1, l1) = code.pairs[0];
    let mut r = BigInt::from(sys.word_len(1, t1) - l1);
    out.push(r.clone());
    for k in 2..=code.depth() {
        let s = s_vector_unchecked(sys, code, k);
        if !s.is_zero() {
            r += s.dot(&sys.heights(k - 1)?);
        }
        out.push(r.clone());
    }
    Ok(out)
}

/// In-place adic successor; returns the lowest level whose position changed.
pub fn advance(sys: &TowerSystem, code: &mut PointCode) -> Result<usize, CodingError> {
    let top = (1..=code.depth())
        .find(|&n| {
            let (t, l) = code.pairs[n - 1];
            l < sys.word_len(n, t)
        })
        .ok_or(CodingError::CarryOverflow)?;
    code.pairs[top - 1].1 += 1;
    for k in (1..top).rev() {
        let (t_up, l_up) = code.pairs[k];
        code.pairs[k - 1] = (sys.word(k + 1, t_up)[l_up - 1], 1);
    }
    Ok(top)
}

pub fn successor(sys: &TowerSystem, code: &PointCode) -> Result<PointCode, CodingError> {
    let mut next = code.clone();
    advance(sys, &mut next)?;
    Ok(next)
}

/// Code of depth `depth` in tower `top`, at the bottom (`Min`) or top (`Max`) of every level.
pub fn canonical_code(sys: &TowerSystem, depth: usize, top: usize, fill: Fill) -> Result<PointCode, CodingError> {
    if depth == 0 || depth > sys.depth() {
        return Err(CodingError::LevelOutOfRange { level: depth, depth: sys.depth() });
    }
    if top == 0 || top > sys.alphabet_size(depth) {
        return Err(CodingError::OutOfRange(depth));
    }
    let mut pairs = vec![(0, 0); depth];
    let mut t = top;
    for n in (1..=depth).rev() {
        let word = sys.word(n, t);
        let l = match fill {
            Fill::Min => 1,
            Fill::Max => word.len(),
        };
        pairs[n - 1] = (t, l);
        t = word[l - 1];
    }
    Ok(PointCode::new(pairs))
}

fn require_unit_heights(sys: &TowerSystem) -> Result<(), CodingError> {
    if sys.words(1).iter().all(|w| w.len() == 1) {
        Ok(())
    } else {
        Err(CodingError::HeightNotUnit)
    }
}

/// `τ_1` along the orbit `x, Tx, …, T^{K−1}x`.
pub fn orbit_labels(sys: &TowerSystem, code: &PointCode, k: usize) -> Result<Vec<usize>, CodingError> {
    require_unit_heights(sys)?;
    let mut out = Vec::with_capacity(k);
    if k == 0 {
        return Ok(out);
    }
    let mut cur = code.clone();
    out.push(cur.tower(1));
    for _ in 1..k {
        advance(sys, &mut cur)?;
        out.push(cur.tower(1));
    }
    Ok(out)
}

/// Uniformly chosen top tower and positions, cascaded down to level 1.
pub fn random_code<R: Rng + ?Sized>(sys: &TowerSystem, depth: usize, rng: &mut R) -> Result<PointCode, CodingError> {
    if depth == 0 || depth > sys.depth() {
        return Err(CodingError::LevelOutOfRange { level: depth, depth: sys.depth() });
    }
    let mut pairs = vec![(0, 0); depth];
    let mut t = rng.random_range(1..=sys.alphabet_size(depth));
    for n in (1..=depth).rev() {
        let word = sys.word(n, t);
        let l = rng.random_range(1..=word.len());
        pairs[n - 1] = (t, l);
        t = word[l - 1];
    }
    Ok(PointCode::new(pairs))
}

/// Two codes whose s-vectors differ by the unit vector `e_i` exactly at each
/// selected level `n` (given as `(n, i)`) and agree everywhere else.
///
/// At a selected level `n` the first word of level `n+1` is searched for
/// positions `k, k+1` with letter `i` at `k+1`; `x` sits at `k` and `y` at
/// `k+1`, and both sit at the top of their level-`n` towers. All other
/// levels are at the top of tower 1. Needs every matrix entry from level 2 on
/// to be at least 2, so that such a `k` exists.
pub fn witness_pair(
    sys: &TowerSystem,
    selected: &[(usize, usize)],
) -> Result<(PointCode, PointCode), CodingError> {
    if let Err(TowerError::Kr5PrimeViolation { level }) = sys.check_kr5_prime() {
        return Err(CodingError::Kr5PrimeViolation(level));
    }
    let depth = sys.depth();
    let mut x: Vec<Option<(usize, usize)>> = vec![None; depth];
    let mut y = x.clone();
    for &(n, i) in selected {
        if n < 2 || n % 2 == 1 || n >= depth {
            return Err(CodingError::BadWitnessLevel(n));
        }
        if i == 0 || i > sys.alphabet_size(n) {
            return Err(CodingError::OutOfRange(n));
        }
        let word = sys.word(n + 1, 1);
        let k = (1..word.len())
            .find(|&k| word[k] == i)
            .ok_or(CodingError::NoAdjacentOccurrence { level: n, tower: i })?;
        x[n] = Some((1, k));
        y[n] = Some((1, k + 1));
        let tx = word[k - 1];
        x[n - 1] = Some((tx, sys.word_len(n, tx)));
        y[n - 1] = Some((i, sys.word_len(n, i)));
    }
    let fill = |v: Vec<Option<(usize, usize)>>| {
        PointCode::new(v.into_iter().enumerate().map(|(i, p)| p.unwrap_or((1, sys.word_len(i + 1, 1)))).collect())
    };
    let (x, y) = (fill(x), fill(y));
    validate_code(sys, &x)?;
    validate_code(sys, &y)?;
    Ok((x, y))
}

/// `true` iff `r_n(code) = 0`, i.e. the point lies in the roof of level `n`.
pub fn in_roof(sys: &TowerSystem, code: &PointCode, n: usize) -> Result<bool, CodingError> {
    Ok(entrance_time(sys, code, n)?.is_zero())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::example_ab::build_example;
    use crate::tower::LevelSource;

    fn odometer(depth: usize) -> TowerSystem {
        TowerSystem::build(LevelSource::Odometer, depth).unwrap()
    }

    fn code(p: &[(usize, usize)]) -> PointCode {
        PointCode::new(p.to_vec())
    }

    #[test]
    fn validation() {
        let od = odometer(4);
        assert!(validate_code(&od, &code(&[(1, 1), (1, 2), (1, 1)])).is_ok());
        let ex = build_example(4).unwrap();
        // Third letter of "2211111" is 1, so τ_1 must be 1.
        assert_eq!(validate_code(&ex, &code(&[(2, 1), (1, 3)])), Err(CodingError::Incompatible(2)));
        assert!(validate_code(&ex, &code(&[(1, 1), (1, 3)])).is_ok());
        let top = canonical_code(&ex, 4, 2, Fill::Max).unwrap();
        assert!(validate_code(&ex, &top).is_ok());
        assert_eq!(entrance_time(&ex, &top, 4).unwrap(), BigInt::zero());
    }

    #[test]
    fn s_vectors_and_times() {
        let ex = build_example(3).unwrap();
        let c = code(&[(2, 1), (1, 1)]);
        assert_eq!(s_vector(&ex, &c, 2).unwrap().counts, vec![5, 1]);
        assert_eq!(entrance_time(&ex, &c, 2).unwrap(), BigInt::from(6));
        let od = odometer(4);
        let c = code(&[(1, 1), (1, 1), (1, 2), (1, 1)]);
        assert_eq!(s_vector(&od, &c, 2).unwrap().counts, vec![1]);
        assert_eq!(entrance_time(&od, &c, 4).unwrap(), BigInt::from(5));
        assert!(matches!(s_vector(&od, &c, 1), Err(CodingError::LevelOutOfRange { .. })));
    }

    #[test]
    fn odometer_successor() {
        let od = odometer(4);
        assert_eq!(successor(&od, &code(&[(1, 1), (1, 1), (1, 1), (1, 1)])).unwrap(), code(&[(1, 1), (1, 2), (1, 1), (1, 1)]));
        assert_eq!(successor(&od, &code(&[(1, 1), (1, 2), (1, 2), (1, 1)])).unwrap(), code(&[(1, 1), (1, 1), (1, 1), (1, 2)]));
        assert_eq!(successor(&od, &code(&[(1, 1), (1, 2), (1, 2), (1, 2)])), Err(CodingError::CarryOverflow));
    }

    #[test]
    fn canonical_fills() {
        let ex = build_example(6).unwrap();
        let min = canonical_code(&ex, 6, 1, Fill::Min).unwrap();
        assert!(min.pairs[..5].iter().all(|&(t, _)| t == 2));
        let max = canonical_code(&ex, 6, 2, Fill::Max).unwrap();
        assert!(max.pairs[..5].iter().all(|&(t, _)| t == 1));
    }

    #[test]
    fn orbit_from_min_code() {
        let ex = build_example(5).unwrap();
        let min = canonical_code(&ex, 5, 2, Fill::Min).unwrap();
        let word: String = orbit_labels(&ex, &min, 12).unwrap().iter().map(|d| d.to_string()).collect();
        assert_eq!(word, "222112211111");
        assert_eq!(orbit_labels(&ex, &min, 1).unwrap(), vec![2]);
    }

    #[test]
    fn witness_on_telescoped_odometer() {
        let od = odometer(9).telescope().unwrap();
        let (x, y) = witness_pair(&od, &[(2, 1)]).unwrap();
        let sx = s_vector(&od, &x, 3).unwrap();
        let sy = s_vector(&od, &y, 3).unwrap();
        assert_eq!(sx.counts[0] - sy.counts[0], 1);
        let (x, y) = witness_pair(&od, &[]).unwrap();
        assert_eq!(x, y);
        let ex = build_example(6).unwrap();
        assert_eq!(witness_pair(&ex, &[(2, 1)]), Err(CodingError::Kr5PrimeViolation(3)));
    }
}
