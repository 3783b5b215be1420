//! The two-matrix golden system.
//!
//! Levels alternate between `A = [[5,2],[2,3]]` and `B = [[2,1],[1,1]]`,
//! which share the eigenvectors `(φ,1)` and `(φ−2, φ−1)`. The choice of
//! `M(n+1)` is driven by the scalar recursion `v_1 = 1`,
//! `v_{n+1} = β·v_n` where `β` is the small eigenvalue of `A` when
//! `n·v_n ≤ 1` and of `B` otherwise. Along the small eigenvector this gives
//! `P(n)·v = v_n·v`, and `n·v_n` stays bounded above and away from zero.

use std::cmp::Ordering;
use std::fmt;
use std::sync::Arc;

use num_bigint::{BigInt, Sign};
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::linalg::IntMatrix;
use crate::scalar::{rational_to_f64, QuadraticReal, Scalar};
use crate::tower::{LevelGenerator, LevelSource, LevelSpec, MatrixSet, TowerError, TowerSystem};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ExampleError {
    #[error("P(n)v = v_n v fails at n = {0}")]
    IdentityViolation(usize),
    #[error("need N >= {min}, got {got}")]
    TooShallow { min: usize, got: usize },
    #[error(transparent)]
    Tower(#[from] TowerError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum Choice {
    A,
    B,
}

impl Choice {
    pub fn matrix(self) -> IntMatrix {
        match self {
            Choice::A => IntMatrix::from_rows(&[vec![5, 2], vec![2, 3]]),
            Choice::B => IntMatrix::from_rows(&[vec![2, 1], vec![1, 1]]),
        }
    }

    /// Ordered words of the two towers.
    pub fn words(self) -> [&'static str; 2] {
        match self {
            Choice::A => ["2211111", "22211"],
            Choice::B => ["211", "21"],
        }
    }

    pub fn level(self) -> LevelSpec {
        LevelSpec::parse(&self.words()).expect("static words")
    }

    /// Eigenvalue on `(φ−2, φ−1)`: `5−2φ` for `A`, `2−φ` for `B`.
    pub fn small_eigenvalue(self) -> QuadraticReal {
        match self {
            Choice::A => QuadraticReal::from_parts(4, 1, -1, 1, 5),
            Choice::B => QuadraticReal::from_parts(3, 2, -1, 2, 5),
        }
    }

    /// Eigenvalue on `(φ, 1)`: `3+2φ` for `A`, `1+φ` for `B`.
    pub fn large_eigenvalue(self) -> QuadraticReal {
        match self {
            Choice::A => QuadraticReal::from_parts(4, 1, 1, 1, 5),
            Choice::B => QuadraticReal::from_parts(3, 2, 1, 2, 5),
        }
    }

    pub fn determinant(self) -> i64 {
        match self {
            Choice::A => 11,
            Choice::B => 1,
        }
    }
}

impl fmt::Display for Choice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Choice::A => "A",
            Choice::B => "B",
        })
    }
}

/// `φ = (1+√5)/2`.
pub fn phi() -> QuadraticReal {
    QuadraticReal::golden()
}

/// The common small eigenvector `(φ−2, φ−1)`.
pub fn small_eigenvector() -> [QuadraticReal; 2] {
    [QuadraticReal::from_parts(-3, 2, 1, 2, 5), QuadraticReal::from_parts(-1, 2, 1, 2, 5)]
}

/// `μ(1) = (φ−1, 2−φ)`, normalized so that `μ_1 + μ_2 = 1`.
pub fn base_measure() -> [QuadraticReal; 2] {
    [QuadraticReal::from_parts(-1, 2, 1, 2, 5), QuadraticReal::from_parts(3, 2, -1, 2, 5)]
}

/// `(p + q√5) / 2^k`; every `v_n` has this form, which keeps the recursion
/// free of gcd reductions.
#[derive(Clone, Debug, PartialEq, Eq)]
struct Dyadic {
    p: BigInt,
    q: BigInt,
    k: u64,
}

/// Sign of `x + y√5`.
fn sign_sqrt5(x: &BigInt, y: &BigInt) -> Ordering {
    match (x.sign(), y.sign()) {
        (Sign::NoSign, Sign::NoSign) => Ordering::Equal,
        (Sign::Minus, Sign::Minus | Sign::NoSign) | (Sign::NoSign, Sign::Minus) => Ordering::Less,
        (Sign::Plus, Sign::Plus | Sign::NoSign) | (Sign::NoSign, Sign::Plus) => Ordering::Greater,
        (Sign::Plus, Sign::Minus) => (x * x).cmp(&(y * y * 5u32)),
        (Sign::Minus, Sign::Plus) => (y * y * 5u32).cmp(&(x * x)),
    }
}

impl Dyadic {
    fn one() -> Self {
        Self { p: BigInt::one(), q: BigInt::zero(), k: 0 }
    }

    fn times(&self, c: Choice) -> Self {
        let (p, q) = (&self.p, &self.q);
        let next = match c {
            // (p + q√5)(4 − √5)
            Choice::A => Self { p: p * 4u32 - q * 5u32, q: q * 4u32 - p, k: self.k },
            // (p + q√5)(3 − √5)/2
            Choice::B => Self { p: p * 3u32 - q * 5u32, q: q * 3u32 - p, k: self.k + 1 },
        };
        next.reduced()
    }

    fn reduced(mut self) -> Self {
        let shift = [self.p.trailing_zeros(), self.q.trailing_zeros()]
            .into_iter()
            .flatten()
            .chain([self.k])
            .min()
            .unwrap_or(0);
        if shift > 0 {
            self.p >>= shift;
            self.q >>= shift;
            self.k -= shift;
        }
        self
    }

    fn scaled(&self, n: usize) -> Self {
        Self { p: &self.p * n, q: &self.q * n, k: self.k }.reduced()
    }

    /// Sign of `self − 1`.
    fn cmp_one(&self) -> Ordering {
        sign_sqrt5(&(&self.p - (BigInt::one() << self.k)), &self.q)
    }

    fn cmp(&self, other: &Self) -> Ordering {
        let k = self.k.max(other.k);
        let (a, b) = (k - self.k, k - other.k);
        sign_sqrt5(&((&self.p << a) - (&other.p << b)), &((&self.q << a) - (&other.q << b)))
    }

    fn to_quadratic(&self) -> QuadraticReal {
        let den = BigInt::one() << self.k;
        QuadraticReal::new(BigRational::new(self.p.clone(), den.clone()), BigRational::new(self.q.clone(), den), 5)
            .expect("5 is a valid radicand")
    }

    fn to_f64(&self) -> f64 {
        // q√5 to 64 fractional bits, then one correctly scaled division
        let extra: u64 = 64;
        let root: BigInt = ((&self.q * &self.q * 5u32) << (2 * extra)).sqrt();
        let root = if self.q.sign() == Sign::Minus { -root } else { root };
        let num = (&self.p << extra) + root;
        rational_to_f64(&BigRational::new(num, BigInt::one() << (self.k + extra)))
    }
}

/// One step of the recursion: `v = v_n`, and `choice = M(n+1)`.
#[derive(Clone, Debug, PartialEq)]
pub struct VnState {
    pub n: usize,
    pub choice: Choice,
    v: Dyadic,
}

impl VnState {
    pub fn v(&self) -> QuadraticReal {
        self.v.to_quadratic()
    }

    pub fn n_times_v(&self) -> QuadraticReal {
        self.v.scaled(self.n).to_quadratic()
    }

    pub fn v_f64(&self) -> f64 {
        self.v.to_f64()
    }

    pub fn n_times_v_f64(&self) -> f64 {
        self.v.scaled(self.n).to_f64()
    }
}

/// Streams `(n, v_n, M(n+1))` for `n = 1, 2, …` in exact arithmetic.
#[derive(Clone, Debug)]
pub struct VnIter {
    n: usize,
    v: Dyadic,
}

impl Default for VnIter {
    fn default() -> Self {
        Self { n: 1, v: Dyadic::one() }
    }
}

impl VnIter {
    pub fn new() -> Self {
        Self::default()
    }
}

impl Iterator for VnIter {
    type Item = VnState;

    fn next(&mut self) -> Option<VnState> {
        // A when n·v ≤ 1, else B
        let choice = if self.v.scaled(self.n).cmp_one().is_gt() { Choice::B } else { Choice::A };
        let next = self.v.times(choice);
        let state = VnState { n: self.n, choice, v: std::mem::replace(&mut self.v, next) };
        self.n += 1;
        Some(state)
    }
}

/// States for `n = 1..=n_max`.
pub fn vn_sequence(n_max: usize) -> Vec<VnState> {
    VnIter::new().take(n_max).collect()
}

/// `M(2), …, M(depth)`.
pub fn choices(depth: usize) -> Vec<Choice> {
    VnIter::new().take(depth.saturating_sub(1)).map(|s| s.choice).collect()
}

/// Level generator for the golden system.
#[derive(Clone, Copy, Debug, Default)]
pub struct ExampleGenerator;

impl LevelGenerator for ExampleGenerator {
    fn name(&self) -> String {
        "example-ab".into()
    }

    fn levels(&self, depth: usize) -> Vec<LevelSpec> {
        let mut levels = Vec::with_capacity(depth);
        if depth == 0 {
            return levels;
        }
        levels.push(LevelSpec::parse(&["1", "1"]).expect("static words"));
        let (a, b) = (Choice::A.level(), Choice::B.level());
        for c in choices(depth) {
            levels.push(if c == Choice::A { a.clone() } else { b.clone() });
        }
        levels
    }

    fn matrix_set(&self) -> MatrixSet {
        MatrixSet::Finite
    }

    fn exact_base_measure(&self) -> Option<Vec<Scalar>> {
        Some(base_measure().into_iter().map(Scalar::from).collect())
    }
}

pub fn build_example(depth: usize) -> Result<TowerSystem, ExampleError> {
    if depth < 2 {
        return Err(ExampleError::TooShallow { min: 2, got: depth });
    }
    Ok(TowerSystem::build(LevelSource::Generator(Arc::new(ExampleGenerator)), depth)?)
}

fn mul_vec_quadratic(m: &IntMatrix, v: &[QuadraticReal; 2]) -> [QuadraticReal; 2] {
    let row = |i: usize| &v[0].mul_int(m.get(i, 0)) + &v[1].mul_int(m.get(i, 1));
    [row(0), row(1)]
}

/// Checks `P(n)·v = v_n·v` exactly for `2 ≤ n ≤ n_max`.
pub fn verify_pnv(n_max: usize) -> Result<(), ExampleError> {
    if n_max < 2 {
        return Err(ExampleError::TooShallow { min: 2, got: n_max });
    }
    let v = small_eigenvector();
    let mut image = v.clone();
    let mut states = VnIter::new();
    let mut prev = states.next().expect("infinite");
    for state in states.take(n_max - 1) {
        image = mul_vec_quadratic(&prev.choice.matrix(), &image);
        let vn = state.v();
        let expected = [&v[0] * &vn, &v[1] * &vn];
        if image != expected {
            return Err(ExampleError::IdentityViolation(state.n));
        }
        prev = state;
    }
    Ok(())
}

#[derive(Clone, Debug, PartialEq)]
pub struct NvnBounds {
    pub min_n: usize,
    pub min: QuadraticReal,
    pub max_n: usize,
    pub max: QuadraticReal,
}

/// Exact extremes of `n·v_n` over `2 ≤ n ≤ n_max`.
pub fn nvn_bounds(n_max: usize) -> Result<NvnBounds, ExampleError> {
    if n_max < 2 {
        return Err(ExampleError::TooShallow { min: 2, got: n_max });
    }
    let mut min: Option<(usize, Dyadic)> = None;
    let mut max: Option<(usize, Dyadic)> = None;
    for s in VnIter::new().skip(1).take(n_max - 1) {
        let x = s.v.scaled(s.n);
        if min.as_ref().is_none_or(|m| x.cmp(&m.1).is_lt()) {
            min = Some((s.n, x.clone()));
        }
        if max.as_ref().is_none_or(|m| x.cmp(&m.1).is_gt()) {
            max = Some((s.n, x));
        }
    }
    let ((min_n, min), (max_n, max)) = (min.expect("n_max >= 2"), max.expect("n_max >= 2"));
    Ok(NvnBounds { min_n, min: min.to_quadratic(), max_n, max: max.to_quadratic() })
}

/// Longest run of consecutive `B` choices among `M(2..=depth)`.
pub fn longest_b_run(depth: usize) -> usize {
    let mut best = 0;
    let mut run = 0;
    for c in choices(depth) {
        run = if c == Choice::B { run + 1 } else { 0 };
        best = best.max(run);
    }
    best
}

/// `α = (φ−1, 2−φ)·A^{−l}·w`.
#[derive(Clone, Debug, PartialEq)]
pub struct EmuElement {
    pub l: u32,
    pub w: [BigInt; 2],
    pub alpha: QuadraticReal,
    /// `det(A^l) = 11^l`; `11^l·A^{−l}` is an integer matrix.
    pub det_power: BigInt,
}

fn a_inverse_apply(x: &[BigRational; 2]) -> [BigRational; 2] {
    let eleven = BigRational::from_integer(11.into());
    let three = BigRational::from_integer(3.into());
    let two = BigRational::from_integer(2.into());
    let five = BigRational::from_integer(5.into());
    [(&three * &x[0] - &two * &x[1]) / &eleven, (&five * &x[1] - &two * &x[0]) / &eleven]
}

fn a_apply(x: &[BigRational; 2]) -> [BigRational; 2] {
    let two = BigRational::from_integer(2.into());
    let three = BigRational::from_integer(3.into());
    let five = BigRational::from_integer(5.into());
    [&five * &x[0] + &two * &x[1], &two * &x[0] + &three * &x[1]]
}

/// Pairs `(x_1, x_2)` with the element `(φ−1)x_1 + (2−φ)x_2`.
fn pair_with_base(x: &[BigRational; 2]) -> QuadraticReal {
    let mu = base_measure();
    &mu[0].mul_rational(&x[0]) + &mu[1].mul_rational(&x[1])
}

pub fn emu_alpha(l: u32, w: [BigInt; 2]) -> EmuElement {
    let mut x = [BigRational::from_integer(w[0].clone()), BigRational::from_integer(w[1].clone())];
    for _ in 0..l {
        x = a_inverse_apply(&x);
    }
    EmuElement { l, alpha: pair_with_base(&x), w, det_power: BigInt::from(11).pow(l) }
}

/// Coordinates `x` with `α = (φ−1)x_1 + (2−φ)x_2`; for `α = a + b√5` these are `(a+3b, a+b)`.
fn base_coordinates(alpha: &QuadraticReal) -> [BigRational; 2] {
    let a = alpha.rational_part();
    let b = alpha.irrational_part();
    let three = BigRational::from_integer(3.into());
    [a + &three * b, a + b]
}

/// Finds `(l, w)` with `α ≡ ±(φ−1, 2−φ)·A^{−l}·w (mod ℤ)`, `l ≤ l_max`, `|w_i| ≤ w_box`.
///
/// With `x` the base coordinates of `α`, membership at level `l` means
/// `A^l·x` is integral. Shifting `α` by an integer `k` adds `k·A^l(1,1)` to
/// `w` and never changes integrality, so `k` only serves to fit the box;
/// the smallest `|k|` that fits is chosen, preferring `k ≥ 0`. Returns the
/// witness with the least `l`. `α` must lie in `ℚ(√5)`.
pub fn emu_member(alpha: &QuadraticReal, l_max: u32, w_box: u64) -> Option<(u32, [BigInt; 2])> {
    if !alpha.is_rational() && alpha.radicand() != 5 {
        return None;
    }
    let bound = BigInt::from(w_box);
    let mut x = base_coordinates(alpha);
    let mut ones = [BigRational::one(), BigRational::one()];
    for l in 0..=l_max {
        if x.iter().all(|c| c.is_integer()) {
            let w0 = [x[0].to_integer(), x[1].to_integer()];
            let c = [ones[0].to_integer(), ones[1].to_integer()];
            if let Some(k) = smallest_shift(&w0, &c, &bound) {
                return Some((l, [&w0[0] + &k * &c[0], &w0[1] + &k * &c[1]]));
            }
        }
        x = a_apply(&x);
        ones = a_apply(&ones);
    }
    None
}

/// Least `|k|` (ties to `k ≥ 0`) with `|w_i + k c_i| ≤ bound`, for `c_i > 0`.
fn smallest_shift(w: &[BigInt; 2], c: &[BigInt; 2], bound: &BigInt) -> Option<BigInt> {
    use num_integer::Integer;
    let mut lo: Option<BigInt> = None;
    let mut hi: Option<BigInt> = None;
    for i in 0..2 {
        let l = (-bound - &w[i]).div_ceil(&c[i]);
        let h = (bound - &w[i]).div_floor(&c[i]);
        lo = Some(lo.map_or(l.clone(), |x: BigInt| x.max(l)));
        hi = Some(hi.map_or(h.clone(), |x: BigInt| x.min(h)));
    }
    let (lo, hi) = (lo?, hi?);
    if lo > hi {
        return None;
    }
    Some(if lo > BigInt::zero() {
        lo
    } else if hi < BigInt::zero() {
        hi
    } else {
        BigInt::zero()
    })
}

/// `μ(n)` by the closed form `μ(n) = μ(n−1) / λ_{M(n)}`; the base measure is
/// an eigenvector of both matrices for their large eigenvalues.
pub fn exact_measure_closed_form(n: usize) -> [QuadraticReal; 2] {
    let mut mu = base_measure();
    for c in choices(n) {
        let inv = c.large_eigenvalue().inverse().expect("nonzero");
        mu = [&mu[0] * &inv, &mu[1] * &inv];
    }
    mu
}

/// The `vn` table: `n`, decimal `v_n`, decimal `n·v_n`, choice `M(n+1)`.
pub fn vn_csv(n_max: usize) -> String {
    let mut out = String::from("n,v_n,n_v_n,choice\n");
    for s in VnIter::new().take(n_max) {
        out.push_str(&format!("{},{:.12e},{:.12},{}\n", s.n, s.v_f64(), s.n_times_v_f64(), s.choice));
    }
    out
}

impl EmuElement {
    pub fn is_trivial(&self) -> bool {
        self.alpha.is_integer()
    }
}
