//! Fixtures shared by the benchmarks.

use lrtower::coding::{canonical_code, Fill, PointCode};
use lrtower::spectral::EigenCandidate;
use lrtower::{build_example, QuadraticReal, TowerSystem};

pub fn golden_minus_one() -> EigenCandidate {
    EigenCandidate::exact("-1/2+1/2*sqrt(5)".parse::<QuadraticReal>().expect("literal"), "golden-minus-one")
}

/// The golden system with its height caches already filled.
pub fn warm_example(depth: usize) -> TowerSystem {
    let sys = build_example(depth).expect("depth >= 2");
    sys.heights(depth).expect("in range");
    sys
}

pub fn origin(sys: &TowerSystem) -> PointCode {
    canonical_code(sys, sys.depth(), 1, Fill::Min).expect("valid depth")
}
