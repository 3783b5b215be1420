//! Acceptance suite: one PASS/FAIL line per criterion.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::Instant;

use lrtower::coding::{canonical_code, entrance_time, orbit_labels, random_code, s_vector, successor, witness_pair, Fill, PointCode};
use lrtower::example_ab::{base_measure, build_example, choices, nvn_bounds, small_eigenvector, verify_pnv, Choice};
use lrtower::markov::{mixing_estimate, transition_matrix, transition_product, ChainSampler, MeasureSource};
use lrtower::spectral::{
    classify, eigenfunction_g, norm_series, rebase_to_level_one, tendto0_decompose, DecayOptions, Decomposition, EigenCandidate,
    Policy, Verdict,
};
use lrtower::substitution::{generate_prefix, level_expansion};
use lrtower::{LevelSource, QuadraticReal, Scalar, TowerSystem};
use num_bigint::BigInt;
use num_traits::{One, Zero};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

type Outcome = Result<(), String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Outcome {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn q(s: &str) -> QuadraticReal {
    s.parse().unwrap()
}

fn golden_minus_one() -> EigenCandidate {
    EigenCandidate::exact(q("-1/2+1/2*sqrt(5)"), "golden-minus-one")
}

fn to_s<E: std::fmt::Debug>(e: E) -> String {
    format!("{e:?}")
}

fn odometer_spectrum() -> Outcome {
    let od = TowerSystem::build(LevelSource::Odometer, 200).map_err(to_s)?;
    let policy = Policy::default();
    let half = norm_series(&od, &EigenCandidate::exact(Scalar::ratio(1, 2), ""), 200).map_err(to_s)?;
    ensure(half.terms.iter().all(Scalar::is_zero), || "alpha = 1/2: nonzero term".into())?;
    ensure(half.s1_total() == 0.0 && half.s2_total() == 0.0, || "alpha = 1/2: nonzero sums".into())?;
    let v = classify(&half, &policy).0;
    ensure(v == Verdict::ContinuousLikely, || format!("alpha = 1/2: verdict {v}"))?;
    let third = norm_series(&od, &EigenCandidate::exact(Scalar::ratio(1, 3), ""), 200).map_err(to_s)?;
    ensure(third.terms.iter().all(|t| *t == Scalar::ratio(1, 3)), || "alpha = 1/3: term differs from 1/3".into())?;
    let v = classify(&third, &policy).0;
    ensure(v == Verdict::NonEigenvalueLikely, || format!("alpha = 1/3: verdict {v}"))
}

/// Fixed-point evaluation of the recursion with `digits` decimal digits.
fn decimal_choices(depth: usize, digits: u32) -> (Vec<Choice>, BigInt) {
    let scale = BigInt::from(10).pow(digits);
    let sqrt5 = (BigInt::from(5) * &scale * &scale).sqrt();
    let beta_a = BigInt::from(4) * &scale - &sqrt5;
    let beta_b = (BigInt::from(3) * &scale - &sqrt5) / 2;
    let mut v = scale.clone();
    let mut out = Vec::new();
    let mut closest = scale.clone();
    for n in 1..depth {
        let nv = &v * n;
        let gap = (&nv - &scale).magnitude().clone().into();
        if n > 1 && gap < closest {
            closest = gap;
        }
        let c = if nv <= scale { Choice::A } else { Choice::B };
        v = &v * if c == Choice::A { &beta_a } else { &beta_b } / &scale;
        out.push(c);
    }
    (out, closest)
}

fn matrix_choice_prefix() -> Outcome {
    use Choice::{A, B};
    let expected = vec![A, B, B, B, A, B, A, A, B];
    let got = choices(10);
    ensure(got == expected, || format!("exact choices {got:?}"))?;
    let (oracle, closest) = decimal_choices(10, 110);
    ensure(oracle == expected, || format!("decimal oracle choices {oracle:?}"))?;
    // the oracle is conclusive only if no n·v_n (n >= 2) lies within its rounding error of 1
    let margin = BigInt::from(10).pow(20);
    ensure(closest > margin, || "decimal oracle too close to the boundary".into())
}

fn nvn_range() -> Outcome {
    let b = nvn_bounds(10_000).map_err(to_s)?;
    ensure(b.min > q("1/5+0*sqrt(5)"), || format!("min {} at n = {}", b.min.to_f64(), b.min_n))?;
    ensure(b.max < q("4+0*sqrt(5)"), || format!("max {} at n = {}", b.max.to_f64(), b.max_n))
}

fn pnv_identity() -> Outcome {
    verify_pnv(200).map_err(to_s)
}

fn measure_agreement() -> Outcome {
    let ex = build_example(30).map_err(to_s)?;
    let approx = ex.invariant_measure(1, 30, 1e-8).map_err(to_s)?;
    let exact = base_measure();
    for (a, e) in approx.values.iter().zip(&exact) {
        let d = (a.to_f64() - e.to_f64()).abs();
        ensure(d < 1e-8, || format!("approximate measure off by {d:e}"))?;
    }
    for n in 1..=30 {
        let mu = ex.exact_measure(n).map_err(to_s)?;
        let mass = ex.measure_mass(&mu).map_err(to_s)?;
        ensure(mass == Scalar::integer(1), || format!("level {n}: mass {}", mass.render()))?;
        if n >= 2 {
            let prev = ex.exact_measure(n - 1).map_err(to_s)?;
            let pulled = ex.matrix(n).transpose_mul_scalars(&mu.values).map_err(to_s)?;
            ensure(pulled == prev.values, || format!("level {n}: M^T mu(n) != mu(n-1)"))?;
        }
    }
    let v = small_eigenvector();
    let dot = &(&exact[0] * &v[0]) + &(&exact[1] * &v[1]);
    ensure(dot == QuadraticReal::zero(5), || format!("<mu(1), v> = {}", dot.to_f64()))
}

fn golden_diagnostics() -> Outcome {
    let ex = build_example(2000).map_err(to_s)?;
    let report = norm_series(&ex, &golden_minus_one(), 2000).map_err(to_s)?;
    let s2_tail = report.s2_at(2000) - report.s2_at(1000);
    let s1_tail = report.s1_at(2000) - report.s1_at(1000);
    ensure(s2_tail < 1e-2, || format!("S2 tail {s2_tail}"))?;
    ensure(s1_tail > 0.1, || format!("S1 tail {s1_tail}"))?;
    let v = classify(&report, &Policy::default()).0;
    ensure(v == Verdict::MeasurableNotContinuousLikely, || format!("verdict {v}"))
}

fn golden_decomposition() -> Result<Decomposition, String> {
    let ex = build_example(260).map_err(to_s)?;
    tendto0_decompose(&ex, &golden_minus_one(), &DecayOptions::default()).map_err(to_s)
}

fn decomposition_check() -> Outcome {
    let dec = golden_decomposition()?;
    ensure(dec.m == 2, || format!("m = {}", dec.m))?;
    let v = small_eigenvector();
    let cross = dec.v[0]
        .checked_mul(&Scalar::from(v[1].clone()))
        .and_then(|a| a.checked_sub(&dec.v[1].checked_mul(&Scalar::from(v[0].clone()))?))
        .map_err(to_s)?;
    ensure(cross.is_zero(), || format!("cross product {}", cross.render()))?;
    ensure(dec.decay.len() >= 20, || format!("only {} decay samples", dec.decay.len()))?;
    let sampled = &dec.decay[..20];
    ensure(sampled.windows(2).all(|p| p[1].1 < p[0].1), || "decay not strictly decreasing".into())
}

fn orbit_oracle() -> Outcome {
    let ex = build_example(20).map_err(to_s)?;
    let k = 10_000;
    let origin = canonical_code(&ex, 20, 1, Fill::Min).map_err(to_s)?;
    let orbit = orbit_labels(&ex, &origin, k).map_err(to_s)?;
    let prefix = generate_prefix(&ex, k).map_err(to_s)?;
    ensure(orbit == prefix, || {
        let at = orbit.iter().zip(&prefix).position(|(a, b)| a != b);
        format!("orbit and prefix differ at {at:?}")
    })?;
    for n in 1..=12 {
        let w = level_expansion(&ex, n).map_err(to_s)?;
        let h = ex.heights(n).map_err(to_s)?;
        for t in 1..=2 {
            ensure(BigInt::from(w.image(t).len()) == h[t - 1], || format!("|W_{t}({n})| != h_{t}({n})"))?;
        }
    }
    Ok(())
}

fn vershik_brute_force() -> Outcome {
    let ex = build_example(6).map_err(to_s)?;
    let h = ex.heights(6).map_err(to_s)?;
    for top in 1..=2 {
        let height: usize = h[top - 1].clone().try_into().map_err(to_s)?;
        let mut code = canonical_code(&ex, 6, top, Fill::Min).map_err(to_s)?;
        let mut seen = vec![false; height];
        let mut count = 0;
        loop {
            let r: usize = entrance_time(&ex, &code, 6).map_err(to_s)?.try_into().map_err(to_s)?;
            ensure(r < height && !seen[r], || format!("tower {top}: r_6 = {r} repeated or out of range"))?;
            seen[r] = true;
            count += 1;
            match successor(&ex, &code) {
                Ok(next) => {
                    ensure(next.tower(6) == top, || format!("tower {top}: left the tower early"))?;
                    for n in 1..=6 {
                        let (a, b) = (entrance_time(&ex, &code, n).map_err(to_s)?, entrance_time(&ex, &next, n).map_err(to_s)?);
                        // moving up one stage lowers every entrance time by one unless level n wraps
                        if !a.is_zero() {
                            ensure(&a - &b == BigInt::one(), || format!("level {n}: r went {a} -> {b}"))?;
                        }
                    }
                    code = next;
                }
                Err(_) => break,
            }
        }
        ensure(count == height, || format!("tower {top}: {count} codes, height {height}"))?;
    }
    Ok(())
}

fn markov_checks() -> Outcome {
    let ex = build_example(50).map_err(to_s)?;
    let src = MeasureSource::Exact;
    for n in 1..=50 {
        let qn = transition_matrix(&ex, &src, n).map_err(to_s)?;
        for (t, row) in qn.q.iter().enumerate() {
            let sum = row.iter().try_fold(Scalar::zero(), |a, x| a.checked_add(x)).map_err(to_s)?;
            ensure(sum == Scalar::integer(1), || format!("Q({n}) row {} sums to {}", t + 1, sum.render()))?;
        }
    }
    let mix = mixing_estimate(&ex, &src, 30, 10).map_err(to_s)?;
    for w in mix.rows.windows(2) {
        let (a, b) = (&w[0].sup_difference, &w[1].sup_difference);
        ensure(b.try_cmp(a).map_err(to_s)?.is_lt(), || format!("sup difference grows at k = {}", w[1].k))?;
    }
    for r in &mix.rows {
        ensure(!r.sup_difference.try_cmp(&r.dobrushin_product).map_err(to_s)?.is_gt(), || {
            format!("k = {}: sup difference above the Dobrushin product", r.k)
        })?;
    }
    // Chapman-Kolmogorov against explicit path enumeration
    for k in 1..=6 {
        let product = transition_product(&ex, &src, 30 - k, 30).map_err(to_s)?;
        let qs: Vec<_> = (30 - k + 1..=30).map(|n| transition_matrix(&ex, &src, n).map(|m| m.q)).collect::<Result<_, _>>().map_err(to_s)?;
        for (start, row) in product.iter().enumerate() {
            for (end, expected) in row.iter().enumerate() {
                let mut total = Scalar::zero();
                for mask in 0..(1u32 << (k - 1)) {
                    let mut states = vec![start];
                    states.extend((0..k - 1).map(|j| ((mask >> j) & 1) as usize));
                    states.push(end);
                    let mut p = Scalar::integer(1);
                    for (j, q) in qs.iter().enumerate() {
                        p = p.checked_mul(&q[states[j]][states[j + 1]]).map_err(to_s)?;
                    }
                    total = total.checked_add(&p).map_err(to_s)?;
                }
                ensure(&total == expected, || format!("k = {k}: path sum differs from the product"))?;
            }
        }
    }
    // sampled transition frequencies at one level, 10^5 paths
    let level = 10;
    let sampler = ChainSampler::new(&ex, &src, level).map_err(to_s)?;
    let paths = sampler.sample_many(2024, 100_000);
    let qn = transition_matrix(&ex, &src, level).map_err(to_s)?.to_f64();
    for from in 1..=2 {
        let rows: Vec<&Vec<usize>> = paths.iter().filter(|p| p[level - 1] == from).collect();
        let count = rows.len() as f64;
        ensure(count > 0.0, || format!("no path through tower {from} at level {}", level - 1))?;
        for to in 1..=2 {
            let hits = rows.iter().filter(|p| p[level] == to).count() as f64;
            let p = qn[from - 1][to - 1];
            let sigma = (p * (1.0 - p) / count).sqrt();
            let freq = hits / count;
            ensure((freq - p).abs() <= 3.0 * sigma, || format!("{from} -> {to}: frequency {freq}, expected {p} ± {}", 3.0 * sigma))?;
        }
    }
    Ok(())
}

fn cocycle() -> Outcome {
    let deep = build_example(260).map_err(to_s)?;
    let cand = golden_minus_one();
    let dec = rebase_to_level_one(&deep, &cand, &golden_decomposition()?).map_err(to_s)?;
    let ex = build_example(12).map_err(to_s)?;
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut checked = 0;
    let mut codes = 0;
    while codes < 1000 {
        let code: PointCode = random_code(&ex, 12, &mut rng).map_err(to_s)?;
        let Ok(next) = successor(&ex, &code) else { continue };
        codes += 1;
        for n in 2..=12 {
            if entrance_time(&ex, &code, n).map_err(to_s)?.is_zero() {
                continue;
            }
            let g0 = eigenfunction_g(&ex, &dec, &code, n).map_err(to_s)?;
            let g1 = eigenfunction_g(&ex, &dec, &next, n).map_err(to_s)?;
            let d = g1.checked_sub(&g0).and_then(|d| d.checked_add(&cand.alpha)).map_err(to_s)?;
            ensure(d.as_integer().is_some(), || format!("level {n}: g(Tx) - g(x) + alpha = {}", d.render()))?;
            checked += 1;
        }
    }
    ensure(checked > 0, || "no level with r_n > 0".into())
}

fn witness_pairs() -> Outcome {
    let tel = build_example(21).map_err(to_s)?.telescope().map_err(to_s)?;
    let selected = [(2, 1), (4, 2), (6, 1), (8, 2), (10, 1)];
    let (x, y) = witness_pair(&tel, &selected).map_err(to_s)?;
    for n in 2..=tel.depth() {
        let (sx, sy) = (s_vector(&tel, &x, n).map_err(to_s)?, s_vector(&tel, &y, n).map_err(to_s)?);
        let diff: Vec<i64> = sx.counts.iter().zip(&sy.counts).map(|(a, b)| *a as i64 - *b as i64).collect();
        let expected: Vec<i64> = match selected.iter().find(|s| s.0 + 1 == n) {
            Some(&(_, i)) => (1..=diff.len()).map(|k| i64::from(k == i)).collect(),
            None => vec![0; diff.len()],
        };
        ensure(diff == expected, || format!("level {n}: difference {diff:?}, expected {expected:?}"))?;
    }
    Ok(())
}

fn telescoping_invariance() -> Outcome {
    let tel = build_example(999).map_err(to_s)?.telescope().map_err(to_s)?;
    ensure(tel.depth() == 500, || format!("telescoped depth {}", tel.depth()))?;
    tel.check_kr5_prime().map_err(to_s)?;
    let report = norm_series(&tel, &golden_minus_one(), 500).map_err(to_s)?;
    let v = classify(&report, &Policy::default()).0;
    ensure(v == Verdict::MeasurableNotContinuousLikely, || format!("verdict {v}"))
}

type Criterion = (&'static str, fn() -> Outcome);

fn main() {
    let criteria: [Criterion; 13] = [
        ("odometer spectrum for 1/2 and 1/3", odometer_spectrum),
        ("matrix choices M(2..10) with decimal oracle", matrix_choice_prefix),
        ("n v_n stays in (0.2, 4) up to 10^4", nvn_range),
        ("P(n)v = v_n v up to 200", pnv_identity),
        ("approximate and exact invariant measures", measure_agreement),
        ("golden-minus-one norm series at N = 2000", golden_diagnostics),
        ("decomposition at m = 2 with decaying residual", decomposition_check),
        ("orbit labels match the generated prefix", orbit_oracle),
        ("successor enumerates whole towers at depth 6", vershik_brute_force),
        ("transition matrices, mixing and sampling", markov_checks),
        ("cocycle identity on random codes", cocycle),
        ("witness pairs on the telescoped system", witness_pairs),
        ("verdict unchanged after telescoping", telescoping_invariance),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|p| {
            Err(p.downcast_ref::<String>().cloned().or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string())).unwrap_or_default())
        });
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(()) => println!("PASS {:>2} {name} ({secs:.2}s)", i + 1),
            Err(e) => {
                failed += 1;
                println!("FAIL {:>2} {name} ({secs:.2}s): {e}", i + 1);
            }
        }
    }
    println!("{} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
