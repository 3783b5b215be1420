use std::sync::Arc;

use lrtower::scalar::parse_decimal;
use lrtower::spectral::EigenCandidate;
use lrtower::{BoundedPrecision, QuadraticReal, Refine, Scalar};

/// Parses `--alpha`.
///
/// Accepted forms: `golden-minus-one`, `golden`, `p/q`, `p/q+r/s*sqrt(d)`,
/// and decimals. A decimal is exact unless `precision_bits` is given, in
/// which case only that many bits of it are considered known.
pub fn parse_alpha(text: &str, precision_bits: Option<u32>) -> Result<EigenCandidate, String> {
    let t = text.trim();
    let named = |s: &str| -> EigenCandidate {
        EigenCandidate::exact(s.parse::<QuadraticReal>().expect("valid literal"), t)
    };
    match t {
        "golden-minus-one" => return Ok(named("-1/2+1/2*sqrt(5)")),
        "golden" => return Ok(named("1/2+1/2*sqrt(5)")),
        _ => {}
    }
    if t.contains("sqrt(") || !t.contains('.') {
        if precision_bits.is_some() {
            return Err("--precision-bits only applies to decimal alpha".into());
        }
        return t.parse::<Scalar>().map(|a| EigenCandidate::exact(a, "")).map_err(|e| e.to_string());
    }
    let value = parse_decimal(t).map_err(|e| e.to_string())?;
    Ok(match precision_bits {
        None => EigenCandidate::exact(Scalar::Rational(value), "decimal"),
        Some(bits) => {
            let source: Arc<dyn Refine> = Arc::new(BoundedPrecision::new(value, bits));
            EigenCandidate::refinable(source, format!("{t} to {bits} bits"))
        }
    })
}
