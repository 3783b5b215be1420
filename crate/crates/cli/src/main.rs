mod alpha;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use lrtower::coding::{canonical_code, orbit_labels, s_vector, witness_pair, Fill, PointCode};
use lrtower::example_ab::{emu_alpha, emu_member, nvn_bounds, verify_pnv, vn_csv, vn_sequence};
use lrtower::markov::{dobrushin, mixing_estimate, transition_matrix, ChainSampler, MeasureSource};
use lrtower::spectral::{norm_series, tendto0_decompose, DecayOptions, EigenCandidate, Policy};
use lrtower::substitution::{generate_prefix, recurrence_constant};
use lrtower::system_spec::DEFAULT_DEPTH;
use lrtower::tower::format_word;
use lrtower::{ErrorClass, QuadraticReal, Scalar, SystemSpec, TowerSystem};
use num_bigint::BigInt;
use serde::Serialize;
use serde_json::{json, Value};

use crate::output::{output_dir, Artifacts};

#[derive(Parser, Debug, Serialize)]
#[command(name = "lrtower", version, about = "Ordered tower systems, adic codes and eigenvalue diagnostics")]
struct Cli {
    /// JSON system spec file, or `odometer` / `example-ab`.
    #[arg(long, global = true, default_value = "example-ab")]
    system: String,
    /// Number of levels to build.
    #[arg(long = "N", global = true)]
    depth: Option<usize>,
    /// Directory for report files (default: $LRTOWER_CACHE_DIR when set).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug, Serialize)]
#[serde(rename_all = "kebab-case")]
enum Command {
    /// Check the word axioms; report alphabet sizes, matrices and the LR constant.
    Validate {
        /// Number of leading matrices to include.
        #[arg(long, default_value_t = 4)]
        matrices: usize,
    },
    /// Tower heights H(n) for every level, or for one.
    Heights {
        /// Single level to report.
        #[arg(long)]
        n: Option<usize>,
    },
    /// Invariant measure of the level-n bases.
    Measure {
        /// Level whose bases are measured.
        #[arg(long, default_value_t = 1)]
        n: usize,
        /// Use the generator's exact structure instead of frequencies.
        #[arg(long)]
        exact: bool,
        /// Allowed spread between frequency estimates.
        #[arg(long, default_value_t = 1e-8)]
        tol: f64,
    },
    /// Norm series and verdict for λ = exp(2iπα).
    Eigen(EigenArgs),
    /// Transition matrices of the tower chain and mixing estimates.
    Markov(MarkovArgs),
    /// Recurrence table of the generated sequence.
    Substitution {
        /// Prefix length.
        #[arg(long = "K", default_value_t = 2000)]
        k: usize,
        /// Longest factor length to count.
        #[arg(long, default_value_t = 20)]
        max_len: usize,
    },
    /// First K level-1 labels along an orbit.
    Orbit {
        #[arg(long = "K", default_value_t = 100)]
        k: usize,
        /// JSON point code; the origin when omitted.
        #[arg(long)]
        code: Option<PathBuf>,
    },
    /// Two codes whose s-vectors differ by unit vectors at chosen even levels.
    Witness {
        /// Comma-separated `level:tower` pairs, e.g. `2:1,4:2`.
        #[arg(long, value_delimiter = ',', required = true)]
        levels: Vec<String>,
        /// Telescope the system first.
        #[arg(long)]
        telescope: bool,
    },
    /// Merge consecutive level pairs so that matrix entries become at least 2.
    Telescope {
        /// Include the telescoped words.
        #[arg(long)]
        words: bool,
    },
    /// The two-matrix golden system.
    #[command(subcommand, name = "example-ab")]
    ExampleAb(ExampleCommand),
}

#[derive(Args, Debug, Serialize)]
struct EigenArgs {
    /// `golden-minus-one`, `golden`, `p/q`, `p/q+r/s*sqrt(d)` or a decimal.
    #[arg(long, allow_hyphen_values = true)]
    alpha: String,
    /// Treat a decimal alpha as known to this many bits only.
    #[arg(long)]
    precision_bits: Option<u32>,
    /// Total S1 below this counts as continuous.
    #[arg(long, default_value_t = Policy::default().eps1)]
    eps1: f64,
    /// Tail S2 above this counts as a non-eigenvalue.
    #[arg(long, default_value_t = Policy::default().eps2)]
    eps2: f64,
    /// Slope of the logarithmic growth test on the S1 tail.
    #[arg(long, default_value_t = Policy::default().log_slope)]
    log_slope: f64,
    /// Fewer terms than this is always inconclusive.
    #[arg(long, default_value_t = Policy::default().min_terms)]
    min_terms: usize,
    /// Also search for an integer split with a decaying residual.
    #[arg(long)]
    decompose: bool,
    /// Highest split level tried by --decompose.
    #[arg(long, default_value_t = DecayOptions::default().max_m)]
    max_m: usize,
}

#[derive(Args, Debug, Serialize)]
struct MarkovArgs {
    /// Level whose past is mixed.
    #[arg(long)]
    n: usize,
    /// Number of steps back.
    #[arg(long = "K", default_value_t = 10)]
    k: usize,
    /// Use exact measures (needs an exact generator).
    #[arg(long)]
    exact: bool,
    /// Spread tolerance for frequency-based measures.
    #[arg(long, default_value_t = 1e-8)]
    tol: f64,
    /// Sample this many chain paths up to level n.
    #[arg(long, default_value_t = 0)]
    paths: usize,
    /// Seed for --paths.
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Subcommand, Debug, Serialize)]
#[serde(rename_all = "kebab-case")]
enum ExampleCommand {
    /// Table of n, v_n, n·v_n and the next matrix.
    Vn,
    /// Membership in the eigenvalue set, or the element for given (l, w).
    Emu {
        /// Quadratic value to test for membership.
        #[arg(long, allow_hyphen_values = true, conflicts_with_all = ["l", "w"])]
        alpha: Option<String>,
        /// Level of the element to construct (with --w).
        #[arg(long, requires = "w")]
        l: Option<u32>,
        /// Two integers, e.g. `11,0`.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        w: Option<Vec<i64>>,
        /// Largest level searched for membership.
        #[arg(long, default_value_t = 8)]
        l_max: u32,
        /// Bound on |w| entries searched for membership.
        #[arg(long, default_value_t = 1000)]
        w_box: u64,
    },
    /// Check P(n)v = v_n·v and the bounds on n·v_n.
    Verify,
}

enum Failure {
    Lib(lrtower::Error),
    Usage(String),
    Io(std::io::Error),
}

macro_rules! lib_failure {
    ($($t:ty),*) => {$(
        impl From<$t> for Failure {
            fn from(e: $t) -> Self {
                Failure::Lib(e.into())
            }
        }
    )*};
}

lib_failure!(
    lrtower::Error,
    lrtower::TowerError,
    lrtower::ScalarError,
    lrtower::CodingError,
    lrtower::SpectralError,
    lrtower::MarkovError,
    lrtower::SubstitutionError,
    lrtower::ExampleError
);

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Io(e)
    }
}

impl Failure {
    fn report(&self) -> ExitCode {
        match self {
            Failure::Lib(e) => {
                eprintln!("error: {e}");
                match e.class() {
                    ErrorClass::Input => ExitCode::from(2),
                    ErrorClass::Precision => ExitCode::from(3),
                    ErrorClass::Insufficient => ExitCode::from(4),
                }
            }
            Failure::Usage(msg) => {
                eprintln!("error: {msg}");
                ExitCode::from(2)
            }
            Failure::Io(e) => {
                eprintln!("error: {e}");
                ExitCode::from(1)
            }
        }
    }
}

fn load_spec(system: &str) -> Result<SystemSpec, Failure> {
    if let Some(spec) = SystemSpec::named(system) {
        return Ok(spec);
    }
    let text = std::fs::read_to_string(system).map_err(|e| Failure::Usage(format!("cannot read system spec {system:?}: {e}")))?;
    Ok(SystemSpec::from_json(&text)?)
}

fn scalar_json(x: &Scalar) -> Value {
    match x {
        Scalar::Adaptive(a) => json!({ "decimal": a.to_decimal_string(), "precision_bits": a.accuracy_bits() }),
        _ => json!({ "exact": x.render(), "approx": x.to_f64() }),
    }
}

fn ints_json(v: &[BigInt]) -> Value {
    json!(v.iter().map(ToString::to_string).collect::<Vec<_>>())
}

fn to_quadratic(a: &Scalar) -> Result<QuadraticReal, Failure> {
    match a {
        Scalar::Rational(q) => Ok(QuadraticReal::from_rational(q.clone(), 5)?),
        Scalar::Quadratic(q) if q.radicand() == 5 => Ok(q.clone()),
        _ => Err(Failure::Usage("alpha must be exact and lie in Q(sqrt(5))".into())),
    }
}

fn run(cli: &Cli) -> Result<Artifacts, Failure> {
    let spec = load_spec(&cli.system)?;
    let build = |default: usize| -> Result<TowerSystem, Failure> {
        Ok(spec.build(Some(cli.depth.or(spec.depth).unwrap_or(default)))?)
    };
    match &cli.command {
        Command::Validate { matrices } => {
            let sys = build(DEFAULT_DEPTH)?;
            let report = sys.validation_report(*matrices)?;
            let mut text = format!("system {} with {} levels\nKR5 ok\nKR6 ok\n", report.system, report.depth);
            match report.kr5_prime_first_failure {
                None => text.push_str("KR5' ok\n"),
                Some(n) => text.push_str(&format!("KR5' fails at n={n}; telescope the system to obtain it\n")),
            }
            let sizes: Vec<String> = report.alphabet_sizes.iter().map(ToString::to_string).collect();
            text.push_str(&format!("C(n): {}\n", sizes.join(" ")));
            for (i, m) in report.matrices.iter().enumerate() {
                text.push_str(&format!("M({}) = {m}\n", i + 1));
            }
            if let Some(lr) = &report.lr {
                text.push_str(&format!(
                    "LR constant over {} levels: {} ≈ {:.6} ({:?} matrix set, {} distinct)\n",
                    lr.depth, lr.constant, lr.constant_f64, lr.matrix_set, lr.distinct_matrices
                ));
            }
            let json = serde_json::to_value(&report).expect("report serializes");
            Ok(Artifacts::json("validate", json).with_text(text))
        }
        Command::Heights { n } => {
            let sys = build(DEFAULT_DEPTH)?;
            let levels: Vec<usize> = match n {
                Some(n) => vec![*n],
                None => (0..=sys.depth()).collect(),
            };
            let mut rows = Vec::new();
            let mut csv = String::from("n,tower,height\n");
            for n in levels {
                let h = sys.heights(n)?;
                for (t, x) in h.iter().enumerate() {
                    csv.push_str(&format!("{n},{},{x}\n", t + 1));
                }
                rows.push(json!({ "n": n, "heights": ints_json(&h) }));
            }
            Ok(Artifacts::json("heights", json!({ "system": sys.name(), "levels": rows })).with_csv(csv))
        }
        Command::Measure { n, exact, tol } => {
            let sys = build(DEFAULT_DEPTH)?;
            let mv = if *exact { sys.exact_measure(*n)? } else { sys.invariant_measure(*n, sys.depth(), *tol)? };
            let mass = sys.measure_mass(&mv)?;
            Ok(Artifacts::json(
                "measure",
                json!({
                    "system": sys.name(),
                    "level": mv.level,
                    "mode": if *exact { "exact" } else { "approximate" },
                    "values": if *exact {
                        mv.values.iter().map(scalar_json).collect::<Vec<_>>()
                    } else {
                        mv.values.iter().map(|x| json!({ "approx": x.to_f64(), "spread_tol": tol })).collect()
                    },
                    "mass": scalar_json(&mass),
                }),
            ))
        }
        Command::Eigen(args) => {
            let cand: EigenCandidate = alpha::parse_alpha(&args.alpha, args.precision_bits).map_err(Failure::Usage)?;
            let sys = build(200)?;
            let policy = Policy { eps1: args.eps1, eps2: args.eps2, log_slope: args.log_slope, min_terms: args.min_terms };
            let mut report = norm_series(&sys, &cand, sys.depth())?.classify_with(policy);
            let mut decomposition = Value::Null;
            if args.decompose {
                let opts = DecayOptions { max_m: args.max_m, ..DecayOptions::default() };
                match tendto0_decompose(&sys, &cand, &opts) {
                    Ok(dec) => {
                        report.attach_kappa(&sys, &dec)?;
                        decomposition = dec.to_json();
                    }
                    Err(e) => decomposition = json!({ "error": e.to_string() }),
                }
            }
            let mut json = report.to_json();
            json["system"] = json!(sys.name());
            json["decomposition"] = decomposition;
            Ok(Artifacts::json("eigen", json).with_csv(report.to_csv()))
        }
        Command::Markov(args) => {
            let sys = build(if args.exact { args.n } else { args.n + 20 })?;
            let source = if args.exact {
                MeasureSource::Exact
            } else {
                MeasureSource::Approximate { depth: sys.depth(), tol: args.tol }
            };
            let est = mixing_estimate(&sys, &source, args.n, args.k)?;
            let q = transition_matrix(&sys, &source, args.n)?;
            let mut json = json!({
                "system": sys.name(),
                "source": source,
                "Q": q.q.iter().map(|r| r.iter().map(scalar_json).collect::<Vec<_>>()).collect::<Vec<_>>(),
                "dobrushin": scalar_json(&dobrushin(&q)?),
                "mixing": est,
            });
            if args.paths > 0 {
                let sampler = ChainSampler::new(&sys, &source, args.n)?;
                let mut counts = vec![0usize; sys.alphabet_size(args.n)];
                for path in sampler.sample_many(args.seed, args.paths) {
                    counts[path[args.n] - 1] += 1;
                }
                json["sample"] = json!({ "paths": args.paths, "seed": args.seed, "level_counts": counts });
            }
            Ok(Artifacts::json("markov", json).with_csv(est.to_csv()))
        }
        Command::Substitution { k, max_len } => {
            let sys = build(DEFAULT_DEPTH)?;
            let prefix = generate_prefix(&sys, *k)?;
            let table = recurrence_constant(&prefix, *max_len)?;
            let json = json!({ "system": sys.name(), "K": k, "recurrence": table });
            Ok(Artifacts::json("substitution", json).with_csv(table.to_csv()))
        }
        Command::Orbit { k, code } => {
            let sys = build(DEFAULT_DEPTH)?;
            let code = match code {
                Some(path) => {
                    let text = std::fs::read_to_string(path)?;
                    PointCode::from_json(&text).map_err(|e| Failure::Usage(format!("bad code file: {e}")))?
                }
                None => canonical_code(&sys, sys.depth(), 1, Fill::Min)?,
            };
            let word = orbit_labels(&sys, &code, *k)?;
            let text = format_word(&word);
            let json = json!({ "system": sys.name(), "code": code, "K": k, "labels": text });
            Ok(Artifacts::json("orbit", json).with_text(text + "\n"))
        }
        Command::Witness { levels, telescope } => {
            let mut sys = build(DEFAULT_DEPTH)?;
            if *telescope {
                sys = sys.telescope()?;
            }
            let selected = levels
                .iter()
                .map(|s| {
                    let (n, i) = s.split_once(':').ok_or(())?;
                    Ok((n.trim().parse().map_err(|_| ())?, i.trim().parse().map_err(|_| ())?))
                })
                .collect::<Result<Vec<(usize, usize)>, ()>>()
                .map_err(|_| Failure::Usage("--levels expects level:tower pairs such as 2:1,4:2".into()))?;
            let (x, y) = witness_pair(&sys, &selected)?;
            let mut diffs = Vec::new();
            for n in 2..=sys.depth() {
                let (sx, sy) = (s_vector(&sys, &x, n)?, s_vector(&sys, &y, n)?);
                let d: Vec<i64> = sx.counts.iter().zip(&sy.counts).map(|(a, b)| *a as i64 - *b as i64).collect();
                if d.iter().any(|&v| v != 0) {
                    diffs.push(json!({ "n": n, "difference": d }));
                }
            }
            Ok(Artifacts::json("witness", json!({ "system": sys.name(), "x": x, "y": y, "s_differences": diffs })))
        }
        Command::Telescope { words } => {
            let sys = build(DEFAULT_DEPTH)?.telescope()?;
            let mut json = serde_json::to_value(sys.validation_report(4)?).expect("report serializes");
            if *words {
                json["words"] =
                    json!((1..=sys.depth()).map(|n| sys.words(n).iter().map(|w| format_word(w)).collect::<Vec<_>>()).collect::<Vec<_>>());
            }
            Ok(Artifacts::json("telescope", json))
        }
        Command::ExampleAb(cmd) => run_example(cmd, cli.depth),
    }
}

fn run_example(cmd: &ExampleCommand, depth: Option<usize>) -> Result<Artifacts, Failure> {
    let n_max = depth.unwrap_or(DEFAULT_DEPTH);
    match cmd {
        ExampleCommand::Vn => {
            let choices: Vec<String> = vn_sequence(n_max).iter().map(|s| s.choice.to_string()).collect();
            let csv = vn_csv(n_max);
            let json = json!({ "N": n_max, "choices_from_level_2": choices });
            Ok(Artifacts::json("vn", json).with_csv(csv.clone()).with_text(csv))
        }
        ExampleCommand::Emu { alpha, l, w, l_max, w_box } => match (alpha, l, w) {
            (Some(a), _, _) => {
                let a = to_quadratic(&alpha::parse_alpha(a, None).map_err(Failure::Usage)?.alpha)?;
                let found = emu_member(&a, *l_max, *w_box);
                let json = json!({
                    "alpha": a.to_string(),
                    "l_max": l_max,
                    "w_box": w_box,
                    "member": found.map(|(l, w)| json!({ "l": l, "w": ints_json(&w) })),
                });
                Ok(Artifacts::json("emu", json))
            }
            (None, Some(l), Some(w)) => {
                if w.len() != 2 {
                    return Err(Failure::Usage("--w expects two integers, e.g. 11,0".into()));
                }
                let e = emu_alpha(*l, [BigInt::from(w[0]), BigInt::from(w[1])]);
                let json = json!({
                    "l": e.l,
                    "w": ints_json(&e.w),
                    "alpha": e.alpha.to_string(),
                    "alpha_approx": e.alpha.to_f64(),
                    "det_power": e.det_power.to_string(),
                    "trivial": e.is_trivial(),
                });
                Ok(Artifacts::json("emu", json))
            }
            _ => Err(Failure::Usage("emu needs --alpha, or both --l and --w".into())),
        },
        ExampleCommand::Verify => {
            verify_pnv(n_max)?;
            let b = nvn_bounds(n_max)?;
            let json = json!({
                "N": n_max,
                "pnv_identity": "ok",
                "nvn_min": { "n": b.min_n, "exact": b.min.to_string(), "approx": b.min.to_f64() },
                "nvn_max": { "n": b.max_n, "exact": b.max.to_string(), "approx": b.max.to_f64() },
            });
            Ok(Artifacts::json("verify", json))
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let config = serde_json::to_value(&cli).expect("config serializes");
    let dir = output_dir(cli.out.as_deref());
    match run(&cli).and_then(|a| Ok(a.emit(&config, dir.as_deref())?)) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => f.report(),
    }
}
