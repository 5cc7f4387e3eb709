//! The `dpcalc` command line.
//!
//! Every subcommand prints one JSON record per line. Exit codes: 0 on
//! success, 1 when `verify` finds a failing check, 2 on usage or validation
//! errors.

use std::ffi::OsString;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use crate::audit::{
    audit_central, audit_deletion_ldp, audit_pure, audit_replacement_ldp, eps_grid,
    reference_candidates, NeighborPair, TradeoffCurve,
};
use crate::converters::{
    approx_to_pure_eps, approx_to_pure_finite, pure_to_approx, rr_decompose_pure,
};
use crate::dist::Dist;
use crate::error::{invalid, Error, Result};
use crate::ldp::{
    compose_eps, coupon_rounds, deletion_to_replacement_budget, grouposition_approx,
    purification_bounds, purification_t_range, symmetrize, trim_to_pure_deletion, CoinModel,
    CompiledRandomizer, GroupositionParams, PurificationParams, COMPILATION_FAIL_PROB,
};
use crate::limits::EnumLimits;
use crate::mechanism::Mechanism;
use crate::shuffle::{amplification_eps, shuffle_to_ldp_budget, AmplificationParams, ShuffleAudit};
use crate::subsample::{build_subsampled, subsample_budget, SubsampleParams};
use crate::verify::{run_subsample_instance, run_suite, Suite};

#[derive(Debug, Parser)]
#[command(
    name = "dpcalc",
    version,
    about = "Exact privacy audits and conversion bounds for finite mechanisms"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Audit a mechanism file.
    Audit(AuditArgs),
    /// Evaluate a closed-form bound.
    #[command(subcommand)]
    Bound(BoundCmd),
    /// Transform a mechanism file.
    #[command(subcommand)]
    Convert(ConvertCmd),
    /// Exact simulation of a shuffle protocol.
    #[command(subcommand)]
    Simulate(SimulateCmd),
    /// Run the property suites and write a JSONL report.
    Verify(VerifyArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Model {
    Replacement,
    Deletion,
    Central,
    Pure,
    Shuffle,
}

#[derive(Debug, Args)]
pub struct AuditArgs {
    #[arg(long)]
    pub mechanism: PathBuf,
    #[arg(long, value_enum)]
    pub model: Model,
    /// Audit at one eps; without it a trade-off curve is printed.
    #[arg(long)]
    pub eps: Option<f64>,
    /// Deletion reference: `uniform`, `average`, `row:LABEL` or a JSON file
    /// holding a probability vector.
    #[arg(long)]
    pub reference: Option<String>,
    /// JSON list of input-label pairs, e.g. `[["0,0","0,1"]]`.
    #[arg(long)]
    pub neighbors: Option<PathBuf>,
    /// Users, for `--model shuffle`.
    #[arg(long)]
    pub n: Option<u32>,
    #[arg(long, default_value_t = 3.0)]
    pub eps_max: f64,
    #[arg(long, default_value_t = 31)]
    pub points: usize,
    #[arg(long)]
    pub pretty: bool,
}

#[derive(Debug, Subcommand)]
pub enum BoundCmd {
    /// Pure budget of composing an eps1-LDP and an eps2-LDP randomizer.
    Compose {
        #[arg(long)]
        eps1: f64,
        #[arg(long)]
        eps2: f64,
    },
    /// Amplification by subsampling with inclusion probability p (or m of n).
    Subsample {
        #[arg(long)]
        eps: f64,
        #[arg(long, default_value_t = 0.0)]
        delta: f64,
        #[arg(long, conflicts_with_all = ["n", "m"])]
        p: Option<f64>,
        #[arg(long, requires = "m")]
        n: Option<usize>,
        #[arg(long, requires = "n")]
        m: Option<usize>,
    },
    /// Replacement budget implied by a deletion budget.
    DeletionToReplacement {
        #[arg(long)]
        eps: f64,
        #[arg(long)]
        delta: f64,
    },
    /// Group privacy for k differing randomizers.
    Grouposition {
        #[arg(long)]
        k: u32,
        #[arg(long)]
        eps: f64,
        #[arg(long)]
        delta_prime: f64,
        #[arg(long, default_value_t = 0.0)]
        delta: f64,
    },
    /// Parameters of purifying approximate randomizers.
    Purification {
        #[arg(long)]
        eps: f64,
        #[arg(long)]
        delta: f64,
        #[arg(long)]
        n: u64,
        /// Rounds; defaults to the smallest admissible value.
        #[arg(long)]
        t: Option<u64>,
        /// Random bits used by each randomizer, comma separated.
        #[arg(long, value_delimiter = ',')]
        bits: Option<Vec<u64>>,
    },
    /// Draws needed to see every one of n indices.
    Coupon {
        #[arg(long)]
        n: u64,
        #[arg(long, default_value_t = COMPILATION_FAIL_PROB)]
        fail_prob: f64,
    },
    /// Local budget implied by a shuffle protocol's central budget.
    ShuffleToLdp {
        #[arg(long)]
        eps: f64,
        #[arg(long)]
        delta: f64,
        #[arg(long)]
        n: u64,
    },
    /// Central eps after shuffling n eps_l-LDP reports.
    Amplification {
        #[arg(long)]
        eps_l: f64,
        #[arg(long)]
        delta: f64,
        #[arg(long)]
        n: u64,
        #[arg(long, default_value_t = 1.0)]
        gamma: f64,
    },
    /// Read a pure budget as an approximate one.
    PureToApprox {
        #[arg(long)]
        eps: f64,
        #[arg(long)]
        delta: f64,
    },
    /// Pure budget after mixing an approximate mechanism with uniform noise.
    ApproxToPure {
        #[arg(long)]
        eps: f64,
        #[arg(long)]
        delta: f64,
        #[arg(long)]
        eta: f64,
        /// Output alphabet size.
        #[arg(long)]
        k: usize,
    },
}

#[derive(Debug, Subcommand)]
pub enum ConvertCmd {
    /// Mix with the uniform mechanism to get a pure mechanism.
    ApproxToPure {
        #[arg(long)]
        mechanism: PathBuf,
        #[arg(long)]
        eps: f64,
        /// Defaults to the audited replacement delta at `--eps`.
        #[arg(long)]
        delta: Option<f64>,
        #[arg(long)]
        eta: f64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Write two inputs as randomized response over a binary mechanism.
    RrDecompose {
        #[arg(long)]
        mechanism: PathBuf,
        #[arg(long)]
        x: String,
        #[arg(long)]
        x_prime: String,
        #[arg(long)]
        eps: Option<f64>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Trim to pure deletion LDP.
    Trim {
        #[arg(long)]
        mechanism: PathBuf,
        #[arg(long)]
        reference: String,
        #[arg(long)]
        eps: f64,
        /// Defaults to the audited deletion delta.
        #[arg(long)]
        delta: Option<f64>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Compile per-user randomizers into one symmetric randomizer.
    Symmetrize {
        /// Repeat once per randomizer.
        #[arg(long = "mechanism", required = true)]
        mechanisms: Vec<PathBuf>,
        #[arg(long, value_enum, default_value_t = Coin::Private)]
        coin: Coin,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run a base mechanism on a uniform m-subset of n records.
    Subsample {
        #[arg(long)]
        mechanism: PathBuf,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        m: usize,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Coin {
    Private,
    Public,
}

#[derive(Debug, Subcommand)]
pub enum SimulateCmd {
    /// Exact audit of the shuffled reports of n users.
    Shuffle {
        #[arg(long)]
        mechanism: PathBuf,
        #[arg(long)]
        n: u32,
        /// Fraction of users following the protocol; the audit uses
        /// floor(gamma n) honest users.
        #[arg(long, default_value_t = 1.0)]
        gamma: f64,
        #[arg(long, conflicts_with = "delta")]
        eps: Option<f64>,
        /// Report the smallest eps reaching this delta.
        #[arg(long)]
        delta: Option<f64>,
        #[arg(long, default_value_t = 3.0)]
        eps_max: f64,
        #[arg(long, default_value_t = 31)]
        points: usize,
    },
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(long, default_value = "all")]
    pub suite: Suite,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Report path; stdout when absent.
    #[arg(long)]
    pub output: Option<PathBuf>,
    /// Single subsampling instance (with `--suite subsample`).
    #[arg(long, requires_all = ["m", "eps"])]
    pub n: Option<usize>,
    #[arg(long, requires = "n")]
    pub m: Option<usize>,
    #[arg(long, requires = "n")]
    pub eps: Option<f64>,
    /// Also print a table to stdout.
    #[arg(long)]
    pub pretty: bool,
}

impl clap::builder::ValueParserFactory for Suite {
    type Parser = clap::builder::ValueParser;

    fn value_parser() -> Self::Parser {
        clap::builder::ValueParser::new(|s: &str| s.parse::<Suite>().map_err(|e| e.to_string()))
    }
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                let _ = write!(err, "{text}");
                2
            } else {
                let _ = write!(out, "{text}");
                0
            };
        }
    };
    match dispatch(cli.command, out, err) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            2
        }
    }
}

fn dispatch(cmd: Command, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32> {
    match cmd {
        Command::Audit(a) => cmd_audit(a, out).map(|_| 0),
        Command::Bound(b) => cmd_bound(b, out).map(|_| 0),
        Command::Convert(c) => cmd_convert(c, out).map(|_| 0),
        Command::Simulate(s) => cmd_simulate(s, out).map(|_| 0),
        Command::Verify(v) => cmd_verify(v, out, err),
    }
}

fn emit(out: &mut dyn Write, record: &impl Serialize) -> Result<()> {
    writeln!(out, "{}", serde_json::to_string(record)?)?;
    Ok(())
}

fn finite_or_null(x: f64) -> Value {
    if x.is_finite() {
        json!(x)
    } else {
        Value::Null
    }
}

/// Resolves a `--reference` argument against `r`.
pub fn resolve_reference(r: &Mechanism, spec: &str) -> Result<Dist> {
    if let Some((_, d)) = reference_candidates(r)
        .into_iter()
        .find(|(name, _)| name == spec)
    {
        return Ok(d);
    }
    if let Some(label) = spec.strip_prefix("row:") {
        return Err(Error::UnknownInput(label.to_string()));
    }
    let text = std::fs::read_to_string(spec).map_err(|e| {
        invalid(
            "reference",
            format!("`{spec}` is not uniform, average, row:LABEL or a readable file ({e})"),
        )
    })?;
    let d: Dist = serde_json::from_str(&text)?;
    if d.len() != r.num_outputs() {
        return Err(Error::AlphabetMismatch {
            left: r.num_outputs(),
            right: d.len(),
        });
    }
    Ok(d)
}

/// Reads a JSON list of input-label pairs.
pub fn load_neighbors(m: &Mechanism, path: &Path) -> Result<Vec<NeighborPair>> {
    let text = std::fs::read_to_string(path)?;
    let pairs: Vec<(String, String)> = serde_json::from_str(&text)?;
    pairs
        .iter()
        .map(|(a, b)| Ok(NeighborPair::Inputs(m.input_index(a)?, m.input_index(b)?)))
        .collect()
}

fn cmd_audit(a: AuditArgs, out: &mut dyn Write) -> Result<()> {
    let m = Mechanism::load(&a.mechanism)?;
    let reference = match (a.model, &a.reference) {
        (Model::Deletion, None) => {
            return Err(invalid("reference", "--model deletion needs --reference"));
        }
        (_, Some(spec)) => Some(resolve_reference(&m, spec)?),
        _ => None,
    };
    let neighbors = match (a.model, &a.neighbors) {
        (Model::Central, None) => {
            return Err(invalid("neighbors", "--model central needs --neighbors"));
        }
        (_, Some(path)) => Some(load_neighbors(&m, path)?),
        _ => None,
    };
    let shuffle = match (a.model, a.n) {
        (Model::Shuffle, None) => return Err(invalid("n", "--model shuffle needs --n")),
        (Model::Shuffle, Some(n)) => {
            Some(ShuffleAudit::with_limits(&m, n, &EnumLimits::from_env()?)?)
        }
        _ => None,
    };
    let delta_at = |eps: f64| -> Result<f64> {
        match a.model {
            Model::Replacement | Model::Pure => audit_replacement_ldp(&m, eps),
            Model::Deletion => audit_deletion_ldp(&m, reference.as_ref().expect("checked"), eps),
            Model::Central => audit_central(&m, neighbors.as_deref().expect("checked"), eps),
            Model::Shuffle => shuffle.as_ref().expect("checked").delta_at(eps),
        }
    };
    if a.model == Model::Pure {
        let eps = audit_pure(&m)?;
        if a.pretty {
            writeln!(out, "pure eps = {eps}")?;
        } else {
            emit(out, &json!({"eps": finite_or_null(eps)}))?;
        }
        return Ok(());
    }
    let points = match a.eps {
        Some(eps) => vec![(eps, delta_at(eps)?)],
        None => TradeoffCurve::from_fn(&eps_grid(a.eps_max, a.points), &delta_at)?
            .points()
            .iter()
            .map(|p| (p.eps, p.delta))
            .collect(),
    };
    if a.pretty {
        writeln!(out, "{:>12}  {:>22}", "eps", "delta")?;
        for (eps, delta) in points {
            writeln!(out, "{eps:>12.6}  {delta:>22.15e}")?;
        }
    } else {
        for (eps, delta) in points {
            emit(out, &json!({"eps": eps, "delta": delta}))?;
        }
    }
    Ok(())
}

fn cmd_bound(b: BoundCmd, out: &mut dyn Write) -> Result<()> {
    let record = match b {
        BoundCmd::Compose { eps1, eps2 } => json!({
            "bound": "compose",
            "inputs": {"eps1": eps1, "eps2": eps2},
            "eps": compose_eps(eps1, eps2)?,
        }),
        BoundCmd::Subsample {
            eps,
            delta,
            p,
            n,
            m,
        } => {
            let p = match (p, n, m) {
                (Some(p), _, _) => p,
                (None, Some(n), Some(m)) => SubsampleParams::uniform(n, m)?.p,
                _ => return Err(invalid("p", "give --p or both --n and --m")),
            };
            let r = subsample_budget(eps, delta, p)?;
            json!({
                "bound": "subsample",
                "inputs": {"eps": eps, "delta": delta, "p": p},
                "eps": r.eps,
                "delta": r.delta,
            })
        }
        BoundCmd::DeletionToReplacement { eps, delta } => {
            let r = deletion_to_replacement_budget(eps, delta)?;
            json!({
                "bound": "deletion-to-replacement",
                "inputs": {"eps": eps, "delta": delta},
                "eps": r.eps,
                "delta": r.delta,
            })
        }
        BoundCmd::Grouposition {
            k,
            eps,
            delta_prime,
            delta,
        } => {
            let (e, d) =
                grouposition_approx(&GroupositionParams::new(k, eps, delta_prime, delta)?)?;
            json!({
                "bound": "grouposition",
                "inputs": {"k": k, "eps": eps, "delta_prime": delta_prime, "delta": delta},
                "eps": e,
                "delta": d,
            })
        }
        BoundCmd::Purification {
            eps,
            delta,
            n,
            t,
            bits,
        } => {
            let (lo, hi) = purification_t_range(eps, delta, n)?;
            let t = t.unwrap_or(lo.ceil() as u64);
            let r =
                purification_bounds(&PurificationParams::new(eps, delta, n, t)?, bits.as_deref())?;
            json!({
                "bound": "purification",
                "inputs": {"eps": eps, "delta": delta, "n": n, "t": t, "bits": bits},
                "t_range": [lo, finite_or_null(hi)],
                "eps": r.ldp_eps,
                "tv": r.tv_bound,
                "comm_bits": r.comm_bits,
                "public_random_bits": r.public_random_bits,
            })
        }
        BoundCmd::Coupon { n, fail_prob } => json!({
            "bound": "coupon",
            "inputs": {"n": n, "fail_prob": fail_prob},
            "rounds": coupon_rounds(n, fail_prob)?,
        }),
        BoundCmd::ShuffleToLdp { eps, delta, n } => {
            let r = shuffle_to_ldp_budget(eps, delta, n)?;
            json!({
                "bound": "shuffle-to-ldp",
                "inputs": {"eps": eps, "delta": delta, "n": n},
                "eps": r.eps,
                "delta": r.delta,
            })
        }
        BoundCmd::Amplification {
            eps_l,
            delta,
            n,
            gamma,
        } => {
            let params = AmplificationParams::new(eps_l, delta, n, gamma)?;
            json!({
                "bound": "amplification",
                "inputs": {"eps_l": eps_l, "delta": delta, "n": n, "gamma": gamma},
                "n_eff": params.effective_n(),
                "eps": amplification_eps(&params)?,
                "delta": delta,
            })
        }
        BoundCmd::PureToApprox { eps, delta } => {
            let r = pure_to_approx(eps, delta)?;
            json!({
                "bound": "pure-to-approx",
                "inputs": {"eps": eps, "delta": delta},
                "eps": r.eps,
                "delta": r.delta,
            })
        }
        BoundCmd::ApproxToPure { eps, delta, eta, k } => json!({
            "bound": "approx-to-pure",
            "inputs": {"eps": eps, "delta": delta, "eta": eta, "k": k},
            "eps": approx_to_pure_eps(eps, delta, eta, k)?,
        }),
    };
    emit(out, &record)
}

fn cmd_convert(c: ConvertCmd, out: &mut dyn Write) -> Result<()> {
    match c {
        ConvertCmd::ApproxToPure {
            mechanism,
            eps,
            delta,
            eta,
            out: path,
        } => {
            let a = Mechanism::load(&mechanism)?;
            let delta = match delta {
                Some(d) => d,
                None => audit_replacement_ldp(&a, eps)?,
            };
            let (a_prime, eps_prime) = approx_to_pure_finite(&a, eps, delta, eta)?;
            a_prime.save(&path)?;
            emit(
                out,
                &json!({
                    "convert": "approx-to-pure",
                    "inputs": {"eps": eps, "delta": delta, "eta": eta, "k": a.num_outputs()},
                    "eps": eps_prime,
                    "out": path,
                }),
            )
        }
        ConvertCmd::RrDecompose {
            mechanism,
            x,
            x_prime,
            eps,
            out: path,
        } => {
            let r = Mechanism::load(&mechanism)?;
            let (i, j) = (r.input_index(&x)?, r.input_index(&x_prime)?);
            let q = rr_decompose_pure(&r, i, j, eps)?;
            let used = match eps {
                Some(e) => e,
                None => audit_pure(&r.restrict(&[i, j])?)?,
            };
            q.save(&path)?;
            emit(
                out,
                &json!({
                    "convert": "rr-decompose",
                    "inputs": {"x": x, "x_prime": x_prime},
                    "eps": used,
                    "out": path,
                }),
            )
        }
        ConvertCmd::Trim {
            mechanism,
            reference,
            eps,
            delta,
            out: path,
        } => {
            let r = Mechanism::load(&mechanism)?;
            let r0 = resolve_reference(&r, &reference)?;
            let delta = match delta {
                Some(d) => d,
                None => audit_deletion_ldp(&r, &r0, eps)?,
            };
            let t = trim_to_pure_deletion(&r, &r0, eps, delta)?;
            t.save(&path)?;
            emit(
                out,
                &json!({
                    "convert": "trim",
                    "inputs": {"eps": eps, "delta": delta, "reference": reference},
                    "deletion_delta": audit_deletion_ldp(&t, &r0, eps)?,
                    "out": path,
                }),
            )
        }
        ConvertCmd::Symmetrize {
            mechanisms,
            coin,
            out: path,
        } => {
            let rs = mechanisms
                .iter()
                .map(Mechanism::load)
                .collect::<Result<Vec<_>>>()?;
            let model = match coin {
                Coin::Private => CoinModel::Private,
                Coin::Public => CoinModel::Public,
            };
            let compiled = symmetrize(&rs, model)?;
            let eps = match &compiled.combined {
                CompiledRandomizer::Private(m) => {
                    m.save(&path)?;
                    audit_pure(m)?
                }
                CompiledRandomizer::Public(family) => {
                    let w = BufWriter::new(File::create(&path)?);
                    serde_json::to_writer(w, family)?;
                    family
                        .iter()
                        .try_fold(0.0f64, |acc, m| Ok::<_, Error>(acc.max(audit_pure(m)?)))?
                }
            };
            emit(
                out,
                &json!({
                    "convert": "symmetrize",
                    "inputs": {"randomizers": rs.len(), "coin": model},
                    "n_prime": compiled.n_prime,
                    "eps": finite_or_null(eps),
                    "out": path,
                }),
            )
        }
        ConvertCmd::Subsample {
            mechanism,
            n,
            m,
            out: path,
        } => {
            let base = Mechanism::load(&mechanism)?;
            let sub = build_subsampled(&base, n, m)?;
            sub.save(&path)?;
            emit(
                out,
                &json!({
                    "convert": "subsample",
                    "inputs": {"n": n, "m": m},
                    "p": SubsampleParams::uniform(n, m)?.p,
                    "out": path,
                }),
            )
        }
    }
}

fn cmd_simulate(s: SimulateCmd, out: &mut dyn Write) -> Result<()> {
    let SimulateCmd::Shuffle {
        mechanism,
        n,
        gamma,
        eps,
        delta,
        eps_max,
        points,
    } = s;
    let r = Mechanism::load(&mechanism)?;
    if !(gamma > 0.0 && gamma <= 1.0) {
        return Err(invalid("gamma", format!("{gamma} is outside (0, 1]")));
    }
    let honest = (gamma * n as f64).floor() as u32;
    if honest == 0 {
        return Err(invalid(
            "n",
            format!("floor(gamma * n) is 0 for n={n}, gamma={gamma}"),
        ));
    }
    let audit = ShuffleAudit::with_limits(&r, honest, &EnumLimits::from_env()?)?;
    let base = json!({"n": n, "gamma": gamma, "n_eff": honest});
    match (eps, delta) {
        (Some(eps), _) => {
            let mut rec = base;
            rec["eps"] = json!(eps);
            rec["delta"] = json!(audit.delta_at(eps)?);
            emit(out, &rec)
        }
        (None, Some(delta)) => {
            let mut rec = base;
            rec["delta"] = json!(delta);
            rec["eps"] = audit
                .eps_for_delta(delta)?
                .map_or(Value::Null, |e| json!(e));
            let eps_l = audit_pure(&r)?;
            rec["eps_l"] = finite_or_null(eps_l);
            // the closed-form bound, when its hypotheses hold
            rec["bound_eps"] = if eps_l.is_finite() && delta > 0.0 && delta < 1.0 {
                amplification_eps(&AmplificationParams::new(eps_l, delta, n as u64, gamma)?)
                    .map_or(Value::Null, |e| json!(e))
            } else {
                Value::Null
            };
            emit(out, &rec)
        }
        (None, None) => {
            for p in audit.curve(&eps_grid(eps_max, points))?.points() {
                emit(out, &json!({"n": n, "eps": p.eps, "delta": p.delta}))?;
            }
            Ok(())
        }
    }
}

fn cmd_verify(v: VerifyArgs, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32> {
    // open first so an unwritable path fails before any work
    let file =
        match &v.output {
            Some(path) => Some(File::create(path).map_err(|e| {
                invalid("output", format!("cannot write `{}`: {e}", path.display()))
            })?),
            None => None,
        };
    let report = match (v.n, v.m, v.eps) {
        (Some(n), Some(m), Some(eps)) => {
            if v.suite != Suite::Subsample {
                return Err(invalid("suite", "--n/--m/--eps apply to --suite subsample"));
            }
            run_subsample_instance(eps, n, m)?
        }
        _ => run_suite(v.suite, v.seed)?,
    };
    match file {
        Some(f) => {
            let mut w = BufWriter::new(f);
            report.write_jsonl(&mut w)?;
            w.flush()?;
        }
        None => report.write_jsonl(&mut *out)?,
    }
    if v.pretty {
        write!(out, "{}", report.to_table())?;
    }
    let failed: Vec<&str> = report.failures().map(|c| c.id.as_str()).collect();
    writeln!(
        err,
        "{} checks, {} failed, {:.2}s",
        report.checks.len(),
        failed.len(),
        report.wall_time.as_secs_f64()
    )?;
    for id in &failed {
        writeln!(err, "FAILED {id}")?;
    }
    Ok(if failed.is_empty() { 0 } else { 1 })
}
