//! Command-line front end.
//!
//! Every command produces a [`ReportRecord`]; the process exit status is
//! 0 for pass, 1 for fail, 2 for indecisive and 3 for input errors.
//!
//! Group files are JSON documents `{"order": n, "identity": e, "table": [...]}`
//! with the Cayley table flattened row-major (entry `a·n + b` is `ab`) and an
//! optional `"name"`.

use crate::error::{Error, Result};
use crate::estimate::{Certificate, NormEstimate, OptimConfig};
use crate::group::{FiniteGroup, GroupFunction};
use crate::herz;
use crate::linalg::{random_matrix, DenseMatrix, C64};
use crate::multipliers::{self, SchurSymbol};
use crate::nuclear;
use crate::opspace::{self, ConcretePOpSpace, LinearSpaceMap, Subquotient};
use crate::pexp::PExponent;
use crate::pnorm;
use crate::projective;
use crate::report::{ReportRecord, Verdict};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;
use std::path::PathBuf;
use std::time::Instant;

/// Tolerance for bracket overlap in cross-checks.
const OVERLAP_TOL: f64 = 5e-2;
/// Tolerance for values known in closed form.
const EXACT_TOL: f64 = 1e-6;

#[derive(Parser, Debug)]
#[command(name = "herzlab", version, about = "Certified norm brackets for p-operator spaces and Herz algebras")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub opts: Options,
}

#[derive(Args, Debug, Clone)]
pub struct Options {
    /// Exponent in (1, inf), or one of 1, 2, inf where closed forms exist.
    #[arg(long, global = true, default_value = "2")]
    pub p: String,
    /// Built-in group (Z_2..Z_8, S_3, S_4, D_4, Q_8) or a JSON table file.
    #[arg(long, global = true, default_value = "Z_4")]
    pub group: String,
    #[arg(long, global = true, env = "HERZLAB_SEED", default_value_t = 0)]
    pub seed: u64,
    /// Report destination; stdout when absent.
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Run everything sequentially on one thread.
    #[arg(long, global = true)]
    pub single_lane: bool,
    #[arg(long, global = true)]
    pub budget_restarts: Option<usize>,
    #[arg(long, global = true)]
    pub budget_iters: Option<usize>,
    /// Highest matrix level examined.
    #[arg(long, global = true)]
    pub n_max: Option<usize>,
    /// Largest factorization dimension searched.
    #[arg(long, global = true)]
    pub d_max: Option<usize>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum MapKind {
    /// The identity of B(ℓ_p^d).
    Identity,
    /// Projection onto the diagonal.
    Diagonal,
    /// A random Schur multiplier.
    Schur,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum TensorKind {
    Nuclear,
    Herz,
}

#[derive(Subcommand, Debug, Clone)]
pub enum Command {
    /// ‖A‖ on ℓ_p^n. Matrices are written `a,b;c,d` with entries like `1`, `-2.5`, `1+2i`.
    Pnorm {
        #[arg(long)]
        matrix: Option<String>,
        /// Size of the random matrix used when --matrix is absent.
        #[arg(long, default_value_t = 3)]
        dim: usize,
    },
    /// Truncated p-cb norm of a map on B(ℓ_p^d).
    Cbnorm {
        #[arg(long, value_enum, default_value_t = MapKind::Diagonal)]
        map: MapKind,
        #[arg(long, default_value_t = 2)]
        dim: usize,
    },
    /// ‖u‖ in A_p(G). Functions: ones, delta[:s], character:k, random, or comma-separated values.
    Apnorm {
        #[arg(long, default_value = "ones")]
        function: String,
    },
    /// Multiplier norms ‖u‖_M, ‖u‖_{M_cb}, ‖u‖_{FS_p} and the M_0 bound.
    Multnorm {
        #[arg(long, default_value = "ones")]
        function: String,
    },
    /// Schur multiplier norm of a symbol, or of (s, t) ↦ u(st⁻¹) when --function is given.
    Schur {
        #[arg(long)]
        symbol: Option<String>,
        #[arg(long)]
        function: Option<String>,
    },
    /// Random checks of the matrix norm axioms on B(ℓ_p^d) or a random subspace.
    Axioms {
        #[arg(long, default_value_t = 2)]
        dim: usize,
        /// Use a random subspace of this dimension instead of all of B(ℓ_p^d).
        #[arg(long)]
        subspace: Option<usize>,
        #[arg(long, default_value_t = 20)]
        trials: usize,
    },
    /// Searches for violations of ‖a ⊗ I_E‖ ≤ ‖a‖ on E = ℓ_p^dim.
    Kwapien {
        #[arg(long)]
        matrix: Option<String>,
        #[arg(long, default_value_t = 2)]
        dim: usize,
    },
    /// Pairing between matrix levels of nuclear operators and their duals.
    Duality {
        #[arg(long, default_value_t = 2)]
        dim: usize,
        #[arg(long, default_value_t = 5)]
        trials: usize,
    },
    /// Projective tensor identities for nuclear spaces or Herz algebras.
    Tensor {
        #[arg(long, value_enum, default_value_t = TensorKind::Nuclear)]
        kind: TensorKind,
        /// Second factor group for --kind herz.
        #[arg(long, default_value = "Z_2")]
        group2: String,
        #[arg(long, default_value_t = 3)]
        trials: usize,
    },
    /// The invariant suite for one group and exponent.
    GroupSuite,
}

impl Options {
    fn config(&self) -> Result<OptimConfig> {
        let mut cfg = OptimConfig::default().with_seed(self.seed);
        cfg.single_lane = self.single_lane;
        if let Some(r) = self.budget_restarts {
            cfg.restarts = r;
        }
        if let Some(i) = self.budget_iters {
            cfg.max_iters = i;
        }
        if !cfg.is_valid() {
            return Err(Error::Input("budgets must be positive".into()));
        }
        Ok(cfg)
    }

    /// Exponent strictly inside (1, ∞).
    fn interior_p(&self) -> Result<PExponent> {
        let p = PExponent::parse(&self.p)?;
        if p.is_endpoint() {
            return Err(Error::Exponent(format!("{} (this command needs 1 < p < inf)", self.p)));
        }
        Ok(p)
    }
}

/// Parses `1`, `-2.5`, `3i`, `1+2i`, `1-0.5i`.
pub fn parse_complex(token: &str) -> Result<C64> {
    let t: String = token.chars().filter(|c| !c.is_whitespace()).collect();
    let bad = || Error::Input(format!("cannot parse complex number `{token}`"));
    if t.is_empty() {
        return Err(bad());
    }
    let Some(body) = t.strip_suffix('i') else {
        return t.parse::<f64>().map(|x| C64::new(x, 0.0)).map_err(|_| bad());
    };
    // Split at the last sign that is not the leading one or part of an exponent.
    let bytes = body.as_bytes();
    let split = (1..bytes.len())
        .rev()
        .find(|&k| (bytes[k] == b'+' || bytes[k] == b'-') && !matches!(bytes[k - 1], b'e' | b'E'));
    let imag = |s: &str| -> Result<f64> {
        match s {
            "" | "+" => Ok(1.0),
            "-" => Ok(-1.0),
            s => s.parse().map_err(|_| bad()),
        }
    };
    match split {
        Some(k) => Ok(C64::new(body[..k].parse().map_err(|_| bad())?, imag(&body[k..])?)),
        None => Ok(C64::new(0.0, imag(body)?)),
    }
}

/// Rows separated by `;`, entries by `,`.
pub fn parse_matrix(text: &str) -> Result<DenseMatrix> {
    let rows: Vec<Vec<C64>> = text
        .split(';')
        .map(|r| r.split(',').map(parse_complex).collect::<Result<Vec<_>>>())
        .collect::<Result<_>>()?;
    let ncols = rows.first().map_or(0, Vec::len);
    if ncols == 0 || rows.iter().any(|r| r.len() != ncols) {
        return Err(Error::Input("matrix rows must be nonempty and of equal length".into()));
    }
    Ok(DenseMatrix::from_fn(rows.len(), ncols, |i, j| rows[i][j]))
}

/// `ones`, `delta`, `delta:s`, `character:k`, `random` or explicit values.
pub fn parse_function(g: &FiniteGroup, text: &str, cfg: &OptimConfig) -> Result<GroupFunction> {
    let t = text.trim();
    let (head, arg) = match t.split_once(':') {
        Some((h, a)) => (h, Some(a)),
        None => (t, None),
    };
    let index = |a: Option<&str>, bound: usize, what: &str| -> Result<usize> {
        let k: usize = a.unwrap_or("0").parse().map_err(|_| Error::Input(format!("bad {what} index in `{t}`")))?;
        if k >= bound {
            return Err(Error::Input(format!("{what} index {k} out of range (< {bound})")));
        }
        Ok(k)
    };
    match head {
        "ones" => Ok(GroupFunction::ones(g)),
        "delta" => {
            let s = match arg {
                None => g.identity(),
                a => index(a, g.order(), "element")?,
            };
            Ok(GroupFunction::delta(g, s))
        }
        "character" => {
            let chars = g.characters();
            Ok(chars[index(arg, chars.len(), "character")?].clone())
        }
        "random" => Ok(GroupFunction::random(g, &mut cfg.rng(9000))),
        _ => {
            let values = t.split(',').map(parse_complex).collect::<Result<Vec<_>>>()?;
            if values.len() != g.order() {
                return Err(Error::Input(format!("function needs {} values, got {}", g.order(), values.len())));
            }
            Ok(GroupFunction::new(values))
        }
    }
}

fn bracket_verdict(e: &NormEstimate) -> Verdict {
    if e.is_consistent() {
        Verdict::Pass
    } else {
        Verdict::Fail
    }
}

fn overlap_verdict(a: &NormEstimate, b: &NormEstimate, tol: f64) -> Verdict {
    if a.overlaps(b, tol) {
        Verdict::Pass
    } else {
        Verdict::Fail
    }
}

/// Pass when the bracket lies within `tol` of `value`, fail when it excludes it.
fn value_verdict(e: &NormEstimate, value: f64, tol: f64) -> Verdict {
    if e.lower >= value - tol && e.upper <= value + tol {
        Verdict::Pass
    } else if e.contains(value, tol) {
        Verdict::Indecisive
    } else {
        Verdict::Fail
    }
}

fn check_dim(dim: usize, max: usize) -> Result<()> {
    if dim == 0 || dim > max {
        return Err(Error::Input(format!("dimension must be in 1..={max}")));
    }
    Ok(())
}

/// Runs a parsed command line. Timing is filled in by the caller.
pub fn run(cli: &Cli) -> Result<ReportRecord> {
    let o = &cli.opts;
    let cfg = o.config()?;
    let start = Instant::now();
    let mut rec = match &cli.command {
        Command::Pnorm { matrix, dim } => run_pnorm(o, &cfg, matrix.as_deref(), *dim)?,
        Command::Cbnorm { map, dim } => run_cbnorm(o, &cfg, *map, *dim)?,
        Command::Apnorm { function } => run_apnorm(o, &cfg, function)?,
        Command::Multnorm { function } => run_multnorm(o, &cfg, function)?,
        Command::Schur { symbol, function } => run_schur(o, &cfg, symbol.as_deref(), function.as_deref())?,
        Command::Axioms { dim, subspace, trials } => run_axioms(o, &cfg, *dim, *subspace, *trials)?,
        Command::Kwapien { matrix, dim } => run_kwapien(o, &cfg, matrix.as_deref(), *dim)?,
        Command::Duality { dim, trials } => run_duality(o, &cfg, *dim, *trials)?,
        Command::Tensor { kind, group2, trials } => run_tensor(o, &cfg, *kind, group2, *trials)?,
        Command::GroupSuite => run_group_suite(o, &cfg)?,
    };
    rec.wall_time = start.elapsed().as_secs_f64();
    Ok(rec)
}

fn inputs(o: &Options, cfg: &OptimConfig, command: &str, extra: serde_json::Value) -> serde_json::Value {
    json!({
        "command": command,
        "p": o.p,
        "group": o.group,
        "restarts": cfg.restarts,
        "max_iters": cfg.max_iters,
        "n_max": o.n_max,
        "d_max": o.d_max,
        "args": extra,
    })
}

fn run_pnorm(o: &Options, cfg: &OptimConfig, matrix: Option<&str>, dim: usize) -> Result<ReportRecord> {
    let p = PExponent::parse(&o.p)?;
    let a = match matrix {
        Some(m) => parse_matrix(m)?,
        None => {
            check_dim(dim, 8)?;
            random_matrix(dim, dim, &mut cfg.rng(9001))
        }
    };
    let mut rec = ReportRecord::new("pnorm", &inputs(o, cfg, "pnorm", json!({"matrix": matrix, "dim": dim})), o.seed);
    let est = pnorm::opnorm_estimate(&a, p, cfg)?;
    rec.verdict(bracket_verdict(&est));
    if p.has_closed_form() {
        let exact = pnorm::opnorm_exact(&a, p)?;
        rec.residual("closed_form_gap", (est.upper - exact).abs().max((est.lower - exact).abs()));
        rec.verdict(value_verdict(&est, exact, 1e-8));
    }
    rec.estimate("opnorm", est);
    Ok(rec)
}

fn run_cbnorm(o: &Options, cfg: &OptimConfig, map: MapKind, dim: usize) -> Result<ReportRecord> {
    let p = o.interior_p()?;
    check_dim(dim, 4)?;
    let n_max = o.n_max.unwrap_or(2);
    let space = ConcretePOpSpace::full(p, dim);
    let mut rec = ReportRecord::new(
        "cbnorm",
        &inputs(o, cfg, "cbnorm", json!({"map": format!("{map:?}"), "dim": dim})),
        o.seed,
    );
    // Identity and the diagonal projection (an average of conjugations by
    // diagonal sign matrices) are completely contractive. Schur multipliers
    // are bounded at every level by any factorization of their symbol.
    let (u, upper, expected) = match map {
        MapKind::Identity => (LinearSpaceMap::identity(&space), (1.0, Certificate::Exact), Some(1.0)),
        MapKind::Diagonal => (
            LinearSpaceMap::from_fn(&space, |t| DenseMatrix::from_fn(dim, dim, |i, j| if i == j { t[(i, j)] } else { C64::new(0.0, 0.0) }))?,
            (1.0, Certificate::Exact),
            Some(1.0),
        ),
        MapKind::Schur => {
            let psi = random_matrix(dim, dim, &mut cfg.rng(9002));
            let (cost, _, _) = multipliers::schur_factor(&psi, p, o.d_max.unwrap_or(2 * dim), cfg)?;
            let sym = SchurSymbol::new(psi)?;
            (LinearSpaceMap::from_fn(&space, |t| sym.apply(t))?, (cost, Certificate::Factorization), None)
        }
    };
    let report = opspace::pcb_norm(&u, n_max, Some(upper), cfg)?;
    for (k, l) in report.levels.iter().enumerate() {
        rec.estimate(format!("level_{}", k + 1), l.clone());
    }
    rec.verdict(bracket_verdict(&report.estimate));
    if let Some(v) = expected {
        rec.verdict(value_verdict(&report.estimate, v, EXACT_TOL));
    }
    rec.residual("monotone", if report.monotone { 1.0 } else { 0.0 });
    rec.estimate("pcb", report.estimate);
    Ok(rec)
}

fn run_apnorm(o: &Options, cfg: &OptimConfig, function: &str) -> Result<ReportRecord> {
    let p = o.interior_p()?;
    let g = FiniteGroup::load(&o.group)?;
    let u = parse_function(&g, function, cfg)?;
    let mut rec = ReportRecord::new("apnorm", &inputs(o, cfg, "apnorm", json!({"function": function, "values": values_json(&u)})), o.seed);
    let est = herz::ap_norm(&g, &u, p, cfg)?;
    rec.verdict(bracket_verdict(&est));
    if matches!(function.trim(), "ones" | "delta") {
        rec.verdict(value_verdict(&est, 1.0, EXACT_TOL));
    }
    if p.is_two() && g.is_abelian() {
        let fourier = fourier_l1(&g, &u);
        rec.residual("fourier_l1", fourier);
        rec.verdict(value_verdict(&est, fourier, 1e-4));
    }
    rec.estimate("ap_norm", est);
    Ok(rec)
}

/// Σ_χ |(1/|G|) Σ_s u(s) conj χ(s)| over the characters of an abelian group.
pub fn fourier_l1(g: &FiniteGroup, u: &GroupFunction) -> f64 {
    let k = g.order() as f64;
    g.characters()
        .iter()
        .map(|chi| {
            let s: C64 = u.values.iter().zip(&chi.values).map(|(a, b)| a * b.conj()).sum();
            s.norm() / k
        })
        .sum()
}

fn values_json(u: &GroupFunction) -> serde_json::Value {
    json!(u.values.iter().map(|z| [z.re, z.im]).collect::<Vec<_>>())
}

/// M, M_cb, FS_p and M_0 for one function, with the pairwise overlap verdict.
fn multiplier_family(
    rec: &mut ReportRecord,
    prefix: &str,
    g: &FiniteGroup,
    u: &GroupFunction,
    p: PExponent,
    n_max: usize,
    d_max: Option<usize>,
    expect_one: bool,
    cfg: &OptimConfig,
) -> Result<()> {
    let plain = multipliers::multiplier_norm(g, u, p, &cfg.fork(1))?;
    let cb = multipliers::cb_multiplier_norm(g, u, p, n_max, &cfg.fork(2))?;
    let fs = multipliers::herz_schur_norm(g, u, p, &cfg.fork(3))?;
    let (m0, pair) = multipliers::m0_upper_bound(g, u, p, d_max, &cfg.fork(4))?;
    let m0_est = NormEstimate::new(plain.lower.min(m0), m0, Certificate::Factorization, format!("coefficient-pair/d={}", pair.d));
    let all = [("M", &plain), ("M_cb", &cb.estimate), ("FS", &fs), ("M_0", &m0_est)];
    for (i, (_, a)) in all.iter().enumerate() {
        rec.verdict(bracket_verdict(a));
        for (_, b) in &all[i + 1..] {
            rec.verdict(overlap_verdict(a, b, OVERLAP_TOL));
        }
        if expect_one {
            rec.verdict(value_verdict(a, 1.0, EXACT_TOL));
        }
    }
    rec.residual(format!("{prefix}cb_monotone"), if cb.monotone { 1.0 } else { 0.0 });
    for (name, e) in all {
        rec.estimate(format!("{prefix}{name}"), e.clone());
    }
    Ok(())
}

fn run_multnorm(o: &Options, cfg: &OptimConfig, function: &str) -> Result<ReportRecord> {
    let p = o.interior_p()?;
    let g = FiniteGroup::load(&o.group)?;
    let u = parse_function(&g, function, cfg)?;
    let mut rec = ReportRecord::new("multnorm", &inputs(o, cfg, "multnorm", json!({"function": function, "values": values_json(&u)})), o.seed);
    let expect_one = function.trim().starts_with("character") || function.trim() == "ones";
    multiplier_family(&mut rec, "", &g, &u, p, o.n_max.unwrap_or(3), o.d_max, expect_one, cfg)?;
    Ok(rec)
}

fn run_schur(o: &Options, cfg: &OptimConfig, symbol: Option<&str>, function: Option<&str>) -> Result<ReportRecord> {
    let p = o.interior_p()?;
    let mut rec = ReportRecord::new("schur", &inputs(o, cfg, "schur", json!({"symbol": symbol, "function": function})), o.seed);
    let est = match (symbol, function) {
        (Some(s), None) => {
            let psi = SchurSymbol::new(parse_matrix(s)?)?;
            if psi.size() > 6 {
                return Err(Error::Input("symbols larger than 6×6 are not supported".into()));
            }
            multipliers::schur_norm(&psi, p, o.d_max, cfg)?
        }
        (None, Some(f)) => {
            let g = FiniteGroup::load(&o.group)?;
            let u = parse_function(&g, f, cfg)?;
            multipliers::herz_schur_norm(&g, &u, p, cfg)?
        }
        _ => return Err(Error::Input("give exactly one of --symbol or --function".into())),
    };
    rec.verdict(bracket_verdict(&est));
    rec.estimate("schur_norm", est);
    Ok(rec)
}

fn run_axioms(o: &Options, cfg: &OptimConfig, dim: usize, subspace: Option<usize>, trials: usize) -> Result<ReportRecord> {
    let p = o.interior_p()?;
    check_dim(dim, 3)?;
    let x = match subspace {
        Some(k) => {
            check_dim(k, dim * dim)?;
            ConcretePOpSpace::random_subspace(p, dim, k, &mut cfg.rng(9003))
        }
        None => ConcretePOpSpace::full(p, dim),
    };
    let mut rec = ReportRecord::new(
        "axioms",
        &inputs(o, cfg, "axioms", json!({"dim": dim, "subspace": subspace, "trials": trials})),
        o.seed,
    );
    let r = opspace::check_axioms(&x, trials, cfg)?;
    rec.residual("d_infinity_violations", r.d_infinity_violations as f64);
    rec.residual("m_p_violations", r.m_p_violations as f64);
    rec.residual("undecided", r.undecided as f64);
    rec.residual("worst_d_infinity", r.worst_d_infinity);
    rec.residual("worst_m_p", r.worst_m_p);
    rec.verdict(if r.pass { Verdict::Pass } else { Verdict::Fail });
    Ok(rec)
}

fn run_kwapien(o: &Options, cfg: &OptimConfig, matrix: Option<&str>, dim: usize) -> Result<ReportRecord> {
    let p = o.interior_p()?;
    check_dim(dim, 4)?;
    let a = match matrix {
        Some(m) => parse_matrix(m)?,
        None => random_matrix(2, 2, &mut cfg.rng(9004)),
    };
    let mut rec = ReportRecord::new("kwapien", &inputs(o, cfg, "kwapien", json!({"matrix": matrix, "dim": dim})), o.seed);
    let r = opspace::kwapien_check(&Subquotient::lp(p, dim), &a, cfg)?;
    rec.residual("sup_lower", r.sup_lower);
    rec.residual("margin", r.margin);
    rec.estimate("a_norm", NormEstimate::new(r.a_lower, r.a_upper, Certificate::Interpolation, "opnorm"));
    rec.verdict(r.verdict);
    Ok(rec)
}

fn run_duality(o: &Options, cfg: &OptimConfig, dim: usize, trials: usize) -> Result<ReportRecord> {
    let p = o.interior_p()?;
    let n = o.n_max.unwrap_or(2);
    let mut rec = ReportRecord::new("duality", &inputs(o, cfg, "duality", json!({"dim": dim, "trials": trials, "n": n})), o.seed);
    let r = nuclear::check_nuclear_duality(n, dim, p, trials, 0.95, cfg)?;
    rec.residual("violations", r.violations as f64);
    rec.residual("worst_slack", r.worst_slack);
    rec.residual("attainment", r.attainment);
    rec.residual("attainment_vs_upper", r.attainment_vs_upper);
    rec.verdict(if r.violations > 0 {
        Verdict::Fail
    } else if r.pass {
        Verdict::Pass
    } else {
        Verdict::Indecisive
    });
    Ok(rec)
}

fn run_tensor(o: &Options, cfg: &OptimConfig, kind: TensorKind, group2: &str, trials: usize) -> Result<ReportRecord> {
    let p = o.interior_p()?;
    let mut rec = ReportRecord::new(
        "tensor",
        &inputs(o, cfg, "tensor", json!({"kind": format!("{kind:?}"), "group2": group2, "trials": trials})),
        o.seed,
    );
    let mut rng = cfg.rng(9005);
    match kind {
        TensorKind::Nuclear => {
            for t in 0..trials {
                let w = random_matrix(4, 4, &mut rng);
                let r = projective::check_nuclear_tensor(&w, 2, 2, p, OVERLAP_TOL, &cfg.fork(t as u64))?;
                rec.verdict(r.verdict);
                rec.estimate(format!("trial_{t}.projective"), r.projective);
                rec.estimate(format!("trial_{t}.nuclear"), r.identified);
            }
        }
        TensorKind::Herz => {
            let g = FiniteGroup::load(&o.group)?;
            let h = FiniteGroup::load(group2)?;
            let pm = herz::check_pm_tensor(&g, &h)?;
            rec.residual("pm_mismatches", pm.mismatches as f64);
            rec.verdict(pm.verdict);
            for t in 0..trials {
                let u = GroupFunction::random(&g, &mut rng);
                let v = GroupFunction::random(&h, &mut rng);
                let r = projective::check_ap_tensor(&g, &h, &u, &v, p, OVERLAP_TOL, &cfg.fork(t as u64))?;
                rec.verdict(r.verdict);
                rec.estimate(format!("trial_{t}.projective"), r.projective);
                rec.estimate(format!("trial_{t}.product"), r.identified);
            }
        }
    }
    Ok(rec)
}

fn run_group_suite(o: &Options, cfg: &OptimConfig) -> Result<ReportRecord> {
    let p = o.interior_p()?;
    let g = FiniteGroup::load(&o.group)?;
    let k = g.order();
    let table: Vec<usize> = g.table().to_vec();
    let mut rec = ReportRecord::new("group-suite", &inputs(o, cfg, "group-suite", json!({"order": k, "table": table})), o.seed);
    rec.residual("abelian", if g.is_abelian() { 1.0 } else { 0.0 });

    // Unit values.
    for (name, u) in [("delta_e", GroupFunction::delta(&g, g.identity())), ("ones", GroupFunction::ones(&g))] {
        let e = herz::ap_norm(&g, &u, p, &cfg.fork(10))?;
        rec.verdict(value_verdict(&e, 1.0, EXACT_TOL));
        rec.estimate(format!("ap_norm.{name}"), e);
    }

    // Exact algebraic identities.
    let cop = herz::coproduct_residual(&g);
    rec.residual("coproduct", cop);
    rec.verdict(if cop == 0.0 { Verdict::Pass } else { Verdict::Fail });
    let diag = herz::diagonal_residual(&g);
    rec.residual("diagonal", diag);
    rec.verdict(if diag <= 1e-12 { Verdict::Pass } else { Verdict::Fail });
    if 2 * k <= 64 {
        let pm = herz::check_pm_tensor(&g, &FiniteGroup::cyclic(2))?;
        rec.residual("pm_tensor_mismatches", pm.mismatches as f64);
        rec.verdict(pm.verdict);
    }

    // Averaging projection.
    let q = herz::check_quasi_expectation(&g, p, o.n_max.unwrap_or(2).min(3), 3, &cfg.fork(20))?;
    rec.residual("quasi.idempotence", q.idempotence);
    rec.residual("quasi.commutation", q.commutation);
    rec.residual("quasi.module", q.module);
    rec.residual("quasi.fixes_translations", if q.fixes_translations { 1.0 } else { 0.0 });
    for (n, l) in q.levels.iter().enumerate() {
        rec.estimate(format!("quasi.level_{}", n + 1), l.clone());
    }
    rec.verdict(q.verdict);

    // A random function, with the Fourier oracle at p = 2 for abelian groups.
    let u = GroupFunction::random(&g, &mut cfg.rng(30));
    let e = herz::ap_norm(&g, &u, p, &cfg.fork(31))?;
    rec.verdict(bracket_verdict(&e));
    let sup = u.sup_norm();
    rec.verdict(if e.upper + 1e-9 >= sup { Verdict::Pass } else { Verdict::Fail });
    rec.estimate("ap_norm.random", e);
    if g.is_abelian() {
        let e2 = herz::ap_norm(&g, &u, PExponent::two(), &cfg.fork(32))?;
        let f = fourier_l1(&g, &u);
        rec.residual("fourier_l1", f);
        rec.verdict(value_verdict(&e2, f, 1e-4));
        rec.estimate("ap_norm.random.p2", e2);
    }

    // Multipliers: a character and a random function.
    let n_max = o.n_max.unwrap_or(2);
    let chi = g.characters().pop().unwrap_or_else(|| GroupFunction::ones(&g));
    multiplier_family(&mut rec, "mult.character.", &g, &chi, p, n_max, o.d_max, true, &cfg.fork(40))?;
    multiplier_family(&mut rec, "mult.random.", &g, &u, p, n_max, o.d_max, false, &cfg.fork(41))?;

    // The two matrix structures at level 2 on small groups.
    if k <= 4 {
        let a: Vec<GroupFunction> = (0..4).map(|_| GroupFunction::random(&g, &mut cfg.rng(50))).collect();
        let s = herz::structure_norms(&g, &a, 2, p, None, &cfg.fork(51))?;
        rec.verdict(s.verdict);
        rec.estimate("structure.dual", s.dual);
        rec.estimate("structure.quotient", s.quotient);
    }
    Ok(rec)
}

/// Parses arguments, runs and writes the report; returns the exit status.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 3 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    let rec = match run(&cli) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return 3;
        }
    };
    let text = match cli.opts.format {
        Format::Json => rec.to_json(),
        Format::Csv => rec.to_csv(),
    };
    match &cli.opts.output {
        Some(path) => {
            if let Err(e) = std::fs::write(path, text) {
                eprintln!("error: cannot write {}: {e}", path.display());
                return 3;
            }
        }
        None => print!("{text}"),
    }
    rec.verdict.exit_code()
}
