//! The `horolab` command line: distance and systole queries, trajectory
//! export, test campaigns and counterexample certificates.
//!
//! Exit codes: 0 pass, 1 fail, 2 inconclusive or ball budget exhausted,
//! 3 usage, parse or I/O error.

use std::ffi::OsString;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::sync::Arc;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::config::Config;
use crate::error::{Error, Result};
use crate::flows::{sample_time_changed, sample_trajectory, FlowKind, TimeChange};
use crate::fuchsian::{FuchsianGroup, QuotientPoint, Word};
use crate::lab::{
    bw_test_geodesic, counterexample_geodesic_not_separating, counterexample_horocycle_not_bw,
    counterexample_horocycle_not_bw_with, kh_test_horocycle, kinematic_test_time_change, separating_test, BwOptions,
    Direction, KhOptions, KinematicOptions, Outcome, SeparatingOptions, TestVerdict,
};
use crate::sl2::GroupElement;

/// Exit code for usage, parse and I/O errors.
pub const EXIT_ERROR: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "horolab", version, about = "Geodesic and horocycle flows on compact hyperbolic surfaces")]
pub struct Cli {
    /// Config file of `key = value` lines [default: $HOROLAB_CONFIG, else built-in defaults]
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,

    /// Override one config key after the file is read (repeatable), e.g. `--set seeds.default=7`
    #[arg(long = "set", global = true, value_name = "KEY=VALUE")]
    pub set: Vec<String>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Distance between two elements, or between their cosets with --quotient
    Dist(DistArgs),
    /// Injectivity radius, trace gap and the minimal-trace element
    Sys,
    /// Run a seeded test campaign and write its verdict file
    Test(TestArgs),
    /// Build a counterexample and write its certificate and table
    Cex(CexArgs),
    /// Sample a flow orbit to CSV
    Flow(FlowArgs),
    /// Print the effective configuration in loadable form
    Config,
}

/// Element specs: `e`, `a:t`, `b:t`, `c:t`, `r:θ`, `gen:k`, `gen:k^-1`, a
/// word such as `g0^-1*g2`, or four reals `a11,a12,a21,a22`. Factors may be
/// joined with `*`.
#[derive(Debug, Args)]
pub struct DistArgs {
    #[arg(allow_hyphen_values = true)]
    pub g: String,
    #[arg(allow_hyphen_values = true)]
    pub h: String,
    /// Minimise over the group and print the optimal element
    #[arg(long)]
    pub quotient: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum TestKind {
    /// Geodesic flow, reparametrised closeness
    Bw,
    /// Separating test for one flow and one time direction
    Sep,
    /// Kinematic test for a time change of the stable horocycle flow
    Kin,
    /// Two-condition test for the stable horocycle flow
    Kh,
}

#[derive(Debug, Args)]
pub struct TestArgs {
    #[arg(value_enum)]
    pub which: TestKind,
    /// Target shift bound [bw: 0.5, kin: 0.25]
    #[arg(long)]
    pub eps: Option<f64>,
    /// Tube radius [sep: 0.1, kh: 0.05]
    #[arg(long)]
    pub delta: Option<f64>,
    /// Time window [bw: 20, sep: 30, kin: 30, kh: 20]
    #[arg(long)]
    pub window: Option<f64>,
    /// Pairs per family, triples for kh [default: 50]
    #[arg(long)]
    pub pairs: Option<usize>,
    /// Campaign seed [default: seeds.default]
    #[arg(long)]
    pub seed: Option<u64>,
    /// Reparametrizations per pair, bw only [default: 10]
    #[arg(long)]
    pub reparams: Option<usize>,
    /// Flow, sep only: geodesic, stable or unstable [default: stable]
    #[arg(long)]
    pub flow: Option<String>,
    /// Time direction, sep and kin only: positive or negative [default: positive]
    #[arg(long)]
    pub direction: Option<String>,
    /// Time change, kin only: identity, constant:C or bump:A [default: identity]
    #[arg(long = "time-change")]
    pub time_change: Option<String>,
    /// Verdict file [default: verdict-<which>.json]
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum CexKind {
    /// Stable horocycle orbits that stay close under a reparametrization
    HorocycleBw,
    /// Geodesic orbits that converge without sharing an orbit
    GeodesicSep,
}

#[derive(Debug, Args)]
pub struct CexArgs {
    #[arg(value_enum)]
    pub which: CexKind,
    #[arg(long, default_value_t = 0.1)]
    pub delta: f64,
    /// Diagonal entry of K, horocycle-bw only [default: chosen from delta]
    #[arg(long)]
    pub a: Option<f64>,
    /// Time direction, geodesic-sep only [default: positive]
    #[arg(long)]
    pub direction: Option<String>,
    /// Ball radius of the non-orbit search, geodesic-sep only [default: 8]
    #[arg(long)]
    pub cert_radius: Option<f64>,
    /// Directory receiving `<name>.json` and `<name>.csv`
    #[arg(long, default_value = ".")]
    pub out_dir: PathBuf,
}

#[derive(Debug, Args)]
pub struct FlowArgs {
    /// geodesic, stable or unstable
    pub kind: String,
    /// Starting element, in the syntax of `dist`
    #[arg(long, default_value = "e", allow_hyphen_values = true)]
    pub start: String,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub t0: f64,
    #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
    pub t1: f64,
    /// Number of samples, endpoints included
    #[arg(short, long, default_value_t = 11)]
    pub n: usize,
    /// Time change applied to the flow, sampled over [0, t1]: constant:C or bump:A
    #[arg(long = "time-change")]
    pub time_change: Option<String>,
    /// CSV destination, `-` for standard output
    #[arg(long, default_value = "-")]
    pub out: PathBuf,
}

fn parse_real(tok: &str) -> Result<f64> {
    tok.trim()
        .parse::<f64>()
        .ok()
        .filter(|v| v.is_finite())
        .ok_or_else(|| Error::Parse(format!("bad number `{tok}`")))
}

fn parse_factor(group: &FuchsianGroup, tok: &str) -> Result<GroupElement> {
    let tok = tok.trim();
    if tok == "e" {
        return Ok(GroupElement::IDENTITY);
    }
    if let Some(rest) = tok.strip_prefix("gen:") {
        let (body, inv) = match rest.strip_suffix("^-1") {
            Some(b) => (b, true),
            None => (rest, false),
        };
        let k: usize = body.parse().map_err(|_| Error::Parse(format!("bad generator index in `{tok}`")))?;
        let g = group
            .generators()
            .get(k)
            .ok_or_else(|| Error::Parse(format!("`{tok}`: the group has {} generators", group.generators().len())))?;
        return Ok(if inv { g.inverse() } else { *g });
    }
    if let Some((name, t)) = tok.split_once(':') {
        let t = parse_real(t).map_err(|_| Error::Parse(format!("bad parameter in `{tok}`")))?;
        return match name {
            "a" => Ok(GroupElement::a(t)),
            "b" => Ok(GroupElement::b(t)),
            "c" => Ok(GroupElement::c(t)),
            "r" => Ok(GroupElement::rotation(t)),
            _ => Err(Error::Parse(format!("unknown element `{tok}`"))),
        };
    }
    if tok.starts_with('g') {
        let w = Word::parse_ascii(tok)?;
        if let Some(l) = w.letters().iter().find(|l| **l as usize >= group.letters().len()) {
            return Err(Error::Parse(format!("`{tok}`: no generator g{}", l / 2)));
        }
        return Ok(group.evaluate(&w));
    }
    Err(Error::Parse(format!("unknown element `{tok}`")))
}

/// Parses an element spec; see [`DistArgs`].
pub fn parse_element(group: &FuchsianGroup, spec: &str) -> Result<GroupElement> {
    let parts: Vec<&str> = spec.split(',').collect();
    if parts.len() > 1 {
        if parts.len() != 4 {
            return Err(Error::Parse(format!("`{spec}`: expected 4 comma-separated reals")));
        }
        let v = parts.iter().map(|p| parse_real(p)).collect::<Result<Vec<_>>>()?;
        return GroupElement::new(v[0], v[1], v[2], v[3], group.tolerances());
    }
    let mut acc = GroupElement::IDENTITY;
    for tok in spec.split('*') {
        acc = acc.mul(&parse_factor(group, tok)?);
    }
    Ok(acc)
}

/// `identity`, `constant:C` or `bump:A` over `base`.
pub fn parse_time_change(spec: &str, base: FlowKind, group: &Arc<FuchsianGroup>) -> Result<TimeChange> {
    match spec.split_once(':') {
        None if spec == "identity" => Ok(TimeChange::identity(base)),
        Some(("constant", c)) => TimeChange::constant(base, parse_real(c)?),
        Some(("bump", a)) => Ok(TimeChange::orbit_bump(base, group.clone(), parse_real(a)?)?.with_step(0.01)),
        _ => Err(Error::Parse(format!(
            "unknown time change `{spec}` (expected identity, constant:C or bump:A)"
        ))),
    }
}

fn effective_config(cli: &Cli) -> Result<Config> {
    let mut cfg = Config::resolve(cli.config.as_deref())?;
    for kv in &cli.set {
        let (k, v) = kv
            .split_once('=')
            .ok_or_else(|| Error::Parse(format!("--set expects KEY=VALUE, got `{kv}`")))?;
        cfg.set(k, v)?;
    }
    Ok(cfg)
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir)?;
    }
    Ok(BufWriter::new(File::create(path)?))
}

fn cmd_dist(cfg: &Config, a: &DistArgs, out: &mut dyn Write) -> Result<i32> {
    let group = cfg.group()?;
    let metric = cfg.metric()?;
    let g = parse_element(&group, &a.g)?;
    let h = parse_element(&group, &a.h)?;
    if a.quotient {
        let q = group.quotient_distance(&metric, &QuotientPoint::new(g), &QuotientPoint::new(h))?;
        writeln!(out, "{}", q.value)?;
        writeln!(out, "witness {}", q.gamma_word)?;
    } else {
        writeln!(out, "{}", metric.distance(&g, &h)?)?;
    }
    Ok(0)
}

fn cmd_sys(cfg: &Config, out: &mut dyn Write) -> Result<i32> {
    let group = cfg.group()?;
    let s = group.systole()?;
    writeln!(out, "group {}", group.name())?;
    writeln!(out, "sigma0 {}", s.injectivity_radius)?;
    writeln!(out, "eps_star {}", s.trace_gap)?;
    writeln!(out, "min_trace {}", s.min_trace)?;
    writeln!(out, "translation_length {}", s.translation_length)?;
    writeln!(out, "witness {}", s.witness_word)?;
    writeln!(out, "certification_radius {}", s.certification_radius)?;
    writeln!(out, "ball_size {}", s.ball_size)?;
    Ok(0)
}

fn reject(which: TestKind, flag: &str, given: bool, allowed: &[TestKind]) -> Result<()> {
    if given && !allowed.contains(&which) {
        let name = which.to_possible_value().map(|v| v.get_name().to_string()).unwrap_or_default();
        return Err(Error::InvalidArgument(format!("--{flag} does not apply to `test {name}`")));
    }
    Ok(())
}

fn cmd_test(cfg: &Config, a: &TestArgs, out: &mut dyn Write) -> Result<i32> {
    use TestKind::*;
    let w = a.which;
    reject(w, "eps", a.eps.is_some(), &[Bw, Kin])?;
    reject(w, "delta", a.delta.is_some(), &[Sep, Kh])?;
    reject(w, "reparams", a.reparams.is_some(), &[Bw])?;
    reject(w, "flow", a.flow.is_some(), &[Sep])?;
    reject(w, "direction", a.direction.is_some(), &[Sep, Kin])?;
    reject(w, "time-change", a.time_change.is_some(), &[Kin])?;
    let group = Arc::new(cfg.group()?);
    let metric = cfg.metric()?;
    let seed = a.seed.unwrap_or(cfg.seed);
    let direction = a.direction.as_deref().map(Direction::parse).transpose()?;
    let verdict = match w {
        Bw => {
            let d = BwOptions::default();
            bw_test_geodesic(
                &group,
                &metric,
                &BwOptions {
                    eps: a.eps.unwrap_or(d.eps),
                    window: a.window.unwrap_or(d.window),
                    pairs: a.pairs.unwrap_or(d.pairs),
                    reparams: a.reparams.unwrap_or(d.reparams),
                    seed,
                    ..d
                },
            )?
        }
        Sep => {
            let d = SeparatingOptions::default();
            separating_test(
                &group,
                &metric,
                &SeparatingOptions {
                    flow: a.flow.as_deref().map(FlowKind::parse).transpose()?.unwrap_or(d.flow),
                    delta: a.delta.unwrap_or(d.delta),
                    direction: direction.unwrap_or(d.direction),
                    window: a.window.unwrap_or(d.window),
                    pairs: a.pairs.unwrap_or(d.pairs),
                    seed,
                    ..d
                },
            )?
        }
        Kin => {
            let d = KinematicOptions::default();
            let tc = parse_time_change(
                a.time_change.as_deref().unwrap_or("identity"),
                FlowKind::StableHorocycle,
                &group,
            )?;
            kinematic_test_time_change(
                &group,
                &metric,
                &tc,
                &KinematicOptions {
                    eps: a.eps.unwrap_or(d.eps),
                    direction: direction.unwrap_or(d.direction),
                    window: a.window.unwrap_or(d.window),
                    pairs: a.pairs.unwrap_or(d.pairs),
                    seed,
                    ..d
                },
            )?
        }
        Kh => {
            let d = KhOptions::default();
            kh_test_horocycle(
                &group,
                &metric,
                &KhOptions {
                    delta: a.delta.unwrap_or(d.delta),
                    window: a.window.unwrap_or(d.window),
                    triples: a.pairs.unwrap_or(d.triples),
                    seed,
                    ..d
                },
            )?
        }
    };
    let name = w.to_possible_value().map(|v| v.get_name().to_string()).unwrap_or_default();
    let path = a.out.clone().unwrap_or_else(|| PathBuf::from(format!("verdict-{name}.json")));
    let mut f = create(&path)?;
    verdict.write_to(&mut f)?;
    f.flush()?;
    writeln!(out, "{}", summary_line(&verdict, &path))?;
    Ok(verdict.outcome.exit_code())
}

/// `<test> <outcome> k=v ... -> <path>`.
pub fn summary_line(v: &TestVerdict, path: &Path) -> String {
    let counts: Vec<String> = v.counts.iter().map(|(k, n)| format!("{k}={n}")).collect();
    format!("{} {} {} -> {}", v.test, v.outcome, counts.join(" "), path.display())
}

fn cmd_cex(cfg: &Config, a: &CexArgs, out: &mut dyn Write) -> Result<i32> {
    let group = cfg.group()?;
    let metric = cfg.metric()?;
    std::fs::create_dir_all(&a.out_dir)?;
    match a.which {
        CexKind::HorocycleBw => {
            if a.direction.is_some() || a.cert_radius.is_some() {
                return Err(Error::InvalidArgument(
                    "--direction and --cert-radius do not apply to `cex horocycle-bw`".into(),
                ));
            }
            let c = match a.a {
                Some(x) => counterexample_horocycle_not_bw_with(&group, &metric, a.delta, x)?,
                None => counterexample_horocycle_not_bw(&group, &metric, a.delta)?,
            };
            let json = a.out_dir.join("horocycle-bw.json");
            let csv = a.out_dir.join("horocycle-bw.csv");
            let mut f = create(&json)?;
            writeln!(f, "{}", serde_json::to_string_pretty(&c)?)?;
            f.flush()?;
            let mut f = create(&csv)?;
            writeln!(f, "t,s,formula_residual,product_residual")?;
            for r in &c.residuals {
                writeln!(f, "{},{},{},{}", r.t, r.s, r.formula_residual, r.product_residual)?;
            }
            f.flush()?;
            let outcome = if c.holds { Outcome::Pass } else { Outcome::Fail };
            writeln!(
                out,
                "horocycle-bw {} max_residual={:e} distance_k={} trace_k={} -> {}, {}",
                if c.holds { "certified" } else { "not-certified" },
                c.max_residual,
                c.distance_k,
                c.trace_k,
                json.display(),
                csv.display()
            )?;
            Ok(outcome.exit_code())
        }
        CexKind::GeodesicSep => {
            if a.a.is_some() {
                return Err(Error::InvalidArgument("--a does not apply to `cex geodesic-sep`".into()));
            }
            let direction = Direction::parse(a.direction.as_deref().unwrap_or("positive"))?;
            let radius = a.cert_radius.unwrap_or(8.0);
            let c = counterexample_geodesic_not_separating(&group, &metric, a.delta, direction, radius)?;
            let stem = format!("geodesic-sep-{direction}");
            let json = a.out_dir.join(format!("{stem}.json"));
            let csv = a.out_dir.join(format!("{stem}.csv"));
            let mut f = create(&json)?;
            writeln!(f, "{}", serde_json::to_string_pretty(&c)?)?;
            f.flush()?;
            let mut f = create(&csv)?;
            writeln!(f, "t,measured,bound,gamma")?;
            for r in &c.decay {
                writeln!(f, "{},{},{},{}", r.t, r.measured, r.bound, r.gamma)?;
            }
            f.flush()?;
            let outcome = if c.certified { Outcome::Pass } else { Outcome::Inconclusive };
            writeln!(
                out,
                "{stem} {} s={} max_excess={:e} radius={} ball_size={} -> {}, {}",
                if c.certified { "certified" } else { "not-certified" },
                c.s,
                c.max_excess,
                c.search.radius,
                c.search.ball_size,
                json.display(),
                csv.display()
            )?;
            Ok(outcome.exit_code())
        }
    }
}

fn cmd_flow(cfg: &Config, a: &FlowArgs, out: &mut dyn Write) -> Result<i32> {
    let group = Arc::new(cfg.group()?);
    let kind = FlowKind::parse(&a.kind)?;
    let x = QuotientPoint::new(parse_element(&group, &a.start)?);
    let traj = match &a.time_change {
        None => sample_trajectory(kind, &x, a.t0, a.t1, a.n)?,
        Some(spec) => {
            if a.t0 != 0.0 {
                return Err(Error::InvalidArgument("time-changed orbits start at t0 = 0".into()));
            }
            sample_time_changed(&parse_time_change(spec, kind, &group)?, &x, a.t1, a.n)?
        }
    };
    if a.out.as_os_str() == "-" {
        traj.write_csv(&mut *out)?;
    } else {
        let mut f = create(&a.out)?;
        traj.write_csv(&mut f)?;
        f.flush()?;
    }
    Ok(0)
}

/// Runs an already parsed command line and returns the exit code.
pub fn execute(cli: &Cli, out: &mut dyn Write) -> Result<i32> {
    let cfg = effective_config(cli)?;
    match &cli.command {
        Command::Dist(a) => cmd_dist(&cfg, a, out),
        Command::Sys => cmd_sys(&cfg, out),
        Command::Test(a) => cmd_test(&cfg, a, out),
        Command::Cex(a) => cmd_cex(&cfg, a, out),
        Command::Flow(a) => cmd_flow(&cfg, a, out),
        Command::Config => {
            write!(out, "{}", cfg.dump())?;
            Ok(0)
        }
    }
}

/// Exit code for an error: budget exhaustion counts as inconclusive.
pub fn error_code(e: &Error) -> i32 {
    match e {
        Error::Budget { .. } => Outcome::Inconclusive.exit_code(),
        _ => EXIT_ERROR,
    }
}

/// Parses `args` (program name first), runs, and reports errors on `err`.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                let _ = write!(err, "{text}");
                EXIT_ERROR
            } else {
                let _ = write!(out, "{text}");
                0
            };
        }
    };
    match execute(&cli, out) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            error_code(&e)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_capture(args: &[&str]) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let code = run(std::iter::once("horolab").chain(args.iter().copied()), &mut out, &mut err);
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    #[test]
    fn element_specs() {
        let g = FuchsianGroup::preset_bolza();
        assert_eq!(parse_element(&g, "e").unwrap(), GroupElement::IDENTITY);
        assert!(parse_element(&g, "a:1*b:-0.5")
            .unwrap()
            .approx_eq(&GroupElement::a(1.0).mul(&GroupElement::b(-0.5)), 1e-15));
        assert!(parse_element(&g, "gen:2^-1").unwrap().approx_eq(&g.generators()[2].inverse(), 1e-12));
        assert!(parse_element(&g, "g1*g1^-1").unwrap().approx_eq(&GroupElement::IDENTITY, 1e-12));
        assert!(parse_element(&g, "2,0,0,0.5").unwrap().approx_eq(&GroupElement::a(4f64.ln()), 1e-15));
        for bad in ["x:1", "a:foo", "gen:9", "1,2,3", "1,0,0,2"] {
            assert!(parse_element(&g, bad).is_err(), "{bad}");
        }
        match parse_element(&g, "a:1*zz") {
            Err(Error::Parse(m)) => assert!(m.contains("zz")),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn dist_and_quotient() {
        let (code, out, _) = run_capture(&["dist", "a:1", "e"]);
        assert_eq!(code, 0);
        let v: f64 = out.trim().parse().unwrap();
        assert!((v - 1.0 / 2f64.sqrt()).abs() < 1e-4);
        let (_, out, _) = run_capture(&["dist", "e", "e"]);
        assert_eq!(out.trim().parse::<f64>().unwrap(), 0.0);
        let (code, out, _) = run_capture(&["dist", "--quotient", "gen:0", "e"]);
        assert_eq!(code, 0);
        let mut lines = out.lines();
        assert!(lines.next().unwrap().parse::<f64>().unwrap().abs() < 1e-9);
        assert_eq!(lines.next().unwrap(), "witness g0⁻¹");
    }

    #[test]
    fn invalid_combinations_and_keys() {
        let (code, _, err) = run_capture(&["test", "sep", "--eps", "0.5"]);
        assert_eq!(code, EXIT_ERROR);
        assert!(err.contains("--eps"));
        let (code, _, _) = run_capture(&["test", "bw", "--delta", "0.1"]);
        assert_eq!(code, EXIT_ERROR);
        let (code, _, err) = run_capture(&["--set", "enum.nope=3", "sys"]);
        assert_eq!(code, EXIT_ERROR);
        assert!(err.contains("enum.nope"));
        let (code, _, _) = run_capture(&["dist", "a:1"]);
        assert_eq!(code, EXIT_ERROR);
    }

    #[test]
    fn budget_is_inconclusive() {
        let (code, _, err) = run_capture(&["--set", "enum.max_ball_size=3", "sys"]);
        assert_eq!(code, 2, "{err}");
    }

    #[test]
    fn config_dump_reloads() {
        let (code, out, _) = run_capture(&["--set", "tol.ode_tol=1e-7", "--set", "seeds.default=9", "config"]);
        assert_eq!(code, 0);
        let c = Config::parse(&out).unwrap();
        assert_eq!(c.ode_tol, 1e-7);
        assert_eq!(c.seed, 9);
    }

    #[test]
    fn flow_csv_rows() {
        let (code, out, _) = run_capture(&["flow", "geodesic", "--t0", "0", "--t1", "1", "-n", "11"]);
        assert_eq!(code, 0);
        let rows: Vec<&str> = out.lines().collect();
        assert_eq!(rows[0], "t,a11,a12,a21,a22");
        assert_eq!(rows.len(), 12);
        for (k, row) in rows[1..].iter().enumerate() {
            let a11: f64 = row.split(',').nth(1).unwrap().parse().unwrap();
            assert!((a11 - (k as f64 * 0.05).exp()).abs() < 1e-12);
        }
        let (_, out, _) = run_capture(&["flow", "stable", "-n", "2"]);
        assert_eq!(out.lines().count(), 3);
        for row in out.lines().skip(1) {
            let v: Vec<f64> = row.split(',').map(|x| x.parse().unwrap()).collect();
            assert_eq!((v[1], v[3]), (1.0, 0.0));
        }
    }
}
