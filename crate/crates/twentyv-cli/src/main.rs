//! `twentyv` command-line front end.

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::{SystemTime, UNIX_EPOCH};
use twentyv::arctic::{self, Polyline, SampleOptions, Viewport};
use twentyv::enumerate::{self, RefinedPartition};
use twentyv::lattice::{Boundary, Configuration};
use twentyv::mcmc::{self, Acceptance, DensityField, QthadtChain, TwentyVChain};
use twentyv::qthadt;
use twentyv::validation::{self, Level};
use twentyv::weights::{self, parse_angle, AngleParams};

#[derive(Parser)]
#[command(name = "twentyv", version, about = "Integrable twenty-vertex model with domain-wall boundaries")]
struct Cli {
    /// Write a key/value run manifest here (defaults to `<first output>.manifest`).
    #[arg(long, global = true)]
    manifest: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Seven vertex weights, Kagome triples and Yang-Baxter residuals.
    Weights(AngleArgs),
    /// Exact refined partition functions and identity residuals.
    Enumerate(EnumerateArgs),
    /// Arctic curve polylines as CSV and SVG.
    Curve(CurveArgs),
    /// Markov-chain sampling of density fields.
    Sample(SampleArgs),
    /// QTHADT partition function from the Schröder determinant.
    Qthadt(QthadtArgs),
    /// Runs the acceptance checks and prints a pass/fail table.
    Validate(ValidateArgs),
}

/// Angles in radians or as `a*pi/b`.
#[derive(Args, Clone)]
struct AngleArgs {
    #[arg(long, default_value = "pi/8", value_parser = angle)]
    eta: f64,
    #[arg(long, default_value = "5*pi/8", value_parser = angle)]
    lambda: f64,
    /// Defaults to 0; ignored with --special-line.
    #[arg(long, value_parser = angle, allow_hyphen_values = true)]
    mu: Option<f64>,
    /// Sets mu = lambda - 5 eta.
    #[arg(long)]
    special_line: bool,
}

impl AngleArgs {
    fn params(&self) -> Result<AngleParams> {
        let mu = if self.special_line { self.lambda - 5.0 * self.eta } else { self.mu.unwrap_or(0.0) };
        Ok(AngleParams::new(self.eta, self.lambda, mu)?)
    }
}

fn angle(s: &str) -> std::result::Result<f64, String> {
    parse_angle(s).map_err(|e| e.to_string())
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Kv,
    Rows,
}

#[derive(Args)]
struct EnumerateArgs {
    #[arg(long)]
    n: usize,
    #[arg(long, default_value = "DWBC2", value_parser = boundary)]
    bc: Boundary,
    #[command(flatten)]
    angles: AngleArgs,
    /// Spectral samples for the refined identities.
    #[arg(long, value_delimiter = ',', default_values_t = vec![0.5, 2.0, 3.0])]
    sigma: Vec<f64>,
    #[arg(long, value_enum, default_value = "kv")]
    format: Format,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn boundary(s: &str) -> std::result::Result<Boundary, String> {
    s.parse().map_err(|e: twentyv::Error| e.to_string())
}

#[derive(Clone, Copy, PartialEq, ValueEnum)]
enum CurveModel {
    #[value(name = "20v")]
    TwentyV,
    #[value(name = "6v")]
    SixV,
    Qthadt,
}

#[derive(Args)]
struct CurveArgs {
    #[arg(long, value_enum, default_value = "20v")]
    model: CurveModel,
    #[command(flatten)]
    angles: AngleArgs,
    /// Points per branch before adaptive refinement.
    #[arg(long, default_value_t = 200)]
    points: usize,
    /// Maximal segment length after refinement.
    #[arg(long, default_value_t = 5e-3)]
    max_segment: f64,
    /// Omit the analytic continuation pieces of the QTHADT curve.
    #[arg(long)]
    no_continuation: bool,
    #[arg(long)]
    csv: Option<PathBuf>,
    #[arg(long)]
    svg: Option<PathBuf>,
}

#[derive(Clone, Copy, PartialEq, ValueEnum)]
enum SampleModel {
    #[value(name = "20v")]
    TwentyV,
    Qthadt,
}

#[derive(Clone, Copy, ValueEnum)]
enum AcceptanceArg {
    Lyberg,
    Metropolis,
}

impl From<AcceptanceArg> for Acceptance {
    fn from(a: AcceptanceArg) -> Self {
        match a {
            AcceptanceArg::Lyberg => Acceptance::Lyberg,
            AcceptanceArg::Metropolis => Acceptance::Metropolis,
        }
    }
}

#[derive(Args)]
struct SampleArgs {
    #[arg(long, value_enum, default_value = "20v")]
    model: SampleModel,
    #[arg(long)]
    n: usize,
    #[command(flatten)]
    angles: AngleArgs,
    /// QTHADT diagonal weight.
    #[arg(long, default_value_t = 1.0)]
    gamma: f64,
    /// Anneal gamma linearly from this value to --gamma during burn-in.
    #[arg(long)]
    anneal_from: Option<f64>,
    #[arg(long, value_enum, default_value = "lyberg")]
    acceptance: AcceptanceArg,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Independent chains, seeded `seed, seed+1, ...`; fields are merged.
    #[arg(long, default_value_t = 1)]
    chains: u64,
    /// Proposals before the first record (default 40·n⁴).
    #[arg(long)]
    burn_in: Option<u64>,
    /// Proposals between records (default 10·n²).
    #[arg(long)]
    record_interval: Option<u64>,
    /// Proposals after burn-in per chain (default 1000 record intervals).
    #[arg(long)]
    steps: Option<u64>,
    /// Start from a configuration dump instead of the diagonal state.
    #[arg(long)]
    init: Option<PathBuf>,
    #[arg(long)]
    density: Option<PathBuf>,
    /// Final configuration of the first chain.
    #[arg(long)]
    dump: Option<PathBuf>,
    #[arg(long)]
    svg: Option<PathBuf>,
}

#[derive(Args)]
struct QthadtArgs {
    #[arg(long)]
    n: usize,
    /// Decimal or fraction `a/b`; exact arithmetic when n is small.
    #[arg(long, default_value = "1")]
    gamma: String,
    #[arg(long, default_value = "1", conflicts_with = "sigma")]
    tau: String,
    /// Six-vertex spectral parameter; prints both sides of the determinant identity.
    #[arg(long)]
    sigma: Option<f64>,
    /// Also print the coefficients of det A(τ) in τ.
    #[arg(long)]
    polynomial: bool,
}

#[derive(Args)]
struct ValidateArgs {
    #[arg(long, default_value = "quick")]
    level: Level,
    #[arg(long, default_value_t = 2024)]
    seed: u64,
}

/// Key/value record of one invocation.
struct Manifest {
    command: String,
    entries: Vec<(String, String)>,
    outputs: Vec<PathBuf>,
}

impl Manifest {
    fn new(command: &str) -> Self {
        Manifest { command: command.to_string(), entries: Vec::new(), outputs: Vec::new() }
    }

    fn param(&mut self, key: &str, value: impl ToString) {
        self.entries.push((key.to_string(), value.to_string()));
    }

    fn write(&mut self, path: &Path, contents: &str) -> Result<()> {
        std::fs::write(path, contents).with_context(|| format!("writing {}", path.display()))?;
        self.outputs.push(path.to_path_buf());
        Ok(())
    }

    fn render(&self, argv: &[String]) -> String {
        let stamp = SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0);
        let mut s = String::new();
        let _ = writeln!(s, "command: {}", self.command);
        let _ = writeln!(s, "argv: {}", argv.join(" "));
        let _ = writeln!(s, "version: {}", env!("CARGO_PKG_VERSION"));
        let _ = writeln!(s, "timestamp_unix: {stamp}");
        for (k, v) in &self.entries {
            let _ = writeln!(s, "param.{k}: {v}");
        }
        for (i, o) in self.outputs.iter().enumerate() {
            let _ = writeln!(s, "output.{i}: {}", o.display());
        }
        s
    }
}

fn main() -> ExitCode {
    let argv: Vec<String> = std::env::args().collect();
    let cli = Cli::parse();
    match run(cli, &argv) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}

fn run(cli: Cli, argv: &[String]) -> Result<ExitCode> {
    let (mut manifest, code) = match cli.command {
        Command::Weights(a) => (cmd_weights(&a)?, ExitCode::SUCCESS),
        Command::Enumerate(a) => (cmd_enumerate(&a)?, ExitCode::SUCCESS),
        Command::Curve(a) => (cmd_curve(&a)?, ExitCode::SUCCESS),
        Command::Sample(a) => (cmd_sample(&a)?, ExitCode::SUCCESS),
        Command::Qthadt(a) => (cmd_qthadt(&a)?, ExitCode::SUCCESS),
        Command::Validate(a) => cmd_validate(&a),
    };
    let target = cli.manifest.or_else(|| {
        manifest.outputs.first().map(|p| {
            let mut s = p.clone().into_os_string();
            s.push(".manifest");
            PathBuf::from(s)
        })
    });
    if let Some(path) = target {
        let text = manifest.render(argv);
        std::fs::write(&path, text).with_context(|| format!("writing {}", path.display()))?;
        manifest.outputs.push(path);
    }
    Ok(code)
}

fn record_angles(m: &mut Manifest, p: &AngleParams) {
    m.param("eta", p.eta());
    m.param("lambda", p.lambda());
    m.param("mu", p.mu());
}

fn cmd_weights(a: &AngleArgs) -> Result<Manifest> {
    let p = a.params()?;
    let mut m = Manifest::new("weights");
    record_angles(&mut m, &p);
    let w = weights::compute_weights(&p);
    let t = weights::kagome_triple(&p);
    let from_kagome = weights::omega_from_kagome(&t);
    let yb = weights::yang_baxter_residuals(&t);
    println!("eta: {}\nlambda: {}\nmu: {}", p.eta(), p.lambda(), p.mu());
    for (k, o) in w.omega.iter().enumerate() {
        println!("omega{k}: {o:.17e}");
    }
    for s in 0..3 {
        println!("kagome{}: a={:.17e} b={:.17e} c={:.17e}", s + 1, t.a[s], t.b[s], t.c[s]);
    }
    for (k, r) in yb.iter().enumerate() {
        println!("yang_baxter{}: {r:.3e}", k + 1);
    }
    let rel = w.omega.iter().zip(&from_kagome.omega).map(|(x, y)| ((x - y) / x).abs()).fold(0.0, f64::max);
    println!("kagome_product_rel_err: {rel:.3e}");
    Ok(m)
}

fn cmd_enumerate(a: &EnumerateArgs) -> Result<Manifest> {
    let p = a.angles.params()?;
    let mut m = Manifest::new("enumerate");
    m.param("n", a.n);
    m.param("bc", a.bc);
    record_angles(&mut m, &p);
    let r = if a.bc == Boundary::SixVertex {
        let t = weights::kagome_triple(&p);
        enumerate::enumerate_6v(a.n, t.a[0], t.b[0], t.c[0], [1.0; 3])?
    } else {
        enumerate::enumerate_20v(a.n, a.bc, &weights::vertex_weight_map(&weights::compute_weights(&p)))?
    };
    let mut checks: Vec<(&str, f64)> = vec![("sum_rule_defect", r.sum_rule_defect())];
    if a.bc == Boundary::Dwbc2 && a.n <= enumerate::CAP_20V {
        checks.push(("total_identity_rel_err", enumerate::verify_total_identity(a.n, &p)?));
        let c = enumerate::verify_refined_identity(a.n, &p, &a.sigma)?;
        checks.push(("refined_identity_rel_err", c.max_error));
        checks.push(("refined_identity_skipped", c.skipped.len() as f64));
    }
    let text = match a.format {
        Format::Kv => refined_kv(a.n, a.bc, &r, &checks),
        Format::Rows => refined_rows(&r, &checks),
    };
    match &a.out {
        Some(path) => m.write(path, &text)?,
        None => print!("{text}"),
    }
    Ok(m)
}

fn join(v: &[f64]) -> String {
    v.iter().map(|x| format!("{x:.17e}")).collect::<Vec<_>>().join(" ")
}

fn refined_kv(n: usize, bc: Boundary, r: &RefinedPartition, checks: &[(&str, f64)]) -> String {
    let mut s = format!("n: {n}\nbc: {bc}\ntotal: {:.17e}\n", r.total);
    for (k, v) in [("hit_h", &r.hit_h), ("hit_d", &r.hit_d), ("top_v", &r.top_v), ("top_d", &r.top_d)] {
        let _ = writeln!(s, "{k}: {}", join(v));
    }
    for (k, v) in checks {
        let _ = writeln!(s, "{k}: {v:.3e}");
    }
    s
}

fn refined_rows(r: &RefinedPartition, checks: &[(&str, f64)]) -> String {
    let mut s = String::from("kind,L,value\n");
    let _ = writeln!(s, "total,0,{:.17e}", r.total);
    for (k, v) in [("hit_h", &r.hit_h), ("hit_d", &r.hit_d), ("top_v", &r.top_v), ("top_d", &r.top_d)] {
        for (i, x) in v.iter().enumerate() {
            let _ = writeln!(s, "{k},{},{x:.17e}", i + 1);
        }
    }
    for (k, v) in checks {
        let _ = writeln!(s, "{k},0,{v:.17e}");
    }
    s
}

fn curve_branches(a: &CurveArgs) -> Result<(Vec<arctic::ParametricBranch>, Viewport, Vec<(String, String)>)> {
    let eta = a.angles.eta;
    let mut meta = vec![("eta".to_string(), eta.to_string())];
    Ok(match a.model {
        CurveModel::TwentyV => {
            let p = a.angles.params()?;
            meta.push(("lambda".into(), p.lambda().to_string()));
            meta.push(("mu".into(), p.mu().to_string()));
            (arctic::full_curve_20v(&p), Viewport::unit_square(600.0), meta)
        }
        CurveModel::SixV => {
            meta.push(("lambda".into(), a.angles.lambda.to_string()));
            (arctic::curve_6v(eta, a.angles.lambda)?, Viewport::unit_square(600.0), meta)
        }
        CurveModel::Qthadt => {
            meta.push(("gamma".into(), qthadt::gamma_of_eta(eta).to_string()));
            let mut b = arctic::curve_qthadt(eta)?;
            if a.no_continuation {
                b.retain(|x| !x.continuation);
            }
            let view = Viewport { width: 600.0, height: 600.0, xmin: -1.0, xmax: 1.0, ymin: -1.0, ymax: 1.0 };
            (b, view, meta)
        }
    })
}

fn cmd_curve(a: &CurveArgs) -> Result<Manifest> {
    let (branches, view, mut meta) = curve_branches(a)?;
    let model = match a.model {
        CurveModel::TwentyV => "20v",
        CurveModel::SixV => "6v",
        CurveModel::Qthadt => "qthadt",
    };
    meta.insert(0, ("model".into(), model.into()));
    let mut m = Manifest::new("curve");
    for (k, v) in &meta {
        m.param(k, v);
    }
    m.param("points", a.points);
    m.param("max_segment", a.max_segment);
    let opts = SampleOptions::adaptive(a.points, a.max_segment);
    let lines = branches.iter().map(|b| arctic::sample(b, &opts)).collect::<twentyv::Result<Vec<Polyline>>>()?;
    for l in &lines {
        let flag = if l.complete { "" } else { " (incomplete)" };
        println!("{}: {} points{flag}", l.branch_id, l.points.len());
    }
    let csv = arctic::polylines_to_csv(&lines);
    match &a.csv {
        Some(p) => m.write(p, &csv)?,
        None if a.svg.is_none() => print!("{csv}"),
        None => {}
    }
    if let Some(p) = &a.svg {
        m.write(p, &arctic::polylines_to_svg(&lines, &view, &meta))?;
    }
    Ok(m)
}

/// `(first record, interval, records)` after defaults.
fn schedule(a: &SampleArgs) -> (u64, u64, u64) {
    let n = a.n as u64;
    let burn = a.burn_in.unwrap_or(40 * n.pow(4));
    let interval = a.record_interval.unwrap_or(mcmc::default_record_interval(a.n)).max(1);
    let steps = a.steps.unwrap_or(1000 * interval);
    (burn, interval, steps / interval)
}

struct ChainOutput {
    field: DensityField,
    steps: u64,
    accepted: u64,
    last: String,
}

fn run_twentyv(a: &SampleArgs, p: &AngleParams, init: Option<&Configuration>, seed: u64) -> Result<ChainOutput> {
    let (burn, interval, records) = schedule(a);
    let mut chain = match init {
        Some(c) => TwentyVChain::from_config(c.clone(), p, a.acceptance.into(), seed)?,
        None => TwentyVChain::new(a.n, p, a.acceptance.into(), seed)?,
    };
    chain.run(burn);
    let mut field = DensityField::new(a.n);
    for _ in 0..records {
        chain.run(interval);
        field.record(chain.config());
    }
    Ok(ChainOutput { field, steps: chain.steps(), accepted: chain.accepted(), last: chain.config().to_text() })
}

fn run_qthadt(a: &SampleArgs, seed: u64) -> Result<ChainOutput> {
    let (burn, interval, records) = schedule(a);
    let start = a.anneal_from.unwrap_or(a.gamma);
    let mut chain = QthadtChain::new(a.n, start, seed)?;
    // linear schedule in 100 stages
    let stages = 100u64.min(burn.max(1));
    for k in 1..=stages {
        chain.run(burn / stages);
        let t = k as f64 / stages as f64;
        chain.set_gamma(start + (a.gamma - start) * t)?;
    }
    chain.run(burn % stages);
    let mut field = DensityField::new(a.n + 1);
    for _ in 0..records {
        chain.run(interval);
        field.record_with(|x, y| chain.diagonal_at(x, y));
    }
    let last = format!("{:?}\n", chain.family());
    Ok(ChainOutput { field, steps: chain.steps(), accepted: chain.accepted(), last })
}

fn cmd_sample(a: &SampleArgs) -> Result<Manifest> {
    if a.chains == 0 {
        bail!("--chains must be positive");
    }
    let mut m = Manifest::new("sample");
    let (burn, interval, records) = schedule(a);
    m.param("n", a.n);
    m.param("seed", a.seed);
    m.param("chains", a.chains);
    m.param("burn_in", burn);
    m.param("record_interval", interval);
    m.param("records_per_chain", records);
    let params = a.angles.params()?;
    let init = match &a.init {
        Some(p) => Some(Configuration::from_text(&std::fs::read_to_string(p)?)?),
        None => None,
    };
    if let Some(c) = &init {
        if c.n() != a.n {
            bail!("--init holds n={}, expected {}", c.n(), a.n);
        }
    }
    match a.model {
        SampleModel::TwentyV => {
            m.param("model", "20v");
            record_angles(&mut m, &params);
            m.param("acceptance", format!("{:?}", Acceptance::from(a.acceptance)).to_lowercase());
        }
        SampleModel::Qthadt => {
            m.param("model", "qthadt");
            m.param("gamma", a.gamma);
            if let Some(g) = a.anneal_from {
                m.param("anneal_from", g);
            }
        }
    }
    let outputs: Vec<Result<ChainOutput>> = std::thread::scope(|s| {
        let handles: Vec<_> = (0..a.chains)
            .map(|i| {
                let seed = a.seed.wrapping_add(i);
                let init = init.as_ref();
                s.spawn(move || match a.model {
                    SampleModel::TwentyV => run_twentyv(a, &params, init, seed),
                    SampleModel::Qthadt => run_qthadt(a, seed),
                })
            })
            .collect();
        handles.into_iter().map(|h| h.join().expect("chain thread panicked")).collect()
    });
    let outputs = outputs.into_iter().collect::<Result<Vec<_>>>()?;
    let mut field = outputs[0].field.clone();
    for o in &outputs[1..] {
        field.merge(&o.field);
    }
    let steps: u64 = outputs.iter().map(|o| o.steps).sum();
    let accepted: u64 = outputs.iter().map(|o| o.accepted).sum();
    println!("steps: {steps}\naccepted: {accepted}\nrecords: {}", field.samples);
    println!("acceptance_rate: {:.6}", accepted as f64 / steps.max(1) as f64);
    if let Some(p) = &a.density {
        m.write(p, &field.to_csv())?;
    }
    if let Some(p) = &a.dump {
        m.write(p, &outputs[0].last)?;
    }
    if let Some(p) = &a.svg {
        let view = Viewport::unit_square(600.0);
        let mut meta: Vec<(String, String)> = m.entries.clone();
        let lines = match a.model {
            SampleModel::TwentyV => arctic::full_curve_20v(&params),
            SampleModel::Qthadt => {
                let eta = gamma_to_eta(a.gamma);
                meta.push(("eta".into(), eta.to_string()));
                arctic::curve_qthadt(eta)?
                    .into_iter()
                    .filter(|b| b.symmetry == arctic::Symmetry::QuarterTurn(0))
                    .collect()
            }
        };
        let opts = SampleOptions::adaptive(200, 5e-3);
        let lines = lines.iter().map(|b| arctic::sample(b, &opts)).collect::<twentyv::Result<Vec<_>>>()?;
        m.write(p, &arctic::svg_with_underlay(&lines, &view, &meta, &field.svg_cells(&view)))?;
    }
    Ok(m)
}

/// Inverse of `γ(η) = 1 + 2cos 4η` on `0 < η < π/4`.
fn gamma_to_eta(gamma: f64) -> f64 {
    ((gamma - 1.0) / 2.0).clamp(-1.0, 1.0).acos() / 4.0
}

fn cmd_qthadt(a: &QthadtArgs) -> Result<Manifest> {
    let mut m = Manifest::new("qthadt");
    m.param("n", a.n);
    m.param("gamma", &a.gamma);
    let gamma = qthadt::parse_rational(&a.gamma)?;
    let gamma_f = ratio_to_f64(&a.gamma)?;
    if let Some(sigma) = a.sigma {
        m.param("sigma", sigma);
        let tau = 1.0 + (1.0 + gamma_f) * (sigma - 1.0);
        let det_a = qthadt::partition(a.n, gamma_f, tau)?;
        let b = (1.0 + gamma_f).sqrt();
        let det_b = qthadt::sixv_matrix(a.n, 1.0, b, 1.0, sigma)?.determinant();
        println!("tau: {tau}\ndet_a: {det_a:.17e}\ndet_b: {det_b:.17e}\nabs_diff: {:.3e}", (det_a - det_b).abs());
    } else {
        m.param("tau", &a.tau);
        let tau = qthadt::parse_rational(&a.tau)?;
        if a.n <= qthadt::EXACT_CAP {
            println!("{}", qthadt::partition_exact(a.n, &gamma, &tau)?);
        } else {
            let (sign, log) = qthadt::log_partition(a.n, gamma_f, ratio_to_f64(&a.tau)?)?;
            println!("sign: {sign}\nlog: {log:.17e}");
        }
    }
    if a.polynomial {
        for (l, c) in qthadt::tau_polynomial(a.n, &gamma)?.iter().enumerate() {
            println!("tau^{l}: {c}");
        }
    }
    Ok(m)
}

fn ratio_to_f64(s: &str) -> Result<f64> {
    if let Some((a, b)) = s.split_once('/') {
        return Ok(a.trim().parse::<f64>()? / b.trim().parse::<f64>()?);
    }
    Ok(s.trim().parse()?)
}

fn cmd_validate(a: &ValidateArgs) -> (Manifest, ExitCode) {
    let mut m = Manifest::new("validate");
    m.param("seed", a.seed);
    m.param("level", format!("{:?}", a.level).to_lowercase());
    let reports = validation::run_all(a.level, a.seed);
    let mut ok = true;
    for r in &reports {
        println!("{r}");
        ok &= r.passed;
    }
    let passed = reports.iter().filter(|r| r.passed).count();
    println!("{passed}/{} criteria passed", reports.len());
    (m, if ok { ExitCode::SUCCESS } else { ExitCode::from(1) })
}
