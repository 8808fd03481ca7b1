//! Command implementations behind the `crystalquant` binary.

use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{bail, Context, Result};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crystalquant::energy_model::{c_n, Precision};
use crystalquant::experiments::{run_table1_row, TABLE1};
use crystalquant::geometry::{ConvexPolygon, Point2};
use crystalquant::laguerre::voronoi_diagram;
use crystalquant::lloyd_solver::{multistart, SolveResult, SolverConfig};
use crystalquant::proof_verifier::{run_all, VerificationReport};
use crystalquant::render::{render_diagram, render_stability};
use crystalquant::stability::{analyze, StabilityReport};

pub const SCHEMA_VERSION: u32 = 1;

/// Whether a command met its success condition. Errors are reported
/// separately and map to exit code 1.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    Ok,
    Failed,
}

impl Status {
    pub fn exit_code(self) -> u8 {
        match self {
            Status::Ok => 0,
            Status::Failed => 2,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DomainSpec {
    UnitSquare,
    Polygon { vertices: Vec<Point2> },
}

impl DomainSpec {
    pub fn build(&self) -> Result<ConvexPolygon> {
        Ok(match self {
            DomainSpec::UnitSquare => ConvexPolygon::unit_square(),
            DomainSpec::Polygon { vertices } => ConvexPolygon::new(vertices.clone())?,
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Emit {
    #[serde(default = "yes")]
    pub json: bool,
    #[serde(default = "yes")]
    pub svg: bool,
    #[serde(default)]
    pub csv: bool,
}

fn yes() -> bool {
    true
}

impl Default for Emit {
    fn default() -> Self {
        Emit { json: true, svg: true, csv: false }
    }
}

fn default_domain() -> DomainSpec {
    DomainSpec::UnitSquare
}

fn default_output() -> PathBuf {
    PathBuf::from("out")
}

fn default_schema() -> u32 {
    SCHEMA_VERSION
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    #[serde(default = "default_schema")]
    pub schema_version: u32,
    #[serde(flatten)]
    pub solver: SolverConfig,
    #[serde(default = "default_domain")]
    pub domain: DomainSpec,
    #[serde(default = "default_output")]
    pub output_dir: PathBuf,
    #[serde(default)]
    pub emit: Emit,
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<Self> {
        let cfg: RunConfig = serde_json::from_str(text).context("invalid run configuration")?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
        Self::parse(&text).with_context(|| format!("in {}", path.display()))
    }

    pub fn validate(&self) -> Result<()> {
        if self.schema_version != SCHEMA_VERSION {
            bail!("unsupported schema_version {}", self.schema_version);
        }
        self.solver.validate()?;
        self.domain.build()?;
        Ok(())
    }
}

/// Everything `solve` writes to `result.json`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SolveOutput {
    pub schema_version: u32,
    pub config: RunConfig,
    pub result: SolveResult,
    pub runtime_ms: u64,
}

impl SolveOutput {
    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
        let out: SolveOutput =
            serde_json::from_str(&text).with_context(|| format!("{} is not a solve result", path.display()))?;
        if out.schema_version != SCHEMA_VERSION {
            bail!("unsupported schema_version {}", out.schema_version);
        }
        Ok(out)
    }
}

fn write(path: &Path, contents: &str) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).with_context(|| format!("cannot create {}", dir.display()))?;
    }
    fs::write(path, contents).with_context(|| format!("cannot write {}", path.display()))
}

fn sibling(path: &Path, name: &str) -> PathBuf {
    path.parent().map(|d| d.join(name)).unwrap_or_else(|| PathBuf::from(name))
}

/// Runs the configured solve and writes `result.json`, `diagram.svg` and
/// `trace.csv` as requested. Fails (exit 2) when the best run did not
/// converge.
pub fn cmd_solve(config_path: &Path, out_override: Option<&Path>) -> Result<(Status, SolveOutput)> {
    let mut config = RunConfig::load(config_path)?;
    if let Some(dir) = out_override {
        config.output_dir = dir.to_path_buf();
    }
    let domain = config.domain.build()?;
    let clock = Instant::now();
    let result = multistart(&config.solver, &domain)?;
    let runtime_ms = clock.elapsed().as_millis() as u64;
    let dir = config.output_dir.clone();
    let out = SolveOutput { schema_version: SCHEMA_VERSION, config, result, runtime_ms };
    if out.config.emit.json {
        write(&dir.join("result.json"), &serde_json::to_string_pretty(&out)?)?;
    }
    if out.config.emit.svg {
        let r = &out.result;
        write(&dir.join("diagram.svg"), &render_diagram(&r.diagram, &r.final_config.positions()))?;
    }
    if out.config.emit.csv {
        let mut csv = String::from("step,energy\n");
        for (k, e) in out.result.trace.iter().enumerate() {
            csv.push_str(&format!("{k},{e:e}\n"));
        }
        write(&dir.join("trace.csv"), &csv)?;
    }
    let status = if out.result.converged { Status::Ok } else { Status::Failed };
    Ok((status, out))
}

pub const TABLE1_HEADER: &str = "alpha,delta,computed_ratio,paper_ratio,n_final,runtime_ms";

pub fn cmd_table1(out_dir: Option<&Path>, starts: usize, seed: u64) -> Result<(Status, String)> {
    if starts == 0 {
        bail!("at least one start is required");
    }
    let mut csv = format!("{TABLE1_HEADER}\n");
    for &(alpha, delta, paper) in &TABLE1 {
        let (row, _) = run_table1_row(alpha, delta, Some(paper), starts, seed)?;
        csv.push_str(&format!(
            "{},{:e},{:.12},{},{},{}\n",
            row.alpha,
            row.delta,
            row.computed_ratio,
            row.paper_ratio.map(|r| format!("{r:.15}")).unwrap_or_default(),
            row.n_final,
            row.runtime_ms
        ));
    }
    if let Some(dir) = out_dir {
        write(&dir.join("table1.csv"), &csv)?;
    }
    Ok((Status::Ok, csv))
}

pub fn cmd_verify(compensated: bool, out: Option<&Path>) -> Result<(Status, VerificationReport)> {
    let mode = if compensated { Precision::Compensated } else { Precision::Double };
    let report = run_all(mode);
    if let Some(path) = out {
        write(path, &serde_json::to_string_pretty(&report)?)?;
    }
    let status = if report.all_pass { Status::Ok } else { Status::Failed };
    Ok((status, report))
}

/// Stability report of a stored solve, written next to it as
/// `stability.json` and `stability.svg`.
pub fn cmd_stability(result_path: &Path, epsilon: f64) -> Result<(Status, StabilityReport)> {
    let out = SolveOutput::load(result_path)?;
    let cfg = &out.result.final_config;
    let points = cfg.positions();
    let report = analyze(&points, &cfg.domain, out.result.volume, epsilon)?;
    let diagram = voronoi_diagram(&cfg.domain, &points)?;
    write(&sibling(result_path, "stability.json"), &serde_json::to_string_pretty(&report)?)?;
    write(&sibling(result_path, "stability.svg"), &render_stability(&diagram, &points, &report))?;
    Ok((Status::Ok, report))
}

pub fn cmd_render(result_path: &Path, out: Option<&Path>) -> Result<PathBuf> {
    let stored = SolveOutput::load(result_path)?;
    let r = &stored.result;
    let target = out.map(Path::to_path_buf).unwrap_or_else(|| sibling(result_path, "diagram.svg"));
    write(&target, &render_diagram(&r.diagram, &r.final_config.positions()))?;
    Ok(target)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MomentTestSummary {
    pub samples: usize,
    pub violations: usize,
    pub min_slack: f64,
    /// Largest `|∫|x − ξ|² − c_n|P|²|` over regular n-gons about their centres.
    pub regular_deviation: f64,
}

pub const MOMENT_SLACK: f64 = 1e-10;

/// Convex polygon with `n` vertices on a random ellipse.
pub fn random_convex_polygon(rng: &mut impl Rng, n: usize) -> ConvexPolygon {
    loop {
        let mut angles: Vec<f64> = (0..n).map(|_| rng.gen_range(0.0..std::f64::consts::TAU)).collect();
        angles.sort_by(f64::total_cmp);
        let (a, b) = (rng.gen_range(0.2..2.0), rng.gen_range(0.2..2.0));
        let rot = rng.gen_range(0.0..std::f64::consts::PI);
        let (s, c) = rot.sin_cos();
        let pts = angles
            .iter()
            .map(|t| {
                let (x, y) = (a * t.cos(), b * t.sin());
                Point2::new(x * c - y * s, x * s + y * c)
            })
            .collect();
        if let Ok(p) = ConvexPolygon::new(pts) {
            if p.edge_count() == n && p.area() > 1e-3 {
                return p;
            }
        }
    }
}

/// `∫_P |x − ξ|² ≥ c_n |P|²` on random convex n-gons, `n ∈ 3..=9`, about
/// random points; fails if any sample violates it by more than
/// [`MOMENT_SLACK`].
pub fn cmd_moment_test(samples: usize, seed: u64) -> Result<(Status, MomentTestSummary)> {
    if samples == 0 {
        bail!("samples must be at least 1");
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut violations = 0;
    let mut min_slack = f64::INFINITY;
    for _ in 0..samples {
        let n = rng.gen_range(3..=9);
        let poly = random_convex_polygon(&mut rng, n);
        let (lo, hi) = poly.bounding_box().expect("nonempty");
        let p = Point2::new(rng.gen_range(lo.x - 1.0..hi.x + 1.0), rng.gen_range(lo.y - 1.0..hi.y + 1.0));
        let slack = poly.second_moment_about(p) - c_n(n as f64)? * poly.area().powi(2);
        min_slack = min_slack.min(slack);
        violations += usize::from(slack < -MOMENT_SLACK);
    }
    let mut regular_deviation: f64 = 0.0;
    for n in 3..=9 {
        let poly = ConvexPolygon::regular(n, 1.0, Point2::ORIGIN)?;
        regular_deviation = regular_deviation.max((poly.second_moment_about(Point2::ORIGIN) - c_n(n as f64)?).abs());
    }
    let status = if violations == 0 && regular_deviation <= MOMENT_SLACK { Status::Ok } else { Status::Failed };
    Ok((status, MomentTestSummary { samples, violations, min_slack, regular_deviation }))
}
