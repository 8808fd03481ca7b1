//! Generalized Lloyd iteration for the rescaled penalized energy.
//!
//! One step maps a configuration `(zᵢ, mᵢ)` to the centroids and areas of the
//! Laguerre cells generated with weights `wᵢ = −α c₆/(1−α) mᵢ^{α−1}`. Fixed
//! points are centroidal Laguerre tessellations satisfying both first-order
//! conditions. Steps that raise the energy are damped toward the previous
//! state; a run stops when no damping factor down to `1e-3` helps.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::energy_model::{hexagon_reference_distances, Alpha};
use crate::error::{Error, Result};
use crate::geometry::{ConvexPolygon, Point2};
use crate::laguerre::LaguerreDiagram;
use crate::quantization::{
    config_energy, merge_delta, rescale_volume, Configuration, EnergyBreakdown, Frame, Particle,
};

/// Environment variable capping worker threads for multistart runs.
pub const THREADS_ENV: &str = "CRYSTALQUANT_THREADS";

const ACCEPT_REL: f64 = 1e-12;
const MIN_DAMPING: f64 = 1e-3;
const SPLIT_RELAX_STEPS: usize = 5;
const MAX_ADAPTATIONS: usize = 64;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Init {
    RandomUniform { n: usize },
    LatticePerturbed { sigma: f64 },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    pub alpha: Alpha,
    pub delta: f64,
    pub init: Init,
    #[serde(default = "default_max_iters")]
    pub max_iters: usize,
    /// Position residual in rescaled units; defaults to `1e-8·√|Ω|`.
    #[serde(default)]
    pub tol_pos: Option<f64>,
    /// Mass residual; defaults to `1e-8·|Ω|/N`.
    #[serde(default)]
    pub tol_mass: Option<f64>,
    #[serde(default = "default_multistart")]
    pub multistart: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_adapt")]
    pub adapt: bool,
}

fn default_max_iters() -> usize {
    5000
}

fn default_multistart() -> usize {
    1
}

fn default_adapt() -> bool {
    true
}

impl SolverConfig {
    pub fn new(alpha: Alpha, delta: f64, init: Init) -> Self {
        Self {
            alpha,
            delta,
            init,
            max_iters: default_max_iters(),
            tol_pos: None,
            tol_mass: None,
            multistart: default_multistart(),
            seed: 0,
            adapt: default_adapt(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        Frame::physical(self.alpha, self.delta)?;
        if self.max_iters == 0 {
            return Err(Error::Domain("max_iters must be at least 1".into()));
        }
        if self.multistart == 0 {
            return Err(Error::Domain("multistart must be at least 1".into()));
        }
        for t in [self.tol_pos, self.tol_mass].into_iter().flatten() {
            if !(t > 0.0) {
                return Err(Error::Domain(format!("tolerances must be positive, got {t}")));
            }
        }
        match self.init {
            Init::RandomUniform { n: 0 } => Err(Error::EmptyInput),
            Init::LatticePerturbed { sigma } if !(sigma >= 0.0) => {
                Err(Error::Domain(format!("sigma must be >= 0, got {sigma}")))
            }
            _ => Ok(()),
        }
    }

    pub fn volume(&self) -> f64 {
        rescale_volume(self.alpha, self.delta)
    }

    fn tolerances(&self, domain_area: f64, n: usize) -> (f64, f64) {
        (
            self.tol_pos.unwrap_or(1e-8 * domain_area.sqrt()),
            self.tol_mass.unwrap_or(1e-8 * domain_area / n as f64),
        )
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SolveResult {
    pub final_config: Configuration,
    pub diagram: LaguerreDiagram,
    pub energy: EnergyBreakdown,
    /// Total energy of every accepted state, in order.
    pub trace: Vec<f64>,
    pub iterations: usize,
    pub converged: bool,
    pub removed_particles: usize,
    pub adaptation_events: usize,
    /// Seed of the run that produced this result.
    pub seed: u64,
    /// `V_{δ,α}`, the dilation applied to the physical domain's area.
    pub volume: f64,
    /// Final totals of every multistart run, by run index.
    #[serde(default)]
    pub run_totals: Vec<f64>,
}

impl SolveResult {
    pub fn n_final(&self) -> usize {
        self.final_config.len()
    }

    /// Energy of the physical (unit-mass) problem, `F / V²`.
    pub fn physical_total(&self) -> f64 {
        self.energy.total / (self.volume * self.volume)
    }

    pub fn trace_is_monotone(&self) -> bool {
        self.trace.windows(2).all(|w| w[1] <= w[0] + ACCEPT_REL * w[0].abs())
    }
}

/// Rescaled domain `V^{1/2} Ω` for a physical domain.
pub fn rescaled_domain(cfg: &SolverConfig, domain: &ConvexPolygon) -> ConvexPolygon {
    domain.scale(cfg.volume().sqrt())
}

fn rng_for(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Initial configuration in the rescaled frame for the run seeded by
/// `cfg.seed`.
pub fn init_configuration(cfg: &SolverConfig, domain: &ConvexPolygon) -> Result<Configuration> {
    init_with_seed(cfg, domain, cfg.seed)
}

fn init_with_seed(cfg: &SolverConfig, domain: &ConvexPolygon, seed: u64) -> Result<Configuration> {
    cfg.validate()?;
    let frame = Frame::rescaled(cfg.alpha)?;
    let dom = rescaled_domain(cfg, domain);
    let (lo, hi) = dom.bounding_box().ok_or(Error::DegeneratePolygon)?;
    let mut rng = rng_for(seed);
    let points = match cfg.init {
        Init::RandomUniform { n } => {
            let mut pts = Vec::with_capacity(n);
            while pts.len() < n {
                let p = Point2::new(rng.gen_range(lo.x..hi.x), rng.gen_range(lo.y..hi.y));
                if dom.contains(p) {
                    pts.push(p);
                }
            }
            pts
        }
        Init::LatticePerturbed { sigma } => {
            let lattice = triangular_lattice(&dom);
            if sigma == 0.0 {
                lattice
            } else {
                let normal = Normal::new(0.0, sigma).expect("sigma checked");
                lattice
                    .into_iter()
                    .map(|p| {
                        (0..16)
                            .map(|_| p + Point2::new(normal.sample(&mut rng), normal.sample(&mut rng)))
                            .find(|q| dom.contains(*q))
                            .unwrap_or(p)
                    })
                    .collect()
            }
        }
    };
    if points.is_empty() {
        return Err(Error::EmptyInput);
    }
    let mass = dom.area() / points.len() as f64;
    let particles = points.into_iter().map(|position| Particle { position, mass }).collect();
    Configuration::new(dom, particles, frame)
}

/// Points of the triangular lattice with unit-area Voronoi cells inside
/// `domain`, rows aligned with the x-axis and offset a quarter spacing from
/// the bounding box corner.
pub fn triangular_lattice(domain: &ConvexPolygon) -> Vec<Point2> {
    let Some((lo, hi)) = domain.bounding_box() else {
        return Vec::new();
    };
    let (r_out, _) = hexagon_reference_distances();
    // nearest-neighbour distance = √3 · circumradius of the unit hexagon
    let a = 3f64.sqrt() * r_out;
    let h = a * 3f64.sqrt() / 2.0;
    let mut pts = Vec::new();
    let mut j = 0usize;
    loop {
        let y = lo.y + (j as f64 + 0.5) * h;
        if y > hi.y {
            break;
        }
        let shift = if j.is_multiple_of(2) { 0.25 } else { 0.75 };
        let mut i = 0usize;
        loop {
            let x = lo.x + (i as f64 + shift) * a;
            if x > hi.x {
                break;
            }
            let p = Point2::new(x, y);
            if domain.contains(p) {
                pts.push(p);
            }
            i += 1;
        }
        j += 1;
    }
    pts
}

/// Result of one generalized Lloyd update.
#[derive(Clone, Debug)]
pub struct LloydStep {
    /// Centroids and areas of the nonempty cells.
    pub next: Configuration,
    /// Partition energy of the cells, i.e. the energy of `next` under the
    /// transport plan given by those cells.
    pub energy: EnergyBreakdown,
    /// Diagram generated by the input state.
    pub diagram: LaguerreDiagram,
    /// Input indices that kept a nonempty cell, in order.
    pub kept: Vec<usize>,
    pub max_move: f64,
    pub max_mass_change: f64,
}

pub fn lloyd_step(state: &Configuration) -> Result<LloydStep> {
    let ce = config_energy(state)?;
    let mut kept = Vec::with_capacity(state.len());
    let mut particles = Vec::with_capacity(state.len());
    let mut max_move: f64 = 0.0;
    let mut max_mass_change: f64 = 0.0;
    for (i, (p, cell)) in state.particles.iter().zip(&ce.diagram.cells).enumerate() {
        if cell.is_empty() {
            continue;
        }
        let g = cell.centroid()?;
        let area = cell.area();
        max_move = max_move.max(g.dist(p.position));
        max_mass_change = max_mass_change.max((area - p.mass).abs());
        kept.push(i);
        particles.push(Particle { position: g, mass: area });
    }
    if particles.is_empty() {
        return Err(Error::Internal("all cells empty".into()));
    }
    let next = Configuration { domain: state.domain.clone(), particles, frame: state.frame };
    Ok(LloydStep { next, energy: ce.energy, diagram: ce.diagram, kept, max_move, max_mass_change })
}

/// `θ·proposal + (1−θ)·state` over the particles kept by `step`, with masses
/// renormalized to the domain area.
fn blend(state: &Configuration, step: &LloydStep, theta: f64) -> Configuration {
    let mut particles: Vec<Particle> = step
        .kept
        .iter()
        .zip(&step.next.particles)
        .map(|(&i, new)| {
            let old = state.particles[i];
            Particle {
                position: old.position.lerp(new.position, theta),
                mass: old.mass + theta * (new.mass - old.mass),
            }
        })
        .collect();
    let total: f64 = particles.iter().map(|p| p.mass).sum();
    let scale = state.domain.area() / total;
    for p in &mut particles {
        p.mass *= scale;
    }
    Configuration { domain: state.domain.clone(), particles, frame: state.frame }
}

fn accepts(candidate: f64, current: f64) -> bool {
    candidate <= current + ACCEPT_REL * current.abs()
}

/// Merge neighbours whose merge lowers the partition energy, most negative
/// first; if nothing merges, try splitting the heaviest particle along its
/// cell's diameter and keep the split only if five relaxation steps end below
/// the current energy.
pub fn adapt_particle_count(state: &Configuration, diagram: &LaguerreDiagram) -> Result<Configuration> {
    let n = state.len();
    if n != diagram.len() {
        return Err(Error::Internal("state and diagram sizes differ".into()));
    }
    let stats: Vec<Option<(f64, Point2)>> = diagram
        .cells
        .iter()
        .map(|c| c.centroid().ok().map(|g| (c.area(), g)))
        .collect();

    let mut candidates = Vec::new();
    for &(i, j) in &diagram.adjacency {
        if let (Some((ai, gi)), Some((aj, gj))) = (stats[i], stats[j]) {
            let d = merge_delta(ai, aj, gi, gj, &state.frame)?;
            if d < 0.0 {
                candidates.push((d, i, j));
            }
        }
    }
    candidates.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)).then(a.2.cmp(&b.2)));
    if !candidates.is_empty() {
        let mut used = vec![false; n];
        let mut merged_into: Vec<Option<Particle>> = vec![None; n];
        for (_, i, j) in candidates {
            if used[i] || used[j] {
                continue;
            }
            used[i] = true;
            used[j] = true;
            let (ai, gi) = stats[i].expect("nonempty");
            let (aj, gj) = stats[j].expect("nonempty");
            merged_into[i] = Some(Particle {
                position: gi.lerp(gj, aj / (ai + aj)),
                mass: state.particles[i].mass + state.particles[j].mass,
            });
        }
        let particles = (0..n)
            .filter_map(|k| match (used[k], merged_into[k]) {
                (false, _) => Some(state.particles[k]),
                (true, merged) => merged,
            })
            .collect();
        return Ok(Configuration { domain: state.domain.clone(), particles, frame: state.frame });
    }

    // split
    let Some(heaviest) = (0..n)
        .filter(|&k| !diagram.cells[k].is_empty())
        .max_by(|&a, &b| state.particles[a].mass.total_cmp(&state.particles[b].mass).then(b.cmp(&a)))
    else {
        return Ok(state.clone());
    };
    let cell = &diagram.cells[heaviest];
    let Some(axis) = longest_axis(cell) else {
        return Ok(state.clone());
    };
    let g = cell.centroid()?;
    let offset = axis * (0.25 * cell.diameter());
    let half = state.particles[heaviest].mass / 2.0;
    let mut particles = state.particles.clone();
    particles[heaviest] = Particle { position: g - offset, mass: half };
    particles.push(Particle { position: g + offset, mass: half });
    let mut trial = Configuration { domain: state.domain.clone(), particles, frame: state.frame };
    let current = config_energy(state)?.energy.total;
    for _ in 0..SPLIT_RELAX_STEPS {
        trial = lloyd_step(&trial)?.next;
    }
    let relaxed = config_energy(&trial)?.energy.total;
    if relaxed < current {
        Ok(trial)
    } else {
        Ok(state.clone())
    }
}

fn longest_axis(cell: &ConvexPolygon) -> Option<Point2> {
    let v = cell.vertices();
    let mut best = (0.0, None);
    for (i, p) in v.iter().enumerate() {
        for q in &v[i + 1..] {
            let d = *q - *p;
            if d.norm2() > best.0 {
                best = (d.norm2(), Some(d * (1.0 / d.norm())));
            }
        }
    }
    best.1
}

fn same_state(a: &Configuration, b: &Configuration) -> bool {
    a.particles == b.particles
}

/// Runs the guarded iteration from `state`.
pub fn relax(cfg: &SolverConfig, state: Configuration, seed: u64) -> Result<SolveResult> {
    let domain_area = state.domain.area();
    let mut state = state;
    let mut cur = lloyd_step(&state)?;
    let mut trace = vec![cur.energy.total];
    let mut iterations = 0;
    let mut removed = 0;
    let mut adaptations = 0;
    let mut converged = false;

    loop {
        let (tol_pos, tol_mass) = cfg.tolerances(domain_area, state.len());
        let stationary = cur.kept.len() == state.len()
            && cur.max_move <= tol_pos
            && cur.max_mass_change <= tol_mass;
        if stationary {
            if cfg.adapt && adaptations < MAX_ADAPTATIONS {
                let adapted = adapt_particle_count(&state, &cur.diagram)?;
                if !same_state(&adapted, &state) {
                    let st = lloyd_step(&adapted)?;
                    if st.energy.total < cur.energy.total {
                        state = adapted;
                        cur = st;
                        trace.push(cur.energy.total);
                        adaptations += 1;
                        continue;
                    }
                }
            }
            converged = true;
            break;
        }
        if iterations >= cfg.max_iters {
            break;
        }
        iterations += 1;

        let current = cur.energy.total;
        let dropped = state.len() - cur.kept.len();
        let proposal = cur.next.clone();
        let st = lloyd_step(&proposal)?;
        if accepts(st.energy.total, current) {
            removed += dropped;
            state = proposal;
            cur = st;
            trace.push(cur.energy.total);
            continue;
        }
        let mut theta = 0.5;
        let mut accepted = None;
        while theta >= MIN_DAMPING {
            let candidate = blend(&state, &cur, theta);
            let st = lloyd_step(&candidate)?;
            if accepts(st.energy.total, current) {
                accepted = Some((candidate, st));
                break;
            }
            theta *= 0.5;
        }
        match accepted {
            Some((candidate, st)) => {
                removed += dropped;
                state = candidate;
                cur = st;
                trace.push(cur.energy.total);
            }
            None => break,
        }
    }

    Ok(SolveResult {
        energy: cur.energy,
        diagram: cur.diagram,
        final_config: state,
        trace,
        iterations,
        converged,
        removed_particles: removed,
        adaptation_events: adaptations,
        seed,
        volume: cfg.volume(),
        run_totals: Vec::new(),
    })
}

/// Single run seeded by `cfg.seed`.
pub fn solve(cfg: &SolverConfig, domain: &ConvexPolygon) -> Result<SolveResult> {
    let state = init_configuration(cfg, domain)?;
    relax(cfg, state, cfg.seed)
}

/// Worker thread cap from the environment, if set.
pub fn thread_cap() -> Option<usize> {
    std::env::var(THREADS_ENV).ok()?.trim().parse().ok().filter(|n: &usize| *n > 0)
}

fn pool() -> Result<rayon::ThreadPool> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(thread_cap().unwrap_or(0))
        .build()
        .map_err(|e| Error::Internal(e.to_string()))
}

/// Runs every configuration once (seeded by its own `seed`) in parallel and
/// returns the lowest-energy result; ties go to the lower index.
pub fn best_of(jobs: &[SolverConfig], domain: &ConvexPolygon) -> Result<SolveResult> {
    if jobs.is_empty() {
        return Err(Error::EmptyInput);
    }
    let results: Vec<Result<SolveResult>> =
        pool()?.install(|| jobs.par_iter().map(|cfg| solve(cfg, domain)).collect());
    let results: Vec<SolveResult> = results.into_iter().collect::<Result<_>>()?;
    let totals: Vec<f64> = results.iter().map(|r| r.energy.total).collect();
    let best = (0..results.len())
        .min_by(|&a, &b| totals[a].total_cmp(&totals[b]).then(a.cmp(&b)))
        .expect("nonempty");
    let mut best = results.into_iter().nth(best).expect("index in range");
    best.run_totals = totals;
    Ok(best)
}

/// Best of `cfg.multistart` runs seeded `seed, seed + 1, …`.
pub fn multistart(cfg: &SolverConfig, domain: &ConvexPolygon) -> Result<SolveResult> {
    cfg.validate()?;
    let jobs: Vec<SolverConfig> = (0..cfg.multistart as u64)
        .map(|r| SolverConfig { seed: cfg.seed.wrapping_add(r), multistart: 1, ..cfg.clone() })
        .collect();
    best_of(&jobs, domain)
}

/// Particles at least `margin` from the boundary whose mass is not above
/// `bound`.
pub fn interior_mass_violations(cfg: &Configuration, margin: f64, bound: f64) -> Vec<usize> {
    cfg.particles
        .iter()
        .enumerate()
        .filter(|(_, p)| cfg.domain.boundary_distance(p.position) >= margin && p.mass <= bound)
        .map(|(i, _)| i)
        .collect()
}
