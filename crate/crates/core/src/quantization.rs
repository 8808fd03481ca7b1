//! Penalized quantization energy in physical and rescaled frames.
//!
//! A configuration is a discrete measure `Σ mᵢ δ_{zᵢ}` on a convex domain. Its
//! energy is `coef · Σ mᵢ^α + W₂²(𝟙_Ω, μ)` with `coef = δ` in the physical
//! frame and `coef = c₆/(1−α)` in the rescaled frame, where the domain is
//! blown up by `V_{δ,α}^{1/2}` so that optimal cells have area close to one.

use serde::{Deserialize, Serialize};

use crate::energy_model::{c6, Alpha};
use crate::error::{Error, Result};
use crate::geometry::{ConvexPolygon, Moments, Point2};
use crate::laguerre::{laguerre_diagram, LaguerreDiagram, WeightedSite};

/// Exponents this close to 1 make the entropy coefficient blow up.
pub const ALPHA_GUARD: f64 = 1.0 - 1e-6;

const PARTITION_TOL: f64 = 1e-8;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FrameKind {
    Physical { delta: f64 },
    Rescaled,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Frame {
    pub kind: FrameKind,
    pub alpha: Alpha,
}

impl Frame {
    pub fn physical(alpha: Alpha, delta: f64) -> Result<Self> {
        check_alpha(alpha)?;
        check_delta(delta)?;
        Ok(Self { kind: FrameKind::Physical { delta }, alpha })
    }

    pub fn rescaled(alpha: Alpha) -> Result<Self> {
        check_alpha(alpha)?;
        Ok(Self { kind: FrameKind::Rescaled, alpha })
    }

    /// Coefficient of `Σ mᵢ^α` in the energy.
    pub fn entropy_coefficient(&self) -> f64 {
        match self.kind {
            FrameKind::Physical { delta } => delta,
            FrameKind::Rescaled => self.alpha.rescaled_coefficient(),
        }
    }
}

fn check_alpha(alpha: Alpha) -> Result<()> {
    if alpha.value() >= ALPHA_GUARD {
        return Err(Error::Domain(format!("alpha {} too close to 1", alpha.value())));
    }
    Ok(())
}

fn check_delta(delta: f64) -> Result<()> {
    if !(delta > 0.0) || !delta.is_finite() {
        return Err(Error::Domain(format!("delta must be positive, got {delta}")));
    }
    Ok(())
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Particle {
    pub position: Point2,
    pub mass: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Configuration {
    pub domain: ConvexPolygon,
    pub particles: Vec<Particle>,
    pub frame: Frame,
}

impl Configuration {
    pub fn new(domain: ConvexPolygon, particles: Vec<Particle>, frame: Frame) -> Result<Self> {
        if particles.is_empty() {
            return Err(Error::EmptyInput);
        }
        if let Some(p) = particles.iter().find(|p| !(p.mass > 0.0) || !p.position.is_finite()) {
            return Err(Error::Domain(format!("invalid particle {p:?}")));
        }
        let total: f64 = particles.iter().map(|p| p.mass).sum();
        let target = match frame.kind {
            FrameKind::Rescaled => domain.area(),
            FrameKind::Physical { .. } => 1.0,
        };
        if (total - target).abs() > PARTITION_TOL * target {
            return Err(Error::PartitionGap { cells: total, domain: target });
        }
        Ok(Self { domain, particles, frame })
    }

    pub fn len(&self) -> usize {
        self.particles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.particles.is_empty()
    }

    pub fn positions(&self) -> Vec<Point2> {
        self.particles.iter().map(|p| p.position).collect()
    }

    pub fn masses(&self) -> Vec<f64> {
        self.particles.iter().map(|p| p.mass).collect()
    }

    /// Normalizing volume: `V_{δ,α}` in the physical frame, `|Ω|` in the
    /// rescaled frame.
    pub fn volume(&self) -> f64 {
        match self.frame.kind {
            FrameKind::Physical { delta } => rescale_volume(self.frame.alpha, delta),
            FrameKind::Rescaled => self.domain.area(),
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct EnergyBreakdown {
    /// `Σ ∫_{Cᵢ} |x − ξᵢ|² dx`
    pub transport: f64,
    /// `coef · Σ |Cᵢ|^α`
    pub entropy: f64,
    pub total: f64,
    /// Energy per unit volume relative to the hexagonal value `(2−α)/(1−α)·c₆`.
    pub rescaled_ratio: f64,
    /// Energy per unit volume minus the hexagonal value.
    pub defect: f64,
}

/// `V_{δ,α} = (c₆/(δ(1−α)))^{1/(2−α)}`
pub fn rescale_volume(alpha: Alpha, delta: f64) -> f64 {
    let a = alpha.value();
    (c6() / (delta * (1.0 - a))).powf(1.0 / (2.0 - a))
}

/// The `δ` for which `n` equal hexagonal cells are the heuristic optimum on a
/// domain of the given area.
pub fn heuristic_delta(alpha: Alpha, n: f64, domain_area: f64) -> f64 {
    let a = alpha.value();
    c6() * domain_area / ((1.0 - a) * n.powf(2.0 - a))
}

/// Defect `V_{δ,α} · E − (2−α)/(1−α)·c₆` of a physical-frame energy `E`.
pub fn defect(alpha: Alpha, delta: f64, physical_total_energy: f64) -> f64 {
    rescale_volume(alpha, delta) * physical_total_energy - alpha.asymptotic_energy_density()
}

pub fn rescaled_ratio(alpha: Alpha, delta: f64, physical_total_energy: f64) -> f64 {
    rescale_volume(alpha, delta) * physical_total_energy / alpha.asymptotic_energy_density()
}

fn breakdown(transport: f64, entropy: f64, volume: f64, alpha: Alpha) -> EnergyBreakdown {
    let total = transport + entropy;
    let hex = alpha.asymptotic_energy_density();
    let per_volume = total / volume;
    EnergyBreakdown {
        transport,
        entropy,
        total,
        rescaled_ratio: per_volume / hex,
        defect: per_volume - hex,
    }
}

/// Partition energy of regions given by their moments. Regions need not be
/// convex, which lets merged cells be evaluated directly.
pub fn partition_energy_from_moments(
    regions: &[Moments],
    domain: &ConvexPolygon,
    frame: &Frame,
) -> Result<EnergyBreakdown> {
    let domain_area = domain.area();
    let total_area: f64 = regions.iter().map(|m| m.area).sum();
    if (total_area - domain_area).abs() > 1e-9 * domain_area {
        return Err(Error::PartitionGap { cells: total_area, domain: domain_area });
    }
    let a = frame.alpha.value();
    let transport: f64 = regions.iter().map(Moments::central_second).sum();
    let entropy_sum: f64 = regions.iter().filter(|m| m.area > 0.0).map(|m| m.area.powf(a)).sum();
    let entropy = frame.entropy_coefficient() * entropy_sum;
    let volume = match frame.kind {
        // physical energies scale as V⁻² of rescaled ones; per unit rescaled
        // volume that is V · E
        FrameKind::Physical { delta } => 1.0 / rescale_volume(frame.alpha, delta),
        FrameKind::Rescaled => domain_area,
    };
    Ok(breakdown(transport, entropy, volume, frame.alpha))
}

/// `F(𝒞) = coef·Σ|Cᵢ|^α + Σ ∫_{Cᵢ} |x − ξ_{Cᵢ}|² dx`. Empty cells contribute
/// nothing.
pub fn partition_energy(
    cells: &[ConvexPolygon],
    domain: &ConvexPolygon,
    frame: &Frame,
) -> Result<EnergyBreakdown> {
    let moments: Vec<Moments> = cells
        .iter()
        .map(|c| match c.centroid() {
            Ok(g) => c.moments_about(g),
            Err(_) => Moments::default(),
        })
        .collect();
    partition_energy_from_moments(&moments, domain, frame)
}

/// `wᵢ = −coef · α · mᵢ^{α−1}`
pub fn optimal_weights(masses: &[f64], frame: &Frame) -> Result<Vec<f64>> {
    let a = frame.alpha.value();
    let coef = frame.entropy_coefficient();
    masses
        .iter()
        .map(|&m| {
            if !(m > 0.0) || !m.is_finite() {
                return Err(Error::Domain(format!("mass must be positive, got {m}")));
            }
            Ok(-coef * a * m.powf(a - 1.0))
        })
        .collect()
}

/// `F(𝒟) − F(𝒞)` when cells with masses `m1`, `m2` and centroids `z1`, `z2`
/// are merged into one.
pub fn merge_delta(m1: f64, m2: f64, z1: Point2, z2: Point2, frame: &Frame) -> Result<f64> {
    if !(m1 > 0.0 && m2 > 0.0) {
        return Err(Error::Domain("merged masses must be positive".into()));
    }
    let a = frame.alpha.value();
    let entropy = frame.entropy_coefficient() * ((m1 + m2).powf(a) - m1.powf(a) - m2.powf(a));
    Ok(entropy + (z2 - z1).norm2() * m1 * m2 / (m1 + m2))
}

/// `L^{1/(1−α)} · Σ ∫_{Cᵢ} |x − ξᵢ|²` with `L = Σ |Cᵢ|^α`, for cells that
/// partition a region of unit area.
pub fn constrained_ratio(alpha: Alpha, cells: &[ConvexPolygon]) -> Result<f64> {
    check_alpha(alpha)?;
    let total: f64 = cells.iter().map(ConvexPolygon::area).sum();
    if (total - 1.0).abs() > PARTITION_TOL {
        return Err(Error::PartitionGap { cells: total, domain: 1.0 });
    }
    let a = alpha.value();
    let l: f64 = cells.iter().filter(|c| !c.is_empty()).map(|c| c.area().powf(a)).sum();
    let transport: f64 = cells.iter().map(ConvexPolygon::central_second_moment).sum();
    Ok(l.powf(1.0 / (1.0 - a)) * transport)
}

/// Energy of a configuration evaluated on the Laguerre diagram its masses
/// generate.
#[derive(Clone, Debug)]
pub struct ConfigEnergy {
    pub energy: EnergyBreakdown,
    pub diagram: LaguerreDiagram,
    /// The input with empty-cell particles dropped and masses replaced by cell
    /// areas.
    pub projected: Configuration,
    /// Indices (into the input) of particles whose cells vanished.
    pub empty_cells: Vec<usize>,
}

pub fn config_energy(cfg: &Configuration) -> Result<ConfigEnergy> {
    let weights = optimal_weights(&cfg.masses(), &cfg.frame)?;
    let sites: Vec<WeightedSite> = cfg
        .particles
        .iter()
        .zip(&weights)
        .map(|(p, w)| WeightedSite::new(p.position, *w))
        .collect();
    let diagram = laguerre_diagram(&cfg.domain, &sites)?;
    let energy = partition_energy(&diagram.cells, &cfg.domain, &cfg.frame)?;
    let empty_cells = diagram.empty_cells();
    let particles: Vec<Particle> = cfg
        .particles
        .iter()
        .zip(&diagram.cells)
        .filter(|(_, c)| !c.is_empty())
        .map(|(p, c)| Particle { position: p.position, mass: c.area() })
        .collect();
    if particles.is_empty() {
        return Err(Error::Internal("every Laguerre cell is empty".into()));
    }
    let projected = Configuration { domain: cfg.domain.clone(), particles, frame: cfg.frame };
    Ok(ConfigEnergy { energy, diagram, projected, empty_cells })
}
