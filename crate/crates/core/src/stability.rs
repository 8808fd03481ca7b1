//! Distance of a point configuration from the regular triangular lattice,
//! measured on its Voronoi tessellation.

use serde::{Deserialize, Serialize};

use crate::energy_model::{c6, hexagon_reference_distances};
use crate::error::{Error, Result};
use crate::geometry::{segment_distance, ConvexPolygon, Point2};
use crate::laguerre::{voronoi_diagram, LaguerreDiagram};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CellDiagnostics {
    pub index: usize,
    pub sides: usize,
    pub is_hexagon: bool,
    /// `max |d/d_ref − 1|` over the cell's vertices.
    pub max_vertex_dev: f64,
    /// Same over the cell's edges, using point-to-segment distance.
    pub max_edge_dev: f64,
    pub boundary: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StabilityReport {
    #[serde(rename = "N")]
    pub n: usize,
    #[serde(rename = "V")]
    pub v: f64,
    pub eps_hat: f64,
    pub cells_total: usize,
    pub interior_cells: usize,
    pub hexagon_interior: usize,
    /// Interior cells with some vertex outside the window.
    pub vertex_violations: usize,
    /// Interior cells with some edge outside the window.
    pub edge_violations: usize,
    pub epsilon_used: f64,
    pub per_cell: Vec<CellDiagnostics>,
}

impl StabilityReport {
    pub fn hexagon_fraction(&self) -> f64 {
        ratio(self.hexagon_interior, self.interior_cells)
    }

    /// Fraction of interior cells passing both the vertex and the edge window.
    pub fn window_pass_fraction(&self) -> f64 {
        let tol = self.window();
        let passing = self
            .per_cell
            .iter()
            .filter(|c| !c.boundary && c.max_vertex_dev <= tol && c.max_edge_dev <= tol)
            .count();
        ratio(passing, self.interior_cells)
    }

    /// Relative window half-width `ε^{1/3}`.
    pub fn window(&self) -> f64 {
        self.epsilon_used.cbrt()
    }
}

fn ratio(a: usize, b: usize) -> f64 {
    if b == 0 {
        0.0
    } else {
        a as f64 / b as f64
    }
}

fn moment_sum(diagram: &LaguerreDiagram, points: &[Point2]) -> f64 {
    diagram
        .cells
        .iter()
        .zip(points)
        .map(|(c, z)| if c.is_empty() { 0.0 } else { c.second_moment_about(*z) })
        .sum()
}

/// `ε̂ = (N/|Ω|²) Σᵢ ∫_{Vᵢ} |z − zᵢ|² dz − c₆`
pub fn configuration_defect(points: &[Point2], domain: &ConvexPolygon) -> Result<f64> {
    if points.is_empty() {
        return Err(Error::EmptyInput);
    }
    let diagram = voronoi_diagram(domain, points)?;
    Ok(defect_of(&diagram, points, domain))
}

fn defect_of(diagram: &LaguerreDiagram, points: &[Point2], domain: &ConvexPolygon) -> f64 {
    let area = domain.area();
    points.len() as f64 / (area * area) * moment_sum(diagram, points) - c6()
}

pub fn analyze(points: &[Point2], domain: &ConvexPolygon, v: f64, epsilon: f64) -> Result<StabilityReport> {
    if !(epsilon > 0.0) || !epsilon.is_finite() {
        return Err(Error::Domain(format!("epsilon must be positive, got {epsilon}")));
    }
    if !(v > 0.0) || !v.is_finite() {
        return Err(Error::Domain(format!("V must be positive, got {v}")));
    }
    if points.is_empty() {
        return Err(Error::EmptyInput);
    }
    let diagram = voronoi_diagram(domain, points)?;
    let n = points.len();
    let unit = (v / n as f64).sqrt();
    let (r_vertex, r_edge) = hexagon_reference_distances();
    let (ref_vertex, ref_edge) = (unit * r_vertex, unit * r_edge);
    let tol = epsilon.cbrt();

    let mut per_cell = Vec::with_capacity(n);
    let (mut interior, mut hexagons, mut vertex_bad, mut edge_bad) = (0, 0, 0, 0);
    for (i, (cell, z)) in diagram.cells.iter().zip(points).enumerate() {
        let max_vertex_dev = cell
            .vertices()
            .iter()
            .map(|q| (q.dist(*z) / ref_vertex - 1.0).abs())
            .fold(0.0, f64::max);
        let max_edge_dev = cell
            .edges()
            .map(|(a, b)| (segment_distance(*z, a, b) / ref_edge - 1.0).abs())
            .fold(0.0, f64::max);
        let boundary = cell.is_empty() || diagram.touches_boundary(i);
        let sides = cell.edge_count();
        if !boundary {
            interior += 1;
            hexagons += usize::from(sides == 6);
            vertex_bad += usize::from(max_vertex_dev > tol);
            edge_bad += usize::from(max_edge_dev > tol);
        }
        per_cell.push(CellDiagnostics {
            index: i,
            sides,
            is_hexagon: sides == 6,
            max_vertex_dev,
            max_edge_dev,
            boundary,
        });
    }
    Ok(StabilityReport {
        n,
        v,
        eps_hat: defect_of(&diagram, points, domain),
        cells_total: n,
        interior_cells: interior,
        hexagon_interior: hexagons,
        vertex_violations: vertex_bad,
        edge_violations: edge_bad,
        epsilon_used: epsilon,
        per_cell,
    })
}
