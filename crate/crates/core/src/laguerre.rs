//! Laguerre (power) diagrams of weighted sites clipped to a convex domain.
//!
//! Cell `i` is `{z ∈ Ω : |z − zᵢ|² − wᵢ ≤ |z − zⱼ|² − wⱼ ∀ j}`, built by
//! successive half-plane clipping of the domain. Candidate sites are visited
//! ring by ring on a uniform bucket grid, and the scan stops once no farther
//! site can produce a radical line that reaches the current cell.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{clip_labeled, cleanup, ConvexPolygon, HalfPlane, Point2};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct WeightedSite {
    pub position: Point2,
    pub weight: f64,
}

impl WeightedSite {
    pub fn new(position: Point2, weight: f64) -> Self {
        Self { position, weight }
    }
}

/// What produced an edge of a cell.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum EdgeSource {
    /// Edge `k` of the domain boundary.
    Domain(usize),
    /// Radical line shared with another site.
    Site(usize),
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct LaguerreDiagram {
    pub domain: ConvexPolygon,
    /// `cells[i]` belongs to site `i`; vanished cells are empty polygons.
    pub cells: Vec<ConvexPolygon>,
    /// `edge_sources[i][k]` labels the edge of `cells[i]` starting at vertex `k`.
    pub edge_sources: Vec<Vec<EdgeSource>>,
    /// Pairs `(i, j)`, `i < j`, sharing an edge longer than `1e-9·diam(domain)`.
    pub adjacency: BTreeSet<(usize, usize)>,
}

impl LaguerreDiagram {
    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    pub fn areas(&self) -> Vec<f64> {
        self.cells.iter().map(ConvexPolygon::area).collect()
    }

    pub fn empty_cells(&self) -> Vec<usize> {
        (0..self.cells.len()).filter(|&i| self.cells[i].is_empty()).collect()
    }

    /// Whether cell `i` has an edge on the domain boundary.
    pub fn touches_boundary(&self, i: usize) -> bool {
        self.edge_sources[i].iter().any(|s| matches!(s, EdgeSource::Domain(_)))
    }

    pub fn neighbors(&self, i: usize) -> Vec<usize> {
        self.adjacency
            .iter()
            .filter_map(|&(a, b)| {
                if a == i {
                    Some(b)
                } else if b == i {
                    Some(a)
                } else {
                    None
                }
            })
            .collect()
    }
}

/// Uniform bucket grid over site positions.
struct SiteGrid {
    origin: Point2,
    size: f64,
    nx: usize,
    ny: usize,
    buckets: Vec<Vec<usize>>,
}

impl SiteGrid {
    fn new(points: &[Point2], domain: &ConvexPolygon) -> Self {
        let (mut lo, mut hi) = domain.bounding_box().unwrap_or((points[0], points[0]));
        for p in points {
            lo = Point2::new(lo.x.min(p.x), lo.y.min(p.y));
            hi = Point2::new(hi.x.max(p.x), hi.y.max(p.y));
        }
        let w = (hi.x - lo.x).max(f64::MIN_POSITIVE);
        let h = (hi.y - lo.y).max(f64::MIN_POSITIVE);
        let size = ((w * h) / points.len() as f64).sqrt().max(w.max(h) / 1024.0);
        let nx = ((w / size).ceil() as usize).max(1);
        let ny = ((h / size).ceil() as usize).max(1);
        let mut grid = SiteGrid { origin: lo, size, nx, ny, buckets: vec![Vec::new(); nx * ny] };
        for (i, p) in points.iter().enumerate() {
            let (bx, by) = grid.bucket_of(*p);
            grid.buckets[by * nx + bx].push(i);
        }
        grid
    }

    fn bucket_of(&self, p: Point2) -> (usize, usize) {
        let bx = ((p.x - self.origin.x) / self.size).floor().max(0.0) as usize;
        let by = ((p.y - self.origin.y) / self.size).floor().max(0.0) as usize;
        (bx.min(self.nx - 1), by.min(self.ny - 1))
    }

    fn max_ring(&self) -> usize {
        self.nx.max(self.ny)
    }

    /// Site indices in the buckets at Chebyshev distance `ring` from `(cx, cy)`.
    fn ring(&self, cx: usize, cy: usize, ring: usize, out: &mut Vec<usize>) {
        out.clear();
        let r = ring as isize;
        let (cx, cy) = (cx as isize, cy as isize);
        for dy in -r..=r {
            let y = cy + dy;
            if y < 0 || y >= self.ny as isize {
                continue;
            }
            let step = if dy.abs() == r { 1 } else { (2 * r).max(1) };
            let mut dx = -r;
            while dx <= r {
                let x = cx + dx;
                if x >= 0 && x < self.nx as isize {
                    out.extend_from_slice(&self.buckets[y as usize * self.nx + x as usize]);
                }
                dx += step;
            }
        }
    }
}

fn check_sites(domain: &ConvexPolygon, sites: &[WeightedSite]) -> Result<()> {
    if sites.is_empty() {
        return Err(Error::EmptyInput);
    }
    if sites.iter().any(|s| !s.position.is_finite() || !s.weight.is_finite()) {
        return Err(Error::NonFinite);
    }
    let min_sep = 1e-9 * domain.diameter();
    let points: Vec<Point2> = sites.iter().map(|s| s.position).collect();
    let grid = SiteGrid::new(&points, domain);
    let mut ring = Vec::new();
    for (i, p) in points.iter().enumerate() {
        let (bx, by) = grid.bucket_of(*p);
        for r in 0..=1 {
            grid.ring(bx, by, r, &mut ring);
            for &j in &ring {
                if j != i && p.dist(points[j]) <= min_sep {
                    return Err(Error::DuplicateSite(i.min(j), i.max(j)));
                }
            }
        }
    }
    Ok(())
}

pub fn laguerre_diagram(domain: &ConvexPolygon, sites: &[WeightedSite]) -> Result<LaguerreDiagram> {
    check_sites(domain, sites)?;
    let n = sites.len();
    let points: Vec<Point2> = sites.iter().map(|s| s.position).collect();
    let w_max = sites.iter().map(|s| s.weight).fold(f64::NEG_INFINITY, f64::max);
    let grid = SiteGrid::new(&points, domain);
    let domain_labels: Vec<EdgeSource> =
        (0..domain.vertices().len()).map(EdgeSource::Domain).collect();

    let mut cells = Vec::with_capacity(n);
    let mut edge_sources = Vec::with_capacity(n);
    let mut ring = Vec::new();
    for i in 0..n {
        let zi = points[i];
        let wi = sites[i].weight;
        // work relative to the site to keep the radical-line offsets small
        let mut verts: Vec<Point2> = domain.vertices().iter().map(|p| *p - zi).collect();
        let mut labels = domain_labels.clone();
        let (bx, by) = grid.bucket_of(zi);
        for r in 0..=grid.max_ring() {
            if verts.is_empty() {
                break;
            }
            if r >= 2 {
                let reach = verts.iter().map(|v| v.norm()).fold(0.0, f64::max);
                let d = (r - 1) as f64 * grid.size;
                if (d * d + wi - w_max) / (2.0 * d) > reach {
                    break;
                }
            }
            grid.ring(bx, by, r, &mut ring);
            ring.sort_unstable();
            for &j in &ring {
                if j == i {
                    continue;
                }
                let e = points[j] - zi;
                // 2 e·u <= |e|² + wᵢ − wⱼ
                let h = HalfPlane { normal: e * 2.0, offset: e.norm2() + wi - sites[j].weight };
                let (v, l) = clip_labeled(&verts, &labels, &h, EdgeSource::Site(j));
                verts = v;
                labels = l;
                if verts.is_empty() {
                    break;
                }
            }
        }
        let mut verts: Vec<Point2> = verts.into_iter().map(|v| v + zi).collect();
        cleanup(&mut verts, &mut labels);
        cells.push(ConvexPolygon::from_clean(verts));
        edge_sources.push(labels);
    }

    let min_edge = 1e-9 * domain.diameter();
    let mut adjacency = BTreeSet::new();
    for (i, (cell, labels)) in cells.iter().zip(&edge_sources).enumerate() {
        for ((a, b), src) in cell.edges().zip(labels) {
            if let EdgeSource::Site(j) = *src {
                if a.dist(b) > min_edge {
                    adjacency.insert((i.min(j), i.max(j)));
                }
            }
        }
    }

    Ok(LaguerreDiagram { domain: domain.clone(), cells, edge_sources, adjacency })
}

/// Laguerre diagram with all weights zero.
pub fn voronoi_diagram(domain: &ConvexPolygon, points: &[Point2]) -> Result<LaguerreDiagram> {
    let sites: Vec<WeightedSite> = points.iter().map(|p| WeightedSite::new(*p, 0.0)).collect();
    laguerre_diagram(domain, &sites)
}

pub fn neighbor_graph(diagram: &LaguerreDiagram) -> BTreeSet<(usize, usize)> {
    diagram.adjacency.clone()
}
