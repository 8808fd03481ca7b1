//! Convex polygon primitives.
//!
//! Polygons are stored as counterclockwise vertex loops. The empty polygon is a
//! regular value: Laguerre cells can vanish while a solver is iterating, and
//! every operation here accepts it.

use std::f64::consts::PI;
use std::ops::{Add, AddAssign, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Relative tolerance for collinear-vertex removal, scaled by `diam²`.
pub const EPS_GEOM: f64 = 1e-12;
/// Relative tolerance for duplicate-vertex removal, scaled by `diam`.
pub const EPS_DEDUP: f64 = 1e-12;

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Point2 {
    pub x: f64,
    pub y: f64,
}

impl Point2 {
    pub const ORIGIN: Point2 = Point2 { x: 0.0, y: 0.0 };

    #[inline]
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    #[inline]
    pub fn dot(self, other: Point2) -> f64 {
        self.x * other.x + self.y * other.y
    }

    /// z-component of the 3D cross product.
    #[inline]
    pub fn cross(self, other: Point2) -> f64 {
        self.x * other.y - self.y * other.x
    }

    #[inline]
    pub fn norm2(self) -> f64 {
        self.dot(self)
    }

    #[inline]
    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }

    #[inline]
    pub fn dist(self, other: Point2) -> f64 {
        (self - other).norm()
    }

    #[inline]
    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }

    /// `self + t (other - self)`
    #[inline]
    pub fn lerp(self, other: Point2, t: f64) -> Point2 {
        Point2::new(self.x + t * (other.x - self.x), self.y + t * (other.y - self.y))
    }
}

impl Add for Point2 {
    type Output = Point2;
    #[inline]
    fn add(self, rhs: Point2) -> Point2 {
        Point2::new(self.x + rhs.x, self.y + rhs.y)
    }
}

impl AddAssign for Point2 {
    #[inline]
    fn add_assign(&mut self, rhs: Point2) {
        self.x += rhs.x;
        self.y += rhs.y;
    }
}

impl Sub for Point2 {
    type Output = Point2;
    #[inline]
    fn sub(self, rhs: Point2) -> Point2 {
        Point2::new(self.x - rhs.x, self.y - rhs.y)
    }
}

impl Mul<f64> for Point2 {
    type Output = Point2;
    #[inline]
    fn mul(self, s: f64) -> Point2 {
        Point2::new(self.x * s, self.y * s)
    }
}

impl Neg for Point2 {
    type Output = Point2;
    #[inline]
    fn neg(self) -> Point2 {
        Point2::new(-self.x, -self.y)
    }
}

/// Closed half-plane `{z : normal · z <= offset}`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HalfPlane {
    pub normal: Point2,
    pub offset: f64,
}

impl HalfPlane {
    pub fn new(normal: Point2, offset: f64) -> Result<Self> {
        if !(normal.norm2() > 0.0) || !normal.is_finite() || !offset.is_finite() {
            return Err(Error::InvalidHalfPlane);
        }
        Ok(Self { normal, offset })
    }

    /// Signed value `normal · p - offset`; non-positive inside.
    #[inline]
    pub fn eval(&self, p: Point2) -> f64 {
        self.normal.dot(p) - self.offset
    }

    #[inline]
    pub fn contains(&self, p: Point2) -> bool {
        self.eval(p) <= 0.0
    }
}

/// Area, first moment and second moment of a region about a fixed reference
/// point. These add over disjoint regions, which makes them the natural
/// carrier for unions of cells.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Moments {
    pub reference: Point2,
    pub area: f64,
    /// `∫ (x - reference) dx`
    pub first: Point2,
    /// `∫ |x - reference|² dx`
    pub second: f64,
}

impl Moments {
    pub fn centroid(&self) -> Option<Point2> {
        (self.area > 0.0).then(|| self.reference + self.first * (1.0 / self.area))
    }

    /// Second moment about the centroid, `min_ξ ∫ |x - ξ|² dx`.
    pub fn central_second(&self) -> f64 {
        if self.area <= 0.0 {
            return 0.0;
        }
        (self.second - self.first.norm2() / self.area).max(0.0)
    }

    /// Combine with moments of a disjoint region taken about the same point.
    pub fn merge(&self, other: &Moments) -> Result<Moments> {
        if self.reference != other.reference {
            return Err(Error::MismatchedReference);
        }
        Ok(Moments {
            reference: self.reference,
            area: self.area + other.area,
            first: self.first + other.first,
            second: self.second + other.second,
        })
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ConvexPolygon {
    vertices: Vec<Point2>,
}

impl ConvexPolygon {
    pub fn empty() -> Self {
        Self { vertices: Vec::new() }
    }

    /// Builds a polygon from a convex vertex loop in either orientation.
    /// Clockwise input is reversed; duplicate and collinear vertices are
    /// removed. Non-convex input is rejected.
    pub fn new(vertices: Vec<Point2>) -> Result<Self> {
        if vertices.iter().any(|p| !p.is_finite()) {
            return Err(Error::NonFinite);
        }
        let mut vertices = vertices;
        if signed_area(&vertices) < 0.0 {
            vertices.reverse();
        }
        let mut labels = vec![(); vertices.len()];
        cleanup(&mut vertices, &mut labels);
        let poly = Self { vertices };
        if !poly.is_convex() {
            return Err(Error::NotConvex);
        }
        Ok(poly)
    }

    pub(crate) fn from_clean(vertices: Vec<Point2>) -> Self {
        Self { vertices }
    }

    pub fn rectangle(min: Point2, max: Point2) -> Result<Self> {
        if !(max.x > min.x && max.y > min.y) {
            return Err(Error::DegeneratePolygon);
        }
        Ok(Self {
            vertices: vec![
                min,
                Point2::new(max.x, min.y),
                max,
                Point2::new(min.x, max.y),
            ],
        })
    }

    pub fn unit_square() -> Self {
        Self::rectangle(Point2::ORIGIN, Point2::new(1.0, 1.0)).expect("valid rectangle")
    }

    /// Regular `n`-gon of the given area centred at `center`, with a vertex
    /// on the positive x-axis through the centre.
    pub fn regular(n: usize, area: f64, center: Point2) -> Result<Self> {
        regular_ngon(n, area, center)
    }

    pub fn vertices(&self) -> &[Point2] {
        &self.vertices
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.len() < 3
    }

    /// Iterator over directed edges `(v_i, v_{i+1})`.
    pub fn edges(&self) -> impl Iterator<Item = (Point2, Point2)> + '_ {
        let n = self.vertices.len();
        (0..n).map(move |i| (self.vertices[i], self.vertices[(i + 1) % n]))
    }

    pub fn edge_count(&self) -> usize {
        if self.is_empty() {
            0
        } else {
            self.vertices.len()
        }
    }

    pub fn area(&self) -> f64 {
        if self.is_empty() {
            return 0.0;
        }
        signed_area(&self.vertices).max(0.0)
    }

    pub fn centroid(&self) -> Result<Point2> {
        if self.is_empty() {
            return Err(Error::DegeneratePolygon);
        }
        let o = self.vertices[0];
        let mut a2 = 0.0;
        let mut c = Point2::ORIGIN;
        for i in 1..self.vertices.len() - 1 {
            let p = self.vertices[i] - o;
            let q = self.vertices[i + 1] - o;
            let w = p.cross(q);
            a2 += w;
            c += (p + q) * w;
        }
        if !(a2 > 0.0) {
            return Err(Error::DegeneratePolygon);
        }
        Ok(o + c * (1.0 / (3.0 * a2)))
    }

    /// Exact moments about `p`. The second moment is integrated on a
    /// triangle fan rooted at the centroid and shifted with the
    /// parallel-axis identity.
    pub fn moments_about(&self, p: Point2) -> Moments {
        let Ok(g) = self.centroid() else {
            return Moments { reference: p, ..Moments::default() };
        };
        let n = self.vertices.len();
        let mut area = 0.0;
        let mut central = 0.0;
        for i in 0..n {
            let a = self.vertices[i] - g;
            let b = self.vertices[(i + 1) % n] - g;
            let t = 0.5 * a.cross(b);
            area += t;
            // ∫_T |x|² over the triangle (0, a, b)
            central += t / 6.0 * (a.norm2() + b.norm2() + a.dot(b));
        }
        let d = g - p;
        Moments {
            reference: p,
            area,
            first: d * area,
            second: central + area * d.norm2(),
        }
    }

    /// `∫_P |x - p|² dx`
    pub fn second_moment_about(&self, p: Point2) -> f64 {
        self.moments_about(p).second
    }

    /// Second moment about the centroid.
    pub fn central_second_moment(&self) -> f64 {
        match self.centroid() {
            Ok(g) => self.second_moment_about(g),
            Err(_) => 0.0,
        }
    }

    pub fn diameter(&self) -> f64 {
        let mut d2: f64 = 0.0;
        for (i, p) in self.vertices.iter().enumerate() {
            for q in &self.vertices[i + 1..] {
                d2 = d2.max((*p - *q).norm2());
            }
        }
        d2.sqrt()
    }

    /// Closed containment test with a relative slack of `1e-12·diam²`.
    pub fn contains(&self, p: Point2) -> bool {
        if self.is_empty() {
            return false;
        }
        let d = self.diameter();
        let tol = EPS_GEOM * d * d;
        self.edges().all(|(a, b)| (b - a).cross(p - a) >= -tol)
    }

    /// Euclidean distance from `p` to the boundary; zero for the empty polygon.
    pub fn boundary_distance(&self, p: Point2) -> f64 {
        if self.is_empty() {
            return 0.0;
        }
        self.edges()
            .map(|(a, b)| segment_distance(p, a, b))
            .fold(f64::INFINITY, f64::min)
    }

    pub fn clip(&self, h: &HalfPlane) -> ConvexPolygon {
        clip_halfplane(self, h)
    }

    pub fn translate(&self, v: Point2) -> ConvexPolygon {
        Self { vertices: self.vertices.iter().map(|p| *p + v).collect() }
    }

    /// Uniform dilation about the origin.
    pub fn scale(&self, s: f64) -> ConvexPolygon {
        assert!(s > 0.0, "dilation factor must be positive");
        Self { vertices: self.vertices.iter().map(|p| *p * s).collect() }
    }

    pub fn bounding_box(&self) -> Option<(Point2, Point2)> {
        let first = *self.vertices.first()?;
        Some(self.vertices.iter().fold((first, first), |(lo, hi), p| {
            (
                Point2::new(lo.x.min(p.x), lo.y.min(p.y)),
                Point2::new(hi.x.max(p.x), hi.y.max(p.y)),
            )
        }))
    }

    fn is_convex(&self) -> bool {
        if self.is_empty() {
            return true;
        }
        let d = self.diameter();
        let tol = EPS_GEOM * d * d;
        let n = self.vertices.len();
        (0..n).all(|i| {
            let a = self.vertices[i];
            let b = self.vertices[(i + 1) % n];
            let c = self.vertices[(i + 2) % n];
            (b - a).cross(c - b) >= -tol
        })
    }
}

/// `poly ∩ h`.
pub fn clip_halfplane(poly: &ConvexPolygon, h: &HalfPlane) -> ConvexPolygon {
    let labels = vec![(); poly.vertices.len()];
    let (vertices, _) = clip_labeled(&poly.vertices, &labels, h, ());
    ConvexPolygon { vertices }
}

pub fn regular_ngon(n: usize, area: f64, center: Point2) -> Result<ConvexPolygon> {
    if n < 3 {
        return Err(Error::InvalidOrder(n));
    }
    if !(area > 0.0) || !area.is_finite() {
        return Err(Error::Domain(format!("regular polygon area must be positive, got {area}")));
    }
    let step = 2.0 * PI / n as f64;
    let radius = (2.0 * area / (n as f64 * step.sin())).sqrt();
    let vertices = (0..n)
        .map(|k| {
            let t = step * k as f64;
            center + Point2::new(radius * t.cos(), radius * t.sin())
        })
        .collect();
    Ok(ConvexPolygon { vertices })
}

pub fn segment_distance(p: Point2, a: Point2, b: Point2) -> f64 {
    let ab = b - a;
    let len2 = ab.norm2();
    if len2 == 0.0 {
        return p.dist(a);
    }
    let t = ((p - a).dot(ab) / len2).clamp(0.0, 1.0);
    p.dist(a.lerp(b, t))
}

pub(crate) fn signed_area(vertices: &[Point2]) -> f64 {
    if vertices.len() < 3 {
        return 0.0;
    }
    let o = vertices[0];
    let mut a2 = 0.0;
    for i in 1..vertices.len() - 1 {
        a2 += (vertices[i] - o).cross(vertices[i + 1] - o);
    }
    0.5 * a2
}

/// Sutherland-Hodgman step against one half-plane, carrying a label for the
/// edge that starts at each vertex. Edges created by the cut get `new_label`.
pub(crate) fn clip_labeled<L: Copy>(
    vertices: &[Point2],
    labels: &[L],
    h: &HalfPlane,
    new_label: L,
) -> (Vec<Point2>, Vec<L>) {
    let n = vertices.len();
    if n < 3 {
        return (Vec::new(), Vec::new());
    }
    let s: Vec<f64> = vertices.iter().map(|p| h.eval(*p)).collect();
    if s.iter().all(|v| *v <= 0.0) {
        return (vertices.to_vec(), labels.to_vec());
    }
    if s.iter().all(|v| *v > 0.0) {
        return (Vec::new(), Vec::new());
    }
    let mut out = Vec::with_capacity(n + 1);
    let mut out_labels = Vec::with_capacity(n + 1);
    for i in 0..n {
        let j = (i + 1) % n;
        let (si, sj) = (s[i], s[j]);
        if si <= 0.0 {
            out.push(vertices[i]);
            out_labels.push(labels[i]);
            if sj > 0.0 {
                // leaving: the remainder of edge i is cut away, the boundary
                // continues along the clipping line
                let t = si / (si - sj);
                out.push(vertices[i].lerp(vertices[j], t));
                out_labels.push(new_label);
            }
        } else if sj <= 0.0 {
            // entering: the new vertex starts the surviving part of edge i
            let t = si / (si - sj);
            out.push(vertices[i].lerp(vertices[j], t));
            out_labels.push(labels[i]);
        }
    }
    cleanup(&mut out, &mut out_labels);
    (out, out_labels)
}

/// Removes near-duplicate and collinear vertices; collapses to empty when
/// fewer than three vertices or no positive area remain.
pub(crate) fn cleanup<L: Copy>(vertices: &mut Vec<Point2>, labels: &mut Vec<L>) {
    debug_assert_eq!(vertices.len(), labels.len());
    if vertices.len() < 3 {
        vertices.clear();
        labels.clear();
        return;
    }
    let mut d2: f64 = 0.0;
    for (i, p) in vertices.iter().enumerate() {
        for q in &vertices[i + 1..] {
            d2 = d2.max((*p - *q).norm2());
        }
    }
    let diam = d2.sqrt();
    let dedup = EPS_DEDUP * diam;
    let collinear = EPS_GEOM * d2;

    let mut changed = true;
    while changed && vertices.len() >= 3 {
        changed = false;
        let n = vertices.len();
        for i in 0..n {
            let j = (i + 1) % n;
            if vertices[i].dist(vertices[j]) <= dedup {
                // the short edge i disappears; edge j now starts at vertex i
                labels[i] = labels[j];
                vertices.remove(j);
                labels.remove(j);
                changed = true;
                break;
            }
        }
        if changed {
            continue;
        }
        for i in 0..n {
            let prev = vertices[(i + n - 1) % n];
            let cur = vertices[i];
            let next = vertices[(i + 1) % n];
            if (cur - prev).cross(next - cur).abs() <= collinear
                && (cur - prev).dot(next - cur) >= 0.0
            {
                vertices.remove(i);
                labels.remove(i);
                changed = true;
                break;
            }
        }
    }
    if vertices.len() < 3 || signed_area(vertices) <= 0.0 {
        vertices.clear();
        labels.clear();
    }
}
