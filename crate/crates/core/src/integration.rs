//! Algebra-valued line integrals along curves in `E3`.
//!
//! `∫ dζ·Ψ(ζ)` and `∫ Ψ(ζ)·dζ` with `dζ = dx + i2·dy + i3·dz`, evaluated by
//! composite Gauss–Legendre quadrature.

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::algebra::Quat;
use crate::frame::{DomainBox, Frame, Point3};
use crate::monogenic::{ComponentMap, Side};
use crate::{Real, Result};

pub const DEFAULT_NODES: usize = 16;

/// Relative size below which a Morera residual counts as zero.
pub const MORERA_TOL: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum IntegrationError {
    #[error("degenerate triangle (area {area:e})")]
    DegenerateTriangle { area: f64 },
    #[error("a path needs at least 2 vertices, got {count}")]
    TooFewVertices { count: usize },
    #[error("quadrature needs at least one node")]
    NoNodes,
    #[error("invalid path JSON: {0}")]
    PathJson(String),
}

/// Gauss–Legendre nodes and weights on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> Vec<(f64, f64)> {
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 1.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            if n == 1 {
                p0 = 1.0;
            }
            dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        out.push((x, 2.0 / ((1.0 - x * x) * dp * dp)));
    }
    out.reverse();
    out
}

pub type CurveFn<T> = Arc<dyn Fn(T) -> Point3<T> + Send + Sync>;

/// Rectifiable curve in `R³`.
#[derive(Clone)]
pub enum Path<T> {
    /// Straight segments through the vertices; `closed` adds the segment back
    /// to the first vertex unless the last vertex already equals it.
    Polyline { vertices: Vec<Point3<T>>, closed: bool },
    /// `t ∈ [0, 1] ↦ sampler(t)` split into `n_nodes` equal sub-intervals.
    Parametric {
        sampler: CurveFn<T>,
        derivative: CurveFn<T>,
        n_nodes: usize,
        closed: bool,
    },
    /// Pieces traversed in order.
    Chain(Vec<Path<T>>),
}

impl<T: Real> std::fmt::Debug for Path<T> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Path::Polyline { vertices, closed } => f
                .debug_struct("Polyline")
                .field("vertices", vertices)
                .field("closed", closed)
                .finish(),
            Path::Parametric { n_nodes, closed, .. } => f
                .debug_struct("Parametric")
                .field("n_nodes", n_nodes)
                .field("closed", closed)
                .finish_non_exhaustive(),
            Path::Chain(parts) => f.debug_tuple("Chain").field(parts).finish(),
        }
    }
}

#[derive(Deserialize)]
#[serde(untagged)]
enum PathJson {
    Bare(Vec<[f64; 3]>),
    Tagged {
        vertices: Vec<[f64; 3]>,
        #[serde(default)]
        closed: bool,
    },
}

#[derive(Serialize)]
struct PathJsonOut {
    vertices: Vec<[f64; 3]>,
    closed: bool,
}

impl<T: Real> Path<T> {
    pub fn polyline(vertices: Vec<Point3<T>>, closed: bool) -> Result<Self> {
        if vertices.len() < 2 {
            return Err(IntegrationError::TooFewVertices { count: vertices.len() }.into());
        }
        Ok(Path::Polyline { vertices, closed })
    }

    pub fn segment(a: Point3<T>, b: Point3<T>) -> Self {
        Path::Polyline { vertices: vec![a, b], closed: false }
    }

    pub fn parametric(
        sampler: impl Fn(T) -> Point3<T> + Send + Sync + 'static,
        derivative: impl Fn(T) -> Point3<T> + Send + Sync + 'static,
        n_nodes: usize,
        closed: bool,
    ) -> Self {
        Path::Parametric {
            sampler: Arc::new(sampler),
            derivative: Arc::new(derivative),
            n_nodes: n_nodes.max(1),
            closed,
        }
    }

    /// Parses `[[x,y,z], ...]` or `{"vertices": [...], "closed": bool}`.
    pub fn from_json(src: &str) -> Result<Self> {
        let parsed: PathJson =
            serde_json::from_str(src).map_err(|e| IntegrationError::PathJson(e.to_string()))?;
        let (verts, closed) = match parsed {
            PathJson::Bare(v) => (v, false),
            PathJson::Tagged { vertices, closed } => (vertices, closed),
        };
        Self::polyline(verts.into_iter().map(|v| Point3::from(v.map(T::lit))).collect(), closed)
    }

    /// JSON vertex array form of a polyline, `None` for other paths.
    pub fn to_json(&self) -> Option<String> {
        match self {
            Path::Polyline { vertices, closed } => {
                let vertices = vertices
                    .iter()
                    .map(|v| v.to_array().map(|c| c.to_f64().unwrap_or(f64::NAN)))
                    .collect();
                serde_json::to_string(&PathJsonOut { vertices, closed: *closed }).ok()
            }
            _ => None,
        }
    }

    pub fn is_closed(&self) -> bool {
        match self {
            Path::Polyline { closed, .. } | Path::Parametric { closed, .. } => *closed,
            Path::Chain(parts) => match (parts.first(), parts.last()) {
                (Some(a), Some(b)) => a.start() == b.end(),
                _ => true,
            },
        }
    }

    pub fn start(&self) -> Point3<T> {
        match self {
            Path::Polyline { vertices, .. } => vertices[0],
            Path::Parametric { sampler, .. } => sampler(T::zero()),
            Path::Chain(parts) => parts.first().map_or(Point3::origin(), Path::start),
        }
    }

    pub fn end(&self) -> Point3<T> {
        match self {
            Path::Polyline { vertices, closed } => {
                if *closed {
                    vertices[0]
                } else {
                    vertices[vertices.len() - 1]
                }
            }
            Path::Parametric { sampler, .. } => sampler(T::one()),
            Path::Chain(parts) => parts.last().map_or(Point3::origin(), Path::end),
        }
    }

    /// Straight pieces of a polyline, closing segment included.
    pub fn segments(&self) -> Vec<(Point3<T>, Point3<T>)> {
        match self {
            Path::Polyline { vertices, closed } => {
                let mut segs: Vec<_> = vertices.windows(2).map(|w| (w[0], w[1])).collect();
                let (first, last) = (vertices[0], vertices[vertices.len() - 1]);
                if *closed && first != last {
                    segs.push((last, first));
                }
                segs
            }
            _ => Vec::new(),
        }
    }

    pub fn reversed(&self) -> Self {
        match self {
            Path::Polyline { vertices, closed } => {
                let mut v = vertices.clone();
                if *closed && v[0] != v[v.len() - 1] {
                    v.push(v[0]);
                }
                v.reverse();
                Path::Polyline { vertices: v, closed: *closed }
            }
            Path::Parametric { sampler, derivative, n_nodes, closed } => {
                let (s, d) = (sampler.clone(), derivative.clone());
                Path::Parametric {
                    sampler: Arc::new(move |t| s(T::one() - t)),
                    derivative: Arc::new(move |t| d(T::one() - t) * -T::one()),
                    n_nodes: *n_nodes,
                    closed: *closed,
                }
            }
            Path::Chain(parts) => Path::Chain(parts.iter().rev().map(Path::reversed).collect()),
        }
    }

    /// `self` followed by `other`.
    pub fn concat(&self, other: &Self) -> Self {
        let mut parts = Vec::new();
        for p in [self, other] {
            match p {
                Path::Chain(inner) => parts.extend(inner.iter().cloned()),
                _ => parts.push(p.clone()),
            }
        }
        Path::Chain(parts)
    }

    /// Quadrature rule as `(point, weighted tangent)` pairs: the integral of
    /// `g(γ)·dγ` is `Σ g(point)·tangent`.
    pub fn quadrature(&self, nodes: usize) -> Result<Vec<(Point3<T>, Point3<T>)>> {
        if nodes == 0 {
            return Err(IntegrationError::NoNodes.into());
        }
        let rule: Vec<(T, T)> = gauss_legendre(nodes)
            .into_iter()
            .map(|(x, w)| (T::lit(x), T::lit(w)))
            .collect();
        let half = T::lit(0.5);
        let mut out = Vec::new();
        match self {
            Path::Polyline { .. } => {
                for (a, b) in self.segments() {
                    let d = b - a;
                    for &(x, w) in &rule {
                        let t = half * (x + T::one());
                        out.push((a + d * t, d * (half * w)));
                    }
                }
            }
            Path::Parametric { sampler, derivative, n_nodes, .. } => {
                let h = T::one() / T::from_usize(*n_nodes).unwrap_or(T::one());
                for j in 0..*n_nodes {
                    let t0 = h * T::from_usize(j).unwrap_or(T::zero());
                    for &(x, w) in &rule {
                        let t = t0 + half * h * (x + T::one());
                        out.push((sampler(t), derivative(t) * (half * h * w)));
                    }
                }
            }
            Path::Chain(parts) => {
                for p in parts {
                    out.extend(p.quadrature(nodes)?);
                }
            }
        }
        Ok(out)
    }

    /// Arc length by the same quadrature.
    pub fn length(&self, nodes: usize) -> Result<T> {
        Ok(self
            .quadrature(nodes)?
            .iter()
            .map(|(_, d)| d.norm())
            .fold(T::zero(), |a, b| a + b))
    }
}

/// Which side of the integrand `dζ` multiplies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Order {
    /// `∫ dζ·Ψ`
    Left,
    /// `∫ Ψ·dζ`
    Right,
}

impl Order {
    /// Form that vanishes on closed curves for maps of the given side.
    pub fn annihilating(side: Side) -> Self {
        match side {
            Side::Right => Order::Left,
            Side::Left => Order::Right,
        }
    }
}

/// `∫ dζ·Ψ` or `∫ Ψ·dζ` along `path`.
pub fn integral<T: Real>(
    path: &Path<T>,
    f: impl Fn(Point3<T>) -> Result<Quat<T>>,
    frame: &Frame<T>,
    order: Order,
    nodes: usize,
) -> Result<Quat<T>> {
    let mut acc = Quat::zero();
    for (p, d) in path.quadrature(nodes)? {
        let dz = frame.dzeta(d);
        let v = f(p)?;
        acc = acc
            + match order {
                Order::Left => dz * v,
                Order::Right => v * dz,
            };
    }
    Ok(acc)
}

/// `∫ dζ·Ψ(ζ)`.
pub fn integral_dzeta_left<T: Real>(
    path: &Path<T>,
    f: impl Fn(Point3<T>) -> Result<Quat<T>>,
    frame: &Frame<T>,
    nodes: usize,
) -> Result<Quat<T>> {
    integral(path, f, frame, Order::Left, nodes)
}

/// `∫ Ψ(ζ)·dζ`.
pub fn integral_dzeta_right<T: Real>(
    path: &Path<T>,
    f: impl Fn(Point3<T>) -> Result<Quat<T>>,
    frame: &Frame<T>,
    nodes: usize,
) -> Result<Quat<T>> {
    integral(path, f, frame, Order::Right, nodes)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Triangle<T> {
    pub v0: Point3<T>,
    pub v1: Point3<T>,
    pub v2: Point3<T>,
}

impl<T: Real> Triangle<T> {
    /// Rejects triangles with area at most `1e-14·scale²`, where `scale` is
    /// the longest edge.
    pub fn new(v0: Point3<T>, v1: Point3<T>, v2: Point3<T>) -> Result<Self> {
        let t = Self { v0, v1, v2 };
        let scale = t.edges().iter().map(|e| e.norm()).fold(T::zero(), T::max);
        let area = t.area();
        if !(area > T::lit(1e-14) * scale * scale) {
            return Err(IntegrationError::DegenerateTriangle {
                area: area.to_f64().unwrap_or(f64::NAN),
            }
            .into());
        }
        Ok(t)
    }

    fn edges(&self) -> [Point3<T>; 3] {
        [self.v1 - self.v0, self.v2 - self.v1, self.v0 - self.v2]
    }

    pub fn area(&self) -> T {
        (self.v1 - self.v0).cross(self.v2 - self.v0).norm() * T::lit(0.5)
    }

    pub fn perimeter(&self) -> T {
        self.edges().iter().map(|e| e.norm()).fold(T::zero(), |a, b| a + b)
    }

    /// Closed polyline `v0 → v1 → v2 → v0`.
    pub fn boundary(&self) -> Path<T> {
        Path::Polyline { vertices: vec![self.v0, self.v1, self.v2], closed: true }
    }

    /// Random triangle inside `bx` with area at least `min_area`.
    pub fn random_in(bx: &DomainBox<T>, min_area: T, rng: &mut impl Rng) -> Self {
        loop {
            let mut v = [Point3::origin(); 3];
            for slot in &mut v {
                *slot = bx.lerp([(); 3].map(|_| T::lit(rng.gen_range(0.02..0.98))));
            }
            if let Ok(t) = Self::new(v[0], v[1], v[2]) {
                if t.area() >= min_area {
                    return t;
                }
            }
        }
    }
}

/// `‖∮ dζ·Φ‖` (right) or `‖∮ Φ·dζ‖` (left) on a triangle boundary, with the
/// scale `(1 + max‖Φ‖ on the nodes)·perimeter`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MoreraResidual<T> {
    pub residual: T,
    pub scale: T,
}

impl<T: Real> MoreraResidual<T> {
    pub fn ratio(&self) -> T {
        self.residual / self.scale
    }

    /// `residual ≤ 1e-8·scale`.
    pub fn is_zero(&self) -> bool {
        self.residual <= T::lit(MORERA_TOL) * self.scale
    }
}

pub fn morera_residual<T: Real>(
    cm: &ComponentMap<T>,
    t: &Triangle<T>,
    side: Side,
    nodes_per_edge: usize,
) -> Result<MoreraResidual<T>> {
    let t = Triangle::new(t.v0, t.v1, t.v2)?;
    let path = t.boundary();
    let mut peak = T::zero();
    let value = |p: Point3<T>| cm.value(p);
    let mut acc = Quat::zero();
    for (p, d) in path.quadrature(nodes_per_edge)? {
        let v = value(p)?;
        peak = peak.max(v.norm());
        let dz = cm.frame.dzeta(d);
        acc = acc
            + match Order::annihilating(side) {
                Order::Left => dz * v,
                Order::Right => v * dz,
            };
    }
    Ok(MoreraResidual { residual: acc.norm(), scale: (T::one() + peak) * t.perimeter() })
}

/// Morera residuals over random triangles.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MoreraStats<T> {
    pub side: Side,
    pub triangles: usize,
    pub zero_count: usize,
    pub max_ratio: T,
    pub min_ratio: T,
    pub residuals: Vec<MoreraResidual<T>>,
}

impl<T: Real> MoreraStats<T> {
    /// Every triangle integral vanished.
    pub fn all_zero(&self) -> bool {
        self.zero_count == self.triangles
    }
}

pub fn morera_battery<T: Real>(
    cm: &ComponentMap<T>,
    bx: &DomainBox<T>,
    side: Side,
    n_triangles: usize,
    nodes_per_edge: usize,
    seed: u64,
) -> Result<MoreraStats<T>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let e = bx.extent();
    let min_area = T::lit(1e-3) * e.norm() * e.norm();
    let residuals = (0..n_triangles)
        .map(|_| {
            let t = Triangle::random_in(bx, min_area, &mut rng);
            morera_residual(cm, &t, side, nodes_per_edge)
        })
        .collect::<Result<Vec<_>>>()?;
    let ratios = residuals.iter().map(MoreraResidual::ratio);
    Ok(MoreraStats {
        side,
        triangles: residuals.len(),
        zero_count: residuals.iter().filter(|r| r.is_zero()).count(),
        max_ratio: ratios.clone().fold(T::zero(), T::max),
        min_ratio: ratios.fold(T::infinity(), T::min),
        residuals,
    })
}

/// Both sides of the norm estimate for one path and integrand.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct IntegralBound<T> {
    /// `‖∫ dζ·Ψ‖`
    pub lhs_left: T,
    /// `‖∫ Ψ·dζ‖`
    pub lhs_right: T,
    /// `c·∫ ‖Ψ‖ ds`
    pub rhs: T,
    pub c_used: T,
}

impl<T: Real> IntegralBound<T> {
    pub fn holds(&self) -> bool {
        self.lhs_left <= self.rhs && self.lhs_right <= self.rhs
    }
}

/// Constant `c = sqrt(‖1‖² + ‖i2‖² + ‖i3‖²)`, which bounds
/// `‖dx + i2·dy + i3·dz‖ ≤ c·|(dx, dy, dz)|`. With the norm being
/// submultiplicative this gives `‖∫ dζ·Ψ‖ ≤ c·∫ ‖Ψ‖ ds`.
pub fn integral_bound_constant<T: Real>(frame: &Frame<T>) -> T {
    frame
        .dzeta_units()
        .iter()
        .map(|q| q.norm() * q.norm())
        .fold(T::zero(), |a, b| a + b)
        .sqrt()
}

pub fn integral_bound_check<T: Real>(
    path: &Path<T>,
    f: impl Fn(Point3<T>) -> Result<Quat<T>>,
    frame: &Frame<T>,
    nodes: usize,
) -> Result<IntegralBound<T>> {
    let c = integral_bound_constant(frame);
    let mut left = Quat::zero();
    let mut right = Quat::zero();
    let mut mass = T::zero();
    for (p, d) in path.quadrature(nodes)? {
        let v = f(p)?;
        let dz = frame.dzeta(d);
        left = left + dz * v;
        right = right + v * dz;
        mass += v.norm() * d.norm();
    }
    Ok(IntegralBound { lhs_left: left.norm(), lhs_right: right.norm(), rhs: c * mass, c_used: c })
}
