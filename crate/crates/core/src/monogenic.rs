//! Monogenic maps `Ω_ζ → H(C)`.
//!
//! A right G-monogenic map has the form
//! `Φ(ζ) = F1(ξ1)e1 + F2(ξ2)e2 + F3(ξ1)e3 + F4(ξ2)e4`, a left one
//! `Φ̂(ζ) = F̂1(ξ1)e1 + F̂2(ξ2)e2 + F̂3(ξ2)e3 + F̂4(ξ1)e4`, with all `F`
//! analytic. A general map is described componentwise by a [`ComponentMap`],
//! which is what the Cauchy–Riemann residuals, the Hausdorff differential and
//! the classifier operate on.

use std::fmt;
use std::sync::Arc;

use num_complex::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::algebra::Quat;
use crate::analytic::{variable_jet, AnalyticFn, EvalError, Expr};
use crate::frame::{DomainBox, Frame, Point3};
use crate::{lowdisc, Real, Result};

/// Points with `min(|ξ1|, |ξ2|)` below this are skipped by the classifier.
pub const DEGENERACY_TUBE: f64 = 1e-6;

/// Interpolant residual below which a map counts as representable.
pub const REPRESENTABILITY_TOL: f64 = 1e-7;

/// Polynomial degree used to reconstruct the analytic functions on fibers.
pub const FIBER_FIT_DEGREE: usize = 8;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum MonogenicError {
    #[error("map is not H-monogenic at the point (span residual {residual:e})")]
    NotHMonogenic { residual: f64 },
    #[error("frame is rank deficient: (1, a1, b1) and (1, a2, b2) are complex-collinear")]
    RankDeficientFrame,
    #[error("maps are defined over different frames")]
    FrameMismatch,
    #[error("no admissible sample points in the domain")]
    EmptySampleSet,
    #[error("operation needs analytic components, the map has raw components")]
    NotAnalytic,
}

/// Which side the increment multiplies on: `h·Φ'` (right) or `Φ̂'·h` (left).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Right,
    Left,
}

impl Side {
    /// For each of the four components, which of `ξ1`, `ξ2` (1 or 2) its
    /// analytic function depends on.
    pub fn pattern(self) -> [usize; 4] {
        match self {
            Side::Right => [1, 2, 1, 2],
            Side::Left => [1, 2, 2, 1],
        }
    }

    /// Product `h·q` for right, `q·h` for left.
    pub fn apply<T: Real>(self, h: Quat<T>, q: Quat<T>) -> Quat<T> {
        match self {
            Side::Right => h * q,
            Side::Left => q * h,
        }
    }
}

fn czero<T: Real>() -> Complex<T> {
    Complex::new(T::zero(), T::zero())
}

/// Maps given by four analytic functions of one variable.
pub trait GMap<T: Real>: Sync {
    fn frame(&self) -> &Frame<T>;
    fn side(&self) -> Side;
    fn functions(&self) -> &[AnalyticFn<T>; 4];

    /// The representation formula at `p`.
    fn value(&self, p: Point3<T>) -> Result<Quat<T>> {
        eval_pattern(self.frame(), self.functions(), self.side(), p)
    }

    /// Gateaux derivative: the same pattern with each `F_k` replaced by `F_k'`.
    fn gateaux(&self, p: Point3<T>) -> Result<Quat<T>> {
        let d = self.functions().clone().map(|f| f.derivative());
        eval_pattern(self.frame(), &d, self.side(), p)
    }

    /// Coefficients `p_0..p_N` of `Σ (ζ-ζ0)^n p_n` (right) or
    /// `Σ p̂_n (ζ-ζ0)^n` (left).
    fn taylor_expand(&self, p0: Point3<T>, order: usize) -> Result<Vec<Quat<T>>> {
        let (x1, x2) = self.frame().xi(p0);
        let pattern = self.side().pattern();
        let mut cols = Vec::with_capacity(4);
        for (f, &j) in self.functions().iter().zip(&pattern) {
            let center = if j == 1 { x1 } else { x2 };
            cols.push(f.taylor_coeffs(center, order)?);
        }
        Ok((0..=order)
            .map(|n| Quat::new(cols[0][n], cols[1][n], cols[2][n], cols[3][n]))
            .collect())
    }

    fn to_component_map(&self) -> ComponentMap<T> {
        let pattern = self.side().pattern();
        let comps = std::array::from_fn(|k| {
            let target = pattern[k] - 1;
            Component::xi(self.functions()[k].to_expr().map_vars(&|_| target))
        });
        ComponentMap::new(*self.frame(), comps)
    }
}

fn eval_pattern<T: Real>(
    frame: &Frame<T>,
    f: &[AnalyticFn<T>; 4],
    side: Side,
    p: Point3<T>,
) -> Result<Quat<T>> {
    let (x1, x2) = frame.xi(p);
    let pattern = side.pattern();
    let mut q = [czero(); 4];
    for k in 0..4 {
        q[k] = f[k].eval(if pattern[k] == 1 { x1 } else { x2 })?;
    }
    Ok(Quat::from_array(q))
}

/// `Φ(ζ) = F1(ξ1)e1 + F2(ξ2)e2 + F3(ξ1)e3 + F4(ξ2)e4`.
#[derive(Debug, Clone, PartialEq)]
pub struct RightGMap<T> {
    pub frame: Frame<T>,
    pub f: [AnalyticFn<T>; 4],
}

/// `Φ̂(ζ) = F̂1(ξ1)e1 + F̂2(ξ2)e2 + F̂3(ξ2)e3 + F̂4(ξ1)e4`.
#[derive(Debug, Clone, PartialEq)]
pub struct LeftGMap<T> {
    pub frame: Frame<T>,
    pub f: [AnalyticFn<T>; 4],
}

impl<T: Real> RightGMap<T> {
    pub fn new(frame: Frame<T>, f: [AnalyticFn<T>; 4]) -> Self {
        Self { frame, f }
    }

    /// Parses `F1..F4` as expressions in `z`.
    pub fn parse(frame: Frame<T>, src: [&str; 4]) -> Result<Self> {
        Ok(Self::new(frame, parse_four(src)?))
    }
}

impl<T: Real> LeftGMap<T> {
    pub fn new(frame: Frame<T>, f: [AnalyticFn<T>; 4]) -> Self {
        Self { frame, f }
    }

    pub fn parse(frame: Frame<T>, src: [&str; 4]) -> Result<Self> {
        Ok(Self::new(frame, parse_four(src)?))
    }
}

fn parse_four<T: Real>(src: [&str; 4]) -> Result<[AnalyticFn<T>; 4]> {
    let [a, b, c, d] = src;
    Ok([
        AnalyticFn::parse(a)?,
        AnalyticFn::parse(b)?,
        AnalyticFn::parse(c)?,
        AnalyticFn::parse(d)?,
    ])
}

impl<T: Real> GMap<T> for RightGMap<T> {
    fn frame(&self) -> &Frame<T> {
        &self.frame
    }
    fn side(&self) -> Side {
        Side::Right
    }
    fn functions(&self) -> &[AnalyticFn<T>; 4] {
        &self.f
    }
}

impl<T: Real> GMap<T> for LeftGMap<T> {
    fn frame(&self) -> &Frame<T> {
        &self.frame
    }
    fn side(&self) -> Side {
        Side::Left
    }
    fn functions(&self) -> &[AnalyticFn<T>; 4] {
        &self.f
    }
}

/// For each `ε`: `‖(Φ(ζ+εh) − Φ(ζ))/ε − h·Φ'(ζ)‖` (right) or
/// `‖… − Φ̂'(ζ)·h‖` (left).
pub fn gateaux_limit_residual<T: Real, M: GMap<T> + ?Sized>(
    m: &M,
    p: Point3<T>,
    h: Point3<T>,
    eps_list: &[T],
) -> Result<Vec<T>> {
    let base = m.value(p)?;
    let deriv = m.gateaux(p)?;
    let h_q = m.frame().embed(h);
    let expected = m.side().apply(h_q, deriv);
    eps_list
        .iter()
        .map(|&eps| {
            let moved = m.value(p + h * eps)?;
            let quotient = (moved - base).scale(&Complex::new(T::one() / eps, T::zero()));
            Ok((quotient - expected).norm())
        })
        .collect()
}

/// `(ζ − ζ0)^n = Δ1^n e1 + Δ2^n e2`.
pub fn zeta_power<T: Real>(frame: &Frame<T>, p0: Point3<T>, p: Point3<T>, n: usize) -> Quat<T> {
    let (a1, a2) = frame.xi(p0);
    let (b1, b2) = frame.xi(p);
    let n = n as i32;
    Quat::new((b1 - a1).powi(n), (b2 - a2).powi(n), czero(), czero())
}

/// `Σ (ζ−ζ0)^n p_n` (right) or `Σ p_n (ζ−ζ0)^n` (left).
pub fn eval_taylor<T: Real>(
    coeffs: &[Quat<T>],
    frame: &Frame<T>,
    p0: Point3<T>,
    p: Point3<T>,
    side: Side,
) -> Quat<T> {
    coeffs
        .iter()
        .enumerate()
        .map(|(n, c)| {
            let w = zeta_power(frame, p0, p, n);
            match side {
                Side::Right => w * *c,
                Side::Left => *c * w,
            }
        })
        .sum()
}

/// Complex-valued function on `Ω` returning `U(x, y, z)`.
pub type RawFn<T> = Arc<dyn Fn(Point3<T>) -> Complex<T> + Send + Sync>;

/// One coordinate `U_k` of a map.
#[derive(Clone)]
pub enum Component<T> {
    /// `U = G(ξ1, ξ2)` with exact partials by the chain rule.
    Xi { expr: Expr<T>, d_xi1: Expr<T>, d_xi2: Expr<T> },
    /// Raw callable; partials by central differences.
    Raw(RawFn<T>),
    Sum(Vec<Component<T>>),
    Product(Box<Component<T>>, Box<Component<T>>),
}

impl<T: Real> fmt::Debug for Component<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Component::Xi { expr, .. } => write!(f, "Xi({})", expr.display(&ComponentMap::<T>::VARS)),
            Component::Raw(_) => f.write_str("Raw(..)"),
            Component::Sum(parts) => f.debug_tuple("Sum").field(parts).finish(),
            Component::Product(a, b) => f.debug_tuple("Product").field(a).field(b).finish(),
        }
    }
}

impl<T: Real> Component<T> {
    /// Expression in the variables `xi1` (index 0) and `xi2` (index 1).
    pub fn xi(expr: Expr<T>) -> Self {
        let d_xi1 = expr.partial(0);
        let d_xi2 = expr.partial(1);
        Component::Xi { expr, d_xi1, d_xi2 }
    }

    pub fn parse(src: &str) -> Result<Self> {
        Ok(Self::xi(Expr::parse(src, &ComponentMap::<T>::VARS)?))
    }

    pub fn raw(f: impl Fn(Point3<T>) -> Complex<T> + Send + Sync + 'static) -> Self {
        Component::Raw(Arc::new(f))
    }

    pub fn zero() -> Self {
        Self::xi(Expr::zero())
    }

    /// Expression form when every part is analytic in `(ξ1, ξ2)`.
    pub fn as_expr(&self) -> Option<Expr<T>> {
        match self {
            Component::Xi { expr, .. } => Some(expr.clone()),
            Component::Raw(_) => None,
            Component::Sum(parts) => parts
                .iter()
                .try_fold(Expr::zero(), |acc, c| Some(Expr::add(acc, c.as_expr()?))),
            Component::Product(a, b) => Some(Expr::mul(a.as_expr()?, b.as_expr()?)),
        }
    }

    pub fn is_analytic(&self) -> bool {
        self.as_expr().is_some()
    }

    pub fn sum(a: Self, b: Self) -> Self {
        match (a.as_expr(), b.as_expr()) {
            (Some(x), Some(y)) => Self::xi(Expr::add(x, y)),
            _ => Component::Sum(vec![a, b]),
        }
    }

    pub fn product(a: Self, b: Self) -> Self {
        match (a.as_expr(), b.as_expr()) {
            (Some(x), Some(y)) => Self::xi(Expr::mul(x, y)),
            _ => Component::Product(Box::new(a), Box::new(b)),
        }
    }

    pub fn value(&self, frame: &Frame<T>, p: Point3<T>) -> Result<Complex<T>> {
        Ok(match self {
            Component::Xi { expr, .. } => {
                let (x1, x2) = frame.xi(p);
                expr.eval(&[x1, x2])?
            }
            Component::Raw(f) => f(p),
            Component::Sum(parts) => parts
                .iter()
                .try_fold(czero(), |acc, c| Ok::<_, crate::Error>(acc + c.value(frame, p)?))?,
            Component::Product(a, b) => a.value(frame, p)? * b.value(frame, p)?,
        })
    }

    /// `(∂U/∂x, ∂U/∂y, ∂U/∂z)` at `p`.
    pub fn gradient(&self, frame: &Frame<T>, p: Point3<T>) -> Result<[Complex<T>; 3]> {
        Ok(match self {
            Component::Xi { d_xi1, d_xi2, .. } => {
                let (x1, x2) = frame.xi(p);
                let g1 = d_xi1.eval(&[x1, x2])?;
                let g2 = d_xi2.eval(&[x1, x2])?;
                let (w1, w2) = (frame.xi_gradient(1), frame.xi_gradient(2));
                std::array::from_fn(|i| g1 * w1[i] + g2 * w2[i])
            }
            Component::Raw(f) => central_gradient(f.as_ref(), p),
            Component::Sum(parts) => {
                let mut g = [czero(); 3];
                for c in parts {
                    let d = c.gradient(frame, p)?;
                    for i in 0..3 {
                        g[i] += d[i];
                    }
                }
                g
            }
            Component::Product(a, b) => {
                let (av, bv) = (a.value(frame, p)?, b.value(frame, p)?);
                let (ag, bg) = (a.gradient(frame, p)?, b.gradient(frame, p)?);
                std::array::from_fn(|i| ag[i] * bv + av * bg[i])
            }
        })
    }
}

/// Central differences with step `1e-6·(1 + |coordinate|)`.
fn central_gradient<T: Real>(f: &(dyn Fn(Point3<T>) -> Complex<T> + Send + Sync), p: Point3<T>) -> [Complex<T>; 3] {
    let c = p.to_array();
    std::array::from_fn(|i| {
        let h = T::lit(1e-6) * (T::one() + c[i].abs());
        let mut plus = c;
        let mut minus = c;
        plus[i] += h;
        minus[i] -= h;
        (f(Point3::from(plus)) - f(Point3::from(minus))) / (h + h)
    })
}

/// `Φ(ζ) = Σ U_k(x, y, z) e_k`.
#[derive(Clone)]
pub struct ComponentMap<T> {
    pub frame: Frame<T>,
    pub comps: [Component<T>; 4],
}

impl<T: Real> fmt::Debug for ComponentMap<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ComponentMap")
            .field("frame", &self.frame)
            .field("comps", &self.comps)
            .finish()
    }
}

impl<T: Real> ComponentMap<T> {
    pub const VARS: [&'static str; 2] = ["xi1", "xi2"];

    pub fn new(frame: Frame<T>, comps: [Component<T>; 4]) -> Self {
        Self { frame, comps }
    }

    /// Parses `U1..U4` as expressions in `xi1`, `xi2`.
    pub fn parse(frame: Frame<T>, src: [&str; 4]) -> Result<Self> {
        let [a, b, c, d] = src;
        Ok(Self::new(
            frame,
            [Component::parse(a)?, Component::parse(b)?, Component::parse(c)?, Component::parse(d)?],
        ))
    }

    pub fn constant(frame: Frame<T>, q: Quat<T>) -> Self {
        Self::new(frame, q.to_array().map(|c| Component::xi(Expr::Const(c))))
    }

    pub fn is_analytic(&self) -> bool {
        self.comps.iter().all(Component::is_analytic)
    }

    pub fn value(&self, p: Point3<T>) -> Result<Quat<T>> {
        let mut q = [czero(); 4];
        for (slot, c) in q.iter_mut().zip(&self.comps) {
            *slot = c.value(&self.frame, p)?;
        }
        Ok(Quat::from_array(q))
    }

    /// `[∂Φ/∂x, ∂Φ/∂y, ∂Φ/∂z]`.
    pub fn partials(&self, p: Point3<T>) -> Result<[Quat<T>; 3]> {
        let mut g = [[czero(); 3]; 4];
        for (slot, c) in g.iter_mut().zip(&self.comps) {
            *slot = c.gradient(&self.frame, p)?;
        }
        Ok(std::array::from_fn(|i| Quat::new(g[0][i], g[1][i], g[2][i], g[3][i])))
    }

    /// Pointwise algebra product `Φ·Ψ`:
    /// `W1 = U1V1 + U3V4`, `W2 = U2V2 + U4V3`, `W3 = U1V3 + U3V2`,
    /// `W4 = U2V4 + U4V1`.
    pub fn product(&self, other: &Self) -> Result<Self> {
        if self.frame != other.frame {
            return Err(MonogenicError::FrameMismatch.into());
        }
        let [u1, u2, u3, u4] = self.comps.clone();
        let [v1, v2, v3, v4] = other.comps.clone();
        let term = |a: &Component<T>, b: &Component<T>, c: &Component<T>, d: &Component<T>| {
            Component::sum(
                Component::product(a.clone(), b.clone()),
                Component::product(c.clone(), d.clone()),
            )
        };
        Ok(Self::new(
            self.frame,
            [
                term(&u1, &v1, &u3, &v4),
                term(&u2, &v2, &u4, &v3),
                term(&u1, &v3, &u3, &v2),
                term(&u2, &v4, &u4, &v1),
            ],
        ))
    }
}

/// `(∂Φ/∂y − i2·∂Φ/∂x, ∂Φ/∂z − i3·∂Φ/∂x)` for right,
/// `(∂Φ/∂y − ∂Φ/∂x·i2, ∂Φ/∂z − ∂Φ/∂x·i3)` for left.
pub fn cr_residual<T: Real>(cm: &ComponentMap<T>, p: Point3<T>, side: Side) -> Result<(Quat<T>, Quat<T>)> {
    let [dx, dy, dz] = cm.partials(p)?;
    let (i2, i3) = (cm.frame.i2(), cm.frame.i3());
    Ok((dy - side.apply(i2, dx), dz - side.apply(i3, dx)))
}

/// Outcome of the span test at one point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HTest<T> {
    pub h_monogenic: bool,
    /// `(λ_k, μ_k)` with `dU_k ≈ λ_k dξ1 + μ_k dξ2`.
    pub coeffs: [(Complex<T>, Complex<T>); 4],
    /// Least-squares residual norms per component.
    pub residuals: [T; 4],
    /// Residuals divided by `1 + ‖∇U_k‖`.
    pub scaled_residuals: [T; 4],
}

impl<T: Real> HTest<T> {
    pub fn max_scaled_residual(&self) -> T {
        self.scaled_residuals.iter().copied().fold(T::zero(), T::max)
    }
}

fn inner<T: Real>(u: &[Complex<T>; 3], v: &[Complex<T>; 3]) -> Complex<T> {
    (0..3).fold(czero(), |s, i| s + u[i].conj() * v[i])
}

/// Least-squares fit of each gradient in the complex span of
/// `(1, a1, b1)` and `(1, a2, b2)`.
pub fn h_monogenic_test<T: Real>(cm: &ComponentMap<T>, p: Point3<T>, tol: T) -> Result<HTest<T>> {
    let g1 = cm.frame.xi_gradient(1);
    let g2 = cm.frame.xi_gradient(2);
    let (n11, n12, n22) = (inner(&g1, &g1), inner(&g1, &g2), inner(&g2, &g2));
    let det = n11 * n22 - n12 * n12.conj();
    if det.re <= T::lit(1e-12) * n11.re * n22.re {
        return Err(MonogenicError::RankDeficientFrame.into());
    }
    let mut grads = [[czero(); 3]; 4];
    for (slot, c) in grads.iter_mut().zip(&cm.comps) {
        *slot = c.gradient(&cm.frame, p)?;
    }
    let mut coeffs = [(czero(), czero()); 4];
    let mut residuals = [T::zero(); 4];
    let mut scaled = [T::zero(); 4];
    for k in 0..4 {
        let g = &grads[k];
        let (r1, r2) = (inner(&g1, g), inner(&g2, g));
        let lambda = (n22 * r1 - n12 * r2) / det;
        let mu = (n11 * r2 - n12.conj() * r1) / det;
        let res = (0..3)
            .map(|i| (lambda * g1[i] + mu * g2[i] - g[i]).norm_sqr())
            .fold(T::zero(), |a, b| a + b)
            .sqrt();
        let gnorm = g.iter().map(|c| c.norm_sqr()).fold(T::zero(), |a, b| a + b).sqrt();
        coeffs[k] = (lambda, mu);
        residuals[k] = res;
        scaled[k] = res / (T::one() + gnorm);
    }
    Ok(HTest {
        h_monogenic: scaled.iter().all(|r| *r <= tol),
        coeffs,
        residuals,
        scaled_residuals: scaled,
    })
}

/// `dΦ = Σ A_s dζ B_s` at a point.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HausdorffDecomposition<T> {
    pub pairs: Vec<(Quat<T>, Quat<T>)>,
    pub point: Point3<T>,
}

impl<T: Real> HausdorffDecomposition<T> {
    /// `dΦ = dζ·Φ'` for a right G-monogenic map.
    pub fn single_right(point: Point3<T>, derivative: Quat<T>) -> Self {
        Self { pairs: vec![(Quat::one(), derivative)], point }
    }

    /// `dΦ̂ = Φ̂'·dζ` for a left G-monogenic map.
    pub fn single_left(point: Point3<T>, derivative: Quat<T>) -> Self {
        Self { pairs: vec![(derivative, Quat::one())], point }
    }

    /// `Σ A_s·dζ·B_s`.
    pub fn apply(&self, dzeta: Quat<T>) -> Quat<T> {
        self.pairs.iter().map(|(a, b)| *a * dzeta * *b).sum()
    }

    /// Hausdorff derivative `Σ A_s·B_s`.
    pub fn derivative(&self) -> Quat<T> {
        self.pairs.iter().map(|(a, b)| *a * *b).sum()
    }

    /// Differential applied to the unit increments `dx`, `dy`, `dz`.
    pub fn directional(&self, frame: &Frame<T>) -> [Quat<T>; 3] {
        frame.dzeta_units().map(|d| self.apply(d))
    }

    /// Largest coordinate deviation between [`Self::directional`] and the
    /// given partials.
    pub fn reconstruction_error(&self, frame: &Frame<T>, partials: &[Quat<T>; 3]) -> T {
        self.directional(frame)
            .iter()
            .zip(partials)
            .map(|(a, b)| (*a - *b).max_abs())
            .fold(T::zero(), T::max)
    }
}

/// Builds the canonical pairs from the span coefficients:
/// `e1`: `(λ1e1, e1)`, `(e3, μ1e4)`; `e2`: `(e4, λ2e3)`, `(μ2e2, e2)`;
/// `e3`: `(e1, λ3e3)`, `(μ3e3, e2)`; `e4`: `(λ4e4, e1)`, `(e2, μ4e4)`.
/// Pairs with a zero coefficient are omitted.
pub fn hausdorff_decomposition<T: Real>(
    cm: &ComponentMap<T>,
    p: Point3<T>,
    tol: T,
) -> Result<HausdorffDecomposition<T>> {
    let test = h_monogenic_test(cm, p, tol)?;
    if !test.h_monogenic {
        return Err(MonogenicError::NotHMonogenic {
            residual: test.max_scaled_residual().to_f64().unwrap_or(f64::NAN),
        }
        .into());
    }
    let e = Quat::<T>::basis;
    let [(l1, m1), (l2, m2), (l3, m3), (l4, m4)] = test.coeffs;
    let candidates = [
        (l1, e(1).scale(&l1), e(1)),
        (m1, e(3), e(4).scale(&m1)),
        (l2, e(4), e(3).scale(&l2)),
        (m2, e(2).scale(&m2), e(2)),
        (l3, e(1), e(3).scale(&l3)),
        (m3, e(3).scale(&m3), e(2)),
        (l4, e(4).scale(&l4), e(1)),
        (m4, e(2), e(4).scale(&m4)),
    ];
    let pairs = candidates
        .into_iter()
        .filter(|(c, _, _)| c.norm() != T::zero())
        .map(|(_, a, b)| (a, b))
        .collect();
    Ok(HausdorffDecomposition { pairs, point: p })
}

/// `Φ'_H(ζ) = ∂Φ/∂x`, defined where the span test passes.
pub fn hausdorff_derivative<T: Real>(cm: &ComponentMap<T>, p: Point3<T>, tol: T) -> Result<Quat<T>> {
    let test = h_monogenic_test(cm, p, tol)?;
    if !test.h_monogenic {
        return Err(MonogenicError::NotHMonogenic {
            residual: test.max_scaled_residual().to_f64().unwrap_or(f64::NAN),
        }
        .into());
    }
    Ok(cm.partials(p)?[0])
}

/// Residual of `dΦ = dζ·∂Φ/∂x` (right) or `dΦ = ∂Φ/∂x·dζ` (left), scaled
/// by `1 + max‖∂Φ‖`.
pub fn one_sided_h_residual<T: Real>(cm: &ComponentMap<T>, p: Point3<T>, side: Side) -> Result<T> {
    let partials = cm.partials(p)?;
    let dec = match side {
        Side::Right => HausdorffDecomposition::single_right(p, partials[0]),
        Side::Left => HausdorffDecomposition::single_left(p, partials[0]),
    };
    Ok(dec.reconstruction_error(&cm.frame, &partials) / (T::one() + max_norm(&partials)))
}

fn max_norm<T: Real>(q: &[Quat<T>]) -> T {
    q.iter().map(Quat::norm).fold(T::zero(), T::max)
}

/// Scaled Cauchy–Riemann residual `max(‖r_y‖, ‖r_z‖) / (1 + max‖∂Φ‖)`, with
/// the unscaled value.
pub fn cr_residual_norm<T: Real>(cm: &ComponentMap<T>, p: Point3<T>, side: Side) -> Result<(T, T)> {
    let (ry, rz) = cr_residual(cm, p, side)?;
    let raw = ry.norm().max(rz.norm());
    let scale = T::one() + max_norm(&cm.partials(p)?);
    Ok((raw / scale, raw))
}

/// Per-point residuals recorded by [`classify`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PointDiagnostics<T> {
    pub point: Point3<T>,
    pub right_cr: T,
    pub left_cr: T,
    pub right_cr_scaled: T,
    pub left_cr_scaled: T,
    pub h_span: T,
    pub right_h: T,
    pub left_h: T,
}

/// Largest scaled residuals over all sample points.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Residuals<T> {
    pub right_cr: T,
    pub left_cr: T,
    pub h_span: T,
    pub right_h: T,
    pub left_h: T,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClassificationReport<T> {
    pub right_g: bool,
    pub left_g: bool,
    pub h: bool,
    pub right_h: bool,
    pub left_h: bool,
    pub residuals: Residuals<T>,
    pub points_tested: usize,
    pub per_point: Vec<PointDiagnostics<T>>,
}

/// Up to `n` low-discrepancy points in `bx` outside the degeneracy tube.
pub fn sample_points<T: Real>(frame: &Frame<T>, bx: &DomainBox<T>, n: usize, seed: u64) -> Vec<Point3<T>> {
    let tube = T::lit(DEGENERACY_TUBE);
    lowdisc::halton3(seed)
        .take(n.saturating_mul(100).max(100))
        .map(|u| bx.lerp(u.map(T::lit)))
        .filter(|p| !frame.is_degenerate(*p, tube))
        .take(n)
        .collect()
}

/// Evaluates every criterion at `n_samples` points and reports verdicts.
///
/// `right_g`/`left_g` come from the Cauchy–Riemann residuals, `h` from the
/// span test, `right_h`/`left_h` from the one-sided differential forms. The
/// implications `right_g ⇒ right_h ⇒ h` and `left_g ⇒ left_h ⇒ h` hold in
/// every report.
pub fn classify<T: Real>(
    cm: &ComponentMap<T>,
    bx: &DomainBox<T>,
    n_samples: usize,
    tol: T,
    seed: u64,
) -> Result<ClassificationReport<T>> {
    let points = sample_points(&cm.frame, bx, n_samples, seed);
    if points.is_empty() {
        return Err(MonogenicError::EmptySampleSet.into());
    }
    let per_point = points
        .par_iter()
        .map(|&p| {
            let (right_cr_scaled, right_cr) = cr_residual_norm(cm, p, Side::Right)?;
            let (left_cr_scaled, left_cr) = cr_residual_norm(cm, p, Side::Left)?;
            let h_span = h_monogenic_test(cm, p, tol)?.max_scaled_residual();
            Ok(PointDiagnostics {
                point: p,
                right_cr,
                left_cr,
                right_cr_scaled,
                left_cr_scaled,
                h_span,
                right_h: one_sided_h_residual(cm, p, Side::Right)?,
                left_h: one_sided_h_residual(cm, p, Side::Left)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let max_of = |f: fn(&PointDiagnostics<T>) -> T| per_point.iter().map(f).fold(T::zero(), T::max);
    let residuals = Residuals {
        right_cr: max_of(|d| d.right_cr_scaled),
        left_cr: max_of(|d| d.left_cr_scaled),
        h_span: max_of(|d| d.h_span),
        right_h: max_of(|d| d.right_h),
        left_h: max_of(|d| d.left_h),
    };
    let h = residuals.h_span <= tol;
    let right_h = h && residuals.right_h <= tol;
    let left_h = h && residuals.left_h <= tol;
    Ok(ClassificationReport {
        right_g: right_h && residuals.right_cr <= tol,
        left_g: left_h && residuals.left_cr <= tol,
        h,
        right_h,
        left_h,
        residuals,
        points_tested: per_point.len(),
        per_point,
    })
}

/// Orthonormal pair spanning the plane orthogonal to the unit vector `d`.
fn complement_basis<T: Real>(d: Point3<T>) -> (Point3<T>, Point3<T>) {
    let helper = if d.x.abs() < T::lit(0.9) {
        Point3::new(T::one(), T::zero(), T::zero())
    } else {
        Point3::new(T::zero(), T::one(), T::zero())
    };
    let u = d.cross(helper);
    let u = u * (T::one() / u.norm());
    let v = d.cross(u);
    (u, v)
}

/// Complex least squares `min ‖A c − b‖` by modified Gram–Schmidt with one
/// reorthogonalization pass.
fn complex_lstsq<T: Real>(cols: &[Vec<Complex<T>>], b: &[Complex<T>]) -> Vec<Complex<T>> {
    let n = cols.len();
    let mut q: Vec<Vec<Complex<T>>> = Vec::with_capacity(n);
    let mut r = vec![vec![czero::<T>(); n]; n];
    for (j, col) in cols.iter().enumerate() {
        let mut v = col.clone();
        for _pass in 0..2 {
            for (i, qi) in q.iter().enumerate() {
                let proj = qi.iter().zip(&v).fold(czero(), |s, (a, b)| s + a.conj() * b);
                r[i][j] += proj;
                for (vk, qk) in v.iter_mut().zip(qi) {
                    *vk -= *qk * proj;
                }
            }
        }
        let norm = v.iter().map(|c| c.norm_sqr()).fold(T::zero(), |a, b| a + b).sqrt();
        r[j][j] = Complex::new(norm, T::zero());
        let inv = if norm > T::zero() { T::one() / norm } else { T::zero() };
        q.push(v.into_iter().map(|c| c * inv).collect());
    }
    let qtb: Vec<Complex<T>> = q
        .iter()
        .map(|qi| qi.iter().zip(b).fold(czero(), |s, (a, bb)| s + a.conj() * bb))
        .collect();
    let mut x = vec![czero::<T>(); n];
    for i in (0..n).rev() {
        let mut s = qtb[i];
        for k in i + 1..n {
            s -= r[i][k] * x[k];
        }
        x[i] = if r[i][i].re > T::zero() { s / r[i][i] } else { czero() };
    }
    x
}

/// Representability check: for each component, fit a polynomial of degree
/// [`FIBER_FIT_DEGREE`] in the variable the side's pattern assigns to it,
/// using samples on a disc transverse to that variable's fiber, then compare
/// against the component at points moved along the fiber.
///
/// Returns the largest relative misfit; a map is representable in the
/// side's form when this is at most [`REPRESENTABILITY_TOL`].
pub fn representability_residual<T: Real>(
    cm: &ComponentMap<T>,
    p0: Point3<T>,
    side: Side,
    radius: T,
    seed: u64,
) -> Result<T> {
    let (l1, l2) = cm.frame.degeneracy_lines()?;
    let (x10, x20) = cm.frame.xi(p0);
    let pattern = side.pattern();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = T::zero();
    for (k, comp) in cm.comps.iter().enumerate() {
        let (fiber, center, which) = if pattern[k] == 1 {
            (l1.direction, x10, 0)
        } else {
            (l2.direction, x20, 1)
        };
        let (u, v) = complement_basis(fiber);
        let own = |p: Point3<T>| {
            let (a, b) = cm.frame.xi(p);
            if which == 0 {
                a
            } else {
                b
            }
        };
        let mut train = vec![p0];
        for ring in [0.35, 0.7, 1.0] {
            for j in 0..12 {
                let ang = T::lit(std::f64::consts::TAU * (j as f64 + 0.5 * ring) / 12.0);
                let rr = radius * T::lit(ring);
                train.push(p0 + u * (rr * ang.cos()) + v * (rr * ang.sin()));
            }
        }
        let rho = train
            .iter()
            .map(|p| (own(*p) - center).norm())
            .fold(T::zero(), T::max)
            .max(T::min_positive_value());
        let s_of = |p: Point3<T>| (own(p) - center) / rho;
        let values = train
            .iter()
            .map(|p| comp.value(&cm.frame, *p))
            .collect::<Result<Vec<_>>>()?;
        let cols: Vec<Vec<Complex<T>>> = (0..=FIBER_FIT_DEGREE)
            .map(|d| train.iter().map(|p| s_of(*p).powi(d as i32)).collect())
            .collect();
        let poly = complex_lstsq(&cols, &values);
        let eval_poly = |s: Complex<T>| poly.iter().rev().fold(czero::<T>(), |acc, c| acc * s + c);
        let mut scale = values.iter().map(|c| c.norm()).fold(T::zero(), T::max);
        let mut misfit = T::zero();
        for _ in 0..24 {
            let r = radius * T::lit(rng.gen_range(0.0..0.9));
            let ang = T::lit(rng.gen_range(0.0..std::f64::consts::TAU));
            let t = radius * T::lit(rng.gen_range(-1.0..1.0));
            let p = p0 + u * (r * ang.cos()) + v * (r * ang.sin()) + fiber * t;
            let actual = comp.value(&cm.frame, p)?;
            scale = scale.max(actual.norm());
            misfit = misfit.max((eval_poly(s_of(p)) - actual).norm());
        }
        worst = worst.max(misfit / (T::one() + scale));
    }
    Ok(worst)
}

/// Power-series check: take the candidate analytic functions from the
/// components frozen on the fibers through `p0`, expand them to `order`, and
/// compare the series against the map at probes within `radius` of `p0`.
///
/// Returns `None` for maps with raw components.
pub fn taylor_residual<T: Real>(
    cm: &ComponentMap<T>,
    p0: Point3<T>,
    side: Side,
    order: usize,
    radius: T,
    seed: u64,
) -> Result<Option<T>> {
    let Some(exprs) = cm.comps.iter().map(Component::as_expr).collect::<Option<Vec<_>>>() else {
        return Ok(None);
    };
    if order > crate::analytic::MAX_TAYLOR_ORDER {
        return Err(EvalError::TooManyTerms {
            requested: order,
            max: crate::analytic::MAX_TAYLOR_ORDER,
        }
        .into());
    }
    let (x10, x20) = cm.frame.xi(p0);
    let len = order + 1;
    let frozen = |c: Complex<T>| {
        let mut v = vec![czero(); len];
        v[0] = c;
        v
    };
    let pattern = side.pattern();
    let mut cols = Vec::with_capacity(4);
    for (e, &j) in exprs.iter().zip(&pattern) {
        let vars = if j == 1 {
            [variable_jet(x10, len), frozen(x20)]
        } else {
            [frozen(x10), variable_jet(x20, len)]
        };
        cols.push(e.eval_jet(&vars)?);
    }
    let coeffs: Vec<Quat<T>> = (0..len)
        .map(|n| Quat::new(cols[0][n], cols[1][n], cols[2][n], cols[3][n]))
        .collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = T::zero();
    for _ in 0..16 {
        let dir = Point3::new(
            T::lit(rng.gen_range(-1.0..1.0)),
            T::lit(rng.gen_range(-1.0..1.0)),
            T::lit(rng.gen_range(-1.0..1.0)),
        );
        let n = dir.norm().max(T::lit(1e-3));
        let p = p0 + dir * (radius * T::lit(rng.gen_range(0.2..1.0)) / n);
        let actual = cm.value(p)?;
        let series = eval_taylor(&coeffs, &cm.frame, p0, p, side);
        worst = worst.max((series - actual).norm() / (T::one() + actual.norm()));
    }
    Ok(Some(worst))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::{AnalyticFn64, ComponentMap64, Frame64, Point64, Quat64, RightGMap64};

    type C = Complex<f64>;

    fn c(re: f64, im: f64) -> C {
        C::new(re, im)
    }

    fn frame() -> Frame64 {
        Frame::new(c(0., 1.), c(0., -1.), c(1., 1.), c(1., -1.))
    }

    fn mixed_map() -> ComponentMap64 {
        ComponentMap::parse(frame(), ["exp(xi1)+xi2^2", "xi1*sin(xi2)", "xi2^2", "exp(xi1)"]).unwrap()
    }

    fn square_map() -> RightGMap64 {
        RightGMap::parse(frame(), ["z^2", "z^2", "0", "0"]).unwrap()
    }

    const P: Point64 = Point3 { x: 0.3, y: -0.2, z: 0.45 };

    #[test]
    fn identity_map_value_is_embedding() {
        let m = RightGMap::parse(frame(), ["z", "z", "0", "0"]).unwrap();
        assert_eq!(m.value(P).unwrap(), frame().embed(P));
    }

    #[test]
    fn square_map_value_and_derivative() {
        let m = square_map();
        let zeta = frame().embed(P);
        assert!(m.value(P).unwrap().approx_eq(&(zeta * zeta), 1e-15));
        let (x1, x2) = frame().xi(P);
        let expect = Quat::new(x1 * 2.0, x2 * 2.0, c(0., 0.), c(0., 0.));
        assert!(m.gateaux(P).unwrap().approx_eq(&expect, 1e-15));
        let k = RightGMap::parse(frame(), ["3", "i", "2*i", "-1"]).unwrap();
        assert!(k.gateaux(P).unwrap().is_zero());
    }

    #[test]
    fn gateaux_residual_examples() {
        let lin = RightGMap::parse(frame(), ["z", "z", "0", "0"]).unwrap();
        let h = Point3::new(0.25, 0.5, -0.125);
        let eps = [0.5, 0.25, 0.125];
        for r in gateaux_limit_residual(&lin, P, h, &eps).unwrap() {
            assert!(r < 1e-15, "{r}");
        }
        let r = gateaux_limit_residual(&square_map(), P, h, &[1e-2, 5e-3]).unwrap();
        assert!((r[0] / r[1] - 2.0).abs() < 1e-6, "{r:?}");
        let r = gateaux_limit_residual(&square_map(), P, Point3::origin(), &[0.1]).unwrap();
        assert_eq!(r, vec![0.0]);
    }

    #[test]
    fn mixed_map_matches_hand_evaluation() {
        let cm = mixed_map();
        for k in 0..10 {
            let p = Point3::new(0.1 * k as f64 - 0.4, 0.07 * k as f64, 0.3 - 0.05 * k as f64);
            let (x1, x2) = frame().xi(p);
            let expect = Quat::new(x1.exp() + x2 * x2, x1 * x2.sin(), x2 * x2, x1.exp());
            assert!(cm.value(p).unwrap().approx_eq(&expect, 1e-14));
        }
    }

    #[test]
    fn cr_residuals() {
        let cm = RightGMap::parse(frame(), ["exp(z)", "z^3", "sin(z)", "z"]).unwrap().to_component_map();
        let (a, b) = cr_residual(&cm, P, Side::Right).unwrap();
        assert!(a.norm() < 1e-14 && b.norm() < 1e-14);
        let ex = mixed_map();
        let (a, b) = cr_residual(&ex, P, Side::Right).unwrap();
        assert!(a.norm().max(b.norm()) > 1e-2);
        let (a, b) = cr_residual(&ex, P, Side::Left).unwrap();
        assert!(a.norm().max(b.norm()) > 1e-2);
        let k = ComponentMap::constant(frame(), Quat64::e3());
        let (a, b) = cr_residual(&k, P, Side::Left).unwrap();
        assert!(a.is_zero() && b.is_zero());
    }

    #[test]
    fn h_test_mixed_map_coefficients() {
        let cm = mixed_map();
        let t = h_monogenic_test(&cm, P, 1e-10).unwrap();
        assert!(t.h_monogenic);
        let (x1, x2) = frame().xi(P);
        let (l1, m1) = t.coeffs[0];
        assert!((l1 - x1.exp()).norm() < 1e-13 && (m1 - x2 * 2.0).norm() < 1e-13);
        let (l2, m2) = t.coeffs[1];
        assert!((l2 - x2.sin()).norm() < 1e-13 && (m2 - x1 * x2.cos()).norm() < 1e-13);
    }

    #[test]
    fn h_test_rejects_coordinate_x() {
        let cm = ComponentMap::new(
            frame(),
            [Component::raw(|p: Point64| c(p.x, 0.)), Component::zero(), Component::zero(), Component::zero()],
        );
        let t = h_monogenic_test(&cm, P, 1e-8).unwrap();
        assert!(!t.h_monogenic);
        assert!(matches!(
            hausdorff_decomposition(&cm, P, 1e-8),
            Err(crate::Error::Monogenic(MonogenicError::NotHMonogenic { .. }))
        ));
    }

    #[test]
    fn h_test_rank_deficient_frame() {
        let fr = Frame::new(c(0., 1.), c(0., 1.), c(1., 0.), c(1., 0.));
        let cm = ComponentMap::constant(fr, Quat64::one());
        assert!(matches!(
            h_monogenic_test(&cm, P, 1e-8),
            Err(crate::Error::Monogenic(MonogenicError::RankDeficientFrame))
        ));
    }

    #[test]
    fn decomposition_reproduces_mixed_map_terms() {
        let cm = mixed_map();
        let dec = hausdorff_decomposition(&cm, P, 1e-10).unwrap();
        let (x1, x2) = frame().xi(P);
        let e = Quat64::basis;
        // the six displayed terms: A dζ B
        let displayed = [
            (e(1).scale(&x1.exp()), e(1)),
            (e(2).scale(&(x1 * x2.cos())), e(2)),
            (e(3).scale(&(x2 * 2.0)), e(2)),
            (e(4).scale(&x1.exp()), e(1)),
            (e(3).scale(&(x2 * 2.0)), e(4)),
            (e(4).scale(&x2.sin()), e(3)),
        ];
        let reference = HausdorffDecomposition { pairs: displayed.to_vec(), point: P };
        for d in frame().dzeta_units() {
            assert!(dec.apply(d).approx_eq(&reference.apply(d), 1e-13));
        }
        assert!(dec.derivative().approx_eq(&reference.derivative(), 1e-13));
        let partials = cm.partials(P).unwrap();
        assert!(dec.reconstruction_error(&frame(), &partials) < 1e-13);
        assert!(dec.derivative().approx_eq(&partials[0], 1e-13));
    }

    #[test]
    fn decomposition_of_right_map_and_zero_map() {
        let m = RightGMap::parse(frame(), ["exp(z)", "z^2", "z^3", "sin(z)"]).unwrap();
        let cm = m.to_component_map();
        let single = HausdorffDecomposition::single_right(P, m.gateaux(P).unwrap());
        let built = hausdorff_decomposition(&cm, P, 1e-10).unwrap();
        for d in frame().dzeta_units() {
            assert!(single.apply(d).approx_eq(&built.apply(d), 1e-13));
        }
        let zero = ComponentMap::constant(frame(), Quat64::zero());
        let dec = hausdorff_decomposition(&zero, P, 1e-10).unwrap();
        assert!(dec.pairs.is_empty());
        assert!(dec.apply(Quat64::one()).is_zero());
    }

    #[test]
    fn hausdorff_derivative_examples() {
        let cm = mixed_map();
        let (x1, x2) = frame().xi(P);
        let expect = Quat::new(x1.exp() + x2 * 2.0, x2.sin() + x1 * x2.cos(), x2 * 2.0, x1.exp());
        assert!(hausdorff_derivative(&cm, P, 1e-10).unwrap().approx_eq(&expect, 1e-13));
        let sq = square_map();
        let d = hausdorff_derivative(&sq.to_component_map(), P, 1e-10).unwrap();
        assert!(d.approx_eq(&(frame().embed(P).scale(&c(2., 0.))), 1e-14));
        let k = ComponentMap::constant(frame(), Quat64::e4());
        assert!(hausdorff_derivative(&k, P, 1e-10).unwrap().is_zero());
    }

    #[test]
    fn product_with_identity_and_frame_mismatch() {
        let cm = mixed_map();
        let one = ComponentMap::constant(frame(), Quat64::one());
        let prod = cm.product(&one).unwrap();
        for (a, b) in prod.comps.iter().zip(&cm.comps) {
            assert_eq!(a.as_expr(), b.as_expr());
        }
        let other = ComponentMap::constant(Frame::new(c(0., 2.), c(0., -1.), c(1., 1.), c(1., -1.)), Quat64::one());
        assert!(matches!(
            cm.product(&other),
            Err(crate::Error::Monogenic(MonogenicError::FrameMismatch))
        ));
    }

    #[test]
    fn taylor_of_square_map() {
        let m = square_map();
        let coeffs = m.taylor_expand(Point3::origin(), 4).unwrap();
        assert!(coeffs[0].is_zero() && coeffs[1].is_zero());
        assert_eq!(coeffs[2], Quat64::one());
        assert!(coeffs[3].is_zero() && coeffs[4].is_zero());
        let v = eval_taylor(&coeffs, &frame(), Point3::origin(), P, Side::Right);
        assert!(v.approx_eq(&m.value(P).unwrap(), 1e-14));
    }

    #[test]
    fn left_taylor_places_coefficients_by_pattern() {
        let m = LeftGMap::parse(frame(), ["z", "z^2", "exp(z)", "z^3"]).unwrap();
        let p0 = Point3::new(0.1, 0.2, -0.1);
        let coeffs = m.taylor_expand(p0, 30).unwrap();
        let v = eval_taylor(&coeffs, &frame(), p0, P, Side::Left);
        assert!(v.approx_eq(&m.value(P).unwrap(), 1e-12));
        let wrong = eval_taylor(&coeffs, &frame(), p0, P, Side::Right);
        assert!(!wrong.approx_eq(&m.value(P).unwrap(), 1e-3));
    }

    #[test]
    fn zeta_power_matches_repeated_multiplication() {
        let (p0, p) = (Point3::new(0.2, -0.1, 0.3), Point3::new(-0.4, 0.5, 0.1));
        let d = frame().embed(p) - frame().embed(p0);
        let mut acc = Quat64::one();
        for n in 0..8 {
            assert!(zeta_power(&frame(), p0, p, n).approx_eq(&acc, 1e-14));
            acc = acc * d;
        }
    }

    #[test]
    fn classify_mixed_map() {
        let r = classify(&mixed_map(), &DomainBox::cube(1.0), 20, 1e-9, 0).unwrap();
        assert!(r.h && !r.right_g && !r.left_g && !r.right_h && !r.left_h);
        assert_eq!(r.points_tested, 20);
    }

    #[test]
    fn classify_right_map() {
        let cm = RightGMap::parse(frame(), ["exp(z)", "z^2", "z^3 - z", "sin(z)"]).unwrap().to_component_map();
        let r = classify(&cm, &DomainBox::cube(1.0), 30, 1e-9, 3).unwrap();
        assert!(r.right_g && r.right_h && r.h && !r.left_g && !r.left_h);
    }

    #[test]
    fn classify_broken_map() {
        let cm = ComponentMap::new(
            frame(),
            [Component::raw(|p: Point64| c(p.x, 0.)), Component::zero(), Component::zero(), Component::zero()],
        );
        let r = classify(&cm, &DomainBox::cube(1.0), 20, 1e-7, 0).unwrap();
        assert!(!r.h && !r.right_g && !r.left_g && !r.right_h && !r.left_h);
    }

    #[test]
    fn classify_is_deterministic() {
        let a = classify(&mixed_map(), &DomainBox::cube(1.0), 40, 1e-9, 11).unwrap();
        let b = classify(&mixed_map(), &DomainBox::cube(1.0), 40, 1e-9, 11).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn classify_empty_box_has_no_samples() {
        let bx = DomainBox::new(Point3::origin(), Point3::origin()).unwrap();
        assert!(matches!(
            classify(&mixed_map(), &bx, 10, 1e-9, 0),
            Err(crate::Error::Monogenic(MonogenicError::EmptySampleSet))
        ));
    }

    #[test]
    fn representability_and_taylor_criteria() {
        let p0 = Point3::new(0.2, 0.1, -0.3);
        let right = RightGMap::parse(frame(), ["exp(z)", "z^2", "z^3 - z", "sin(z)"]).unwrap().to_component_map();
        assert!(representability_residual(&right, p0, Side::Right, 0.05, 1).unwrap() < REPRESENTABILITY_TOL);
        assert!(representability_residual(&right, p0, Side::Left, 0.05, 1).unwrap() > 1e-4);
        let t = taylor_residual(&right, p0, Side::Right, 24, 0.05, 1).unwrap().unwrap();
        assert!(t < 1e-12, "{t}");
        assert!(taylor_residual(&right, p0, Side::Left, 24, 0.05, 1).unwrap().unwrap() > 1e-4);
        let ex = mixed_map();
        assert!(representability_residual(&ex, p0, Side::Right, 0.05, 1).unwrap() > 1e-4);
        assert!(taylor_residual(&ex, p0, Side::Right, 24, 0.05, 1).unwrap().unwrap() > 1e-4);
    }

    #[test]
    fn fiber_constancy_of_right_map() {
        let fr = Frame::new(c(0., 1.), c(0., 2.), c(1., 1.), c(1., -1.));
        let m = RightGMap::parse(fr, ["exp(z)", "z^2", "z^3 - z", "sin(z)"]).unwrap();
        let (l1, l2) = fr.degeneracy_lines().unwrap();
        for t in [0.1, 0.3, -0.2] {
            let q = P + l1.direction * t;
            assert!((fr.xi(q).0 - fr.xi(P).0).norm() < 1e-14);
            assert!((fr.xi(q).1 - fr.xi(P).1).norm() > 1e-3);
            let (a, b) = (m.value(P).unwrap(), m.value(q).unwrap());
            assert!((a.f1() - b.f1()).norm() < 1e-13);
            let q = P + l2.direction * t;
            let b = m.value(q).unwrap();
            assert!((a.f2() - b.f2()).norm() < 1e-13);
        }
    }

    #[test]
    fn f32_maps() {
        let fr: crate::Frame32 = Frame::new(
            Complex::new(0., 1.),
            Complex::new(0., -1.),
            Complex::new(1., 1.),
            Complex::new(1., -1.),
        );
        let m = RightGMap::<f32>::parse(fr, ["z^2", "z", "0", "1"]).unwrap();
        let cm = m.to_component_map();
        let p = Point3::new(0.3f32, -0.2, 0.45);
        let (a, b) = cr_residual(&cm, p, Side::Right).unwrap();
        assert!(a.norm() < 1e-6 && b.norm() < 1e-6);
        let _: AnalyticFn64 = AnalyticFn::identity();
    }
}
