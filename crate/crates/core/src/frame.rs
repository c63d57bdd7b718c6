//! Geometry of the subspace `E3 = {x + y·i2 + z·i3}`.
//!
//! A [`Frame`] holds the coefficients of `i2 = a1·e1 + a2·e2` and
//! `i3 = b1·e1 + b2·e2`. Points of `R³` embed as `ζ = ξ1·e1 + ξ2·e2` with
//! `ξ1 = x + y·a1 + z·b1` and `ξ2 = x + y·a2 + z·b2`.

use std::ops::{Add, Mul, Sub};

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::algebra::Quat;
use crate::Real;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum FrameError {
    #[error("degenerate pencil for {label:?}: Im a and Im b both vanish, the solution set is a plane")]
    DegeneratePencil { label: LineLabel },
    #[error("invalid domain box: min must be <= max componentwise")]
    InvalidBox,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Frame<T> {
    pub a1: Complex<T>,
    pub a2: Complex<T>,
    pub b1: Complex<T>,
    pub b2: Complex<T>,
}

/// Point of `R³`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Point3<T> {
    pub x: T,
    pub y: T,
    pub z: T,
}

impl<T: Serialize> Serialize for Point3<T> {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        (&self.x, &self.y, &self.z).serialize(s)
    }
}

impl<'de, T: Deserialize<'de>> Deserialize<'de> for Point3<T> {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let (x, y, z) = <(T, T, T)>::deserialize(d)?;
        Ok(Self { x, y, z })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum LineLabel {
    L1,
    L2,
}

/// Line through `anchor` with unit `direction`, on which `ξ1` (for `L1`) or
/// `ξ2` (for `L2`) vanishes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DegeneracyLine<T> {
    pub anchor: Point3<T>,
    pub direction: Point3<T>,
    pub label: LineLabel,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ValidationReport {
    /// `{1, i2, i3}` linearly independent over the reals.
    pub independent: bool,
    /// `f1(E3) = f2(E3) = C`.
    pub surjective: bool,
    /// Real rank of the 3×4 coordinate matrix of `{1, i2, i3}`.
    pub rank: usize,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.independent && self.surjective
    }
}

/// Axis-aligned box in `R³`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DomainBox<T> {
    pub min: Point3<T>,
    pub max: Point3<T>,
}

impl<T> From<[T; 3]> for Point3<T> {
    fn from([x, y, z]: [T; 3]) -> Self {
        Self { x, y, z }
    }
}

impl<T> From<Point3<T>> for [T; 3] {
    fn from(p: Point3<T>) -> Self {
        [p.x, p.y, p.z]
    }
}

impl<T: Real> Point3<T> {
    pub fn new(x: T, y: T, z: T) -> Self {
        Self { x, y, z }
    }

    pub fn origin() -> Self {
        Self::new(T::zero(), T::zero(), T::zero())
    }

    pub fn to_array(self) -> [T; 3] {
        [self.x, self.y, self.z]
    }

    pub fn dot(self, o: Self) -> T {
        self.x * o.x + self.y * o.y + self.z * o.z
    }

    pub fn cross(self, o: Self) -> Self {
        Self::new(
            self.y * o.z - self.z * o.y,
            self.z * o.x - self.x * o.z,
            self.x * o.y - self.y * o.x,
        )
    }

    pub fn norm(self) -> T {
        self.dot(self).sqrt()
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite() && self.z.is_finite()
    }
}

impl<T: Real> Add for Point3<T> {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Self::new(self.x + o.x, self.y + o.y, self.z + o.z)
    }
}

impl<T: Real> Sub for Point3<T> {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        Self::new(self.x - o.x, self.y - o.y, self.z - o.z)
    }
}

impl<T: Real> Mul<T> for Point3<T> {
    type Output = Self;
    fn mul(self, s: T) -> Self {
        Self::new(self.x * s, self.y * s, self.z * s)
    }
}

impl<T: Real> Frame<T> {
    pub fn new(a1: Complex<T>, a2: Complex<T>, b1: Complex<T>, b2: Complex<T>) -> Self {
        Self { a1, a2, b1, b2 }
    }

    /// `i2 = a1·e1 + a2·e2`.
    pub fn i2(&self) -> Quat<T> {
        Quat::new(self.a1, self.a2, Complex::default(), Complex::default())
    }

    /// `i3 = b1·e1 + b2·e2`.
    pub fn i3(&self) -> Quat<T> {
        Quat::new(self.b1, self.b2, Complex::default(), Complex::default())
    }

    /// `dζ` for the unit increments `dx`, `dy`, `dz`: `[1, i2, i3]`.
    pub fn dzeta_units(&self) -> [Quat<T>; 3] {
        [Quat::one(), self.i2(), self.i3()]
    }

    /// `dζ = dx + dy·i2 + dz·i3`.
    pub fn dzeta(&self, d: Point3<T>) -> Quat<T> {
        self.embed(d)
    }

    /// Gradient of `ξ_k` in `(x, y, z)`: `(1, a_k, b_k)`.
    pub fn xi_gradient(&self, k: usize) -> [Complex<T>; 3] {
        let one = Complex::new(T::one(), T::zero());
        match k {
            1 => [one, self.a1, self.b1],
            2 => [one, self.a2, self.b2],
            _ => panic!("xi index must be 1 or 2, got {k}"),
        }
    }

    /// `(ξ1, ξ2)` at `p`.
    pub fn xi(&self, p: Point3<T>) -> (Complex<T>, Complex<T>) {
        let re = |v: T| Complex::new(v, T::zero());
        (
            re(p.x) + self.a1 * p.y + self.b1 * p.z,
            re(p.x) + self.a2 * p.y + self.b2 * p.z,
        )
    }

    /// `ζ = ξ1·e1 + ξ2·e2`.
    pub fn embed(&self, p: Point3<T>) -> Quat<T> {
        let (x1, x2) = self.xi(p);
        Quat::new(x1, x2, Complex::default(), Complex::default())
    }

    /// Rows `1, i2, i3` as real 4-vectors `(Re c1, Im c1, Re c2, Im c2)`.
    fn real_coordinate_matrix(&self) -> [[T; 4]; 3] {
        let (o, z) = (T::one(), T::zero());
        [
            [o, z, o, z],
            [self.a1.re, self.a1.im, self.a2.re, self.a2.im],
            [self.b1.re, self.b1.im, self.b2.re, self.b2.im],
        ]
    }

    pub fn validate(&self) -> ValidationReport {
        let rank = real_rank(self.real_coordinate_matrix());
        let surjective = (self.a1.im != T::zero() || self.b1.im != T::zero())
            && (self.a2.im != T::zero() || self.b2.im != T::zero());
        ValidationReport {
            independent: rank == 3,
            surjective,
            rank,
        }
    }

    /// The lines `L1: ξ1 = 0` and `L2: ξ2 = 0`, both through the origin.
    ///
    /// Directions are unit vectors with their first nonzero coordinate
    /// positive.
    pub fn degeneracy_lines(&self) -> Result<(DegeneracyLine<T>, DegeneracyLine<T>), FrameError> {
        let line = |a: Complex<T>, b: Complex<T>, label| {
            if a.im == T::zero() && b.im == T::zero() {
                return Err(FrameError::DegeneratePencil { label });
            }
            let r1 = Point3::new(T::one(), a.re, b.re);
            let r2 = Point3::new(T::zero(), a.im, b.im);
            let d = r1.cross(r2);
            let n = d.norm();
            let mut d = d * (T::one() / n);
            let first = [d.x, d.y, d.z]
                .into_iter()
                .find(|v| v.abs() > T::epsilon())
                .unwrap_or(T::one());
            if first < T::zero() {
                d = d * (-T::one());
            }
            Ok(DegeneracyLine {
                anchor: Point3::origin(),
                direction: d,
                label,
            })
        };
        Ok((
            line(self.a1, self.b1, LineLabel::L1)?,
            line(self.a2, self.b2, LineLabel::L2)?,
        ))
    }

    /// `true` iff `min(|ξ1|, |ξ2|) <= tol`, i.e. `embed(p)` is (nearly)
    /// non-invertible.
    pub fn is_degenerate(&self, p: Point3<T>, tol: T) -> bool {
        let (x1, x2) = self.xi(p);
        x1.norm().min(x2.norm()) <= tol
    }

    /// `ξ1`- and `ξ2`-images of an `n³` grid over `bx`.
    pub fn image_domains(&self, bx: &DomainBox<T>, n: usize) -> (Vec<Complex<T>>, Vec<Complex<T>>) {
        bx.grid(n).into_iter().map(|p| self.xi(p)).unzip()
    }
}

impl<T: Real> DegeneracyLine<T> {
    pub fn point_at(&self, t: T) -> Point3<T> {
        self.anchor + self.direction * t
    }
}

impl<T: Real> DomainBox<T> {
    pub fn new(min: Point3<T>, max: Point3<T>) -> Result<Self, FrameError> {
        if min.x <= max.x && min.y <= max.y && min.z <= max.z {
            Ok(Self { min, max })
        } else {
            Err(FrameError::InvalidBox)
        }
    }

    /// `[-h, h]³`.
    pub fn cube(h: T) -> Self {
        Self {
            min: Point3::new(-h, -h, -h),
            max: Point3::new(h, h, h),
        }
    }

    pub fn contains(&self, p: Point3<T>) -> bool {
        (self.min.x..=self.max.x).contains(&p.x)
            && (self.min.y..=self.max.y).contains(&p.y)
            && (self.min.z..=self.max.z).contains(&p.z)
    }

    pub fn center(&self) -> Point3<T> {
        (self.min + self.max) * T::lit(0.5)
    }

    pub fn extent(&self) -> Point3<T> {
        self.max - self.min
    }

    /// Distance from `p` to the nearest face (negative outside).
    pub fn distance_to_boundary(&self, p: Point3<T>) -> T {
        [
            p.x - self.min.x,
            self.max.x - p.x,
            p.y - self.min.y,
            self.max.y - p.y,
            p.z - self.min.z,
            self.max.z - p.z,
        ]
        .into_iter()
        .fold(T::infinity(), T::min)
    }

    /// Maps unit-cube coordinates `u ∈ [0,1]³` into the box.
    pub fn lerp(&self, u: [T; 3]) -> Point3<T> {
        let e = self.extent();
        Point3::new(self.min.x + e.x * u[0], self.min.y + e.y * u[1], self.min.z + e.z * u[2])
    }

    /// Uniform `n³` grid including the corners; `n = 1` gives the center.
    pub fn grid(&self, n: usize) -> Vec<Point3<T>> {
        assert!(n >= 1, "grid needs at least one point per axis");
        let coord = |i: usize| {
            if n == 1 {
                T::lit(0.5)
            } else {
                T::from_usize(i).unwrap() / T::from_usize(n - 1).unwrap()
            }
        };
        let mut out = Vec::with_capacity(n * n * n);
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    out.push(self.lerp([coord(i), coord(j), coord(k)]));
                }
            }
        }
        out
    }
}

/// Rank by Gaussian elimination with partial pivoting, relative threshold.
fn real_rank<T: Real, const R: usize, const C: usize>(mut m: [[T; C]; R]) -> usize {
    let scale = m
        .iter()
        .flatten()
        .fold(T::zero(), |acc, v| acc.max(v.abs()))
        .max(T::min_positive_value());
    let tol = scale * T::lit(1e-12);
    let mut rank = 0;
    for col in 0..C {
        if rank == R {
            break;
        }
        let piv = (rank..R)
            .max_by(|&a, &b| m[a][col].abs().partial_cmp(&m[b][col].abs()).unwrap())
            .unwrap();
        if m[piv][col].abs() <= tol {
            continue;
        }
        m.swap(rank, piv);
        for r in rank + 1..R {
            let f = m[r][col] / m[rank][col];
            for k in col..C {
                let v = m[rank][k];
                m[r][k] -= f * v;
            }
        }
        rank += 1;
    }
    rank
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::{Frame64, Point64};
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Complex<f64> {
        Complex::new(re, im)
    }

    fn standard() -> Frame64 {
        Frame::new(c(0., 1.), c(0., -1.), c(1., 1.), c(1., -1.))
    }

    #[test]
    fn validate_examples() {
        let r = Frame::new(c(0., 1.), c(0., 1.), c(1., 0.), c(-1., 0.)).validate();
        assert!(r.independent && r.surjective);
        let r = Frame::new(c(1., 0.), c(1., 0.), c(2., 0.), c(2., 0.)).validate();
        assert!(!r.independent);
        assert!(!r.surjective);
        let r = Frame::new(c(0., 1.), c(0., 2.), c(2., 0.), c(3., 0.)).validate();
        assert!(r.surjective);
        let r = Frame::new(c(0., 1.), c(1., 0.), c(2., 0.), c(3., 0.)).validate();
        assert!(!r.surjective);
    }

    #[test]
    fn xi_examples() {
        let fr = standard();
        assert_eq!(fr.xi(Point3::new(1., 0., 0.)), (c(1., 0.), c(1., 0.)));
        assert_eq!(fr.xi(Point3::new(1., 1., 1.)), (c(2., 2.), c(2., -2.)));
        let p = Point3::new(0.3, -0.7, 1.1);
        let zeta = fr.embed(p);
        assert_eq!(fr.xi(p), (zeta.f1(), zeta.f2()));
        assert_eq!(fr.xi(p), (zeta.f1_hat(), zeta.f2_hat()));
        assert!(fr.embed(Point3::origin()).is_zero());
    }

    #[test]
    fn degeneracy_line_example() {
        let fr = Frame::new(c(0., 1.), c(0., 1.), c(1., 0.), c(-1., 0.));
        let (l1, l2) = fr.degeneracy_lines().unwrap();
        let s = 1.0 / 2f64.sqrt();
        let d = l1.direction;
        assert!((d.x - s).abs() < 1e-15 && d.y.abs() < 1e-15 && (d.z + s).abs() < 1e-15, "{d:?}");
        assert_eq!(l1.label, LineLabel::L1);
        assert_eq!(l2.label, LineLabel::L2);
        assert_eq!(l1.anchor, Point3::origin());
        assert!(fr.is_degenerate(Point3::origin(), 0.0));
    }

    #[test]
    fn degenerate_pencil_is_an_error() {
        let fr = Frame::new(c(2., 0.), c(0., 1.), c(3., 0.), c(1., 0.));
        assert_eq!(
            fr.degeneracy_lines(),
            Err(FrameError::DegeneratePencil { label: LineLabel::L1 })
        );
    }

    #[test]
    fn not_degenerate_when_xi_is_one() {
        let fr = standard();
        assert!(!fr.is_degenerate(Point3::new(1., 0., 0.), 1e-6));
    }

    #[test]
    fn image_domains_examples() {
        // identity-like frame: xi1 = x + i y, so the image of the unit box is the unit square
        let fr = Frame::new(c(0., 1.), c(0., -1.), c(0., 0.), c(0., 0.));
        let bx = DomainBox::new(Point3::origin(), Point3::new(1., 1., 0.)).unwrap();
        let (d1, _) = fr.image_domains(&bx, 3);
        assert_eq!(d1.len(), 27);
        for v in &d1 {
            assert!((0.0..=1.0).contains(&v.re) && (0.0..=1.0).contains(&v.im));
        }
        assert!(d1.contains(&c(1., 1.)) && d1.contains(&c(0., 0.)) && d1.contains(&c(0.5, 0.5)));
        let (single, _) = standard().image_domains(&DomainBox::cube(1.0), 1);
        assert_eq!(single, vec![c(0., 0.)]);
        let (d1, d2) = standard().image_domains(&DomainBox::cube(1.0), 3);
        assert!(d1.contains(&c(0., 0.)) && d2.contains(&c(0., 0.)));
    }

    #[test]
    fn invalid_box_rejected() {
        assert_eq!(
            DomainBox::new(Point3::new(1., 0., 0.), Point3::origin()),
            Err(FrameError::InvalidBox)
        );
    }

    fn rand_frame() -> impl Strategy<Value = Frame64> {
        proptest::array::uniform8(-2.0f64..2.0)
            .prop_map(|v| Frame::new(c(v[0], v[1]), c(v[2], v[3]), c(v[4], v[5]), c(v[6], v[7])))
    }

    fn rand_point() -> impl Strategy<Value = Point64> {
        proptest::array::uniform3(-3.0f64..3.0).prop_map(Point3::from)
    }

    proptest! {
        #[test]
        fn xi_is_real_linear(fr in rand_frame(), p in rand_point(), q in rand_point(),
                             a in -2.0f64..2.0, b in -2.0f64..2.0) {
            let (l1, l2) = fr.xi(p * a + q * b);
            let (p1, p2) = fr.xi(p);
            let (q1, q2) = fr.xi(q);
            prop_assert!((l1 - (p1 * a + q1 * b)).norm() < 1e-12);
            prop_assert!((l2 - (p2 * a + q2 * b)).norm() < 1e-12);
        }

        #[test]
        fn lines_annihilate_xi(fr in rand_frame(), t in -10.0f64..10.0) {
            if let Ok((l1, l2)) = fr.degeneracy_lines() {
                let p = l1.point_at(t);
                prop_assert!(fr.xi(p).0.norm() <= 1e-10 * (1.0 + p.norm()));
                prop_assert!(fr.is_degenerate(p, 1e-10 * (1.0 + p.norm())));
                let p = l2.point_at(t);
                prop_assert!(fr.xi(p).1.norm() <= 1e-10 * (1.0 + p.norm()));
            }
        }

        #[test]
        fn surjectivity_matches_pair_criterion(
            v in proptest::array::uniform8(prop_oneof![Just(0.0f64), Just(1.0), Just(-0.5), Just(std::f64::consts::SQRT_2)])
        ) {
            let fr = Frame::new(c(v[0], v[1]), c(v[2], v[3]), c(v[4], v[5]), c(v[6], v[7]));
            let expect = (v[1] != 0.0 || v[5] != 0.0) && (v[3] != 0.0 || v[7] != 0.0);
            prop_assert_eq!(fr.validate().surjective, expect);
            prop_assert_eq!(fr.degeneracy_lines().is_ok(), expect);
        }

        #[test]
        fn embed_injective_iff_independent(fr in rand_frame(), p in rand_point(), q in rand_point()) {
            // injectivity on R³ is equivalent to a trivial kernel; for independent
            // frames distinct points embed to distinct elements
            if fr.validate().independent && (p - q).norm() > 1e-6 {
                prop_assert!(!fr.embed(p).approx_eq(&fr.embed(q), 0.0));
            }
        }

        #[test]
        fn sampled_points_on_l1_are_degenerate(fr in rand_frame(), t in -5.0f64..5.0) {
            if let Ok((l1, _)) = fr.degeneracy_lines() {
                prop_assert!(fr.is_degenerate(l1.point_at(t), 1e-12 * (1.0 + t.abs()) * 10.0));
            }
        }
    }

    #[test]
    fn collinear_frame_has_kernel() {
        // i2 = 1, i3 = 2 so (2, 0, -1) maps to zero
        let fr = Frame::new(c(1., 0.), c(1., 0.), c(2., 0.), c(2., 0.));
        assert!(fr.embed(Point3::new(2., 0., -1.)).is_zero());
    }

    #[test]
    fn xi_on_l1_samples_vanishes() {
        let fr = Frame::new(c(0., 1.), c(0., 1.), c(1., 0.), c(-1., 0.));
        let (l1, _) = fr.degeneracy_lines().unwrap();
        for k in 0..100 {
            let p = l1.point_at(k as f64 * 0.1 - 5.0);
            assert!(fr.xi(p).0.norm() < 1e-14);
        }
    }
}
