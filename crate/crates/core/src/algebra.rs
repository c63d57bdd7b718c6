//! Arithmetic of complex quaternions in the idempotent basis.
//!
//! The basis `{e1, e2, e3, e4}` relates to the standard basis `{1, I, J, K}` by
//! `e1 = (1 + iI)/2`, `e2 = (1 - iI)/2`, `e3 = (iJ - K)/2`, `e4 = (iJ + K)/2`,
//! and multiplies as
//!
//! ```text
//!  ·  | e1  e2  e3  e4
//! ----+----------------
//!  e1 | e1  0   e3  0
//!  e2 | 0   e2  0   e4
//!  e3 | 0   e3  0   e1
//!  e4 | e4  0   e2  0
//! ```
//!
//! The map `e1 ↦ E11, e2 ↦ E22, e3 ↦ E12, e4 ↦ E21` into 2×2 complex matrices
//! is an algebra isomorphism ([`MatrixRep`]).

use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex;
use num_traits::{Num, Zero};
use serde::{Deserialize, Serialize};

use crate::Real;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum AlgebraError {
    #[error("element is not invertible (|det| = {det_abs:e})")]
    Singular { det_abs: f64 },
}

/// Element of `H(C)` given by its coordinates in `{e1, e2, e3, e4}`.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Quat<T> {
    pub q1: Complex<T>,
    pub q2: Complex<T>,
    pub q3: Complex<T>,
    pub q4: Complex<T>,
}

/// Element of `H(C)` given by its coordinates in `{1, I, J, K}`.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct QuatStd<T> {
    pub s0: Complex<T>,
    pub s_i: Complex<T>,
    pub s_j: Complex<T>,
    pub s_k: Complex<T>,
}

/// One of the four maximal one-sided ideals.
///
/// `I1 = span{e2, e4}` and `I2 = span{e1, e3}` are right ideals,
/// `I1Hat = span{e2, e3}` and `I2Hat = span{e1, e4}` are left ideals.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Ideal {
    I1,
    I2,
    I1Hat,
    I2Hat,
}

impl Ideal {
    pub const ALL: [Ideal; 4] = [Ideal::I1, Ideal::I2, Ideal::I1Hat, Ideal::I2Hat];

    /// Zero-based indices of the coordinates that vanish on the ideal.
    pub fn vanishing_coords(self) -> [usize; 2] {
        match self {
            Ideal::I1 => [0, 2],
            Ideal::I2 => [1, 3],
            Ideal::I1Hat => [0, 3],
            Ideal::I2Hat => [1, 2],
        }
    }

    /// `true` for `I1`, `I2`.
    pub fn is_right(self) -> bool {
        matches!(self, Ideal::I1 | Ideal::I2)
    }
}

fn two<T: Num>() -> T {
    T::one() + T::one()
}

fn cunit<T: Clone + Num>() -> Complex<T> {
    Complex::new(T::zero(), T::one())
}

impl<T: Clone + Num> Quat<T> {
    pub fn new(q1: Complex<T>, q2: Complex<T>, q3: Complex<T>, q4: Complex<T>) -> Self {
        Self { q1, q2, q3, q4 }
    }

    pub fn from_array(q: [Complex<T>; 4]) -> Self {
        let [q1, q2, q3, q4] = q;
        Self { q1, q2, q3, q4 }
    }

    pub fn to_array(&self) -> [Complex<T>; 4] {
        [self.q1.clone(), self.q2.clone(), self.q3.clone(), self.q4.clone()]
    }

    pub fn zero() -> Self {
        let z = Complex::zero();
        Self::new(z.clone(), z.clone(), z.clone(), z)
    }

    /// The unit `1 = e1 + e2`.
    pub fn one() -> Self {
        Self::e1() + Self::e2()
    }

    /// The `k`-th basis element, `k ∈ 1..=4`.
    pub fn basis(k: usize) -> Self {
        assert!((1..=4).contains(&k), "basis index {k} out of range 1..=4");
        let mut q: [Complex<T>; 4] = std::array::from_fn(|_| Complex::zero());
        q[k - 1] = Complex::new(T::one(), T::zero());
        Self::from_array(q)
    }

    pub fn e1() -> Self {
        Self::basis(1)
    }
    pub fn e2() -> Self {
        Self::basis(2)
    }
    pub fn e3() -> Self {
        Self::basis(3)
    }
    pub fn e4() -> Self {
        Self::basis(4)
    }

    /// `c·1`.
    pub fn from_scalar(c: Complex<T>) -> Self {
        Self::new(c.clone(), c, Complex::zero(), Complex::zero())
    }

    /// Multiplies every coordinate by the complex scalar `c`.
    pub fn scale(&self, c: &Complex<T>) -> Self {
        Self::new(
            self.q1.clone() * c.clone(),
            self.q2.clone() * c.clone(),
            self.q3.clone() * c.clone(),
            self.q4.clone() * c.clone(),
        )
    }

    pub fn is_zero(&self) -> bool {
        self.q1.is_zero() && self.q2.is_zero() && self.q3.is_zero() && self.q4.is_zero()
    }

    /// `f1(a) = a1 + a3`; vanishes on `I1`.
    pub fn f1(&self) -> Complex<T> {
        self.q1.clone() + self.q3.clone()
    }

    /// `f2(a) = a2 + a4`; vanishes on `I2`.
    pub fn f2(&self) -> Complex<T> {
        self.q2.clone() + self.q4.clone()
    }

    /// `f̂1(a) = a1 + a4`; vanishes on `Î1`.
    pub fn f1_hat(&self) -> Complex<T> {
        self.q1.clone() + self.q4.clone()
    }

    /// `f̂2(a) = a2 + a3`; vanishes on `Î2`.
    pub fn f2_hat(&self) -> Complex<T> {
        self.q2.clone() + self.q3.clone()
    }

    /// Splits `a` into its parts in `(I1, I2)` (right ideals) or `(Î1, Î2)`.
    pub fn ideal_parts(&self, right: bool) -> (Self, Self) {
        let z = Complex::<T>::zero;
        if right {
            (
                Self::new(z(), self.q2.clone(), z(), self.q4.clone()),
                Self::new(self.q1.clone(), z(), self.q3.clone(), z()),
            )
        } else {
            (
                Self::new(z(), self.q2.clone(), self.q3.clone(), z()),
                Self::new(self.q1.clone(), z(), z(), self.q4.clone()),
            )
        }
    }

    /// `det` of the matrix representation, `a1·a2 - a3·a4`.
    pub fn det(&self) -> Complex<T> {
        self.q1.clone() * self.q2.clone() - self.q3.clone() * self.q4.clone()
    }

    pub fn to_std(&self) -> QuatStd<T> {
        let i = cunit::<T>();
        let half = |c: Complex<T>| c / Complex::new(two::<T>(), T::zero());
        QuatStd {
            s0: half(self.q1.clone() + self.q2.clone()),
            s_i: half(i.clone() * (self.q1.clone() - self.q2.clone())),
            s_j: half(i * (self.q3.clone() + self.q4.clone())),
            s_k: half(self.q4.clone() - self.q3.clone()),
        }
    }

    pub fn from_std(s: &QuatStd<T>) -> Self {
        let i = cunit::<T>();
        let i_si = i.clone() * s.s_i.clone();
        let i_sj = i * s.s_j.clone();
        Self::new(
            s.s0.clone() - i_si.clone(),
            s.s0.clone() + i_si,
            Complex::new(T::zero(), T::zero()) - i_sj.clone() - s.s_k.clone(),
            s.s_k.clone() - i_sj,
        )
    }

    pub fn to_matrix(&self) -> MatrixRep<T> {
        MatrixRep {
            m11: self.q1.clone(),
            m12: self.q3.clone(),
            m21: self.q4.clone(),
            m22: self.q2.clone(),
        }
    }

    pub fn from_matrix(m: &MatrixRep<T>) -> Self {
        Self::new(m.m11.clone(), m.m22.clone(), m.m12.clone(), m.m21.clone())
    }
}

impl<T: Real> Quat<T> {
    /// Component-Euclidean norm `sqrt(Σ |q_k|²)`.
    pub fn norm(&self) -> T {
        (self.q1.norm_sqr() + self.q2.norm_sqr() + self.q3.norm_sqr() + self.q4.norm_sqr()).sqrt()
    }

    /// Largest coordinate modulus.
    pub fn max_abs(&self) -> T {
        self.to_array()
            .iter()
            .map(|c| c.norm())
            .fold(T::zero(), T::max)
    }

    pub fn is_finite(&self) -> bool {
        self.to_array().iter().all(|c| c.re.is_finite() && c.im.is_finite())
    }

    pub fn approx_eq(&self, other: &Self, tol: T) -> bool {
        (*self - *other).max_abs() <= tol
    }

    /// Membership in a maximal ideal: both vanishing coordinates within `tol`.
    pub fn ideal_member(&self, which: Ideal, tol: T) -> bool {
        let q = self.to_array();
        which.vanishing_coords().iter().all(|&k| q[k].norm() <= tol)
    }

    /// Two-sided inverse.
    ///
    /// Fails with [`AlgebraError::Singular`] when `|det| < 1e-12·‖a‖²`.
    pub fn inverse(&self) -> Result<Self, AlgebraError> {
        let det = self.det();
        let n = self.norm();
        if !(det.norm() >= T::lit(1e-12) * n * n) || n.is_zero() {
            return Err(AlgebraError::Singular {
                det_abs: det.norm().to_f64().unwrap_or(f64::NAN),
            });
        }
        Ok(Self::new(self.q2 / det, self.q1 / det, -self.q3 / det, -self.q4 / det))
    }
}

impl<T: Clone + Num> Add for Quat<T> {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        Self::new(self.q1 + rhs.q1, self.q2 + rhs.q2, self.q3 + rhs.q3, self.q4 + rhs.q4)
    }
}

impl<T: Clone + Num> Sub for Quat<T> {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        Self::new(self.q1 - rhs.q1, self.q2 - rhs.q2, self.q3 - rhs.q3, self.q4 - rhs.q4)
    }
}

impl<T: Clone + Num + Neg<Output = T>> Neg for Quat<T> {
    type Output = Self;
    fn neg(self) -> Self {
        Self::new(-self.q1, -self.q2, -self.q3, -self.q4)
    }
}

/// Algebra product.
impl<T: Clone + Num> Mul for Quat<T> {
    type Output = Self;
    fn mul(self, b: Self) -> Self {
        let a = self;
        Self::new(
            a.q1.clone() * b.q1.clone() + a.q3.clone() * b.q4.clone(),
            a.q2.clone() * b.q2.clone() + a.q4.clone() * b.q3.clone(),
            a.q1 * b.q3 + a.q3 * b.q2.clone(),
            a.q2 * b.q4 + a.q4 * b.q1,
        )
    }
}

impl<T: Clone + Num> std::iter::Sum for Quat<T> {
    fn sum<I: Iterator<Item = Self>>(iter: I) -> Self {
        iter.fold(Self::zero(), |acc, q| acc + q)
    }
}

impl<T: Clone + Num> QuatStd<T> {
    pub fn new(s0: Complex<T>, s_i: Complex<T>, s_j: Complex<T>, s_k: Complex<T>) -> Self {
        Self { s0, s_i, s_j, s_k }
    }

    /// Product in the standard basis, from `I² = J² = K² = -1`, `IJ = K`,
    /// `JK = I`, `KI = J`.
    pub fn hamilton(&self, b: &Self) -> Self {
        let (a0, a1, a2, a3) = (self.s0.clone(), self.s_i.clone(), self.s_j.clone(), self.s_k.clone());
        let (b0, b1, b2, b3) = (b.s0.clone(), b.s_i.clone(), b.s_j.clone(), b.s_k.clone());
        Self {
            s0: a0.clone() * b0.clone() - a1.clone() * b1.clone() - a2.clone() * b2.clone() - a3.clone() * b3.clone(),
            s_i: a0.clone() * b1.clone() + a1.clone() * b0.clone() + a2.clone() * b3.clone() - a3.clone() * b2.clone(),
            s_j: a0.clone() * b2.clone() - a1.clone() * b3.clone() + a2.clone() * b0.clone() + a3.clone() * b1.clone(),
            s_k: a0 * b3 + a1 * b2 - a2 * b1 + a3 * b0,
        }
    }
}

/// 2×2 complex matrix; multiplicative mirror of [`Quat`].
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct MatrixRep<T> {
    pub m11: Complex<T>,
    pub m12: Complex<T>,
    pub m21: Complex<T>,
    pub m22: Complex<T>,
}

impl<T: Clone + Num> MatrixRep<T> {
    pub fn matmul(&self, b: &Self) -> Self {
        let a = self;
        Self {
            m11: a.m11.clone() * b.m11.clone() + a.m12.clone() * b.m21.clone(),
            m12: a.m11.clone() * b.m12.clone() + a.m12.clone() * b.m22.clone(),
            m21: a.m21.clone() * b.m11.clone() + a.m22.clone() * b.m21.clone(),
            m22: a.m21.clone() * b.m12.clone() + a.m22.clone() * b.m22.clone(),
        }
    }

    pub fn det(&self) -> Complex<T> {
        self.m11.clone() * self.m22.clone() - self.m12.clone() * self.m21.clone()
    }
}
