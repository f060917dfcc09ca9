//! Exact Minkowski-space linear algebra.
//!
//! Signature `(+, −, −, −)`, `c = 1`, orientation `ε^{0123} = +1` (so
//! `ε_{0123} = −1`). A [`Bivector`] is stored as the `(e, b)` pair that fills
//! the lower-index matrix
//!
//! ```text
//!            ⎛  0    e₁   e₂   e₃ ⎞
//!   M_{μν} = ⎜ −e₁   0   −b₃   b₂ ⎟
//!            ⎜ −e₂   b₃   0   −b₁ ⎟
//!            ⎝ −e₃  −b₂   b₁   0  ⎠
//! ```
//!
//! so that for `M = dP` with `P_μ = (𝒜⁰, −𝓐)` one has `e = ℰ = −∇𝒜⁰ − ∂ₜ𝓐`
//! and `b = ℬ = ∇×𝓐`. The upper-index and dual matrices are derived views.

use core::ops::{Add, AddAssign, Mul, Neg, Sub};

use crate::math;
use crate::{Error, Result};

/// Row-major 4×4 matrix.
pub type Mat4 = [[f64; 4]; 4];

/// Diagonal of the metric `g_{μν} = g^{μν}`.
pub const METRIC: [f64; 4] = [1.0, -1.0, -1.0, -1.0];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Variance {
    Contravariant,
    Covariant,
}

/// Point, vector or covector in ℝ^{1,3}.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FourVector {
    pub components: [f64; 4],
    pub variance: Variance,
}

impl FourVector {
    pub const fn contravariant(components: [f64; 4]) -> Self {
        Self { components, variance: Variance::Contravariant }
    }

    pub const fn covariant(components: [f64; 4]) -> Self {
        Self { components, variance: Variance::Covariant }
    }

    pub const fn zero(variance: Variance) -> Self {
        Self { components: [0.0; 4], variance }
    }

    /// Space-time point `(t, x)`.
    pub fn event(t: f64, x: ThreeVector) -> Self {
        Self::contravariant([t, x.0[0], x.0[1], x.0[2]])
    }

    #[inline]
    pub fn time(&self) -> f64 {
        self.components[0]
    }

    #[inline]
    pub fn spatial(&self) -> ThreeVector {
        let c = &self.components;
        ThreeVector([c[1], c[2], c[3]])
    }

    #[inline]
    fn flip_spatial(self, variance: Variance) -> Self {
        let c = self.components;
        Self { components: [c[0], -c[1], -c[2], -c[3]], variance }
    }

    /// Same geometric object with covariant components (no-op if already covariant).
    pub fn to_covariant(self) -> Self {
        match self.variance {
            Variance::Contravariant => self.flip_spatial(Variance::Covariant),
            Variance::Covariant => self,
        }
    }

    /// Same geometric object with contravariant components.
    pub fn to_contravariant(self) -> Self {
        match self.variance {
            Variance::Covariant => self.flip_spatial(Variance::Contravariant),
            Variance::Contravariant => self,
        }
    }

    pub fn with_variance(self, variance: Variance) -> Self {
        match variance {
            Variance::Contravariant => self.to_contravariant(),
            Variance::Covariant => self.to_covariant(),
        }
    }

    /// Minkowski square `v·v`.
    pub fn norm_sq(&self) -> f64 {
        minkowski_dot(self, self)
    }

    /// Euclidean length of the raw components (diagnostics only).
    pub fn euclidean_norm(&self) -> f64 {
        let c = &self.components;
        math::sqrt(c[0] * c[0] + c[1] * c[1] + c[2] * c[2] + c[3] * c[3])
    }

    /// Plain component sum `Σ aᵢbᵢ` with no metric, for mixed-variance pairs.
    #[inline]
    fn raw_dot(&self, other: &Self) -> f64 {
        let (a, b) = (&self.components, &other.components);
        a[0] * b[0] + a[1] * b[1] + a[2] * b[2] + a[3] * b[3]
    }

    pub fn is_finite(&self) -> bool {
        self.components.iter().all(|c| c.is_finite())
    }

    /// Componentwise map keeping the variance tag.
    pub fn map(self, f: impl Fn(f64) -> f64) -> Self {
        let c = self.components;
        Self { components: [f(c[0]), f(c[1]), f(c[2]), f(c[3])], variance: self.variance }
    }
}

impl Add for FourVector {
    type Output = FourVector;
    fn add(self, rhs: Self) -> Self {
        let rhs = rhs.with_variance(self.variance);
        let (a, b) = (self.components, rhs.components);
        Self { components: [a[0] + b[0], a[1] + b[1], a[2] + b[2], a[3] + b[3]], variance: self.variance }
    }
}

impl Sub for FourVector {
    type Output = FourVector;
    fn sub(self, rhs: Self) -> Self {
        self + (-rhs)
    }
}

impl Neg for FourVector {
    type Output = FourVector;
    fn neg(self) -> Self {
        self.map(|c| -c)
    }
}

impl Mul<FourVector> for f64 {
    type Output = FourVector;
    fn mul(self, rhs: FourVector) -> FourVector {
        rhs.map(|c| self * c)
    }
}

impl AddAssign for FourVector {
    fn add_assign(&mut self, rhs: Self) {
        *self = *self + rhs;
    }
}

/// `v_μ = g_{μν} v^ν`. A covariant input is returned unchanged.
pub fn lower_index(v: FourVector) -> FourVector {
    v.to_covariant()
}

/// `v^μ = g^{μν} v_ν`. A contravariant input is returned unchanged.
pub fn raise_index(v: FourVector) -> FourVector {
    v.to_contravariant()
}

/// Lorentz-invariant product `a^μ b_μ`; same-variance operands are contracted
/// through the metric.
pub fn minkowski_dot(a: &FourVector, b: &FourVector) -> f64 {
    if a.variance == b.variance {
        let (x, y) = (&a.components, &b.components);
        x[0] * y[0] - x[1] * y[1] - x[2] * y[2] - x[3] * y[3]
    } else {
        a.raw_dot(b)
    }
}

/// Plain Euclidean 3-vector.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ThreeVector(pub [f64; 3]);

impl ThreeVector {
    pub const ZERO: ThreeVector = ThreeVector([0.0; 3]);

    pub const fn new(x: f64, y: f64, z: f64) -> Self {
        Self([x, y, z])
    }

    #[inline]
    pub fn dot(&self, o: &Self) -> f64 {
        self.0[0] * o.0[0] + self.0[1] * o.0[1] + self.0[2] * o.0[2]
    }

    #[inline]
    pub fn cross(&self, o: &Self) -> Self {
        let (a, b) = (&self.0, &o.0);
        Self([a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]])
    }

    #[inline]
    pub fn norm_sq(&self) -> f64 {
        self.dot(self)
    }

    #[inline]
    pub fn norm(&self) -> f64 {
        math::sqrt(self.norm_sq())
    }

    pub fn normalized(&self) -> Self {
        let n = self.norm();
        if n == 0.0 {
            *self
        } else {
            (1.0 / n) * *self
        }
    }

    pub fn max_abs(&self) -> f64 {
        self.0.iter().fold(0.0f64, |m, &c| m.max(math::abs(c)))
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|c| c.is_finite())
    }
}

impl Add for ThreeVector {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Self([self.0[0] + o.0[0], self.0[1] + o.0[1], self.0[2] + o.0[2]])
    }
}

impl Sub for ThreeVector {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        Self([self.0[0] - o.0[0], self.0[1] - o.0[1], self.0[2] - o.0[2]])
    }
}

impl Neg for ThreeVector {
    type Output = Self;
    fn neg(self) -> Self {
        Self([-self.0[0], -self.0[1], -self.0[2]])
    }
}

impl Mul<ThreeVector> for f64 {
    type Output = ThreeVector;
    fn mul(self, v: ThreeVector) -> ThreeVector {
        ThreeVector([self * v.0[0], self * v.0[1], self * v.0[2]])
    }
}

impl AddAssign for ThreeVector {
    fn add_assign(&mut self, o: Self) {
        *self = *self + o;
    }
}

/// Antisymmetric rank-2 tensor in the `(e, b)` layout described at module level.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Bivector {
    pub e: ThreeVector,
    pub b: ThreeVector,
}

impl Bivector {
    pub const ZERO: Bivector = Bivector { e: ThreeVector::ZERO, b: ThreeVector::ZERO };

    pub const fn new(e: ThreeVector, b: ThreeVector) -> Self {
        Self { e, b }
    }

    /// `M_{μν}`.
    pub fn lower_matrix(&self) -> Mat4 {
        let [e1, e2, e3] = self.e.0;
        let [b1, b2, b3] = self.b.0;
        [[0.0, e1, e2, e3], [-e1, 0.0, -b3, b2], [-e2, b3, 0.0, -b1], [-e3, -b2, b1, 0.0]]
    }

    /// `M^{μν} = g^{μα} g^{νβ} M_{αβ}`.
    pub fn upper_matrix(&self) -> Mat4 {
        let [e1, e2, e3] = self.e.0;
        let [b1, b2, b3] = self.b.0;
        [[0.0, -e1, -e2, -e3], [e1, 0.0, -b3, b2], [e2, b3, 0.0, -b1], [e3, -b2, b1, 0.0]]
    }

    /// `M*^{μν} = ½ ε^{μναβ} M_{αβ}`.
    pub fn dual_upper_matrix(&self) -> Mat4 {
        hodge_dual(self).upper_matrix()
    }

    /// Read `(e, b)` back from a lower-index matrix (antisymmetric part only).
    pub fn from_lower_matrix(m: &Mat4) -> Self {
        let a = |i: usize, j: usize| 0.5 * (m[i][j] - m[j][i]);
        Self { e: ThreeVector([a(0, 1), a(0, 2), a(0, 3)]), b: ThreeVector([-a(2, 3), a(1, 3), -a(1, 2)]) }
    }

    /// Read `(e, b)` back from an upper-index matrix.
    pub fn from_upper_matrix(m: &Mat4) -> Self {
        let a = |i: usize, j: usize| 0.5 * (m[i][j] - m[j][i]);
        Self { e: ThreeVector([-a(0, 1), -a(0, 2), -a(0, 3)]), b: ThreeVector([-a(2, 3), a(1, 3), -a(1, 2)]) }
    }

    /// Antisymmetrised outer product of two vectors or two covectors,
    /// `(a∧b)^{μν} = a^μ b^ν − a^ν b^μ` (indices down for covectors).
    pub fn wedge(a: &FourVector, b: &FourVector) -> Self {
        let bb = b.with_variance(a.variance);
        let (x, y) = (&a.components, &bb.components);
        let mut m = [[0.0; 4]; 4];
        for (i, row) in m.iter_mut().enumerate() {
            for (j, v) in row.iter_mut().enumerate() {
                *v = x[i] * y[j] - x[j] * y[i];
            }
        }
        match a.variance {
            Variance::Contravariant => Self::from_upper_matrix(&m),
            Variance::Covariant => Self::from_lower_matrix(&m),
        }
    }

    /// Bilinear evaluation `M_{μν} u^μ w^ν` on two vectors.
    pub fn evaluate(&self, u: &FourVector, w: &FourVector) -> f64 {
        let (u, w) = (u.to_contravariant(), w.to_contravariant());
        let m = self.lower_matrix();
        let mut acc = 0.0;
        for (i, row) in m.iter().enumerate() {
            for (j, v) in row.iter().enumerate() {
                acc += v * u.components[i] * w.components[j];
            }
        }
        acc
    }

    pub fn max_abs(&self) -> f64 {
        self.e.max_abs().max(self.b.max_abs())
    }

    pub fn is_finite(&self) -> bool {
        self.e.is_finite() && self.b.is_finite()
    }
}

impl Add for Bivector {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Self { e: self.e + o.e, b: self.b + o.b }
    }
}

impl Sub for Bivector {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        Self { e: self.e - o.e, b: self.b - o.b }
    }
}

impl Neg for Bivector {
    type Output = Self;
    fn neg(self) -> Self {
        Self { e: -self.e, b: -self.b }
    }
}

impl Mul<Bivector> for f64 {
    type Output = Bivector;
    fn mul(self, m: Bivector) -> Bivector {
        Bivector { e: self * m.e, b: self * m.b }
    }
}

/// Minkowski–Hodge dual. The dual tensor `M*^{μν}` has the upper-index layout
/// of `(e', b') = (b, −e)`; applying it twice gives `−M`.
pub fn hodge_dual(m: &Bivector) -> Bivector {
    Bivector { e: m.b, b: -m.e }
}

/// `(i_U M)_ν = U^μ M_{μν}`.
pub fn interior_product(u: &FourVector, m: &Bivector) -> FourVector {
    let u = u.to_contravariant();
    let lm = m.lower_matrix();
    let mut out = [0.0; 4];
    for (nu, o) in out.iter_mut().enumerate() {
        *o = (0..4).map(|mu| u.components[mu] * lm[mu][nu]).sum();
    }
    FourVector::covariant(out)
}

/// The two scalar invariants: `|e|² − |b|²` (that is `−½ M_{μν}M^{μν}`) and
/// `−2 e·b` (that is `½ M_{μν}M*^{μν}`).
pub fn bivector_invariants(m: &Bivector) -> (f64, f64) {
    (m.e.norm_sq() - m.b.norm_sq(), -2.0 * m.e.dot(&m.b))
}

/// 4-velocity `(γ, γv)` of a 3-velocity in units of `c`.
pub fn four_velocity(v: ThreeVector) -> Result<FourVector> {
    let v2 = v.norm_sq();
    if !(v2 < 1.0) {
        return Err(Error::SpeedLimit { speed: math::sqrt(v2) });
    }
    let gamma = 1.0 / math::sqrt(1.0 - v2);
    Ok(FourVector::contravariant([gamma, gamma * v.0[0], gamma * v.0[1], gamma * v.0[2]]))
}

/// 3-velocity `U/U⁰` of a timelike 4-velocity.
pub fn three_velocity(u: &FourVector) -> ThreeVector {
    let u = u.to_contravariant();
    (1.0 / u.time()) * u.spatial()
}

/// Pure boost into the frame moving with velocity `beta` relative to the
/// current one: `t' = γ(t − β·x)`, `x'_∥ = γ(x_∥ − βt)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LorentzBoost {
    beta: ThreeVector,
    gamma: f64,
}

impl LorentzBoost {
    pub fn new(beta: ThreeVector) -> Result<Self> {
        let b2 = beta.norm_sq();
        if !(b2 < 1.0) {
            return Err(Error::SpeedLimit { speed: math::sqrt(b2) });
        }
        Ok(Self { beta, gamma: 1.0 / math::sqrt(1.0 - b2) })
    }

    pub fn identity() -> Self {
        Self { beta: ThreeVector::ZERO, gamma: 1.0 }
    }

    pub fn beta(&self) -> ThreeVector {
        self.beta
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn inverse(&self) -> Self {
        Self { beta: -self.beta, gamma: self.gamma }
    }

    /// `Λ^μ_ν` acting on contravariant components. Symmetric for pure boosts.
    pub fn matrix(&self) -> Mat4 {
        let g = self.gamma;
        let b = self.beta.0;
        let b2 = self.beta.norm_sq();
        let k = if b2 > 0.0 { (g - 1.0) / b2 } else { 0.0 };
        let mut m = [[0.0; 4]; 4];
        m[0][0] = g;
        for i in 0..3 {
            m[0][i + 1] = -g * b[i];
            m[i + 1][0] = -g * b[i];
            for j in 0..3 {
                m[i + 1][j + 1] = if i == j { 1.0 } else { 0.0 } + k * b[i] * b[j];
            }
        }
        m
    }
}

pub(crate) fn mat_vec(m: &Mat4, v: &[f64; 4]) -> [f64; 4] {
    let mut o = [0.0; 4];
    for (i, oi) in o.iter_mut().enumerate() {
        *oi = m[i][0] * v[0] + m[i][1] * v[1] + m[i][2] * v[2] + m[i][3] * v[3];
    }
    o
}

pub(crate) fn mat_mul(a: &Mat4, b: &Mat4) -> Mat4 {
    let mut o = [[0.0; 4]; 4];
    for i in 0..4 {
        for j in 0..4 {
            o[i][j] = (0..4).map(|k| a[i][k] * b[k][j]).sum();
        }
    }
    o
}

pub(crate) fn transpose(a: &Mat4) -> Mat4 {
    let mut o = [[0.0; 4]; 4];
    for i in 0..4 {
        for j in 0..4 {
            o[i][j] = a[j][i];
        }
    }
    o
}

/// Transform a vector (`Λv`) or covector (`Λ⁻ᵀv`) into the boosted frame.
pub fn boost_four_vector(boost: &LorentzBoost, v: &FourVector) -> FourVector {
    let m = match v.variance {
        Variance::Contravariant => boost.matrix(),
        // Λ⁻ᵀ = Λ(−β) for a symmetric pure boost.
        Variance::Covariant => boost.inverse().matrix(),
    };
    FourVector { components: mat_vec(&m, &v.components), variance: v.variance }
}

/// Transform a lower-index bivector: `M'_{μν} = (Λ⁻¹)^α_μ (Λ⁻¹)^β_ν M_{αβ}`.
pub fn boost_bivector(boost: &LorentzBoost, m: &Bivector) -> Bivector {
    let a = boost.inverse().matrix();
    let l = m.lower_matrix();
    let out = mat_mul(&transpose(&a), &mat_mul(&l, &a));
    Bivector::from_lower_matrix(&out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    /// Levi-Civita symbol with ε^{0123} = +1, built by counting inversions.
    fn levi_civita(idx: [usize; 4]) -> f64 {
        for i in 0..4 {
            for j in i + 1..4 {
                if idx[i] == idx[j] {
                    return 0.0;
                }
            }
        }
        let mut inv = 0;
        for i in 0..4 {
            for j in i + 1..4 {
                if idx[i] > idx[j] {
                    inv += 1;
                }
            }
        }
        if inv % 2 == 0 {
            1.0
        } else {
            -1.0
        }
    }

    fn dual_by_epsilon(m: &Bivector) -> Mat4 {
        let l = m.lower_matrix();
        let mut out = [[0.0; 4]; 4];
        for mu in 0..4 {
            for nu in 0..4 {
                let mut acc = 0.0;
                for a in 0..4 {
                    for b in 0..4 {
                        acc += 0.5 * levi_civita([mu, nu, a, b]) * l[a][b];
                    }
                }
                out[mu][nu] = acc;
            }
        }
        out
    }

    #[test]
    fn lower_index_examples() {
        let v = lower_index(FourVector::contravariant([1.0, 2.0, 3.0, 4.0]));
        assert_eq!(v.components, [1.0, -2.0, -3.0, -4.0]);
        assert_eq!(v.variance, Variance::Covariant);
        assert_eq!(lower_index(FourVector::contravariant([0.0; 4])).components, [0.0; 4]);
        assert_eq!(lower_index(FourVector::contravariant([1.25, 0.75, 0.0, 0.0])).components, [1.25, -0.75, 0.0, 0.0]);
        let back = raise_index(v);
        assert_eq!(back, FourVector::contravariant([1.0, 2.0, 3.0, 4.0]));
    }

    #[test]
    fn dot_examples() {
        let u = four_velocity(ThreeVector::new(0.6, 0.0, 0.0)).unwrap();
        assert_eq!(u.components, [1.25, 0.75, 0.0, 0.0]);
        assert_abs_diff_eq!(minkowski_dot(&u, &u), 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(minkowski_dot(&u, &lower_index(u)), 1.0, epsilon = 1e-15);
        let t = FourVector::contravariant([1.0, 0.0, 0.0, 0.0]);
        let x = FourVector::contravariant([0.0, 1.0, 0.0, 0.0]);
        assert_eq!(minkowski_dot(&t, &x), 0.0);
        let null = FourVector::contravariant([1.0, 1.0, 0.0, 0.0]);
        assert_eq!(minkowski_dot(&null, &null), 0.0);
    }

    #[test]
    fn four_velocity_examples() {
        assert_eq!(four_velocity(ThreeVector::ZERO).unwrap().components, [1.0, 0.0, 0.0, 0.0]);
        let u = four_velocity(ThreeVector::new(0.0, 0.8, 0.0)).unwrap();
        assert_abs_diff_eq!(u.components[0], 5.0 / 3.0, epsilon = 1e-15);
        assert_abs_diff_eq!(u.components[2], 4.0 / 3.0, epsilon = 1e-15);
        assert!(matches!(four_velocity(ThreeVector::new(1.0, 0.0, 0.0)), Err(Error::SpeedLimit { .. })));
        assert!(matches!(four_velocity(ThreeVector::new(0.8, 0.7, 0.0)), Err(Error::SpeedLimit { .. })));
    }

    #[test]
    fn boost_examples() {
        let id = LorentzBoost::new(ThreeVector::ZERO).unwrap();
        let v = FourVector::contravariant([0.3, -1.0, 2.0, 0.5]);
        assert_eq!(boost_four_vector(&id, &v), v);
        let bz = LorentzBoost::new(ThreeVector::new(0.0, 0.0, 0.6)).unwrap();
        let r = boost_four_vector(&bz, &FourVector::contravariant([1.0, 0.0, 0.0, 0.0]));
        assert_abs_diff_eq!(r.components[0], 1.25, epsilon = 1e-15);
        assert_abs_diff_eq!(r.components[3], -0.75, epsilon = 1e-15);
        assert_eq!(r.components[1], 0.0);
        assert!(LorentzBoost::new(ThreeVector::new(0.0, 1.0, 0.0)).is_err());
    }

    #[test]
    fn covector_boost_is_consistent_with_lowering() {
        let b = LorentzBoost::new(ThreeVector::new(0.3, -0.2, 0.5)).unwrap();
        let v = FourVector::contravariant([0.7, 0.1, -0.4, 1.3]);
        let a = lower_index(boost_four_vector(&b, &v));
        let c = boost_four_vector(&b, &lower_index(v));
        for i in 0..4 {
            assert_abs_diff_eq!(a.components[i], c.components[i], epsilon = 1e-14);
        }
        let w = FourVector::contravariant([1.1, 0.2, 0.3, -0.9]);
        let before = minkowski_dot(&v, &lower_index(w));
        let after = minkowski_dot(&boost_four_vector(&b, &v), &boost_four_vector(&b, &lower_index(w)));
        assert_abs_diff_eq!(before, after, epsilon = 1e-13);
    }

    #[test]
    fn matrix_layouts_match_unit_inputs() {
        // Each of the six unit inputs reproduces its signed entries, and every
        // other entry stays zero.
        for k in 0..3 {
            let mut e = [0.0; 3];
            e[k] = 1.0;
            let m = Bivector::new(ThreeVector(e), ThreeVector::ZERO);
            let (lo, up, du) = (m.lower_matrix(), m.upper_matrix(), m.dual_upper_matrix());
            for i in 0..4 {
                for j in 0..4 {
                    let want_lo = if i == 0 && j == k + 1 {
                        1.0
                    } else if j == 0 && i == k + 1 {
                        -1.0
                    } else {
                        0.0
                    };
                    assert_eq!(lo[i][j], want_lo);
                    assert_eq!(up[i][j], -want_lo);
                }
            }
            // e_k sits in the spatial block of the dual: M*^{12}=e₃, M*^{13}=−e₂, M*^{23}=e₁.
            let (i, j) = match k {
                0 => (2, 3),
                1 => (3, 1),
                _ => (1, 2),
            };
            assert_eq!(du[i][j], 1.0);
            assert_eq!(du[j][i], -1.0);
            assert_eq!(du[0].iter().map(|x| x.abs()).sum::<f64>(), 0.0);
        }
        for k in 0..3 {
            let mut b = [0.0; 3];
            b[k] = 1.0;
            let m = Bivector::new(ThreeVector::ZERO, ThreeVector(b));
            let (lo, up, du) = (m.lower_matrix(), m.upper_matrix(), m.dual_upper_matrix());
            let (i, j) = match k {
                0 => (3, 2),
                1 => (1, 3),
                _ => (2, 1),
            };
            assert_eq!(lo[i][j], 1.0);
            assert_eq!(lo[j][i], -1.0);
            assert_eq!(up[i][j], 1.0);
            assert_eq!(du[0][k + 1], -1.0);
            assert_eq!(du[k + 1][0], 1.0);
        }
    }

    #[test]
    fn dual_examples() {
        let m = Bivector::new(ThreeVector::new(1.0, 0.0, 0.0), ThreeVector::ZERO);
        let d = hodge_dual(&m);
        assert_eq!(d.e, ThreeVector::ZERO);
        assert_eq!(d.b, ThreeVector::new(-1.0, 0.0, 0.0));
        assert_eq!(hodge_dual(&Bivector::ZERO), Bivector::ZERO);
    }

    #[test]
    fn closed_form_dual_matches_levi_civita_contraction() {
        let m = Bivector::new(ThreeVector::new(0.3, -1.2, 2.0), ThreeVector::new(-0.7, 0.4, 1.1));
        let eps = dual_by_epsilon(&m);
        let closed = m.dual_upper_matrix();
        for i in 0..4 {
            for j in 0..4 {
                assert_abs_diff_eq!(eps[i][j], closed[i][j], epsilon = 1e-15);
            }
        }
    }

    #[test]
    fn interior_product_examples() {
        let m = Bivector::new(ThreeVector::new(2.0, -3.0, 5.0), ThreeVector::new(1.0, 1.0, -1.0));
        let r = interior_product(&FourVector::contravariant([1.0, 0.0, 0.0, 0.0]), &m);
        assert_eq!(r.components, [0.0, 2.0, -3.0, 5.0]);
        let u = four_velocity(ThreeVector::new(0.1, 0.4, -0.3)).unwrap();
        let iu = interior_product(&u, &m);
        assert_abs_diff_eq!(minkowski_dot(&u, &iu), 0.0, epsilon = 1e-14);
        assert_eq!(interior_product(&u, &Bivector::ZERO).components, [0.0; 4]);
    }

    #[test]
    fn invariants_examples() {
        let e1 = ThreeVector::new(1.0, 0.0, 0.0);
        assert_eq!(bivector_invariants(&Bivector::new(e1, ThreeVector::ZERO)), (1.0, 0.0));
        assert_eq!(bivector_invariants(&Bivector::new(e1, e1)), (0.0, -2.0));
        assert_eq!(bivector_invariants(&Bivector::ZERO), (0.0, 0.0));
    }

    #[test]
    fn invariants_match_full_contractions() {
        let m = Bivector::new(ThreeVector::new(0.5, 1.5, -0.25), ThreeVector::new(2.0, -1.0, 0.75));
        let (lo, up, du) = (m.lower_matrix(), m.upper_matrix(), m.dual_upper_matrix());
        let mut mm = 0.0;
        let mut mdual = 0.0;
        for i in 0..4 {
            for j in 0..4 {
                mm += lo[i][j] * up[i][j];
                mdual += lo[i][j] * du[i][j];
            }
        }
        let (w, c) = bivector_invariants(&m);
        assert_abs_diff_eq!(w, -0.5 * mm, epsilon = 1e-14);
        assert_abs_diff_eq!(c, 0.5 * mdual, epsilon = 1e-14);
    }

    #[test]
    fn wedge_of_time_and_tangent() {
        let t = FourVector::contravariant([1.0, 0.0, 0.0, 0.0]);
        let l = FourVector::contravariant([0.0, 0.0, 1.0, 0.0]);
        let w = Bivector::wedge(&t, &l);
        // τ^{02} = 1, so τ_{02} = −1.
        assert_eq!(w.e, ThreeVector::new(0.0, -1.0, 0.0));
        assert_abs_diff_eq!(w.evaluate(&t, &l), -1.0, epsilon = 0.0);
        let d = hodge_dual(&w);
        assert_eq!(d.b, ThreeVector::new(0.0, 1.0, 0.0));
    }
}
