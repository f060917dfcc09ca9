//! Analytic space-time fields and second-order finite-difference exterior
//! calculus on them.
//!
//! Derivative operators use an analytic Jacobian when the field supplies one
//! and symmetric central differences `(f(x+hê) − f(x−hê))/2h` otherwise.
//! [`DerivativeMode::FiniteDifference`] forces the difference route so that
//! analytic derivatives can be cross-checked.

use alloc::boxed::Box;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use crate::core4::{hodge_dual, interior_product, Bivector, FourVector, Mat4, ThreeVector};
use crate::sum::{map_chunks, NeumaierSum};
use crate::{math, Error, Result};

/// Real-valued field on space-time.
pub trait ScalarField: Send + Sync {
    fn value(&self, x: &FourVector) -> f64;

    /// Covariant gradient `∂_μ f`, when known in closed form.
    fn gradient(&self, _x: &FourVector) -> Option<FourVector> {
        None
    }

    fn in_domain(&self, _x: &FourVector) -> bool {
        true
    }
}

/// One-form field `P_μ(x)`.
pub trait CovectorField: Send + Sync {
    /// Covariant components at `x`.
    fn value(&self, x: &FourVector) -> FourVector;

    /// `J[μ][ν] = ∂_μ P_ν`, when known in closed form.
    fn jacobian(&self, _x: &FourVector) -> Option<Mat4> {
        None
    }

    fn in_domain(&self, _x: &FourVector) -> bool {
        true
    }
}

/// Vector field `V^μ(x)`.
pub trait VectorField: Send + Sync {
    /// Contravariant components at `x`.
    fn value(&self, x: &FourVector) -> FourVector;

    /// `J[μ][ν] = ∂_μ V^ν`, when known in closed form.
    fn jacobian(&self, _x: &FourVector) -> Option<Mat4> {
        None
    }

    fn in_domain(&self, _x: &FourVector) -> bool {
        true
    }
}

type ScalarFn = Box<dyn Fn(&FourVector) -> f64 + Send + Sync>;
type VecFn = Box<dyn Fn(&FourVector) -> FourVector + Send + Sync>;
type JacFn = Box<dyn Fn(&FourVector) -> Mat4 + Send + Sync>;

/// Scalar field built from closures.
pub struct ClosureScalar {
    value: ScalarFn,
    gradient: Option<VecFn>,
}

impl ClosureScalar {
    pub fn new(value: impl Fn(&FourVector) -> f64 + Send + Sync + 'static) -> Self {
        Self { value: Box::new(value), gradient: None }
    }

    /// Attach a closed-form covariant gradient.
    pub fn with_gradient(mut self, g: impl Fn(&FourVector) -> FourVector + Send + Sync + 'static) -> Self {
        self.gradient = Some(Box::new(g));
        self
    }
}

impl ScalarField for ClosureScalar {
    fn value(&self, x: &FourVector) -> f64 {
        (self.value)(x)
    }
    fn gradient(&self, x: &FourVector) -> Option<FourVector> {
        self.gradient.as_ref().map(|g| g(x).to_covariant())
    }
}

/// Covector field built from closures. The value closure's output is
/// converted to covariant components.
pub struct ClosureCovector {
    value: VecFn,
    jacobian: Option<JacFn>,
}

impl ClosureCovector {
    pub fn new(value: impl Fn(&FourVector) -> FourVector + Send + Sync + 'static) -> Self {
        Self { value: Box::new(value), jacobian: None }
    }

    pub fn with_jacobian(mut self, j: impl Fn(&FourVector) -> Mat4 + Send + Sync + 'static) -> Self {
        self.jacobian = Some(Box::new(j));
        self
    }
}

impl CovectorField for ClosureCovector {
    fn value(&self, x: &FourVector) -> FourVector {
        (self.value)(x).to_covariant()
    }
    fn jacobian(&self, x: &FourVector) -> Option<Mat4> {
        self.jacobian.as_ref().map(|j| j(x))
    }
}

/// Vector field built from closures.
pub struct ClosureVector {
    value: VecFn,
    jacobian: Option<JacFn>,
}

impl ClosureVector {
    pub fn new(value: impl Fn(&FourVector) -> FourVector + Send + Sync + 'static) -> Self {
        Self { value: Box::new(value), jacobian: None }
    }

    pub fn with_jacobian(mut self, j: impl Fn(&FourVector) -> Mat4 + Send + Sync + 'static) -> Self {
        self.jacobian = Some(Box::new(j));
        self
    }
}

impl VectorField for ClosureVector {
    fn value(&self, x: &FourVector) -> FourVector {
        (self.value)(x).to_contravariant()
    }
    fn jacobian(&self, x: &FourVector) -> Option<Mat4> {
        self.jacobian.as_ref().map(|j| j(x))
    }
}

/// Polynomial in `(x⁰, x¹, x², x³)` stored as a sparse term list.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Polynomial4 {
    terms: Vec<([u8; 4], f64)>,
}

impl Polynomial4 {
    pub fn new() -> Self {
        Self::default()
    }

    /// Dense polynomial of total degree `≤ degree` whose coefficients come
    /// from `coefficient(exponents)`.
    pub fn dense(degree: u8, mut coefficient: impl FnMut([u8; 4]) -> f64) -> Self {
        let mut terms = Vec::new();
        for a in 0..=degree {
            for b in 0..=degree - a {
                for c in 0..=degree - a - b {
                    for d in 0..=degree - a - b - c {
                        let e = [a, b, c, d];
                        let k = coefficient(e);
                        if k != 0.0 {
                            terms.push((e, k));
                        }
                    }
                }
            }
        }
        Self { terms }
    }

    pub fn term(mut self, exponents: [u8; 4], coefficient: f64) -> Self {
        self.terms.push((exponents, coefficient));
        self
    }

    pub fn terms(&self) -> &[([u8; 4], f64)] {
        &self.terms
    }

    fn powers(x: &[f64; 4], max: usize) -> [[f64; 8]; 4] {
        let mut p = [[0.0; 8]; 4];
        for (axis, row) in p.iter_mut().enumerate() {
            row[0] = 1.0;
            for k in 1..=max.min(7) {
                row[k] = row[k - 1] * x[axis];
            }
        }
        p
    }

    fn max_degree(&self) -> usize {
        self.terms.iter().flat_map(|(e, _)| e.iter()).copied().max().unwrap_or(0) as usize
    }

    pub fn value(&self, x: &FourVector) -> f64 {
        let p = Self::powers(&x.components, self.max_degree());
        let mut s = 0.0;
        for (e, k) in &self.terms {
            s += k * p[0][e[0] as usize] * p[1][e[1] as usize] * p[2][e[2] as usize] * p[3][e[3] as usize];
        }
        s
    }

    /// `(∂₀, ∂₁, ∂₂, ∂₃)` of the polynomial.
    pub fn gradient(&self, x: &FourVector) -> [f64; 4] {
        let p = Self::powers(&x.components, self.max_degree());
        let mut g = [0.0; 4];
        for (e, k) in &self.terms {
            for (axis, gi) in g.iter_mut().enumerate() {
                let n = e[axis] as usize;
                if n == 0 {
                    continue;
                }
                let mut t = k * n as f64;
                for (b, pb) in p.iter().enumerate() {
                    let m = if b == axis { n - 1 } else { e[b] as usize };
                    t *= pb[m];
                }
                *gi += t;
            }
        }
        g
    }
}

impl ScalarField for Polynomial4 {
    fn value(&self, x: &FourVector) -> f64 {
        Polynomial4::value(self, x)
    }
    fn gradient(&self, x: &FourVector) -> Option<FourVector> {
        Some(FourVector::covariant(Polynomial4::gradient(self, x)))
    }
}

/// Covector field whose four covariant components are polynomials.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct PolynomialCovector {
    pub components: [Polynomial4; 4],
}

impl PolynomialCovector {
    pub fn new(components: [Polynomial4; 4]) -> Self {
        Self { components }
    }

    /// Dense covector of total degree `≤ degree`; `coefficient(component, exponents)`.
    pub fn dense(degree: u8, mut coefficient: impl FnMut(usize, [u8; 4]) -> f64) -> Self {
        let components = [0, 1, 2, 3].map(|c| Polynomial4::dense(degree, |e| coefficient(c, e)));
        Self { components }
    }
}

impl CovectorField for PolynomialCovector {
    fn value(&self, x: &FourVector) -> FourVector {
        FourVector::covariant([0, 1, 2, 3].map(|c| self.components[c].value(x)))
    }
    fn jacobian(&self, x: &FourVector) -> Option<Mat4> {
        let mut j = [[0.0; 4]; 4];
        for nu in 0..4 {
            let g = self.components[nu].gradient(x);
            for mu in 0..4 {
                j[mu][nu] = g[mu];
            }
        }
        Some(j)
    }
}

/// Whether derivative operators may use closed-form derivatives.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum DerivativeMode {
    #[default]
    PreferAnalytic,
    FiniteDifference,
}

fn shifted(x: &FourVector, axis: usize, d: f64) -> FourVector {
    let mut c = x.to_contravariant().components;
    c[axis] += d;
    FourVector::contravariant(c)
}

fn check_stencil(x: &FourVector, h: f64, inside: impl Fn(&FourVector) -> bool) -> Result<()> {
    for axis in 0..4 {
        for d in [-h, h] {
            let p = shifted(x, axis, d);
            if !inside(&p) {
                return Err(Error::StencilOutOfDomain { point: x.to_contravariant().components });
            }
        }
    }
    Ok(())
}

/// `∂_axis f(x)` by central differences, for an `N`-component quantity.
fn central<const N: usize>(x: &FourVector, axis: usize, h: f64, f: &impl Fn(&FourVector) -> [f64; N]) -> [f64; N] {
    let plus = f(&shifted(x, axis, h));
    let minus = f(&shifted(x, axis, -h));
    let mut out = [0.0; N];
    for i in 0..N {
        out[i] = (plus[i] - minus[i]) / (2.0 * h);
    }
    out
}

/// Covariant gradient `∂_μ f` of a scalar field.
pub fn scalar_gradient(f: &dyn ScalarField, x: &FourVector, h: f64, mode: DerivativeMode) -> Result<FourVector> {
    if mode == DerivativeMode::PreferAnalytic {
        if let Some(g) = f.gradient(x) {
            return Ok(g.to_covariant());
        }
    }
    check_stencil(x, h, |p| f.in_domain(p))?;
    let g = [0, 1, 2, 3].map(|axis| central(x, axis, h, &|p| [f.value(p)])[0]);
    Ok(FourVector::covariant(g))
}

/// `J[μ][ν] = ∂_μ P_ν` of a covector field.
pub fn covector_jacobian(p: &dyn CovectorField, x: &FourVector, h: f64, mode: DerivativeMode) -> Result<Mat4> {
    if mode == DerivativeMode::PreferAnalytic {
        if let Some(j) = p.jacobian(x) {
            return Ok(j);
        }
    }
    check_stencil(x, h, |q| p.in_domain(q))?;
    Ok([0, 1, 2, 3].map(|mu| central(x, mu, h, &|q| p.value(q).to_covariant().components)))
}

/// `J[μ][ν] = ∂_μ V^ν` of a vector field.
pub fn vector_jacobian(v: &dyn VectorField, x: &FourVector, h: f64, mode: DerivativeMode) -> Result<Mat4> {
    if mode == DerivativeMode::PreferAnalytic {
        if let Some(j) = v.jacobian(x) {
            return Ok(j);
        }
    }
    check_stencil(x, h, |q| v.in_domain(q))?;
    Ok([0, 1, 2, 3].map(|mu| central(x, mu, h, &|q| v.value(q).to_contravariant().components)))
}

fn curl_of_jacobian(j: &Mat4) -> Bivector {
    let mut m = [[0.0; 4]; 4];
    for mu in 0..4 {
        for nu in 0..4 {
            m[mu][nu] = j[mu][nu] - j[nu][mu];
        }
    }
    Bivector::from_lower_matrix(&m)
}

/// `M_{μν} = ∂_μP_ν − ∂_νP_μ`, analytic when available.
pub fn exterior_derivative_oneform(p: &dyn CovectorField, x: &FourVector, h: f64) -> Result<Bivector> {
    exterior_derivative_with(p, x, h, DerivativeMode::PreferAnalytic)
}

pub fn exterior_derivative_with(
    p: &dyn CovectorField,
    x: &FourVector,
    h: f64,
    mode: DerivativeMode,
) -> Result<Bivector> {
    Ok(curl_of_jacobian(&covector_jacobian(p, x, h, mode)?))
}

/// `K^μ = P_ν M*^{μν}`, i.e. `(𝒜·ℬ, 𝒜⁰ℬ − 𝒜×ℰ)` for `P_ν = (𝒜⁰, −𝒜)`.
pub fn helicity_current(p: &FourVector, m: &Bivector) -> FourVector {
    let pl = p.to_covariant().components;
    let d = hodge_dual(m).upper_matrix();
    let mut k = [0.0; 4];
    for (mu, km) in k.iter_mut().enumerate() {
        *km = (0..4).map(|nu| pl[nu] * d[mu][nu]).sum();
    }
    FourVector::contravariant(k)
}

/// `L_U P = i_U dP + d(i_U P)` (Cartan).
pub fn lie_derivative_oneform(
    u: &dyn VectorField,
    p: &dyn CovectorField,
    x: &FourVector,
    h: f64,
) -> Result<FourVector> {
    lie_derivative_with(u, p, x, h, DerivativeMode::PreferAnalytic)
}

pub fn lie_derivative_with(
    u: &dyn VectorField,
    p: &dyn CovectorField,
    x: &FourVector,
    h: f64,
    mode: DerivativeMode,
) -> Result<FourVector> {
    let uv = u.value(x);
    let m = exterior_derivative_with(p, x, h, mode)?;
    let first = interior_product(&uv, &m);
    let analytic = match mode {
        DerivativeMode::PreferAnalytic => u.jacobian(x).zip(p.jacobian(x)),
        DerivativeMode::FiniteDifference => None,
    };
    let second = match analytic {
        Some((ju, jp)) => {
            let pv = p.value(x).to_covariant().components;
            let uc = uv.to_contravariant().components;
            let mut g = [0.0; 4];
            for (nu, gn) in g.iter_mut().enumerate() {
                *gn = (0..4).map(|mu| ju[nu][mu] * pv[mu] + uc[mu] * jp[nu][mu]).sum();
            }
            FourVector::covariant(g)
        }
        None => {
            check_stencil(x, h, |q| u.in_domain(q) && p.in_domain(q))?;
            let g = [0, 1, 2, 3].map(|axis| {
                central(x, axis, h, &|q| [crate::core4::minkowski_dot(&u.value(q), &p.value(q).to_covariant())])[0]
            });
            FourVector::covariant(g)
        }
    };
    Ok(first + second)
}

/// `∂_μ F^μ` by central differences.
pub fn four_divergence(f: &dyn VectorField, x: &FourVector, h: f64) -> Result<f64> {
    check_stencil(x, h, |q| f.in_domain(q))?;
    Ok(divergence_of(x, h, &|q| f.value(q).to_contravariant().components))
}

fn divergence_of(x: &FourVector, h: f64, f: &impl Fn(&FourVector) -> [f64; 4]) -> f64 {
    (0..4).map(|mu| central(x, mu, h, f)[mu]).sum()
}

/// Rectangular sampling box in `(x⁰, x¹, x², x³)`.
///
/// `samples[a]` points are laid out along axis `a`; periodic spatial axes
/// place them at `extent/samples` spacing without repeating the endpoint.
/// `h` is the finite-difference step and is independent of the sample
/// spacing, so [`GridBox::refined`] halves `h` on the same sample points.
#[derive(Debug, Clone, PartialEq)]
pub struct GridBox {
    pub origin: FourVector,
    pub extents: [f64; 4],
    pub samples: [usize; 4],
    pub h: f64,
    pub periodic: [bool; 3],
}

impl GridBox {
    pub fn new(
        origin: FourVector,
        extents: [f64; 4],
        samples: [usize; 4],
        h: f64,
        periodic: [bool; 3],
    ) -> Result<Self> {
        if !(h > 0.0) || !h.is_finite() {
            return Err(Error::InvalidGrid { reason: "step must be positive" });
        }
        if samples[0] == 0 || samples[1..].iter().any(|&n| n < 4) {
            return Err(Error::InvalidGrid { reason: "need at least 4 samples per spatial axis" });
        }
        if extents[1..].iter().any(|&e| !(e > 0.0)) || extents[0] < 0.0 {
            return Err(Error::InvalidGrid { reason: "extents must be positive" });
        }
        Ok(Self { origin: origin.to_contravariant(), extents, samples, h, periodic })
    }

    /// Box whose sample spacing equals `h` on every non-degenerate axis.
    pub fn uniform(origin: FourVector, extents: [f64; 4], h: f64, periodic: [bool; 3]) -> Result<Self> {
        let mut samples = [1usize; 4];
        for a in 0..4 {
            let per = a > 0 && periodic[a - 1];
            let n = math::round(extents[a] / h) as usize;
            samples[a] = if per { n.max(1) } else { n + 1 };
        }
        Self::new(origin, extents, samples, h, periodic)
    }

    /// Same sample points, half the difference step.
    pub fn refined(&self) -> Self {
        Self { h: 0.5 * self.h, ..self.clone() }
    }

    fn spacing(&self, axis: usize) -> f64 {
        let n = self.samples[axis];
        if axis > 0 && self.periodic[axis - 1] {
            self.extents[axis] / n as f64
        } else if n > 1 {
            self.extents[axis] / (n - 1) as f64
        } else {
            0.0
        }
    }

    pub fn len(&self) -> usize {
        self.samples.iter().product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Index ranges of interior samples: one sample is dropped at each end of
    /// every non-periodic axis that has at least three samples.
    pub fn interior_ranges(&self) -> [(usize, usize); 4] {
        let mut r = [(0, 0); 4];
        for a in 0..4 {
            let n = self.samples[a];
            let per = a > 0 && self.periodic[a - 1];
            r[a] = if per || n < 3 { (0, n) } else { (1, n - 1) };
        }
        r
    }

    pub fn interior_len(&self) -> usize {
        self.interior_ranges().iter().map(|(a, b)| b - a).product()
    }

    /// `k`-th interior point in row-major `(t, x, y, z)` order.
    pub fn interior_point(&self, mut k: usize) -> FourVector {
        let r = self.interior_ranges();
        let mut idx = [0usize; 4];
        for a in (0..4).rev() {
            let len = r[a].1 - r[a].0;
            idx[a] = r[a].0 + k % len;
            k /= len;
        }
        let o = self.origin.components;
        FourVector::contravariant([0, 1, 2, 3].map(|a| o[a] + idx[a] as f64 * self.spacing(a)))
    }
}

/// Differential identities checked on a grid.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum IdentityKind {
    /// `∂_μ M*^{μν} = 0`.
    DivDual,
    /// `∂_μ K^μ = −2 ℰ·ℬ`.
    KinematicDivergence,
    /// Time component of the equation of motion: `γ v·ℰ = ∂ₜθ`.
    EomTime,
    /// Spatial components: `ℰ + v×ℬ = −γ⁻¹∇θ`.
    EomSpace,
    /// `L_U P = d(h + qϱ − θ)` with every derivative by differences.
    EomLie,
    /// `L_U M = d i_U M = 0`.
    VorticityTransport,
    /// `U^ν ∂_ν θ = 0`.
    ThetaTransport,
    /// `∂_μ K′^μ = 0` for `K′ = K − (0, 2θℬ)`; holds only when `γ → 1`.
    NoetherNonRelativistic,
    /// Analytic derivatives against central differences.
    FdCrosscheck,
}

impl IdentityKind {
    pub const ALL: [IdentityKind; 9] = [
        IdentityKind::DivDual,
        IdentityKind::KinematicDivergence,
        IdentityKind::EomTime,
        IdentityKind::EomSpace,
        IdentityKind::EomLie,
        IdentityKind::VorticityTransport,
        IdentityKind::ThetaTransport,
        IdentityKind::NoetherNonRelativistic,
        IdentityKind::FdCrosscheck,
    ];

    pub fn label(&self) -> &'static str {
        match self {
            IdentityKind::DivDual => "div-dual",
            IdentityKind::KinematicDivergence => "dK-kinematic",
            IdentityKind::EomTime => "eom-0",
            IdentityKind::EomSpace => "eom-1",
            IdentityKind::EomLie => "eom-lie",
            IdentityKind::VorticityTransport => "vorticity-transport",
            IdentityKind::ThetaTransport => "utheta",
            IdentityKind::NoetherNonRelativistic => "noether-NR",
            IdentityKind::FdCrosscheck => "fd-crosscheck",
        }
    }

    /// Whether the residual is a pure difference-truncation error (`O(h²)`)
    /// rather than a pointwise analytic residual.
    pub fn is_difference_based(&self) -> bool {
        !matches!(self, IdentityKind::EomTime | IdentityKind::EomSpace | IdentityKind::ThetaTransport)
    }
}

impl fmt::Display for IdentityKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for IdentityKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        IdentityKind::ALL
            .iter()
            .copied()
            .find(|k| k.label().eq_ignore_ascii_case(s))
            .ok_or(Error::InvalidParameter { reason: "unknown identity kind" })
    }
}

/// Fields an identity may draw on. Missing entries make the matching kinds
/// fail with [`Error::UnsupportedKind`].
#[derive(Clone, Copy, Default)]
pub struct FieldBundle<'a> {
    pub velocity: Option<&'a dyn VectorField>,
    pub momentum: Option<&'a dyn CovectorField>,
    pub enthalpy: Option<&'a dyn ScalarField>,
    pub theta: Option<&'a dyn ScalarField>,
    pub potential: Option<&'a dyn CovectorField>,
    pub charge: f64,
}

impl<'a> FieldBundle<'a> {
    pub fn momentum_only(p: &'a dyn CovectorField) -> Self {
        Self { momentum: Some(p), ..Self::default() }
    }
}

/// Outcome of one identity sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct IdentityReport {
    pub kind: IdentityKind,
    pub max_residual: f64,
    /// Root-mean-square residual over the sampled points.
    pub l2_residual: f64,
    pub h: f64,
    pub convergence_order: Option<f64>,
    /// Largest magnitude among the terms that enter the residual; a yardstick
    /// for relative comparisons.
    pub scale: f64,
    pub points: usize,
}

impl IdentityReport {
    pub fn passes(&self, tolerance: f64) -> bool {
        self.max_residual.is_finite() && self.max_residual <= tolerance
    }

    /// `max_residual / scale`, or the bare residual when the scale vanishes.
    pub fn relative_residual(&self) -> f64 {
        if self.scale > 0.0 {
            self.max_residual / self.scale
        } else {
            self.max_residual
        }
    }
}

/// Observed order `log₂(coarse/fine)`.
pub fn convergence_order(coarse: f64, fine: f64) -> f64 {
    math::log2(coarse / fine)
}

fn max_abs4(v: &[f64; 4]) -> f64 {
    v.iter().fold(0.0f64, |m, &c| m.max(math::abs(c)))
}

fn require<T>(x: Option<T>, kind: IdentityKind) -> Result<T> {
    x.ok_or(Error::UnsupportedKind { kind: kind.label() })
}

/// Residual and scale of `kind` at one point.
fn residual_at(kind: IdentityKind, f: &FieldBundle<'_>, x: &FourVector, h: f64) -> Result<(f64, f64)> {
    use DerivativeMode::*;
    match kind {
        IdentityKind::DivDual => {
            let p = require(f.momentum, kind)?;
            check_stencil(x, h, |q| p.in_domain(q))?;
            let dual = |q: &FourVector| -> [[f64; 4]; 4] {
                match exterior_derivative_oneform(p, q, h) {
                    Ok(m) => hodge_dual(&m).upper_matrix(),
                    Err(_) => [[f64::NAN; 4]; 4],
                }
            };
            let mut div = [0.0; 4];
            let mut scale = 0.0f64;
            for mu in 0..4 {
                let plus = dual(&shifted(x, mu, h));
                let minus = dual(&shifted(x, mu, -h));
                for nu in 0..4 {
                    div[nu] += (plus[mu][nu] - minus[mu][nu]) / (2.0 * h);
                    scale = scale.max(math::abs(plus[mu][nu]));
                }
            }
            Ok((max_abs4(&div), scale))
        }
        IdentityKind::KinematicDivergence => {
            let p = require(f.momentum, kind)?;
            check_stencil(x, h, |q| p.in_domain(q))?;
            let k = |q: &FourVector| -> [f64; 4] {
                match exterior_derivative_oneform(p, q, h) {
                    Ok(m) => helicity_current(&p.value(q), &m).components,
                    Err(_) => [f64::NAN; 4],
                }
            };
            let div = divergence_of(x, h, &k);
            let m = exterior_derivative_oneform(p, x, h)?;
            let src = -2.0 * m.e.dot(&m.b);
            Ok((math::abs(div - src), math::abs(div).max(math::abs(src))))
        }
        IdentityKind::EomTime | IdentityKind::EomSpace => {
            let u = require(f.velocity, kind)?;
            let p = require(f.momentum, kind)?;
            let th = require(f.theta, kind)?;
            let uv = u.value(x).to_contravariant();
            let gamma = uv.time();
            let v = (1.0 / gamma) * uv.spatial();
            let m = exterior_derivative_oneform(p, x, h)?;
            let g = scalar_gradient(th, x, h, PreferAnalytic)?.components;
            if kind == IdentityKind::EomTime {
                let lhs = gamma * v.dot(&m.e);
                Ok((math::abs(lhs - g[0]), math::abs(lhs).max(math::abs(g[0]))))
            } else {
                let grad = ThreeVector::new(g[1], g[2], g[3]);
                let lhs = m.e + v.cross(&m.b);
                let rhs = (-1.0 / gamma) * grad;
                Ok(((lhs - rhs).max_abs(), lhs.max_abs().max(rhs.max_abs())))
            }
        }
        IdentityKind::EomLie => {
            let u = require(f.velocity, kind)?;
            let p = require(f.momentum, kind)?;
            let hf = require(f.enthalpy, kind)?;
            let th = require(f.theta, kind)?;
            let lie = lie_derivative_with(u, p, x, h, FiniteDifference)?.components;
            let free = |q: &FourVector| -> f64 {
                let rho = match f.potential {
                    Some(a) => crate::core4::minkowski_dot(&u.value(q), &a.value(q).to_covariant()),
                    None => 0.0,
                };
                hf.value(q) + f.charge * rho - th.value(q)
            };
            check_stencil(x, h, |q| hf.in_domain(q) && th.in_domain(q))?;
            let mut r = [0.0; 4];
            for (mu, rm) in r.iter_mut().enumerate() {
                *rm = lie[mu] - central(x, mu, h, &|q| [free(q)])[0];
            }
            Ok((max_abs4(&r), max_abs4(&lie)))
        }
        IdentityKind::VorticityTransport => {
            let u = require(f.velocity, kind)?;
            let p = require(f.momentum, kind)?;
            check_stencil(x, h, |q| u.in_domain(q) && p.in_domain(q))?;
            let ium = |q: &FourVector| -> [f64; 4] {
                match exterior_derivative_oneform(p, q, h) {
                    Ok(m) => interior_product(&u.value(q), &m).components,
                    Err(_) => [f64::NAN; 4],
                }
            };
            let jac = [0, 1, 2, 3].map(|mu| central(x, mu, h, &ium));
            let d = curl_of_jacobian(&jac);
            Ok((d.max_abs(), max_abs4(&ium(x))))
        }
        IdentityKind::ThetaTransport => {
            let u = require(f.velocity, kind)?;
            let th = require(f.theta, kind)?;
            let g = scalar_gradient(th, x, h, PreferAnalytic)?;
            let uv = u.value(x);
            let r = crate::core4::minkowski_dot(&uv, &g);
            let s = uv
                .to_contravariant()
                .components
                .iter()
                .zip(g.components.iter())
                .fold(0.0f64, |m, (a, b)| m.max(math::abs(a * b)));
            Ok((math::abs(r), s))
        }
        IdentityKind::NoetherNonRelativistic => {
            let p = require(f.momentum, kind)?;
            let th = require(f.theta, kind)?;
            check_stencil(x, h, |q| p.in_domain(q) && th.in_domain(q))?;
            let kp = |q: &FourVector| -> [f64; 4] {
                match exterior_derivative_oneform(p, q, h) {
                    Ok(m) => {
                        let k = helicity_current(&p.value(q), &m).components;
                        let t = 2.0 * th.value(q);
                        [k[0], k[1] - t * m.b.0[0], k[2] - t * m.b.0[1], k[3] - t * m.b.0[2]]
                    }
                    Err(_) => [f64::NAN; 4],
                }
            };
            let div = divergence_of(x, h, &kp);
            let m = exterior_derivative_oneform(p, x, h)?;
            let g = scalar_gradient(th, x, h, PreferAnalytic)?.components;
            let bgrad = 2.0 * m.b.dot(&ThreeVector::new(g[1], g[2], g[3]));
            let scale = math::abs(2.0 * m.e.dot(&m.b)).max(math::abs(bgrad));
            Ok((math::abs(div), scale))
        }
        IdentityKind::FdCrosscheck => {
            let mut r = 0.0f64;
            let mut s = 0.0f64;
            let mut any = false;
            if let Some(p) = f.momentum {
                if p.jacobian(x).is_some() {
                    let a = covector_jacobian(p, x, h, PreferAnalytic)?;
                    let n = covector_jacobian(p, x, h, FiniteDifference)?;
                    for mu in 0..4 {
                        for nu in 0..4 {
                            r = r.max(math::abs(a[mu][nu] - n[mu][nu]));
                            s = s.max(math::abs(a[mu][nu]));
                        }
                    }
                    any = true;
                }
            }
            if let Some(u) = f.velocity {
                if u.jacobian(x).is_some() {
                    let a = vector_jacobian(u, x, h, PreferAnalytic)?;
                    let n = vector_jacobian(u, x, h, FiniteDifference)?;
                    for mu in 0..4 {
                        for nu in 0..4 {
                            r = r.max(math::abs(a[mu][nu] - n[mu][nu]));
                            s = s.max(math::abs(a[mu][nu]));
                        }
                    }
                    any = true;
                }
            }
            for sf in [f.theta, f.enthalpy].into_iter().flatten() {
                if sf.gradient(x).is_some() {
                    let a = scalar_gradient(sf, x, h, PreferAnalytic)?.components;
                    let n = scalar_gradient(sf, x, h, FiniteDifference)?.components;
                    for mu in 0..4 {
                        r = r.max(math::abs(a[mu] - n[mu]));
                        s = s.max(math::abs(a[mu]));
                    }
                    any = true;
                }
            }
            if !any {
                return Err(Error::UnsupportedKind { kind: kind.label() });
            }
            Ok((r, s))
        }
    }
}

#[derive(Clone, Copy)]
struct Accum {
    max: f64,
    sumsq: NeumaierSum,
    scale: f64,
}

/// Sweep `kind` over the interior points of `grid`.
pub fn verify_identity(kind: IdentityKind, fields: &FieldBundle<'_>, grid: &GridBox) -> Result<IdentityReport> {
    let n = grid.interior_len();
    let h = grid.h;
    // Dry run at one point so missing fields surface before the sweep.
    if n > 0 {
        residual_at(kind, fields, &grid.interior_point(0), h)?;
    }
    let partials = map_chunks(n, |range| -> Result<Accum> {
        let mut a = Accum { max: 0.0, sumsq: NeumaierSum::new(), scale: 0.0 };
        for k in range {
            let (r, s) = residual_at(kind, fields, &grid.interior_point(k), h)?;
            if !r.is_finite() {
                return Err(Error::StencilOutOfDomain { point: grid.interior_point(k).components });
            }
            a.max = a.max.max(r);
            a.sumsq.add(r * r);
            a.scale = a.scale.max(s);
        }
        Ok(a)
    });
    let mut total = Accum { max: 0.0, sumsq: NeumaierSum::new(), scale: 0.0 };
    for p in partials {
        let p = p?;
        total.max = total.max.max(p.max);
        total.sumsq.merge(&p.sumsq);
        total.scale = total.scale.max(p.scale);
    }
    let l2 = if n > 0 { math::sqrt(total.sumsq.value() / n as f64) } else { 0.0 };
    Ok(IdentityReport {
        kind,
        max_residual: total.max,
        l2_residual: l2,
        h,
        convergence_order: None,
        scale: total.scale,
        points: n,
    })
}

/// Run `kind` at `h` and `h/2` on the same points; the second report carries
/// the observed order.
pub fn verify_identity_refined(
    kind: IdentityKind,
    fields: &FieldBundle<'_>,
    grid: &GridBox,
) -> Result<[IdentityReport; 2]> {
    let coarse = verify_identity(kind, fields, grid)?;
    let mut fine = verify_identity(kind, fields, &grid.refined())?;
    fine.convergence_order = Some(convergence_order(coarse.max_residual, fine.max_residual));
    Ok([coarse, fine])
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn pt(c: [f64; 4]) -> FourVector {
        FourVector::contravariant(c)
    }

    fn random_quartic(seed: u64) -> PolynomialCovector {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        PolynomialCovector::dense(4, |_, _| rng.gen_range(-1.0..1.0))
    }

    #[test]
    fn linear_time_component_gives_unit_electric_part() {
        let p = ClosureCovector::new(|x| FourVector::covariant([x.components[1], 0.0, 0.0, 0.0]));
        let m = exterior_derivative_oneform(&p, &pt([0.3, 0.2, -0.1, 0.5]), 0.1).unwrap();
        assert_abs_diff_eq!(m.e.0[0], -1.0, epsilon = 1e-14);
        assert_abs_diff_eq!(m.e.0[1], 0.0, epsilon = 1e-14);
        assert!(m.b.max_abs() < 1e-14);
    }

    #[test]
    fn gradient_covector_is_closed() {
        let phi = Polynomial4::new().term([1, 1, 1, 0], 1.0);
        let p = ClosureCovector::new(move |x| FourVector::covariant(phi.gradient(x)));
        for x in [[0.1, 0.2, 0.3, 0.4], [-1.0, 0.5, 2.0, 0.0]] {
            let m = exterior_derivative_with(&p, &pt(x), 0.05, DerivativeMode::FiniteDifference).unwrap();
            assert!(m.max_abs() < 1e-12);
        }
    }

    #[test]
    fn azimuthal_potential_gives_axial_b() {
        // P_ν = (0, 0, x¹, 0): the contravariant potential is (0, 0, −x¹, 0).
        let p = ClosureCovector::new(|x| FourVector::covariant([0.0, 0.0, x.components[1], 0.0]));
        let m = exterior_derivative_oneform(&p, &pt([0.0, 0.4, 0.1, 0.0]), 0.1).unwrap();
        assert!(m.e.max_abs() < 1e-14);
        // Hand curl of 𝒜 = (0, −x, 0) is (0, 0, −1).
        assert_abs_diff_eq!(m.b.0[2], -1.0, epsilon = 1e-14);
        assert_abs_diff_eq!(m.b.0[0], 0.0, epsilon = 1e-14);
    }

    #[test]
    fn helicity_current_examples() {
        // ABC flow with A=B=C=1 at the origin: a = (1, 1, 1) and curl a = a.
        let abc = |x: &FourVector| {
            let [_, x1, x2, x3] = x.components;
            ThreeVector::new(
                math::sin(x3) + math::cos(x2),
                math::sin(x1) + math::cos(x3),
                math::sin(x2) + math::cos(x1),
            )
        };
        let h = 1e-4;
        let o = pt([0.0; 4]);
        let d = |axis: usize, comp: usize| {
            (abc(&shifted(&o, axis, h)).0[comp] - abc(&shifted(&o, axis, -h)).0[comp]) / (2.0 * h)
        };
        let curl = ThreeVector::new(d(2, 2) - d(3, 1), d(3, 0) - d(1, 2), d(1, 1) - d(2, 0));
        let a = abc(&o);
        assert!((curl - a).max_abs() < 1e-8);
        let p = FourVector::contravariant([0.0, a.0[0], a.0[1], a.0[2]]);
        let k = helicity_current(&p, &Bivector::new(ThreeVector::ZERO, curl));
        assert_abs_diff_eq!(k.components[0], 3.0, epsilon = 1e-7);
        assert!(k.spatial().max_abs() < 1e-7);

        let k0 = helicity_current(&FourVector::covariant([0.0; 4]), &Bivector::new(a, a));
        assert_eq!(k0.components, [0.0; 4]);
        let k1 = helicity_current(
            &FourVector::covariant([1.0, 0.0, 0.0, 0.0]),
            &Bivector::new(ThreeVector::ZERO, ThreeVector::new(0.0, 0.0, 2.0)),
        );
        assert_eq!(k1.components, [0.0, 0.0, 0.0, 2.0]);
    }

    #[test]
    fn helicity_current_matches_component_formula() {
        let p = FourVector::contravariant([0.7, -0.3, 1.2, 0.4]);
        let m = Bivector::new(ThreeVector::new(0.2, -0.5, 0.9), ThreeVector::new(1.1, 0.3, -0.6));
        let k = helicity_current(&p, &m);
        let a = p.spatial();
        assert_abs_diff_eq!(k.components[0], a.dot(&m.b), epsilon = 1e-14);
        let want = 0.7 * m.b - a.cross(&m.e);
        assert!((k.spatial() - want).max_abs() < 1e-14);
    }

    #[test]
    fn lie_derivative_examples() {
        let u = ClosureVector::new(|_| FourVector::contravariant([1.0, 0.0, 0.0, 0.0]));
        let c = ClosureCovector::new(|_| FourVector::covariant([0.5, 1.0, -2.0, 3.0]));
        let l = lie_derivative_oneform(&u, &c, &pt([0.1, 0.2, 0.3, 0.4]), 0.1).unwrap();
        assert!(l.components.iter().all(|v| v.abs() < 1e-14));
        let p = ClosureCovector::new(|x| FourVector::covariant([math::sin(x.components[0]), 0.0, 0.0, 0.0]));
        let x = pt([0.3, 0.0, 0.0, 0.0]);
        let l = lie_derivative_oneform(&u, &p, &x, 1e-4).unwrap();
        assert_abs_diff_eq!(l.components[0], math::cos(0.3), epsilon = 1e-8);
        assert!(l.components[1..].iter().all(|v| v.abs() < 1e-12));
    }

    #[test]
    fn lie_derivative_routes_agree_on_polynomials() {
        let p = random_quartic(3);
        let u = ClosureVector::new(|x| {
            let [t, a, b, c] = x.components;
            FourVector::contravariant([1.0 + 0.1 * a * a, 0.2 * b, -0.1 * t * c, 0.05])
        })
        .with_jacobian(|x| {
            let [t, a, _, c] = x.components;
            let mut j = [[0.0; 4]; 4];
            j[1][0] = 0.2 * a;
            j[2][1] = 0.2;
            j[0][2] = -0.1 * c;
            j[3][2] = -0.1 * t;
            j
        });
        let x = pt([0.2, -0.3, 0.5, 0.1]);
        let a = lie_derivative_with(&u, &p, &x, 1e-3, DerivativeMode::PreferAnalytic).unwrap();
        let n = lie_derivative_with(&u, &p, &x, 1e-3, DerivativeMode::FiniteDifference).unwrap();
        for i in 0..4 {
            assert_abs_diff_eq!(a.components[i], n.components[i], epsilon = 1e-5);
        }
    }

    #[test]
    fn divergence_examples() {
        let c = ClosureVector::new(|_| FourVector::contravariant([1.0, 2.0, 3.0, 4.0]));
        assert_abs_diff_eq!(four_divergence(&c, &pt([0.0; 4]), 0.1).unwrap(), 0.0, epsilon = 1e-14);
        let id = ClosureVector::new(|x| *x);
        assert_abs_diff_eq!(four_divergence(&id, &pt([0.3, -1.0, 2.0, 5.0]), 0.1).unwrap(), 4.0, epsilon = 1e-12);
    }

    #[test]
    fn stencil_outside_domain_is_reported() {
        struct Half;
        impl VectorField for Half {
            fn value(&self, x: &FourVector) -> FourVector {
                *x
            }
            fn in_domain(&self, x: &FourVector) -> bool {
                x.components[1] >= 0.0
            }
        }
        assert!(matches!(
            four_divergence(&Half, &pt([0.0, 0.05, 0.0, 0.0]), 0.1),
            Err(Error::StencilOutOfDomain { .. })
        ));
    }

    #[test]
    fn polynomial_gradient_matches_differences() {
        let p = random_quartic(11);
        let x = pt([0.3, -0.7, 1.1, 0.2]);
        let a = covector_jacobian(&p, &x, 1e-4, DerivativeMode::PreferAnalytic).unwrap();
        let n = covector_jacobian(&p, &x, 1e-4, DerivativeMode::FiniteDifference).unwrap();
        for mu in 0..4 {
            for nu in 0..4 {
                assert_abs_diff_eq!(a[mu][nu], n[mu][nu], epsilon = 1e-6);
            }
        }
    }

    #[test]
    fn grid_interior_layout() {
        let g = GridBox::new(pt([0.0; 4]), [0.3, 1.0, 1.0, 1.0], [4, 5, 5, 4], 0.1, [false, false, true]).unwrap();
        assert_eq!(g.interior_ranges(), [(1, 3), (1, 4), (1, 4), (0, 4)]);
        assert_eq!(g.interior_len(), 2 * 3 * 3 * 4);
        let last = g.interior_point(g.interior_len() - 1).components;
        assert_abs_diff_eq!(last[0], 0.2, epsilon = 1e-15);
        assert_abs_diff_eq!(last[3], 0.75, epsilon = 1e-15);
        assert!(GridBox::new(pt([0.0; 4]), [0.0, 1.0, 1.0, 1.0], [1, 3, 5, 5], 0.1, [false; 3]).is_err());
        assert!(GridBox::new(pt([0.0; 4]), [0.0, 1.0, 1.0, 1.0], [1, 5, 5, 5], 0.0, [false; 3]).is_err());
    }

    #[test]
    fn kinematic_identities_converge_at_second_order() {
        let p = random_quartic(7);
        let grid =
            GridBox::new(pt([-0.1, -0.6, -0.6, -0.6]), [0.2, 1.2, 1.2, 1.2], [3, 9, 9, 9], 0.1, [false; 3]).unwrap();
        let f = FieldBundle::momentum_only(&p);
        for kind in [IdentityKind::DivDual, IdentityKind::KinematicDivergence] {
            let [c, fi] = verify_identity_refined(kind, &f, &grid).unwrap();
            let order = fi.convergence_order.unwrap();
            assert!(c.max_residual > fi.max_residual, "{kind}");
            assert!((order - 2.0).abs() < 0.3, "{kind}: order {order}");
        }
    }

    #[test]
    fn eom_kinds_need_velocity() {
        let p = random_quartic(1);
        let grid = GridBox::uniform(pt([0.0; 4]), [0.0, 0.4, 0.4, 0.4], 0.1, [false; 3]).unwrap();
        let e = verify_identity(IdentityKind::EomSpace, &FieldBundle::momentum_only(&p), &grid);
        assert_eq!(e, Err(Error::UnsupportedKind { kind: "eom-1" }));
    }

    #[test]
    fn kind_labels_round_trip() {
        for k in IdentityKind::ALL {
            assert_eq!(k.label().parse::<IdentityKind>().unwrap(), k);
        }
        assert!("nope".parse::<IdentityKind>().is_err());
    }

    proptest::proptest! {
        #[test]
        fn closed_forms_are_closed(seed in 0u64..1000, x in proptest::array::uniform4(-1.0f64..1.0)) {
            // d(dφ) for a random quartic φ, with analytic first and numeric second derivative.
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let phi = Polynomial4::dense(4, |_| rng.gen_range(-1.0..1.0));
            let p = ClosureCovector::new(move |q| FourVector::covariant(phi.gradient(q)));
            let m1 = exterior_derivative_with(&p, &pt(x), 0.02, DerivativeMode::FiniteDifference).unwrap();
            let m2 = exterior_derivative_with(&p, &pt(x), 0.01, DerivativeMode::FiniteDifference).unwrap();
            proptest::prop_assert!(m1.max_abs() < 1e-2);
            proptest::prop_assert!(m2.max_abs() <= 0.26 * m1.max_abs() + 1e-11);
        }
    }
}
