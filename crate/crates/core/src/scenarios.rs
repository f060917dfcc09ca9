//! Manufactured solutions of the barotropic equation of motion
//! `L_U P = d(h + qϱ − θ)` and kinematic test flows.
//!
//! A [`Scenario`] bundles the 4-velocity `U`, enthalpy `h`, heat potential
//! `θ`, charge `q`, electromagnetic potential `A` and the canonical momentum
//! `P = hU♭ + qA`. Solutions are built by choosing `U` and `h` and defining
//! `θ` from the force balance, so every constructor can be checked against
//! the equation it is meant to satisfy with [`validate_scenario`].

use alloc::format;
use alloc::string::String;
use alloc::sync::Arc;
use alloc::vec::Vec;

use crate::calculus::{
    verify_identity, ClosureCovector, ClosureScalar, CovectorField, FieldBundle, GridBox, IdentityKind, IdentityReport,
    ScalarField, VectorField,
};
use crate::core4::{
    boost_four_vector, four_velocity, mat_mul, mat_vec, minkowski_dot, transpose, FourVector, LorentzBoost, Mat4,
    ThreeVector, METRIC,
};
use crate::{math, Error, Result};

/// Descriptive data carried next to the fields.
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioMeta {
    /// Name of the inertial frame the fields are expressed in.
    pub frame: String,
    /// Spatial translation (zero time component) leaving every field
    /// invariant, when the flow is periodic.
    pub period: Option<FourVector>,
    /// Velocity with which the whole pattern translates (zero when stationary).
    pub pattern_velocity: ThreeVector,
    /// A point on the symmetry axis at `t = 0`, when there is one.
    pub anchor: Option<FourVector>,
    /// Radius outside which `dP` vanishes in the construction frame.
    pub support_radius: Option<f64>,
    /// Upper bound on `|v|` over the flow.
    pub max_speed: f64,
    /// Residual tolerance for the pointwise identities.
    pub tolerance: f64,
    /// Coefficient `C` in the difference-identity tolerance `C·h²`.
    pub fd_coefficient: f64,
}

impl ScenarioMeta {
    fn stationary(frame: &str, max_speed: f64) -> Self {
        Self {
            frame: frame.into(),
            period: None,
            pattern_velocity: ThreeVector::ZERO,
            anchor: None,
            support_radius: None,
            max_speed,
            tolerance: 1e-10,
            fd_coefficient: 0.0,
        }
    }

    /// Axis position at time `t` (spatial part).
    pub fn axis_at(&self, t: f64) -> Option<ThreeVector> {
        self.anchor.map(|a| a.spatial() + (t - a.time()) * self.pattern_velocity)
    }
}

/// A flow together with the thermodynamic fields that make it a solution.
#[derive(Clone)]
pub struct Scenario {
    pub label: String,
    pub velocity: Arc<dyn VectorField>,
    pub enthalpy: Option<Arc<dyn ScalarField>>,
    pub theta: Option<Arc<dyn ScalarField>>,
    pub charge: f64,
    pub potential: Option<Arc<dyn CovectorField>>,
    pub momentum: Option<Arc<dyn CovectorField>>,
    pub meta: ScenarioMeta,
}

impl core::fmt::Debug for Scenario {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.debug_struct("Scenario")
            .field("label", &self.label)
            .field("charge", &self.charge)
            .field("has_momentum", &self.momentum.is_some())
            .field("has_theta", &self.theta.is_some())
            .field("meta", &self.meta)
            .finish()
    }
}

impl Scenario {
    pub fn fields(&self) -> FieldBundle<'_> {
        FieldBundle {
            velocity: Some(&*self.velocity),
            momentum: self.momentum.as_deref(),
            enthalpy: self.enthalpy.as_deref(),
            theta: self.theta.as_deref(),
            potential: self.potential.as_deref(),
            charge: self.charge,
        }
    }

    pub fn momentum(&self) -> Result<&dyn CovectorField> {
        self.momentum.as_deref().ok_or_else(|| Error::UnsupportedScenario { label: self.label.clone() })
    }

    pub fn theta(&self) -> Result<&dyn ScalarField> {
        self.theta.as_deref().ok_or_else(|| Error::UnsupportedScenario { label: self.label.clone() })
    }

    pub fn is_kinematic(&self) -> bool {
        self.momentum.is_none()
    }

    /// `h + qϱ` with `ϱ = U^μ A_μ`.
    pub fn enthalpy_plus_potential(&self, x: &FourVector) -> Option<f64> {
        let h = self.enthalpy.as_ref()?.value(x);
        let rho = match &self.potential {
            Some(a) => minkowski_dot(&self.velocity.value(x), &a.value(x)),
            None => 0.0,
        };
        Some(h + self.charge * rho)
    }

    /// Free energy `h + qϱ − θ`.
    pub fn free_energy(&self, x: &FourVector) -> Option<f64> {
        let th = self.theta.as_ref().map_or(0.0, |t| t.value(x));
        Some(self.enthalpy_plus_potential(x)? - th)
    }
}

/// Scalar field that is constant everywhere.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConstantScalar(pub f64);

impl ScalarField for ConstantScalar {
    fn value(&self, _x: &FourVector) -> f64 {
        self.0
    }
    fn gradient(&self, _x: &FourVector) -> Option<FourVector> {
        Some(FourVector::covariant([0.0; 4]))
    }
}

/// Vector field that is constant everywhere.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConstantVector(pub FourVector);

impl VectorField for ConstantVector {
    fn value(&self, _x: &FourVector) -> FourVector {
        self.0.to_contravariant()
    }
    fn jacobian(&self, _x: &FourVector) -> Option<Mat4> {
        Some([[0.0; 4]; 4])
    }
}

/// `P = hU♭ + qA`, with the product-rule Jacobian when every ingredient has one.
pub struct CanonicalMomentum {
    pub velocity: Arc<dyn VectorField>,
    pub enthalpy: Arc<dyn ScalarField>,
    pub charge: f64,
    pub potential: Option<Arc<dyn CovectorField>>,
}

impl CovectorField for CanonicalMomentum {
    fn value(&self, x: &FourVector) -> FourVector {
        let h = self.enthalpy.value(x);
        let u = self.velocity.value(x).to_covariant();
        let mut p = h * u;
        if let Some(a) = &self.potential {
            p += self.charge * a.value(x).to_covariant();
        }
        p
    }

    fn jacobian(&self, x: &FourVector) -> Option<Mat4> {
        let ju = self.velocity.jacobian(x)?;
        let gh = self.enthalpy.gradient(x)?.to_covariant().components;
        let h = self.enthalpy.value(x);
        let u = self.velocity.value(x).to_covariant().components;
        let ja = match &self.potential {
            Some(a) => Some(a.jacobian(x)?),
            None => None,
        };
        let mut j = [[0.0; 4]; 4];
        for mu in 0..4 {
            for nu in 0..4 {
                j[mu][nu] = gh[mu] * u[nu] + h * METRIC[nu] * ju[mu][nu];
                if let Some(ja) = &ja {
                    j[mu][nu] += self.charge * ja[mu][nu];
                }
            }
        }
        Some(j)
    }

    fn in_domain(&self, x: &FourVector) -> bool {
        self.velocity.in_domain(x) && self.enthalpy.in_domain(x)
    }
}

/// Assemble a scenario whose momentum is derived from `U`, `h`, `q`, `A`.
pub fn scenario_from_parts(
    label: String,
    velocity: Arc<dyn VectorField>,
    enthalpy: Arc<dyn ScalarField>,
    theta: Arc<dyn ScalarField>,
    charge: f64,
    potential: Option<Arc<dyn CovectorField>>,
    meta: ScenarioMeta,
) -> Scenario {
    let momentum: Arc<dyn CovectorField> = Arc::new(CanonicalMomentum {
        velocity: velocity.clone(),
        enthalpy: enthalpy.clone(),
        charge,
        potential: potential.clone(),
    });
    Scenario {
        label,
        velocity,
        enthalpy: Some(enthalpy),
        theta: Some(theta),
        charge,
        potential,
        momentum: Some(momentum),
        meta,
    }
}

/// Constant flow with velocity `v` and enthalpy `h0`; `θ = 0`, `q = 0`.
pub fn make_uniform(v: ThreeVector, h0: f64) -> Result<Scenario> {
    let u = four_velocity(v)?;
    Ok(scenario_from_parts(
        format!("uniform(v={:?}, h0={h0})", v.0),
        Arc::new(ConstantVector(u)),
        Arc::new(ConstantScalar(h0)),
        Arc::new(ConstantScalar(0.0)),
        0.0,
        None,
        ScenarioMeta::stationary("rest", v.norm()),
    ))
}

/// Charged fluid at rest in a prescribed static potential
/// `A = (φ, −a)` with `φ = φ₀ sin z (1 + ½cos x)` and `a = b₀(0, x, ½ sin y)`.
/// The force balance gives `θ = qφ`; `ℰ·ℬ ≠ 0`, so boosted copies carry a
/// nonzero `ℬ·∇θ`.
pub fn make_charged_rest(charge: f64, phi0: f64, b0: f64, h0: f64) -> Result<Scenario> {
    let phi = move |x: &FourVector| {
        let [_, x1, _, x3] = x.components;
        let (sz, cz) = (math::sin(x3), math::cos(x3));
        let (sx, cx) = (math::sin(x1), math::cos(x1));
        (phi0 * sz * (1.0 + 0.5 * cx), [0.0, -0.5 * phi0 * sz * sx, 0.0, phi0 * cz * (1.0 + 0.5 * cx)])
    };
    let potential = ClosureCovector::new(move |x| {
        let x = x.to_contravariant();
        let [_, x1, x2, _] = x.components;
        FourVector::covariant([phi(&x).0, 0.0, -b0 * x1, -0.5 * b0 * math::sin(x2)])
    })
    .with_jacobian(move |x| {
        let x = x.to_contravariant();
        let g = phi(&x).1;
        let mut j = [[0.0; 4]; 4];
        for mu in 0..4 {
            j[mu][0] = g[mu];
        }
        j[1][2] = -b0;
        j[2][3] = -0.5 * b0 * math::cos(x.components[2]);
        j
    });
    let theta = ClosureScalar::new(move |x| charge * phi(&x.to_contravariant()).0)
        .with_gradient(move |x| FourVector::covariant(phi(&x.to_contravariant()).1.map(|g| charge * g)));
    let mut meta = ScenarioMeta::stationary("rest", 0.0);
    meta.fd_coefficient = math::abs(charge) * (math::abs(phi0) + math::abs(b0));
    Ok(scenario_from_parts(
        format!("charged-rest(q={charge}, phi0={phi0}, b0={b0}, h0={h0})"),
        Arc::new(ConstantVector(FourVector::contravariant([1.0, 0.0, 0.0, 0.0]))),
        Arc::new(ConstantScalar(h0)),
        Arc::new(theta),
        charge,
        Some(Arc::new(potential)),
        meta,
    ))
}

/// Parameters of the screw rotor: a rigid-body-like swirl `Ω(r) r φ̂` plus an
/// axial jet `w(r) ẑ`, both with compact bump profiles `(1 − (r/r₀)²)ⁿ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RotorParams {
    pub omega0: f64,
    pub w0: f64,
    pub r0: f64,
    pub h0: f64,
    /// Exponent `n` of the bump profile; the profiles are `C^{n−1}` at `r₀`.
    pub exponent: u32,
    /// Length of the periodic cell along the axis.
    pub period: f64,
    /// Radial spline nodes on `[0, r₀]`.
    pub nodes: usize,
    /// Absolute tolerance of the radial quadrature.
    pub quadrature_tolerance: f64,
}

impl RotorParams {
    pub fn new(omega0: f64, w0: f64, r0: f64, h0: f64) -> Self {
        Self { omega0, w0, r0, h0, exponent: 4, period: 2.0 * r0, nodes: 2048, quadrature_tolerance: 1e-10 }
    }
}

/// Radial profiles of the rotor.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RotorFlow {
    omega0: f64,
    w0: f64,
    r0: f64,
    exponent: u32,
}

/// `(Ω, Ω′/r, w, w′/r)` at radius² `r2`.
#[derive(Debug, Clone, Copy)]
struct Profile {
    omega: f64,
    omega_r: f64,
    w: f64,
    w_r: f64,
}

impl RotorFlow {
    fn profile(&self, r2: f64) -> Profile {
        let s = 1.0 - r2 / (self.r0 * self.r0);
        if s <= 0.0 {
            return Profile { omega: 0.0, omega_r: 0.0, w: 0.0, w_r: 0.0 };
        }
        let n = self.exponent;
        let bump = math::powi(s, n);
        let dbump_r = -2.0 * n as f64 * math::powi(s, n - 1) / (self.r0 * self.r0);
        Profile { omega: self.omega0 * bump, omega_r: self.omega0 * dbump_r, w: self.w0 * bump, w_r: self.w0 * dbump_r }
    }

    /// `|v|²` at radius `r`.
    pub fn speed_sq(&self, r: f64) -> f64 {
        let p = self.profile(r * r);
        p.omega * p.omega * r * r + p.w * p.w
    }

    /// 3-velocity at a spatial point.
    pub fn velocity3(&self, x: &ThreeVector) -> ThreeVector {
        let [x1, x2, _] = x.0;
        let p = self.profile(x1 * x1 + x2 * x2);
        ThreeVector::new(-p.omega * x2, p.omega * x1, p.w)
    }

    /// Radial derivative of the heat potential that balances the radial force,
    /// `θ′ = −γ[ℰ_r + (v×ℬ)_r]` with `h = h0`.
    pub fn theta_prime(&self, r: f64, h0: f64) -> f64 {
        let p = self.profile(r * r);
        let (om, w) = (p.omega, p.w);
        let (dom, dw) = (p.omega_r * r, p.w_r * r);
        let v2 = om * om * r * r + w * w;
        let gamma = 1.0 / math::sqrt(1.0 - v2);
        let dv2 = 2.0 * om * r * (dom * r + om) + 2.0 * w * dw;
        let dgamma = 0.5 * gamma * gamma * gamma * dv2;
        let e_r = -h0 * dgamma;
        let b_z = h0 * (dgamma * om * r + gamma * dom * r + 2.0 * gamma * om);
        let b_phi = -h0 * (dgamma * w + gamma * dw);
        -gamma * (e_r + om * r * b_z - w * b_phi)
    }
}

impl VectorField for RotorFlow {
    fn value(&self, x: &FourVector) -> FourVector {
        let v = self.velocity3(&x.to_contravariant().spatial());
        let g = 1.0 / math::sqrt(1.0 - v.norm_sq());
        FourVector::contravariant([g, g * v.0[0], g * v.0[1], g * v.0[2]])
    }

    fn jacobian(&self, x: &FourVector) -> Option<Mat4> {
        let [_, x1, x2, _] = x.to_contravariant().components;
        let p = self.profile(x1 * x1 + x2 * x2);
        let v = [-p.omega * x2, p.omega * x1, p.w];
        let v2 = v[0] * v[0] + v[1] * v[1] + v[2] * v[2];
        let g = 1.0 / math::sqrt(1.0 - v2);
        let r2 = x1 * x1 + x2 * x2;
        let radial = 2.0 * p.omega * p.omega + 2.0 * p.omega * r2 * p.omega_r + 2.0 * p.w * p.w_r;
        let pos = [x1, x2];
        let mut j = [[0.0; 4]; 4];
        for (k, &xk) in pos.iter().enumerate() {
            let row = k + 1;
            let dg = 0.5 * g * g * g * xk * radial;
            // ∂_k of (−Ωy, Ωx, w).
            let dv = [
                -p.omega_r * xk * x2 - if k == 1 { p.omega } else { 0.0 },
                p.omega_r * xk * x1 + if k == 0 { p.omega } else { 0.0 },
                p.w_r * xk,
            ];
            j[row][0] = dg;
            for i in 0..3 {
                j[row][i + 1] = dg * v[i] + g * dv[i];
            }
        }
        Some(j)
    }
}

/// Cubic Hermite spline on uniform nodes, constant beyond the last node.
#[derive(Debug, Clone, PartialEq)]
pub struct RadialSpline {
    step: f64,
    values: Vec<f64>,
    slopes: Vec<f64>,
}

impl RadialSpline {
    pub fn value(&self, r: f64) -> f64 {
        let n = self.values.len() - 1;
        let u = r / self.step;
        if u >= n as f64 {
            return self.values[n];
        }
        let k = (math::floor(u) as usize).min(n - 1);
        let t = u - k as f64;
        let (y0, y1) = (self.values[k], self.values[k + 1]);
        let (m0, m1) = (self.slopes[k] * self.step, self.slopes[k + 1] * self.step);
        let t2 = t * t;
        let t3 = t2 * t;
        (2.0 * t3 - 3.0 * t2 + 1.0) * y0 + (t3 - 2.0 * t2 + t) * m0 + (-2.0 * t3 + 3.0 * t2) * y1 + (t3 - t2) * m1
    }

    pub fn nodes(&self) -> usize {
        self.values.len()
    }
}

const GK_X: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const GK_WK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_728,
];
const GK_WG: [f64; 4] =
    [0.129_484_966_168_869_7, 0.279_705_391_489_276_7, 0.381_830_050_505_118_9, 0.417_959_183_673_469_4];

/// Gauss–Kronrod 7–15 estimate and error on `[a, b]`.
fn gk15(f: &impl Fn(f64) -> f64, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let hw = 0.5 * (b - a);
    let fc = f(c);
    let mut k = GK_WK[7] * fc;
    let mut g = GK_WG[3] * fc;
    for i in 0..7 {
        let dx = hw * GK_X[i];
        let s = f(c - dx) + f(c + dx);
        k += GK_WK[i] * s;
        if i % 2 == 1 {
            g += GK_WG[i / 2] * s;
        }
    }
    (k * hw, math::abs((k - g) * hw))
}

/// Adaptive Gauss–Kronrod quadrature with absolute tolerance `tol`.
pub fn adaptive_quadrature(f: &impl Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> Result<f64> {
    fn rec(f: &impl Fn(f64) -> f64, a: f64, b: f64, tol: f64, depth: u32) -> Result<f64> {
        let (v, err) = gk15(f, a, b);
        if err <= tol || (err <= 1e-15 * math::abs(v)) {
            return Ok(v);
        }
        if depth == 0 || !v.is_finite() {
            return Err(Error::QuadratureFailure { lo: a, hi: b });
        }
        let m = 0.5 * (a + b);
        Ok(rec(f, a, m, 0.5 * tol, depth - 1)? + rec(f, m, b, 0.5 * tol, depth - 1)?)
    }
    rec(f, a, b, tol, 40)
}

/// `θ(r) = ∫₀^r θ′` tabulated on `nodes` points and interpolated by a cubic
/// Hermite spline that uses the exact slopes.
pub fn radial_theta_spline(flow: &RotorFlow, h0: f64, nodes: usize, tol: f64) -> Result<RadialSpline> {
    if nodes < 4 {
        return Err(Error::InvalidParameter { reason: "spline needs at least 4 nodes" });
    }
    let step = flow.r0 / (nodes - 1) as f64;
    let f = |r: f64| flow.theta_prime(r, h0);
    let per_interval = tol / (nodes - 1) as f64;
    let mut values = Vec::with_capacity(nodes);
    let mut slopes = Vec::with_capacity(nodes);
    let mut acc = 0.0;
    values.push(0.0);
    slopes.push(f(0.0));
    for k in 1..nodes {
        let (a, b) = ((k - 1) as f64 * step, k as f64 * step);
        acc += adaptive_quadrature(&f, a, b, per_interval)?;
        values.push(acc);
        slopes.push(f(b));
    }
    Ok(RadialSpline { step, values, slopes })
}

/// Heat potential of the rotor: spline value, exact radial slope.
pub struct RotorTheta {
    flow: RotorFlow,
    h0: f64,
    spline: RadialSpline,
}

impl RotorTheta {
    pub fn spline(&self) -> &RadialSpline {
        &self.spline
    }
}

impl ScalarField for RotorTheta {
    fn value(&self, x: &FourVector) -> f64 {
        let s = x.to_contravariant().spatial();
        self.spline.value(math::sqrt(s.0[0] * s.0[0] + s.0[1] * s.0[1]))
    }

    fn gradient(&self, x: &FourVector) -> Option<FourVector> {
        let s = x.to_contravariant().spatial();
        let r = math::sqrt(s.0[0] * s.0[0] + s.0[1] * s.0[1]);
        if r == 0.0 {
            return Some(FourVector::covariant([0.0; 4]));
        }
        let d = self.flow.theta_prime(r, self.h0) / r;
        Some(FourVector::covariant([0.0, d * s.0[0], d * s.0[1], 0.0]))
    }
}

/// Stationary axisymmetric screw rotor with default profile settings.
pub fn make_screw_rotor(omega0: f64, w0: f64, r0: f64, h0: f64) -> Result<Scenario> {
    make_screw_rotor_with(&RotorParams::new(omega0, w0, r0, h0))
}

pub fn make_screw_rotor_with(p: &RotorParams) -> Result<Scenario> {
    if !(p.r0 > 0.0) || !(p.h0 > 0.0) || !(p.period > 0.0) || p.exponent < 2 {
        return Err(Error::InvalidParameter { reason: "rotor needs r0 > 0, h0 > 0, period > 0, exponent ≥ 2" });
    }
    let flow = RotorFlow { omega0: p.omega0, w0: p.w0, r0: p.r0, exponent: p.exponent };
    let mut vmax2 = 0.0f64;
    let samples = 8192;
    for k in 0..=samples {
        vmax2 = vmax2.max(flow.speed_sq(p.r0 * k as f64 / samples as f64));
    }
    if !(vmax2 < 1.0) {
        return Err(Error::SpeedLimit { speed: math::sqrt(vmax2) });
    }
    let theta: Arc<dyn ScalarField> = if p.omega0 == 0.0 && p.w0 == 0.0 {
        Arc::new(ConstantScalar(0.0))
    } else {
        let spline = radial_theta_spline(&flow, p.h0, p.nodes, p.quadrature_tolerance)?;
        Arc::new(RotorTheta { flow, h0: p.h0, spline })
    };
    let meta = ScenarioMeta {
        frame: "rest".into(),
        period: Some(FourVector::contravariant([0.0, 0.0, 0.0, p.period])),
        pattern_velocity: ThreeVector::ZERO,
        anchor: Some(FourVector::contravariant([0.0; 4])),
        support_radius: Some(p.r0),
        max_speed: math::sqrt(vmax2),
        tolerance: 1e-6,
        fd_coefficient: 5.0 * p.h0 / (p.r0 * p.r0),
    };
    Ok(scenario_from_parts(
        format!("screw-rotor(omega0={}, w0={}, r0={}, h0={})", p.omega0, p.w0, p.r0, p.h0),
        Arc::new(flow),
        Arc::new(ConstantScalar(p.h0)),
        theta,
        0.0,
        None,
        meta,
    ))
}

/// Copy of `s` whose heat potential is multiplied by `factor`; used to
/// produce deliberate non-solutions.
pub fn with_scaled_theta(s: &Scenario, factor: f64) -> Scenario {
    struct Scaled(Arc<dyn ScalarField>, f64);
    impl ScalarField for Scaled {
        fn value(&self, x: &FourVector) -> f64 {
            self.1 * self.0.value(x)
        }
        fn gradient(&self, x: &FourVector) -> Option<FourVector> {
            self.0.gradient(x).map(|g| self.1 * g)
        }
        fn in_domain(&self, x: &FourVector) -> bool {
            self.0.in_domain(x)
        }
    }
    let mut out = s.clone();
    out.label = format!("{} with theta x{}", s.label, factor);
    out.theta = s.theta.as_ref().map(|t| Arc::new(Scaled(t.clone(), factor)) as Arc<dyn ScalarField>);
    out
}

struct BoostedScalar {
    inner: Arc<dyn ScalarField>,
    back: Mat4,
}

struct BoostedVector {
    inner: Arc<dyn VectorField>,
    forward: Mat4,
    back: Mat4,
}

struct BoostedCovector {
    inner: Arc<dyn CovectorField>,
    back: Mat4,
}

fn pull(back: &Mat4, x: &FourVector) -> FourVector {
    FourVector::contravariant(mat_vec(back, &x.to_contravariant().components))
}

impl ScalarField for BoostedScalar {
    fn value(&self, x: &FourVector) -> f64 {
        self.inner.value(&pull(&self.back, x))
    }
    fn gradient(&self, x: &FourVector) -> Option<FourVector> {
        let g = self.inner.gradient(&pull(&self.back, x))?.to_covariant();
        Some(FourVector::covariant(mat_vec(&transpose(&self.back), &g.components)))
    }
    fn in_domain(&self, x: &FourVector) -> bool {
        self.inner.in_domain(&pull(&self.back, x))
    }
}

impl VectorField for BoostedVector {
    fn value(&self, x: &FourVector) -> FourVector {
        let v = self.inner.value(&pull(&self.back, x)).to_contravariant();
        FourVector::contravariant(mat_vec(&self.forward, &v.components))
    }
    fn jacobian(&self, x: &FourVector) -> Option<Mat4> {
        let j = self.inner.jacobian(&pull(&self.back, x))?;
        Some(mat_mul(&transpose(&self.back), &mat_mul(&j, &transpose(&self.forward))))
    }
    fn in_domain(&self, x: &FourVector) -> bool {
        self.inner.in_domain(&pull(&self.back, x))
    }
}

impl CovectorField for BoostedCovector {
    fn value(&self, x: &FourVector) -> FourVector {
        let p = self.inner.value(&pull(&self.back, x)).to_covariant();
        FourVector::covariant(mat_vec(&transpose(&self.back), &p.components))
    }
    fn jacobian(&self, x: &FourVector) -> Option<Mat4> {
        let j = self.inner.jacobian(&pull(&self.back, x))?;
        Some(mat_mul(&transpose(&self.back), &mat_mul(&j, &self.back)))
    }
    fn in_domain(&self, x: &FourVector) -> bool {
        self.inner.in_domain(&pull(&self.back, x))
    }
}

/// Map a symmetry translation `p` into the boosted frame and slide it along
/// the boosted pattern worldline direction until its time component vanishes.
fn boosted_spatial(boost: &LorentzBoost, p: &FourVector, along: &FourVector) -> FourVector {
    let bp = boost_four_vector(boost, p).components;
    let bw = boost_four_vector(boost, along).components;
    let tau = -bp[0] / bw[0];
    FourVector::contravariant([0.0, bp[1] + tau * bw[1], bp[2] + tau * bw[2], bp[3] + tau * bw[3]])
}

/// Express `s` in the frame moving with velocity `beta`: scalars are
/// composed with the inverse boost, vectors and covectors transformed.
pub fn boost_scenario(s: &Scenario, beta: ThreeVector) -> Result<Scenario> {
    let boost = LorentzBoost::new(beta)?;
    if beta.norm_sq() == 0.0 {
        return Ok(s.clone());
    }
    let forward = boost.matrix();
    let back = boost.inverse().matrix();
    let scalar =
        |f: &Arc<dyn ScalarField>| -> Arc<dyn ScalarField> { Arc::new(BoostedScalar { inner: f.clone(), back }) };
    let covector =
        |f: &Arc<dyn CovectorField>| -> Arc<dyn CovectorField> { Arc::new(BoostedCovector { inner: f.clone(), back }) };

    let pv = s.meta.pattern_velocity;
    let along = FourVector::contravariant([1.0, pv.0[0], pv.0[1], pv.0[2]]);
    let bw = boost_four_vector(&boost, &along).components;
    let pattern_velocity = ThreeVector::new(bw[1] / bw[0], bw[2] / bw[0], bw[3] / bw[0]);
    let (b, v) = (beta.norm(), s.meta.max_speed);
    let meta = ScenarioMeta {
        frame: format!("{} boosted by {:?}", s.meta.frame, beta.0),
        period: s.meta.period.map(|p| boosted_spatial(&boost, &p, &along)),
        pattern_velocity,
        anchor: s.meta.anchor.map(|a| {
            let shifted = boosted_spatial(&boost, &a, &along);
            // boosted_spatial drops the time offset; anchors start at t = 0.
            FourVector::contravariant([0.0, shifted.components[1], shifted.components[2], shifted.components[3]])
        }),
        support_radius: s.meta.support_radius,
        max_speed: ((v + b) / (1.0 + v * b)).min(1.0),
        ..s.meta.clone()
    };
    Ok(Scenario {
        label: format!("{} boosted by {:?}", s.label, beta.0),
        velocity: Arc::new(BoostedVector { inner: s.velocity.clone(), forward, back }),
        enthalpy: s.enthalpy.as_ref().map(scalar),
        theta: s.theta.as_ref().map(scalar),
        charge: s.charge,
        potential: s.potential.as_ref().map(covector),
        momentum: s.momentum.as_ref().map(covector),
        meta,
    })
}

/// Prescribed 3-velocity fields for transport and linking tests.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum KinematicSpec {
    Static,
    Uniform(ThreeVector),
    /// `v = Ω ẑ × x`, valid where `|Ω| r < 1`.
    RigidRotation {
        omega: f64,
    },
    /// `v = Ω(t) e^{−r²}(−y, x, 0) + κ(t) e^{−r²}(0, 0, x)` with
    /// `Ω(t) = Ω₀ + Ω₁ sin(νt)` and `κ(t) = κ₀ + κ₁ cos(νt)`.
    Swirl {
        omega0: f64,
        omega1: f64,
        kappa0: f64,
        kappa1: f64,
        frequency: f64,
    },
}

impl KinematicSpec {
    pub fn velocity3(&self, x: &FourVector) -> ThreeVector {
        let [t, x1, x2, _] = x.to_contravariant().components;
        match *self {
            KinematicSpec::Static => ThreeVector::ZERO,
            KinematicSpec::Uniform(v) => v,
            KinematicSpec::RigidRotation { omega } => ThreeVector::new(-omega * x2, omega * x1, 0.0),
            KinematicSpec::Swirl { omega0, omega1, kappa0, kappa1, frequency } => {
                let om = omega0 + omega1 * math::sin(frequency * t);
                let ka = kappa0 + kappa1 * math::cos(frequency * t);
                let g = math::exp(-(x1 * x1 + x2 * x2));
                ThreeVector::new(-om * g * x2, om * g * x1, ka * g * x1)
            }
        }
    }

    /// Supremum of `|v|` over all of space, or `None` when unbounded.
    fn speed_bound(&self) -> Option<f64> {
        match *self {
            KinematicSpec::Static => Some(0.0),
            KinematicSpec::Uniform(v) => Some(v.norm()),
            KinematicSpec::RigidRotation { .. } => None,
            KinematicSpec::Swirl { omega0, omega1, kappa0, kappa1, .. } => {
                // sup r e^{−r²} = (2e)^{−1/2}.
                let c = 1.0 / math::sqrt(2.0 * core::f64::consts::E);
                let om = math::abs(omega0) + math::abs(omega1);
                let ka = math::abs(kappa0) + math::abs(kappa1);
                Some(c * math::sqrt(om * om + ka * ka))
            }
        }
    }
}

/// 4-velocity of a kinematic flow.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KinematicFlow {
    pub spec: KinematicSpec,
}

impl VectorField for KinematicFlow {
    fn value(&self, x: &FourVector) -> FourVector {
        let v = self.spec.velocity3(x);
        let g = 1.0 / math::sqrt(1.0 - v.norm_sq());
        FourVector::contravariant([g, g * v.0[0], g * v.0[1], g * v.0[2]])
    }

    fn jacobian(&self, x: &FourVector) -> Option<Mat4> {
        match self.spec {
            KinematicSpec::Static | KinematicSpec::Uniform(_) => Some([[0.0; 4]; 4]),
            KinematicSpec::RigidRotation { omega } => {
                let [_, x1, x2, _] = x.to_contravariant().components;
                let v = [-omega * x2, omega * x1, 0.0];
                let g = 1.0 / math::sqrt(1.0 - omega * omega * (x1 * x1 + x2 * x2));
                let mut j = [[0.0; 4]; 4];
                for (k, xk) in [x1, x2].into_iter().enumerate() {
                    let dg = g * g * g * omega * omega * xk;
                    let dv = [if k == 1 { -omega } else { 0.0 }, if k == 0 { omega } else { 0.0 }, 0.0];
                    j[k + 1][0] = dg;
                    for i in 0..3 {
                        j[k + 1][i + 1] = dg * v[i] + g * dv[i];
                    }
                }
                Some(j)
            }
            KinematicSpec::Swirl { .. } => None,
        }
    }

    fn in_domain(&self, x: &FourVector) -> bool {
        self.spec.velocity3(x).norm_sq() < 1.0
    }
}

/// Scenario carrying only a velocity field.
pub fn make_kinematic_flow(spec: KinematicSpec) -> Result<Scenario> {
    if let Some(b) = spec.speed_bound() {
        if !(b < 1.0) {
            return Err(Error::SpeedLimit { speed: b });
        }
    }
    if let KinematicSpec::RigidRotation { omega } = spec {
        if !omega.is_finite() {
            return Err(Error::InvalidParameter { reason: "rotation rate must be finite" });
        }
    }
    let max_speed = spec.speed_bound().unwrap_or(1.0);
    let anchor = match spec {
        KinematicSpec::RigidRotation { .. } | KinematicSpec::Swirl { .. } => Some(FourVector::contravariant([0.0; 4])),
        _ => None,
    };
    Ok(Scenario {
        label: format!("kinematic {spec:?}"),
        velocity: Arc::new(KinematicFlow { spec }),
        enthalpy: None,
        theta: None,
        charge: 0.0,
        potential: None,
        momentum: None,
        meta: ScenarioMeta { anchor, ..ScenarioMeta::stationary("rest", max_speed) },
    })
}

/// Identity sweeps and invariant checks for one scenario.
#[derive(Debug, Clone, PartialEq)]
pub struct ValidationReport {
    pub label: String,
    pub reports: Vec<(IdentityReport, f64)>,
    /// `max |⟨U,U⟩ − 1|` over the grid.
    pub normalization_error: f64,
    /// `max |U·P − (h + qϱ)|` over the grid (zero for kinematic flows).
    pub momentum_error: f64,
    pub passed: bool,
}

impl ValidationReport {
    pub fn report(&self, kind: IdentityKind) -> Option<&IdentityReport> {
        self.reports.iter().find(|(r, _)| r.kind == kind).map(|(r, _)| r)
    }
}

/// Tolerance `kind` is held to on `s` at difference step `h`.
pub fn identity_tolerance(s: &Scenario, kind: IdentityKind, h: f64) -> f64 {
    if kind.is_difference_based() {
        s.meta.tolerance.max(s.meta.fd_coefficient * h * h)
    } else {
        s.meta.tolerance
    }
}

/// Run the applicable identities and the scenario invariants on `grid`.
pub fn validate_scenario(s: &Scenario, grid: &GridBox) -> Result<ValidationReport> {
    let kinds: &[IdentityKind] = if s.is_kinematic() {
        &[]
    } else {
        &[
            IdentityKind::ThetaTransport,
            IdentityKind::EomTime,
            IdentityKind::EomSpace,
            IdentityKind::EomLie,
            IdentityKind::VorticityTransport,
        ]
    };
    let fields = s.fields();
    let mut reports = Vec::new();
    let mut passed = true;
    for &kind in kinds {
        let r = verify_identity(kind, &fields, grid)?;
        let tol = identity_tolerance(s, kind, grid.h);
        passed &= r.passes(tol);
        reports.push((r, tol));
    }
    let n = grid.interior_len();
    let errs = crate::sum::map_chunks(n, |range| {
        let mut a = (0.0f64, 0.0f64);
        for k in range {
            let x = grid.interior_point(k);
            let u = s.velocity.value(&x);
            a.0 = a.0.max(math::abs(minkowski_dot(&u, &u) - 1.0));
            if let (Some(p), Some(hq)) = (&s.momentum, s.enthalpy_plus_potential(&x)) {
                a.1 = a.1.max(math::abs(minkowski_dot(&u, &p.value(&x)) - hq));
            }
        }
        a
    });
    let (norm, mom) = errs.iter().fold((0.0f64, 0.0f64), |m, e| (m.0.max(e.0), m.1.max(e.1)));
    passed &= norm <= 1e-10 && mom <= 1e-10;
    Ok(ValidationReport { label: s.label.clone(), reports, normalization_error: norm, momentum_error: mom, passed })
}

/// Default validation slab for a scenario with an axis: `n³` points covering
/// `1.5·r₀` around the axis and one period, at `t = 0`.
pub fn default_slab(s: &Scenario, n: usize) -> Result<GridBox> {
    let r0 = s.meta.support_radius.unwrap_or(1.0);
    let c = s.meta.axis_at(0.0).unwrap_or(ThreeVector::ZERO);
    let half = 1.5 * r0;
    let lz = s.meta.period.map_or(2.0 * half, |p| p.spatial().norm());
    let spacing = 2.0 * half / (n - 1) as f64;
    GridBox::new(
        FourVector::contravariant([0.0, c.0[0] - half, c.0[1] - half, c.0[2]]),
        [0.0, 2.0 * half, 2.0 * half, lz],
        [1, n, n, n],
        spacing,
        [false, false, s.meta.period.is_some()],
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::calculus::{exterior_derivative_oneform, helicity_current};
    use approx::assert_abs_diff_eq;

    fn pt(c: [f64; 4]) -> FourVector {
        FourVector::contravariant(c)
    }

    #[test]
    fn uniform_momentum_examples() {
        let s = make_uniform(ThreeVector::ZERO, 1.0).unwrap();
        assert_eq!(s.momentum().unwrap().value(&pt([0.3, 1.0, 2.0, 3.0])).components, [1.0, 0.0, 0.0, 0.0]);
        let s = make_uniform(ThreeVector::new(0.6, 0.0, 0.0), 2.0).unwrap();
        let p = s.momentum().unwrap().value(&pt([0.0; 4])).components;
        assert_abs_diff_eq!(p[0], 2.5, epsilon = 1e-14);
        assert_abs_diff_eq!(p[1], -1.5, epsilon = 1e-14);
        let m = exterior_derivative_oneform(s.momentum().unwrap(), &pt([0.1, 0.2, 0.3, 0.4]), 0.1).unwrap();
        assert_eq!(m.max_abs(), 0.0);
        assert!(matches!(make_uniform(ThreeVector::new(1.0, 0.0, 0.0), 1.0), Err(Error::SpeedLimit { .. })));
    }

    #[test]
    fn charged_rest_balances_the_electric_force() {
        let s = make_charged_rest(0.8, 0.6, 0.7, 1.2).unwrap();
        let grid = GridBox::uniform(pt([0.0, -1.0, -1.0, -1.0]), [0.2, 2.0, 2.0, 2.0], 0.1, [false; 3]).unwrap();
        let v = validate_scenario(&s, &grid).unwrap();
        assert!(v.passed, "{v:?}");
        let x = pt([0.0, 0.3, -0.2, 0.7]);
        let m = exterior_derivative_oneform(s.momentum().unwrap(), &x, 1e-4).unwrap();
        assert!(m.e.dot(&m.b).abs() > 1e-2);
        let b = boost_scenario(&s, ThreeVector::new(0.45, 0.0, 0.0)).unwrap();
        let grid = GridBox::uniform(pt([0.0, -0.5, -0.5, -0.5]), [0.2, 1.0, 1.0, 1.0], 0.05, [false; 3]).unwrap();
        let vb = validate_scenario(&b, &grid).unwrap();
        assert!(vb.passed, "{vb:?}");
    }

    #[test]
    fn uniform_validates_with_zero_residuals() {
        let s = make_uniform(ThreeVector::new(0.3, -0.2, 0.1), 1.5).unwrap();
        let grid = GridBox::uniform(pt([0.0, -0.5, -0.5, -0.5]), [0.2, 1.0, 1.0, 1.0], 0.1, [false; 3]).unwrap();
        let v = validate_scenario(&s, &grid).unwrap();
        assert!(v.passed);
        for (r, _) in &v.reports {
            assert!(r.max_residual < 1e-14, "{}: {}", r.kind, r.max_residual);
        }
    }

    #[test]
    fn rotor_without_swirl_is_uniform_rest() {
        let s = make_screw_rotor(0.0, 0.0, 1.0, 1.3).unwrap();
        let x = pt([0.0, 0.2, 0.1, 0.0]);
        assert_eq!(s.velocity.value(&x).components, [1.0, 0.0, 0.0, 0.0]);
        assert_eq!(s.theta().unwrap().value(&x), 0.0);
        assert_eq!(s.momentum().unwrap().value(&x).components, [1.3, 0.0, 0.0, 0.0]);
    }

    #[test]
    fn rotor_speed_limit_is_enforced() {
        assert!(matches!(make_screw_rotor(0.0, 1.2, 1.0, 1.0), Err(Error::SpeedLimit { .. })));
        assert!(make_screw_rotor(0.5, 0.3, 1.0, 1.0).is_ok());
    }

    #[test]
    fn rotor_jacobian_matches_differences() {
        let flow = RotorFlow { omega0: 0.5, w0: 0.3, r0: 1.0, exponent: 4 };
        for x in [[0.0, 0.3, -0.2, 0.1], [0.0, 0.0, 0.0, 0.0], [0.0, -0.6, 0.5, 0.0], [0.0, 1.2, 0.1, 0.0]] {
            let x = pt(x);
            let a = flow.jacobian(&x).unwrap();
            let n =
                crate::calculus::vector_jacobian(&flow, &x, 1e-5, crate::calculus::DerivativeMode::FiniteDifference)
                    .unwrap();
            for mu in 0..4 {
                for nu in 0..4 {
                    assert_abs_diff_eq!(a[mu][nu], n[mu][nu], epsilon = 1e-8);
                }
            }
        }
    }

    #[test]
    fn rotor_theta_quadrature_matches_simpson_oracle() {
        let flow = RotorFlow { omega0: 0.5, w0: 0.3, r0: 1.0, exponent: 4 };
        let spline = radial_theta_spline(&flow, 1.0, 512, 1e-10).unwrap();
        // Composite Simpson with 20 000 panels as an independent oracle.
        let n = 20_000;
        for r in [0.1, 0.37, 0.5, 0.81, 1.0] {
            let hstep = r / n as f64;
            let mut s = flow.theta_prime(0.0, 1.0) + flow.theta_prime(r, 1.0);
            for k in 1..n {
                let w = if k % 2 == 1 { 4.0 } else { 2.0 };
                s += w * flow.theta_prime(k as f64 * hstep, 1.0);
            }
            let oracle = s * hstep / 3.0;
            assert_abs_diff_eq!(spline.value(r), oracle, epsilon = 1e-11);
        }
        assert_eq!(spline.value(1.5), spline.value(1.0));
    }

    #[test]
    fn rotor_satisfies_radial_force_balance_pointwise() {
        let s = make_screw_rotor(0.5, 0.3, 1.0, 1.0).unwrap();
        for x in [[0.0, 0.3, 0.2, 0.0], [0.7, -0.5, 0.1, 0.4], [0.0, 0.05, 0.0, 0.0]] {
            let x = pt(x);
            let m = exterior_derivative_oneform(s.momentum().unwrap(), &x, 0.01).unwrap();
            let u = s.velocity.value(&x);
            let v = (1.0 / u.time()) * u.spatial();
            let g = s.theta().unwrap().gradient(&x).unwrap().components;
            let lhs = m.e + v.cross(&m.b);
            let rhs = (-1.0 / u.time()) * ThreeVector::new(g[1], g[2], g[3]);
            assert!((lhs - rhs).max_abs() < 1e-12);
        }
    }

    #[test]
    fn rotor_helicity_density_needs_both_swirl_and_jet() {
        let x = pt([0.0, 0.5, 0.0, 0.0]);
        let k0 = |om, w| {
            let s = make_screw_rotor(om, w, 1.0, 1.0).unwrap();
            let p = s.momentum().unwrap();
            let m = exterior_derivative_oneform(p, &x, 0.01).unwrap();
            helicity_current(&p.value(&x), &m).components[0]
        };
        assert!(k0(0.5, 0.3).abs() > 1e-3);
        assert!(k0(0.5, 0.0).abs() < 1e-14);
    }

    #[test]
    fn corrupted_theta_breaks_force_balance() {
        let s = make_screw_rotor(0.5, 0.3, 1.0, 1.0).unwrap();
        let bad = with_scaled_theta(&s, 1.1);
        let grid = default_slab(&s, 12).unwrap();
        let r = verify_identity(IdentityKind::EomSpace, &bad.fields(), &grid).unwrap();
        assert!(r.max_residual > 1e-3);
        assert!(!validate_scenario(&bad, &grid).unwrap().passed);
    }

    #[test]
    fn boost_by_zero_is_identity() {
        let s = make_screw_rotor(0.5, 0.3, 1.0, 1.0).unwrap();
        let b = boost_scenario(&s, ThreeVector::ZERO).unwrap();
        let x = pt([0.1, 0.2, -0.3, 0.4]);
        assert_eq!(s.momentum().unwrap().value(&x), b.momentum().unwrap().value(&x));
        assert_eq!(b.label, s.label);
    }

    #[test]
    fn boosted_rest_fluid_moves_against_the_boost() {
        let s = make_uniform(ThreeVector::ZERO, 1.0).unwrap();
        let beta = ThreeVector::new(0.2, -0.4, 0.1);
        let b = boost_scenario(&s, beta).unwrap();
        let want = make_uniform(-beta, 1.0).unwrap();
        let x = pt([0.5, 0.1, 0.2, 0.3]);
        for i in 0..4 {
            assert_abs_diff_eq!(
                b.momentum().unwrap().value(&x).components[i],
                want.momentum().unwrap().value(&x).components[i],
                epsilon = 1e-12
            );
            assert_abs_diff_eq!(
                b.velocity.value(&x).components[i],
                want.velocity.value(&x).components[i],
                epsilon = 1e-12
            );
        }
    }

    #[test]
    fn boosted_rotor_period_and_pattern() {
        let s = make_screw_rotor(0.5, 0.3, 1.0, 1.0).unwrap();
        let b = boost_scenario(&s, ThreeVector::new(0.0, 0.0, 0.6)).unwrap();
        assert_abs_diff_eq!(b.meta.period.unwrap().components[3], 2.0 / 1.25, epsilon = 1e-12);
        assert_abs_diff_eq!(b.meta.pattern_velocity.0[2], -0.6, epsilon = 1e-12);
        let bx = boost_scenario(&s, ThreeVector::new(0.5, 0.0, 0.0)).unwrap();
        let p = bx.meta.period.unwrap();
        assert_abs_diff_eq!(p.components[3], 2.0, epsilon = 1e-12);
        assert_abs_diff_eq!(p.components[1], 0.0, epsilon = 1e-12);
        // The field is invariant under the period and under pattern translation.
        let x = pt([0.3, 0.1, 0.2, 0.0]);
        let shifted = pt([0.3, 0.1, 0.2, p.components[3]]);
        assert_eq!(bx.theta().unwrap().value(&x), bx.theta().unwrap().value(&shifted));
        let later = pt([0.3 + 0.2, 0.1 - 0.5 * 0.2, 0.2, 0.0]);
        assert_abs_diff_eq!(bx.theta().unwrap().value(&x), bx.theta().unwrap().value(&later), epsilon = 1e-14);
    }

    #[test]
    fn boosted_jacobians_match_differences() {
        let s = make_screw_rotor(0.5, 0.3, 1.0, 1.0).unwrap();
        let b = boost_scenario(&s, ThreeVector::new(0.3, 0.2, -0.4)).unwrap();
        let fields = b.fields();
        let grid =
            GridBox::uniform(pt([0.0, -0.6, -0.6, 0.0]), [0.0, 1.2, 1.2, 0.6], 0.2, [false, false, false]).unwrap();
        let [c, f] =
            crate::calculus::verify_identity_refined(IdentityKind::FdCrosscheck, &fields, &grid.refined()).unwrap();
        let order = f.convergence_order.unwrap();
        assert!(f.max_residual < 1e-2 * c.scale, "{}", f.max_residual);
        assert!(order > 1.8, "order {order}");
    }

    #[test]
    fn kinematic_flows_reject_eom_kinds() {
        let s = make_kinematic_flow(KinematicSpec::RigidRotation { omega: 0.5 }).unwrap();
        let grid = GridBox::uniform(pt([0.0, -0.5, -0.5, -0.5]), [0.0, 1.0, 1.0, 1.0], 0.25, [false; 3]).unwrap();
        assert!(matches!(
            verify_identity(IdentityKind::EomSpace, &s.fields(), &grid),
            Err(Error::UnsupportedKind { .. })
        ));
        assert!(make_kinematic_flow(KinematicSpec::Uniform(ThreeVector::new(0.0, 1.0, 0.0))).is_err());
        let fl = KinematicFlow { spec: KinematicSpec::RigidRotation { omega: 0.5 } };
        assert!(fl.in_domain(&pt([0.0, 1.9, 0.0, 0.0])));
        assert!(!fl.in_domain(&pt([0.0, 2.1, 0.0, 0.0])));
    }

    #[test]
    fn swirl_speed_bound_holds() {
        let spec = KinematicSpec::Swirl { omega0: 0.8, omega1: 0.4, kappa0: 0.5, kappa1: 0.3, frequency: 2.0 };
        let bound = spec.speed_bound().unwrap();
        assert!(bound < 1.0);
        for k in 0..200 {
            let r = 0.02 * k as f64;
            for t in [0.0, 0.3, 1.1] {
                assert!(spec.velocity3(&pt([t, r, 0.0, 0.0])).norm() <= bound + 1e-12);
            }
        }
    }
}
