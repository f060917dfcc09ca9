//! Parametric test loops.

use alloc::vec::Vec;
use core::f64::consts::PI;

use super::LoopPolyline;
use crate::core4::ThreeVector;
use crate::math::{cos, sin};
use crate::Result;

/// `n` points on the circle `c + r(cos u e₁ + sin u e₂)`.
pub fn circle_points(center: ThreeVector, radius: f64, e1: ThreeVector, e2: ThreeVector, n: usize) -> Vec<ThreeVector> {
    (0..n)
        .map(|k| {
            let u = 2.0 * PI * k as f64 / n as f64;
            center + radius * (cos(u) * e1 + sin(u) * e2)
        })
        .collect()
}

pub fn circle(
    center: ThreeVector,
    radius: f64,
    e1: ThreeVector,
    e2: ThreeVector,
    n: usize,
    t: f64,
) -> Result<LoopPolyline> {
    LoopPolyline::from_spatial(&circle_points(center, radius, e1.normalized(), e2.normalized(), n), t)
}

/// Sample a closed curve `f(u)`, `u ∈ [0, 2π)`.
pub fn parametric(n: usize, t: f64, f: impl Fn(f64) -> ThreeVector) -> Result<LoopPolyline> {
    let pts: Vec<ThreeVector> = (0..n).map(|k| f(2.0 * PI * k as f64 / n as f64)).collect();
    LoopPolyline::from_spatial(&pts, t)
}

const EX: ThreeVector = ThreeVector::new(1.0, 0.0, 0.0);
const EY: ThreeVector = ThreeVector::new(0.0, 1.0, 0.0);
const EZ: ThreeVector = ThreeVector::new(0.0, 0.0, 1.0);

/// Unit circle in the x-y plane at the origin and unit circle in the x-z
/// plane centred at `(1, 0, 0)`.
pub fn hopf_pair(n: usize) -> Result<(LoopPolyline, LoopPolyline)> {
    Ok((circle(ThreeVector::ZERO, 1.0, EX, EY, n, 0.0)?, circle(EX, 1.0, EX, EZ, n, 0.0)?))
}

/// Unit circles in parallel planes with centres `distance` apart.
pub fn separated_pair(n: usize, distance: f64) -> Result<(LoopPolyline, LoopPolyline)> {
    Ok((circle(ThreeVector::ZERO, 1.0, EX, EY, n, 0.0)?, circle(distance * EZ, 1.0, EX, EY, n, 0.0)?))
}

/// The two components of the `(2, 2q)` torus link on the torus with radii
/// `(2, 1)`: component `k` follows `(u, v) = (τ, qτ + kπ)`.
pub fn torus_link_pair(n: usize, q: u32) -> Result<(LoopPolyline, LoopPolyline)> {
    let comp = |k: f64| {
        parametric(n, 0.0, move |tau| {
            let v = q as f64 * tau + k * PI;
            let rr = 2.0 + cos(v);
            ThreeVector::new(rr * cos(tau), rr * sin(tau), sin(v))
        })
    };
    Ok((comp(0.0)?, comp(1.0)?))
}

/// Whitehead link: a twisted figure-eight `B` (lobes along the diagonal
/// `x = y`, strands separated in `z` at the self-crossing) and a saddle loop
/// `A` that passes downward through both lobes and returns upward outside
/// them. The lobes carry opposite orientation, so the linking number is zero.
pub fn whitehead_pair(n: usize) -> Result<(LoopPolyline, LoopPolyline)> {
    let a = parametric(n, 0.0, |u| ThreeVector::new(1.2 * cos(u), 1.2 * sin(u), 0.6 * cos(2.0 * u)))?;
    let r = core::f64::consts::FRAC_1_SQRT_2;
    let b = parametric(n, 0.0, |t| {
        let (p, q) = (2.0 * cos(t), 0.8 * sin(2.0 * t));
        ThreeVector::new(r * (p - q), r * (p + q), 0.3 * sin(t))
    })?;
    Ok((a, b))
}
