//! Linking numbers, Biot–Savart potentials and circulations.

use alloc::vec::Vec;
use core::f64::consts::PI;

use super::{min_node_distance, LoopPolyline};
use crate::calculus::CovectorField;
use crate::core4::{FourVector, ThreeVector};
use crate::math;
use crate::sum::{sum_indexed, try_sum_indexed, NeumaierSum};
use crate::{Error, Result};

/// Largest distance from the nearest integer for a trustworthy link value.
pub const INTEGER_THRESHOLD: f64 = 0.05;

/// Real-valued link with its nearest integer.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinkingResult {
    pub value: f64,
    pub rounded: i64,
    /// `|value − rounded| ≤ 0.05`.
    pub trustworthy: bool,
}

impl LinkingResult {
    pub fn from_value(value: f64) -> Self {
        let r = math::round(value);
        Self { value, rounded: r as i64, trustworthy: math::abs(value - r) <= INTEGER_THRESHOLD }
    }
}

fn check_separation(a: &LoopPolyline, b: &LoopPolyline) -> Result<()> {
    let segment = a.max_segment_length().max(b.max_segment_length());
    let distance = min_node_distance(a, b);
    if distance < 2.0 * segment {
        return Err(Error::LoopsTooClose { distance, segment });
    }
    Ok(())
}

/// Midpoint-rule Gauss double integral
/// `(1/4π) ∮∮ (x₁ − x₂)·(dx₁ × dx₂) / |x₁ − x₂|³` over the spatial projections.
pub fn gauss_linking_number(a: &LoopPolyline, b: &LoopPolyline) -> Result<LinkingResult> {
    check_separation(a, b)?;
    let (ma, da) = (a.midpoints(), a.segments());
    let (mb, db) = (b.midpoints(), b.segments());
    let total = sum_indexed(ma.len(), |i| {
        let mut s = NeumaierSum::new();
        for j in 0..mb.len() {
            let r = ma[i] - mb[j];
            let d = r.norm();
            s.add(r.dot(&da[i].cross(&db[j])) / (d * d * d));
        }
        s.value()
    });
    Ok(LinkingResult::from_value(total / (4.0 * PI)))
}

const ORACLE_RETRIES: usize = 8;
const DEGENERACY: f64 = 1e-9;

fn view_direction(attempt: usize) -> ThreeVector {
    let k = attempt as f64;
    ThreeVector::new(0.211_324_865 + 0.137 * k, 0.351_700_000 - 0.071 * k * k, 0.911_920_000 + 0.053 * k).normalized()
}

fn orthonormal_pair(n: &ThreeVector) -> (ThreeVector, ThreeVector) {
    let seed = if math::abs(n.0[0]) < 0.9 { ThreeVector::new(1.0, 0.0, 0.0) } else { ThreeVector::new(0.0, 1.0, 0.0) };
    let p = (seed - n.dot(&seed) * *n).normalized();
    (p, n.cross(&p))
}

/// Signed crossings of one projection, or `None` when the projection is not generic.
fn signed_crossings(a: &[ThreeVector], b: &[ThreeVector], n: &ThreeVector) -> Option<i64> {
    let (p, q) = orthonormal_pair(n);
    let flat = |x: &ThreeVector| [x.dot(&p), x.dot(&q)];
    let (fa, fb): (Vec<_>, Vec<_>) = (a.iter().map(flat).collect(), b.iter().map(flat).collect());
    let cross2 = |u: [f64; 2], v: [f64; 2]| u[0] * v[1] - u[1] * v[0];
    let mut total = 0i64;
    for i in 0..a.len() {
        let (a0, a1) = (fa[i], fa[(i + 1) % a.len()]);
        let ta = [a1[0] - a0[0], a1[1] - a0[1]];
        let la = math::hypot3(ta[0], ta[1], 0.0);
        for j in 0..b.len() {
            let (b0, b1) = (fb[j], fb[(j + 1) % b.len()]);
            let tb = [b1[0] - b0[0], b1[1] - b0[1]];
            let lb = math::hypot3(tb[0], tb[1], 0.0);
            let den = cross2(ta, tb);
            let w = [b0[0] - a0[0], b0[1] - a0[1]];
            if math::abs(den) <= DEGENERACY * la * lb {
                if math::abs(cross2(w, ta)) <= DEGENERACY * la.max(lb) * la.max(lb) {
                    return None;
                }
                continue;
            }
            let s = cross2(w, tb) / den;
            let t = cross2(w, ta) / den;
            let near = |x: f64| math::abs(x) < DEGENERACY || math::abs(x - 1.0) < DEGENERACY;
            if near(s) || near(t) {
                return None;
            }
            if !(0.0..1.0).contains(&s) || !(0.0..1.0).contains(&t) {
                continue;
            }
            let (ea, eb) = (a[(i + 1) % a.len()] - a[i], b[(j + 1) % b.len()] - b[j]);
            let ha = n.dot(&(a[i] + s * ea));
            let hb = n.dot(&(b[j] + t * eb));
            if math::abs(ha - hb) < DEGENERACY {
                return None;
            }
            let over = if ha > hb { 1 } else { -1 };
            let turn = if n.dot(&ea.cross(&eb)) > 0.0 { 1 } else { -1 };
            total += over * turn;
        }
    }
    Some(total)
}

/// Half the signed crossing count of a generic planar projection.
pub fn crossing_link_oracle(a: &LoopPolyline, b: &LoopPolyline) -> Result<i64> {
    let (pa, pb) = (a.spatial_points(), b.spatial_points());
    for attempt in 0..ORACLE_RETRIES {
        if let Some(c) = signed_crossings(&pa, &pb, &view_direction(attempt)) {
            if c % 2 == 0 {
                return Ok(c / 2);
            }
        }
    }
    Err(Error::DegenerateProjection { retries: ORACLE_RETRIES })
}

/// Biot–Savart field of a unit-strength polygonal filament,
/// `(1/4π) ∮ dl × (x − x′) / |x − x′|³`, summed segment by segment with the
/// closed-form straight-segment integral (exact for the polygon).
pub fn biot_savart_potential(lp: &LoopPolyline, x: &ThreeVector) -> Result<ThreeVector> {
    let pts = lp.spatial_points();
    let reach = lp.max_segment_length();
    let distance = pts.iter().map(|p| (*x - *p).norm()).fold(f64::INFINITY, f64::min);
    if distance < reach {
        return Err(Error::TooCloseToFilament { distance });
    }
    let n = pts.len();
    let mut acc = [NeumaierSum::new(), NeumaierSum::new(), NeumaierSum::new()];
    for i in 0..n {
        let (r1, r2) = (*x - pts[i], *x - pts[(i + 1) % n]);
        let k = r1.cross(&r2);
        let kk = k.norm_sq();
        if kk == 0.0 {
            continue;
        }
        let along = (pts[(i + 1) % n] - pts[i]).dot(&((1.0 / r1.norm()) * r1 - (1.0 / r2.norm()) * r2));
        for c in 0..3 {
            acc[c].add(k.0[c] * along / kk);
        }
    }
    let s = 1.0 / (4.0 * PI);
    Ok(ThreeVector::new(s * acc[0].value(), s * acc[1].value(), s * acc[2].value()))
}

/// Midpoint-rule `∮ P_μ dx^μ` around a loop of events.
pub fn circulation(lp: &LoopPolyline, p: &dyn CovectorField) -> f64 {
    let n = lp.len();
    sum_indexed(n, |i| {
        let (a, b) = (lp.node(i).components, lp.node(i + 1).components);
        let mid = FourVector::contravariant([0, 1, 2, 3].map(|k| 0.5 * (a[k] + b[k])));
        let pm = p.value(&mid).to_covariant().components;
        (0..4).map(|k| pm[k] * (b[k] - a[k])).sum::<f64>()
    })
}

const D8: [f64; 4] = [4.0 / 5.0, -1.0 / 5.0, 4.0 / 105.0, -1.0 / 280.0];

/// `∮ P_μ dx^μ` by the periodic trapezoid rule in the node index, with
/// eighth-order central differences for `dx/dj`. Spectrally accurate in the
/// sum and eighth order in the derivative for smoothly parametrised loops.
pub fn circulation_periodic(lp: &LoopPolyline, p: &dyn CovectorField) -> f64 {
    let n = lp.len();
    sum_indexed(n, |i| {
        let mut dx = [0.0; 4];
        for (k, c) in D8.iter().enumerate() {
            let (f, b) = (lp.node(i + k + 1).components, lp.node(i + n - k - 1).components);
            for m in 0..4 {
                dx[m] += c * (f[m] - b[m]);
            }
        }
        let pm = p.value(&lp.node(i)).to_covariant().components;
        (0..4).map(|m| pm[m] * dx[m]).sum::<f64>()
    })
}

/// Midpoint-rule `∮ f · dx` of a spatial vector field.
pub fn circulation_spatial<F>(lp: &LoopPolyline, f: F) -> Result<f64>
where
    F: Fn(&ThreeVector) -> Result<ThreeVector> + Sync + Send,
{
    let (mids, segs) = (lp.midpoints(), lp.segments());
    try_sum_indexed(mids.len(), |i| Ok(f(&mids[i])?.dot(&segs[i])))
}

/// Cross circulation `∮_{Γ₁} a₂·dx` with `a₂` the Biot–Savart field of `Γ₂`.
pub fn stokes_link(a: &LoopPolyline, b: &LoopPolyline) -> Result<f64> {
    check_separation(a, b)?;
    circulation_spatial(a, |x| biot_savart_potential(b, x))
}
