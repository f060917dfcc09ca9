//! Closed vortex filaments in space-time.
//!
//! A [`LoopPolyline`] is an ordered, closed list of events (the last node
//! connects back to the first). Loops are moved with the flow map generated
//! by `U` ([`transport_loop`]); the rows of successive loops form the orbit
//! [`RibbonSurface`] on which the filament frames of [`frames`] live.

mod frames;
mod linking;
pub mod shapes;

pub use frames::{
    orbit_condition_residual, project_filament, ribbon_frames, FilamentFrame, FilamentPart, FrameNormalization,
    ProjectedFilament, RibbonFrames,
};
pub use linking::{
    biot_savart_potential, circulation, circulation_periodic, circulation_spatial, crossing_link_oracle,
    gauss_linking_number, stokes_link, LinkingResult, INTEGER_THRESHOLD,
};

use alloc::vec::Vec;

use crate::calculus::VectorField;
use crate::core4::{FourVector, ThreeVector};
use crate::sum::try_map_indexed;
use crate::{math, Error, Result};

/// Fewest nodes a loop may have.
pub const MIN_NODES: usize = 8;

/// Closed polygonal loop of space-time events.
#[derive(Debug, Clone, PartialEq)]
pub struct LoopPolyline {
    nodes: Vec<FourVector>,
    /// Flow parameter (proper time `s`, or reference time for synchronic loops).
    pub stamp: f64,
}

impl LoopPolyline {
    pub fn new(nodes: Vec<FourVector>, stamp: f64) -> Result<Self> {
        if nodes.len() < MIN_NODES {
            return Err(Error::InvalidLoop { reason: "a loop needs at least 8 nodes" });
        }
        let nodes: Vec<FourVector> = nodes.into_iter().map(|n| n.to_contravariant()).collect();
        if nodes.iter().any(|n| !n.is_finite()) {
            return Err(Error::InvalidLoop { reason: "non-finite node" });
        }
        for i in 0..nodes.len() {
            let j = (i + 1) % nodes.len();
            if nodes[i].components == nodes[j].components {
                return Err(Error::InvalidLoop { reason: "consecutive nodes coincide" });
            }
        }
        Ok(Self { nodes, stamp })
    }

    /// Loop of spatial points placed at time `t`.
    pub fn from_spatial(points: &[ThreeVector], t: f64) -> Result<Self> {
        Self::new(points.iter().map(|p| FourVector::event(t, *p)).collect(), t)
    }

    pub fn nodes(&self) -> &[FourVector] {
        &self.nodes
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn node(&self, i: usize) -> FourVector {
        self.nodes[i % self.nodes.len()]
    }

    /// Spatial projection of every node.
    pub fn spatial_points(&self) -> Vec<ThreeVector> {
        self.nodes.iter().map(|n| n.spatial()).collect()
    }

    /// Same nodes in reverse order.
    pub fn reversed(&self) -> Self {
        let mut nodes = self.nodes.clone();
        nodes.reverse();
        Self { nodes, stamp: self.stamp }
    }

    /// Spatial segment vectors `x_{i+1} − x_i`.
    pub fn segments(&self) -> Vec<ThreeVector> {
        let p = self.spatial_points();
        (0..p.len()).map(|i| p[(i + 1) % p.len()] - p[i]).collect()
    }

    /// Spatial segment midpoints.
    pub fn midpoints(&self) -> Vec<ThreeVector> {
        let p = self.spatial_points();
        (0..p.len()).map(|i| 0.5 * (p[(i + 1) % p.len()] + p[i])).collect()
    }

    pub fn max_segment_length(&self) -> f64 {
        self.segments().iter().map(|s| s.norm()).fold(0.0, f64::max)
    }

    /// Spatial length of the polygon.
    pub fn length(&self) -> f64 {
        crate::sum::sum_slice(&self.segments().iter().map(|s| s.norm()).collect::<Vec<_>>())
    }
}

/// Smallest spatial distance between nodes of two loops.
pub fn min_node_distance(a: &LoopPolyline, b: &LoopPolyline) -> f64 {
    let pb = b.spatial_points();
    a.spatial_points()
        .iter()
        .map(|p| pb.iter().map(|q| (*p - *q).norm()).fold(f64::INFINITY, f64::min))
        .fold(f64::INFINITY, f64::min)
}

/// Which parameter the flow map advances.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Clock {
    /// `dx/ds = U`: the relativistic flow map.
    #[default]
    Proper,
    /// `dx/dt = U/U⁰`: every node stays on a common time slice.
    Reference,
}

fn rate(u: &dyn VectorField, x: &[f64; 4], clock: Clock) -> Result<[f64; 4]> {
    let p = FourVector::contravariant(*x);
    if !u.in_domain(&p) {
        return Err(Error::LeftDomain { point: *x });
    }
    let v = u.value(&p).to_contravariant().components;
    if !v.iter().all(|c| c.is_finite()) {
        return Err(Error::LeftDomain { point: *x });
    }
    Ok(match clock {
        Clock::Proper => v,
        Clock::Reference => [1.0, v[1] / v[0], v[2] / v[0], v[3] / v[0]],
    })
}

fn axpy(x: &[f64; 4], a: f64, k: &[f64; 4]) -> [f64; 4] {
    [x[0] + a * k[0], x[1] + a * k[1], x[2] + a * k[2], x[3] + a * k[3]]
}

/// Classic fourth-order Runge–Kutta along the flow, `steps` steps of `ds`.
pub fn advance_point_with(
    u: &dyn VectorField,
    x: &FourVector,
    ds: f64,
    steps: usize,
    clock: Clock,
) -> Result<FourVector> {
    let mut y = x.to_contravariant().components;
    for _ in 0..steps {
        let k1 = rate(u, &y, clock)?;
        let k2 = rate(u, &axpy(&y, 0.5 * ds, &k1), clock)?;
        let k3 = rate(u, &axpy(&y, 0.5 * ds, &k2), clock)?;
        let k4 = rate(u, &axpy(&y, ds, &k3), clock)?;
        for i in 0..4 {
            y[i] += ds / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }
    }
    Ok(FourVector::contravariant(y))
}

/// Proper-time flow map `x ↦ 𝒯_U(steps·ds) x`.
pub fn advance_point(x: &FourVector, u: &dyn VectorField, ds: f64, steps: usize) -> Result<FourVector> {
    advance_point_with(u, x, ds, steps, Clock::Proper)
}

/// Move every node of `lp` with the flow map.
pub fn transport_loop_with(
    lp: &LoopPolyline,
    u: &dyn VectorField,
    ds: f64,
    steps: usize,
    clock: Clock,
) -> Result<LoopPolyline> {
    let nodes = try_map_indexed(lp.len(), |i| advance_point_with(u, &lp.nodes[i], ds, steps, clock))?;
    Ok(LoopPolyline { nodes, stamp: lp.stamp + ds * steps as f64 })
}

pub fn transport_loop(lp: &LoopPolyline, u: &dyn VectorField, ds: f64, steps: usize) -> Result<LoopPolyline> {
    transport_loop_with(lp, u, ds, steps, Clock::Proper)
}

/// Orbit of a loop: `rows[i]` is the loop after `i` steps of `ds`.
#[derive(Debug, Clone, PartialEq)]
pub struct RibbonSurface {
    pub rows: Vec<LoopPolyline>,
    pub ds: f64,
}

impl RibbonSurface {
    pub fn row(&self, i: usize) -> &LoopPolyline {
        &self.rows[i]
    }

    pub fn n_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn n_columns(&self) -> usize {
        self.rows.first().map_or(0, |r| r.len())
    }

    pub fn node(&self, i: usize, j: usize) -> FourVector {
        self.rows[i].node(j)
    }
}

/// Transport `lp` for `steps` steps, recording every intermediate row.
pub fn build_orbit_ribbon(lp: &LoopPolyline, u: &dyn VectorField, ds: f64, steps: usize) -> Result<RibbonSurface> {
    if !(ds > 0.0) {
        return Err(Error::InvalidParameter { reason: "step must be positive" });
    }
    let mut rows = Vec::with_capacity(steps + 1);
    rows.push(lp.clone());
    for i in 0..steps {
        let next = transport_loop(&rows[i], u, ds, 1)?;
        rows.push(next);
    }
    Ok(RibbonSurface { rows, ds })
}

/// Euclidean norm of a raw 4-component array.
pub(crate) fn norm4(v: &[f64; 4]) -> f64 {
    math::sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2] + v[3] * v[3])
}
