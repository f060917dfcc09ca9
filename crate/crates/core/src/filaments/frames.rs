//! Pure-state frames on an orbit ribbon.
//!
//! At each ribbon node the two edge directions are the orbit tangent `T_s`
//! (along `s`) and the loop chord `T_j`. The filament 2-form is the dual of
//! their wedge, `m = ⋆(T_s ∧ T_j)`, so a static loop carries `𝖇` along its
//! tangent and `𝖊 = 0`. Contracting with `U` gives the two frame vectors
//! `ẽ = i_U m` and `b̃ = i_U(⋆m)`, both covariant.

use alloc::vec::Vec;

use super::{norm4, LoopPolyline, RibbonSurface};
use crate::calculus::{ScalarField, VectorField};
use crate::core4::{hodge_dual, interior_product, minkowski_dot, Bivector, FourVector};
use crate::sum::try_map_indexed;
use crate::{math, Error, Result};

/// Which slice fixes the unit strength of the filament.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum FrameNormalization {
    /// `−b̃·b̃ = 1` on the proper-time slice.
    #[default]
    ProperTime,
    /// `|𝖇| = 1` on the reference-time slice.
    ReferenceTime,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FilamentPart {
    B,
    E,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FilamentFrame {
    pub b_tilde: FourVector,
    pub e_tilde: FourVector,
    /// Unnormalized tangent bivector `T_s ∧ T_j`.
    pub surface: Bivector,
    /// Full filament 2-form, including the `U♭ ∧ (−dθ)` part when θ is given.
    pub form: Bivector,
    /// Factor applied to `⋆(T_s ∧ T_j)` by the normalization.
    pub scale: f64,
    /// Loop chord orthogonal to `U`.
    pub chord: FourVector,
}

/// Frames indexed like the ribbon: `frames[i][j]`.
#[derive(Debug, Clone, PartialEq)]
pub struct RibbonFrames {
    pub frames: Vec<Vec<FilamentFrame>>,
    pub normalization: FrameNormalization,
}

impl RibbonFrames {
    pub fn frame(&self, i: usize, j: usize) -> &FilamentFrame {
        &self.frames[i][j % self.frames[i].len()]
    }
}

fn diff(a: &FourVector, b: &FourVector) -> [f64; 4] {
    [0, 1, 2, 3].map(|k| a.components[k] - b.components[k])
}

/// Edge vectors `(T_s, T_j)` at node `(i, j)`: second-order differences in
/// `s` and the central loop chord scaled to unit spatial length.
fn edges(ribbon: &RibbonSurface, i: usize, j: usize) -> Result<(FourVector, FourVector)> {
    let rows = ribbon.n_rows();
    if rows < 3 {
        return Err(Error::InvalidParameter { reason: "a ribbon needs at least three rows" });
    }
    let ds = ribbon.ds;
    let x = |r: usize| ribbon.node(r, j).components;
    let ts: [f64; 4] = if i == 0 {
        let (a, b, c) = (x(0), x(1), x(2));
        [0, 1, 2, 3].map(|k| (-3.0 * a[k] + 4.0 * b[k] - c[k]) / (2.0 * ds))
    } else if i == rows - 1 {
        let (a, b, c) = (x(rows - 1), x(rows - 2), x(rows - 3));
        [0, 1, 2, 3].map(|k| (3.0 * a[k] - 4.0 * b[k] + c[k]) / (2.0 * ds))
    } else {
        let (a, b) = (x(i + 1), x(i - 1));
        [0, 1, 2, 3].map(|k| (a[k] - b[k]) / (2.0 * ds))
    };
    let n = ribbon.n_columns();
    let row = ribbon.row(i);
    let chord = diff(&row.node(j + 1), &row.node(j + n - 1));
    let len = math::hypot3(chord[1], chord[2], chord[3]);
    if !(len > 0.0) {
        return Err(Error::DegenerateCell { row: i, column: j });
    }
    let tj = chord.map(|c| c / len);
    let (a, b) = (norm4(&ts), norm4(&tj));
    let dot: f64 = (0..4).map(|k| ts[k] * tj[k]).sum();
    let cos = dot / (a * b);
    let sine_sq = 1.0 - cos * cos;
    if !(a > 0.0) || !(sine_sq > 1e-20) {
        return Err(Error::DegenerateCell { row: i, column: j });
    }
    Ok((FourVector::contravariant(ts), FourVector::contravariant(tj)))
}

/// Part of `v` orthogonal to the unit timelike `u`.
fn orthogonal_to(v: &FourVector, u: &FourVector) -> FourVector {
    *v - minkowski_dot(u, v) * u.to_contravariant()
}

/// Frames at every ribbon node. With `theta`, the form gains `U♭ ∧ (−dθ)` so
/// that `ẽ = −dθ` wherever `U·dθ = 0`.
pub fn ribbon_frames(
    ribbon: &RibbonSurface,
    u: &dyn VectorField,
    theta: Option<&dyn ScalarField>,
    normalization: FrameNormalization,
    h: f64,
) -> Result<RibbonFrames> {
    let cols = ribbon.n_columns();
    let rows = ribbon.n_rows();
    let flat = try_map_indexed(rows * cols, |k| {
        let (i, j) = (k / cols, k % cols);
        let x = ribbon.node(i, j);
        let (ts, tj) = edges(ribbon, i, j)?;
        let uu = u.value(&x).to_contravariant();
        let surface = Bivector::wedge(&ts, &tj);
        let raw = hodge_dual(&surface);
        let b_raw = interior_product(&uu, &hodge_dual(&raw));
        let size = match normalization {
            FrameNormalization::ProperTime => math::sqrt(-minkowski_dot(&b_raw, &b_raw)),
            FrameNormalization::ReferenceTime => raw.b.norm(),
        };
        if !(size > 0.0) || !size.is_finite() {
            return Err(Error::DegenerateCell { row: i, column: j });
        }
        let scale = 1.0 / size;
        let mut form = scale * raw;
        if let Some(th) = theta {
            let grad = crate::calculus::scalar_gradient(th, &x, h, crate::calculus::DerivativeMode::PreferAnalytic)?;
            form = form + Bivector::wedge(&uu.to_covariant(), &(-grad.to_covariant()));
        }
        Ok(FilamentFrame {
            b_tilde: interior_product(&uu, &hodge_dual(&form)),
            e_tilde: interior_product(&uu, &form),
            surface,
            form,
            scale,
            chord: orthogonal_to(&tj, &uu),
        })
    })?;
    let mut frames = Vec::with_capacity(rows);
    let mut it = flat.into_iter();
    for _ in 0..rows {
        frames.push(it.by_ref().take(cols).collect());
    }
    Ok(RibbonFrames { frames, normalization })
}

/// Largest Euclidean component of `U` outside the span of the two edge
/// directions, over all ribbon nodes.
pub fn orbit_condition_residual(ribbon: &RibbonSurface, u: &dyn VectorField) -> Result<f64> {
    let cols = ribbon.n_columns();
    let res = try_map_indexed(ribbon.n_rows() * cols, |k| {
        let (i, j) = (k / cols, k % cols);
        let (ts, tj) = edges(ribbon, i, j)?;
        let uu = u.value(&ribbon.node(i, j)).to_contravariant().components;
        let e1n = norm4(&tj.components);
        let e1 = tj.components.map(|c| c / e1n);
        let d = |a: &[f64; 4], b: &[f64; 4]| (0..4).map(|k| a[k] * b[k]).sum::<f64>();
        let p = d(&ts.components, &e1);
        let e2r = [0, 1, 2, 3].map(|k| ts.components[k] - p * e1[k]);
        let e2n = norm4(&e2r);
        let e2 = e2r.map(|c| c / e2n);
        let (c1, c2) = (d(&uu, &e1), d(&uu, &e2));
        Ok(norm4(&[0, 1, 2, 3].map(|k| uu[k] - c1 * e1[k] - c2 * e2[k])))
    })?;
    Ok(res.into_iter().fold(0.0, f64::max))
}

/// One ribbon row with its frame weights attached.
#[derive(Debug, Clone, PartialEq)]
pub struct ProjectedFilament {
    pub lp: LoopPolyline,
    pub row: usize,
    /// `b̃` or `ẽ` per node.
    pub weights: Vec<FourVector>,
    /// Largest sine of the angle between `b̃` and the chord orthogonal to `U`.
    pub max_sine: f64,
    /// `+1` when `b̃` follows the node ordering, `−1` against it.
    pub orientation: i32,
}

/// The ribbon row nearest to `s`, with `b̃` or `ẽ` weights.
pub fn project_filament(
    ribbon: &RibbonSurface,
    frames: &RibbonFrames,
    s: f64,
    part: FilamentPart,
) -> Result<ProjectedFilament> {
    let s0 = ribbon.row(0).stamp;
    let s1 = s0 + ribbon.ds * (ribbon.n_rows() - 1) as f64;
    if !(s >= s0 - 1e-12 && s <= s1 + 1e-12) {
        return Err(Error::OutOfRange { value: s, lo: s0, hi: s1 });
    }
    let row = (math::round((s - s0) / ribbon.ds) as usize).min(ribbon.n_rows() - 1);
    let fr = &frames.frames[row];
    let mut max_sine = 0.0f64;
    let mut align = 0.0;
    for f in fr {
        let c = minkowski_dot(&f.b_tilde, &f.chord);
        let nb = -minkowski_dot(&f.b_tilde, &f.b_tilde);
        let nc = -minkowski_dot(&f.chord, &f.chord);
        let cos = c / math::sqrt(nb * nc);
        max_sine = max_sine.max(math::sqrt((1.0 - cos * cos).max(0.0)));
        align += c;
    }
    let weights = fr
        .iter()
        .map(|f| match part {
            FilamentPart::B => f.b_tilde,
            FilamentPart::E => f.e_tilde,
        })
        .collect();
    Ok(ProjectedFilament {
        lp: ribbon.row(row).clone(),
        row,
        weights,
        max_sine,
        orientation: if align >= 0.0 { 1 } else { -1 },
    })
}

#[cfg(test)]
mod tests {
    use super::super::{build_orbit_ribbon, shapes};
    use super::*;
    use crate::core4::{bivector_invariants, boost_bivector, LorentzBoost, ThreeVector};
    use crate::scenarios::{make_kinematic_flow, KinematicSpec};
    use approx::assert_abs_diff_eq;

    const EX: ThreeVector = ThreeVector::new(1.0, 0.0, 0.0);
    const EY: ThreeVector = ThreeVector::new(0.0, 1.0, 0.0);

    fn unit_circle(n: usize) -> LoopPolyline {
        shapes::circle(ThreeVector::ZERO, 1.0, EX, EY, n, 0.0).unwrap()
    }

    #[test]
    fn static_filament_frames() {
        let s = make_kinematic_flow(KinematicSpec::Static).unwrap();
        let rib = build_orbit_ribbon(&unit_circle(32), &*s.velocity, 0.1, 4).unwrap();
        let fr = ribbon_frames(&rib, &*s.velocity, None, FrameNormalization::ProperTime, 1e-4).unwrap();
        for i in 0..rib.n_rows() {
            for j in 0..32 {
                let f = fr.frame(i, j);
                assert_abs_diff_eq!(f.e_tilde.euclidean_norm(), 0.0, epsilon = 1e-14);
                assert_abs_diff_eq!(f.scale, 1.0, epsilon = 1e-14);
                assert_abs_diff_eq!(-minkowski_dot(&f.b_tilde, &f.b_tilde), 1.0, epsilon = 1e-14);
                assert_abs_diff_eq!(f.b_tilde.time(), 0.0, epsilon = 1e-14);
                let tangent = rib.node(i, j + 1).spatial() - rib.node(i, j + 31).spatial();
                let b = f.b_tilde.spatial();
                assert_abs_diff_eq!(b.cross(&tangent).norm(), 0.0, epsilon = 1e-14);
                assert!(b.dot(&tangent) > 0.0);
            }
        }
        let pb = project_filament(&rib, &fr, 0.2, FilamentPart::B).unwrap();
        assert_eq!(pb.row, 2);
        assert_eq!(pb.orientation, 1);
        assert!(pb.max_sine < 1e-12);
        assert_eq!(pb.lp.spatial_points(), unit_circle(32).spatial_points());
        let pe = project_filament(&rib, &fr, 0.2, FilamentPart::E).unwrap();
        assert!(pe.weights.iter().all(|w| w.euclidean_norm() < 1e-14));
        assert!(matches!(project_filament(&rib, &fr, 0.5, FilamentPart::B), Err(Error::OutOfRange { .. })));
    }

    #[test]
    fn reversed_loop_reverses_orientation() {
        let s = make_kinematic_flow(KinematicSpec::Static).unwrap();
        let rib = build_orbit_ribbon(&unit_circle(32).reversed(), &*s.velocity, 0.1, 3).unwrap();
        let fr = ribbon_frames(&rib, &*s.velocity, None, FrameNormalization::ProperTime, 1e-4).unwrap();
        let pb = project_filament(&rib, &fr, 0.0, FilamentPart::B).unwrap();
        assert_eq!(pb.orientation, 1);
        let forward = ribbon_frames(
            &build_orbit_ribbon(&unit_circle(32), &*s.velocity, 0.1, 3).unwrap(),
            &*s.velocity,
            None,
            FrameNormalization::ProperTime,
            1e-4,
        )
        .unwrap();
        let a = forward.frame(0, 31).b_tilde.spatial();
        let b = fr.frame(0, 0).b_tilde.spatial();
        assert_abs_diff_eq!((a + b).norm(), 0.0, epsilon = 1e-12);
    }

    #[test]
    fn boosted_frames_keep_the_norm_identity() {
        let s = make_kinematic_flow(KinematicSpec::Uniform(ThreeVector::new(0.3, -0.5, 0.2))).unwrap();
        let lp =
            shapes::circle(ThreeVector::new(0.1, 0.2, 0.0), 1.0, EX, ThreeVector::new(0.0, 0.6, 0.8), 24, 0.0).unwrap();
        let rib = build_orbit_ribbon(&lp, &*s.velocity, 0.05, 4).unwrap();
        for norm in [FrameNormalization::ProperTime, FrameNormalization::ReferenceTime] {
            let fr = ribbon_frames(&rib, &*s.velocity, None, norm, 1e-4).unwrap();
            for row in &fr.frames {
                for f in row {
                    let lhs = minkowski_dot(&f.b_tilde, &f.b_tilde) - minkowski_dot(&f.e_tilde, &f.e_tilde);
                    let (rhs, _) = bivector_invariants(&f.form);
                    assert_abs_diff_eq!(lhs, rhs, epsilon = 1e-10);
                }
            }
        }
        let m = Bivector::new(ThreeVector::new(0.3, -0.2, 0.9), ThreeVector::new(-0.4, 0.7, 0.1));
        let boost = LorentzBoost::new(ThreeVector::new(0.5, 0.1, -0.3)).unwrap();
        let mb = boost_bivector(&boost, &m);
        let u = crate::core4::four_velocity(ThreeVector::new(-0.2, 0.4, 0.1)).unwrap();
        let lhs = |m: &Bivector| {
            let (e, b) = (interior_product(&u, m), interior_product(&u, &hodge_dual(m)));
            minkowski_dot(&b, &b) - minkowski_dot(&e, &e)
        };
        assert_abs_diff_eq!(lhs(&m), bivector_invariants(&m).0, epsilon = 1e-12);
        assert_abs_diff_eq!(lhs(&mb), bivector_invariants(&m).0, epsilon = 1e-12);
    }

    #[test]
    fn uniform_flow_lies_in_the_ribbon() {
        let s = make_kinematic_flow(KinematicSpec::Uniform(ThreeVector::new(0.0, 0.6, 0.0))).unwrap();
        let rib = build_orbit_ribbon(&unit_circle(32), &*s.velocity, 0.1, 4).unwrap();
        assert!(orbit_condition_residual(&rib, &*s.velocity).unwrap() < 1e-12);
        let st = make_kinematic_flow(KinematicSpec::Static).unwrap();
        let rib = build_orbit_ribbon(&unit_circle(32), &*st.velocity, 0.1, 4).unwrap();
        assert!(orbit_condition_residual(&rib, &*st.velocity).unwrap() < 1e-14);
    }

    #[test]
    fn rotating_ribbon_tangency_converges() {
        let s = make_kinematic_flow(KinematicSpec::RigidRotation { omega: 0.8 }).unwrap();
        let lp =
            shapes::circle(ThreeVector::new(0.3, 0.0, 0.0), 0.4, EX, ThreeVector::new(0.0, 0.6, 0.8), 48, 0.0).unwrap();
        let r = |ds: f64| {
            let rib = build_orbit_ribbon(&lp, &*s.velocity, ds, (0.2 / ds).round() as usize).unwrap();
            orbit_condition_residual(&rib, &*s.velocity).unwrap()
        };
        let order = math::log2(r(1e-2) / r(5e-3));
        assert!(order >= 1.8, "order {order}");
    }

    #[test]
    fn folded_loop_is_degenerate() {
        let s = make_kinematic_flow(KinematicSpec::Static).unwrap();
        let mut pts = shapes::circle_points(ThreeVector::ZERO, 1.0, EX, EY, 10);
        pts[2] = pts[0];
        let lp = LoopPolyline::from_spatial(&pts, 0.0).unwrap();
        let rib = build_orbit_ribbon(&lp, &*s.velocity, 0.1, 3).unwrap();
        let fr = ribbon_frames(&rib, &*s.velocity, None, FrameNormalization::ProperTime, 1e-4);
        assert!(matches!(fr, Err(Error::DegenerateCell { row: 0, column: 1 })));
    }
}
