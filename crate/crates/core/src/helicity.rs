//! Helicity functionals.
//!
//! * [`semi_rel_helicity`]: `C(t) = ∫ 𝒦⁰ d³x` on a reference-time slice.
//! * [`rel_helicity`]: `∫ 𝒫 ∧ d𝒫` over a co-moving tetrahedral volume.
//! * [`boundary_term`]: `∫ (h + qϱ − θ) d𝒫` over the boundary of that volume.
//! * [`twin_filament_helicity`]: cross circulations of two filaments.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;

use crate::calculus::{
    exterior_derivative_with, helicity_current, scalar_gradient, vector_jacobian, CovectorField, DerivativeMode,
    VectorField,
};
use crate::core4::{Bivector, FourVector, ThreeVector};
use crate::filaments::{advance_point, stokes_link, LoopPolyline};
use crate::scenarios::Scenario;
use crate::sum::{sum_indexed, try_map_indexed, try_sum_indexed};
use crate::{math, Error, Result};

/// Step used only when a field has no analytic derivative.
const FD_STEP: f64 = 1e-4;

/// Smallest allowed ratio of a transported tet's volume to its initial volume.
pub const COLLAPSE_RATIO: f64 = 1e-12;

/// Box of `cells[0]·cells[1]·cells[2]` equal cells on a reference-time slice.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CellGrid3 {
    pub origin: ThreeVector,
    pub extents: [f64; 3],
    pub cells: [usize; 3],
}

impl CellGrid3 {
    pub fn new(origin: ThreeVector, extents: [f64; 3], cells: [usize; 3]) -> Result<Self> {
        if cells.contains(&0) {
            return Err(Error::InvalidGrid { reason: "every axis needs at least one cell" });
        }
        if !extents.iter().all(|&e| e > 0.0 && e.is_finite()) {
            return Err(Error::InvalidGrid { reason: "extents must be positive" });
        }
        Ok(Self { origin, extents, cells })
    }

    pub fn len(&self) -> usize {
        self.cells.iter().product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn spacing(&self) -> [f64; 3] {
        [0, 1, 2].map(|a| self.extents[a] / self.cells[a] as f64)
    }

    pub fn cell_volume(&self) -> f64 {
        self.spacing().iter().product()
    }

    /// Centre of cell `k` (x fastest).
    pub fn center(&self, k: usize) -> ThreeVector {
        let d = self.spacing();
        let (i, j, l) = (k % self.cells[0], (k / self.cells[0]) % self.cells[1], k / (self.cells[0] * self.cells[1]));
        ThreeVector::new(
            self.origin.0[0] + (i as f64 + 0.5) * d[0],
            self.origin.0[1] + (j as f64 + 0.5) * d[1],
            self.origin.0[2] + (l as f64 + 0.5) * d[2],
        )
    }
}

/// Reference volume `V₀` on the slice `t`: a square box of half-width
/// `half_width` around the axis, one period long.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VolumeSpec {
    pub t: f64,
    pub center: ThreeVector,
    pub half_width: f64,
    /// Spatial period vector closing the box along z, or the box length.
    pub length: f64,
    pub periodic: bool,
    pub cells: [usize; 3],
}

impl VolumeSpec {
    /// Box of half-width `factor·r₀` around the scenario axis at time `t`,
    /// spanning one period along z.
    pub fn around_axis(s: &Scenario, t: f64, factor: f64, cells: [usize; 3]) -> Self {
        let r0 = s.meta.support_radius.unwrap_or(1.0);
        let center = s.meta.axis_at(t).unwrap_or(ThreeVector::ZERO);
        let (length, periodic) = match s.meta.period {
            Some(p) => (p.spatial().norm(), true),
            None => (2.0 * factor * r0, false),
        };
        Self { t, center, half_width: factor * r0, length, periodic, cells }
    }

    pub fn cell_grid(&self) -> Result<CellGrid3> {
        let w = self.half_width;
        CellGrid3::new(
            ThreeVector::new(self.center.0[0] - w, self.center.0[1] - w, self.center.0[2]),
            [2.0 * w, 2.0 * w, self.length],
            self.cells,
        )
    }
}

fn current_at(p: &dyn CovectorField, x: &FourVector) -> Result<(FourVector, Bivector)> {
    let m = exterior_derivative_with(p, x, FD_STEP, DerivativeMode::PreferAnalytic)?;
    Ok((helicity_current(&p.value(x), &m), m))
}

/// `C(t) = ∫ 𝒦⁰ d³x` by the midpoint rule over the cells of `grid`.
pub fn semi_rel_helicity(s: &Scenario, t: f64, grid: &CellGrid3) -> Result<f64> {
    let p = s.momentum()?;
    let dv = grid.cell_volume();
    let total = try_sum_indexed(grid.len(), |k| {
        let x = FourVector::event(t, grid.center(k));
        Ok::<f64, Error>(current_at(p, &x)?.0.to_contravariant().components[0])
    })?;
    Ok(total * dv)
}

/// The two integral forms of `dC/dt`: `2∫γ⁻¹ℬ·∇θ` and `−2∫θℬ·∇γ⁻¹`, plus
/// `∫|2γ⁻¹ℬ·∇θ|` as the magnitude of the integrand.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DriftForms {
    pub form_a: f64,
    pub form_b: f64,
    pub magnitude: f64,
}

fn drift_integrands(s: &Scenario, x: &FourVector) -> Result<[f64; 3]> {
    let (p, theta) = (s.momentum()?, s.theta()?);
    let m = exterior_derivative_with(p, x, FD_STEP, DerivativeMode::PreferAnalytic)?;
    let g = scalar_gradient(theta, x, FD_STEP, DerivativeMode::PreferAnalytic)?.to_covariant().components;
    let grad_theta = ThreeVector::new(g[1], g[2], g[3]);
    let u = s.velocity.value(x).to_contravariant().components;
    let j = vector_jacobian(&*s.velocity, x, FD_STEP, DerivativeMode::PreferAnalytic)?;
    let inv_gamma = 1.0 / u[0];
    let grad_inv_gamma = (inv_gamma * inv_gamma) * ThreeVector::new(-j[1][0], -j[2][0], -j[3][0]);
    let a = 2.0 * inv_gamma * m.b.dot(&grad_theta);
    let b = -2.0 * theta.value(x) * m.b.dot(&grad_inv_gamma);
    Ok([a, b, math::abs(a)])
}

/// `(form_a, form_b)` at time `t`; equal up to quadrature error when `∇·ℬ = 0`
/// and `ℬ` vanishes on the box boundary.
pub fn helicity_drift_rhs(s: &Scenario, t: f64, grid: &CellGrid3) -> Result<(f64, f64)> {
    let d = helicity_drift_forms(s, t, grid)?;
    Ok((d.form_a, d.form_b))
}

pub fn helicity_drift_forms(s: &Scenario, t: f64, grid: &CellGrid3) -> Result<DriftForms> {
    s.momentum()?;
    s.theta()?;
    let dv = grid.cell_volume();
    let sums: Vec<f64> = (0..3)
        .map(|c| {
            try_sum_indexed(grid.len(), |k| {
                Ok::<f64, Error>(drift_integrands(s, &FourVector::event(t, grid.center(k)))?[c])
            })
        })
        .collect::<Result<_>>()?;
    Ok(DriftForms { form_a: sums[0] * dv, form_b: sums[1] * dv, magnitude: sums[2] * dv })
}

/// Co-moving tetrahedral 3-volume in space-time.
#[derive(Debug, Clone, PartialEq)]
pub struct TetMesh3 {
    pub vertices: Vec<FourVector>,
    /// Positively oriented on the initial slice.
    pub tets: Vec<[usize; 4]>,
    /// Outward-oriented boundary triangles, periodic pairs removed.
    pub boundary: Vec<[usize; 3]>,
    /// Matched periodic faces `(bottom, top)`; their contributions cancel.
    pub periodic_pairs: Vec<([usize; 3], [usize; 3])>,
    pub stamp: f64,
    initial_volumes: Vec<f64>,
}

/// The six Kuhn simplices of the unit cube, as corner bit masks (x = 1, y = 2, z = 4).
const KUHN: [[usize; 4]; 6] = [[0, 1, 3, 7], [0, 1, 5, 7], [0, 2, 3, 7], [0, 2, 6, 7], [0, 4, 5, 7], [0, 4, 6, 7]];

fn edge(a: &FourVector, b: &FourVector) -> [f64; 4] {
    [0, 1, 2, 3].map(|k| b.components[k] - a.components[k])
}

fn det3(a: &[f64; 3], b: &[f64; 3], c: &[f64; 3]) -> f64 {
    a[0] * (b[1] * c[2] - b[2] * c[1]) - a[1] * (b[0] * c[2] - b[2] * c[0]) + a[2] * (b[0] * c[1] - b[1] * c[0])
}

/// Euclidean 3-volume of the tet in `ℝ⁴` (Gram determinant).
fn tet_size(v: &[FourVector], t: &[usize; 4]) -> f64 {
    let e = [1, 2, 3].map(|k| edge(&v[t[0]], &v[t[k]]));
    let d = |a: &[f64; 4], b: &[f64; 4]| (0..4).map(|k| a[k] * b[k]).sum::<f64>();
    let g = [0, 1, 2].map(|i| [0, 1, 2].map(|j| d(&e[i], &e[j])));
    math::sqrt(det3(&g[0], &g[1], &g[2]).max(0.0)) / 6.0
}

/// Covariant normal `N_μ = ε_{μαβγ} e₁^α e₂^β e₃^γ` (with `ε_{0123} = −1`).
fn tet_normal(e: &[[f64; 4]; 3]) -> [f64; 4] {
    let minor = |skip: usize| {
        let cols: Vec<usize> = (0..4).filter(|&c| c != skip).collect();
        let r = |row: &[f64; 4]| [row[cols[0]], row[cols[1]], row[cols[2]]];
        det3(&r(&e[0]), &r(&e[1]), &r(&e[2]))
    };
    [0, 1, 2, 3].map(|mu| {
        let sign = if mu % 2 == 0 { 1.0 } else { -1.0 };
        -sign * minor(mu)
    })
}

impl TetMesh3 {
    /// Kuhn-subdivided box on the slice `spec.t`.
    pub fn from_box(spec: &VolumeSpec) -> Result<Self> {
        let [nx, ny, nz] = spec.cells;
        if nx == 0 || ny == 0 || nz == 0 {
            return Err(Error::InvalidGrid { reason: "every axis needs at least one cell" });
        }
        let grid = spec.cell_grid()?;
        let d = grid.spacing();
        let idx = |i: usize, j: usize, l: usize| i + (nx + 1) * (j + (ny + 1) * l);
        let mut vertices = Vec::with_capacity((nx + 1) * (ny + 1) * (nz + 1));
        for l in 0..=nz {
            for j in 0..=ny {
                for i in 0..=nx {
                    let o = grid.origin.0;
                    let p = ThreeVector::new(o[0] + i as f64 * d[0], o[1] + j as f64 * d[1], o[2] + l as f64 * d[2]);
                    vertices.push(FourVector::event(spec.t, p));
                }
            }
        }
        let mut tets = Vec::with_capacity(6 * nx * ny * nz);
        for l in 0..nz {
            for j in 0..ny {
                for i in 0..nx {
                    let corner = |m: usize| idx(i + (m & 1), j + ((m >> 1) & 1), l + ((m >> 2) & 1));
                    for k in KUHN {
                        let mut t = k.map(corner);
                        let e = [1, 2, 3].map(|q| {
                            let v = edge(&vertices[t[0]], &vertices[t[q]]);
                            [v[1], v[2], v[3]]
                        });
                        if det3(&e[0], &e[1], &e[2]) < 0.0 {
                            t.swap(2, 3);
                        }
                        tets.push(t);
                    }
                }
            }
        }
        let (boundary, periodic_pairs) = extract_boundary(&tets, spec.periodic, (nx + 1) * (ny + 1), nz);
        let initial_volumes = tets.iter().map(|t| tet_size(&vertices, t)).collect();
        Ok(Self { vertices, tets, boundary, periodic_pairs, stamp: 0.0, initial_volumes })
    }

    /// Euclidean 3-volume of every tet.
    pub fn volumes(&self) -> Vec<f64> {
        self.tets.iter().map(|t| tet_size(&self.vertices, t)).collect()
    }

    /// Smallest ratio of current to initial tet volume.
    pub fn min_volume_ratio(&self) -> (usize, f64) {
        self.volumes()
            .iter()
            .zip(&self.initial_volumes)
            .enumerate()
            .map(|(i, (v, v0))| (i, v / v0))
            .fold((0, f64::INFINITY), |a, b| if b.1 < a.1 { b } else { a })
    }

    /// Move every vertex with the flow map for `steps` steps of `ds`.
    pub fn transported(&self, u: &dyn VectorField, ds: f64, steps: usize) -> Result<Self> {
        let vertices = try_map_indexed(self.vertices.len(), |i| advance_point(&self.vertices[i], u, ds, steps))?;
        let out = Self { vertices, stamp: self.stamp + ds * steps as f64, ..self.clone() };
        let (index, ratio) = out.min_volume_ratio();
        if !(ratio >= COLLAPSE_RATIO) {
            return Err(Error::DegenerateTet { index, ratio });
        }
        Ok(out)
    }
}

type FacePair = ([usize; 3], [usize; 3]);

/// Faces used by exactly one tet, oriented outward; with `periodic`, faces on
/// the bottom layer are matched to the top layer and set aside.
fn extract_boundary(tets: &[[usize; 4]], periodic: bool, layer: usize, nz: usize) -> (Vec<[usize; 3]>, Vec<FacePair>) {
    let mut count: BTreeMap<[usize; 3], ([usize; 3], usize)> = BTreeMap::new();
    for t in tets {
        let [a, b, c, d] = *t;
        for f in [[b, c, d], [a, d, c], [a, b, d], [a, c, b]] {
            let mut key = f;
            key.sort_unstable();
            count.entry(key).and_modify(|e| e.1 += 1).or_insert((f, 1));
        }
    }
    let faces: Vec<[usize; 3]> = count.into_values().filter(|e| e.1 == 1).map(|e| e.0).collect();
    if !periodic {
        return (faces, Vec::new());
    }
    let level = |f: &[usize; 3]| {
        let l = f.map(|v| v / layer);
        if l.iter().all(|&x| x == 0) {
            Some(0)
        } else if l.iter().all(|&x| x == nz) {
            Some(nz)
        } else {
            None
        }
    };
    let mut top: BTreeMap<[usize; 3], [usize; 3]> = BTreeMap::new();
    let mut rest = Vec::new();
    let mut bottom = Vec::new();
    for f in faces {
        match level(&f) {
            Some(0) => bottom.push(f),
            Some(_) => {
                let mut key = f.map(|v| v - nz * layer);
                key.sort_unstable();
                top.insert(key, f);
            }
            None => rest.push(f),
        }
    }
    let mut pairs = Vec::new();
    for f in bottom {
        let mut key = f;
        key.sort_unstable();
        match top.remove(&key) {
            Some(t) => pairs.push((f, t)),
            None => rest.push(f),
        }
    }
    rest.extend(top.into_values());
    (rest, pairs)
}

/// Snapshots of `V(s) = 𝒯_U(s)V₀` every `every` steps of `ds`, `samples` of
/// them after the initial one.
pub fn build_comoving_mesh(
    v0: &TetMesh3,
    u: &dyn VectorField,
    ds: f64,
    every: usize,
    samples: usize,
) -> Result<Vec<TetMesh3>> {
    if !(ds > 0.0) || every == 0 {
        return Err(Error::InvalidParameter { reason: "step and stride must be positive" });
    }
    let mut out = Vec::with_capacity(samples + 1);
    out.push(v0.clone());
    for i in 0..samples {
        let next = out[i].transported(u, ds, every)?;
        out.push(next);
    }
    Ok(out)
}

/// `∫ 𝒫 ∧ d𝒫` over the mesh: one-point centroid rule, `−𝒦^μ N_μ / 6` per tet.
pub fn rel_helicity(mesh: &TetMesh3, s: &Scenario) -> Result<f64> {
    let p = s.momentum()?;
    try_sum_indexed(mesh.tets.len(), |k| {
        let t = &mesh.tets[k];
        let v = t.map(|i| mesh.vertices[i].components);
        let c = FourVector::contravariant([0, 1, 2, 3].map(|m| 0.25 * (v[0][m] + v[1][m] + v[2][m] + v[3][m])));
        let e = [1, 2, 3].map(|q| [0, 1, 2, 3].map(|m| v[q][m] - v[0][m]));
        let n = tet_normal(&e);
        let kk = current_at(p, &c)?.0.to_contravariant().components;
        Ok::<f64, Error>(-(0..4).map(|m| kk[m] * n[m]).sum::<f64>() / 6.0)
    })
}

/// `∫_{∂V} (h + qϱ − θ) d𝒫` by the centroid rule on the outward boundary
/// triangles; matched periodic faces are skipped.
pub fn boundary_term(mesh: &TetMesh3, s: &Scenario) -> Result<f64> {
    let p = s.momentum()?;
    if s.enthalpy.is_none() {
        return Err(Error::UnsupportedScenario { label: s.label.clone() });
    }
    try_sum_indexed(mesh.boundary.len(), |k| {
        let f = mesh.boundary[k];
        let v = f.map(|i| mesh.vertices[i]);
        let c = FourVector::contravariant(
            [0, 1, 2, 3].map(|m| (v[0].components[m] + v[1].components[m] + v[2].components[m]) / 3.0),
        );
        let m = exterior_derivative_with(p, &c, FD_STEP, DerivativeMode::PreferAnalytic)?;
        if m.max_abs() == 0.0 {
            return Ok(0.0);
        }
        let free = s.free_energy(&c).unwrap_or(0.0);
        let (a, b) = (FourVector::contravariant(edge(&v[0], &v[1])), FourVector::contravariant(edge(&v[0], &v[2])));
        Ok::<f64, Error>(0.5 * free * m.evaluate(&a, &b))
    })
}

/// `∫_{∂V} |d𝒫|` over the outward boundary triangles. Non-zero when the
/// support of `d𝒫` reaches the boundary, i.e. when `V` does not enclose it.
pub fn boundary_vorticity(mesh: &TetMesh3, s: &Scenario) -> Result<f64> {
    let p = s.momentum()?;
    try_sum_indexed(mesh.boundary.len(), |k| {
        let v = mesh.boundary[k].map(|i| mesh.vertices[i]);
        let c = FourVector::contravariant(
            [0, 1, 2, 3].map(|m| (v[0].components[m] + v[1].components[m] + v[2].components[m]) / 3.0),
        );
        let m = exterior_derivative_with(p, &c, FD_STEP, DerivativeMode::PreferAnalytic)?;
        let (a, b) = (FourVector::contravariant(edge(&v[0], &v[1])), FourVector::contravariant(edge(&v[0], &v[2])));
        Ok::<f64, Error>(0.5 * math::abs(m.evaluate(&a, &b)))
    })
}

/// `∮_{Γ₁} a₂·dx + ∮_{Γ₂} a₁·dx` with `aₖ` the Biot–Savart field of `Γₖ`;
/// self terms are excluded.
pub fn twin_filament_helicity(a: &LoopPolyline, b: &LoopPolyline) -> Result<f64> {
    Ok(stokes_link(a, b)? + stokes_link(b, a)?)
}

/// A named series of helicity values with drift statistics.
#[derive(Debug, Clone, PartialEq)]
pub struct HelicityReport {
    pub observable: String,
    pub method: String,
    pub resolution: String,
    /// `(parameter, value)` pairs.
    pub series: Vec<(f64, f64)>,
    pub reference: f64,
    /// `max |v − v₀| / |v₀|` (absolute when `v₀ = 0`).
    pub max_drift: f64,
}

impl HelicityReport {
    pub fn new(observable: &str, method: &str, resolution: &str, series: Vec<(f64, f64)>) -> Self {
        let reference = series.first().map_or(0.0, |p| p.1);
        let norm = if reference == 0.0 { 1.0 } else { math::abs(reference) };
        let max_drift = series.iter().map(|p| math::abs(p.1 - reference) / norm).fold(0.0, f64::max);
        Self {
            observable: observable.into(),
            method: method.into(),
            resolution: resolution.into(),
            series,
            reference,
            max_drift,
        }
    }

    /// Drift of every sample relative to the first.
    pub fn drifts(&self) -> Vec<f64> {
        let norm = if self.reference == 0.0 { 1.0 } else { math::abs(self.reference) };
        self.series.iter().map(|p| (p.1 - self.reference) / norm).collect()
    }
}

/// `𝔠(s)` on every snapshot of a co-moving mesh sequence.
pub fn rel_helicity_series(meshes: &[TetMesh3], s: &Scenario) -> Result<HelicityReport> {
    let series = meshes.iter().map(|m| Ok((m.stamp, rel_helicity(m, s)?))).collect::<Result<Vec<_>>>()?;
    let res = meshes.first().map_or(String::new(), |m| alloc::format!("{} tets", m.tets.len()));
    Ok(HelicityReport::new("relativistic helicity", "centroid rule on co-moving tets", &res, series))
}

/// Sum of `|𝒦⁰|` over the grid; a magnitude for relative comparisons.
pub fn helicity_density_magnitude(s: &Scenario, t: f64, grid: &CellGrid3) -> Result<f64> {
    let p = s.momentum()?;
    let vals = try_map_indexed(grid.len(), |k| {
        Ok::<f64, Error>(math::abs(
            current_at(p, &FourVector::event(t, grid.center(k)))?.0.to_contravariant().components[0],
        ))
    })?;
    Ok(sum_indexed(vals.len(), |k| vals[k]) * grid.cell_volume())
}
