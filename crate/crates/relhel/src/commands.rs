//! The five subcommands. Each writes `<command>.csv` into the output directory.

use relhel_core::calculus::{verify_identity, IdentityKind};
use relhel_core::filaments::{
    circulation_periodic, crossing_link_oracle, gauss_linking_number, transport_loop_with, Clock, LoopPolyline,
    INTEGER_THRESHOLD,
};
use relhel_core::helicity::{
    boundary_term, boundary_vorticity, build_comoving_mesh, helicity_drift_forms, rel_helicity, semi_rel_helicity,
    twin_filament_helicity, TetMesh3, VolumeSpec,
};
use relhel_core::scenarios::{identity_tolerance, Scenario};
use relhel_core::Error;

use crate::config::{ClockConfig, ExperimentConfig, TransportConfig};
use crate::output::{config_digest, write_text, Cell, Table};
use crate::{polyline, RunError, Summary};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Verify,
    Link,
    Transport,
    Helicity,
    Drift,
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Verify => "verify",
            Command::Link => "link",
            Command::Transport => "transport",
            Command::Helicity => "helicity",
            Command::Drift => "drift",
        }
    }
}

/// Sampling used by `helicity` and `drift` when the config has no transport.
const DEFAULT_SWEEP: TransportConfig = TransportConfig { ds: 1e-2, steps: 100, every: 10, clock: ClockConfig::Proper };

/// Node multipliers tried when a Gauss value is not close enough to an integer.
const REFINEMENTS: [usize; 4] = [1, 2, 4, 8];

pub fn run(cmd: Command, c: &ExperimentConfig) -> Result<Summary, RunError> {
    c.validate()?;
    let digest = config_digest(&c.canonical_json());
    let (passed, tables, lines) = match cmd {
        Command::Verify => verify(c)?,
        Command::Link => link(c)?,
        Command::Transport => transport(c)?,
        Command::Helicity => helicity(c)?,
        Command::Drift => drift(c)?,
    };
    let mut files = Vec::new();
    for (name, t) in &tables {
        files.push(t.write(&c.output.dir, name, &digest)?);
    }
    if cmd == Command::Transport && c.transport.is_some() {
        let moved = transport_final_loops(c)?;
        files.push(write_text(&c.output.dir, "transport.poly", &polyline::format(&moved))?);
    }
    Ok(Summary { passed, files, lines })
}

type Outcome = (bool, Vec<(String, Table)>, Vec<String>);

fn sample_count(tr: &TransportConfig) -> usize {
    tr.steps / tr.every
}

fn default_kinds(s: &Scenario) -> Vec<IdentityKind> {
    if s.is_kinematic() {
        Vec::new()
    } else {
        vec![
            IdentityKind::ThetaTransport,
            IdentityKind::EomTime,
            IdentityKind::EomSpace,
            IdentityKind::EomLie,
            IdentityKind::VorticityTransport,
        ]
    }
}

fn verify(c: &ExperimentConfig) -> Result<Outcome, RunError> {
    let s = c.build_scenario()?;
    let grid = c.build_grid(&s)?;
    let mut kinds = c.identity_kinds();
    if kinds.is_empty() {
        kinds = default_kinds(&s);
    }
    let fields = s.fields();
    let res = format!("samples {:?}, h {}", grid.samples, grid.h);
    let mut t = Table::new(
        "verify",
        res,
        &["kind", "max_residual", "rms_residual", "scale", "relative_residual", "tolerance", "h", "order", "pass"],
    );
    let mut passed = true;
    let mut lines = Vec::new();
    for kind in kinds {
        let r = match verify_identity(kind, &fields, &grid) {
            Err(Error::UnsupportedKind { kind }) => {
                return Err(RunError::Config(format!("identity `{kind}` does not apply to scenario `{}`", s.label)))
            }
            r => r?,
        };
        let tol = c.tolerances.identity.unwrap_or_else(|| identity_tolerance(&s, kind, grid.h));
        let ok = r.passes(tol);
        passed &= ok;
        lines.push(format!(
            "{:<20} max {:.3e}  tol {:.1e}  {}",
            kind.label(),
            r.max_residual,
            tol,
            if ok { "ok" } else { "FAIL" }
        ));
        t.push(vec![
            Cell::S(kind.label().into()),
            Cell::F(r.max_residual),
            Cell::F(r.l2_residual),
            Cell::F(r.scale),
            Cell::F(r.relative_residual()),
            Cell::F(tol),
            Cell::F(r.h),
            r.convergence_order.map_or(Cell::S(String::new()), Cell::F),
            Cell::B(ok),
        ]);
    }
    Ok((passed, vec![("verify.csv".into(), t)], lines))
}

type Pair = (LoopPolyline, LoopPolyline);

fn pairs(loops: Vec<LoopPolyline>) -> Result<Vec<Pair>, RunError> {
    if !loops.len().is_multiple_of(2) {
        return Err(RunError::Config(format!("`link` pairs consecutive loops, got {} loops", loops.len())));
    }
    let mut it = loops.into_iter();
    let mut out = Vec::new();
    while let (Some(a), Some(b)) = (it.next(), it.next()) {
        out.push((a, b));
    }
    Ok(out)
}

fn loops_at(c: &ExperimentConfig, factor: usize) -> Result<Vec<LoopPolyline>, RunError> {
    let mut scaled = c.clone();
    for l in &mut scaled.loops {
        if let Some(n) = l.nodes() {
            l.set_nodes(n * factor);
        }
    }
    scaled.build_loops()
}

struct LinkRow {
    gauss: f64,
    rounded: i64,
    trustworthy: bool,
    oracle: i64,
    helicity: f64,
}

fn link_row(a: &LoopPolyline, b: &LoopPolyline) -> Result<LinkRow, RunError> {
    let g = gauss_linking_number(a, b)?;
    Ok(LinkRow {
        gauss: g.value,
        rounded: g.rounded,
        trustworthy: g.trustworthy,
        oracle: crossing_link_oracle(a, b)?,
        helicity: twin_filament_helicity(a, b)?,
    })
}

fn link(c: &ExperimentConfig) -> Result<Outcome, RunError> {
    if c.loops.is_empty() {
        return Err(RunError::Config("`link` needs `loops`".into()));
    }
    let n_pairs = pairs(c.build_loops()?)?.len();
    let mut chosen: Vec<Option<(usize, Pair, LinkRow)>> = (0..n_pairs).map(|_| None).collect();
    for factor in REFINEMENTS {
        if chosen.iter().all(|x| x.as_ref().is_some_and(|(_, _, r)| r.trustworthy)) {
            break;
        }
        for (i, (a, b)) in pairs(loops_at(c, factor)?)?.into_iter().enumerate() {
            if chosen[i].as_ref().is_some_and(|(_, _, r)| r.trustworthy) {
                continue;
            }
            let row = link_row(&a, &b)?;
            chosen[i] = Some((factor, (a, b), row));
        }
        if c.loops.iter().all(|l| l.nodes().is_none()) {
            break;
        }
    }
    let sweep = match (&c.transport, &c.scenario) {
        (Some(tr), Some(_)) => Some((tr.clone(), c.build_scenario()?)),
        _ => None,
    };
    let res = format!("threshold {INTEGER_THRESHOLD}");
    let mut t = Table::new(
        "link",
        res,
        &["pair", "parameter", "nodes", "gauss", "rounded", "trustworthy", "oracle", "helicity", "pass"],
    );
    let mut passed = true;
    let mut lines = Vec::new();
    for (i, entry) in chosen.into_iter().enumerate() {
        let (_, (mut a, mut b), row) = entry.expect("every pair evaluated");
        let reference = row.oracle;
        let push = |t: &mut Table, s: f64, a: &LoopPolyline, r: &LinkRow| {
            let ok = r.trustworthy
                && r.rounded == reference
                && r.oracle == reference
                && r.helicity.round() as i64 == 2 * reference;
            t.push(vec![
                Cell::U(i),
                Cell::F(s),
                Cell::U(a.len()),
                Cell::F(r.gauss),
                Cell::I(r.rounded),
                Cell::B(r.trustworthy),
                Cell::I(r.oracle),
                Cell::F(r.helicity),
                Cell::B(ok),
            ]);
            ok
        };
        let mut ok = push(&mut t, 0.0, &a, &row);
        lines.push(format!("pair {i}: gauss {:.6} oracle {} helicity {:.6}", row.gauss, row.oracle, row.helicity));
        if let Some((tr, s)) = &sweep {
            for k in 1..=sample_count(tr) {
                a = transport_loop_with(&a, &*s.velocity, tr.ds, tr.every, tr.clock.into())?;
                b = transport_loop_with(&b, &*s.velocity, tr.ds, tr.every, tr.clock.into())?;
                let r = link_row(&a, &b)?;
                ok &= push(&mut t, (k * tr.every) as f64 * tr.ds, &a, &r);
            }
            lines.push(format!(
                "pair {i}: rounded link {} over the sweep",
                if ok { "constant" } else { "NOT constant" }
            ));
        }
        passed &= ok;
    }
    Ok((passed, vec![("link.csv".into(), t)], lines))
}

fn require_transport(c: &ExperimentConfig) -> Result<&TransportConfig, RunError> {
    c.transport.as_ref().ok_or_else(|| RunError::Config("this command needs `transport`".into()))
}

fn transport(c: &ExperimentConfig) -> Result<Outcome, RunError> {
    let s = c.build_scenario()?;
    let tr = require_transport(c)?;
    let loops = c.build_loops()?;
    if loops.is_empty() {
        return Err(RunError::Config("`transport` needs `loops`".into()));
    }
    let p = s.momentum().ok();
    let clock: Clock = tr.clock.into();
    let res = format!("ds {}, steps {}, clock {:?}", tr.ds, tr.steps, tr.clock);
    let mut t = Table::new("transport", res, &["loop", "parameter", "nodes", "circulation", "drift"]);
    let mut worst = 0.0f64;
    for (i, lp) in loops.iter().enumerate() {
        let c0 = p.map(|p| circulation_periodic(lp, p));
        let norm = c0.map_or(1.0, |v| if v == 0.0 { 1.0 } else { v.abs() });
        let mut cur = lp.clone();
        for k in 0..=sample_count(tr) {
            if k > 0 {
                cur = transport_loop_with(&cur, &*s.velocity, tr.ds, tr.every, clock)?;
            }
            let (circ, drift) = match (p, c0) {
                (Some(p), Some(c0)) => {
                    let v = circulation_periodic(&cur, p);
                    (Cell::F(v), Cell::F((v - c0) / norm))
                }
                _ => (Cell::S(String::new()), Cell::S(String::new())),
            };
            if let Cell::F(d) = drift {
                worst = worst.max(d.abs());
            }
            t.push(vec![Cell::U(i), Cell::F((k * tr.every) as f64 * tr.ds), Cell::U(cur.len()), circ, drift]);
        }
    }
    let checked = p.is_some() && tr.clock == ClockConfig::Proper;
    let passed = !checked || worst <= c.tolerances.circulation;
    let lines = vec![format!(
        "max relative circulation drift {worst:.3e}{}",
        if checked { format!(" (tolerance {:.1e})", c.tolerances.circulation) } else { " (reported only)".into() }
    )];
    Ok((passed, vec![("transport.csv".into(), t)], lines))
}

fn transport_final_loops(c: &ExperimentConfig) -> Result<Vec<LoopPolyline>, RunError> {
    let s = c.build_scenario()?;
    let tr = require_transport(c)?;
    let steps = sample_count(tr) * tr.every;
    c.build_loops()?
        .iter()
        .map(|lp| transport_loop_with(lp, &*s.velocity, tr.ds, steps, tr.clock.into()).map_err(RunError::from))
        .collect()
}

fn volume(c: &ExperimentConfig, s: &Scenario, t: f64) -> VolumeSpec {
    let n = c.volume.cells;
    VolumeSpec::around_axis(s, t, c.volume.factor, [n, n, n])
}

fn rel(v: f64, v0: f64) -> f64 {
    if v0 == 0.0 {
        v
    } else {
        (v - v0) / v0.abs()
    }
}

fn helicity(c: &ExperimentConfig) -> Result<Outcome, RunError> {
    let s = c.build_scenario()?;
    if s.is_kinematic() {
        return Err(RunError::Config(format!("scenario `{}` carries no momentum", s.label)));
    }
    let tr = c.transport.clone().unwrap_or(DEFAULT_SWEEP);
    let obs = c.observables();
    let want = |name: &str| obs.contains(&name);
    let samples = sample_count(&tr);
    let params: Vec<f64> = (0..=samples).map(|k| (k * tr.every) as f64 * tr.ds).collect();
    let empty = || Cell::S(String::new());
    let mut mesh_vals = vec![None; params.len()];
    let mut bound_vals = vec![None; params.len()];
    if want("mesh") || want("boundary") {
        let v0 = TetMesh3::from_box(&volume(c, &s, 0.0))?;
        let seq = build_comoving_mesh(&v0, &*s.velocity, tr.ds, tr.every, samples)?;
        for (k, m) in seq.iter().enumerate() {
            if want("mesh") {
                mesh_vals[k] = Some(rel_helicity(m, &s)?);
            }
            if want("boundary") {
                bound_vals[k] = Some((boundary_term(m, &s)?, boundary_vorticity(m, &s)?));
            }
        }
    }
    let mut dens_vals = vec![None; params.len()];
    let mut form_vals = vec![None; params.len()];
    for (k, &t) in params.iter().enumerate() {
        let grid = volume(c, &s, t).cell_grid()?;
        if want("density") {
            dens_vals[k] = Some(semi_rel_helicity(&s, t, &grid)?);
        }
        if want("drift") {
            form_vals[k] = Some(helicity_drift_forms(&s, t, &grid)?);
        }
    }
    let res = format!("{0}x{0}x{0} cells, ds {1}, every {2}", c.volume.cells, tr.ds, tr.every);
    let mut table = Table::new(
        "helicity",
        res,
        &[
            "parameter",
            "mesh_helicity",
            "mesh_drift",
            "boundary_term",
            "boundary_vorticity",
            "density_helicity",
            "density_drift",
            "form_a",
            "form_b",
        ],
    );
    let m0 = mesh_vals[0];
    let d0 = dens_vals[0];
    for k in 0..params.len() {
        let f = |x: Option<f64>| x.map_or_else(empty, Cell::F);
        table.push(vec![
            Cell::F(params[k]),
            f(mesh_vals[k]),
            f(mesh_vals[k].zip(m0).map(|(v, v0)| rel(v, v0))),
            f(bound_vals[k].map(|b| b.0)),
            f(bound_vals[k].map(|b| b.1)),
            f(dens_vals[k]),
            f(dens_vals[k].zip(d0).map(|(v, v0)| rel(v, v0))),
            f(form_vals[k].map(|d| d.form_a)),
            f(form_vals[k].map(|d| d.form_b)),
        ]);
    }
    let mut passed = true;
    let mut lines = Vec::new();
    let tol = &c.tolerances;
    if let Some(m0) = m0 {
        let drift = mesh_vals.iter().flatten().map(|&v| rel(v, m0).abs()).fold(0.0, f64::max);
        passed &= drift <= tol.helicity_drift;
        lines.push(format!("mesh helicity {m0:.6e}, max drift {drift:.3e} (tolerance {:.1e})", tol.helicity_drift));
    }
    if bound_vals[0].is_some() {
        let worst = bound_vals.iter().flatten().map(|b| b.0.abs()).fold(0.0, f64::max);
        let scale = m0.map_or(1.0, f64::abs);
        passed &= worst <= tol.boundary * scale;
        lines.push(format!("max |boundary term| {worst:.3e} (tolerance {:.1e})", tol.boundary * scale));
    }
    if let Some(d0) = d0 {
        // With the drift forms available, C(t) − C(0) is checked against the
        // trapezoid integral of form_a; otherwise C must stay flat.
        if form_vals[0].is_some() {
            let forms: Vec<_> = form_vals.iter().flatten().collect();
            let mut integral = 0.0;
            let mut miss = 0.0f64;
            let mut magnitude = 0.0f64;
            for k in 1..params.len() {
                let dt = params[k] - params[k - 1];
                integral += 0.5 * dt * (forms[k].form_a + forms[k - 1].form_a);
                magnitude += 0.5 * dt * (forms[k].magnitude + forms[k - 1].magnitude);
                miss = miss.max((dens_vals[k].unwrap() - d0 - integral).abs());
            }
            let scale = d0.abs().max(magnitude);
            passed &= miss <= tol.drift_match * scale;
            lines.push(format!(
                "C(t) against integrated drift: off by {miss:.3e} (tolerance {:.1e})",
                tol.drift_match * scale
            ));
        } else {
            let drift = dens_vals.iter().flatten().map(|&v| rel(v, d0).abs()).fold(0.0, f64::max);
            passed &= drift <= tol.helicity_drift;
            lines.push(format!("density helicity {d0:.6e}, max drift {drift:.3e}"));
        }
    }
    Ok((passed, vec![("helicity.csv".into(), table)], lines))
}

fn drift(c: &ExperimentConfig) -> Result<Outcome, RunError> {
    let s = c.build_scenario()?;
    if s.is_kinematic() {
        return Err(RunError::Config(format!("scenario `{}` carries no momentum", s.label)));
    }
    let tr = c.transport.clone().unwrap_or(DEFAULT_SWEEP);
    let dt = tr.ds;
    let res = format!("{0}x{0}x{0} cells, dt {dt}", c.volume.cells);
    let mut table = Table::new(
        "drift",
        res,
        &["parameter", "form_a", "form_b", "magnitude", "central_rate", "helicity", "form_gap", "rate_gap", "pass"],
    );
    let tol = &c.tolerances;
    let mut passed = true;
    let mut lines = Vec::new();
    for k in 0..=sample_count(&tr) {
        let t = (k * tr.every) as f64 * tr.ds;
        let grid = volume(c, &s, t).cell_grid()?;
        let d = helicity_drift_forms(&s, t, &grid)?;
        let h = semi_rel_helicity(&s, t, &grid)?;
        let rate = (semi_rel_helicity(&s, t + dt, &grid)? - semi_rel_helicity(&s, t - dt, &grid)?) / (2.0 * dt);
        let form_gap = (d.form_a - d.form_b).abs();
        let rate_gap = (rate - d.form_a).abs().max((rate - d.form_b).abs());
        let scale = h.abs().max(d.magnitude);
        let ok = form_gap <= tol.drift_forms && rate_gap <= tol.drift_match * scale;
        passed &= ok;
        if k == 0 {
            lines.push(format!(
                "t = {t}: form_a {:.3e}, form_b {:.3e}, dC/dt {rate:.3e}, scale {scale:.3e}",
                d.form_a, d.form_b
            ));
        }
        table.push(vec![
            Cell::F(t),
            Cell::F(d.form_a),
            Cell::F(d.form_b),
            Cell::F(d.magnitude),
            Cell::F(rate),
            Cell::F(h),
            Cell::F(form_gap),
            Cell::F(rate_gap),
            Cell::B(ok),
        ]);
    }
    Ok((passed, vec![("drift.csv".into(), table)], lines))
}
