//! Integration of the Loewner-Kufarev ODE: evolution families phi_{s,t},
//! their Jacobians via the variational equation, and checks of the defining
//! evolution-family properties.
//!
//! The complex ODE is advanced in complex arithmetic (equivalent to a real
//! system of dimension 2n, or 2n + 2n^2 with the Jacobian). No step is
//! accepted with an intermediate stage outside the domain; such steps are
//! rejected and halved, and a trajectory that is driven into the boundary
//! margin raises [`Error::TrajectoryEscaped`] rather than being clamped.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::fields::HerglotzField;
use crate::geometry::kobayashi_distance;
use crate::linalg::{det, CMatrix, CVector, Cpx};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Method {
    RK4Fixed,
    RK45Adaptive,
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct IntegratorConfig {
    pub step_h: f64,
    pub method: Method,
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub boundary_margin: f64,
}

impl Default for IntegratorConfig {
    fn default() -> Self {
        IntegratorConfig {
            step_h: 1e-3,
            method: Method::RK45Adaptive,
            abs_tol: 1e-9,
            rel_tol: 1e-9,
            boundary_margin: 1e-9,
        }
    }
}

impl IntegratorConfig {
    /// Tightened tolerances for oracle-grade reference solutions.
    pub fn strict() -> Self {
        IntegratorConfig { abs_tol: 1e-12, rel_tol: 1e-12, ..Default::default() }
    }
}

/// phi_{s,t}(z) together with d(phi_{s,t})_z and integration diagnostics.
#[derive(Debug, Clone)]
pub struct FlowResult {
    pub endpoint: CVector,
    pub jacobian: CMatrix,
    pub s: f64,
    pub t: f64,
    pub steps_taken: usize,
    pub max_local_error_estimate: f64,
}

/// Flat state layout: z in the first n slots, Jacobian columns after.
struct FlatState {
    y: CVector,
}

impl FlatState {
    fn initial(z: &CVector) -> Self {
        let n = z.len();
        let mut y = CVector::zeros(n + n * n);
        for i in 0..n {
            y[i] = z[i];
        }
        // J(s) = I
        for i in 0..n {
            y[n + i * n + i] = Cpx::new(1.0, 0.0);
        }
        FlatState { y }
    }

    fn point(y: &CVector, n: usize) -> CVector {
        CVector::from_fn(n, |i, _| y[i])
    }

    fn jacobian(y: &CVector, n: usize) -> CMatrix {
        CMatrix::from_fn(n, n, |i, j| y[n + j * n + i])
    }
}

/// Right-hand side: dz/dt = G(z,t), dJ/dt = d_zG|_z J.
fn rhs(field: &HerglotzField, y: &CVector, t: f64, piece: usize, margin: f64) -> Result<CVector> {
    let n = field.domain.dimension();
    let z = FlatState::point(y, n);
    field.domain.check_interior(&z, margin)?;
    let g = field.evaluate_in_piece(&z, t, piece)?;
    let dg = field.jacobian_in_piece(&z, t, piece)?;
    let j = FlatState::jacobian(y, n);
    let dj = &dg * &j;
    let mut dy = CVector::zeros(n + n * n);
    for i in 0..n {
        dy[i] = g[i];
    }
    for col in 0..n {
        for row in 0..n {
            dy[n + col * n + row] = dj[(row, col)];
        }
    }
    Ok(dy)
}

// Dormand-Prince 5(4) tableau.
const DP_C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const DP_A: [[f64; 6]; 7] = [
    [0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
const DP_B5: [f64; 7] = [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0, 0.0];
const DP_B4: [f64; 7] = [
    5179.0 / 57600.0,
    0.0,
    7571.0 / 16695.0,
    393.0 / 640.0,
    -92097.0 / 339200.0,
    187.0 / 2100.0,
    1.0 / 40.0,
];

struct SegmentOutcome {
    steps: usize,
    max_err: f64,
}

fn integrate_segment(
    field: &HerglotzField,
    y: &mut CVector,
    a: f64,
    b: f64,
    piece: usize,
    cfg: &IntegratorConfig,
    trace: &mut Option<&mut Vec<(f64, CVector)>>,
) -> Result<SegmentOutcome> {
    let n = field.domain.dimension();
    let mut outcome = SegmentOutcome { steps: 0, max_err: 0.0 };
    if b <= a {
        return Ok(outcome);
    }
    match cfg.method {
        Method::RK4Fixed => {
            let nsteps = ((b - a) / cfg.step_h).ceil().max(1.0) as usize;
            let h = (b - a) / nsteps as f64;
            let mut t = a;
            for _ in 0..nsteps {
                let k1 = rhs(field, y, t, piece, cfg.boundary_margin).map_err(escape_at(t))?;
                let y2 = &*y + k1.map(|e| e * Cpx::new(h / 2.0, 0.0));
                let k2 =
                    rhs(field, &y2, t + h / 2.0, piece, cfg.boundary_margin).map_err(escape_at(t))?;
                let y3 = &*y + k2.map(|e| e * Cpx::new(h / 2.0, 0.0));
                let k3 =
                    rhs(field, &y3, t + h / 2.0, piece, cfg.boundary_margin).map_err(escape_at(t))?;
                let y4 = &*y + k3.map(|e| e * Cpx::new(h, 0.0));
                let k4 = rhs(field, &y4, t + h, piece, cfg.boundary_margin).map_err(escape_at(t))?;
                let incr = (k1 + k2.map(|e| e * Cpx::new(2.0, 0.0)) + k3.map(|e| e * Cpx::new(2.0, 0.0)) + k4)
                    .map(|e| e * Cpx::new(h / 6.0, 0.0));
                *y += incr;
                t += h;
                outcome.steps += 1;
                if let Some(tr) = trace.as_deref_mut() {
                    tr.push((t, FlatState::point(y, n)));
                }
            }
            field
                .domain
                .check_interior(&FlatState::point(y, n), cfg.boundary_margin)
                .map_err(escape_at(b))?;
            Ok(outcome)
        }
        Method::RK45Adaptive => {
            let mut t = a;
            let mut h = (b - a).min(0.1_f64.max(cfg.step_h));
            let h_min = 1e-13 * (1.0 + b.abs());
            let mut consecutive_rejects = 0usize;
            while t < b - 1e-14 * (1.0 + b.abs()) {
                h = h.min(b - t);
                let mut ks: Vec<CVector> = Vec::with_capacity(7);
                let mut stage_escaped = false;
                for i in 0..7 {
                    let mut yi = y.clone();
                    for (j, k) in ks.iter().enumerate() {
                        let aij = DP_A[i][j.min(5)];
                        if aij != 0.0 {
                            yi += k.map(|e| e * Cpx::new(h * aij, 0.0));
                        }
                    }
                    match rhs(field, &yi, t + DP_C[i] * h, piece, cfg.boundary_margin) {
                        Ok(k) => ks.push(k),
                        Err(Error::PointOutsideDomain) => {
                            stage_escaped = true;
                            break;
                        }
                        Err(e) => return Err(e),
                    }
                }
                if stage_escaped {
                    if h <= h_min {
                        return Err(Error::TrajectoryEscaped { t_esc: t });
                    }
                    h *= 0.5;
                    continue;
                }
                let mut y5 = y.clone();
                let mut y4 = y.clone();
                for i in 0..7 {
                    if DP_B5[i] != 0.0 {
                        y5 += ks[i].map(|e| e * Cpx::new(h * DP_B5[i], 0.0));
                    }
                    if DP_B4[i] != 0.0 {
                        y4 += ks[i].map(|e| e * Cpx::new(h * DP_B4[i], 0.0));
                    }
                }
                let mut err: f64 = 0.0;
                for i in 0..y.len() {
                    let scale = cfg.abs_tol + cfg.rel_tol * y[i].norm().max(y5[i].norm());
                    err = err.max((y5[i] - y4[i]).norm() / scale);
                }
                if err <= 1.0 {
                    // endpoint must stay clear of the boundary margin
                    if !field.domain.contains(&FlatState::point(&y5, n), cfg.boundary_margin) {
                        if h <= h_min {
                            return Err(Error::TrajectoryEscaped { t_esc: t });
                        }
                        h *= 0.5;
                        continue;
                    }
                    *y = y5;
                    t += h;
                    outcome.steps += 1;
                    outcome.max_err = outcome.max_err.max(err * cfg.abs_tol);
                    consecutive_rejects = 0;
                    if let Some(tr) = trace.as_deref_mut() {
                        tr.push((t, FlatState::point(y, n)));
                    }
                    let factor = if err == 0.0 { 5.0 } else { (0.9 * err.powf(-0.2)).clamp(0.2, 5.0) };
                    h = (h * factor).min(b - t + 1e-30);
                } else {
                    consecutive_rejects += 1;
                    if consecutive_rejects > 60 || h <= h_min {
                        return Err(Error::StepFailure { t });
                    }
                    h *= (0.9 * err.powf(-0.2)).clamp(0.1, 0.5);
                }
            }
            Ok(outcome)
        }
    }
}

fn escape_at(t: f64) -> impl Fn(Error) -> Error {
    move |e| match e {
        Error::PointOutsideDomain => Error::TrajectoryEscaped { t_esc: t },
        other => other,
    }
}

/// Integrate phi_{s,t}(z) and its Jacobian, substepping so that no step
/// crosses a declared field breakpoint.
pub fn integrate_flow(
    field: &HerglotzField,
    z: &CVector,
    s: f64,
    t: f64,
    cfg: &IntegratorConfig,
) -> Result<FlowResult> {
    integrate_flow_traced(field, z, s, t, cfg, None)
}

/// Same as [`integrate_flow`], optionally recording (t, z) after each
/// accepted step.
pub fn integrate_flow_traced(
    field: &HerglotzField,
    z: &CVector,
    s: f64,
    t: f64,
    cfg: &IntegratorConfig,
    mut trace: Option<&mut Vec<(f64, CVector)>>,
) -> Result<FlowResult> {
    if !(0.0 <= s && s <= t) {
        return Err(Error::InvalidSpec(format!("need 0 <= s <= t, got s = {s}, t = {t}")));
    }
    field.domain.check_interior(z, cfg.boundary_margin)?;
    let n = field.domain.dimension();
    let mut state = FlatState::initial(z);
    if let Some(tr) = trace.as_deref_mut() {
        tr.push((s, z.clone()));
    }
    let mut cut_points: Vec<f64> = vec![s];
    cut_points.extend(field.breakpoints.iter().copied().filter(|&b| b > s && b < t));
    cut_points.push(t);
    let mut steps = 0usize;
    let mut max_err: f64 = 0.0;
    for w in cut_points.windows(2) {
        let piece = field.piece_index(w[0]);
        let out = integrate_segment(field, &mut state.y, w[0], w[1], piece, cfg, &mut trace)?;
        steps += out.steps;
        max_err = max_err.max(out.max_err);
    }
    let endpoint = FlatState::point(&state.y, n);
    let jacobian = FlatState::jacobian(&state.y, n);
    if det(&jacobian).norm() < 1e-12 {
        return Err(Error::SingularJacobian);
    }
    Ok(FlowResult { endpoint, jacobian, s, t, steps_taken: steps, max_local_error_estimate: max_err })
}

/// Report from [`check_evolution_property`].
#[derive(Debug, Clone, Serialize)]
pub struct EvolutionReport {
    pub max_residual: f64,
    pub pass: bool,
    pub tolerance: f64,
}

/// Residual of phi_{s,t} = phi_{u,t} o phi_{s,u} over the given samples.
pub fn check_evolution_property(
    field: &HerglotzField,
    z_set: &[CVector],
    triples: &[(f64, f64, f64)],
    cfg: &IntegratorConfig,
    tol: f64,
) -> Result<EvolutionReport> {
    let mut max_residual: f64 = 0.0;
    for z in z_set {
        for &(s, u, t) in triples {
            if !(s <= u && u <= t) {
                return Err(Error::InvalidSpec(format!("triple ({s}, {u}, {t}) is not ordered")));
            }
            let direct = integrate_flow(field, z, s, t, cfg)?;
            let first = integrate_flow(field, z, s, u, cfg)?;
            let second = integrate_flow(field, &first.endpoint, u, t, cfg)?;
            let residual = (&second.endpoint - &direct.endpoint).map(|e| e.norm()).max();
            max_residual = max_residual.max(residual);
        }
    }
    Ok(EvolutionReport { max_residual, pass: max_residual <= tol, tolerance: tol })
}

/// Report from [`check_univalence`].
#[derive(Debug, Clone, Serialize)]
pub struct UnivalenceReport {
    pub collisions: usize,
    pub min_abs_det_jacobian: f64,
    pub pass: bool,
}

/// Flags probe pairs mapped closer than `collision_tol` and reports the
/// minimum |det J| seen (local injectivity surrogate).
pub fn check_univalence(
    field: &HerglotzField,
    s: f64,
    t: f64,
    probe_pairs: &[(CVector, CVector)],
    cfg: &IntegratorConfig,
    collision_tol: f64,
) -> Result<UnivalenceReport> {
    let mut collisions = 0usize;
    let mut min_det = f64::INFINITY;
    for (z, w) in probe_pairs {
        let fz = integrate_flow(field, z, s, t, cfg)?;
        let fw = integrate_flow(field, w, s, t, cfg)?;
        if (&fz.endpoint - &fw.endpoint).map(|e| e.norm()).max() < collision_tol {
            collisions += 1;
        }
        min_det = min_det.min(det(&fz.jacobian).norm()).min(det(&fw.jacobian).norm());
    }
    Ok(UnivalenceReport { collisions, min_abs_det_jacobian: min_det, pass: collisions == 0 })
}

/// Empirical density table for the L^d regularity bound.
#[derive(Debug, Clone, Serialize)]
pub struct RegularityReport {
    /// (u, t, density) per grid cell [u, t].
    pub table: Vec<(f64, f64, f64)>,
    pub linf: f64,
}

/// Per grid cell [u, t]: sup over z in K and grid s <= u of
/// d_M(phi_{s,t}(z), phi_{s,u}(z)) / (t - u).
pub fn estimate_regularity(
    field: &HerglotzField,
    sample_set: &[CVector],
    horizon: f64,
    grid_n: usize,
    cfg: &IntegratorConfig,
) -> Result<RegularityReport> {
    let times: Vec<f64> = (0..=grid_n).map(|i| horizon * i as f64 / grid_n as f64).collect();
    // positions[s_idx][i] = phi_{t_{s_idx}, t_i}(z) for the current z
    let mut table = vec![0.0f64; grid_n];
    for z in sample_set {
        for s_idx in 0..grid_n {
            let mut pos = z.clone();
            for i in s_idx..grid_n {
                let next = integrate_flow(field, &pos, times[i], times[i + 1], cfg)?;
                let d = kobayashi_distance(&field.domain, &next.endpoint, &pos)?;
                let density = d / (times[i + 1] - times[i]);
                if density > table[i] {
                    table[i] = density;
                }
                pos = next.endpoint;
            }
        }
    }
    let linf = table.iter().copied().fold(0.0, f64::max);
    let table = (0..grid_n).map(|i| (times[i], times[i + 1], table[i])).collect();
    Ok(RegularityReport { table, linf })
}
