//! Finite-horizon Loewner chains f_s := phi_{s,T}, the association identity,
//! the Loewner-Kufarev PDE residual, winding-number membership tests and
//! Newton-based inverse-map convergence checks.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::fields::HerglotzField;
use crate::flow::{integrate_flow, FlowResult, IntegratorConfig};
use crate::linalg::{CVector, Cpx};

/// A finite-horizon Loewner chain: f_s := phi_{s,T} for s in [0, T].
///
/// On [0, T] the family (phi_{s,T}) is an exact associated chain with range
/// inside the domain itself, so every identity below is checkable without any
/// abstract range construction.
#[derive(Debug, Clone)]
pub struct ChainHandle {
    pub field: HerglotzField,
    pub horizon: f64,
    pub cfg: IntegratorConfig,
}

impl ChainHandle {
    pub fn new(field: HerglotzField, horizon: f64, cfg: IntegratorConfig) -> Result<Self> {
        if horizon <= 0.0 {
            return Err(Error::InvalidSpec("chain horizon must be positive".into()));
        }
        Ok(ChainHandle { field, horizon, cfg })
    }

    /// f_s(z) together with (df_s)_z.
    pub fn eval_with_jacobian(&self, s: f64, z: &CVector) -> Result<FlowResult> {
        if s > self.horizon {
            return Err(Error::HorizonExceeded { s, horizon: self.horizon });
        }
        integrate_flow(&self.field, z, s, self.horizon, &self.cfg)
    }

    pub fn eval(&self, s: f64, z: &CVector) -> Result<CVector> {
        Ok(self.eval_with_jacobian(s, z)?.endpoint)
    }

    /// The evolution family phi_{s,t} underlying the chain.
    pub fn evolution(&self, s: f64, t: f64, z: &CVector) -> Result<FlowResult> {
        if t > self.horizon {
            return Err(Error::HorizonExceeded { s: t, horizon: self.horizon });
        }
        integrate_flow(&self.field, z, s, t, &self.cfg)
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ResidualReport {
    pub max_residual: f64,
    pub pass: bool,
    pub tolerance: f64,
}

/// Residual of the association identity f_s = f_t o phi_{s,t}.
pub fn check_association(
    chain: &ChainHandle,
    pairs: &[(f64, f64)],
    z_set: &[CVector],
    tol: f64,
) -> Result<ResidualReport> {
    let mut max_residual: f64 = 0.0;
    for &(s, t) in pairs {
        if !(s <= t && t <= chain.horizon) {
            return Err(Error::InvalidSpec(format!("need s <= t <= T, got ({s}, {t})")));
        }
        for z in z_set {
            let lhs = chain.eval(s, z)?;
            let mid = chain.evolution(s, t, z)?.endpoint;
            let rhs = chain.eval(t, &mid)?;
            let residual = (&lhs - &rhs).map(|e| e.norm()).max();
            max_residual = max_residual.max(residual);
        }
    }
    Ok(ResidualReport { max_residual, pass: max_residual <= tol, tolerance: tol })
}

/// Default central-difference step in s for the PDE residual.
pub const DEFAULT_H_S: f64 = 1e-4;

/// Residual of the Loewner-Kufarev PDE
/// d f_s / d s + (df_s)_z G(z, s) = 0, with d/ds by central differences.
pub fn check_lk_pde(
    chain: &ChainHandle,
    s_grid: &[f64],
    z_set: &[CVector],
    h_s: f64,
    tol: f64,
) -> Result<ResidualReport> {
    let mut max_residual: f64 = 0.0;
    for &s in s_grid {
        if s - h_s < 0.0 || s + h_s > chain.horizon {
            return Err(Error::InvalidSpec(format!("s = {s} too close to the horizon ends")));
        }
        if chain.field.breakpoints.iter().any(|&b| (b - s).abs() < h_s) {
            return Err(Error::BreakpointTooClose { s });
        }
        for z in z_set {
            let plus = chain.eval(s + h_s, z)?;
            let minus = chain.eval(s - h_s, z)?;
            let ds = (&plus - &minus).map(|e| e / Cpx::new(2.0 * h_s, 0.0));
            let here = chain.eval_with_jacobian(s, z)?;
            let g = chain.field.evaluate(z, s)?;
            let residual = (ds + &here.jacobian * g).map(|e| e.norm()).max();
            max_residual = max_residual.max(residual);
        }
    }
    Ok(ResidualReport { max_residual, pass: max_residual <= tol, tolerance: tol })
}

/// Winding number of a closed trace around u0, by the trapezoid rule applied
/// to the integral of dw / (w - u0) over the image polygon.
pub fn winding_number(trace: &[Cpx], u0: Cpx) -> Result<i64> {
    if trace.len() < 3 {
        return Err(Error::InvalidSpec("trace needs at least 3 nodes".into()));
    }
    if trace.iter().any(|w| (w - u0).norm() < 1e-9) {
        return Err(Error::CurveTooClose);
    }
    let mut integral = Cpx::new(0.0, 0.0);
    let m = trace.len();
    for j in 0..m {
        let w0 = trace[j] - u0;
        let w1 = trace[(j + 1) % m] - u0;
        let dw = w1 - w0;
        integral += (w0.inv() + w1.inv()) * dw * Cpx::new(0.5, 0.0);
    }
    let winding = integral.im / std::f64::consts::TAU;
    let rounded = winding.round();
    if (winding - rounded).abs() > 0.2 {
        return Err(Error::NonIntegerWinding { value: winding });
    }
    Ok(rounded as i64)
}

/// Trace f on the circle |z - center| = radius and count preimages of u0 in
/// the enclosed disc via the argument principle. A count >= 1 certifies
/// membership u0 in f(B(center, radius)).
pub fn rouche_membership<F>(f: F, center: Cpx, radius: f64, nodes: usize, u0: Cpx) -> Result<i64>
where
    F: Fn(Cpx) -> Result<Cpx>,
{
    if nodes < 512 {
        return Err(Error::InvalidSpec("at least 512 trace nodes required".into()));
    }
    let mut trace = Vec::with_capacity(nodes);
    for k in 0..nodes {
        let theta = k as f64 / nodes as f64 * std::f64::consts::TAU;
        trace.push(f(center + Cpx::from_polar(radius, theta))?);
    }
    winding_number(&trace, u0)
}

/// A holomorphic self-map of the disc with an evaluable derivative.
pub trait DiscMap {
    fn eval(&self, z: Cpx) -> Result<Cpx>;
    fn deriv(&self, z: Cpx) -> Result<Cpx>;
}

/// Closure-backed disc map.
pub struct FnDiscMap<F, D> {
    pub f: F,
    pub df: D,
}

impl<F, D> DiscMap for FnDiscMap<F, D>
where
    F: Fn(Cpx) -> Cpx,
    D: Fn(Cpx) -> Cpx,
{
    fn eval(&self, z: Cpx) -> Result<Cpx> {
        Ok((self.f)(z))
    }
    fn deriv(&self, z: Cpx) -> Result<Cpx> {
        Ok((self.df)(z))
    }
}

/// A chain evaluation f_s viewed as a disc map.
pub struct ChainDiscMap<'a> {
    pub chain: &'a ChainHandle,
    pub s: f64,
}

impl DiscMap for ChainDiscMap<'_> {
    fn eval(&self, z: Cpx) -> Result<Cpx> {
        Ok(self.chain.eval(self.s, &CVector::from_element(1, z))?[0])
    }
    fn deriv(&self, z: Cpx) -> Result<Cpx> {
        Ok(self.chain.eval_with_jacobian(self.s, &CVector::from_element(1, z))?.jacobian[(0, 0)])
    }
}

/// Damped Newton solve of f(z) = w inside the unit disc.
pub fn newton_invert(map: &dyn DiscMap, w: Cpx, seed: Cpx, max_iter: usize) -> Option<Cpx> {
    let mut z = seed;
    let mut residual = match map.eval(z) {
        Ok(fz) => (fz - w).norm(),
        Err(_) => return None,
    };
    for _ in 0..max_iter {
        if residual < 1e-13 {
            return Some(z);
        }
        let fz = map.eval(z).ok()?;
        let dfz = map.deriv(z).ok()?;
        if dfz.norm() < 1e-14 {
            return None;
        }
        let full = (fz - w) / dfz;
        let mut lambda = 1.0;
        let mut accepted = false;
        for _ in 0..30 {
            let cand = z - full * Cpx::new(lambda, 0.0);
            if cand.norm() < 1.0 - 1e-12 {
                if let Ok(fc) = map.eval(cand) {
                    let r = (fc - w).norm();
                    if r < residual {
                        z = cand;
                        residual = r;
                        accepted = true;
                        break;
                    }
                }
            }
            lambda *= 0.5;
        }
        if !accepted {
            return None;
        }
    }
    if residual < 1e-10 {
        Some(z)
    } else {
        None
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct InverseConvergenceReport {
    /// sup over the target set of |f_k^{-1}(w) - f_limit^{-1}(w)|, per k.
    pub sup_errors: Vec<f64>,
    /// final sup error at most a tenth of the first one
    pub decayed: bool,
}

/// For each target w, solves f_k(z) = w by damped Newton seeded at the limit
/// inverse (itself obtained by Newton seeded at 0).
pub fn check_inverse_convergence(
    sequence: &[&dyn DiscMap],
    limit: &dyn DiscMap,
    targets: &[Cpx],
) -> Result<InverseConvergenceReport> {
    let mut sup_errors = Vec::with_capacity(sequence.len());
    for (k, map) in sequence.iter().enumerate() {
        let mut sup: f64 = 0.0;
        for (index, &w) in targets.iter().enumerate() {
            let z_limit = newton_invert(limit, w, Cpx::new(0.0, 0.0), 100)
                .ok_or(Error::NewtonDivergence { index, k })?;
            let z_k = newton_invert(*map, w, z_limit, 100)
                .ok_or(Error::NewtonDivergence { index, k })?;
            sup = sup.max((z_k - z_limit).norm());
        }
        sup_errors.push(sup);
    }
    let decayed = match (sup_errors.first(), sup_errors.last()) {
        (Some(&first), Some(&last)) if sequence.len() > 1 => {
            last < first / 10.0 || last < 1e-12
        }
        _ => true,
    };
    Ok(InverseConvergenceReport { sup_errors, decayed })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::{HerglotzField, RationalFn};
    use crate::geometry::Domain;
    use crate::linalg::{c, cvec1, CMatrix};
    use approx::assert_relative_eq;

    fn radial_chain(coeff: Cpx, horizon: f64) -> ChainHandle {
        let field =
            HerglotzField::radial(Domain::UnitDisc, CMatrix::from_element(1, 1, coeff)).unwrap();
        ChainHandle::new(field, horizon, IntegratorConfig::strict()).unwrap()
    }

    #[test]
    fn chain_at_horizon_is_identity() {
        let chain = radial_chain(c(-1.0, 0.0), 1.0);
        let v = chain.eval(1.0, &cvec1(c(0.5, 0.0))).unwrap();
        assert!((v[0] - c(0.5, 0.0)).norm() < 1e-10);
    }

    #[test]
    fn radial_chain_closed_form() {
        let chain = radial_chain(c(-1.0, 0.0), 1.0);
        let v = chain.eval(0.0, &cvec1(c(0.5, 0.0))).unwrap();
        assert_relative_eq!(v[0].re, 0.5 * (-1f64).exp(), epsilon = 1e-10);
    }

    #[test]
    fn rotation_chain_closed_form() {
        let chain = radial_chain(c(0.0, 1.0), std::f64::consts::PI);
        let v = chain.eval(0.0, &cvec1(c(0.5, 0.0))).unwrap();
        assert!((v[0] - c(-0.5, 0.0)).norm() < 1e-9);
    }

    #[test]
    fn horizon_exceeded_is_an_error() {
        let chain = radial_chain(c(-1.0, 0.0), 1.0);
        assert!(matches!(
            chain.eval(1.5, &cvec1(c(0.1, 0.0))),
            Err(Error::HorizonExceeded { .. })
        ));
    }

    #[test]
    fn association_radial() {
        let chain = radial_chain(c(-1.0, 0.0), 1.0);
        let report =
            check_association(&chain, &[(0.0, 0.5)], &[cvec1(c(0.3, 0.0))], 1e-9).unwrap();
        assert!(report.pass, "residual {}", report.max_residual);
        // both sides equal e^{-1} * 0.3 in closed form
        let lhs = chain.eval(0.0, &cvec1(c(0.3, 0.0))).unwrap();
        assert_relative_eq!(lhs[0].re, 0.3 * (-1f64).exp(), epsilon = 1e-10);
    }

    #[test]
    fn association_equal_times_is_exact() {
        let chain = radial_chain(c(-1.0, 0.0), 2.0);
        let report =
            check_association(&chain, &[(0.7, 0.7)], &[cvec1(c(0.3, 0.2))], 1e-12).unwrap();
        assert!(report.pass);
    }

    #[test]
    fn association_berkson_porta() {
        let field = HerglotzField::berkson_porta(c(0.0, 0.0), RationalFn::cayley()).unwrap();
        let chain = ChainHandle::new(field, 2.0, IntegratorConfig::strict()).unwrap();
        let pairs = vec![(0.0, 0.5), (0.3, 1.1), (0.9, 2.0)];
        let z_set = vec![cvec1(c(0.3, 0.0)), cvec1(c(-0.2, 0.4)), cvec1(c(0.0, -0.5))];
        let report = check_association(&chain, &pairs, &z_set, 1e-7).unwrap();
        assert!(report.pass, "residual {}", report.max_residual);
    }

    #[test]
    fn lk_pde_radial_and_rotation() {
        for coeff in [c(-1.0, 0.0), c(0.0, 1.0)] {
            let chain = radial_chain(coeff, 1.0);
            let report =
                check_lk_pde(&chain, &[0.5], &[cvec1(c(0.3, 0.0)), cvec1(c(0.0, 0.4))], DEFAULT_H_S, 1e-6)
                    .unwrap();
            assert!(report.pass, "residual {}", report.max_residual);
        }
    }

    #[test]
    fn lk_pde_zero_field() {
        let field = HerglotzField::custom(Domain::UnitDisc, vec![], |z, _| {
            Ok(CVector::zeros(z.len()))
        })
        .unwrap();
        let chain = ChainHandle::new(field, 1.0, IntegratorConfig::strict()).unwrap();
        let report = check_lk_pde(&chain, &[0.5], &[cvec1(c(0.3, 0.0))], DEFAULT_H_S, 1e-10).unwrap();
        assert!(report.pass);
    }

    #[test]
    fn lk_pde_rejects_breakpoint_grid_points() {
        use crate::fields::PiecewiseConstant;
        let field = HerglotzField::ball_diagonal(
            1,
            vec![PiecewiseConstant { values: vec![c(0.0, 1.0), c(-1.0, 0.0)] }],
            vec![0.5],
        )
        .unwrap();
        let chain = ChainHandle::new(field, 1.0, IntegratorConfig::default()).unwrap();
        assert!(matches!(
            check_lk_pde(&chain, &[0.50004], &[cvec1(c(0.3, 0.0))], DEFAULT_H_S, 1e-5),
            Err(Error::BreakpointTooClose { .. })
        ));
    }

    #[test]
    fn winding_of_identity_circle() {
        let id = |z: Cpx| -> Result<Cpx> { Ok(z) };
        assert_eq!(rouche_membership(id, c(0.0, 0.0), 0.5, 512, c(0.2, 0.0)).unwrap(), 1);
        assert_eq!(rouche_membership(id, c(0.0, 0.0), 0.5, 512, c(0.7, 0.0)).unwrap(), 0);
    }

    #[test]
    fn winding_counts_multiplicity() {
        let sq = |z: Cpx| -> Result<Cpx> { Ok(z * z) };
        let count = rouche_membership(sq, c(0.0, 0.0), 0.5, 1024, c(0.01, 0.0)).unwrap();
        assert_eq!(count, 2);
        // brute-force root count of z^2 = 0.01 inside |z| < 0.5: both roots +-0.1
        assert!(0.1 < 0.5);
    }

    #[test]
    fn winding_rejects_points_on_curve() {
        let id = |z: Cpx| -> Result<Cpx> { Ok(z) };
        assert!(matches!(
            rouche_membership(id, c(0.0, 0.0), 0.5, 512, c(0.5, 0.0)),
            Err(Error::CurveTooClose)
        ));
    }

    #[test]
    fn image_monotonicity_via_winding() {
        // LC2 on the disc: f_s(z) lies in f_t(D_r) for s <= t
        let chain = radial_chain(c(-1.0, 0.0), 1.0);
        let r = 0.95;
        for &z0 in &[c(0.3, 0.0), c(0.0, 0.5), c(-0.4, -0.2)] {
            let target = chain.eval(0.0, &cvec1(z0)).unwrap()[0];
            for &t in &[0.3, 0.6, 1.0] {
                let f_t = |z: Cpx| chain.eval(t, &cvec1(z)).map(|v| v[0]);
                let count = rouche_membership(f_t, c(0.0, 0.0), r, 512, target).unwrap();
                assert!(count >= 1, "f_0({z0}) not in f_{t}(D_r)");
            }
        }
    }

    #[test]
    fn lk_pde_residual_second_order_in_h() {
        let field = HerglotzField::berkson_porta(c(0.0, 0.0), RationalFn::cayley()).unwrap();
        let chain = ChainHandle::new(field, 1.0, IntegratorConfig::strict()).unwrap();
        let z = vec![cvec1(c(0.35, 0.2))];
        let r1 = check_lk_pde(&chain, &[0.5], &z, 0.05, 1.0).unwrap().max_residual;
        let r2 = check_lk_pde(&chain, &[0.5], &z, 0.025, 1.0).unwrap().max_residual;
        assert!(r1 / r2 > 3.0, "ratio {}", r1 / r2);
    }

    #[test]
    fn inverse_convergence_scaling_family() {
        let ks = [10usize, 100, 1000];
        let maps: Vec<Box<dyn DiscMap>> = ks
            .iter()
            .map(|&k| {
                let a = 1.0 - 1.0 / k as f64;
                Box::new(FnDiscMap {
                    f: move |z: Cpx| z * Cpx::new(a, 0.0),
                    df: move |_z: Cpx| Cpx::new(a, 0.0),
                }) as Box<dyn DiscMap>
            })
            .collect();
        let refs: Vec<&dyn DiscMap> = maps.iter().map(|b| b.as_ref()).collect();
        let id = FnDiscMap { f: |z: Cpx| z, df: |_z: Cpx| Cpx::new(1.0, 0.0) };
        let targets: Vec<Cpx> =
            (0..16).map(|j| Cpx::from_polar(0.3, j as f64 * std::f64::consts::TAU / 16.0)).collect();
        let report = check_inverse_convergence(&refs, &id, &targets).unwrap();
        for (i, &k) in ks.iter().enumerate() {
            let expected = 0.3 / (k as f64 - 1.0);
            assert!((report.sup_errors[i] - expected).abs() < 1e-9, "k = {k}");
        }
        assert!(report.decayed);
    }

    #[test]
    fn inverse_convergence_constant_sequence() {
        let id = FnDiscMap { f: |z: Cpx| z, df: |_z: Cpx| Cpx::new(1.0, 0.0) };
        let refs: Vec<&dyn DiscMap> = vec![&id, &id];
        let targets = vec![c(0.1, 0.1), c(-0.2, 0.0)];
        let report = check_inverse_convergence(&refs, &id, &targets).unwrap();
        assert!(report.sup_errors.iter().all(|&e| e < 1e-12));
        assert!(report.decayed);
    }

    #[test]
    fn inverse_convergence_quadratic_family() {
        let ks = [4usize, 16, 64, 256];
        let maps: Vec<Box<dyn DiscMap>> = ks
            .iter()
            .map(|&k| {
                let kk = k as f64;
                Box::new(FnDiscMap {
                    f: move |z: Cpx| z + z * z / Cpx::new(kk, 0.0),
                    df: move |z: Cpx| Cpx::new(1.0, 0.0) + z * Cpx::new(2.0 / kk, 0.0),
                }) as Box<dyn DiscMap>
            })
            .collect();
        let refs: Vec<&dyn DiscMap> = maps.iter().map(|b| b.as_ref()).collect();
        let id = FnDiscMap { f: |z: Cpx| z, df: |_z: Cpx| Cpx::new(1.0, 0.0) };
        let targets: Vec<Cpx> =
            (0..16).map(|j| Cpx::from_polar(0.2, j as f64 * 0.4)).collect();
        let report = check_inverse_convergence(&refs, &id, &targets).unwrap();
        for (i, &k) in ks.iter().enumerate() {
            // |f_k^{-1}(w) - w| <= |w|^2/k + O(1/k^2) <= 0.05/k at |w| = 0.2
            assert!(report.sup_errors[i] <= 0.05 / k as f64 + 1e-9, "k = {k}");
        }
        assert!(report.decayed);
    }
}
