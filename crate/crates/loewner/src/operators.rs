//! The Roper-Suffridge extension of disc chains to ball chains, the lifted
//! evolution family and Herglotz field, and Moebius conjugation normalizing
//! an evolution family to fix the origin.

use serde::Serialize;

use crate::chains::ChainHandle;
use crate::error::{Error, Result};
use crate::fields::HerglotzField;
use crate::flow::{integrate_flow, FlowResult, IntegratorConfig};
use crate::geometry::{mobius_map, Domain, MobiusParams};
use crate::linalg::{norm, CVector, Cpx};

/// Analytic continuation of sqrt(d(zeta)) along the straight segment from 0
/// to `target`, anchored at the principal square root at zeta = 0. The branch
/// is tracked by choosing, at each path node, the square root closer to the
/// previous value. Fails if |d| drops below 1e-12 on the path.
pub fn continue_sqrt<F>(derivative: F, target: Cpx, steps: usize) -> Result<Cpx>
where
    F: Fn(Cpx) -> Result<Cpx>,
{
    let steps = steps.clamp(1, 256);
    let d0 = derivative(Cpx::new(0.0, 0.0))?;
    if d0.norm() < 1e-12 {
        return Err(Error::BranchContinuationFailure);
    }
    let mut w = d0.sqrt();
    for j in 1..=steps {
        let zeta = target * Cpx::new(j as f64 / steps as f64, 0.0);
        let d = derivative(zeta)?;
        if d.norm() < 1e-12 {
            return Err(Error::BranchContinuationFailure);
        }
        let p = d.sqrt();
        w = if (p - w).norm() <= (-p - w).norm() { p } else { -p };
    }
    Ok(w)
}

/// The static Roper-Suffridge operator
/// Phi_n(f)(z) = (f(z_1), z~ sqrt(f'(z_1))) for an analytic disc map.
pub fn roper_suffridge_static<F, D>(
    f: F,
    f_deriv: D,
    z: &CVector,
    path_steps: usize,
) -> Result<CVector>
where
    F: Fn(Cpx) -> Result<Cpx>,
    D: Fn(Cpx) -> Result<Cpx>,
{
    let n = z.len();
    if n < 2 {
        return Err(Error::InvalidSpec("target dimension must be >= 2".into()));
    }
    if norm(z) >= 1.0 {
        return Err(Error::PointOutsideDomain);
    }
    let z1 = z[0];
    let root = continue_sqrt(&f_deriv, z1, path_steps)?;
    let mut out = CVector::zeros(n);
    out[0] = f(z1)?;
    for j in 1..n {
        out[j] = z[j] * root;
    }
    Ok(out)
}

/// A disc chain lifted to the unit ball through the Roper-Suffridge
/// construction F_s(z) = (f_s(z_1), z~ e^{s/2} sqrt(f_s'(z_1))).
#[derive(Debug, Clone)]
pub struct LiftedChain {
    pub disc_chain: ChainHandle,
    pub target_dimension: usize,
    /// nodes used for square-root branch continuation along [0, z_1]
    pub path_steps: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct ArgHypothesisReport {
    /// (s, t, arg) samples violating the pi/2 bound; evaluation proceeds
    /// regardless, so these are warnings, not errors
    pub violations: Vec<(f64, f64, f64)>,
}

impl LiftedChain {
    pub fn new(disc_chain: ChainHandle, target_dimension: usize) -> Result<Self> {
        if disc_chain.field.domain != Domain::UnitDisc {
            return Err(Error::InvalidSpec("the lifted chain starts from a disc chain".into()));
        }
        if target_dimension < 2 {
            return Err(Error::InvalidSpec("target dimension must be >= 2".into()));
        }
        Ok(LiftedChain { disc_chain, target_dimension, path_steps: 24 })
    }

    fn disc_derivative(&self, s: f64, t: f64, zeta: Cpx) -> Result<Cpx> {
        let r: FlowResult =
            integrate_flow(&self.disc_chain.field, &CVector::from_element(1, zeta), s, t, &self.disc_chain.cfg)?;
        Ok(r.jacobian[(0, 0)])
    }

    /// F_s(z): the lifted chain evaluation on the ball.
    pub fn roper_suffridge_eval(&self, s: f64, z: &CVector) -> Result<CVector> {
        if z.len() != self.target_dimension {
            return Err(Error::DimensionMismatch { expected: self.target_dimension, got: z.len() });
        }
        if norm(z) >= 1.0 {
            return Err(Error::PointOutsideDomain);
        }
        let horizon = self.disc_chain.horizon;
        let z1 = z[0];
        let value = self.disc_chain.eval(s, &CVector::from_element(1, z1))?[0];
        let root = continue_sqrt(|zeta| self.disc_derivative(s, horizon, zeta), z1, self.path_steps)?;
        let scale = Cpx::new((s / 2.0).exp(), 0.0);
        let mut out = CVector::zeros(self.target_dimension);
        out[0] = value;
        for j in 1..self.target_dimension {
            out[j] = z[j] * scale * root;
        }
        Ok(out)
    }

    /// Phi_{s,t}(z) = (phi_{s,t}(z_1), z~ e^{(s-t)/2} sqrt(phi'_{s,t}(z_1))).
    /// The result must stay inside the ball (Schwarz-Pick); leaving it flags
    /// an integrator failure.
    pub fn lifted_evolution_eval(&self, s: f64, t: f64, z: &CVector) -> Result<CVector> {
        if z.len() != self.target_dimension {
            return Err(Error::DimensionMismatch { expected: self.target_dimension, got: z.len() });
        }
        if norm(z) >= 1.0 {
            return Err(Error::PointOutsideDomain);
        }
        let z1 = z[0];
        let value =
            integrate_flow(&self.disc_chain.field, &CVector::from_element(1, z1), s, t, &self.disc_chain.cfg)?
                .endpoint[0];
        let root = continue_sqrt(|zeta| self.disc_derivative(s, t, zeta), z1, self.path_steps)?;
        let scale = Cpx::new(((s - t) / 2.0).exp(), 0.0);
        let mut out = CVector::zeros(self.target_dimension);
        out[0] = value;
        for j in 1..self.target_dimension {
            out[j] = z[j] * scale * root;
        }
        let n_out = norm(&out);
        if n_out >= 1.0 + 1e-9 {
            return Err(Error::SchwarzPickViolation { norm: n_out });
        }
        Ok(out)
    }

    /// Samples the branch hypotheses |arg f_s'(0)| < pi/2 and
    /// |arg(f_s'(0) / f_t'(phi_{s,t}(0)))| < pi/2 on an (s, t) grid.
    pub fn check_arg_hypothesis(&self, grid: usize) -> Result<ArgHypothesisReport> {
        let horizon = self.disc_chain.horizon;
        let half_pi = std::f64::consts::FRAC_PI_2;
        let mut violations = Vec::new();
        for i in 0..=grid {
            let s = horizon * i as f64 / grid as f64;
            let ds0 = self.disc_derivative(s, horizon, Cpx::new(0.0, 0.0))?;
            if ds0.arg().abs() >= half_pi {
                violations.push((s, horizon, ds0.arg()));
            }
            for j in i..=grid {
                let t = horizon * j as f64 / grid as f64;
                let mid = integrate_flow(
                    &self.disc_chain.field,
                    &CVector::from_element(1, Cpx::new(0.0, 0.0)),
                    s,
                    t,
                    &self.disc_chain.cfg,
                )?
                .endpoint[0];
                let dt_mid = self.disc_derivative(t, horizon, mid)?;
                if dt_mid.norm() < 1e-12 {
                    return Err(Error::BranchContinuationFailure);
                }
                let ratio = ds0 / dt_mid;
                if ratio.arg().abs() >= half_pi {
                    violations.push((s, t, ratio.arg()));
                }
            }
        }
        Ok(ArgHypothesisReport { violations })
    }
}

/// The lifted Herglotz field
/// G(z, t) = (g(z_1, t), z~/2 (-1 + g'(z_1, t))) on the ball.
pub fn lifted_herglotz_eval(
    disc_field: &HerglotzField,
    z: &CVector,
    t: f64,
) -> Result<CVector> {
    let n = z.len();
    if n < 2 {
        return Err(Error::InvalidSpec("lifted field lives in dimension >= 2".into()));
    }
    if norm(z) >= 1.0 {
        return Err(Error::PointOutsideDomain);
    }
    let z1 = CVector::from_element(1, z[0]);
    let g = disc_field.evaluate(&z1, t)?[0];
    let gp = disc_field.jacobian(&z1, t)?[(0, 0)];
    let factor = (Cpx::new(-1.0, 0.0) + gp) * Cpx::new(0.5, 0.0);
    let mut out = CVector::zeros(n);
    out[0] = g;
    for j in 1..n {
        out[j] = z[j] * factor;
    }
    Ok(out)
}

/// Builds the lifted field as a ball [`HerglotzField`] whose flow reproduces
/// the lifted evolution family.
pub fn lifted_herglotz_field(disc_field: &HerglotzField, n: usize) -> Result<HerglotzField> {
    if disc_field.domain != Domain::UnitDisc {
        return Err(Error::InvalidSpec("lift starts from a disc field".into()));
    }
    let inner = disc_field.clone();
    HerglotzField::custom(
        Domain::UnitBall { n },
        disc_field.breakpoints.clone(),
        move |z, t| lifted_herglotz_eval(&inner, z, t),
    )
}

/// Conjugated evolution family phi_{a(t)} o psi_{s,t} o phi_{a(s)} with
/// a(t) = psi_{0,t}(0), which fixes the origin for all s <= t.
#[derive(Debug, Clone)]
pub struct NormalizedFlow {
    pub field: HerglotzField,
    pub horizon: f64,
    pub cfg: IntegratorConfig,
}

impl NormalizedFlow {
    pub fn new(field: HerglotzField, horizon: f64, cfg: IntegratorConfig) -> Result<Self> {
        match field.domain {
            Domain::UnitBall { .. } | Domain::UnitDisc => {}
            _ => return Err(Error::InvalidSpec("normalization is defined on disc and ball".into())),
        }
        Ok(NormalizedFlow { field, horizon, cfg })
    }

    fn drift(&self, t: f64) -> Result<MobiusParams> {
        let n = self.field.domain.dimension();
        let zero = CVector::zeros(n);
        let a = integrate_flow(&self.field, &zero, 0.0, t, &self.cfg)?.endpoint;
        let params = MobiusParams::new(a.clone())?;
        // runtime check of the involution identities instead of assuming them
        let img = mobius_map(&params, &zero)?;
        let back = mobius_map(&params, &a)?;
        if norm(&(&img - &a)) > 1e-9 || norm(&back) > 1e-9 {
            return Err(Error::Inconclusive("Moebius involution check failed".into()));
        }
        Ok(params)
    }

    /// The conjugated family evaluated at (s, t, z).
    pub fn eval(&self, s: f64, t: f64, z: &CVector) -> Result<CVector> {
        if !(0.0 <= s && s <= t && t <= self.horizon) {
            return Err(Error::InvalidSpec(format!("need 0 <= s <= t <= T, got ({s}, {t})")));
        }
        let phi_as = self.drift(s)?;
        let phi_at = self.drift(t)?;
        let moved = mobius_map(&phi_as, z)?;
        let flowed = integrate_flow(&self.field, &moved, s, t, &self.cfg)?.endpoint;
        mobius_map(&phi_at, &flowed)
    }
}
