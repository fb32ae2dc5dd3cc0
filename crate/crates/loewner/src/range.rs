//! beta limits of the Kobayashi metric along evolution families, zero-set
//! corank estimation, and Loewner-range classification.
//!
//! beta is a t -> infinity limit; the probe reports the value at t_max with a
//! convergence flag. By the contraction property the reported value is always
//! an upper bound on the true limit.

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::fields::HerglotzField;
use crate::flow::{integrate_flow, IntegratorConfig};
use crate::geometry::{kobayashi_metric, Domain};
use crate::linalg::{norm, CMatrix, CVector, Cpx};

/// Thresholds and horizons driving the classification.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct RangeThresholds {
    pub t_max: f64,
    pub grid_levels: usize,
    pub zero_threshold: f64,
    pub tol_beta: f64,
}

impl Default for RangeThresholds {
    fn default() -> Self {
        RangeThresholds { t_max: 40.0, grid_levels: 12, zero_threshold: 1e-3, tol_beta: 1e-4 }
    }
}

/// One beta probe: the sampled values of kappa(phi_{s,t}(z); J(t) v).
#[derive(Debug, Clone, Serialize)]
pub struct BetaProbe {
    pub z: Vec<(f64, f64)>,
    pub v: Vec<(f64, f64)>,
    pub s: f64,
    pub values: Vec<(f64, f64)>,
    pub beta_estimate: f64,
    pub converged: bool,
}

/// Integrates the flow and Jacobian on a geometric time grid and tracks the
/// pushed metric kappa(phi_{s,t_k}(z); (d phi_{s,t_k})_z v).
pub fn compute_beta(
    field: &HerglotzField,
    z: &CVector,
    v: &CVector,
    s: f64,
    thresholds: &RangeThresholds,
    cfg: &IntegratorConfig,
) -> Result<BetaProbe> {
    if norm(v) == 0.0 {
        return Err(Error::InvalidSpec("probe direction must be nonzero".into()));
    }
    let levels = thresholds.grid_levels.max(2);
    let span = thresholds.t_max - s;
    if span <= 0.0 {
        return Err(Error::InvalidSpec("t_max must exceed s".into()));
    }
    let denom = 2f64.powi(levels as i32) - 1.0;
    let mut values = Vec::with_capacity(levels);
    let mut point = z.clone();
    let mut jac = CMatrix::identity(z.len(), z.len());
    let mut t_prev = s;
    for k in 1..=levels {
        let t_k = s + span * (2f64.powi(k as i32) - 1.0) / denom;
        let step = integrate_flow(field, &point, t_prev, t_k, cfg)?;
        jac = &step.jacobian * &jac;
        point = step.endpoint;
        t_prev = t_k;
        let pushed = kobayashi_metric(&field.domain, &point, &(&jac * v))?;
        values.push((t_k, pushed));
    }
    let last = values[values.len() - 1].1;
    let prev = values[values.len() - 2].1;
    let converged = (last - prev).abs() < thresholds.tol_beta * (1.0 + last);
    let dump = |v: &CVector| v.iter().map(|c| (c.re, c.im)).collect();
    Ok(BetaProbe { z: dump(z), v: dump(v), s, values, beta_estimate: last, converged })
}

#[derive(Debug, Clone, Serialize)]
pub struct CorankReport {
    pub corank: usize,
    pub probes: Vec<BetaProbe>,
}

fn unit_random_vector(n: usize, rng: &mut ChaCha8Rng) -> CVector {
    loop {
        let v = CVector::from_fn(n, |_, _| {
            Cpx::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
        });
        let nv = norm(&v);
        if nv > 1e-3 {
            return v.map(|e| e / Cpx::new(nv, 0.0));
        }
    }
}

/// Corank of {v : beta = 0} at a base point: beta along an orthonormal basis
/// plus 2n random unit directions. A basis direction counts as zero only if
/// beta stays below threshold for random perturbations within the candidate
/// zero subspace.
pub fn beta_zero_corank(
    field: &HerglotzField,
    z: &CVector,
    s: f64,
    thresholds: &RangeThresholds,
    cfg: &IntegratorConfig,
    rng: &mut ChaCha8Rng,
) -> Result<CorankReport> {
    let n = field.domain.dimension();
    let mut probes = Vec::new();
    let mut zero_basis: Vec<CVector> = Vec::new();
    for j in 0..n {
        let mut v = CVector::zeros(n);
        v[j] = Cpx::new(1.0, 0.0);
        let probe = compute_beta(field, z, &v, s, thresholds, cfg)?;
        if !probe.converged {
            probes.push(probe);
            return Err(Error::NotConverged);
        }
        if probe.beta_estimate < thresholds.zero_threshold {
            zero_basis.push(v);
        }
        probes.push(probe);
    }
    // cross-check with random directions: a random unit vector with a
    // component outside the candidate zero subspace must not read as zero
    for _ in 0..2 * n {
        let v = unit_random_vector(n, rng);
        let probe = compute_beta(field, z, &v, s, thresholds, cfg)?;
        if !probe.converged {
            probes.push(probe);
            return Err(Error::NotConverged);
        }
        probes.push(probe);
    }
    // perturbation pass inside the candidate zero subspace
    let mut corank = 0usize;
    if !zero_basis.is_empty() {
        corank = zero_basis.len();
        for _ in 0..4 {
            let mut v = CVector::zeros(n);
            for b in &zero_basis {
                let coeff = Cpx::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
                v += b.map(|e| e * coeff);
            }
            let nv = norm(&v);
            if nv < 1e-3 {
                continue;
            }
            let v = v.map(|e| e / Cpx::new(nv, 0.0));
            let probe = compute_beta(field, z, &v, s, thresholds, cfg)?;
            let zero = probe.beta_estimate < thresholds.zero_threshold;
            probes.push(probe);
            if !zero {
                return Err(Error::Inconclusive(
                    "candidate zero subspace fails under perturbation".into(),
                ));
            }
        }
    }
    Ok(CorankReport { corank, probes })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum RangeClass {
    Disc,
    Plane,
    BallBiholomorphic,
    CylinderBundle,
    Inconclusive,
}

#[derive(Debug, Clone, Serialize)]
pub struct RangeReport {
    pub domain: Domain,
    pub classification: RangeClass,
    pub zero_corank: usize,
    pub probes: Vec<BetaProbe>,
    pub thresholds: RangeThresholds,
    /// corank agreement across all probed base points and s values
    pub consistent: bool,
}

/// Classifies the Loewner range from the beta zero-set corank.
///
/// Unit disc: corank 0 -> Disc, corank 1 -> Plane. Unit ball: corank 0 ->
/// biholomorphic to the ball, corank 1 -> a cylinder bundle (B^{n-1} x C),
/// corank >= 2 -> Inconclusive. Other domains are refused.
pub fn classify_range(
    field: &HerglotzField,
    s_values: &[f64],
    base_points: &[CVector],
    thresholds: &RangeThresholds,
    cfg: &IntegratorConfig,
    rng: &mut ChaCha8Rng,
) -> Result<RangeReport> {
    match field.domain {
        Domain::UnitDisc | Domain::UnitBall { .. } => {}
        _ => {
            return Err(Error::InvalidSpec(
                "range classification is defined on the unit disc and unit ball only".into(),
            ))
        }
    }
    let mut coranks = Vec::new();
    let mut probes = Vec::new();
    for z in base_points {
        for &s in s_values {
            match beta_zero_corank(field, z, s, thresholds, cfg, rng) {
                Ok(mut report) => {
                    coranks.push(report.corank);
                    probes.append(&mut report.probes);
                }
                Err(Error::NotConverged) | Err(Error::Inconclusive(_)) => {
                    return Ok(RangeReport {
                        domain: field.domain,
                        classification: RangeClass::Inconclusive,
                        zero_corank: 0,
                        probes,
                        thresholds: *thresholds,
                        consistent: false,
                    });
                }
                Err(e) => return Err(e),
            }
        }
    }
    let corank = coranks[0];
    let consistent = coranks.iter().all(|&c| c == corank);
    let classification = if !consistent {
        RangeClass::Inconclusive
    } else {
        match (field.domain, corank) {
            (Domain::UnitDisc, 0) => RangeClass::Disc,
            (Domain::UnitDisc, 1) => RangeClass::Plane,
            (Domain::UnitBall { .. }, 0) => RangeClass::BallBiholomorphic,
            (Domain::UnitBall { .. }, 1) => RangeClass::CylinderBundle,
            _ => RangeClass::Inconclusive,
        }
    };
    Ok(RangeReport {
        domain: field.domain,
        classification,
        zero_corank: corank,
        probes,
        thresholds: *thresholds,
        consistent,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::{HerglotzField, PiecewiseConstant};
    use crate::linalg::{c, cvec1, cvector};
    use rand::SeedableRng;

    fn rng() -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(1)
    }

    fn radial_disc(coeff: Cpx) -> HerglotzField {
        HerglotzField::radial(Domain::UnitDisc, CMatrix::from_element(1, 1, coeff)).unwrap()
    }

    fn ball_diag_i_m1() -> HerglotzField {
        HerglotzField::ball_diagonal(
            2,
            vec![PiecewiseConstant::constant(c(0.0, 1.0)), PiecewiseConstant::constant(c(-1.0, 0.0))],
            vec![],
        )
        .unwrap()
    }

    #[test]
    fn beta_radial_decays_to_zero() {
        let f = radial_disc(c(-1.0, 0.0));
        let th = RangeThresholds { t_max: 20.0, ..Default::default() };
        let probe = compute_beta(
            &f,
            &cvec1(c(0.0, 0.0)),
            &cvec1(c(1.0, 0.0)),
            0.0,
            &th,
            &IntegratorConfig::default(),
        )
        .unwrap();
        assert!(probe.converged);
        assert!(probe.beta_estimate < 1e-6, "beta {}", probe.beta_estimate);
        // kappa_D(0; e^{-t}) = e^{-t}
        for &(t, val) in &probe.values {
            assert!((val - (-t).exp()).abs() < 1e-6);
        }
    }

    #[test]
    fn beta_rotation_is_the_metric() {
        let f = radial_disc(c(0.0, 1.0));
        let probe = compute_beta(
            &f,
            &cvec1(c(0.5, 0.0)),
            &cvec1(c(1.0, 0.0)),
            0.0,
            &RangeThresholds::default(),
            &IntegratorConfig::strict(),
        )
        .unwrap();
        assert!(probe.converged);
        assert!((probe.beta_estimate - 4.0 / 3.0).abs() < 1e-6);
        for w in probe.values.windows(2) {
            assert!(w[1].1 <= w[0].1 + 1e-8, "monotonicity violated");
        }
    }

    #[test]
    fn beta_ball_diagonal_directions() {
        let f = ball_diag_i_m1();
        let z = cvector(&[c(0.0, 0.0), c(0.0, 0.0)]).unwrap();
        let th = RangeThresholds::default();
        let cfg = IntegratorConfig::default();
        let e1 = cvector(&[c(1.0, 0.0), c(0.0, 0.0)]).unwrap();
        let e2 = cvector(&[c(0.0, 0.0), c(1.0, 0.0)]).unwrap();
        let p1 = compute_beta(&f, &z, &e1, 0.0, &th, &cfg).unwrap();
        let p2 = compute_beta(&f, &z, &e2, 0.0, &th, &cfg).unwrap();
        assert!((p1.beta_estimate - 1.0).abs() < 1e-6);
        assert!(p2.beta_estimate < 1e-6);
    }

    #[test]
    fn corank_examples() {
        let th = RangeThresholds { t_max: 20.0, ..Default::default() };
        let cfg = IntegratorConfig::default();
        let mut r = rng();

        let rot = radial_disc(c(0.0, 1.0));
        let report = beta_zero_corank(&rot, &cvec1(c(0.3, 0.0)), 0.0, &th, &cfg, &mut r).unwrap();
        assert_eq!(report.corank, 0);

        let rad = radial_disc(c(-1.0, 0.0));
        let report = beta_zero_corank(&rad, &cvec1(c(0.3, 0.0)), 0.0, &th, &cfg, &mut r).unwrap();
        assert_eq!(report.corank, 1);

        let ball = ball_diag_i_m1();
        let z = cvector(&[c(0.0, 0.0), c(0.0, 0.0)]).unwrap();
        let report = beta_zero_corank(&ball, &z, 0.0, &th, &cfg, &mut r).unwrap();
        assert_eq!(report.corank, 1);
    }

    #[test]
    fn classification_decision_table() {
        let th = RangeThresholds { t_max: 20.0, ..Default::default() };
        let cfg = IntegratorConfig::default();
        let mut r = rng();
        let base = vec![cvec1(c(0.0, 0.0)), cvec1(c(0.3, 0.1))];

        let rad = radial_disc(c(-1.0, 0.0));
        let report = classify_range(&rad, &[0.0, 0.5], &base, &th, &cfg, &mut r).unwrap();
        assert_eq!(report.classification, RangeClass::Plane);
        assert!(report.consistent);

        let rot = radial_disc(c(0.0, 1.0));
        let report = classify_range(&rot, &[0.0, 0.5], &base, &th, &cfg, &mut r).unwrap();
        assert_eq!(report.classification, RangeClass::Disc);

        let ball = ball_diag_i_m1();
        let zb = vec![cvector(&[c(0.0, 0.0), c(0.0, 0.0)]).unwrap()];
        let report = classify_range(&ball, &[0.0], &zb, &th, &cfg, &mut r).unwrap();
        assert_eq!(report.classification, RangeClass::CylinderBundle);
        assert_eq!(report.zero_corank, 1);
    }

    #[test]
    fn classification_refuses_polydisc() {
        let f = HerglotzField::custom(Domain::Polydisc { n: 2 }, vec![], |z, _| Ok(z.map(|e| -e)))
            .unwrap();
        let mut r = rng();
        assert!(classify_range(
            &f,
            &[0.0],
            &[cvector(&[c(0.0, 0.0), c(0.0, 0.0)]).unwrap()],
            &RangeThresholds::default(),
            &IntegratorConfig::default(),
            &mut r,
        )
        .is_err());
    }

    #[test]
    fn beta_scale_covariance() {
        let f = radial_disc(c(0.0, 1.0));
        let th = RangeThresholds { t_max: 10.0, ..Default::default() };
        let cfg = IntegratorConfig::strict();
        let z = cvec1(c(0.4, 0.1));
        let v = cvec1(c(0.6, -0.2));
        let lam = c(1.7, -0.9);
        let p1 = compute_beta(&f, &z, &v, 0.0, &th, &cfg).unwrap();
        let p2 = compute_beta(&f, &z, &v.map(|e| e * lam), 0.0, &th, &cfg).unwrap();
        assert!(
            (p2.beta_estimate - lam.norm() * p1.beta_estimate).abs() < 1e-6,
            "covariance violated"
        );
    }

    #[test]
    fn disc_zero_verdict_is_consistent() {
        // the zero/nonzero verdict must not depend on the base point,
        // the start time or the probed direction
        let th = RangeThresholds { t_max: 20.0, ..Default::default() };
        let cfg = IntegratorConfig::default();
        for (field, expect_zero) in
            [(radial_disc(c(-1.0, 0.0)), true), (radial_disc(c(0.0, 1.0)), false)]
        {
            for z0 in [c(0.0, 0.0), c(0.3, 0.0), c(-0.2, 0.4), c(0.0, -0.5), c(0.5, 0.3)] {
                for s in [0.0, 0.7, 1.5] {
                    for v0 in [c(1.0, 0.0), c(0.0, 1.0), c(0.6, -0.8)] {
                        let probe =
                            compute_beta(&field, &cvec1(z0), &cvec1(v0), s, &th, &cfg).unwrap();
                        assert_eq!(
                            probe.beta_estimate < th.zero_threshold,
                            expect_zero,
                            "z={z0} s={s} v={v0} beta={}",
                            probe.beta_estimate
                        );
                    }
                }
            }
        }
    }
}
