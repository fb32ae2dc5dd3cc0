//! Certification of spiral- and star-shapedness of locally univalent maps on
//! the ball through the differential inequality
//! Re<(df_z)^{-1} A f(z), z>  >=  (1 - ||z||^2) Re<(df_0)^{-1} A f(0), z>,
//! plus the induced chain f_t = e^{tA} f and its image-monotonicity checks.

use std::sync::Arc;

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::chains::rouche_membership;
use crate::error::{Error, Result};
use crate::fields::min_real_quadratic;
use crate::geometry::Domain;
use crate::linalg::{det, herm, matrix_exp, norm, norm_sq, solve, CMatrix, CVector, Cpx};

/// default tolerance below which a criterion margin counts as a strict
/// violation; values in (-tol, 0) are sampling noise on a closed inequality
pub const TOL_SHAPE: f64 = 1e-9;

/// minimum |det df_z| accepted before a probe is declared singular
pub const SINGULAR_DET: f64 = 1e-12;

/// radius of the image curve used for winding-number membership checks
pub const MEMBER_RADIUS: f64 = 0.995;

/// trace resolution for membership checks; maps with poles just outside the
/// disc (Koebe, half-plane) need a fine grid near the pole for the winding
/// integral to resolve
pub const MEMBER_NODES: usize = 16384;

type MapFn = Arc<dyn Fn(&CVector) -> Result<CVector> + Send + Sync>;
type JacFn = Arc<dyn Fn(&CVector) -> Result<CMatrix> + Send + Sync>;

/// A holomorphic map of the disc or ball paired with the linear operator `A`
/// it is tested against. `A` must satisfy m(A) > 0, where m is the minimum of
/// the real quadratic form of A.
#[derive(Clone)]
pub struct MapUnderTest {
    pub name: String,
    pub domain: Domain,
    pub a_matrix: CMatrix,
    f: MapFn,
    jac: JacFn,
}

impl std::fmt::Debug for MapUnderTest {
    fn fmt(&self, fm: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        fm.debug_struct("MapUnderTest")
            .field("name", &self.name)
            .field("domain", &self.domain)
            .field("a_matrix", &self.a_matrix)
            .finish()
    }
}

impl MapUnderTest {
    pub fn new<F, J>(name: &str, domain: Domain, a_matrix: CMatrix, f: F, jac: J) -> Result<Self>
    where
        F: Fn(&CVector) -> Result<CVector> + Send + Sync + 'static,
        J: Fn(&CVector) -> Result<CMatrix> + Send + Sync + 'static,
    {
        let n = domain.dimension();
        match domain {
            Domain::UnitDisc | Domain::UnitBall { .. } => {}
            _ => return Err(Error::InvalidSpec("shape criteria run on the disc or ball".into())),
        }
        if a_matrix.nrows() != n || a_matrix.ncols() != n {
            return Err(Error::DimensionMismatch { expected: n, got: a_matrix.nrows() });
        }
        Ok(MapUnderTest {
            name: name.to_string(),
            domain,
            a_matrix,
            f: Arc::new(f),
            jac: Arc::new(jac),
        })
    }

    pub fn eval(&self, z: &CVector) -> Result<CVector> {
        (self.f)(z)
    }

    pub fn jacobian(&self, z: &CVector) -> Result<CMatrix> {
        (self.jac)(z)
    }

    /// (df_z)^{-1} A f(z), the transported direction entering the criterion.
    pub fn transported(&self, z: &CVector) -> Result<CVector> {
        let j = self.jacobian(z)?;
        if det(&j).norm() < SINGULAR_DET {
            return Err(Error::SingularJacobian);
        }
        solve(&j, &(&self.a_matrix * self.eval(z)?))
    }

    /// Replaces A by `c * A`; verdicts must be invariant under c > 0.
    pub fn with_scaled_a(&self, scale: f64) -> MapUnderTest {
        let mut out = self.clone();
        out.a_matrix = self.a_matrix.map(|e| e * scale);
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Verdict {
    Pass,
    /// worst margin inside (-tol_shape, 0): too close to call against a
    /// closed inequality, so neither Pass nor Fail
    Marginal,
    Fail,
}

#[derive(Debug, Clone, Serialize)]
pub struct Thresholds {
    pub tol_shape: f64,
    pub singular_det: f64,
}

impl Default for Thresholds {
    fn default() -> Self {
        Thresholds { tol_shape: TOL_SHAPE, singular_det: SINGULAR_DET }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct CertificationReport {
    pub map_name: String,
    pub verdict: Verdict,
    pub min_margin: f64,
    /// probe attaining the minimum margin, as [re, im] pairs
    pub witness_point: Vec<[f64; 2]>,
    pub probes_used: usize,
    pub thresholds: Thresholds,
    /// set when min ||f|| over the probes exceeds 0.05, i.e. the hypothesis
    /// that 0 lies in the closure of the image looks doubtful
    pub origin_warning: bool,
    pub min_f_norm: f64,
}

/// Probe set on concentric spheres at radii {0.1, ..., 0.9, 0.99}. On the
/// disc the angular samples are equispaced; on the ball they are random unit
/// directions drawn from the seeded generator.
pub fn probe_points(domain: &Domain, per_sphere: usize, seed: u64) -> Result<Vec<CVector>> {
    let n = domain.dimension();
    match domain {
        Domain::UnitDisc | Domain::UnitBall { .. } => {}
        _ => return Err(Error::InvalidSpec("probes are drawn on the disc or ball".into())),
    }
    let radii = [0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 0.99];
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(radii.len() * per_sphere);
    for &r in &radii {
        for k in 0..per_sphere {
            let dir = if n == 1 {
                let theta = k as f64 / per_sphere as f64 * std::f64::consts::TAU;
                CVector::from_element(1, Cpx::from_polar(1.0, theta))
            } else {
                let mut v = CVector::from_fn(n, |_, _| {
                    Cpx::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5)
                });
                let nv = norm(&v);
                if nv < 1e-3 {
                    v = CVector::from_element(n, Cpx::new(1.0, 0.0) / (n as f64).sqrt());
                }
                v.map(|e| e / norm(&v).max(1e-3))
            };
            out.push(dir.map(|e| e * r));
        }
    }
    Ok(out)
}

/// Certifies the spiral-shapedness inequality over the probe set. Requires
/// m(A) > 0; refuses otherwise.
pub fn spiral_criterion(map: &MapUnderTest, probes: &[CVector]) -> Result<CertificationReport> {
    let m_a = min_real_quadratic(&map.a_matrix);
    if m_a <= 0.0 {
        return Err(Error::InvalidSpec(format!(
            "criterion requires m(A) > 0, got m(A) = {m_a:.3e}"
        )));
    }
    if probes.is_empty() {
        return Err(Error::InvalidSpec("empty probe set".into()));
    }
    let n = map.domain.dimension();
    let zero = CVector::zeros(n);
    let base = map.transported(&zero)?;
    let mut min_margin = f64::INFINITY;
    let mut witness = zero.clone();
    // the origin participates in the 0-in-closure check alongside the probes
    let mut min_f_norm = norm(&map.eval(&zero)?);
    for z in probes {
        map.domain.check_interior(z, 0.0)?;
        let lhs = herm(&map.transported(z)?, z).re;
        let rhs = (1.0 - norm_sq(z)) * herm(&base, z).re;
        let margin = lhs - rhs;
        if margin < min_margin {
            min_margin = margin;
            witness = z.clone();
        }
        min_f_norm = min_f_norm.min(norm(&map.eval(z)?));
    }
    let verdict = if min_margin >= 0.0 {
        Verdict::Pass
    } else if min_margin > -TOL_SHAPE {
        Verdict::Marginal
    } else {
        Verdict::Fail
    };
    Ok(CertificationReport {
        map_name: map.name.clone(),
        verdict,
        min_margin,
        witness_point: witness.iter().map(|w| [w.re, w.im]).collect(),
        probes_used: probes.len(),
        thresholds: Thresholds::default(),
        origin_warning: min_f_norm > 0.05,
        min_f_norm,
    })
}

/// Star-shapedness: the spiral criterion specialized to A = I.
pub fn star_criterion(map: &MapUnderTest, probes: &[CVector]) -> Result<CertificationReport> {
    let n = map.domain.dimension();
    let mut with_identity = map.clone();
    with_identity.a_matrix = CMatrix::identity(n, n);
    spiral_criterion(&with_identity, probes)
}

#[derive(Debug, Clone, Serialize)]
pub struct ChainResidualReport {
    pub map_name: String,
    /// worst value of ||A e^{tA} f(z) - e^{tA} df_z (df_z)^{-1} A f(z)||;
    /// an algebraic identity, so this only measures evaluator consistency
    pub max_pde_residual: f64,
    pub pde_pass: bool,
    /// for disc maps: whether e^{-hA} f(z) stayed inside the image, with a
    /// single preimage, at every sampled (h, z)
    pub membership_certified: Option<bool>,
    pub membership_failures: Vec<(f64, [f64; 2])>,
}

/// Checks the chain f_t = e^{tA} f: the transport identity behind its
/// governing PDE, and (on the disc) that e^{-hA} pulls image points back
/// into the image.
pub fn spiral_chain_residual(
    map: &MapUnderTest,
    t_grid: &[f64],
    probes: &[CVector],
) -> Result<ChainResidualReport> {
    if t_grid.is_empty() || probes.is_empty() {
        return Err(Error::InvalidSpec("empty time grid or probe set".into()));
    }
    let mut max_res = 0.0f64;
    for &t in t_grid {
        let eta = matrix_exp(&map.a_matrix.map(|e| e * t));
        for z in probes {
            let fz = map.eval(z)?;
            let j = map.jacobian(z)?;
            if det(&j).norm() < SINGULAR_DET {
                return Err(Error::SingularJacobian);
            }
            let lhs = &eta * (&map.a_matrix * &fz);
            let rhs = &eta * (&j * solve(&j, &(&map.a_matrix * &fz))?);
            max_res = max_res.max(norm(&(&lhs - &rhs)));
        }
    }

    let (membership, failures) = if map.domain == Domain::UnitDisc {
        let mut fails = Vec::new();
        for &h in t_grid {
            if h <= 0.0 {
                continue;
            }
            let decay = matrix_exp(&map.a_matrix.map(|e| e * (-h)));
            for z in probes {
                if norm(z) > 0.95 {
                    // too close to the membership curve for the winding
                    // count to be trustworthy
                    continue;
                }
                let w = map.eval(z)?;
                let target = decay[(0, 0)] * w[0];
                let scalar = |zeta: Cpx| Ok(map.eval(&CVector::from_element(1, zeta))?[0]);
                match rouche_membership(scalar, Cpx::new(0.0, 0.0), MEMBER_RADIUS, MEMBER_NODES, target)
                {
                    Ok(k) if k >= 1 => {}
                    Ok(_) | Err(_) => fails.push((h, [target.re, target.im])),
                }
            }
        }
        (Some(fails.is_empty()), fails)
    } else {
        (None, Vec::new())
    };

    Ok(ChainResidualReport {
        map_name: map.name.clone(),
        max_pde_residual: max_res,
        pde_pass: max_res <= 1e-8,
        membership_certified: membership,
        membership_failures: failures,
    })
}

/// Brute-force image oracle for star-shapedness of a disc map: for image
/// points w = f(z) and a lambda grid in (0, 1], each lambda*w must have
/// winding number exactly 1 around the near-boundary image curve — i.e. it
/// lies in the image and has a single preimage. Demanding a unique preimage
/// makes the oracle sensitive to non-univalence, which the differential
/// criterion also detects.
pub fn star_image_oracle(
    map: &MapUnderTest,
    lambda_grid: usize,
    image_points: usize,
    seed: u64,
) -> Result<bool> {
    if map.domain != Domain::UnitDisc {
        return Err(Error::InvalidSpec("the image oracle is a disc-only check".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let scalar = |zeta: Cpx| Ok(map.eval(&CVector::from_element(1, zeta))?[0]);
    for _ in 0..image_points {
        let r = 0.2 + 0.7 * rng.gen::<f64>();
        let theta = rng.gen::<f64>() * std::f64::consts::TAU;
        let w = scalar(Cpx::from_polar(r, theta))?;
        for k in 1..=lambda_grid {
            let lambda = k as f64 / lambda_grid as f64;
            let target = w * Cpx::new(lambda, 0.0);
            match rouche_membership(scalar, Cpx::new(0.0, 0.0), MEMBER_RADIUS, MEMBER_NODES, target)
            {
                Ok(1) => {}
                Ok(_) => return Ok(false),
                Err(Error::CurveTooClose) | Err(Error::NonIntegerWinding { .. }) => {
                    return Ok(false)
                }
                Err(e) => return Err(e),
            }
        }
    }
    Ok(true)
}

fn scalar_map<F, D>(name: &str, f: F, df: D) -> MapUnderTest
where
    F: Fn(Cpx) -> Cpx + Send + Sync + 'static,
    D: Fn(Cpx) -> Cpx + Send + Sync + 'static,
{
    MapUnderTest::new(
        name,
        Domain::UnitDisc,
        CMatrix::identity(1, 1),
        move |z: &CVector| Ok(CVector::from_element(1, f(z[0]))),
        move |z: &CVector| Ok(CMatrix::from_element(1, 1, df(z[0]))),
    )
    .expect("built-in map construction cannot fail")
}

/// f = id on the ball of dimension n.
pub fn identity_map(n: usize) -> MapUnderTest {
    let domain = if n == 1 { Domain::UnitDisc } else { Domain::UnitBall { n } };
    MapUnderTest::new(
        "identity",
        domain,
        CMatrix::identity(n, n),
        |z: &CVector| Ok(z.clone()),
        move |_z: &CVector| Ok(CMatrix::identity(n, n)),
    )
    .expect("built-in map construction cannot fail")
}

/// f(z) = z / (1 - z)^2, extremal for the class of normalized univalent
/// disc maps; its image is the plane slit along (-inf, -1/4].
pub fn koebe_map() -> MapUnderTest {
    let one = Cpx::new(1.0, 0.0);
    scalar_map(
        "koebe",
        move |z| z / ((one - z) * (one - z)),
        move |z| (one + z) / ((one - z) * (one - z) * (one - z)),
    )
}

/// f(z) = z / (1 - z), mapping the disc onto the half-plane Re w > -1/2.
pub fn half_plane_map() -> MapUnderTest {
    let one = Cpx::new(1.0, 0.0);
    scalar_map(
        "half-plane",
        move |z| z / (one - z),
        move |z| ((one - z) * (one - z)).inv(),
    )
}

/// f(z) = z + 2z^2: locally univalent on most of the disc but not univalent
/// (the second coefficient breaks the univalence bound); the star criterion
/// must fail on it.
pub fn quad_map() -> MapUnderTest {
    let one = Cpx::new(1.0, 0.0);
    let two = Cpx::new(2.0, 0.0);
    scalar_map("quadratic", move |z| z + two * z * z, move |z| one + Cpx::new(4.0, 0.0) * z)
}

/// g(z) = (0.4 z)^2 + 0.4 z: the quadratic rescaled so its critical point
/// lies outside the closed disc.
pub fn rescaled_quad_map() -> MapUnderTest {
    let one = Cpx::new(1.0, 0.0);
    scalar_map(
        "rescaled-quadratic",
        move |z| {
            let w = z * Cpx::new(0.4, 0.0);
            w * w + w
        },
        move |z| Cpx::new(0.4, 0.0) * (one + Cpx::new(0.8, 0.0) * z),
    )
}

/// The extension of z1/(1-z1) to the two-ball:
/// F(z) = (z1/(1-z1), z2/(1-z1)), with sqrt(f'(z1)) = 1/(1-z1) taken with
/// the branch that is 1 at the origin.
pub fn extended_half_plane_map() -> MapUnderTest {
    let one = Cpx::new(1.0, 0.0);
    MapUnderTest::new(
        "extended-half-plane",
        Domain::UnitBall { n: 2 },
        CMatrix::identity(2, 2),
        move |z: &CVector| {
            let d = one - z[0];
            let mut out = CVector::zeros(2);
            out[0] = z[0] / d;
            out[1] = z[1] / d;
            Ok(out)
        },
        move |z: &CVector| {
            let d = one - z[0];
            let d2 = d * d;
            let mut j = CMatrix::zeros(2, 2);
            j[(0, 0)] = d2.inv();
            j[(1, 0)] = z[1] / d2;
            j[(1, 1)] = d.inv();
            Ok(j)
        },
    )
    .expect("built-in map construction cannot fail")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{c, cvector};
    use crate::operators::roper_suffridge_static;
    use approx::assert_relative_eq;

    fn disc_probes() -> Vec<CVector> {
        probe_points(&Domain::UnitDisc, 256, 7).unwrap()
    }

    #[test]
    fn identity_margin_is_norm_squared() {
        let map = identity_map(2);
        let probes = probe_points(&Domain::UnitBall { n: 2 }, 200, 3).unwrap();
        let report = spiral_criterion(&map, &probes).unwrap();
        assert_eq!(report.verdict, Verdict::Pass);
        // f(0) = 0 kills the right-hand side; the margin is exactly ||z||^2
        assert_relative_eq!(report.min_margin, 0.01, epsilon = 1e-12);
        assert!(!report.origin_warning);
    }

    #[test]
    fn koebe_passes_spiral_criterion() {
        let report = spiral_criterion(&koebe_map(), &disc_probes()).unwrap();
        assert_eq!(report.verdict, Verdict::Pass);
        // reduction: margin = |z|^2 Re((1-z)/(1+z)) > 0 on the disc
        let z = c(0.5, 0.3);
        let expect = z.norm_sqr() * ((c(1.0, 0.0) - z) / (c(1.0, 0.0) + z)).re;
        let map = koebe_map();
        let zz = cvector(&[z]).unwrap();
        let lhs = herm(&map.transported(&zz).unwrap(), &zz).re;
        assert_relative_eq!(lhs, expect, epsilon = 1e-12);
    }

    #[test]
    fn half_plane_passes_star_criterion() {
        let report = star_criterion(&half_plane_map(), &disc_probes()).unwrap();
        assert_eq!(report.verdict, Verdict::Pass);
        // (df)^{-1} f(z) = z (1 - z), margin |z|^2 Re(1 - z) > 0
        let z = c(-0.6, 0.2);
        let zz = cvector(&[z]).unwrap();
        let lhs = herm(&half_plane_map().transported(&zz).unwrap(), &zz).re;
        assert_relative_eq!(lhs, z.norm_sqr() * (1.0 - z.re), epsilon = 1e-12);
    }

    #[test]
    fn quadratic_fails_with_boundary_witness() {
        let report = star_criterion(&quad_map(), &disc_probes()).unwrap();
        assert_eq!(report.verdict, Verdict::Fail);
        assert!(report.min_margin < -1e-3, "violation should be clear, margin {}", report.min_margin);
        // the violating band sits around the critical point of f at z = -1/4
        let w = c(report.witness_point[0][0], report.witness_point[0][1]);
        assert!(w.re < 0.0, "witness should have negative real part, got {w}");
    }

    #[test]
    fn rescaled_quadratic_reported_and_cross_checked() {
        let map = rescaled_quad_map();
        let report = star_criterion(&map, &disc_probes()).unwrap();
        let oracle = star_image_oracle(&map, 20, 50, 11).unwrap();
        assert_eq!(report.verdict == Verdict::Pass, oracle);
        assert_eq!(report.verdict, Verdict::Pass);
    }

    #[test]
    fn criterion_agrees_with_image_oracle_on_builtins() {
        let maps = [identity_map(1), koebe_map(), half_plane_map(), quad_map(), rescaled_quad_map()];
        let probes = disc_probes();
        for map in &maps {
            let verdict = star_criterion(map, &probes).unwrap().verdict;
            let oracle = star_image_oracle(map, 20, 50, 5).unwrap();
            assert_eq!(
                verdict == Verdict::Pass,
                oracle,
                "criterion and oracle disagree on {}",
                map.name
            );
        }
    }

    #[test]
    fn a_scaling_preserves_verdicts() {
        let probes = disc_probes();
        for map in [koebe_map(), quad_map()] {
            let base = spiral_criterion(&map, &probes).unwrap().verdict;
            for scale in [0.5, 3.0, 10.0] {
                let scaled = spiral_criterion(&map.with_scaled_a(scale), &probes).unwrap().verdict;
                assert_eq!(base, scaled, "scale {scale} flipped verdict on {}", map.name);
            }
        }
    }

    #[test]
    fn nonpositive_quadratic_form_refused() {
        let mut map = koebe_map();
        map.a_matrix = CMatrix::from_element(1, 1, c(0.0, 1.0));
        assert!(matches!(
            spiral_criterion(&map, &disc_probes()),
            Err(Error::InvalidSpec(_))
        ));
        map.a_matrix = CMatrix::from_element(1, 1, c(-1.0, 0.0));
        assert!(spiral_criterion(&map, &disc_probes()).is_err());
    }

    #[test]
    fn chain_residual_identity_map() {
        let map = identity_map(1);
        let report =
            spiral_chain_residual(&map, &[0.1, 0.5, 1.0], &disc_probes()[..60]).unwrap();
        assert!(report.pde_pass);
        assert!(report.max_pde_residual < 1e-12);
        assert_eq!(report.membership_certified, Some(true));
    }

    #[test]
    fn chain_residual_koebe_membership() {
        let probes: Vec<CVector> = disc_probes().into_iter().step_by(51).collect();
        assert!(probes.len() >= 50);
        let report = spiral_chain_residual(&koebe_map(), &[0.1, 0.5, 1.0], &probes).unwrap();
        assert!(report.pde_pass, "residual {}", report.max_pde_residual);
        assert_eq!(report.membership_certified, Some(true), "{:?}", report.membership_failures);
    }

    #[test]
    fn chain_residual_half_plane_membership() {
        let probes: Vec<CVector> = disc_probes().into_iter().step_by(97).collect();
        let report = spiral_chain_residual(&half_plane_map(), &[0.2, 0.7], &probes).unwrap();
        assert!(report.pde_pass);
        assert_eq!(report.membership_certified, Some(true), "{:?}", report.membership_failures);
    }

    #[test]
    fn koebe_image_is_slit_plane_oracle() {
        // lambda * f(z) stays off the slit (-inf, -1/4] when f(z) does, so
        // scaling toward 0 keeps membership; independent geometric check of
        // what the oracle certifies
        let map = koebe_map();
        let scalar = |zeta: Cpx| Ok(map.eval(&CVector::from_element(1, zeta)).unwrap()[0]);
        for (r, theta) in [(0.5, 1.0), (0.8, 2.5), (0.9, 4.0)] {
            let w = scalar(Cpx::from_polar(r, theta)).unwrap();
            for k in 1..=10 {
                let target = w * c(k as f64 / 10.0, 0.0);
                let on_slit = target.im.abs() < 1e-12 && target.re <= -0.25;
                assert!(!on_slit);
                let wind =
                    rouche_membership(scalar, c(0.0, 0.0), MEMBER_RADIUS, MEMBER_NODES, target)
                        .unwrap();
                assert_eq!(wind, 1);
            }
        }
    }

    #[test]
    fn extended_half_plane_matches_lift_and_is_starlike() {
        // cross-module check: the closed form agrees with the extension
        // operator applied to z/(1-z)
        let one = c(1.0, 0.0);
        let map = extended_half_plane_map();
        for z in [
            cvector(&[c(0.3, 0.2), c(0.4, -0.1)]).unwrap(),
            cvector(&[c(-0.5, 0.1), c(0.2, 0.6)]).unwrap(),
        ] {
            let lifted = roper_suffridge_static(
                |zeta| Ok(zeta / (one - zeta)),
                |zeta| Ok(((one - zeta) * (one - zeta)).inv()),
                &z,
                32,
            )
            .unwrap();
            let direct = map.eval(&z).unwrap();
            assert!(norm(&(&lifted - &direct)) < 1e-12);
        }
        let probes = probe_points(&Domain::UnitBall { n: 2 }, 400, 13).unwrap();
        let report = star_criterion(&map, &probes).unwrap();
        assert_eq!(report.verdict, Verdict::Pass, "min margin {}", report.min_margin);
    }

    #[test]
    fn origin_warning_for_shifted_map() {
        let map = scalar_map("shifted", |z| z + c(2.0, 0.0), |_| c(1.0, 0.0));
        let report = star_criterion(&map, &disc_probes()).unwrap();
        assert!(report.origin_warning);
        assert!(report.min_f_norm > 0.9);
    }

    #[test]
    fn probe_points_determinism_and_radii() {
        let a = probe_points(&Domain::UnitBall { n: 2 }, 100, 42).unwrap();
        let b = probe_points(&Domain::UnitBall { n: 2 }, 100, 42).unwrap();
        assert_eq!(a.len(), 1000);
        for (x, y) in a.iter().zip(&b) {
            assert_eq!(norm(&(x - y)), 0.0);
        }
        let max_r = a.iter().map(|z| norm(z)).fold(0.0f64, f64::max);
        assert!((max_r - 0.99).abs() < 1e-9);
    }
}
