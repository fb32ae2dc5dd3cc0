//! Domains, their Kobayashi metrics and distances in closed form, and ball
//! automorphisms.
//!
//! The closed-form expressions for the disc, the ball and the polydisc are the
//! standard textbook ones; the test suite cross-checks them against an
//! extremal-disc brute force before anything else trusts them.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{herm, norm, norm_sq, Cpx, CVector};

/// Interior checks stay strictly away from the boundary by this margin.
pub const DEFAULT_BOUNDARY_MARGIN: f64 = 1e-9;

/// Supported domains: the unit disc, the unit ball, the unit polydisc and the
/// full space C^n.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub enum Domain {
    UnitDisc,
    UnitBall { n: usize },
    Polydisc { n: usize },
    FullSpace { n: usize },
}

impl Domain {
    pub fn dimension(&self) -> usize {
        match *self {
            Domain::UnitDisc => 1,
            Domain::UnitBall { n } | Domain::Polydisc { n } | Domain::FullSpace { n } => n,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.dimension() == 0 {
            return Err(Error::InvalidSpec("domain dimension must be >= 1".into()));
        }
        Ok(())
    }

    /// Distance from `z` to the boundary in the relevant defining norm
    /// (1 - ||z|| for disc/ball, 1 - max|z_j| for the polydisc, +inf for C^n).
    pub fn boundary_gap(&self, z: &CVector) -> f64 {
        match self {
            Domain::UnitDisc | Domain::UnitBall { .. } => 1.0 - norm(z),
            Domain::Polydisc { .. } => 1.0 - z.iter().map(|c| c.norm()).fold(0.0, f64::max),
            Domain::FullSpace { .. } => f64::INFINITY,
        }
    }

    pub fn contains(&self, z: &CVector, margin: f64) -> bool {
        z.len() == self.dimension() && self.boundary_gap(z) > margin
    }

    /// Interior check with the configured margin; errors on failure.
    pub fn check_interior(&self, z: &CVector, margin: f64) -> Result<()> {
        if z.len() != self.dimension() {
            return Err(Error::DimensionMismatch { expected: self.dimension(), got: z.len() });
        }
        if self.boundary_gap(z) <= margin {
            return Err(Error::PointOutsideDomain);
        }
        Ok(())
    }
}

fn disc_metric(z: Cpx, v: Cpx) -> f64 {
    v.norm() / (1.0 - z.norm_sqr())
}

fn disc_distance(z: Cpx, w: Cpx) -> f64 {
    let r = (z - w).norm() / (Cpx::new(1.0, 0.0) - z.conj() * w).norm();
    r.atanh()
}

/// Kobayashi metric kappa(z; v).
///
/// Disc: |v|/(1-|z|^2). Ball: sqrt((1-||z||^2)||v||^2 + |<v,z>|^2)/(1-||z||^2).
/// Polydisc: max of the coordinate disc metrics. C^n: 0.
pub fn kobayashi_metric(domain: &Domain, z: &CVector, v: &CVector) -> Result<f64> {
    domain.check_interior(z, 0.0)?;
    if v.len() != domain.dimension() {
        return Err(Error::DimensionMismatch { expected: domain.dimension(), got: v.len() });
    }
    Ok(match domain {
        Domain::UnitDisc => disc_metric(z[0], v[0]),
        Domain::UnitBall { .. } => {
            let z2 = norm_sq(z);
            let num = (1.0 - z2) * norm_sq(v) + herm(v, z).norm_sqr();
            num.max(0.0).sqrt() / (1.0 - z2)
        }
        Domain::Polydisc { .. } => z
            .iter()
            .zip(v.iter())
            .map(|(&zj, &vj)| disc_metric(zj, vj))
            .fold(0.0, f64::max),
        Domain::FullSpace { .. } => 0.0,
    })
}

/// Kobayashi distance k(z, w).
pub fn kobayashi_distance(domain: &Domain, z: &CVector, w: &CVector) -> Result<f64> {
    domain.check_interior(z, 0.0)?;
    domain.check_interior(w, 0.0)?;
    Ok(match domain {
        Domain::UnitDisc => disc_distance(z[0], w[0]),
        Domain::UnitBall { .. } => {
            let phi = MobiusParams::new(z.clone())?;
            let img = mobius_map(&phi, w)?;
            norm(&img).atanh()
        }
        Domain::Polydisc { .. } => z
            .iter()
            .zip(w.iter())
            .map(|(&zj, &wj)| disc_distance(zj, wj))
            .fold(0.0, f64::max),
        Domain::FullSpace { .. } => 0.0,
    })
}

/// Parameters of the ball automorphism phi_a exchanging 0 and a.
#[derive(Debug, Clone)]
pub struct MobiusParams {
    pub a: CVector,
    pub s_a: f64,
}

impl MobiusParams {
    pub fn new(a: CVector) -> Result<Self> {
        let na = norm_sq(&a);
        if na >= 1.0 {
            return Err(Error::PointOutsideDomain);
        }
        Ok(MobiusParams { a, s_a: (1.0 - na).sqrt() })
    }
}

/// The ball automorphism phi_a(z) = (a - P_a(z) - s_a Q_a(z)) / (1 - <z,a>),
/// with P_a the orthogonal projection onto the span of a (P_0 = 0).
pub fn mobius_map(params: &MobiusParams, z: &CVector) -> Result<CVector> {
    let n = params.a.len();
    if z.len() != n {
        return Err(Error::DimensionMismatch { expected: n, got: z.len() });
    }
    if norm(z) >= 1.0 {
        return Err(Error::PointOutsideDomain);
    }
    let a2 = norm_sq(&params.a);
    let p = if a2 == 0.0 {
        CVector::zeros(n)
    } else {
        let coeff = herm(z, &params.a) / Cpx::new(a2, 0.0);
        params.a.map(|e| e * coeff)
    };
    let q = z - &p;
    let s = Cpx::new(params.s_a, 0.0);
    let denom = Cpx::new(1.0, 0.0) - herm(z, &params.a);
    let numer = &params.a - &p - q.map(|e| e * s);
    Ok(numer.map(|e| e / denom))
}

/// Report produced by [`metric_distance_consistency`].
#[derive(Debug, Clone, Serialize)]
pub struct ConsistencyReport {
    pub max_violation: f64,
    pub per_pair: Vec<f64>,
}

/// For each pair checks distance <= line integral of the metric along the
/// straight segment. Report-only; violations are listed, not raised.
pub fn metric_distance_consistency(
    domain: &Domain,
    pairs: &[(CVector, CVector)],
    nodes: usize,
) -> Result<ConsistencyReport> {
    let mut per_pair = Vec::with_capacity(pairs.len());
    let mut max_violation: f64 = 0.0;
    for (z, w) in pairs {
        let dist = kobayashi_distance(domain, z, w)?;
        let step = w - z;
        let mut integral = 0.0;
        // midpoint rule along the segment
        for k in 0..nodes {
            let t = (k as f64 + 0.5) / nodes as f64;
            let point = z + step.map(|e| e * Cpx::new(t, 0.0));
            integral += kobayashi_metric(domain, &point, &step)? / nodes as f64;
        }
        let violation = (dist - integral).max(0.0);
        max_violation = max_violation.max(violation);
        per_pair.push(violation);
    }
    Ok(ConsistencyReport { max_violation, per_pair })
}
