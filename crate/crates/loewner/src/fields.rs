//! Time-dependent holomorphic vector fields G(z,t), built-in Herglotz
//! families, and numerical checks of the weak-holomorphic and Herglotz
//! (dissipativity) conditions.
//!
//! Time dependence is restricted to piecewise-continuous with declared
//! breakpoints; values at a breakpoint follow the right-limit (cadlag)
//! convention.

use std::fmt;
use std::sync::Arc;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::{kobayashi_distance, Domain};
use crate::linalg::{min_hermitian_eigenvalue, norm, CMatrix, CVector, Cpx};

/// Regularity order metadata (L^inf or L^d).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum Order {
    Linf,
    Ld(f64),
}

/// A rational function given by numerator/denominator coefficient lists
/// (ascending powers). Used to describe the Berkson-Porta factor p.
#[derive(Debug, Clone, PartialEq)]
pub struct RationalFn {
    pub num: Vec<Cpx>,
    pub den: Vec<Cpx>,
}

impl RationalFn {
    pub fn polynomial(num: Vec<Cpx>) -> Self {
        RationalFn { num, den: vec![Cpx::new(1.0, 0.0)] }
    }

    /// p(z) = (1 - z) / (1 + z), the Cayley-type factor with Re p >= 0 on the disc.
    pub fn cayley() -> Self {
        RationalFn {
            num: vec![Cpx::new(1.0, 0.0), Cpx::new(-1.0, 0.0)],
            den: vec![Cpx::new(1.0, 0.0), Cpx::new(1.0, 0.0)],
        }
    }

    fn eval_poly(coeffs: &[Cpx], z: Cpx) -> Cpx {
        coeffs.iter().rev().fold(Cpx::new(0.0, 0.0), |acc, &c| acc * z + c)
    }

    fn eval_poly_deriv(coeffs: &[Cpx], z: Cpx) -> Cpx {
        coeffs
            .iter()
            .enumerate()
            .skip(1)
            .rev()
            .fold(Cpx::new(0.0, 0.0), |acc, (k, &c)| acc * z + c * Cpx::new(k as f64, 0.0))
    }

    pub fn eval(&self, z: Cpx) -> Cpx {
        Self::eval_poly(&self.num, z) / Self::eval_poly(&self.den, z)
    }

    pub fn deriv(&self, z: Cpx) -> Cpx {
        let n = Self::eval_poly(&self.num, z);
        let d = Self::eval_poly(&self.den, z);
        let np = Self::eval_poly_deriv(&self.num, z);
        let dp = Self::eval_poly_deriv(&self.den, z);
        (np * d - n * dp) / (d * d)
    }
}

/// A piecewise-constant complex function of t; `values.len()` must equal
/// `breakpoints.len() + 1`, with the cadlag convention at breakpoints.
#[derive(Debug, Clone, PartialEq)]
pub struct PiecewiseConstant {
    pub values: Vec<Cpx>,
}

impl PiecewiseConstant {
    pub fn constant(v: Cpx) -> Self {
        PiecewiseConstant { values: vec![v] }
    }

    pub fn value_in_piece(&self, piece: usize) -> Cpx {
        self.values[piece.min(self.values.len() - 1)]
    }
}

type CustomField = Arc<dyn Fn(&CVector, f64) -> Result<CVector> + Send + Sync>;

/// The field families the library knows how to evaluate.
#[derive(Clone)]
pub enum FieldKind {
    /// G(z, t) = A z for a constant linear operator A.
    Radial { matrix: CMatrix },
    /// Berkson-Porta form G(z, t) = (z - tau)(conj(tau) z - 1) p(z) on the disc.
    DiscBerksonPorta { tau: Cpx, p: RationalFn },
    /// Diagonal linear field G_j(z, t) = lambda_j(t) z_j on the ball.
    BallDiagonal { lambdas: Vec<PiecewiseConstant> },
    /// Caller-provided callback G(z, t).
    Custom { eval: CustomField },
}

impl fmt::Debug for FieldKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FieldKind::Radial { matrix } => f.debug_struct("Radial").field("matrix", matrix).finish(),
            FieldKind::DiscBerksonPorta { tau, p } => {
                f.debug_struct("DiscBerksonPorta").field("tau", tau).field("p", p).finish()
            }
            FieldKind::BallDiagonal { lambdas } => {
                f.debug_struct("BallDiagonal").field("lambdas", lambdas).finish()
            }
            FieldKind::Custom { .. } => f.write_str("Custom { .. }"),
        }
    }
}

/// A declarative or callback-backed Herglotz vector field spec.
#[derive(Debug, Clone)]
pub struct HerglotzField {
    pub domain: Domain,
    pub kind: FieldKind,
    /// Sorted, nonnegative times where the t-dependence may jump.
    pub breakpoints: Vec<f64>,
    pub order: Order,
}

/// Finite-difference step used throughout for derivative estimates on
/// unit-scale data.
pub const H_FD: f64 = 1e-6;

impl HerglotzField {
    pub fn new(domain: Domain, kind: FieldKind, breakpoints: Vec<f64>, order: Order) -> Result<Self> {
        domain.validate()?;
        if breakpoints.windows(2).any(|w| w[0] >= w[1]) || breakpoints.iter().any(|&b| b < 0.0) {
            return Err(Error::InvalidSpec("breakpoints must be sorted, distinct and nonnegative".into()));
        }
        if let FieldKind::BallDiagonal { lambdas } = &kind {
            if lambdas.len() != domain.dimension() {
                return Err(Error::InvalidSpec("one lambda per coordinate required".into()));
            }
            for l in lambdas {
                if l.values.len() != breakpoints.len() + 1 {
                    return Err(Error::InvalidSpec(
                        "each lambda needs breakpoints.len() + 1 values".into(),
                    ));
                }
            }
        }
        if let FieldKind::DiscBerksonPorta { tau, .. } = &kind {
            if tau.norm() > 1.0 {
                return Err(Error::InvalidSpec("|tau| <= 1 required".into()));
            }
            if domain != Domain::UnitDisc {
                return Err(Error::InvalidSpec("Berkson-Porta fields live on the unit disc".into()));
            }
        }
        Ok(HerglotzField { domain, kind, breakpoints, order })
    }

    pub fn radial(domain: Domain, matrix: CMatrix) -> Result<Self> {
        HerglotzField::new(domain, FieldKind::Radial { matrix }, vec![], Order::Linf)
    }

    pub fn berkson_porta(tau: Cpx, p: RationalFn) -> Result<Self> {
        HerglotzField::new(Domain::UnitDisc, FieldKind::DiscBerksonPorta { tau, p }, vec![], Order::Linf)
    }

    pub fn ball_diagonal(n: usize, lambdas: Vec<PiecewiseConstant>, breakpoints: Vec<f64>) -> Result<Self> {
        HerglotzField::new(Domain::UnitBall { n }, FieldKind::BallDiagonal { lambdas }, breakpoints, Order::Linf)
    }

    pub fn custom<F>(domain: Domain, breakpoints: Vec<f64>, eval: F) -> Result<Self>
    where
        F: Fn(&CVector, f64) -> Result<CVector> + Send + Sync + 'static,
    {
        HerglotzField::new(domain, FieldKind::Custom { eval: Arc::new(eval) }, breakpoints, Order::Linf)
    }

    /// Index of the piece containing t under the cadlag convention.
    pub fn piece_index(&self, t: f64) -> usize {
        self.breakpoints.partition_point(|&b| b <= t)
    }

    /// G(z, t); at a breakpoint the right-limit value is returned.
    pub fn evaluate(&self, z: &CVector, t: f64) -> Result<CVector> {
        self.evaluate_in_piece(z, t, self.piece_index(t))
    }

    /// Evaluation with an explicit piece index, used by the integrator so a
    /// stage landing exactly on a breakpoint stays inside its segment.
    pub fn evaluate_in_piece(&self, z: &CVector, t: f64, piece: usize) -> Result<CVector> {
        self.domain.check_interior(z, 0.0)?;
        match &self.kind {
            FieldKind::Radial { matrix } => Ok(matrix * z),
            FieldKind::DiscBerksonPorta { tau, p } => {
                let zz = z[0];
                let g = (zz - tau) * (tau.conj() * zz - Cpx::new(1.0, 0.0)) * p.eval(zz);
                Ok(CVector::from_element(1, g))
            }
            FieldKind::BallDiagonal { lambdas } => {
                let mut out = z.clone();
                for (j, l) in lambdas.iter().enumerate() {
                    out[j] *= l.value_in_piece(piece);
                }
                Ok(out)
            }
            FieldKind::Custom { eval } => eval(z, t),
        }
    }

    /// The complex Jacobian d_z G(z, t): analytic for built-ins, central
    /// differences for callbacks.
    pub fn jacobian(&self, z: &CVector, t: f64) -> Result<CMatrix> {
        self.jacobian_in_piece(z, t, self.piece_index(t))
    }

    pub fn jacobian_in_piece(&self, z: &CVector, t: f64, piece: usize) -> Result<CMatrix> {
        let n = self.domain.dimension();
        match &self.kind {
            FieldKind::Radial { matrix } => Ok(matrix.clone()),
            FieldKind::DiscBerksonPorta { tau, p } => {
                let zz = z[0];
                let one = Cpx::new(1.0, 0.0);
                let front = (zz - tau) * (tau.conj() * zz - one);
                let front_d = (tau.conj() * zz - one) + (zz - tau) * tau.conj();
                let g = front_d * p.eval(zz) + front * p.deriv(zz);
                Ok(CMatrix::from_element(1, 1, g))
            }
            FieldKind::BallDiagonal { lambdas } => {
                let mut m = CMatrix::zeros(n, n);
                for (j, l) in lambdas.iter().enumerate() {
                    m[(j, j)] = l.value_in_piece(piece);
                }
                Ok(m)
            }
            FieldKind::Custom { eval } => {
                let mut m = CMatrix::zeros(n, n);
                for j in 0..n {
                    let mut zp = z.clone();
                    let mut zm = z.clone();
                    zp[j] += Cpx::new(H_FD, 0.0);
                    zm[j] -= Cpx::new(H_FD, 0.0);
                    let gp = eval(&zp, t)?;
                    let gm = eval(&zm, t)?;
                    let col = (&gp - &gm).map(|e| e / Cpx::new(2.0 * H_FD, 0.0));
                    m.set_column(j, &col);
                }
                Ok(m)
            }
        }
    }
}

/// m(A) = min Re <A z, z> over the unit sphere, computed as the smallest
/// eigenvalue of the Hermitian part.
pub fn min_real_quadratic(a: &CMatrix) -> f64 {
    min_hermitian_eigenvalue(a)
}

/// Report from [`check_weak_bound`].
#[derive(Debug, Clone, Serialize)]
pub struct WeakBoundReport {
    /// (t, sup over K of ||G(., t)||) on the sampled time grid.
    pub sup_per_time: Vec<(f64, f64)>,
    pub linf: f64,
    pub l1: f64,
    pub unbounded: bool,
}

/// Samples sup_K ||G(., t)|| on a time grid over [0, T] and aggregates.
pub fn check_weak_bound(
    field: &HerglotzField,
    sample_set: &[CVector],
    horizon: f64,
    time_samples: usize,
    cap: f64,
) -> Result<WeakBoundReport> {
    let mut sup_per_time = Vec::with_capacity(time_samples + 1);
    let mut linf: f64 = 0.0;
    let mut unbounded = false;
    for i in 0..=time_samples {
        let t = horizon * i as f64 / time_samples as f64;
        let mut sup: f64 = 0.0;
        for z in sample_set {
            sup = sup.max(norm(&field.evaluate(z, t)?));
        }
        if sup > cap {
            unbounded = true;
        }
        linf = linf.max(sup);
        sup_per_time.push((t, sup));
    }
    let mut l1 = 0.0;
    for w in sup_per_time.windows(2) {
        l1 += 0.5 * (w[0].1 + w[1].1) * (w[1].0 - w[0].0);
    }
    Ok(WeakBoundReport { sup_per_time, linf, l1, unbounded })
}

/// Report from [`check_dissipativity`].
#[derive(Debug, Clone, Serialize)]
pub struct DissipativityReport {
    pub max_derivative: f64,
    pub worst_pair: Option<([Vec<(f64, f64)>; 2], f64)>,
    pub pass: bool,
    pub tolerance: f64,
}

/// Central-difference directional derivative of (z, w) -> k_M(z, w) along
/// (G(z, t), G(w, t)). Herglotz fields must keep it <= 0.
pub fn check_dissipativity(
    field: &HerglotzField,
    pairs: &[(CVector, CVector)],
    times: &[f64],
    tol: f64,
) -> Result<DissipativityReport> {
    let h = H_FD;
    let mut max_derivative = f64::NEG_INFINITY;
    let mut worst_pair = None;
    for (z, w) in pairs {
        if kobayashi_distance(&field.domain, z, w)? < 1e-9 {
            return Err(Error::DegeneratePair);
        }
        for &t in times {
            let gz = field.evaluate(z, t)?;
            let gw = field.evaluate(w, t)?;
            let hs = Cpx::new(h, 0.0);
            let zp = z + gz.map(|e| e * hs);
            let wp = w + gw.map(|e| e * hs);
            let zm = z - gz.map(|e| e * hs);
            let wm = w - gw.map(|e| e * hs);
            let fwd = kobayashi_distance(&field.domain, &zp, &wp)?;
            let bwd = kobayashi_distance(&field.domain, &zm, &wm)?;
            let deriv = (fwd - bwd) / (2.0 * h);
            if deriv > max_derivative {
                max_derivative = deriv;
                let dump = |v: &CVector| v.iter().map(|c| (c.re, c.im)).collect::<Vec<_>>();
                worst_pair = Some(([dump(z), dump(w)], deriv));
            }
        }
    }
    Ok(DissipativityReport { max_derivative, worst_pair, pass: max_derivative <= tol, tolerance: tol })
}
