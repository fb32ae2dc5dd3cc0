//! JSON envelope for field specifications:
//! `{"domain": {...}, "kind": "...", "params": {...}, "breakpoints": [...], "order": "inf"}`.
//!
//! Complex numbers are encoded as `[re, im]` pairs, vectors as arrays of
//! pairs, matrices as row-major arrays of rows. Parsing reports the JSON
//! path of the offending element (e.g. `params.a`) in every error message so
//! callers can surface precise diagnostics. Round-trips are lossless for the
//! built-in field kinds; callback-backed fields do not serialize.

use serde_json::{json, Map, Value};

use crate::error::{Error, Result};
use crate::fields::{FieldKind, HerglotzField, Order, PiecewiseConstant, RationalFn};
use crate::geometry::Domain;
use crate::linalg::{norm, CMatrix, CVector, Cpx};

fn bad(path: &str, msg: &str) -> Error {
    Error::InvalidSpec(format!("{path}: {msg}"))
}

fn as_complex(v: &Value, path: &str) -> Result<Cpx> {
    let arr = v.as_array().ok_or_else(|| bad(path, "expected [re, im]"))?;
    if arr.len() != 2 {
        return Err(bad(path, "expected exactly two components"));
    }
    let re = arr[0].as_f64().ok_or_else(|| bad(path, "re is not a number"))?;
    let im = arr[1].as_f64().ok_or_else(|| bad(path, "im is not a number"))?;
    if !re.is_finite() || !im.is_finite() {
        return Err(bad(path, "components must be finite"));
    }
    Ok(Cpx::new(re, im))
}

fn as_cvector(v: &Value, path: &str) -> Result<CVector> {
    let arr = v.as_array().ok_or_else(|| bad(path, "expected an array of [re, im] pairs"))?;
    let mut out = Vec::with_capacity(arr.len());
    for (i, e) in arr.iter().enumerate() {
        out.push(as_complex(e, &format!("{path}[{i}]"))?);
    }
    Ok(CVector::from_vec(out))
}

fn as_cmatrix(v: &Value, path: &str) -> Result<CMatrix> {
    let rows = v.as_array().ok_or_else(|| bad(path, "expected an array of rows"))?;
    if rows.is_empty() {
        return Err(bad(path, "matrix must be nonempty"));
    }
    let n = rows.len();
    let mut data = Vec::with_capacity(n * n);
    for (i, row) in rows.iter().enumerate() {
        let r = as_cvector(row, &format!("{path}[{i}]"))?;
        if r.len() != n {
            return Err(bad(&format!("{path}[{i}]"), "matrix must be square"));
        }
        data.extend(r.iter().copied());
    }
    // collected row-major; CMatrix::from_vec is column-major
    Ok(CMatrix::from_fn(n, n, |i, j| data[i * n + j]))
}

fn complex_json(z: Cpx) -> Value {
    json!([z.re, z.im])
}

fn cvector_json(v: &CVector) -> Value {
    Value::Array(v.iter().map(|z| complex_json(*z)).collect())
}

fn cmatrix_json(m: &CMatrix) -> Value {
    Value::Array(
        (0..m.nrows())
            .map(|i| Value::Array((0..m.ncols()).map(|j| complex_json(m[(i, j)])).collect()))
            .collect(),
    )
}

/// A field document parsed from JSON: the field itself plus the optional
/// conjugation anchor carried under `params.a` (a point of the domain used
/// to conjugate the flow by the involutive automorphism exchanging it with
/// the origin).
#[derive(Debug, Clone)]
pub struct ParsedFieldSpec {
    pub field: HerglotzField,
    pub mobius_anchor: Option<CVector>,
}

fn parse_domain(v: &Value) -> Result<Domain> {
    let obj = v.as_object().ok_or_else(|| bad("domain", "expected an object"))?;
    let kind = obj
        .get("kind")
        .and_then(Value::as_str)
        .ok_or_else(|| bad("domain.kind", "expected a string"))?;
    let dim = || -> Result<usize> {
        obj.get("n")
            .and_then(Value::as_u64)
            .map(|n| n as usize)
            .ok_or_else(|| bad("domain.n", "expected a positive integer"))
    };
    let domain = match kind {
        "UnitDisc" => Domain::UnitDisc,
        "UnitBall" => Domain::UnitBall { n: dim()? },
        "Polydisc" => Domain::Polydisc { n: dim()? },
        "FullSpace" => Domain::FullSpace { n: dim()? },
        other => return Err(bad("domain.kind", &format!("unknown domain `{other}`"))),
    };
    domain.validate().map_err(|_| bad("domain.n", "dimension must be positive"))?;
    Ok(domain)
}

fn parse_order(v: Option<&Value>) -> Result<Order> {
    match v {
        None => Ok(Order::Linf),
        Some(Value::String(s)) if s == "inf" => Ok(Order::Linf),
        Some(Value::Number(d)) => {
            let d = d.as_f64().ok_or_else(|| bad("order", "expected a number or \"inf\""))?;
            if d < 1.0 {
                return Err(bad("order", "integrability order must be >= 1"));
            }
            Ok(Order::Ld(d))
        }
        Some(_) => Err(bad("order", "expected a number or \"inf\"")),
    }
}

fn parse_rational(v: &Value, path: &str) -> Result<RationalFn> {
    let obj = v.as_object().ok_or_else(|| bad(path, "expected {num, den}"))?;
    let num = as_cvector(
        obj.get("num").ok_or_else(|| bad(&format!("{path}.num"), "missing"))?,
        &format!("{path}.num"),
    )?;
    let den = match obj.get("den") {
        Some(d) => as_cvector(d, &format!("{path}.den"))?,
        None => CVector::from_element(1, Cpx::new(1.0, 0.0)),
    };
    if num.is_empty() || den.is_empty() {
        return Err(bad(path, "coefficient lists must be nonempty"));
    }
    Ok(RationalFn { num: num.iter().copied().collect(), den: den.iter().copied().collect() })
}

/// Parses a field document. Never runs any numerics: this is exactly the
/// validation performed by a schema check.
pub fn field_from_json(doc: &Value) -> Result<ParsedFieldSpec> {
    let obj = doc.as_object().ok_or_else(|| bad("$", "document must be an object"))?;
    let domain = parse_domain(obj.get("domain").ok_or_else(|| bad("domain", "missing"))?)?;
    let breakpoints: Vec<f64> = match obj.get("breakpoints") {
        None => vec![],
        Some(v) => {
            let arr =
                v.as_array().ok_or_else(|| bad("breakpoints", "expected an array of times"))?;
            let mut out = Vec::with_capacity(arr.len());
            for (i, e) in arr.iter().enumerate() {
                let t = e
                    .as_f64()
                    .ok_or_else(|| bad(&format!("breakpoints[{i}]"), "expected a number"))?;
                out.push(t);
            }
            if out.windows(2).any(|w| w[0] >= w[1]) || out.iter().any(|&b| b < 0.0) {
                return Err(bad("breakpoints", "must be sorted, distinct and nonnegative"));
            }
            out
        }
    };
    let order = parse_order(obj.get("order"))?;
    let kind_name = obj
        .get("kind")
        .and_then(Value::as_str)
        .ok_or_else(|| bad("kind", "expected a string"))?;
    let empty = Map::new();
    let params = match obj.get("params") {
        Some(v) => v.as_object().ok_or_else(|| bad("params", "expected an object"))?,
        None => &empty,
    };
    let kind = match kind_name {
        "radial" => {
            let m = as_cmatrix(
                params.get("matrix").ok_or_else(|| bad("params.matrix", "missing"))?,
                "params.matrix",
            )?;
            if m.nrows() != domain.dimension() {
                return Err(bad("params.matrix", "size must match the domain dimension"));
            }
            FieldKind::Radial { matrix: m }
        }
        "berkson_porta" => {
            if domain != Domain::UnitDisc {
                return Err(bad("domain", "berkson_porta fields live on the unit disc"));
            }
            let tau = as_complex(
                params.get("tau").ok_or_else(|| bad("params.tau", "missing"))?,
                "params.tau",
            )?;
            if tau.norm() > 1.0 + 1e-12 {
                return Err(bad("params.tau", "the attracting point must satisfy |tau| <= 1"));
            }
            let p = parse_rational(
                params.get("p").ok_or_else(|| bad("params.p", "missing"))?,
                "params.p",
            )?;
            FieldKind::DiscBerksonPorta { tau, p }
        }
        "ball_diagonal" => {
            let raw = params
                .get("lambdas")
                .and_then(Value::as_array)
                .ok_or_else(|| bad("params.lambdas", "expected an array per coordinate"))?;
            if raw.len() != domain.dimension() {
                return Err(bad("params.lambdas", "one entry per coordinate required"));
            }
            let mut lambdas = Vec::with_capacity(raw.len());
            for (i, e) in raw.iter().enumerate() {
                let vals = as_cvector(e, &format!("params.lambdas[{i}]"))?;
                if vals.len() != breakpoints.len() + 1 {
                    return Err(bad(
                        &format!("params.lambdas[{i}]"),
                        "needs breakpoints.len() + 1 values",
                    ));
                }
                lambdas.push(PiecewiseConstant { values: vals.iter().copied().collect() });
            }
            FieldKind::BallDiagonal { lambdas }
        }
        other => return Err(bad("kind", &format!("unknown field kind `{other}`"))),
    };
    let mobius_anchor = match params.get("a") {
        None => None,
        Some(v) => {
            let a = as_cvector(v, "params.a")?;
            if a.len() != domain.dimension() {
                return Err(bad("params.a", "anchor dimension must match the domain"));
            }
            if norm(&a) >= 1.0 {
                return Err(bad("params.a", "anchor must lie strictly inside the domain"));
            }
            Some(a)
        }
    };
    let field = HerglotzField::new(domain, kind, breakpoints, order)
        .map_err(|e| bad("$", &e.to_string()))?;
    Ok(ParsedFieldSpec { field, mobius_anchor })
}

/// Serializes a built-in field back to the document form. Fields backed by
/// a callback have no serial form and are rejected.
pub fn field_to_json(field: &HerglotzField, anchor: Option<&CVector>) -> Result<Value> {
    let domain = match field.domain {
        Domain::UnitDisc => json!({"kind": "UnitDisc"}),
        Domain::UnitBall { n } => json!({"kind": "UnitBall", "n": n}),
        Domain::Polydisc { n } => json!({"kind": "Polydisc", "n": n}),
        Domain::FullSpace { n } => json!({"kind": "FullSpace", "n": n}),
    };
    let (kind, mut params) = match &field.kind {
        FieldKind::Radial { matrix } => {
            ("radial", json!({"matrix": cmatrix_json(matrix)}))
        }
        FieldKind::DiscBerksonPorta { tau, p } => (
            "berkson_porta",
            json!({
                "tau": complex_json(*tau),
                "p": {
                    "num": Value::Array(p.num.iter().map(|z| complex_json(*z)).collect()),
                    "den": Value::Array(p.den.iter().map(|z| complex_json(*z)).collect()),
                },
            }),
        ),
        FieldKind::BallDiagonal { lambdas } => (
            "ball_diagonal",
            json!({
                "lambdas": Value::Array(
                    lambdas
                        .iter()
                        .map(|l| Value::Array(l.values.iter().map(|z| complex_json(*z)).collect()))
                        .collect(),
                ),
            }),
        ),
        FieldKind::Custom { .. } => {
            return Err(Error::InvalidSpec("callback-backed fields do not serialize".into()))
        }
    };
    if let Some(a) = anchor {
        params
            .as_object_mut()
            .expect("params built as an object above")
            .insert("a".into(), cvector_json(a));
    }
    let order = match field.order {
        Order::Linf => json!("inf"),
        Order::Ld(d) => json!(d),
    };
    Ok(json!({
        "domain": domain,
        "kind": kind,
        "params": params,
        "breakpoints": field.breakpoints,
        "order": order,
    }))
}
