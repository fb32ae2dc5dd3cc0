//! Batch front-end: reads field/map specification files, runs the requested
//! analysis, and writes a single JSON report (plus optional CSV tables).
//!
//! Exit codes: 0 complete/PASS, 2 FAIL or inconclusive verdict, 3 runtime
//! error, 4 input parse/validation error, 5 trajectory escaped the domain.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand};
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use loewner::chains::{check_association, check_lk_pde, ChainDiscMap, ChainHandle, DiscMap};
use loewner::fields::check_dissipativity;
use loewner::fields::check_weak_bound;
use loewner::flow::{integrate_flow_traced, IntegratorConfig};
use loewner::geometry::{mobius_map, Domain, MobiusParams};
use loewner::linalg::{norm, CMatrix, CVector, Cpx};
use loewner::operators::LiftedChain;
use loewner::range::{classify_range, RangeClass, RangeThresholds};
use loewner::shapes::{probe_points, spiral_criterion, MapUnderTest, Verdict};
use loewner::spec_io::{field_from_json, ParsedFieldSpec};
use loewner::Error;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

const SCHEMA_VERSION: u32 = 1;

#[derive(Parser)]
#[command(name = "loewner", about = "Loewner-theory batch runner", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Validate a field specification without running any numerics.
    Validate {
        #[arg(long)]
        input: PathBuf,
    },
    /// Integrate the evolution family from s to t at a given start point.
    Flow {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        output: PathBuf,
        /// start point as a JSON array of [re, im] pairs
        #[arg(long)]
        z: String,
        #[arg(long, default_value_t = 0.0)]
        s: f64,
        #[arg(long)]
        t: f64,
        /// fixed step size; selects the fixed-step integrator when given
        #[arg(long)]
        step: Option<f64>,
        /// local error tolerance of the adaptive integrator
        #[arg(long)]
        tol: Option<f64>,
        #[arg(long)]
        seed: Option<u64>,
        /// write the accepted-step trajectory as CSV
        #[arg(long)]
        dump_csv: Option<PathBuf>,
    },
    /// Build the finite-horizon chain and verify its defining identities.
    Chain {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        output: PathBuf,
        #[arg(long)]
        horizon: f64,
        #[arg(long, default_value_t = 1e-5)]
        tol: f64,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Classify the Loewner range through the metric limit.
    Range {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        output: PathBuf,
        #[arg(long, default_value_t = 40.0)]
        t_max: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        dump_csv: Option<PathBuf>,
    },
    /// Admissibility checks: dissipativity and the integrable sup bound.
    CheckField {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        output: PathBuf,
        #[arg(long, default_value_t = 1.0)]
        horizon: f64,
        #[arg(long, default_value_t = 1e-7)]
        tol: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Lift a disc field to the ball and evaluate the extended chain.
    Extend {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        output: PathBuf,
        /// ball point as a JSON array of [re, im] pairs (length >= 2)
        #[arg(long)]
        z: String,
        #[arg(long, default_value_t = 0.0)]
        s: f64,
        #[arg(long)]
        t: f64,
    },
    /// Certify spiral/star-shapedness of a built-in test map.
    Shape {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        output: PathBuf,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Inverse-map convergence of chain evaluations toward the s = 0 map.
    Kernel {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        output: PathBuf,
        #[arg(long, default_value_t = 1.0)]
        horizon: f64,
    },
}

/// A failure mapped to its process exit code. Escapes still produce a
/// report; the report value rides along.
struct Failure {
    code: u8,
    message: String,
    results: Option<Value>,
}

impl Failure {
    fn parse(msg: impl Into<String>) -> Self {
        Failure { code: 4, message: msg.into(), results: None }
    }
    fn runtime(msg: impl Into<String>) -> Self {
        Failure { code: 3, message: msg.into(), results: None }
    }
    fn from_error(e: Error) -> Self {
        match e {
            Error::TrajectoryEscaped { t_esc } => Failure {
                code: 5,
                message: format!("trajectory escaped the domain at t = {t_esc}"),
                results: Some(json!({"escaped_at": t_esc})),
            },
            Error::InvalidSpec(msg) => Failure::parse(msg),
            other => Failure::runtime(other.to_string()),
        }
    }
}

fn read_input(path: &Path) -> Result<(Vec<u8>, Value), Failure> {
    let bytes = fs::read(path)
        .map_err(|e| Failure::runtime(format!("cannot read {}: {e}", path.display())))?;
    let doc: Value = serde_json::from_slice(&bytes).map_err(|e| {
        Failure::parse(format!("JSON syntax error at line {}, column {}: {e}", e.line(), e.column()))
    })?;
    Ok((bytes, doc))
}

fn digest_hex(bytes: &[u8]) -> String {
    let mut h = Sha256::new();
    h.update(bytes);
    format!("{:x}", h.finalize())
}

fn parse_point(raw: &str) -> Result<CVector, Failure> {
    let doc: Value = serde_json::from_str(raw)
        .map_err(|e| Failure::parse(format!("--z is not valid JSON: {e}")))?;
    let arr = doc
        .as_array()
        .ok_or_else(|| Failure::parse("--z must be an array of [re, im] pairs"))?;
    let mut out = Vec::with_capacity(arr.len());
    for (i, e) in arr.iter().enumerate() {
        let pair = e
            .as_array()
            .filter(|p| p.len() == 2)
            .ok_or_else(|| Failure::parse(format!("--z[{i}] must be [re, im]")))?;
        let re = pair[0].as_f64().ok_or_else(|| Failure::parse("--z components must be numbers"))?;
        let im = pair[1].as_f64().ok_or_else(|| Failure::parse("--z components must be numbers"))?;
        out.push(Cpx::new(re, im));
    }
    if out.is_empty() {
        return Err(Failure::parse("--z must be nonempty"));
    }
    Ok(CVector::from_vec(out))
}

fn cvector_value(v: &CVector) -> Value {
    Value::Array(v.iter().map(|z| json!([z.re, z.im])).collect())
}

fn cmatrix_value(m: &CMatrix) -> Value {
    Value::Array(
        (0..m.nrows())
            .map(|i| {
                Value::Array((0..m.ncols()).map(|j| json!([m[(i, j)].re, m[(i, j)].im])).collect())
            })
            .collect(),
    )
}

fn to_value<T: serde::Serialize>(t: &T) -> Value {
    serde_json::to_value(t).expect("report types serialize infallibly")
}

/// Atomic write: temp file in the target directory, then rename.
fn write_atomic(path: &Path, contents: &str) -> Result<(), Failure> {
    let tmp = path.with_extension(format!("tmp.{}", std::process::id()));
    fs::write(&tmp, contents)
        .map_err(|e| Failure::runtime(format!("cannot write {}: {e}", tmp.display())))?;
    fs::rename(&tmp, path)
        .map_err(|e| Failure::runtime(format!("cannot rename into {}: {e}", path.display())))?;
    Ok(())
}

fn write_report(
    output: &Path,
    command: &str,
    digest: &str,
    config: Value,
    results: Value,
    started: Instant,
) -> Result<(), Failure> {
    let report = json!({
        "schema_version": SCHEMA_VERSION,
        "command": command,
        "inputs_digest": digest,
        "config": config,
        "results": results,
        "timings": {"total_ms": started.elapsed().as_secs_f64() * 1e3},
    });
    let mut text = serde_json::to_string_pretty(&report)
        .map_err(|e| Failure::runtime(e.to_string()))?;
    text.push('\n');
    write_atomic(output, &text)
}

fn parse_field(doc: &Value) -> Result<ParsedFieldSpec, Failure> {
    field_from_json(doc).map_err(|e| Failure::parse(e.to_string()))
}

fn integrator_config(step: Option<f64>, tol: Option<f64>) -> IntegratorConfig {
    let mut cfg = IntegratorConfig::default();
    if let Some(h) = step {
        cfg.step_h = h;
        cfg.method = loewner::flow::Method::RK4Fixed;
    }
    if let Some(t) = tol {
        cfg.abs_tol = t;
        cfg.rel_tol = t;
    }
    cfg
}

/// Deterministic interior sample points for a domain: a fixed direction set
/// scaled to a few radii.
fn sample_points(domain: &Domain) -> Vec<CVector> {
    let n = domain.dimension();
    let mut out = Vec::new();
    for (k, r) in [(1usize, 0.3), (2, 0.5), (3, 0.65)] {
        let v = CVector::from_fn(n, |i, _| {
            let phase = (i + 1) as f64 * 0.7 + k as f64 * 1.3;
            Cpx::from_polar(1.0 / (n as f64).sqrt(), phase)
        });
        out.push(v.map(|e| e * r));
    }
    out
}

fn run_validate(input: &Path) -> Result<u8, Failure> {
    let (_, doc) = read_input(input)?;
    parse_field(&doc)?;
    println!("{}: valid", input.display());
    Ok(0)
}

#[allow(clippy::too_many_arguments)]
fn run_flow(
    input: &Path,
    output: &Path,
    z_raw: &str,
    s: f64,
    t: f64,
    step: Option<f64>,
    tol: Option<f64>,
    dump_csv: Option<&Path>,
    started: Instant,
) -> Result<u8, Failure> {
    let (bytes, doc) = read_input(input)?;
    let spec = parse_field(&doc)?;
    let z = parse_point(z_raw)?;
    let cfg = integrator_config(step, tol);
    let config = json!({
        "s": s, "t": t, "z": cvector_value(&z),
        "integrator": to_value(&cfg),
        "conjugated": spec.mobius_anchor.is_some(),
    });

    let run = || -> loewner::Result<(Value, Vec<(f64, CVector)>)> {
        let mut trace = Vec::new();
        match &spec.mobius_anchor {
            None => {
                let res = integrate_flow_traced(&spec.field, &z, s, t, &cfg, Some(&mut trace))?;
                Ok((
                    json!({
                        "endpoint": cvector_value(&res.endpoint),
                        "jacobian": cmatrix_value(&res.jacobian),
                        "steps_taken": res.steps_taken,
                        "max_local_error_estimate": res.max_local_error_estimate,
                    }),
                    trace,
                ))
            }
            Some(a) => {
                // conjugate by the involutive automorphism exchanging the
                // anchor with the origin
                let params = MobiusParams::new(a.clone())?;
                let moved = mobius_map(&params, &z)?;
                let res =
                    integrate_flow_traced(&spec.field, &moved, s, t, &cfg, Some(&mut trace))?;
                let endpoint = mobius_map(&params, &res.endpoint)?;
                Ok((
                    json!({
                        "endpoint": cvector_value(&endpoint),
                        "steps_taken": res.steps_taken,
                        "max_local_error_estimate": res.max_local_error_estimate,
                    }),
                    trace,
                ))
            }
        }
    };

    match run() {
        Ok((results, trace)) => {
            if let Some(csv_path) = dump_csv {
                let n = z.len();
                let mut csv = String::from("t");
                for i in 1..=n {
                    csv.push_str(&format!(",re_z{i}"));
                }
                for i in 1..=n {
                    csv.push_str(&format!(",im_z{i}"));
                }
                csv.push('\n');
                for (ti, zi) in &trace {
                    csv.push_str(&format!("{ti}"));
                    for c in zi.iter() {
                        csv.push_str(&format!(",{}", c.re));
                    }
                    for c in zi.iter() {
                        csv.push_str(&format!(",{}", c.im));
                    }
                    csv.push('\n');
                }
                write_atomic(csv_path, &csv)?;
            }
            write_report(output, "flow", &digest_hex(&bytes), config, results, started)?;
            Ok(0)
        }
        Err(e) => {
            let failure = Failure::from_error(e);
            if let Some(results) = &failure.results {
                write_report(
                    output,
                    "flow",
                    &digest_hex(&bytes),
                    config,
                    results.clone(),
                    started,
                )?;
            }
            Err(failure)
        }
    }
}

fn run_chain(
    input: &Path,
    output: &Path,
    horizon: f64,
    tol: f64,
    started: Instant,
) -> Result<u8, Failure> {
    let (bytes, doc) = read_input(input)?;
    let spec = parse_field(&doc)?;
    let cfg = IntegratorConfig::strict();
    let chain =
        ChainHandle::new(spec.field.clone(), horizon, cfg).map_err(Failure::from_error)?;
    let z_set = sample_points(&spec.field.domain);
    let h_s = 1e-4;
    let s_grid: Vec<f64> = (1..=8)
        .map(|i| horizon * i as f64 / 9.0)
        .filter(|s| {
            spec.field.breakpoints.iter().all(|b| (b - s).abs() >= 2.0 * h_s)
        })
        .collect();
    let pairs: Vec<(f64, f64)> =
        vec![(0.0, horizon / 2.0), (horizon / 4.0, 3.0 * horizon / 4.0), (0.0, horizon)];

    let run = || -> loewner::Result<(Value, bool)> {
        let association = check_association(&chain, &pairs, &z_set, tol)?;
        let pde = check_lk_pde(&chain, &s_grid, &z_set, h_s, tol)?;
        let mut evaluations = Vec::new();
        for &s in &s_grid {
            for z in &z_set {
                let f = chain.eval(s, z)?;
                evaluations.push(json!({
                    "s": s,
                    "z": cvector_value(z),
                    "f": cvector_value(&f),
                }));
            }
        }
        let pass = association.pass && pde.pass;
        Ok((
            json!({
                "association": to_value(&association),
                "pde": to_value(&pde),
                "evaluations": evaluations,
                "pass": pass,
            }),
            pass,
        ))
    };
    let config = json!({
        "horizon": horizon, "tol": tol, "h_s": h_s,
        "s_grid": s_grid, "integrator": to_value(&cfg),
    });
    let (results, pass) = run().map_err(Failure::from_error)?;
    write_report(output, "chain", &digest_hex(&bytes), config, results, started)?;
    Ok(if pass { 0 } else { 2 })
}

fn run_range(
    input: &Path,
    output: &Path,
    t_max: f64,
    seed: u64,
    dump_csv: Option<&Path>,
    started: Instant,
) -> Result<u8, Failure> {
    let (bytes, doc) = read_input(input)?;
    let spec = parse_field(&doc)?;
    let thresholds = RangeThresholds { t_max, ..Default::default() };
    let cfg = IntegratorConfig::default();
    let n = spec.field.domain.dimension();
    let base_points = vec![
        CVector::zeros(n),
        CVector::from_fn(n, |i, _| Cpx::from_polar(0.25 / (n as f64).sqrt(), i as f64 + 0.4)),
    ];
    let s_values = [0.0, 0.5];
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let report = classify_range(&spec.field, &s_values, &base_points, &thresholds, &cfg, &mut rng)
        .map_err(Failure::from_error)?;
    if let Some(csv_path) = dump_csv {
        let mut csv = String::from("probe,s,t,beta\n");
        for (i, probe) in report.probes.iter().enumerate() {
            for (t, beta) in &probe.values {
                csv.push_str(&format!("{i},{},{t},{beta}\n", probe.s));
            }
        }
        write_atomic(csv_path, &csv)?;
    }
    let config = json!({
        "seed": seed, "s_values": s_values,
        "base_points": base_points.iter().map(cvector_value).collect::<Vec<_>>(),
        "thresholds": to_value(&thresholds), "integrator": to_value(&cfg),
    });
    let ok = report.classification != RangeClass::Inconclusive && report.consistent;
    write_report(output, "range", &digest_hex(&bytes), config, to_value(&report), started)?;
    Ok(if ok { 0 } else { 2 })
}

fn run_check_field(
    input: &Path,
    output: &Path,
    horizon: f64,
    tol: f64,
    seed: u64,
    started: Instant,
) -> Result<u8, Failure> {
    let (bytes, doc) = read_input(input)?;
    let spec = parse_field(&doc)?;
    let n = spec.field.domain.dimension();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut pairs = Vec::with_capacity(50);
    let random_point = |rng: &mut ChaCha8Rng| -> CVector {
        use rand_chacha::rand_core::RngCore;
        let mut f = || (rng.next_u32() as f64 / u32::MAX as f64) - 0.5;
        let v = CVector::from_fn(n, |_, _| Cpx::new(f(), f()));
        let nv = norm(&v).max(1e-6);
        v.map(|e| e / nv * 0.6)
    };
    while pairs.len() < 50 {
        let z = random_point(&mut rng);
        let w = random_point(&mut rng);
        if norm(&(&z - &w)) > 1e-3 {
            pairs.push((z, w));
        }
    }
    let times: Vec<f64> = (0..10).map(|i| horizon * (i as f64 + 0.5) / 10.0).collect();
    let sample_set: Vec<CVector> = pairs.iter().map(|(z, _)| z.clone()).collect();
    let run = || -> loewner::Result<(Value, bool)> {
        let dissipativity = check_dissipativity(&spec.field, &pairs, &times, tol)?;
        let bound = check_weak_bound(&spec.field, &sample_set, horizon, 32, 1e6)?;
        let pass = dissipativity.pass && !bound.unbounded;
        Ok((
            json!({
                "dissipativity": to_value(&dissipativity),
                "weak_bound": to_value(&bound),
                "pass": pass,
            }),
            pass,
        ))
    };
    let config = json!({
        "horizon": horizon, "tol": tol, "seed": seed,
        "pair_count": pairs.len(), "times": times,
    });
    let (results, pass) = run().map_err(Failure::from_error)?;
    write_report(output, "check-field", &digest_hex(&bytes), config, results, started)?;
    Ok(if pass { 0 } else { 2 })
}

fn run_extend(
    input: &Path,
    output: &Path,
    z_raw: &str,
    s: f64,
    t: f64,
    started: Instant,
) -> Result<u8, Failure> {
    let (bytes, doc) = read_input(input)?;
    let spec = parse_field(&doc)?;
    if spec.field.domain != Domain::UnitDisc {
        return Err(Failure::parse("the extend command lifts a disc field"));
    }
    let z = parse_point(z_raw)?;
    if z.len() < 2 {
        return Err(Failure::parse("--z must have at least two components"));
    }
    let cfg = IntegratorConfig::strict();
    let run = || -> loewner::Result<Value> {
        let chain = ChainHandle::new(spec.field.clone(), t, cfg)?;
        let lift = LiftedChain::new(chain, z.len())?;
        let f_s = lift.roper_suffridge_eval(s, &z)?;
        let phi_st = lift.lifted_evolution_eval(s, t, &z)?;
        Ok(json!({
            "chain_value": cvector_value(&f_s),
            "evolution_value": cvector_value(&phi_st),
            "evolution_norm": norm(&phi_st),
        }))
    };
    let config = json!({"s": s, "t": t, "z": cvector_value(&z), "integrator": to_value(&cfg)});
    let results = run().map_err(Failure::from_error)?;
    write_report(output, "extend", &digest_hex(&bytes), config, results, started)?;
    Ok(0)
}

fn builtin_map(name: &str) -> Option<MapUnderTest> {
    use loewner::shapes;
    match name {
        "identity" => Some(shapes::identity_map(1)),
        "identity2" => Some(shapes::identity_map(2)),
        "koebe" => Some(shapes::koebe_map()),
        "half_plane" => Some(shapes::half_plane_map()),
        "quadratic" => Some(shapes::quad_map()),
        "rescaled_quadratic" => Some(shapes::rescaled_quad_map()),
        "extended_half_plane" => Some(shapes::extended_half_plane_map()),
        _ => None,
    }
}

fn run_shape(input: &Path, output: &Path, seed: u64, started: Instant) -> Result<u8, Failure> {
    let (bytes, doc) = read_input(input)?;
    let name = doc
        .get("map")
        .and_then(Value::as_str)
        .ok_or_else(|| Failure::parse("map: expected a built-in map name"))?;
    let mut map =
        builtin_map(name).ok_or_else(|| Failure::parse(format!("map: unknown map `{name}`")))?;
    if let Some(a_doc) = doc.get("a") {
        let rows = a_doc
            .as_array()
            .ok_or_else(|| Failure::parse("a: expected a matrix as array of rows"))?;
        let n = map.domain.dimension();
        if rows.len() != n {
            return Err(Failure::parse("a: size must match the map dimension"));
        }
        let mut m = CMatrix::zeros(n, n);
        for (i, row) in rows.iter().enumerate() {
            let row = row
                .as_array()
                .filter(|r| r.len() == n)
                .ok_or_else(|| Failure::parse(format!("a[{i}]: expected {n} entries")))?;
            for (j, e) in row.iter().enumerate() {
                let pair = e
                    .as_array()
                    .filter(|p| p.len() == 2)
                    .ok_or_else(|| Failure::parse(format!("a[{i}][{j}]: expected [re, im]")))?;
                let re = pair[0].as_f64().ok_or_else(|| Failure::parse("a: numbers required"))?;
                let im = pair[1].as_f64().ok_or_else(|| Failure::parse("a: numbers required"))?;
                m[(i, j)] = Cpx::new(re, im);
            }
        }
        map.a_matrix = m;
    }
    let per_sphere = if map.domain == Domain::UnitDisc { 512 } else { 400 };
    let probes = probe_points(&map.domain, per_sphere, seed).map_err(Failure::from_error)?;
    let report = spiral_criterion(&map, &probes).map_err(Failure::from_error)?;
    let config = json!({
        "map": name, "seed": seed, "per_sphere": per_sphere,
        "a": cmatrix_value(&map.a_matrix),
    });
    let pass = report.verdict == Verdict::Pass;
    write_report(output, "shape", &digest_hex(&bytes), config, to_value(&report), started)?;
    Ok(if pass { 0 } else { 2 })
}

fn run_kernel(
    input: &Path,
    output: &Path,
    horizon: f64,
    started: Instant,
) -> Result<u8, Failure> {
    let (bytes, doc) = read_input(input)?;
    let spec = parse_field(&doc)?;
    if spec.field.domain != Domain::UnitDisc {
        return Err(Failure::parse("the kernel command works on disc fields"));
    }
    let cfg = IntegratorConfig::strict();
    let chain =
        ChainHandle::new(spec.field.clone(), horizon, cfg).map_err(Failure::from_error)?;
    // chain maps at s_k descending toward 0; inverses must converge to the
    // inverse of the s = 0 map on a fixed target set
    let s_values: Vec<f64> = (1..=5).map(|k| horizon * 0.5f64.powi(k)).collect();
    let limit = ChainDiscMap { chain: &chain, s: 0.0 };
    let targets: Vec<Cpx> = (0..8)
        .map(|j| {
            let z = Cpx::from_polar(0.3 * ((j % 4) as f64 + 1.0) / 4.0, j as f64 * 0.9)
        ;
            limit.eval(z).expect("limit map evaluation on interior points")
        })
        .collect();
    let maps: Vec<ChainDiscMap> =
        s_values.iter().map(|&s| ChainDiscMap { chain: &chain, s }).collect();
    let refs: Vec<&dyn DiscMap> = maps.iter().map(|m| m as &dyn DiscMap).collect();
    let report = loewner::chains::check_inverse_convergence(&refs, &limit, &targets)
        .map_err(Failure::from_error)?;
    let config = json!({
        "horizon": horizon, "s_values": s_values,
        "targets": targets.iter().map(|w| json!([w.re, w.im])).collect::<Vec<_>>(),
        "integrator": to_value(&cfg),
    });
    let decayed = report.decayed;
    write_report(output, "kernel", &digest_hex(&bytes), config, to_value(&report), started)?;
    Ok(if decayed { 0 } else { 2 })
}

fn dispatch(cli: Cli) -> Result<u8, Failure> {
    let started = Instant::now();
    match cli.command {
        Command::Validate { input } => run_validate(&input),
        Command::Flow { input, output, z, s, t, step, tol, seed: _, dump_csv } => run_flow(
            &input,
            &output,
            &z,
            s,
            t,
            step,
            tol,
            dump_csv.as_deref(),
            started,
        ),
        Command::Chain { input, output, horizon, tol, seed: _ } => {
            run_chain(&input, &output, horizon, tol, started)
        }
        Command::Range { input, output, t_max, seed, dump_csv } => {
            run_range(&input, &output, t_max, seed, dump_csv.as_deref(), started)
        }
        Command::CheckField { input, output, horizon, tol, seed } => {
            run_check_field(&input, &output, horizon, tol, seed, started)
        }
        Command::Extend { input, output, z, s, t } => {
            run_extend(&input, &output, &z, s, t, started)
        }
        Command::Shape { input, output, seed } => run_shape(&input, &output, seed, started),
        Command::Kernel { input, output, horizon } => {
            run_kernel(&input, &output, horizon, started)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
