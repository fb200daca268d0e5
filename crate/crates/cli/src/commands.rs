//! Subcommand bodies. Each returns a versioned JSON report and an exit code.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use torlib::cohomology::{solve_coboundary_integral, solve_coboundary_rational};
use torlib::decomposition::unipotent_split;
use torlib::liberation::{confirm_forcing, detect_obstruction, liberate_with_box};
use torlib::linalg::{parse_rat, rat_to_string};
use torlib::minimality::{classify_minimal_t3, gamma_zero, irrationality_check, MinimalClassification};
use torlib::oracle::{
    finite_orbit_search, instantiate, orbit_min_return, orbit_points, Assignment, NumericAffineAction,
    DEFAULT_STATE_CAP,
};
use torlib::{decompose, AffineZpAction, LiberationResult, Rat, SymVec, SymbolPool};

use crate::document::{versioned, Loaded};
use crate::CliError;

pub const EXIT_OK: u8 = 0;
pub const EXIT_NOT_LIBERATED: u8 = 3;
pub const EXIT_UNKNOWN: u8 = 4;

fn to_value(x: impl serde::Serialize) -> Value {
    serde_json::to_value(x).expect("serializable")
}

fn rats(v: &[Rat]) -> Value {
    Value::Array(v.iter().map(|r| Value::String(rat_to_string(r))).collect())
}

pub fn analyze(doc: &Loaded, bound: u32) -> Result<(Value, u8), CliError> {
    let a = doc.linear();
    let fix = a.fix_set();
    let mut body = json!({
        "kind": match doc { Loaded::Linear(_) => "linear", Loaded::Affine(_) => "affine" },
        "p": a.p(),
        "q": a.q(),
        "unipotent": a.is_unipotent(),
        "fix_rank": fix.rank(),
        "fix": to_value(&fix),
        "gamma": to_value(a.dual_fix_set()),
        "summary": if fix.is_zero() { "fix trivial".to_string() } else { format!("fix rank {}", fix.rank()) },
    });
    let map = body.as_object_mut().expect("object");
    if fix.is_zero() {
        map.insert("fix_trivial".into(), Value::Bool(true));
    } else {
        let dec = decompose(a)?;
        let rational = solve_coboundary_rational(&dec)?;
        map.insert(
            "decomposition".into(),
            json!({
                "q1": dec.q1,
                "q2": dec.q2,
                "p_matrix": to_value(&dec.p_mat),
                "a1": to_value(dec.a1.gens()),
                "a2": to_value(dec.a2.gens()),
                "v": to_value(&dec.v_gens),
            }),
        );
        map.insert(
            "coboundary".into(),
            json!({
                "w0": to_value(&rational.w0),
                "integral": to_value(solve_coboundary_integral(&dec)),
            }),
        );
    }
    if let Loaded::Affine(phi) = doc {
        map.insert("box".into(), json!(bound));
        map.insert(
            "free_on_box".into(),
            match phi.free_box_check(bound) {
                None => json!({ "free": true }),
                Some(report) => json!({ "free": false, "witness": to_value(report) }),
            },
        );
    }
    Ok((versioned("analyze", body), EXIT_OK))
}

pub fn liberate(doc: &Loaded, bound: u32) -> (Value, u8) {
    let result = liberate_with_box(doc.linear(), bound);
    let code = match &result {
        LiberationResult::Liberated { .. } => EXIT_OK,
        LiberationResult::NotLiberated { .. } => EXIT_NOT_LIBERATED,
        LiberationResult::Unknown { .. } => EXIT_UNKNOWN,
    };
    (versioned("liberate", result), code)
}

pub fn minimal(doc: &Loaded) -> Result<(Value, u8), CliError> {
    match doc {
        Loaded::Affine(phi) => {
            let body = json!({
                "irrational": irrationality_check(phi),
                "gamma": to_value(phi.linear().dual_fix_set()),
                "gamma_zero": to_value(gamma_zero(phi)),
            });
            Ok((versioned("minimal", body), EXIT_OK))
        }
        Loaded::Linear(a) => {
            let class = classify_minimal_t3(a)?;
            let code = match class {
                MinimalClassification::NotLiberable => EXIT_NOT_LIBERATED,
                MinimalClassification::Unknown { .. } => EXIT_UNKNOWN,
                _ => EXIT_OK,
            };
            let mut body = to_value(&class);
            body.as_object_mut()
                .expect("object")
                .insert("label".into(), Value::String(class.label().into()));
            Ok((versioned("minimal", body), code))
        }
    }
}

pub fn obstruct(doc: &Loaded, bound: u32) -> Result<(Value, u8), CliError> {
    let a = doc.linear();
    if a.fix_set().is_zero() {
        let body = json!({
            "applicable": false,
            "reason": "fix set is trivial, so no free extension exists",
            "obstruction": null,
        });
        return Ok((versioned("obstruct", body), EXIT_NOT_LIBERATED));
    }
    let dec = decompose(a)?;
    let split = unipotent_split(&dec.a1)?;
    if !split.u1.is_trivial() || split.k != split.n() {
        let body = json!({
            "applicable": false,
            "reason": format!(
                "search needs a trivial quotient action with k = n; here k = {}, n = {}, quotient trivial: {}",
                split.k,
                split.n(),
                split.u1.is_trivial()
            ),
            "obstruction": null,
        });
        return Ok((versioned("obstruct", body), EXIT_UNKNOWN));
    }
    let found = detect_obstruction(&split, bound)?;
    let body = match &found {
        None => json!({ "applicable": true, "box": bound, "obstruction": null }),
        Some(obs) => json!({
            "applicable": true,
            "box": bound,
            "obstruction": to_value(obs),
            "confirmed": confirm_forcing(&split, obs),
        }),
    };
    let code = if found.is_some() { EXIT_NOT_LIBERATED } else { EXIT_OK };
    Ok((versioned("obstruct", body), code))
}

#[derive(Clone, Debug, Default)]
pub struct SimulateOptions {
    pub ell: Option<String>,
    pub iters: usize,
    pub assign: Vec<String>,
    pub seed: Option<u64>,
    pub x0: Option<String>,
    pub exact: bool,
}

fn input(msg: impl Into<String>) -> CliError {
    CliError::Input(msg.into())
}

fn parse_list<T>(s: &str, what: &str, f: impl Fn(&str) -> Option<T>) -> Result<Vec<T>, CliError> {
    s.split(',')
        .map(|x| f(x.trim()).ok_or_else(|| input(format!("bad {what} entry {x:?}"))))
        .collect()
}

fn parse_number(s: &str) -> Option<f64> {
    s.parse::<f64>().ok().or_else(|| parse_rat(s).ok().map(|r| rat_f64(&r)))
}

fn rat_f64(r: &Rat) -> f64 {
    use num_traits::ToPrimitive;
    r.to_f64().unwrap_or(f64::NAN)
}

/// Linear input is iterated with zero translations.
fn affine_of(doc: &Loaded) -> AffineZpAction {
    match doc {
        Loaded::Affine(a) => a.clone(),
        Loaded::Linear(a) => AffineZpAction::new(a.clone(), SymbolPool::new(), vec![SymVec::zeros(a.q()); a.p()])
            .expect("zero translations"),
    }
}

fn parse_assignments(opts: &SimulateOptions) -> Result<Vec<(String, String)>, CliError> {
    opts.assign
        .iter()
        .map(|kv| {
            kv.split_once('=')
                .map(|(k, v)| (k.trim().to_string(), v.trim().to_string()))
                .ok_or_else(|| input(format!("--assign expects name=value, got {kv:?}")))
        })
        .collect()
}

struct Setup {
    numeric: NumericAffineAction,
    ell: Vec<i64>,
    assignment: Value,
    rng: Option<ChaCha8Rng>,
}

/// Unassigned symbols draw from the seeded generator, in pool order.
fn setup(doc: &Loaded, opts: &SimulateOptions) -> Result<Setup, CliError> {
    let affine = affine_of(doc);
    let ell = match &opts.ell {
        Some(s) => parse_list(s, "--ell", |x| x.parse::<i64>().ok())?,
        None => {
            let mut e = vec![0; affine.p()];
            e[0] = 1;
            e
        }
    };
    if ell.len() != affine.p() {
        return Err(input(format!(
            "--ell has {} entries, expected {}",
            ell.len(),
            affine.p()
        )));
    }
    let given = parse_assignments(opts)?;
    for (name, _) in &given {
        if !affine.pool().contains(name) {
            return Err(input(format!("unknown symbol {name:?}")));
        }
    }
    let mut rng = opts.seed.map(ChaCha8Rng::seed_from_u64);
    let (assignment, shown) = if opts.exact {
        let mut m = BTreeMap::new();
        for (k, v) in &given {
            m.insert(k.clone(), parse_rat(v).map_err(input)?);
        }
        let shown: BTreeMap<_, _> = m.iter().map(|(k, v)| (k.clone(), rat_to_string(v))).collect();
        (Assignment::Exact(m), to_value(shown))
    } else {
        let mut m = BTreeMap::new();
        for (k, v) in &given {
            m.insert(
                k.clone(),
                parse_number(v).ok_or_else(|| input(format!("bad value for {k}: {v:?}")))?,
            );
        }
        if let Some(r) = rng.as_mut() {
            for name in affine.pool().names() {
                if !m.contains_key(name) {
                    m.insert(name.clone(), r.gen::<f64>());
                }
            }
        }
        let shown = to_value(&m);
        (Assignment::Float(m), shown)
    };
    let numeric = instantiate(&affine, &assignment).map_err(|e| match e {
        torlib::Error::MissingSymbol(name) => input(format!("no value for symbol {name:?}; pass --assign or --seed")),
        other => other.into(),
    })?;
    Ok(Setup {
        numeric,
        ell,
        assignment: shown,
        rng,
    })
}

fn start_point(opts: &SimulateOptions, q: usize, rng: Option<&mut ChaCha8Rng>) -> Result<Vec<f64>, CliError> {
    let x0 = match (&opts.x0, rng) {
        (Some(s), _) => parse_list(s, "--x0", parse_number)?,
        (None, Some(r)) => (0..q).map(|_| r.gen::<f64>()).collect(),
        (None, None) => vec![0.0; q],
    };
    if x0.len() != q {
        return Err(input(format!("--x0 has {} entries, expected {q}", x0.len())));
    }
    Ok(x0)
}

pub fn simulate(doc: &Loaded, opts: &SimulateOptions) -> Result<(Value, u8), CliError> {
    let mut s = setup(doc, opts)?;
    let q = s.numeric.q();
    if opts.exact {
        let found = finite_orbit_search(&s.numeric, &s.ell, DEFAULT_STATE_CAP)?;
        let body = json!({
            "mode": "exact",
            "ell": s.ell,
            "assignment": s.assignment,
            "translation": rats(&s.numeric.exact_translation(&s.ell)?),
            "fixed_point": found.as_deref().map(rats),
        });
        return Ok((versioned("simulate", body), EXIT_OK));
    }
    let x0 = start_point(opts, q, s.rng.as_mut())?;
    let (min_return, argmin) = orbit_min_return(&s.numeric, &s.ell, &x0, opts.iters)?;
    let points = orbit_points(&s.numeric, &s.ell, &x0, opts.iters)?;
    let body = json!({
        "mode": "float",
        "ell": s.ell,
        "iters": opts.iters,
        "assignment": s.assignment,
        "x0": x0,
        "min_return": if min_return.is_finite() { json!(min_return) } else { Value::Null },
        "argmin": argmin,
        "points": points,
    });
    Ok((versioned("simulate", body), EXIT_OK))
}

/// Orbit points as CSV: `j,x1,...,xq`.
pub fn simulate_csv(doc: &Loaded, opts: &SimulateOptions) -> Result<String, CliError> {
    let mut s = setup(doc, opts)?;
    let q = s.numeric.q();
    let x0 = start_point(opts, q, s.rng.as_mut())?;
    let points = orbit_points(&s.numeric, &s.ell, &x0, opts.iters)?;
    let mut out = String::from("j");
    for i in 1..=q {
        out.push_str(&format!(",x{i}"));
    }
    out.push('\n');
    for (j, p) in points.iter().enumerate() {
        out.push_str(&j.to_string());
        for x in p {
            out.push_str(&format!(",{x}"));
        }
        out.push('\n');
    }
    Ok(out)
}
