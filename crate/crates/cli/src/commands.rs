//! Report assembly for each subcommand.

use serde_json::{json, to_value, Value};

use stacky_core::crossedmod::{quasilattice_iso, verify_iso_certificate, CrossedModError, IsoVerdict};
use stacky_core::exact::Scalar;
use stacky_core::fingroupoid::{
    check_crossed_morita, check_principal, classify_action_groupoid, finite_morita_moves, isotropy_report,
    leafwise_witness, obstruction_groupoid, reduction_groupoid, regular_action, validate_action, FinError,
    MoveOutcome,
};
use stacky_core::io::{certificate_json, parse_finite_model, parse_morita_pair, parse_stacky_polytope, InputError, SCHEMA};
use stacky_core::prato::{self, build_prato_data, PratoError, SamplingConfig, RNG_ALGORITHM};

pub struct Config {
    pub seed: u64,
    pub samples: usize,
    pub grid: f64,
    pub bound: i64,
}

impl Config {
    fn job(&self, command: &str) -> Value {
        json!({
            "command": command,
            "seed": self.seed,
            "samples": self.samples,
            "grid": self.grid,
            "bound": self.bound,
            "rng": RNG_ALGORITHM,
        })
    }
}

/// An error body for stderr and its exit code.
#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub body: Value,
}

impl Failure {
    pub fn usage(message: String) -> Self {
        Failure { code: 2, body: json!({"error": "usage", "message": message}) }
    }

    fn math(kind: &str, message: String) -> Self {
        Failure { code: 3, body: json!({"error": kind, "message": message}) }
    }
}

impl From<InputError> for Failure {
    fn from(e: InputError) -> Self {
        let code = if matches!(e, InputError::Schema { .. }) { 2 } else { 3 };
        Failure { code, body: e.to_json() }
    }
}

impl From<PratoError> for Failure {
    fn from(e: PratoError) -> Self {
        let kind = match &e {
            PratoError::Data(_) => "data",
            PratoError::Precondition(_) => "precondition",
            PratoError::Wall { .. } => "wall",
            PratoError::LevelOutside(_) => "level",
            PratoError::Input(_) => "input",
            PratoError::Polytope(_) => "polytope",
            PratoError::CrossedMod(_) => "quasi_lattice",
            PratoError::Field(_) => "field",
        };
        Failure::math(kind, e.to_string())
    }
}

impl From<FinError> for Failure {
    fn from(e: FinError) -> Self {
        InputError::Finite(e).into()
    }
}

impl From<CrossedModError> for Failure {
    fn from(e: CrossedModError) -> Self {
        let kind = match &e {
            CrossedModError::CertificateInvalid(_) => "certificate",
            _ => "quasi_lattice",
        };
        Failure::math(kind, e.to_string())
    }
}

fn check_grid(grid: f64) -> Result<(), Failure> {
    if grid.is_finite() && grid > 0.0 && grid <= 1.0 {
        Ok(())
    } else {
        Err(Failure::usage(format!("--grid must lie in (0, 1], got {grid}")))
    }
}

pub fn analyze(text: &str, cfg: &Config) -> Result<Value, Failure> {
    check_grid(cfg.grid)?;
    let (s, cover) = parse_stacky_polytope(text)?;
    let sampling = SamplingConfig { seed: cfg.seed, samples: cfg.samples, grid: cfg.grid, ..SamplingConfig::default() };
    let report = prato::analyze(&s, cover, &sampling)?;
    let mut v = to_value(&report).expect("report serializes");
    v["job"] = cfg.job("analyze");
    Ok(v)
}

fn parse_xi(xi: &str) -> Result<Vec<Scalar>, Failure> {
    xi.split(',')
        .map(|t| t.trim().parse::<Scalar>().map_err(|e| Failure::usage(format!("bad --xi entry {t:?}: {e}"))))
        .collect()
}

/// Summary JSON and the CSV table.
pub fn dh_scan(text: &str, xi: &str, cfg: &Config) -> Result<(Value, String), Failure> {
    check_grid(cfg.grid)?;
    let xi = parse_xi(xi)?;
    let (s, cover) = parse_stacky_polytope(text)?;
    let d = build_prato_data(&s, cover)?;
    let report = prato::dh_scan(&d, &s, &xi, cfg.grid)?;
    let mut csv = Vec::new();
    prato::write_csv_rows(&report.rows, &mut csv).expect("writing to memory");
    let mut v = to_value(&report).expect("report serializes");
    v["schema"] = json!(SCHEMA);
    v["job"] = cfg.job("dh-scan");
    v["rows"] = json!(report.rows.len());
    Ok((v, String::from_utf8(csv).expect("CSV is UTF-8")))
}

fn move_json(outcome: &Option<Result<MoveOutcome, FinError>>, input: &stacky_core::fingroupoid::FiniteCrossedModule) -> Value {
    match outcome {
        None => Value::Null,
        Some(Err(e)) => json!({"ok": false, "error": e.to_string()}),
        Some(Ok(m)) => {
            let (from, to) = if m.into_input { (&m.module, input) } else { (input, &m.module) };
            let recheck = check_crossed_morita(from, to, &m.morphism);
            json!({
                "ok": true,
                "g_order": m.module.g.order(),
                "h_order": m.module.h.order(),
                "morphism": m.morphism,
                "into_input": m.into_input,
                "report": m.report,
                "is_morita": m.report.is_morita(),
                "reverified": matches!(&recheck, Ok(r) if *r == m.report),
            })
        }
    }
}

pub fn finite_check(text: &str, cfg: &Config) -> Result<Value, Failure> {
    let (model, moves) = parse_finite_model(text)?;
    let (cm, x, a) = (&model.cm, &model.groupoid, &model.action);
    let action = validate_action(cm, x, a)?;
    if let Some(v) = &action.violation {
        return Err(Failure {
            code: 3,
            body: json!({"error": "action", "equation": v.equation, "tuple": v.tuple, "message": v.detail}),
        });
    }
    let leafwise = leafwise_witness(cm, x, a);
    let regularity = regular_action(cm, x, a);

    let (reduction, principal) = match reduction_groupoid(cm, x, a) {
        Ok(red) => {
            let q = &red.groupoid;
            let psi = red.quotient_map(cm, x);
            let p = check_principal(cm, x, a, q, &psi)?;
            (
                json!({
                    "constructed": true,
                    "objects": q.objects(),
                    "arrows": q.arrows(),
                    "isotropy": isotropy_report(q),
                    "axioms_checked": true,
                }),
                to_value(&p).expect("serializes"),
            )
        }
        Err(FinError::NotFree { h, f }) => (
            json!({"constructed": false, "witness": {"h": h, "f": f}}),
            json!({"principal": false, "note": "H does not act freely on arrows, so no reduction groupoid exists"}),
        ),
        Err(e) => return Err(e.into()),
    };

    let obstruction = obstruction_groupoid(cm, x, a)?;
    let obstruction_isotropy = isotropy_report(&obstruction);
    let classification = match classify_action_groupoid(cm, x, a) {
        Ok(Some(c)) => json!({"found": true, "z": c.z, "quotient_order": c.quotient_order, "iso": c.iso}),
        Ok(None) => json!({"found": false, "note": "no normal form H/Z ⋉ X0 matches"}),
        Err(FinError::Precondition(m)) => json!({"found": false, "note": m}),
        Err(e) => return Err(e.into()),
    };
    let mr = finite_morita_moves(cm, &moves);

    Ok(json!({
        "schema": SCHEMA,
        "job": cfg.job("finite-check"),
        "sizes": {
            "g_order": cm.g.order(),
            "h_order": cm.h.order(),
            "objects": x.objects(),
            "arrows": x.arrows(),
        },
        "action": action,
        "leafwise_transitive": leafwise.is_none(),
        "leafwise_witness": leafwise,
        "regularity": regularity,
        "reduction": reduction,
        "principal": principal,
        "isotropy": isotropy_report(x),
        "obstruction": {
            "objects": obstruction.objects(),
            "arrows": obstruction.arrows(),
            "isotropy": obstruction_isotropy,
            "max_isotropy": obstruction_isotropy.iter().max().copied().unwrap_or(1),
        },
        "classification": classification,
        "moves": {
            "restrict": move_json(&mr.restricted, cm),
            "extend": move_json(&mr.extended, cm),
            "quotient": move_json(&mr.quotient, cm),
        },
    }))
}

pub fn morita(text: &str, cfg: &Config) -> Result<Value, Failure> {
    if cfg.bound < 0 {
        return Err(Failure::usage(format!("--bound must be non-negative, got {}", cfg.bound)));
    }
    let (left, right, cert) = parse_morita_pair(text)?;
    let verdict = quasilattice_iso(&left, &right, cert.as_ref(), cfg.bound)?;
    let body = match verdict {
        IsoVerdict::Equivalent(c) => {
            let reverified = verify_iso_certificate(&left, &right, &c).is_ok();
            json!({
                "verdict": "equivalent",
                "certificate": certificate_json(&c),
                "certificate_supplied": cert.is_some(),
                "reverified": reverified,
            })
        }
        IsoVerdict::Inequivalent(m) => json!({
            "verdict": "inequivalent",
            "summary": format!("inequivalent: {}", m.join(", ")),
            "mismatches": m,
        }),
        IsoVerdict::Unknown { bound, candidates_checked, reason } => json!({
            "verdict": "unknown",
            "bound": bound,
            "candidates_checked": candidates_checked,
            "reason": reason,
        }),
    };
    let mut v = json!({"schema": SCHEMA, "job": cfg.job("morita")});
    v.as_object_mut().unwrap().extend(body.as_object().unwrap().clone());
    Ok(v)
}
