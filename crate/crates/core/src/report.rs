//! Canonical reports. JSON output has sorted keys, integers in decimal and
//! no floating point; big integers that do not fit in 64 bits become strings.

use std::fmt::Write as _;

use serde_json::{json, Map, Value};

use crate::bounds::bound_cubic;
use crate::cubic::{CubicReport, FixedPointRecord};
use crate::dynamics::FunctionalGraph;
use crate::engine::{
    verify_paper_claims, CertifiedCycle, Claim, EngineError, ModelStats, Multiplier, PeriodDecomposition,
    RawCycle, Session, Status, UncertifiedReason, VerdictSet,
};
use crate::models::{Extension, Model};
use crate::bounds::bound_general;

pub const TOOL_NAME: &str = "padic-periods";
pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");
pub const SCOPE: &str = "K = Q_p only (e=1)";

/// A computed fact that contradicts a stated claim.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Discrepancy {
    pub id: String,
    pub claim: String,
    pub computed: String,
}

impl Discrepancy {
    fn json(&self) -> Value {
        json!({ "id": self.id, "claim": self.claim, "computed": self.computed })
    }
}

/// A finished report in both renderings.
#[derive(Debug, Clone)]
pub struct Report {
    pub json: Value,
    pub text: String,
    /// Per-cycle failures that more precision might cure.
    pub failures: Vec<String>,
}

impl Report {
    pub fn to_json_string(&self) -> String {
        let mut s = serde_json::to_string_pretty(&self.json).expect("serializable");
        s.push('\n');
        s
    }

    pub fn discrepancies(&self) -> &[Value] {
        self.json["discrepancies"].as_array().map(Vec::as_slice).unwrap_or(&[])
    }
}

/// `u128` as a JSON integer when it fits in 64 bits, else a decimal string.
pub fn int(x: u128) -> Value {
    match u64::try_from(x) {
        Ok(v) => Value::from(v),
        Err(_) => Value::String(x.to_string()),
    }
}

fn opt_int(x: Option<u128>) -> Value {
    x.map_or(Value::Null, int)
}

fn strings<T: ToString>(xs: impl IntoIterator<Item = T>) -> Value {
    Value::Array(xs.into_iter().map(|x| Value::String(x.to_string())).collect())
}

fn model_json(model: &Model, k: u32, extension: &Extension) -> Value {
    let mut m = Map::new();
    m.insert("kind".into(), json!(model.kind().to_string()));
    m.insert("p".into(), json!(model.p()));
    m.insert("precision".into(), json!(k));
    m.insert("description".into(), json!(model.describe()));
    m.insert("dimension".into(), json!(model.dimension()));
    let (accepted, mode) = match extension {
        Extension::GoodReductionP1 => (true, "good-reduction".to_string()),
        Extension::AffineVerified(mode) => (true, mode.to_string()),
        Extension::Window => (true, "window".to_string()),
        Extension::Rejected(_) => (false, "rejected".to_string()),
    };
    m.insert(
        "extension".into(),
        json!({ "accepted": accepted, "mode": mode, "result": extension.to_string() }),
    );
    if let Model::PolyChart(c) = model {
        m.insert("floor".into(), json!(c.floor()));
        m.insert("derived_floor".into(), json!(c.derived_floor()));
    }
    Value::Object(m)
}

fn fiber_json(model: &Model, graph: Option<&FunctionalGraph>, stats: &ModelStats) -> Result<Value, EngineError> {
    let points: Vec<Value> = model
        .special_fiber()?
        .iter()
        .map(|q| {
            let image = graph.and_then(|g| g.successor(&q.coords)).map(|c| c.to_string());
            json!({
                "coords": q.coords.to_string(),
                "cotangent_dim": q.cotangent_dimension,
                "image": image,
            })
        })
        .collect();
    let cycles: Value = match graph {
        Some(g) => Value::Array(g.cycle_decomposition().into_iter().map(|(c, _)| strings(c)).collect()),
        None => Value::Null,
    };
    Ok(json!({
        "count": stats.count,
        "d_prime": stats.d_prime,
        "points": points,
        "cycles": cycles,
    }))
}

fn bounds_json(model: &Model, stats: &ModelStats) -> Value {
    let inputs = stats.bound_inputs();
    let mut m = Map::new();
    m.insert(
        "inputs".into(),
        json!({ "count": inputs.count, "p": inputs.p, "e": inputs.e, "q": inputs.q, "d_prime": inputs.dprime }),
    );
    match bound_general(&inputs) {
        Ok(b) => {
            m.insert("general".into(), int(b));
        }
        Err(e) => {
            m.insert("general".into(), Value::Null);
            m.insert("general_error".into(), json!(e.to_string()));
        }
    }
    if let (Model::PolyChart(_), Ok(b)) = (model, bound_cubic(stats.p, 1, stats.p)) {
        m.insert("cubic".into(), int(b));
    }
    Value::Object(m)
}

fn bounds_text(out: &mut String, stats: &ModelStats) {
    let _ = writeln!(
        out,
        "special fiber: |X(F_{})| = {}, d' = {}",
        stats.p, stats.count, stats.d_prime
    );
    match bound_general(&stats.bound_inputs()) {
        Ok(b) => {
            let _ = writeln!(out, "period bound: {b}");
        }
        Err(e) => {
            let _ = writeln!(out, "period bound: unavailable ({e})");
        }
    }
}

fn multiplier_json(m: &Multiplier) -> Value {
    match m {
        Multiplier::Scalar(q) => json!({
            "scale": q.scale,
            "mantissa": q.mantissa.value(),
            "precision": q.mantissa.k(),
            "valuation": q.valuation(),
        }),
        Multiplier::Matrix(rows) => json!({ "matrix": rows }),
    }
}

pub fn decomposition_json(d: &PeriodDecomposition) -> Value {
    let orbit = d.orbit.as_ref().map(|o| {
        json!({ "precision": o.precision, "center": o.center, "u": o.u, "sigma": o.sigma })
    });
    json!({
        "n": d.n,
        "n0": d.n0,
        "s": d.s,
        "r": d.r,
        "t": d.t,
        "t_max": d.t_max,
        "dim_m": d.dim_m,
        "dim_mbar": d.dim_mbar,
        "sigma_bar": d.sigma_bar.to_rows(),
        "mode": d.mode.to_string(),
        "r_full": d.r_full,
        "orbit_ring": orbit,
    })
}

fn certified_json(session: &Session, c: &CertifiedCycle, dec: Option<&Result<PeriodDecomposition, EngineError>>) -> Value {
    let mut m = Map::new();
    m.insert("status".into(), json!("certified"));
    m.insert("period".into(), json!(c.period));
    m.insert("points".into(), strings(&c.points));
    m.insert("residues".into(), strings(session.residues(&c.points)));
    m.insert("certificate".into(), json!(c.certificate.to_string()));
    m.insert("multiplier".into(), multiplier_json(&c.multiplier));
    m.insert("radius".into(), json!(c.radius));
    m.insert("separation".into(), json!(c.separation));
    m.insert("exact".into(), c.exact.as_ref().map_or(Value::Null, strings));
    match dec {
        Some(Ok(d)) => {
            m.insert("decomposition".into(), decomposition_json(d));
        }
        Some(Err(e)) => {
            m.insert("decomposition".into(), json!({ "error": e.to_string() }));
        }
        None => {}
    }
    Value::Object(m)
}

fn uncertified_json(session: &Session, raw: &RawCycle, reason: UncertifiedReason) -> Value {
    json!({
        "status": "uncertified",
        "period": raw.len(),
        "points": strings(&raw.points),
        "residues": strings(session.residues(&raw.points)),
        "reason": reason.to_string(),
    })
}

fn verdicts_json(cycle: usize, vs: &VerdictSet) -> Value {
    let p = vs.stats.p;
    let claims: Vec<Value> = vs
        .verdicts
        .iter()
        .map(|v| {
            json!({
                "claim": v.claim.to_string(),
                "inequality": v.claim.inequality(p),
                "status": v.status.to_string(),
                "lhs": opt_int(v.lhs),
                "rhs": opt_int(v.rhs),
                "note": v.note,
            })
        })
        .collect();
    let b = vs.stats.bound_inputs();
    json!({
        "cycle": cycle,
        "claims": claims,
        "decomposition": decomposition_json(&vs.decomposition),
        "bound_inputs": { "count": b.count, "p": b.p, "e": b.e, "q": b.q, "d_prime": b.dprime },
    })
}

fn show(x: Option<u128>) -> String {
    x.map_or("-".into(), |v| v.to_string())
}

fn verdicts_text(out: &mut String, vs: &VerdictSet) {
    let p = vs.stats.p;
    for v in &vs.verdicts {
        let _ = writeln!(
            out,
            "    {:<3} {:<42} {:>6} <= {:<6} {}{}",
            v.claim.to_string(),
            v.claim.inequality(p),
            show(v.lhs),
            show(v.rhs),
            v.status,
            v.note.as_ref().map(|n| format!("  ({n})")).unwrap_or_default(),
        );
    }
}

/// Claims the computation contradicts, one record per violated C3.
pub fn claim_discrepancies(sets: &[(usize, &CertifiedCycle, &VerdictSet)]) -> Vec<Discrepancy> {
    sets.iter()
        .filter(|(_, _, vs)| vs.get(Claim::C3).status == Status::Violated)
        .map(|(i, c, vs)| {
            let d = &vs.decomposition;
            let p = vs.stats.p;
            let shown = c.exact.as_ref().map_or_else(
                || c.points.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(", "),
                |e| e.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(", "),
            );
            let claim = if p == 2 {
                "t <= v(2) for p = 2".to_string()
            } else {
                "t <= v(p) - 1 when p > 2".to_string()
            };
            Discrepancy {
                id: format!("t-bound-cycle-{i}"),
                claim,
                computed: format!(
                    "cycle {{{shown}}} over Q_{p} has n = {}, n0 = {}, r = {}, t = {}",
                    d.n, d.n0, d.r, d.t
                ),
            }
        })
        .collect()
}

fn meta(subcommand: &str, input: &str) -> Value {
    json!({
        "tool": TOOL_NAME,
        "version": TOOL_VERSION,
        "scope": SCOPE,
        "subcommand": subcommand,
        "input": input,
    })
}

fn assemble(
    header: (Value, Value, Value),
    cycles: Vec<Value>,
    verdicts: Vec<Value>,
    discrepancies: &[Discrepancy],
    meta: Value,
) -> Value {
    json!({
        "model": header.0,
        "special_fiber": header.1,
        "bounds": header.2,
        "cycles": cycles,
        "verdicts": verdicts,
        "discrepancies": discrepancies.iter().map(Discrepancy::json).collect::<Vec<_>>(),
        "meta": meta,
    })
}

fn header(session: &Session) -> Result<(Value, Value, Value), EngineError> {
    let stats = session.stats();
    Ok((
        model_json(session.model(), session.precision(), session.extension()),
        fiber_json(session.model(), session.fiber_graph(), &stats)?,
        bounds_json(session.model(), &stats),
    ))
}

fn text_header(out: &mut String, session: &Session) {
    let _ = writeln!(out, "model: {}", session.model().describe());
    let _ = writeln!(out, "precision: k = {}", session.precision());
    let _ = writeln!(out, "extension: {}", session.extension());
    bounds_text(out, &session.stats());
}

/// Model checks, special-fiber statistics and bounds. The extension check
/// must already have passed.
pub fn analyze(model: &Model, k: u32, extension: &Extension, input: &str) -> Result<Report, EngineError> {
    let fiber = model.special_fiber()?;
    let stats = ModelStats {
        p: model.p(),
        e: 1,
        count: fiber.len() as u64,
        d_prime: fiber.iter().map(|q| q.cotangent_dimension).max().unwrap_or(0),
    };
    let graph = match model {
        Model::PolyChart(_) => None,
        _ => Some(FunctionalGraph::build(model)?),
    };
    let head = (
        model_json(model, k, extension),
        fiber_json(model, graph.as_ref(), &stats)?,
        bounds_json(model, &stats),
    );
    let mut text = String::new();
    let _ = writeln!(text, "model: {}", model.describe());
    let _ = writeln!(text, "extension: {extension}");
    bounds_text(&mut text, &stats);
    for q in &fiber {
        let image = graph
            .as_ref()
            .and_then(|g| g.successor(&q.coords))
            .map(|c| format!(" -> {c}"))
            .unwrap_or_default();
        let _ = writeln!(text, "  {}{image}  (cotangent dim {})", q.coords, q.cotangent_dimension);
    }
    if let Some(g) = &graph {
        for (c, len) in g.cycle_decomposition() {
            let pts: Vec<String> = c.iter().map(|x| x.to_string()).collect();
            let _ = writeln!(text, "  residue cycle of length {len}: {}", pts.join(" -> "));
        }
    }
    Ok(Report { json: assemble(head, vec![], vec![], &[], meta("analyze", input)), text, failures: vec![] })
}

/// Certified and uncertified cycles.
pub fn enumerate(session: &Session, input: &str) -> Result<Report, EngineError> {
    let e = session.certify_all()?;
    let mut cycles: Vec<Value> = e.certified.iter().map(|c| certified_json(session, c, None)).collect();
    cycles.extend(e.uncertified.iter().map(|(raw, r)| uncertified_json(session, raw, *r)));
    let mut text = String::new();
    text_header(&mut text, session);
    let _ = writeln!(
        text,
        "{} raw cycles, {} certified",
        e.raw_count(),
        e.certified.len()
    );
    for c in &e.certified {
        cycle_text(&mut text, c);
    }
    for (raw, reason) in &e.uncertified {
        let _ = writeln!(text, "  uncertified n = {}: {raw} ({reason})", raw.len());
    }
    Ok(Report {
        json: assemble(header(session)?, cycles, vec![], &[], meta("enumerate", input)),
        text,
        failures: vec![],
    })
}

fn cycle_text(out: &mut String, c: &CertifiedCycle) {
    let pts = match &c.exact {
        Some(e) => e.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(", "),
        None => c.points.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(", "),
    };
    let _ = writeln!(out, "  n = {}: {{{pts}}}  [{}, multiplier {}]", c.period, c.certificate, c.multiplier);
}

/// Decomposition and verdicts for one certified cycle.
pub fn decompose(session: &Session, cycle: &CertifiedCycle, input: &str) -> Result<Report, EngineError> {
    let dec = session.decompose(cycle)?;
    let vs = verify_paper_claims(&dec, &session.stats());
    let discrepancies = claim_discrepancies(&[(0, cycle, &vs)]);
    let mut text = String::new();
    text_header(&mut text, session);
    cycle_text(&mut text, cycle);
    let _ = writeln!(text, "  {dec}");
    let _ = writeln!(text, "  sigma_bar = {:?}", dec.sigma_bar.to_rows());
    if let Some(r) = dec.r_full {
        let _ = writeln!(text, "  order on m/m^2: {r}");
    }
    verdicts_text(&mut text, &vs);
    discrepancy_text(&mut text, &discrepancies);
    Ok(Report {
        json: assemble(
            header(session)?,
            vec![certified_json(session, cycle, Some(&Ok(dec)))],
            vec![verdicts_json(0, &vs)],
            &discrepancies,
            meta("decompose", input),
        ),
        text,
        failures: vec![],
    })
}

fn discrepancy_text(out: &mut String, ds: &[Discrepancy]) {
    for d in ds {
        let _ = writeln!(out, "discrepancy {}: claimed \"{}\"; computed: {}", d.id, d.claim, d.computed);
    }
}

/// Enumerate, decompose every certified cycle and evaluate the claims.
pub fn verify(session: &Session, input: &str) -> Result<Report, EngineError> {
    let e = session.certify_all()?;
    let stats = session.stats();
    let decs: Vec<Result<PeriodDecomposition, EngineError>> =
        e.certified.iter().map(|c| session.decompose(c)).collect();
    let mut failures = Vec::new();
    let mut sets = Vec::new();
    for (i, (c, d)) in e.certified.iter().zip(&decs).enumerate() {
        match d {
            Ok(d) => sets.push((i, c, verify_paper_claims(d, &stats))),
            Err(err) => failures.push(format!("cycle {i}: {err}")),
        }
    }
    let refs: Vec<(usize, &CertifiedCycle, &VerdictSet)> = sets.iter().map(|(i, c, v)| (*i, *c, v)).collect();
    let discrepancies = claim_discrepancies(&refs);

    let mut cycles: Vec<Value> =
        e.certified.iter().zip(&decs).map(|(c, d)| certified_json(session, c, Some(d))).collect();
    cycles.extend(e.uncertified.iter().map(|(raw, r)| uncertified_json(session, raw, *r)));
    let verdicts = sets.iter().map(|(i, _, v)| verdicts_json(*i, v)).collect();

    let mut text = String::new();
    text_header(&mut text, session);
    let _ = writeln!(text, "{} raw cycles, {} certified", e.raw_count(), e.certified.len());
    for (i, c) in e.certified.iter().enumerate() {
        cycle_text(&mut text, c);
        match &decs[i] {
            Ok(d) => {
                let _ = writeln!(text, "    {d}");
                if let Some((_, _, vs)) = sets.iter().find(|(j, _, _)| *j == i) {
                    verdicts_text(&mut text, vs);
                }
            }
            Err(err) => {
                let _ = writeln!(text, "    decomposition failed: {err}");
            }
        }
    }
    if !e.uncertified.is_empty() {
        let _ = writeln!(text, "{} uncertified raw cycles", e.uncertified.len());
    }
    discrepancy_text(&mut text, &discrepancies);
    Ok(Report {
        json: assemble(header(session)?, cycles, verdicts, &discrepancies, meta("verify", input)),
        text,
        failures,
    })
}

fn fixed_json(r: &FixedPointRecord) -> Value {
    json!({
        "location": r.location.to_string(),
        "multiplier": r.multiplier.to_string(),
        "class": r.class.map(|c| c.to_string()),
    })
}

/// The cubic workflow report.
pub fn cubic(report: &CubicReport, input: &str) -> Result<Report, EngineError> {
    let session = &report.session;
    let (model, fiber, mut bounds) = header(session)?;
    let fixed: Vec<Value> = report.fixed_points.records.iter().map(fixed_json).collect();
    bounds["cubic"] = json!({
        "value": int(report.bound.value),
        "status": report.bound.status.to_string(),
        "hypothesis_satisfied": report.bound.hypothesis_satisfied,
        "has_rational_repelling": report.has_rational_repelling,
        "fixed_points": fixed,
        "unresolved_branches": report.fixed_points.unresolved,
        "notes": report.notes,
    });
    let mut model = model;
    model["p1_extension"] = json!(report.p1_extension.to_string());
    let cycles: Vec<Value> = report
        .periods
        .iter()
        .map(|c| {
            let mut v = certified_json(session, &c.cycle, None);
            v["within_bound"] = json!(c.within_bound);
            v
        })
        .collect();

    let mut text = String::new();
    let _ = writeln!(text, "cubic: {} over Q_{}", report.polynomial, report.p);
    let _ = writeln!(text, "P^1 extension: {}", report.p1_extension);
    let _ = writeln!(text, "valuation floor B = {} (derived {})", report.floor, report.derived_floor);
    let _ = writeln!(text, "fixed points:");
    for r in &report.fixed_points.records {
        let class = r.class.map_or("unresolved".to_string(), |c| c.to_string());
        let _ = writeln!(text, "  {:<20} multiplier {:<16} {class}", r.location.to_string(), r.multiplier.to_string());
    }
    for u in &report.fixed_points.unresolved {
        let _ = writeln!(text, "  unresolved branch {u}");
    }
    let _ = writeln!(
        text,
        "rational repelling fixed point: {}",
        if report.has_rational_repelling { "yes" } else { "no" }
    );
    let _ = writeln!(
        text,
        "cubic bound: {} ({}, hypothesis {})",
        report.bound.value,
        report.bound.status,
        if report.bound.hypothesis_satisfied { "satisfied" } else { "not satisfied" }
    );
    let _ = writeln!(
        text,
        "window enumeration: {} certified cycles, max period {}, {} uncertified",
        report.periods.len(),
        report.max_period(),
        report.uncertified
    );
    for c in &report.periods {
        let mark = if c.within_bound { "<=" } else { ">" };
        let pts = match &c.cycle.exact {
            Some(e) => e.iter().map(|z| format!("z={z}")).collect::<Vec<_>>(),
            None => c.cycle.points.iter().map(|w| w.to_string()).collect(),
        };
        let _ = writeln!(text, "  n = {} {mark} {}: {{{}}}", c.cycle.period, report.bound.value, pts.join(", "));
    }
    discrepancy_text(&mut text, &report.discrepancies);
    Ok(Report {
        json: assemble((model, fiber, bounds), cycles, vec![], &report.discrepancies, meta("cubic", input)),
        text,
        failures: vec![],
    })
}
