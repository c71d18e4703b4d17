//! One function per verb. Each returns a text report and its artifacts.

use std::fmt::Write as _;
use std::sync::Arc;

use fglab::cayley::{escape_constant, growth_sequence, Ball, LinearEscape, ProbeEscape};
use fglab::cocycle::{cocycle as cocycle_points, cocycle_set, defect_bound, stabilizer_orbit_probe, DefectReport, ProbeOutcome};
use fglab::coloring::{
    build_range_plan, build_tight_plan, condition_report, construct_coloring, verify_3proper, verify_p1, verify_p2,
    ColoredBall, CoverageReport, Mode, RangePlan, Word,
};
use fglab::dynamics::free_witness;
use fglab::walk::{decay_classify, schreier_graph, srw_estimate, GraphSource, EXACT_HORIZON};
use fglab::{Error, Result};
use serde::Serialize;
use serde_json::{json, Value};

use crate::inputs::{
    load_coloring, load_element, load_model, parse_element, parse_group, parse_point, parse_ranges,
};
use crate::manifest::RunManifest;
use crate::{
    Artifact, CocycleArgs, ColorArgs, DefectArgs, EscapeArgs, Format, GrowthArgs, OracleArg, OrbitprobeArgs,
    Outcome, VerifyArgs, WalkArgs, WitnessArgs,
};

pub struct Context {
    pub seed: u64,
    pub mode: Mode,
}

fn manifest<A: Serialize>(ctx: &Context, command: &str, args: &A) -> RunManifest {
    let params = serde_json::to_value(args).expect("arguments serialize");
    RunManifest::new(command, params, ctx.seed, ctx.mode)
}

/// Pretty JSON `{"manifest": ..., key: payload, ...}` with a trailing newline.
fn envelope(m: &RunManifest, fields: Vec<(&str, Value)>) -> Artifact {
    let mut map = serde_json::Map::new();
    map.insert("manifest".into(), serde_json::to_value(m).expect("manifest serializes"));
    for (k, v) in fields {
        map.insert(k.into(), v);
    }
    let mut content = serde_json::to_string_pretty(&Value::Object(map)).expect("json serializes");
    content.push('\n');
    Artifact { name: format!("{}.json", m.command), format: Format::Json, content }
}

fn verdict(ok: bool) -> &'static str {
    if ok {
        "pass"
    } else {
        "FAIL"
    }
}

fn coverage_line(out: &mut String, label: &str, r: &CoverageReport, cb: &ColoredBall) {
    let _ = write!(out, "{label}: {} ({}/{} interior centers)", verdict(r.ok()), r.passed, r.centers);
    if let Some(v) = r.first_failure {
        let ball = cb.ball();
        let _ = write!(out, ", first failure at {}", ball.group().format(ball.vertex(v)));
    }
    out.push('\n');
}

fn coverage_json(r: &CoverageReport) -> Value {
    json!({ "radius": r.radius, "centers": r.centers, "passed": r.passed, "ok": r.ok() })
}

fn plan_lines(out: &mut String, plan: &RangePlan, cb: &ColoredBall) {
    let g = cb.ball().group();
    let _ = writeln!(out, "plan ({}, {}):", plan.mode, plan.oracle);
    for (i, s) in plan.steps.iter().enumerate() {
        let n = i + 1;
        let _ = writeln!(
            out,
            "  w{n}={} g{n}={} |g{n}|={} R{n}'={} R{n}={}",
            s.word,
            g.format(&s.g),
            s.g_len,
            s.r_prime,
            s.r
        );
    }
}

/// 3-proper, P1/P2 at each `R_i`, and conditions (1)-(3).
fn verification_suite(cb: &ColoredBall) -> Result<(String, Value, bool)> {
    let mut out = String::new();
    let proper = verify_3proper(cb);
    let _ = writeln!(out, "3-proper: {}", verdict(proper.ok));
    let mut ok = proper.ok;
    let mut steps = Vec::new();
    if let Some(plan) = cb.plan() {
        let conditions = condition_report(cb)?;
        for (i, (s, c)) in plan.steps.iter().zip(&conditions).enumerate() {
            let n = i + 1;
            let p1 = verify_p1(cb, &s.word, s.r)?;
            let p2 = verify_p2(cb, &s.g, s.r)?;
            coverage_line(&mut out, &format!("P1 w{n}={} R={}", s.word, s.r), &p1, cb);
            coverage_line(&mut out, &format!("P2 g{n}={} R={}", cb.ball().group().format(&s.g), s.r), &p2, cb);
            coverage_line(&mut out, &format!("condition (1) word {n}"), &c.condition1, cb);
            coverage_line(&mut out, &format!("condition (2) word {n}"), &c.condition2, cb);
            let _ = writeln!(
                out,
                "condition (3) word {n}: {} ({} protection violations)",
                verdict(c.protection_violations == 0),
                c.protection_violations
            );
            ok &= p1.ok() && p2.ok() && c.ok();
            steps.push(json!({
                "word_index": n,
                "p1": coverage_json(&p1),
                "p2": coverage_json(&p2),
                "condition1": coverage_json(&c.condition1),
                "condition2": coverage_json(&c.condition2),
                "protection_violations": c.protection_violations,
            }));
        }
    }
    let _ = writeln!(out, "result: {}", if ok { "PASS" } else { "FAIL" });
    let report = json!({ "three_proper": proper.ok, "steps": steps, "ok": ok });
    Ok((out, report, ok))
}

pub fn color(ctx: &Context, a: &ColorArgs) -> Result<Outcome> {
    let mut m = manifest(ctx, "color", a);
    let group = parse_group(&a.group, &mut m)?;
    let gens = group.standard_generators();
    let plan = match ctx.mode {
        Mode::Paper => {
            if a.ranges.is_some() {
                return Err(Error::Parse("--ranges needs --mode tight".into()));
            }
            let k = a.k.unwrap_or(1);
            match a.oracle {
                OracleArg::Linear => build_range_plan(&group, &gens, k, &mut LinearEscape)?,
                OracleArg::Probe => build_range_plan(&group, &gens, k, &mut ProbeEscape::new(&group, &gens, a.probe_margin))?,
            }
        }
        Mode::Tight => {
            let ranges = parse_ranges(a.ranges.as_deref().ok_or_else(|| Error::Parse("tight mode needs --ranges".into()))?)?;
            if a.k.is_some_and(|k| k != ranges.len()) {
                return Err(Error::Parse("--k must equal the number of ranges".into()));
            }
            let overrides = a
                .elements
                .iter()
                .map(|s| if s == "-" { Ok(None) } else { parse_element(&group, s).map(Some) })
                .collect::<Result<Vec<_>>>()?;
            build_tight_plan(&group, &gens, &ranges, &overrides)?
        }
    };
    let ball = Ball::build_capped(&group, &gens, &group.identity(), a.radius, a.cap)?;
    let cb = construct_coloring(ball, &plan)?;

    let mut report = String::new();
    let _ = writeln!(
        report,
        "coloring of {} radius {}: {} vertices, {} edges, {} placements",
        group.name(),
        a.radius,
        cb.ball().len(),
        cb.ball().edges().len(),
        cb.placements().len()
    );
    plan_lines(&mut report, &plan, &cb);
    let (suite, suite_json, ok) = verification_suite(&cb)?;
    report.push_str(&suite);

    let file = serde_json::to_value(cb.to_file()).expect("coloring serializes");
    let json = envelope(&m, vec![("coloring", file), ("report", suite_json)]);
    let dot = Artifact { name: "color.dot".into(), format: Format::Dot, content: cb.to_dot() };
    Ok(Outcome { report, artifacts: vec![json, dot], passed: ok })
}

pub fn verify(ctx: &Context, a: &VerifyArgs) -> Result<Outcome> {
    let mut m = manifest(ctx, "verify", a);
    let cb = load_coloring(&a.coloring, &mut m)?;
    let mut report = format!("coloring of {} radius {}\n", cb.ball().group().name(), cb.ball().radius());
    let (text, json, ok) = if a.word.is_some() || a.element.is_some() {
        let r = a.range.ok_or_else(|| Error::Parse("--word and --element need --range".into()))?;
        let mut text = String::new();
        let mut ok = true;
        let mut checks = Vec::new();
        if let Some(w) = &a.word {
            let w: Word = w.parse()?;
            let p1 = verify_p1(&cb, &w, r)?;
            coverage_line(&mut text, &format!("P1 {w} R={r}"), &p1, &cb);
            ok &= p1.ok();
            checks.push(json!({ "p1": coverage_json(&p1) }));
        }
        if let Some(g) = &a.element {
            let g = parse_element(cb.ball().group(), g)?;
            let p2 = verify_p2(&cb, &g, r)?;
            coverage_line(&mut text, &format!("P2 {} R={r}", cb.ball().group().format(&g)), &p2, &cb);
            ok &= p2.ok();
            checks.push(json!({ "p2": coverage_json(&p2) }));
        }
        let _ = writeln!(text, "result: {}", if ok { "PASS" } else { "FAIL" });
        (text, json!({ "checks": checks, "ok": ok }), ok)
    } else {
        if let Some(plan) = cb.plan() {
            plan_lines(&mut report, plan, &cb);
        }
        verification_suite(&cb)?
    };
    report.push_str(&text);
    let artifact = envelope(&m, vec![("report", json)]);
    Ok(Outcome { report, artifacts: vec![artifact], passed: ok })
}

pub fn witness(ctx: &Context, a: &WitnessArgs) -> Result<Outcome> {
    let mut m = manifest(ctx, "witness", a);
    let cb = Arc::new(load_coloring(&a.coloring, &mut m)?);
    let w: Word = a.word.parse()?;
    let wit = free_witness(&cb, &w)?;
    let ball = cb.ball();
    let g = ball.group();
    let fmt = |v: u32| g.format(ball.vertex(v));
    let visited: Vec<u32> = wit.trace.iter().map(|s| s.to).collect();
    let reversed: Vec<u32> = wit.path.iter().rev().skip(1).copied().collect();
    let reverses_path = visited == reversed;

    let mut report = format!("word {w} applied at {}\n", fmt(wit.start.basepoint));
    for s in &wit.trace {
        let _ = writeln!(report, "  {}: {} -> {}", s.letter, fmt(s.from), fmt(s.to));
    }
    let _ = writeln!(report, "end {}", fmt(wit.end.basepoint));
    let _ = writeln!(report, "moved: {}", wit.moved);
    let _ = writeln!(report, "trace reverses the marked path: {reverses_path}");

    let trace: Vec<Value> = wit
        .trace
        .iter()
        .map(|s| json!({ "letter": s.letter, "from": g.element_to_json(ball.vertex(s.from)), "to": g.element_to_json(ball.vertex(s.to)) }))
        .collect();
    let payload = json!({
        "word": w.to_string(),
        "path": wit.path.iter().map(|&v| g.element_to_json(ball.vertex(v))).collect::<Vec<_>>(),
        "start": g.element_to_json(ball.vertex(wit.start.basepoint)),
        "end": g.element_to_json(ball.vertex(wit.end.basepoint)),
        "moved": wit.moved,
        "reverses_path": reverses_path,
        "trace": trace,
    });
    let artifact = envelope(&m, vec![("witness", payload)]);
    Ok(Outcome { report, artifacts: vec![artifact], passed: true })
}

fn defect_lines(out: &mut String, d: &DefectReport) -> bool {
    let ok = d.measured_max <= d.closed_form_bound;
    let _ = writeln!(out, "defect over |k| <= {}: measured {}", d.window, d.measured_max);
    let _ = writeln!(
        out,
        "closed-form bound: displacement {} x max(1, 2*{} + {}) = {} ({})",
        d.displacement,
        d.f0,
        d.l0,
        d.closed_form_bound,
        verdict(ok)
    );
    let _ = writeln!(out, "cocycle window: {}", d.cocycle_window);
    ok
}

fn defect_json(d: &DefectReport) -> Value {
    json!({
        "window": d.window,
        "measured_max": d.measured_max,
        "displacement": d.displacement,
        "f0": d.f0,
        "l0": d.l0,
        "closed_form_bound": d.closed_form_bound,
        "cocycle_window": d.cocycle_window,
        "ok": d.measured_max <= d.closed_form_bound,
    })
}

pub fn cocycle(ctx: &Context, a: &CocycleArgs) -> Result<Outcome> {
    let mut m = manifest(ctx, "cocycle", a);
    let model = load_model(&a.model, &mut m)?;
    let phi = load_element(&model, &a.element, &mut m)?;
    let points = cocycle_points(&model, &phi)?;
    let mut report = format!("cocycle ({} points):\n", points.len());
    for p in &points {
        let _ = writeln!(report, "  {p}");
    }
    let d = defect_bound(&model, &phi, a.window);
    let mut ok = defect_lines(&mut report, &d);
    let mut identity = Value::Null;
    if let Some(path) = &a.second {
        let psi = load_element(&model, path, &mut m)?;
        let lhs = cocycle_set(&model, &phi.compose(&model, &psi));
        let rhs = cocycle_set(&model, &phi).symmetric_difference(&phi.image(&cocycle_set(&model, &psi)));
        let holds = lhs == rhs;
        ok &= holds;
        let _ = writeln!(report, "identity c(phi psi) = c(phi) xor phi(c(psi)): {}", verdict(holds));
        identity = json!(holds);
    }
    let listing: Vec<Value> = points.iter().map(|p| json!({ "k": p.k, "line": p.line + 1 })).collect();
    let artifact = envelope(
        &m,
        vec![("cocycle", json!(listing)), ("size", json!(points.len())), ("defect", defect_json(&d)), ("identity", identity)],
    );
    Ok(Outcome { report, artifacts: vec![artifact], passed: ok })
}

pub fn defect(ctx: &Context, a: &DefectArgs) -> Result<Outcome> {
    let mut m = manifest(ctx, "defect", a);
    let model = load_model(&a.model, &mut m)?;
    let phi = load_element(&model, &a.element, &mut m)?;
    let d = defect_bound(&model, &phi, a.window);
    let mut report = String::new();
    let ok = defect_lines(&mut report, &d);
    let artifact = envelope(&m, vec![("defect", defect_json(&d))]);
    Ok(Outcome { report, artifacts: vec![artifact], passed: ok })
}

pub fn orbitprobe(ctx: &Context, a: &OrbitprobeArgs) -> Result<Outcome> {
    let mut m = manifest(ctx, "orbitprobe", a);
    let model = load_model(&a.model, &mut m)?;
    let family = a.elements.iter().map(|p| load_element(&model, p, &mut m)).collect::<Result<Vec<_>>>()?;
    let p = parse_point(&a.point)?;
    let outcome = stabilizer_orbit_probe(&model, &family, p, a.cap)?;
    let mut report = String::new();
    let payload = match &outcome {
        ProbeOutcome::Orbit(points) => {
            let _ = writeln!(report, "orbit of {p}: {} points (cap {})", points.len(), a.cap);
            for q in points {
                let _ = writeln!(report, "  {q}");
            }
            json!({ "finite": true, "size": points.len(), "points": points.iter().map(|q| json!({ "k": q.k, "line": q.line + 1 })).collect::<Vec<_>>() })
        }
        ProbeOutcome::CapHit { reached } => {
            let _ = writeln!(report, "orbit of {p} reached the cap: {reached} points");
            json!({ "finite": false, "reached": reached })
        }
    };
    let artifact = envelope(&m, vec![("probe", payload)]);
    Ok(Outcome { report, artifacts: vec![artifact], passed: true })
}

pub fn walk(ctx: &Context, a: &WalkArgs) -> Result<Outcome> {
    let mut m = manifest(ctx, "walk", a);
    let mut artifacts = Vec::new();
    let source = match (&a.group, &a.model) {
        (Some(g), None) => GraphSource::cayley(&parse_group(g, &mut m)?),
        (None, Some(path)) => {
            let model = load_model(path, &mut m)?;
            let graph = schreier_graph(&model, a.window.unwrap_or(a.max_time));
            artifacts.push(Artifact { name: "walk.dot".into(), format: Format::Dot, content: graph.to_dot() });
            GraphSource::Action(graph)
        }
        _ => return Err(Error::Parse("walk needs exactly one of --group and --model".into())),
    };
    let stats = srw_estimate(&source, a.max_time, a.trials, ctx.seed)?;
    let decay = decay_classify(&stats);

    let mut report = format!(
        "{}: {} trials, max time {}, seed {}\n  t  exact        estimate     stderr\n",
        stats.source, stats.trials, stats.max_time, stats.seed
    );
    for t in (2..=stats.max_time.min(EXACT_HORIZON)).step_by(2) {
        let p = stats.estimate(t);
        let exact = stats.exact_at(t).map(|e| format!("{e:.8}")).unwrap_or_default();
        let _ = writeln!(report, "{t:>3}  {exact:<12} {p:<12.8} {:.2e}", stats.binomial_sigma(p));
    }
    let _ = writeln!(report, "max deviation from exact: {:.2} sigma", stats.max_deviation());
    for (name, fit) in [("polynomial", &decay.polynomial_fit), ("exponential", &decay.exponential_fit)] {
        if let Some(f) = fit {
            let _ = writeln!(report, "{name} fit: rss {:.4e} over {} points", f.rss, f.points);
        }
    }
    let _ = writeln!(report, "profile: {}", decay.profile);

    artifacts.insert(
        0,
        envelope(
            &m,
            vec![
                ("stats", serde_json::to_value(&stats).expect("stats serialize")),
                ("decay", serde_json::to_value(&decay).expect("decay serializes")),
            ],
        ),
    );
    artifacts.push(Artifact { name: "walk.csv".into(), format: Format::Csv, content: stats.to_csv() });
    Ok(Outcome { report, artifacts, passed: true })
}

pub fn escape(ctx: &Context, a: &EscapeArgs) -> Result<Outcome> {
    let mut m = manifest(ctx, "escape", a);
    let group = parse_group(&a.group, &mut m)?;
    let r = escape_constant(&group, &group.standard_generators(), a.n, a.probe_radius)?;
    let report = format!(
        "K({}) = {} on {} (probe radius {}, {} maximal segments)\nwitness {} for segment {}\n",
        r.n,
        r.k,
        group.name(),
        r.probe_radius,
        r.segments,
        group.format(&r.witness),
        r.worst_segment.iter().map(|g| group.format(g)).collect::<Vec<_>>().join(" ")
    );
    let payload = json!({
        "n": r.n,
        "k": r.k,
        "probe_radius": r.probe_radius,
        "segments": r.segments,
        "witness": group.element_to_json(&r.witness),
        "worst_segment": r.worst_segment.iter().map(|g| group.element_to_json(g)).collect::<Vec<_>>(),
    });
    Ok(Outcome { report, artifacts: vec![envelope(&m, vec![("escape", payload)])], passed: true })
}

pub fn growth(ctx: &Context, a: &GrowthArgs) -> Result<Outcome> {
    let mut m = manifest(ctx, "growth", a);
    let group = parse_group(&a.group, &mut m)?;
    let g = growth_sequence(&group, &group.standard_generators(), a.max_r, a.cap)?;
    let mut report = format!("ball sizes of {}:\n", group.name());
    for (r, n) in g.sizes.iter().enumerate() {
        let _ = writeln!(report, "  |B_{r}| = {n}");
    }
    let _ = writeln!(report, "linear growth: {}", g.linear);
    let artifact = envelope(&m, vec![("sizes", json!(g.sizes)), ("linear", json!(g.linear))]);
    Ok(Outcome { report, artifacts: vec![artifact], passed: true })
}
