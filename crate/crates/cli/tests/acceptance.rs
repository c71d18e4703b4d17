//! Acceptance checks. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any fails.

#[path = "../../core/tests/common/mod.rs"]
mod common;

use std::path::Path;
use std::process::ExitCode;
use std::sync::Arc;
use std::time::{Duration, Instant};

use fglab::cayley::{escape_constant, Ball, LinearEscape};
use fglab::cocycle::sample::{random_element, random_kernel_element};
use fglab::cocycle::{
    cocycle, cocycle_set, defect_bound, halfline_a, stabilizer_orbit_probe, ModelFile, OrbitModel, OrbitPoint,
    PiecewiseElement, PiecewiseFile, ProbeOutcome,
};
use fglab::coloring::{
    build_range_plan, build_tight_plan, condition_report, construct_coloring, verify_3proper, verify_p1, verify_p2,
    Color, ColoredBall, ColoringFile,
};
use fglab::dynamics::{free_witness, involution_apply, word_apply, Configuration};
use fglab::group::FiniteGroupTable;
use fglab::walk::{decay_classify, exact_return_probabilities, srw_estimate, DecayProfile, GraphSource};
use fglab::{Error, Group, GroupElement, VirtZData};
use fglab_cli::{run_args, DEFAULT_SEED};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::Value;

type Check = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn rng(stream: u64) -> ChaCha8Rng {
    let mut r = ChaCha8Rng::seed_from_u64(DEFAULT_SEED);
    r.set_stream(stream);
    r
}

fn random_group_element(group: &Group, rng: &mut ChaCha8Rng) -> GroupElement {
    match group {
        Group::Zd { d } => GroupElement::Zd((0..*d).map(|_| rng.gen_range(-50..=50)).collect()),
        Group::Free { rank } => {
            let len = rng.gen_range(0..10);
            let word = (0..len)
                .map(|_| {
                    let l = rng.gen_range(1..=*rank as i32);
                    if rng.gen() {
                        l
                    } else {
                        -l
                    }
                })
                .collect();
            group.mul(&group.identity(), &GroupElement::Free(word)).unwrap()
        }
        Group::VirtZ(d) => GroupElement::virtz(rng.gen_range(-40..=40), rng.gen_range(0..d.q().order())),
    }
}

fn algebra() -> Check {
    let backends = [
        Group::zd(3),
        Group::free(2),
        Group::virtz(VirtZData::infinite_dihedral()),
        Group::virtz(common::carry4()),
        Group::virtz(common::klein_dihedral()),
    ];
    let mut r = rng(1);
    for g in &backends {
        let e = g.identity();
        for _ in 0..1000 {
            let [a, b, c] = [(); 3].map(|_| random_group_element(g, &mut r));
            let mul = |x: &GroupElement, y: &GroupElement| g.mul(x, y).map_err(|e| e.to_string());
            ensure(mul(&mul(&a, &b)?, &c)? == mul(&a, &mul(&b, &c)?)?, || format!("{} not associative", g.name()))?;
            ensure(mul(&a, &e)? == a && mul(&e, &a)? == a, || format!("{} identity", g.name()))?;
            let ai = g.inverse(&a).map_err(|e| e.to_string())?;
            ensure(mul(&a, &ai)? == e && mul(&ai, &a)? == e, || format!("{} inverse", g.name()))?;
        }
    }
    let base = common::carry4();
    let (rows, f, alpha) = (base.q().rows(), base.f_rows(), base.alpha_table().to_vec());
    let mut mutants = Vec::new();
    for x in 0..4 {
        for y in 0..4 {
            let mut m = f.clone();
            m[x][y] += 1;
            mutants.push((m, alpha.clone()));
        }
        let mut a = alpha.clone();
        a[x] = -a[x];
        mutants.push((f.clone(), a));
    }
    let rejected = mutants
        .into_iter()
        .filter(|(f, a)| {
            let q = FiniteGroupTable::new(rows.clone(), 0).unwrap();
            matches!(VirtZData::new(q, f.clone(), a.clone()), Err(Error::GroupLaw { .. }))
        })
        .count();
    ensure(rejected == 20, || format!("{rejected}/20 mutated tables rejected"))?;
    Ok(format!("{} backends x 1000 triples, 20/20 mutants rejected", backends.len()))
}

fn cocycle_exactness() -> Check {
    let dinf = OrbitModel::new(Arc::new(VirtZData::infinite_dihedral()), &[]).unwrap();
    let tau = cocycle(&dinf, &PiecewiseElement::global(&dinf, (1, 0))).map_err(|e| e.to_string())?;
    ensure(tau == vec![OrbitPoint::new(0, 0), OrbitPoint::new(1, 1)], || format!("c(tau) = {tau:?}"))?;
    let refl = cocycle(&dinf, &PiecewiseElement::global(&dinf, (0, 1))).map_err(|e| e.to_string())?;
    ensure(refl.is_empty(), || format!("c(reflection) = {refl:?}"))?;

    let models = common::models();
    let mut r = rng(2);
    for i in 0..200 {
        let m = &models[i % models.len()];
        let (phi, psi) = (random_element(m, &mut r, 3), random_element(m, &mut r, 3));
        let lhs = cocycle_set(m, &phi.compose(m, &psi));
        let rhs = cocycle_set(m, &phi).symmetric_difference(&phi.image(&cocycle_set(m, &psi)));
        ensure(lhs == rhs, || format!("identity fails on pair {i}"))?;
    }
    for (i, m) in models.iter().enumerate() {
        let a = halfline_a(m);
        for _ in 0..10 {
            let phi = random_element(m, &mut r, 4);
            let inv = phi.inverse(m);
            let listed = cocycle(m, &phi).map_err(|e| e.to_string())?;
            let brute: Vec<OrbitPoint> = (0..m.lines())
                .flat_map(|line| (-200..=200).map(move |k| OrbitPoint::new(k, line)))
                .filter(|&p| a.contains(p) != a.contains(inv.apply(p)))
                .collect::<std::collections::BTreeSet<_>>()
                .into_iter()
                .collect();
            ensure(listed == brute, || format!("window brute force differs on model {i}"))?;
        }
    }
    Ok("c(tau) = {(0,line1),(1,line2)}, c(reflection) = {}, 200 pairs, 40 brute-force windows".into())
}

fn defect() -> Check {
    let mut r = rng(3);
    let mut worst: f64 = 0.0;
    for data in [VirtZData::infinite_dihedral(), common::carry4()] {
        let m = OrbitModel::new(Arc::new(data), &[]).unwrap();
        for _ in 0..100 {
            let phi = random_element(&m, &mut r, 3);
            let d = defect_bound(&m, &phi, 60);
            ensure(d.measured_max <= d.closed_form_bound, || format!("{d:?}"))?;
            worst = worst.max(d.measured_max as f64 / d.closed_form_bound.max(1) as f64);
        }
    }
    Ok(format!("200 elements on f=0 and carry instances, max measured/bound {worst:.2}"))
}

fn stabilizer_probing() -> Check {
    let models = common::models();
    let mut r = rng(4);
    let mut largest = 0;
    for i in 0..50 {
        let m = &models[i % models.len()];
        let phi = random_kernel_element(m, &mut r, 6);
        ensure(cocycle_set(m, &phi).is_empty(), || "kernel sample has nonempty cocycle".into())?;
        let p = OrbitPoint::new(r.gen_range(-20..=20), r.gen_range(0..m.lines()));
        match stabilizer_orbit_probe(m, &[phi], p, 10_000).map_err(|e| e.to_string())? {
            ProbeOutcome::Orbit(points) => largest = largest.max(points.len()),
            ProbeOutcome::CapHit { reached } => return Err(format!("orbit reached cap ({reached})")),
        }
    }
    Ok(format!("50 finite orbits, largest {largest}"))
}

fn full_suite(cb: &ColoredBall) -> Result<(), String> {
    ensure(verify_3proper(cb).ok, || "not 3-proper".into())?;
    for rep in condition_report(cb).map_err(|e| e.to_string())? {
        ensure(rep.ok(), || format!("{rep:?}"))?;
    }
    for step in &cb.plan().unwrap().steps {
        let p1 = verify_p1(cb, &step.word, step.r).map_err(|e| e.to_string())?;
        let p2 = verify_p2(cb, &step.g, step.r).map_err(|e| e.to_string())?;
        ensure(p1.ok() && p2.ok(), || format!("P1/P2 at R={}: {p1:?} {p2:?}", step.r))?;
    }
    Ok(())
}

fn paper_coloring(k: usize, radius: impl Fn(&fglab::coloring::RangePlan) -> u32) -> Result<ColoredBall, String> {
    let g = Group::zd(2);
    let gens = g.standard_generators();
    let plan = build_range_plan(&g, &gens, k, &mut LinearEscape).map_err(|e| e.to_string())?;
    let ball = Ball::build(&g, &gens, &g.identity(), radius(&plan)).map_err(|e| e.to_string())?;
    construct_coloring(ball, &plan).map_err(|e| e.to_string())
}

fn paper_k1() -> Check {
    let cb = paper_coloring(1, |_| 40)?;
    let r1 = cb.plan().unwrap().steps[0].r;
    ensure(r1 == 36, || format!("R_1 = {r1}"))?;
    full_suite(&cb)?;
    Ok(format!("Z^2 radius 40, R_1 = {r1}, {} placements", cb.placements().len()))
}

fn paper_k2() -> Check {
    let cb = paper_coloring(2, |p| p.steps[1].r + 2 * p.steps[1].r_prime)?;
    full_suite(&cb)?;
    Ok(format!("Z^2 radius {}, R_2 = {}", cb.ball().radius(), cb.plan().unwrap().steps[1].r))
}

fn tight() -> Check {
    let g = Group::free(2);
    let gens = g.standard_generators();
    let plan = build_tight_plan(&g, &gens, &[(3, 7)], &[]).map_err(|e| e.to_string())?;
    let ball = Ball::build(&g, &gens, &g.identity(), 8).map_err(|e| e.to_string())?;
    let cb = construct_coloring(ball, &plan).map_err(|e| e.to_string())?;
    full_suite(&cb)?;
    let z = Group::zd(1);
    let err = build_tight_plan(&z, &z.standard_generators(), &[(3, 7)], &[]).unwrap_err();
    ensure(matches!(err, Error::NoEscape { .. }), || format!("Z gave {err:?}"))?;
    Ok("F_2 radius 8 ranges (3,7); Z raises NoEscape".into())
}

fn dynamics() -> Check {
    let g = Group::zd(2);
    let gens = g.standard_generators();
    let plan = build_tight_plan(&g, &gens, &[(3, 9), (12, 40)], &[]).map_err(|e| e.to_string())?;
    let ball = Ball::build(&g, &gens, &g.identity(), 44).map_err(|e| e.to_string())?;
    let cb = Arc::new(construct_coloring(ball, &plan).map_err(|e| e.to_string())?);
    let full: Vec<u32> = (0..cb.ball().len() as u32).filter(|&v| cb.ball().is_full(v)).collect();
    let mut r = rng(7);
    for _ in 0..1000 {
        let cfg = Configuration::new(cb.clone(), full[r.gen_range(0..full.len())]).unwrap();
        let x = [Color::A, Color::B, Color::C][r.gen_range(0..3)];
        let twice = involution_apply(x, &involution_apply(x, &cfg).map_err(|e| e.to_string())?);
        ensure(twice.map_err(|e| e.to_string())? == cfg, || format!("{x} is not an involution"))?;
    }
    for p in cb.placements() {
        let w = &plan.steps[p.word_index - 1].word;
        let start = Configuration::new(cb.clone(), *p.path.last().unwrap()).unwrap();
        let (_, trace) = word_apply(w, &start).map_err(|e| e.to_string())?;
        let visited: Vec<u32> = std::iter::once(start.basepoint).chain(trace.iter().map(|s| s.to)).collect();
        ensure(visited.iter().rev().eq(p.path.iter()), || format!("word {w} does not retrace its placement"))?;
    }
    for step in &plan.steps {
        ensure(free_witness(&cb, &step.word).map_err(|e| e.to_string())?.moved, || format!("{} fixed", step.word))?;
    }
    Ok(format!("1000 configurations, {} placements retraced", cb.placements().len()))
}

fn escape() -> Check {
    for g in [Group::free(2), Group::zd(2)] {
        let r = escape_constant(&g, &g.standard_generators(), 1, 6).map_err(|e| e.to_string())?;
        ensure(r.k == 1, || format!("K(1) = {} on {}", r.k, g.name()))?;
    }
    let z = Group::zd(1);
    let err = escape_constant(&z, &z.standard_generators(), 1, 6).unwrap_err();
    ensure(matches!(err, Error::NoEscape { .. }), || format!("Z gave {err:?}"))?;
    Ok("K(1) = 1 on F_2 and Z^2; Z raises NoEscape".into())
}

fn binomial(n: u64, k: u64) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// Return probability of the simple walk on the free group of rank 2, from
/// the chain on word length (down 1/4, up 3/4).
fn free_return(t: usize) -> f64 {
    let mut dist = vec![0.0; t + 2];
    dist[0] = 1.0;
    for _ in 0..t {
        let mut next = vec![0.0; t + 2];
        next[1] += dist[0];
        for d in 1..=t {
            next[d - 1] += dist[d] * 0.25;
            next[d + 1] += dist[d] * 0.75;
        }
        dist = next;
    }
    dist[0]
}

fn walks() -> Check {
    let mut detail = Vec::new();
    let oracles: [(Group, fn(u64) -> f64); 2] = [
        (Group::zd(1), |n| binomial(2 * n, n) / 4f64.powi(n as i32)),
        (Group::zd(2), |n| (binomial(2 * n, n) / 4f64.powi(n as i32)).powi(2)),
    ];
    for (i, (g, oracle)) in oracles.iter().enumerate() {
        let stats = srw_estimate(&GraphSource::cayley(g), 64, 100_000, DEFAULT_SEED + i as u64).map_err(|e| e.to_string())?;
        let mut worst: f64 = 0.0;
        for n in 1..=8u64 {
            let (exact, p) = (oracle(n), stats.estimate(2 * n as u32));
            let z = (p - exact).abs() / stats.binomial_sigma(exact);
            worst = worst.max(z);
        }
        ensure(worst <= 3.0, || format!("{}: deviation {worst:.2} sigma", g.name()))?;
        let (want, tol) = [(0.5, 0.15), (1.0, 0.2)][i];
        match decay_classify(&stats).profile {
            DecayProfile::Polynomial { alpha, .. } if (alpha - want).abs() <= tol => {
                detail.push(format!("{} alpha {alpha:.3} ({worst:.2} sigma)", g.name()))
            }
            other => return Err(format!("{}: {other}", g.name())),
        }
    }
    let f2 = GraphSource::cayley(&Group::free(2));
    let exact: Vec<f64> = exact_return_probabilities(&f2, 16).map_err(|e| e.to_string())?;
    for (t, &p) in exact.iter().enumerate() {
        ensure((p - free_return(t)).abs() < 1e-12, || format!("F_2 exact value at t={t}"))?;
    }
    let stats = srw_estimate(&f2, 64, 100_000, DEFAULT_SEED + 2).map_err(|e| e.to_string())?;
    match decay_classify(&stats).profile {
        DecayProfile::Exponential { rate, .. } if (rate - 0.866).abs() <= 0.05 => {
            detail.push(format!("F_2 rate {rate:.3}"))
        }
        other => return Err(format!("F_2: {other}")),
    }
    Ok(detail.join(", "))
}

fn files(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut out: Vec<_> = std::fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let p = e.unwrap().path();
            (p.file_name().unwrap().to_string_lossy().into_owned(), std::fs::read(&p).unwrap())
        })
        .collect();
    out.sort();
    out
}

fn reproducibility() -> Check {
    let tmp = tempfile::TempDir::new().map_err(|e| e.to_string())?;
    let mut runs = Vec::new();
    for i in 0..2 {
        let out = tmp.path().join(format!("run{i}"));
        let (code, _, err) = run_args(["fglab", "color", "--group", "z2", "--radius", "40", "--out", out.to_str().unwrap()]);
        ensure(code == 0, || format!("color exited {code}: {err}"))?;
        runs.push(files(&out));
    }
    ensure(runs[0] == runs[1], || "color runs differ".into())?;

    let color = tmp.path().join("run0/color.json");
    let envelope: Value = serde_json::from_slice(&std::fs::read(&color).unwrap()).map_err(|e| e.to_string())?;
    let file: ColoringFile = serde_json::from_value(envelope["coloring"].clone()).map_err(|e| e.to_string())?;
    let cb = ColoredBall::from_file(&file).map_err(|e| e.to_string())?;
    ensure(serde_json::to_value(cb.to_file()).unwrap() == envelope["coloring"], || "coloring round trip".into())?;
    let (code, _, _) = run_args(["fglab", "verify", "--coloring", color.to_str().unwrap()]);
    ensure(code == 0, || format!("verify on reloaded coloring exited {code}"))?;

    let mut r = rng(10);
    for m in common::models() {
        let mf: ModelFile = serde_json::from_str(&serde_json::to_string(&m.to_file()).unwrap()).unwrap();
        ensure(OrbitModel::from_file(&mf).map_err(|e| e.to_string())? == m, || "model round trip".into())?;
        let phi = random_element(&m, &mut r, 4);
        let pf: PiecewiseFile = serde_json::from_str(&serde_json::to_string(&phi.to_file(&m)).unwrap()).unwrap();
        ensure(PiecewiseElement::from_file(&m, &pf).map_err(|e| e.to_string())? == phi, || "element round trip".into())?;
    }
    Ok(format!("{} files bit-identical; coloring, model and element files round-trip", runs[0].len()))
}

fn main() -> ExitCode {
    let checks: [(&str, fn() -> Check, u64); 11] = [
        ("algebra laws", algebra, 5),
        ("cocycle exactness", cocycle_exactness, 30),
        ("defect bound", defect, 60),
        ("stabilizer probing", stabilizer_probing, 60),
        ("construction paper k=1", paper_k1, 120),
        ("construction paper k=2", paper_k2, 900),
        ("construction tight", tight, 120),
        ("dynamics", dynamics, 120),
        ("escape constant", escape, 60),
        ("walks", walks, 120),
        ("reproducibility", reproducibility, 120),
    ];
    let mut failed = 0;
    for (name, check, budget) in checks {
        let start = Instant::now();
        let result = check();
        let elapsed = start.elapsed();
        let result = match result {
            Ok(d) if elapsed > Duration::from_secs(budget) => Err(format!("{d}; over {budget} s budget")),
            r => r,
        };
        match result {
            Ok(d) => println!("PASS  {name}: {d} ({:.2} s)", elapsed.as_secs_f64()),
            Err(d) => {
                failed += 1;
                println!("FAIL  {name}: {d} ({:.2} s)", elapsed.as_secs_f64());
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
