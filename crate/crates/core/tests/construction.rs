use std::collections::{HashSet, VecDeque};

use fglab::cayley::{Ball, LinearEscape, NONE};
use fglab::coloring::{
    build_range_plan, build_tight_plan, condition_report, construct_coloring, verify_3proper, verify_p1, verify_p2,
    Color, ColoredBall, Word,
};
use fglab::{Error, Group, GroupElement};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn tight(group: &Group, ranges: &[(u32, u32)], radius: u32) -> ColoredBall {
    let gens = group.standard_generators();
    let plan = build_tight_plan(group, &gens, ranges, &[]).unwrap();
    construct_coloring(Ball::build(group, &gens, &group.identity(), radius).unwrap(), &plan).unwrap()
}

fn assert_all_checks(cb: &ColoredBall) {
    assert!(verify_3proper(cb).ok);
    let reports = condition_report(cb).unwrap();
    assert!(!reports.is_empty());
    for r in reports {
        assert!(r.ok(), "{r:?}");
    }
}

#[test]
fn z2_two_words_at_paper_radius() {
    let g = Group::zd(2);
    let gens = g.standard_generators();
    let plan = build_range_plan(&g, &gens, 2, &mut LinearEscape).unwrap();
    let radius = plan.max_r() + 2;
    assert!(radius <= 200, "radius {radius}");
    let cb = construct_coloring(Ball::build(&g, &gens, &g.identity(), radius).unwrap(), &plan).unwrap();
    assert_all_checks(&cb);
}

#[test]
fn free_group_tight_radius_eight() {
    let cb = tight(&Group::free(2), &[(3, 7)], 8);
    assert_all_checks(&cb);
}

#[test]
fn virtually_cyclic_groups_have_no_plan() {
    for g in [Group::zd(1), Group::virtz(fglab::VirtZData::infinite_dihedral())] {
        let gens = g.standard_generators();
        let err = build_range_plan(&g, &gens, 1, &mut LinearEscape).unwrap_err();
        assert!(matches!(err, Error::NoEscape { .. }), "{err:?}");
    }
}

/// Vertices of the ball within graph distance `r` of `v`.
fn neighborhood(ball: &Ball, v: u32, r: u32) -> HashSet<u32> {
    let mut seen = HashSet::from([v]);
    let mut queue = VecDeque::from([(v, 0)]);
    while let Some((x, d)) = queue.pop_front() {
        if d == r {
            continue;
        }
        for s in 0..ball.gens().len() {
            let y = ball.nbr(x, s);
            if y != NONE && seen.insert(y) {
                queue.push_back((y, d + 1));
            }
        }
    }
    seen
}

/// Marked copies by direct enumeration of generator sequences.
fn naive_marked(cb: &ColoredBall, w: &Word) -> Vec<Vec<u32>> {
    let ball = cb.ball();
    let n = ball.gens().len();
    let mut out = Vec::new();
    let mut seqs: Vec<Vec<usize>> = vec![vec![]];
    for _ in 0..w.len() {
        seqs = seqs.into_iter().flat_map(|s| (0..n).map(move |g| [s.clone(), vec![g]].concat())).collect();
    }
    for t in 0..ball.len() as u32 {
        'seq: for seq in &seqs {
            let mut path = vec![t];
            let mut used = HashSet::new();
            for (j, &s) in seq.iter().enumerate() {
                let v = path[j];
                let e = ball.edge_at(v, s);
                if e == NONE || cb.color(e) != w.letters()[j] {
                    continue 'seq;
                }
                used.insert(e);
                path.push(ball.nbr(v, s));
            }
            for (j, &v) in path.iter().enumerate() {
                let mark = if j == 0 { Color::D } else { Color::E };
                for s in 0..n {
                    let e = ball.edge_at(v, s);
                    if e == NONE || (!used.contains(&e) && cb.color(e) != mark) {
                        continue 'seq;
                    }
                }
            }
            out.push(path);
        }
    }
    out.sort();
    out.dedup();
    out
}

fn interior(ball: &Ball, r: u32) -> Vec<u32> {
    (0..ball.len() as u32).filter(|&v| ball.dist(v) + r <= ball.radius()).collect()
}

fn naive_p1(cb: &ColoredBall, w: &Word, r: u32) -> (usize, Option<u32>) {
    let ball = cb.ball();
    let objects: Vec<Vec<u32>> = naive_marked(cb, w)
        .into_iter()
        .map(|p| p.iter().flat_map(|&v| (0..ball.gens().len()).map(move |s| ball.nbr(v, s)).chain([v])).collect())
        .collect();
    tally(ball, r, |near| objects.iter().any(|o| o.iter().all(|x| near.contains(x))))
}

fn naive_p2(cb: &ColoredBall, g: &GroupElement, r: u32) -> (usize, Option<u32>) {
    let ball = cb.ball();
    let mut objects = Vec::new();
    for x in 0..ball.len() as u32 {
        let Some(xg) = ball.index_of(&ball.group().mul(ball.vertex(x), g).unwrap()) else { continue };
        for s in 0..ball.gens().len() {
            let (e1, e2) = (ball.edge_at(x, s), ball.edge_at(xg, s));
            if e1 != NONE && e2 != NONE && cb.color(e1) != cb.color(e2) {
                objects.push([x, ball.nbr(x, s), xg, ball.nbr(xg, s)]);
            }
        }
    }
    tally(ball, r, |near| objects.iter().any(|o| o.iter().all(|x| near.contains(x))))
}

fn tally(ball: &Ball, r: u32, hit: impl Fn(&HashSet<u32>) -> bool) -> (usize, Option<u32>) {
    let mut passed = 0;
    let mut first = None;
    for v in interior(ball, r) {
        if hit(&neighborhood(ball, v, r)) {
            passed += 1;
        } else if first.is_none() {
            first = Some(v);
        }
    }
    (passed, first)
}

fn perturb(cb: &ColoredBall, rng: &mut ChaCha8Rng, rate: f64) -> ColoredBall {
    let mut out = cb.clone();
    for e in 0..cb.ball().edges().len() as u32 {
        if rng.gen_bool(rate) {
            out.set_color(e, Color::ALL[rng.gen_range(0..Color::ALL.len())]);
        }
    }
    out
}

#[test]
fn verifiers_match_brute_force() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let cases = [
        (tight(&Group::zd(2), &[(3, 9), (12, 40)], 14), vec![2, 5, 9, 12]),
        (tight(&Group::free(2), &[(3, 5)], 6), vec![1, 3, 5]),
    ];
    let mut outcomes = HashSet::new();
    for (base, ranges) in &cases {
        let words: Vec<Word> = base.plan().unwrap().steps.iter().map(|s| s.word.clone()).collect();
        let elements: Vec<GroupElement> = base.plan().unwrap().steps.iter().map(|s| s.g.clone()).collect();
        for trial in 0..6 {
            let cb = if trial == 0 { base.clone() } else { perturb(base, &mut rng, 0.04 * trial as f64) };
            for &r in ranges {
                for w in &words {
                    let rep = verify_p1(&cb, w, r).unwrap();
                    assert_eq!((rep.passed, rep.first_failure), naive_p1(&cb, w, r), "P1 {w} r={r}");
                    outcomes.insert(rep.ok());
                }
                for g in &elements {
                    let rep = verify_p2(&cb, g, r).unwrap();
                    assert_eq!((rep.passed, rep.first_failure), naive_p2(&cb, g, r), "P2 {g} r={r}");
                    outcomes.insert(rep.ok());
                }
            }
        }
    }
    assert_eq!(outcomes.len(), 2, "sweep should see both passing and failing cases");
}
