//! Random piecewise elements for property tests and probes.

use rand::seq::SliceRandom;
use rand::Rng;

use super::{cocycle_set, halfline_a, OrbitModel, OrbitPoint, OrbitSet, PiecewiseElement};
use crate::epset::EPSet;

/// Swaps `k` and `k+1` for every `k` of parity `residue` on `line`;
/// identity elsewhere.
pub fn pair_swap(model: &OrbitModel, line: usize, residue: i64) -> PiecewiseElement {
    let m = model.lines();
    let e = model.data().q().identity();
    let mut up = vec![EPSet::empty(); m];
    let mut down = vec![EPSet::empty(); m];
    up[line] = EPSet::progression(2, residue, None, None);
    down[line] = EPSet::progression(2, residue + 1, None, None);
    let up = OrbitSet::from_lines(up);
    let down = OrbitSet::from_lines(down);
    let rest = up.union(&down).complement();
    PiecewiseElement::new(model, vec![(up, (1, e)), (down, (-1, e)), (rest, (0, e))])
        .expect("pair swap is a bijection")
}

/// Pair swap aligned with `A`: pairs `{2k, 2k+1}` on positive lines and
/// `{2k-1, 2k}` on negative ones, so `A` is preserved.
pub fn aligned_pair_swap(model: &OrbitModel, line: usize) -> PiecewiseElement {
    pair_swap(model, line, if model.line_sign(line) > 0 { 0 } else { 1 })
}

fn random_point<R: Rng>(model: &OrbitModel, rng: &mut R, spread: i64) -> OrbitPoint {
    OrbitPoint::new(rng.gen_range(-spread..=spread), rng.gen_range(0..model.lines()))
}

fn random_factor<R: Rng>(model: &OrbitModel, rng: &mut R) -> PiecewiseElement {
    let q = model.data().q().order();
    match rng.gen_range(0..4) {
        0 => PiecewiseElement::global(model, (rng.gen_range(-2..=2), rng.gen_range(0..q))),
        1 => loop {
            let a = random_point(model, rng, 6);
            let b = random_point(model, rng, 6);
            if a != b {
                break PiecewiseElement::transposition(model, a, b).expect("transposition");
            }
        },
        2 => pair_swap(model, rng.gen_range(0..model.lines()), rng.gen_range(0..2)),
        _ => {
            let mut pts: Vec<OrbitPoint> = Vec::new();
            while pts.len() < 3 {
                let p = random_point(model, rng, 5);
                if !pts.contains(&p) {
                    pts.push(p);
                }
            }
            let moves = [(pts[0], pts[1]), (pts[1], pts[2]), (pts[2], pts[0])];
            PiecewiseElement::finite_permutation(model, &moves).expect("3-cycle")
        }
    }
}

/// Product of `factors` random globals, transpositions, pair swaps and
/// 3-cycles.
pub fn random_element<R: Rng>(model: &OrbitModel, rng: &mut R, factors: usize) -> PiecewiseElement {
    let mut out = PiecewiseElement::identity(model);
    for _ in 0..factors {
        out = random_factor(model, rng).compose(model, &out);
    }
    out
}

/// Generators with empty cocycle: aligned pair swaps, transpositions inside
/// or outside `A`, and the globals `(0, x)` that preserve `A`.
pub fn kernel_generators<R: Rng>(model: &OrbitModel, rng: &mut R, transpositions: usize) -> Vec<PiecewiseElement> {
    let a = halfline_a(model);
    let mut out: Vec<PiecewiseElement> = (0..model.lines()).map(|i| aligned_pair_swap(model, i)).collect();
    for x in 0..model.data().q().order() {
        let g = PiecewiseElement::global(model, (0, x));
        if cocycle_set(model, &g).is_empty() && !out.contains(&g) {
            out.push(g);
        }
    }
    while out.len() < model.lines() + transpositions {
        let p = random_point(model, rng, 8);
        let q = random_point(model, rng, 8);
        if p != q && a.contains(p) == a.contains(q) {
            out.push(PiecewiseElement::transposition(model, p, q).expect("transposition"));
        }
    }
    out
}

/// Random product of `factors` kernel generators.
pub fn random_kernel_element<R: Rng>(model: &OrbitModel, rng: &mut R, factors: usize) -> PiecewiseElement {
    let gens = kernel_generators(model, rng, 4);
    let mut out = PiecewiseElement::identity(model);
    for _ in 0..factors {
        let g = gens.choose(rng).expect("nonempty");
        out = g.compose(model, &out);
    }
    out
}
