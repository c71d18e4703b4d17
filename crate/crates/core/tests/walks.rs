use fglab::walk::{decay_classify, exact_return_probabilities, srw_estimate, DecayProfile, GraphSource};
use fglab::Group;

fn binomial(n: u64, k: u64) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

#[test]
fn exact_values_match_closed_forms() {
    let z: Vec<f64> = exact_return_probabilities(&GraphSource::cayley(&Group::zd(1)), 16).unwrap();
    let z2: Vec<f64> = exact_return_probabilities(&GraphSource::cayley(&Group::zd(2)), 16).unwrap();
    for n in 0..=8u64 {
        let line = binomial(2 * n, n) / 4f64.powi(n as i32);
        assert!((z[2 * n as usize] - line).abs() < 1e-12);
        assert!((z2[2 * n as usize] - line * line).abs() < 1e-12);
    }
}

#[test]
fn free_group_exact_matches_distance_chain() {
    // Distance from the identity moves down with probability 1/4 and up with 3/4.
    let mut chain = vec![1.0, 0.0];
    let mut oracle = vec![1.0];
    for _ in 0..16 {
        let mut next = vec![0.0; chain.len() + 1];
        for (d, &p) in chain.iter().enumerate() {
            if d == 0 {
                next[1] += p;
            } else {
                next[d - 1] += p / 4.0;
                next[d + 1] += 3.0 * p / 4.0;
            }
        }
        oracle.push(next[0]);
        chain = next;
    }
    let f2: Vec<f64> = exact_return_probabilities(&GraphSource::cayley(&Group::free(2)), 16).unwrap();
    for (a, b) in f2.iter().zip(&oracle) {
        assert!((a - b).abs() < 1e-12);
    }
}

#[test]
fn decay_profiles() {
    let cases = [(Group::zd(1), 11, Some((0.5, 0.15)), None), (Group::zd(2), 12, Some((1.0, 0.2)), None), (Group::free(2), 13, None, Some(0.866))];
    for (group, seed, alpha_want, rate_want) in cases {
        let stats = srw_estimate(&GraphSource::cayley(&group), 64, 100_000, seed).unwrap();
        let report = decay_classify(&stats);
        eprintln!("{} dev={:.2} {}", group.name(), stats.max_deviation(), report.profile);
        assert!(stats.max_deviation() <= 3.0);
        match (&report.profile, alpha_want, rate_want) {
            (DecayProfile::Polynomial { alpha, .. }, Some((want, tol)), None) => assert!((alpha - want).abs() <= tol),
            (DecayProfile::Exponential { rate, .. }, None, Some(want)) => assert!((rate - want).abs() <= 0.05),
            (p, _, _) => panic!("{}: unexpected profile {p}", group.name()),
        }
    }
}
