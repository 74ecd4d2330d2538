use realschubert::osculating::FlagPoint;
use realschubert::scalar::int;
use realschubert::solver::{solve, SchubertCondition, SchubertProblem, SolverConfig, Space};

fn single_boxes(space: Space, points: &[i64]) -> SchubertProblem {
    let conditions = points
        .iter()
        .map(|&a| SchubertCondition { point: FlagPoint::Finite(int(a)), shape: vec![1] })
        .collect();
    SchubertProblem::new(space, conditions).unwrap()
}

#[test]
fn gr24_four_single_boxes() {
    let p = single_boxes(Space::Gr { d: 2, m: 4 }, &[0, 1, 2, 3]);
    let r = solve(&p, &SolverConfig::default()).unwrap();
    eprintln!("{}", serde_json::to_string_pretty(&r).unwrap());
    assert!(r.success());
    assert_eq!(r.count, 2);
}

#[test]
fn og2_three_single_boxes() {
    let p = single_boxes(Space::OG { n: 2 }, &[0, 1, 2]);
    let r = solve(&p, &SolverConfig::default()).unwrap();
    eprintln!("{}", serde_json::to_string_pretty(&r).unwrap());
    assert!(r.success());
    assert_eq!(r.count, 1);
}

#[test]
fn og3_six_single_boxes() {
    let p = single_boxes(Space::OG { n: 3 }, &[0, 1, 2, 3, -1, 5]);
    let t = std::time::Instant::now();
    let r = solve(&p, &SolverConfig::default()).unwrap();
    eprintln!("{:?} {}", t.elapsed(), serde_json::to_string_pretty(&r.tracking).unwrap());
    for s in &r.solutions { eprintln!("{:?} {} {} {}", s.sigma_min_relative, s.imag_norm, s.membership, s.real); }
    assert!(r.success());
    assert_eq!(r.count, 2);
}
