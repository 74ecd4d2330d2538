//! Acceptance suite: one PASS/FAIL line per criterion, non-zero exit on any failure.

use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use realschubert::geometry::{
    p_map, sample_isotropic_with_point, vanishing_order_matches_membership,
    vanishing_order_matches_membership_og, x_membership, y_membership,
};
use realschubert::osculating::{
    bilinear_form, check_orthogonal_flag, flag_basis_from_derivatives, FlagPoint,
};
use realschubert::partitions::{all_strict, shifted_syt_count, tilde_partition, StrictPartition};
use realschubert::poly::Poly;
use realschubert::scalar::{random_rational, Rational};
use realschubert::solver::{
    fiber_of_p, solve, SchubertCondition, SchubertProblem, SolverConfig, Space,
};

type Outcome = Result<String, String>;

fn check(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within(start: Instant, limit: Duration) -> Result<(), String> {
    check(start.elapsed() < limit, || {
        format!("took {:.2?}, limit {limit:?}", start.elapsed())
    })
}

fn distinct_rationals(rng: &mut ChaCha8Rng, count: usize) -> Vec<Rational> {
    let mut out: Vec<Rational> = Vec::new();
    while out.len() < count {
        let q = random_rational(rng, 12, 5);
        if !out.contains(&q) {
            out.push(q);
        }
    }
    out
}

fn single_box_problem(space: Space, points: &[Rational]) -> SchubertProblem {
    let conditions = points
        .iter()
        .map(|a| SchubertCondition {
            point: FlagPoint::Finite(a.clone()),
            shape: vec![1],
        })
        .collect();
    SchubertProblem::new(space, conditions).expect("valid problem")
}

/// Flags at 0, infinity, and 20 random rationals are orthogonal for n = 1..4.
/// Each report is cross-checked by pairing the derivative-span bases directly.
fn criterion_1() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(101);
    let mut points = vec![FlagPoint::Finite(Rational::from_integer(0.into())), FlagPoint::Infinity];
    points.extend(distinct_rationals(&mut rng, 20).into_iter().map(FlagPoint::Finite));
    let mut checked = 0;
    for n in 1..=4 {
        let m = 2 * n + 1;
        for a in &points {
            let report = check_orthogonal_flag(a, n);
            check(report.pass, || format!("report fails at n={n}, a={a}"))?;
            for i in 0..=m {
                let fi = flag_basis_from_derivatives(a, i, m);
                let fj = flag_basis_from_derivatives(a, m - i, m);
                for r in fi.row_vecs() {
                    for s in fj.row_vecs() {
                        let v = bilinear_form(&Poly::from_coeffs(r.clone()), &Poly::from_coeffs(s), n)
                            .map_err(|e| e.to_string())?;
                        check(v == Rational::from_integer(0.into()), || {
                            format!("F_{i}({a}) not orthogonal to F_{}({a}) for n={n}", m - i)
                        })?;
                    }
                }
            }
            checked += 1;
        }
    }
    within(start, Duration::from_secs(10))?;
    Ok(format!("{checked} (n, a) pairs, {:.2?}", start.elapsed()))
}

/// Doubling identity for every strict partition with n <= 6, against the
/// shifted-diagram construction: row i of σ̃ is σ^i plus the height of
/// column i of the shifted diagram whose row j fills columns j..j+σ^j-1.
fn criterion_2() -> Outcome {
    let start = Instant::now();
    let mut checked = 0;
    for n in 1..=6 {
        for sigma in all_strict(n) {
            let lam = tilde_partition(&sigma);
            let oracle: Vec<usize> = (1..=n)
                .map(|i| {
                    let column = (1..=n)
                        .filter(|&j| sigma.part(j) > 0 && j <= i && i < j + sigma.part(j))
                        .count();
                    sigma.part(i) + column
                })
                .collect();
            check(lam.padded() == oracle, || {
                format!("tilde of {sigma} is {lam}, diagram gives {oracle:?}")
            })?;
            check(lam.weight() == 2 * sigma.weight(), || format!("weight of {lam}"))?;
            check(lam.d() == n && lam.cap() == n + 1 && lam.part(1) <= n + 1, || {
                format!("{lam} outside the n x (n+1) box")
            })?;
            checked += 1;
        }
    }
    within(start, Duration::from_secs(5))?;
    Ok(format!("{checked} strict partitions, {:.2?}", start.elapsed()))
}

/// 200 sampled isotropic points: P exists, and vanishing orders match cells
/// at the sampler's special point, three random rationals, and infinity.
fn criterion_3() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(303);
    let mut nontrivial = 0;
    for k in 0..200 {
        let n = 2 + k % 2;
        let (y, special, tau) = sample_isotropic_with_point(n, &mut rng).map_err(|e| e.to_string())?;
        p_map(&y, n).map_err(|e| format!("sample {k}: {e}"))?;
        let mut points = vec![special, FlagPoint::Infinity];
        points.extend(distinct_rationals(&mut rng, 3).into_iter().map(FlagPoint::Finite));
        points.dedup();
        for a in &points {
            let og = vanishing_order_matches_membership_og(&y, n, a).map_err(|e| e.to_string())?;
            check(og.pass, || format!("sample {k}, n={n}, a={a}: {og:?}"))?;
            let gr = vanishing_order_matches_membership(&y, a).map_err(|e| e.to_string())?;
            check(gr.pass && gr.multiplicity == 2 * og.multiplicity, || {
                format!("sample {k}: Wr and P orders disagree at {a}")
            })?;
        }
        if !tau.is_empty() {
            nontrivial += 1;
        }
    }
    within(start, Duration::from_secs(60))?;
    Ok(format!("200 points ({nontrivial} in nontrivial cells), {:.2?}", start.elapsed()))
}

/// 200 random (y, σ, a): Y-membership agrees with X-membership for σ̃.
fn criterion_4() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(404);
    let (mut yes, mut no) = (0, 0);
    for k in 0..200 {
        let n = 2 + k % 2;
        let (y, special, _) = sample_isotropic_with_point(n, &mut rng).map_err(|e| e.to_string())?;
        let shapes = all_strict(n);
        let sigma: StrictPartition = shapes[rng.gen_range(0..shapes.len())].clone();
        let a = if rng.gen_bool(0.5) {
            special
        } else {
            FlagPoint::Finite(random_rational(&mut rng, 12, 5))
        };
        let via_y = y_membership(&y, &sigma, &a).map_err(|e| format!("case {k}: {e}"))?;
        let via_x = x_membership(&y, &tilde_partition(&sigma), &a);
        check(via_y == via_x, || format!("case {k}: {sigma} at {a}: Y {via_y}, X {via_x}"))?;
        if via_y {
            yes += 1;
        } else {
            no += 1;
        }
    }
    within(start, Duration::from_secs(60))?;
    Ok(format!("{yes} members, {no} non-members, {:.2?}", start.elapsed()))
}

fn run_family(space: Space, points: usize, configs: usize, seed: u64, expected: usize) -> Result<Vec<String>, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let cfg = SolverConfig::default();
    let mut json = Vec::new();
    for c in 0..configs {
        let pts = distinct_rationals(&mut rng, points);
        let p = single_box_problem(space, &pts);
        let r = solve(&p, &cfg).map_err(|e| format!("{space:?} config {c}: {e}"))?;
        check(r.complete, || format!("{space:?} config {c}: incomplete tracking {:?}", r.tracking))?;
        check(r.count == expected, || format!("{space:?} config {c}: {} solutions, expected {expected}", r.count))?;
        for s in &r.solutions {
            check(s.real && s.transverse && s.sigma_min_relative > 1e-8 && s.membership != "failed", || {
                format!(
                    "{space:?} config {c}: certificate real={} transverse={} sigma={:e} membership={}",
                    s.real, s.transverse, s.sigma_min_relative, s.membership
                )
            })?;
        }
        json.push(serde_json::to_string(&r).map_err(|e| e.to_string())?);
    }
    Ok(json)
}

fn criterion_5_json() -> Result<Vec<String>, String> {
    let mut out = run_family(Space::Gr { d: 2, m: 4 }, 4, 5, 505, 2)?;
    out.extend(run_family(Space::Gr { d: 2, m: 5 }, 6, 5, 506, 5)?);
    Ok(out)
}

fn criterion_6_json() -> Result<Vec<String>, String> {
    let c2 = shifted_syt_count(&StrictPartition::staircase(2)).map_err(|e| e.to_string())? as usize;
    let c3 = shifted_syt_count(&StrictPartition::staircase(3)).map_err(|e| e.to_string())? as usize;
    check(c2 == 1 && c3 == 2, || format!("staircase counts {c2}, {c3}"))?;
    let mut out = run_family(Space::OG { n: 2 }, 3, 5, 606, c2)?;
    out.extend(run_family(Space::OG { n: 3 }, 6, 5, 607, c3)?);
    Ok(out)
}

fn criterion_7_json() -> Result<Vec<String>, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(707);
    let cfg = SolverConfig::default();
    let mut out = Vec::new();
    for t in 0..5 {
        let roots = distinct_rationals(&mut rng, 6);
        let mut h = Poly::from_coeffs(vec![Rational::from_integer(1.into())]);
        for a in &roots {
            h = h.mul(&Poly::from_coeffs(vec![a.clone(), Rational::from_integer(1.into())]));
        }
        let r = fiber_of_p(&h, 3, &cfg).map_err(|e| format!("target {t}: {e}"))?;
        check(r.complete && r.count == 2, || format!("target {t}: {} points, complete={}", r.count, r.complete))?;
        for s in &r.solutions {
            let res = s.target_residual.unwrap_or(f64::INFINITY);
            check(res <= 1e-9, || format!("target {t}: P misses the target by {res:e}"))?;
        }
        out.push(serde_json::to_string(&r).map_err(|e| e.to_string())?);
    }
    Ok(out)
}

fn timed(limit: Duration, f: fn() -> Result<Vec<String>, String>, what: &str) -> Outcome {
    let start = Instant::now();
    let json = f()?;
    within(start, limit)?;
    Ok(format!("{} {what}, {:.2?}", json.len(), start.elapsed()))
}

fn criterion_5() -> Outcome {
    timed(Duration::from_secs(60), criterion_5_json, "configurations")
}

fn criterion_6() -> Outcome {
    timed(Duration::from_secs(300), criterion_6_json, "configurations")
}

fn criterion_7() -> Outcome {
    timed(Duration::from_secs(300), criterion_7_json, "targets")
}

/// Reruns of criteria 5-7 produce byte-identical JSON.
fn criterion_8() -> Outcome {
    let mut bytes = 0;
    for f in [criterion_5_json, criterion_6_json, criterion_7_json] {
        let first = f()?;
        let second = f()?;
        check(first == second, || "JSON differs between runs".to_string())?;
        bytes += first.iter().map(String::len).sum::<usize>();
    }
    Ok(format!("{bytes} bytes compared"))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 8] = [
        ("1 orthogonal osculating flags", criterion_1),
        ("2 doubling identity", criterion_2),
        ("3 P exists and vanishing orders match cells", criterion_3),
        ("4 Y-membership equals X-membership of tilde", criterion_4),
        ("5 Grassmannian counts, reality, transversality", criterion_5),
        ("6 orthogonal Grassmannian counts", criterion_6),
        ("7 fibers of P", criterion_7),
        ("8 deterministic JSON", criterion_8),
    ];
    let mut failed = 0;
    for (name, f) in criteria {
        match f() {
            Ok(detail) => println!("PASS criterion {name}: {detail}"),
            Err(why) => {
                failed += 1;
                println!("FAIL criterion {name}: {why}");
            }
        }
    }
    if failed > 0 {
        println!("{failed} acceptance criteria failed");
        std::process::exit(1);
    }
    println!("all acceptance criteria passed");
}
