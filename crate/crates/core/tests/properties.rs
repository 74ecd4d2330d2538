use proptest::prelude::*;

use realschubert::cells::gr_chart;
use realschubert::geometry::{
    cell_identify, intersection_dims, isotropy_check, p_map, sample_isotropic,
    vanishing_order_matches_membership, wronskian, wronskian_of_rows, wronskian_plucker,
    SubspacePoint,
};
use realschubert::matrix::Mat;
use realschubert::osculating::{FlagPoint, FrameChange};
use realschubert::partitions::{all_strict, tilde_partition, untilde, Partition};
use realschubert::poly::Poly;
use realschubert::scalar::{rat, Rational};

fn rational() -> impl Strategy<Value = Rational> {
    (-9i64..=9, 1i64..=4).prop_map(|(p, q)| rat(p, q))
}

fn flag_point() -> impl Strategy<Value = FlagPoint> {
    prop_oneof![
        1 => Just(FlagPoint::Infinity),
        4 => rational().prop_map(FlagPoint::Finite),
    ]
}

/// A `d x m` matrix of small rationals together with `(d, m)`.
fn rows() -> impl Strategy<Value = (usize, usize, Vec<Vec<Rational>>)> {
    (1usize..=3, 1usize..=3).prop_flat_map(|(d, extra)| {
        let m = d + extra;
        prop::collection::vec(prop::collection::vec(rational(), m), d).prop_map(move |r| (d, m, r))
    })
}

/// A partition in the `d x (m-d)` box.
fn boxed_partition(d: usize, m: usize) -> impl Strategy<Value = Partition> {
    prop::collection::vec(0..=m - d, d).prop_map(move |mut v| {
        v.sort_unstable_by(|a, b| b.cmp(a));
        Partition::new(v, d, m - d).unwrap()
    })
}

fn shifted(x: &SubspacePoint, a: &Rational) -> SubspacePoint {
    let polys: Vec<Poly<Rational>> = x.polys().iter().map(|p| p.shift(a)).collect();
    SubspacePoint::from_polys(&polys, x.m()).unwrap()
}

fn forward(frame: &FrameChange, x: &SubspacePoint) -> SubspacePoint {
    let polys: Vec<Poly<Rational>> = x.polys().iter().map(|p| frame.forward(p)).collect();
    SubspacePoint::from_polys(&polys, x.m()).unwrap()
}

fn full_rank(d: usize, m: usize, r: &[Vec<Rational>]) -> Option<SubspacePoint> {
    let mat = Mat::from_rows(r.to_vec(), m).unwrap();
    (mat.rank() == d).then(|| SubspacePoint::new(r.to_vec(), m).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn intersection_dims_climb_by_at_most_one((d, m, r) in rows(), a in flag_point()) {
        let Some(x) = full_rank(d, m, &r) else { return Ok(()) };
        let dims = intersection_dims(&x, &a);
        prop_assert_eq!(dims.len(), m + 1);
        prop_assert_eq!(dims[0], 0);
        prop_assert_eq!(dims[m], d);
        for w in dims.windows(2) {
            prop_assert!(w[1] == w[0] || w[1] == w[0] + 1);
        }
    }

    #[test]
    fn wronskian_is_a_projective_invariant_of_the_row_space(
        (d, m, r) in rows(),
        g in prop::collection::vec(-3i64..=3, 9),
    ) {
        let Some(x) = full_rank(d, m, &r) else { return Ok(()) };
        let gm: Vec<Vec<Rational>> = (0..d).map(|i| (0..d).map(|j| rat(g[3 * i + j], 1)).collect()).collect();
        let g = Mat::from_rows(gm.clone(), d).unwrap();
        prop_assume!(g.rank() == d);
        let mixed: Vec<Vec<Rational>> = gm
            .iter()
            .map(|gi| (0..m).map(|k| gi.iter().zip(&r).map(|(c, row)| c * &row[k]).sum()).collect())
            .collect();
        let canonical = wronskian(&x).to_vec();
        prop_assert_eq!(wronskian_of_rows(&mixed).projective_canonical().to_vec(), canonical.clone());
        prop_assert_eq!(wronskian_of_rows(&r).projective_canonical().to_vec(), canonical.clone());
        prop_assert_eq!(wronskian_plucker(&x).to_vec(), canonical);
    }

    #[test]
    fn translation_moves_flags_between_points((d, m, r) in rows(), a in rational(), b in rational()) {
        let Some(x) = full_rank(d, m, &r) else { return Ok(()) };
        // f in F_i(a) iff f(z - a + b) in F_i(b)
        let y = shifted(&x, &(&b - &a));
        prop_assert_eq!(
            intersection_dims(&x, &FlagPoint::Finite(a)),
            intersection_dims(&y, &FlagPoint::Finite(b))
        );
    }

    #[test]
    fn frame_change_carries_flags_to_flags((d, m, r) in rows(), c in rational(), a in flag_point()) {
        let Some(x) = full_rank(d, m, &r) else { return Ok(()) };
        let frame = FrameChange { center: c };
        prop_assert_eq!(
            intersection_dims(&x, &a),
            intersection_dims(&forward(&frame, &x), &frame.map_point(&a))
        );
    }

    #[test]
    fn chart_points_lie_in_their_cell(
        (d, m, lambda) in (1usize..=3, 1usize..=3)
            .prop_flat_map(|(d, extra)| (Just(d), Just(d + extra), boxed_partition(d, d + extra))),
        seed in prop::collection::vec(rational(), 12),
        c in rational(),
    ) {
        let chart = gr_chart(&lambda, d, m);
        let x = SubspacePoint::new(chart.point_at(&seed[..chart.nvars]), m).unwrap();
        // at infinity the vanishing order of Wr is the weight of the cell
        let at_inf = vanishing_order_matches_membership(&x, &FlagPoint::Infinity).unwrap();
        prop_assert!(at_inf.pass);
        prop_assert_eq!(at_inf.cell.as_slice(), lambda.parts());
        // move infinity to c
        let frame = FrameChange { center: c.clone() };
        let polys: Vec<Poly<Rational>> = x.polys().iter().map(|p| frame.backward(p)).collect();
        let moved = SubspacePoint::from_polys(&polys, m).unwrap();
        prop_assert_eq!(cell_identify(&moved, &FlagPoint::Finite(c.clone())), lambda);
        let at_c = vanishing_order_matches_membership(&moved, &FlagPoint::Finite(c)).unwrap();
        prop_assert!(at_c.pass);
    }

    #[test]
    fn p_squared_is_the_wronskian(n in 1usize..=3, seed in 0u64..10_000) {
        for y in sample_isotropic(n, 2, seed).unwrap() {
            prop_assert!(isotropy_check(&y, n));
            let p = p_map(&y, n).unwrap();
            let square = p.mul(&p).projective_canonical();
            let w = wronskian(&y).projective_canonical();
            prop_assert_eq!(square.coeffs(), w.coeffs());
            // isotropy survives a change of frame
            let frame = FrameChange { center: rat(seed as i64 % 7 - 3, 1 + seed as i64 % 3) };
            prop_assert!(isotropy_check(&forward(&frame, &y), n));
        }
    }
}

#[test]
fn untilde_inverts_tilde() {
    for n in 1..=6 {
        for sigma in all_strict(n) {
            let lambda = tilde_partition(&sigma);
            assert_eq!(untilde(&lambda, n), Some(sigma));
        }
    }
}

#[test]
fn untilde_rejects_non_images() {
    // σ̃ always has even weight
    let lambda = Partition::new(vec![1], 2, 3).unwrap();
    assert_eq!(untilde(&lambda, 2), None);
}
