//! Points of `Gr(d, C_{m-1}[z])` and of the orthogonal Grassmannian `OG(n)`,
//! Schubert conditions on them, the Wronski map, and its square root `P`.

use nalgebra::DMatrix;
use num_traits::Zero;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::cells::{og_chart, plucker_wronskian};
use crate::error::{Error, Result};
use crate::matrix::{numeric_rank, Mat};
use crate::mpoly::MPoly;
use crate::osculating::{flag_basis, gram_matrix, FlagPoint, FrameChange};
use crate::partitions::{
    all_strict, bar_sequence, tilde_partition, untilde, Partition, StrictPartition,
};
use crate::poly::{poly_root_multiplicity, Poly, RootPoint};
use crate::scalar::{format_rational, parse_rational, random_rational, Rational, Scalar, C64};

/// A `d`-dimensional subspace of `C_{m-1}[z]`, stored by its reduced row echelon basis.
#[derive(Clone, Debug, PartialEq)]
pub struct SubspacePoint {
    basis: Mat<Rational>,
}

impl SubspacePoint {
    pub fn new(rows: Vec<Vec<Rational>>, m: usize) -> Result<Self> {
        let d = rows.len();
        let mat = Mat::from_rows(rows, m)?;
        let (rref, pivots) = mat.rref();
        if pivots.len() != d {
            return Err(Error::InvalidSubspace(format!(
                "{d} rows span only a {}-dimensional space",
                pivots.len()
            )));
        }
        Ok(SubspacePoint { basis: rref })
    }

    pub fn from_polys(polys: &[Poly<Rational>], m: usize) -> Result<Self> {
        let rows = polys
            .iter()
            .map(|p| {
                p.clone().with_bound(m - 1).map(|p| {
                    let mut v = p.to_vec();
                    v.resize(m, Rational::zero());
                    v
                })
            })
            .collect::<Result<Vec<_>>>()?;
        SubspacePoint::new(rows, m)
    }

    pub fn d(&self) -> usize {
        self.basis.rows()
    }

    pub fn m(&self) -> usize {
        self.basis.cols()
    }

    pub fn basis(&self) -> &Mat<Rational> {
        &self.basis
    }

    pub fn rows(&self) -> Vec<Vec<Rational>> {
        self.basis.row_vecs()
    }

    pub fn polys(&self) -> Vec<Poly<Rational>> {
        self.rows()
            .into_iter()
            .map(|r| Poly::new(r, self.m() - 1).expect("row fits the ambient space"))
            .collect()
    }
}

#[derive(Serialize, Deserialize)]
struct SubspaceJson {
    d: usize,
    m: usize,
    rows: Vec<Vec<String>>,
}

impl Serialize for SubspacePoint {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        SubspaceJson {
            d: self.d(),
            m: self.m(),
            rows: self
                .rows()
                .iter()
                .map(|r| r.iter().map(format_rational).collect())
                .collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for SubspacePoint {
    fn deserialize<D: Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        let j = SubspaceJson::deserialize(de)?;
        if j.rows.len() != j.d || j.rows.iter().any(|r| r.len() != j.m) {
            return Err(D::Error::custom(format!(
                "expected {} rows of length {}",
                j.d, j.m
            )));
        }
        let rows = j
            .rows
            .iter()
            .map(|r| r.iter().map(|s| parse_rational(s)).collect::<Result<Vec<_>>>())
            .collect::<Result<Vec<_>>>()
            .map_err(D::Error::custom)?;
        SubspacePoint::new(rows, j.m).map_err(D::Error::custom)
    }
}

/// `dim(x ∩ F_k(a))` for `k = 0..=m`.
pub fn intersection_dims(x: &SubspacePoint, a: &FlagPoint) -> Vec<usize> {
    let (d, m) = (x.d(), x.m());
    (0..=m)
        .map(|k| {
            let stacked = x.basis.vstack(&flag_basis(a, k, m)).expect("same width");
            d + k - stacked.rank()
        })
        .collect()
}

fn satisfies(dims: &[usize], lambda: &Partition, m: usize) -> bool {
    let d = lambda.d();
    (1..=d).all(|i| dims[m - d + i - lambda.part(i)] >= i)
}

/// `x ∈ X_λ(a)`: `dim(x ∩ F_{m-d+i-λ^i}(a)) >= i` for every `i`.
pub fn x_membership(x: &SubspacePoint, lambda: &Partition, a: &FlagPoint) -> bool {
    assert_eq!(lambda.d(), x.d(), "partition has the wrong number of rows");
    assert_eq!(lambda.cap(), x.m() - x.d(), "partition lies in the wrong box");
    satisfies(&intersection_dims(x, a), lambda, x.m())
}

fn cell_from_dims(dims: &[usize], d: usize, m: usize) -> Partition {
    let jumps: Vec<usize> = (1..=m).filter(|&k| dims[k] > dims[k - 1]).collect();
    debug_assert_eq!(jumps.len(), d);
    let parts = (1..=d).map(|i| m - d + i - jumps[i - 1]).collect();
    Partition::new(parts, d, m - d).expect("jump positions give a partition")
}

/// The partition `λ` with `x` in the open cell `X°_λ(a)`.
pub fn cell_identify(x: &SubspacePoint, a: &FlagPoint) -> Partition {
    cell_from_dims(&intersection_dims(x, a), x.d(), x.m())
}

/// The `n x n` Gram matrix of the basis vanishes.
pub fn isotropy_check(y: &SubspacePoint, n: usize) -> bool {
    y.d() == n && y.m() == 2 * n + 1 && gram_matrix(&y.rows(), n).rank() == 0
}

fn require_isotropic(y: &SubspacePoint, n: usize) -> Result<()> {
    if isotropy_check(y, n) {
        Ok(())
    } else {
        Err(Error::NotIsotropic(format!(
            "subspace of dimension {} in C_{}[z] is not isotropic for n = {n}",
            y.d(),
            y.m() - 1
        )))
    }
}

/// `y ∈ Y_σ(a)`, checked both through `dim(y ∩ F_{1+n-σ̄^i}(a)) >= i` and
/// through `X_σ̃(a)`; the two must agree.
pub fn y_membership(y: &SubspacePoint, sigma: &StrictPartition, a: &FlagPoint) -> Result<bool> {
    let n = sigma.n();
    require_isotropic(y, n)?;
    let dims = intersection_dims(y, a);
    let bar = bar_sequence(sigma);
    let direct = bar
        .values()
        .iter()
        .enumerate()
        .all(|(i, &b)| dims[(1 + n as i64 - b) as usize] > i);
    let via_tilde = satisfies(&dims, &tilde_partition(sigma), y.m());
    if direct != via_tilde {
        return Err(Error::Consistency(format!(
            "Y-membership for {sigma} at {a} is {direct}, but X-membership for its tilde is {via_tilde}"
        )));
    }
    Ok(direct)
}

/// The strict partition `σ` with `y` in the open cell `Y°_σ(a)`.
pub fn y_cell_identify(y: &SubspacePoint, n: usize, a: &FlagPoint) -> Result<StrictPartition> {
    require_isotropic(y, n)?;
    let lambda = cell_identify(y, a);
    untilde(&lambda, n).ok_or_else(|| {
        Error::Consistency(format!(
            "cell {lambda} of an isotropic subspace is not of the form σ̃"
        ))
    })
}

fn poly_det<F: Scalar>(m: &[Vec<Poly<F>>], bound: usize) -> Poly<F> {
    fn rec<F: Scalar>(m: &[Vec<Poly<F>>], row: usize, cols: &[usize], bound: usize) -> Poly<F> {
        if cols.is_empty() {
            return Poly::monomial(0, F::one(), bound);
        }
        let mut acc = Poly::zero(bound);
        for (idx, &c) in cols.iter().enumerate() {
            if m[row][c].is_zero() {
                continue;
            }
            let rest: Vec<usize> = cols.iter().copied().filter(|&x| x != c).collect();
            let t = m[row][c].mul(&rec(m, row + 1, &rest, bound)).with_bound(bound);
            let t = t.expect("Wronskian minors stay within the degree bound");
            acc = if idx % 2 == 0 { acc.add(&t) } else { acc.sub(&t) };
        }
        acc
    }
    let cols: Vec<usize> = (0..m.len()).collect();
    rec(m, 0, &cols, bound)
}

/// Determinant of the matrix of derivatives `(f_i^{(j)})`, not normalized.
pub fn wronskian_of_rows<F: Scalar>(rows: &[Vec<F>]) -> Poly<F> {
    let d = rows.len();
    let m = rows.first().map_or(d, |r| r.len());
    let bound = d * (m - d);
    let wide = bound.max(m);
    let mut mat: Vec<Vec<Poly<F>>> = Vec::with_capacity(d);
    for r in rows {
        let mut p = Poly::new(r.clone(), wide).expect("row fits");
        let mut derivs = Vec::with_capacity(d);
        for _ in 0..d {
            derivs.push(p.clone());
            p = p.derivative();
        }
        mat.push(derivs);
    }
    // column j holds the j-th derivatives; transpose so rows are derivative orders
    let t: Vec<Vec<Poly<F>>> = (0..d).map(|j| (0..d).map(|i| mat[i][j].clone()).collect()).collect();
    // individual products may exceed d(m-d) before cancellation
    let w = poly_det(&t, d * m);
    if F::EXACT {
        w.with_bound(bound).expect("Wronskian degree is at most d(m-d)")
    } else {
        // floating cancellation leaves noise above degree d(m-d)
        let mut c = w.to_vec();
        c.truncate(bound + 1);
        Poly::new(c, bound).expect("truncated to the bound")
    }
}

/// `Wr(x; z)`, normalized so its lowest nonzero coefficient is 1.
pub fn wronskian(x: &SubspacePoint) -> Poly<Rational> {
    wronskian_of_rows(&x.rows()).projective_canonical()
}

/// The Wronskian computed from maximal minors instead of the derivative matrix.
pub fn wronskian_plucker(x: &SubspacePoint) -> Poly<Rational> {
    let rows: Vec<Vec<MPoly>> = x
        .rows()
        .into_iter()
        .map(|r| r.into_iter().map(|c| MPoly::constant(c, 0)).collect())
        .collect();
    let coeffs: Vec<Rational> = plucker_wronskian(&rows, 0)
        .iter()
        .map(|c| c.as_constant().expect("constant coefficients"))
        .collect();
    let bound = x.d() * (x.m() - x.d());
    Poly::new(coeffs, bound).expect("within bound").projective_canonical()
}

/// `P(y; z)` with `Wr(y; z) = P(y; z)^2`, normalized like [`wronskian`].
pub fn p_map(y: &SubspacePoint, n: usize) -> Result<Poly<Rational>> {
    require_isotropic(y, n)?;
    let p = wronskian(y).exact_sqrt()?;
    p.with_bound(n * (n + 1) / 2).map(|p| p.projective_canonical())
}

/// Vanishing order of `Wr` (or `P`) at a point against the weight of the cell there.
#[derive(Clone, Debug, Serialize)]
pub struct VanishingReport {
    pub point: FlagPoint,
    pub multiplicity: usize,
    pub cell: Vec<usize>,
    pub cell_weight: usize,
    pub pass: bool,
}

fn root_point(a: &FlagPoint) -> RootPoint<Rational> {
    match a {
        FlagPoint::Finite(q) => RootPoint::Finite(q.clone()),
        FlagPoint::Infinity => RootPoint::Infinity,
    }
}

pub fn vanishing_order_matches_membership(x: &SubspacePoint, a: &FlagPoint) -> Result<VanishingReport> {
    let dim = x.d() * (x.m() - x.d());
    let k = poly_root_multiplicity(&wronskian(x), &root_point(a), dim)?;
    let cell = cell_identify(x, a);
    Ok(VanishingReport {
        point: a.clone(),
        multiplicity: k,
        cell_weight: cell.weight(),
        pass: k == cell.weight(),
        cell: cell.parts().to_vec(),
    })
}

/// The same check for an isotropic point, using `P` and its strict-partition cell.
pub fn vanishing_order_matches_membership_og(
    y: &SubspacePoint,
    n: usize,
    a: &FlagPoint,
) -> Result<VanishingReport> {
    let p = p_map(y, n)?;
    let k = poly_root_multiplicity(&p, &root_point(a), n * (n + 1) / 2)?;
    let cell = y_cell_identify(y, n, a)?;
    Ok(VanishingReport {
        point: a.clone(),
        multiplicity: k,
        cell_weight: cell.weight(),
        pass: k == cell.weight(),
        cell: cell.parts().to_vec(),
    })
}

fn numeric_flag(a: &FlagPoint, k: usize, m: usize) -> Vec<Vec<C64>> {
    flag_basis(a, k, m)
        .row_vecs()
        .iter()
        .map(|r| r.iter().map(Scalar::to_c64).collect())
        .collect()
}

fn unit_rows(rows: &[Vec<C64>]) -> Vec<Vec<C64>> {
    rows.iter()
        .map(|r| {
            let norm = r.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
            r.iter().map(|c| c / norm.max(f64::MIN_POSITIVE)).collect()
        })
        .collect()
}

/// Floating-point `dim(x ∩ F_k(a))`; ranks are read from singular values
/// relative to the largest, with threshold `tol`.
pub fn numeric_intersection_dims(rows: &[Vec<C64>], a: &FlagPoint, tol: f64) -> Result<Vec<usize>> {
    let d = rows.len();
    let m = rows[0].len();
    let x = unit_rows(rows);
    (0..=m)
        .map(|k| {
            let mut all = x.clone();
            all.extend(unit_rows(&numeric_flag(a, k, m)));
            let mat = DMatrix::from_fn(all.len(), m, |i, j| all[i][j]);
            // a margin of 1 disables the ambiguity check
            let r = numeric_rank(&mat, tol, 1.0)?;
            Ok(d + k - r)
        })
        .collect()
}

pub fn numeric_x_membership(rows: &[Vec<C64>], lambda: &Partition, a: &FlagPoint, tol: f64) -> Result<bool> {
    let dims = numeric_intersection_dims(rows, a, tol)?;
    Ok(satisfies(&dims, lambda, rows[0].len()))
}

pub fn numeric_y_membership(rows: &[Vec<C64>], sigma: &StrictPartition, a: &FlagPoint, tol: f64) -> Result<bool> {
    numeric_x_membership(rows, &tilde_partition(sigma), a, tol)
}

/// Random exact isotropic subspace together with a point where it sits in a
/// chosen (often nontrivial) cell.
///
/// A strict partition `τ` is drawn uniformly, a point of `Y°_τ(∞)` is taken
/// with random small rational chart coordinates, and the result is moved by
/// a random frame change so that the special point becomes a random rational.
pub fn sample_isotropic_with_point<R: Rng + ?Sized>(
    n: usize,
    rng: &mut R,
) -> Result<(SubspacePoint, FlagPoint, StrictPartition)> {
    let shapes = all_strict(n);
    let tau = shapes.choose(rng).expect("at least the empty partition").clone();
    let chart = og_chart(&tau)?;
    let vals: Vec<Rational> = (0..chart.nvars).map(|_| random_rational(rng, 5, 4)).collect();
    let rows = chart.point_at(&vals);
    let m = 2 * n + 1;
    if rng.gen_bool(0.25) {
        return Ok((SubspacePoint::new(rows, m)?, FlagPoint::Infinity, tau));
    }
    let change = FrameChange {
        center: random_rational(rng, 6, 3),
    };
    let moved = rows
        .into_iter()
        .map(|r| {
            let mut v = change.backward(&Poly::new(r, m - 1)?).to_vec();
            v.resize(m, Rational::zero());
            Ok(v)
        })
        .collect::<Result<Vec<_>>>()?;
    let y = SubspacePoint::new(moved, m)?;
    if !isotropy_check(&y, n) {
        return Err(Error::Consistency("frame change broke isotropy".into()));
    }
    Ok((y, FlagPoint::Finite(change.center), tau))
}

/// `count` random exact isotropic subspaces of `C_{2n}[z]`, deterministic in `seed`.
pub fn sample_isotropic(n: usize, count: usize, seed: u64) -> Result<Vec<SubspacePoint>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| sample_isotropic_with_point(n, &mut rng).map(|(y, _, _)| y))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{int, rat};

    fn poly(c: &[Rational]) -> Poly<Rational> {
        Poly::from_coeffs(c.to_vec())
    }

    fn mono(k: usize) -> Poly<Rational> {
        Poly::monomial(k, int(1), k)
    }

    fn zero() -> FlagPoint {
        FlagPoint::Finite(int(0))
    }

    #[test]
    fn intersection_dim_examples() {
        let x = SubspacePoint::from_polys(&[mono(2), mono(3)], 4).unwrap();
        assert_eq!(intersection_dims(&x, &zero()), vec![0, 1, 2, 2, 2]);
        let x = SubspacePoint::from_polys(&[mono(0), mono(1)], 4).unwrap();
        assert_eq!(intersection_dims(&x, &zero()), vec![0, 0, 0, 1, 2]);
    }

    #[test]
    fn membership_and_cells() {
        let f2 = SubspacePoint::from_polys(&[mono(2), mono(3)], 4).unwrap();
        let full = Partition::new(vec![2, 2], 2, 2).unwrap();
        assert!(x_membership(&f2, &full, &zero()));
        assert_eq!(cell_identify(&f2, &zero()), full);
        let low = SubspacePoint::from_polys(&[mono(0), mono(1)], 4).unwrap();
        assert!(!x_membership(&low, &Partition::new(vec![1], 2, 2).unwrap(), &zero()));
        assert!(x_membership(&low, &Partition::empty(2, 2), &zero()));
        assert_eq!(cell_identify(&low, &zero()), Partition::empty(2, 2));
    }

    #[test]
    fn isotropy_examples() {
        let y = SubspacePoint::from_polys(&[mono(0), mono(1)], 5).unwrap();
        assert!(isotropy_check(&y, 2));
        let y = SubspacePoint::from_polys(&[mono(0), mono(2)], 5).unwrap();
        assert!(!isotropy_check(&y, 2));
        let y = SubspacePoint::from_polys(
            &[
                poly(&[int(1), int(0), int(0), int(2)]),
                poly(&[int(0), int(1), int(0), int(0), rat(1, 2)]),
            ],
            5,
        )
        .unwrap();
        assert!(isotropy_check(&y, 2));
        assert_eq!(p_map(&y, 2).unwrap().coeffs(), &[int(1), int(0), int(0), int(-1)]);
    }

    #[test]
    fn y_membership_examples() {
        let y = SubspacePoint::from_polys(&[mono(0), mono(1)], 5).unwrap();
        let one = StrictPartition::new(vec![1], 2).unwrap();
        assert!(!y_membership(&y, &one, &zero()).unwrap());
        assert!(y_membership(&y, &StrictPartition::empty(2), &zero()).unwrap());
        let y = SubspacePoint::from_polys(&[mono(3), mono(4)], 5).unwrap();
        assert!(isotropy_check(&y, 2));
        assert!(y_membership(&y, &StrictPartition::staircase(2), &zero()).unwrap());
        let bad = SubspacePoint::from_polys(&[mono(0), mono(2)], 5).unwrap();
        assert!(matches!(y_membership(&bad, &one, &zero()), Err(Error::NotIsotropic(_))));
    }

    #[test]
    fn wronskian_examples() {
        let x = SubspacePoint::from_polys(&[mono(0), mono(1)], 4).unwrap();
        assert_eq!(wronskian(&x).coeffs(), mono(0).coeffs());
        let x = SubspacePoint::from_polys(&[mono(0), mono(2)], 4).unwrap();
        assert_eq!(wronskian(&x).coeffs(), mono(1).coeffs());
        assert_eq!(wronskian_of_rows(&x.rows()).coeffs(), &[int(0), int(2)]);
        let x = SubspacePoint::from_polys(&[mono(2), mono(3)], 4).unwrap();
        assert_eq!(wronskian(&x).coeffs(), mono(4).coeffs());
        let y = SubspacePoint::from_polys(&[mono(3), mono(4)], 5).unwrap();
        assert_eq!(p_map(&y, 2).unwrap().coeffs(), mono(3).coeffs());
        let y = SubspacePoint::from_polys(&[mono(0), mono(1)], 5).unwrap();
        assert_eq!(p_map(&y, 2).unwrap().coeffs(), mono(0).coeffs());
    }

    #[test]
    fn vanishing_examples() {
        let x = SubspacePoint::from_polys(&[mono(0), mono(2)], 4).unwrap();
        let r = vanishing_order_matches_membership(&x, &zero()).unwrap();
        assert!(r.pass && r.multiplicity == 1);
        let r = vanishing_order_matches_membership(&x, &FlagPoint::Infinity).unwrap();
        assert!(r.pass && r.multiplicity == 3, "{r:?}");
        let x = SubspacePoint::from_polys(&[mono(2), mono(3)], 4).unwrap();
        let r = vanishing_order_matches_membership(&x, &zero()).unwrap();
        assert!(r.pass && r.multiplicity == 4);
    }

    #[test]
    fn sampled_points_are_isotropic_with_matching_cells() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for n in 1..=3 {
            for _ in 0..20 {
                let (y, a, tau) = sample_isotropic_with_point(n, &mut rng).unwrap();
                assert!(isotropy_check(&y, n));
                assert_eq!(y_cell_identify(&y, n, &a).unwrap(), tau);
                assert!(vanishing_order_matches_membership_og(&y, n, &a).unwrap().pass);
                assert_eq!(wronskian(&y), wronskian_plucker(&y));
            }
        }
    }

    #[test]
    fn json_round_trip() {
        let y = SubspacePoint::from_polys(
            &[
                poly(&[int(1), int(0), int(0), int(2)]),
                poly(&[int(0), int(1), int(0), int(0), rat(1, 2)]),
            ],
            5,
        )
        .unwrap();
        let s = serde_json::to_string(&y).unwrap();
        assert_eq!(s, r#"{"d":2,"m":5,"rows":[["1","0","0","2","0"],["0","1","0","0","1/2"]]}"#);
        let back: SubspacePoint = serde_json::from_str(&s).unwrap();
        assert_eq!(back, y);
        assert!(serde_json::from_str::<SubspacePoint>(r#"{"d":2,"m":3,"rows":[["1","0","0"]]}"#).is_err());
    }

    #[test]
    fn numeric_membership_agrees_with_exact() {
        let f2 = SubspacePoint::from_polys(&[mono(2), mono(3)], 4).unwrap();
        let rows: Vec<Vec<C64>> = f2.rows().iter().map(|r| r.iter().map(Scalar::to_c64).collect()).collect();
        let full = Partition::new(vec![2, 2], 2, 2).unwrap();
        assert!(numeric_x_membership(&rows, &full, &zero(), 1e-9).unwrap());
        assert!(!numeric_x_membership(&rows, &Partition::new(vec![1], 2, 2).unwrap(), &FlagPoint::Finite(int(1)), 1e-9).unwrap());
    }
}
