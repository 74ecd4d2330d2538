//! Affine charts on Schubert cells relative to the flag at infinity.
//!
//! A point of the cell `X°_λ(∞)` in `Gr(d, C_{m-1}[z])` has a unique basis
//! whose `i`-th row is `z^{p_i} + Σ x_{i,c} z^c`, the sum over non-pivot
//! exponents `c < p_i`, where `p_i = m - d - 1 + i - λ^i`. For the orthogonal
//! Grassmannian the same rows are used and the isotropy equations, which are
//! linear in one entry of each row pair, are solved for those entries.

use num_traits::One;

use crate::error::{Error, Result};
use crate::mpoly::{det, MPoly};
use crate::osculating::form_weight;
use crate::partitions::{tilde_partition, Partition, StrictPartition};
use crate::scalar::{Rational, Scalar};

/// Leading exponents `p_1 < ... < p_d` of the echelon basis of the cell `X°_λ(∞)`.
pub fn cell_pivots(lambda: &Partition, d: usize, m: usize) -> Vec<usize> {
    (1..=d).map(|i| m - d - 1 + i - lambda.part(i)).collect()
}

/// A cell chart: rows are polynomials in the chart coordinates.
#[derive(Clone, Debug)]
pub struct Chart {
    pub d: usize,
    pub m: usize,
    pub pivots: Vec<usize>,
    pub nvars: usize,
    /// `d x m` matrix of coefficient polynomials.
    pub rows: Vec<Vec<MPoly>>,
    /// `(row, column)` of the entry carried by each chart coordinate.
    pub coordinates: Vec<(usize, usize)>,
}

impl Chart {
    /// Substitutes concrete coordinates.
    pub fn point_at<F: Scalar>(&self, values: &[F]) -> Vec<Vec<F>> {
        assert_eq!(values.len(), self.nvars);
        self.rows
            .iter()
            .map(|row| row.iter().map(|p| p.eval(values)).collect())
            .collect()
    }

    /// Reads chart coordinates off a basis already in this chart's echelon form.
    pub fn coordinates_of<F: Scalar>(&self, rows: &[Vec<F>]) -> Vec<F> {
        self.coordinates
            .iter()
            .map(|&(r, c)| rows[r][c].clone())
            .collect()
    }
}

/// Chart on the Grassmannian cell `X°_λ(∞)`.
pub fn gr_chart(lambda: &Partition, d: usize, m: usize) -> Chart {
    let pivots = cell_pivots(lambda, d, m);
    let mut coordinates = Vec::new();
    for (i, &p) in pivots.iter().enumerate() {
        for c in 0..p {
            if !pivots.contains(&c) {
                coordinates.push((i, c));
            }
        }
    }
    let nvars = coordinates.len();
    let mut rows = vec![vec![MPoly::zero(nvars); m]; d];
    for (i, &p) in pivots.iter().enumerate() {
        rows[i][p] = MPoly::one(nvars);
    }
    for (v, &(r, c)) in coordinates.iter().enumerate() {
        rows[r][c] = MPoly::var(v, nvars);
    }
    Chart {
        d,
        m,
        pivots,
        nvars,
        rows,
        coordinates,
    }
}

/// Chart on the orthogonal Grassmannian cell `Y°_τ(∞) = X°_τ̃(∞) ∩ Y` in `C_{2n}[z]`.
pub fn og_chart(tau: &StrictPartition) -> Result<Chart> {
    let n = tau.n();
    let m = 2 * n + 1;
    let lambda = tilde_partition(tau);
    let pivots = cell_pivots(&lambda, n, m);
    let top = 2 * n;
    if pivots.contains(&n) || pivots.iter().any(|&p| pivots.contains(&(top - p))) {
        return Err(Error::Consistency(format!(
            "pivot set {pivots:?} of {tau} is not of isotropic type"
        )));
    }
    let idx = |p: usize| pivots.iter().position(|&q| q == p).expect("pivot");

    // Free coordinates: column-n entries of rows with pivot above n, and for
    // each pivot pair p < q with p + q > 2n the entry in row q at column 2n - p.
    let mut coordinates = Vec::new();
    for &p in &pivots {
        if p > n {
            coordinates.push((idx(p), n));
        }
    }
    for (a, &p) in pivots.iter().enumerate() {
        for &q in &pivots[a + 1..] {
            if p + q > top {
                coordinates.push((idx(q), top - p));
            }
        }
    }
    let nvars = coordinates.len();
    let expected = n * (n + 1) / 2 - tau.weight();
    if nvars != expected {
        return Err(Error::Consistency(format!(
            "chart for {tau} has {nvars} coordinates, expected {expected}"
        )));
    }

    let mut rows = vec![vec![MPoly::zero(nvars); m]; n];
    for (i, &p) in pivots.iter().enumerate() {
        rows[i][p] = MPoly::one(nvars);
    }
    for (v, &(r, c)) in coordinates.iter().enumerate() {
        rows[r][c] = MPoly::var(v, nvars);
    }
    let w = |k: usize| form_weight(k, n);
    // Gram entry (p, q): w_p x_{q,2n-p} + w_{2n-q} x_{p,2n-q} + w_n x_{p,n} x_{q,n}.
    for (a, &p) in pivots.iter().enumerate() {
        for &q in &pivots[a..] {
            if p + q <= top {
                continue;
            }
            let (rp, rq) = (idx(p), idx(q));
            let colmix = if p > n && q > n {
                rows[rp][n].mul(&rows[rq][n]).scale(&w(n))
            } else {
                MPoly::zero(nvars)
            };
            if p == q {
                // 2 w_p x_{p,2n-p} + w_n x_{p,n}^2 = 0
                let coef = &w(p) + &w(p);
                rows[rp][top - p] = colmix.scale(&(-coef.recip()));
            } else {
                // solve for x_{p,2n-q}
                let known = rows[rq][top - p].scale(&w(p)).add(&colmix);
                rows[rp][top - q] = known.scale(&(-w(top - q).recip()));
            }
        }
    }
    Ok(Chart {
        d: n,
        m,
        pivots,
        nvars,
        rows,
        coordinates,
    })
}

/// `∏_{i<j} (s_j - s_i)`, the Wronskian constant of the monomials `z^{s_i}`.
pub fn monomial_wronskian_constant(s: &[usize]) -> Rational {
    let mut v = Rational::one();
    for i in 0..s.len() {
        for j in i + 1..s.len() {
            v *= Rational::from_integer((s[j] as i64 - s[i] as i64).into());
        }
    }
    v
}

fn subsets(m: usize, d: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, m: usize, d: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == d {
            out.push(cur.clone());
            return;
        }
        for c in start..m {
            if m - c < d - cur.len() {
                break;
            }
            cur.push(c);
            rec(c + 1, m, d, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, m, d, &mut Vec::new(), &mut out);
    out
}

/// Wronskian coefficients (index = power of `z`, length `d(m-d)+1`) via the
/// expansion `Wr = Σ_S p_S · Wr(z^{s_1}, ..., z^{s_d})` over maximal minors.
pub fn plucker_wronskian(rows: &[Vec<MPoly>], nvars: usize) -> Vec<MPoly> {
    let d = rows.len();
    let m = rows.first().map_or(0, |r| r.len());
    let top = d * (m - d);
    let mut out = vec![MPoly::zero(nvars); top + 1];
    let shift = d * d.saturating_sub(1) / 2;
    for s in subsets(m, d) {
        let minor: Vec<Vec<MPoly>> = rows
            .iter()
            .map(|r| s.iter().map(|&c| r[c].clone()).collect())
            .collect();
        let p = det(&minor, nvars);
        if p.is_zero() {
            continue;
        }
        let e = s.iter().sum::<usize>() - shift;
        out[e] = out[e].add(&p.scale(&monomial_wronskian_constant(&s)));
    }
    out
}

/// Square root of a polynomial in `z` with coefficients in Q[x], matched from
/// the top degree down. The top coefficient of `w` must be the nonzero
/// constant `lead^2`. Returns `None` when the remainder does not vanish.
pub fn symbolic_sqrt(w: &[MPoly], lead: &Rational, nvars: usize) -> Option<Vec<MPoly>> {
    let deg2 = w.iter().rposition(|c| !c.is_zero())?;
    if deg2 % 2 == 1 {
        return None;
    }
    let half = deg2 / 2;
    if w[deg2].as_constant()? != lead * lead {
        return None;
    }
    let mut p = vec![MPoly::zero(nvars); half + 1];
    p[half] = MPoly::constant(lead.clone(), nvars);
    let two_lead_inv = (lead + lead).recip();
    for k in 1..=half {
        // coefficient of z^{2 half - k}
        let target = 2 * half - k;
        let mut acc = w[target].clone();
        for i in half - k + 1..=half {
            let j = target - i;
            if j > half - k && j <= half {
                acc = acc.sub(&p[i].mul(&p[j]));
            }
        }
        p[half - k] = acc.scale(&two_lead_inv);
    }
    // verify the low half
    for target in 0..2 * half - half {
        let mut acc = MPoly::zero(nvars);
        for i in 0..=target.min(half) {
            let j = target - i;
            if j <= half {
                acc = acc.add(&p[i].mul(&p[j]));
            }
        }
        if acc != w[target] {
            return None;
        }
    }
    Some(p)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::osculating::gram_matrix;
    use crate::partitions::all_strict;
    use crate::scalar::int;

    #[test]
    fn big_cell_pivots() {
        let lam = Partition::empty(2, 2);
        assert_eq!(cell_pivots(&lam, 2, 4), vec![2, 3]);
        let full = Partition::new(vec![2, 2], 2, 2).unwrap();
        assert_eq!(cell_pivots(&full, 2, 4), vec![0, 1]);
        let c = gr_chart(&lam, 2, 4);
        assert_eq!(c.nvars, 4);
        let c = gr_chart(&Partition::new(vec![2, 1], 2, 2).unwrap(), 2, 4);
        assert_eq!(c.nvars, 1);
    }

    #[test]
    fn og_charts_are_isotropic_identically() {
        for n in 1..=4 {
            for tau in all_strict(n) {
                let chart = og_chart(&tau).unwrap();
                assert_eq!(chart.nvars, n * (n + 1) / 2 - tau.weight());
                // Gram matrix of the symbolic rows vanishes as polynomials.
                for i in 0..n {
                    for j in 0..n {
                        let mut acc = MPoly::zero(chart.nvars);
                        for k in 0..=2 * n {
                            let t = chart.rows[i][k].mul(&chart.rows[j][2 * n - k]);
                            acc = acc.add(&t.scale(&form_weight(k, n)));
                        }
                        assert!(acc.is_zero(), "n={n} tau={tau} entry ({i},{j}): {acc}");
                    }
                }
                // and a concrete point is isotropic
                let vals: Vec<Rational> = (0..chart.nvars).map(|v| int(v as i64 + 2)).collect();
                let rows = chart.point_at(&vals);
                let g = gram_matrix(&rows, n);
                assert_eq!(g.rank(), 0);
            }
        }
    }

    #[test]
    fn wronskian_of_og_chart_is_a_square() {
        for n in 1..=3 {
            for tau in all_strict(n) {
                let chart = og_chart(&tau).unwrap();
                let w = plucker_wronskian(&chart.rows, chart.nvars);
                let lead = monomial_wronskian_constant(&chart.pivots);
                let scaled: Vec<MPoly> = w.iter().map(|c| c.scale(&lead)).collect();
                let p = symbolic_sqrt(&scaled, &lead, chart.nvars);
                assert!(p.is_some(), "n={n} tau={tau}");
                assert_eq!(p.unwrap().len(), n * (n + 1) / 2 - tau.weight() + 1);
            }
        }
    }

    #[test]
    fn monomial_constant() {
        assert_eq!(monomial_wronskian_constant(&[0, 2]), int(2));
        assert_eq!(monomial_wronskian_constant(&[2, 3]), int(1));
        assert_eq!(monomial_wronskian_constant(&[0, 1, 3]), int(6));
    }

    #[test]
    fn symbolic_sqrt_rejects_non_square() {
        let c = |v: i64| MPoly::constant(int(v), 0);
        // z^2 + 1 is not a square
        assert!(symbolic_sqrt(&[c(1), c(0), c(1)], &int(1), 0).is_none());
        // (z + 2)^2
        let p = symbolic_sqrt(&[c(4), c(4), c(1)], &int(1), 0).unwrap();
        assert_eq!(p, vec![c(2), c(1)]);
    }
}
