//! Sparse multivariate polynomials over Q, used for Schubert cell charts and
//! the square systems handed to the path tracker.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Signed, Zero};

use crate::scalar::{format_rational, Rational, Scalar, C64};

pub type Exponent = Vec<u16>;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MPoly {
    nvars: usize,
    terms: BTreeMap<Exponent, Rational>,
}

impl MPoly {
    pub fn zero(nvars: usize) -> Self {
        MPoly {
            nvars,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(c: Rational, nvars: usize) -> Self {
        let mut p = MPoly::zero(nvars);
        if !c.is_zero() {
            p.terms.insert(vec![0; nvars], c);
        }
        p
    }

    pub fn one(nvars: usize) -> Self {
        MPoly::constant(Rational::one(), nvars)
    }

    pub fn var(i: usize, nvars: usize) -> Self {
        let mut e = vec![0; nvars];
        e[i] = 1;
        let mut p = MPoly::zero(nvars);
        p.terms.insert(e, Rational::one());
        p
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Exponent, &Rational)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// The value if this polynomial is constant.
    pub fn as_constant(&self) -> Option<Rational> {
        match self.terms.len() {
            0 => Some(Rational::zero()),
            1 => {
                let (e, c) = self.terms.iter().next().expect("one term");
                e.iter().all(|&x| x == 0).then(|| c.clone())
            }
            _ => None,
        }
    }

    pub fn total_degree(&self) -> usize {
        self.terms
            .keys()
            .map(|e| e.iter().map(|&x| x as usize).sum())
            .max()
            .unwrap_or(0)
    }

    fn add_term(&mut self, e: Exponent, c: Rational) {
        if c.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(e) {
            Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
            Entry::Vacant(v) => {
                v.insert(c);
            }
        }
    }

    pub fn add(&self, other: &MPoly) -> MPoly {
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.add_term(e.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, other: &MPoly) -> MPoly {
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.add_term(e.clone(), -c.clone());
        }
        out
    }

    pub fn scale(&self, c: &Rational) -> MPoly {
        if c.is_zero() {
            return MPoly::zero(self.nvars);
        }
        MPoly {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(e, v)| (e.clone(), v * c)).collect(),
        }
    }

    pub fn mul(&self, other: &MPoly) -> MPoly {
        let mut out = MPoly::zero(self.nvars);
        for (e1, c1) in &self.terms {
            for (e2, c2) in &other.terms {
                let e: Exponent = e1.iter().zip(e2).map(|(a, b)| a + b).collect();
                out.add_term(e, c1 * c2);
            }
        }
        out
    }

    pub fn partial(&self, v: usize) -> MPoly {
        let mut out = MPoly::zero(self.nvars);
        for (e, c) in &self.terms {
            if e[v] == 0 {
                continue;
            }
            let mut e2 = e.clone();
            e2[v] -= 1;
            out.add_term(e2, c * Rational::from_integer(e[v].into()));
        }
        out
    }

    pub fn eval<F: Scalar>(&self, x: &[F]) -> F {
        let mut acc = F::zero();
        for (e, c) in &self.terms {
            let mut t = F::from_rational(c);
            for (v, &k) in e.iter().enumerate() {
                for _ in 0..k {
                    t = t * x[v].clone();
                }
            }
            acc = acc + t;
        }
        acc
    }

    /// Largest absolute coefficient.
    pub fn max_coeff(&self) -> Rational {
        self.terms
            .values()
            .map(|c| c.abs())
            .max()
            .unwrap_or_else(Rational::zero)
    }
}

impl fmt::Display for MPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|(e, c)| {
                let mono: Vec<String> = e
                    .iter()
                    .enumerate()
                    .filter(|(_, &k)| k > 0)
                    .map(|(v, &k)| if k == 1 { format!("x{v}") } else { format!("x{v}^{k}") })
                    .collect();
                if mono.is_empty() {
                    format_rational(c)
                } else {
                    format!("({})*{}", format_rational(c), mono.join("*"))
                }
            })
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

/// Determinant of a small square matrix of polynomials by cofactor expansion.
pub fn det(m: &[Vec<MPoly>], nvars: usize) -> MPoly {
    let n = m.len();
    if n == 0 {
        return MPoly::one(nvars);
    }
    let cols: Vec<usize> = (0..n).collect();
    det_rec(m, 0, &cols, nvars)
}

fn det_rec(m: &[Vec<MPoly>], row: usize, cols: &[usize], nvars: usize) -> MPoly {
    if cols.len() == 1 {
        return m[row][cols[0]].clone();
    }
    let mut acc = MPoly::zero(nvars);
    for (idx, &c) in cols.iter().enumerate() {
        if m[row][c].is_zero() {
            continue;
        }
        let rest: Vec<usize> = cols.iter().copied().filter(|&x| x != c).collect();
        let minor = det_rec(m, row + 1, &rest, nvars);
        let term = m[row][c].mul(&minor);
        acc = if idx % 2 == 0 { acc.add(&term) } else { acc.sub(&term) };
    }
    acc
}

/// A polynomial flattened for fast complex evaluation with its gradient.
#[derive(Clone, Debug)]
pub struct CompiledPoly {
    /// (coefficient, sparse exponent list)
    terms: Vec<(C64, Vec<(usize, usize)>)>,
    max_degree: usize,
}

impl CompiledPoly {
    pub fn new(p: &MPoly, scale: &Rational) -> Self {
        let terms: Vec<(C64, Vec<(usize, usize)>)> = p
            .terms()
            .map(|(e, c)| {
                let sparse = e
                    .iter()
                    .enumerate()
                    .filter(|(_, &k)| k > 0)
                    .map(|(v, &k)| (v, k as usize))
                    .collect();
                ((c * scale).to_c64(), sparse)
            })
            .collect();
        let max_degree = terms
            .iter()
            .flat_map(|(_, s)| s.iter().map(|&(_, k)| k))
            .max()
            .unwrap_or(0);
        CompiledPoly { terms, max_degree }
    }

    pub fn max_degree(&self) -> usize {
        self.max_degree
    }

    /// Value, gradient (accumulated into `grad`), and the sum of absolute
    /// term magnitudes (a scale for relative residuals).
    pub fn eval_with_grad(&self, powers: &[Vec<C64>], grad: &mut [C64]) -> (C64, f64) {
        for g in grad.iter_mut() {
            *g = C64::zero();
        }
        let mut val = C64::zero();
        let mut mag = 0.0;
        for (c, mono) in &self.terms {
            let mut t = *c;
            for &(v, k) in mono {
                t *= powers[v][k];
            }
            val += t;
            mag += t.norm();
            for (i, &(v, k)) in mono.iter().enumerate() {
                let mut d = *c * C64::new(k as f64, 0.0) * powers[v][k - 1];
                for (j, &(u, l)) in mono.iter().enumerate() {
                    if i != j {
                        d *= powers[u][l];
                    }
                }
                grad[v] += d;
            }
        }
        (val, mag)
    }

    pub fn eval(&self, powers: &[Vec<C64>]) -> (C64, f64) {
        let mut val = C64::zero();
        let mut mag = 0.0;
        for (c, mono) in &self.terms {
            let mut t = *c;
            for &(v, k) in mono {
                t *= powers[v][k];
            }
            val += t;
            mag += t.norm();
        }
        (val, mag)
    }
}

/// Table `powers[v][k] = x_v^k` for `k <= max_degree`.
pub fn power_table(x: &[C64], max_degree: usize) -> Vec<Vec<C64>> {
    x.iter()
        .map(|&xi| {
            let mut row = Vec::with_capacity(max_degree + 1);
            let mut p = C64::one();
            for _ in 0..=max_degree {
                row.push(p);
                p *= xi;
            }
            row
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{int, rat};

    #[test]
    fn arithmetic_and_degree() {
        let x = MPoly::var(0, 2);
        let y = MPoly::var(1, 2);
        let p = x.add(&y).mul(&x.sub(&y)); // x^2 - y^2
        assert_eq!(p.num_terms(), 2);
        assert_eq!(p.total_degree(), 2);
        assert_eq!(p.eval(&[int(3), int(2)]), int(5));
        assert_eq!(p.partial(0), x.scale(&int(2)));
        assert!(p.sub(&p).is_zero());
        assert_eq!(MPoly::constant(rat(1, 2), 2).as_constant(), Some(rat(1, 2)));
        assert_eq!(x.as_constant(), None);
    }

    #[test]
    fn determinant_2x2_and_3x3() {
        let x = MPoly::var(0, 1);
        let c = |v: i64| MPoly::constant(int(v), 1);
        let m = vec![vec![x.clone(), c(1)], vec![c(2), x.clone()]];
        let d = det(&m, 1); // x^2 - 2
        assert_eq!(d.eval(&[int(3)]), int(7));
        let m3 = vec![
            vec![c(2), c(0), c(0)],
            vec![c(0), x.clone(), c(0)],
            vec![c(0), c(0), c(5)],
        ];
        assert_eq!(det(&m3, 1), x.scale(&int(10)));
    }

    #[test]
    fn compiled_gradient_matches_symbolic() {
        let x = MPoly::var(0, 2);
        let y = MPoly::var(1, 2);
        let p = x.mul(&x).mul(&y).add(&y.scale(&int(3))).add(&MPoly::constant(int(-1), 2));
        let cp = CompiledPoly::new(&p, &int(1));
        let pt = [C64::new(0.3, -1.1), C64::new(2.0, 0.5)];
        let pw = power_table(&pt, cp.max_degree());
        let mut g = vec![C64::zero(); 2];
        let (v, _) = cp.eval_with_grad(&pw, &mut g);
        assert!((v - p.eval(&pt)).norm() < 1e-12);
        assert!((g[0] - p.partial(0).eval(&pt)).norm() < 1e-12);
        assert!((g[1] - p.partial(1).eval(&pt)).norm() < 1e-12);
    }
}
