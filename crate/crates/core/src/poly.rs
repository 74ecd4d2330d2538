//! Dense univariate polynomials living in a space `C_k[z]` of bounded degree.

use std::fmt;

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::scalar::{binomial, format_rational, rational_sqrt, Rational, Scalar};

/// Polynomial with `coeffs[k]` the coefficient of `z^k`, inside `C_{degree_bound}[z]`.
///
/// Coefficients are kept trimmed: there is never a trailing zero, so the
/// zero polynomial has an empty coefficient vector.
#[derive(Clone, Debug, PartialEq)]
pub struct Poly<F> {
    coeffs: Vec<F>,
    degree_bound: usize,
}

fn trim<F: Scalar>(v: &mut Vec<F>) {
    while v.last().is_some_and(|c| c.is_zero()) {
        v.pop();
    }
}

impl<F: Scalar> Poly<F> {
    pub fn new(mut coeffs: Vec<F>, degree_bound: usize) -> Result<Self> {
        trim(&mut coeffs);
        if coeffs.len() > degree_bound + 1 {
            return Err(Error::InvalidSubspace(format!(
                "polynomial of degree {} exceeds degree bound {degree_bound}",
                coeffs.len() - 1
            )));
        }
        Ok(Poly {
            coeffs,
            degree_bound,
        })
    }

    /// Like [`Poly::new`] with the bound taken from the coefficient count.
    pub fn from_coeffs(coeffs: Vec<F>) -> Self {
        let bound = coeffs.len().saturating_sub(1);
        Poly::new(coeffs, bound).expect("bound fits by construction")
    }

    pub fn zero(degree_bound: usize) -> Self {
        Poly {
            coeffs: Vec::new(),
            degree_bound,
        }
    }

    pub fn monomial(k: usize, c: F, degree_bound: usize) -> Self {
        let mut coeffs = vec![F::zero(); k + 1];
        coeffs[k] = c;
        Poly::new(coeffs, degree_bound.max(k)).expect("bound fits")
    }

    pub fn coeffs(&self) -> &[F] {
        &self.coeffs
    }

    /// Coefficient of `z^k` (zero beyond the stored range).
    pub fn coeff(&self, k: usize) -> F {
        self.coeffs.get(k).cloned().unwrap_or_else(F::zero)
    }

    pub fn degree_bound(&self) -> usize {
        self.degree_bound
    }

    /// Dense coefficient vector of length `degree_bound + 1`.
    pub fn to_vec(&self) -> Vec<F> {
        (0..=self.degree_bound).map(|k| self.coeff(k)).collect()
    }

    pub fn with_bound(mut self, degree_bound: usize) -> Result<Self> {
        if self.coeffs.len() > degree_bound + 1 {
            return Err(Error::InvalidSubspace(format!(
                "cannot fit degree {} into bound {degree_bound}",
                self.coeffs.len() - 1
            )));
        }
        self.degree_bound = degree_bound;
        Ok(self)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading(&self) -> Option<&F> {
        self.coeffs.last()
    }

    /// Index of the lowest nonzero coefficient.
    pub fn low_degree(&self) -> Option<usize> {
        self.coeffs.iter().position(|c| !c.is_zero())
    }

    pub fn add(&self, other: &Self) -> Self {
        let len = self.coeffs.len().max(other.coeffs.len());
        let coeffs = (0..len).map(|k| self.coeff(k) + other.coeff(k)).collect();
        Poly::new(coeffs, self.degree_bound.max(other.degree_bound)).expect("bound fits")
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(&-F::one()))
    }

    pub fn scale(&self, c: &F) -> Self {
        let coeffs = self.coeffs.iter().map(|x| x.clone() * c.clone()).collect();
        Poly::new(coeffs, self.degree_bound).expect("bound fits")
    }

    pub fn mul(&self, other: &Self) -> Self {
        let bound = self.degree_bound + other.degree_bound;
        if self.is_zero() || other.is_zero() {
            return Poly::zero(bound);
        }
        let mut out = vec![F::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] = out[i + j].clone() + a.clone() * b.clone();
            }
        }
        Poly::new(out, bound).expect("bound fits")
    }

    pub fn derivative(&self) -> Self {
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(k, c)| c.clone() * F::from_i64(k as i64))
            .collect();
        Poly::new(coeffs, self.degree_bound).expect("derivative lowers degree")
    }

    /// `f(z + a)` by binomial expansion.
    pub fn shift(&self, a: &F) -> Self {
        let n = self.coeffs.len();
        let mut powers = Vec::with_capacity(n);
        let mut p = F::one();
        for _ in 0..n {
            powers.push(p.clone());
            p = p * a.clone();
        }
        let mut out = vec![F::zero(); n];
        for (k, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            for (j, slot) in out.iter_mut().enumerate().take(k + 1) {
                let b = binomial(k, j);
                let b = F::from_i64(i64::try_from(b).expect("binomial fits in i64"));
                *slot = slot.clone() + c.clone() * b * powers[k - j].clone();
            }
        }
        Poly::new(out, self.degree_bound).expect("shift preserves degree")
    }

    /// `z^{degree_bound} f(1/z)`: coefficient reversal within the ambient space.
    pub fn reverse(&self) -> Self {
        let coeffs = (0..=self.degree_bound)
            .rev()
            .map(|k| self.coeff(k))
            .collect();
        Poly::new(coeffs, self.degree_bound).expect("reversal stays in bound")
    }

    pub fn eval(&self, x: &F) -> F {
        self.coeffs
            .iter()
            .rev()
            .fold(F::zero(), |acc, c| acc * x.clone() + c.clone())
    }

    /// Division by the monic linear factor `z + a`, returning quotient and remainder.
    pub fn div_linear(&self, a: &F) -> (Self, F) {
        if self.is_zero() {
            return (self.clone(), F::zero());
        }
        let n = self.coeffs.len();
        let mut q = vec![F::zero(); n - 1];
        let mut carry = F::zero();
        for k in (0..n).rev() {
            let v = self.coeffs[k].clone() + carry.clone();
            if k == 0 {
                return (
                    Poly::new(q, self.degree_bound).expect("quotient fits"),
                    v,
                );
            }
            q[k - 1] = v.clone();
            carry = -(v * a.clone());
        }
        unreachable!()
    }

    /// Scales so that the lowest nonzero coefficient equals 1.
    pub fn projective_canonical(&self) -> Self {
        match self.low_degree() {
            None => self.clone(),
            Some(k) => {
                let inv = self.coeffs[k].inv().expect("nonzero coefficient");
                self.scale(&inv)
            }
        }
    }

    /// Largest `k` with `(z + a)^k` dividing `self`. Exact for rational input;
    /// for complex input the remainder test is an exact-zero test.
    pub fn root_multiplicity(&self, a: &F) -> usize {
        assert!(!self.is_zero(), "multiplicity of the zero polynomial");
        let mut k = 0;
        let mut cur = self.clone();
        loop {
            let (q, r) = cur.div_linear(a);
            if !r.is_zero() || q.is_zero() {
                return k;
            }
            k += 1;
            cur = q;
        }
    }
}

/// A point of the projective line used for root multiplicities.
#[derive(Clone, Debug, PartialEq)]
pub enum RootPoint<F> {
    Finite(F),
    Infinity,
}

/// Multiplicity of `h` at `a`: for finite `a`, the largest power of `z + a` dividing `h`;
/// at infinity, `ambient_degree - deg h`.
pub fn poly_root_multiplicity<F: Scalar>(
    h: &Poly<F>,
    a: &RootPoint<F>,
    ambient_degree: usize,
) -> Result<usize> {
    let deg = h
        .degree()
        .ok_or_else(|| Error::Consistency("multiplicity of the zero polynomial".into()))?;
    match a {
        RootPoint::Finite(a) => Ok(h.root_multiplicity(a)),
        RootPoint::Infinity => ambient_degree.checked_sub(deg).ok_or_else(|| {
            Error::Consistency(format!(
                "degree {deg} exceeds ambient degree {ambient_degree}"
            ))
        }),
    }
}

impl Poly<Rational> {
    /// Exact square root over Q.
    ///
    /// Matches coefficients upward from the lowest nonzero term (whose square
    /// root must be rational), then verifies `p^2 = self`. The root is chosen
    /// with positive lowest coefficient.
    pub fn exact_sqrt(&self) -> Result<Self> {
        let low = self
            .low_degree()
            .ok_or_else(|| Error::NotAPerfectSquare("zero polynomial".into()))?;
        let deg = self.degree().expect("nonzero");
        if low % 2 == 1 || (deg - low) % 2 == 1 {
            return Err(Error::NotAPerfectSquare(format!(
                "odd vanishing order or odd degree in {self}"
            )));
        }
        let shift = low / 2;
        let half = (deg - low) / 2;
        let c0 = rational_sqrt(&self.coeffs[low]).ok_or_else(|| {
            Error::NotAPerfectSquare(format!(
                "lowest coefficient {} is not a rational square",
                format_rational(&self.coeffs[low])
            ))
        })?;
        let two_c0 = &c0 + &c0;
        let mut p: Vec<Rational> = vec![c0];
        for k in 1..=half {
            let mut acc = self.coeff(low + k);
            for i in 1..k {
                acc -= &p[i] * &p[k - i];
            }
            p.push(acc / &two_c0);
        }
        let mut full = vec![Rational::zero(); shift];
        full.extend(p);
        let root = Poly::new(full, self.degree_bound / 2)?;
        if root.mul(&root).coeffs != self.coeffs {
            return Err(Error::NotAPerfectSquare(format!("{self}")));
        }
        Ok(root)
    }

    pub fn to_c64(&self) -> Poly<crate::scalar::C64> {
        Poly {
            coeffs: self.coeffs.iter().map(|c| c.to_c64()).collect(),
            degree_bound: self.degree_bound,
        }
    }
}

/// Splits `h` into `c · ∏ (z + a)^k` over Q, returning the pairs `(a, k)`
/// sorted by `a`. Fails when some irreducible factor has degree above one.
pub fn rational_linear_factors(h: &Poly<Rational>) -> Result<Vec<(Rational, usize)>> {
    if h.is_zero() {
        return Err(Error::UnsupportedTarget("zero polynomial".into()));
    }
    let mut factors: Vec<(Rational, usize)> = Vec::new();
    // powers of z come off exactly
    let low = h.low_degree().expect("nonzero");
    if low > 0 {
        factors.push((Rational::zero(), low));
    }
    let mut rest = Poly::from_coeffs(h.coeffs()[low..].to_vec());
    while rest.degree().unwrap_or(0) > 0 {
        let found = numeric_roots(&rest).into_iter().find_map(|r| {
            if r.im.abs() > 1e-3 * (1.0 + r.re.abs()) {
                return None;
            }
            // try ever finer approximations; noisy multiple roots match early
            (0..13).find_map(|e| {
                let a = crate::scalar::rational_approx(-r.re, 10u64.pow(e))?;
                let (q, rem) = rest.div_linear(&a);
                rem.is_zero().then_some((a, q))
            })
        });
        let Some((a, q)) = found else {
            return Err(Error::UnsupportedTarget(format!(
                "{h} has a factor {rest} without rational roots"
            )));
        };
        rest = q;
        match factors.iter_mut().find(|(b, _)| *b == a) {
            Some((_, k)) => *k += 1,
            None => factors.push((a, 1)),
        }
    }
    factors.sort_by(|x, y| x.0.cmp(&y.0));
    Ok(factors)
}

/// Complex roots from the eigenvalues of the companion matrix.
fn numeric_roots(p: &Poly<Rational>) -> Vec<crate::scalar::C64> {
    let c: Vec<f64> = p.coeffs().iter().map(crate::scalar::rational_to_f64).collect();
    let deg = c.len() - 1;
    let lead = c[deg];
    let comp = nalgebra::DMatrix::from_fn(deg, deg, |i, j| {
        if j == deg - 1 {
            -c[i] / lead
        } else if i == j + 1 {
            1.0
        } else {
            0.0
        }
    });
    let Some(schur) = nalgebra::linalg::Schur::try_new(comp, f64::EPSILON, 10_000) else {
        return Vec::new();
    };
    let mut roots: Vec<_> = schur.complex_eigenvalues().iter().copied().collect();
    roots.sort_by(|a, b| a.im.abs().total_cmp(&b.im.abs()).then(a.re.total_cmp(&b.re)));
    roots
}

impl fmt::Display for Poly<Rational> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (k, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            let cs = format_rational(c);
            match k {
                0 => write!(f, "{cs}")?,
                1 if c.is_one() => write!(f, "z")?,
                1 => write!(f, "({cs})z")?,
                _ if c.is_one() => write!(f, "z^{k}")?,
                _ => write!(f, "({cs})z^{k}")?,
            }
        }
        Ok(())
    }
}
