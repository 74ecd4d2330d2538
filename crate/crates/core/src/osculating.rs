//! Osculating flags of the rational normal curve in `C_{m-1}[z]`, the
//! symmetric form on `C_{2n}[z]`, and exact checks that the flags are
//! orthogonal for that form.

use std::fmt;
use std::str::FromStr;

use num_traits::{One, Zero};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::matrix::Mat;
use crate::poly::Poly;
use crate::scalar::{
    binomial, factorial, format_rational, parse_rational, random_rational, Rational, Scalar,
};

/// A rational point of the real projective line.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum FlagPoint {
    Finite(Rational),
    Infinity,
}

impl FlagPoint {
    pub fn finite(q: Rational) -> Self {
        FlagPoint::Finite(q)
    }

    pub fn is_infinity(&self) -> bool {
        matches!(self, FlagPoint::Infinity)
    }
}

impl fmt::Display for FlagPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FlagPoint::Finite(q) => write!(f, "{}", format_rational(q)),
            FlagPoint::Infinity => write!(f, "infinity"),
        }
    }
}

impl FromStr for FlagPoint {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "infinity" | "inf" | "Infinity" | "∞" => Ok(FlagPoint::Infinity),
            other => parse_rational(other).map(FlagPoint::Finite),
        }
    }
}

impl Serialize for FlagPoint {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for FlagPoint {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Coefficient vector (length `m`) of `(z + a)^k`.
fn power_of_linear(a: &Rational, k: usize, m: usize) -> Vec<Rational> {
    let mut row = vec![Rational::zero(); m];
    let mut apow = Rational::one();
    // coefficient of z^j is C(k, j) a^{k-j}; fill from j = k downwards
    for j in (0..=k).rev() {
        row[j] = Rational::from_integer(binomial(k, j)) * &apow;
        apow *= a;
    }
    row
}

/// Basis of `F_i(a)` in `C_{m-1}[z]` as an `i x m` matrix.
///
/// Finite `a`: rows `(z+a)^{m-i}, ..., (z+a)^{m-1}`. Infinity: rows `1, z, ..., z^{i-1}`.
pub fn flag_basis(a: &FlagPoint, i: usize, m: usize) -> Mat<Rational> {
    assert!(i <= m, "flag index {i} exceeds ambient dimension {m}");
    let rows = match a {
        FlagPoint::Finite(a) => (m - i..m).map(|k| power_of_linear(a, k, m)).collect(),
        FlagPoint::Infinity => (0..i)
            .map(|k| {
                let mut row = vec![Rational::zero(); m];
                row[k] = Rational::one();
                row
            })
            .collect(),
    };
    Mat::from_rows(rows, m).expect("rows of length m")
}

/// Alternative basis of `F_i(a)`: the first `i` derivatives of the curve
/// `t -> (z + t)^{m-1}` at `t = a` (at infinity, of `s -> (1 + s z)^{m-1}` at `s = 0`).
pub fn flag_basis_from_derivatives(a: &FlagPoint, i: usize, m: usize) -> Mat<Rational> {
    let top = m - 1;
    let rows = (0..i)
        .map(|j| {
            (0..m)
                .map(|k| match a {
                    // d^j/dt^j [C(top,k) t^{top-k}] at t = a
                    FlagPoint::Finite(a) => {
                        if top - k < j {
                            return Rational::zero();
                        }
                        let e = top - k - j;
                        let falling = factorial(top - k) / factorial(e);
                        Rational::from_integer(binomial(top, k) * falling)
                            * num_traits::pow(a.clone(), e)
                    }
                    // d^j/ds^j [C(top,k) s^k z^k] at s = 0
                    FlagPoint::Infinity => {
                        if k == j {
                            Rational::from_integer(binomial(top, k) * factorial(k))
                        } else {
                            Rational::zero()
                        }
                    }
                })
                .collect()
        })
        .collect();
    Mat::from_rows(rows, m).expect("rows of length m")
}

/// `(-1)^k k! (2n-k)!`, the weight pairing `z^k` with `z^{2n-k}`.
pub fn form_weight(k: usize, n: usize) -> Rational {
    let w = Rational::from_integer(factorial(k) * factorial(2 * n - k));
    if k % 2 == 1 {
        -w
    } else {
        w
    }
}

/// The symmetric form on `C_{2n}[z]` applied to plain coefficient vectors:
/// with `f = Σ a_k z^k / k!` it is `Σ (-1)^k a_k b_{2n-k}`.
pub fn bilinear_form_coeffs<F: Scalar>(f: &[F], g: &[F], n: usize) -> F {
    let get = |v: &[F], k: usize| v.get(k).cloned().unwrap_or_else(F::zero);
    let mut acc = F::zero();
    for k in 0..=2 * n {
        let a = get(f, k);
        let b = get(g, 2 * n - k);
        if a.is_zero() || b.is_zero() {
            continue;
        }
        let w = form_weight(k, n);
        let w = F::from_i64(i64::try_from(w.to_integer()).expect("form weight fits in i64"));
        acc = acc + w * a * b;
    }
    acc
}

pub fn bilinear_form(f: &Poly<Rational>, g: &Poly<Rational>, n: usize) -> Result<Rational> {
    for p in [f, g] {
        if p.degree().is_some_and(|d| d > 2 * n) {
            return Err(Error::InvalidSubspace(format!(
                "polynomial {p} has degree above 2n = {}",
                2 * n
            )));
        }
    }
    Ok(bilinear_form_coeffs(f.coeffs(), g.coeffs(), n))
}

/// Gram matrix of the form on a set of coefficient rows.
pub fn gram_matrix<F: Scalar>(rows: &[Vec<F>], n: usize) -> Mat<F> {
    let k = rows.len();
    let mut g = Mat::zeros(k, k);
    for i in 0..k {
        for j in 0..k {
            g[(i, j)] = bilinear_form_coeffs(&rows[i], &rows[j], n);
        }
    }
    g
}

#[derive(Clone, Debug, Serialize)]
pub struct LevelCheck {
    pub i: usize,
    /// Every row of `F_i` pairs to zero with every row of `F_{2n+1-i}`.
    pub orthogonal: bool,
    /// `dim F_i + dim F_{2n+1-i} = 2n+1` with both bases of full rank.
    pub complementary: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct OrthogonalFlagReport {
    pub point: FlagPoint,
    pub n: usize,
    pub nondegenerate: bool,
    pub levels: Vec<LevelCheck>,
    pub pass: bool,
}

/// Checks `F_i(a)^⊥ = F_{2n+1-i}(a)` for every `i` in `0..=2n+1`.
///
/// Orthogonality plus complementary dimensions and non-degeneracy of the form
/// give equality of the orthogonal complement.
pub fn check_orthogonal_flag(a: &FlagPoint, n: usize) -> OrthogonalFlagReport {
    let m = 2 * n + 1;
    let monomials: Vec<Vec<Rational>> = flag_basis(&FlagPoint::Infinity, m, m).row_vecs();
    let nondegenerate = gram_matrix(&monomials, n).rank() == m;
    let levels: Vec<LevelCheck> = (0..=m)
        .map(|i| {
            let fi = flag_basis(a, i, m);
            let fj = flag_basis(a, m - i, m);
            let orthogonal = (0..fi.rows()).all(|r| {
                (0..fj.rows()).all(|s| bilinear_form_coeffs(fi.row(r), fj.row(s), n).is_zero())
            });
            let complementary = fi.rank() == i && fj.rank() == m - i;
            LevelCheck {
                i,
                orthogonal,
                complementary,
            }
        })
        .collect();
    let pass = nondegenerate && levels.iter().all(|l| l.orthogonal && l.complementary);
    OrthogonalFlagReport {
        point: a.clone(),
        n,
        nondegenerate,
        levels,
        pass,
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct PropertyReport {
    pub name: &'static str,
    pub n: usize,
    pub trials: usize,
    pub failures: usize,
    pub pass: bool,
}

fn random_poly(rng: &mut ChaCha8Rng, deg: usize) -> Poly<Rational> {
    Poly::new((0..=deg).map(|_| random_rational(rng, 9, 6)).collect(), deg)
        .expect("within bound")
}

/// `<f', g> = -<f, g'>` for random exact `f, g` in `C_{2n}[z]`.
pub fn check_skew_derivative(n: usize, trials: usize, seed: u64) -> PropertyReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let failures = (0..trials)
        .filter(|_| {
            let f = random_poly(&mut rng, 2 * n);
            let g = random_poly(&mut rng, 2 * n);
            let lhs = bilinear_form_coeffs(f.derivative().coeffs(), g.coeffs(), n);
            let rhs = -bilinear_form_coeffs(f.coeffs(), g.derivative().coeffs(), n);
            lhs != rhs
        })
        .count();
    PropertyReport {
        name: "skew_derivative",
        n,
        trials,
        failures,
        pass: failures == 0,
    }
}

/// `<f(z+a), g(z+a)> = <f, g>` for random exact `f, g` in `C_{2n}[z]`.
pub fn check_translation_invariance(a: &Rational, n: usize, trials: usize, seed: u64) -> PropertyReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let failures = (0..trials)
        .filter(|_| {
            let f = random_poly(&mut rng, 2 * n);
            let g = random_poly(&mut rng, 2 * n);
            let shifted = bilinear_form_coeffs(f.shift(a).coeffs(), g.shift(a).coeffs(), n);
            shifted != bilinear_form_coeffs(f.coeffs(), g.coeffs(), n)
        })
        .count();
    PropertyReport {
        name: "translation_invariance",
        n,
        trials,
        failures,
        pass: failures == 0,
    }
}

/// Change of frame on `C_{m-1}[z]` sending the flag point `center` to infinity:
/// translate `f(z) -> f(z - center)`, then reverse coefficients
/// (`f -> z^{m-1} f(1/z)`). Both steps carry osculating flags to osculating
/// flags and preserve the symmetric form on `C_{2n}[z]`.
#[derive(Clone, Debug, PartialEq)]
pub struct FrameChange {
    pub center: Rational,
}

impl FrameChange {
    pub fn map_point(&self, a: &FlagPoint) -> FlagPoint {
        match a {
            FlagPoint::Infinity => FlagPoint::Finite(Rational::zero()),
            FlagPoint::Finite(b) => {
                let t = b - &self.center;
                if t.is_zero() {
                    FlagPoint::Infinity
                } else {
                    FlagPoint::Finite(t.recip())
                }
            }
        }
    }

    /// Forward map on a polynomial in `C_{m-1}[z]` (its degree bound must be `m-1`).
    pub fn forward<F: Scalar>(&self, f: &Poly<F>) -> Poly<F> {
        let c = F::from_rational(&-self.center.clone());
        f.shift(&c).reverse()
    }

    pub fn backward<F: Scalar>(&self, f: &Poly<F>) -> Poly<F> {
        let c = F::from_rational(&self.center);
        f.reverse().shift(&c)
    }
}
