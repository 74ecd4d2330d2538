//! Partitions in a `d x (m-d)` box, strict partitions, the barred and tilde
//! sequences attached to a strict partition, and tableau-counting oracles.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::ToPrimitive;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::scalar::factorial;

/// Weakly decreasing parts in a `d`-slot, width-`cap` box. Trailing zeros are implicit.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Partition {
    parts: Vec<usize>,
    d: usize,
    cap: usize,
}

impl Partition {
    pub fn new(mut parts: Vec<usize>, d: usize, cap: usize) -> Result<Self> {
        while parts.last() == Some(&0) {
            parts.pop();
        }
        if parts.len() > d {
            return Err(Error::InvalidPartition(format!(
                "{parts:?} has more than {d} nonzero parts"
            )));
        }
        if parts.windows(2).any(|w| w[0] < w[1]) {
            return Err(Error::InvalidPartition(format!(
                "{parts:?} is not weakly decreasing"
            )));
        }
        if parts.first().is_some_and(|&p| p > cap) {
            return Err(Error::InvalidPartition(format!(
                "{parts:?} has a part larger than {cap}"
            )));
        }
        Ok(Partition { parts, d, cap })
    }

    pub fn empty(d: usize, cap: usize) -> Self {
        Partition {
            parts: Vec::new(),
            d,
            cap,
        }
    }

    pub fn parts(&self) -> &[usize] {
        &self.parts
    }

    /// `λ^i` for `i` in `1..=d` (1-based); zero past the stored parts.
    pub fn part(&self, i: usize) -> usize {
        self.parts.get(i - 1).copied().unwrap_or(0)
    }

    /// All `d` parts including trailing zeros.
    pub fn padded(&self) -> Vec<usize> {
        (1..=self.d).map(|i| self.part(i)).collect()
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn cap(&self) -> usize {
        self.cap
    }

    pub fn weight(&self) -> usize {
        self.parts.iter().sum()
    }

    pub fn is_empty(&self) -> bool {
        self.parts.is_empty()
    }
}

impl fmt::Display for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.parts)
    }
}

impl Serialize for Partition {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.parts.serialize(s)
    }
}

/// Strictly decreasing positive parts, each at most `n`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct StrictPartition {
    parts: Vec<usize>,
    n: usize,
}

impl StrictPartition {
    pub fn new(mut parts: Vec<usize>, n: usize) -> Result<Self> {
        while parts.last() == Some(&0) {
            parts.pop();
        }
        if parts.contains(&0) || parts.windows(2).any(|w| w[0] <= w[1]) {
            return Err(Error::InvalidPartition(format!(
                "{parts:?} is not a strict partition"
            )));
        }
        if parts.first().is_some_and(|&p| p > n) {
            return Err(Error::InvalidPartition(format!(
                "{parts:?} has a part larger than {n}"
            )));
        }
        Ok(StrictPartition { parts, n })
    }

    pub fn empty(n: usize) -> Self {
        StrictPartition {
            parts: Vec::new(),
            n,
        }
    }

    /// The staircase `(n, n-1, ..., 1)`.
    pub fn staircase(n: usize) -> Self {
        StrictPartition {
            parts: (1..=n).rev().collect(),
            n,
        }
    }

    pub fn parts(&self) -> &[usize] {
        &self.parts
    }

    /// `σ^j` for 1-based `j`, zero for `j` past the last part.
    pub fn part(&self, j: usize) -> usize {
        self.parts.get(j - 1).copied().unwrap_or(0)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn weight(&self) -> usize {
        self.parts.iter().sum()
    }

    pub fn is_empty(&self) -> bool {
        self.parts.is_empty()
    }
}

impl fmt::Display for StrictPartition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.parts)
    }
}

impl Serialize for StrictPartition {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.parts.serialize(s)
    }
}

/// Strictly decreasing `n`-term sequence whose absolute values are `{1, ..., n}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BarSequence(Vec<i64>);

impl BarSequence {
    pub fn values(&self) -> &[i64] {
        &self.0
    }

    fn check(&self, sigma: &StrictPartition) -> Result<()> {
        let n = sigma.n();
        let v = &self.0;
        let mut abs: Vec<i64> = v.iter().map(|x| x.abs()).collect();
        abs.sort_unstable();
        let ok = v.len() == n
            && v.windows(2).all(|w| w[0] > w[1])
            && abs == (1..=n as i64).collect::<Vec<_>>()
            && (1..=n).all(|i| sigma.part(i) == 0 || v[i - 1] == sigma.part(i) as i64);
        if ok {
            Ok(())
        } else {
            Err(Error::Consistency(format!(
                "bar sequence {v:?} of {sigma} violates its invariants"
            )))
        }
    }
}

pub trait Weighted {
    fn weight(&self) -> usize;
}

impl Weighted for Partition {
    fn weight(&self) -> usize {
        Partition::weight(self)
    }
}

impl Weighted for StrictPartition {
    fn weight(&self) -> usize {
        StrictPartition::weight(self)
    }
}

pub fn weight<P: Weighted>(p: &P) -> usize {
    p.weight()
}

/// `#{ j >= 1 : j <= i < j + σ^j }`.
fn overlap_count(sigma: &StrictPartition, i: usize) -> usize {
    (1..=i).filter(|&j| i < j + sigma.part(j)).count()
}

/// `σ̄^i = σ^i - i + #{j : j <= i < j + σ^j}` for `i = 1..=n`.
pub fn bar_sequence(sigma: &StrictPartition) -> BarSequence {
    let values = (1..=sigma.n())
        .map(|i| sigma.part(i) as i64 - i as i64 + overlap_count(sigma, i) as i64)
        .collect();
    let bar = BarSequence(values);
    bar.check(sigma).expect("bar sequence invariants");
    bar
}

/// `σ̃^i = σ̄^i + i`, a partition in the `n x (n+1)` box of weight `2|σ|`.
pub fn tilde_partition(sigma: &StrictPartition) -> Partition {
    let n = sigma.n();
    let parts: Vec<usize> = bar_sequence(sigma)
        .values()
        .iter()
        .enumerate()
        .map(|(i, &b)| usize::try_from(b + i as i64 + 1).expect("tilde entries are non-negative"))
        .collect();
    let lam = Partition::new(parts, n, n + 1).expect("tilde lies in the n x (n+1) box");
    assert_eq!(lam.weight(), 2 * sigma.weight(), "doubling identity");
    lam
}

/// Inverse of [`tilde_partition`]: the strict partition `σ` with `σ̃ = λ`, if any.
pub fn untilde(lambda: &Partition, n: usize) -> Option<StrictPartition> {
    if lambda.d() != n {
        return None;
    }
    let parts: Vec<usize> = (1..=n)
        .map(|i| lambda.part(i) as i64 - i as i64)
        .filter(|&b| b > 0)
        .map(|b| b as usize)
        .collect();
    let sigma = StrictPartition::new(parts, n).ok()?;
    (tilde_partition(&sigma) == *lambda).then_some(sigma)
}

/// Strict partitions of `k` with parts at most `n`, in decreasing lexicographic order.
pub fn enumerate_strict(n: usize, k: usize) -> Vec<StrictPartition> {
    fn rec(max: usize, rest: usize, cur: &mut Vec<usize>, n: usize, out: &mut Vec<StrictPartition>) {
        if rest == 0 {
            out.push(StrictPartition {
                parts: cur.clone(),
                n,
            });
            return;
        }
        for p in (1..=max.min(rest)).rev() {
            cur.push(p);
            rec(p - 1, rest - p, cur, n, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(n, k, &mut Vec::new(), n, &mut out);
    out
}

/// Every strict partition with parts at most `n`.
pub fn all_strict(n: usize) -> Vec<StrictPartition> {
    (0..=n * (n + 1) / 2)
        .flat_map(|k| enumerate_strict(n, k))
        .collect()
}

/// Partitions of `k` in the `d x cap` box, in decreasing lexicographic order.
pub fn enumerate_box(d: usize, cap: usize, k: usize) -> Vec<Partition> {
    fn rec(
        slots: usize,
        max: usize,
        rest: usize,
        cur: &mut Vec<usize>,
        out: &mut Vec<Vec<usize>>,
    ) {
        if rest == 0 {
            out.push(cur.clone());
            return;
        }
        if slots == 0 {
            return;
        }
        for p in (1..=max.min(rest)).rev() {
            cur.push(p);
            rec(slots - 1, p, rest - p, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(d, cap, k, &mut Vec::new(), &mut out);
    out.into_iter()
        .map(|p| Partition::new(p, d, cap).expect("fits the box"))
        .collect()
}

fn to_u128(x: &BigInt) -> u128 {
    x.to_u128().expect("count fits in u128")
}

fn shifted_formula(sigma: &StrictPartition) -> u128 {
    let p = sigma.parts();
    let mut q = BigRational::from_integer(factorial(sigma.weight()));
    for &s in p {
        q /= BigRational::from_integer(factorial(s));
    }
    for i in 0..p.len() {
        for j in i + 1..p.len() {
            q *= BigRational::new(BigInt::from(p[i] - p[j]), BigInt::from(p[i] + p[j]));
        }
    }
    assert!(q.is_integer(), "product formula must be integral");
    to_u128(&q.to_integer())
}

/// Counts fillings by placing `1, 2, ...` one box at a time, keeping the
/// filled region a valid (shifted or ordinary) shape inside the target.
fn count_fillings(target: &[usize], shifted: bool) -> u128 {
    fn rec(cur: &mut Vec<usize>, target: &[usize], shifted: bool) -> u128 {
        if cur.iter().zip(target).all(|(a, b)| a == b) {
            return 1;
        }
        let mut total = 0;
        for i in 0..target.len() {
            let new_len = cur[i] + 1;
            if new_len > target[i] {
                continue;
            }
            let fits_below_previous = if i == 0 {
                true
            } else if shifted {
                new_len < cur[i - 1]
            } else {
                new_len <= cur[i - 1]
            };
            if !fits_below_previous {
                continue;
            }
            cur[i] += 1;
            total += rec(cur, target, shifted);
            cur[i] -= 1;
        }
        total
    }
    let mut cur = vec![0; target.len()];
    rec(&mut cur, target, shifted)
}

pub const ENUMERATION_LIMIT: usize = 12;

/// Number of standard shifted tableaux of shape `σ`.
///
/// The product formula is always evaluated; for `|σ| <= 12` an exhaustive
/// enumeration must agree with it.
pub fn shifted_syt_count(sigma: &StrictPartition) -> Result<u128> {
    let formula = shifted_formula(sigma);
    if sigma.weight() <= ENUMERATION_LIMIT {
        let enumeration = count_fillings(sigma.parts(), true);
        if enumeration != formula {
            return Err(Error::CountDisagreement {
                shape: sigma.to_string(),
                formula,
                enumeration,
            });
        }
    }
    Ok(formula)
}

fn hook_formula(d: usize, w: usize) -> u128 {
    let mut q = BigRational::from_integer(factorial(d * w));
    for i in 0..d {
        for j in 0..w {
            q /= BigRational::from_integer(BigInt::from((d - i) + (w - j) - 1));
        }
    }
    assert!(q.is_integer());
    to_u128(&q.to_integer())
}

/// Number of standard Young tableaux of the `d x w` rectangle (hook-length
/// formula, cross-checked by enumeration when `d w <= 12`).
pub fn rect_syt_count(d: usize, w: usize) -> Result<u128> {
    if d == 0 || w == 0 {
        return Ok(1);
    }
    let formula = hook_formula(d, w);
    if d * w <= ENUMERATION_LIMIT {
        let enumeration = count_fillings(&vec![w; d], false);
        if enumeration != formula {
            return Err(Error::CountDisagreement {
                shape: format!("{d}x{w}"),
                formula,
                enumeration,
            });
        }
    }
    Ok(formula)
}
