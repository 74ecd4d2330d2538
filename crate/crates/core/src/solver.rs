//! Zero-dimensional Schubert problems on `Gr(d, m)` and `OG(n)`, solved by
//! homotopy continuation on a cell chart, with numerical certificates of
//! transversality and reality.
//!
//! The heaviest condition is moved to infinity and the unknowns are the
//! coordinates of the Schubert cell there. The remaining conditions are
//! imposed through the Wronskian: `x` satisfies single-box conditions at the
//! points `a_i` exactly when `Wr(x; z)` (or `P(y; z)` on `OG(n)`) is
//! proportional to `∏ (z + a_i)`. Higher-weight conditions are imposed the same
//! way with multiplicities and then filtered by membership.

use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::cells::{gr_chart, monomial_wronskian_constant, og_chart, plucker_wronskian, symbolic_sqrt, Chart};
use crate::error::{Error, Result};
use crate::geometry::{
    isotropy_check, numeric_x_membership, p_map, numeric_y_membership, wronskian_of_rows, x_membership,
    y_membership, SubspacePoint,
};
use crate::homotopy::{refine, track_all, PathStatus, System, TrackSettings};
use crate::mpoly::MPoly;
use crate::osculating::{FlagPoint, FrameChange};
use crate::partitions::{
    enumerate_strict, rect_syt_count, shifted_syt_count, Partition, StrictPartition,
};
use crate::poly::{rational_linear_factors, Poly};
use crate::scalar::{format_rational, rational_approx, Rational, Scalar, C64};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "space")]
pub enum Space {
    Gr { d: usize, m: usize },
    OG { n: usize },
}

impl Space {
    /// Rows and columns of a basis matrix.
    pub fn shape(&self) -> (usize, usize) {
        match *self {
            Space::Gr { d, m } => (d, m),
            Space::OG { n } => (n, 2 * n + 1),
        }
    }

    pub fn dim(&self) -> usize {
        match *self {
            Space::Gr { d, m } => d * (m - d),
            Space::OG { n } => n * (n + 1) / 2,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SchubertCondition {
    pub point: FlagPoint,
    pub shape: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SchubertProblem {
    pub space: Space,
    pub conditions: Vec<SchubertCondition>,
}

impl SchubertProblem {
    pub fn new(space: Space, conditions: Vec<SchubertCondition>) -> Result<Self> {
        match space {
            Space::Gr { d, m } if d == 0 || d >= m => {
                return Err(Error::InvalidProblem(format!("Gr({d}, {m}) needs 0 < d < m")))
            }
            Space::OG { n: 0 } => return Err(Error::InvalidProblem("OG(n) needs n >= 1".into())),
            _ => {}
        }
        let p = SchubertProblem { space, conditions };
        let mut total = 0;
        for i in 0..p.conditions.len() {
            total += p.weight(i)?;
            for j in 0..i {
                if p.conditions[i].point == p.conditions[j].point {
                    return Err(Error::InvalidProblem(format!(
                        "flag point {} appears twice; points must be distinct",
                        p.conditions[i].point
                    )));
                }
            }
        }
        if total != space.dim() {
            let formula = match space {
                Space::Gr { d, m } => format!("d(m-d) = {d}*{}", m - d),
                Space::OG { n } => format!("n(n+1)/2 = {n}*{}/2", n + 1),
            };
            return Err(Error::InvalidProblem(format!(
                "condition weights sum to {total}, but the dimension is {formula} = {}",
                space.dim()
            )));
        }
        Ok(p)
    }

    pub fn partition(&self, i: usize) -> Result<Partition> {
        match self.space {
            Space::Gr { d, m } => Partition::new(self.conditions[i].shape.clone(), d, m - d),
            Space::OG { .. } => Err(Error::InvalidProblem("OG conditions use strict partitions".into())),
        }
    }

    pub fn strict(&self, i: usize) -> Result<StrictPartition> {
        match self.space {
            Space::OG { n } => StrictPartition::new(self.conditions[i].shape.clone(), n),
            Space::Gr { .. } => Err(Error::InvalidProblem("Gr conditions use partitions".into())),
        }
    }

    pub fn weight(&self, i: usize) -> Result<usize> {
        match self.space {
            Space::Gr { .. } => self.partition(i).map(|p| p.weight()),
            Space::OG { .. } => self.strict(i).map(|p| p.weight()),
        }
    }

    pub fn is_all_single_box(&self) -> bool {
        self.conditions.iter().all(|c| c.shape == [1])
    }

    /// Number of solutions predicted by tableau counting, for all-single-box problems.
    pub fn expected_count(&self) -> Result<Option<u128>> {
        if !self.is_all_single_box() {
            return Ok(None);
        }
        match self.space {
            Space::Gr { d, m } => rect_syt_count(d, m - d).map(Some),
            Space::OG { n } => shifted_syt_count(&StrictPartition::staircase(n)).map(Some),
        }
    }

    /// Exact membership of `x` in every condition.
    pub fn exact_membership(&self, x: &SubspacePoint) -> Result<bool> {
        for (i, c) in self.conditions.iter().enumerate() {
            let ok = match self.space {
                Space::Gr { .. } => x_membership(x, &self.partition(i)?, &c.point),
                Space::OG { n } => isotropy_check(x, n) && y_membership(x, &self.strict(i)?, &c.point)?,
            };
            if !ok {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Floating-point membership of a basis in every condition.
    pub fn numeric_membership(&self, rows: &[Vec<C64>], tol: f64) -> Result<bool> {
        for (i, c) in self.conditions.iter().enumerate() {
            let ok = match self.space {
                Space::Gr { .. } => numeric_x_membership(rows, &self.partition(i)?, &c.point, tol)?,
                Space::OG { .. } => numeric_y_membership(rows, &self.strict(i)?, &c.point, tol)?,
            };
            if !ok {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SolverConfig {
    pub step_min: f64,
    pub step_max: f64,
    pub step_initial: f64,
    pub corrector_tol: f64,
    pub refinement_tol: f64,
    pub endgame_radius: f64,
    pub divergence_norm: f64,
    pub max_steps: usize,
    pub dedup: f64,
    pub tau_j: f64,
    pub tau_r: f64,
    pub membership_tol: f64,
    pub denominator_bound: u64,
    pub seed: u64,
    pub max_paths: u128,
    pub attempts: usize,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            step_min: 1e-8,
            step_max: 0.1,
            step_initial: 0.02,
            corrector_tol: 1e-10,
            refinement_tol: 1e-12,
            endgame_radius: 0.05,
            divergence_norm: 1e8,
            max_steps: 20_000,
            dedup: 1e-6,
            tau_j: 1e-8,
            tau_r: 1e-6,
            membership_tol: 1e-9,
            denominator_bound: 1_000_000,
            seed: 0,
            max_paths: 5_000,
            attempts: 3,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("step_min", self.step_min),
            ("step_max", self.step_max),
            ("step_initial", self.step_initial),
            ("corrector_tol", self.corrector_tol),
            ("refinement_tol", self.refinement_tol),
            ("endgame_radius", self.endgame_radius),
            ("divergence_norm", self.divergence_norm),
            ("dedup", self.dedup),
            ("tau_j", self.tau_j),
            ("tau_r", self.tau_r),
            ("membership_tol", self.membership_tol),
        ];
        for (name, v) in positive {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::InvalidProblem(format!("config field {name} must be positive, got {v}")));
            }
        }
        if self.step_min > self.step_max || self.endgame_radius >= 1.0 {
            return Err(Error::InvalidProblem(
                "config needs step_min <= step_max and endgame_radius < 1".into(),
            ));
        }
        if self.max_steps == 0 || self.attempts == 0 || self.denominator_bound == 0 {
            return Err(Error::InvalidProblem(
                "max_steps, attempts, and denominator_bound must be positive".into(),
            ));
        }
        Ok(())
    }

    fn track_settings(&self) -> TrackSettings {
        TrackSettings {
            step_min: self.step_min,
            step_max: self.step_max,
            step_initial: self.step_initial,
            corrector_tol: self.corrector_tol,
            refinement_tol: self.refinement_tol,
            endgame_radius: self.endgame_radius,
            divergence_norm: self.divergence_norm,
            max_steps: self.max_steps,
        }
    }
}

/// Equations on a cell chart at infinity, in the frame where the pivot point is infinity.
#[derive(Clone, Debug)]
pub struct SquareSystem {
    pub space: Space,
    pub frame: Option<FrameChange>,
    /// The flag point sent to infinity.
    pub pivot_point: FlagPoint,
    /// Shape of the chart's cell at infinity.
    pub chart_shape: Vec<usize>,
    pub chart: Chart,
    pub equations: Vec<MPoly>,
    /// Monic target in the chart frame, coefficients from `z^0`.
    pub target: Vec<Rational>,
}

impl SquareSystem {
    pub fn nvars(&self) -> usize {
        self.chart.nvars
    }

    /// Basis rows in the original frame for chart coordinates `x`.
    pub fn rows_at<F: Scalar>(&self, x: &[F]) -> Vec<Vec<F>> {
        let rows = self.chart.point_at(x);
        let Some(frame) = &self.frame else {
            return rows;
        };
        let m = self.chart.m;
        rows.into_iter()
            .map(|r| {
                let mut v = frame.backward(&Poly::new(r, m - 1).expect("row fits")).to_vec();
                v.resize(m, F::zero());
                v
            })
            .collect()
    }
}

fn monic_target(points: &[(Rational, usize)]) -> Vec<Rational> {
    let mut h = Poly::from_coeffs(vec![Rational::one()]);
    for (a, k) in points {
        for _ in 0..*k {
            h = h.mul(&Poly::from_coeffs(vec![a.clone(), Rational::one()]));
        }
    }
    h.to_vec()
}

/// Chart plus Wronskian (or `P`) equations `coef_k = lc · h_k` for `k < deg h`.
fn system_on_chart(
    space: Space,
    chart_shape: &[usize],
    target: Vec<Rational>,
    frame: Option<FrameChange>,
    pivot_point: FlagPoint,
) -> Result<SquareSystem> {
    let chart = match space {
        Space::Gr { d, m } => gr_chart(&Partition::new(chart_shape.to_vec(), d, m - d)?, d, m),
        Space::OG { n } => og_chart(&StrictPartition::new(chart_shape.to_vec(), n)?)?,
    };
    let nv = chart.nvars;
    let lc = monomial_wronskian_constant(&chart.pivots);
    let w = plucker_wronskian(&chart.rows, nv);
    let coeffs = match space {
        Space::Gr { .. } => w,
        Space::OG { .. } => {
            let scaled: Vec<MPoly> = w.iter().map(|c| c.scale(&lc)).collect();
            symbolic_sqrt(&scaled, &lc, nv).ok_or_else(|| {
                Error::NonSquareSystem(format!("Wronskian on the chart of {chart_shape:?} is not a square"))
            })?
        }
    };
    let deg = target.len() - 1;
    let top = coeffs.iter().rposition(|c| !c.is_zero());
    if top != Some(deg) || coeffs[deg].as_constant() != Some(lc.clone()) || deg != nv {
        return Err(Error::NonSquareSystem(format!(
            "chart of {chart_shape:?} has {nv} coordinates but the target has degree {deg}"
        )));
    }
    let equations: Vec<MPoly> = (0..deg)
        .map(|k| coeffs[k].sub(&MPoly::constant(&lc * &target[k], nv)))
        .collect();
    if equations.len() != nv {
        return Err(Error::NonSquareSystem(format!("{} equations in {nv} unknowns", equations.len())));
    }
    Ok(SquareSystem {
        space,
        frame,
        pivot_point,
        chart_shape: chart_shape.to_vec(),
        chart,
        equations,
        target,
    })
}

/// Index of the pivot: the heaviest condition, preferring one already at infinity.
fn pivot_index(points: &[FlagPoint], weights: &[usize]) -> usize {
    let mut best = 0;
    for i in 1..points.len() {
        let better = weights[i] > weights[best]
            || (weights[i] == weights[best] && points[i].is_infinity() && !points[best].is_infinity());
        if better {
            best = i;
        }
    }
    best
}

/// Moves `points[pivot]` to infinity and returns the frame and the monic
/// target built from the other points.
fn frame_and_target(points: &[FlagPoint], weights: &[usize], pivot: usize) -> (Option<FrameChange>, Vec<Rational>) {
    let frame = match &points[pivot] {
        FlagPoint::Infinity => None,
        FlagPoint::Finite(c) => Some(FrameChange { center: c.clone() }),
    };
    let mapped: Vec<(Rational, usize)> = points
        .iter()
        .zip(weights)
        .enumerate()
        .filter(|&(i, (_, &w))| i != pivot && w > 0)
        .map(|(_, (p, &w))| {
            let q = match &frame {
                Some(f) => f.map_point(p),
                None => p.clone(),
            };
            match q {
                FlagPoint::Finite(a) => (a, w),
                FlagPoint::Infinity => unreachable!("only the pivot maps to infinity"),
            }
        })
        .collect();
    (frame, monic_target(&mapped))
}

pub fn build_square_system(p: &SchubertProblem) -> Result<SquareSystem> {
    let points: Vec<FlagPoint> = p.conditions.iter().map(|c| c.point.clone()).collect();
    let weights = (0..points.len()).map(|i| p.weight(i)).collect::<Result<Vec<_>>>()?;
    if points.is_empty() {
        return Err(Error::InvalidProblem("no conditions".into()));
    }
    let pivot = pivot_index(&points, &weights);
    let (frame, target) = frame_and_target(&points, &weights, pivot);
    system_on_chart(p.space, &p.conditions[pivot].shape, target, frame, points[pivot].clone())
}

#[derive(Clone, Debug, Serialize)]
pub struct SolutionCertificate {
    /// Basis rows in the original frame, real parts.
    pub rows_re: Vec<Vec<f64>>,
    /// Basis rows in the original frame, imaginary parts.
    pub rows_im: Vec<Vec<f64>>,
    /// Exact point when rational reconstruction verified every condition.
    pub exact: Option<SubspacePoint>,
    pub residual: f64,
    pub sigma_min: f64,
    pub sigma_max: f64,
    pub sigma_min_relative: f64,
    pub transverse: bool,
    pub imag_norm: f64,
    pub real_residual: Option<f64>,
    pub real: bool,
    /// `"exact"`, `"float"`, or `"failed"`.
    pub membership: String,
    pub suspect_multiple: bool,
    /// Relative distance of `P(y)` (or `Wr(x)`) from the target, when a target is given.
    pub target_residual: Option<f64>,
    #[serde(skip)]
    pub coordinates: Vec<C64>,
}

pub fn certify_transverse(s: &SolutionCertificate, cfg: &SolverConfig) -> bool {
    s.sigma_min_relative > cfg.tau_j
}

pub fn certify_real(s: &SolutionCertificate, cfg: &SolverConfig) -> bool {
    s.imag_norm < cfg.tau_r && s.real_residual.is_some_and(|r| r <= cfg.refinement_tol) && s.membership != "failed"
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct TrackingStats {
    pub total_degree: u128,
    pub attempts: usize,
    pub paths_tracked: usize,
    pub converged: usize,
    pub at_infinity: usize,
    pub failed: usize,
    pub merged: usize,
    pub failures: Vec<String>,
}

impl TrackingStats {
    pub fn complete(&self) -> bool {
        self.failed == 0
    }
}

fn gamma_for(seed: u64, attempt: usize) -> C64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_mul(0x9E37_79B9_7F4A_7C15).wrapping_add(attempt as u64));
    C64::from_polar(1.0, rng.gen_range(0.0..std::f64::consts::TAU))
}

fn close(a: &[C64], b: &[C64], tol: f64) -> bool {
    let d: f64 = a.iter().zip(b).map(|(x, y)| (x - y).norm_sqr()).sum::<f64>().sqrt();
    let s: f64 = a.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
    d <= tol * (1.0 + s)
}

/// Distinct finite solutions of the square system with multiplicity flags.
fn run_homotopy(sys: &SquareSystem, cfg: &SolverConfig) -> Result<(Vec<(Vec<C64>, bool)>, TrackingStats)> {
    let mut stats = TrackingStats::default();
    if sys.nvars() == 0 {
        stats.total_degree = 1;
        stats.converged = 1;
        return Ok((vec![(Vec::new(), false)], stats));
    }
    let system = System::new(&sys.equations, sys.nvars());
    stats.total_degree = system.bezout_number();
    if stats.total_degree > cfg.max_paths {
        return Err(Error::TooManyPaths {
            paths: stats.total_degree,
            limit: cfg.max_paths,
        });
    }
    let settings = cfg.track_settings();
    let mut found: Vec<(Vec<C64>, bool)> = Vec::new();
    for attempt in 0..cfg.attempts {
        let results = track_all(&system, gamma_for(cfg.seed, attempt), &settings);
        stats.attempts = attempt + 1;
        stats.paths_tracked += results.len();
        let (mut conv, mut inf, mut failed, mut merged) = (0, 0, 0, 0);
        let mut failures = Vec::new();
        let mut this_run: Vec<(Vec<C64>, bool)> = Vec::new();
        for r in results {
            match r.status {
                PathStatus::Converged => {
                    conv += 1;
                    if let Some(entry) = this_run.iter_mut().find(|(x, _)| close(x, &r.endpoint, cfg.dedup)) {
                        merged += 1;
                        entry.1 = true;
                    } else {
                        this_run.push((r.endpoint, false));
                    }
                }
                PathStatus::AtInfinity => inf += 1,
                PathStatus::Failed(why) => {
                    failed += 1;
                    failures.push(format!("path {}: {why}", r.index));
                }
            }
        }
        // a merge at a regular point means two paths met: a tracking error
        let mut jumped = false;
        for (x, merged_here) in &mut this_run {
            if *merged_here {
                let sv = system.jacobian_singular_values(x);
                let rel = sv.last().copied().unwrap_or(0.0) / sv[0].max(f64::MIN_POSITIVE);
                if rel > cfg.tau_j {
                    jumped = true;
                    *merged_here = false;
                }
            }
        }
        for (x, mult) in this_run {
            match found.iter_mut().find(|(y, _)| close(y, &x, cfg.dedup)) {
                Some(entry) => entry.1 |= mult,
                None => found.push((x, mult)),
            }
        }
        stats.converged = conv;
        stats.at_infinity = inf;
        stats.failed = failed;
        stats.merged = merged;
        stats.failures = failures;
        if failed == 0 && !jumped {
            break;
        }
    }
    Ok((found, stats))
}

fn imag_norm(x: &[C64]) -> f64 {
    x.iter().map(|c| c.im.abs()).fold(0.0, f64::max)
}

fn split(rows: &[Vec<C64>]) -> (Vec<Vec<f64>>, Vec<Vec<f64>>) {
    (
        rows.iter().map(|r| r.iter().map(|c| c.re).collect()).collect(),
        rows.iter().map(|r| r.iter().map(|c| c.im).collect()).collect(),
    )
}

/// Numeric square root of a polynomial whose expected degree is `2 deg`,
/// matched from the top coefficient down.
fn numeric_sqrt(w: &[C64], deg: usize) -> Vec<C64> {
    let mut p = vec![C64::zero(); deg + 1];
    p[deg] = w[2 * deg].sqrt();
    for k in 1..=deg {
        let target = 2 * deg - k;
        let mut acc = w[target];
        for i in deg - k + 1..=deg {
            let j = target - i;
            if j > deg - k && j <= deg {
                acc -= p[i] * p[j];
            }
        }
        p[deg - k] = acc / (p[deg] * 2.0);
    }
    p
}

/// `min_c |p - c h| / |p|`.
fn projective_distance(p: &[C64], h: &[Rational]) -> f64 {
    let len = p.len().max(h.len());
    let pv: Vec<C64> = (0..len).map(|i| p.get(i).copied().unwrap_or_default()).collect();
    let hv: Vec<C64> = (0..len).map(|i| h.get(i).map(Scalar::to_c64).unwrap_or_default()).collect();
    let hh: f64 = hv.iter().map(|c| c.norm_sqr()).sum();
    let ph: C64 = pv.iter().zip(&hv).map(|(a, b)| a * b.conj()).sum();
    let c = ph / hh;
    let num: f64 = pv.iter().zip(&hv).map(|(a, b)| (a - c * b).norm_sqr()).sum::<f64>().sqrt();
    let den: f64 = pv.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
    num / den.max(f64::MIN_POSITIVE)
}

/// Distance of `Wr` (Gr) or `P` (OG) from the target polynomial `h`, given `Wr`.
pub fn target_distance(space: Space, w: &Poly<C64>, h: &[Rational]) -> f64 {
    let top = match space {
        Space::Gr { .. } => space.dim(),
        Space::OG { .. } => 2 * space.dim(),
    };
    let wv: Vec<C64> = (0..=top).map(|k| w.coeff(k)).collect();
    match space {
        Space::Gr { .. } => projective_distance(&wv, h),
        Space::OG { .. } => {
            let deg = h.len() - 1;
            let p = numeric_sqrt(&wv, deg);
            // P^2 must reproduce all of Wr, not just the matched top half
            let sq = Poly::from_coeffs(p.clone()).mul(&Poly::from_coeffs(p.clone()));
            let sqv: Vec<C64> = (0..wv.len()).map(|k| sq.coeff(k)).collect();
            let err: f64 = sqv.iter().zip(&wv).map(|(a, b)| (a - b).norm_sqr()).sum::<f64>().sqrt();
            let scale: f64 = wv.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
            projective_distance(&p, h).max(err / scale.max(f64::MIN_POSITIVE))
        }
    }
}

/// `Wr` at chart coordinates. Real coordinates are converted exactly, so the
/// frame change and the determinant add no rounding error.
fn wronskian_at(sys: &SquareSystem, x: &[C64]) -> Poly<C64> {
    let exact: Option<Vec<Rational>> = x
        .iter()
        .map(|c| if c.im == 0.0 { Rational::from_float(c.re) } else { None })
        .collect();
    match exact {
        Some(q) => {
            let w = wronskian_of_rows(&sys.rows_at(&q));
            Poly::from_coeffs(w.coeffs().iter().map(Scalar::to_c64).collect())
        }
        // a well-conditioned basis of the same row space changes Wr only by a scalar
        None => wronskian_of_rows(&orthonormal_rows(&sys.rows_at(x))),
    }
}

/// Gram-Schmidt, applied twice for stability.
fn orthonormal_rows(rows: &[Vec<C64>]) -> Vec<Vec<C64>> {
    let mut out: Vec<Vec<C64>> = Vec::with_capacity(rows.len());
    for r in rows {
        let mut v = r.clone();
        for _ in 0..2 {
            for q in &out {
                let c: C64 = q.iter().zip(&v).map(|(a, b)| a.conj() * b).sum();
                for (x, y) in v.iter_mut().zip(q) {
                    *x -= c * y;
                }
            }
        }
        let len = v.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
        if len > 0.0 {
            v.iter_mut().for_each(|c| *c /= len);
        }
        out.push(v);
    }
    out
}

/// Refines, measures, and verifies one solution.
fn certify(
    sys: &SquareSystem,
    system: Option<&System>,
    x: Vec<C64>,
    suspect_multiple: bool,
    problem: &SchubertProblem,
    target: Option<&[Rational]>,
    cfg: &SolverConfig,
) -> Result<SolutionCertificate> {
    let mut x = x;
    let (residual, sigma_min, sigma_max) = match system {
        Some(s) => {
            let r = refine(s, &mut x, 0.0, 20);
            let sv = s.jacobian_singular_values(&x);
            (r, *sv.last().unwrap_or(&0.0), sv[0])
        }
        None => (0.0, 1.0, 1.0),
    };
    let sigma_min_relative = sigma_min / sigma_max.max(f64::MIN_POSITIVE);
    let imag = imag_norm(&x);

    let mut real_residual = None;
    let mut real_x = None;
    if imag < cfg.tau_r {
        let mut xr: Vec<C64> = x.iter().map(|c| C64::new(c.re, 0.0)).collect();
        let r = match system {
            Some(s) => refine(s, &mut xr, 0.0, 20),
            None => 0.0,
        };
        real_residual = Some(r);
        if r <= cfg.refinement_tol {
            real_x = Some(xr);
        }
    }

    // Exact verification after rational reconstruction, else floating point.
    let mut exact = None;
    if let Some(xr) = &real_x {
        let approx: Option<Vec<Rational>> = xr.iter().map(|c| rational_approx(c.re, cfg.denominator_bound)).collect();
        if let Some(q) = approx {
            let (_, m) = problem.space.shape();
            if let Ok(pt) = SubspacePoint::new(sys.rows_at(&q), m) {
                if problem.exact_membership(&pt)? {
                    exact = Some(pt);
                }
            }
        }
    }
    let point = real_x.as_ref().unwrap_or(&x);
    let rows = sys.rows_at(point);
    let membership = if exact.is_some() {
        "exact"
    } else if problem.numeric_membership(&rows, cfg.membership_tol).unwrap_or(false) {
        "float"
    } else {
        "failed"
    };
    let target_residual = target.map(|h| target_distance(problem.space, &wronskian_at(sys, point), h));
    let (rows_re, rows_im) = split(&sys.rows_at(&x));
    let mut cert = SolutionCertificate {
        rows_re,
        rows_im,
        exact,
        residual,
        sigma_min,
        sigma_max,
        sigma_min_relative,
        transverse: false,
        imag_norm: imag,
        real_residual,
        real: false,
        membership: membership.to_string(),
        suspect_multiple,
        target_residual,
        coordinates: x,
    };
    cert.transverse = certify_transverse(&cert, cfg) && !suspect_multiple;
    cert.real = certify_real(&cert, cfg);
    Ok(cert)
}

fn sort_key(c: &SolutionCertificate) -> Vec<i64> {
    let round = |v: f64| (v * 1e6).round() as i64;
    c.rows_re
        .iter()
        .flatten()
        .map(|&v| round(v))
        .chain(c.rows_im.iter().flatten().map(|&v| round(v)))
        .collect()
}

#[derive(Clone, Debug, Serialize)]
pub struct SolveReport {
    pub problem: SchubertProblem,
    pub seed: u64,
    pub unknowns: usize,
    pub chart_shape: Vec<usize>,
    pub pivot_point: FlagPoint,
    pub tracking: TrackingStats,
    pub complete: bool,
    /// Solutions of the Wronskian system rejected because their cells differ from the requested shapes.
    pub other_shapes: usize,
    pub count: usize,
    pub expected_count: Option<u128>,
    pub count_matches: Option<bool>,
    pub all_transverse: bool,
    pub all_real: bool,
    pub solutions: Vec<SolutionCertificate>,
}

impl SolveReport {
    /// Complete, correct count when known, and every certificate passes.
    pub fn success(&self) -> bool {
        self.complete && self.count_matches != Some(false) && self.all_transverse && self.all_real
    }
}

/// Finds and certifies every point of a zero-dimensional Schubert problem.
pub fn solve(p: &SchubertProblem, cfg: &SolverConfig) -> Result<SolveReport> {
    cfg.validate()?;
    let sys = build_square_system(p)?;
    let (raw, tracking) = run_homotopy(&sys, cfg)?;
    let system = (sys.nvars() > 0).then(|| System::new(&sys.equations, sys.nvars()));
    let mut solutions = Vec::new();
    let mut other_shapes = 0;
    for (x, mult) in raw {
        let cert = certify(&sys, system.as_ref(), x, mult, p, None, cfg)?;
        // solutions of the Wronskian system in other cells of the same weight
        if cert.membership == "failed" && !p.is_all_single_box() {
            other_shapes += 1;
            continue;
        }
        solutions.push(cert);
    }
    solutions.sort_by_key(sort_key);
    let expected_count = p.expected_count()?;
    Ok(SolveReport {
        problem: p.clone(),
        seed: cfg.seed,
        unknowns: sys.nvars(),
        chart_shape: sys.chart_shape.clone(),
        pivot_point: sys.pivot_point.clone(),
        complete: tracking.complete(),
        tracking,
        other_shapes,
        count: solutions.len(),
        count_matches: expected_count.map(|e| e == solutions.len() as u128),
        expected_count,
        all_transverse: solutions.iter().all(|s| s.transverse),
        all_real: solutions.iter().all(|s| s.real),
        solutions,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct FiberFactor {
    pub point: FlagPoint,
    pub multiplicity: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct FiberChartRun {
    pub shape: Vec<usize>,
    pub tracking: TrackingStats,
    pub solutions: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct FiberReport {
    pub n: usize,
    pub target: Vec<String>,
    pub factors: Vec<FiberFactor>,
    pub pivot_point: FlagPoint,
    pub charts: Vec<FiberChartRun>,
    pub complete: bool,
    pub count: usize,
    pub all_transverse: bool,
    pub all_real: bool,
    pub all_match_target: bool,
    pub solutions: Vec<SolutionCertificate>,
}

impl FiberReport {
    pub fn success(&self) -> bool {
        self.complete && self.all_transverse && self.all_real && self.all_match_target
    }
}

/// Every isotropic `y` with `P(y; z)` proportional to `h`.
pub fn fiber_of_p(h: &Poly<Rational>, n: usize, cfg: &SolverConfig) -> Result<FiberReport> {
    cfg.validate()?;
    let space = Space::OG { n };
    let dim = space.dim();
    let deg = h
        .degree()
        .ok_or_else(|| Error::UnsupportedTarget("zero polynomial".into()))?;
    if deg > dim {
        return Err(Error::UnsupportedTarget(format!(
            "degree {deg} exceeds n(n+1)/2 = {dim}"
        )));
    }
    let roots = rational_linear_factors(h)?;
    let mut points: Vec<FlagPoint> = roots.iter().map(|(a, _)| FlagPoint::Finite(a.clone())).collect();
    let mut weights: Vec<usize> = roots.iter().map(|(_, k)| *k).collect();
    if deg < dim {
        points.push(FlagPoint::Infinity);
        weights.push(dim - deg);
    }
    for &k in &weights {
        if k > n * (n + 1) / 2 || enumerate_strict(n, k).is_empty() {
            return Err(Error::UnsupportedTarget(format!(
                "multiplicity {k} is not the weight of a strict partition with parts at most {n}"
            )));
        }
    }
    let pivot = pivot_index(&points, &weights);
    let (frame, target) = frame_and_target(&points, &weights, pivot);
    let h_monic: Vec<Rational> = {
        let lead = h.leading().expect("nonzero").clone();
        h.coeffs().iter().map(|c| c / &lead).collect()
    };
    // single-box conditions are checked as memberships; the rest through P
    let single: Vec<SchubertCondition> = points
        .iter()
        .zip(&weights)
        .filter(|(_, &k)| k == 1)
        .map(|(p, _)| SchubertCondition { point: p.clone(), shape: vec![1] })
        .collect();
    let check = SchubertProblem { space, conditions: single };
    let h_canonical = h.projective_canonical().with_bound(dim)?;

    let mut charts = Vec::new();
    let mut solutions: Vec<SolutionCertificate> = Vec::new();
    let mut complete = true;
    for tau in enumerate_strict(n, weights[pivot]) {
        let sys = system_on_chart(space, tau.parts(), target.clone(), frame.clone(), points[pivot].clone())?;
        let (raw, tracking) = run_homotopy(&sys, cfg)?;
        complete &= tracking.complete();
        let system = (sys.nvars() > 0).then(|| System::new(&sys.equations, sys.nvars()));
        let mut count = 0;
        for (x, mult) in raw {
            let mut cert = certify(&sys, system.as_ref(), x, mult, &check, Some(&h_monic), cfg)?;
            if let Some(pt) = &cert.exact {
                if p_map(pt, n)? != h_canonical {
                    cert.exact = None;
                    cert.membership = "float".into();
                }
            }
            count += 1;
            solutions.push(cert);
        }
        charts.push(FiberChartRun {
            shape: tau.parts().to_vec(),
            tracking,
            solutions: count,
        });
    }
    solutions.sort_by_key(sort_key);
    Ok(FiberReport {
        n,
        target: h.coeffs().iter().map(format_rational).collect(),
        factors: points
            .iter()
            .zip(&weights)
            .map(|(p, &k)| FiberFactor { point: p.clone(), multiplicity: k })
            .collect(),
        pivot_point: points[pivot].clone(),
        charts,
        complete,
        count: solutions.len(),
        all_transverse: solutions.iter().all(|s| s.transverse),
        all_real: solutions.iter().all(|s| s.real),
        all_match_target: solutions
            .iter()
            .all(|s| s.target_residual.is_some_and(|r| r <= cfg.membership_tol) && s.membership != "failed"),
        solutions,
    })
}

/// Singular values of the square-system Jacobian at chart coordinates `x`.
pub fn jacobian_singular_values(sys: &SquareSystem, x: &[C64]) -> Vec<f64> {
    if sys.nvars() == 0 {
        return Vec::new();
    }
    System::new(&sys.equations, sys.nvars()).jacobian_singular_values(x)
}

/// JSON problem description accepted by the command-line tool.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemFile {
    pub space: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub d: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub m: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    pub conditions: Vec<SchubertCondition>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub config: Option<SolverConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

impl ProblemFile {
    pub fn parse(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Parse(format!("problem file: {e}")))
    }

    /// The validated problem and its configuration; a top-level seed overrides the config's.
    pub fn into_problem(self) -> Result<(SchubertProblem, SolverConfig)> {
        let space = match (self.space.as_str(), self.d, self.m, self.n) {
            ("Gr", Some(d), Some(m), None) => Space::Gr { d, m },
            ("OG", None, None, Some(n)) => Space::OG { n },
            ("Gr", ..) => return Err(Error::Parse("a Gr problem needs \"d\" and \"m\" (and no \"n\")".into())),
            ("OG", ..) => return Err(Error::Parse("an OG problem needs \"n\" (and no \"d\", \"m\")".into())),
            (other, ..) => return Err(Error::Parse(format!("unknown space {other:?}, expected \"Gr\" or \"OG\""))),
        };
        let mut cfg = self.config.unwrap_or_default();
        if let Some(seed) = self.seed {
            cfg.seed = seed;
        }
        cfg.validate()?;
        Ok((SchubertProblem::new(space, self.conditions)?, cfg))
    }
}
