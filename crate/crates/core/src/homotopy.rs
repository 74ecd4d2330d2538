//! Total-degree homotopy continuation for small square polynomial systems.

use nalgebra::{DMatrix, DVector};
use num_traits::Zero;
use rayon::prelude::*;

use crate::matrix::singular_values;
use crate::mpoly::{power_table, CompiledPoly, MPoly};
use crate::scalar::{Rational, C64};

/// Square system `F(x) = 0` with each equation scaled to unit largest coefficient.
#[derive(Clone, Debug)]
pub struct System {
    eqs: Vec<CompiledPoly>,
    degrees: Vec<usize>,
    nvars: usize,
    max_degree: usize,
}

impl System {
    pub fn new(polys: &[MPoly], nvars: usize) -> Self {
        let eqs: Vec<CompiledPoly> = polys
            .iter()
            .map(|p| {
                let c = p.max_coeff();
                let s = if c.is_zero() { Rational::from_integer(1.into()) } else { c.recip() };
                CompiledPoly::new(p, &s)
            })
            .collect();
        let degrees = polys.iter().map(|p| p.total_degree()).collect();
        let max_degree = eqs.iter().map(|e| e.max_degree()).max().unwrap_or(0).max(1);
        System {
            eqs,
            degrees,
            nvars,
            max_degree,
        }
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn degrees(&self) -> &[usize] {
        &self.degrees
    }

    /// Number of start paths, `∏ deg F_i`.
    pub fn bezout_number(&self) -> u128 {
        self.degrees.iter().map(|&d| d as u128).product()
    }

    /// Values, Jacobian, and per-equation term magnitudes.
    pub fn eval_jac(&self, x: &[C64]) -> (DVector<C64>, DMatrix<C64>, Vec<f64>) {
        let n = self.nvars;
        let pw = power_table(x, self.max_degree);
        let mut f = DVector::zeros(self.eqs.len());
        let mut jac = DMatrix::zeros(self.eqs.len(), n);
        let mut mags = Vec::with_capacity(self.eqs.len());
        let mut grad = vec![C64::zero(); n];
        for (i, e) in self.eqs.iter().enumerate() {
            let (v, mag) = e.eval_with_grad(&pw, &mut grad);
            f[i] = v;
            mags.push(mag);
            for j in 0..n {
                jac[(i, j)] = grad[j];
            }
        }
        (f, jac, mags)
    }

    /// Largest `|F_i(x)| / max(1, Σ|terms of F_i|)`.
    pub fn relative_residual(&self, x: &[C64]) -> f64 {
        let pw = power_table(x, self.max_degree);
        self.eqs
            .iter()
            .map(|e| {
                let (v, mag) = e.eval(&pw);
                v.norm() / mag.max(1.0)
            })
            .fold(0.0, f64::max)
    }

    pub fn jacobian_singular_values(&self, x: &[C64]) -> Vec<f64> {
        singular_values(&self.eval_jac(x).1)
    }
}

/// Tracking parameters, a subset of the solver configuration.
#[derive(Clone, Debug)]
pub struct TrackSettings {
    pub step_min: f64,
    pub step_max: f64,
    pub step_initial: f64,
    pub corrector_tol: f64,
    pub refinement_tol: f64,
    pub endgame_radius: f64,
    pub divergence_norm: f64,
    pub max_steps: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub enum PathStatus {
    /// Reached `t = 1` and refined to the refinement tolerance.
    Converged,
    /// Coordinates grew without bound near `t = 1`.
    AtInfinity,
    /// Step size underflow or step budget exhausted away from infinity.
    Failed(String),
}

#[derive(Clone, Debug)]
pub struct PathResult {
    pub index: usize,
    pub status: PathStatus,
    pub endpoint: Vec<C64>,
    pub residual: f64,
    pub steps: usize,
}

struct Homotopy<'a> {
    target: &'a System,
    gamma: C64,
}

impl Homotopy<'_> {
    /// `H = (1-t) γ G + t F` with `G_i = x_i^{d_i} - 1`; returns `H`, `H_x`, `H_t`.
    fn eval(&self, x: &[C64], t: f64) -> (DVector<C64>, DMatrix<C64>, DVector<C64>) {
        let (f, fx, _) = self.target.eval_jac(x);
        let n = x.len();
        let mut h = DVector::zeros(n);
        let mut hx = fx * C64::new(t, 0.0);
        let mut ht = DVector::zeros(n);
        let s = self.gamma * (1.0 - t);
        for i in 0..n {
            let d = self.target.degrees[i] as i32;
            let xd1 = x[i].powi(d - 1);
            let g = xd1 * x[i] - C64::new(1.0, 0.0);
            h[i] = s * g + f[i] * t;
            hx[(i, i)] += s * xd1 * d as f64;
            ht[i] = f[i] - self.gamma * g;
        }
        (h, hx, ht)
    }

    fn velocity(&self, x: &[C64], t: f64) -> Option<DVector<C64>> {
        let (_, hx, ht) = self.eval(x, t);
        hx.lu().solve(&(-ht))
    }

    /// Newton at fixed `t`. Rejects the step when the first correction
    /// exceeds `trust`, which guards against jumping to another path.
    fn newton(&self, x: &mut [C64], t: f64, tol: f64, iters: usize, trust: f64) -> bool {
        let mut last = f64::INFINITY;
        for k in 0..iters {
            let (h, hx, _) = self.eval(x, t);
            let Some(dx) = hx.lu().solve(&(-h)) else {
                return false;
            };
            let step = dx.norm();
            let scale = 1.0 + norm(x);
            if !step.is_finite() || step > 0.5 * last {
                return false;
            }
            if k == 0 && step > trust + tol * scale {
                return false;
            }
            for (xi, di) in x.iter_mut().zip(dx.iter()) {
                *xi += di;
            }
            if step <= tol * scale {
                return true;
            }
            last = step;
        }
        false
    }
}

fn norm(x: &[C64]) -> f64 {
    x.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
}

fn axpy(x: &[C64], a: f64, v: &DVector<C64>) -> Vec<C64> {
    x.iter().zip(v.iter()).map(|(xi, vi)| xi + vi * a).collect()
}

/// Newton's method on `F` alone. Returns the final relative residual.
pub fn refine(sys: &System, x: &mut Vec<C64>, tol: f64, iters: usize) -> f64 {
    // Newton is allowed a few non-monotone steps since the first step from an
    // ill-conditioned endpoint often overshoots before converging quadratically
    let mut best = x.clone();
    let mut best_res = sys.relative_residual(x);
    let mut cur = x.clone();
    let mut worse = 0;
    for _ in 0..iters {
        if best_res <= tol {
            break;
        }
        let (f, jac, _) = sys.eval_jac(&cur);
        let Some(dx) = jac.lu().solve(&(-f)) else {
            break;
        };
        cur = cur.iter().zip(dx.iter()).map(|(a, b)| a + b).collect();
        let r = sys.relative_residual(&cur);
        if !r.is_finite() {
            break;
        }
        if r < best_res {
            best_res = r;
            best = cur.clone();
            worse = 0;
        } else {
            worse += 1;
            if worse > 3 {
                break;
            }
        }
    }
    *x = best;
    best_res
}

/// All start solutions of `x_i^{d_i} = 1`, in mixed-radix order.
pub fn start_point(degrees: &[usize], mut index: usize) -> Vec<C64> {
    degrees
        .iter()
        .map(|&d| {
            let k = index % d;
            index /= d;
            C64::from_polar(1.0, 2.0 * std::f64::consts::PI * k as f64 / d as f64)
        })
        .collect()
}

pub fn track_path(sys: &System, gamma: C64, index: usize, s: &TrackSettings) -> PathResult {
    let hom = Homotopy { target: sys, gamma };
    let mut x = start_point(&sys.degrees, index);
    let mut t = 0.0f64;
    let mut h = s.step_initial;
    let mut streak = 0;
    let mut steps = 0;
    let result = |status, endpoint: Vec<C64>, steps| PathResult {
        index,
        residual: sys.relative_residual(&endpoint),
        status,
        endpoint,
        steps,
    };
    while 1.0 - t > s.step_min {
        if steps >= s.max_steps {
            return result(PathStatus::Failed("step budget exhausted".into()), x, steps);
        }
        steps += 1;
        let endgame = 1.0 - t < s.endgame_radius;
        // inside the endgame radius approach t = 1 geometrically so that
        // diverging paths reveal themselves before the final refinement
        let dt = if endgame { h.min(0.5 * (1.0 - t)) } else { h.min(1.0 - t) };
        let tol = if endgame { s.corrector_tol } else { s.corrector_tol.sqrt() };
        let ok = rk4(&hom, &x, t, dt).and_then(|mut xp| {
            let moved = distance(&xp, &x);
            hom.newton(&mut xp, t + dt, tol, 3, 0.25 * moved).then_some(xp)
        });
        match ok {
            Some(xn) => {
                x = xn;
                t += dt;
                streak += 1;
                if streak >= 3 {
                    h = (2.0 * h).min(s.step_max);
                    streak = 0;
                }
                if norm(&x) > s.divergence_norm {
                    return result(PathStatus::AtInfinity, x, steps);
                }
            }
            None => {
                h *= 0.5;
                streak = 0;
                if h < s.step_min {
                    let status = if endgame || norm(&x) > s.divergence_norm.sqrt() {
                        PathStatus::AtInfinity
                    } else {
                        PathStatus::Failed(format!("step size underflow at t = {t:.6e}"))
                    };
                    return result(status, x, steps);
                }
            }
        }
    }
    let last = x.clone();
    let speed = hom.velocity(&x, t).map_or(f64::INFINITY, |v| v.norm());
    let growth = speed * (1.0 - t) / (1.0 + norm(&x));
    if growth > 0.05 || norm(&last) > s.divergence_norm.sqrt() {
        return result(PathStatus::AtInfinity, last, steps);
    }
    let res = refine(sys, &mut x, s.refinement_tol, 50);
    // the remaining parameter interval can still move an ill-conditioned root
    let scale = 1.0 + norm(&last);
    let slack = (10.0 * speed * (1.0 - t)).clamp(1e-6 * scale, 1e-3 * scale);
    if res <= s.refinement_tol && distance(&x, &last) <= slack {
        return result(PathStatus::Converged, x, steps);
    }
    result(
        PathStatus::Failed(format!(
            "endpoint did not settle (residual {res:.3e}, growth {growth:.3e})"
        )),
        last,
        steps,
    )
}

fn distance(a: &[C64], b: &[C64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).norm_sqr()).sum::<f64>().sqrt()
}

fn rk4(hom: &Homotopy<'_>, x: &[C64], t: f64, dt: f64) -> Option<Vec<C64>> {
    let k1 = hom.velocity(x, t)?;
    let k2 = hom.velocity(&axpy(x, dt / 2.0, &k1), t + dt / 2.0)?;
    let k3 = hom.velocity(&axpy(x, dt / 2.0, &k2), t + dt / 2.0)?;
    let k4 = hom.velocity(&axpy(x, dt, &k3), t + dt)?;
    let v = (k1 + k2 * C64::new(2.0, 0.0) + k3 * C64::new(2.0, 0.0) + k4) / C64::new(6.0, 0.0);
    let out = axpy(x, dt, &v);
    out.iter().all(|c| c.is_finite()).then_some(out)
}

/// Tracks every start path; the output order is the path index order.
pub fn track_all(sys: &System, gamma: C64, s: &TrackSettings) -> Vec<PathResult> {
    let total = sys.bezout_number() as usize;
    (0..total)
        .into_par_iter()
        .map(|i| track_path(sys, gamma, i, s))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::int;

    fn settings() -> TrackSettings {
        TrackSettings {
            step_min: 1e-8,
            step_max: 0.1,
            step_initial: 0.02,
            corrector_tol: 1e-10,
            refinement_tol: 1e-12,
            endgame_radius: 0.05,
            divergence_norm: 1e8,
            max_steps: 20_000,
        }
    }

    #[test]
    fn univariate_roots() {
        // x^3 - 6x^2 + 11x - 6 = (x-1)(x-2)(x-3)
        let x = MPoly::var(0, 1);
        let p = x
            .mul(&x)
            .mul(&x)
            .sub(&x.mul(&x).scale(&int(6)))
            .add(&x.scale(&int(11)))
            .sub(&MPoly::constant(int(6), 1));
        let sys = System::new(&[p], 1);
        let gamma = C64::from_polar(1.0, 0.7);
        let mut roots: Vec<f64> = track_all(&sys, gamma, &settings())
            .into_iter()
            .map(|r| {
                assert_eq!(r.status, PathStatus::Converged);
                assert!(r.endpoint[0].im.abs() < 1e-10);
                r.endpoint[0].re
            })
            .collect();
        roots.sort_by(f64::total_cmp);
        for (r, e) in roots.iter().zip([1.0, 2.0, 3.0]) {
            assert!((r - e).abs() < 1e-10);
        }
    }

    #[test]
    fn excess_paths_diverge() {
        // xy - 1 and xy - x + 2: Bezout number 4, one finite root
        let x = MPoly::var(0, 2);
        let y = MPoly::var(1, 2);
        let one = MPoly::one(2);
        let f1 = x.mul(&y).sub(&one);
        let f2 = x.mul(&y).sub(&x).add(&one.scale(&int(2)));
        let sys = System::new(&[f1, f2], 2);
        let res = track_all(&sys, C64::from_polar(1.0, 2.1), &settings());
        let finite: Vec<_> = res.iter().filter(|r| r.status == PathStatus::Converged).collect();
        assert_eq!(finite.len(), 1, "{res:?}");
        // x = 3, y = 1/3
        assert!((finite[0].endpoint[0] - C64::new(3.0, 0.0)).norm() < 1e-9);
        assert!(res.iter().all(|r| !matches!(r.status, PathStatus::Failed(_))));
    }
}
