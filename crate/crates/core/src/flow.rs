//! Contractive flows on a normed `R^N` and the ball retraction they induce.
//!
//! A contractive flow `f(t, p)` is an action of `(R, +)` that strictly
//! shrinks the norm of every nonzero point for `t > 0`. Given a bounded
//! region `Q` with `f(t, closure(Q)) ⊂ Q` for `t > 0`, every trajectory
//! crosses the sphere of radius `r` exactly once (at `t_r`) and leaves
//! `closure(Q)` backwards in time exactly once (at `t_boundary <= 0`). The
//! maps
//!
//! ```text
//! alpha(p) = f(t_r(p) - t_boundary(p), p)      closure(Q) -> ball
//! beta(p)  = f(t_boundary(p) - t_r(p), p)      ball -> closure(Q)
//! ```
//!
//! are mutually inverse. Both stopping times are found by bracketing and
//! bisection, which is valid because the norm and the region membership are
//! both monotone along trajectories.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};

/// Bisection stops once the time bracket is narrower than this.
pub const TIME_BRACKET: f64 = 1e-10;

/// Forward bracket expansion gives up past this time.
const MAX_FORWARD_TIME: f64 = 1e6;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Membership {
    Interior,
    ClosureBoundary,
    Outside,
}

pub trait ContractiveFlow: Sync {
    /// Ambient dimension `N`.
    fn dim(&self) -> usize;

    fn flow(&self, t: f64, p: &[f64]) -> Vec<f64>;

    fn norm(&self, p: &[f64]) -> f64;

    /// Membership of `p` in the region `Q` and its closure. Points whose
    /// defining quantity is within `tol` of zero report `ClosureBoundary`.
    fn membership(&self, p: &[f64], tol: f64) -> Membership;

    /// Magnitude of the most negative time probed when searching for the
    /// exit from the region closure.
    fn exit_search_limit(&self) -> f64 {
        60.0
    }
}

type FlowFn = Box<dyn Fn(f64, &[f64]) -> Vec<f64> + Send + Sync>;
type NormFn = Box<dyn Fn(&[f64]) -> f64 + Send + Sync>;
type MembershipFn = Box<dyn Fn(&[f64], f64) -> Membership + Send + Sync>;

/// A flow assembled from closures.
pub struct FnFlow {
    dim: usize,
    flow: FlowFn,
    norm: NormFn,
    membership: MembershipFn,
    exit_limit: f64,
}

impl FnFlow {
    pub fn new(
        dim: usize,
        flow: impl Fn(f64, &[f64]) -> Vec<f64> + Send + Sync + 'static,
        norm: impl Fn(&[f64]) -> f64 + Send + Sync + 'static,
        membership: impl Fn(&[f64], f64) -> Membership + Send + Sync + 'static,
    ) -> Self {
        Self {
            dim,
            flow: Box::new(flow),
            norm: Box::new(norm),
            membership: Box::new(membership),
            exit_limit: 60.0,
        }
    }

    pub fn with_exit_limit(mut self, limit: f64) -> Self {
        self.exit_limit = limit;
        self
    }
}

impl ContractiveFlow for FnFlow {
    fn dim(&self) -> usize {
        self.dim
    }

    fn flow(&self, t: f64, p: &[f64]) -> Vec<f64> {
        (self.flow)(t, p)
    }

    fn norm(&self, p: &[f64]) -> f64 {
        (self.norm)(p)
    }

    fn membership(&self, p: &[f64], tol: f64) -> Membership {
        (self.membership)(p, tol)
    }

    fn exit_search_limit(&self) -> f64 {
        self.exit_limit
    }
}

pub fn euclidean_norm(p: &[f64]) -> f64 {
    p.iter().map(|x| x * x).sum::<f64>().sqrt()
}

pub fn max_norm(p: &[f64]) -> f64 {
    p.iter().fold(0.0, |m, x| m.max(x.abs()))
}

fn diff(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

/// Worst observed violation of each flow axiom over the sampled `(t, p)`.
#[derive(Clone, Debug, Serialize)]
pub struct FlowAxiomReport {
    pub samples: usize,
    pub tol: f64,
    /// `max |f(0,p) - p| / max(1, |p|)`.
    pub identity_max: f64,
    /// `max |f(s, f(t,p)) - f(s+t, p)| / max(1, |f(s+t,p)|)` over grid pairs.
    pub group_max: f64,
    /// Number of `(t > 0, p != 0)` with `|f(t,p)| >= |p|`.
    pub contraction_failures: usize,
    /// Largest `|f(t,p)| - |p|` over `t > 0`; negative when contraction holds.
    pub contraction_worst: f64,
    /// Number of points whose norm is not strictly decreasing along the
    /// positive part of the grid.
    pub monotonicity_failures: usize,
    pub pass: bool,
}

/// Samples the flow axioms on `points` and every `t` (and pair `s, t`) in
/// `t_grid`. The report carries failures; it never errors.
pub fn verify_flow_axioms<F: ContractiveFlow + ?Sized>(
    flow: &F,
    points: &[Vec<f64>],
    t_grid: &[f64],
    tol: f64,
) -> FlowAxiomReport {
    let mut identity_max: f64 = 0.0;
    let mut group_max: f64 = 0.0;
    let mut contraction_failures = 0;
    let mut contraction_worst = f64::NEG_INFINITY;
    let mut monotonicity_failures = 0;

    let mut positive: Vec<f64> = t_grid.iter().copied().filter(|&t| t > 0.0).collect();
    positive.sort_by(|a, b| a.partial_cmp(b).unwrap());

    for p in points {
        let np = flow.norm(p);
        let scale = np.max(1.0);
        identity_max = identity_max.max(flow.norm(&diff(&flow.flow(0.0, p), p)) / scale);

        for &t in t_grid {
            let ft = flow.flow(t, p);
            for &s in t_grid {
                let lhs = flow.flow(s, &ft);
                let rhs = flow.flow(s + t, p);
                let err = flow.norm(&diff(&lhs, &rhs)) / flow.norm(&rhs).max(1.0);
                group_max = group_max.max(err);
            }
        }

        if np == 0.0 {
            continue;
        }
        let mut prev = np;
        let mut monotone = true;
        for &t in &positive {
            let nt = flow.norm(&flow.flow(t, p));
            contraction_worst = contraction_worst.max(nt - np);
            if nt >= np {
                contraction_failures += 1;
            }
            if nt >= prev {
                monotone = false;
            }
            prev = nt;
        }
        if !monotone {
            monotonicity_failures += 1;
        }
    }

    let pass = identity_max <= tol
        && group_max <= tol
        && contraction_failures == 0
        && monotonicity_failures == 0;
    FlowAxiomReport {
        samples: points.len(),
        tol,
        identity_max,
        group_max,
        contraction_failures,
        contraction_worst,
        monotonicity_failures,
        pass,
    }
}

/// `count` points with i.i.d. uniform entries in `[-scale, scale]`.
pub fn sample_points(dim: usize, count: usize, scale: f64, seed: u64) -> Vec<Vec<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| (0..dim).map(|_| rng.gen_range(-scale..=scale)).collect())
        .collect()
}

/// The unique time at which the trajectory of `p != 0` has norm `r`.
pub fn time_to_radius<F: ContractiveFlow + ?Sized>(flow: &F, p: &[f64], r: f64, tol: f64) -> Result<f64> {
    if !(r > 0.0) {
        return Err(Error::InvalidParameter(format!("radius must be positive, got {r}")));
    }
    let n0 = flow.norm(p);
    if n0 == 0.0 {
        return Err(Error::ZeroPoint);
    }
    let excess = |t: f64| flow.norm(&flow.flow(t, p)) - r;
    let g0 = n0 - r;
    if g0 == 0.0 {
        return Ok(0.0);
    }

    // Bracket [lo, hi] with excess(lo) > 0 > excess(hi); the norm decreases in t.
    let (mut lo, mut hi);
    let mut step = 1.0;
    if g0 > 0.0 {
        lo = 0.0;
        loop {
            hi = step;
            if excess(hi) < 0.0 {
                break;
            }
            lo = hi;
            step *= 2.0;
            if step > MAX_FORWARD_TIME {
                return Err(Error::NoRadiusCrossing { radius: r });
            }
        }
    } else {
        hi = 0.0;
        loop {
            lo = -step;
            if excess(lo) > 0.0 {
                break;
            }
            hi = lo;
            step *= 2.0;
            if step > MAX_FORWARD_TIME {
                return Err(Error::NoRadiusCrossing { radius: r });
            }
        }
    }

    let mut mid = 0.5 * (lo + hi);
    for _ in 0..400 {
        mid = 0.5 * (lo + hi);
        let g = excess(mid);
        if g == 0.0 || (hi - lo < TIME_BRACKET && g.abs() < 0.5 * tol) {
            break;
        }
        if mid <= lo || mid >= hi {
            break;
        }
        if g > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let residual = excess(mid).abs();
    if residual >= tol {
        return Err(Error::ToleranceNotMet { residual, tol });
    }
    Ok(mid)
}

/// The time `t_boundary <= 0` at which the trajectory of `p` enters the
/// region closure: `f(t, p)` lies in the closure exactly for `t >= t_boundary`.
pub fn time_to_boundary<F: ContractiveFlow + ?Sized>(flow: &F, p: &[f64], tol: f64) -> Result<f64> {
    match flow.membership(p, tol) {
        Membership::Outside => return Err(Error::OutsideRegion),
        Membership::ClosureBoundary => return Ok(0.0),
        Membership::Interior => {}
    }
    if flow.norm(p) == 0.0 {
        return Err(Error::ZeroPoint);
    }
    let outside = |t: f64| flow.membership(&flow.flow(t, p), tol) == Membership::Outside;
    let limit = flow.exit_search_limit();

    let mut hi = 0.0;
    let mut step = 1.0_f64;
    let mut lo;
    loop {
        lo = -step.min(limit);
        if outside(lo) {
            break;
        }
        if lo <= -limit {
            return Err(Error::NoExitFound { limit: -limit });
        }
        hi = lo;
        step *= 2.0;
    }
    while hi - lo > TIME_BRACKET {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if outside(mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(hi)
}

#[derive(Clone, Debug, Serialize)]
pub struct BallMapResult {
    pub image: Vec<f64>,
    pub t_r: f64,
    pub t_boundary: f64,
    /// `| |f(t_r, p)| - r |` at the computed `t_r`.
    pub residual: f64,
}

impl BallMapResult {
    fn origin(dim: usize) -> Self {
        Self {
            image: vec![0.0; dim],
            t_r: 0.0,
            t_boundary: 0.0,
            residual: 0.0,
        }
    }
}

/// The retraction `alpha` from the region closure onto the ball of radius `r`.
pub fn retract_to_ball<F: ContractiveFlow + ?Sized>(
    flow: &F,
    p: &[f64],
    r: f64,
    tol: f64,
) -> Result<BallMapResult> {
    if flow.norm(p) == 0.0 {
        return Ok(BallMapResult::origin(p.len()));
    }
    let t_boundary = time_to_boundary(flow, p, tol)?;
    let t_r = time_to_radius(flow, p, r, tol)?;
    let residual = (flow.norm(&flow.flow(t_r, p)) - r).abs();
    Ok(BallMapResult {
        image: flow.flow(t_r - t_boundary, p),
        t_r,
        t_boundary,
        residual,
    })
}

/// The inverse map `beta` from the ball of radius `r` onto the region closure.
pub fn extend_from_ball<F: ContractiveFlow + ?Sized>(
    flow: &F,
    p: &[f64],
    r: f64,
    tol: f64,
) -> Result<BallMapResult> {
    let np = flow.norm(p);
    if np == 0.0 {
        return Ok(BallMapResult::origin(p.len()));
    }
    if np > r + tol {
        return Err(Error::InvalidParameter(format!(
            "point of norm {np} lies outside the ball of radius {r}"
        )));
    }
    let t_boundary = time_to_boundary(flow, p, tol)?;
    let t_r = time_to_radius(flow, p, r, tol)?;
    let residual = (flow.norm(&flow.flow(t_r, p)) - r).abs();
    Ok(BallMapResult {
        image: flow.flow(t_boundary - t_r, p),
        t_r,
        t_boundary,
        residual,
    })
}
