//! Candidate cost: alignment with the desired trajectory, obstacle
//! avoidance over bearing-dependent penalty regions, and a transitional
//! term that discourages switching maneuvers.

use crate::error::{invalid, Error, Result};
use crate::guidance::DesiredTrajectory;
use crate::scalar::{from_usize, integral_ratio, lit, Scalar};
use crate::tree::CandidateTrajectory;
use crate::types::{resample, wrap, PoseTrajectory, TimeGrid, VelocityTrajectory};

/// Collision, safety and margin regions (k = 0, 1, 2).
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PenaltyGeometry<S> {
    Circular {
        radii: [S; 3],
        gamma1: S,
    },
    /// Bearing-dependent regions widened by `d_colregs` on the obstacle's
    /// starboard side, plus a graded cost inside the collision region.
    EllipticalColregs {
        a: [S; 3],
        b: [S; 3],
        d_colregs: S,
        gamma1: S,
    },
}

impl<S: Scalar> PenaltyGeometry<S> {
    pub fn standard_circular() -> Self {
        Self::Circular {
            radii: [lit(25.0), lit(75.0), lit(125.0)],
            gamma1: lit(0.1),
        }
    }

    pub fn standard_elliptical() -> Self {
        Self::EllipticalColregs {
            a: [lit(50.0), lit(150.0), lit(250.0)],
            b: [lit(25.0), lit(75.0), lit(125.0)],
            d_colregs: lit(100.0),
            gamma1: lit(0.1),
        }
    }

    pub fn gamma1(&self) -> S {
        match *self {
            Self::Circular { gamma1, .. } | Self::EllipticalColregs { gamma1, .. } => gamma1,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let g = self.gamma1();
        if !(g > S::zero() && g < S::one()) {
            return Err(invalid("gamma1 must be in (0, 1)"));
        }
        let nested = |r: &[S; 3]| r[0] > S::zero() && r[1] > r[0] && r[2] > r[1];
        match self {
            Self::Circular { radii, .. } => {
                if !nested(radii) {
                    return Err(invalid("circular radii must satisfy 0 < D0 < D1 < D2"));
                }
            }
            Self::EllipticalColregs { a, b, d_colregs, .. } => {
                if !nested(a) || !nested(b) {
                    return Err(invalid("ellipse axes must be positive and strictly nested"));
                }
                if (0..3).any(|k| a[k] <= b[k]) {
                    return Err(invalid("major axes must exceed minor axes"));
                }
                if !(*d_colregs >= S::zero()) {
                    return Err(invalid("COLREGs distance must be non-negative"));
                }
            }
        }
        Ok(())
    }
}

fn ellipse_radius<S: Scalar>(x_axis: S, y_axis: S, beta: S) -> S {
    let (s, c) = beta.sin_cos();
    x_axis * y_axis / ((y_axis * c).powi(2) + (x_axis * s).powi(2)).sqrt()
}

/// Region size `D_k(β)`. `β` is the bearing of the ownship seen from the
/// obstacle, relative to the obstacle's course; positive is starboard.
pub fn region_radius<S: Scalar>(geom: &PenaltyGeometry<S>, k: usize, beta: S) -> S {
    match *geom {
        PenaltyGeometry::Circular { radii, .. } => radii[k],
        PenaltyGeometry::EllipticalColregs { a, b, d_colregs, .. } => {
            let half_pi = S::FRAC_PI_2();
            let c = b[k] + d_colregs;
            if beta < -half_pi {
                b[k]
            } else if beta < S::zero() {
                ellipse_radius(a[k], b[k], beta)
            } else if beta < half_pi {
                ellipse_radius(a[k], c, beta)
            } else {
                ellipse_radius(b[k], c, beta)
            }
        }
    }
}

/// Inner collision boundary `D_0*(β)`: the port-side collision region
/// mirrored to starboard.
pub fn inner_radius<S: Scalar>(geom: &PenaltyGeometry<S>, beta: S) -> S {
    match *geom {
        PenaltyGeometry::Circular { radii, .. } => radii[0],
        PenaltyGeometry::EllipticalColregs { a, b, .. } => {
            if beta.abs() < S::FRAC_PI_2() {
                ellipse_radius(a[0], b[0], beta)
            } else {
                b[0]
            }
        }
    }
}

fn outer_penalty<S: Scalar>(geom: &PenaltyGeometry<S>, d: S, beta: S) -> S {
    let g = geom.gamma1();
    let d0 = region_radius(geom, 0, beta);
    let d1 = region_radius(geom, 1, beta);
    let d2 = region_radius(geom, 2, beta);
    if d < d0 {
        S::one()
    } else if d < d1 {
        S::one() + (g - S::one()) / (d1 - d0) * (d - d0)
    } else if d < d2 {
        g - g / (d2 - d1) * (d - d1)
    } else {
        S::zero()
    }
}

/// Graded cost in the starboard extension of the collision region, falling
/// linearly with the body-frame lateral distance from `D_0*`.
pub fn inner_penalty<S: Scalar>(geom: &PenaltyGeometry<S>, d: S, beta: S) -> S {
    let PenaltyGeometry::EllipticalColregs { a, b, d_colregs, .. } = *geom else {
        return S::zero();
    };
    if d < inner_radius(geom, beta) {
        return S::one();
    }
    if d >= region_radius(geom, 0, beta) || d_colregs <= S::zero() {
        return S::zero();
    }
    let (s, c) = beta.sin_cos();
    let (x, y) = (d * c, d * s);
    let boundary = if x >= S::zero() {
        if x < a[0] {
            b[0] * (S::one() - (x / a[0]).powi(2)).sqrt()
        } else {
            S::zero()
        }
    } else if -x < b[0] {
        (b[0] * b[0] - x * x).sqrt()
    } else {
        S::zero()
    };
    let yb = (y - boundary).max(S::zero());
    (S::one() - yb / d_colregs).max(S::zero()).min(S::one())
}

/// Penalty at distance `d` and relative bearing `β`.
pub fn penalty<S: Scalar>(geom: &PenaltyGeometry<S>, d: S, beta: S) -> S {
    outer_penalty(geom, d, beta) + inner_penalty(geom, d, beta)
}

/// Distance and relative bearing of `own` as seen from an obstacle at
/// `obstacle` heading `obstacle_course`.
pub fn relative_geometry<S: Scalar>(own: [S; 2], obstacle: [S; 2], obstacle_course: S) -> (S, S) {
    let (rn, re) = (own[0] - obstacle[0], own[1] - obstacle[1]);
    (rn.hypot(re), wrap(re.atan2(rn) - obstacle_course))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ObjectiveWeights<S> {
    pub align: S,
    pub avoid: S,
    pub tran: S,
    /// Angular error weight inside the alignment term.
    pub course: S,
    /// Position error weight inside the alignment term.
    pub position: S,
}

impl<S: Scalar> ObjectiveWeights<S> {
    pub fn standard() -> Self {
        Self {
            align: S::one(),
            avoid: lit(6000.0),
            tran: lit(4200.0),
            course: lit(100.0),
            position: S::one(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let all = [self.align, self.avoid, self.tran, self.course, self.position];
        if all.iter().any(|w| !(*w >= S::zero()) || !w.is_finite()) {
            return Err(invalid("objective weights must be finite and non-negative"));
        }
        Ok(())
    }
}

/// Constant-velocity obstacle track over a horizon.
#[derive(Debug, Clone, PartialEq)]
pub struct ObstaclePrediction<S> {
    pub id: u32,
    pub grid: TimeGrid<S>,
    pub positions: Vec<[S; 2]>,
    pub course: S,
    pub sog: S,
    /// Per-obstacle weight in the avoidance sum.
    pub weight: S,
}

impl<S: Scalar> ObstaclePrediction<S> {
    /// Position at `t`, linearly interpolated.
    pub fn position_at(&self, t: S) -> Result<[S; 2]> {
        let g = &self.grid;
        let tol = lit::<S>(1e-9) * (S::one() + g.end().abs());
        if t < g.t0() - tol || t > g.end() + tol {
            return Err(Error::OutsideSpan {
                start: t.to_f64_lossy(),
                end: t.to_f64_lossy(),
                span_start: g.t0().to_f64_lossy(),
                span_end: g.end().to_f64_lossy(),
            });
        }
        let u = ((t - g.t0()) / g.dt()).max(S::zero());
        let last = g.len() - 1;
        let i = u.floor().to_usize().unwrap_or(0).min(last - 1);
        let f = (u - from_usize(i)).min(S::one());
        let (p, q) = (self.positions[i], self.positions[i + 1]);
        Ok([p[0] + f * (q[0] - p[0]), p[1] + f * (q[1] - p[1])])
    }
}

/// Indices of `grid` on a coarser evaluation step.
fn eval_indices<S: Scalar>(grid: &TimeGrid<S>, eval_dt: S) -> Result<(usize, usize)> {
    let stride = integral_ratio(eval_dt, grid.dt())
        .filter(|&k| k >= 1)
        .ok_or_else(|| Error::InvalidGrid(format!("evaluation dt {eval_dt} is not a multiple of {}", grid.dt())))?;
    if !(grid.len() - 1).is_multiple_of(stride) {
        return Err(Error::InvalidGrid(
            "horizon is not a multiple of the evaluation dt".into(),
        ));
    }
    Ok((stride, (grid.len() - 1) / stride + 1))
}

/// Trapezoidal integral of `f` sampled on every `stride`-th grid point.
fn trapz<S: Scalar>(n: usize, h: S, mut f: impl FnMut(usize) -> Result<S>) -> Result<S> {
    let half = h / (S::one() + S::one());
    let mut acc = S::zero();
    let mut prev = f(0)?;
    for j in 1..n {
        let cur = f(j)?;
        acc = acc + half * (prev + cur);
        prev = cur;
    }
    Ok(acc)
}

/// `∫ w_p ‖p̄ − p_d‖ + w_χ |wrap(χ̄ − χ_d)| dt` over the pose horizon.
pub fn align_cost<S: Scalar>(
    pose: &PoseTrajectory<S>,
    path: &DesiredTrajectory<S>,
    weights: &ObjectiveWeights<S>,
    eval_dt: S,
) -> Result<S> {
    let (stride, n) = eval_indices(&pose.grid, eval_dt)?;
    trapz(n, eval_dt, |j| {
        let i = j * stride;
        let t = pose.grid.time(i);
        let p = &pose.poses[i];
        let pd = path.position(t);
        let dist = (p.north - pd[0]).hypot(p.east - pd[1]);
        let ang = wrap(p.course - path.course(t)).abs();
        Ok(weights.position * dist + weights.course * ang)
    })
}

/// `Σ_i ∫ w_i penalty_i dt` over the pose horizon.
pub fn avoid_cost<S: Scalar>(
    pose: &PoseTrajectory<S>,
    obstacles: &[ObstaclePrediction<S>],
    geom: &PenaltyGeometry<S>,
    eval_dt: S,
) -> Result<S> {
    let (stride, n) = eval_indices(&pose.grid, eval_dt)?;
    let mut total = S::zero();
    for ob in obstacles {
        total = total
            + ob.weight
                * trapz(n, eval_dt, |j| {
                    let i = j * stride;
                    let own = pose.poses[i].position();
                    let p = ob.position_at(pose.grid.time(i))?;
                    let (d, beta) = relative_geometry(own, p, ob.course);
                    Ok(penalty(geom, d, beta))
                })?;
    }
    Ok(total)
}

/// Integrated SOG and course deviation of a first maneuver from the
/// previous plan over the same span.
pub fn transition_errors<S: Scalar>(
    first: &VelocityTrajectory<S>,
    previous: &VelocityTrajectory<S>,
    eval_dt: S,
) -> Result<(S, S)> {
    let prev = resample(previous, first.grid)?;
    let (stride, n) = eval_indices(&first.grid, eval_dt)?;
    let eu = trapz(n, eval_dt, |j| Ok((first.sog[j * stride] - prev.sog[j * stride]).abs()))?;
    let ec = trapz(n, eval_dt, |j| {
        Ok(wrap(first.course[j * stride] - prev.course[j * stride]).abs())
    })?;
    Ok((eu, ec))
}

/// Tie tolerance of the transitional term, in integral units.
pub const TRAN_TOL: f64 = 1e-6;

/// 0 for candidates whose SOG and course deviations both attain the set
/// minimum, 1 otherwise.
pub fn tran_costs<S: Scalar>(errors: &[(S, S)]) -> Vec<S> {
    let tol = lit::<S>(TRAN_TOL);
    let inf = S::infinity();
    let (mu, mc) = errors.iter().fold((inf, inf), |(a, b), &(u, c)| (a.min(u), b.min(c)));
    errors
        .iter()
        .map(|&(u, c)| {
            if u <= mu + tol && c <= mc + tol {
                S::zero()
            } else {
                S::one()
            }
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CostBreakdown<S> {
    pub align: S,
    pub avoid: S,
    pub tran: S,
    pub total: S,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Selection<S> {
    pub index: usize,
    pub costs: Vec<CostBreakdown<S>>,
}

/// Evaluates every candidate and returns the argmin, lowest index on ties.
pub fn select<S: Scalar>(
    candidates: &[CandidateTrajectory<S>],
    path: &DesiredTrajectory<S>,
    obstacles: &[ObstaclePrediction<S>],
    geom: &PenaltyGeometry<S>,
    weights: &ObjectiveWeights<S>,
    previous: &VelocityTrajectory<S>,
    eval_dt: S,
) -> Result<Selection<S>> {
    if candidates.is_empty() {
        return Err(Error::NoCandidates);
    }
    let errors = candidates
        .iter()
        .map(|c| transition_errors(&c.first_maneuver_desired, previous, eval_dt))
        .collect::<Result<Vec<_>>>()?;
    let tran = tran_costs(&errors);
    let mut costs = Vec::with_capacity(candidates.len());
    for (c, &t) in candidates.iter().zip(&tran) {
        let align = align_cost(&c.predicted_pose, path, weights, eval_dt)?;
        let avoid = avoid_cost(&c.predicted_pose, obstacles, geom, eval_dt)?;
        let total = weights.align * align + weights.avoid * avoid + weights.tran * t;
        if !total.is_finite() {
            return Err(Error::NonFinite("candidate cost"));
        }
        costs.push(CostBreakdown {
            align,
            avoid,
            tran: t,
            total,
        });
    }
    let mut index = 0;
    for (i, c) in costs.iter().enumerate() {
        if c.total < costs[index].total {
            index = i;
        }
    }
    Ok(Selection { index, costs })
}

/// Penalty field sampled on a square grid in the obstacle body frame
/// (`x` forward, `y` starboard), as `(x, y, value)` rows.
pub fn raster<S: Scalar>(geom: &PenaltyGeometry<S>, half_extent: S, step: S) -> Result<Vec<(S, S, S)>> {
    if !(step > S::zero()) || !(half_extent > S::zero()) {
        return Err(invalid("raster extent and step must be positive"));
    }
    let n = integral_ratio(half_extent + half_extent, step)
        .ok_or_else(|| invalid("raster extent must be a multiple of the step"))?;
    let mut rows = Vec::with_capacity((n + 1) * (n + 1));
    for i in 0..=n {
        let x = half_extent - step * from_usize(i);
        for j in 0..=n {
            let y = -half_extent + step * from_usize(j);
            let beta = wrap(y.atan2(x));
            rows.push((x, y, penalty(geom, x.hypot(y), beta)));
        }
    }
    Ok(rows)
}
