//! Single-step trajectory generation.
//!
//! One step turns the current vessel configuration into a set of desired
//! velocity trajectories, each containing exactly one maneuver: sample the
//! reachable accelerations, shape them into piecewise-linear SOG and course
//! acceleration profiles, integrate, drop combinations whose terminal
//! steady state the vessel cannot hold, then predict the closed-loop
//! response and roll out positions.

use crate::error::{invalid, Error, Result};
use crate::scalar::{from_usize, integral_ratio, Scalar};
use crate::types::{wrap, Accel2, Pose, PoseTrajectory, TimeGrid, Velocity2, VelocityTrajectory};
use crate::vessel::{Force2, VesselModel};

/// Timing and sample counts of one maneuver step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepParams<S> {
    /// Total step length `T`.
    pub step: S,
    pub ramp: S,
    /// SOG maneuver length `T_U`.
    pub sog_len: S,
    /// Course maneuver length `T_χ`.
    pub course_len: S,
    pub n_sog: usize,
    pub n_course: usize,
}

impl<S: Scalar> StepParams<S> {
    /// Checks the timing invariants and that the step is a whole number of
    /// `dt` samples.
    pub fn validate(&self, dt: S) -> Result<()> {
        let two = S::one() + S::one();
        let four = two + two;
        if !(self.ramp > S::zero()) {
            return Err(invalid("ramp time must be positive"));
        }
        if self.step < self.sog_len.max(self.course_len) {
            return Err(invalid("step length must cover both maneuver lengths"));
        }
        if self.sog_len < two * self.ramp {
            return Err(invalid("SOG maneuver length must be at least 2 ramp times"));
        }
        if self.course_len < four * self.ramp {
            return Err(invalid("course maneuver length must be at least 4 ramp times"));
        }
        if self.n_sog == 0 || self.n_course == 0 {
            return Err(invalid("sample counts must be at least 1"));
        }
        if integral_ratio(self.step, dt).is_none() {
            return Err(invalid(format!("step {} not divisible by dt {}", self.step, dt)));
        }
        Ok(())
    }
}

/// Box of reachable SOG and rate-of-turn accelerations.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AccelBox<S> {
    pub sog_min: S,
    pub sog_max: S,
    pub rot_min: S,
    pub rot_max: S,
}

impl<S: Scalar> AccelBox<S> {
    pub fn contains_sog(&self, v: S) -> bool {
        v >= self.sog_min && v <= self.sog_max
    }

    pub fn contains_rot(&self, v: S) -> bool {
        v >= self.rot_min && v <= self.rot_max
    }
}

/// First-order closed-loop error time constants.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ErrorModel<S> {
    pub sog_tc: S,
    pub course_tc: S,
}

impl<S: Scalar> ErrorModel<S> {
    pub fn new(sog_tc: S, course_tc: S) -> Result<Self> {
        if !(sog_tc > S::zero() && course_tc > S::zero()) {
            return Err(invalid("error model time constants must be positive"));
        }
        Ok(Self { sog_tc, course_tc })
    }
}

/// Component-wise clamp.
pub fn sat<S: Scalar>(a: &[S], a_min: &[S], a_max: &[S]) -> Result<Vec<S>> {
    if a.len() != a_min.len() {
        return Err(Error::DimensionMismatch(a.len(), a_min.len()));
    }
    if a.len() != a_max.len() {
        return Err(Error::DimensionMismatch(a.len(), a_max.len()));
    }
    Ok(a.iter()
        .zip(a_min.iter().zip(a_max))
        .map(|(&v, (&lo, &hi))| {
            if v < lo {
                lo
            } else if v > hi {
                hi
            } else {
                v
            }
        })
        .collect())
}

/// Accelerations reachable within one ramp time from input `tau0`, given
/// the actuator magnitude and rate limits.
pub fn possible_accelerations<S: Scalar>(
    model: &VesselModel<S>,
    x0: &Velocity2<S>,
    tau0: &Force2<S>,
    ramp: S,
) -> AccelBox<S> {
    let reach = |rate: Force2<S>| {
        Force2::new(tau0.m + ramp * rate.m, tau0.delta + ramp * rate.delta).clamp(model.tau_min, model.tau_max)
    };
    let hi = model.acceleration(x0, &reach(model.tau_rate_max));
    let lo = model.acceleration(x0, &reach(model.tau_rate_min));
    AccelBox {
        sog_min: lo.sog_acc,
        sog_max: hi.sog_acc,
        rot_min: lo.rot_acc,
        rot_max: hi.rot_acc,
    }
}

fn sample_channel<S: Scalar>(lo: S, hi: S, n: usize, desired: Option<S>) -> Vec<S> {
    let mut samples: Vec<S> = if n == 1 {
        vec![S::zero().max(lo).min(hi)]
    } else {
        let denom = from_usize::<S>(n - 1);
        (0..n)
            .map(|i| {
                if i == n - 1 {
                    hi
                } else {
                    lo + (hi - lo) * from_usize(i) / denom
                }
            })
            .collect()
    };
    if let Some(d) = desired {
        if d >= lo && d <= hi {
            let mut best = 0;
            for (i, v) in samples.iter().enumerate() {
                if (*v - d).abs() < (samples[best] - d).abs() {
                    best = i;
                }
            }
            samples[best] = d;
        }
    }
    samples
}

/// Uniform, endpoint-inclusive samples of the box. A desired component
/// that lies inside its range replaces the nearest sample (lowest index on
/// ties). A single sample sits at zero, or the nearest edge when zero is
/// unreachable.
pub fn sample_accelerations<S: Scalar>(
    bx: &AccelBox<S>,
    n_sog: usize,
    n_course: usize,
    desired: Option<Accel2<S>>,
) -> (Vec<S>, Vec<S>) {
    (
        sample_channel(bx.sog_min, bx.sog_max, n_sog, desired.map(|d| d.sog_acc)),
        sample_channel(bx.rot_min, bx.rot_max, n_course, desired.map(|d| d.rot_acc)),
    )
}

/// Trapezoidal SOG acceleration profile: ramp up over `ramp`, hold, ramp
/// down to zero at `sog_len`, zero until the end of the step.
pub fn sog_profile<S: Scalar>(accel: S, p: &StepParams<S>, tau: S) -> S {
    let k = accel / p.ramp;
    if tau < S::zero() {
        S::zero()
    } else if tau < p.ramp {
        k * tau
    } else if tau < p.sog_len - p.ramp {
        accel
    } else if tau < p.sog_len {
        accel - k * (tau - (p.sog_len - p.ramp))
    } else {
        S::zero()
    }
}

/// Antisymmetric double-triangle rate-of-turn acceleration profile. Its
/// integral is zero, so a maneuver starting at zero rate ends at zero rate.
pub fn course_profile<S: Scalar>(accel: S, p: &StepParams<S>, tau: S) -> S {
    let two = S::one() + S::one();
    let k = accel / p.ramp;
    let r = p.ramp;
    let t = p.course_len;
    if tau < S::zero() {
        S::zero()
    } else if tau < r {
        k * tau
    } else if tau < two * r {
        two * accel - k * tau
    } else if tau < t - two * r {
        S::zero()
    } else if tau < t - r {
        -k * (tau - (t - two * r))
    } else if tau < t {
        -two * accel + k * (tau - (t - two * r))
    } else {
        S::zero()
    }
}

/// [`sog_profile`] sampled on `grid`, with time measured from `grid.t0()`.
pub fn sog_primitive<S: Scalar>(accel: S, p: &StepParams<S>, grid: &TimeGrid<S>) -> Vec<S> {
    (0..grid.len())
        .map(|i| sog_profile(accel, p, grid.dt() * from_usize(i)))
        .collect()
}

/// [`course_profile`] sampled on `grid`, with time measured from `grid.t0()`.
pub fn course_primitive<S: Scalar>(accel: S, p: &StepParams<S>, grid: &TimeGrid<S>) -> Vec<S> {
    (0..grid.len())
        .map(|i| course_profile(accel, p, grid.dt() * from_usize(i)))
        .collect()
}

/// Cumulative trapezoidal integral of `rate` starting from `initial`.
pub(crate) fn cumtrapz<S: Scalar>(initial: S, rate: &[S], dt: S) -> Vec<S> {
    let half = dt / (S::one() + S::one());
    let mut out = Vec::with_capacity(rate.len());
    let mut acc = initial;
    out.push(acc);
    for w in rate.windows(2) {
        acc = acc + half * (w[0] + w[1]);
        out.push(acc);
    }
    out
}

/// Desired values at the start of a maneuver, taken from the end of the
/// previous one.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DesiredStart<S> {
    pub sog: S,
    pub rot: S,
    pub course: S,
}

/// One feasible SOG x course combination of a step.
#[derive(Debug, Clone, PartialEq)]
pub struct Maneuver<S> {
    pub sog_index: usize,
    pub course_index: usize,
    pub sog_accel: S,
    pub rot_accel: S,
    pub desired: VelocityTrajectory<S>,
}

/// Integrates every SOG x course sample pair into a desired velocity
/// trajectory on `grid` (which must span exactly one step). Pairs whose
/// terminal steady state violates the speed or actuator limits are removed.
pub fn integrate_primitives<S: Scalar>(
    sog_samples: &[S],
    rot_samples: &[S],
    start: &DesiredStart<S>,
    p: &StepParams<S>,
    grid: &TimeGrid<S>,
    model: &VesselModel<S>,
) -> Result<Vec<Maneuver<S>>> {
    let tol = crate::scalar::lit::<S>(1e-9) * (S::one() + p.step);
    if (grid.duration() - p.step).abs() > tol {
        return Err(Error::InvalidGrid(format!(
            "grid spans {} s but the step is {} s",
            grid.duration(),
            p.step
        )));
    }
    let dt = grid.dt();
    let sog_channels: Vec<(Vec<S>, Vec<S>)> = sog_samples
        .iter()
        .map(|&a| {
            let acc = sog_primitive(a, p, grid);
            let sog = cumtrapz(start.sog, &acc, dt);
            (acc, sog)
        })
        .collect();
    let course_channels: Vec<(Vec<S>, Vec<S>, Vec<S>)> = rot_samples
        .iter()
        .map(|&a| {
            let acc = course_primitive(a, p, grid);
            let rot = cumtrapz(start.rot, &acc, dt);
            let course = cumtrapz(start.course, &rot, dt);
            (acc, rot, course)
        })
        .collect();

    let mut out = Vec::with_capacity(sog_samples.len() * rot_samples.len());
    for (iu, (sog_acc, sog)) in sog_channels.iter().enumerate() {
        for (ic, (rot_acc, rot, course)) in course_channels.iter().enumerate() {
            let terminal = Velocity2 {
                sog: *sog.last().expect("non-empty"),
                rot: *rot.last().expect("non-empty"),
            };
            if !model.steady_state_feasible(&terminal) {
                continue;
            }
            out.push(Maneuver {
                sog_index: iu,
                course_index: ic,
                sog_accel: sog_samples[iu],
                rot_accel: rot_samples[ic],
                desired: VelocityTrajectory {
                    grid: *grid,
                    sog: sog.clone(),
                    rot: rot.clone(),
                    course: course.clone(),
                    sog_acc: sog_acc.clone(),
                    rot_acc: rot_acc.clone(),
                },
            });
        }
    }
    if out.is_empty() {
        return Err(Error::AllInfeasible);
    }
    Ok(out)
}

/// Predicted SOG and (unwrapped) course under first-order error decay.
#[derive(Debug, Clone, PartialEq)]
pub struct PredictedVelocity<S> {
    pub sog: Vec<S>,
    pub course: Vec<S>,
}

/// Adds the exponentially decaying initial tracking error to the desired
/// trajectory: `Ū = Ũ₀ e^{-(t-t0)/T_Ũ} + U_d`, likewise for course.
pub fn predict<S: Scalar>(
    traj: &VelocityTrajectory<S>,
    em: &ErrorModel<S>,
    actual_sog: S,
    actual_course: S,
) -> PredictedVelocity<S> {
    let err_u = actual_sog - traj.sog[0];
    let err_chi = wrap(actual_course - traj.course[0]);
    let dt = traj.grid.dt();
    let n = traj.len();
    let mut sog = Vec::with_capacity(n);
    let mut course = Vec::with_capacity(n);
    for i in 0..n {
        let tau = dt * from_usize(i);
        sog.push(err_u * (-tau / em.sog_tc).exp() + traj.sog[i]);
        course.push(err_chi * (-tau / em.course_tc).exp() + traj.course[i]);
    }
    PredictedVelocity { sog, course }
}

/// Integrates `ṗ = [cos χ̄, sin χ̄] Ū` from `origin` with the trapezoidal
/// rule.
pub fn rollout_position<S: Scalar>(
    sog: &[S],
    course: &[S],
    grid: &TimeGrid<S>,
    origin: [S; 2],
) -> Result<PoseTrajectory<S>> {
    if sog.len() != grid.len() {
        return Err(Error::DimensionMismatch(sog.len(), grid.len()));
    }
    if course.len() != grid.len() {
        return Err(Error::DimensionMismatch(course.len(), grid.len()));
    }
    let half = grid.dt() / (S::one() + S::one());
    let mut poses = Vec::with_capacity(grid.len());
    let [mut n, mut e] = origin;
    poses.push(Pose::new(n, e, course[0]));
    for i in 1..grid.len() {
        let (s0, c0) = course[i - 1].sin_cos();
        let (s1, c1) = course[i].sin_cos();
        n = n + half * (sog[i - 1] * c0 + sog[i] * c1);
        e = e + half * (sog[i - 1] * s0 + sog[i] * s1);
        poses.push(Pose::new(n, e, course[i]));
    }
    PoseTrajectory::new(*grid, poses)
}
