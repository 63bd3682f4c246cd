//! Shared domain types, angle arithmetic and the time-grid representation.

use crate::error::{Error, Result};
use crate::scalar::{from_usize, lit, Scalar};

/// Maps an angle to `[-π, π)`, rejecting non-finite input.
pub fn wrap_angle<S: Scalar>(a: S) -> Result<S> {
    if !a.is_finite() {
        return Err(Error::NonFinite("angle"));
    }
    Ok(wrap(a))
}

/// Unchecked variant of [`wrap_angle`]; NaN propagates.
#[inline]
pub fn wrap<S: Scalar>(a: S) -> S {
    let two_pi = S::TAU();
    let pi = S::PI();
    let mut w = a - two_pi * ((a + pi) / two_pi).floor();
    // floor() can leave the result one ulp outside the half-open range
    if w >= pi {
        w = w - two_pi;
    }
    if w < -pi {
        w = w + two_pi;
    }
    w
}

/// Ownship pose in the local NED plane.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Pose<S> {
    pub north: S,
    pub east: S,
    /// Course over ground, normalized to `[-π, π)`.
    pub course: S,
}

impl<S: Scalar> Pose<S> {
    pub fn new(north: S, east: S, course: S) -> Self {
        Self {
            north,
            east,
            course: wrap(course),
        }
    }

    pub fn position(&self) -> [S; 2] {
        [self.north, self.east]
    }
}

/// Speed over ground and rate of turn.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Velocity2<S> {
    pub sog: S,
    pub rot: S,
}

impl<S: Scalar> Velocity2<S> {
    /// Builds a velocity, clamping negative SOG to zero.
    pub fn new(sog: S, rot: S) -> Self {
        Self {
            sog: sog.max(S::zero()),
            rot,
        }
    }

    pub fn zero() -> Self {
        Self {
            sog: S::zero(),
            rot: S::zero(),
        }
    }
}

/// Time derivative of a [`Velocity2`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Accel2<S> {
    pub sog_acc: S,
    pub rot_acc: S,
}

impl<S: Scalar> Accel2<S> {
    pub fn new(sog_acc: S, rot_acc: S) -> Self {
        Self { sog_acc, rot_acc }
    }

    pub fn zero() -> Self {
        Self::new(S::zero(), S::zero())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VesselState<S> {
    pub pose: Pose<S>,
    pub vel: Velocity2<S>,
    pub time: S,
}

impl<S: Scalar> VesselState<S> {
    pub fn new(pose: Pose<S>, vel: Velocity2<S>, time: S) -> Self {
        Self { pose, vel, time }
    }
}

/// Uniform time grid covering `[t0, t0 + (n - 1) dt]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimeGrid<S> {
    t0: S,
    dt: S,
    n: usize,
}

impl<S: Scalar> TimeGrid<S> {
    pub fn new(t0: S, dt: S, n: usize) -> Result<Self> {
        if !t0.is_finite() || !dt.is_finite() {
            return Err(Error::NonFinite("time grid"));
        }
        if dt <= S::zero() {
            return Err(Error::InvalidGrid(format!("dt must be positive, got {dt}")));
        }
        if n < 2 {
            return Err(Error::InvalidGrid(format!("need at least 2 samples, got {n}")));
        }
        Ok(Self { t0, dt, n })
    }

    /// Grid over `[t0, t0 + duration]`; `duration` must be a multiple of `dt`.
    pub fn over(t0: S, duration: S, dt: S) -> Result<Self> {
        let steps = crate::scalar::integral_ratio(duration, dt)
            .ok_or_else(|| Error::InvalidGrid(format!("duration {duration} is not a multiple of dt {dt}")))?;
        Self::new(t0, dt, steps + 1)
    }

    pub fn t0(&self) -> S {
        self.t0
    }

    pub fn dt(&self) -> S {
        self.dt
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    #[inline]
    pub fn time(&self, i: usize) -> S {
        self.t0 + self.dt * from_usize(i)
    }

    pub fn end(&self) -> S {
        self.time(self.n - 1)
    }

    pub fn duration(&self) -> S {
        self.end() - self.t0
    }

    pub fn times(&self) -> impl Iterator<Item = S> + '_ {
        (0..self.n).map(move |i| self.time(i))
    }
}

/// Desired velocity trajectory on a time grid. The course channel is kept
/// unwrapped; wrap it only when comparing against other angles.
#[derive(Debug, Clone, PartialEq)]
pub struct VelocityTrajectory<S> {
    pub grid: TimeGrid<S>,
    pub sog: Vec<S>,
    pub rot: Vec<S>,
    pub course: Vec<S>,
    pub sog_acc: Vec<S>,
    pub rot_acc: Vec<S>,
}

impl<S: Scalar> VelocityTrajectory<S> {
    pub fn new(
        grid: TimeGrid<S>,
        sog: Vec<S>,
        rot: Vec<S>,
        course: Vec<S>,
        sog_acc: Vec<S>,
        rot_acc: Vec<S>,
    ) -> Result<Self> {
        for len in [sog.len(), rot.len(), course.len(), sog_acc.len(), rot_acc.len()] {
            if len != grid.len() {
                return Err(Error::DimensionMismatch(len, grid.len()));
            }
        }
        Ok(Self {
            grid,
            sog,
            rot,
            course,
            sog_acc,
            rot_acc,
        })
    }

    /// Constant speed, straight course over `grid`.
    pub fn constant(grid: TimeGrid<S>, sog: S, course: S) -> Self {
        let n = grid.len();
        Self {
            grid,
            sog: vec![sog; n],
            rot: vec![S::zero(); n],
            course: vec![course; n],
            sog_acc: vec![S::zero(); n],
            rot_acc: vec![S::zero(); n],
        }
    }

    pub fn len(&self) -> usize {
        self.grid.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Terminal `(sog, rot, course)`.
    pub fn terminal(&self) -> (S, S, S) {
        let last = self.len() - 1;
        (self.sog[last], self.rot[last], self.course[last])
    }

    /// Linear interpolation of every channel at time `t`, clamped to the span.
    pub fn sample(&self, t: S) -> TrajectorySample<S> {
        let (i, frac) = locate(&self.grid, t);
        let lerp = |v: &[S]| {
            if frac == S::zero() {
                v[i]
            } else {
                v[i] + (v[i + 1] - v[i]) * frac
            }
        };
        TrajectorySample {
            sog: lerp(&self.sog),
            rot: lerp(&self.rot),
            course: lerp(&self.course),
            sog_acc: lerp(&self.sog_acc),
            rot_acc: lerp(&self.rot_acc),
        }
    }
}

/// All channels of a [`VelocityTrajectory`] at one instant.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrajectorySample<S> {
    pub sog: S,
    pub rot: S,
    pub course: S,
    pub sog_acc: S,
    pub rot_acc: S,
}

fn locate<S: Scalar>(grid: &TimeGrid<S>, t: S) -> (usize, S) {
    let pos = ((t - grid.t0()) / grid.dt()).max(S::zero());
    let last = grid.len() - 1;
    let idx = pos.floor().to_usize().unwrap_or(0);
    if idx >= last {
        return (last, S::zero());
    }
    (idx, pos - from_usize(idx))
}

/// Linearly interpolates `traj` onto `grid`, which must lie inside the
/// source span. Courses are interpolated on their unwrapped values.
pub fn resample<S: Scalar>(traj: &VelocityTrajectory<S>, grid: TimeGrid<S>) -> Result<VelocityTrajectory<S>> {
    let src = &traj.grid;
    let tol = lit::<S>(1e-9) * (S::one() + src.end().abs().max(src.t0().abs()));
    if grid.t0() < src.t0() - tol || grid.end() > src.end() + tol {
        return Err(Error::OutsideSpan {
            start: grid.t0().to_f64_lossy(),
            end: grid.end().to_f64_lossy(),
            span_start: src.t0().to_f64_lossy(),
            span_end: src.end().to_f64_lossy(),
        });
    }
    let n = grid.len();
    let mut out = VelocityTrajectory {
        grid,
        sog: Vec::with_capacity(n),
        rot: Vec::with_capacity(n),
        course: Vec::with_capacity(n),
        sog_acc: Vec::with_capacity(n),
        rot_acc: Vec::with_capacity(n),
    };
    for t in grid.times() {
        let s = traj.sample(t);
        out.sog.push(s.sog);
        out.rot.push(s.rot);
        out.course.push(s.course);
        out.sog_acc.push(s.sog_acc);
        out.rot_acc.push(s.rot_acc);
    }
    Ok(out)
}

/// Predicted pose trajectory on a time grid.
#[derive(Debug, Clone, PartialEq)]
pub struct PoseTrajectory<S> {
    pub grid: TimeGrid<S>,
    pub poses: Vec<Pose<S>>,
}

impl<S: Scalar> PoseTrajectory<S> {
    pub fn new(grid: TimeGrid<S>, poses: Vec<Pose<S>>) -> Result<Self> {
        if poses.len() != grid.len() {
            return Err(Error::DimensionMismatch(poses.len(), grid.len()));
        }
        Ok(Self { grid, poses })
    }

    pub fn last(&self) -> &Pose<S> {
        self.poses.last().expect("grid has at least two samples")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::f64::consts::PI;

    #[test]
    fn wrap_examples() {
        assert_eq!(wrap_angle(0.0_f64).unwrap(), 0.0);
        assert!((wrap_angle(1.5 * PI).unwrap() + 0.5 * PI).abs() < 1e-15);
        assert_eq!(wrap_angle(-PI).unwrap(), -PI);
        assert_eq!(wrap_angle(PI).unwrap(), -PI);
        assert!(wrap_angle(f64::NAN).is_err());
        assert!(wrap_angle(f64::INFINITY).is_err());
    }

    #[test]
    fn grid_rejects_bad_input() {
        assert!(TimeGrid::new(0.0, 0.0, 5).is_err());
        assert!(TimeGrid::new(0.0, 0.1, 1).is_err());
        assert!(TimeGrid::over(0.0, 1.05, 0.1).is_err());
        let g = TimeGrid::<f64>::over(2.0, 5.0, 0.5).unwrap();
        assert_eq!(g.len(), 11);
        assert!((g.end() - 7.0).abs() < 1e-12);
    }

    fn ramp(grid: TimeGrid<f64>) -> VelocityTrajectory<f64> {
        let sog: Vec<f64> = grid.times().map(|t| t / 10.0).collect();
        let n = grid.len();
        VelocityTrajectory::new(
            grid,
            sog,
            vec![0.0; n],
            grid.times().map(|t| 0.3 * t).collect(),
            vec![0.1; n],
            vec![0.0; n],
        )
        .unwrap()
    }

    #[test]
    fn resample_examples() {
        let g = TimeGrid::over(0.0, 10.0, 0.5).unwrap();
        let tr = ramp(g);
        assert_eq!(resample(&tr, g).unwrap(), tr);

        let mid = resample(&tr, TimeGrid::new(5.0, 0.25, 2).unwrap()).unwrap();
        assert!((mid.sog[0] - 0.5).abs() < 1e-12);

        let c = VelocityTrajectory::constant(g, 3.0, 1.0);
        let sub = resample(&c, TimeGrid::new(1.3, 0.7, 9).unwrap()).unwrap();
        assert!(sub.sog.iter().all(|&v| (v - 3.0).abs() < 1e-15));
        assert!(sub.course.iter().all(|&v| (v - 1.0).abs() < 1e-15));

        assert!(resample(&tr, TimeGrid::new(8.0, 1.0, 4).unwrap()).is_err());
        assert!(resample(&tr, TimeGrid::new(-1.0, 1.0, 4).unwrap()).is_err());
    }

    #[test]
    fn resample_interpolates_unwrapped_course() {
        let g = TimeGrid::<f64>::new(0.0, 1.0, 2).unwrap();
        let tr = VelocityTrajectory::new(
            g,
            vec![1.0, 1.0],
            vec![0.0, 0.0],
            vec![3.0, 3.4],
            vec![0.0, 0.0],
            vec![0.0, 0.0],
        )
        .unwrap();
        let r = resample(&tr, TimeGrid::new(0.0, 0.5, 3).unwrap()).unwrap();
        assert!((r.course[1] - 3.2).abs() < 1e-12);
    }

    proptest! {
        #[test]
        fn wrap_is_idempotent(a in -1e4_f64..1e4) {
            let w = wrap_angle(a).unwrap();
            prop_assert!((-PI..PI).contains(&w));
            prop_assert_eq!(wrap_angle(w).unwrap(), w);
        }

        #[test]
        fn wrap_is_2pi_periodic(a in -50.0_f64..50.0, k in -10_i32..=10) {
            let shifted = wrap_angle(a + 2.0 * PI * k as f64).unwrap();
            let base = wrap_angle(a).unwrap();
            // compare on the circle so that the -π/π seam does not count as a jump
            prop_assert!(wrap(shifted - base).abs() < 1e-12);
        }

        #[test]
        fn resample_on_source_points_is_exact(t0 in -100.0_f64..100.0, n in 2_usize..60, dt in 0.05_f64..2.0) {
            let g = TimeGrid::new(t0, dt, n).unwrap();
            let tr = VelocityTrajectory::new(
                g,
                g.times().map(|t| (0.1 * t).sin()).collect(),
                g.times().map(|t| (0.2 * t).cos()).collect(),
                g.times().map(|t| 0.05 * t).collect(),
                g.times().map(|t| t * t * 1e-3).collect(),
                vec![0.0; n],
            ).unwrap();
            let r = resample(&tr, g).unwrap();
            for i in 0..n {
                prop_assert!((r.sog[i] - tr.sog[i]).abs() < 1e-12);
                prop_assert!((r.rot[i] - tr.rot[i]).abs() < 1e-12);
                prop_assert!((r.course[i] - tr.course[i]).abs() < 1e-12);
                prop_assert!((r.sog_acc[i] - tr.sog_acc[i]).abs() < 1e-12);
            }
        }
    }
}
