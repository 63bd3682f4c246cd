//! Line-of-sight guidance toward a time-parameterized desired trajectory.
//!
//! The guidance output is a desired SOG and rate-of-turn acceleration
//! pair. It only seeds one sample per tree node; the optimizer is free to
//! pick any other candidate.

use crate::error::{invalid, Result};
use crate::primitives::StepParams;
use crate::scalar::{lit, Scalar};
use crate::types::{wrap, Accel2, Pose};

/// Straight line or piecewise-linear track traversed at constant speed,
/// starting at `t0`. Outside the track the first and last legs are
/// extrapolated.
#[derive(Debug, Clone, PartialEq)]
pub struct DesiredTrajectory<S> {
    t0: S,
    speed: S,
    points: Vec<[S; 2]>,
    // arc length at each point, and heading of the leg starting there
    arc: Vec<S>,
    heading: Vec<S>,
    straight: bool,
}

impl<S: Scalar> DesiredTrajectory<S> {
    /// Straight line from `origin` along `course`.
    pub fn straight(origin: [S; 2], course: S, speed: S, t0: S) -> Result<Self> {
        if !course.is_finite() {
            return Err(invalid("desired course must be finite"));
        }
        let course = wrap(course);
        let far = lit::<S>(1e3);
        let end = [origin[0] + far * course.cos(), origin[1] + far * course.sin()];
        let mut tr = Self::waypoints(vec![origin, end], speed, t0)?;
        tr.heading = vec![course; 2];
        tr.straight = true;
        Ok(tr)
    }

    /// Piecewise-linear track. Repeated points are dropped.
    pub fn waypoints(points: Vec<[S; 2]>, speed: S, t0: S) -> Result<Self> {
        if !(speed > S::zero()) || !speed.is_finite() {
            return Err(invalid("desired trajectory speed must be positive"));
        }
        if points.iter().flatten().any(|v| !v.is_finite()) || !t0.is_finite() {
            return Err(invalid("desired trajectory contains non-finite values"));
        }
        let mut pts: Vec<[S; 2]> = Vec::with_capacity(points.len());
        for p in points {
            let distinct = pts.last().is_none_or(|q| (p[0] - q[0]).hypot(p[1] - q[1]) > lit(1e-9));
            if distinct {
                pts.push(p);
            }
        }
        if pts.len() < 2 {
            return Err(invalid("desired trajectory needs two distinct points"));
        }
        let mut arc = vec![S::zero()];
        let mut heading = Vec::with_capacity(pts.len());
        for w in pts.windows(2) {
            let (dn, de) = (w[1][0] - w[0][0], w[1][1] - w[0][1]);
            arc.push(*arc.last().expect("non-empty") + dn.hypot(de));
            heading.push(de.atan2(dn));
        }
        heading.push(*heading.last().expect("non-empty"));
        Ok(Self {
            t0,
            speed,
            points: pts,
            arc,
            heading,
            straight: false,
        })
    }

    /// Whether this was built by [`DesiredTrajectory::straight`].
    pub fn is_straight(&self) -> bool {
        self.straight
    }

    pub fn speed(&self) -> S {
        self.speed
    }

    pub fn start_time(&self) -> S {
        self.t0
    }

    pub fn points(&self) -> &[[S; 2]] {
        &self.points
    }

    fn leg(&self, s: S) -> usize {
        let last = self.points.len() - 2;
        (0..=last).find(|&i| s < self.arc[i + 1]).unwrap_or(last)
    }

    /// Desired position `p_d(t)`.
    pub fn position(&self, t: S) -> [S; 2] {
        let s = self.speed * (t - self.t0);
        let i = if s < S::zero() { 0 } else { self.leg(s) };
        let h = self.heading[i];
        let ds = s - self.arc[i];
        [self.points[i][0] + ds * h.cos(), self.points[i][1] + ds * h.sin()]
    }

    /// Path angle `χ_path` at time `t`.
    pub fn course(&self, t: S) -> S {
        let s = self.speed * (t - self.t0);
        if s < S::zero() {
            self.heading[0]
        } else {
            self.heading[self.leg(s)]
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LosParams<S> {
    pub lookahead: S,
    pub along_gain: S,
    pub epsilon: S,
    pub max_speed: S,
}

impl<S: Scalar> LosParams<S> {
    pub fn new(lookahead: S, along_gain: S, epsilon: S, max_speed: S) -> Result<Self> {
        if !(lookahead > S::zero()) {
            return Err(invalid("LOS lookahead must be positive"));
        }
        if !(along_gain > S::zero()) {
            return Err(invalid("LOS along-track gain must be positive"));
        }
        if !(epsilon > S::zero() && epsilon < S::one()) {
            return Err(invalid("LOS epsilon must be in (0, 1)"));
        }
        if !(max_speed > S::zero()) {
            return Err(invalid("LOS max speed must be positive"));
        }
        Ok(Self {
            lookahead,
            along_gain,
            epsilon,
            max_speed,
        })
    }

    /// Lookahead 500 m, along-track gain 0.005 1/s, epsilon 0.05, max 18 m/s.
    pub fn standard() -> Self {
        Self::new(lit(500.0), lit(0.005), lit(0.05), lit(18.0)).expect("valid")
    }
}

/// Cross-track (positive to starboard of the path) and along-track
/// (positive ahead of the particle) offsets of `pos` from the path
/// particle at time `t`.
pub fn path_errors<S: Scalar>(traj: &DesiredTrajectory<S>, pos: [S; 2], t: S) -> (S, S) {
    let pd = traj.position(t);
    let (sin, cos) = traj.course(t).sin_cos();
    let (dn, de) = (pos[0] - pd[0], pos[1] - pd[1]);
    (-dn * sin + de * cos, dn * cos + de * sin)
}

/// Desired SOG and course from LOS steering with the path particle pinned
/// to `p_d(t)`.
pub fn los_targets<S: Scalar>(traj: &DesiredTrajectory<S>, pose: &Pose<S>, t: S, p: &LosParams<S>) -> (S, S) {
    let chi_path = traj.course(t);
    let (e, s) = path_errors(traj, pose.position(), t);
    let course = wrap(chi_path + (-e / p.lookahead).atan());
    let c = (pose.course - chi_path).cos();
    let num = traj.speed() - p.along_gain * s;
    let raw = if c.abs() > p.epsilon { num / c } else { num / p.epsilon };
    let sog = raw.max(S::zero()).min(p.max_speed);
    (sog, course)
}

/// Constant accelerations whose maneuvers end exactly at the targets.
pub fn desired_acceleration<S: Scalar>(targets: (S, S), current: (S, S), p: &StepParams<S>) -> Accel2<S> {
    let two = S::one() + S::one();
    Accel2::new(
        (targets.0 - current.0) / (p.sog_len - p.ramp),
        wrap(targets.1 - current.1) / (p.ramp * (p.course_len - two * p.ramp)),
    )
}

/// Everything a guidance hook may inspect at a tree node.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NodeContext<S> {
    pub time: S,
    /// Predicted pose at the node.
    pub pose: Pose<S>,
    /// Predicted SOG at the node.
    pub sog: S,
    /// Desired SOG and course the node's maneuver starts from.
    pub desired_sog: S,
    pub desired_course: S,
    pub params: StepParams<S>,
}

/// Supplies the desired acceleration substituted into a node's samples.
pub trait GuidanceHook<S> {
    fn desired_acceleration(&self, node: &NodeContext<S>) -> Option<Accel2<S>>;
}

/// No substitution.
#[derive(Debug, Clone, Copy, Default)]
pub struct NoGuidance;

impl<S> GuidanceHook<S> for NoGuidance {
    fn desired_acceleration(&self, _: &NodeContext<S>) -> Option<Accel2<S>> {
        None
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LosGuidance<S> {
    pub path: DesiredTrajectory<S>,
    pub params: LosParams<S>,
}

impl<S: Scalar> GuidanceHook<S> for LosGuidance<S> {
    fn desired_acceleration(&self, node: &NodeContext<S>) -> Option<Accel2<S>> {
        let targets = los_targets(&self.path, &node.pose, node.time, &self.params);
        let mut acc = desired_acceleration(targets, (node.desired_sog, node.desired_course), &node.params);
        if node.params.n_sog == 1 {
            acc.sog_acc = S::zero();
        }
        if node.params.n_course == 1 {
            acc.rot_acc = S::zero();
        }
        Some(acc)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::primitives::{course_primitive, cumtrapz, sog_primitive};
    use crate::types::TimeGrid;
    use proptest::prelude::*;
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};

    fn north() -> DesiredTrajectory<f64> {
        DesiredTrajectory::straight([0.0, 0.0], 0.0, 5.0, 0.0).unwrap()
    }

    fn step() -> StepParams<f64> {
        StepParams {
            step: 5.0,
            ramp: 1.0,
            sog_len: 5.0,
            course_len: 5.0,
            n_sog: 5,
            n_course: 5,
        }
    }

    #[test]
    fn straight_line_kinematics() {
        let tr = DesiredTrajectory::straight([10.0, 20.0], FRAC_PI_2, 2.0, 5.0).unwrap();
        let p = tr.position(15.0);
        assert!((p[0] - 10.0).abs() < 1e-9 && (p[1] - 40.0).abs() < 1e-9);
        assert!((tr.course(0.0) - FRAC_PI_2).abs() < 1e-12);
        // extrapolates beyond the constructed segment
        let far = tr.position(5.0 + 2000.0);
        assert!((far[1] - 4020.0).abs() < 1e-6);
    }

    #[test]
    fn waypoint_track_turns() {
        let tr = DesiredTrajectory::waypoints(vec![[0.0, 0.0], [100.0, 0.0], [100.0, 0.0], [100.0, 100.0]], 10.0, 0.0)
            .unwrap();
        assert_eq!(tr.points().len(), 3);
        assert_eq!(tr.course(5.0), 0.0);
        assert!((tr.course(15.0) - FRAC_PI_2).abs() < 1e-12);
        let p = tr.position(15.0);
        assert!((p[0] - 100.0).abs() < 1e-9 && (p[1] - 50.0).abs() < 1e-9);
        assert!(DesiredTrajectory::waypoints(vec![[0.0, 0.0], [0.0, 0.0]], 1.0, 0.0).is_err());
        assert!(DesiredTrajectory::straight([0.0, 0.0], 0.0, 0.0, 0.0).is_err());
    }

    #[test]
    fn on_path_equilibrium() {
        let tr = north();
        let pose = Pose::new(50.0, 0.0, 0.0);
        let (u, chi) = los_targets(&tr, &pose, 10.0, &LosParams::standard());
        assert!((u - 5.0).abs() < 1e-12);
        assert!(chi.abs() < 1e-12);
    }

    #[test]
    fn cross_track_of_one_lookahead() {
        let tr = north();
        let p = LosParams::standard();
        // 500 m to starboard of a northbound path
        let pose = Pose::new(0.0, 500.0, 0.0);
        let (_, chi) = los_targets(&tr, &pose, 0.0, &p);
        assert!((chi + FRAC_PI_4).abs() < 1e-12);
        let pose = Pose::new(0.0, -500.0, 0.0);
        let (_, chi) = los_targets(&tr, &pose, 0.0, &p);
        assert!((chi - FRAC_PI_4).abs() < 1e-12);
    }

    #[test]
    fn ahead_of_particle_slows_down() {
        let tr = north();
        let p = LosParams::standard();
        let (u, _) = los_targets(&tr, &Pose::new(100.0, 0.0, 0.0), 0.0, &p);
        assert!((u - 4.5).abs() < 1e-12);
        let (u, _) = los_targets(&tr, &Pose::new(-100.0, 0.0, 0.0), 0.0, &p);
        assert!((u - 5.5).abs() < 1e-12);
    }

    #[test]
    fn perpendicular_course_uses_guard() {
        let tr = north();
        let p = LosParams::standard();
        let (u, chi) = los_targets(&tr, &Pose::new(0.0, 0.0, FRAC_PI_2), 0.0, &p);
        assert!(u.is_finite() && chi.is_finite());
        assert!((0.0..=p.max_speed).contains(&u));
        assert_eq!(u, p.max_speed);
    }

    #[test]
    fn desired_acceleration_examples() {
        let p = step();
        let a = desired_acceleration((5.0, 0.3), (5.0, 0.3), &p);
        assert_eq!((a.sog_acc, a.rot_acc), (0.0, 0.0));
        let a = desired_acceleration((9.0, 0.15), (5.0, 0.0), &p);
        assert!((a.sog_acc - 1.0).abs() < 1e-15);
        assert!((a.rot_acc - 0.05).abs() < 1e-15);
        // shortest way round
        let a = desired_acceleration((5.0, -3.0), (5.0, 3.0), &p);
        assert!(a.rot_acc > 0.0);
    }

    #[test]
    fn single_channel_hook_returns_zero() {
        let hook = LosGuidance {
            path: north(),
            params: LosParams::standard(),
        };
        let node = NodeContext {
            time: 0.0,
            pose: Pose::new(0.0, 300.0, 0.0),
            sog: 4.0,
            desired_sog: 4.0,
            desired_course: 0.0,
            params: StepParams { n_sog: 1, ..step() },
        };
        let a = hook.desired_acceleration(&node).unwrap();
        assert_eq!(a.sog_acc, 0.0);
        assert!(a.rot_acc < 0.0);
        let node = NodeContext {
            params: StepParams { n_course: 1, ..step() },
            ..node
        };
        let a = hook.desired_acceleration(&node).unwrap();
        assert_eq!(a.rot_acc, 0.0);
        assert!(a.sog_acc > 0.0);
    }

    proptest! {
        #[test]
        fn los_speed_is_saturated(
            n in -2000.0_f64..2000.0,
            e in -2000.0_f64..2000.0,
            chi in -3.2_f64..3.2,
            t in 0.0_f64..500.0,
        ) {
            let p = LosParams::standard();
            let (u, c) = los_targets(&north(), &Pose::new(n, e, chi), t, &p);
            prop_assert!(u >= 0.0 && u <= p.max_speed);
            prop_assert!((-std::f64::consts::PI..std::f64::consts::PI).contains(&c));
        }

        #[test]
        fn primitives_reach_guidance_targets(du in -3.0_f64..3.0, dchi in -1.0_f64..1.0) {
            let p = step();
            let (u0, chi0) = (8.0, 0.4);
            let a = desired_acceleration((u0 + du, chi0 + dchi), (u0, chi0), &p);
            let g = TimeGrid::over(0.0, 5.0, 0.1).unwrap();
            let sog = cumtrapz(u0, &sog_primitive(a.sog_acc, &p, &g), 0.1);
            let rot = cumtrapz(0.0, &course_primitive(a.rot_acc, &p, &g), 0.1);
            let course = cumtrapz(chi0, &rot, 0.1);
            prop_assert!((sog.last().unwrap() - (u0 + du)).abs() < 1e-9);
            prop_assert!((course.last().unwrap() - (chi0 + dchi)).abs() < 1e-9);
        }
    }
}
