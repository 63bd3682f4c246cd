//! Multi-level trajectory tree.
//!
//! Each node expands into one single-step maneuver set; levels are chained
//! breadth-first and every root-to-leaf path becomes one candidate.

use crate::error::{invalid, Error, Result};
use crate::guidance::{GuidanceHook, NodeContext};
use crate::primitives::{
    integrate_primitives, possible_accelerations, predict, rollout_position, sample_accelerations, DesiredStart,
    ErrorModel, StepParams,
};
use crate::scalar::{integral_ratio, lit, Scalar};
use crate::types::{Accel2, Pose, PoseTrajectory, TimeGrid, Velocity2, VelocityTrajectory, VesselState};
use crate::vessel::{Force2, VesselModel};

#[derive(Debug, Clone, PartialEq)]
pub struct TreeParams<S> {
    /// Step length per level.
    pub steps: Vec<S>,
    pub n_sog: Vec<usize>,
    pub n_course: Vec<usize>,
    pub ramp: S,
    pub sog_len: S,
    pub course_len: S,
    /// Integration step of the desired and predicted channels.
    pub dt: S,
}

impl<S: Scalar> TreeParams<S> {
    /// Three levels of 5, 20 and 30 s with 5x5, 1x3 and 1x3 maneuvers.
    pub fn standard() -> Self {
        Self {
            steps: vec![lit(5.0), lit(20.0), lit(30.0)],
            n_sog: vec![5, 1, 1],
            n_course: vec![5, 3, 3],
            ramp: S::one(),
            sog_len: lit(5.0),
            course_len: lit(5.0),
            dt: lit(0.1),
        }
    }

    pub fn depth(&self) -> usize {
        self.steps.len()
    }

    pub fn level(&self, l: usize) -> StepParams<S> {
        StepParams {
            step: self.steps[l],
            ramp: self.ramp,
            sog_len: self.sog_len,
            course_len: self.course_len,
            n_sog: self.n_sog[l],
            n_course: self.n_course[l],
        }
    }

    /// Total candidate span.
    pub fn horizon(&self) -> S {
        self.steps.iter().fold(S::zero(), |a, &b| a + b)
    }

    /// Upper bound on the number of leaves.
    pub fn max_leaves(&self) -> usize {
        self.n_sog.iter().zip(&self.n_course).map(|(a, b)| a * b).product()
    }

    pub fn validate(&self) -> Result<()> {
        if self.steps.is_empty() {
            return Err(invalid("tree needs at least one level"));
        }
        if self.n_sog.len() != self.depth() || self.n_course.len() != self.depth() {
            return Err(invalid("step, SOG and course sample lists must have equal length"));
        }
        if !(self.dt > S::zero()) {
            return Err(invalid("tree dt must be positive"));
        }
        for l in 0..self.depth() {
            self.level(l).validate(self.dt)?;
        }
        Ok(())
    }
}

/// True iff every step length is a whole multiple of `period`.
pub fn input_blocking_check<S: Scalar>(params: &TreeParams<S>, period: S) -> bool {
    period > S::zero()
        && params
            .steps
            .iter()
            .all(|&t| integral_ratio(t, period).is_some_and(|k| k >= 1))
}

/// One root-to-leaf path.
#[derive(Debug, Clone, PartialEq)]
pub struct CandidateTrajectory<S> {
    /// `(sog_index, course_index)` chosen at each level.
    pub indices: Vec<(usize, usize)>,
    /// Sampled maneuver accelerations at each level.
    pub accelerations: Vec<Accel2<S>>,
    /// Whether every level took the guidance-substituted sample.
    pub guidance_seeded: bool,
    pub desired: VelocityTrajectory<S>,
    pub predicted_sog: Vec<S>,
    /// Predicted course, unwrapped.
    pub predicted_course: Vec<S>,
    pub predicted_pose: PoseTrajectory<S>,
    pub first_maneuver_desired: VelocityTrajectory<S>,
}

#[derive(Clone)]
struct Node<S> {
    t0: S,
    start: DesiredStart<S>,
    pred_sog: S,
    pred_course: S,
    position: [S; 2],
    vel: Velocity2<S>,
    tau: Force2<S>,
    indices: Vec<(usize, usize)>,
    accels: Vec<Accel2<S>>,
    seeded: bool,
    sog: Vec<S>,
    rot: Vec<S>,
    course: Vec<S>,
    sog_acc: Vec<S>,
    rot_acc: Vec<S>,
    p_sog: Vec<S>,
    p_course: Vec<S>,
    poses: Vec<Pose<S>>,
    first: Option<VelocityTrajectory<S>>,
}

fn extend<S: Copy>(dst: &mut Vec<S>, src: &[S]) {
    let skip = usize::from(!dst.is_empty());
    dst.extend_from_slice(&src[skip..]);
}

/// Expands the tree breadth-first from the current state.
///
/// `desired0` is the desired (SOG, course) the previous plan ends its first
/// step with; `tau0` is the current actuator input. Candidates are ordered
/// lexicographically by their per-level sample indices.
#[allow(clippy::too_many_arguments)]
pub fn generate_tree<S: Scalar>(
    params: &TreeParams<S>,
    error_model: &ErrorModel<S>,
    model: &VesselModel<S>,
    state: &VesselState<S>,
    desired0: (S, S),
    tau0: &Force2<S>,
    hook: &dyn GuidanceHook<S>,
) -> Result<Vec<CandidateTrajectory<S>>> {
    params.validate()?;
    let root = Node {
        t0: state.time,
        start: DesiredStart {
            sog: desired0.0,
            rot: S::zero(),
            course: desired0.1,
        },
        pred_sog: state.vel.sog,
        pred_course: state.pose.course,
        position: state.pose.position(),
        vel: state.vel,
        tau: *tau0,
        indices: Vec::new(),
        accels: Vec::new(),
        seeded: true,
        sog: Vec::new(),
        rot: Vec::new(),
        course: Vec::new(),
        sog_acc: Vec::new(),
        rot_acc: Vec::new(),
        p_sog: Vec::new(),
        p_course: Vec::new(),
        poses: Vec::new(),
        first: None,
    };
    let mut frontier = vec![root];
    for l in 0..params.depth() {
        let p = params.level(l);
        let mut next = Vec::new();
        for node in &frontier {
            let grid = TimeGrid::over(node.t0, p.step, params.dt)?;
            let bx = possible_accelerations(model, &node.vel, &node.tau, p.ramp);
            let ctx = NodeContext {
                time: node.t0,
                pose: Pose::new(node.position[0], node.position[1], node.pred_course),
                sog: node.pred_sog,
                desired_sog: node.start.sog,
                desired_course: node.start.course,
                params: p,
            };
            let wanted = hook.desired_acceleration(&ctx);
            let (mut us, mut rs) = sample_accelerations(&bx, p.n_sog, p.n_course, wanted);
            if p.n_sog == 1 {
                us = vec![S::zero()];
            }
            if p.n_course == 1 {
                rs = vec![S::zero()];
            }
            let seed_u = wanted.and_then(|w| us.iter().position(|&v| v == w.sog_acc));
            let seed_r = wanted.and_then(|w| rs.iter().position(|&v| v == w.rot_acc));

            let maneuvers = match integrate_primitives(&us, &rs, &node.start, &p, &grid, model) {
                Ok(m) => m,
                Err(Error::AllInfeasible) if l > 0 => continue,
                Err(e) => return Err(e),
            };
            for m in maneuvers {
                let pred = predict(&m.desired, error_model, node.pred_sog, node.pred_course);
                let poses = rollout_position(&pred.sog, &pred.course, &grid, node.position)?;
                let (u_end, _, chi_end) = m.desired.terminal();
                let p_sog_end = *pred.sog.last().expect("non-empty");
                let p_course_end = *pred.course.last().expect("non-empty");
                let vel = Velocity2::new(p_sog_end, S::zero());

                let mut child = node.clone();
                child.t0 = grid.end();
                child.start = DesiredStart {
                    sog: u_end,
                    rot: S::zero(),
                    course: chi_end,
                };
                child.pred_sog = p_sog_end;
                child.pred_course = p_course_end;
                child.position = poses.last().position();
                child.vel = vel;
                child.tau = model.inverse_model(&vel).clamp(model.tau_min, model.tau_max);
                child.indices.push((m.sog_index, m.course_index));
                child.accels.push(Accel2::new(m.sog_accel, m.rot_accel));
                child.seeded = node.seeded && seed_u == Some(m.sog_index) && seed_r == Some(m.course_index);
                extend(&mut child.sog, &m.desired.sog);
                extend(&mut child.rot, &m.desired.rot);
                extend(&mut child.course, &m.desired.course);
                extend(&mut child.sog_acc, &m.desired.sog_acc);
                extend(&mut child.rot_acc, &m.desired.rot_acc);
                extend(&mut child.p_sog, &pred.sog);
                extend(&mut child.p_course, &pred.course);
                extend(&mut child.poses, &poses.poses);
                if l == 0 {
                    child.first = Some(m.desired);
                }
                next.push(child);
            }
        }
        frontier = next;
    }
    if frontier.is_empty() {
        return Err(Error::NoCandidates);
    }

    frontier
        .into_iter()
        .map(|n| {
            let grid = TimeGrid::new(state.time, params.dt, n.sog.len())?;
            Ok(CandidateTrajectory {
                indices: n.indices,
                accelerations: n.accels,
                guidance_seeded: n.seeded,
                desired: VelocityTrajectory::new(grid, n.sog, n.rot, n.course, n.sog_acc, n.rot_acc)?,
                predicted_sog: n.p_sog,
                predicted_course: n.p_course,
                predicted_pose: PoseTrajectory::new(grid, n.poses)?,
                first_maneuver_desired: n.first.expect("depth >= 1"),
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::guidance::{DesiredTrajectory, LosGuidance, LosParams, NoGuidance};
    use proptest::prelude::*;

    fn cruise() -> (VesselModel<f64>, VesselState<f64>, Force2<f64>) {
        let m = VesselModel::calibrated();
        let vel = Velocity2::new(5.0, 0.0);
        let s = VesselState::new(Pose::new(0.0, 0.0, 0.0), vel, 0.0);
        let tau = m.inverse_model(&vel);
        (m, s, tau)
    }

    fn em() -> ErrorModel<f64> {
        ErrorModel::new(5.0, 5.0).unwrap()
    }

    fn gen(params: &TreeParams<f64>, hook: &dyn GuidanceHook<f64>) -> Vec<CandidateTrajectory<f64>> {
        let (m, s, tau) = cruise();
        generate_tree(params, &em(), &m, &s, (5.0, 0.0), &tau, hook).unwrap()
    }

    #[test]
    fn input_blocking_examples() {
        let mut p = TreeParams::<f64>::standard();
        assert!(input_blocking_check(&p, 5.0));
        p.steps = vec![5.0, 12.0, 30.0];
        assert!(!input_blocking_check(&p, 5.0));
        p.steps = vec![5.0];
        assert!(input_blocking_check(&p, 5.0));
    }

    #[test]
    fn validation_rejects_mismatched_levels() {
        let mut p = TreeParams::<f64>::standard();
        p.validate().unwrap();
        p.n_sog.pop();
        assert!(p.validate().is_err());
    }

    #[test]
    fn degenerate_tree_continues_current_velocity() {
        let p = TreeParams {
            steps: vec![5.0],
            n_sog: vec![1],
            n_course: vec![1],
            ..TreeParams::standard()
        };
        let c = gen(&p, &NoGuidance);
        assert_eq!(c.len(), 1);
        assert!(c[0].desired.sog.iter().all(|&u| u == 5.0));
        assert!(c[0].desired.course.iter().all(|&x| x == 0.0));
        assert!((c[0].predicted_pose.last().north - 25.0).abs() < 1e-9);
    }

    #[test]
    fn standard_tree_size_and_span() {
        let p = TreeParams::standard();
        let c = gen(&p, &NoGuidance);
        assert!(c.len() <= 225);
        assert!(c.len() >= 100);
        for cand in &c {
            assert!((cand.desired.grid.duration() - 55.0).abs() < 1e-9);
            assert_eq!(cand.predicted_pose.poses.len(), cand.desired.len());
        }
        let p = TreeParams {
            steps: vec![5.0, 10.0, 10.0],
            ..TreeParams::standard()
        };
        let c = gen(&p, &NoGuidance);
        assert!((c[0].desired.grid.duration() - 25.0).abs() < 1e-9);
    }

    #[test]
    fn channels_are_continuous_across_levels() {
        let c = gen(&TreeParams::standard(), &NoGuidance);
        for cand in &c {
            for idx in [50, 250] {
                // desired rate is zero at every level boundary
                assert!(cand.desired.rot[idx].abs() < 1e-9);
            }
            let du = cand
                .desired
                .sog
                .windows(2)
                .map(|w| (w[1] - w[0]).abs())
                .fold(0.0, f64::max);
            assert!(du < 0.1 * 1.0 + 1e-9);
        }
    }

    #[test]
    fn first_step_holds_one_maneuver() {
        let c = gen(&TreeParams::standard(), &NoGuidance);
        for cand in &c {
            let f = &cand.first_maneuver_desired;
            assert_eq!(f.len(), 51);
            assert_eq!(&cand.desired.course[..51], &f.course[..]);
            assert_eq!(&cand.desired.sog[..51], &f.sog[..]);
        }
    }

    #[test]
    fn lexicographic_and_deterministic() {
        let a = gen(&TreeParams::standard(), &NoGuidance);
        let b = gen(&TreeParams::standard(), &NoGuidance);
        assert_eq!(a, b);
        for w in a.windows(2) {
            assert!(w[0].indices < w[1].indices);
        }
    }

    #[test]
    fn guidance_seeded_path_reaches_targets() {
        let hook = LosGuidance {
            path: DesiredTrajectory::straight([0.0, -100.0], 0.0, 6.0, 0.0).unwrap(),
            params: LosParams::standard(),
        };
        let c = gen(&TreeParams::standard(), &hook);
        assert!(c.iter().filter(|c| c.guidance_seeded).count() <= 1);
        let (_, s, _) = cruise();
        let (u, chi) = crate::guidance::los_targets(&hook.path, &s.pose, 0.0, &hook.params);
        let want = crate::guidance::desired_acceleration((u, chi), (5.0, 0.0), &TreeParams::standard().level(0));
        let hit = c
            .iter()
            .find(|c| c.accelerations[0] == want)
            .expect("substituted sample present");
        let (ue, _, ce) = hit.first_maneuver_desired.terminal();
        assert!((ue - u).abs() < 1e-9);
        assert!((ce - chi).abs() < 1e-9);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]
        #[test]
        fn leaf_count_bounded(nu0 in 1usize..4, nc0 in 1usize..4, nc1 in 1usize..4, u in 2.0_f64..16.0) {
            let p = TreeParams {
                steps: vec![5.0, 10.0],
                n_sog: vec![nu0, 1],
                n_course: vec![nc0, nc1],
                ..TreeParams::standard()
            };
            let m = VesselModel::calibrated();
            let vel = Velocity2::new(u, 0.0);
            let s = VesselState::new(Pose::new(0.0, 0.0, 0.3), vel, 10.0);
            let tau = m.inverse_model(&vel);
            let c = generate_tree(&p, &em(), &m, &s, (u, 0.3), &tau, &NoGuidance).unwrap();
            prop_assert!(c.len() <= p.max_leaves());
            for cand in &c {
                prop_assert_eq!(cand.desired.grid.t0(), 10.0);
                prop_assert!((cand.desired.course[0] - 0.3).abs() < 1e-12);
            }
        }
    }
}
