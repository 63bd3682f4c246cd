//! One receding-horizon solve: expand the tree, predict obstacles, score
//! every candidate and pick the cheapest.

use crate::error::{invalid, Error, Result};
use crate::guidance::{GuidanceHook, LosGuidance};
use crate::objective::{select, CostBreakdown, ObjectiveWeights, ObstaclePrediction, PenaltyGeometry};
use crate::obstacles::{predict_obstacle, ObstacleEstimate};
use crate::primitives::ErrorModel;
use crate::scalar::{integral_ratio, Scalar};
use crate::tree::{generate_tree, input_blocking_check, CandidateTrajectory, TreeParams};
use crate::types::{TimeGrid, VelocityTrajectory, VesselState};
use crate::vessel::{Force2, VesselModel};

#[derive(Debug, Clone, PartialEq)]
pub struct Planner<S> {
    pub model: VesselModel<S>,
    pub tree: TreeParams<S>,
    pub error_model: ErrorModel<S>,
    pub guidance: LosGuidance<S>,
    pub weights: ObjectiveWeights<S>,
    pub geometry: PenaltyGeometry<S>,
    /// Quadrature step of the cost integrals.
    pub eval_dt: S,
}

/// Result of one solve.
#[derive(Debug, Clone, PartialEq)]
pub struct Plan<S> {
    pub candidates: Vec<CandidateTrajectory<S>>,
    pub costs: Vec<CostBreakdown<S>>,
    /// Index into `candidates`; `None` when the fail-safe was used.
    pub selected: Option<usize>,
    /// Full desired trajectory of the chosen plan.
    pub desired: VelocityTrajectory<S>,
    /// Part of `desired` executed before the next solve.
    pub first: VelocityTrajectory<S>,
}

impl<S: Scalar> Plan<S> {
    pub fn fail_safe(&self) -> bool {
        self.selected.is_none()
    }

    pub fn selected_candidate(&self) -> Option<&CandidateTrajectory<S>> {
        self.selected.map(|i| &self.candidates[i])
    }
}

impl<S: Scalar> Planner<S> {
    pub fn validate(&self) -> Result<()> {
        self.model.validate()?;
        self.tree.validate()?;
        self.weights.validate()?;
        self.geometry.validate()?;
        if integral_ratio(self.eval_dt, self.tree.dt).is_none() {
            return Err(invalid("evaluation dt must be a multiple of the tree dt"));
        }
        if !input_blocking_check(&self.tree, self.eval_dt) {
            return Err(invalid("every step length must be a multiple of the evaluation dt"));
        }
        Ok(())
    }

    /// Evaluation grid over the full horizon starting at `t0`.
    pub fn horizon_grid(&self, t0: S) -> Result<TimeGrid<S>> {
        TimeGrid::over(t0, self.tree.horizon(), self.eval_dt)
    }

    pub fn predict_obstacles(&self, t0: S, estimates: &[ObstacleEstimate<S>]) -> Result<Vec<ObstaclePrediction<S>>> {
        let grid = self.horizon_grid(t0)?;
        Ok(estimates.iter().map(|e| predict_obstacle(e, &grid)).collect())
    }

    /// Solves once from `state`. `desired0` is the commanded desired
    /// (SOG, course) at `state.time`, `previous` the last plan's full
    /// desired trajectory. When no candidate survives, the plan holds
    /// `desired0` over the horizon.
    pub fn solve(
        &self,
        state: &VesselState<S>,
        desired0: (S, S),
        tau0: &Force2<S>,
        previous: &VelocityTrajectory<S>,
        estimates: &[ObstacleEstimate<S>],
    ) -> Result<Plan<S>> {
        let hook: &dyn GuidanceHook<S> = &self.guidance;
        let tree = generate_tree(&self.tree, &self.error_model, &self.model, state, desired0, tau0, hook);
        let candidates = match tree {
            Ok(c) => c,
            Err(Error::AllInfeasible | Error::NoCandidates) => {
                let grid = TimeGrid::over(state.time, self.tree.horizon(), self.tree.dt)?;
                let first = TimeGrid::over(state.time, self.tree.steps[0], self.tree.dt)?;
                return Ok(Plan {
                    candidates: Vec::new(),
                    costs: Vec::new(),
                    selected: None,
                    desired: VelocityTrajectory::constant(grid, desired0.0, desired0.1),
                    first: VelocityTrajectory::constant(first, desired0.0, desired0.1),
                });
            }
            Err(e) => return Err(e),
        };
        let obstacles = self.predict_obstacles(state.time, estimates)?;
        let sel = select(
            &candidates,
            &self.guidance.path,
            &obstacles,
            &self.geometry,
            &self.weights,
            previous,
            self.eval_dt,
        )?;
        let chosen = &candidates[sel.index];
        let desired = chosen.desired.clone();
        let first = chosen.first_maneuver_desired.clone();
        Ok(Plan {
            candidates,
            costs: sel.costs,
            selected: Some(sel.index),
            desired,
            first,
        })
    }
}
