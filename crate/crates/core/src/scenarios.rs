//! The four encounter geometries: ownship northbound at 5 m/s from the
//! origin, obstacle at 2.5 m/s starting 1000 m away.

use crate::error::{invalid, Result};
use crate::guidance::{DesiredTrajectory, LosGuidance, LosParams};
use crate::objective::{ObjectiveWeights, PenaltyGeometry};
use crate::obstacles::{EstimateNoise, ObstacleScript};
use crate::planner::Planner;
use crate::primitives::ErrorModel;
use crate::scalar::{lit, Scalar};
use crate::sim::ScenarioConfig;
use crate::tree::TreeParams;
use crate::types::{Pose, Velocity2, VesselState};
use crate::vessel::{ControllerGains, VesselModel};

pub const NAMES: [&str; 4] = ["head-on", "crossing-starboard", "overtaking", "crossing-port"];

pub const OWN_SOG: f64 = 5.0;
pub const OBSTACLE_SOG: f64 = 2.5;
pub const SEPARATION: f64 = 1000.0;

/// Scenario with no obstacles; shared defaults for all library entries.
pub fn open_water<S: Scalar>() -> ScenarioConfig<S> {
    let u = lit::<S>(OWN_SOG);
    let model = VesselModel::calibrated();
    ScenarioConfig {
        name: "open-water".into(),
        initial: VesselState::new(
            Pose::new(S::zero(), S::zero(), S::zero()),
            Velocity2::new(u, S::zero()),
            S::zero(),
        ),
        planner: Planner {
            model,
            tree: TreeParams::standard(),
            error_model: ErrorModel::new(lit(5.0), lit(5.0)).expect("valid"),
            guidance: LosGuidance {
                path: DesiredTrajectory::straight([S::zero(), S::zero()], S::zero(), u, S::zero()).expect("valid"),
                params: LosParams::standard(),
            },
            weights: ObjectiveWeights::standard(),
            geometry: PenaltyGeometry::standard_elliptical(),
            eval_dt: lit(0.5),
        },
        gains: ControllerGains::calibrated(),
        obstacles: Vec::new(),
        noise: EstimateNoise::none(),
        planner_period: lit(5.0),
        duration: lit(300.0),
        dt: lit(0.1),
        seed: 0,
    }
}

fn with_obstacle<S: Scalar>(name: &str, initial: [f64; 2], course: f64, duration: f64) -> ScenarioConfig<S> {
    let mut cfg = open_water();
    cfg.name = name.into();
    cfg.duration = lit(duration);
    cfg.obstacles.push(ObstacleScript::constant(
        1,
        [lit(initial[0]), lit(initial[1])],
        lit(OBSTACLE_SOG),
        lit(course),
    ));
    cfg
}

/// Reciprocal courses, obstacle dead ahead.
pub fn head_on<S: Scalar>() -> ScenarioConfig<S> {
    with_obstacle("head-on", [SEPARATION, 0.0], std::f64::consts::PI, 300.0)
}

// Both vessels reach the collision point at the same time when the
// ownship's leg is twice the obstacle's: legs 2L and L with
// (2L)^2 + L^2 = SEPARATION^2.
fn crossing_legs() -> (f64, f64) {
    let l = SEPARATION / 5.0_f64.sqrt();
    (2.0 * l, l)
}

/// Obstacle crossing from starboard: the ownship gives way.
pub fn crossing_starboard<S: Scalar>() -> ScenarioConfig<S> {
    let (own, obs) = crossing_legs();
    with_obstacle("crossing-starboard", [own, obs], -std::f64::consts::FRAC_PI_2, 300.0)
}

/// Obstacle crossing from port: the ownship stands on.
pub fn crossing_port<S: Scalar>() -> ScenarioConfig<S> {
    let (own, obs) = crossing_legs();
    with_obstacle("crossing-port", [own, -obs], std::f64::consts::FRAC_PI_2, 300.0)
}

/// Slower obstacle dead ahead on the same course.
pub fn overtaking<S: Scalar>() -> ScenarioConfig<S> {
    with_obstacle("overtaking", [SEPARATION, 0.0], 0.0, 600.0)
}

pub fn by_name<S: Scalar>(name: &str) -> Result<ScenarioConfig<S>> {
    match name {
        "head-on" => Ok(head_on()),
        "crossing-starboard" => Ok(crossing_starboard()),
        "overtaking" => Ok(overtaking()),
        "crossing-port" => Ok(crossing_port()),
        "open-water" => Ok(open_water()),
        _ => Err(invalid(format!(
            "unknown scenario '{name}', expected one of {} or open-water",
            NAMES.join(", ")
        ))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn library_is_valid() {
        for n in NAMES {
            let c = by_name::<f64>(n).unwrap();
            c.validate().unwrap();
            let o = &c.obstacles[0];
            let d = o.initial[0].hypot(o.initial[1]);
            assert!((d - SEPARATION).abs() < 1e-9, "{n}");
        }
        assert!(by_name::<f64>("nope").is_err());
    }

    #[test]
    fn crossing_reaches_collision_point_together() {
        let c = crossing_starboard::<f64>();
        let o = &c.obstacles[0];
        let t_own = o.initial[0] / OWN_SOG;
        let t_obs = o.initial[1] / OBSTACLE_SOG;
        assert!((t_own - t_obs).abs() < 1e-9);
    }
}
