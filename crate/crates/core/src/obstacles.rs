//! Scripted obstacle motion, noisy tracker-like estimates and
//! constant-velocity prediction.

use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{invalid, Result};
use crate::objective::ObstaclePrediction;
use crate::scalar::{lit, Scalar};
use crate::types::{wrap, TimeGrid};

/// Speed and/or course change applied from `time` on.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScriptChange<S> {
    pub time: S,
    pub sog: Option<S>,
    pub course: Option<S>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ObstacleScript<S> {
    pub id: u32,
    pub initial: [S; 2],
    pub sog: S,
    pub course: S,
    /// Sorted by time.
    pub changes: Vec<ScriptChange<S>>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ObstacleState<S> {
    pub position: [S; 2],
    pub sog: S,
    pub course: S,
}

impl<S: Scalar> ObstacleScript<S> {
    pub fn constant(id: u32, initial: [S; 2], sog: S, course: S) -> Self {
        Self {
            id,
            initial,
            sog,
            course,
            changes: Vec::new(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.sog >= S::zero()) || self.changes.iter().any(|c| c.sog.is_some_and(|u| !(u >= S::zero()))) {
            return Err(invalid(format!("obstacle {}: speeds must be non-negative", self.id)));
        }
        if self.changes.windows(2).any(|w| w[1].time < w[0].time) {
            return Err(invalid(format!("obstacle {}: changes must be sorted by time", self.id)));
        }
        if self.initial.iter().any(|v| !v.is_finite()) {
            return Err(invalid(format!("obstacle {}: non-finite position", self.id)));
        }
        Ok(())
    }
}

/// True state at `t`, integrating each constant-velocity leg exactly.
/// Times before 0 extrapolate the initial leg backwards.
pub fn ground_truth<S: Scalar>(script: &ObstacleScript<S>, t: S) -> ObstacleState<S> {
    let mut pos = script.initial;
    let mut sog = script.sog;
    let mut course = script.course;
    let mut t_leg = S::zero().min(t);
    if t < S::zero() {
        pos = [pos[0] + sog * course.cos() * t, pos[1] + sog * course.sin() * t];
    }
    for ch in &script.changes {
        if ch.time > t {
            break;
        }
        let span = ch.time - t_leg;
        if span > S::zero() {
            pos = [pos[0] + sog * course.cos() * span, pos[1] + sog * course.sin() * span];
            t_leg = ch.time;
        }
        sog = ch.sog.unwrap_or(sog);
        course = ch.course.unwrap_or(course);
    }
    let span = t - t_leg;
    if span > S::zero() {
        pos = [pos[0] + sog * course.cos() * span, pos[1] + sog * course.sin() * span];
    }
    ObstacleState {
        position: pos,
        sog,
        course: wrap(course),
    }
}

/// Tracker error model: i.i.d. Gaussian noise per update, a fixed
/// latency and an update period.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EstimateNoise<S> {
    pub position_std: S,
    pub sog_std: S,
    pub course_std: S,
    pub latency: S,
    pub period: S,
}

impl<S: Scalar> EstimateNoise<S> {
    /// Radar-like tracking: 10 m, 0.3 m/s and 15 degree noise, 2.5 s
    /// period and latency.
    pub fn radar() -> Self {
        Self {
            position_std: lit(10.0),
            sog_std: lit(0.3),
            course_std: lit(15.0_f64.to_radians()),
            latency: lit(2.5),
            period: lit(2.5),
        }
    }

    /// Exact AIS reports every 10 s.
    pub fn ais() -> Self {
        Self {
            position_std: S::zero(),
            sog_std: S::zero(),
            course_std: S::zero(),
            latency: S::zero(),
            period: lit(10.0),
        }
    }

    /// Exact estimates at every planner update.
    pub fn none() -> Self {
        Self {
            period: lit(0.5),
            ..Self::ais()
        }
    }

    pub fn preset(name: &str) -> Option<Self> {
        match name {
            "radar" => Some(Self::radar()),
            "ais" => Some(Self::ais()),
            "none" => Some(Self::none()),
            _ => None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let stds = [self.position_std, self.sog_std, self.course_std, self.latency];
        if stds.iter().any(|v| !(*v >= S::zero()) || !v.is_finite()) {
            return Err(invalid("noise standard deviations and latency must be non-negative"));
        }
        if !(self.period > S::zero()) {
            return Err(invalid("estimate update period must be positive"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ObstacleEstimate<S> {
    pub id: u32,
    pub position: [S; 2],
    pub sog: S,
    pub course: S,
    pub timestamp: S,
}

/// Noisy, delayed estimate of the obstacle at time `t`. Always consumes
/// four normal draws so the random stream does not depend on the noise
/// levels.
pub fn observe<S: Scalar, R: Rng + ?Sized>(
    script: &ObstacleScript<S>,
    noise: &EstimateNoise<S>,
    t: S,
    rng: &mut R,
) -> ObstacleEstimate<S> {
    let mut draw = || lit::<S>(rng.sample::<f64, _>(StandardNormal));
    let (nn, ne, nu, nc) = (draw(), draw(), draw(), draw());
    let stamp = t - noise.latency;
    let truth = ground_truth(script, stamp);
    ObstacleEstimate {
        id: script.id,
        position: [
            truth.position[0] + noise.position_std * nn,
            truth.position[1] + noise.position_std * ne,
        ],
        sog: (truth.sog + noise.sog_std * nu).max(S::zero()),
        course: wrap(truth.course + noise.course_std * nc),
        timestamp: stamp,
    }
}

/// Straight-line extrapolation of an estimate over `grid`.
pub fn predict_obstacle<S: Scalar>(est: &ObstacleEstimate<S>, grid: &TimeGrid<S>) -> ObstaclePrediction<S> {
    let (s, c) = est.course.sin_cos();
    let positions = grid
        .times()
        .map(|t| {
            let dt = t - est.timestamp;
            [est.position[0] + est.sog * c * dt, est.position[1] + est.sog * s * dt]
        })
        .collect();
    ObstaclePrediction {
        id: est.id,
        grid: *grid,
        positions,
        course: est.course,
        sog: est.sog,
        weight: S::one(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::FRAC_PI_2;

    fn north() -> ObstacleScript<f64> {
        ObstacleScript::constant(7, [100.0, 200.0], 2.5, 0.0)
    }

    #[test]
    fn constant_velocity_truth() {
        let s = north();
        assert_eq!(ground_truth(&s, 0.0).position, [100.0, 200.0]);
        let p = ground_truth(&s, 60.0).position;
        assert!((p[0] - 250.0).abs() < 1e-12 && (p[1] - 200.0).abs() < 1e-12);
        let p = ground_truth(&s, -2.0).position;
        assert!((p[0] - 95.0).abs() < 1e-12);
    }

    #[test]
    fn scripted_change_keeps_position_continuous() {
        let mut s = north();
        s.changes.push(ScriptChange {
            time: 30.0,
            sog: Some(5.0),
            course: Some(FRAC_PI_2),
        });
        s.validate().unwrap();
        let before = ground_truth(&s, 30.0 - 1e-9).position;
        let after = ground_truth(&s, 30.0 + 1e-9).position;
        assert!((before[0] - after[0]).abs() < 1e-6 && (before[1] - after[1]).abs() < 1e-6);
        let p = ground_truth(&s, 40.0);
        assert!((p.position[0] - 175.0).abs() < 1e-9 && (p.position[1] - 250.0).abs() < 1e-9);
        assert_eq!(p.sog, 5.0);
    }

    #[test]
    fn script_validation() {
        let mut s = north();
        s.sog = -1.0;
        assert!(s.validate().is_err());
        let mut s = north();
        s.changes = vec![
            ScriptChange {
                time: 5.0,
                sog: None,
                course: None,
            },
            ScriptChange {
                time: 1.0,
                sog: None,
                course: None,
            },
        ];
        assert!(s.validate().is_err());
    }

    #[test]
    fn noiseless_observation_is_exact() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let e = observe(&north(), &EstimateNoise::ais(), 20.0, &mut rng);
        assert_eq!(e.position, [150.0, 200.0]);
        assert_eq!((e.sog, e.course, e.timestamp), (2.5, 0.0, 20.0));
    }

    #[test]
    fn latency_shifts_timestamp() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let noise = EstimateNoise {
            latency: 2.0,
            ..EstimateNoise::none()
        };
        let e = observe(&north(), &noise, 20.0, &mut rng);
        assert_eq!(e.timestamp, 18.0);
        assert_eq!(e.position, [145.0, 200.0]);
    }

    #[test]
    fn observation_is_seeded() {
        let n = EstimateNoise::radar();
        let a = observe(&north(), &n, 10.0, &mut ChaCha8Rng::seed_from_u64(42));
        let b = observe(&north(), &n, 10.0, &mut ChaCha8Rng::seed_from_u64(42));
        let c = observe(&north(), &n, 10.0, &mut ChaCha8Rng::seed_from_u64(43));
        assert_eq!(a, b);
        assert_ne!(a, c);
    }

    #[test]
    fn course_noise_tail() {
        let n = EstimateNoise {
            course_std: 10_f64.to_radians(),
            ..EstimateNoise::none()
        };
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let (mut sum, mut sq, mut beyond) = (0.0, 0.0, 0);
        for _ in 0..10_000 {
            let e = observe(&north(), &n, 0.0, &mut rng);
            if e.course.abs() > 40_f64.to_radians() {
                beyond += 1;
            }
            sum += e.course;
            sq += e.course * e.course;
        }
        // P(|z| > 4) is about 6e-5, so a handful at most in 1e4 draws
        assert!(beyond <= 5, "{beyond} draws beyond 4 sigma");
        assert!((sum / 10_000.0).abs() < 0.01);
        let std = (sq / 10_000.0).sqrt().to_degrees();
        assert!((std - 10.0).abs() < 0.3, "std {std}");
    }

    #[test]
    fn prediction_examples() {
        let g = TimeGrid::over(0.0, 55.0, 0.5).unwrap();
        let still = ObstacleEstimate {
            id: 1,
            position: [3.0, 4.0],
            sog: 0.0,
            course: 1.0,
            timestamp: 0.0,
        };
        assert!(predict_obstacle(&still, &g).positions.iter().all(|p| *p == [3.0, 4.0]));
        let east = ObstacleEstimate {
            sog: 2.5,
            course: FRAC_PI_2,
            position: [0.0, 0.0],
            ..still
        };
        let p = predict_obstacle(&east, &g);
        assert!((p.positions.last().unwrap()[1] - 137.5).abs() < 1e-9);
        assert_eq!(p.positions[0], [0.0, 0.0]);
    }

    #[test]
    fn noiseless_prediction_matches_truth() {
        let s = ObstacleScript::constant(2, [500.0, -300.0], 3.0, 2.2);
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let e = observe(&s, &EstimateNoise::ais(), 40.0, &mut rng);
        let g = TimeGrid::<f64>::over(40.0, 55.0, 0.5).unwrap();
        let p = predict_obstacle(&e, &g);
        for (t, q) in g.times().zip(&p.positions) {
            let truth = ground_truth(&s, t).position;
            assert!((truth[0] - q[0]).abs() < 1e-9 && (truth[1] - q[1]).abs() < 1e-9);
        }
    }
}
