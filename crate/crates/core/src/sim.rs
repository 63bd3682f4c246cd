//! Closed-loop scenario engine and run metrics.
//!
//! Clocks: the plant and controller advance every `dt`, obstacle estimates
//! refresh every noise period, and the planner replans every planner
//! period. Only the first maneuver of each selected candidate is executed.

use std::io::Write;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{invalid, Result};
use crate::objective::{region_radius, CostBreakdown, PenaltyGeometry};
use crate::obstacles::{ground_truth, observe, EstimateNoise, ObstacleEstimate, ObstacleScript, ObstacleState};
use crate::planner::{Plan, Planner};
use crate::scalar::{from_usize, integral_ratio, Scalar};
use crate::tree::input_blocking_check;
use crate::types::{wrap, Accel2, Velocity2, VelocityTrajectory, VesselState};
use crate::vessel::{control_law, ControllerGains, Force2, Reference};

#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioConfig<S> {
    pub name: String,
    pub initial: VesselState<S>,
    pub planner: Planner<S>,
    pub gains: ControllerGains<S>,
    pub obstacles: Vec<ObstacleScript<S>>,
    pub noise: EstimateNoise<S>,
    pub planner_period: S,
    pub duration: S,
    /// Plant and controller step; also the tree's integration step.
    pub dt: S,
    pub seed: u64,
}

struct Clocks {
    steps: usize,
    plan_every: usize,
    observe_every: usize,
}

impl<S: Scalar> ScenarioConfig<S> {
    pub fn validate(&self) -> Result<()> {
        self.planner.validate()?;
        self.noise.validate()?;
        for ob in &self.obstacles {
            ob.validate()?;
        }
        self.clocks().map(|_| ())
    }

    fn clocks(&self) -> Result<Clocks> {
        if !(self.dt > S::zero()) {
            return Err(invalid("integration dt must be positive"));
        }
        if !(self.duration > S::zero()) {
            return Err(invalid("duration must be positive"));
        }
        let tol = S::lit(1e-9);
        if (self.planner.tree.dt - self.dt).abs() > tol {
            return Err(invalid("tree dt must equal the integration dt"));
        }
        if (self.planner.tree.steps[0] - self.planner_period).abs() > tol {
            return Err(invalid("first step length must equal the planner period"));
        }
        if !input_blocking_check(&self.planner.tree, self.planner_period) {
            return Err(invalid("step lengths must be multiples of the planner period"));
        }
        let whole = |v: S, what: &str| {
            integral_ratio(v, self.dt)
                .filter(|&k| k >= 1)
                .ok_or_else(|| invalid(format!("{what} must be a multiple of the integration dt")))
        };
        Ok(Clocks {
            steps: whole(self.duration, "duration")?,
            plan_every: whole(self.planner_period, "planner period")?,
            observe_every: whole(self.noise.period, "estimate period")?,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ObstacleLog<S> {
    pub truth: ObstacleState<S>,
    pub estimate: ObstacleEstimate<S>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LogRow<S> {
    pub state: VesselState<S>,
    pub desired_sog: S,
    pub desired_rot: S,
    pub desired_course: S,
    pub tau: Force2<S>,
    pub plan_step: usize,
    pub candidate: Option<usize>,
    pub obstacles: Vec<ObstacleLog<S>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PlannerRecord<S> {
    pub step: usize,
    pub time: S,
    pub n_candidates: usize,
    pub selected: Option<usize>,
    pub indices: Vec<(usize, usize)>,
    pub cost: Option<CostBreakdown<S>>,
    /// Whether the selected first maneuver carried transitional cost.
    pub switched: bool,
    /// Desired SOG and course at the start and end of the executed maneuver.
    pub start: (S, S),
    pub end: (S, S),
    pub sog_change: S,
    pub course_change: S,
}

impl<S> PlannerRecord<S> {
    pub fn fail_safe(&self) -> bool {
        self.selected.is_none()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunLog<S> {
    pub scenario: String,
    pub dt: S,
    pub obstacle_ids: Vec<u32>,
    pub rows: Vec<LogRow<S>>,
    pub planner: Vec<PlannerRecord<S>>,
}

fn f<S: Scalar>(v: S) -> String {
    format!("{}", v.to_f64_lossy())
}

impl<S: Scalar> RunLog<S> {
    pub fn csv_header(&self) -> Vec<String> {
        let mut h: Vec<String> = [
            "time_s",
            "north_m",
            "east_m",
            "course_rad",
            "sog_mps",
            "rot_radps",
            "desired_sog_mps",
            "desired_course_rad",
            "desired_rot_radps",
            "tau_m_norm",
            "tau_delta_norm",
            "plan_step",
            "candidate",
        ]
        .iter()
        .map(|s| s.to_string())
        .collect();
        for id in &self.obstacle_ids {
            for col in [
                "true_north_m",
                "true_east_m",
                "true_course_rad",
                "true_sog_mps",
                "est_north_m",
                "est_east_m",
                "est_course_rad",
                "est_sog_mps",
                "est_time_s",
            ] {
                h.push(format!("obs{id}_{col}"));
            }
        }
        h
    }

    /// One row per integration step.
    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        out.write_record(self.csv_header())?;
        for r in &self.rows {
            let mut rec = vec![
                f(r.state.time),
                f(r.state.pose.north),
                f(r.state.pose.east),
                f(r.state.pose.course),
                f(r.state.vel.sog),
                f(r.state.vel.rot),
                f(r.desired_sog),
                f(wrap(r.desired_course)),
                f(r.desired_rot),
                f(r.tau.m),
                f(r.tau.delta),
                r.plan_step.to_string(),
                r.candidate.map_or_else(|| "failsafe".to_string(), |c| c.to_string()),
            ];
            for o in &r.obstacles {
                rec.extend([
                    f(o.truth.position[0]),
                    f(o.truth.position[1]),
                    f(o.truth.course),
                    f(o.truth.sog),
                    f(o.estimate.position[0]),
                    f(o.estimate.position[1]),
                    f(o.estimate.course),
                    f(o.estimate.sog),
                    f(o.estimate.timestamp),
                ]);
            }
            out.write_record(rec)?;
        }
        out.flush()?;
        Ok(())
    }

    /// One row per planner solve with the selected cost breakdown.
    pub fn write_planner_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        out.write_record([
            "step",
            "time_s",
            "candidates",
            "selected",
            "indices",
            "align",
            "avoid",
            "tran",
            "total",
            "switched",
            "sog_change_mps",
            "course_change_rad",
        ])?;
        for p in &self.planner {
            let idx = p
                .indices
                .iter()
                .map(|(u, c)| format!("{u}:{c}"))
                .collect::<Vec<_>>()
                .join(" ");
            let cost = |g: fn(&CostBreakdown<S>) -> S| p.cost.as_ref().map_or_else(String::new, |c| f(g(c)));
            out.write_record([
                p.step.to_string(),
                f(p.time),
                p.n_candidates.to_string(),
                p.selected.map_or_else(|| "failsafe".to_string(), |c| c.to_string()),
                idx,
                cost(|c| c.align),
                cost(|c| c.avoid),
                cost(|c| c.tran),
                cost(|c| c.total),
                u8::from(p.switched).to_string(),
                f(p.sog_change),
                f(p.course_change),
            ])?;
        }
        out.flush()?;
        Ok(())
    }
}

fn reference_at<S: Scalar>(first: &VelocityTrajectory<S>, j: usize) -> Reference<S> {
    let j = j.min(first.len() - 1);
    Reference {
        vel: Velocity2 {
            sog: first.sog[j],
            rot: first.rot[j],
        },
        course: first.course[j],
        acc: Accel2::new(first.sog_acc[j], first.rot_acc[j]),
    }
}

/// The first planner solve of [`run`], from the initial state and the
/// estimates observed at the initial time.
pub fn solve_snapshot<S: Scalar>(cfg: &ScenarioConfig<S>) -> Result<Plan<S>> {
    cfg.validate()?;
    let planner = &cfg.planner;
    let model = &planner.model;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let state = cfg.initial;
    let t0 = state.time;
    let tau = model.inverse_model(&state.vel).clamp(model.tau_min, model.tau_max);
    let start = (state.vel.sog, state.pose.course);
    let previous = VelocityTrajectory::constant(planner.horizon_grid(t0)?, start.0, start.1);
    let estimates: Vec<_> = cfg
        .obstacles
        .iter()
        .map(|s| observe(s, &cfg.noise, t0, &mut rng))
        .collect();
    planner.solve(&state, start, &tau, &previous, &estimates)
}

/// Runs the closed loop for the configured duration.
pub fn run<S: Scalar>(cfg: &ScenarioConfig<S>) -> Result<RunLog<S>> {
    cfg.validate()?;
    let clocks = cfg.clocks()?;
    let planner = &cfg.planner;
    let model = &planner.model;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut gains = cfg.gains;
    gains.reset();
    let t0 = cfg.initial.time;
    let mut state = cfg.initial;
    let mut tau = model.inverse_model(&state.vel).clamp(model.tau_min, model.tau_max);

    let start = (state.vel.sog, state.pose.course);
    let mut previous = VelocityTrajectory::constant(planner.horizon_grid(t0)?, start.0, start.1);
    let mut first = previous.clone();
    let mut plan_start = 0;
    let mut candidate = None;
    let mut estimates: Vec<ObstacleEstimate<S>> = Vec::with_capacity(cfg.obstacles.len());
    let mut records = Vec::new();
    let mut rows = Vec::with_capacity(clocks.steps + 1);

    for i in 0..=clocks.steps {
        let t = t0 + cfg.dt * from_usize(i);
        state.time = t;
        if i % clocks.observe_every == 0 {
            estimates = cfg
                .obstacles
                .iter()
                .map(|s| observe(s, &cfg.noise, t, &mut rng))
                .collect();
        }
        if i % clocks.plan_every == 0 && i < clocks.steps {
            let desired0 = if records.is_empty() {
                start
            } else {
                let r = reference_at(&first, i - plan_start);
                (r.vel.sog, r.course)
            };
            let plan = planner.solve(&state, desired0, &tau, &previous, &estimates)?;
            let cost = plan.selected.map(|k| plan.costs[k]);
            let (u_end, _, c_end) = plan.first.terminal();
            records.push(PlannerRecord {
                step: records.len(),
                time: t,
                n_candidates: plan.candidates.len(),
                selected: plan.selected,
                indices: plan.selected_candidate().map(|c| c.indices.clone()).unwrap_or_default(),
                cost,
                switched: !records.is_empty() && cost.is_some_and(|c| c.tran > S::zero()),
                start: (plan.first.sog[0], plan.first.course[0]),
                end: (u_end, c_end),
                sog_change: u_end - plan.first.sog[0],
                course_change: c_end - plan.first.course[0],
            });
            candidate = plan.selected;
            previous = plan.desired;
            first = plan.first;
            plan_start = i;
        }
        let reference = reference_at(&first, i - plan_start);
        if i < clocks.steps {
            tau = control_law(model, &mut gains, &state.vel, state.pose.course, &reference, cfg.dt);
        }
        rows.push(LogRow {
            state,
            desired_sog: reference.vel.sog,
            desired_rot: reference.vel.rot,
            desired_course: reference.course,
            tau,
            plan_step: records.len().saturating_sub(1),
            candidate,
            obstacles: cfg
                .obstacles
                .iter()
                .zip(&estimates)
                .map(|(s, e)| ObstacleLog {
                    truth: ground_truth(s, t),
                    estimate: *e,
                })
                .collect(),
        });
        if i < clocks.steps {
            state = model.step_plant(&state, &tau, cfg.dt, &Accel2::zero());
        }
    }
    Ok(RunLog {
        scenario: cfg.name.clone(),
        dt: cfg.dt,
        obstacle_ids: cfg.obstacles.iter().map(|o| o.id).collect(),
        rows,
        planner: records,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Situation {
    HeadOn,
    CrossingGiveWay,
    CrossingStandOn,
    Overtaking,
    Overtaken,
    None,
}

/// Minimum speed for a vessel to count as underway.
pub const UNDERWAY_SOG: f64 = 0.2;
/// Reciprocal-course margin of the head-on rule.
pub const HEAD_ON_MARGIN_DEG: f64 = 6.0;
/// Half-width of the forward sector in which a head-on vessel must lie.
pub const HEAD_ON_SECTOR_DEG: f64 = 15.0;
/// 90 + 22.5: the overtaking sector boundary, measured from the bow.
pub const ABAFT_BEAM_DEG: f64 = 112.5;

/// COLREGs encounter type of `own` with respect to an obstacle.
pub fn classify_situation<S: Scalar>(own: &VesselState<S>, obstacle: &ObstacleState<S>) -> Situation {
    let under = S::lit(UNDERWAY_SOG);
    if own.vel.sog <= under || obstacle.sog <= under {
        return Situation::None;
    }
    let (dn, de) = (
        obstacle.position[0] - own.pose.north,
        obstacle.position[1] - own.pose.east,
    );
    let (vn, ve) = (
        obstacle.sog * obstacle.course.cos() - own.vel.sog * own.pose.course.cos(),
        obstacle.sog * obstacle.course.sin() - own.vel.sog * own.pose.course.sin(),
    );
    if dn * vn + de * ve >= S::zero() {
        return Situation::None;
    }
    let deg = |d: f64| S::lit(d.to_radians());
    let bearing_of_obstacle = wrap(de.atan2(dn) - own.pose.course);
    let bearing_of_own = wrap((-de).atan2(-dn) - obstacle.course);
    let reciprocal = wrap(obstacle.course - own.pose.course - S::PI()).abs();

    if reciprocal <= deg(HEAD_ON_MARGIN_DEG) && bearing_of_obstacle.abs() <= deg(HEAD_ON_SECTOR_DEG) {
        Situation::HeadOn
    } else if bearing_of_own.abs() > deg(ABAFT_BEAM_DEG) && own.vel.sog > obstacle.sog {
        Situation::Overtaking
    } else if bearing_of_obstacle.abs() > deg(ABAFT_BEAM_DEG) && obstacle.sog > own.vel.sog {
        Situation::Overtaken
    } else if bearing_of_obstacle > S::zero() && bearing_of_obstacle <= deg(ABAFT_BEAM_DEG) {
        Situation::CrossingGiveWay
    } else if bearing_of_obstacle < S::zero() && bearing_of_obstacle >= -deg(ABAFT_BEAM_DEG) {
        Situation::CrossingStandOn
    } else {
        Situation::None
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ObstacleMetrics {
    pub id: u32,
    pub situation: Situation,
    pub min_distance: f64,
    pub time_of_min_distance: f64,
    /// Smallest `d − D_0(β)` over the run.
    pub min_clearance: f64,
    pub margin_time: f64,
    pub safety_time: f64,
    pub collision_time: f64,
    /// Side of the obstacle the ownship was on at closest approach.
    pub passing_side: &'static str,
    /// For crossings: whether the ownship crossed the obstacle's track astern.
    pub passed_astern: Option<bool>,
    pub compliant: Option<bool>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Metrics {
    pub scenario: String,
    pub duration: f64,
    pub obstacles: Vec<ObstacleMetrics>,
    pub planner_steps: usize,
    pub fail_safe_steps: usize,
    /// Planner steps (after the first) whose selection carried transitional cost.
    pub switch_count: usize,
    /// Largest merged course maneuver, radians.
    pub max_course_change: f64,
    /// Largest merged SOG maneuver, m/s.
    pub max_sog_change: f64,
    pub rule8_observable: bool,
    pub colregs_compliant: bool,
}

/// Course change beyond which a maneuver is readily observable.
pub const OBSERVABLE_COURSE_DEG: f64 = 15.0;
/// SOG change beyond which a maneuver is readily observable.
pub const OBSERVABLE_SOG: f64 = 1.0;
/// Course alteration that counts as a stand-on vessel's avoiding action.
pub const STAND_ON_PORT_DEG: f64 = 15.0;

/// Sums runs of same-signed per-step changes and returns the largest
/// magnitude.
fn largest_maneuver(changes: impl Iterator<Item = f64>) -> f64 {
    let mut best = 0.0_f64;
    let mut run = 0.0_f64;
    for c in changes {
        if c == 0.0 || (run != 0.0 && c.signum() != run.signum()) {
            best = best.max(run.abs());
            run = 0.0;
        }
        run += c;
    }
    best.max(run.abs())
}

/// Body-frame (forward, starboard) coordinates of `own` relative to the
/// obstacle.
fn body_frame(own: [f64; 2], ob: &ObstacleState<f64>) -> (f64, f64) {
    let (dn, de) = (own[0] - ob.position[0], own[1] - ob.position[1]);
    let (s, c) = ob.course.sin_cos();
    (dn * c + de * s, -dn * s + de * c)
}

pub fn compute_metrics<S: Scalar>(log: &RunLog<S>, geom: &PenaltyGeometry<S>) -> Metrics {
    let dt = log.dt.to_f64_lossy();
    let truth = |r: &LogRow<S>, k: usize| {
        let o = &r.obstacles[k].truth;
        ObstacleState {
            position: [o.position[0].to_f64_lossy(), o.position[1].to_f64_lossy()],
            sog: o.sog.to_f64_lossy(),
            course: o.course.to_f64_lossy(),
        }
    };
    let own_pos = |r: &LogRow<S>| [r.state.pose.north.to_f64_lossy(), r.state.pose.east.to_f64_lossy()];

    let mut obstacles = Vec::new();
    for (k, &id) in log.obstacle_ids.iter().enumerate() {
        let mut min_d = f64::INFINITY;
        let mut t_min = 0.0;
        let mut i_min = 0;
        let mut clearance = f64::INFINITY;
        let mut times = [0.0; 3];
        let mut situation = Situation::None;
        for (i, r) in log.rows.iter().enumerate() {
            let ob = truth(r, k);
            let own = own_pos(r);
            let (x, y) = body_frame(own, &ob);
            let d = x.hypot(y);
            let beta = S::lit(y.atan2(x));
            let radii = [0, 1, 2].map(|j| region_radius(geom, j, beta).to_f64_lossy());
            if d < min_d {
                min_d = d;
                t_min = r.state.time.to_f64_lossy();
                i_min = i;
            }
            clearance = clearance.min(d - radii[0]);
            for j in 0..3 {
                if d < radii[j] {
                    times[j] += dt;
                }
            }
            if situation == Situation::None {
                situation = classify_situation(&r.state, &r.obstacles[k].truth);
            }
        }
        let (x_cpa, y_cpa) = log
            .rows
            .get(i_min)
            .map_or((0.0, 0.0), |r| body_frame(own_pos(r), &truth(r, k)));
        let passing_side = if y_cpa < 0.0 { "port" } else { "starboard" };

        let passed_astern = matches!(situation, Situation::CrossingGiveWay).then(|| {
            let lateral: Vec<(f64, f64)> = log.rows.iter().map(|r| body_frame(own_pos(r), &truth(r, k))).collect();
            lateral
                .windows(2)
                .find(|w| w[0].1.signum() != w[1].1.signum() && w[0].1 != 0.0)
                .map_or(x_cpa < 0.0, |w| w[1].0 < 0.0)
        });

        let compliant = match situation {
            Situation::HeadOn | Situation::Overtaking => Some(y_cpa < 0.0),
            Situation::CrossingGiveWay => passed_astern,
            Situation::CrossingStandOn | Situation::Overtaken => {
                // the first alteration beyond the threshold must not be to port
                let c0 = log.rows.first().map_or(0.0, |r| r.state.pose.course.to_f64_lossy());
                let limit = STAND_ON_PORT_DEG.to_radians();
                let first = log
                    .rows
                    .iter()
                    .map(|r| wrap(r.state.pose.course.to_f64_lossy() - c0))
                    .find(|a| a.abs() > limit);
                Some(first.is_none_or(|a| a > 0.0))
            }
            Situation::None => None,
        };
        obstacles.push(ObstacleMetrics {
            id,
            situation,
            min_distance: min_d,
            time_of_min_distance: t_min,
            min_clearance: clearance,
            margin_time: times[2],
            safety_time: times[1],
            collision_time: times[0],
            passing_side,
            passed_astern,
            compliant,
        });
    }

    let executed = || log.planner.iter().filter(|p| !p.fail_safe());
    let max_course = largest_maneuver(executed().map(|p| p.course_change.to_f64_lossy()));
    let max_sog = largest_maneuver(executed().map(|p| p.sog_change.to_f64_lossy()));
    let maneuvered = max_course > 1e-3 || max_sog > 1e-3;
    let rule8 = !maneuvered || max_course > OBSERVABLE_COURSE_DEG.to_radians() || max_sog > OBSERVABLE_SOG;
    let colregs_compliant = obstacles.iter().all(|o| o.compliant != Some(false));
    Metrics {
        scenario: log.scenario.clone(),
        duration: log
            .rows
            .last()
            .zip(log.rows.first())
            .map_or(0.0, |(b, a)| (b.state.time - a.state.time).to_f64_lossy()),
        obstacles,
        planner_steps: log.planner.len(),
        fail_safe_steps: log.planner.iter().filter(|p| p.fail_safe()).count(),
        switch_count: log.planner.iter().filter(|p| p.switched).count(),
        max_course_change: max_course,
        max_sog_change: max_sog,
        rule8_observable: rule8,
        colregs_compliant,
    }
}

impl Metrics {
    /// Plain-text table, one line per obstacle.
    pub fn summary(&self) -> String {
        let mut s = format!("scenario: {}\n", self.scenario);
        s.push_str(&format!(
            "planner steps: {} (fail-safe {}), maneuver switches: {}\n",
            self.planner_steps, self.fail_safe_steps, self.switch_count
        ));
        s.push_str(&format!(
            "largest maneuver: {:.1} deg course, {:.2} m/s SOG, observable: {}\n",
            self.max_course_change.to_degrees(),
            self.max_sog_change,
            yes_no(self.rule8_observable)
        ));
        s.push_str("obstacle  situation           min dist [m]  clearance [m]  collision [s]  side       compliant\n");
        for o in &self.obstacles {
            let sit = serde_json::to_value(o.situation)
                .ok()
                .and_then(|v| v.as_str().map(str::to_string))
                .unwrap_or_default();
            s.push_str(&format!(
                "{:<8}  {:<18}  {:>12.1}  {:>13.1}  {:>13.1}  {:<9}  {}\n",
                o.id,
                sit,
                o.min_distance,
                o.min_clearance,
                o.collision_time,
                o.passing_side,
                o.compliant.map_or("n/a", yes_no)
            ));
        }
        s.push_str(&format!("COLREGs compliant: {}\n", yes_no(self.colregs_compliant)));
        s
    }
}

fn yes_no(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "no"
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::types::Pose;
    use std::f64::consts::{FRAC_PI_2, PI};

    fn own(course: f64, sog: f64) -> VesselState<f64> {
        VesselState::new(Pose::new(0.0, 0.0, course), Velocity2::new(sog, 0.0), 0.0)
    }

    fn ob(n: f64, e: f64, course: f64, sog: f64) -> ObstacleState<f64> {
        ObstacleState {
            position: [n, e],
            sog,
            course,
        }
    }

    #[test]
    fn classification_examples() {
        let s = own(0.0, 5.0);
        assert_eq!(classify_situation(&s, &ob(1000.0, 0.0, PI, 2.5)), Situation::HeadOn);
        assert_eq!(classify_situation(&s, &ob(0.0, 500.0, FRAC_PI_2, 5.0)), Situation::None);
        assert_eq!(
            classify_situation(&s, &ob(500.0, 500.0, -FRAC_PI_2, 5.0)),
            Situation::CrossingGiveWay
        );
        assert_eq!(
            classify_situation(&s, &ob(500.0, -500.0, FRAC_PI_2, 5.0)),
            Situation::CrossingStandOn
        );
        assert_eq!(classify_situation(&s, &ob(500.0, 0.0, 0.0, 2.5)), Situation::Overtaking);
        assert_eq!(classify_situation(&s, &ob(-500.0, 0.0, 0.0, 8.0)), Situation::Overtaken);
        // diverging or stopped
        assert_eq!(classify_situation(&s, &ob(-500.0, 0.0, PI, 2.5)), Situation::None);
        assert_eq!(classify_situation(&s, &ob(500.0, 0.0, PI, 0.0)), Situation::None);
    }

    #[test]
    fn largest_maneuver_merges_same_sign_steps() {
        assert_eq!(largest_maneuver([0.1, 0.1, 0.0, -0.05].into_iter()), 0.2);
        assert_eq!(largest_maneuver([0.1, -0.3, -0.1].into_iter()), 0.4);
        assert_eq!(largest_maneuver(std::iter::empty()), 0.0);
    }
}
