//! JSON scenario files.
//!
//! Every field is required and unknown keys are rejected, so a typo never
//! silently falls back to a default. Angles are radians, times seconds,
//! distances meters.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::guidance::{DesiredTrajectory, LosGuidance, LosParams};
use crate::objective::{ObjectiveWeights, PenaltyGeometry};
use crate::obstacles::{EstimateNoise, ObstacleScript, ScriptChange};
use crate::planner::Planner;
use crate::primitives::ErrorModel;
use crate::scalar::{lit, Scalar};
use crate::sim::ScenarioConfig;
use crate::tree::TreeParams;
use crate::types::{Pose, Velocity2, VesselState};
use crate::vessel::{ControllerGains, Force2, VesselModel};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioFile {
    pub schema_version: u32,
    pub name: String,
    pub ownship: OwnshipFile,
    pub vessel: VesselFile,
    pub controller: ControllerFile,
    pub tree: TreeFile,
    pub error_model: ErrorModelFile,
    pub los: LosFile,
    pub weights: WeightsFile,
    pub geometry: GeometryFile,
    pub desired: DesiredFile,
    pub obstacles: Vec<ObstacleFile>,
    pub noise: NoiseFile,
    pub planner_period_s: f64,
    pub duration_s: f64,
    pub integration_dt_s: f64,
    pub evaluation_dt_s: f64,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OwnshipFile {
    pub north_m: f64,
    pub east_m: f64,
    pub course_rad: f64,
    pub sog_mps: f64,
    pub rot_radps: f64,
    pub time_s: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VesselFile {
    pub m_u0: f64,
    pub m_u1: f64,
    pub m_r0: f64,
    pub m_r1: f64,
    pub d_u1: f64,
    pub d_u2: f64,
    pub d_r1: f64,
    pub d_r2: f64,
    pub d_ru: f64,
    /// `[throttle, rudder]`
    pub tau_min: [f64; 2],
    pub tau_max: [f64; 2],
    pub tau_rate_min: [f64; 2],
    pub tau_rate_max: [f64; 2],
    pub u_max_mps: f64,
    pub u_min_mps: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ControllerFile {
    pub kp: [[f64; 3]; 2],
    pub ki: [f64; 2],
    pub integral_limit: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TreeFile {
    pub steps_s: Vec<f64>,
    pub n_sog: Vec<usize>,
    pub n_course: Vec<usize>,
    pub ramp_s: f64,
    pub sog_len_s: f64,
    pub course_len_s: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ErrorModelFile {
    pub sog_tc_s: f64,
    pub course_tc_s: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LosFile {
    pub lookahead_m: f64,
    pub along_gain_per_s: f64,
    pub epsilon: f64,
    pub max_speed_mps: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WeightsFile {
    pub align: f64,
    pub avoid: f64,
    pub tran: f64,
    pub course: f64,
    pub position: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum GeometryFile {
    Circular {
        radii_m: [f64; 3],
        gamma1: f64,
    },
    EllipticalColregs {
        a_m: [f64; 3],
        b_m: [f64; 3],
        d_colregs_m: f64,
        gamma1: f64,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum DesiredFile {
    Straight {
        origin_m: [f64; 2],
        course_rad: f64,
        speed_mps: f64,
        start_time_s: f64,
    },
    Waypoints {
        points_m: Vec<[f64; 2]>,
        speed_mps: f64,
        start_time_s: f64,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ObstacleFile {
    pub id: u32,
    pub north_m: f64,
    pub east_m: f64,
    pub sog_mps: f64,
    pub course_rad: f64,
    pub changes: Vec<ChangeFile>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChangeFile {
    pub time_s: f64,
    pub sog_mps: Option<f64>,
    pub course_rad: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NoiseFile {
    pub position_std_m: f64,
    pub sog_std_mps: f64,
    pub course_std_rad: f64,
    pub latency_s: f64,
    pub period_s: f64,
}

fn pair<S: Scalar>(v: [f64; 2]) -> [S; 2] {
    [lit(v[0]), lit(v[1])]
}

fn triple<S: Scalar>(v: [f64; 3]) -> [S; 3] {
    [lit(v[0]), lit(v[1]), lit(v[2])]
}

fn force<S: Scalar>(v: [f64; 2]) -> Force2<S> {
    Force2::new(lit(v[0]), lit(v[1]))
}

fn unforce<S: Scalar>(f: Force2<S>) -> [f64; 2] {
    [f.m.to_f64_lossy(), f.delta.to_f64_lossy()]
}

impl NoiseFile {
    pub fn from_noise<S: Scalar>(n: &EstimateNoise<S>) -> Self {
        Self {
            position_std_m: n.position_std.to_f64_lossy(),
            sog_std_mps: n.sog_std.to_f64_lossy(),
            course_std_rad: n.course_std.to_f64_lossy(),
            latency_s: n.latency.to_f64_lossy(),
            period_s: n.period.to_f64_lossy(),
        }
    }

    pub fn to_noise<S: Scalar>(&self) -> EstimateNoise<S> {
        EstimateNoise {
            position_std: lit(self.position_std_m),
            sog_std: lit(self.sog_std_mps),
            course_std: lit(self.course_std_rad),
            latency: lit(self.latency_s),
            period: lit(self.period_s),
        }
    }
}

impl ScenarioFile {
    pub fn from_json(text: &str) -> Result<Self> {
        let file: Self = serde_json::from_str(text)?;
        if file.schema_version != SCHEMA_VERSION {
            return Err(Error::Config(format!(
                "unsupported schema_version {}, expected {SCHEMA_VERSION}",
                file.schema_version
            )));
        }
        Ok(file)
    }

    pub fn load(path: &Path) -> Result<Self> {
        std::fs::read_to_string(path)
            .map_err(Error::from)
            .and_then(|text| Self::from_json(&text))
            .map_err(|e| Error::Config(format!("{}: {e}", path.display())))
    }

    pub fn to_json(&self) -> Result<String> {
        let mut s = serde_json::to_string_pretty(self)?;
        s.push('\n');
        Ok(s)
    }

    /// Builds and validates the runtime configuration.
    pub fn to_config<S: Scalar>(&self) -> Result<ScenarioConfig<S>> {
        let o = &self.ownship;
        let v = &self.vessel;
        let model = VesselModel {
            m_u0: lit(v.m_u0),
            m_u1: lit(v.m_u1),
            m_r0: lit(v.m_r0),
            m_r1: lit(v.m_r1),
            d_u1: lit(v.d_u1),
            d_u2: lit(v.d_u2),
            d_r1: lit(v.d_r1),
            d_r2: lit(v.d_r2),
            d_ru: lit(v.d_ru),
            tau_min: force(v.tau_min),
            tau_max: force(v.tau_max),
            tau_rate_min: force(v.tau_rate_min),
            tau_rate_max: force(v.tau_rate_max),
            u_max: lit(v.u_max_mps),
            u_min: lit(v.u_min_mps),
        };
        let c = &self.controller;
        let gains = ControllerGains::new([triple(c.kp[0]), triple(c.kp[1])], pair(c.ki), lit(c.integral_limit))?;
        let t = &self.tree;
        let tree = TreeParams {
            steps: t.steps_s.iter().map(|&x| lit(x)).collect(),
            n_sog: t.n_sog.clone(),
            n_course: t.n_course.clone(),
            ramp: lit(t.ramp_s),
            sog_len: lit(t.sog_len_s),
            course_len: lit(t.course_len_s),
            dt: lit(self.integration_dt_s),
        };
        let l = &self.los;
        let los = LosParams::new(
            lit(l.lookahead_m),
            lit(l.along_gain_per_s),
            lit(l.epsilon),
            lit(l.max_speed_mps),
        )?;
        let w = &self.weights;
        let weights = ObjectiveWeights {
            align: lit(w.align),
            avoid: lit(w.avoid),
            tran: lit(w.tran),
            course: lit(w.course),
            position: lit(w.position),
        };
        let geometry = match &self.geometry {
            GeometryFile::Circular { radii_m, gamma1 } => PenaltyGeometry::Circular {
                radii: triple(*radii_m),
                gamma1: lit(*gamma1),
            },
            GeometryFile::EllipticalColregs {
                a_m,
                b_m,
                d_colregs_m,
                gamma1,
            } => PenaltyGeometry::EllipticalColregs {
                a: triple(*a_m),
                b: triple(*b_m),
                d_colregs: lit(*d_colregs_m),
                gamma1: lit(*gamma1),
            },
        };
        let path = match &self.desired {
            DesiredFile::Straight {
                origin_m,
                course_rad,
                speed_mps,
                start_time_s,
            } => DesiredTrajectory::straight(pair(*origin_m), lit(*course_rad), lit(*speed_mps), lit(*start_time_s))?,
            DesiredFile::Waypoints {
                points_m,
                speed_mps,
                start_time_s,
            } => DesiredTrajectory::waypoints(
                points_m.iter().map(|p| pair(*p)).collect(),
                lit(*speed_mps),
                lit(*start_time_s),
            )?,
        };
        let obstacles = self
            .obstacles
            .iter()
            .map(|ob| ObstacleScript {
                id: ob.id,
                initial: [lit(ob.north_m), lit(ob.east_m)],
                sog: lit(ob.sog_mps),
                course: lit(ob.course_rad),
                changes: ob
                    .changes
                    .iter()
                    .map(|c| ScriptChange {
                        time: lit(c.time_s),
                        sog: c.sog_mps.map(lit),
                        course: c.course_rad.map(lit),
                    })
                    .collect(),
            })
            .collect();
        let cfg = ScenarioConfig {
            name: self.name.clone(),
            initial: VesselState::new(
                Pose::new(lit(o.north_m), lit(o.east_m), lit(o.course_rad)),
                Velocity2::new(lit(o.sog_mps), lit(o.rot_radps)),
                lit(o.time_s),
            ),
            planner: Planner {
                model,
                tree,
                error_model: ErrorModel::new(lit(self.error_model.sog_tc_s), lit(self.error_model.course_tc_s))?,
                guidance: LosGuidance { path, params: los },
                weights,
                geometry,
                eval_dt: lit(self.evaluation_dt_s),
            },
            gains,
            obstacles,
            noise: self.noise.to_noise(),
            planner_period: lit(self.planner_period_s),
            duration: lit(self.duration_s),
            dt: lit(self.integration_dt_s),
            seed: self.seed,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    /// Inverse of [`ScenarioFile::to_config`].
    pub fn from_config<S: Scalar>(cfg: &ScenarioConfig<S>) -> Self {
        let x = |v: S| v.to_f64_lossy();
        let p = &cfg.planner;
        let m = &p.model;
        let path = &p.guidance.path;
        let desired = if path.is_straight() {
            DesiredFile::Straight {
                origin_m: path.points()[0].map(x),
                course_rad: x(path.course(path.start_time())),
                speed_mps: x(path.speed()),
                start_time_s: x(path.start_time()),
            }
        } else {
            DesiredFile::Waypoints {
                points_m: path.points().iter().map(|q| q.map(x)).collect(),
                speed_mps: x(path.speed()),
                start_time_s: x(path.start_time()),
            }
        };
        let geometry = match p.geometry {
            PenaltyGeometry::Circular { radii, gamma1 } => GeometryFile::Circular {
                radii_m: radii.map(x),
                gamma1: x(gamma1),
            },
            PenaltyGeometry::EllipticalColregs {
                a,
                b,
                d_colregs,
                gamma1,
            } => GeometryFile::EllipticalColregs {
                a_m: a.map(x),
                b_m: b.map(x),
                d_colregs_m: x(d_colregs),
                gamma1: x(gamma1),
            },
        };
        Self {
            schema_version: SCHEMA_VERSION,
            name: cfg.name.clone(),
            ownship: OwnshipFile {
                north_m: x(cfg.initial.pose.north),
                east_m: x(cfg.initial.pose.east),
                course_rad: x(cfg.initial.pose.course),
                sog_mps: x(cfg.initial.vel.sog),
                rot_radps: x(cfg.initial.vel.rot),
                time_s: x(cfg.initial.time),
            },
            vessel: VesselFile {
                m_u0: x(m.m_u0),
                m_u1: x(m.m_u1),
                m_r0: x(m.m_r0),
                m_r1: x(m.m_r1),
                d_u1: x(m.d_u1),
                d_u2: x(m.d_u2),
                d_r1: x(m.d_r1),
                d_r2: x(m.d_r2),
                d_ru: x(m.d_ru),
                tau_min: unforce(m.tau_min),
                tau_max: unforce(m.tau_max),
                tau_rate_min: unforce(m.tau_rate_min),
                tau_rate_max: unforce(m.tau_rate_max),
                u_max_mps: x(m.u_max),
                u_min_mps: x(m.u_min),
            },
            controller: ControllerFile {
                kp: cfg.gains.kp.map(|r| r.map(x)),
                ki: cfg.gains.ki.map(x),
                integral_limit: x(cfg.gains.integral_limit),
            },
            tree: TreeFile {
                steps_s: p.tree.steps.iter().map(|&v| x(v)).collect(),
                n_sog: p.tree.n_sog.clone(),
                n_course: p.tree.n_course.clone(),
                ramp_s: x(p.tree.ramp),
                sog_len_s: x(p.tree.sog_len),
                course_len_s: x(p.tree.course_len),
            },
            error_model: ErrorModelFile {
                sog_tc_s: x(p.error_model.sog_tc),
                course_tc_s: x(p.error_model.course_tc),
            },
            los: LosFile {
                lookahead_m: x(p.guidance.params.lookahead),
                along_gain_per_s: x(p.guidance.params.along_gain),
                epsilon: x(p.guidance.params.epsilon),
                max_speed_mps: x(p.guidance.params.max_speed),
            },
            weights: WeightsFile {
                align: x(p.weights.align),
                avoid: x(p.weights.avoid),
                tran: x(p.weights.tran),
                course: x(p.weights.course),
                position: x(p.weights.position),
            },
            geometry,
            desired,
            obstacles: cfg
                .obstacles
                .iter()
                .map(|o| ObstacleFile {
                    id: o.id,
                    north_m: x(o.initial[0]),
                    east_m: x(o.initial[1]),
                    sog_mps: x(o.sog),
                    course_rad: x(o.course),
                    changes: o
                        .changes
                        .iter()
                        .map(|c| ChangeFile {
                            time_s: x(c.time),
                            sog_mps: c.sog.map(x),
                            course_rad: c.course.map(x),
                        })
                        .collect(),
                })
                .collect(),
            noise: NoiseFile::from_noise(&cfg.noise),
            planner_period_s: x(cfg.planner_period),
            duration_s: x(cfg.duration),
            integration_dt_s: x(cfg.dt),
            evaluation_dt_s: x(p.eval_dt),
            seed: cfg.seed,
        }
    }
}
