//! Control-oriented 2DOF vessel model, its steady-state inverse and the
//! feedforward-feedback speed/course controller.
//!
//! The model is `M(x) ẋ + σ(x) = τ` with `x = [U, r]` and a normalized input
//! `τ = [τ_m, τ_δ]`. Inertia and damping use a diagonal surrogate:
//!
//! ```text
//! M(x) = diag(m_u0 + m_u1 U, m_r0 + m_r1 U)
//! σ_U  = d_u1 U + d_u2 U |U|
//! σ_r  = d_r1 r + d_r2 r |r| + d_ru U r
//! ```

use crate::error::{Error, Result};
use crate::scalar::{lit, Scalar};
use crate::types::{wrap, Accel2, Pose, Velocity2, VesselState};

/// Normalized actuator input: throttle `m` and rudder `delta`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Force2<S> {
    pub m: S,
    pub delta: S,
}

impl<S: Scalar> Force2<S> {
    pub fn new(m: S, delta: S) -> Self {
        Self { m, delta }
    }

    /// Component-wise clamp into `[lo, hi]`.
    pub fn clamp(self, lo: Force2<S>, hi: Force2<S>) -> Self {
        Self {
            m: self.m.max(lo.m).min(hi.m),
            delta: self.delta.max(lo.delta).min(hi.delta),
        }
    }

    pub fn within(&self, lo: &Force2<S>, hi: &Force2<S>) -> bool {
        self.m >= lo.m && self.m <= hi.m && self.delta >= lo.delta && self.delta <= hi.delta
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VesselModel<S> {
    pub m_u0: S,
    pub m_u1: S,
    pub m_r0: S,
    pub m_r1: S,
    pub d_u1: S,
    pub d_u2: S,
    pub d_r1: S,
    pub d_r2: S,
    pub d_ru: S,
    pub tau_min: Force2<S>,
    pub tau_max: Force2<S>,
    pub tau_rate_min: Force2<S>,
    pub tau_rate_max: Force2<S>,
    pub u_max: S,
    pub u_min: S,
}

impl<S: Scalar> VesselModel<S> {
    /// Surrogate calibrated so that full throttle holds 18 m/s and full
    /// rudder at 5 m/s holds a 0.25 rad/s turn.
    pub fn calibrated() -> Self {
        Self {
            m_u0: lit(0.9),
            m_u1: lit(0.02),
            m_r0: lit(3.5),
            m_r1: lit(0.1),
            d_u1: lit(1.0 / 36.0),
            d_u2: lit(1.0 / 648.0),
            d_r1: lit(1.0),
            d_r2: lit(4.0),
            d_ru: lit(0.4),
            tau_min: Force2::new(lit(0.05), lit(-1.0)),
            tau_max: Force2::new(S::one(), S::one()),
            tau_rate_min: Force2::new(lit(-0.5), lit(-0.5)),
            tau_rate_max: Force2::new(lit(0.5), lit(0.5)),
            u_max: lit(18.0),
            u_min: S::one(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let fields = [
            self.m_u0, self.m_u1, self.m_r0, self.m_r1, self.d_u1, self.d_u2, self.d_r1, self.d_r2, self.d_ru,
            self.u_max, self.u_min,
        ];
        if fields.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("vessel model"));
        }
        let (mu_lo, mr_lo) = self.inertia(&Velocity2::new(S::zero(), S::zero()));
        let (mu_hi, mr_hi) = self.inertia(&Velocity2::new(self.u_max, S::zero()));
        if mu_lo <= S::zero() || mr_lo <= S::zero() || mu_hi <= S::zero() || mr_hi <= S::zero() {
            return Err(crate::error::invalid("inertia must be positive on [0, u_max]"));
        }
        if !(self.tau_min.m < self.tau_max.m && self.tau_min.delta < self.tau_max.delta) {
            return Err(crate::error::invalid("tau_min must be below tau_max"));
        }
        if !(self.tau_rate_min.m <= self.tau_rate_max.m && self.tau_rate_min.delta <= self.tau_rate_max.delta) {
            return Err(crate::error::invalid("tau_rate_min must not exceed tau_rate_max"));
        }
        if self.u_min < S::zero() || self.u_min >= self.u_max {
            return Err(crate::error::invalid("need 0 <= u_min < u_max"));
        }
        Ok(())
    }

    /// Diagonal of `M(x)`.
    #[inline]
    pub fn inertia(&self, x: &Velocity2<S>) -> (S, S) {
        (self.m_u0 + self.m_u1 * x.sog, self.m_r0 + self.m_r1 * x.sog)
    }

    /// `σ(x)`.
    #[inline]
    pub fn damping(&self, x: &Velocity2<S>) -> Force2<S> {
        let u = x.sog;
        let r = x.rot;
        Force2::new(
            self.d_u1 * u + self.d_u2 * u * u.abs(),
            self.d_r1 * r + self.d_r2 * r * r.abs() + self.d_ru * u * r,
        )
    }

    /// `ẋ = M(x)⁻¹ (τ − σ(x))`, rejecting inputs outside the actuator limits.
    pub fn dynamics(&self, x: &Velocity2<S>, tau: &Force2<S>) -> Result<Accel2<S>> {
        self.check_tau(tau)?;
        Ok(self.acceleration(x, tau))
    }

    pub(crate) fn acceleration(&self, x: &Velocity2<S>, tau: &Force2<S>) -> Accel2<S> {
        let (mu, mr) = self.inertia(x);
        let s = self.damping(x);
        Accel2::new((tau.m - s.m) / mu, (tau.delta - s.delta) / mr)
    }

    fn check_tau(&self, tau: &Force2<S>) -> Result<()> {
        let check = |channel, v: S, lo: S, hi: S| {
            if v.is_nan() || v < lo || v > hi {
                Err(Error::ActuatorOutOfRange {
                    channel,
                    value: v.to_f64_lossy(),
                    min: lo.to_f64_lossy(),
                    max: hi.to_f64_lossy(),
                })
            } else {
                Ok(())
            }
        };
        check("tau_m", tau.m, self.tau_min.m, self.tau_max.m)?;
        check("tau_delta", tau.delta, self.tau_min.delta, self.tau_max.delta)
    }

    /// Steady-state input holding `x_ss`: `τ = σ(x_ss)`. Feasibility against
    /// the actuator limits is left to the caller.
    pub fn inverse_model(&self, x_ss: &Velocity2<S>) -> Force2<S> {
        self.damping(x_ss)
    }

    /// Whether the steady state `x_ss` can be held within the actuator and
    /// speed limits.
    pub fn steady_state_feasible(&self, x_ss: &Velocity2<S>) -> bool {
        x_ss.sog >= self.u_min
            && x_ss.sog <= self.u_max
            && self.inverse_model(x_ss).within(&self.tau_min, &self.tau_max)
    }

    /// One explicit Euler step of the velocity dynamics followed by the
    /// kinematics `ṗ = [cos χ, sin χ] U`, `χ̇ = r`. Sideslip is neglected.
    pub fn step_plant(
        &self,
        state: &VesselState<S>,
        tau: &Force2<S>,
        dt: S,
        disturbance: &Accel2<S>,
    ) -> VesselState<S> {
        let acc = self.acceleration(&state.vel, tau);
        let Pose { north, east, course } = state.pose;
        let u = state.vel.sog;
        let r = state.vel.rot;
        let pose = Pose::new(
            north + dt * u * course.cos(),
            east + dt * u * course.sin(),
            course + dt * r,
        );
        let vel = Velocity2::new(
            u + dt * (acc.sog_acc + disturbance.sog_acc),
            r + dt * (acc.rot_acc + disturbance.rot_acc),
        );
        VesselState::new(pose, vel, state.time + dt)
    }
}

/// PI gains of the speed/course controller plus its integral state.
///
/// `kp` maps `[Ũ, r̃, χ̃]` to an acceleration correction per channel, `ki`
/// is the diagonal integral gain on `[Ũ, χ̃]`. The integral state stores
/// `K_i ∫ζ̃₁` and is clamped to `±integral_limit`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ControllerGains<S> {
    pub kp: [[S; 3]; 2],
    pub ki: [S; 2],
    pub integral_limit: S,
    pub integral: [S; 2],
}

impl<S: Scalar> ControllerGains<S> {
    pub fn new(kp: [[S; 3]; 2], ki: [S; 2], integral_limit: S) -> Result<Self> {
        if kp.iter().flatten().any(|k| *k < S::zero()) {
            return Err(crate::error::invalid("proportional gains must be non-negative"));
        }
        if ki.iter().any(|k| *k <= S::zero()) {
            return Err(crate::error::invalid("integral gains must be positive"));
        }
        if !(integral_limit >= S::zero()) {
            return Err(crate::error::invalid("integral limit must be non-negative"));
        }
        Ok(Self {
            kp,
            ki,
            integral_limit,
            integral: [S::zero(); 2],
        })
    }

    /// Default tuning for [`VesselModel::calibrated`].
    pub fn calibrated() -> Self {
        Self::new(
            [[lit(0.5), S::zero(), S::zero()], [S::zero(), lit(1.0), lit(0.5)]],
            [lit(0.02), lit(0.02)],
            lit(0.3),
        )
        .expect("default gains are valid")
    }

    pub fn reset(&mut self) {
        self.integral = [S::zero(); 2];
    }
}

/// Desired velocity, course and acceleration handed to the controller.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Reference<S> {
    pub vel: Velocity2<S>,
    pub course: S,
    pub acc: Accel2<S>,
}

/// Feedforward-feedback law
/// `τ = M(x) ẋ_d + σ(x_d) − M(x) K_p ζ̃ − K_i ∫ζ̃₁`, saturated to the
/// actuator limits. Advances the integral state by `dt`.
pub fn control_law<S: Scalar>(
    model: &VesselModel<S>,
    gains: &mut ControllerGains<S>,
    x: &Velocity2<S>,
    course: S,
    reference: &Reference<S>,
    dt: S,
) -> Force2<S> {
    let err_u = x.sog - reference.vel.sog;
    let err_r = x.rot - reference.vel.rot;
    let err_chi = wrap(course - reference.course);

    let lim = gains.integral_limit;
    gains.integral[0] = (gains.integral[0] + gains.ki[0] * err_u * dt).max(-lim).min(lim);
    gains.integral[1] = (gains.integral[1] + gains.ki[1] * err_chi * dt).max(-lim).min(lim);

    let zeta = [err_u, err_r, err_chi];
    let fb = |row: &[S; 3]| row[0] * zeta[0] + row[1] * zeta[1] + row[2] * zeta[2];
    let (mu, mr) = model.inertia(x);
    let ff = model.damping(&reference.vel);

    let tau = Force2::new(
        mu * reference.acc.sog_acc + ff.m - mu * fb(&gains.kp[0]) - gains.integral[0],
        mr * reference.acc.rot_acc + ff.delta - mr * fb(&gains.kp[1]) - gains.integral[1],
    );
    tau.clamp(model.tau_min, model.tau_max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn model() -> VesselModel<f64> {
        VesselModel::calibrated()
    }

    #[test]
    fn calibrated_model_is_valid() {
        model().validate().unwrap();
    }

    #[test]
    fn equilibrium_has_zero_acceleration() {
        let m = model();
        let x = Velocity2::new(5.0, 0.05);
        let tau = m.inverse_model(&x);
        let acc = m.dynamics(&x, &tau).unwrap();
        assert!(acc.sog_acc.abs() < 1e-15 && acc.rot_acc.abs() < 1e-15);
    }

    #[test]
    fn full_throttle_holds_max_speed() {
        let m = model();
        let x = Velocity2::new(18.0, 0.0);
        let acc = m.dynamics(&x, &Force2::new(1.0, 0.0)).unwrap();
        assert!(acc.sog_acc.abs() < 1e-6);
        let tau = m.inverse_model(&x);
        assert!((tau.m - m.tau_max.m).abs() < 1e-6);
    }

    #[test]
    fn full_rudder_turn_rate_at_cruise() {
        let m = model();
        let tau = m.inverse_model(&Velocity2::new(5.0, 0.25));
        assert!((tau.delta - 1.0).abs() < 1e-12);
    }

    #[test]
    fn zero_input_decelerates() {
        let m = model();
        // below the throttle floor, so call the unchecked path
        let acc = m.acceleration(&Velocity2::new(5.0, 0.0), &Force2::new(0.0, 0.0));
        assert!(acc.sog_acc < 0.0);
        assert!(m.dynamics(&Velocity2::new(5.0, 0.0), &Force2::new(0.0, 0.0)).is_err());
    }

    #[test]
    fn inverse_at_rest_is_zero() {
        let tau = model().inverse_model(&Velocity2::new(0.0, 0.0));
        assert_eq!(tau, Force2::new(0.0, 0.0));
    }

    #[test]
    fn dynamics_rejects_out_of_range_input() {
        let m = model();
        let x = Velocity2::new(5.0, 0.0);
        assert!(m.dynamics(&x, &Force2::new(1.1, 0.0)).is_err());
        assert!(m.dynamics(&x, &Force2::new(0.5, -1.5)).is_err());
    }

    #[test]
    fn pure_feedforward_at_steady_state() {
        let m = model();
        let mut g = ControllerGains::calibrated();
        let xd = Velocity2::new(6.0, 0.0);
        let r = Reference {
            vel: xd,
            course: 0.3,
            acc: Accel2::zero(),
        };
        let tau = control_law(&m, &mut g, &xd, 0.3, &r, 0.1);
        let ff = m.inverse_model(&xd);
        assert!((tau.m - ff.m).abs() < 1e-15 && (tau.delta - ff.delta).abs() < 1e-15);
    }

    #[test]
    fn positive_speed_error_reduces_throttle() {
        let m = model();
        let mut g = ControllerGains::calibrated();
        let xd = Velocity2::new(6.0, 0.0);
        let r = Reference {
            vel: xd,
            course: 0.0,
            acc: Accel2::zero(),
        };
        let tau = control_law(&m, &mut g, &Velocity2::new(6.5, 0.0), 0.0, &r, 0.1);
        assert!(tau.m < m.inverse_model(&xd).m);
    }

    #[test]
    fn course_error_is_wrap_invariant() {
        let m = model();
        let x = Velocity2::new(5.0, 0.0);
        let run = |chi: f64, chi_d: f64| {
            let mut g = ControllerGains::calibrated();
            let r = Reference {
                vel: x,
                course: chi_d,
                acc: Accel2::zero(),
            };
            control_law(&m, &mut g, &x, chi, &r, 0.1)
        };
        let base = run(0.1, -0.1);
        let shifted = run(0.1 + 2.0 * std::f64::consts::PI, -0.1 - 4.0 * std::f64::consts::PI);
        assert!((base.delta - shifted.delta).abs() < 1e-12);
        assert!(base.delta < 0.0);
    }

    #[test]
    fn straight_line_step() {
        let m = model();
        let x = Velocity2::new(5.0, 0.0);
        let s = VesselState::new(Pose::new(0.0, 0.0, 0.0), x, 0.0);
        let next = m.step_plant(&s, &m.inverse_model(&x), 1.0, &Accel2::zero());
        assert!((next.pose.north - 5.0).abs() < 1e-12);
        assert!(next.pose.east.abs() < 1e-12);
        assert!((next.vel.sog - 5.0).abs() < 1e-12);
    }

    #[test]
    fn turn_rate_advances_course() {
        let m = model();
        let x = Velocity2::new(5.0, 0.1);
        let s = VesselState::new(Pose::new(0.0, 0.0, 0.0), x, 0.0);
        let next = m.step_plant(&s, &m.inverse_model(&x), 0.1, &Accel2::zero());
        assert!((next.pose.course - 0.01).abs() < 1e-12);
    }

    #[test]
    fn euler_error_is_second_order_per_step() {
        // Local error of one Euler step against a dt/10 reference shrinks ~4x
        // when dt halves.
        let m = model();
        let s0 = VesselState::new(Pose::new(0.0, 0.0, 0.2), Velocity2::new(4.0, 0.05), 0.0);
        let tau = Force2::new(0.6, 0.4);
        let run = |dt: f64, steps: usize| {
            let mut s = s0;
            for _ in 0..steps {
                s = m.step_plant(&s, &tau, dt, &Accel2::zero());
            }
            s
        };
        let err = |dt: f64| {
            let coarse = run(dt, 1);
            let fine = run(dt / 10.0, 10);
            ((coarse.vel.sog - fine.vel.sog).powi(2)
                + (coarse.pose.north - fine.pose.north).powi(2)
                + (coarse.pose.east - fine.pose.east).powi(2))
            .sqrt()
        };
        let e1 = err(0.2);
        let e2 = err(0.1);
        let ratio = e1 / e2;
        assert!(ratio > 3.5 && ratio < 4.5, "ratio {ratio}");
        // two half-steps agree with one full step to O(dt^2)
        let full = run(0.1, 1);
        let halves = run(0.05, 2);
        assert!((full.pose.north - halves.pose.north).abs() < 0.1 * 0.1);
        assert!((full.vel.sog - halves.vel.sog).abs() < 0.1 * 0.1);
    }

    #[test]
    fn controller_settles_course_step() {
        let m = model();
        let mut g = ControllerGains::calibrated();
        let dt = 0.1;
        let x = Velocity2::new(5.0, 0.0);
        let mut s = VesselState::new(Pose::new(0.0, 0.0, 0.0), x, 0.0);
        let r = Reference {
            vel: x,
            course: 20_f64.to_radians(),
            acc: Accel2::zero(),
        };
        for _ in 0..200 {
            let tau = control_law(&m, &mut g, &s.vel, s.pose.course, &r, dt);
            s = m.step_plant(&s, &tau, dt, &Accel2::zero());
        }
        let err = wrap(s.pose.course - r.course).abs();
        assert!(err < 1_f64.to_radians(), "residual {}", err.to_degrees());
    }

    proptest! {
        #[test]
        fn unforced_speed_never_increases(u0 in 0.0_f64..18.0, r0 in -0.3_f64..0.3) {
            let m = model();
            let mut s = VesselState::new(Pose::new(0.0, 0.0, 0.0), Velocity2::new(u0, r0), 0.0);
            let zero = Force2::new(0.0, 0.0);
            for _ in 0..200 {
                let next = m.step_plant(&s, &zero, 0.1, &Accel2::zero());
                prop_assert!(next.vel.sog <= s.vel.sog + 1e-15);
                s = next;
            }
        }

        #[test]
        fn control_output_is_saturated(
            u in 0.0_f64..20.0, r in -1.0_f64..1.0, chi in -10.0_f64..10.0,
            ud in 0.0_f64..20.0, rd in -1.0_f64..1.0, chid in -10.0_f64..10.0,
            au in -5.0_f64..5.0, ar in -5.0_f64..5.0,
        ) {
            let m = model();
            let mut g = ControllerGains::calibrated();
            let reference = Reference { vel: Velocity2::new(ud, rd), course: chid, acc: Accel2::new(au, ar) };
            let tau = control_law(&m, &mut g, &Velocity2::new(u, r), chi, &reference, 0.1);
            prop_assert!(tau.within(&m.tau_min, &m.tau_max));
        }
    }
}
