//! Closed-form solutions and named angular-velocity profiles.

use crate::error::{Error, Result};
use crate::kinematics::{AngularVelocity, QuatState};
use crate::propagator::RateSource;
use crate::scalar::{lit, Real};
use crate::transition::analytic_transition;

/// `q(t) = [cos(‖ω‖t/2) I + sin(‖ω‖t/2) Ω̂] q0` for a constant rate; `t` is
/// measured from the initial time.
pub fn analytic_lti_solution<T: Real>(t: T, omega: &AngularVelocity<T>, q0: &QuatState<T>) -> QuatState<T> {
    QuatState::from(analytic_transition(t, omega).matrix().mul_vec(&q0.e))
}

/// Coning-type rate with a known exact attitude:
///
/// ```text
/// ω(t) = [−ω0(1 − cos ξ), −ω0 sin ξ sin(ω0 t), ω0 sin ξ cos(ω0 t)]
/// q(t) = [cos(ξ/2), 0, sin(ξ/2) cos(ω0 t), sin(ξ/2) sin(ω0 t)]
/// ```
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpecialLtvProfile<T> {
    pub omega0: T,
    pub xi: T,
}

impl<T: Real> SpecialLtvProfile<T> {
    pub fn new(omega0: T, xi: T) -> Result<Self> {
        if !(omega0.is_finite() && xi.is_finite()) || omega0 == T::zero() {
            return Err(Error::InvalidArgument(format!(
                "profile needs finite omega0 != 0 and finite xi, got ({omega0:?}, {xi:?})"
            )));
        }
        Ok(Self { omega0, xi })
    }

    pub fn rate(&self, t: T) -> [T; 3] {
        let (w0, xi) = (self.omega0, self.xi);
        let (s, c) = (w0 * t).sin_cos();
        [-w0 * (T::one() - xi.cos()), -w0 * xi.sin() * s, w0 * xi.sin() * c]
    }

    /// Exact attitude at `t`.
    pub fn state(&self, t: T) -> QuatState<T> {
        let (sh, ch) = (self.xi * lit(0.5)).sin_cos();
        let (s, c) = (self.omega0 * t).sin_cos();
        QuatState::new(ch, T::zero(), sh * c, sh * s)
    }

    pub fn initial_state(&self) -> QuatState<T> {
        self.state(T::zero())
    }
}

impl<T: Real> RateSource<T> for SpecialLtvProfile<T> {
    fn rate(&self, t: &T) -> [T; 3] {
        SpecialLtvProfile::rate(self, *t)
    }
}

/// Decaying, oscillating rate with no closed-form attitude:
///
/// ```text
/// ω(t) = [−ω0 cos(ξt) exp(−ω0 t), −ω0 sin(ω0 t), ω0 cos(ξt) cos(ω0 t)]
/// q(0) = [cos(ξ/2), 0, sin(ξ/2), 0]
/// ```
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DampedLtvProfile<T> {
    pub omega0: T,
    pub xi: T,
}

impl<T: Real> DampedLtvProfile<T> {
    pub fn new(omega0: T, xi: T) -> Result<Self> {
        if !(omega0.is_finite() && xi.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "profile needs finite parameters, got ({omega0:?}, {xi:?})"
            )));
        }
        Ok(Self { omega0, xi })
    }

    pub fn rate(&self, t: T) -> [T; 3] {
        let (w0, xi) = (self.omega0, self.xi);
        let cx = (xi * t).cos();
        let (s, c) = (w0 * t).sin_cos();
        [-w0 * cx * (-w0 * t).exp(), -w0 * s, w0 * cx * c]
    }

    pub fn initial_state(&self) -> QuatState<T> {
        let (sh, ch) = (self.xi * lit(0.5)).sin_cos();
        QuatState::new(ch, T::zero(), sh, T::zero())
    }
}

impl<T: Real> RateSource<T> for DampedLtvProfile<T> {
    fn rate(&self, t: &T) -> [T; 3] {
        DampedLtvProfile::rate(self, *t)
    }
}
