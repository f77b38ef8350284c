//! High-accuracy reference trajectories for rates without a closed-form
//! solution.
//!
//! Each grid interval is split into `substeps` pieces of width `h`, and
//! each piece is advanced with the fourth-order Magnus step built on the
//! two Gauss–Legendre nodes `t_a, t_b = t + (1/2 ∓ √3/6) h`:
//!
//! ```text
//! v = (h/2)(ω_a + ω_b) + (√3/12) h² (ω_a × ω_b)
//! q ← exp(½ Ω(v)) q = [cos(‖v‖/2) I + sin(‖v‖/2) Ω(v)/‖v‖] q
//! ```
//!
//! Since Ω(a) and Ω(b) commute up to `−2Ω(a × b)`, the cross term is the
//! first commutator correction and the step is exact for constant rates.
//! The global error is `O(h⁴)`; with the default 256 substeps and
//! `‖ω‖ ≤ 4π` it sits below 1e-12 per emitted sample on the test scenarios.

use crate::error::{Error, Result};
use crate::kinematics::{AngularVelocity, OmegaMatrix, QuatState};
use crate::propagator::{PropagationConfig, RateSource, TrajectorySample};
use crate::scalar::{from_count, lit, to_f64_lossy, Real};

pub const DEFAULT_SUBSTEPS: usize = 256;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ReferenceOracle {
    substeps: usize,
}

impl Default for ReferenceOracle {
    fn default() -> Self {
        Self {
            substeps: DEFAULT_SUBSTEPS,
        }
    }
}

impl ReferenceOracle {
    pub fn new(substeps: usize) -> Result<Self> {
        if substeps == 0 {
            return Err(Error::InvalidArgument("oracle needs at least one substep".into()));
        }
        Ok(Self { substeps })
    }

    pub fn substeps(&self) -> usize {
        self.substeps
    }

    /// Reference states on the grid of `cfg` (its order and kernel are not
    /// used).
    pub fn trajectory<T: Real, R: RateSource<T>>(
        &self,
        cfg: &PropagationConfig<T>,
        source: R,
    ) -> OracleTrajectory<T, R> {
        OracleTrajectory {
            h: cfg.tau / from_count(self.substeps),
            substeps: self.substeps,
            n: cfg.steps(),
            cfg: cfg.clone(),
            source,
            q: cfg.q0.e,
            k: 0,
            started: false,
            failed: false,
        }
    }
}

/// Convenience wrapper around [`ReferenceOracle::trajectory`].
pub fn reference_oracle<T: Real, R: RateSource<T>>(
    source: R,
    q0: QuatState<T>,
    t0: T,
    tf: T,
    tau: T,
    substeps: usize,
) -> Result<OracleTrajectory<T, R>> {
    let order = crate::pade::OrderParam::new(1)?;
    let cfg = PropagationConfig::new(order, tau, t0, tf, q0)?;
    Ok(ReferenceOracle::new(substeps)?.trajectory(&cfg, source))
}

#[derive(Debug, Clone)]
pub struct OracleTrajectory<T, R> {
    cfg: PropagationConfig<T>,
    source: R,
    h: T,
    substeps: usize,
    q: [T; 4],
    k: usize,
    n: usize,
    started: bool,
    failed: bool,
}

impl<T: Real, R: RateSource<T>> OracleTrajectory<T, R> {
    fn rate(&self, t: T) -> Result<[T; 3]> {
        let w = self.source.rate(&t);
        AngularVelocity::from_components(w)
            .map(|w| *w.components())
            .map_err(|_| Error::NonFiniteRate {
                step: self.k,
                t: to_f64_lossy(&t),
            })
    }

    fn advance(&mut self) -> Result<()> {
        let half = lit::<T>(0.5);
        let r3 = lit::<T>(3.0).sqrt();
        let (ca, cb) = (half - r3 / lit(6.0), half + r3 / lit(6.0));
        let cross_coeff = r3 / lit(12.0) * self.h * self.h;
        let base = self.cfg.time(self.k);
        for j in 0..self.substeps {
            let tj = base + from_count::<T>(j) * self.h;
            let wa = self.rate(tj + ca * self.h)?;
            let wb = self.rate(tj + cb * self.h)?;
            let cross = [
                wa[1] * wb[2] - wa[2] * wb[1],
                wa[2] * wb[0] - wa[0] * wb[2],
                wa[0] * wb[1] - wa[1] * wb[0],
            ];
            let v: [T; 3] =
                std::array::from_fn(|i| self.h * half * (wa[i] + wb[i]) + cross_coeff * cross[i]);
            let om = OmegaMatrix::new(&AngularVelocity::from_components(v)?);
            let norm = om.gamma();
            if norm == T::zero() {
                continue;
            }
            let theta = norm * half;
            let s_over = theta.sin() / norm;
            let quarter = (theta * half).sin();
            let diag = -(lit::<T>(2.0) * quarter * quarter);
            let ov = om.matrix().mul_vec(&self.q);
            self.q = std::array::from_fn(|i| self.q[i] + (diag * self.q[i] + s_over * ov[i]));
        }
        self.k += 1;
        Ok(())
    }
}

impl<T: Real, R: RateSource<T>> Iterator for OracleTrajectory<T, R> {
    type Item = Result<TrajectorySample<T>>;

    fn next(&mut self) -> Option<Self::Item> {
        if self.failed {
            return None;
        }
        if !self.started {
            self.started = true;
        } else if self.k < self.n {
            if let Err(e) = self.advance() {
                self.failed = true;
                return Some(Err(e));
            }
        } else {
            return None;
        }
        Some(Ok(TrajectorySample {
            k: self.k,
            t: self.cfg.time(self.k),
            q: QuatState::from(self.q),
        }))
    }
}
