//! Fixed-step propagation of dq/dt = ½ Ω(ω(t)) q.
//!
//! Trajectories are iterators that hold only the current state, so memory
//! use does not depend on the number of steps. Sample `k` sits at
//! `t0 + k·τ`; `n = ⌊(tf − t0)/τ⌋` steps produce `n + 1` samples. The state
//! is never renormalized.

use crate::error::{Error, Result};
use crate::kinematics::{AngularVelocity, OmegaMatrix, QuatState};
use crate::pade::OrderParam;
use crate::scalar::{from_count, to_f64_lossy, Real};
use crate::transition::{literal_transition_matrix, CayleyStepper, TransitionMatrix};

/// Relative slack used when `(tf − t0)/τ` is meant to be an integer.
const STEP_COUNT_SNAP: f64 = 1e-9;

/// Arithmetic used for each step.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub enum StepKernel {
    /// Cached coefficients, increment-form update.
    #[default]
    Cayley,
    /// β regenerated from η each step and a dense `G q` product.
    Literal,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PropagationConfig<T> {
    pub order: OrderParam,
    pub tau: T,
    pub t0: T,
    pub tf: T,
    pub q0: QuatState<T>,
    pub kernel: StepKernel,
}

impl<T: Real> PropagationConfig<T> {
    /// Validates the grid and normalizes `q0`.
    pub fn new(order: OrderParam, tau: T, t0: T, tf: T, q0: QuatState<T>) -> Result<Self> {
        if !(tau.is_finite() && tau > T::zero()) {
            return Err(Error::Config(format!("tau must be finite and positive, got {tau:?}")));
        }
        if !(t0.is_finite() && tf.is_finite() && tf > t0) {
            return Err(Error::Config(format!(
                "need finite t0 < tf, got [{t0:?}, {tf:?}]"
            )));
        }
        let q0 = q0
            .normalized()
            .map_err(|_| Error::Config(format!("initial quaternion {:?} cannot be normalized", q0.e)))?;
        let cfg = Self {
            order,
            tau,
            t0,
            tf,
            q0,
            kernel: StepKernel::default(),
        };
        if cfg.steps() < 1 {
            return Err(Error::Config(format!(
                "span [{t0:?}, {tf:?}] is shorter than one step of {tau:?}"
            )));
        }
        Ok(cfg)
    }

    pub fn with_kernel(mut self, kernel: StepKernel) -> Self {
        self.kernel = kernel;
        self
    }

    /// `n = ⌊(tf − t0)/τ⌋`, snapped to the nearest integer when the ratio is
    /// within rounding of one.
    pub fn steps(&self) -> usize {
        let ratio = to_f64_lossy(&((self.tf - self.t0) / self.tau));
        let nearest = ratio.round();
        let n = if (ratio - nearest).abs() <= STEP_COUNT_SNAP * nearest.max(1.0) {
            nearest
        } else {
            ratio.floor()
        };
        n.max(0.0) as usize
    }

    /// `t0 + k·τ`
    pub fn time(&self, k: usize) -> T {
        self.t0 + from_count::<T>(k) * self.tau
    }
}

/// Angular velocity as a function of time.
pub trait RateSource<T> {
    fn rate(&self, t: &T) -> [T; 3];
}

impl<T: Clone> RateSource<T> for AngularVelocity<T>
where
    T: crate::scalar::Field,
{
    fn rate(&self, _t: &T) -> [T; 3] {
        self.components().clone()
    }
}

impl<T, F> RateSource<T> for F
where
    F: Fn(&T) -> [T; 3],
{
    fn rate(&self, t: &T) -> [T; 3] {
        self(t)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrajectorySample<T> {
    pub k: usize,
    pub t: T,
    pub q: QuatState<T>,
}

/// Constant-rate trajectory: one transition matrix reused for every step.
#[derive(Debug, Clone)]
pub struct LtiTrajectory<T> {
    cfg: PropagationConfig<T>,
    g: TransitionMatrix<T>,
    q: [T; 4],
    t: T,
    k: usize,
    n: usize,
    started: bool,
}

impl<T: Real> LtiTrajectory<T> {
    pub fn transition(&self) -> &TransitionMatrix<T> {
        &self.g
    }

    pub fn config(&self) -> &PropagationConfig<T> {
        &self.cfg
    }
}

impl<T: Real> Iterator for LtiTrajectory<T> {
    type Item = TrajectorySample<T>;

    fn next(&mut self) -> Option<Self::Item> {
        if !self.started {
            self.started = true;
        } else if self.k < self.n {
            self.q = self.g.apply_compensated(&self.q);
            self.k += 1;
            self.t = self.cfg.time(self.k);
        } else {
            return None;
        }
        Some(TrajectorySample {
            k: self.k,
            t: self.t,
            q: QuatState::from(self.q),
        })
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        let left = self.n - self.k + usize::from(!self.started);
        (left, Some(left))
    }
}

impl<T: Real> ExactSizeIterator for LtiTrajectory<T> {}

/// Builds the constant-rate trajectory; the transition matrix is computed
/// once up front.
pub fn propagate_lti<T: Real>(
    cfg: &PropagationConfig<T>,
    omega: &AngularVelocity<T>,
) -> Result<LtiTrajectory<T>> {
    let g = match cfg.kernel {
        StepKernel::Cayley => {
            CayleyStepper::new(cfg.order, cfg.tau)?
                .matrix(&OmegaMatrix::new(omega))?
                .with_norm_correction()
        }
        StepKernel::Literal => literal_transition_matrix(cfg.order, cfg.tau, *omega.components())?,
    };
    Ok(LtiTrajectory {
        q: cfg.q0.e,
        t: cfg.t0,
        n: cfg.steps(),
        cfg: cfg.clone(),
        g,
        k: 0,
        started: false,
    })
}

/// Time-varying trajectory: `ω` is sampled at the left end of each step and
/// a fresh transition matrix is built from it.
#[derive(Debug, Clone)]
pub struct LtvTrajectory<T, R> {
    cfg: PropagationConfig<T>,
    stepper: CayleyStepper<T>,
    source: R,
    q: [T; 4],
    t: T,
    k: usize,
    n: usize,
    started: bool,
    failed: bool,
}

impl<T: Real, R: RateSource<T>> LtvTrajectory<T, R> {
    pub fn config(&self) -> &PropagationConfig<T> {
        &self.cfg
    }

    fn step_matrix(&self) -> Result<TransitionMatrix<T>> {
        let t = self.t;
        let w = self.source.rate(&t);
        let omega = AngularVelocity::from_components(w).map_err(|_| Error::NonFiniteRate {
            step: self.k,
            t: to_f64_lossy(&t),
        })?;
        match self.cfg.kernel {
            StepKernel::Cayley => self
                .stepper
                .matrix(&OmegaMatrix::new(&omega))
                .map(TransitionMatrix::with_norm_correction),
            StepKernel::Literal => {
                literal_transition_matrix(self.cfg.order, self.cfg.tau, *omega.components())
            }
        }
    }
}

impl<T: Real, R: RateSource<T>> Iterator for LtvTrajectory<T, R> {
    type Item = Result<TrajectorySample<T>>;

    fn next(&mut self) -> Option<Self::Item> {
        if self.failed {
            return None;
        }
        if !self.started {
            self.started = true;
        } else if self.k < self.n {
            match self.step_matrix() {
                Ok(g) => self.q = g.apply_compensated(&self.q),
                Err(e) => {
                    self.failed = true;
                    return Some(Err(e));
                }
            }
            self.k += 1;
            self.t = self.cfg.time(self.k);
        } else {
            return None;
        }
        Some(Ok(TrajectorySample {
            k: self.k,
            t: self.t,
            q: QuatState::from(self.q),
        }))
    }
}

pub fn propagate_ltv<T: Real, R: RateSource<T>>(
    cfg: &PropagationConfig<T>,
    source: R,
) -> Result<LtvTrajectory<T, R>> {
    Ok(LtvTrajectory {
        stepper: CayleyStepper::new(cfg.order, cfg.tau)?,
        q: cfg.q0.e,
        t: cfg.t0,
        n: cfg.steps(),
        cfg: cfg.clone(),
        source,
        k: 0,
        started: false,
        failed: false,
    })
}

/// What a streamed propagation leaves behind.
#[derive(Debug, Clone, PartialEq)]
pub struct PropagationSummary<T> {
    pub steps: usize,
    pub last: TrajectorySample<T>,
    /// Largest `|‖q[k]‖ − 1|` seen.
    pub max_norm_drift: T,
}

fn drive<T: Real>(
    samples: impl Iterator<Item = Result<TrajectorySample<T>>>,
    mut consumer: impl FnMut(&TrajectorySample<T>),
) -> Result<PropagationSummary<T>> {
    let mut last = None;
    let mut drift = T::zero();
    for sample in samples {
        let sample = sample?;
        drift = drift.max((sample.q.norm() - T::one()).abs());
        consumer(&sample);
        last = Some(sample);
    }
    let last = last.expect("trajectories emit at least the initial sample");
    Ok(PropagationSummary {
        steps: last.k,
        last,
        max_norm_drift: drift,
    })
}

/// Streams a constant-rate propagation into `consumer`.
pub fn run_lti<T: Real>(
    cfg: &PropagationConfig<T>,
    omega: &AngularVelocity<T>,
    consumer: impl FnMut(&TrajectorySample<T>),
) -> Result<PropagationSummary<T>> {
    drive(propagate_lti(cfg, omega)?.map(Ok), consumer)
}

/// Streams a time-varying propagation into `consumer`.
pub fn run_ltv<T: Real, R: RateSource<T>>(
    cfg: &PropagationConfig<T>,
    source: R,
    consumer: impl FnMut(&TrajectorySample<T>),
) -> Result<PropagationSummary<T>> {
    drive(propagate_ltv(cfg, source)?, consumer)
}
