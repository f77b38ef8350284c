//! Per-sample error `E_k = ‖q_NS[k] − q_ref[k]‖₂` and its running maximum.
//!
//! `q` and `−q` describe the same attitude but are not identified here; a
//! flag records whether any sample was closer to the antipode.

use std::f64::consts::SQRT_2;

use crate::error::{Error, Result};
use crate::kinematics::QuatState;
use crate::propagator::TrajectorySample;
use crate::scalar::{to_f64_lossy, Field};

pub fn abs_error<T: Field>(ns: &QuatState<T>, reference: &QuatState<T>) -> f64 {
    ns.e.iter()
        .zip(&reference.e)
        .map(|(a, b)| {
            let d = to_f64_lossy(&(a.clone() - b.clone()));
            d * d
        })
        .sum::<f64>()
        .sqrt()
}

/// Run parameters echoed into a report.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct RunEcho {
    pub ell: Option<u32>,
    pub tau: f64,
    pub t0: f64,
    pub tf: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ErrorReport {
    pub e_max: f64,
    pub k_argmax: usize,
    pub t_argmax: f64,
    pub samples: usize,
    /// Some `E_k` exceeded √2, i.e. the states were nearer antipodal.
    pub near_antipodal: bool,
    /// Every `E_k`, when tracing was requested.
    pub trace: Option<Vec<f64>>,
    pub echo: RunEcho,
}

/// Single-pass running maximum of `E_k`.
#[derive(Debug, Clone, Default)]
pub struct ErrorTracker {
    e_max: f64,
    k_argmax: usize,
    t_argmax: f64,
    samples: usize,
    near_antipodal: bool,
    trace: Option<Vec<f64>>,
}

impl ErrorTracker {
    pub fn new() -> Self {
        Self::default()
    }

    /// Also keep every `E_k`; memory grows with the trajectory.
    pub fn with_trace() -> Self {
        Self {
            trace: Some(Vec::new()),
            ..Self::default()
        }
    }

    pub fn push<T: Field>(&mut self, k: usize, t: &T, ns: &QuatState<T>, reference: &QuatState<T>) -> f64 {
        let e = abs_error(ns, reference);
        // NaN must win so that a blown-up run cannot report a small maximum.
        if e > self.e_max || e.is_nan() && !self.e_max.is_nan() || self.samples == 0 {
            self.e_max = e;
            self.k_argmax = k;
            self.t_argmax = to_f64_lossy(t);
        }
        self.near_antipodal |= e > SQRT_2;
        self.samples += 1;
        if let Some(trace) = &mut self.trace {
            trace.push(e);
        }
        e
    }

    pub fn e_max(&self) -> f64 {
        self.e_max
    }

    pub fn finish(self, echo: RunEcho) -> ErrorReport {
        ErrorReport {
            e_max: self.e_max,
            k_argmax: self.k_argmax,
            t_argmax: self.t_argmax,
            samples: self.samples,
            near_antipodal: self.near_antipodal,
            trace: self.trace,
            echo,
        }
    }
}

/// Pairs two sample streams index by index and reports the largest error.
pub fn max_error<T, A, B>(ns: A, reference: B, echo: RunEcho) -> Result<ErrorReport>
where
    T: Field,
    A: IntoIterator<Item = Result<TrajectorySample<T>>>,
    B: IntoIterator<Item = Result<TrajectorySample<T>>>,
{
    let mut tracker = ErrorTracker::new();
    let (mut ns, mut reference) = (ns.into_iter(), reference.into_iter());
    let (mut n_ns, mut n_ref) = (0, 0);
    loop {
        match (ns.next(), reference.next()) {
            (None, None) => break,
            (Some(a), Some(b)) => {
                let (a, b) = (a?, b?);
                n_ns += 1;
                n_ref += 1;
                tracker.push(a.k, &a.t, &a.q, &b.q);
            }
            (Some(a), None) => {
                a?;
                n_ns += 1 + ns.count();
                return Err(Error::Alignment { ns: n_ns, reference: n_ref });
            }
            (None, Some(b)) => {
                b?;
                n_ref += 1 + reference.count();
                return Err(Error::Alignment { ns: n_ns, reference: n_ref });
            }
        }
    }
    Ok(tracker.finish(echo))
}
