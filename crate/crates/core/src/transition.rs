//! Single-step transition maps `q[k] ↦ q[k+1]`.
//!
//! The order-2ℓ step is the Cayley form
//! `G = [(1 − α) I + τβ Ω] / (1 + α)` with `c = τ²‖ω‖²/4` and `α = cβ²`,
//! which equals `cos δ I + sin δ Ω̂` for `δ = 2 arctan(β‖ω‖τ/2)` and is
//! therefore orthogonal and preserves the structure of
//! [`symplectic_structure`](crate::kinematics::symplectic_structure).

use std::sync::atomic::{AtomicBool, Ordering};

use crate::error::{Error, Result};
use crate::kinematics::{omega_hat, symplectic_structure, AngularVelocity, OmegaMatrix};
use crate::linalg::Mat4;
use crate::pade::{afsia_gen_beta, OrderParam, PadeCoefficients};
use crate::scalar::{is_finite, lit, to_f64_lossy, Field, Real};

/// How a [`TransitionMatrix`] was produced.
#[derive(Debug, Clone, PartialEq)]
pub enum TransitionKind<T> {
    /// Order-2ℓ Cayley step.
    Pade { order: OrderParam, beta: T, alpha: T },
    /// Exact flow `exp(τΩ/2)`.
    Exact,
}

/// A 4×4 single-step map with the parameters that produced it.
///
/// When available, `G − I` is stored separately and [`apply`](Self::apply)
/// evaluates `q + (G − I) q`. The diagonal of `G − I` is formed without
/// cancellation. [`with_norm_correction`](Self::with_norm_correction)
/// additionally removes the norm gain of the rounded increment, so a single
/// matrix can be reused for millions of steps without drift.
#[derive(Debug, Clone, PartialEq)]
pub struct TransitionMatrix<T> {
    g: Mat4<T>,
    increment: Option<Mat4<T>>,
    /// `ρ` in `q + D q + ρ (q + D q)`; zero unless corrected.
    norm_fix: T,
    kind: TransitionKind<T>,
    tau: T,
    c: T,
    gamma_sq: T,
}

impl<T: Field> TransitionMatrix<T> {
    fn identity(kind: TransitionKind<T>, tau: T) -> Self {
        Self {
            g: Mat4::identity(),
            increment: Some(Mat4::zeros()),
            norm_fix: T::zero(),
            kind,
            tau,
            c: T::zero(),
            gamma_sq: T::zero(),
        }
    }

    pub fn matrix(&self) -> &Mat4<T> {
        &self.g
    }

    /// `G − I`, when the increment form is available.
    pub fn increment(&self) -> Option<&Mat4<T>> {
        self.increment.as_ref()
    }

    /// Scale `ρ` applied as `q + D q + ρ (q + D q)`.
    pub fn norm_correction(&self) -> &T {
        &self.norm_fix
    }

    pub fn kind(&self) -> &TransitionKind<T> {
        &self.kind
    }

    pub fn tau(&self) -> &T {
        &self.tau
    }

    /// `c = τ²‖ω‖²/4`
    pub fn c(&self) -> &T {
        &self.c
    }

    pub fn gamma_sq(&self) -> &T {
        &self.gamma_sq
    }

    pub fn beta(&self) -> Option<&T> {
        match &self.kind {
            TransitionKind::Pade { beta, .. } => Some(beta),
            TransitionKind::Exact => None,
        }
    }

    pub fn alpha(&self) -> Option<&T> {
        match &self.kind {
            TransitionKind::Pade { alpha, .. } => Some(alpha),
            TransitionKind::Exact => None,
        }
    }

    /// `G q`
    pub fn apply(&self, q: &[T; 4]) -> [T; 4] {
        match &self.increment {
            Some(d) => {
                let dq = d.mul_vec(q);
                if self.norm_fix == T::zero() {
                    std::array::from_fn(|i| q[i].clone() + dq[i].clone())
                } else {
                    std::array::from_fn(|i| {
                        let fix = self.norm_fix.clone() * (q[i].clone() + dq[i].clone());
                        q[i].clone() + (dq[i].clone() + fix)
                    })
                }
            }
            None => self.g.mul_vec(q),
        }
    }
}

impl<T: Real> TransitionMatrix<T> {
    /// `G q` with the increment accumulated in double-word arithmetic, so
    /// each component is rounded once. Falls back to [`apply`](Self::apply)
    /// without an increment form.
    pub fn apply_compensated(&self, q: &[T; 4]) -> [T; 4] {
        let Some(d) = &self.increment else {
            return self.apply(q);
        };
        std::array::from_fn(|i| {
            let (mut hi, mut lo) = (q[i], T::zero());
            for (j, qj) in q.iter().enumerate() {
                let p = d[(i, j)] * *qj;
                let e = d[(i, j)].mul_add(*qj, -p);
                let (s, err) = two_sum(hi, p);
                hi = s;
                lo = lo + (err + e);
            }
            lo = lo + self.norm_fix * hi;
            hi + lo
        })
    }

    /// Rescales the increment form so that `‖q + D q‖ = ‖q‖` holds to about
    /// `ε²` for the stored entries of `D = d I + Ω(s)`.
    ///
    /// The exact gain is `‖q + D q‖² / ‖q‖² = 1 + r` with
    /// `r = 2d + d² + ‖s‖²`; `r` is evaluated with error-free products and a
    /// compensated sum and the step is scaled by `1 − r/2`. Matrices without
    /// an increment form are returned unchanged.
    pub fn with_norm_correction(mut self) -> Self {
        let Some(d) = &self.increment else {
            return self;
        };
        let diag = d[(0, 0)];
        let s = [d[(1, 0)], d[(2, 0)], d[(3, 0)]];
        let mut acc = CompensatedSum::new();
        acc.add(lit::<T>(2.0) * diag);
        for x in std::iter::once(diag).chain(s) {
            let p = x * x;
            acc.add(p);
            acc.add(x.mul_add(x, -p));
        }
        self.norm_fix = -(acc.value() * lit(0.5));
        self
    }

    /// Rotation half-angle: `2 arctan(β‖ω‖τ/2)` for a Cayley step,
    /// `‖ω‖τ/2` for the exact flow.
    pub fn delta(&self) -> T {
        let gamma = self.gamma_sq.sqrt();
        let half = lit::<T>(0.5);
        match &self.kind {
            TransitionKind::Pade { beta, .. } => {
                lit::<T>(2.0) * (*beta * gamma * self.tau * half).atan()
            }
            TransitionKind::Exact => gamma * self.tau * half,
        }
    }
}

/// `a + b = s + err` exactly.
fn two_sum<T: Real>(a: T, b: T) -> (T, T) {
    let s = a + b;
    let bb = s - a;
    (s, (a - (s - bb)) + (b - bb))
}

/// Neumaier summation.
struct CompensatedSum<T> {
    sum: T,
    comp: T,
}

impl<T: Real> CompensatedSum<T> {
    fn new() -> Self {
        Self {
            sum: T::zero(),
            comp: T::zero(),
        }
    }

    fn add(&mut self, x: T) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp = self.comp + ((self.sum - t) + x);
        } else {
            self.comp = self.comp + ((x - t) + self.sum);
        }
        self.sum = t;
    }

    fn value(&self) -> T {
        self.sum + self.comp
    }
}

/// Builds order-2ℓ steps for a fixed `(ℓ, τ)`.
///
/// The coefficient tables are generated once; each step then costs two
/// Horner evaluations and the assembly of `G`.
#[derive(Debug)]
pub struct CayleyStepper<T> {
    coeffs: PadeCoefficients<T>,
    tau: T,
    tau_sq_quarter: T,
    bound: Option<f64>,
    warned: AtomicBool,
}

impl<T: Clone> Clone for CayleyStepper<T> {
    fn clone(&self) -> Self {
        Self {
            coeffs: self.coeffs.clone(),
            tau: self.tau.clone(),
            tau_sq_quarter: self.tau_sq_quarter.clone(),
            bound: self.bound,
            warned: AtomicBool::new(self.warned.load(Ordering::Relaxed)),
        }
    }
}

impl<T: Field> CayleyStepper<T> {
    pub fn new(order: OrderParam, tau: T) -> Result<Self> {
        if !is_finite(&tau) {
            return Err(Error::InvalidArgument(format!(
                "time step must be finite, got {tau:?}"
            )));
        }
        let tau_sq_quarter = tau.clone() * tau.clone() / lit(4.0);
        Ok(Self {
            coeffs: PadeCoefficients::new(order),
            tau,
            tau_sq_quarter,
            bound: order.convergence_bound(),
            warned: AtomicBool::new(false),
        })
    }

    pub fn order(&self) -> OrderParam {
        self.coeffs.order()
    }

    pub fn tau(&self) -> &T {
        &self.tau
    }

    pub fn coefficients(&self) -> &PadeCoefficients<T> {
        &self.coeffs
    }

    /// `G(ℓ, τ)` for the rate encoded in `omega`.
    pub fn matrix(&self, omega: &OmegaMatrix<T>) -> Result<TransitionMatrix<T>> {
        let order = self.order();
        let gamma_sq = omega.gamma_sq().clone();
        if gamma_sq == T::zero() {
            let beta = self.coeffs.beta(&T::zero())?;
            return Ok(TransitionMatrix::identity(
                TransitionKind::Pade {
                    order,
                    beta,
                    alpha: T::zero(),
                },
                self.tau.clone(),
            ));
        }
        let c = self.tau_sq_quarter.clone() * gamma_sq.clone();
        let beta = self.coeffs.beta(&c)?;
        self.check_domain(&c);
        let alpha = c.clone() * beta.clone() * beta.clone();
        let inv = T::one() / (T::one() + alpha.clone());
        let diag = (T::one() - alpha.clone()) * inv.clone();
        let diag_inc = -(lit::<T>(2.0) * alpha.clone() * inv.clone());
        let off = self.tau.clone() * beta.clone() * inv;
        let scaled = omega.matrix().scale(&off);
        let mut g = scaled.clone();
        let mut d = scaled;
        for i in 0..4 {
            g[(i, i)] = diag.clone();
            d[(i, i)] = diag_inc.clone();
        }
        Ok(TransitionMatrix {
            g,
            increment: Some(d),
            norm_fix: T::zero(),
            kind: TransitionKind::Pade { order, beta, alpha },
            tau: self.tau.clone(),
            c,
            gamma_sq,
        })
    }

    fn check_domain(&self, c: &T) {
        if let Some(bound) = self.bound {
            if to_f64_lossy(c) >= bound && !self.warned.swap(true, Ordering::Relaxed) {
                log::warn!(
                    "c = {c:?} is beyond the convergence bound {bound} for ell = {}; accuracy degrades",
                    self.order().ell()
                );
            }
        }
    }
}

/// `G(ℓ, τ)` for a constant rate. `ω = 0` yields exactly `I`.
pub fn transition_matrix<T: Field>(
    order: OrderParam,
    tau: T,
    omega: &AngularVelocity<T>,
) -> Result<TransitionMatrix<T>> {
    CayleyStepper::new(order, tau)?.matrix(&OmegaMatrix::new(omega))
}

/// Straight transcription of the textbook step: β is regenerated from η on
/// every call and `G` is assembled entry by entry and applied as a dense
/// product. Numerically equivalent to [`transition_matrix`]; its arithmetic
/// is what the operation-count model describes.
pub fn literal_transition_matrix<T: Field>(
    order: OrderParam,
    tau: T,
    w: [T; 3],
) -> Result<TransitionMatrix<T>> {
    let omega = crate::kinematics::build_omega(w)?;
    let gamma_sq = omega.gamma_sq().clone();
    let c = tau.clone() * tau.clone() * gamma_sq.clone() / lit(4.0);
    let beta = afsia_gen_beta(order, &c)?;
    let alpha = c.clone() * beta.clone() * beta.clone();
    let one_minus = T::one() - alpha.clone();
    let one_plus = T::one() + alpha.clone();
    let tau_beta = tau.clone() * beta.clone();
    let m = omega.matrix();
    let g = Mat4::from_fn(|i, j| {
        if i == j {
            one_minus.clone() / one_plus.clone()
        } else {
            tau_beta.clone() * m[(i, j)].clone() / one_plus.clone()
        }
    });
    Ok(TransitionMatrix {
        g,
        increment: None,
        norm_fix: T::zero(),
        kind: TransitionKind::Pade { order, beta, alpha },
        tau,
        c,
        gamma_sq,
    })
}

/// Exact one-step flow `exp(τΩ/2) = cos(‖ω‖τ/2) I + sin(‖ω‖τ/2) Ω̂`.
pub fn analytic_transition<T: Real>(tau: T, omega: &AngularVelocity<T>) -> TransitionMatrix<T> {
    let om = OmegaMatrix::new(omega);
    let gamma_sq = *om.gamma_sq();
    if gamma_sq == T::zero() {
        return TransitionMatrix::identity(TransitionKind::Exact, tau);
    }
    let half = lit::<T>(0.5);
    let theta = om.gamma() * tau * half;
    let (s, c) = theta.sin_cos();
    let hat = omega_hat(&om).expect("nonzero rate");
    let s_half = (theta * half).sin();
    let scaled = hat.scale(&s);
    let mut g = scaled.clone();
    let mut d = scaled;
    for i in 0..4 {
        g[(i, i)] = c;
        d[(i, i)] = -(lit::<T>(2.0) * s_half * s_half);
    }
    TransitionMatrix {
        g,
        increment: Some(d),
        norm_fix: T::zero(),
        kind: TransitionKind::Exact,
        c: tau * tau * gamma_sq / lit(4.0),
        tau,
        gamma_sq,
    }
}

/// `G⁻¹ = Gᵀ`, which for a constant rate is the step with `−τ`.
pub fn inverse_transition<T: Field>(g: &TransitionMatrix<T>) -> TransitionMatrix<T> {
    TransitionMatrix {
        g: g.g.transpose(),
        increment: g.increment.as_ref().map(Mat4::transpose),
        norm_fix: g.norm_fix.clone(),
        kind: g.kind.clone(),
        tau: -g.tau.clone(),
        c: g.c.clone(),
        gamma_sq: g.gamma_sq.clone(),
    }
}

/// Deviations of the order-2ℓ step from the exact flow at `x = ‖ω‖τ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransitionErrorTerms<T> {
    /// `cos(x/2) − (1 − α)/(1 + α)`
    pub f1: T,
    /// `sin(x/2) − xβ/(1 + α)`
    pub f2: T,
    /// `2(|f1| + |f2|)`
    pub bound: T,
}

pub fn transition_error_terms<T: Real>(order: OrderParam, x: T) -> Result<TransitionErrorTerms<T>> {
    if !x.is_finite() || x < T::zero() {
        return Err(Error::InvalidArgument(format!(
            "error terms need finite x >= 0, got {x:?}"
        )));
    }
    let half = lit::<T>(0.5);
    let c = x * x / lit(4.0);
    let beta = PadeCoefficients::new(order).beta(&c)?;
    let alpha = c * beta * beta;
    let (s, co) = (x * half).sin_cos();
    let f1 = co - (T::one() - alpha) / (T::one() + alpha);
    let f2 = s - x * beta / (T::one() + alpha);
    Ok(TransitionErrorTerms {
        f1,
        f2,
        bound: lit::<T>(2.0) * (f1.abs() + f2.abs()),
    })
}

/// `‖GᵀG − I‖_F`
pub fn orthogonality_defect<T: Real>(g: &Mat4<T>) -> T {
    g.transpose().mul(g).distance(&Mat4::identity())
}

/// `‖Gᵀ J G − J‖_F` for the structure matrix `J`.
pub fn symplecticity_defect<T: Real>(g: &Mat4<T>) -> T {
    let j = symplectic_structure::<T>();
    g.transpose().mul(&j).mul(g).distance(&j)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ord(ell: u32) -> OrderParam {
        OrderParam::new(ell).unwrap()
    }

    fn av(w: [f64; 3]) -> AngularVelocity<f64> {
        AngularVelocity::from_components(w).unwrap()
    }

    fn max_abs_diff(a: &Mat4<f64>, b: &Mat4<f64>) -> f64 {
        let d = a.sub(b);
        d.rows().iter().flatten().fold(0.0, |m, x| m.max(x.abs()))
    }

    #[test]
    fn zero_rate_is_identity() {
        for ell in [1, 2, 7] {
            let g = transition_matrix(ord(ell), 0.3, &av([0.0; 3])).unwrap();
            assert_eq!(*g.matrix(), Mat4::identity());
            assert_eq!(g.delta(), 0.0);
            assert_eq!(g.apply(&[0.5, 0.5, 0.5, 0.5]), [0.5; 4]);
        }
        assert_eq!(
            *analytic_transition(1.0, &av([0.0; 3])).matrix(),
            Mat4::identity()
        );
    }

    #[test]
    fn first_order_hand_evaluation() {
        let w = av([2.0, 0.0, 0.0]);
        let g = transition_matrix(ord(1), 0.1, &w).unwrap();
        assert!((g.c() - 0.01).abs() < 1e-17);
        assert_eq!(*g.beta().unwrap(), 0.5);
        assert!((g.alpha().unwrap() - 0.0025).abs() < 1e-17);
        let om = OmegaMatrix::new(&w);
        let expected = Mat4::identity()
            .scale(&0.9975)
            .add(&om.matrix().scale(&0.05))
            .scale(&(1.0 / 1.0025));
        assert!(max_abs_diff(g.matrix(), &expected) < 1e-15);
    }

    #[test]
    fn second_order_unit_c() {
        let w = av([0.0, 1.2, 1.6]);
        let g = transition_matrix(ord(2), 1.0, &w).unwrap();
        assert!((g.c() - 1.0).abs() < 1e-15);
        assert!((g.beta().unwrap() - 6.0 / 11.0).abs() < 1e-15);
        assert!((g.alpha().unwrap() - 36.0 / 121.0).abs() < 1e-15);
        assert!(orthogonality_defect(g.matrix()) <= 1e-14);
        assert!((g.matrix().determinant() - 1.0).abs() <= 1e-13);
    }

    #[test]
    fn increment_form_matches_dense_product() {
        let w = av([0.3, -1.1, 2.5]);
        let g = transition_matrix(ord(3), 0.05, &w).unwrap();
        let q = [0.5, -0.5, 0.5, 0.5];
        let dense = g.matrix().mul_vec(&q);
        let inc = g.apply(&q);
        for i in 0..4 {
            assert!((dense[i] - inc[i]).abs() < 1e-15);
        }
    }

    #[test]
    fn quarter_turn_analytic_step() {
        // ‖ω‖τ/2 = π/2
        let w = av([1.0, 0.0, 0.0]);
        let g = analytic_transition(std::f64::consts::PI, &w);
        let hat = omega_hat(&OmegaMatrix::new(&w)).unwrap();
        assert!(max_abs_diff(g.matrix(), &hat) < 1e-15);
        let sq = g.matrix().mul(g.matrix());
        assert!(max_abs_diff(&sq, &Mat4::identity().neg()) <= 1e-14);
        assert!((g.delta() - std::f64::consts::FRAC_PI_2).abs() < 1e-15);
    }

    #[test]
    fn inverse_is_transpose_and_negative_step() {
        let g = transition_matrix(ord(2), 0.2, &av([0.0; 3])).unwrap();
        assert_eq!(*inverse_transition(&g).matrix(), Mat4::identity());

        let w = av([0.7, -1.9, 0.4]);
        let g = transition_matrix(ord(3), 0.2, &w).unwrap();
        let inv = inverse_transition(&g);
        let prod = inv.matrix().mul(g.matrix());
        assert!(max_abs_diff(&prod, &Mat4::identity()) <= 1e-14);
        let back = transition_matrix(ord(3), -0.2, &w).unwrap();
        assert!(max_abs_diff(inv.matrix(), back.matrix()) <= 1e-14);
        assert_eq!(*inv.tau(), -0.2);
    }

    #[test]
    fn first_order_is_cayley_of_quarter_step() {
        // G(1, τ) = (I + A)(I − A)⁻¹ with A = τΩ/4, checked as (I − A) G = I + A
        let w = av([1.3, 0.2, -2.2]);
        let tau = 0.37;
        let g = transition_matrix(ord(1), tau, &w).unwrap();
        let a = OmegaMatrix::new(&w).matrix().scale(&(tau / 4.0));
        let id = Mat4::identity();
        let lhs = id.sub(&a).mul(g.matrix());
        assert!(max_abs_diff(&lhs, &id.add(&a)) <= 1e-15);
    }

    #[test]
    fn literal_kernel_matches_cached_kernel() {
        let w = [0.4, 2.0, -1.0];
        for ell in 1..=8 {
            let fast = transition_matrix(ord(ell), 0.1, &av(w)).unwrap();
            let lit = literal_transition_matrix(ord(ell), 0.1, w).unwrap();
            assert!(max_abs_diff(fast.matrix(), lit.matrix()) <= 1e-15);
        }
    }

    #[test]
    fn error_terms_small_x() {
        let t = transition_error_terms(ord(3), 0.0).unwrap();
        assert_eq!((t.f1, t.f2, t.bound), (0.0, 0.0, 0.0));

        let x: f64 = 0.01;
        let t = transition_error_terms(ord(1), x).unwrap();
        let lead = x.powi(3) / 96.0;
        assert!((t.f2 - lead).abs() <= 0.01 * lead);

        let x: f64 = 0.1;
        let t = transition_error_terms(ord(2), x).unwrap();
        let lead = x.powi(5) / 11520.0;
        assert!((t.bound - lead).abs() <= 0.05 * lead);

        assert!(transition_error_terms(ord(1), -1.0).is_err());
    }

    #[test]
    fn f32_steps_are_orthogonal() {
        let w = AngularVelocity::<f32>::new(0.5, -1.0, 2.0).unwrap();
        let g = transition_matrix(ord(4), 0.1f32, &w).unwrap();
        assert!(orthogonality_defect(g.matrix()) < 1e-6);
        assert!(symplecticity_defect(g.matrix()) < 1e-6);
    }
}
