//! Quaternion kinematics: state and angular-velocity types, the Ω(ω) matrix
//! of dq/dt = ½ Ω(ω) q, and the constant skew form the transition maps
//! preserve.

use crate::error::{Error, Result};
use crate::linalg::Mat4;
use crate::scalar::{is_finite, Field, Real};

/// Attitude quaternion `q = [e0, e1, e2, e3]ᵀ`, scalar part first.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuatState<T> {
    pub e: [T; 4],
}

impl<T: Field> QuatState<T> {
    pub fn new(e0: T, e1: T, e2: T, e3: T) -> Self {
        Self { e: [e0, e1, e2, e3] }
    }

    pub fn identity() -> Self {
        Self::new(T::one(), T::zero(), T::zero(), T::zero())
    }

    pub fn norm_sq(&self) -> T {
        let mut acc = T::zero();
        for x in &self.e {
            acc = acc + x.clone() * x.clone();
        }
        acc
    }

    pub fn is_finite(&self) -> bool {
        self.e.iter().all(is_finite)
    }
}

impl<T: Real> QuatState<T> {
    pub fn norm(&self) -> T {
        self.norm_sq().sqrt()
    }

    pub fn normalized(&self) -> Result<Self> {
        let n = self.norm();
        if !n.is_finite() || n == T::zero() {
            return Err(Error::InvalidArgument(format!(
                "cannot normalize quaternion {:?}",
                self.e
            )));
        }
        Ok(Self {
            e: self.e.map(|x| x / n),
        })
    }
}

impl<T> From<[T; 4]> for QuatState<T> {
    fn from(e: [T; 4]) -> Self {
        Self { e }
    }
}

/// Body angular velocity `ω = [ω1, ω2, ω3]ᵀ` in rad/s. Components are
/// always finite.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AngularVelocity<T> {
    w: [T; 3],
}

impl<T: Field> AngularVelocity<T> {
    pub fn new(w1: T, w2: T, w3: T) -> Result<Self> {
        Self::from_components([w1, w2, w3])
    }

    pub fn from_components(w: [T; 3]) -> Result<Self> {
        if !w.iter().all(is_finite) {
            return Err(Error::InvalidArgument(format!(
                "angular velocity must be finite, got {w:?}"
            )));
        }
        Ok(Self { w })
    }

    pub fn zero() -> Self {
        Self {
            w: [T::zero(), T::zero(), T::zero()],
        }
    }

    pub fn components(&self) -> &[T; 3] {
        &self.w
    }

    /// ω1² + ω2² + ω3²
    pub fn norm_sq(&self) -> T {
        let [w1, w2, w3] = &self.w;
        w1.clone() * w1.clone() + w2.clone() * w2.clone() + w3.clone() * w3.clone()
    }
}

impl<T: Real> AngularVelocity<T> {
    pub fn norm(&self) -> T {
        self.norm_sq().sqrt()
    }
}

/// The skew-symmetric matrix Ω(ω) together with the cached ‖ω‖².
#[derive(Debug, Clone, PartialEq)]
pub struct OmegaMatrix<T> {
    m: Mat4<T>,
    gamma_sq: T,
}

impl<T: Field> OmegaMatrix<T> {
    pub fn new(omega: &AngularVelocity<T>) -> Self {
        let [w1, w2, w3] = omega.components().clone();
        let z = T::zero();
        // Off-diagonal entries are copies or negations of ω, so Mᵀ = −M holds
        // bit for bit.
        let m = Mat4::from_rows([
            [z.clone(), -w1.clone(), -w2.clone(), -w3.clone()],
            [w1.clone(), z.clone(), w3.clone(), -w2.clone()],
            [w2.clone(), -w3.clone(), z.clone(), w1.clone()],
            [w3, w2, -w1, z],
        ]);
        Self {
            m,
            gamma_sq: omega.norm_sq(),
        }
    }

    pub fn matrix(&self) -> &Mat4<T> {
        &self.m
    }

    pub fn gamma_sq(&self) -> &T {
        &self.gamma_sq
    }
}

impl<T: Real> OmegaMatrix<T> {
    /// ‖ω‖
    pub fn gamma(&self) -> T {
        self.gamma_sq.sqrt()
    }
}

/// Builds Ω(ω) from raw components, rejecting non-finite input.
pub fn build_omega<T: Field>(w: [T; 3]) -> Result<OmegaMatrix<T>> {
    Ok(OmegaMatrix::new(&AngularVelocity::from_components(w)?))
}

/// Ω̂ = Ω / ‖ω‖, which squares to −I.
pub fn omega_hat<T: Real>(omega: &OmegaMatrix<T>) -> Result<Mat4<T>> {
    let gamma = omega.gamma();
    if gamma == T::zero() {
        return Err(Error::DivisionByZero("omega_hat of a zero angular velocity"));
    }
    let inv = T::one() / gamma;
    Ok(omega.m.scale(&inv))
}

/// Left multiplication by the unit quaternion `i`:
/// `(e0, e1, e2, e3) ↦ (−e1, e0, −e3, e2)`.
///
/// Ω(ω) is right multiplication by the pure quaternion ω, so this matrix
/// commutes with every Ω(ω); it is skew and squares to −I. The Cayley-form
/// transition maps satisfy `Gᵀ J G = J` for it.
pub fn symplectic_structure<T: Field>() -> Mat4<T> {
    let (o, z) = (T::one(), T::zero());
    Mat4::from_fn(|i, j| match (i, j) {
        (0, 1) | (2, 3) => -o.clone(),
        (1, 0) | (3, 2) => o.clone(),
        _ => z.clone(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn om(w: [f64; 3]) -> OmegaMatrix<f64> {
        build_omega(w).unwrap()
    }

    fn max_abs(m: &Mat4<f64>) -> f64 {
        m.rows().iter().flatten().fold(0.0, |a, x| a.max(x.abs()))
    }

    #[test]
    fn zero_rate_gives_zero_matrix() {
        let o = om([0.0; 3]);
        assert_eq!(*o.matrix(), Mat4::zeros());
        assert_eq!(o.gamma(), 0.0);
    }

    #[test]
    fn unit_roll_rate_layout() {
        let o = om([1.0, 0.0, 0.0]);
        let expected = Mat4::from_rows([
            [0.0, -1.0, 0.0, 0.0],
            [1.0, 0.0, 0.0, 0.0],
            [0.0, 0.0, 0.0, 1.0],
            [0.0, 0.0, -1.0, 0.0],
        ]);
        assert_eq!(*o.matrix(), expected);
    }

    #[test]
    fn square_is_minus_gamma_squared_identity() {
        // ‖ω‖ = 2
        let w = [2.0 / 3.0, -4.0 / 3.0, 4.0 / 3.0];
        let o = om(w);
        assert!((o.gamma() - 2.0).abs() < 1e-15);
        let sq = o.matrix().mul(o.matrix());
        let residual = sq.add(&Mat4::identity().scale(&4.0));
        assert!(max_abs(&residual) <= 1e-13);
    }

    #[test]
    fn non_finite_rate_rejected() {
        assert!(matches!(
            build_omega([f64::NAN, 0.0, 0.0]),
            Err(Error::InvalidArgument(_))
        ));
        assert!(build_omega([0.0, f64::INFINITY, 0.0]).is_err());
    }

    #[test]
    fn omega_hat_scaling_and_square() {
        let hat = omega_hat(&om([2.0, 0.0, 0.0])).unwrap();
        assert_eq!(hat, *om([1.0, 0.0, 0.0]).matrix());

        let hat = omega_hat(&om([1.0, 1.0, 1.0])).unwrap();
        let residual = hat.mul(&hat).add(&Mat4::identity());
        assert!(max_abs(&residual) <= 1e-13);

        assert!(matches!(
            omega_hat(&om([0.0; 3])),
            Err(Error::DivisionByZero(_))
        ));
    }

    #[test]
    fn structure_matrix_is_a_complex_structure() {
        let j = symplectic_structure::<f64>();
        assert_eq!(j.transpose(), j.neg());
        assert_eq!(j.mul(&j), Mat4::identity().neg());
        let q = [1.0, 2.0, 3.0, 4.0];
        assert_eq!(j.mul_vec(&q), [-2.0, 1.0, -4.0, 3.0]);
    }

    #[test]
    fn structure_commutes_with_omega() {
        let j = symplectic_structure::<f64>();
        for w in [[1.0, 0.0, 0.0], [0.3, -2.0, 0.7], [-5.0, 4.0, 1e-3]] {
            let o = om(w);
            let comm = j.mul(o.matrix()).sub(&o.matrix().mul(&j));
            assert!(max_abs(&comm) <= 1e-15 * o.gamma());
        }
    }

    #[test]
    fn normalization() {
        let q = QuatState::new(3.0, 0.0, 4.0, 0.0).normalized().unwrap();
        assert_eq!(q.e, [0.6, 0.0, 0.8, 0.0]);
        assert!(QuatState::new(0.0, 0.0, 0.0, 0.0).normalized().is_err());
    }
}
