//! Diagonal Padé machinery for exp(x).
//!
//! The order-ℓ diagonal approximant is `P_ℓ(x) / P_ℓ(−x)` with
//!
//! ```text
//! P_ℓ(x) = 1 + Σ_{k=0}^{ℓ−1} x^{k+1} Π_{r=0}^{k} η_r,   η_r = (ℓ−r) / ((2ℓ−r)(r+1)).
//! ```
//!
//! When `x² = −c` the even and odd parts split into `d(−c) + x·n(−c)`, where
//! `n` has coefficients `a_j` (degree `s1 = ⌊(ℓ−1)/2⌋`) and `d` has
//! coefficients `b_j` (degree `s2 = ⌊ℓ/2⌋`). The approximant then collapses
//! to the Cayley transform of `β(ℓ, c)·x` with `β = n(−c) / d(−c)`.
//!
//! Coefficients are built from running products of η, never from
//! factorials, so large ℓ does not overflow.

use std::sync::OnceLock;

use crate::error::{Error, Result};
use crate::scalar::{from_count, is_finite, lit, to_f64_lossy, Field};

/// Largest supported order parameter.
pub const MAX_ORDER: u32 = 32;

/// Relative threshold below which `d(−c)` is treated as a pole.
pub const DENOMINATOR_TOLERANCE: f64 = 1e-12;

/// Order parameter ℓ; the integrator built from it has accuracy order 2ℓ.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct OrderParam(u32);

impl OrderParam {
    pub fn new(ell: u32) -> Result<Self> {
        if !(1..=MAX_ORDER).contains(&ell) {
            return Err(Error::InvalidArgument(format!(
                "order parameter must be in 1..={MAX_ORDER}, got {ell}"
            )));
        }
        Ok(Self(ell))
    }

    pub fn ell(self) -> u32 {
        self.0
    }

    /// Degree of the numerator polynomial `n`.
    pub fn s1(self) -> usize {
        ((self.0 - 1) / 2) as usize
    }

    /// Degree of the denominator polynomial `d`.
    pub fn s2(self) -> usize {
        (self.0 / 2) as usize
    }

    /// Accuracy order 2ℓ.
    pub fn accuracy(self) -> u32 {
        2 * self.0
    }

    /// Smallest positive `c` at which `d(s2, −c)` vanishes, i.e. the edge of
    /// the usable range of β. `None` for ℓ = 1, where β ≡ 1/2.
    ///
    /// For ℓ ≥ 4 this sits just below π² and tends to it as ℓ grows.
    pub fn convergence_bound(self) -> Option<f64> {
        static BOUNDS: OnceLock<Vec<Option<f64>>> = OnceLock::new();
        BOUNDS.get_or_init(|| (1..=MAX_ORDER).map(|ell| OrderParam(ell).first_pole()).collect())
            [(self.0 - 1) as usize]
    }

    fn first_pole(self) -> Option<f64> {
        if self.s2() == 0 {
            return None;
        }
        let coeffs = cached_coefficients(self);
        let d = |c: f64| horner(&coeffs.b, -c).expect("non-empty");
        let mut lo = 0.0;
        let step = 1e-2;
        while lo < 1e4 {
            let hi = lo + step;
            if d(hi) <= 0.0 {
                let (mut lo, mut hi) = (lo, hi);
                for _ in 0..200 {
                    let mid = 0.5 * (lo + hi);
                    if d(mid) > 0.0 {
                        lo = mid;
                    } else {
                        hi = mid;
                    }
                }
                return Some(lo);
            }
            lo = hi;
        }
        None
    }
}

impl TryFrom<u32> for OrderParam {
    type Error = Error;

    fn try_from(ell: u32) -> Result<Self> {
        Self::new(ell)
    }
}

/// `η_k^ℓ = (ℓ − k) / ((2ℓ − k)(k + 1))` for `0 ≤ k ≤ ℓ − 1`.
///
/// The integer numerator and denominator are formed exactly, so only the
/// final division rounds.
pub fn eta<T: Field>(ell: u32, k: u32) -> Result<T> {
    if ell == 0 || k >= ell {
        return Err(Error::InvalidArgument(format!(
            "eta index k = {k} outside 0..{ell}"
        )));
    }
    let (ell, k) = (u64::from(ell), u64::from(k));
    let num = T::from_u64(ell - k).expect("small integer");
    let den = T::from_u64((2 * ell - k) * (k + 1)).expect("small integer");
    Ok(num / den)
}

/// η evaluated with scalar arithmetic throughout: three multiplications
/// (counting the division) and three additions.
fn eta_arith<T: Field>(ell: &T, k: usize) -> T {
    let k: T = from_count(k);
    let two: T = lit(2.0);
    (ell.clone() - k.clone()) / ((two * ell.clone() - k.clone()) * (k + T::one()))
}

/// Horner evaluation of `c[0] + c[1] x + … + c[s] x^s` using `s`
/// multiplications and `s` additions.
pub fn horner<T: Field>(coeffs: &[T], x: T) -> Result<T> {
    let (last, rest) = coeffs
        .split_last()
        .ok_or_else(|| Error::InvalidArgument("horner needs at least one coefficient".into()))?;
    let mut acc = last.clone();
    for c in rest.iter().rev() {
        acc = acc * x.clone() + c.clone();
    }
    Ok(acc)
}

/// Split-polynomial coefficients `a_0..a_{s1}` (numerator) and
/// `b_0..b_{s2}` (denominator) for one order parameter.
#[derive(Debug, Clone, PartialEq)]
pub struct PadeCoefficients<T> {
    order: OrderParam,
    pub a: Vec<T>,
    pub b: Vec<T>,
}

impl<T: Field> PadeCoefficients<T> {
    /// Default generator (the alternating scheme).
    pub fn new(order: OrderParam) -> Self {
        Self::alternative(order)
    }

    /// Two independent recurrences:
    /// `a_{j+1} = a_j η_{2j+1} η_{2j+2}` and `b_{j+1} = b_j η_{2j} η_{2j+1}`.
    pub fn parallel(order: OrderParam) -> Self {
        let ell = order.ell();
        let e = |k: usize| -> T { eta(ell, k as u32).expect("index in range") };
        let mut a = vec![lit::<T>(0.5)];
        for j in 0..order.s1() {
            let next = a[j].clone() * e(2 * j + 1) * e(2 * j + 2);
            a.push(next);
        }
        let mut b = vec![T::one()];
        for j in 0..order.s2() {
            let next = b[j].clone() * e(2 * j) * e(2 * j + 1);
            b.push(next);
        }
        Self { order, a, b }
    }

    /// Single interleaved recurrence `b_0 → a_0 → b_1 → a_1 → …`, with one
    /// extra `a_{s1} → b_{s2}` step when ℓ is even.
    pub fn alternative(order: OrderParam) -> Self {
        let ell = order.ell();
        let (s1, s2) = (order.s1(), order.s2());
        let e = |k: usize| -> T { eta(ell, k as u32).expect("index in range") };
        let mut a = Vec::with_capacity(s1 + 1);
        let mut b = Vec::with_capacity(s2 + 1);
        b.push(T::one());
        a.push(lit::<T>(0.5));
        for j in 0..s1 {
            let bj = a[j].clone() * e(2 * j + 1);
            let aj = bj.clone() * e(2 * j + 2);
            b.push(bj);
            a.push(aj);
        }
        if ell.is_multiple_of(2) {
            let tail = a[s1].clone() * e(2 * s1 + 1);
            b.push(tail);
        }
        Self { order, a, b }
    }

    pub fn order(&self) -> OrderParam {
        self.order
    }

    /// `n(s1, −c)`
    pub fn numerator(&self, c: &T) -> T {
        horner(&self.a, -c.clone()).expect("a is never empty")
    }

    /// `d(s2, −c)`
    pub fn denominator(&self, c: &T) -> T {
        horner(&self.b, -c.clone()).expect("b is never empty")
    }

    /// `β(ℓ, c) = n(s1, −c) / d(s2, −c)` for `c ≥ 0`.
    ///
    /// Fails with [`Error::SingularDenominator`] when `|d(−c)|` falls below
    /// `1e-12 · max(1, d(+c))`; `d(+c) = Σ b_j c^j` is the magnitude scale of
    /// the terms being cancelled.
    pub fn beta(&self, c: &T) -> Result<T> {
        if !is_finite(c) || *c < T::zero() {
            return Err(Error::InvalidArgument(format!(
                "beta needs a finite c >= 0, got {c:?}"
            )));
        }
        let n = self.numerator(c);
        let d = self.denominator(c);
        if self.b.len() > 1 {
            let scale = horner(&self.b, c.clone()).expect("b is never empty");
            let scale = if scale > T::one() { scale } else { T::one() };
            let tol = lit::<T>(DENOMINATOR_TOLERANCE) * scale;
            if crate::scalar::abs(&d) < tol {
                return Err(Error::SingularDenominator {
                    ell: self.order.ell(),
                    c: to_f64_lossy(c),
                });
            }
        }
        Ok(n / d)
    }

    /// Coefficients of `P_ℓ(x)` in ascending powers, rebuilt by interleaving
    /// `b_0, a_0, b_1, a_1, …`.
    pub fn polynomial_coefficients(&self) -> Vec<T> {
        let mut p = Vec::with_capacity(self.a.len() + self.b.len());
        for j in 0..self.b.len().max(self.a.len()) {
            if let Some(b) = self.b.get(j) {
                p.push(b.clone());
            }
            if let Some(a) = self.a.get(j) {
                p.push(a.clone());
            }
        }
        p
    }
}

/// Shared `f64` coefficient tables, built on first use.
pub fn cached_coefficients(order: OrderParam) -> &'static PadeCoefficients<f64> {
    static TABLE: OnceLock<Vec<PadeCoefficients<f64>>> = OnceLock::new();
    let table = TABLE.get_or_init(|| {
        (1..=MAX_ORDER)
            .map(|ell| PadeCoefficients::new(OrderParam(ell)))
            .collect()
    });
    &table[(order.ell() - 1) as usize]
}

/// A β value together with the arguments that produced it.
#[derive(Debug, Clone, PartialEq)]
pub struct BetaValue<T> {
    pub beta: T,
    pub order: OrderParam,
    pub c: T,
}

/// One-shot β(ℓ, c). Logs a warning when `c` lies beyond the usable range
/// of the rational form, where accuracy degrades.
pub fn beta<T: Field>(order: OrderParam, c: T) -> Result<BetaValue<T>> {
    let coeffs = PadeCoefficients::<T>::new(order);
    let value = coeffs.beta(&c)?;
    if let Some(bound) = order.convergence_bound() {
        if to_f64_lossy(&c) >= bound {
            log::warn!(
                "beta(ell = {}, c = {:?}) evaluated beyond its convergence bound {bound}",
                order.ell(),
                c
            );
        }
    }
    Ok(BetaValue {
        beta: value,
        order,
        c,
    })
}

fn split_poly_beta<T: Field>(order: OrderParam, a: &[T], b: &[T], c: &T) -> Result<T> {
    let x = -c.clone();
    let n = horner(a, x.clone())?;
    let d = horner(b, x)?;
    if d == T::zero() {
        return Err(Error::SingularDenominator {
            ell: order.ell(),
            c: to_f64_lossy(c),
        });
    }
    Ok(n / d)
}

/// β computed the way a straight transcription of the parallel scheme does
/// it: both coefficient tables are regenerated from scalar η arithmetic on
/// every call. Used to instrument operation counts.
pub fn pfsia_gen_beta<T: Field>(order: OrderParam, c: &T) -> Result<T> {
    let ell: T = from_count(order.ell() as usize);
    let mut a = vec![lit::<T>(0.5)];
    for j in 0..order.s1() {
        let next = a[j].clone() * eta_arith(&ell, 2 * j + 1) * eta_arith(&ell, 2 * j + 2);
        a.push(next);
    }
    let mut b = vec![T::one()];
    for j in 0..order.s2() {
        let next = b[j].clone() * eta_arith(&ell, 2 * j) * eta_arith(&ell, 2 * j + 1);
        b.push(next);
    }
    split_poly_beta(order, &a, &b, c)
}

/// Alternating-scheme counterpart of [`pfsia_gen_beta`].
pub fn afsia_gen_beta<T: Field>(order: OrderParam, c: &T) -> Result<T> {
    let ell: T = from_count(order.ell() as usize);
    let (s1, s2) = (order.s1(), order.s2());
    let mut a = Vec::with_capacity(s1 + 1);
    let mut b = Vec::with_capacity(s2 + 1);
    b.push(T::one());
    a.push(lit::<T>(0.5));
    for j in 0..s1 {
        let bj = a[j].clone() * eta_arith(&ell, 2 * j + 1);
        let aj = bj.clone() * eta_arith(&ell, 2 * j + 2);
        b.push(bj);
        a.push(aj);
    }
    if order.ell().is_multiple_of(2) {
        let tail = a[s1].clone() * eta_arith(&ell, 2 * s1 + 1);
        b.push(tail);
    }
    split_poly_beta(order, &a, &b, c)
}
