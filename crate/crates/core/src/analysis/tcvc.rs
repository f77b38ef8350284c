//! Operation-count model: closed-form multiplication/addition counts per
//! algorithm, and a counting scalar to measure the real kernels.

use std::cell::Cell;
use std::fmt;
use std::num::FpCategory;
use std::ops::{Add, Div, Mul, Neg, Rem, Sub};
use std::str::FromStr;

use num_traits::{Float, FloatConst, FromPrimitive, Num, NumCast, One, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::kinematics::QuatState;
use crate::pade::OrderParam;
use crate::propagator::{propagate_lti, propagate_ltv, PropagationConfig, StepKernel};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Algorithm {
    Eta,
    Polynomial,
    PFsiaGenBeta,
    AFsiaGenBeta,
    SpTranMatQkde,
    EoEsgaQkdeLTV,
    EoEsgaQkdeLTI,
}

impl Algorithm {
    pub const ALL: [Algorithm; 7] = [
        Algorithm::Eta,
        Algorithm::Polynomial,
        Algorithm::PFsiaGenBeta,
        Algorithm::AFsiaGenBeta,
        Algorithm::SpTranMatQkde,
        Algorithm::EoEsgaQkdeLTV,
        Algorithm::EoEsgaQkdeLTI,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Algorithm::Eta => "Eta",
            Algorithm::Polynomial => "Polynomial",
            Algorithm::PFsiaGenBeta => "PFsiaGenBeta",
            Algorithm::AFsiaGenBeta => "AFsiaGenBeta",
            Algorithm::SpTranMatQkde => "SpTranMatQkde",
            Algorithm::EoEsgaQkdeLTV => "EoEsgaQkdeLTV",
            Algorithm::EoEsgaQkdeLTI => "EoEsgaQkdeLTI",
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Algorithm::ALL
            .into_iter()
            .find(|a| a.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::UnknownAlgorithm(s.to_owned()))
    }
}

/// A (multiplications, additions) pair. Divisions count as
/// multiplications and subtractions as additions.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash)]
pub struct OpCounts {
    pub mul: u64,
    pub add: u64,
}

impl OpCounts {
    pub const fn new(mul: u64, add: u64) -> Self {
        Self { mul, add }
    }
}

impl Sub for OpCounts {
    type Output = OpCounts;

    fn sub(self, rhs: Self) -> Self {
        OpCounts::new(self.mul - rhs.mul, self.add - rhs.add)
    }
}

impl fmt::Display for OpCounts {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", self.mul, self.add)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TcvcModel {
    pub algorithm: Algorithm,
    pub order: OrderParam,
    pub n: u64,
    pub predicted: OpCounts,
    pub measured: Option<OpCounts>,
}

impl TcvcModel {
    pub fn with_measured(mut self, measured: OpCounts) -> Self {
        self.measured = Some(measured);
        self
    }

    /// `(measured − predicted)/predicted` for multiplications and additions.
    pub fn relative_deviation(&self) -> Option<(f64, f64)> {
        let m = self.measured?;
        let rel = |got: u64, want: u64| (got as f64 - want as f64) / want as f64;
        Some((rel(m.mul, self.predicted.mul), rel(m.add, self.predicted.add)))
    }
}

/// Published counts evaluated at `(ℓ, n)`. For `Polynomial`, `n` is the
/// degree `s`; `Eta`, the β generators and `SpTranMatQkde` ignore `n`.
pub fn tcvc_predict(algorithm: Algorithm, order: OrderParam, n: u64) -> TcvcModel {
    let l = order.ell() as u64;
    let predicted = match algorithm {
        Algorithm::Eta => OpCounts::new(3, 3),
        Algorithm::Polynomial => OpCounts::new(n, n),
        Algorithm::PFsiaGenBeta => OpCounts::new(11 * l - 6, (17 * l - 12 + l % 2) / 2),
        Algorithm::AFsiaGenBeta => OpCounts::new(6 * l - 1, 5 * l - 3),
        Algorithm::SpTranMatQkde => OpCounts::new(6 * l + 29, 5 * l + 6),
        Algorithm::EoEsgaQkdeLTV => OpCounts::new(6 * l * n + 45 * n, 5 * l * n + 19 * n),
        Algorithm::EoEsgaQkdeLTI => OpCounts::new(16 * n + 6 * l + 29, 13 * n + 5 * l + 6),
    };
    TcvcModel {
        algorithm,
        order,
        n,
        predicted,
        measured: None,
    }
}

pub fn tcvc_predict_by_name(name: &str, order: OrderParam, n: u64) -> Result<TcvcModel> {
    Ok(tcvc_predict(name.parse()?, order, n))
}

thread_local! {
    static MULS: Cell<u64> = const { Cell::new(0) };
    static ADDS: Cell<u64> = const { Cell::new(0) };
    static ACTIVE: Cell<bool> = const { Cell::new(true) };
}

fn count_mul() {
    if ACTIVE.with(Cell::get) {
        MULS.with(|c| c.set(c.get() + 1));
    }
}

fn count_add() {
    if ACTIVE.with(Cell::get) {
        ADDS.with(|c| c.set(c.get() + 1));
    }
}

/// Zeroes this thread's counters.
pub fn reset_counts() {
    MULS.with(|c| c.set(0));
    ADDS.with(|c| c.set(0));
}

/// This thread's counters since the last reset.
pub fn counts() -> OpCounts {
    OpCounts::new(MULS.with(Cell::get), ADDS.with(Cell::get))
}

/// Suspends counting on this thread until dropped.
pub struct PauseCounting {
    previous: bool,
}

impl PauseCounting {
    pub fn new() -> Self {
        Self {
            previous: ACTIVE.with(|a| a.replace(false)),
        }
    }
}

impl Default for PauseCounting {
    fn default() -> Self {
        Self::new()
    }
}

impl Drop for PauseCounting {
    fn drop(&mut self) {
        ACTIVE.with(|a| a.set(self.previous));
    }
}

/// `f64` that tallies its arithmetic in thread-local counters.
///
/// `+`/`−` count as additions, `×`/`÷`/`%` as multiplications, negation
/// and comparisons are free. Transcendental functions are delegated
/// uncounted.
#[derive(Debug, Clone, Copy, Default, PartialEq, PartialOrd)]
pub struct Counted(pub f64);

impl Counted {
    pub fn value(self) -> f64 {
        self.0
    }
}

macro_rules! counted_binop {
    ($trait:ident, $method:ident, $op:tt, $counter:ident) => {
        impl $trait for Counted {
            type Output = Counted;

            fn $method(self, rhs: Counted) -> Counted {
                $counter();
                Counted(self.0 $op rhs.0)
            }
        }
    };
}

counted_binop!(Add, add, +, count_add);
counted_binop!(Sub, sub, -, count_add);
counted_binop!(Mul, mul, *, count_mul);
counted_binop!(Div, div, /, count_mul);
counted_binop!(Rem, rem, %, count_mul);

impl Neg for Counted {
    type Output = Counted;

    fn neg(self) -> Counted {
        Counted(-self.0)
    }
}

impl Zero for Counted {
    fn zero() -> Self {
        Counted(0.0)
    }

    fn is_zero(&self) -> bool {
        self.0 == 0.0
    }
}

impl One for Counted {
    fn one() -> Self {
        Counted(1.0)
    }
}

impl Num for Counted {
    type FromStrRadixErr = <f64 as Num>::FromStrRadixErr;

    fn from_str_radix(s: &str, radix: u32) -> Result<Self, Self::FromStrRadixErr> {
        f64::from_str_radix(s, radix).map(Counted)
    }
}

impl ToPrimitive for Counted {
    fn to_i64(&self) -> Option<i64> {
        self.0.to_i64()
    }

    fn to_u64(&self) -> Option<u64> {
        self.0.to_u64()
    }

    fn to_f64(&self) -> Option<f64> {
        Some(self.0)
    }
}

impl FromPrimitive for Counted {
    fn from_i64(n: i64) -> Option<Self> {
        f64::from_i64(n).map(Counted)
    }

    fn from_u64(n: u64) -> Option<Self> {
        f64::from_u64(n).map(Counted)
    }

    fn from_f64(n: f64) -> Option<Self> {
        Some(Counted(n))
    }
}

impl NumCast for Counted {
    fn from<N: ToPrimitive>(n: N) -> Option<Self> {
        n.to_f64().map(Counted)
    }
}

macro_rules! delegate_const {
    ($($name:ident),*) => {
        $(fn $name() -> Self { Counted(f64::$name()) })*
    };
}

macro_rules! delegate_unary {
    ($($name:ident),*) => {
        $(fn $name(self) -> Self { Counted(self.0.$name()) })*
    };
}

macro_rules! delegate_pred {
    ($($name:ident),*) => {
        $(fn $name(self) -> bool { self.0.$name() })*
    };
}

impl Float for Counted {
    delegate_const!(nan, infinity, neg_infinity, neg_zero, min_value, min_positive_value, max_value);
    delegate_pred!(is_nan, is_infinite, is_finite, is_normal, is_sign_positive, is_sign_negative);
    delegate_unary!(
        floor, ceil, round, trunc, fract, abs, signum, sqrt, exp, exp2, ln, log2, log10, cbrt, sin,
        cos, tan, asin, acos, atan, exp_m1, ln_1p, sinh, cosh, tanh, asinh, acosh, atanh
    );

    fn classify(self) -> FpCategory {
        self.0.classify()
    }

    fn mul_add(self, a: Self, b: Self) -> Self {
        count_mul();
        count_add();
        Counted(self.0.mul_add(a.0, b.0))
    }

    fn recip(self) -> Self {
        count_mul();
        Counted(self.0.recip())
    }

    fn powi(self, n: i32) -> Self {
        Counted(self.0.powi(n))
    }

    fn powf(self, n: Self) -> Self {
        Counted(self.0.powf(n.0))
    }

    fn log(self, base: Self) -> Self {
        Counted(self.0.log(base.0))
    }

    fn max(self, other: Self) -> Self {
        Counted(self.0.max(other.0))
    }

    fn min(self, other: Self) -> Self {
        Counted(self.0.min(other.0))
    }

    #[allow(deprecated)]
    fn abs_sub(self, other: Self) -> Self {
        Counted(Float::abs_sub(self.0, other.0))
    }

    fn hypot(self, other: Self) -> Self {
        Counted(self.0.hypot(other.0))
    }

    fn atan2(self, other: Self) -> Self {
        Counted(self.0.atan2(other.0))
    }

    fn sin_cos(self) -> (Self, Self) {
        let (s, c) = self.0.sin_cos();
        (Counted(s), Counted(c))
    }

    fn integer_decode(self) -> (u64, i16, i8) {
        Float::integer_decode(self.0)
    }
}

impl FloatConst for Counted {
    delegate_const!(
        E, FRAC_1_PI, FRAC_1_SQRT_2, FRAC_2_PI, FRAC_2_SQRT_PI, FRAC_PI_2, FRAC_PI_3, FRAC_PI_4,
        FRAC_PI_6, FRAC_PI_8, LN_10, LN_2, LOG10_E, LOG2_E, PI, SQRT_2
    );
}

fn counting_config(order: OrderParam, n: usize, kernel: StepKernel) -> Result<PropagationConfig<Counted>> {
    let _pause = PauseCounting::new();
    let tau = Counted(1.0 / 1024.0);
    let tf = Counted(n as f64 / 1024.0);
    Ok(PropagationConfig::new(order, tau, Counted(0.0), tf, QuatState::identity())?.with_kernel(kernel))
}

/// Counts the arithmetic of an `n`-step time-varying propagation. Rate
/// evaluation is excluded.
pub fn measure_ltv(order: OrderParam, n: usize, kernel: StepKernel) -> Result<OpCounts> {
    let cfg = counting_config(order, n, kernel)?;
    let rate = |t: &Counted| {
        let _pause = PauseCounting::new();
        let t = t.0;
        [Counted(0.3 + t.sin()), Counted(-1.1 * t.cos()), Counted(0.7)]
    };
    reset_counts();
    for sample in propagate_ltv(&cfg, rate)? {
        sample?;
    }
    Ok(counts())
}

/// Counts the arithmetic of an `n`-step constant-rate propagation,
/// including the one-off construction of the transition matrix.
pub fn measure_lti(order: OrderParam, n: usize, kernel: StepKernel) -> Result<OpCounts> {
    let cfg = counting_config(order, n, kernel)?;
    let omega = {
        let _pause = PauseCounting::new();
        crate::kinematics::AngularVelocity::new(Counted(0.3), Counted(-1.1), Counted(0.7))?
    };
    reset_counts();
    for _ in propagate_lti(&cfg, &omega)? {}
    Ok(counts())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pade::{afsia_gen_beta, horner, pfsia_gen_beta};

    fn ord(ell: u32) -> OrderParam {
        OrderParam::new(ell).unwrap()
    }

    #[test]
    fn published_counts() {
        assert_eq!(tcvc_predict(Algorithm::AFsiaGenBeta, ord(4), 0).predicted, OpCounts::new(23, 17));
        assert_eq!(
            tcvc_predict(Algorithm::EoEsgaQkdeLTV, ord(1), 1000).predicted,
            OpCounts::new(51000, 24000)
        );
        assert_eq!(tcvc_predict(Algorithm::Eta, ord(9), 5).predicted, OpCounts::new(3, 3));
        assert_eq!(tcvc_predict(Algorithm::PFsiaGenBeta, ord(3), 0).predicted, OpCounts::new(27, 20));
        assert_eq!(tcvc_predict(Algorithm::PFsiaGenBeta, ord(4), 0).predicted, OpCounts::new(38, 28));
    }

    #[test]
    fn names_round_trip() {
        for a in Algorithm::ALL {
            assert_eq!(a.name().parse::<Algorithm>().unwrap(), a);
        }
        assert_eq!("afsiagenbeta".parse::<Algorithm>().unwrap(), Algorithm::AFsiaGenBeta);
        assert!(matches!(
            "Bogus".parse::<Algorithm>(),
            Err(Error::UnknownAlgorithm(_))
        ));
    }

    #[test]
    fn counter_semantics() {
        reset_counts();
        let (a, b) = (Counted(2.0), Counted(3.0));
        let _ = (a + b) * (a - b) / b;
        let _ = -a;
        assert_eq!(counts(), OpCounts::new(2, 2));
        {
            let _p = PauseCounting::new();
            let _ = a * b + a;
        }
        assert_eq!(counts(), OpCounts::new(2, 2));
    }

    #[test]
    fn eta_and_horner_costs() {
        reset_counts();
        let x = horner(&[Counted(1.0), Counted(2.0), Counted(3.0), Counted(4.0)], Counted(0.5)).unwrap();
        assert_eq!(x.0, 1.0 + 2.0 * 0.5 + 3.0 * 0.25 + 4.0 * 0.125);
        assert_eq!(counts(), OpCounts::new(3, 3));
    }

    #[test]
    fn generator_costs_are_linear_in_order() {
        for ell in 1..=10 {
            reset_counts();
            afsia_gen_beta(ord(ell), &Counted(0.3)).unwrap();
            let l = ell as u64;
            assert_eq!(counts(), OpCounts::new(5 * l - 4, 4 * l - 4), "ell = {ell}");
            reset_counts();
            pfsia_gen_beta(ord(ell), &Counted(0.3)).unwrap();
            let c = counts();
            assert!(c.mul > 5 * l - 4 || ell == 1);
        }
    }
}
