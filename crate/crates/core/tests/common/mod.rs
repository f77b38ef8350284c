//! Independent reference computations shared by the integration tests.
//!
//! Everything here works from closed forms in exact rational arithmetic or
//! from first principles, never through the library's own coefficient
//! generators.

#![allow(dead_code)]

use std::f64::consts::PI;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use symquat::{transition_matrix, AngularVelocity, Mat4, OmegaMatrix, OrderParam};

pub type Q = BigRational;

pub fn q(n: i64, d: i64) -> Q {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

/// The exact rational value of an `f64`.
pub fn exact(x: f64) -> Q {
    BigRational::from_float(x).expect("finite")
}

pub fn to_f64(x: &Q) -> f64 {
    x.to_f64().expect("representable")
}

/// `|got − want| / |want|`, or `|got|` when `want = 0`.
pub fn rel_err(got: f64, want: &Q) -> f64 {
    let diff = (exact(got) - want).abs();
    if want.is_zero() {
        to_f64(&diff)
    } else {
        to_f64(&(diff / want.abs()))
    }
}

fn poly(coeffs: &[Q], x: &Q) -> Q {
    let mut acc = Q::zero();
    let mut p = Q::one();
    for c in coeffs {
        acc += c * &p;
        p *= x;
    }
    acc
}

/// Hand-tabulated closed forms `β(ℓ, c) = n(−c) / d(−c)` for ℓ ≤ 6.
pub fn tabulated_beta(ell: u32, c: &Q) -> Q {
    let (num, den): (Vec<Q>, Vec<Q>) = match ell {
        1 => (vec![q(1, 2)], vec![q(1, 1)]),
        2 => (vec![q(1, 2)], vec![q(1, 1), q(-1, 12)]),
        3 => (vec![q(1, 2), q(-1, 120)], vec![q(1, 1), q(-1, 10)]),
        4 => (vec![q(1, 2), q(-1, 84)], vec![q(1, 1), q(-3, 28), q(1, 1680)]),
        5 => (
            vec![q(1, 2), q(-1, 72), q(1, 30240)],
            vec![q(1, 1), q(-1, 9), q(1, 1008)],
        ),
        6 => (
            vec![q(1, 2), q(-1, 66), q(1, 15840)],
            vec![q(1, 1), q(-5, 44), q(1, 792), q(-1, 665280)],
        ),
        _ => panic!("no tabulated form for ell = {ell}"),
    };
    poly(&num, c) / poly(&den, c)
}

/// Upper end of the tabulated usable range of `c`; `None` means unbounded.
pub fn tabulated_domain(ell: u32) -> Option<Q> {
    match ell {
        1 => None,
        2 => Some(q(12, 1)),
        3 => Some(q(10, 1)),
        4 => Some(q(12650, 1281)),
        5 => Some(q(2349, 238)),
        6 => Some(q(10294, 1043)),
        _ => panic!("no tabulated domain for ell = {ell}"),
    }
}

fn factorial(n: u32) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, k| acc * BigInt::from(k))
}

/// Coefficients of `P_ℓ(x)` from the factorial closed form
/// `(2ℓ − k)! ℓ! / ((2ℓ)! k! (ℓ − k)!)`.
pub fn pade_numerator_exact(ell: u32) -> Vec<Q> {
    (0..=ell)
        .map(|k| {
            let num = factorial(2 * ell - k) * factorial(ell);
            let den = factorial(2 * ell) * factorial(k) * factorial(ell - k);
            BigRational::new(num, den)
        })
        .collect()
}

/// Displayed low-order polynomials `P_1 .. P_4`.
pub fn displayed_polynomial(ell: u32) -> Vec<Q> {
    match ell {
        1 => vec![q(1, 1), q(1, 2)],
        2 => vec![q(1, 1), q(1, 2), q(1, 12)],
        3 => vec![q(1, 1), q(1, 2), q(1, 10), q(1, 120)],
        4 => vec![q(1, 1), q(1, 2), q(3, 28), q(1, 84), q(1, 1680)],
        _ => panic!("no displayed polynomial for ell = {ell}"),
    }
}

/// `(sin x, cos x)` by Taylor series, truncated once terms drop below
/// 1e-60. Intended for `|x| ≤ 1`.
pub fn sin_cos_exact(x: &Q) -> (Q, Q) {
    let tol = q(1, 1) / BigRational::from_integer(BigInt::from(10).pow(60));
    let (mut s, mut c) = (Q::zero(), Q::zero());
    let mut term = Q::one();
    let mut k: i64 = 0;
    loop {
        if k % 4 == 0 {
            c += &term;
        } else if k % 4 == 1 {
            s += &term;
        } else if k % 4 == 2 {
            c -= &term;
        } else {
            s -= &term;
        }
        k += 1;
        term = term * x / q(k, 1);
        if term.abs() < tol {
            break;
        }
    }
    (s, c)
}

pub fn mat_max_abs_diff(a: &Mat4<f64>, b: &Mat4<f64>) -> f64 {
    a.sub(b).rows().iter().flatten().fold(0.0, |m, x| m.max(x.abs()))
}

/// Generic Gauss-Jordan inverse with partial pivoting.
pub fn inverse(m: &Mat4<f64>) -> Mat4<f64> {
    let mut a = *m.rows();
    let mut inv = *Mat4::<f64>::identity().rows();
    for col in 0..4 {
        let pivot = (col..4)
            .max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))
            .unwrap();
        a.swap(col, pivot);
        inv.swap(col, pivot);
        let p = a[col][col];
        for j in 0..4 {
            a[col][j] /= p;
            inv[col][j] /= p;
        }
        for i in 0..4 {
            if i != col {
                let f = a[i][col];
                for j in 0..4 {
                    a[i][j] -= f * a[col][j];
                    inv[i][j] -= f * inv[col][j];
                }
            }
        }
    }
    Mat4::from_rows(inv)
}

/// Constant rate used for the long constant-rate accuracy runs.
pub fn reference_lti_rate() -> AngularVelocity<f64> {
    AngularVelocity::new(
        PI * (PI / 8.0).sin(),
        -(PI / 3.0) * (PI / 8.0).cos(),
        -2.0 * (PI / 3.0).sin(),
    )
    .unwrap()
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Uniform direction with norm uniform in `(0, max_norm]`.
pub fn random_rate(rng: &mut impl Rng, max_norm: f64) -> [f64; 3] {
    loop {
        let v: [f64; 3] = std::array::from_fn(|_| rng.gen_range(-1.0..=1.0));
        let n = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
        if n > 1e-3 && n <= 1.0 {
            let scale = rng.gen_range(0.0..=max_norm).max(1e-12) / n;
            return v.map(|x| x * scale);
        }
    }
}

/// Largest error of the order-2ℓ constant-rate propagation against the
/// closed-form solution on `[0, tf]`, starting from the identity.
pub fn lti_max_error(ell: u32, tau: f64, tf: f64) -> f64 {
    let omega = reference_lti_rate();
    let q0 = symquat::QuatState::identity();
    let cfg = symquat::PropagationConfig::new(OrderParam::new(ell).unwrap(), tau, 0.0, tf, q0).unwrap();
    let mut worst: f64 = 0.0;
    for s in symquat::propagate_lti(&cfg, &omega).unwrap() {
        let exact = exact_lti_state(*omega.components(), q0.e, s.k, tau);
        worst = worst.max(dist(&s.q.e, &exact));
    }
    worst
}

/// Largest error of the time-varying propagation on the coning profile
/// (ω0 = 2π, ξ = π/80) against its closed-form attitude.
pub fn special_max_error(ell: u32, tau: f64, tf: f64) -> f64 {
    let (omega0, xi) = (2.0 * PI, PI / 80.0);
    let profile = symquat::analysis::SpecialLtvProfile::new(omega0, xi).unwrap();
    let q0 = exact_coning_state(omega0, xi, 0, tau);
    let cfg = symquat::PropagationConfig::new(OrderParam::new(ell).unwrap(), tau, 0.0, tf, q0.into()).unwrap();
    let mut worst: f64 = 0.0;
    for s in symquat::propagate_ltv(&cfg, profile).unwrap() {
        let s = s.unwrap();
        worst = worst.max(dist(&s.q.e, &exact_coning_state(omega0, xi, s.k, tau)));
    }
    worst
}

/// ‖G_exact − G(ℓ)‖_F at `x = ‖ω‖τ` in exact arithmetic.
pub fn exact_step_error(ell: u32, x: &Q) -> f64 {
    // ω = (3x/5, 4x/5, 0) has rational norm x; τ = 1
    let w = [x * q(3, 5), x * q(4, 5), q(0, 1)];
    let omega = AngularVelocity::from_components(w).unwrap();
    let g = transition_matrix(OrderParam::new(ell).unwrap(), q(1, 1), &omega).unwrap();
    let (s, c) = sin_cos_exact(&(x * q(1, 2)));
    let om = OmegaMatrix::new(&omega);
    let hat = om.matrix().scale(&(q(1, 1) / x));
    let exact = Mat4::identity().scale(&c).add(&hat.scale(&s));
    exact.sub(g.matrix()).frobenius_sq().to_f64().unwrap().sqrt()
}

/// Double-word value `hi + lo` with `|lo| ≤ ulp(hi)/2`.
#[derive(Clone, Copy, Debug)]
pub struct Dd(pub f64, pub f64);

fn two_sum(a: f64, b: f64) -> Dd {
    let s = a + b;
    let bb = s - a;
    Dd(s, (a - (s - bb)) + (b - bb))
}

fn renorm(hi: f64, lo: f64) -> Dd {
    let s = hi + lo;
    Dd(s, lo - (s - hi))
}

impl Dd {
    pub fn from_prod(a: f64, b: f64) -> Dd {
        let p = a * b;
        Dd(p, a.mul_add(b, -p))
    }

    pub fn add(self, o: Dd) -> Dd {
        let s = two_sum(self.0, o.0);
        renorm(s.0, s.1 + self.1 + o.1)
    }

    pub fn mul(self, o: Dd) -> Dd {
        let p = Dd::from_prod(self.0, o.0);
        renorm(p.0, p.1 + self.0 * o.1 + self.1 * o.0)
    }

    pub fn scale(self, k: f64) -> Dd {
        self.mul(Dd(k, 0.0))
    }

    pub fn sqrt(self) -> Dd {
        // one Newton step from the f64 root
        let r = self.0.sqrt();
        let sq = Dd::from_prod(r, r);
        let diff = (self.0 - sq.0) - sq.1 + self.1;
        renorm(r, diff / (2.0 * r))
    }

    /// The value reduced into `[−π, π]`, rounded to `f64`.
    pub fn reduce_two_pi(self) -> f64 {
        const TWO_PI: Dd = Dd(std::f64::consts::TAU, 2.4492935982947064e-16);
        let n = (self.0 / TWO_PI.0).round();
        self.add(TWO_PI.scale(-n)).0
    }
}

/// `Ω(ω) q` straight from the row layout.
fn omega_times(w: [f64; 3], q: [f64; 4]) -> [f64; 4] {
    let [w1, w2, w3] = w;
    [
        -w1 * q[1] - w2 * q[2] - w3 * q[3],
        w1 * q[0] + w3 * q[2] - w2 * q[3],
        w2 * q[0] - w3 * q[1] + w1 * q[3],
        w3 * q[0] + w2 * q[1] - w1 * q[2],
    ]
}

/// Closed-form constant-rate attitude at grid time `k·τ` with the rotation
/// angle carried in double-word precision.
pub fn exact_lti_state(w: [f64; 3], q0: [f64; 4], k: usize, tau: f64) -> [f64; 4] {
    let g2 = Dd::from_prod(w[0], w[0]).add(Dd::from_prod(w[1], w[1])).add(Dd::from_prod(w[2], w[2]));
    let gamma = g2.sqrt();
    let theta = gamma.mul(Dd::from_prod(k as f64, tau)).scale(0.5).reduce_two_pi();
    let (s, c) = theta.sin_cos();
    let wq = omega_times(w, q0);
    std::array::from_fn(|i| c * q0[i] + s * wq[i] / gamma.0)
}

/// Coning attitude `[cos(ξ/2), 0, sin(ξ/2) cos(ω0 t), sin(ξ/2) sin(ω0 t)]`
/// at grid time `k·τ`, phase reduced in double-word precision.
pub fn exact_coning_state(omega0: f64, xi: f64, k: usize, tau: f64) -> [f64; 4] {
    let phase = Dd::from_prod(k as f64, tau).scale(omega0).reduce_two_pi();
    let (s, c) = phase.sin_cos();
    let (sh, ch) = (xi / 2.0).sin_cos();
    [ch, 0.0, sh * c, sh * s]
}

pub fn dist(a: &[f64; 4], b: &[f64; 4]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}
