//! Arbitrary-precision binary fixed-point arithmetic.
//!
//! Two layers live here. [`Fixed`] is a plain round-to-nearest fixed-point
//! real used by the approximate scalar backend. [`Ball`] is a midpoint-radius
//! enclosure with rigorous error propagation; it backs the exact sign
//! determination for real cyclotomic numbers, where an answer must never be
//! wrong. Both represent a real as `mant * 2^{-prec}`.

use std::collections::HashMap;
use std::sync::{Arc, Mutex};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use once_cell::sync::Lazy;

/// Round-to-nearest shift right by `k` bits.
fn shr_round(x: &BigInt, k: u32) -> BigInt {
    if k == 0 {
        return x.clone();
    }
    (x + (BigInt::one() << (k - 1))) >> k
}

/// Ceiling shift right by `k` bits, for nonnegative inputs.
fn shr_ceil(x: &BigInt, k: u32) -> BigInt {
    debug_assert!(!x.is_negative());
    if k == 0 {
        return x.clone();
    }
    (x + ((BigInt::one() << k) - 1)) >> k
}

/// Nearest-integer division (ties away from zero).
fn div_round(num: &BigInt, den: &BigInt) -> BigInt {
    let (q, r) = num.div_rem(den);
    let double = BigInt::from(2) * r.abs();
    if double >= den.abs() {
        if (num.is_negative()) == (den.is_negative()) {
            q + 1
        } else {
            q - 1
        }
    } else {
        q
    }
}

fn f64_to_mantissa_exp(value: f64) -> (i64, i64) {
    assert!(value.is_finite(), "fixed-point conversion of non-finite float");
    let bits = value.to_bits();
    let sign = if bits >> 63 == 0 { 1i64 } else { -1 };
    let exponent = ((bits >> 52) & 0x7ff) as i64;
    let mantissa = if exponent == 0 {
        (bits & 0xf_ffff_ffff_ffff) << 1
    } else {
        (bits & 0xf_ffff_ffff_ffff) | 0x10_0000_0000_0000
    };
    (sign * mantissa as i64, exponent - 1075)
}

/// A plain fixed-point real: `mant * 2^{-prec}`, round-to-nearest arithmetic.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct Fixed {
    mant: BigInt,
    prec: u32,
}

impl Fixed {
    pub fn zero(prec: u32) -> Self {
        Fixed { mant: BigInt::zero(), prec }
    }

    pub fn one(prec: u32) -> Self {
        Fixed { mant: BigInt::one() << prec, prec }
    }

    pub fn from_int(value: impl Into<BigInt>, prec: u32) -> Self {
        Fixed { mant: value.into() << prec, prec }
    }

    pub fn from_ratio(num: &BigInt, den: &BigInt, prec: u32) -> Self {
        assert!(!den.is_zero());
        Fixed { mant: div_round(&(num << prec), den), prec }
    }

    /// Exact conversion: every finite f64 is a dyadic rational.
    pub fn from_f64(value: f64, prec: u32) -> Self {
        let (m, e) = f64_to_mantissa_exp(value);
        let shift = e + prec as i64;
        let mant = if shift >= 0 {
            BigInt::from(m) << (shift as u32)
        } else {
            shr_round(&BigInt::from(m), (-shift) as u32)
        };
        Fixed { mant, prec }
    }

    pub fn to_f64(&self) -> f64 {
        let m = self.mant.to_f64().unwrap_or(f64::INFINITY * self.signum() as f64);
        m * 2f64.powi(-(self.prec as i32))
    }

    pub fn prec(&self) -> u32 {
        self.prec
    }

    pub fn is_zero(&self) -> bool {
        self.mant.is_zero()
    }

    pub fn signum(&self) -> i8 {
        match self.mant.sign() {
            num_bigint::Sign::Minus => -1,
            num_bigint::Sign::NoSign => 0,
            num_bigint::Sign::Plus => 1,
        }
    }

    pub fn abs(&self) -> Self {
        Fixed { mant: self.mant.abs(), prec: self.prec }
    }

    fn assert_same(&self, other: &Self) {
        assert_eq!(self.prec, other.prec, "mixed fixed-point precisions");
    }

    pub fn add(&self, other: &Self) -> Self {
        self.assert_same(other);
        Fixed { mant: &self.mant + &other.mant, prec: self.prec }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.assert_same(other);
        Fixed { mant: &self.mant - &other.mant, prec: self.prec }
    }

    pub fn neg(&self) -> Self {
        Fixed { mant: -&self.mant, prec: self.prec }
    }

    pub fn mul(&self, other: &Self) -> Self {
        self.assert_same(other);
        Fixed { mant: shr_round(&(&self.mant * &other.mant), self.prec), prec: self.prec }
    }

    pub fn mul_int(&self, k: impl Into<BigInt>) -> Self {
        Fixed { mant: &self.mant * k.into(), prec: self.prec }
    }

    pub fn div(&self, other: &Self) -> Self {
        self.assert_same(other);
        assert!(!other.mant.is_zero(), "fixed-point division by zero");
        Fixed { mant: div_round(&(&self.mant << self.prec), &other.mant), prec: self.prec }
    }

    pub fn div_int(&self, k: impl Into<BigInt>) -> Self {
        let k = k.into();
        assert!(!k.is_zero());
        Fixed { mant: div_round(&self.mant, &k), prec: self.prec }
    }

    /// Square root of a nonnegative value.
    pub fn sqrt(&self) -> Self {
        assert!(!self.mant.is_negative(), "fixed-point sqrt of a negative value");
        use num_integer::Roots;
        Fixed { mant: (&self.mant << self.prec).sqrt(), prec: self.prec }
    }

    pub fn round_to(&self, prec: u32) -> Self {
        if prec == self.prec {
            self.clone()
        } else if prec > self.prec {
            Fixed { mant: &self.mant << (prec - self.prec), prec }
        } else {
            Fixed { mant: shr_round(&self.mant, self.prec - prec), prec }
        }
    }

    pub fn pi(prec: u32) -> Self {
        let ball = pi_ball(prec + 8);
        Fixed { mant: ball.mid.clone(), prec: prec + 8 }.round_to(prec)
    }

    /// cos(x) after reduction of x modulo 2*pi.
    pub fn cos(&self) -> Self {
        self.cos_sin().0
    }

    pub fn sin(&self) -> Self {
        self.cos_sin().1
    }

    pub fn cos_sin(&self) -> (Self, Self) {
        let w = self.prec + 32;
        let x = self.round_to(w);
        let two_pi = Fixed::pi(w).mul_int(2);
        let turns = div_round(&x.mant, &two_pi.mant);
        let reduced = x.sub(&two_pi.mul_int(turns));

        let x2 = reduced.mul(&reduced);
        let mut cos_acc = Fixed::one(w);
        let mut sin_acc = reduced.clone();
        let mut cos_term = Fixed::one(w);
        let mut sin_term = reduced;
        let mut m: u64 = 1;
        loop {
            cos_term = cos_term.mul(&x2).div_int((2 * m - 1) * (2 * m));
            sin_term = sin_term.mul(&x2).div_int((2 * m) * (2 * m + 1));
            if m % 2 == 1 {
                cos_acc = cos_acc.sub(&cos_term);
                sin_acc = sin_acc.sub(&sin_term);
            } else {
                cos_acc = cos_acc.add(&cos_term);
                sin_acc = sin_acc.add(&sin_term);
            }
            if cos_term.is_zero() && sin_term.is_zero() {
                break;
            }
            m += 1;
            assert!(m < 4 * w as u64 + 64, "trig series failed to converge");
        }
        (cos_acc.round_to(self.prec), sin_acc.round_to(self.prec))
    }
}

impl std::fmt::Debug for Fixed {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "Fixed({:.6e} @{})", self.to_f64(), self.prec)
    }
}

/// A rigorous enclosure `[mid - err, mid + err] * 2^{-prec}`.
#[derive(Clone, Debug)]
pub struct Ball {
    pub mid: BigInt,
    pub err: BigInt,
    pub prec: u32,
}

impl Ball {
    pub fn exact_int(value: impl Into<BigInt>, prec: u32) -> Self {
        Ball { mid: value.into() << prec, err: BigInt::zero(), prec }
    }

    pub fn from_ratio(num: &BigInt, den: &BigInt, prec: u32) -> Self {
        assert!(!den.is_zero());
        Ball { mid: div_round(&(num << prec), den), err: BigInt::one(), prec }
    }

    pub fn add(&self, other: &Self) -> Self {
        debug_assert_eq!(self.prec, other.prec);
        Ball { mid: &self.mid + &other.mid, err: &self.err + &other.err, prec: self.prec }
    }

    pub fn sub(&self, other: &Self) -> Self {
        debug_assert_eq!(self.prec, other.prec);
        Ball { mid: &self.mid - &other.mid, err: &self.err + &other.err, prec: self.prec }
    }

    pub fn neg(&self) -> Self {
        Ball { mid: -&self.mid, err: self.err.clone(), prec: self.prec }
    }

    pub fn mul(&self, other: &Self) -> Self {
        debug_assert_eq!(self.prec, other.prec);
        let k = self.prec;
        let mid = shr_round(&(&self.mid * &other.mid), k);
        let cross = self.mid.abs() * &other.err + other.mid.abs() * &self.err + &self.err * &other.err;
        let err = shr_ceil(&cross, k) + 1;
        Ball { mid, err, prec: k }
    }

    pub fn mul_bigint(&self, k: &BigInt) -> Self {
        Ball { mid: &self.mid * k, err: &self.err * k.abs(), prec: self.prec }
    }

    pub fn div_uint(&self, q: u64) -> Self {
        assert!(q > 0);
        let q = BigInt::from(q);
        Ball { mid: div_round(&self.mid, &q), err: self.err.div_ceil(&q) + 1, prec: self.prec }
    }

    /// Upper bound on |value| in ulps of 2^{-prec}.
    fn magnitude_bound(&self) -> BigInt {
        self.mid.abs() + &self.err
    }

    /// Sign of the enclosed value, when the enclosure excludes zero.
    pub fn certain_sign(&self) -> Option<i8> {
        if self.mid > self.err {
            Some(1)
        } else if self.mid < -self.err.clone() {
            Some(-1)
        } else if self.err.is_zero() {
            Some(0)
        } else {
            None
        }
    }

    pub fn contains_zero(&self) -> bool {
        self.mid.abs() <= self.err
    }

    pub fn to_f64(&self) -> f64 {
        self.mid.to_f64().unwrap_or(0.0) * 2f64.powi(-(self.prec as i32))
    }
}

/// arctan(1/x) via the alternating Taylor series, with rigorous error.
fn arctan_recip_ball(x: u64, prec: u32) -> Ball {
    let one = BigInt::one() << prec;
    let x2 = BigInt::from(x) * BigInt::from(x);
    let mut denom_pow = BigInt::from(x);
    let mut sum = BigInt::zero();
    let mut err = BigInt::zero();
    let mut k: u64 = 0;
    loop {
        let term = div_round(&one, &(BigInt::from(2 * k + 1) * &denom_pow));
        if term.is_zero() {
            // Alternating with decreasing terms: truncation below one ulp.
            err += 1;
            break;
        }
        if k % 2 == 0 {
            sum += &term;
        } else {
            sum -= &term;
        }
        err += 1;
        denom_pow *= &x2;
        k += 1;
        assert!(k < prec as u64 + 64, "arctan series failed to converge");
    }
    Ball { mid: sum, err, prec }
}

/// Enclosure of pi by Machin's formula.
pub fn pi_ball(prec: u32) -> Ball {
    static CACHE: Lazy<Mutex<HashMap<u32, Arc<Ball>>>> = Lazy::new(|| Mutex::new(HashMap::new()));
    if let Some(ball) = CACHE.lock().unwrap().get(&prec) {
        return (**ball).clone();
    }
    let a = arctan_recip_ball(5, prec + 8);
    let b = arctan_recip_ball(239, prec + 8);
    let wide = Ball {
        mid: 16 * &a.mid - 4 * &b.mid,
        err: 16 * &a.err + 4 * &b.err,
        prec: prec + 8,
    };
    let ball = round_ball(&wide, prec);
    CACHE.lock().unwrap().insert(prec, Arc::new(ball.clone()));
    ball
}

fn round_ball(ball: &Ball, prec: u32) -> Ball {
    assert!(prec <= ball.prec);
    let k = ball.prec - prec;
    Ball { mid: shr_round(&ball.mid, k), err: shr_ceil(&ball.err, k) + 1, prec }
}

/// Rigorous cos and sin of an enclosed argument with |x| < 8.
pub fn cos_sin_ball(x: &Ball) -> (Ball, Ball) {
    let prec = x.prec;
    assert!(
        x.magnitude_bound() < (BigInt::from(8) << prec),
        "cos_sin_ball expects a reduced argument"
    );
    let x2 = x.mul(x);
    let mut cos_acc = Ball::exact_int(1, prec);
    let mut sin_acc = x.clone();
    let mut cos_term = Ball::exact_int(1, prec);
    let mut sin_term = x.clone();
    let mut m: u64 = 1;
    loop {
        cos_term = cos_term.mul(&x2).div_uint((2 * m - 1) * (2 * m));
        sin_term = sin_term.mul(&x2).div_uint((2 * m) * (2 * m + 1));
        if m % 2 == 1 {
            cos_acc = cos_acc.sub(&cos_term);
            sin_acc = sin_acc.sub(&sin_term);
        } else {
            cos_acc = cos_acc.add(&cos_term);
            sin_acc = sin_acc.add(&sin_term);
        }
        // Once the term ratio x^2/((2m+1)(2m+2)) is below 1/2, the remaining
        // tail is bounded by twice the next term.
        let ratio_ok = x2.magnitude_bound() * 2u32 < BigInt::from((2 * m + 1) * (2 * m + 2)) << prec;
        let term_small = cos_term.magnitude_bound() <= BigInt::from(2)
            && sin_term.magnitude_bound() <= BigInt::from(2);
        if ratio_ok && term_small {
            cos_acc.err += 8;
            sin_acc.err += 8;
            break;
        }
        m += 1;
        assert!(m < 4 * prec as u64 + 64, "trig ball series failed to converge");
    }
    (cos_acc, sin_acc)
}

/// Enclosures of cos(2*pi*j/n) and sin(2*pi*j/n), memoized.
pub fn unit_root_ball(j: u64, n: u64, prec: u32) -> (Ball, Ball) {
    static CACHE: Lazy<Mutex<HashMap<(u64, u64, u32), Arc<(Ball, Ball)>>>> =
        Lazy::new(|| Mutex::new(HashMap::new()));
    let j = j % n;
    if let Some(pair) = CACHE.lock().unwrap().get(&(j, n, prec)) {
        return (**pair).clone();
    }
    let pi = pi_ball(prec + 16);
    let angle = pi.mul_bigint(&BigInt::from(2 * j)).div_uint(n);
    let (c, s) = cos_sin_ball(&angle);
    let pair = (round_ball(&c, prec), round_ball(&s, prec));
    CACHE.lock().unwrap().insert((j, n, prec), Arc::new(pair.clone()));
    pair
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pi_matches_f64() {
        let ball = pi_ball(96);
        assert!((ball.to_f64() - std::f64::consts::PI).abs() < 1e-15);
        assert!(ball.err < BigInt::from(1000));
    }

    #[test]
    fn fixed_roundtrip_and_ops() {
        let a = Fixed::from_f64(1.5, 128);
        let b = Fixed::from_f64(-0.25, 128);
        assert_eq!(a.add(&b).to_f64(), 1.25);
        assert_eq!(a.mul(&b).to_f64(), -0.375);
        assert_eq!(a.div(&b).to_f64(), -6.0);
        assert_eq!(Fixed::from_int(9, 64).sqrt().to_f64(), 3.0);
    }

    #[test]
    fn fixed_trig_against_f64() {
        for k in 1..16 {
            let theta = 2.0 * std::f64::consts::PI * k as f64 / 16.0;
            let x = Fixed::from_f64(theta, 128);
            let (c, s) = x.cos_sin();
            assert!((c.to_f64() - theta.cos()).abs() < 1e-14, "cos at {theta}");
            assert!((s.to_f64() - theta.sin()).abs() < 1e-14, "sin at {theta}");
        }
    }

    #[test]
    fn trig_reduction_handles_large_args() {
        let x = Fixed::from_f64(1000.0, 96);
        let (c, s) = x.cos_sin();
        assert!((c.to_f64() - 1000f64.cos()).abs() < 1e-12);
        assert!((s.to_f64() - 1000f64.sin()).abs() < 1e-12);
    }

    #[test]
    fn unit_root_enclosures() {
        // cos(2 pi / 3) = -1/2, sin(2 pi / 3) = sqrt(3)/2.
        let (c, s) = unit_root_ball(1, 3, 128);
        assert!((c.to_f64() + 0.5).abs() < 1e-30);
        assert!((s.to_f64() - 0.75f64.sqrt()).abs() < 1e-15);
        assert!(c.err < BigInt::from(100_000));

        // cos(pi) = -1 exactly; the enclosure must contain it tightly.
        let (c, s) = unit_root_ball(1, 2, 96);
        assert!((c.to_f64() + 1.0).abs() < 1e-25);
        assert!(s.contains_zero());
    }

    #[test]
    fn ball_sign_decisions() {
        let a = Ball::from_ratio(&BigInt::from(1), &BigInt::from(3), 64);
        assert_eq!(a.certain_sign(), Some(1));
        assert_eq!(a.neg().certain_sign(), Some(-1));
        let z = Ball { mid: BigInt::from(1), err: BigInt::from(2), prec: 64 };
        assert_eq!(z.certain_sign(), None);
    }
}
