//! Scalar tower used by the fiber calculus.
//!
//! Two coefficient rings are supported:
//!
//! * [`Exact`]: the field `Q(i, √2)`, stored as `(a + b·i) + √2·(c + d·i)` with
//!   rational `a, b, c, d`. Every identity check in exact mode is decided by
//!   structural equality, never by a tolerance.
//! * [`Complex64`]: double-precision complex numbers for numerics.

use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};

use num::bigint::BigInt;
use num::{BigRational, One, Signed, Zero};
use rand::Rng;

pub use num::complex::Complex64;

/// Which coefficient ring a computation runs over.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScalarMode {
    Exact,
    Floating,
}

/// Coefficient ring for forms, spinors and bundle maps.
pub trait Scalar:
    Clone
    + fmt::Debug
    + fmt::Display
    + PartialEq
    + Send
    + Sync
    + 'static
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Neg<Output = Self>
    + AddAssign
    + SubAssign
{
    const MODE: ScalarMode;

    fn zero() -> Self;
    fn one() -> Self;
    /// The imaginary unit.
    fn imag() -> Self;
    fn sqrt2() -> Self;
    fn from_ratio(num: i64, den: i64) -> Self;
    fn from_c64(z: Complex64) -> Option<Self>;

    fn conj(&self) -> Self;
    /// Exact test in exact mode; compares with `0.0` in floating mode.
    fn is_zero(&self) -> bool;
    fn inv(&self) -> Option<Self>;
    /// Real part, as an element of the same ring.
    fn re(&self) -> Self;
    fn to_c64(&self) -> Complex64;

    /// A small random coefficient. Exact mode draws real and imaginary parts
    /// independently from `{k/d : |k| ≤ 4, 1 ≤ d ≤ 3}`; floating mode draws
    /// from the unit box `[-1, 1]²`.
    fn sample<R: Rng + ?Sized>(rng: &mut R) -> Self;

    /// A random scalar of modulus one. Exact mode uses the rational
    /// parametrisation `(a + b i)² / (a² + b²)` of the unit circle.
    fn sample_unit<R: Rng + ?Sized>(rng: &mut R) -> Self;

    fn from_int(k: i64) -> Self {
        Self::from_ratio(k, 1)
    }

    fn norm_sqr(&self) -> Self {
        self.clone() * self.conj()
    }

    /// Power of the imaginary unit, `i^k`.
    fn i_pow(k: i64) -> Self {
        match k.rem_euclid(4) {
            0 => Self::one(),
            1 => Self::imag(),
            2 => -Self::one(),
            _ => -Self::imag(),
        }
    }

    /// Multiplication by `(-1)^k`.
    fn signed(self, k: i64) -> Self {
        if k.rem_euclid(2) == 0 {
            self
        } else {
            -self
        }
    }
}

/// Element of `Q(i, √2)`: `(re + im·i) + √2·(re2 + im2·i)`.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Exact {
    pub re: BigRational,
    pub im: BigRational,
    pub re2: BigRational,
    pub im2: BigRational,
}

/// Element of `Q(i)`, the coefficient ring of each √2 component.
#[derive(Clone, PartialEq)]
struct GaussRat(BigRational, BigRational);

impl GaussRat {
    fn mul(&self, o: &GaussRat) -> GaussRat {
        GaussRat(
            &self.0 * &o.0 - &self.1 * &o.1,
            &self.0 * &o.1 + &self.1 * &o.0,
        )
    }

    fn inv(&self) -> Option<GaussRat> {
        let d = &self.0 * &self.0 + &self.1 * &self.1;
        if d.is_zero() {
            return None;
        }
        Some(GaussRat(&self.0 / &d, -&self.1 / &d))
    }
}

fn rat(num: i64, den: i64) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

impl Exact {
    pub fn new(re: BigRational, im: BigRational, re2: BigRational, im2: BigRational) -> Self {
        Exact { re, im, re2, im2 }
    }

    /// `a + b i` with rational parts given as integer ratios.
    pub fn gauss(re: (i64, i64), im: (i64, i64)) -> Self {
        Exact {
            re: rat(re.0, re.1),
            im: rat(im.0, im.1),
            re2: BigRational::zero(),
            im2: BigRational::zero(),
        }
    }

    fn parts(&self) -> (GaussRat, GaussRat) {
        (
            GaussRat(self.re.clone(), self.im.clone()),
            GaussRat(self.re2.clone(), self.im2.clone()),
        )
    }

    fn from_parts(a: GaussRat, b: GaussRat) -> Self {
        Exact {
            re: a.0,
            im: a.1,
            re2: b.0,
            im2: b.1,
        }
    }

    /// True when the √2 component vanishes.
    pub fn is_gaussian_rational(&self) -> bool {
        self.re2.is_zero() && self.im2.is_zero()
    }
}

fn fmt_rat(q: &BigRational) -> String {
    if q.denom().is_one() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

fn fmt_gauss(re: &BigRational, im: &BigRational) -> String {
    match (re.is_zero(), im.is_zero()) {
        (true, true) => "0".to_string(),
        (false, true) => fmt_rat(re),
        (true, false) => format!("{}i", fmt_rat(im)),
        (false, false) => {
            let sign = if im.is_negative() { "-" } else { "+" };
            format!("{}{}{}i", fmt_rat(re), sign, fmt_rat(&im.abs()))
        }
    }
}

/// Exact text form, e.g. `1/2-3i` or `(1/2)+√2·(3/4i)`.
impl fmt::Display for Exact {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_gaussian_rational() {
            write!(f, "{}", fmt_gauss(&self.re, &self.im))
        } else {
            write!(
                f,
                "({})+√2·({})",
                fmt_gauss(&self.re, &self.im),
                fmt_gauss(&self.re2, &self.im2)
            )
        }
    }
}

impl Add for Exact {
    type Output = Exact;
    fn add(self, o: Exact) -> Exact {
        Exact {
            re: self.re + o.re,
            im: self.im + o.im,
            re2: self.re2 + o.re2,
            im2: self.im2 + o.im2,
        }
    }
}

impl Sub for Exact {
    type Output = Exact;
    fn sub(self, o: Exact) -> Exact {
        Exact {
            re: self.re - o.re,
            im: self.im - o.im,
            re2: self.re2 - o.re2,
            im2: self.im2 - o.im2,
        }
    }
}

impl Neg for Exact {
    type Output = Exact;
    fn neg(self) -> Exact {
        Exact {
            re: -self.re,
            im: -self.im,
            re2: -self.re2,
            im2: -self.im2,
        }
    }
}

impl Mul for Exact {
    type Output = Exact;
    fn mul(self, o: Exact) -> Exact {
        // (a + b√2)(c + d√2) = (ac + 2bd) + (ad + bc)√2
        let (a, b) = self.parts();
        let (c, d) = o.parts();
        let ac = a.mul(&c);
        let bd = b.mul(&d);
        let ad = a.mul(&d);
        let bc = b.mul(&c);
        let two = rat(2, 1);
        Exact::from_parts(
            GaussRat(ac.0 + &two * bd.0, ac.1 + &two * bd.1),
            GaussRat(ad.0 + bc.0, ad.1 + bc.1),
        )
    }
}

impl AddAssign for Exact {
    fn add_assign(&mut self, o: Exact) {
        self.re += o.re;
        self.im += o.im;
        self.re2 += o.re2;
        self.im2 += o.im2;
    }
}

impl SubAssign for Exact {
    fn sub_assign(&mut self, o: Exact) {
        self.re -= o.re;
        self.im -= o.im;
        self.re2 -= o.re2;
        self.im2 -= o.im2;
    }
}

fn rat_to_f64(q: &BigRational) -> f64 {
    use num::ToPrimitive;
    q.to_f64().unwrap_or(f64::NAN)
}

impl Scalar for Exact {
    const MODE: ScalarMode = ScalarMode::Exact;

    fn zero() -> Self {
        Exact::gauss((0, 1), (0, 1))
    }

    fn one() -> Self {
        Exact::gauss((1, 1), (0, 1))
    }

    fn imag() -> Self {
        Exact::gauss((0, 1), (1, 1))
    }

    fn sqrt2() -> Self {
        Exact {
            re: BigRational::zero(),
            im: BigRational::zero(),
            re2: BigRational::one(),
            im2: BigRational::zero(),
        }
    }

    fn from_ratio(num: i64, den: i64) -> Self {
        Exact::gauss((num, den), (0, 1))
    }

    fn from_c64(z: Complex64) -> Option<Self> {
        let re = BigRational::from_float(z.re)?;
        let im = BigRational::from_float(z.im)?;
        Some(Exact {
            re,
            im,
            re2: BigRational::zero(),
            im2: BigRational::zero(),
        })
    }

    fn conj(&self) -> Self {
        Exact {
            re: self.re.clone(),
            im: -self.im.clone(),
            re2: self.re2.clone(),
            im2: -self.im2.clone(),
        }
    }

    fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero() && self.re2.is_zero() && self.im2.is_zero()
    }

    fn inv(&self) -> Option<Self> {
        // (a + b√2)^{-1} = (a - b√2) / (a² - 2b²); the denominator is nonzero
        // whenever a + b√2 is, since √2 is not in Q(i).
        let (a, b) = self.parts();
        let a2 = a.mul(&a);
        let b2 = b.mul(&b);
        let two = rat(2, 1);
        let d = GaussRat(a2.0 - &two * b2.0, a2.1 - &two * b2.1);
        let dinv = d.inv()?;
        let nb = GaussRat(-b.0, -b.1);
        Some(Exact::from_parts(a.mul(&dinv), nb.mul(&dinv)))
    }

    fn re(&self) -> Self {
        Exact {
            re: self.re.clone(),
            im: BigRational::zero(),
            re2: self.re2.clone(),
            im2: BigRational::zero(),
        }
    }

    fn to_c64(&self) -> Complex64 {
        let s = std::f64::consts::SQRT_2;
        Complex64::new(
            rat_to_f64(&self.re) + s * rat_to_f64(&self.re2),
            rat_to_f64(&self.im) + s * rat_to_f64(&self.im2),
        )
    }

    fn sample<R: Rng + ?Sized>(rng: &mut R) -> Self {
        let mut part = || rat(rng.random_range(-4..=4), rng.random_range(1..=3));
        let re = part();
        let im = part();
        Exact {
            re,
            im,
            re2: BigRational::zero(),
            im2: BigRational::zero(),
        }
    }

    fn sample_unit<R: Rng + ?Sized>(rng: &mut R) -> Self {
        loop {
            let a: i64 = rng.random_range(-3..=3);
            let b: i64 = rng.random_range(-3..=3);
            let d = a * a + b * b;
            if d == 0 {
                continue;
            }
            return Exact::gauss((a * a - b * b, d), (2 * a * b, d));
        }
    }
}

impl Scalar for Complex64 {
    const MODE: ScalarMode = ScalarMode::Floating;

    fn zero() -> Self {
        Complex64::new(0.0, 0.0)
    }

    fn one() -> Self {
        Complex64::new(1.0, 0.0)
    }

    fn imag() -> Self {
        Complex64::new(0.0, 1.0)
    }

    fn sqrt2() -> Self {
        Complex64::new(std::f64::consts::SQRT_2, 0.0)
    }

    fn from_ratio(num: i64, den: i64) -> Self {
        Complex64::new(num as f64 / den as f64, 0.0)
    }

    fn from_c64(z: Complex64) -> Option<Self> {
        Some(z)
    }

    fn conj(&self) -> Self {
        num::Complex::conj(self)
    }

    fn is_zero(&self) -> bool {
        self.re == 0.0 && self.im == 0.0
    }

    fn inv(&self) -> Option<Self> {
        if Scalar::is_zero(self) {
            None
        } else {
            Some(num::Complex::inv(self))
        }
    }

    fn re(&self) -> Self {
        Complex64::new(self.re, 0.0)
    }

    fn to_c64(&self) -> Complex64 {
        *self
    }

    fn sample<R: Rng + ?Sized>(rng: &mut R) -> Self {
        Complex64::new(rng.random_range(-1.0..=1.0), rng.random_range(-1.0..=1.0))
    }

    fn sample_unit<R: Rng + ?Sized>(rng: &mut R) -> Self {
        Complex64::from_polar(1.0, rng.random_range(0.0..std::f64::consts::TAU))
    }
}
