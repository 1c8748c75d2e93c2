//! Exact coefficients: Laurent polynomials in `hbar`, `c`, `m` over the
//! Gaussian rationals.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::ScalarError;

/// A complex number `re + im*i` with exact rational parts.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GaussianRational {
    re: BigRational,
    im: BigRational,
}

impl GaussianRational {
    pub fn new(re: BigRational, im: BigRational) -> Self {
        Self { re, im }
    }

    pub fn from_integer(n: i64) -> Self {
        Self::new(BigRational::from_integer(n.into()), BigRational::zero())
    }

    pub fn ratio(num: i64, den: i64) -> Self {
        Self::new(
            BigRational::new(BigInt::from(num), BigInt::from(den)),
            BigRational::zero(),
        )
    }

    pub fn i() -> Self {
        Self::new(BigRational::zero(), BigRational::one())
    }

    pub fn re(&self) -> &BigRational {
        &self.re
    }

    pub fn im(&self) -> &BigRational {
        &self.im
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.re.is_one() && self.im.is_zero()
    }

    pub fn conj(&self) -> Self {
        Self::new(self.re.clone(), -&self.im)
    }

    /// Multiplicative inverse; `None` for zero.
    pub fn inv(&self) -> Option<Self> {
        if self.is_zero() {
            return None;
        }
        let norm = &self.re * &self.re + &self.im * &self.im;
        Some(Self::new(&self.re / &norm, -&self.im / &norm))
    }

    /// Floating-point value, rounded once per component.
    pub fn to_f64_pair(&self) -> (f64, f64) {
        (rational_to_f64(&self.re), rational_to_f64(&self.im))
    }
}

fn rational_to_f64(r: &BigRational) -> f64 {
    use num_traits::ToPrimitive;
    r.to_f64().unwrap_or(f64::NAN)
}

impl Zero for GaussianRational {
    fn zero() -> Self {
        Self::new(BigRational::zero(), BigRational::zero())
    }
    fn is_zero(&self) -> bool {
        GaussianRational::is_zero(self)
    }
}

impl Add for &GaussianRational {
    type Output = GaussianRational;
    fn add(self, rhs: Self) -> GaussianRational {
        GaussianRational::new(&self.re + &rhs.re, &self.im + &rhs.im)
    }
}

impl Add for GaussianRational {
    type Output = GaussianRational;
    fn add(self, rhs: Self) -> GaussianRational {
        &self + &rhs
    }
}

impl Mul for &GaussianRational {
    type Output = GaussianRational;
    fn mul(self, rhs: Self) -> GaussianRational {
        GaussianRational::new(
            &self.re * &rhs.re - &self.im * &rhs.im,
            &self.re * &rhs.im + &self.im * &rhs.re,
        )
    }
}

impl Neg for &GaussianRational {
    type Output = GaussianRational;
    fn neg(self) -> GaussianRational {
        GaussianRational::new(-&self.re, -&self.im)
    }
}

/// Exponents of the physical unit symbols in one Laurent monomial
/// `hbar^hbar * c^c * m^m`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct UnitMonomial {
    pub hbar: i32,
    pub c: i32,
    pub m: i32,
}

impl UnitMonomial {
    pub const ONE: UnitMonomial = UnitMonomial {
        hbar: 0,
        c: 0,
        m: 0,
    };

    pub fn new(hbar: i32, c: i32, m: i32) -> Self {
        Self { hbar, c, m }
    }

    pub fn is_one(&self) -> bool {
        *self == Self::ONE
    }

    fn mul(self, o: Self) -> Self {
        Self::new(self.hbar + o.hbar, self.c + o.c, self.m + o.m)
    }

    fn inv(self) -> Self {
        Self::new(-self.hbar, -self.c, -self.m)
    }
}

/// An exact coefficient. Never stores a zero Gaussian-rational term.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Scalar {
    terms: BTreeMap<UnitMonomial, GaussianRational>,
}

impl Scalar {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::term(UnitMonomial::ONE, GaussianRational::from_integer(1))
    }

    pub fn i() -> Self {
        Self::term(UnitMonomial::ONE, GaussianRational::i())
    }

    pub fn integer(n: i64) -> Self {
        Self::term(UnitMonomial::ONE, GaussianRational::from_integer(n))
    }

    pub fn ratio(num: i64, den: i64) -> Self {
        Self::term(UnitMonomial::ONE, GaussianRational::ratio(num, den))
    }

    pub fn hbar() -> Self {
        Self::unit(UnitMonomial::new(1, 0, 0))
    }

    pub fn c() -> Self {
        Self::unit(UnitMonomial::new(0, 1, 0))
    }

    pub fn m() -> Self {
        Self::unit(UnitMonomial::new(0, 0, 1))
    }

    pub fn unit(mono: UnitMonomial) -> Self {
        Self::term(mono, GaussianRational::from_integer(1))
    }

    /// A single term `coeff * mono`; zero coefficients give the zero scalar.
    pub fn term(mono: UnitMonomial, coeff: GaussianRational) -> Self {
        let mut terms = BTreeMap::new();
        if !coeff.is_zero() {
            terms.insert(mono, coeff);
        }
        Self { terms }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1
            && self
                .terms
                .iter()
                .all(|(mono, g)| mono.is_one() && g.is_one())
    }

    pub fn terms(&self) -> impl Iterator<Item = (&UnitMonomial, &GaussianRational)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Complex conjugate; the unit symbols are real.
    pub fn conj(&self) -> Self {
        Self {
            terms: self
                .terms
                .iter()
                .map(|(mono, g)| (*mono, g.conj()))
                .collect(),
        }
    }

    /// Inverse of a single nonzero monomial term.
    pub fn inv(&self) -> Result<Self, ScalarError> {
        if self.terms.len() != 1 {
            return Err(ScalarError::NotInvertible(self.to_string()));
        }
        let (mono, g) = self.terms.iter().next().expect("one term");
        let inv = g
            .inv()
            .ok_or_else(|| ScalarError::NotInvertible(self.to_string()))?;
        Ok(Self::term(mono.inv(), inv))
    }

    /// Integer power; negative exponents need an invertible scalar.
    pub fn pow(&self, exp: i32) -> Result<Self, ScalarError> {
        let base = if exp < 0 { self.inv()? } else { self.clone() };
        let mut acc = Self::one();
        for _ in 0..exp.unsigned_abs() {
            acc = &acc * &base;
        }
        Ok(acc)
    }

    /// Evaluate with the unit symbols bound to floating-point values.
    pub fn eval(&self, hbar: f64, c: f64, m: f64) -> (f64, f64) {
        let mut re = 0.0;
        let mut im = 0.0;
        for (mono, g) in &self.terms {
            let w = hbar.powi(mono.hbar) * c.powi(mono.c) * m.powi(mono.m);
            let (gr, gi) = g.to_f64_pair();
            re += gr * w;
            im += gi * w;
        }
        (re, im)
    }

    fn add_term(&mut self, mono: UnitMonomial, g: &GaussianRational) {
        use std::collections::btree_map::Entry;
        match self.terms.entry(mono) {
            Entry::Vacant(v) => {
                if !g.is_zero() {
                    v.insert(g.clone());
                }
            }
            Entry::Occupied(mut o) => {
                let sum = o.get() + g;
                if sum.is_zero() {
                    o.remove();
                } else {
                    *o.get_mut() = sum;
                }
            }
        }
    }
}

impl AddAssign<&Scalar> for Scalar {
    fn add_assign(&mut self, rhs: &Scalar) {
        for (mono, g) in &rhs.terms {
            self.add_term(*mono, g);
        }
    }
}

impl Add for &Scalar {
    type Output = Scalar;
    fn add(self, rhs: &Scalar) -> Scalar {
        let mut out = self.clone();
        out += rhs;
        out
    }
}

impl Add for Scalar {
    type Output = Scalar;
    fn add(mut self, rhs: Scalar) -> Scalar {
        self += &rhs;
        self
    }
}

impl Sub for &Scalar {
    type Output = Scalar;
    fn sub(self, rhs: &Scalar) -> Scalar {
        self + &(-rhs)
    }
}

impl Sub for Scalar {
    type Output = Scalar;
    fn sub(self, rhs: Scalar) -> Scalar {
        &self - &rhs
    }
}

impl Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        Scalar {
            terms: self.terms.iter().map(|(mono, g)| (*mono, -g)).collect(),
        }
    }
}

impl Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        -&self
    }
}

impl Mul for &Scalar {
    type Output = Scalar;
    fn mul(self, rhs: &Scalar) -> Scalar {
        let mut out = Scalar::zero();
        for (ma, ga) in &self.terms {
            for (mb, gb) in &rhs.terms {
                out.add_term(ma.mul(*mb), &(ga * gb));
            }
        }
        out
    }
}

impl Mul for Scalar {
    type Output = Scalar;
    fn mul(self, rhs: Scalar) -> Scalar {
        &self * &rhs
    }
}

impl fmt::Display for GaussianRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.re.is_zero(), self.im.is_zero()) {
            (_, true) => write!(f, "{}", self.re),
            (true, false) => write!(f, "{}*i", self.im),
            (false, false) => {
                let sign = if self.im.is_negative() { '-' } else { '+' };
                write!(f, "({} {} {}*i)", self.re, sign, self.im.abs())
            }
        }
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (k, (mono, g)) in self.terms.iter().enumerate() {
            if k > 0 {
                write!(f, " + ")?;
            }
            write!(f, "{g}")?;
            for (name, e) in [("hbar", mono.hbar), ("c", mono.c), ("m", mono.m)] {
                match e {
                    0 => {}
                    1 => write!(f, "*{name}")?,
                    _ => write!(f, "*{name}^{e}")?,
                }
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn i_squared_is_minus_one() {
        assert_eq!(&Scalar::i() * &Scalar::i(), Scalar::integer(-1));
    }

    #[test]
    fn monomial_exponents_add() {
        let hbar_c2 = &Scalar::hbar() * &Scalar::c().pow(2).unwrap();
        let got = &hbar_c2 * &Scalar::hbar().inv().unwrap();
        assert_eq!(got, Scalar::c().pow(2).unwrap());
    }

    #[test]
    fn conjugate_sum_is_real() {
        let a = Scalar::term(
            UnitMonomial::ONE,
            GaussianRational::new(
                BigRational::new(1.into(), 2.into()),
                BigRational::new(1.into(), 2.into()),
            ),
        );
        assert_eq!(&a + &a.conj(), Scalar::one());
    }

    #[test]
    fn cancellation_leaves_no_zero_terms() {
        let a = &Scalar::hbar() + &Scalar::one();
        let z = &a - &a;
        assert!(z.is_zero());
        assert_eq!(z.len(), 0);
    }

    #[test]
    fn inverse_of_monomial() {
        let s = &Scalar::ratio(2, 1) * &(&Scalar::m() * &Scalar::c().pow(2).unwrap());
        let inv = s.inv().unwrap();
        assert!((&s * &inv).is_one());
        assert_eq!(inv.to_string(), "1/2*c^-2*m^-1");
    }

    #[test]
    fn complex_inverse() {
        let z = &Scalar::one() + &Scalar::i();
        let inv = z.inv().unwrap();
        assert!((&z * &inv).is_one());
    }

    #[test]
    fn non_invertible_inputs() {
        assert!(matches!(
            Scalar::zero().inv(),
            Err(ScalarError::NotInvertible(_))
        ));
        let two_terms = &Scalar::hbar() + &Scalar::c();
        assert!(matches!(
            two_terms.inv(),
            Err(ScalarError::NotInvertible(_))
        ));
    }

    #[test]
    fn eval_binds_units() {
        let s = &Scalar::ratio(1, 2) * &(&Scalar::i() * &Scalar::m().pow(-1).unwrap());
        assert_eq!(s.eval(1.0, 1.0, 4.0), (0.0, 0.125));
    }
}
