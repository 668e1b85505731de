//! Laurent polynomials in one variable `q` with big-integer coefficients,
//! plus q-numbers, q-factorials and Gaussian binomials.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// `sum_i coeffs[i] q^(min_degree + i)`, kept canonical: no zero edge
/// coefficients, and zero is the empty list at degree 0.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct QPoly {
    min_degree: i64,
    coeffs: Vec<BigInt>,
}

impl QPoly {
    pub fn zero() -> Self {
        QPoly {
            min_degree: 0,
            coeffs: Vec::new(),
        }
    }

    pub fn one() -> Self {
        Self::monomial(BigInt::one(), 0)
    }

    /// The variable `q` itself.
    pub fn q() -> Self {
        Self::monomial(BigInt::one(), 1)
    }

    pub fn constant<T: Into<BigInt>>(c: T) -> Self {
        Self::monomial(c.into(), 0)
    }

    pub fn monomial(c: BigInt, degree: i64) -> Self {
        Self::from_coeffs(degree, vec![c])
    }

    /// `q^degree`.
    pub fn q_pow(degree: i64) -> Self {
        Self::monomial(BigInt::one(), degree)
    }

    pub fn from_coeffs(min_degree: i64, coeffs: Vec<BigInt>) -> Self {
        let mut p = QPoly { min_degree, coeffs };
        p.canonicalize();
        p
    }

    pub fn from_i64s(min_degree: i64, coeffs: &[i64]) -> Self {
        Self::from_coeffs(min_degree, coeffs.iter().map(|&c| BigInt::from(c)).collect())
    }

    fn canonicalize(&mut self) {
        while self.coeffs.last().is_some_and(|c| c.is_zero()) {
            self.coeffs.pop();
        }
        let lead = self.coeffs.iter().take_while(|c| c.is_zero()).count();
        if lead > 0 {
            self.coeffs.drain(..lead);
            self.min_degree += lead as i64;
        }
        if self.coeffs.is_empty() {
            self.min_degree = 0;
        }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.min_degree == 0 && self.coeffs.len() == 1 && self.coeffs[0].is_one()
    }

    pub fn min_degree(&self) -> i64 {
        self.min_degree
    }

    /// Highest degree; for zero this is `min_degree - 1`.
    pub fn max_degree(&self) -> i64 {
        self.min_degree + self.coeffs.len() as i64 - 1
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    pub fn coeff(&self, degree: i64) -> BigInt {
        let i = degree - self.min_degree;
        if i < 0 || i as usize >= self.coeffs.len() {
            BigInt::zero()
        } else {
            self.coeffs[i as usize].clone()
        }
    }

    /// Monomial `c q^d` if this polynomial has exactly one term.
    pub fn as_monomial(&self) -> Option<(BigInt, i64)> {
        (self.coeffs.len() == 1).then(|| (self.coeffs[0].clone(), self.min_degree))
    }

    /// Multiply by `q^d`.
    pub fn shift(&self, d: i64) -> Self {
        if self.is_zero() {
            return Self::zero();
        }
        QPoly {
            min_degree: self.min_degree + d,
            coeffs: self.coeffs.clone(),
        }
    }

    pub fn scale(&self, c: &BigInt) -> Self {
        Self::from_coeffs(self.min_degree, self.coeffs.iter().map(|a| a * c).collect())
    }

    pub fn pow(&self, mut e: u32) -> Self {
        let mut base = self.clone();
        let mut acc = Self::one();
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    /// Value at `q = 1`.
    pub fn eval_at_one(&self) -> BigInt {
        self.coeffs.iter().sum()
    }

    pub fn eval_f64(&self, q: f64) -> f64 {
        self.coeffs
            .iter()
            .enumerate()
            .map(|(i, c)| c.to_f64().unwrap_or(f64::NAN) * q.powi((self.min_degree + i as i64) as i32))
            .sum()
    }

    /// Drop every term of degree above `max_degree`.
    pub fn truncate(&self, max_degree: i64) -> Self {
        if self.is_zero() || max_degree < self.min_degree {
            return Self::zero();
        }
        let keep = ((max_degree - self.min_degree + 1) as usize).min(self.coeffs.len());
        Self::from_coeffs(self.min_degree, self.coeffs[..keep].to_vec())
    }

    /// Quotient with zero remainder; fails loudly otherwise.
    pub fn exact_div(&self, den: &QPoly) -> Result<QPoly> {
        if den.is_zero() {
            return Err(Error::DivisionByZero);
        }
        if self.is_zero() {
            return Ok(Self::zero());
        }
        // Both lowest coefficients are nonzero, so long division from the top
        // is exact iff the Laurent quotient is a polynomial.
        let d = &den.coeffs;
        let dl = d.len();
        if self.coeffs.len() < dl {
            return Err(Error::NonDivisible);
        }
        let lead = &d[dl - 1];
        let mut rem = self.coeffs.clone();
        let qlen = rem.len() - dl + 1;
        let mut quot = vec![BigInt::zero(); qlen];
        for i in (0..qlen).rev() {
            let top = &rem[i + dl - 1];
            if top.is_zero() {
                continue;
            }
            let (c, r) = top.div_rem(lead);
            if !r.is_zero() {
                return Err(Error::NonDivisible);
            }
            for (j, dj) in d.iter().enumerate() {
                rem[i + j] -= &c * dj;
            }
            quot[i] = c;
        }
        if rem.iter().any(|c| !c.is_zero()) {
            return Err(Error::NonDivisible);
        }
        Ok(Self::from_coeffs(self.min_degree - den.min_degree, quot))
    }

    /// Human-readable ascending form `c_k q^k + ...`.
    pub fn to_text(&self) -> String {
        if self.is_zero() {
            return "0".to_string();
        }
        let mut out = String::new();
        for (i, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let d = self.min_degree + i as i64;
            if !out.is_empty() {
                out.push_str(if c.is_negative() { " - " } else { " + " });
            } else if c.is_negative() {
                out.push('-');
            }
            let a = c.abs();
            let mono = match d {
                0 => String::new(),
                1 => "q".to_string(),
                _ => format!("q^{d}"),
            };
            if mono.is_empty() {
                out.push_str(&a.to_string());
            } else if a.is_one() {
                out.push_str(&mono);
            } else {
                out.push_str(&format!("{a} {mono}"));
            }
        }
        out
    }
}

impl fmt::Display for QPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

fn add_into(a: &QPoly, b: &QPoly, sign: i32) -> QPoly {
    if b.is_zero() {
        return a.clone();
    }
    if a.is_zero() {
        return if sign > 0 { b.clone() } else { -b };
    }
    let lo = a.min_degree.min(b.min_degree);
    let hi = a.max_degree().max(b.max_degree());
    let mut c = vec![BigInt::zero(); (hi - lo + 1) as usize];
    for (i, x) in a.coeffs.iter().enumerate() {
        c[(a.min_degree - lo) as usize + i] += x;
    }
    for (i, x) in b.coeffs.iter().enumerate() {
        let slot = &mut c[(b.min_degree - lo) as usize + i];
        if sign > 0 {
            *slot += x;
        } else {
            *slot -= x;
        }
    }
    QPoly::from_coeffs(lo, c)
}

impl Add for &QPoly {
    type Output = QPoly;
    fn add(self, o: &QPoly) -> QPoly {
        add_into(self, o, 1)
    }
}

impl Sub for &QPoly {
    type Output = QPoly;
    fn sub(self, o: &QPoly) -> QPoly {
        add_into(self, o, -1)
    }
}

impl Mul for &QPoly {
    type Output = QPoly;
    fn mul(self, o: &QPoly) -> QPoly {
        if self.is_zero() || o.is_zero() {
            return QPoly::zero();
        }
        let mut c = vec![BigInt::zero(); self.coeffs.len() + o.coeffs.len() - 1];
        for (i, x) in self.coeffs.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (j, y) in o.coeffs.iter().enumerate() {
                c[i + j] += x * y;
            }
        }
        QPoly::from_coeffs(self.min_degree + o.min_degree, c)
    }
}

impl Neg for &QPoly {
    type Output = QPoly;
    fn neg(self) -> QPoly {
        QPoly {
            min_degree: self.min_degree,
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
        }
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr for QPoly {
            type Output = QPoly;
            fn $m(self, o: QPoly) -> QPoly {
                (&self).$m(&o)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl Neg for QPoly {
    type Output = QPoly;
    fn neg(self) -> QPoly {
        -&self
    }
}

#[derive(Serialize, Deserialize)]
struct QPolyWire {
    min_degree: i64,
    coeffs: Vec<String>,
}

impl Serialize for QPoly {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        QPolyWire {
            min_degree: self.min_degree,
            coeffs: self.coeffs.iter().map(|c| c.to_string()).collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for QPoly {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let w = QPolyWire::deserialize(d)?;
        let coeffs = w
            .coeffs
            .iter()
            .map(|s| s.parse::<BigInt>().map_err(serde::de::Error::custom))
            .collect::<std::result::Result<Vec<_>, _>>()?;
        Ok(QPoly::from_coeffs(w.min_degree, coeffs))
    }
}

/// `[n] = 1 + q + ... + q^(n-1)`.
pub fn q_int(n: u64) -> QPoly {
    QPoly::from_coeffs(0, vec![BigInt::one(); n as usize])
}

/// `([n], [n]!)`.
pub fn q_int_factorial(n: u64) -> (QPoly, QPoly) {
    let mut f = QPoly::one();
    for i in 1..=n {
        f = &f * &q_int(i);
    }
    (q_int(n), f)
}

/// Gaussian binomial `[n choose r]`; zero outside `0..=n`.
pub fn q_binomial(n: u64, r: i64) -> QPoly {
    if r < 0 || r as u64 > n {
        return QPoly::zero();
    }
    let r = (r as u64).min(n - r as u64);
    // Each partial product is itself a Gaussian binomial, so every division is exact.
    let mut acc = QPoly::one();
    for i in 1..=r {
        let num = &acc * &(&QPoly::one() - &QPoly::q_pow((n - r + i) as i64));
        acc = num
            .exact_div(&(&QPoly::one() - &QPoly::q_pow(i as i64)))
            .expect("Gaussian binomial partial products are polynomial");
    }
    acc
}

/// Determinant of the matrix with `(i, j)` entry `[a_j choose b_i]`.
pub fn q_binomial_det(a: &[u64], b: &[u64]) -> Result<QPoly> {
    if a.len() != b.len() {
        return Err(Error::LengthMismatch {
            expected: a.len(),
            found: b.len(),
        });
    }
    let strict = |v: &[u64]| v.windows(2).all(|w| w[0] < w[1]);
    if !strict(a) || !strict(b) {
        return Err(Error::NotStrict);
    }
    let m: Vec<Vec<QPoly>> = b
        .iter()
        .map(|&bi| a.iter().map(|&aj| q_binomial(aj, bi as i64)).collect())
        .collect();
    crate::ring::det(m)
}

/// Ordinary binomial coefficient as a big integer; zero outside range.
pub fn binomial(n: i64, r: i64) -> BigInt {
    if r < 0 || n < 0 || r > n {
        return BigInt::zero();
    }
    let r = r.min(n - r);
    let mut acc = BigInt::one();
    for i in 0..r {
        acc = acc * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    acc
}
