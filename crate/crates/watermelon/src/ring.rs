//! One scalar interface over exact rationals, big integers, Laurent
//! polynomials in `q` and complex doubles, with fraction-free determinants.

use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::qpoly::QPoly;

pub trait Scalar: Clone + PartialEq + std::fmt::Debug + Send + Sync + 'static {
    fn zero() -> Self;
    fn one() -> Self;
    fn from_i64(v: i64) -> Self;
    fn from_bigint(v: &BigInt) -> Self;
    fn add(&self, o: &Self) -> Self;
    fn sub(&self, o: &Self) -> Self;
    fn mul(&self, o: &Self) -> Self;
    fn neg(&self) -> Self;
    fn is_zero(&self) -> bool;
    /// Division known to be exact in the ring (field division for rationals).
    fn div_exact(&self, o: &Self) -> Result<Self>;

    fn pow(&self, mut e: u32) -> Self {
        let mut base = self.clone();
        let mut acc = Self::one();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        acc
    }

    /// `1 + u + ... + u^(e-1)`, taking the removable-singularity value `e` at `u = 1`.
    fn geom_sum(u: &Self, e: u32) -> Self {
        if *u == Self::one() {
            return Self::from_i64(e as i64);
        }
        let one = Self::one();
        one.sub(&u.pow(e))
            .div_exact(&one.sub(u))
            .expect("geometric sum away from u = 1")
    }

    fn det(m: Vec<Vec<Self>>) -> Result<Self> {
        bareiss(m)
    }
}

/// Fraction-free Gaussian elimination with row pivoting.
pub fn bareiss<S: Scalar>(mut a: Vec<Vec<S>>) -> Result<S> {
    let n = a.len();
    if n == 0 {
        return Ok(S::one());
    }
    if a.iter().any(|r| r.len() != n) {
        return Err(Error::InvalidParameter("matrix is not square".into()));
    }
    let mut prev = S::one();
    let mut negate = false;
    for k in 0..n - 1 {
        if a[k][k].is_zero() {
            match (k + 1..n).find(|&i| !a[i][k].is_zero()) {
                Some(i) => {
                    a.swap(k, i);
                    negate = !negate;
                }
                None => return Ok(S::zero()),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = a[i][j].mul(&a[k][k]).sub(&a[i][k].mul(&a[k][j]));
                a[i][j] = v.div_exact(&prev)?;
            }
        }
        prev = a[k][k].clone();
    }
    let d = a[n - 1][n - 1].clone();
    Ok(if negate { d.neg() } else { d })
}

pub fn det<S: Scalar>(m: Vec<Vec<S>>) -> Result<S> {
    S::det(m)
}

/// `V(x) = prod_{j<l} (x_j - x_l) = det(x_j^(N-k))`.
pub fn vandermonde<S: Scalar>(x: &[S]) -> S {
    let mut acc = S::one();
    for j in 0..x.len() {
        for l in j + 1..x.len() {
            acc = acc.mul(&x[j].sub(&x[l]));
        }
    }
    acc
}

pub fn product<S: Scalar>(x: &[S]) -> S {
    x.iter().fold(S::one(), |a, b| a.mul(b))
}

impl Scalar for BigRational {
    fn zero() -> Self {
        Zero::zero()
    }
    fn one() -> Self {
        One::one()
    }
    fn from_i64(v: i64) -> Self {
        BigRational::from_integer(BigInt::from(v))
    }
    fn from_bigint(v: &BigInt) -> Self {
        BigRational::from_integer(v.clone())
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn neg(&self) -> Self {
        -self
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn div_exact(&self, o: &Self) -> Result<Self> {
        if Zero::is_zero(o) {
            Err(Error::DivisionByZero)
        } else {
            Ok(self / o)
        }
    }
}

impl Scalar for BigInt {
    fn zero() -> Self {
        Zero::zero()
    }
    fn one() -> Self {
        One::one()
    }
    fn from_i64(v: i64) -> Self {
        BigInt::from(v)
    }
    fn from_bigint(v: &BigInt) -> Self {
        v.clone()
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn neg(&self) -> Self {
        -self
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn div_exact(&self, o: &Self) -> Result<Self> {
        if Zero::is_zero(o) {
            return Err(Error::DivisionByZero);
        }
        let (q, r) = self.div_rem(o);
        if Zero::is_zero(&r) {
            Ok(q)
        } else {
            Err(Error::NonDivisible)
        }
    }
}

impl Scalar for QPoly {
    fn zero() -> Self {
        QPoly::zero()
    }
    fn one() -> Self {
        QPoly::one()
    }
    fn from_i64(v: i64) -> Self {
        QPoly::constant(v)
    }
    fn from_bigint(v: &BigInt) -> Self {
        QPoly::constant(v.clone())
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn neg(&self) -> Self {
        -self
    }
    fn is_zero(&self) -> bool {
        QPoly::is_zero(self)
    }
    fn div_exact(&self, o: &Self) -> Result<Self> {
        self.exact_div(o)
    }
}

impl Scalar for Complex64 {
    fn zero() -> Self {
        Complex64::new(0.0, 0.0)
    }
    fn one() -> Self {
        Complex64::new(1.0, 0.0)
    }
    fn from_i64(v: i64) -> Self {
        Complex64::new(v as f64, 0.0)
    }
    fn from_bigint(v: &BigInt) -> Self {
        Complex64::new(num_traits::ToPrimitive::to_f64(v).unwrap_or(f64::NAN), 0.0)
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn neg(&self) -> Self {
        -self
    }
    fn is_zero(&self) -> bool {
        self.norm_sqr() == 0.0
    }
    fn div_exact(&self, o: &Self) -> Result<Self> {
        if o.norm_sqr() == 0.0 {
            Err(Error::DivisionByZero)
        } else {
            Ok(self / o)
        }
    }
    fn pow(&self, e: u32) -> Self {
        self.powu(e)
    }

    // Near u = 1 the closed form cancels catastrophically; sum directly there.
    fn geom_sum(u: &Self, e: u32) -> Self {
        if (u - 1.0).norm() < 1e-4 {
            let mut acc = Complex64::new(0.0, 0.0);
            let mut p = Complex64::new(1.0, 0.0);
            for _ in 0..e {
                acc += p;
                p *= u;
            }
            acc
        } else {
            (1.0 - u.powu(e)) / (1.0 - u)
        }
    }

    fn det(m: Vec<Vec<Self>>) -> Result<Self> {
        Ok(lu_det(m))
    }
}

/// LU with partial pivoting; exact zeros short-circuit.
pub fn lu_det(mut a: Vec<Vec<Complex64>>) -> Complex64 {
    let n = a.len();
    let mut d = Complex64::new(1.0, 0.0);
    for k in 0..n {
        let p = (k..n)
            .max_by(|&i, &j| a[i][k].norm().total_cmp(&a[j][k].norm()))
            .unwrap();
        if a[p][k].norm() == 0.0 {
            return Complex64::new(0.0, 0.0);
        }
        if p != k {
            a.swap(p, k);
            d = -d;
        }
        let piv = a[k][k];
        d *= piv;
        for i in k + 1..n {
            let f = a[i][k] / piv;
            if f.norm() == 0.0 {
                continue;
            }
            for j in k + 1..n {
                let t = a[k][j];
                a[i][j] -= f * t;
            }
        }
    }
    d
}

/// `count` distinct positive rationals `p/q` (`p <= 12`, `q <= 7`) drawn
/// from a ChaCha stream seeded with `seed`.
pub fn seeded_rationals(seed: u64, count: usize) -> Vec<BigRational> {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let mut out: Vec<BigRational> = Vec::with_capacity(count);
    while out.len() < count {
        let r = rat(rng.gen_range(1..=12), rng.gen_range(1..=7));
        if !out.contains(&r) {
            out.push(r);
        }
    }
    out
}

/// Rational `a/b` shorthand.
pub fn rat(a: i64, b: i64) -> BigRational {
    BigRational::new(BigInt::from(a), BigInt::from(b))
}
