//! Schur functions: bialternant, tableau enumeration, Jacobi–Trudi, the
//! complementary skew shape and principal specializations.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qpoly::QPoly;
use crate::ring::{det, product, vandermonde, Scalar};

/// `S_lambda(x)` for `len(lambda) == len(x)`.
///
/// Zero points route through the trailing-zero limit, and a constant tuple
/// `(c, ..., c)` returns `c^|lambda|` times the tableau count.
pub fn schur_eval<S: Scalar>(lambda: &[usize], x: &[S]) -> Result<S> {
    let n = x.len();
    if lambda.len() != n {
        return Err(Error::LengthMismatch {
            expected: n,
            found: lambda.len(),
        });
    }
    check_weak(lambda)?;
    let zeros = x.iter().filter(|v| v.is_zero()).count();
    if zeros > 0 {
        if lambda[n - zeros..].iter().any(|&p| p != 0) {
            return Err(Error::ZeroLimitInvalid);
        }
        let rest: Vec<S> = x.iter().filter(|v| !v.is_zero()).cloned().collect();
        return schur_eval(&lambda[..n - zeros], &rest);
    }
    if has_repeat(x) {
        if x.iter().all(|v| *v == x[0]) {
            let w: usize = lambda.iter().sum();
            let c = ssyt_count_formula(lambda, n);
            return Ok(x[0].pow(w as u32).mul(&S::from_bigint(&c)));
        }
        return Err(Error::RepeatedPoint);
    }
    bialternant(lambda, x)
}

fn check_weak(lambda: &[usize]) -> Result<()> {
    if lambda.windows(2).any(|w| w[0] < w[1]) {
        Err(Error::NotWeak)
    } else {
        Ok(())
    }
}

fn has_repeat<S: Scalar>(x: &[S]) -> bool {
    (0..x.len()).any(|i| (i + 1..x.len()).any(|j| x[i] == x[j]))
}

/// `det(x_j^(lambda_k + N - k)) / V(x)` with no special-casing.
pub fn bialternant<S: Scalar>(lambda: &[usize], x: &[S]) -> Result<S> {
    let n = x.len();
    let v = vandermonde(x);
    if v.is_zero() {
        return Err(Error::RepeatedPoint);
    }
    let m: Vec<Vec<S>> = x
        .iter()
        .map(|xj| (0..n).map(|k| xj.pow((lambda[k] + n - 1 - k) as u32)).collect())
        .collect();
    det(m)?.div_exact(&v)
}

/// Visit every semi-standard filling of the skew shape `outer / inner` with
/// entries in `lo..=hi`; rows weakly increase, columns strictly increase.
/// The callback receives the entries of each row, left to right.
pub fn for_each_skew_tableau<F: FnMut(&[Vec<usize>])>(
    outer: &[usize],
    inner: &[usize],
    lo: usize,
    hi: usize,
    mut f: F,
) {
    let rows = outer.len();
    let inner: Vec<usize> = (0..rows).map(|r| inner.get(r).copied().unwrap_or(0)).collect();
    let mut fill: Vec<Vec<usize>> = (0..rows).map(|r| vec![0; outer[r].saturating_sub(inner[r])]).collect();
    let cells: Vec<(usize, usize)> = (0..rows)
        .flat_map(|r| (inner[r]..outer[r].max(inner[r])).map(move |c| (r, c)))
        .collect();
    fn rec<F: FnMut(&[Vec<usize>])>(
        idx: usize,
        cells: &[(usize, usize)],
        outer: &[usize],
        inner: &[usize],
        hi: usize,
        lo: usize,
        fill: &mut Vec<Vec<usize>>,
        f: &mut F,
    ) {
        if idx == cells.len() {
            f(fill);
            return;
        }
        let (r, c) = cells[idx];
        let mut min = lo;
        if c > inner[r] {
            min = min.max(fill[r][c - 1 - inner[r]]);
        }
        if r > 0 && c >= inner[r - 1] && c < outer[r - 1] {
            min = min.max(fill[r - 1][c - inner[r - 1]] + 1);
        }
        for v in min..=hi {
            fill[r][c - inner[r]] = v;
            rec(idx + 1, cells, outer, inner, hi, lo, fill, f);
        }
    }
    if lo > hi && !cells.is_empty() {
        return;
    }
    rec(0, &cells, outer, &inner, hi, lo, &mut fill, &mut f);
}

/// Semi-standard tableaux of shape `lambda` with entries in `lo..=hi`.
pub fn tableaux(lambda: &[usize], lo: usize, hi: usize) -> Vec<Vec<Vec<usize>>> {
    let mut out = Vec::new();
    for_each_skew_tableau(lambda, &[], lo, hi, |t| out.push(t.to_vec()));
    out
}

/// Letter multiplicities `(c_1, ..., c_n)` of a filling.
pub fn content(t: &[Vec<usize>], n: usize) -> Vec<usize> {
    let mut c = vec![0; n];
    for row in t {
        for &v in row {
            c[v - 1] += 1;
        }
    }
    c
}

/// `S_lambda(1_N) = prod_{j<k} (lambda_j - j - lambda_k + k) / (k - j)`.
pub fn ssyt_count_formula(lambda: &[usize], n: usize) -> BigInt {
    if lambda.iter().skip(n).any(|&p| p > 0) {
        return <BigInt as Zero>::zero();
    }
    let l: Vec<i64> = (0..n).map(|i| lambda.get(i).copied().unwrap_or(0) as i64).collect();
    let mut acc = <BigRational as One>::one();
    for j in 0..n {
        for k in j + 1..n {
            acc *= BigRational::new(
                BigInt::from(l[j] - j as i64 - l[k] + k as i64),
                BigInt::from((k - j) as i64),
            );
        }
    }
    acc.to_integer()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TableauOracle {
    pub count: BigInt,
    pub contents: Vec<Vec<usize>>,
}

/// Enumerate tableaux of shape `lambda` over `[N]`, returning the count and
/// each tableau's letter content.
pub fn schur_tableau_oracle(lambda: &[usize], n: usize) -> TableauOracle {
    let mut contents = Vec::new();
    let shape: Vec<usize> = lambda.iter().copied().filter(|&p| p > 0).collect();
    if shape.len() <= n {
        for_each_skew_tableau(&shape, &[], 1, n, |t| contents.push(content(t, n)));
    }
    TableauOracle {
        count: BigInt::from(contents.len()),
        contents,
    }
}

/// `sum_T x^T` over tableaux of shape `lambda` with entries in `[len(x)]`.
pub fn schur_tableau_eval<S: Scalar>(lambda: &[usize], x: &[S]) -> S {
    let oracle = schur_tableau_oracle(lambda, x.len());
    oracle.contents.iter().fold(S::zero(), |acc, c| {
        let term = c.iter().zip(x).fold(S::one(), |t, (&e, xi)| t.mul(&xi.pow(e as u32)));
        acc.add(&term)
    })
}

/// Complete homogeneous symmetric function `h_r(x)`.
pub fn complete_homogeneous<S: Scalar>(r: i64, x: &[S]) -> S {
    if r < 0 {
        return S::zero();
    }
    // h_r(x_1..x_m) = h_r(x_1..x_{m-1}) + x_m h_{r-1}(x_1..x_m)
    let r = r as usize;
    let mut h = vec![S::zero(); r + 1];
    h[0] = S::one();
    for xi in x {
        for d in 1..=r {
            h[d] = h[d].add(&xi.mul(&h[d - 1]));
        }
    }
    h[r].clone()
}

/// `det(h_{lambda_i - i + j}(x))`.
pub fn schur_jacobi_trudi<S: Scalar>(lambda: &[usize], x: &[S]) -> Result<S> {
    let l = lambda.len();
    let m: Vec<Vec<S>> = (0..l)
        .map(|i| {
            (0..l)
                .map(|j| complete_homogeneous(lambda[i] as i64 - i as i64 + j as i64, x))
                .collect()
        })
        .collect();
    det(m)
}

/// `S_{M \ lambda}(y)` through the determinant with exponents
/// `M - lambda_{N-b+1} + N - b` in column `b`.
pub fn skew_schur_eval<S: Scalar>(lambda: &[usize], calm: usize, y: &[S]) -> Result<S> {
    let n = y.len();
    if lambda.len() != n {
        return Err(Error::LengthMismatch {
            expected: n,
            found: lambda.len(),
        });
    }
    check_weak(lambda)?;
    if lambda.first().is_some_and(|&p| p > calm) {
        return Err(Error::InvalidParameter(format!("partition exceeds {calm}")));
    }
    if y.iter().any(|v| v.is_zero()) {
        return Err(Error::ZeroArgument);
    }
    let m: Vec<Vec<S>> = y
        .iter()
        .map(|ya| (1..=n).map(|b| ya.pow((calm - lambda[n - b] + n - b) as u32)).collect())
        .collect();
    let v = vandermonde(y);
    if v.is_zero() {
        return Err(Error::RepeatedPoint);
    }
    let value = det(m)?.div_exact(&v)?;
    if cfg!(debug_assertions) {
        let inv: Option<Vec<S>> = y.iter().map(|v| S::one().div_exact(v).ok()).collect();
        if let Some(inv) = inv {
            let via_dual = schur_eval(lambda, &inv)?.mul(&product(y).pow(calm as u32));
            if via_dual != value && !approx_ok(&via_dual, &value) {
                return Err(Error::IdentityMismatch("complementary skew Schur duality".into()));
            }
        }
    }
    Ok(value)
}

// Exact scalars compare structurally; floats get a relative tolerance.
pub(crate) fn approx_ok<S: Scalar>(a: &S, b: &S) -> bool {
    let any: &dyn std::any::Any = a;
    if let Some(a) = any.downcast_ref::<num_complex::Complex64>() {
        let b = (b as &dyn std::any::Any)
            .downcast_ref::<num_complex::Complex64>()
            .unwrap();
        return (a - b).norm() <= 1e-9 * (1.0 + a.norm());
    }
    false
}

/// Principal specializations used for stars.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Specialization {
    /// `q_N = (q, ..., q^N)`
    QN,
    /// `q_N / q = (1, ..., q^(N-1))`
    QNOverQ,
    /// `1 / q_N = (q^-1, ..., q^-N)`
    InvQN,
}

/// `(q^lo, q^(lo+1), ..., q^hi)`.
pub fn q_range(lo: i64, hi: i64) -> Vec<QPoly> {
    (lo..=hi).map(QPoly::q_pow).collect()
}

pub fn specialization_points(n: usize, mode: Specialization) -> Vec<QPoly> {
    let n = n as i64;
    match mode {
        Specialization::QN => q_range(1, n),
        Specialization::QNOverQ => q_range(0, n - 1),
        Specialization::InvQN => (1..=n).map(|i| QPoly::q_pow(-i)).collect(),
    }
}

/// `S_lambda` at `q_N`, `q_N/q` or `1/q_N`; `lambda` is zero-padded to `N`.
pub fn principal_specialization(lambda: &[usize], n: usize, mode: Specialization) -> Result<QPoly> {
    if lambda.len() > n && lambda[n..].iter().any(|&p| p > 0) {
        return Ok(QPoly::zero());
    }
    let mut l = lambda.to_vec();
    l.resize(n, 0);
    schur_eval(&l, &specialization_points(n, mode))
}
