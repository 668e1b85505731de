//! Cauchy–Binet sums of Schur products and their determinant forms, the
//! q-binomial determinant evaluations of boxed plane partitions, and the
//! large-height limit of the deviated watermelon generating function.

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::par;
use crate::partitions::{iter_partitions_in_box, macmahon_count, zq_product};
use crate::qpoly::{binomial, q_binomial, q_binomial_det, q_int, QPoly};
use crate::ring::{det, product, vandermonde, Scalar};
use crate::schur::{bialternant, complete_homogeneous, q_range, schur_eval};

/// Parameters of one Cauchy–Binet instance.
///
/// With an empty `index_set` this is the sum over `lambda` in the box
/// `(ell/lower)^N` of `S_lambda(x) S_lambda(y)`. With a nonempty index set
/// `i` of size `k`, `x` holds the `N - k` surviving points and the sum is
/// `sum_{lambda in ell^(N-k)} S_lambda(x) S_{lambda-hat}(y)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CBSpec<S> {
    pub n: usize,
    pub ell: usize,
    pub lower: usize,
    /// 1-based, strictly increasing.
    pub index_set: Vec<usize>,
    pub x: Vec<S>,
    pub y: Vec<S>,
}

impl<S: Scalar> CBSpec<S> {
    pub fn unrestricted(ell: usize, lower: usize, x: Vec<S>, y: Vec<S>) -> Self {
        CBSpec {
            n: y.len(),
            ell,
            lower,
            index_set: Vec::new(),
            x,
            y,
        }
    }

    pub fn restricted(ell: usize, index_set: Vec<usize>, xbar: Vec<S>, y: Vec<S>) -> Self {
        CBSpec {
            n: y.len(),
            ell,
            lower: 0,
            index_set,
            x: xbar,
            y,
        }
    }

    pub fn k(&self) -> usize {
        self.index_set.len()
    }

    fn validate(&self) -> Result<()> {
        let (n, k) = (self.n, self.k());
        if self.y.len() != n {
            return Err(Error::LengthMismatch {
                expected: n,
                found: self.y.len(),
            });
        }
        if self.x.len() != n - k.min(n) || k > n {
            return Err(Error::LengthMismatch {
                expected: n - k.min(n),
                found: self.x.len(),
            });
        }
        if self.lower > self.ell {
            return Err(Error::InvalidParameter("lower bound exceeds the box".into()));
        }
        if k > 0 {
            if self.lower != 0 {
                return Err(Error::InvalidParameter("restricted sums have no lower bound".into()));
            }
            let ok =
                self.index_set.windows(2).all(|w| w[0] < w[1]) && self.index_set.iter().all(|&i| (1..=n).contains(&i));
            if !ok {
                return Err(Error::InvalidParameter("index set must increase inside [N]".into()));
            }
        }
        Ok(())
    }
}

fn sum_terms<S: Scalar>(terms: Vec<Result<S>>) -> Result<S> {
    terms.into_iter().try_fold(S::zero(), |acc, t| Ok(acc.add(&t?)))
}

/// Sum side by direct Schur summation.
pub fn cb_pair_sum<S: Scalar>(spec: &CBSpec<S>) -> Result<S> {
    spec.validate()?;
    let k = spec.k();
    let rows = spec.n - k;
    let lower = if k == 0 { spec.lower } else { 0 };
    let lambdas: Vec<_> = iter_partitions_in_box(rows, spec.ell, lower).collect();
    let terms = par::map_indexed(lambdas.len(), |i| {
        let l = lambdas[i].parts();
        let a = schur_eval(l, &spec.x)?;
        let b = schur_eval(lambdas[i].hat(k).parts(), &spec.y)?;
        Ok(a.mul(&b))
    });
    sum_terms(terms)
}

/// Determinant side.
///
/// Unrestricted: `prod (x_l y_l)^n det T / (V(x) V(y))` with
/// `T_ij = (1 - (x_i y_j)^(N+ell-n)) / (1 - x_i y_j)`. Restricted: rows in the
/// index set become `y_j^(k-l)`, the rest keep `T` with exponent `N + ell`,
/// and the value carries the sign `(-1)^(|i| + kN - k(k-1)/2)` and the factor
/// `(prod x)^(-k)`.
pub fn cb_pair_det<S: Scalar>(spec: &CBSpec<S>) -> Result<S> {
    spec.validate()?;
    let n = spec.n;
    let k = spec.k();
    let vx = vandermonde(&spec.x);
    let vy = vandermonde(&spec.y);
    if vx.is_zero() || vy.is_zero() {
        return Err(Error::RepeatedPoint);
    }
    if k == 0 {
        let e = (n + spec.ell - spec.lower) as u32;
        let m: Vec<Vec<S>> = spec
            .x
            .iter()
            .map(|xi| spec.y.iter().map(|yj| S::geom_sum(&xi.mul(yj), e)).collect())
            .collect();
        let pre = product(&spec.x).mul(&product(&spec.y)).pow(spec.lower as u32);
        return pre.mul(&det(m)?).div_exact(&vx.mul(&vy));
    }
    let e = (n + spec.ell) as u32;
    let mut rest = spec.x.iter();
    let m: Vec<Vec<S>> = (1..=n)
        .map(|i| match spec.index_set.iter().position(|&v| v == i) {
            Some(l) => spec.y.iter().map(|yj| yj.pow((k - l - 1) as u32)).collect(),
            None => {
                let xi = rest.next().expect("complement size checked");
                spec.y.iter().map(|yj| S::geom_sum(&xi.mul(yj), e)).collect()
            }
        })
        .collect();
    let weight: usize = spec.index_set.iter().sum();
    let sign_exp = weight + k * n - k * k.saturating_sub(1) / 2;
    let mut value = det(m)?.div_exact(&product(&spec.x).pow(k as u32))?;
    value = value.div_exact(&vx.mul(&vy))?;
    Ok(if sign_exp % 2 == 1 { value.neg() } else { value })
}

/// Complement of `index_set` in `1..=n`.
pub fn complement(n: usize, index_set: &[usize]) -> Vec<usize> {
    (1..=n).filter(|i| !index_set.contains(i)).collect()
}

/// The restricted sum specialized at `x-bar = (q^(i-1))_{i not in I}`, `y = q_N`.
pub fn q_restricted_sum(n: usize, ell: usize, index_set: &[usize]) -> Result<QPoly> {
    let xbar: Vec<QPoly> = complement(n, index_set)
        .iter()
        .map(|&i| QPoly::q_pow(i as i64 - 1))
        .collect();
    let spec = CBSpec::restricted(ell, index_set.to_vec(), xbar, q_range(1, n as i64));
    cb_pair_sum(&spec)
}

/// The q-parametrized restricted determinant with entries
/// `[(ell+N)(j+i-1)] / [j+i-1]` on complement rows and `q^(j(k-l))` on the
/// index rows, the sign, and the factor `q^-(k(k-|I|) + kN(N-1)/2)`.
pub fn q_restricted_det(n: usize, ell: usize, index_set: &[usize]) -> Result<QPoly> {
    let k = index_set.len();
    if index_set.windows(2).any(|w| w[0] >= w[1]) || index_set.iter().any(|&i| i == 0 || i > n) {
        return Err(Error::InvalidParameter("index set must increase inside [N]".into()));
    }
    let m: Vec<Vec<QPoly>> = (1..=n)
        .map(|i| match index_set.iter().position(|&v| v == i) {
            Some(l0) => (1..=n).map(|j| QPoly::q_pow((j * (k - l0 - 1)) as i64)).collect(),
            None => (1..=n)
                .map(|j| {
                    let a = (j + i - 1) as u64;
                    q_int((ell + n) as u64 * a).exact_div(&q_int(a))
                })
                .collect::<Result<Vec<_>>>()
                .expect("[(L+N)a]/[a] is polynomial"),
        })
        .collect();
    let weight: usize = index_set.iter().sum();
    let sign_exp = weight + k * n - k * k.saturating_sub(1) / 2;
    let shift = (k * k) as i64 - (k * weight) as i64 + (k * n * n.saturating_sub(1) / 2) as i64;
    let xbar: Vec<QPoly> = complement(n, index_set)
        .iter()
        .map(|&i| QPoly::q_pow(i as i64 - 1))
        .collect();
    let den = vandermonde(&xbar).mul(&vandermonde(&q_range(1, n as i64)));
    let v = det(m)?.exact_div(&den)?.shift(-shift);
    Ok(if sign_exp % 2 == 1 { -v } else { v })
}

fn mismatch(what: &str, a: &QPoly, b: &QPoly) -> Error {
    Error::IdentityMismatch(format!("{what}: {a} != {b}"))
}

/// Number of boxed partitions `lambda in ell^rows`, used to skip costly sum sides.
fn box_size(rows: usize, ell: usize) -> BigInt {
    binomial((rows + ell) as i64, rows as i64)
}

/// All forms of the plane-partition sum `P_ell(q_{N-k}/q, q_N)`: the
/// index-row determinant, the q-binomial determinant and the double
/// product. Returns `Z_q(N-k, N, ell)`. At `k = 0` also checks the shifted
/// box forms and their `q = 1` counts.
pub fn theorem2_eval(n: usize, k: usize, ell: usize) -> Result<QPoly> {
    if k > n {
        return Err(Error::InvalidParameter("k exceeds N".into()));
    }
    let idx: Vec<usize> = (n - k + 1..=n).collect();
    let det_form = q_restricted_det(n, ell, &idx)?;
    let shift = (n * (ell.saturating_sub(1)) * ell / 2) as i64;
    let a: Vec<u64> = (0..ell).map(|j| (2 * n - k + j) as u64).collect();
    let b: Vec<u64> = (0..ell).map(|i| (n - k + i) as u64).collect();
    let binom_form = q_binomial_det(&a, &b)?.shift(-shift);
    let product_form = zq_product(n - k, n, ell);
    if det_form != binom_form {
        return Err(mismatch(
            "determinant vs q-binomial determinant",
            &det_form,
            &binom_form,
        ));
    }
    if binom_form != product_form {
        return Err(mismatch(
            "q-binomial determinant vs product",
            &binom_form,
            &product_form,
        ));
    }
    if box_size(n - k, ell) <= BigInt::from(5000) {
        let sum = q_restricted_sum(n, ell, &idx)?;
        if sum != product_form {
            return Err(mismatch("Schur sum vs product", &sum, &product_form));
        }
    }
    if k == 0 {
        for lower in 0..=ell {
            let h = ell - lower;
            let a: Vec<u64> = (0..h).map(|i| (2 * n + i) as u64).collect();
            let b: Vec<u64> = (0..h).map(|j| (n + j) as u64).collect();
            let pre = (lower * n * n) as i64 - (n * h * h.saturating_sub(1) / 2) as i64;
            let det_side = q_binomial_det(&a, &b)?.shift(pre);
            let prod_side = zq_product(n, n, h).shift((lower * n * n) as i64);
            if det_side != prod_side {
                return Err(mismatch("shifted box determinant", &det_side, &prod_side));
            }
            if box_size(n, ell) <= BigInt::from(5000) {
                let spec = CBSpec::unrestricted(ell, lower, q_range(0, n as i64 - 1), q_range(1, n as i64));
                let sum = cb_pair_sum(&spec)?;
                if sum != prod_side {
                    return Err(mismatch("shifted box Schur sum", &sum, &prod_side));
                }
            }
            if prod_side.eval_at_one() != macmahon_count(n, n, h) {
                return Err(Error::IdentityMismatch("box count at q = 1".into()));
            }
        }
    }
    Ok(product_form)
}

/// The watermelon determinant
/// `q^(-M N(N-1)/2) det(q^((j-1)(M+j-i)) [L+M+N-i choose M+N-j])`, checked
/// against the box products, the Jacobi–Trudi route through
/// `S_{M-hat}(q_{N+L}/q)`, and the binomial determinant count at `q = 1`.
pub fn watermelon_det(n: usize, l: usize, calm: usize) -> Result<QPoly> {
    if l > n {
        return Err(Error::InvalidParameter("L exceeds N".into()));
    }
    let m = calm as i64;
    let ni = n as i64;
    let li = l as i64;
    let entry = |i: i64, j: i64, top: i64, bottom: i64| q_binomial(top as u64, bottom).shift((j - 1) * (m + j - i));
    let mat: Vec<Vec<QPoly>> = (1..=ni)
        .map(|i| (1..=ni).map(|j| entry(i, j, li + m + ni - i, m + ni - j)).collect())
        .collect();
    let shift = m * ni * (ni - 1) / 2;
    let w = det(mat)?.shift(-shift);
    let z = zq_product(n, l, calm);
    if w != z {
        return Err(mismatch("watermelon determinant vs product", &w, &z));
    }
    let z2 = zq_product(l, calm, n);
    if w != z2 {
        return Err(mismatch("box symmetry", &w, &z2));
    }
    // Jacobi–Trudi route through S_{M-hat}(1, q, ..., q^(N+L-1)).
    let pts = q_range(0, ni + li - 1);
    let mut shape = vec![calm; n];
    shape.extend(std::iter::repeat_n(0, l));
    let s = bialternant(&shape, &pts)?;
    if w != s.shift(-shift) {
        return Err(mismatch("watermelon vs Schur of the rectangle", &w, &s.shift(-shift)));
    }
    let jt: Vec<Vec<QPoly>> = (1..=ni)
        .map(|i| {
            (1..=ni)
                .map(|j| {
                    let r = m - i + j;
                    let h = q_binomial((ni + li + m - i + j - 1).max(0) as u64, r);
                    if cfg!(debug_assertions) && n + l <= 4 && calm <= 3 {
                        debug_assert_eq!(h, complete_homogeneous(r, &pts));
                    }
                    h
                })
                .collect()
        })
        .collect();
    let jt = det(jt)?;
    if jt != s {
        return Err(mismatch("Jacobi–Trudi determinant", &jt, &s));
    }
    let pascal: Vec<Vec<QPoly>> = (1..=ni)
        .map(|i| (1..=ni).map(|j| entry(i, j, m + ni + li - i, ni + li - j)).collect())
        .collect();
    let pascal = det(pascal)?;
    if pascal != s {
        return Err(mismatch("Pascal-transformed determinant", &pascal, &s));
    }
    let count = watermelon_count(n, l, calm)?;
    if w.eval_at_one() != count {
        return Err(Error::IdentityMismatch("watermelon count at q = 1".into()));
    }
    Ok(w)
}

/// `A(N, L, M) = det(binom(L+M+N-i, M+N-j))`, checked against MacMahon.
pub fn watermelon_count(n: usize, l: usize, calm: usize) -> Result<BigInt> {
    let (n_, l_, m_) = (n as i64, l as i64, calm as i64);
    let mat: Vec<Vec<BigInt>> = (1..=n_)
        .map(|i| (1..=n_).map(|j| binomial(l_ + m_ + n_ - i, m_ + n_ - j)).collect())
        .collect();
    let d = det(mat)?;
    let a = macmahon_count(n, l, calm);
    if d != a {
        return Err(Error::IdentityMismatch(format!("binomial determinant {d} != {a}")));
    }
    Ok(d)
}

/// `S_{M-hat}(q_N, q^(delta+N+1), ..., q^(delta+N+L))` via the deviated
/// determinant `det T^delta`, checked against the bialternant.
///
/// The determinant side carries the factor
/// `q^(M N(N+1)/2 - L(N-L)(2 delta+L-1)/2 - (N-L)(N+L-1)/2)`.
pub fn corollary_det(n: usize, l: usize, calm: usize, delta: usize) -> Result<QPoly> {
    if l > n {
        return Err(Error::InvalidParameter("L exceeds N".into()));
    }
    let k = n - l;
    if delta != 0 && delta != k {
        return Err(Error::InvalidDeviation { delta, k });
    }
    let mat: Vec<Vec<QPoly>> = (1..=n)
        .map(|i| {
            (1..=n)
                .map(|j| {
                    if i <= l {
                        let a = (delta + j + i - 1) as u64;
                        q_int((calm + n) as u64 * a)
                            .exact_div(&q_int(a))
                            .expect("polynomial ratio")
                    } else {
                        QPoly::q_pow((j * (n - i)) as i64)
                    }
                })
                .collect()
        })
        .collect();
    let qnk = if delta == 0 {
        q_range(1, l as i64)
    } else {
        q_range(k as i64 + 1, n as i64)
    };
    let den = vandermonde(&q_range(0, n as i64 - 1)).mul(&vandermonde(&qnk));
    let (ni, li, di, mi) = (n as i64, l as i64, delta as i64, calm as i64);
    let twice = mi * ni * (ni + 1) - li * (ni - li) * (2 * di + li - 1) - (ni - li) * (ni + li - 1);
    let value = det(mat)?.exact_div(&den)?.shift(twice / 2);
    let mut pts = q_range(1, ni);
    pts.extend(q_range(di + ni + 1, di + ni + li));
    let mut shape = vec![calm; n];
    shape.extend(std::iter::repeat_n(0, l));
    let s = bialternant(&shape, &pts)?;
    if s != value {
        return Err(mismatch("deviated watermelon determinant", &value, &s));
    }
    Ok(value)
}

/// Exponent `(N-L)(N+L-1)/2` of the prefactor printed with the large-height
/// product. It is exactly the factor by which the uncorrected deviated
/// determinant is off, and it is not part of the true limit.
pub fn normtrace_literal_prefactor(n: usize, l: usize) -> i64 {
    ((n - l) * (n + l - 1) / 2) as i64
}

/// `prod_{i<=L, j<=N} 1/(1 - q^(k+i+j-1))` expanded through `max_degree`;
/// the height-to-infinity limit of the deviated watermelon sum at `delta = k`.
pub fn normtrace_limit(n: usize, l: usize, k: usize, max_degree: usize) -> Result<QPoly> {
    if l > n || k != n - l {
        return Err(Error::InvalidParameter("k must equal N - L".into()));
    }
    let d = max_degree as i64;
    let mut acc = QPoly::one();
    for i in 1..=l {
        for j in 1..=n {
            let e = (k + i + j - 1) as i64;
            let geo = QPoly::from_coeffs(0, (0..=d).map(|t| BigInt::from((t % e == 0) as i64)).collect());
            acc = (&acc * &geo).truncate(d);
        }
    }
    Ok(acc)
}
