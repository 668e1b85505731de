//! The XX0 chain on sites `0..=M`: hopping kernels, transition amplitudes,
//! Bethe ground states, form factors, the persistence of a domain wall and
//! the dynamical auto-correlation function.
//!
//! Conventions. `-H` acts on the `N`-particle sector as the hopping matrix
//! `Delta` (see [`crate::paths::hopping_weight`]) and `H_XX = N - (-H)/2`
//! there, so `<j|e^{-t H_XX}|l> = e^{-tN} <j|e^{t(-H)/2}|l>`. Eigenvectors of
//! the sector are Schur-function states on the modes
//! `phi_s = 2 pi (s + tau/2) / (M + 1)` with `tau = (N - 1) mod 2`.
//!
//! Chains with `M <= 2` are flagged as degenerate geometry: the two terms of
//! `Delta` hit the same bond there. `M = 0` uses `Delta_00 = 1` literally.

use std::f64::consts::PI;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};

use crate::cbident::{cb_pair_det, cb_pair_sum, theorem2_eval, CBSpec};
use crate::error::{Error, Result};
use crate::par;
use crate::partitions::{iter_partitions_in_box, macmahon_count, zq_product, StrictPartition};
use crate::paths::{random_turns_series, sector_hopping};
use crate::qpoly::{binomial, QPoly};
use crate::ring::{lu_det, product, vandermonde, Scalar};
use crate::schur::{approx_ok, q_range};

/// Default cap on the number of mode subsets in a spectral sum.
pub const DEFAULT_BUDGET: u128 = 2_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChainConfig {
    /// Largest site index; the chain has `M + 1` sites.
    pub m: usize,
    /// Particle number.
    pub n: usize,
}

impl ChainConfig {
    pub fn new(m: usize, n: usize) -> Result<Self> {
        if n > m + 1 {
            return Err(Error::InvalidParameter(format!(
                "{n} particles do not fit on {} sites",
                m + 1
            )));
        }
        Ok(ChainConfig { m, n })
    }

    /// `M - N + 1`.
    pub fn calm(&self) -> usize {
        self.m + 1 - self.n
    }

    pub fn degenerate_geometry(&self) -> bool {
        self.m <= 2
    }
}

/// Occupied sites of a basis state, strictly decreasing inside `[0, M]`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct BasisState {
    pub sites: StrictPartition,
}

impl BasisState {
    pub fn new(sites: &[usize], m: usize) -> Result<Self> {
        let sites = StrictPartition::from_sites(sites)?;
        if sites.parts().first().is_some_and(|&s| s > m) {
            return Err(Error::InvalidParameter(format!("site beyond M = {m}")));
        }
        Ok(BasisState { sites })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BetheData {
    pub theta: Vec<f64>,
    pub energy: f64,
    pub norm_sq: f64,
    /// `max_j |e^{i(M+1) theta_j} - (-1)^(N-1)|`.
    pub residual: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Amplitude {
    pub value: Complex64,
    pub abs_err: f64,
    pub degenerate_geometry: bool,
}

/// A real correlation value with its discarded imaginary part.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Correlation {
    pub value: f64,
    pub imag: f64,
    pub abs_err: f64,
    /// Number of mode subsets summed over.
    pub subsets: u128,
}

/// Modes `2 pi (s + tau/2) / (M + 1)`, `s = 0..=M`.
pub fn modes(m: usize, tau: usize) -> Vec<f64> {
    (0..=m)
        .map(|s| 2.0 * PI * (s as f64 + tau as f64 / 2.0) / (m as f64 + 1.0))
        .collect()
}

fn twist(n: usize) -> usize {
    n.saturating_sub(1) % 2
}

// <j| e^{t Delta/2} |l> on the (possibly twisted) ring, complex t allowed.
fn kernel(j: usize, l: usize, t: Complex64, m: usize, tau: usize) -> Complex64 {
    if m == 0 {
        return (t / 2.0).exp();
    }
    let d = j as f64 - l as f64;
    let sum: Complex64 = modes(m, tau)
        .iter()
        .map(|&phi| (Complex64::new(0.0, phi * d) + t * phi.cos()).exp())
        .sum();
    sum / (m as f64 + 1.0)
}

fn check_site(s: usize, m: usize) -> Result<()> {
    if s > m {
        return Err(Error::InvalidParameter(format!("site {s} beyond M = {m}")));
    }
    Ok(())
}

/// One-particle generating function `G(j, l | t) = <j| e^{-(t/2) H} |l>`
/// with the untwisted modes `2 pi s / (M + 1)`.
pub fn hopping_propagator(j: usize, l: usize, t: f64, m: usize) -> Result<Amplitude> {
    check_site(j, m)?;
    check_site(l, m)?;
    let value = kernel(j, l, Complex64::new(t, 0.0), m, 0);
    Ok(Amplitude {
        value,
        abs_err: f64::EPSILON * (m as f64 + 1.0) * t.abs().exp(),
        degenerate_geometry: m <= 2,
    })
}

/// The same kernel at imaginary time `t = i tau` (unitary evolution).
pub fn hopping_propagator_unitary(j: usize, l: usize, tau: f64, m: usize) -> Result<Amplitude> {
    check_site(j, m)?;
    check_site(l, m)?;
    Ok(Amplitude {
        value: kernel(j, l, Complex64::new(0.0, tau), m, 0),
        abs_err: f64::EPSILON * (m as f64 + 1.0),
        degenerate_geometry: m <= 2,
    })
}

fn sorted_sites(s: &[usize], m: usize) -> Result<Vec<usize>> {
    Ok(BasisState::new(s, m)?.sites.parts().to_vec())
}

fn pair(j: &[usize], l: &[usize], m: usize) -> Result<(Vec<usize>, Vec<usize>)> {
    let (j, l) = (sorted_sites(j, m)?, sorted_sites(l, m)?);
    if j.len() != l.len() {
        return Err(Error::SizeMismatch);
    }
    Ok((j, l))
}

fn det_with_err(mat: Vec<Vec<Complex64>>) -> (Complex64, f64) {
    let n = mat.len();
    let scale: f64 = mat.iter().map(|r| r.iter().map(|z| z.norm()).sum::<f64>()).product();
    let err = f64::EPSILON * (n * n + 1) as f64 * scale;
    (lu_det(mat), err)
}

fn amplitude_det(j: &[usize], l: &[usize], t: f64, m: usize) -> (Complex64, f64) {
    let n = j.len();
    let tau = twist(n);
    let tc = Complex64::new(t, 0.0);
    let mat: Vec<Vec<Complex64>> = j
        .iter()
        .map(|&jr| l.iter().map(|&ls| kernel(jr, ls, tc, m, tau)).collect())
        .collect();
    let (d, err) = det_with_err(mat);
    let damp = (-t * n as f64).exp();
    (d * damp, err * damp)
}

/// `<j| e^{-t H_XX} |l> = e^{-tN} det(G(j_r, l_s | t))`. Debug builds also
/// evaluate the spectral sum over mode subsets and compare.
pub fn amplitude(j: &[usize], l: &[usize], t: f64, m: usize) -> Result<Amplitude> {
    let (j, l) = pair(j, l, m)?;
    let (value, abs_err) = amplitude_det(&j, &l, t, m);
    if cfg!(debug_assertions) && subset_count(m + 1, j.len()) <= 2000 {
        let s = spectral_raw(&j, &l, t, m);
        if (s - value).norm() > 1e-9 * (1.0 + value.norm()) {
            return Err(Error::IdentityMismatch(format!(
                "amplitude: det {value} vs spectral {s}"
            )));
        }
    }
    Ok(Amplitude {
        value,
        abs_err,
        degenerate_geometry: m <= 2,
    })
}

fn spectral_raw(j: &[usize], l: &[usize], t: f64, m: usize) -> Complex64 {
    let n = j.len();
    if m == 0 || n == 0 {
        return amplitude_det(j, l, t, m).0;
    }
    let ph = modes(m, twist(n));
    let count = subset_count(m + 1, n) as usize;
    let parts = par::map_chunks(count, |start, end| {
        let mut c = unrank_combination(m + 1, n, start as u128);
        let mut acc = Complex64::new(0.0, 0.0);
        for _ in start..end {
            let phi: Vec<f64> = c.iter().map(|&s| ph[s]).collect();
            let a = plane_wave_det(&phi, j);
            let b = plane_wave_det(&phi, l);
            let e: f64 = phi.iter().map(|p| p.cos()).sum();
            acc += (t * e).exp() * a * b.conj();
            next_combination(&mut c, m + 1);
        }
        acc
    });
    let total: Complex64 = parts.into_iter().sum();
    total * (-t * n as f64).exp() / (m as f64 + 1.0).powi(n as i32)
}

// det(e^{i phi_a x_r}) over rows r, columns a.
fn plane_wave_det(phi: &[f64], x: &[usize]) -> Complex64 {
    let mat: Vec<Vec<Complex64>> = x
        .iter()
        .map(|&xr| phi.iter().map(|&p| Complex64::from_polar(1.0, p * xr as f64)).collect())
        .collect();
    lu_det(mat)
}

/// The amplitude as a sum over `N`-subsets of modes of the free-fermion
/// eigenbasis.
pub fn amplitude_spectral(j: &[usize], l: &[usize], t: f64, m: usize) -> Result<Complex64> {
    let (j, l) = pair(j, l, m)?;
    Ok(spectral_raw(&j, &l, t, m))
}

/// `e^{-tN} sum_K (t/2)^K / K! |P_K(l -> j)|`, with walker counts from the
/// configuration DP; truncated once the tail bound `(2Nt)^K/K!` is negligible.
pub fn amplitude_series(j: &[usize], l: &[usize], t: f64, m: usize) -> Result<Complex64> {
    let (j, l) = pair(j, l, m)?;
    let n = j.len();
    let rate = 4.0 * n.max(1) as f64 * (t.abs() / 2.0);
    let mut k_max = 0usize;
    let mut bound = 1.0f64;
    while k_max < 400 && ((k_max as f64) < rate || bound > 1e-18) {
        k_max += 1;
        bound *= rate / k_max as f64;
    }
    let counts = random_turns_series(&l, &j, k_max, m)?;
    let mut term = 1.0f64;
    let mut acc = 0.0f64;
    for (k, c) in counts.iter().enumerate() {
        if k > 0 {
            term *= (t / 2.0) / k as f64;
        }
        acc += term * c.to_f64().unwrap_or(f64::INFINITY);
    }
    Ok(Complex64::new(acc * (-t * n as f64).exp(), 0.0))
}

/// `<j| e^{-t1 H} Pi_m e^{-t2 H} |l>`, where `Pi_m` forbids particles on
/// sites `0..m`. Debug builds check the Cauchy–Binet expansion over the
/// intermediate configurations.
pub fn two_time_amplitude(j: &[usize], l: &[usize], t1: f64, t2: f64, mproj: usize, m: usize) -> Result<Amplitude> {
    let (j, l) = pair(j, l, m)?;
    if mproj > m + 1 {
        return Err(Error::InvalidParameter("projector beyond the chain".into()));
    }
    let n = j.len();
    let tau = twist(n);
    let (a, b) = (Complex64::new(t1, 0.0), Complex64::new(t2, 0.0));
    let mat: Vec<Vec<Complex64>> = j
        .iter()
        .map(|&jr| {
            l.iter()
                .map(|&ls| {
                    (mproj..=m)
                        .map(|k| kernel(jr, k, a, m, tau) * kernel(k, ls, b, m, tau))
                        .sum()
                })
                .collect()
        })
        .collect();
    let (d, err) = det_with_err(mat);
    let damp = (-(t1 + t2) * n as f64).exp();
    let value = d * damp;
    if cfg!(debug_assertions) && m + 1 >= mproj + n && subset_count(m + 1 - mproj, n) <= 500 {
        let mut cb = Complex64::new(0.0, 0.0);
        for rho in iter_partitions_in_box(n, m + 1 - mproj - n, 0) {
            let mid: Vec<usize> = rho.to_strict().parts().iter().map(|p| p + mproj).collect();
            cb += amplitude_det(&j, &mid, t1, m).0 * amplitude_det(&mid, &l, t2, m).0;
        }
        if (cb - value).norm() > 1e-9 * (1.0 + value.norm()) {
            return Err(Error::IdentityMismatch(format!(
                "two-time amplitude: det {value} vs gluing {cb}"
            )));
        }
    }
    Ok(Amplitude {
        value,
        abs_err: err * damp,
        degenerate_geometry: m <= 2,
    })
}

/// Ground state of `N - n` particles: `theta_j = 2 pi/(M+1) ((N'+1)/2 - j)`,
/// its energy (checked against the closed form), norm and Bethe residual.
pub fn bethe_ground(cfg: &ChainConfig, n: usize) -> Result<BetheData> {
    if n > cfg.n {
        return Err(Error::InvalidParameter("n exceeds N".into()));
    }
    let np = cfg.n - n;
    let sites = cfg.m as f64 + 1.0;
    let theta: Vec<f64> = (1..=np)
        .map(|j| 2.0 * PI / sites * ((np as f64 + 1.0) / 2.0 - j as f64))
        .collect();
    let energy = np as f64 - theta.iter().map(|t| t.cos()).sum::<f64>();
    let closed = ground_energy_closed(np, cfg.m);
    if (energy - closed).abs() > 1e-12 * (1.0 + np as f64) {
        return Err(Error::IdentityMismatch(format!(
            "ground energy {energy} vs closed form {closed}"
        )));
    }
    let z: Vec<Complex64> = theta.iter().map(|&t| Complex64::from_polar(1.0, t)).collect();
    let v = vandermonde(&z).norm_sqr();
    let norm_sq = sites.powi(np as i32) / v;
    let target = if np % 2 == 1 { 1.0 } else { -1.0 };
    let residual = theta
        .iter()
        .map(|&t| (Complex64::from_polar(1.0, sites * t) - target).norm())
        .fold(0.0, f64::max);
    Ok(BetheData {
        theta,
        energy,
        norm_sq,
        residual,
    })
}

/// `N - sin(pi N/(M+1)) / sin(pi/(M+1))`.
pub fn ground_energy_closed(n: usize, m: usize) -> f64 {
    if n <= 1 {
        return 0.0;
    }
    let s = m as f64 + 1.0;
    n as f64 - (PI * n as f64 / s).sin() / (PI / s).sin()
}

/// Number of `n`-subsets of `items` things.
pub fn subset_count(items: usize, n: usize) -> u128 {
    binomial(items as i64, n as i64).to_u128().unwrap_or(u128::MAX)
}

/// The lexicographically `rank`-th `n`-subset of `0..items`.
pub fn unrank_combination(items: usize, n: usize, mut rank: u128) -> Vec<usize> {
    let mut out = Vec::with_capacity(n);
    let mut next = 0;
    for left in (1..=n).rev() {
        loop {
            let with = subset_count(items - next - 1, left - 1);
            if rank < with {
                out.push(next);
                next += 1;
                break;
            }
            rank -= with;
            next += 1;
        }
    }
    out
}

/// Advance to the next subset in lexicographic order; false at the end.
pub fn next_combination(c: &mut [usize], items: usize) -> bool {
    let n = c.len();
    for i in (0..n).rev() {
        if c[i] < items - n + i {
            c[i] += 1;
            for k in i + 1..n {
                c[k] = c[k - 1] + 1;
            }
            return true;
        }
    }
    false
}

fn check_budget(count: u128, budget: u128) -> Result<()> {
    if count > budget {
        return Err(Error::ModeEnumerationTooLarge { count, budget });
    }
    Ok(())
}

/// Form factor of the projector, `T = P_{M/m}(x, y)` with `x = v^-2`,
/// `y = u^2`. The determinant form is returned; for small boxes it is
/// compared with the direct Schur sum.
pub fn projector_formfactor<S: Scalar>(cfg: &ChainConfig, x: &[S], y: &[S], mproj: usize) -> Result<S> {
    let calm = cfg.calm();
    if x.len() != cfg.n || y.len() != cfg.n {
        return Err(Error::LengthMismatch {
            expected: cfg.n,
            found: x.len().min(y.len()),
        });
    }
    if mproj > calm {
        return Ok(S::zero());
    }
    let spec = CBSpec::unrestricted(calm, mproj, x.to_vec(), y.to_vec());
    let d = cb_pair_det(&spec)?;
    if binomial((cfg.n + calm - mproj) as i64, cfg.n as i64) <= BigInt::from(2000) {
        let s = cb_pair_sum(&spec)?;
        if s != d && !approx_ok(&s, &d) {
            return Err(Error::IdentityMismatch(
                "projector form factor: sum vs determinant".into(),
            ));
        }
    }
    Ok(d)
}

/// The projector form factor at `v^-2 = q_N`, `u^2 = q_N/q`; equals
/// `q^(m N^2) Z_q(N, N, M - m)` with `A(N, N, M - m)` at `q = 1`.
pub fn projector_formfactor_q(cfg: &ChainConfig, mproj: usize) -> Result<QPoly> {
    let n = cfg.n as i64;
    let calm = cfg.calm();
    let v = projector_formfactor(cfg, &q_range(1, n), &q_range(0, n - 1), mproj)?;
    if mproj > calm {
        return Ok(v);
    }
    let want = zq_product(cfg.n, cfg.n, calm - mproj).shift(mproj as i64 * n * n);
    if v != want {
        return Err(Error::IdentityMismatch(format!("projector form factor {v} vs {want}")));
    }
    if v.eval_at_one() != macmahon_count(cfg.n, cfg.n, calm - mproj) {
        return Err(Error::IdentityMismatch("projector form factor count".into()));
    }
    Ok(v)
}

/// `<Psi(v_{N-n})| F_n^+ |Psi(u_N)> = prod x^n P_M(x, y)` with `x = v^-2`
/// (`N - n` points) and `y = u^2` (`N` points).
pub fn domainwall_formfactor_bra<S: Scalar>(cfg: &ChainConfig, x: &[S], y: &[S], n: usize) -> Result<S> {
    restricted_formfactor(cfg, x, y, n)
}

/// `<Psi(v_N)| F_n |Psi(u_{N-n})> = prod y^n P_M(x, y)` with `x = v^-2`
/// (`N` points) and `y = u^2` (`N - n` points).
pub fn domainwall_formfactor_ket<S: Scalar>(cfg: &ChainConfig, x: &[S], y: &[S], n: usize) -> Result<S> {
    restricted_formfactor(cfg, y, x, n)
}

fn restricted_formfactor<S: Scalar>(cfg: &ChainConfig, short: &[S], long: &[S], n: usize) -> Result<S> {
    if n > cfg.n {
        return Err(Error::InvalidParameter("n exceeds N".into()));
    }
    if short.len() != cfg.n - n {
        return Err(Error::LengthMismatch {
            expected: cfg.n - n,
            found: short.len(),
        });
    }
    if long.len() != cfg.n {
        return Err(Error::LengthMismatch {
            expected: cfg.n,
            found: long.len(),
        });
    }
    let spec = CBSpec::restricted(cfg.calm(), (1..=n).collect(), short.to_vec(), long.to_vec());
    let d = cb_pair_det(&spec)?;
    Ok(product(short).pow(n as u32).mul(&d))
}

/// The bra form factor at `v^-2 = q_{N-n}/q`, `u^2 = q_N`:
/// `q^(n (N-n)(N-n-1)/2) Z_q(N-n, N, M)`, with `A(N-n, N, M)` at `q = 1`.
pub fn domainwall_formfactor_q(cfg: &ChainConfig, n: usize) -> Result<QPoly> {
    if n > cfg.n {
        return Err(Error::InvalidParameter("n exceeds N".into()));
    }
    let (big, k, calm) = (cfg.n, n, cfg.calm());
    let short = q_range(0, (big - k) as i64 - 1);
    let v = domainwall_formfactor_bra(cfg, &short, &q_range(1, big as i64), n)?;
    let z = theorem2_eval(big, k, calm)?;
    let want = z.shift((k * (big - k) * (big - k).saturating_sub(1) / 2) as i64);
    if v != want {
        return Err(Error::IdentityMismatch(format!(
            "domain-wall form factor {v} vs {want}"
        )));
    }
    if z.eval_at_one() != macmahon_count(big - k, big, calm) {
        return Err(Error::IdentityMismatch("domain-wall form factor count".into()));
    }
    Ok(v)
}

// <Psi(theta)| F_n^+ |Psi_N(phi)> for unimodular points.
fn dw_amplitude(cfg: &ChainConfig, xbar: &[Complex64], phi: &[f64], n: usize) -> Result<Complex64> {
    let y: Vec<Complex64> = phi.iter().map(|&p| Complex64::from_polar(1.0, p)).collect();
    restricted_formfactor(cfg, xbar, &y, n)
}

fn vsq(phi: &[f64]) -> f64 {
    let z: Vec<Complex64> = phi.iter().map(|&p| Complex64::from_polar(1.0, p)).collect();
    vandermonde(&z).norm_sqr()
}

// Per mode subset (in lexicographic order): e^{-tE} |V(phi)|^2 <Psi|F^+|phi>.
fn weighted_formfactors(cfg: &ChainConfig, n: usize, t: f64, theta: &[f64]) -> Result<Vec<Complex64>> {
    let big = cfg.n;
    let ph = modes(cfg.m, twist(big));
    let xbar: Vec<Complex64> = theta.iter().map(|&t| Complex64::from_polar(1.0, -t)).collect();
    let count = subset_count(cfg.m + 1, big) as usize;
    let chunks = par::map_chunks(count, |start, end| -> Result<Vec<Complex64>> {
        let mut c = unrank_combination(cfg.m + 1, big, start as u128);
        let mut out = Vec::with_capacity(end - start);
        for _ in start..end {
            let phi: Vec<f64> = c.iter().map(|&s| ph[s]).collect();
            let e = big as f64 - phi.iter().map(|p| p.cos()).sum::<f64>();
            let ff = dw_amplitude(cfg, &xbar, &phi, n)?;
            out.push(ff * ((-t * e).exp() * vsq(&phi)));
            next_combination(&mut c, cfg.m + 1);
        }
        Ok(out)
    });
    let mut all = Vec::with_capacity(count);
    for c in chunks {
        all.extend(c?);
    }
    Ok(all)
}

/// Persistence of the domain wall over the ground state of `N - n`
/// particles: `|V(theta)|^2 / (M+1)^(2N-n) sum_phi e^{-tE(phi)} |V(phi)|^2 |<Psi|F_n^+|phi>|^2`.
pub fn persistence(cfg: &ChainConfig, n: usize, t: f64, budget: u128) -> Result<Correlation> {
    let count = subset_count(cfg.m + 1, cfg.n);
    check_budget(count, budget)?;
    let g = bethe_ground(cfg, n)?;
    let big = cfg.n;
    let ph = modes(cfg.m, twist(big));
    let xbar: Vec<Complex64> = g.theta.iter().map(|&t| Complex64::from_polar(1.0, -t)).collect();
    let parts = par::map_chunks(count as usize, |start, end| -> Result<(f64, f64)> {
        let mut c = unrank_combination(cfg.m + 1, big, start as u128);
        let (mut acc, mut mag) = (0.0, 0.0);
        for _ in start..end {
            let phi: Vec<f64> = c.iter().map(|&s| ph[s]).collect();
            let e = big as f64 - phi.iter().map(|p| p.cos()).sum::<f64>();
            let ff = dw_amplitude(cfg, &xbar, &phi, n)?;
            let term = (-t * e).exp() * vsq(&phi) * ff.norm_sqr();
            acc += term;
            mag += term.abs();
            next_combination(&mut c, cfg.m + 1);
        }
        Ok((acc, mag))
    });
    let (mut sum, mut mag) = (0.0, 0.0);
    for p in parts {
        let (a, b) = p?;
        sum += a;
        mag += b;
    }
    let pre = vsq(&g.theta) / (cfg.m as f64 + 1.0).powi((2 * big - n) as i32);
    Ok(Correlation {
        value: pre * sum,
        imag: 0.0,
        abs_err: pre * mag * 1e3 * f64::EPSILON * (big * big + 1) as f64,
        subsets: count,
    })
}

/// Dynamical auto-correlation
/// `<Psi| F_n^+ e^{-t1 H} Pi_m e^{-t2 H} F_n |Psi> / <Psi|Psi>` as a double
/// sum over mode subsets with the projector form factor in the middle.
pub fn autocorrelation(
    cfg: &ChainConfig,
    n: usize,
    mproj: usize,
    t1: f64,
    t2: f64,
    budget: u128,
) -> Result<Correlation> {
    let count = subset_count(cfg.m + 1, cfg.n);
    check_budget(count, budget)?;
    if mproj > cfg.m + 1 {
        return Err(Error::InvalidParameter("projector beyond the chain".into()));
    }
    let g = bethe_ground(cfg, n)?;
    let big = cfg.n;
    let a = weighted_formfactors(cfg, n, t1, &g.theta)?;
    let b = weighted_formfactors(cfg, n, t2, &g.theta)?;
    let ph = modes(cfg.m, twist(big));
    let subsets: Vec<Vec<usize>> = {
        let mut c = unrank_combination(cfg.m + 1, big, 0);
        let mut v = Vec::with_capacity(count as usize);
        for _ in 0..count {
            v.push(c.clone());
            next_combination(&mut c, cfg.m + 1);
        }
        v
    };
    let points = |c: &[usize], sign: f64| -> Vec<Complex64> {
        c.iter().map(|&s| Complex64::from_polar(1.0, sign * ph[s])).collect()
    };
    let tiny = 1e-300;
    let parts = par::map_chunks(count as usize, |start, end| -> Result<(Complex64, f64)> {
        let mut acc = Complex64::new(0.0, 0.0);
        let mut mag = 0.0;
        for i in start..end {
            if a[i].norm() < tiny {
                continue;
            }
            let x = points(&subsets[i], -1.0);
            for (k, bk) in b.iter().enumerate() {
                if bk.norm() < tiny {
                    continue;
                }
                let y = points(&subsets[k], 1.0);
                let p = if mproj > cfg.calm() {
                    Complex64::new(0.0, 0.0)
                } else {
                    cb_pair_det(&CBSpec::unrestricted(cfg.calm(), mproj, x.clone(), y))?
                };
                let term = a[i] * p * bk.conj();
                acc += term;
                mag += term.norm();
            }
        }
        Ok((acc, mag))
    });
    let mut sum = Complex64::new(0.0, 0.0);
    let mut mag = 0.0;
    for p in parts {
        let (s, m) = p?;
        sum += s;
        mag += m;
    }
    let pre = vsq(&g.theta) / (cfg.m as f64 + 1.0).powi((3 * big - n) as i32);
    Ok(Correlation {
        value: pre * sum.re,
        imag: pre * sum.im,
        abs_err: pre * mag * 1e3 * f64::EPSILON * (big * big + 1) as f64,
        subsets: count,
    })
}

// ---------------------------------------------------------------------------
// Dense reference implementation for small chains.

/// `H_XX = N - (-H)/2` on the `N`-particle sector, with the basis bitmasks.
pub fn sector_hamiltonian(m: usize, n: usize) -> Result<(Vec<u128>, Vec<Vec<f64>>)> {
    let (basis, cols) = sector_hopping(m, n)?;
    let d = basis.len();
    let mut h = vec![vec![0.0; d]; d];
    for (c, col) in cols.iter().enumerate() {
        h[c][c] += n as f64;
        for &(r, w) in col {
            h[r][c] -= w as f64 / 2.0;
        }
    }
    Ok((basis, h))
}

fn mat_mul(a: &[Vec<f64>], b: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let n = a.len();
    let mut out = vec![vec![0.0; n]; n];
    for i in 0..n {
        for k in 0..n {
            let aik = a[i][k];
            if aik == 0.0 {
                continue;
            }
            for j in 0..n {
                out[i][j] += aik * b[k][j];
            }
        }
    }
    out
}

/// `e^{-tH}` by scaling and squaring with a Taylor core.
pub fn expm_neg(h: &[Vec<f64>], t: f64) -> Vec<Vec<f64>> {
    let n = h.len();
    let norm = h
        .iter()
        .map(|r| r.iter().map(|v| v.abs()).sum::<f64>())
        .fold(0.0, f64::max)
        * t.abs();
    let s = if norm > 0.5 {
        (norm / 0.5).log2().ceil() as i32
    } else {
        0
    };
    let scale = -t / 2f64.powi(s);
    let a: Vec<Vec<f64>> = h.iter().map(|r| r.iter().map(|v| v * scale).collect()).collect();
    let mut out: Vec<Vec<f64>> = (0..n)
        .map(|i| (0..n).map(|j| (i == j) as u8 as f64).collect())
        .collect();
    let mut term = out.clone();
    for k in 1..=24 {
        term = mat_mul(&term, &a);
        for row in term.iter_mut() {
            for v in row.iter_mut() {
                *v /= k as f64;
            }
        }
        for i in 0..n {
            for j in 0..n {
                out[i][j] += term[i][j];
            }
        }
    }
    for _ in 0..s {
        out = mat_mul(&out, &out);
    }
    out
}

fn sites_of(mask: u128) -> Vec<usize> {
    (0..128).rev().filter(|&s| mask & (1u128 << s) != 0).collect()
}

/// Coefficients `S_lambda(e^{i theta})` of the state `Psi(theta)` on the
/// sector basis.
pub fn bethe_vector(theta: &[f64], m: usize) -> Result<(Vec<u128>, Vec<Complex64>)> {
    let (basis, _) = sector_hopping(m, theta.len())?;
    let z: Vec<Complex64> = theta.iter().map(|&t| Complex64::from_polar(1.0, t)).collect();
    let v = vandermonde(&z);
    let coeffs = basis.iter().map(|&b| plane_wave_det(theta, &sites_of(b)) / v).collect();
    Ok((basis, coeffs))
}

// F_n maps an (N-n)-particle vector to the N-sector by filling sites 0..n.
fn apply_domain_wall(basis: &[u128], v: &[Complex64], n: usize, target: &[u128]) -> Vec<Complex64> {
    let wall: u128 = (0..n).fold(0, |a, s| a | (1u128 << s));
    let mut out = vec![Complex64::new(0.0, 0.0); target.len()];
    for (b, c) in basis.iter().zip(v) {
        if b & wall != 0 {
            continue;
        }
        let idx = target
            .binary_search(&(b | wall))
            .expect("target sector contains the state");
        out[idx] += c;
    }
    out
}

fn apply_real(mat: &[Vec<f64>], v: &[Complex64]) -> Vec<Complex64> {
    mat.iter()
        .map(|row| row.iter().zip(v).map(|(a, b)| b * *a).sum())
        .collect()
}

fn dense_parts(cfg: &ChainConfig, n: usize) -> Result<(Vec<u128>, Vec<Complex64>, f64, Vec<Vec<f64>>)> {
    let g = bethe_ground(cfg, n)?;
    let (small, psi) = bethe_vector(&g.theta, cfg.m)?;
    let norm: f64 = psi.iter().map(|c| c.norm_sqr()).sum();
    let (basis, h) = sector_hamiltonian(cfg.m, cfg.n)?;
    let fpsi = apply_domain_wall(&small, &psi, n, &basis);
    Ok((basis, fpsi, norm, h))
}

/// Persistence by dense evolution of the sector state.
pub fn dense_persistence(cfg: &ChainConfig, n: usize, t: f64) -> Result<f64> {
    let (_, fpsi, norm, h) = dense_parts(cfg, n)?;
    let ev = apply_real(&expm_neg(&h, t), &fpsi);
    let num: Complex64 = fpsi.iter().zip(&ev).map(|(a, b)| a.conj() * b).sum();
    Ok(num.re / norm)
}

/// Auto-correlation by dense evolve, project, evolve.
pub fn dense_autocorrelation(cfg: &ChainConfig, n: usize, mproj: usize, t1: f64, t2: f64) -> Result<f64> {
    let (basis, fpsi, norm, h) = dense_parts(cfg, n)?;
    let wall: u128 = (0..mproj).fold(0, |a, s| a | (1u128 << s));
    let mut v = apply_real(&expm_neg(&h, t2), &fpsi);
    for (b, c) in basis.iter().zip(v.iter_mut()) {
        if b & wall != 0 {
            *c = Complex64::new(0.0, 0.0);
        }
    }
    let v = apply_real(&expm_neg(&h, t1), &v);
    let num: Complex64 = fpsi.iter().zip(&v).map(|(a, b)| a.conj() * b).sum();
    Ok(num.re / norm)
}

/// `<j| e^{-tH} |l>` read off the dense sector exponential.
pub fn dense_amplitude(j: &[usize], l: &[usize], t: f64, m: usize) -> Result<f64> {
    let (j, l) = pair(j, l, m)?;
    let (basis, h) = sector_hamiltonian(m, j.len())?;
    let e = expm_neg(&h, t);
    let idx = |s: &[usize]| {
        basis
            .binary_search(&s.iter().fold(0u128, |a, &x| a | (1u128 << x)))
            .unwrap()
    };
    Ok(e[idx(&j)][idx(&l)])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn propagator_basics() {
        let g = hopping_propagator(0, 0, 0.7, 1).unwrap().value;
        assert!((g.re - 0.7f64.cosh()).abs() < 1e-14);
        let s: Complex64 = (0..=5).map(|l| hopping_propagator(2, l, 0.9, 5).unwrap().value).sum();
        assert!((s.re - 0.9f64.exp()).abs() < 1e-13 && s.im.abs() < 1e-13);
        assert!((hopping_propagator(3, 1, 0.0, 6).unwrap().value).norm() < 1e-15);
        assert!((hopping_propagator(0, 0, 0.4, 0).unwrap().value.re - 0.2f64.exp()).abs() < 1e-15);
    }

    #[test]
    fn amplitude_vs_dense() {
        for (j, l, m) in [
            (vec![3, 1], vec![2, 0], 4),
            (vec![2, 1, 0], vec![4, 2, 1], 5),
            (vec![1], vec![3], 4),
        ] {
            let a = amplitude(&j, &l, 0.6, m).unwrap().value;
            let d = dense_amplitude(&j, &l, 0.6, m).unwrap();
            assert!((a.re - d).abs() < 1e-12 && a.im.abs() < 1e-12, "{a} vs {d}");
            let s = amplitude_series(&j, &l, 0.6, m).unwrap();
            assert!((a - s).norm() < 1e-12);
        }
    }

    #[test]
    fn bethe_small() {
        let g = bethe_ground(&ChainConfig::new(3, 2).unwrap(), 0).unwrap();
        assert!((g.energy - (2.0 - 2f64.sqrt())).abs() < 1e-14);
        let g = bethe_ground(&ChainConfig::new(5, 2).unwrap(), 1).unwrap();
        assert_eq!(g.theta, vec![0.0]);
        assert!((g.norm_sq - 6.0).abs() < 1e-12);
    }

    #[test]
    fn combinations_roundtrip() {
        let mut c = unrank_combination(6, 3, 0);
        for r in 0..subset_count(6, 3) {
            assert_eq!(unrank_combination(6, 3, r), c);
            next_combination(&mut c, 6);
        }
    }

    #[test]
    fn persistence_vs_dense() {
        let cfg = ChainConfig::new(4, 2).unwrap();
        for n in 0..=2 {
            let p = persistence(&cfg, n, 0.5, DEFAULT_BUDGET).unwrap().value;
            let d = dense_persistence(&cfg, n, 0.5).unwrap();
            assert!((p - d).abs() < 1e-12, "n={n}: {p} vs {d}");
        }
        let a = autocorrelation(&cfg, 0, 1, 0.3, 0.3, DEFAULT_BUDGET).unwrap();
        let d = dense_autocorrelation(&cfg, 0, 1, 0.3, 0.3).unwrap();
        assert!((a.value - d).abs() < 1e-12 && a.imag.abs() < 1e-10, "{a:?} vs {d}");
    }

    #[test]
    fn q_formfactors() {
        let q = projector_formfactor_q(&ChainConfig::new(2, 1).unwrap(), 1).unwrap();
        assert_eq!(q, QPoly::from_i64s(1, &[1, 1]));
        let q = projector_formfactor_q(&ChainConfig::new(3, 2).unwrap(), 0).unwrap();
        assert_eq!(q.eval_at_one(), BigInt::from(20));
        let d = domainwall_formfactor_q(&ChainConfig::new(3, 2).unwrap(), 1).unwrap();
        assert_eq!(d.eval_at_one(), BigInt::from(6));
    }
}
