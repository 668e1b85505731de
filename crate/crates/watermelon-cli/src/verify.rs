//! Identity runs behind `watermelon verify`.
//!
//! Every run compares two independent computations over a parameter range
//! and records one [`Case`] per instance. Library self-checks that fail
//! surface as mismatches too.

use std::ops::RangeInclusive;

use num_bigint::BigInt;
use num_rational::BigRational;
use serde::{Deserialize, Serialize};

use watermelon::cbident::{
    cb_pair_det, cb_pair_sum, normtrace_limit, q_restricted_det, q_restricted_sum, theorem2_eval, watermelon_count,
    watermelon_det, CBSpec,
};
use watermelon::partitions::{iter_plane_partitions, macmahon_count, zq_product};
use watermelon::paths::{
    bottleneck_count, path_gf, random_turns_kst, random_turns_matrix, random_turns_series, sector_basis, NestFamily,
    WatermelonSpec,
};
use watermelon::ring::seeded_rationals;
use watermelon::xx0::{
    self, amplitude, amplitude_series, amplitude_spectral, autocorrelation, bethe_ground, ground_energy_closed,
    persistence, ChainConfig,
};
use watermelon::{Error, QPoly, Result};

pub const IDENTITIES: [&str; 12] = [
    "macmahon",
    "cauchy-binet",
    "theorem1",
    "theorem2",
    "theorem3",
    "theorem4",
    "props",
    "random-turns",
    "bottleneck",
    "amplitude",
    "spin-chain",
    "form-factors",
];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING-KEBAB-CASE")]
pub enum Status {
    /// Exact equality of integers, rationals or Laurent polynomials.
    ExactMatch,
    /// Floating-point agreement within the stated tolerance.
    Match,
    Mismatch,
}

impl Status {
    pub fn label(self) -> &'static str {
        match self {
            Status::ExactMatch => "EXACT-MATCH",
            Status::Match => "MATCH",
            Status::Mismatch => "MISMATCH",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Case {
    pub params: String,
    pub status: Status,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IdentityReport {
    pub identity: String,
    pub status: Status,
    pub cases: Vec<Case>,
}

/// Parameter pins from the command line; unset ones sweep a default range.
#[derive(Clone, Debug, Default)]
pub struct Pins {
    pub n: Option<usize>,
    pub l: Option<usize>,
    pub m: Option<usize>,
    pub k: Option<usize>,
    pub ell: Option<usize>,
    pub small: bool,
    pub seed: u64,
}

impl Pins {
    fn range(pin: Option<usize>, lo: usize, hi: usize) -> RangeInclusive<usize> {
        match pin {
            Some(v) => v..=v,
            None => lo..=hi,
        }
    }

    fn cap(&self, full: usize, small: usize) -> usize {
        if self.small {
            small
        } else {
            full
        }
    }
}

struct Recorder {
    cases: Vec<Case>,
}

impl Recorder {
    fn exact<T: PartialEq + std::fmt::Display>(&mut self, params: String, got: Result<T>, want: Result<T>) {
        let case = match (got, want) {
            (Ok(a), Ok(b)) if a == b => Case {
                params,
                status: Status::ExactMatch,
                detail: None,
            },
            (Ok(a), Ok(b)) => Case {
                params,
                status: Status::Mismatch,
                detail: Some(format!("{a} != {b}")),
            },
            (Err(e), _) | (_, Err(e)) => failure(params, e),
        };
        self.cases.push(case);
    }

    fn close(&mut self, params: String, err: Result<f64>, tol: f64) {
        let case = match err {
            Ok(e) if e <= tol => Case {
                params,
                status: Status::Match,
                detail: Some(format!("max error {e:.3e}")),
            },
            Ok(e) => Case {
                params,
                status: Status::Mismatch,
                detail: Some(format!("error {e:.3e} above {tol:.0e}")),
            },
            Err(e) => failure(params, e),
        };
        self.cases.push(case);
    }

    fn ok(&mut self, params: String, r: Result<()>) {
        let case = match r {
            Ok(()) => Case {
                params,
                status: Status::ExactMatch,
                detail: None,
            },
            Err(e) => failure(params, e),
        };
        self.cases.push(case);
    }
}

fn failure(params: String, e: Error) -> Case {
    Case {
        params,
        status: Status::Mismatch,
        detail: Some(e.to_string()),
    }
}

/// Whether an error means bad input rather than a failed identity.
pub fn is_validation(e: &Error) -> bool {
    !matches!(
        e,
        Error::IdentityMismatch(_) | Error::Io(_) | Error::NonDivisible | Error::DivisionByZero
    )
}

pub fn run(identity: &str, pins: &Pins) -> Result<Vec<IdentityReport>> {
    if identity == "all" {
        return IDENTITIES.iter().map(|id| run_one(id, pins)).collect();
    }
    Ok(vec![run_one(identity, pins)?])
}

fn run_one(identity: &str, p: &Pins) -> Result<IdentityReport> {
    let mut r = Recorder { cases: Vec::new() };
    match identity {
        "macmahon" => {
            let top = p.cap(4, 2);
            for l in Pins::range(p.l, 1, top) {
                for n in Pins::range(p.n, 1, top) {
                    for k in Pins::range(p.m, 0, top) {
                        let brute = iter_plane_partitions(l, n, k)
                            .fold(QPoly::zero(), |acc, pp| &acc + &QPoly::q_pow(pp.volume() as i64));
                        r.exact(format!("L={l} N={n} K={k}"), Ok(zq_product(l, n, k)), Ok(brute.clone()));
                        r.exact(
                            format!("L={l} N={n} K={k} count"),
                            Ok(macmahon_count(l, n, k)),
                            Ok(brute.eval_at_one()),
                        );
                    }
                }
            }
        }
        "cauchy-binet" => {
            let top = p.cap(3, 2);
            for n in Pins::range(p.n, 1, top) {
                for ell in Pins::range(p.ell, 0, top) {
                    for lower in 0..=ell {
                        for point in 0..p.cap(5, 2) {
                            let pts = seeded_rationals(p.seed.wrapping_add(point as u64), 2 * n);
                            let spec = CBSpec::unrestricted(ell, lower, pts[..n].to_vec(), pts[n..].to_vec());
                            r.exact(
                                format!("N={n} ell={ell} n={lower} point={point}"),
                                cb_pair_sum(&spec),
                                cb_pair_det(&spec),
                            );
                        }
                    }
                }
            }
        }
        "theorem1" => {
            let top = p.cap(4, 3);
            for n in Pins::range(p.n, 1, top) {
                for k in Pins::range(p.k, 0, 2.min(n)) {
                    for ell in Pins::range(p.ell, 0, 2) {
                        for idx in subsets(n, k) {
                            let pts = seeded_rationals(p.seed.wrapping_add((n * 100 + ell) as u64), 2 * n - k);
                            let spec =
                                CBSpec::restricted(ell, idx.clone(), pts[..n - k].to_vec(), pts[n - k..].to_vec());
                            let params = format!("N={n} I={idx:?} ell={ell}");
                            r.exact::<BigRational>(
                                format!("{params} rational"),
                                cb_pair_sum(&spec),
                                cb_pair_det(&spec),
                            );
                            r.exact(
                                format!("{params} q"),
                                q_restricted_sum(n, ell, &idx),
                                q_restricted_det(n, ell, &idx),
                            );
                        }
                    }
                }
            }
        }
        "theorem2" => {
            for n in Pins::range(p.n, 1, p.cap(4, 3)) {
                for k in Pins::range(p.k, 0, 2.min(n)) {
                    for ell in Pins::range(p.ell, 0, p.cap(3, 2)) {
                        r.exact(
                            format!("N={n} k={k} ell={ell}"),
                            theorem2_eval(n, k, ell),
                            Ok(zq_product(n - k, n, ell)),
                        );
                    }
                }
            }
        }
        "theorem3" => {
            let top = p.cap(4, 3);
            for n in Pins::range(p.n, 1, top) {
                for l in Pins::range(p.l, 1, n) {
                    for calm in Pins::range(p.m, 0, top) {
                        let params = format!("N={n} L={l} M={calm}");
                        let det = watermelon_det(n, l, calm);
                        let count = det.as_ref().map(|d| d.eval_at_one()).map_err(Clone::clone);
                        r.exact(params.clone(), det, Ok(zq_product(l, n, calm)));
                        r.exact::<BigInt>(format!("{params} q=1"), count, watermelon_count(n, l, calm));
                    }
                }
            }
        }
        "theorem4" => {
            let calm = p.m.unwrap_or(12);
            for n in Pins::range(p.n, 2, p.cap(3, 2)) {
                for l in Pins::range(p.l, 1, n - 1) {
                    let k = n - l;
                    let brute = WatermelonSpec::new(n, l, calm, 0, k)
                        .and_then(|s| path_gf(&NestFamily::Watermelons(s)))
                        .map(|g| g.truncate(6));
                    r.exact(
                        format!("N={n} L={l} M={calm} degree<=6"),
                        normtrace_limit(n, l, k, 6),
                        brute,
                    );
                }
            }
        }
        "props" => {
            let top = p.cap(3, 2);
            for n in Pins::range(p.n, 1, top) {
                for l in Pins::range(p.l, 1, n) {
                    for calm in Pins::range(p.m, 0, top) {
                        let k = n - l;
                        let lowers = if k == 0 { 0..=calm } else { 0..=0 };
                        for lower in lowers {
                            for delta in if k == 0 { vec![0] } else { vec![0, k] } {
                                let params = format!("N={n} L={l} M={calm} n={lower} delta={delta}");
                                let gf = WatermelonSpec::new(n, l, calm, lower, delta)
                                    .and_then(|s| path_gf(&NestFamily::Watermelons(s)))
                                    .map(|_| ());
                                r.ok(params, gf);
                            }
                        }
                    }
                }
            }
        }
        "random-turns" => {
            let (top_n, top_m, top_k) = (p.cap(3, 2), p.cap(6, 4), p.cap(6, 4));
            for n in Pins::range(p.n, 1, top_n) {
                for m in Pins::range(p.m, n.saturating_sub(1), top_m) {
                    let configs = configurations(m, n);
                    let mut bad = None;
                    let mut count = 0usize;
                    'pairs: for l in &configs {
                        for j in &configs {
                            let series = match random_turns_series(l, j, top_k, m) {
                                Ok(s) => s,
                                Err(e) => {
                                    bad = Some(e.to_string());
                                    break 'pairs;
                                }
                            };
                            for (k, dp) in series.iter().enumerate() {
                                count += 1;
                                let mp = random_turns_matrix(l, j, k, m);
                                let ks = random_turns_kst(l, j, k, m);
                                if mp.as_ref() != Ok(dp) || ks.as_ref() != Ok(dp) {
                                    bad = Some(format!("l={l:?} j={j:?} K={k}: dp {dp} matrix {mp:?} kst {ks:?}"));
                                    break 'pairs;
                                }
                            }
                        }
                    }
                    let params = format!("N={n} M={m} K<={top_k} ({count} counts)");
                    r.cases.push(match bad {
                        None => Case {
                            params,
                            status: Status::ExactMatch,
                            detail: None,
                        },
                        Some(d) => Case {
                            params,
                            status: Status::Mismatch,
                            detail: Some(d),
                        },
                    });
                }
            }
        }
        "bottleneck" => {
            for n in Pins::range(p.n, 1, 2) {
                for m in Pins::range(p.m, n.saturating_sub(1), p.cap(5, 3)) {
                    let configs = configurations(m, n);
                    let mut res = Ok(());
                    'all: for l in &configs {
                        for j in &configs {
                            for k1 in 0..=3 {
                                for k2 in 0..=3 {
                                    for mp in 0..=m {
                                        if let Err(e) = bottleneck_count(l, j, k1, k2, mp, m) {
                                            res = Err(e);
                                            break 'all;
                                        }
                                    }
                                }
                            }
                        }
                    }
                    r.ok(format!("N={n} M={m} K1,K2<=3"), res);
                }
            }
        }
        "amplitude" => {
            for n in Pins::range(p.n, 1, p.cap(3, 2)) {
                for m in Pins::range(p.m, n.saturating_sub(1), p.cap(6, 4)) {
                    let configs = configurations(m, n);
                    let mut worst: Result<f64> = Ok(0.0);
                    for t in [0.1, 0.5, 1.0] {
                        for l in &configs {
                            for j in &configs {
                                let e = (|| -> Result<f64> {
                                    let a = amplitude(j, l, t, m)?.value;
                                    let b = amplitude_spectral(j, l, t, m)?;
                                    let c = amplitude_series(j, l, t, m)?;
                                    Ok((a - b).norm().max((a - c).norm()).max((b - c).norm()))
                                })();
                                worst = match (worst, e) {
                                    (Ok(w), Ok(e)) => Ok(w.max(e)),
                                    (Err(x), _) | (_, Err(x)) => Err(x),
                                };
                            }
                        }
                    }
                    r.close(format!("N={n} M={m} t in {{0.1,0.5,1}}"), worst, 1e-9);
                }
            }
        }
        "spin-chain" => {
            let (top_n, top_m) = (p.cap(5, 3), p.cap(20, 8));
            for n in Pins::range(p.n, 1, top_n) {
                for m in Pins::range(p.m, n.max(2) - 1, top_m) {
                    let params = format!("N={n} M={m}");
                    let cfg = ChainConfig::new(m, n)?;
                    let g = bethe_ground(&cfg, 0);
                    r.close(
                        format!("{params} Bethe residual"),
                        g.as_ref().map(|g| g.residual).map_err(Clone::clone),
                        1e-12,
                    );
                    r.close(
                        format!("{params} ground energy"),
                        g.as_ref()
                            .map(|g| (g.energy - ground_energy_closed(n, m)).abs())
                            .map_err(Clone::clone),
                        1e-12,
                    );
                    if xx0::subset_count(m + 1, n) <= 300 {
                        let t = 0.7;
                        let f = g.and_then(|g| {
                            let v = persistence(&cfg, 0, t, xx0::DEFAULT_BUDGET)?.value;
                            Ok((v - (-t * g.energy).exp()).abs())
                        });
                        r.close(format!("{params} F(n=0,t) = exp(-t E_g)"), f, 1e-10);
                        for wall in 0..=n {
                            let gamma = (|| -> Result<f64> {
                                let a = autocorrelation(&cfg, wall, 0, 0.3, 0.4, xx0::DEFAULT_BUDGET)?.value;
                                let b = persistence(&cfg, wall, 0.7, xx0::DEFAULT_BUDGET)?.value;
                                Ok((a - b).abs())
                            })();
                            r.close(format!("{params} n={wall} Gamma(m=0) = F(t1+t2)"), gamma, 1e-9);
                        }
                    }
                }
            }
        }
        "form-factors" => {
            for n in Pins::range(p.n, 1, p.cap(3, 2)) {
                for m in Pins::range(p.m, n.max(2) - 1, p.cap(5, 4)) {
                    let cfg = ChainConfig::new(m, n)?;
                    let calm = cfg.calm();
                    for mp in 0..=calm {
                        let params = format!("N={n} M={m} m={mp}");
                        let ff = xx0::projector_formfactor_q(&cfg, mp);
                        let count = ff.as_ref().map(|f| f.eval_at_one()).map_err(Clone::clone);
                        r.exact(
                            params.clone(),
                            ff,
                            Ok(zq_product(n, n, calm - mp).shift((mp * n * n) as i64)),
                        );
                        r.exact(format!("{params} q=1"), count, Ok(macmahon_count(n, n, calm - mp)));
                    }
                    for wall in 0..=n {
                        let ff = xx0::domainwall_formfactor_q(&cfg, wall).map(|f| f.eval_at_one());
                        r.exact(
                            format!("N={n} M={m} n={wall} q=1"),
                            ff,
                            Ok(macmahon_count(n - wall, n, calm)),
                        );
                    }
                }
            }
        }
        other => {
            return Err(Error::InvalidParameter(format!(
                "unknown identity {other}; expected one of {IDENTITIES:?} or all"
            )))
        }
    }
    let status = if r.cases.iter().any(|c| c.status == Status::Mismatch) {
        Status::Mismatch
    } else if r.cases.iter().all(|c| c.status == Status::ExactMatch) {
        Status::ExactMatch
    } else {
        Status::Match
    };
    Ok(IdentityReport {
        identity: identity.to_string(),
        status,
        cases: r.cases,
    })
}

/// All `k`-subsets of `1..=n`, increasing.
fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut c: Vec<usize> = (1..=k).collect();
    loop {
        out.push(c.clone());
        let mut i = k;
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            if c[i] < n - (k - 1 - i) {
                c[i] += 1;
                for t in i + 1..k {
                    c[t] = c[t - 1] + 1;
                }
                break;
            }
        }
    }
}

/// Every set of `n` occupied sites in `0..=m`, as decreasing tuples.
pub fn configurations(m: usize, n: usize) -> Vec<Vec<usize>> {
    sector_basis(m + 1, n)
        .into_iter()
        .map(|mask| (0..=m).rev().filter(|&s| mask >> s & 1 == 1).collect())
        .collect()
}
