//! One PASS/FAIL line per acceptance criterion.
//!
//! Every check compares two independent computations. A criterion listed in
//! `KNOWN_RED` is expected to fail for the stated reason; the run aborts if
//! it unexpectedly passes or any other criterion fails.

use std::collections::HashSet;
use std::time::Instant;

use num_bigint::BigInt;
use num_rational::BigRational;

use watermelon::asymptotics::{leading_asymptote, mehta_integral, AsymptoteKind, AsymptoteParams};
use watermelon::cbident::{
    cb_pair_det, cb_pair_sum, corollary_det, normtrace_limit, normtrace_literal_prefactor, q_restricted_det,
    q_restricted_sum, watermelon_det, CBSpec,
};
use watermelon::draw::{figure2_star, parse_polylines, render_svg, write_scenes, SceneSpec};
use watermelon::partitions::{iter_partitions_in_box, iter_plane_partitions, macmahon_count, zq_product};
use watermelon::paths::{
    adjacency_power, bottleneck_count, enumerate_random_turns, enumerate_watermelons, path_gf, random_turns_dp,
    random_turns_kst, random_turns_matrix, sector_basis, NestFamily, WatermelonSpec,
};
use watermelon::qpoly::{binomial, q_binomial_det};
use watermelon::ring::{det, seeded_rationals};
use watermelon::schur::{q_range, schur_eval};
use watermelon::xx0::{
    amplitude, amplitude_series, amplitude_spectral, autocorrelation, bethe_ground, domainwall_formfactor_q,
    persistence, projector_formfactor_q, subset_count, ChainConfig, DEFAULT_BUDGET,
};
use watermelon::QPoly;

/// Criteria expected to fail, with the reason printed next to the FAIL line.
const KNOWN_RED: [(usize, &str); 1] = [(
    10,
    "F(theta_g, 0, t) = <Psi|e^{-tH}|Psi>/<Psi|Psi> = e^{-t E_g}; it is 1 only at t = 0 or when E_g = 0",
)];

/// Largest mode-subset count for which the O(C^2) two-time double sum runs.
const GAMMA_SUBSETS: u128 = 300;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

fn configurations(m: usize, n: usize) -> Vec<Vec<usize>> {
    sector_basis(m + 1, n)
        .into_iter()
        .map(|mask| (0..=m).rev().filter(|&s| mask >> s & 1 == 1).collect())
        .collect()
}

fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    let all: Vec<usize> = (1..=n).collect();
    let mut out = Vec::new();
    for mask in 0u32..(1 << n) {
        if mask.count_ones() as usize == k {
            out.push(all.iter().copied().filter(|&i| mask >> (i - 1) & 1 == 1).collect());
        }
    }
    out
}

fn brute_box(l: usize, n: usize, k: usize) -> QPoly {
    iter_plane_partitions(l, n, k).fold(QPoly::zero(), |acc, pp| &acc + &QPoly::q_pow(pp.volume() as i64))
}

fn c1_macmahon() -> Outcome {
    let mut cases = 0;
    for l in 0..=4 {
        for n in 0..=4 {
            for k in 0..=4 {
                let brute = brute_box(l, n, k);
                if zq_product(l, n, k) != brute {
                    return outcome(
                        false,
                        format!("L={l} N={n} K={k}: product {} vs sum {brute}", zq_product(l, n, k)),
                    );
                }
                cases += 1;
            }
        }
    }
    let a = brute_box(2, 2, 2).eval_at_one();
    let b = brute_box(2, 2, 1).eval_at_one();
    let ok =
        a == BigInt::from(20) && b == BigInt::from(6) && macmahon_count(2, 2, 2) == a && macmahon_count(2, 2, 1) == b;
    outcome(ok, format!("{cases} boxes exact; A(2,2,2)={a}, A(2,2,1)={b}"))
}

fn c2_cauchy_binet() -> Outcome {
    let mut cases = 0;
    for n in 1..=3usize {
        for ell in 0..=3usize {
            for lower in 0..=ell {
                for point in 0..5u64 {
                    let pts = seeded_rationals(1000 * n as u64 + 10 * ell as u64 + point, 2 * n);
                    let spec = CBSpec::unrestricted(ell, lower, pts[..n].to_vec(), pts[n..].to_vec());
                    let (s, d) = (cb_pair_sum(&spec).unwrap(), cb_pair_det(&spec).unwrap());
                    if s != d {
                        return outcome(false, format!("N={n} ell={ell} n={lower}: {s} != {d}"));
                    }
                    cases += 1;
                }
            }
        }
    }
    outcome(true, format!("{cases} rational instances exact"))
}

fn c3_restricted_sums() -> Outcome {
    let mut cases = 0;
    for n in 1..=4usize {
        for k in 0..=2.min(n) {
            for ell in 0..=2usize {
                for idx in subsets(n, k) {
                    for point in 0..3u64 {
                        let pts = seeded_rationals(7 + 97 * point + (n * 10 + ell) as u64, 2 * n - k);
                        let spec = CBSpec::restricted(ell, idx.clone(), pts[..n - k].to_vec(), pts[n - k..].to_vec());
                        let s: BigRational = cb_pair_sum(&spec).unwrap();
                        if s != cb_pair_det(&spec).unwrap() {
                            return outcome(false, format!("N={n} I={idx:?} ell={ell} rational"));
                        }
                        cases += 1;
                    }
                    if q_restricted_sum(n, ell, &idx).unwrap() != q_restricted_det(n, ell, &idx).unwrap() {
                        return outcome(false, format!("N={n} I={idx:?} ell={ell} q-parametrized"));
                    }
                    cases += 1;
                }
            }
        }
    }
    outcome(true, format!("{cases} restricted instances exact (rational and q)"))
}

fn c4_box_forms() -> Outcome {
    let mut cases = 0;
    for n in 1..=4usize {
        for k in 0..=2.min(n) {
            for ell in 0..=3usize {
                let idx: Vec<usize> = (n - k + 1..=n).collect();
                let sum = q_restricted_sum(n, ell, &idx).unwrap();
                let a: Vec<u64> = (0..ell).map(|j| (2 * n - k + j) as u64).collect();
                let b: Vec<u64> = (0..ell).map(|i| (n - k + i) as u64).collect();
                let binom = q_binomial_det(&a, &b)
                    .unwrap()
                    .shift(-((n * ell * ell.saturating_sub(1) / 2) as i64));
                let prod = zq_product(n - k, n, ell);
                if sum != binom || binom != prod {
                    return outcome(false, format!("N={n} k={k} ell={ell}: {sum} | {binom} | {prod}"));
                }
                cases += 1;
            }
        }
    }
    outcome(true, format!("{cases} three-way Laurent polynomial equalities"))
}

fn c5_watermelon_det() -> Outcome {
    let mut cases = 0;
    for n in 1..=4usize {
        for l in 0..=n {
            for calm in 0..=4usize {
                let w = watermelon_det(n, l, calm).unwrap();
                if w != zq_product(l, n, calm) {
                    return outcome(false, format!("N={n} L={l} M={calm}: determinant vs product"));
                }
                let (ni, li, mi) = (n as i64, l as i64, calm as i64);
                let gv: Vec<Vec<BigInt>> = (1..=ni)
                    .map(|i| (1..=ni).map(|j| binomial(li + mi + ni - i, mi + ni - j)).collect())
                    .collect();
                if w.eval_at_one() != det(gv).unwrap() {
                    return outcome(false, format!("N={n} L={l} M={calm}: q = 1 binomial determinant"));
                }
                cases += 1;
            }
        }
    }
    outcome(
        true,
        format!("{cases} determinant = product, q = 1 binomial determinants agree"),
    )
}

fn c6_height_limit() -> Outcome {
    let calm = 12;
    let mut lines = Vec::new();
    let mut ok = true;
    for n in 2..=3usize {
        for l in 1..n {
            let k = n - l;
            let spec = WatermelonSpec::new(n, l, calm, 0, k).unwrap();
            let brute = path_gf(&NestFamily::Watermelons(spec)).unwrap().truncate(6);
            let limit = normtrace_limit(n, l, k, 6).unwrap();
            ok &= brute == limit;
            let literal = limit.shift(normtrace_literal_prefactor(n, l)).truncate(6);
            lines.push(format!(
                "N={n} L={l}: product {} brute; printed prefactor q^{} {}",
                if brute == limit { "=" } else { "!=" },
                normtrace_literal_prefactor(n, l),
                if literal == brute { "agrees" } else { "disagrees" }
            ));
        }
    }
    outcome(ok, format!("degree <= 6 at M = {calm}; {}", lines.join("; ")))
}

fn c7_volume_sums() -> Outcome {
    let mut cases = 0;
    for n in 1..=3usize {
        for l in 0..=n {
            let k = n - l;
            for calm in 0..=3usize {
                let lowers = if k == 0 { calm } else { 0 };
                let deltas = if k == 0 { vec![0] } else { vec![0, k] };
                for lower in 0..=lowers {
                    for &delta in &deltas {
                        let spec = WatermelonSpec::new(n, l, calm, lower, delta).unwrap();
                        let brute = enumerate_watermelons(&spec)
                            .into_iter()
                            .fold(QPoly::zero(), |acc, (_, v)| &acc + &QPoly::q_pow(v.value));
                        // Cauchy–Binet form P over the boxed gluing partitions.
                        let xs = if delta == 0 {
                            q_range(1, l as i64)
                        } else {
                            q_range(k as i64 + 1, n as i64)
                        };
                        let ys = q_range(0, n as i64 - 1);
                        let mut p = QPoly::zero();
                        for lam in iter_partitions_in_box(l, calm, lower) {
                            let mut hat = lam.parts().to_vec();
                            hat.resize(n, 0);
                            p = &p + &(&schur_eval(lam.parts(), &xs).unwrap() * &schur_eval(&hat, &ys).unwrap());
                        }
                        // Rectangle Schur form.
                        let mut shape = vec![calm - lower; n];
                        shape.extend(std::iter::repeat_n(0, l));
                        let mut pts = q_range(1, n as i64);
                        pts.extend(q_range((delta + n + 1) as i64, (delta + 2 * n - k) as i64));
                        let (ni, lo, mi) = (n as i64, lower as i64, calm as i64);
                        let rect = schur_eval(&shape, &pts)
                            .unwrap()
                            .shift(lo * ni * ni - (mi - lo) * ni * (ni + 1) / 2);
                        let tag = format!("N={n} L={l} M={calm} n={lower} delta={delta}");
                        if brute != p {
                            return outcome(false, format!("{tag}: brute {brute} vs P form {p}"));
                        }
                        if brute != rect {
                            return outcome(false, format!("{tag}: brute {brute} vs Schur form {rect}"));
                        }
                        if lower == 0 {
                            let cor = corollary_det(n, l, calm, delta)
                                .unwrap()
                                .shift(-(mi * ni * (ni + 1) / 2));
                            if brute != cor {
                                return outcome(false, format!("{tag}: brute vs determinant {cor}"));
                            }
                        }
                        cases += 1;
                    }
                }
            }
        }
    }
    outcome(
        true,
        format!("{cases} watermelon families exact against P, Schur and determinant forms"),
    )
}

fn c8_random_turns() -> Outcome {
    let mut counts = 0usize;
    for n in 1..=3usize {
        for m in n.saturating_sub(1).max(1)..=6 {
            let configs = configurations(m, n);
            for l in &configs {
                for j in &configs {
                    for k in 0..=6 {
                        let dp = random_turns_dp(l, j, k, m).unwrap();
                        let mp = random_turns_matrix(l, j, k, m).unwrap();
                        let ks = random_turns_kst(l, j, k, m).unwrap();
                        if dp != mp || dp != ks || (n == 1 && dp != adjacency_power(j[0], l[0], k, m)) {
                            return outcome(
                                false,
                                format!("l={l:?} j={j:?} K={k} M={m}: dp {dp} matrix {mp} kst {ks}"),
                            );
                        }
                        counts += 1;
                    }
                }
            }
        }
    }
    // Bottleneck: library gluing/DP against filtered explicit trajectories.
    let mut bottlenecks = 0usize;
    for n in 1..=2usize {
        for m in n.max(2) - 1..=5 {
            let configs = configurations(m, n);
            for l in &configs {
                for j in &configs {
                    for total in 0..=6usize {
                        let walks = enumerate_random_turns(l, j, total, m).unwrap();
                        for k1 in total.saturating_sub(3)..=total.min(3) {
                            let k2 = total - k1;
                            for mp in 0..=m {
                                let brute = walks
                                    .iter()
                                    .filter(|w| w.trajectory[k1].iter().all(|&s| s >= mp))
                                    .count();
                                let got = bottleneck_count(l, j, k1, k2, mp, m).unwrap();
                                if got != BigInt::from(brute) {
                                    return outcome(
                                        false,
                                        format!("l={l:?} j={j:?} K1={k1} K2={k2} m={mp}: {got} vs {brute}"),
                                    );
                                }
                                bottlenecks += 1;
                            }
                        }
                    }
                }
            }
        }
    }
    outcome(
        true,
        format!("{counts} walk counts three ways, {bottlenecks} bottleneck counts vs explicit trajectories"),
    )
}

fn c9_amplitude() -> Outcome {
    let mut worst = 0.0f64;
    let mut cases = 0;
    for n in 1..=3usize {
        for m in n.saturating_sub(1)..=6 {
            let configs = configurations(m, n);
            for t in [0.1, 0.5, 1.0] {
                for l in &configs {
                    for j in &configs {
                        let a = amplitude(j, l, t, m).unwrap().value;
                        let b = amplitude_spectral(j, l, t, m).unwrap();
                        let c = amplitude_series(j, l, t, m).unwrap();
                        worst = worst.max((a - b).norm()).max((a - c).norm()).max((b - c).norm());
                        cases += 1;
                    }
                }
            }
        }
    }
    outcome(
        worst <= 1e-9,
        format!("{cases} amplitudes, max pairwise difference {worst:.2e} (tol 1e-9)"),
    )
}

/// Returns the outcome and whether the failure is the documented one.
fn c10_spin_chain() -> (Outcome, bool) {
    let mut residual = 0.0f64;
    let mut energy = 0.0f64;
    let mut gamma = 0.0f64;
    let mut gamma_cases = 0;
    let mut f_one = 0.0f64;
    let mut f_eg = 0.0f64;
    for n in 1..=5usize {
        for m in n.max(2) - 1..=20 {
            let cfg = ChainConfig::new(m, n).unwrap();
            for wall in 0..=n {
                let g = bethe_ground(&cfg, wall).unwrap();
                residual = residual.max(g.residual);
                let cos: f64 = g.theta.iter().map(|t| t.cos()).sum();
                let closed = (n - wall) as f64
                    - if n - wall <= 1 {
                        (n - wall) as f64
                    } else {
                        let s = m as f64 + 1.0;
                        (std::f64::consts::PI * (n - wall) as f64 / s).sin() / (std::f64::consts::PI / s).sin()
                    };
                energy = energy
                    .max(((n - wall) as f64 - cos - closed).abs())
                    .max((g.energy - closed).abs());
            }
            let g = bethe_ground(&cfg, 0).unwrap();
            for t in [0.5, 1.5] {
                let f = persistence(&cfg, 0, t, DEFAULT_BUDGET).unwrap().value;
                f_one = f_one.max((f - 1.0).abs());
                f_eg = f_eg.max((f - (-t * g.energy).exp()).abs());
            }
            if subset_count(m + 1, n) <= GAMMA_SUBSETS {
                for wall in 0..=n {
                    let (t1, t2) = (0.3, 0.4);
                    let a = autocorrelation(&cfg, wall, 0, t1, t2, DEFAULT_BUDGET).unwrap().value;
                    let b = persistence(&cfg, wall, t1 + t2, DEFAULT_BUDGET).unwrap().value;
                    gamma = gamma.max((a - b).abs());
                    gamma_cases += 1;
                }
            }
        }
    }
    let rest = residual <= 1e-12 && energy <= 1e-12 && gamma <= 1e-9;
    let clause1 = f_one <= 1e-10;
    let detail = format!(
        "|F(n=0)-1| max {f_one:.2e} (tol 1e-10); |F(n=0)-e^(-tE_g)| max {f_eg:.2e}; Gamma(m=0) vs F(t1+t2) max {gamma:.2e} over {gamma_cases} cases; residual max {residual:.2e}; energy max {energy:.2e}"
    );
    // The documented failure: clause 1 is off exactly by e^{-t E_g}.
    let documented = !clause1 && f_eg <= 1e-10 && rest;
    (outcome(clause1 && rest, detail), documented)
}

fn c11_form_factors() -> Outcome {
    let mut cases = 0;
    for n in 1..=3usize {
        for m in n.max(2) - 1..=5 {
            let cfg = ChainConfig::new(m, n).unwrap();
            let calm = cfg.calm();
            for mp in 0..=calm {
                let ff = projector_formfactor_q(&cfg, mp).unwrap();
                let want = brute_box(n, n, calm - mp).shift((mp * n * n) as i64);
                if ff != want || ff.eval_at_one() != macmahon_count(n, n, calm - mp) {
                    return outcome(false, format!("N={n} M={m} m={mp}: {ff} vs {want}"));
                }
                cases += 1;
            }
            for wall in 0..=n {
                let c = domainwall_formfactor_q(&cfg, wall).unwrap().eval_at_one();
                if c != macmahon_count(n - wall, n, calm) {
                    return outcome(false, format!("N={n} M={m} n={wall}: count {c}"));
                }
                cases += 1;
            }
        }
    }
    outcome(
        true,
        format!("{cases} form factors exact; q = 1 limits are the box counts"),
    )
}

fn c12_asymptotics() -> Outcome {
    let amp = leading_asymptote(
        AsymptoteKind::Amplitude,
        &AsymptoteParams::new(60, 1).with_window(20.0, 60.0),
    )
    .unwrap();
    let mut p = AsymptoteParams::new(60, 2).with_window(15.0, 40.0);
    p.wall = 2;
    let pers = leading_asymptote(AsymptoteKind::Persistence, &p).unwrap();
    p.wall = 0;
    let eigen = leading_asymptote(AsymptoteKind::Persistence, &p).unwrap();
    let mut mehta = 0.0f64;
    let mut fact = 1.0f64;
    let root = (2.0 * std::f64::consts::PI).sqrt();
    for n in 1..=15usize {
        fact *= n as f64;
        let ratio = mehta_integral(n + 1).unwrap().value / mehta_integral(n).unwrap().value;
        mehta = mehta.max((ratio - fact / root).abs() / (fact / root));
    }
    let a_ok = (amp.fitted_exponent - 0.5).abs() <= 0.15 * 0.5;
    let p_ok = (pers.fitted_exponent - 2.0).abs() <= 0.20 * 2.0;
    outcome(
        a_ok && p_ok && mehta <= 1e-12,
        format!(
            "N=1 amplitude slope {:.4} (1/2 +- 15%), N=2 domain-wall persistence slope {:.4} (2 +- 20%), n=0 eigenstate slope {:.4} (reported); amplitude ratios {:.3}, {:.3e} (reported); Mehta recurrence {mehta:.1e}",
            amp.fitted_exponent, pers.fitted_exponent, eigen.fitted_exponent, amp.amplitude_ratio, pers.amplitude_ratio
        ),
    )
}

fn c13_rendering() -> Outcome {
    let spec = WatermelonSpec::new(2, 2, 1, 0, 0).unwrap();
    let scenes: Vec<SceneSpec> = enumerate_watermelons(&spec)
        .into_iter()
        .map(|(w, _)| SceneSpec::new(w))
        .collect();
    let dir = std::env::temp_dir().join(format!("watermelon-acceptance-{}", std::process::id()));
    let files = write_scenes(&scenes, &dir, "watermelon").unwrap();
    let docs: Vec<String> = files.iter().map(|f| std::fs::read_to_string(f).unwrap()).collect();
    let _ = std::fs::remove_dir_all(&dir);
    let distinct = docs.iter().collect::<HashSet<_>>().len();
    let header = |d: &str| d.lines().nth(1).unwrap_or_default().to_string();
    let same_box = docs.iter().all(|d| header(d) == header(&docs[0]));
    let stable = scenes.iter().zip(&docs).all(|(s, d)| render_svg(s).unwrap() == *d);
    let fig = render_svg(&SceneSpec::new(figure2_star())).unwrap();
    let paths = parse_polylines(&fig);
    let mut seen = HashSet::new();
    let disjoint = paths
        .iter()
        .flatten()
        .all(|&(x, y)| seen.insert(((x * 100.0) as i64, (y * 100.0) as i64)));
    let ok = files.len() == 6 && distinct == 6 && same_box && stable && paths.len() == 4 && disjoint;
    outcome(
        ok,
        format!(
            "{} files, {distinct} distinct, shared bounding box {same_box}, byte-identical rerender {stable}; figure-2 star {} paths, vertex-disjoint {disjoint}",
            files.len(),
            paths.len()
        ),
    )
}

fn main() {
    let mut failures = Vec::new();
    let mut unexpected_pass = Vec::new();
    let mut run = |id: usize, name: &str, f: &dyn Fn() -> (Outcome, bool)| {
        let start = Instant::now();
        let (o, documented) = f();
        let secs = start.elapsed().as_secs_f64();
        let red = KNOWN_RED.iter().find(|(k, _)| *k == id);
        println!(
            "{} criterion {id:>2} {name} [{secs:.2}s]: {}",
            if o.pass { "PASS" } else { "FAIL" },
            o.detail
        );
        match (o.pass, red) {
            (false, Some((_, why))) if documented => println!("     known red: {why}"),
            (false, _) => failures.push(id),
            (true, Some(_)) => unexpected_pass.push(id),
            (true, None) => {}
        }
    };
    let plain = |f: fn() -> Outcome| move || (f(), false);
    run(1, "MacMahon box product", &plain(c1_macmahon));
    run(2, "Cauchy-Binet determinant", &plain(c2_cauchy_binet));
    run(3, "restricted sums", &plain(c3_restricted_sums));
    run(4, "three box forms", &plain(c4_box_forms));
    run(5, "watermelon determinant", &plain(c5_watermelon_det));
    run(6, "large-height limit", &plain(c6_height_limit));
    run(7, "watermelon volume sums", &plain(c7_volume_sums));
    run(8, "random-turns counts", &plain(c8_random_turns));
    run(9, "amplitude three ways", &plain(c9_amplitude));
    run(10, "spin-chain sanity", &c10_spin_chain);
    run(11, "form factors", &plain(c11_form_factors));
    run(12, "asymptotic exponents", &plain(c12_asymptotics));
    run(13, "rendering", &plain(c13_rendering));
    if !failures.is_empty() || !unexpected_pass.is_empty() {
        eprintln!("failed: {failures:?}; expected red but passed: {unexpected_pass:?}");
        std::process::exit(1);
    }
}
