//! Brute-force nests of non-intersecting lattice paths: stars, conjugate
//! stars, watermelons and random-turns walkers, with their volumes.
//!
//! Geometry: vertical lines `x_1, ..., x_2N`. Path `i` of a star starts at
//! `(i, N - i)` and climbs `c_ij` steps on line `x_j`, ending at height
//! `mu_i = lambda_i + N - i` on `x_N`. A conjugate star continues path `i`
//! over `x_(N+1), ..., x_(N+i)` up to `(N + i, M + N - i)`.

use std::collections::{BTreeMap, HashSet};

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::par;
use crate::partitions::{iter_partitions_in_box, StrictPartition};
use crate::qpoly::QPoly;
use crate::ring::det;
use crate::schur::{content, for_each_skew_tableau, principal_specialization, q_range, schur_eval, Specialization};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NestKind {
    Star,
    ConjStar,
    Watermelon,
    RandomTurns,
}

/// One nest of paths. Unused fields stay empty for a given kind.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PathNest {
    pub kind: NestKind,
    /// Number of paths (`N` for watermelons, rows for stars).
    pub n: usize,
    pub deviation: usize,
    /// Volume parameter `delta` of deviated watermelons.
    pub delta: usize,
    /// Lower bound `n` of the gluing partition for watermelons.
    pub lower: usize,
    /// `M`, the column height of conjugate stars and watermelons.
    pub height: usize,
    /// `lambda`, zero-padded to the number of paths.
    pub shape: Vec<usize>,
    /// `mu = lambda + delta_N` where the two halves are glued.
    pub gluing: Vec<usize>,
    /// `c_j`, `b_alpha` or `m_j` depending on the kind.
    pub step_counts: Vec<usize>,
    /// Rows of the star tableau.
    pub tableau: Vec<Vec<usize>>,
    /// Rows of the conjugate-star filling of `M \ lambda`.
    pub conj_tableau: Vec<Vec<usize>>,
    /// Random turns: positions per time step, indexed by walker.
    pub trajectory: Vec<Vec<usize>>,
}

impl PathNest {
    fn empty(kind: NestKind, n: usize) -> Self {
        PathNest {
            kind,
            n,
            deviation: 0,
            delta: 0,
            lower: 0,
            height: 0,
            shape: Vec::new(),
            gluing: Vec::new(),
            step_counts: Vec::new(),
            tableau: Vec::new(),
            conj_tableau: Vec::new(),
            trajectory: Vec::new(),
        }
    }

    /// Polyline of every path as unit up/right lattice steps. Random-turns
    /// walkers give `(time, site)` points instead.
    pub fn points(&self) -> Vec<Vec<(i64, i64)>> {
        match self.kind {
            NestKind::Star => {
                let rows = self.shape.len();
                let top = self.deviation + rows;
                (0..rows)
                    .map(|i| {
                        let start = ((self.deviation + i + 1) as i64, (rows - 1 - i) as i64);
                        star_path(start, top as i64, &self.tableau[i])
                    })
                    .collect()
            }
            NestKind::ConjStar => {
                let n = self.n;
                (0..n)
                    .map(|i| {
                        let mut p = vec![(n as i64, self.gluing[i] as i64)];
                        conj_path(&mut p, n, i, &self.conj_tableau[i]);
                        p
                    })
                    .collect()
            }
            NestKind::Watermelon => {
                let n = self.n;
                let k = self.deviation;
                (0..n)
                    .map(|i| {
                        let row = self.tableau.get(i).map(|r| r.as_slice()).unwrap_or(&[]);
                        let x0 = (k + i + 1).min(n) as i64;
                        let mut p = star_path((x0, (n - 1 - i) as i64), n as i64, row);
                        conj_path(&mut p, n, i, &self.conj_tableau[i]);
                        p
                    })
                    .collect()
            }
            NestKind::RandomTurns => {
                let walkers = self.trajectory.first().map_or(0, |c| c.len());
                (0..walkers)
                    .map(|w| {
                        self.trajectory
                            .iter()
                            .enumerate()
                            .map(|(t, c)| (t as i64, c[w] as i64))
                            .collect()
                    })
                    .collect()
            }
        }
    }

    /// Structural invariants: disjoint paths and the step-count sums.
    pub fn check(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::InconsistentNest(m.into()));
        match self.kind {
            NestKind::RandomTurns => {
                for c in &self.trajectory {
                    let set: HashSet<_> = c.iter().collect();
                    if set.len() != c.len() {
                        return bad("two walkers share a site");
                    }
                }
                for w in self.trajectory.windows(2) {
                    if w[0].len() != w[1].len() {
                        return bad("walker count changes");
                    }
                    if w[0].iter().zip(&w[1]).filter(|(a, b)| a != b).count() != 1 {
                        return bad("exactly one walker moves per tick");
                    }
                }
                return Ok(());
            }
            NestKind::Star => {
                if self.step_counts.iter().sum::<usize>() != self.shape.iter().sum::<usize>() {
                    return bad("star step counts do not sum to |lambda|");
                }
                if self.tableau.len() != self.shape.len() {
                    return bad("tableau rows do not match the shape");
                }
            }
            NestKind::ConjStar => {
                let cells = self.n * self.height - self.shape.iter().sum::<usize>();
                if self.step_counts.iter().sum::<usize>() != cells {
                    return bad("conjugate star counts do not fill M \\ lambda");
                }
                if self.conj_tableau.len() != self.n || self.gluing.len() != self.n {
                    return bad("conjugate star needs one row per path");
                }
            }
            NestKind::Watermelon => {
                if self.step_counts.iter().sum::<usize>() != self.height * self.n {
                    return bad("watermelon step counts do not sum to M N");
                }
                if self.conj_tableau.len() != self.n {
                    return bad("watermelon needs one conjugate row per path");
                }
            }
        }
        let paths = self.points();
        let mut seen = HashSet::new();
        for p in &paths {
            for w in p.windows(2) {
                let (dx, dy) = (w[1].0 - w[0].0, w[1].1 - w[0].1);
                if !((dx == 1 && dy == 0) || (dx == 0 && dy == 1)) {
                    return bad("path takes a non-unit step");
                }
            }
            for pt in p {
                if !seen.insert(*pt) {
                    return bad("paths share a vertex");
                }
            }
        }
        Ok(())
    }
}

// Path of one star row from `start` to `last_line`; letter `j` climbs on `x_j`.
fn star_path(start: (i64, i64), last_line: i64, row: &[usize]) -> Vec<(i64, i64)> {
    let (mut x, mut y) = start;
    let mut p = vec![(x, y)];
    let first = x;
    for line in first..=last_line {
        while x < line {
            x += 1;
            p.push((x, y));
        }
        for _ in row.iter().filter(|&&e| e as i64 == line) {
            y += 1;
            p.push((x, y));
        }
    }
    p
}

fn conj_path(p: &mut Vec<(i64, i64)>, n: usize, i: usize, row: &[usize]) {
    let (mut x, mut y) = *p.last().unwrap();
    for alpha in 1..=i + 1 {
        x += 1;
        p.push((x, y));
        for _ in row.iter().filter(|&&e| e == alpha) {
            y += 1;
            p.push((x, y));
        }
    }
    debug_assert_eq!(x, (n + i + 1) as i64);
}

/// Which volume statistic to compute.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum VolumeFlavor {
    /// `|C| = N |lambda| - sum j c_j`
    Plain,
    /// `|C|_w = (N+1) |lambda| - sum j c_j`
    Extended,
    /// `|C_k|_w = (N+1) |lambda| - sum_(j>k) j c_j`
    DeviationExtended,
    /// `|C_k|_wbar = (N+k+1) |lambda| - sum_(j>k) j c_j`
    DeviationExtendedBar,
    /// `|B|_d = sum (M - lambda_a - b_a)(a - 1)`
    DualD,
    /// `|B|_w = sum (M - b_a)(a - 1)`
    DualW,
    /// Watermelon volume with gluing bound `n`.
    Watermelon,
    /// Deviated watermelon volume `|w|_delta`.
    WatermelonDeviation,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Volume {
    pub value: i64,
    pub flavor: VolumeFlavor,
}

/// Evaluate a volume of a nest; the flavor must fit the kind.
pub fn volume(nest: &PathNest, flavor: VolumeFlavor) -> Result<Volume> {
    use VolumeFlavor::*;
    let wrong = || {
        Err(Error::InvalidParameter(format!(
            "{flavor:?} does not apply to {:?}",
            nest.kind
        )))
    };
    let weight: i64 = nest.shape.iter().sum::<usize>() as i64;
    let n = nest.step_counts.len() as i64;
    let k = nest.deviation as i64;
    let jc = |from: i64| -> i64 {
        nest.step_counts
            .iter()
            .enumerate()
            .map(|(j, &c)| (j as i64 + 1, c as i64))
            .filter(|(j, _)| *j > from)
            .map(|(j, c)| j * c)
            .sum()
    };
    let value = match (nest.kind, flavor) {
        (NestKind::Star, Plain) if k == 0 => n * weight - jc(0),
        (NestKind::Star, Extended) if k == 0 => (n + 1) * weight - jc(0),
        (NestKind::Star, DeviationExtended) => (n + 1) * weight - jc(k),
        (NestKind::Star, DeviationExtendedBar) => (n + k + 1) * weight - jc(k),
        (NestKind::ConjStar, DualD) | (NestKind::ConjStar, DualW) => {
            let m = nest.height as i64;
            nest.step_counts
                .iter()
                .enumerate()
                .map(|(a, &b)| {
                    let lam = if flavor == DualD { nest.shape[a] as i64 } else { 0 };
                    (m - lam - b as i64) * a as i64
                })
                .sum()
        }
        (NestKind::Watermelon, Watermelon) if k == 0 => {
            let (nn, m, low) = (nest.n as i64, nest.height as i64, nest.lower as i64);
            let s: i64 = nest
                .step_counts
                .iter()
                .enumerate()
                .map(|(j, &c)| {
                    let reduced = if (j as i64) < nn { c as i64 - low } else { c as i64 };
                    (2 * nn - j as i64 - 1) * reduced
                })
                .sum();
            s - m * nn * (nn - 1) / 2 + low * nn * (3 * nn - 1) / 2
        }
        (NestKind::Watermelon, WatermelonDeviation) => {
            let (nn, m, d) = (nest.n as i64, nest.height as i64, nest.delta as i64);
            let s: i64 = nest
                .step_counts
                .iter()
                .enumerate()
                .map(|(j, &c)| (j as i64 + 1, c as i64))
                .filter(|(j, _)| *j > k)
                .map(|(j, c)| (2 * nn - j) * c + if j <= nn { d * c } else { 0 })
                .sum();
            s - m * nn * (nn - 1) / 2
        }
        _ => return wrong(),
    };
    debug_assert!(value >= 0, "negative volume {value} for {flavor:?}");
    Ok(Volume { value, flavor })
}

fn pad(lambda: &[usize], n: usize) -> Vec<usize> {
    let mut v = lambda.to_vec();
    v.resize(n.max(v.len()), 0);
    v
}

fn check_shape(lambda: &[usize], rows: usize) -> Result<()> {
    if lambda.windows(2).any(|w| w[0] < w[1]) {
        return Err(Error::NotWeak);
    }
    if lambda.iter().skip(rows).any(|&p| p > 0) {
        return Err(Error::InvalidParameter(format!(
            "partition has more than {rows} nonzero parts"
        )));
    }
    Ok(())
}

/// Visit every star of shape `lambda` (padded to `N - k` rows) with letters in `k+1..=N`.
pub fn for_each_star<F: FnMut(PathNest)>(lambda: &[usize], n: usize, k: usize, mut f: F) -> Result<()> {
    if k > n {
        return Err(Error::InvalidParameter("deviation exceeds N".into()));
    }
    check_shape(lambda, n - k)?;
    let shape = pad(lambda, n - k)[..n - k].to_vec();
    let strict: Vec<usize> = shape.iter().enumerate().map(|(i, p)| p + n - k - 1 - i).collect();
    for_each_skew_tableau(&shape, &[], k + 1, n, |t| {
        let mut nest = PathNest::empty(NestKind::Star, n - k);
        nest.deviation = k;
        nest.shape = shape.clone();
        nest.gluing = strict.clone();
        nest.step_counts = content(t, n);
        nest.tableau = t.to_vec();
        f(nest);
    });
    Ok(())
}

pub fn enumerate_stars(lambda: &[usize], n: usize, k: usize) -> Result<Vec<PathNest>> {
    let mut out = Vec::new();
    for_each_star(lambda, n, k, |s| out.push(s))?;
    Ok(out)
}

/// Conjugate stars: fillings of `M \ lambda-hat` over `[N]`. For `k > 0`
/// only the family with the last `k` lines full (`b_a = M`, `a > N - k`).
pub fn for_each_conj_star<F: FnMut(PathNest)>(
    lambda: &[usize],
    calm: usize,
    n: usize,
    k: usize,
    mut f: F,
) -> Result<()> {
    if k > n {
        return Err(Error::InvalidParameter("deviation exceeds N".into()));
    }
    check_shape(lambda, n - k)?;
    if lambda.first().is_some_and(|&p| p > calm) {
        return Err(Error::InvalidParameter(format!("partition exceeds {calm}")));
    }
    let shape = pad(lambda, n)[..n].to_vec();
    let outer = vec![calm; n];
    let strict: Vec<usize> = shape.iter().enumerate().map(|(i, p)| p + n - 1 - i).collect();
    for_each_skew_tableau(&outer, &shape, 1, n, |t| {
        let b = content(t, n);
        if b[n - k..].iter().any(|&v| v != calm) {
            return;
        }
        let mut nest = PathNest::empty(NestKind::ConjStar, n);
        nest.deviation = k;
        nest.height = calm;
        nest.shape = shape.clone();
        nest.gluing = strict.clone();
        nest.step_counts = b;
        nest.conj_tableau = t.to_vec();
        f(nest);
    });
    Ok(())
}

pub fn enumerate_conj_stars(lambda: &[usize], calm: usize, n: usize, k: usize) -> Result<Vec<PathNest>> {
    let mut out = Vec::new();
    for_each_conj_star(lambda, calm, n, k, |s| out.push(s))?;
    Ok(out)
}

/// Parameters of a watermelon family.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WatermelonSpec {
    pub n: usize,
    pub l: usize,
    pub calm: usize,
    pub lower: usize,
    pub delta: usize,
}

impl WatermelonSpec {
    pub fn new(n: usize, l: usize, calm: usize, lower: usize, delta: usize) -> Result<Self> {
        if l > n || n == 0 {
            return Err(Error::InvalidParameter("need 1 <= N and L <= N".into()));
        }
        let k = n - l;
        if delta != 0 && delta != k {
            return Err(Error::InvalidDeviation { delta, k });
        }
        if lower > calm {
            return Err(Error::InvalidParameter("lower bound exceeds M".into()));
        }
        if k > 0 && lower > 0 {
            return Err(Error::InvalidParameter(
                "deviated watermelons have no lower bound".into(),
            ));
        }
        Ok(WatermelonSpec {
            n,
            l,
            calm,
            lower,
            delta,
        })
    }

    pub fn k(&self) -> usize {
        self.n - self.l
    }

    pub fn flavor(&self) -> VolumeFlavor {
        if self.k() == 0 {
            VolumeFlavor::Watermelon
        } else {
            VolumeFlavor::WatermelonDeviation
        }
    }

    fn gluings(&self) -> Vec<Vec<usize>> {
        iter_partitions_in_box(self.l, self.calm, self.lower)
            .map(|p| p.parts().to_vec())
            .collect()
    }
}

// All watermelons glued along one `lambda`, stars outer and conjugate stars inner.
fn watermelons_at(spec: &WatermelonSpec, lambda: &[usize]) -> Vec<(PathNest, Volume)> {
    let (n, k) = (spec.n, spec.k());
    let hat = pad(lambda, n);
    let strict: Vec<usize> = hat.iter().enumerate().map(|(i, p)| p + n - 1 - i).collect();
    let stars = crate::schur::tableaux(lambda, k + 1, n);
    let mut conj = Vec::new();
    for_each_skew_tableau(&vec![spec.calm; n], &hat, 1, n, |t| conj.push(t.to_vec()));
    let mut out = Vec::with_capacity(stars.len() * conj.len());
    for c in &stars {
        let cc = content(c, n);
        for b in &conj {
            let mut nest = PathNest::empty(NestKind::Watermelon, n);
            nest.deviation = k;
            nest.delta = spec.delta;
            nest.lower = spec.lower;
            nest.height = spec.calm;
            nest.shape = hat.clone();
            nest.gluing = strict.clone();
            let mut m = cc.clone();
            m.extend(content(b, n));
            nest.step_counts = m;
            nest.tableau = c.clone();
            nest.conj_tableau = b.clone();
            let v = volume(&nest, spec.flavor()).expect("watermelon flavor");
            out.push((nest, v));
        }
    }
    out
}

/// Every watermelon of the family with its volume, in gluing order
/// (`lambda` lexicographically decreasing, then stars, then conjugate stars).
pub fn enumerate_watermelons(spec: &WatermelonSpec) -> Vec<(PathNest, Volume)> {
    let gl = spec.gluings();
    par::map_indexed(gl.len(), |i| watermelons_at(spec, &gl[i]))
        .into_iter()
        .flatten()
        .collect()
}

/// A family whose generating function `sum q^volume` is requested.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum NestFamily {
    Stars {
        lambda: Vec<usize>,
        n: usize,
        k: usize,
        flavor: VolumeFlavor,
    },
    ConjStars {
        lambda: Vec<usize>,
        calm: usize,
        n: usize,
        k: usize,
        flavor: VolumeFlavor,
    },
    Watermelons(WatermelonSpec),
}

fn mismatch(what: &str, got: &QPoly, want: &QPoly) -> Error {
    Error::IdentityMismatch(format!("{what}: {got} vs {want}"))
}

fn gf_of(vols: impl IntoIterator<Item = i64>) -> QPoly {
    let mut hist: BTreeMap<i64, i64> = BTreeMap::new();
    for v in vols {
        *hist.entry(v).or_default() += 1;
    }
    hist.into_iter()
        .fold(QPoly::zero(), |acc, (d, c)| &acc + &QPoly::monomial(BigInt::from(c), d))
}

/// `sum q^volume` over the family by brute force, asserted against the
/// Schur-function closed forms.
pub fn path_gf(family: &NestFamily) -> Result<QPoly> {
    use VolumeFlavor::*;
    match family {
        NestFamily::Stars { lambda, n, k, flavor } => {
            let (n, k) = (*n, *k);
            let mut vols = Vec::new();
            let mut err = None;
            for_each_star(lambda, n, k, |s| match volume(&s, *flavor) {
                Ok(v) => vols.push(v.value),
                Err(e) => err = Some(e),
            })?;
            if let Some(e) = err {
                return Err(e);
            }
            let gf = gf_of(vols);
            let shape = pad(lambda, n - k);
            let weight: usize = shape.iter().sum();
            let want = match flavor {
                Plain => principal_specialization(&shape, n, Specialization::QNOverQ)?,
                Extended => principal_specialization(&shape, n, Specialization::QN)?,
                DeviationExtended => schur_eval(&shape, &q_range(1, (n - k) as i64))?,
                DeviationExtendedBar => schur_eval(&shape, &q_range(1, (n - k) as i64))?.shift((k * weight) as i64),
                _ => unreachable!("rejected by volume"),
            };
            if gf != want {
                return Err(mismatch("star partition function", &gf, &want));
            }
            Ok(gf)
        }
        NestFamily::ConjStars {
            lambda,
            calm,
            n,
            k,
            flavor,
        } => {
            let (n, k) = (*n, *k);
            let mut vols = Vec::new();
            let mut err = None;
            for_each_conj_star(lambda, *calm, n, k, |s| match volume(&s, *flavor) {
                Ok(v) => vols.push(v.value),
                Err(e) => err = Some(e),
            })?;
            if let Some(e) = err {
                return Err(e);
            }
            let gf = gf_of(vols);
            let shape = pad(lambda, n - k);
            let s = schur_eval(&shape, &q_range(0, (n - k) as i64 - 1))?;
            let want = match flavor {
                DualW => s,
                DualD => {
                    let nl: usize = shape.iter().enumerate().map(|(a, p)| a * p).sum();
                    s.shift(-(nl as i64))
                }
                _ => unreachable!("rejected by volume"),
            };
            if gf != want {
                return Err(mismatch("conjugate star partition function", &gf, &want));
            }
            Ok(gf)
        }
        NestFamily::Watermelons(spec) => {
            let gf = gf_of(enumerate_watermelons(spec).into_iter().map(|(_, v)| v.value));
            let (n, k, m) = (spec.n as i64, spec.k(), spec.calm as i64);
            // Cauchy–Binet sum side.
            let xs = if spec.delta == 0 {
                q_range(1, spec.l as i64)
            } else {
                q_range(k as i64 + 1, n)
            };
            let ys = q_range(0, n - 1);
            let mut p = QPoly::zero();
            for lam in spec.gluings() {
                let a = schur_eval(&lam, &xs)?;
                let b = schur_eval(&pad(&lam, spec.n), &ys)?;
                p = &p + &(&a * &b);
            }
            if gf != p {
                return Err(mismatch("watermelon sum vs Cauchy–Binet form", &gf, &p));
            }
            // Schur function of the rectangle.
            let low = spec.lower as i64;
            let mut shape = vec![spec.calm - spec.lower; spec.n];
            shape.extend(std::iter::repeat_n(0, spec.l));
            let mut pts = q_range(1, n);
            pts.extend(q_range(spec.delta as i64 + n + 1, spec.delta as i64 + 2 * n - k as i64));
            let s = schur_eval(&shape, &pts)?.shift(low * n * n - (m - low) * n * (n + 1) / 2);
            if gf != s {
                return Err(mismatch("watermelon sum vs rectangular Schur form", &gf, &s));
            }
            Ok(gf)
        }
    }
}

// ---------------------------------------------------------------------------
// Random turns walkers.

/// `Delta_nm = [|n-m| = 1] + [|n-m| = M]` on sites `0..=M`.
pub fn hopping_weight(a: usize, b: usize, m: usize) -> u32 {
    let d = a.abs_diff(b);
    (d == 1) as u32 + (d == m) as u32
}

fn check_sites(sites: &[usize], m: usize) -> Result<Vec<usize>> {
    let s = StrictPartition::from_sites(sites)?;
    if s.parts().first().is_some_and(|&p| p > m) {
        return Err(Error::InvalidParameter(format!("site beyond M = {m}")));
    }
    Ok(s.parts().to_vec())
}

type Dist = BTreeMap<Vec<usize>, BigInt>;

// One tick: some walker moves along a bond onto an empty site.
fn dp_step(dist: &Dist, m: usize) -> Dist {
    let mut next = Dist::new();
    for (state, w) in dist {
        for r in 0..state.len() {
            for t in 0..=m {
                let h = hopping_weight(state[r], t, m);
                if h == 0 || (t != state[r] && state.contains(&t)) {
                    continue;
                }
                let mut s = state.clone();
                s[r] = t;
                s.sort_unstable_by(|a, b| b.cmp(a));
                *next.entry(s).or_insert_with(BigInt::zero) += w * BigInt::from(h);
            }
        }
    }
    next
}

fn dp_run(start: Dist, steps: usize, m: usize) -> Dist {
    (0..steps).fold(start, |d, _| dp_step(&d, m))
}

/// `|P_K(l -> j)|` by dynamic programming over collision-free configurations.
pub fn random_turns_dp(l: &[usize], j: &[usize], k: usize, m: usize) -> Result<BigInt> {
    let (l, j) = (check_sites(l, m)?, check_sites(j, m)?);
    if l.len() != j.len() {
        return Err(Error::SizeMismatch);
    }
    let d = dp_run(Dist::from([(l, BigInt::one())]), k, m);
    Ok(d.get(&j).cloned().unwrap_or_default())
}

/// `|P_K(l -> j)|` for `K = 0..=k_max` from a single DP run.
pub fn random_turns_series(l: &[usize], j: &[usize], k_max: usize, m: usize) -> Result<Vec<BigInt>> {
    let (l, j) = (check_sites(l, m)?, check_sites(j, m)?);
    if l.len() != j.len() {
        return Err(Error::SizeMismatch);
    }
    let mut d = Dist::from([(l, BigInt::one())]);
    let mut out = Vec::with_capacity(k_max + 1);
    for step in 0..=k_max {
        out.push(d.get(&j).cloned().unwrap_or_default());
        if step < k_max {
            d = dp_step(&d, m);
        }
    }
    Ok(out)
}

/// The `N`-particle sector of `-H`: basis bitmasks (increasing) and sparse
/// columns of `(row, weight)` pairs.
pub fn sector_hopping(m: usize, n: usize) -> Result<(Vec<u128>, Vec<Vec<(usize, i64)>>)> {
    if m >= 128 {
        return Err(Error::InvalidParameter("bitmask basis needs M < 128".into()));
    }
    let basis: Vec<u128> = sector_basis(m + 1, n);
    let index: std::collections::HashMap<u128, usize> = basis.iter().enumerate().map(|(i, &b)| (b, i)).collect();
    let cols = basis
        .iter()
        .map(|&s| {
            let mut out = Vec::new();
            for a in 0..=m {
                for b in 0..=m {
                    let w = hopping_weight(a, b, m) as i64;
                    if w == 0 || s & (1 << b) == 0 {
                        continue;
                    }
                    // s_a^- s_b^+ : empty b, fill a (a == b leaves s unchanged).
                    let t = s & !(1u128 << b);
                    if t & (1 << a) != 0 {
                        continue;
                    }
                    out.push((index[&(t | (1 << a))], w));
                }
            }
            out
        })
        .collect();
    Ok((basis, cols))
}

fn mask(sites: &[usize]) -> u128 {
    sites.iter().fold(0u128, |a, &s| a | (1u128 << s))
}

/// `<j| (-H)^K |l>` with `-H = sum Delta_nm s_n^- s_m^+` as a sparse
/// matrix on the `N`-particle sector (bitmask basis).
pub fn random_turns_matrix(l: &[usize], j: &[usize], k: usize, m: usize) -> Result<BigInt> {
    let (l, j) = (check_sites(l, m)?, check_sites(j, m)?);
    if l.len() != j.len() {
        return Err(Error::SizeMismatch);
    }
    let (basis, cols) = sector_hopping(m, l.len())?;
    let index: std::collections::HashMap<u128, usize> = basis.iter().enumerate().map(|(i, &b)| (b, i)).collect();
    let mut v = vec![BigInt::zero(); basis.len()];
    v[index[&mask(&l)]] = BigInt::one();
    for _ in 0..k {
        let mut nv = vec![BigInt::zero(); basis.len()];
        for (c, x) in v.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for &(r, w) in &cols[c] {
                nv[r] += x * w;
            }
        }
        v = nv;
    }
    Ok(v[index[&mask(&j)]].clone())
}

/// Every `n`-subset of `0..sites` as a bitmask, in increasing order.
pub fn sector_basis(sites: usize, n: usize) -> Vec<u128> {
    let mut out = Vec::new();
    fn rec(start: usize, sites: usize, left: usize, acc: u128, out: &mut Vec<u128>) {
        if left == 0 {
            out.push(acc);
            return;
        }
        for s in start..=sites - left {
            rec(s + 1, sites, left - 1, acc | (1 << s), out);
        }
    }
    if n <= sites {
        rec(0, sites, n, 0, &mut out);
    }
    out.sort_unstable();
    out
}

fn mat_mul(a: &[Vec<BigInt>], b: &[Vec<BigInt>]) -> Vec<Vec<BigInt>> {
    let n = a.len();
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| (0..n).fold(BigInt::zero(), |s, k| s + &a[i][k] * &b[k][j]))
                .collect()
        })
        .collect()
}

/// Powers `Delta^0, ..., Delta^K` of the hopping matrix with the wrap bond
/// weighted by `sign`.
fn delta_powers(m: usize, k: usize, sign: i64) -> Vec<Vec<Vec<BigInt>>> {
    let d: Vec<Vec<BigInt>> = (0..=m)
        .map(|a| {
            (0..=m)
                .map(|b| {
                    let dist = a.abs_diff(b);
                    BigInt::from((dist == 1) as i64 + sign * (dist == m) as i64)
                })
                .collect()
        })
        .collect();
    let id: Vec<Vec<BigInt>> = (0..=m)
        .map(|a| (0..=m).map(|b| BigInt::from((a == b) as i64)).collect())
        .collect();
    let mut out = vec![id];
    for _ in 0..k {
        let next = mat_mul(out.last().unwrap(), &d);
        out.push(next);
    }
    out
}

/// `(Delta^K)_{jl}` for a single walker.
pub fn adjacency_power(j: usize, l: usize, k: usize, m: usize) -> BigInt {
    delta_powers(m, k, 1)[k][j][l].clone()
}

fn compositions(total: usize, parts: usize, f: &mut dyn FnMut(&[usize])) {
    fn rec(left: usize, parts: usize, acc: &mut Vec<usize>, f: &mut dyn FnMut(&[usize])) {
        if acc.len() + 1 == parts {
            acc.push(left);
            f(acc);
            acc.pop();
            return;
        }
        for v in 0..=left {
            acc.push(v);
            rec(left - v, parts, acc, f);
            acc.pop();
        }
    }
    if parts == 0 {
        if total == 0 {
            f(&[]);
        }
        return;
    }
    rec(total, parts, &mut Vec::with_capacity(parts), f);
}

/// The multinomial determinant sum
/// `sum_{|k|=K} K!/(k_1!...k_N!) det((Delta^{k_r})_{j_r, l_s})`.
///
/// On a ring a particle crossing the wrap bond passes the other `N - 1`
/// walkers, so the single-walker matrix carries the fermionic sign
/// `(-1)^(N-1)` on that bond.
pub fn random_turns_kst(l: &[usize], j: &[usize], k: usize, m: usize) -> Result<BigInt> {
    let (l, j) = (check_sites(l, m)?, check_sites(j, m)?);
    if l.len() != j.len() {
        return Err(Error::SizeMismatch);
    }
    let n = l.len();
    let sign = if n % 2 == 1 { 1 } else { -1 };
    let pw = delta_powers(m, k, sign);
    let fact: Vec<BigInt> = (0..=k)
        .scan(BigInt::one(), |a, i| {
            if i > 0 {
                *a *= BigInt::from(i);
            }
            Some(a.clone())
        })
        .collect();
    let mut total = BigInt::zero();
    let mut err = None;
    compositions(k, n, &mut |ks| {
        let coef = ks.iter().fold(fact[k].clone(), |a, &v| a / &fact[v]);
        let mat: Vec<Vec<BigInt>> = (0..n)
            .map(|r| (0..n).map(|s| pw[ks[r]][j[r]][l[s]].clone()).collect())
            .collect();
        match det(mat) {
            Ok(d) => total += coef * d,
            Err(e) => err = Some(e),
        }
    });
    match err {
        Some(e) => Err(e),
        None => Ok(total),
    }
}

/// `|P_K(l -> j)|`, computed by the configuration DP and by the sector
/// matrix power and asserted equal; for one walker also against `Delta^K`.
pub fn random_turns_count(l: &[usize], j: &[usize], k: usize, m: usize) -> Result<BigInt> {
    let dp = random_turns_dp(l, j, k, m)?;
    let mp = random_turns_matrix(l, j, k, m)?;
    if dp != mp {
        return Err(Error::IdentityMismatch(format!(
            "random turns: DP {dp} vs matrix power {mp}"
        )));
    }
    if l.len() == 1 {
        let a = adjacency_power(j[0], l[0], k, m);
        if a != dp {
            return Err(Error::IdentityMismatch(format!("random turns: DP {dp} vs Delta^K {a}")));
        }
    }
    Ok(dp)
}

/// `|P_{K1+K2}(l ->_m j)|`: `K1` ticks from `l`, the projector forbidding
/// sites `0..m`, then `K2` ticks. Computed by gluing over intermediate
/// configurations and by a DP with the projector applied, asserted equal.
pub fn bottleneck_count(l: &[usize], j: &[usize], k1: usize, k2: usize, m: usize, sites_m: usize) -> Result<BigInt> {
    let (ls, js) = (check_sites(l, sites_m)?, check_sites(j, sites_m)?);
    if ls.len() != js.len() {
        return Err(Error::SizeMismatch);
    }
    if m > sites_m {
        return Err(Error::InvalidParameter("bottleneck beyond the chain".into()));
    }
    let n = ls.len();
    // Gluing sum over rho + delta_N with all sites in m..=M.
    let mut glued = BigInt::zero();
    if sites_m + 1 >= m + n {
        for rho in iter_partitions_in_box(n, sites_m + 1 - n - m, 0) {
            let mid: Vec<usize> = rho.to_strict().parts().iter().map(|p| p + m).collect();
            let a = random_turns_dp(&ls, &mid, k1, sites_m)?;
            if a.is_zero() {
                continue;
            }
            glued += a * random_turns_dp(&mid, &js, k2, sites_m)?;
        }
    }
    let first = dp_run(Dist::from([(ls, BigInt::one())]), k1, sites_m);
    let projected: Dist = first.into_iter().filter(|(s, _)| s.iter().all(|&x| x >= m)).collect();
    let direct = dp_run(projected, k2, sites_m).get(&js).cloned().unwrap_or_default();
    if direct != glued {
        return Err(Error::IdentityMismatch(format!(
            "bottleneck: gluing {glued} vs DP {direct}"
        )));
    }
    Ok(direct)
}

/// Every random-turns trajectory from `l` to `j` in `K` ticks, one nest per
/// move sequence (a doubled bond at `M = 1` yields two nests).
pub fn enumerate_random_turns(l: &[usize], j: &[usize], k: usize, m: usize) -> Result<Vec<PathNest>> {
    let (ls, js) = (check_sites(l, m)?, check_sites(j, m)?);
    if ls.len() != js.len() {
        return Err(Error::SizeMismatch);
    }
    let target: Vec<usize> = js.clone();
    let mut out = Vec::new();
    fn rec(traj: &mut Vec<Vec<usize>>, left: usize, m: usize, target: &[usize], out: &mut Vec<Vec<Vec<usize>>>) {
        let cur = traj.last().unwrap().clone();
        if left == 0 {
            let mut s = cur;
            s.sort_unstable_by(|a, b| b.cmp(a));
            if s == target {
                out.push(traj.clone());
            }
            return;
        }
        for r in 0..cur.len() {
            for t in 0..=m {
                let h = hopping_weight(cur[r], t, m);
                if h == 0 || (t != cur[r] && cur.contains(&t)) {
                    continue;
                }
                let mut nxt = cur.clone();
                nxt[r] = t;
                for _ in 0..h {
                    traj.push(nxt.clone());
                    rec(traj, left - 1, m, target, out);
                    traj.pop();
                }
            }
        }
    }
    let mut trajs = Vec::new();
    rec(&mut vec![ls.clone()], k, m, &target, &mut trajs);
    for t in trajs {
        let mut nest = PathNest::empty(NestKind::RandomTurns, ls.len());
        nest.height = m;
        nest.trajectory = t;
        out.push(nest);
    }
    Ok(out)
}
