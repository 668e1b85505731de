//! Subcommand handlers. Each returns the rendered output and an exit code.

use std::path::Path;
use std::str::FromStr;
use std::time::Instant;

use num_rational::BigRational;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::json;

use watermelon::asymptotics::{
    leading_asymptote, mehta_integral, AsymptoteKind, AsymptoteParams, AsymptoteReport, MehtaIntegral,
};
use watermelon::draw::{figure2_star, render_svg, write_scenes, SceneSpec};
use watermelon::partitions::{iter_plane_partitions, macmahon_count, zq_product};
use watermelon::paths::{
    bottleneck_count, enumerate_conj_stars, enumerate_random_turns, enumerate_stars, enumerate_watermelons, path_gf,
    random_turns_dp, random_turns_kst, random_turns_matrix, NestFamily, WatermelonSpec,
};
use watermelon::schur::{principal_specialization, schur_eval, Specialization};
use watermelon::xx0::{self, ChainConfig};
use watermelon::{Error, QPoly};

use crate::verify::{self, IdentityReport, Pins, Status};
use crate::{AmpMethod, Cli, Command, DrawArgs, DrawKind, Format, Kind, Spec, WatermelonArgs};

#[derive(Debug)]
pub struct CliError {
    pub code: u8,
    pub message: String,
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::IdentityMismatch(_) => 3,
            ref e if verify::is_validation(e) => 2,
            _ => 1,
        };
        CliError {
            code,
            message: e.to_string(),
        }
    }
}

fn invalid(message: impl Into<String>) -> CliError {
    CliError {
        code: 2,
        message: message.into(),
    }
}

type Out = Result<(String, u8), CliError>;

/// Serialize, parse back with the same schema, and insist on identical text.
fn emit<T: Serialize + DeserializeOwned>(
    value: &T,
    format: Format,
    text: impl FnOnce() -> String,
) -> Result<String, CliError> {
    match format {
        Format::Text => Ok(text()),
        Format::Json => {
            let fail = |e: serde_json::Error| CliError {
                code: 1,
                message: format!("json: {e}"),
            };
            let s = serde_json::to_string(value).map_err(fail)?;
            let back: T = serde_json::from_str(&s).map_err(fail)?;
            let again = serde_json::to_string(&back).map_err(fail)?;
            if again != s {
                return Err(CliError {
                    code: 1,
                    message: format!("json output does not round-trip: {s} vs {again}"),
                });
            }
            Ok(s + "\n")
        }
    }
}

#[derive(Serialize, Deserialize)]
pub struct CountOut {
    pub l: usize,
    pub n: usize,
    pub k: usize,
    pub count: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub brute: Option<String>,
}

#[derive(Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SchurValue {
    Poly(QPoly),
    Rational(String),
}

#[derive(Serialize, Deserialize)]
pub struct SchurOut {
    pub lambda: Vec<usize>,
    pub n: usize,
    pub value: SchurValue,
}

#[derive(Serialize, Deserialize)]
pub struct VerifyOut {
    pub seed: u64,
    pub small: bool,
    pub status: Status,
    pub reports: Vec<IdentityReport>,
}

#[derive(Serialize, Deserialize)]
pub struct WatermelonOut {
    pub params: WatermelonSpec,
    pub nests: usize,
    pub count: String,
    pub gf: QPoly,
}

#[derive(Serialize, Deserialize)]
pub struct WalksOut {
    pub from: Vec<usize>,
    pub to: Vec<usize>,
    pub k: usize,
    pub m: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k2: Option<usize>,
    pub bottleneck: usize,
    pub count: String,
}

/// Shared schema of `amplitude`, `persistence` and `autocorr`.
#[derive(Serialize, Deserialize)]
pub struct NumericOut {
    pub params: serde_json::Value,
    pub value: f64,
    pub abs_err: f64,
    pub wall_time_ms: f64,
}

#[derive(Serialize, Deserialize)]
pub struct AsymptoticsOut {
    pub params: AsymptoteParams,
    pub kind: AsymptoteKind,
    pub mehta: MehtaIntegral,
    pub status: String,
    pub report: Option<AsymptoteReport>,
}

#[derive(Serialize, Deserialize)]
pub struct DrawOut {
    pub files: Vec<String>,
}

pub fn dispatch(cli: &Cli) -> Out {
    let g = &cli.global;
    let f = g.format;
    match &cli.command {
        Command::Zq { l, n, k } => {
            let z = zq_product(*l, *n, *k);
            Ok((emit(&z, f, || format!("{}\n", z.to_text()))?, 0))
        }
        Command::Count { l, n, k, brute } => {
            let count = macmahon_count(*l, *n, *k);
            let b = brute.then(|| iter_plane_partitions(*l, *n, *k).count().to_string());
            let out = CountOut {
                l: *l,
                n: *n,
                k: *k,
                count: count.to_string(),
                brute: b.clone(),
            };
            let code = match &b {
                Some(b) if *b != out.count => 3,
                _ => 0,
            };
            Ok((
                emit(&out, f, || match &b {
                    Some(b) => format!("A({l},{n},{k}) = {count} (enumeration {b})\n"),
                    None => format!("A({l},{n},{k}) = {count}\n"),
                })?,
                code,
            ))
        }
        Command::Schur { lambda, n, at, points } => {
            let value = if points.is_empty() {
                let n = n.ok_or_else(|| invalid("--N is required without --points"))?;
                let mode = match at {
                    Spec::QN => Specialization::QN,
                    Spec::QNOverQ => Specialization::QNOverQ,
                    Spec::InvQN => Specialization::InvQN,
                };
                SchurValue::Poly(principal_specialization(lambda, n, mode)?)
            } else {
                let x = points
                    .iter()
                    .map(|s| BigRational::from_str(s).map_err(|e| invalid(format!("bad point {s}: {e}"))))
                    .collect::<Result<Vec<_>, _>>()?;
                if n.is_some_and(|n| n != x.len()) {
                    return Err(invalid("--N disagrees with the number of points"));
                }
                let mut lam = lambda.clone();
                if lam.len() > x.len() {
                    if lam[x.len()..].iter().any(|&p| p > 0) {
                        return Err(invalid("partition is longer than the number of points"));
                    }
                    lam.truncate(x.len());
                }
                lam.resize(x.len(), 0);
                SchurValue::Rational(schur_eval(&lam, &x)?.to_string())
            };
            let n = n.unwrap_or(points.len());
            let out = SchurOut {
                lambda: lambda.clone(),
                n,
                value,
            };
            Ok((
                emit(&out, f, || match &out.value {
                    SchurValue::Poly(p) => format!("{}\n", p.to_text()),
                    SchurValue::Rational(r) => format!("{r}\n"),
                })?,
                0,
            ))
        }
        Command::Verify {
            identity,
            n,
            l,
            m,
            k,
            ell,
            small,
            verbose,
        } => {
            let pins = Pins {
                n: *n,
                l: *l,
                m: *m,
                k: *k,
                ell: *ell,
                small: *small,
                seed: g.seed,
            };
            let reports = verify::run(identity, &pins)?;
            let failed = reports.iter().any(|r| r.status == Status::Mismatch);
            let status = if failed {
                Status::Mismatch
            } else if reports.iter().all(|r| r.status == Status::ExactMatch) {
                Status::ExactMatch
            } else {
                Status::Match
            };
            let out = VerifyOut {
                seed: g.seed,
                small: *small,
                status,
                reports,
            };
            let text = || {
                let mut s = String::new();
                for r in &out.reports {
                    s += &format!("{} {} ({} cases)\n", r.identity, r.status.label(), r.cases.len());
                    for c in &r.cases {
                        if *verbose || c.status == Status::Mismatch {
                            let d = c.detail.as_deref().unwrap_or("");
                            s += &format!("  {} {} {d}\n", c.params, c.status.label());
                        }
                    }
                }
                s
            };
            Ok((emit(&out, f, text)?, if failed { 3 } else { 0 }))
        }
        Command::Watermelon(a) => watermelon(a, f),
        Command::Walks {
            from,
            to,
            k,
            m,
            k2,
            bottleneck,
        } => {
            let count = match k2 {
                Some(k2) => bottleneck_count(from, to, *k, *k2, *bottleneck, *m)?,
                None => {
                    let dp = random_turns_dp(from, to, *k, *m)?;
                    let mp = random_turns_matrix(from, to, *k, *m)?;
                    let ks = random_turns_kst(from, to, *k, *m)?;
                    if dp != mp || dp != ks {
                        return Err(Error::IdentityMismatch(format!("walks: dp {dp}, matrix {mp}, kst {ks}")).into());
                    }
                    dp
                }
            };
            let out = WalksOut {
                from: from.clone(),
                to: to.clone(),
                k: *k,
                m: *m,
                k2: *k2,
                bottleneck: *bottleneck,
                count: count.to_string(),
            };
            Ok((emit(&out, f, || format!("{count}\n"))?, 0))
        }
        Command::Amplitude { from, to, t, m, method } => {
            let start = Instant::now();
            let (value, abs_err, degenerate) = match method {
                AmpMethod::Det => {
                    let a = xx0::amplitude(to, from, *t, *m)?;
                    (a.value, a.abs_err, a.degenerate_geometry)
                }
                AmpMethod::Spectral => (xx0::amplitude_spectral(to, from, *t, *m)?, 0.0, *m <= 2),
                AmpMethod::Series => (xx0::amplitude_series(to, from, *t, *m)?, 0.0, *m <= 2),
            };
            let params = json!({
                "from": from, "to": to, "t": t, "M": m,
                "method": format!("{method:?}").to_lowercase(),
                "degenerate_geometry": degenerate,
            });
            numeric(params, value.re, abs_err.max(value.im.abs()), start, f)
        }
        Command::Persistence { n, m, wall, t } => {
            let start = Instant::now();
            let cfg = ChainConfig::new(*m, *n)?;
            let c = xx0::persistence(&cfg, *wall, *t, g.budget)?;
            let params = json!({"N": n, "M": m, "n": wall, "t": t, "degenerate_geometry": cfg.degenerate_geometry()});
            numeric(params, c.value, c.abs_err.max(c.imag.abs()), start, f)
        }
        Command::Autocorr {
            n,
            m,
            wall,
            mproj,
            t1,
            t2,
        } => {
            let start = Instant::now();
            let cfg = ChainConfig::new(*m, *n)?;
            let c = xx0::autocorrelation(&cfg, *wall, *mproj, *t1, *t2, g.budget)?;
            let params = json!({
                "N": n, "M": m, "n": wall, "m": mproj, "t1": t1, "t2": t2,
                "degenerate_geometry": cfg.degenerate_geometry(),
            });
            numeric(params, c.value, c.abs_err.max(c.imag.abs()), start, f)
        }
        Command::Asymptotics {
            kind,
            n,
            m,
            wall,
            mproj,
            tmin,
            tmax,
            points,
        } => {
            let kind = match kind {
                Kind::Amplitude => AsymptoteKind::Amplitude,
                Kind::Persistence => AsymptoteKind::Persistence,
                Kind::TwoTime => AsymptoteKind::TwoTime,
                Kind::Autocorr => AsymptoteKind::Autocorr,
            };
            let mut p = AsymptoteParams::new(*m, *n);
            p.wall = *wall;
            p.mproj = *mproj;
            p.points = *points;
            p.budget = g.budget;
            if tmin.is_some() || tmax.is_some() {
                let (a, b) = watermelon::asymptotics::default_window(*m);
                p.window = Some((tmin.unwrap_or(a), tmax.unwrap_or(b)));
            }
            let mehta = mehta_integral(*n)?;
            let (status, report) = match leading_asymptote(kind, &p) {
                Ok(r) => ("ok".to_string(), Some(r)),
                Err(Error::RegimeTooSmall) => ("regime-too-small".to_string(), None),
                Err(e) => return Err(e.into()),
            };
            let out = AsymptoticsOut {
                params: p,
                kind,
                mehta,
                status,
                report,
            };
            let text = || match &out.report {
                None => format!("{kind:?}: fit window collides with the recurrence time (regime too small)\n"),
                Some(r) => format!(
                    "kind          predicted_exponent  fitted_exponent  predicted_amplitude  amplitude_ratio  window\n\
                     {:<13} {:<19.4} {:<16.4} {:<20.6e} {:<16.4} [{:.1}, {:.1}]\n\
                     log I_N = {:.6}, estimate {:.6}\n",
                    format!("{kind:?}").to_lowercase(),
                    r.predicted_exponent,
                    r.fitted_exponent,
                    r.predicted_value,
                    r.amplitude_ratio,
                    r.fit_window.0,
                    r.fit_window.1,
                    out.mehta.log_value,
                    out.mehta.barnes_estimate,
                ),
            };
            Ok((emit(&out, f, text)?, 0))
        }
        Command::Draw(a) => draw(a, &g.out, f),
    }
}

fn numeric(params: serde_json::Value, value: f64, abs_err: f64, start: Instant, f: Format) -> Out {
    let out = NumericOut {
        params,
        value,
        abs_err,
        wall_time_ms: start.elapsed().as_secs_f64() * 1e3,
    };
    Ok((emit(&out, f, || format!("{value:.16e} +- {abs_err:.1e}\n"))?, 0))
}

fn watermelon(a: &WatermelonArgs, f: Format) -> Out {
    let spec = WatermelonSpec::new(a.n, a.l.unwrap_or(a.n), a.calm, a.lower, a.delta)?;
    let nests = enumerate_watermelons(&spec).len();
    let gf = path_gf(&NestFamily::Watermelons(spec))?;
    let count = gf.eval_at_one();
    if count != nests.into() {
        return Err(Error::IdentityMismatch(format!("{nests} nests but W(1) = {count}")).into());
    }
    let out = WatermelonOut {
        params: spec,
        nests,
        count: count.to_string(),
        gf,
    };
    Ok((
        emit(&out, f, || format!("count {}\nW_q = {}\n", out.count, out.gf.to_text()))?,
        0,
    ))
}

fn draw(a: &DrawArgs, dir: &Path, f: Format) -> Out {
    let need = |v: Option<usize>, name: &str| v.ok_or_else(|| invalid(format!("--{name} is required")));
    let nests = match a.what {
        DrawKind::Watermelon => {
            let n = need(a.n, "N")?;
            let spec = WatermelonSpec::new(n, a.l.unwrap_or(n), need(a.calm, "Mcal")?, a.lower, a.delta)?;
            enumerate_watermelons(&spec).into_iter().map(|(w, _)| w).collect()
        }
        DrawKind::Star => enumerate_stars(&a.lambda, need(a.n, "N")?, a.k)?,
        DrawKind::ConjStar => enumerate_conj_stars(&a.lambda, need(a.calm, "Mcal")?, need(a.n, "N")?, a.k)?,
        DrawKind::Walks => enumerate_random_turns(&a.from, &a.to, need(a.steps, "K")?, need(a.m, "M")?)?,
        DrawKind::Figure2 => vec![figure2_star()],
        DrawKind::Scene => Vec::new(),
    };
    let mut scenes: Vec<SceneSpec> = if a.what == DrawKind::Scene {
        let path = a
            .spec
            .as_ref()
            .ok_or_else(|| invalid("--spec is required for draw scene"))?;
        let text = std::fs::read_to_string(path).map_err(|e| CliError {
            code: 1,
            message: e.to_string(),
        })?;
        vec![serde_json::from_str(&text).map_err(|e| invalid(format!("scene: {e}")))?]
    } else {
        nests.into_iter().map(SceneSpec::new).collect()
    };
    if a.what != DrawKind::Scene {
        for s in &mut scenes {
            s.cell_px = a.cell_px;
            s.labels = !a.no_labels;
        }
    }
    if scenes.is_empty() {
        return Err(invalid("the family is empty"));
    }
    let name = match a.what {
        DrawKind::Star => "star",
        DrawKind::ConjStar => "conj_star",
        DrawKind::Watermelon => "watermelon",
        DrawKind::Walks => "walks",
        DrawKind::Figure2 => "figure2",
        DrawKind::Scene => "scene",
    };
    let prefix = a.prefix.clone().unwrap_or_else(|| name.to_string());
    let files = if a.all {
        write_scenes(&scenes, dir, &prefix)?
    } else {
        let scene = scenes
            .get(a.index.wrapping_sub(1))
            .ok_or_else(|| invalid(format!("index {} outside 1..={}", a.index, scenes.len())))?;
        let svg = render_svg(scene)?;
        std::fs::create_dir_all(dir).map_err(|e| CliError {
            code: 1,
            message: e.to_string(),
        })?;
        let path = dir.join(format!("{prefix}_{}.svg", a.index));
        std::fs::write(&path, svg).map_err(|e| CliError {
            code: 1,
            message: e.to_string(),
        })?;
        vec![path]
    };
    let out = DrawOut {
        files: files.iter().map(|p| p.display().to_string()).collect(),
    };
    Ok((
        emit(&out, f, || out.files.iter().map(|p| format!("{p}\n")).collect())?,
        0,
    ))
}
