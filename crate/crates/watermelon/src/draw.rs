//! Deterministic SVG pictures of path nests.
//!
//! Lattice point `(x, y)` sits at pixel `(pad + x c, pad + (rows - y) c)` for
//! cell size `c`, so paths grow up and to the right. Random-turns nests put
//! time on the horizontal axis. Every float is printed with two decimals and
//! nothing depends on the clock, so equal scenes give equal bytes.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::paths::{enumerate_stars, NestKind, PathNest};

pub const DEFAULT_PALETTE: [&str; 8] = [
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf", "#8c564b", "#e377c2",
];

/// A nest plus everything needed to draw it.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SceneSpec {
    pub nest: PathNest,
    /// `(cols, rows)`: lattice lines `x = 0..=cols`, `y = 0..=rows`.
    pub grid: (usize, usize),
    pub cell_px: usize,
    pub palette: Vec<String>,
    /// How many times the palette may be cycled before it runs out.
    #[serde(default = "one")]
    pub repeats: usize,
    /// Start/end markers, `mu` ticks and the dissection line.
    pub labels: bool,
}

fn one() -> usize {
    1
}

impl SceneSpec {
    /// Default styling with a grid that covers the nest.
    pub fn new(nest: PathNest) -> Self {
        let grid = auto_grid(&nest);
        SceneSpec {
            nest,
            grid,
            cell_px: 24,
            palette: DEFAULT_PALETTE.iter().map(|s| s.to_string()).collect(),
            repeats: 1,
            labels: true,
        }
    }
}

/// Grid large enough for the nest. Watermelons and conjugate stars get a box
/// fixed by `N` and `M`, so a whole family shares one canvas.
pub fn auto_grid(nest: &PathNest) -> (usize, usize) {
    let pts = nest.points();
    let max_x = pts.iter().flatten().map(|p| p.0).max().unwrap_or(0).max(0) as usize;
    let max_y = pts.iter().flatten().map(|p| p.1).max().unwrap_or(0).max(0) as usize;
    let n = nest.n;
    match nest.kind {
        NestKind::Watermelon | NestKind::ConjStar if n > 0 => ((2 * n).max(max_x), (nest.height + n - 1).max(max_y)),
        NestKind::Star => ((nest.deviation + n + 1).max(max_x), max_y.max(1)),
        NestKind::RandomTurns => (max_x.max(1), nest.height.max(max_y)),
        _ => (max_x.max(1), max_y.max(1)),
    }
}

fn f2(v: f64) -> String {
    format!("{v:.2}")
}

/// Render one scene as an SVG 1.1 document.
pub fn render_svg(scene: &SceneSpec) -> Result<String> {
    if scene.cell_px < 4 {
        return Err(Error::InvalidParameter("cell_px must be at least 4".into()));
    }
    let nest = &scene.nest;
    let paths = if nest.n == 0 { Vec::new() } else { nest.points() };
    if !paths.is_empty() {
        nest.check()?;
    }
    if paths.len() > scene.palette.len() * scene.repeats {
        return Err(Error::PaletteExhausted(paths.len()));
    }
    let (cols, rows) = scene.grid;
    if paths
        .iter()
        .flatten()
        .any(|&(x, y)| x < 0 || y < 0 || x as usize > cols || y as usize > rows)
    {
        return Err(Error::InconsistentNest("nest leaves the grid".into()));
    }

    let c = scene.cell_px as f64;
    let pad = 2.0 * c;
    let width = 2.0 * pad + cols as f64 * c;
    let height = 2.0 * pad + rows as f64 * c;
    let px = |x: i64| pad + x as f64 * c;
    let py = |y: i64| pad + (rows as i64 - y) as f64 * c;
    let font = f2((c * 0.5).max(6.0));
    let sub = f2((c * 0.35).max(4.0));
    let random = nest.kind == NestKind::RandomTurns;

    let mut s = String::new();
    let _ = writeln!(s, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{w}" height="{h}" viewBox="0 0 {w} {h}">"#,
        w = f2(width),
        h = f2(height)
    );
    let _ = writeln!(
        s,
        r#"<rect x="0.00" y="0.00" width="{}" height="{}" fill="white"/>"#,
        f2(width),
        f2(height)
    );

    // Dashed lattice lines with axis labels.
    let _ = writeln!(
        s,
        r##"<g class="grid" stroke="#b0b0b0" stroke-width="1.00" stroke-dasharray="3.00,3.00">"##
    );
    for x in 0..=cols as i64 {
        let _ = writeln!(
            s,
            r#"<line x1="{0}" y1="{1}" x2="{0}" y2="{2}"/>"#,
            f2(px(x)),
            f2(py(0)),
            f2(py(rows as i64))
        );
    }
    for y in 0..=rows as i64 {
        let _ = writeln!(
            s,
            r#"<line x1="{1}" y1="{0}" x2="{2}" y2="{0}"/>"#,
            f2(py(y)),
            f2(px(0)),
            f2(px(cols as i64))
        );
    }
    let _ = writeln!(s, "</g>");
    let _ = writeln!(
        s,
        r#"<g class="axes" font-family="serif" font-size="{font}" text-anchor="middle">"#
    );
    let below = f2(py(0) + 0.9 * c);
    if random {
        for t in 0..=cols as i64 {
            let _ = writeln!(s, r#"<text x="{}" y="{below}">{t}</text>"#, f2(px(t)));
        }
        let _ = writeln!(s, r#"<text x="{}" y="{below}">t</text>"#, f2(px(cols as i64) + 0.9 * c));
        for y in 0..=rows as i64 {
            let _ = writeln!(
                s,
                r#"<text x="{}" y="{}">{y}</text>"#,
                f2(px(0) - 0.6 * c),
                f2(py(y) + 0.2 * c)
            );
        }
    } else {
        for x in 1..=cols as i64 {
            let _ = writeln!(
                s,
                r#"<text x="{}" y="{below}">x<tspan baseline-shift="sub" font-size="{sub}">{x}</tspan></text>"#,
                f2(px(x))
            );
        }
    }
    let _ = writeln!(s, "</g>");

    if scene.labels && !paths.is_empty() && !random {
        decorate(&mut s, nest, &paths, &px, &py, c, (&font, &sub));
    }

    let _ = writeln!(
        s,
        r#"<g class="paths" fill="none" stroke-width="{}" stroke-linejoin="round">"#,
        f2(c / 8.0)
    );
    for (i, p) in paths.iter().enumerate() {
        let colour = &scene.palette[i % scene.palette.len()];
        let pts: Vec<String> = p.iter().map(|&(x, y)| format!("{},{}", f2(px(x)), f2(py(y)))).collect();
        let _ = writeln!(
            s,
            r#"<polyline class="path" stroke="{colour}" points="{}"/>"#,
            pts.join(" ")
        );
    }
    let _ = writeln!(s, "</g>");
    let _ = writeln!(s, "</svg>");
    Ok(s)
}

// Start/end markers, mu ticks and the dissection line.
fn decorate(
    s: &mut String,
    nest: &PathNest,
    paths: &[Vec<(i64, i64)>],
    px: &dyn Fn(i64) -> f64,
    py: &dyn Fn(i64) -> f64,
    c: f64,
    (font, sub): (&str, &str),
) {
    let r = f2(c / 6.0);
    let glued = matches!(nest.kind, NestKind::Watermelon | NestKind::ConjStar);
    let n = nest.n as i64;
    if glued {
        let _ = writeln!(
            s,
            r##"<line class="dissection" x1="{0}" y1="{1}" x2="{0}" y2="{2}" stroke="#404040" stroke-width="1.50"/>"##,
            f2(px(n)),
            f2(py(0) + 0.3 * c),
            f2(py(paths.iter().flatten().map(|p| p.1).max().unwrap_or(0)) - 0.3 * c)
        );
    }
    let _ = writeln!(s, r#"<g class="labels" font-family="serif" font-size="{font}">"#);
    for (i, p) in paths.iter().enumerate() {
        let (first, last) = (p[0], *p.last().unwrap());
        if nest.kind != NestKind::ConjStar {
            let _ = writeln!(
                s,
                r#"<circle cx="{}" cy="{}" r="{r}" fill="black"/>"#,
                f2(px(first.0)),
                f2(py(first.1))
            );
            let _ = writeln!(
                s,
                r#"<text x="{}" y="{}" text-anchor="end">C<tspan baseline-shift="sub" font-size="{sub}">{}</tspan></text>"#,
                f2(px(first.0) - 0.25 * c),
                f2(py(first.1) + 0.45 * c),
                i + 1
            );
        }
        if glued {
            let _ = writeln!(
                s,
                r#"<circle cx="{}" cy="{}" r="{r}" fill="black"/>"#,
                f2(px(last.0)),
                f2(py(last.1))
            );
            let _ = writeln!(
                s,
                r#"<text x="{}" y="{}">B<tspan baseline-shift="sub" font-size="{sub}">{}</tspan></text>"#,
                f2(px(last.0) + 0.25 * c),
                f2(py(last.1) - 0.25 * c),
                i + 1
            );
        }
        if let Some(&mu) = nest.gluing.get(i) {
            let line = if nest.kind == NestKind::Star {
                nest.deviation as i64 + n
            } else {
                n
            };
            let y = py(mu as i64);
            let _ = writeln!(
                s,
                r#"<line class="mu" x1="{}" y1="{y}" x2="{}" y2="{y}" stroke="black" stroke-width="1.50"/>"#,
                f2(px(line) - 0.2 * c),
                f2(px(line) + 0.2 * c),
                y = f2(y)
            );
            let _ = writeln!(
                s,
                r#"<text x="{}" y="{}">μ<tspan baseline-shift="sub" font-size="{sub}">{}</tspan></text>"#,
                f2(px(line) + 0.3 * c),
                f2(y + 0.2 * c),
                i + 1
            );
        }
    }
    let _ = writeln!(s, "</g>");
}

/// Vertical unit segments of the nest, keyed by abscissa.
pub fn vertical_segments(nest: &PathNest) -> BTreeMap<i64, usize> {
    let mut out = BTreeMap::new();
    for p in nest.points() {
        for w in p.windows(2) {
            if w[0].0 == w[1].0 && w[1].1 != w[0].1 {
                *out.entry(w[0].0).or_insert(0) += 1;
            }
        }
    }
    out
}

/// Pixel points of every `<polyline class="path">` in an SVG produced here.
pub fn parse_polylines(svg: &str) -> Vec<Vec<(f64, f64)>> {
    svg.lines()
        .filter(|l| l.contains(r#"class="path""#))
        .filter_map(|l| {
            let start = l.find("points=\"")? + 8;
            let end = start + l[start..].find('"')?;
            l[start..end]
                .split_whitespace()
                .map(|pair| {
                    let (a, b) = pair.split_once(',')?;
                    Some((a.parse().ok()?, b.parse().ok()?))
                })
                .collect()
        })
        .collect()
}

/// Render every scene to `<dir>/<prefix>_<index>.svg`, index from 1.
pub fn write_scenes(scenes: &[SceneSpec], dir: &Path, prefix: &str) -> Result<Vec<PathBuf>> {
    std::fs::create_dir_all(dir).map_err(|e| Error::Io(e.to_string()))?;
    let docs = crate::par::map_indexed(scenes.len(), |i| render_svg(&scenes[i]));
    let mut out = Vec::with_capacity(docs.len());
    for (i, doc) in docs.into_iter().enumerate() {
        let path = dir.join(format!("{prefix}_{}.svg", i + 1));
        std::fs::write(&path, doc?).map_err(|e| Error::Io(e.to_string()))?;
        out.push(path);
    }
    Ok(out)
}

/// The star of shape `(6, 3, 3, 1)` on four lines whose row `i` holds only
/// the letter `i`.
pub fn figure2_star() -> PathNest {
    let stars = enumerate_stars(&[6, 3, 3, 1], 4, 0).expect("valid shape");
    stars
        .into_iter()
        .find(|s| {
            s.tableau
                .iter()
                .enumerate()
                .all(|(i, row)| row.iter().all(|&e| e == i + 1))
        })
        .expect("row-constant tableau exists")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::paths::{enumerate_watermelons, WatermelonSpec};

    #[test]
    fn sample_star_endpoints() {
        let star = figure2_star();
        assert_eq!(star.gluing, vec![9, 5, 4, 1]);
        let ends: Vec<_> = star.points().iter().map(|p| *p.last().unwrap()).collect();
        assert_eq!(ends, vec![(4, 9), (4, 5), (4, 4), (4, 1)]);
        let svg = render_svg(&SceneSpec::new(star)).unwrap();
        assert_eq!(parse_polylines(&svg).len(), 4);
    }

    #[test]
    fn empty_nest_is_grid_only() {
        let mut nest = figure2_star();
        nest.n = 0;
        let svg = render_svg(&SceneSpec::new(nest)).unwrap();
        assert!(parse_polylines(&svg).is_empty());
        assert!(svg.contains(r#"class="grid""#));
    }

    #[test]
    fn palette_and_cell_checks() {
        let mut scene = SceneSpec::new(figure2_star());
        scene.palette.truncate(3);
        assert_eq!(render_svg(&scene), Err(Error::PaletteExhausted(4)));
        scene.repeats = 2;
        assert!(render_svg(&scene).is_ok());
        scene.cell_px = 3;
        assert!(render_svg(&scene).is_err());
    }

    #[test]
    fn broken_nest_is_rejected() {
        let mut nest = figure2_star();
        nest.tableau[1] = vec![1, 1, 1];
        assert!(matches!(
            render_svg(&SceneSpec::new(nest)),
            Err(Error::InconsistentNest(_))
        ));
    }

    #[test]
    fn watermelon_family_shares_canvas() {
        let spec = WatermelonSpec::new(2, 2, 1, 0, 0).unwrap();
        let all = enumerate_watermelons(&spec);
        assert_eq!(all.len(), 6);
        let grids: Vec<_> = all.iter().map(|(w, _)| auto_grid(w)).collect();
        assert!(grids.windows(2).all(|g| g[0] == g[1]));
        for (w, _) in &all {
            let segs = vertical_segments(w);
            for (j, &c) in w.step_counts.iter().enumerate() {
                assert_eq!(segs.get(&(j as i64 + 1)).copied().unwrap_or(0), c);
            }
        }
    }
}
