//! Glyph fields and eigenvalue charts as SVG.
//!
//! The geometry is computed into plain structs first ([`Glyph`], [`EigenChart`])
//! and only then serialised, so it can be inspected without parsing SVG.

use std::fmt::Write;

use clap::ValueEnum;
use nematic_core::qtensor::{biaxiality, eigen3, QTensor};

use crate::error::{CliError, CliResult};

const FRAC_1_SQRT2: f64 = std::f64::consts::FRAC_1_SQRT_2;
const FRAC_1_SQRT6: f64 = 0.408_248_290_463_863;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum GlyphStyle {
    Rod,
    Box,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ColorMap {
    Viridis,
    Grey,
}

impl ColorMap {
    /// Colour of a biaxiality value in `[0, 1]`.
    pub fn color(&self, beta: f64) -> String {
        let t = beta.clamp(0.0, 1.0);
        let (r, g, b) = match self {
            ColorMap::Grey => {
                let c = 0.15 + 0.7 * t;
                (c, c, c)
            }
            ColorMap::Viridis => {
                const STOPS: [[f64; 3]; 5] = [
                    [0.267, 0.005, 0.329],
                    [0.230, 0.322, 0.546],
                    [0.128, 0.567, 0.551],
                    [0.369, 0.789, 0.383],
                    [0.993, 0.906, 0.144],
                ];
                let x = t * 4.0;
                let i = (x.floor() as usize).min(3);
                let f = x - i as f64;
                let a = STOPS[i];
                let c = STOPS[i + 1];
                (
                    a[0] + f * (c[0] - a[0]),
                    a[1] + f * (c[1] - a[1]),
                    a[2] + f * (c[2] - a[2]),
                )
            }
        };
        let byte = |c: f64| (c * 255.0).round() as u8;
        format!("#{:02x}{:02x}{:02x}", byte(r), byte(g), byte(b))
    }
}

#[derive(Clone, Debug)]
pub struct RenderSpec {
    pub style: GlyphStyle,
    /// Lattice points per radius; at least 4.
    pub density: usize,
    pub colormap: ColorMap,
    /// Image width and height in pixels.
    pub size: u32,
    /// Eigenvalue shift for box glyphs; `None` picks `1.1·max|λ_min|`.
    pub shift: Option<f64>,
}

impl Default for RenderSpec {
    fn default() -> Self {
        RenderSpec {
            style: GlyphStyle::Rod,
            density: 8,
            colormap: ColorMap::Viridis,
            size: 600,
            shift: None,
        }
    }
}

impl RenderSpec {
    pub fn validate(&self) -> CliResult<()> {
        if self.density < 4 {
            return Err(CliError::Config(format!(
                "glyph density must be at least 4, got {}",
                self.density
            )));
        }
        if self.size < 64 {
            return Err(CliError::Config(format!(
                "image size must be at least 64 pixels, got {}",
                self.size
            )));
        }
        if let Some(s) = self.shift {
            if !s.is_finite() {
                return Err(CliError::Config(format!("shift must be finite, got {s}")));
            }
        }
        Ok(())
    }
}

/// One glyph, in disk coordinates.
#[derive(Clone, Debug)]
pub struct Glyph {
    pub x: f64,
    pub y: f64,
    pub on_boundary: bool,
    pub tensor: QTensor,
    /// Ascending.
    pub eigenvalues: [f64; 3],
    /// Eigenvector of the largest eigenvalue.
    pub leading: [f64; 3],
    /// Unit in-plane direction of the rod, `None` when the leading
    /// eigenvector is (nearly) vertical.
    pub rod_dir: Option<[f64; 2]>,
    /// `λ_max − λ_mid`.
    pub anisotropy: f64,
    pub biaxiality: f64,
    /// Projected box outline (convex hull, counter-clockwise) relative to
    /// `(x, y)`; empty for rod glyphs.
    pub outline: Vec<[f64; 2]>,
}

/// Lattice of glyph sites: a square lattice inside the disk plus a ring on
/// the boundary.
pub fn glyph_sites(radius: f64, density: usize) -> Vec<(f64, f64, bool)> {
    let d = density as i64;
    let h = radius / density as f64;
    let mut out = Vec::new();
    for iy in -d..=d {
        for ix in -d..=d {
            let (x, y) = (ix as f64 * h, iy as f64 * h);
            if x.hypot(y) < radius - 0.5 * h {
                out.push((x, y, false));
            }
        }
    }
    let ring = 8 * density;
    for j in 0..ring {
        let phi = 2.0 * std::f64::consts::PI * j as f64 / ring as f64;
        out.push((radius * phi.cos(), radius * phi.sin(), true));
    }
    out
}

/// Glyphs for the field `sampler(r, φ)`.
pub fn build_glyphs<F>(sampler: F, radius: f64, spec: &RenderSpec) -> CliResult<Vec<Glyph>>
where
    F: Fn(f64, f64) -> QTensor,
{
    spec.validate()?;
    let mut glyphs: Vec<Glyph> = glyph_sites(radius, spec.density)
        .into_iter()
        .map(|(x, y, on_boundary)| {
            let r = x.hypot(y);
            let phi = if r == 0.0 { 0.0 } else { y.atan2(x) };
            let q = sampler(r, phi);
            let e = eigen3(&q);
            let (_, leading) = e.largest();
            let planar = leading[0].hypot(leading[1]);
            let rod_dir = (planar > 1e-6).then(|| [leading[0] / planar, leading[1] / planar]);
            Glyph {
                x,
                y,
                on_boundary,
                tensor: q,
                eigenvalues: e.values,
                leading,
                rod_dir,
                anisotropy: e.values[2] - e.values[1],
                biaxiality: biaxiality(&q),
                outline: Vec::new(),
            }
        })
        .collect();
    if spec.style == GlyphStyle::Box {
        let shift = spec.shift.unwrap_or_else(|| default_shift(&glyphs));
        let min_edge = glyphs
            .iter()
            .map(|g| g.eigenvalues[0] + shift)
            .fold(f64::INFINITY, f64::min);
        if !(min_edge > 0.0) {
            return Err(CliError::Config(format!(
                "box shift {shift} leaves a non-positive edge length ({min_edge:e}); use a larger --shift"
            )));
        }
        let max_edge = glyphs
            .iter()
            .map(|g| g.eigenvalues[2] + shift)
            .fold(0.0, f64::max);
        // the largest box spans 0.8 of a lattice cell
        let scale = 0.8 * radius / spec.density as f64 / max_edge;
        for g in &mut glyphs {
            g.outline = box_outline(&g.tensor, shift, scale);
        }
    }
    Ok(glyphs)
}

/// `1.1·max|λ_min|`, or 1 for an identically zero field.
pub fn default_shift(glyphs: &[Glyph]) -> f64 {
    let m = glyphs
        .iter()
        .map(|g| g.eigenvalues[0].abs())
        .fold(0.0, f64::max);
    if m > 0.0 {
        1.1 * m
    } else {
        1.0
    }
}

/// xy-shadow of the box with edges `(λᵢ + shift)·scale` along the eigenvectors.
fn box_outline(q: &QTensor, shift: f64, scale: f64) -> Vec<[f64; 2]> {
    let e = eigen3(q);
    let half: Vec<[f64; 3]> = (0..3)
        .map(|i| {
            let a = 0.5 * scale * (e.values[i] + shift);
            [
                a * e.vectors[i][0],
                a * e.vectors[i][1],
                a * e.vectors[i][2],
            ]
        })
        .collect();
    let mut pts = Vec::with_capacity(8);
    for s0 in [-1.0, 1.0] {
        for s1 in [-1.0, 1.0] {
            for s2 in [-1.0, 1.0] {
                pts.push([
                    s0 * half[0][0] + s1 * half[1][0] + s2 * half[2][0],
                    s0 * half[0][1] + s1 * half[1][1] + s2 * half[2][1],
                ]);
            }
        }
    }
    convex_hull(pts)
}

/// Andrew's monotone chain; counter-clockwise, without collinear points.
pub fn convex_hull(mut pts: Vec<[f64; 2]>) -> Vec<[f64; 2]> {
    pts.sort_by(|a, b| a[0].total_cmp(&b[0]).then(a[1].total_cmp(&b[1])));
    pts.dedup();
    if pts.len() < 3 {
        return pts;
    }
    let cross = |o: [f64; 2], a: [f64; 2], b: [f64; 2]| {
        (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])
    };
    let mut hull: Vec<[f64; 2]> = Vec::with_capacity(2 * pts.len());
    for pass in 0..2 {
        let start = hull.len();
        let iter: Box<dyn Iterator<Item = &[f64; 2]>> = if pass == 0 {
            Box::new(pts.iter())
        } else {
            Box::new(pts.iter().rev())
        };
        for &p in iter {
            while hull.len() >= start + 2
                && cross(hull[hull.len() - 2], hull[hull.len() - 1], p) <= 0.0
            {
                hull.pop();
            }
            hull.push(p);
        }
        hull.pop();
    }
    hull
}

/// One eigenvalue curve.
#[derive(Clone, Debug)]
pub struct Series {
    pub label: String,
    pub values: Vec<f64>,
}

/// Eigenvalues along the ray `φ = 0` as functions of `r`.
#[derive(Clone, Debug)]
pub struct EigenChart {
    pub title: String,
    pub r: Vec<f64>,
    pub series: Vec<Series>,
}

/// Interior point where two curves change order.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Crossing {
    pub a: usize,
    pub b: usize,
    pub r: f64,
}

impl EigenChart {
    /// Curves labelled by frame direction for `Q = u F_n + v F_3`: the
    /// eigenvalues belonging to `n`, `n^⊥` and `e₃`. These may cross.
    pub fn from_uv(title: &str, r: &[f64], u: &[f64], v: &[f64]) -> Self {
        let f = |g: fn(f64, f64) -> f64| u.iter().zip(v).map(|(&a, &b)| g(a, b)).collect();
        EigenChart {
            title: title.into(),
            r: r.to_vec(),
            series: vec![
                Series {
                    label: "lambda_n".into(),
                    values: f(|u, v| u * FRAC_1_SQRT2 - v * FRAC_1_SQRT6),
                },
                Series {
                    label: "lambda_perp".into(),
                    values: f(|u, v| -u * FRAC_1_SQRT2 - v * FRAC_1_SQRT6),
                },
                Series {
                    label: "lambda_z".into(),
                    values: f(|_, v| 2.0 * v * FRAC_1_SQRT6),
                },
            ],
        }
    }

    /// Sorted eigenvalues of a general field along `φ = 0`.
    pub fn from_sampler<F: Fn(f64, f64) -> QTensor>(title: &str, r: &[f64], sampler: F) -> Self {
        let eig: Vec<[f64; 3]> = r.iter().map(|&x| eigen3(&sampler(x, 0.0)).values).collect();
        let series = ["lambda_1", "lambda_2", "lambda_3"]
            .iter()
            .enumerate()
            .map(|(i, l)| Series {
                label: (*l).into(),
                values: eig.iter().map(|e| e[i]).collect(),
            })
            .collect();
        EigenChart {
            title: title.into(),
            r: r.to_vec(),
            series,
        }
    }

    /// Sign changes of `series[a] − series[b]` strictly inside `(r₀, r_N)`.
    /// Differences below `1e-9·max|λ|` count as zero, so curves that only touch
    /// (or meet at an end point) are not reported.
    pub fn crossings(&self) -> Vec<Crossing> {
        let scale = self
            .series
            .iter()
            .flat_map(|s| s.values.iter())
            .fold(0.0f64, |m, x| m.max(x.abs()));
        let eps = 1e-9 * scale;
        let mut out = Vec::new();
        for a in 0..self.series.len() {
            for b in a + 1..self.series.len() {
                let d: Vec<f64> = self.series[a]
                    .values
                    .iter()
                    .zip(&self.series[b].values)
                    .map(|(x, y)| x - y)
                    .collect();
                let signed: Vec<usize> = (0..d.len()).filter(|&i| d[i].abs() > eps).collect();
                for w in signed.windows(2) {
                    let (i, j) = (w[0], w[1]);
                    if d[i].signum() == d[j].signum() {
                        continue;
                    }
                    let r = if j == i + 1 {
                        let t = d[i] / (d[i] - d[j]);
                        self.r[i] + t * (self.r[j] - self.r[i])
                    } else {
                        0.5 * (self.r[i + 1] + self.r[j - 1])
                    };
                    out.push(Crossing { a, b, r });
                }
            }
        }
        out
    }
}

fn hex(series: usize) -> &'static str {
    ["#1f77b4", "#d62728", "#2ca02c"][series % 3]
}

/// The glyph field as an SVG document.
pub fn field_svg(glyphs: &[Glyph], radius: f64, spec: &RenderSpec, title: &str) -> String {
    let size = f64::from(spec.size);
    let c = 0.5 * size;
    let scale = 0.44 * size / radius;
    let cell = scale * radius / spec.density as f64;
    let px = |x: f64, y: f64| (c + scale * x, c - scale * y);
    let max_aniso = glyphs.iter().map(|g| g.anisotropy).fold(0.0, f64::max);
    let mut out = String::new();
    svg_open(&mut out, spec.size, spec.size, title);
    let _ = writeln!(
        out,
        r##"<circle cx="{c:.3}" cy="{c:.3}" r="{:.3}" fill="none" stroke="#999999" stroke-width="1"/>"##,
        scale * radius
    );
    for g in glyphs {
        let (gx, gy) = px(g.x, g.y);
        let color = spec.colormap.color(g.biaxiality);
        match spec.style {
            GlyphStyle::Box => {
                let pts: Vec<String> = g
                    .outline
                    .iter()
                    .map(|p| format!("{:.3},{:.3}", gx + scale * p[0], gy - scale * p[1]))
                    .collect();
                let _ = writeln!(
                    out,
                    r##"<polygon points="{}" fill="{color}" stroke="#333333" stroke-width="0.5"/>"##,
                    pts.join(" ")
                );
            }
            GlyphStyle::Rod => {
                let half = if max_aniso > 0.0 {
                    0.45 * cell * g.anisotropy / max_aniso
                } else {
                    0.0
                };
                match g.rod_dir {
                    Some(d) if half > 1e-3 * cell => {
                        let _ = writeln!(
                            out,
                            r#"<line x1="{:.3}" y1="{:.3}" x2="{:.3}" y2="{:.3}" stroke="{color}" stroke-width="{:.3}" stroke-linecap="round"/>"#,
                            gx - half * d[0],
                            gy + half * d[1],
                            gx + half * d[0],
                            gy - half * d[1],
                            0.18 * cell
                        );
                    }
                    _ => {
                        let _ = writeln!(
                            out,
                            r#"<circle cx="{gx:.3}" cy="{gy:.3}" r="{:.3}" fill="{color}"/>"#,
                            0.15 * cell
                        );
                    }
                }
            }
        }
    }
    colorbar(&mut out, spec, size);
    out.push_str("</svg>\n");
    out
}

fn colorbar(out: &mut String, spec: &RenderSpec, size: f64) {
    let steps = 20;
    let w = 0.3 * size / steps as f64;
    let y = size - 0.04 * size;
    for i in 0..steps {
        let t = (i as f64 + 0.5) / steps as f64;
        let _ = writeln!(
            out,
            r#"<rect x="{:.3}" y="{:.3}" width="{:.3}" height="{:.3}" fill="{}"/>"#,
            0.65 * size + i as f64 * w,
            y,
            w,
            0.02 * size,
            spec.colormap.color(t)
        );
    }
    let _ = writeln!(
        out,
        r#"<text x="{:.3}" y="{:.3}" font-size="10" font-family="sans-serif">biaxiality 0 .. 1</text>"#,
        0.65 * size,
        y - 4.0
    );
}

fn svg_open(out: &mut String, w: u32, h: u32, title: &str) {
    let _ = writeln!(out, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{w}" height="{h}" viewBox="0 0 {w} {h}">"#
    );
    let _ = writeln!(out, "<title>{}</title>", escape(title));
    let _ = writeln!(out, r#"<rect width="{w}" height="{h}" fill="white"/>"#);
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
}

/// Line chart of the eigenvalue curves with crossings marked.
pub fn chart_svg(chart: &EigenChart, size: u32) -> String {
    let w = f64::from(size);
    let h = (w * 0.66).round();
    let (left, right, top, bottom) = (60.0, 20.0, 30.0, 40.0);
    let r0 = chart.r.first().copied().unwrap_or(0.0);
    let r1 = chart.r.last().copied().unwrap_or(1.0).max(r0 + 1e-300);
    let all = chart.series.iter().flat_map(|s| s.values.iter().copied());
    let (mut lo, mut hi) = all.fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), x| {
        (a.min(x), b.max(x))
    });
    if !(hi > lo) {
        lo -= 1.0;
        hi += 1.0;
    }
    let pad = 0.05 * (hi - lo);
    let (lo, hi) = (lo - pad, hi + pad);
    let x_of = |r: f64| left + (w - left - right) * (r - r0) / (r1 - r0);
    let y_of = |l: f64| top + (h - top - bottom) * (hi - l) / (hi - lo);
    let mut out = String::new();
    svg_open(&mut out, size, h as u32, &chart.title);
    let _ = writeln!(
        out,
        r#"<text x="{:.3}" y="18" font-size="13" font-family="sans-serif">{}</text>"#,
        left,
        escape(&chart.title)
    );
    // axes
    let _ = writeln!(
        out,
        r##"<path d="M{:.3},{:.3} L{:.3},{:.3} L{:.3},{:.3}" fill="none" stroke="#000000" stroke-width="1"/>"##,
        left,
        top,
        left,
        h - bottom,
        w - right,
        h - bottom
    );
    if lo < 0.0 && hi > 0.0 {
        let _ = writeln!(
            out,
            r##"<line x1="{:.3}" y1="{y:.3}" x2="{:.3}" y2="{y:.3}" stroke="#bbbbbb" stroke-dasharray="4,3"/>"##,
            left,
            w - right,
            y = y_of(0.0)
        );
    }
    for (label, x, y, anchor) in [
        (format!("{r0:.3}"), x_of(r0), h - bottom + 15.0, "middle"),
        (format!("r = {r1:.3}"), x_of(r1), h - bottom + 15.0, "end"),
        (format!("{hi:.3}"), left - 5.0, top + 4.0, "end"),
        (format!("{lo:.3}"), left - 5.0, h - bottom, "end"),
    ] {
        let _ = writeln!(
            out,
            r#"<text x="{x:.3}" y="{y:.3}" font-size="10" font-family="sans-serif" text-anchor="{anchor}">{label}</text>"#
        );
    }
    for (k, s) in chart.series.iter().enumerate() {
        let pts: Vec<String> = chart
            .r
            .iter()
            .zip(&s.values)
            .map(|(&r, &l)| format!("{:.3},{:.3}", x_of(r), y_of(l)))
            .collect();
        let _ = writeln!(
            out,
            r#"<polyline points="{}" fill="none" stroke="{}" stroke-width="1.5"/>"#,
            pts.join(" "),
            hex(k)
        );
        let _ = writeln!(
            out,
            r#"<text x="{:.3}" y="{:.3}" font-size="11" font-family="sans-serif" fill="{}">{}</text>"#,
            w - right - 90.0,
            top + 14.0 * (k as f64 + 1.0),
            hex(k),
            s.label
        );
    }
    for c in chart.crossings() {
        let l = chart.series[c.a].values.clone();
        // value at the crossing by linear interpolation
        let i = chart.r.partition_point(|&x| x < c.r).min(chart.r.len() - 1);
        let y = if i == 0 {
            l[0]
        } else {
            let t = (c.r - chart.r[i - 1]) / (chart.r[i] - chart.r[i - 1]);
            l[i - 1] + t * (l[i] - l[i - 1])
        };
        let _ = writeln!(
            out,
            r##"<circle cx="{:.3}" cy="{:.3}" r="4" fill="none" stroke="#000000"/>"##,
            x_of(c.r),
            y_of(y)
        );
    }
    out.push_str("</svg>\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hull_of_square_with_interior_points() {
        let pts = vec![
            [0.0, 0.0],
            [1.0, 0.0],
            [1.0, 1.0],
            [0.0, 1.0],
            [0.5, 0.5],
            [0.5, 0.0],
        ];
        let h = convex_hull(pts);
        assert_eq!(h, vec![[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]]);
    }

    #[test]
    fn colormap_end_points() {
        assert_eq!(ColorMap::Viridis.color(0.0), "#440154");
        assert_eq!(ColorMap::Viridis.color(2.0), ColorMap::Viridis.color(1.0));
        assert_eq!(ColorMap::Grey.color(0.0), "#262626");
    }

    #[test]
    fn sites_include_centre_and_ring() {
        let s = glyph_sites(2.0, 4);
        assert!(s.contains(&(0.0, 0.0, false)));
        assert_eq!(s.iter().filter(|x| x.2).count(), 32);
        assert!(s.iter().filter(|x| !x.2).all(|x| x.0.hypot(x.1) < 2.0));
    }

    #[test]
    fn touching_curves_are_not_crossings() {
        let chart = EigenChart {
            title: String::new(),
            r: vec![0.0, 0.5, 1.0],
            series: vec![
                Series {
                    label: "a".into(),
                    values: vec![0.0, 1.0, 0.0],
                },
                Series {
                    label: "b".into(),
                    values: vec![0.0, 0.0, 1e-20],
                },
            ],
        };
        assert!(chart.crossings().is_empty());
    }
}
