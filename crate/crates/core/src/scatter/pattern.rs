//! Grid scans of launch offsets and their projected outgoing directions.

use std::fmt::Write as _;

use nalgebra::Vector2;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{integrate_trajectory, stereographic_project, ProjectionPole, ScatterConfig};
use crate::massdist::MassDistribution;
use crate::table::{num, Csv};
use crate::{Error, Result};

/// Launch grid: b = βR for β on [beta_min, beta_max], l on [l_min, l_max].
/// With `mirror_l`, every l ≠ 0 is also launched at −l.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PatternGrid {
    pub beta_min: f64,
    pub beta_max: f64,
    pub n_b: usize,
    pub l_min: f64,
    pub l_max: f64,
    pub n_l: usize,
    pub mirror_l: bool,
}

impl PatternGrid {
    pub fn validate(&self) -> Result<()> {
        if self.n_b == 0 || self.n_l == 0 {
            return Err(Error::invalid("n_b and n_l must be >= 1"));
        }
        if !(self.beta_min > 0.0 && self.beta_max >= self.beta_min && self.beta_max.is_finite()) {
            return Err(Error::invalid(format!(
                "beta range must satisfy 0 < beta_min <= beta_max, got [{}, {}]",
                self.beta_min, self.beta_max
            )));
        }
        if !(self.l_min.is_finite() && self.l_max.is_finite() && self.l_max >= self.l_min) {
            return Err(Error::invalid(format!(
                "l range (m) must satisfy l_min <= l_max, got [{}, {}]",
                self.l_min, self.l_max
            )));
        }
        if self.mirror_l && self.l_min < 0.0 {
            return Err(Error::invalid("mirrored l range must have l_min >= 0 m"));
        }
        Ok(())
    }

    pub fn betas(&self) -> Vec<f64> {
        linspace(self.beta_min, self.beta_max, self.n_b)
    }

    /// Sorted offsets, mirrored values included.
    pub fn offsets(&self) -> Vec<f64> {
        let base = linspace(self.l_min, self.l_max, self.n_l);
        if !self.mirror_l {
            return base;
        }
        let mut all: Vec<f64> = base.iter().filter(|l| **l > 0.0).map(|l| -l).collect();
        all.extend(base);
        all.sort_by(f64::total_cmp);
        all
    }
}

fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![a];
    }
    (0..n).map(|i| a + (b - a) * i as f64 / (n - 1) as f64).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PatternPoint {
    pub i_b: usize,
    pub i_l: usize,
    pub beta: f64,
    pub l: f64,
    pub b: f64,
    pub theta: f64,
    pub proj: Vector2<f64>,
    pub hit: bool,
    /// Set when integration failed; the numeric fields are NaN.
    pub error: Option<String>,
}

impl PatternPoint {
    pub fn accepted(&self) -> bool {
        !self.hit && self.error.is_none()
    }
}

/// Every launched probe, ordered by (β index, l index).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScatterPattern {
    pub points: Vec<PatternPoint>,
    pub projection_pole: ProjectionPole,
    pub n_hit: usize,
    pub n_failed: usize,
}

impl ScatterPattern {
    pub fn accepted(&self) -> impl Iterator<Item = &PatternPoint> {
        self.points.iter().filter(|p| p.accepted())
    }

    pub fn max_proj_radius(&self) -> f64 {
        self.accepted().map(|p| p.proj.norm()).fold(0.0, f64::max)
    }

    /// CSV with header `beta,l,b,theta_rad,proj_x,proj_y,hit`.
    pub fn to_csv(&self, comment: Option<&str>) -> String {
        let mut csv = Csv::new(comment, &["beta", "l", "b", "theta_rad", "proj_x", "proj_y", "hit"]);
        for p in &self.points {
            csv.row([
                num(p.beta),
                num(p.l),
                num(p.b),
                num(p.theta),
                num(p.proj[0]),
                num(p.proj[1]),
                if p.hit { "1".into() } else { "0".into() },
            ]);
        }
        csv.finish()
    }

    /// Static SVG of the accepted points, red for l ≥ 0 and blue for l < 0,
    /// with an optional dashed reference circle of radius `dashed`.
    pub fn to_svg(&self, comment: Option<&str>, dashed: Option<f64>) -> String {
        let size = 600.0;
        let half = size / 2.0;
        let extent = self.max_proj_radius().max(dashed.unwrap_or(0.0)).max(f64::MIN_POSITIVE) * 1.15;
        let scale = half / extent;
        let mut s = String::new();
        if let Some(c) = comment {
            let _ = writeln!(s, "<!--\n{}\n-->", c.replace("--", "- -"));
        }
        let _ = writeln!(
            s,
            r#"<svg xmlns="http://www.w3.org/2000/svg" width="{size}" height="{size}" viewBox="0 0 {size} {size}">"#
        );
        let _ = writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#);
        let _ = writeln!(
            s,
            r##"<line x1="0" y1="{half}" x2="{size}" y2="{half}" stroke="#bbb"/><line x1="{half}" y1="0" x2="{half}" y2="{size}" stroke="#bbb"/>"##
        );
        if let Some(r) = dashed {
            let _ = writeln!(
                s,
                r#"<circle cx="{half}" cy="{half}" r="{:.3}" fill="none" stroke="black" stroke-dasharray="6 4"/>"#,
                r * scale
            );
        }
        for p in self.accepted() {
            let color = if p.l < 0.0 { "#1f4fd0" } else { "#d0301f" };
            let _ = writeln!(
                s,
                r#"<circle cx="{:.3}" cy="{:.3}" r="2" fill="{color}"/>"#,
                half + p.proj[0] * scale,
                half - p.proj[1] * scale
            );
        }
        let _ = writeln!(
            s,
            r#"<text x="8" y="{:.0}" font-family="sans-serif" font-size="12">full width = {} (projection units)</text>"#,
            size - 8.0,
            num(2.0 * extent)
        );
        s.push_str("</svg>\n");
        s
    }
}

/// Integrate one probe per grid point. Points run in parallel and are
/// collected in grid order, so the result is independent of scheduling.
pub fn scan_pattern(dist: &MassDistribution, grid: &PatternGrid, v: f64, m_probe: f64) -> Result<ScatterPattern> {
    grid.validate()?;
    if !(v > 0.0 && v.is_finite()) {
        return Err(Error::invalid(format!("probe speed v must be > 0 m/s, got {v}")));
    }
    if !(m_probe > 0.0 && m_probe.is_finite()) {
        return Err(Error::invalid(format!("probe mass must be > 0 kg, got {m_probe}")));
    }
    let radius = dist.max_radius();
    let betas = grid.betas();
    let offsets = grid.offsets();
    let jobs: Vec<(usize, usize)> =
        (0..betas.len()).flat_map(|i| (0..offsets.len()).map(move |j| (i, j))).collect();

    let points: Vec<PatternPoint> = jobs
        .par_iter()
        .map(|&(i_b, i_l)| {
            let (beta, l) = (betas[i_b], offsets[i_l]);
            let b = beta * radius;
            let cfg = ScatterConfig::for_source(dist, b, l, v);
            let mut pt = PatternPoint {
                i_b,
                i_l,
                beta,
                l,
                b,
                theta: f64::NAN,
                proj: Vector2::new(f64::NAN, f64::NAN),
                hit: false,
                error: None,
            };
            match integrate_trajectory(dist, &cfg, m_probe)
                .and_then(|tr| stereographic_project(&tr.outgoing_dir).map(|p| (tr, p)))
            {
                Ok((tr, proj)) => {
                    pt.theta = tr.deflection_angle;
                    pt.proj = proj;
                    pt.hit = tr.hit_source;
                }
                Err(e) => pt.error = Some(e.to_string()),
            }
            pt
        })
        .collect();

    let n_hit = points.iter().filter(|p| p.hit).count();
    let n_failed = points.iter().filter(|p| p.error.is_some()).count();
    Ok(ScatterPattern { points, projection_pole: ProjectionPole::NegativeZ, n_hit, n_failed })
}

/// Accepted points with |proj| ≥ `fraction`·max, grouped into clusters of
/// grid neighbours (8-connectivity in (β, l) index space). Each cluster is a
/// list of indices into `pattern.points`, sorted.
pub fn high_deflection_clusters(pattern: &ScatterPattern, fraction: f64) -> Vec<Vec<usize>> {
    let cut = fraction * pattern.max_proj_radius();
    let high: Vec<usize> = (0..pattern.points.len())
        .filter(|&k| pattern.points[k].accepted() && pattern.points[k].proj.norm() >= cut)
        .collect();
    let mut seen = vec![false; high.len()];
    let mut clusters = Vec::new();
    for start in 0..high.len() {
        if seen[start] {
            continue;
        }
        seen[start] = true;
        let mut stack = vec![start];
        let mut members = Vec::new();
        while let Some(a) = stack.pop() {
            members.push(high[a]);
            let pa = &pattern.points[high[a]];
            for (c, other) in high.iter().enumerate() {
                if seen[c] {
                    continue;
                }
                let pc = &pattern.points[*other];
                if pa.i_b.abs_diff(pc.i_b) <= 1 && pa.i_l.abs_diff(pc.i_l) <= 1 {
                    seen[c] = true;
                    stack.push(c);
                }
            }
        }
        members.sort_unstable();
        clusters.push(members);
    }
    clusters
}
