//! CSV and SVG emitters and the digest manifest for produced files.
//!
//! Floats are written with `{:?}`, the shortest representation that parses
//! back to the same `f64`.

use std::fmt::Write as _;
use std::fs;
use std::io::{self, Write};
use std::path::Path;

use num_complex::Complex;
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::spectra::{FieldOfValues, PseudospectrumGrid, SpectrumResult};

pub fn eigenvalues_csv<W: Write>(r: &SpectrumResult<f64>, mut w: W) -> io::Result<()> {
    writeln!(w, "re,im,converged")?;
    for (z, c) in r.eigenvalues.iter().zip(&r.converged) {
        writeln!(w, "{:?},{:?},{}", z.re, z.im, c)?;
    }
    w.flush()
}

pub fn singular_values_csv<W: Write>(values: &[f64], mut w: W) -> io::Result<()> {
    writeln!(w, "index,value")?;
    for (k, v) in values.iter().enumerate() {
        writeln!(w, "{},{:?}", k + 1, v)?;
    }
    w.flush()
}

pub fn field_of_values_csv<W: Write>(f: &FieldOfValues<f64>, mut w: W) -> io::Result<()> {
    writeln!(w, "angle,re,im")?;
    for (a, z) in f.angles.iter().zip(&f.boundary_points) {
        writeln!(w, "{:?},{:?},{:?}", a, z.re, z.im)?;
    }
    w.flush()
}

pub fn pseudospectrum_csv<W: Write>(g: &PseudospectrumGrid<f64>, mut w: W) -> io::Result<()> {
    writeln!(w, "re,im,sigma_min")?;
    for iy in 0..g.ny {
        for ix in 0..g.nx {
            let z = g.node(ix, iy);
            writeln!(w, "{:?},{:?},{:?}", z.re, z.im, g.sigma_min[iy * g.nx + ix])?;
        }
    }
    w.flush()
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes)
        .iter()
        .fold(String::with_capacity(64), |mut s, b| {
            let _ = write!(s, "{b:02x}");
            s
        })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ManifestEntry {
    pub path: String,
    pub kind: String,
    pub sha256: String,
    pub bytes: u64,
    pub partial: bool,
}

/// Every produced file with its digest, plus the resolved configuration.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Manifest {
    pub tool: String,
    pub version: String,
    pub spec_hash: Option<String>,
    pub config: serde_json::Value,
    pub files: Vec<ManifestEntry>,
}

impl Manifest {
    pub fn new(config: serde_json::Value, spec_hash: Option<String>) -> Self {
        Manifest {
            tool: "sectoral".into(),
            version: env!("CARGO_PKG_VERSION").into(),
            spec_hash,
            config,
            files: Vec::new(),
        }
    }

    /// Writes `bytes` to `dir/name` and records it.
    pub fn emit(&mut self, dir: &Path, name: &str, kind: &str, bytes: &[u8], partial: bool) -> io::Result<()> {
        fs::write(dir.join(name), bytes)?;
        self.files.push(ManifestEntry {
            path: name.into(),
            kind: kind.into(),
            sha256: sha256_hex(bytes),
            bytes: bytes.len() as u64,
            partial,
        });
        Ok(())
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("manifest serializes") + "\n"
    }

    pub fn write(&self, dir: &Path) -> io::Result<()> {
        fs::write(dir.join("manifest.json"), self.to_json())
    }
}

const W: f64 = 640.0;
const H: f64 = 480.0;
const PAD: f64 = 48.0;

struct Frame {
    x0: f64,
    x1: f64,
    y0: f64,
    y1: f64,
}

impl Frame {
    fn fit(points: impl Iterator<Item = (f64, f64)>) -> Frame {
        let mut f = Frame {
            x0: f64::INFINITY,
            x1: f64::NEG_INFINITY,
            y0: f64::INFINITY,
            y1: f64::NEG_INFINITY,
        };
        for (x, y) in points.filter(|p| p.0.is_finite() && p.1.is_finite()) {
            f.x0 = f.x0.min(x);
            f.x1 = f.x1.max(x);
            f.y0 = f.y0.min(y);
            f.y1 = f.y1.max(y);
        }
        if !f.x0.is_finite() {
            return Frame {
                x0: -1.0,
                x1: 1.0,
                y0: -1.0,
                y1: 1.0,
            };
        }
        let px = 0.05 * (f.x1 - f.x0).max(1e-12);
        let py = 0.05 * (f.y1 - f.y0).max(1e-12);
        Frame {
            x0: f.x0 - px,
            x1: f.x1 + px,
            y0: f.y0 - py,
            y1: f.y1 + py,
        }
    }

    fn map(&self, x: f64, y: f64) -> (f64, f64) {
        (
            PAD + (x - self.x0) / (self.x1 - self.x0) * (W - 2.0 * PAD),
            H - PAD - (y - self.y0) / (self.y1 - self.y0) * (H - 2.0 * PAD),
        )
    }
}

fn header(s: &mut String, title: &str, f: &Frame) {
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}">"#
    );
    let _ = writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(
        s,
        r#"<rect x="{PAD}" y="{PAD}" width="{}" height="{}" fill="none" stroke="black"/>"#,
        W - 2.0 * PAD,
        H - 2.0 * PAD
    );
    let _ = writeln!(
        s,
        r#"<text x="{}" y="24" text-anchor="middle" font-size="14">{title}</text>"#,
        W / 2.0
    );
    let _ = writeln!(
        s,
        r#"<text x="{PAD}" y="{}" font-size="10">Re [{:.4}, {:.4}]  Im [{:.4}, {:.4}]</text>"#,
        H - 16.0,
        f.x0,
        f.x1,
        f.y0,
        f.y1
    );
}

/// Scatter plot of complex points.
pub fn svg_scatter(title: &str, points: &[Complex<f64>]) -> String {
    let f = Frame::fit(points.iter().map(|z| (z.re, z.im)));
    let mut s = String::new();
    header(&mut s, title, &f);
    for z in points.iter().filter(|z| z.re.is_finite() && z.im.is_finite()) {
        let (x, y) = f.map(z.re, z.im);
        let _ = writeln!(s, r#"<circle cx="{x:.2}" cy="{y:.2}" r="2" fill="steelblue"/>"#);
    }
    s.push_str("</svg>\n");
    s
}

/// Closed polygon, e.g. a field-of-values boundary.
pub fn svg_polygon(title: &str, points: &[Complex<f64>]) -> String {
    let f = Frame::fit(points.iter().map(|z| (z.re, z.im)));
    let mut s = String::new();
    header(&mut s, title, &f);
    let pts: Vec<String> = points
        .iter()
        .map(|z| {
            let (x, y) = f.map(z.re, z.im);
            format!("{x:.2},{y:.2}")
        })
        .collect();
    let _ = writeln!(
        s,
        r#"<polygon points="{}" fill="lightsteelblue" stroke="navy"/>"#,
        pts.join(" ")
    );
    s.push_str("</svg>\n");
    s
}

/// Contours of `log10 sigma_min` at integer levels, by marching squares.
pub fn svg_contour(title: &str, g: &PseudospectrumGrid<f64>) -> String {
    let corners = [g.node(0, 0), g.node(g.nx - 1, g.ny - 1)];
    let f = Frame::fit(corners.iter().map(|z| (z.re, z.im)));
    let mut s = String::new();
    header(&mut s, title, &f);
    let lg: Vec<f64> = g.sigma_min.iter().map(|v| v.max(1e-300).log10()).collect();
    let (lo, hi) = lg
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &v| (a.min(v), b.max(v)));
    if g.nx >= 2 && g.ny >= 2 && lo.is_finite() {
        let at = |ix: usize, iy: usize| lg[iy * g.nx + ix];
        for level in (lo.ceil() as i32)..=(hi.floor() as i32) {
            let c = f64::from(level);
            let mut d = String::new();
            for iy in 0..g.ny - 1 {
                for ix in 0..g.nx - 1 {
                    let v = [at(ix, iy), at(ix + 1, iy), at(ix + 1, iy + 1), at(ix, iy + 1)];
                    let p = [
                        g.node(ix, iy),
                        g.node(ix + 1, iy),
                        g.node(ix + 1, iy + 1),
                        g.node(ix, iy + 1),
                    ];
                    let mut cut = Vec::with_capacity(4);
                    for e in 0..4 {
                        let (a, b) = (v[e], v[(e + 1) % 4]);
                        if (a < c) != (b < c) {
                            let t = (c - a) / (b - a);
                            cut.push(p[e] + (p[(e + 1) % 4] - p[e]) * t);
                        }
                    }
                    for pair in cut.chunks_exact(2) {
                        let (x0, y0) = f.map(pair[0].re, pair[0].im);
                        let (x1, y1) = f.map(pair[1].re, pair[1].im);
                        let _ = write!(d, "M{x0:.2},{y0:.2}L{x1:.2},{y1:.2}");
                    }
                }
            }
            if !d.is_empty() {
                let _ = writeln!(
                    s,
                    r#"<path d="{d}" fill="none" stroke="darkred" stroke-width="1"><title>1e{level}</title></path>"#
                );
            }
        }
    }
    s.push_str("</svg>\n");
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn digest_of_empty_input() {
        assert_eq!(
            sha256_hex(b""),
            "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855"
        );
    }

    #[test]
    fn csv_floats_round_trip() {
        let mut buf = Vec::new();
        singular_values_csv(&[0.1 + 0.2, 1.0 / 3.0], &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let v: Vec<f64> = text
            .lines()
            .skip(1)
            .map(|l| l.split(',').nth(1).unwrap().parse().unwrap())
            .collect();
        assert_eq!(v, vec![0.1 + 0.2, 1.0 / 3.0]);
    }

    #[test]
    fn scatter_is_well_formed() {
        let s = svg_scatter("t", &[Complex::new(0.0, 0.0), Complex::new(1.0, 2.0)]);
        assert!(s.starts_with("<svg") && s.trim_end().ends_with("</svg>"));
        assert_eq!(s.matches("<circle").count(), 2);
    }
}
