//! CSV, SVG and manifest writers.

use std::fmt::Write as _;
use std::fs;
use std::io;
use std::path::{Path, PathBuf};

/// Full round-trip precision.
pub fn num(v: f64) -> String {
    format!("{v:.16e}")
}

pub struct Csv {
    text: String,
}

impl Csv {
    pub fn new(header: &[&str]) -> Self {
        Self { text: header.join(",") + "\n" }
    }

    pub fn row(&mut self, fields: &[String]) {
        self.text.push_str(&fields.join(","));
        self.text.push('\n');
    }

    pub fn into_string(self) -> String {
        self.text
    }
}

/// Collects written files for the manifest.
pub struct OutputDir {
    root: PathBuf,
    pub files: Vec<String>,
}

impl OutputDir {
    pub fn create(root: &Path) -> io::Result<Self> {
        fs::create_dir_all(root)?;
        Ok(Self { root: root.to_path_buf(), files: Vec::new() })
    }

    pub fn path(&self) -> &Path {
        &self.root
    }

    pub fn write(&mut self, name: &str, contents: &str) -> io::Result<()> {
        fs::write(self.root.join(name), contents)?;
        if !self.files.iter().any(|f| f == name) {
            self.files.push(name.to_string());
        }
        Ok(())
    }
}

/// Scatter points over polylines in the complex plane.
pub struct ComplexPlot {
    pub title: String,
    pub points: Vec<(f64, f64)>,
    pub curves: Vec<Vec<(f64, f64)>>,
    pub markers: Vec<(f64, f64)>,
}

const W: f64 = 640.0;
const H: f64 = 480.0;
const PAD: f64 = 48.0;

impl ComplexPlot {
    pub fn to_svg(&self) -> String {
        let all = self.points.iter().chain(self.curves.iter().flatten()).chain(&self.markers);
        let (mut x0, mut x1, mut y0, mut y1) = (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
        for &(x, y) in all {
            x0 = x0.min(x);
            x1 = x1.max(x);
            y0 = y0.min(y);
            y1 = y1.max(y);
        }
        if !x0.is_finite() {
            (x0, x1, y0, y1) = (-1.0, 1.0, -1.0, 1.0);
        }
        let span = |lo: f64, hi: f64| if hi - lo > 0.0 { hi - lo } else { 1.0 };
        let (sx, sy) = ((W - 2.0 * PAD) / span(x0, x1), (H - 2.0 * PAD) / span(y0, y1));
        let map = |x: f64, y: f64| (PAD + (x - x0) * sx, H - PAD - (y - y0) * sy);

        let mut s = String::new();
        let _ = writeln!(s, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}">"#);
        let _ = writeln!(s, r#"<rect width="{W}" height="{H}" fill="white"/>"#);
        let _ = writeln!(s, r#"<text x="{}" y="20" font-size="14" text-anchor="middle">{}</text>"#, W / 2.0, escape(&self.title));
        // Axes through the origin when it is in view, else along the frame.
        let (ox, oy) = map(0.0f64.clamp(x0, x1), 0.0f64.clamp(y0, y1));
        let _ = writeln!(s, r#"<line x1="{PAD}" y1="{oy:.2}" x2="{}" y2="{oy:.2}" stroke="gray"/>"#, W - PAD);
        let _ = writeln!(s, r#"<line x1="{ox:.2}" y1="{PAD}" x2="{ox:.2}" y2="{}" stroke="gray"/>"#, H - PAD);
        let _ = writeln!(s, r#"<text x="{PAD}" y="{}" font-size="11">Re [{x0:.3e}, {x1:.3e}]</text>"#, H - 12.0);
        let _ = writeln!(s, r#"<text x="8" y="{}" font-size="11">Im [{y0:.3e}, {y1:.3e}]</text>"#, PAD - 8.0);
        for curve in &self.curves {
            let pts: Vec<String> = curve
                .iter()
                .map(|&(x, y)| {
                    let (u, v) = map(x, y);
                    format!("{u:.2},{v:.2}")
                })
                .collect();
            let _ = writeln!(s, r#"<polyline fill="none" stroke="steelblue" stroke-width="1" points="{}"/>"#, pts.join(" "));
        }
        for &(x, y) in &self.points {
            let (u, v) = map(x, y);
            let _ = writeln!(s, r#"<circle cx="{u:.2}" cy="{v:.2}" r="2" fill="crimson"/>"#);
        }
        for &(x, y) in &self.markers {
            let (u, v) = map(x, y);
            let _ = writeln!(s, r#"<rect x="{:.2}" y="{:.2}" width="6" height="6" fill="none" stroke="black"/>"#, u - 3.0, v - 3.0);
        }
        s.push_str("</svg>\n");
        s
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}
