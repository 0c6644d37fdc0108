use std::f64::consts::PI;
use std::fmt::Write;

use super::lattice::LatticeField;
use super::mass::SingularSet;

pub const SVG_SIZE: usize = 512;

/// Heatmap of `|ζ|²` on `[0, 2π)²` (x to the right, y upward) with the
/// `δ`-disks of the singular set outlined, including periodic images that
/// cross the border.
pub fn heatmap(field: &LatticeField, zeros: &SingularSet, delta: f64, title: &str) -> String {
    let grid = field.grid();
    let n = grid.n;
    let rho = field.density();
    let max = rho.iter().cloned().fold(0.0, f64::max);
    let cell = SVG_SIZE as f64 / n as f64;
    let px = |t: f64| t / (2.0 * PI) * SVG_SIZE as f64;

    let mut s = String::new();
    writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{SVG_SIZE}" height="{SVG_SIZE}" viewBox="0 0 {SVG_SIZE} {SVG_SIZE}">"#
    )
    .unwrap();
    writeln!(s, "<title>{}</title>", escape(title)).unwrap();
    writeln!(s, r#"<g shape-rendering="crispEdges">"#).unwrap();
    for i in 0..n {
        for j in 0..n {
            let t = if max > 0.0 { rho[grid.index(i, j)] / max } else { 0.0 };
            let (r, g, b) = colormap(t);
            writeln!(
                s,
                r#"<rect x="{:.3}" y="{:.3}" width="{:.3}" height="{:.3}" fill="rgb({r},{g},{b})"/>"#,
                i as f64 * cell,
                SVG_SIZE as f64 - (j + 1) as f64 * cell,
                cell,
                cell
            )
            .unwrap();
        }
    }
    writeln!(s, "</g>").unwrap();
    if let SingularSet::Points { points } = zeros {
        let r = px(delta);
        for &(x, y) in points {
            for dx in [-1.0, 0.0, 1.0] {
                for dy in [-1.0, 0.0, 1.0] {
                    let cx = px(x + dx * 2.0 * PI);
                    let cy = SVG_SIZE as f64 - px(y + dy * 2.0 * PI);
                    let visible = cx + r >= 0.0
                        && cx - r <= SVG_SIZE as f64
                        && cy + r >= 0.0
                        && cy - r <= SVG_SIZE as f64;
                    if visible {
                        writeln!(
                            s,
                            r#"<circle cx="{cx:.3}" cy="{cy:.3}" r="{r:.3}" fill="none" stroke="white" stroke-width="2"/>"#
                        )
                        .unwrap();
                    }
                }
            }
        }
    }
    writeln!(s, "</svg>").unwrap();
    s
}

/// Dark blue to yellow.
fn colormap(t: f64) -> (u8, u8, u8) {
    let t = t.clamp(0.0, 1.0);
    let stops = [(13.0, 8.0, 135.0), (204.0, 71.0, 120.0), (240.0, 249.0, 33.0)];
    let (a, b, u) = if t < 0.5 {
        (stops[0], stops[1], t * 2.0)
    } else {
        (stops[1], stops[2], t * 2.0 - 1.0)
    };
    let mix = |x: f64, y: f64| (x + (y - x) * u).round() as u8;
    (mix(a.0, b.0), mix(a.1, b.1), mix(a.2, b.2))
}

fn escape(t: &str) -> String {
    t.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::torus::lattice::Grid;
    use num::complex::Complex64;

    #[test]
    fn fixed_size_and_circles() {
        let g = Grid::new(16);
        let f = LatticeField::from_positive(g, &vec![Complex64::new(1.0, 0.0); g.sites()]);
        let zeros = SingularSet::Points {
            points: vec![(0.0, 0.0), (PI, PI)],
        };
        let svg = heatmap(&f, &zeros, 0.5, "a<b");
        assert!(svg.contains(r#"width="512" height="512""#));
        assert_eq!(svg.matches("<rect").count(), 256);
        // the corner zero shows in all four corners, the center one once
        assert_eq!(svg.matches("<circle").count(), 5);
        assert!(svg.contains("a&lt;b"));
    }
}
