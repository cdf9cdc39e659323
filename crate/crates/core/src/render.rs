//! SVG pictures of planar tessellations.

use std::fmt::Write as _;

use crate::division::TessellationSnapshot;
use crate::error::{Error, Result};
use crate::geometry::{CellGeometry, Cuboid};

/// Drawing options for [`render_svg`].
#[derive(Debug, Clone, PartialEq)]
pub struct SvgStyle {
    /// Width of the picture in pixels; the height follows the window's
    /// aspect ratio.
    pub width: f64,
    pub stroke: String,
    pub stroke_width: f64,
    /// Shade cells by birth time (late births darker).
    pub color_by_birth: bool,
}

impl Default for SvgStyle {
    fn default() -> Self {
        SvgStyle {
            width: 600.0,
            stroke: "black".into(),
            stroke_width: 1.0,
            color_by_birth: false,
        }
    }
}

/// 9 significant digits.
fn n9(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    let digits = 8 - x.abs().log10().floor() as i32;
    let s = format!("{:.*}", digits.max(0) as usize, x);
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s
    }
}

fn fill(birth: f64, t: f64, style: &SvgStyle) -> String {
    if !style.color_by_birth || t <= 0.0 {
        return "none".into();
    }
    let shade = 255.0 - 160.0 * (birth / t).clamp(0.0, 1.0);
    let v = shade.round() as u8;
    format!("rgb({v},{v},255)")
}

/// Draws the cells of a two-dimensional snapshot inside `window`, one
/// `<rect>` per cuboid and one `<polygon>` per polygonal cell, ordered by
/// cell id. The y axis points up.
pub fn render_svg(snapshot: &TessellationSnapshot, window: &Cuboid, style: &SvgStyle) -> Result<String> {
    if window.dim() != 2 {
        return Err(Error::Mismatch(format!("can only draw 2-d windows, got dimension {}", window.dim())));
    }
    if let Some(c) = snapshot.cells.iter().find(|c| c.geometry.dim() != 2) {
        return Err(Error::Mismatch(format!("cell {} is not planar", c.id)));
    }
    let (x0, y1) = (window.lower()[0], window.upper()[1]);
    let scale = style.width / window.side(0);
    let height = window.side(1) * scale;
    let px = |x: f64| (x - x0) * scale;
    let py = |y: f64| (y1 - y) * scale;

    let mut cells: Vec<_> = snapshot.cells.iter().collect();
    cells.sort_by_key(|c| c.id);

    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}">"#,
        w = n9(style.width),
        h = n9(height)
    );
    let _ = writeln!(
        out,
        r#"<g stroke="{}" stroke-width="{}">"#,
        style.stroke,
        n9(style.stroke_width)
    );
    for c in cells {
        let f = fill(c.birth, snapshot.time, style);
        match &c.geometry {
            CellGeometry::Cuboid(b) => {
                let _ = writeln!(
                    out,
                    r#"<rect id="c{}" x="{}" y="{}" width="{}" height="{}" fill="{f}"/>"#,
                    c.id,
                    n9(px(b.lower()[0])),
                    n9(py(b.upper()[1])),
                    n9(b.side(0) * scale),
                    n9(b.side(1) * scale)
                );
            }
            CellGeometry::Polygon(p) => {
                let pts = p
                    .vertices()
                    .iter()
                    .map(|v| format!("{},{}", n9(px(v[0])), n9(py(v[1]))))
                    .collect::<Vec<_>>()
                    .join(" ");
                let _ = writeln!(out, r#"<polygon id="c{}" points="{pts}" fill="{f}"/>"#, c.id);
            }
        }
    }
    out.push_str("</g>\n</svg>\n");
    Ok(out)
}
