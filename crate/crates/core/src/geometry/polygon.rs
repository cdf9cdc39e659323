use crate::error::{Error, Result};

use super::Cuboid;

pub type Point2 = [f64; 2];

/// Convex polygon with counter-clockwise vertices.
#[derive(Debug, Clone, PartialEq)]
pub struct ConvexPolygon2 {
    vertices: Vec<Point2>,
}

fn cross(o: Point2, a: Point2, b: Point2) -> f64 {
    (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])
}

fn dot(a: Point2, b: Point2) -> f64 {
    a[0] * b[0] + a[1] * b[1]
}

fn shoelace(vertices: &[Point2]) -> f64 {
    let n = vertices.len();
    (0..n)
        .map(|i| {
            let a = vertices[i];
            let b = vertices[(i + 1) % n];
            a[0] * b[1] - b[0] * a[1]
        })
        .sum::<f64>()
        / 2.0
}

impl ConvexPolygon2 {
    /// Validates and stores the polygon. Clockwise input is reversed;
    /// repeated and collinear vertices are dropped.
    pub fn new(vertices: Vec<Point2>) -> Result<Self> {
        if vertices.iter().flatten().any(|c| !c.is_finite()) {
            return Err(Error::InvalidGeometry("non-finite polygon vertex".into()));
        }
        let mut vertices = simplify(vertices);
        if vertices.len() < 3 {
            return Err(Error::InvalidGeometry("polygon needs at least 3 vertices".into()));
        }
        let area = shoelace(&vertices);
        if area < 0.0 {
            vertices.reverse();
        }
        let scale = bbox_diameter(&vertices);
        if area.abs() <= 1e-24 * scale * scale.max(1.0) {
            return Err(Error::InvalidGeometry("polygon has no area".into()));
        }
        let n = vertices.len();
        for i in 0..n {
            let turn = cross(vertices[i], vertices[(i + 1) % n], vertices[(i + 2) % n]);
            if turn < -1e-12 * scale * scale {
                return Err(Error::InvalidGeometry("polygon is not convex".into()));
            }
        }
        Ok(ConvexPolygon2 { vertices })
    }

    pub fn from_cuboid(c: &Cuboid) -> Result<Self> {
        if c.dim() != 2 {
            return Err(Error::Mismatch("only 2-d cuboids convert to polygons".into()));
        }
        let (lo, hi) = (c.lower(), c.upper());
        ConvexPolygon2::new(vec![[lo[0], lo[1]], [hi[0], lo[1]], [hi[0], hi[1]], [lo[0], hi[1]]])
    }

    pub fn vertices(&self) -> &[Point2] {
        &self.vertices
    }

    pub fn area(&self) -> f64 {
        shoelace(&self.vertices)
    }

    pub fn perimeter(&self) -> f64 {
        let n = self.vertices.len();
        (0..n)
            .map(|i| {
                let a = self.vertices[i];
                let b = self.vertices[(i + 1) % n];
                ((b[0] - a[0]).powi(2) + (b[1] - a[1]).powi(2)).sqrt()
            })
            .sum()
    }

    pub fn diameter(&self) -> f64 {
        let v = &self.vertices;
        let mut best = 0.0f64;
        for i in 0..v.len() {
            for j in i + 1..v.len() {
                best = best.max(((v[i][0] - v[j][0]).powi(2) + (v[i][1] - v[j][1]).powi(2)).sqrt());
            }
        }
        best
    }

    /// `(min, max)` of `⟨y, u⟩` over the polygon.
    pub fn support(&self, u: Point2) -> (f64, f64) {
        self.vertices.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| {
            let s = dot(v, u);
            (lo.min(s), hi.max(s))
        })
    }

    pub fn width(&self, u: Point2) -> f64 {
        let (lo, hi) = self.support(u);
        hi - lo
    }

    /// Lexicographically smallest vertex (reference point for minus-sampling).
    pub fn lowest_vertex(&self) -> Point2 {
        *self
            .vertices
            .iter()
            .min_by(|a, b| a[0].total_cmp(&b[0]).then(a[1].total_cmp(&b[1])))
            .expect("polygon has vertices")
    }

    pub fn contains_point(&self, p: Point2, tol: f64) -> bool {
        let n = self.vertices.len();
        (0..n).all(|i| {
            let a = self.vertices[i];
            let b = self.vertices[(i + 1) % n];
            let len = ((b[0] - a[0]).powi(2) + (b[1] - a[1]).powi(2)).sqrt();
            cross(a, b, p) >= -tol * len
        })
    }

    /// Splits along the line `⟨y, u⟩ = offset`. Returns the parts with
    /// `⟨y, u⟩ ≤ offset` and `⟨y, u⟩ ≥ offset`; the crossing points are
    /// computed once and shared by both parts.
    pub fn split(&self, u: Point2, offset: f64) -> Option<(ConvexPolygon2, ConvexPolygon2)> {
        let n = self.vertices.len();
        let dist: Vec<f64> = self.vertices.iter().map(|&v| dot(v, u) - offset).collect();
        let mut below = Vec::with_capacity(n + 2);
        let mut above = Vec::with_capacity(n + 2);
        for i in 0..n {
            let j = (i + 1) % n;
            let (a, b) = (self.vertices[i], self.vertices[j]);
            let (da, db) = (dist[i], dist[j]);
            if da <= 0.0 {
                below.push(a);
            }
            if da >= 0.0 {
                above.push(a);
            }
            if (da < 0.0 && db > 0.0) || (da > 0.0 && db < 0.0) {
                let s = da / (da - db);
                let p = [a[0] + s * (b[0] - a[0]), a[1] + s * (b[1] - a[1])];
                below.push(p);
                above.push(p);
            }
        }
        let below = ConvexPolygon2::new(below).ok()?;
        let above = ConvexPolygon2::new(above).ok()?;
        Some((below, above))
    }

    /// The part with `⟨y, u⟩ ≤ offset`, if it has positive area.
    pub fn clip_below(&self, u: Point2, offset: f64) -> Option<ConvexPolygon2> {
        let (lo, hi) = self.support(u);
        if offset >= hi {
            return Some(self.clone());
        }
        if offset <= lo {
            return None;
        }
        self.split(u, offset).map(|(below, _)| below)
    }

    /// Inner parallel set at distance `margin` (the eroded polygon).
    pub fn eroded(&self, margin: f64) -> Option<ConvexPolygon2> {
        let n = self.vertices.len();
        let mut current = self.clone();
        for i in 0..n {
            let a = self.vertices[i];
            let b = self.vertices[(i + 1) % n];
            let len = ((b[0] - a[0]).powi(2) + (b[1] - a[1]).powi(2)).sqrt();
            // Outward normal of a counter-clockwise edge.
            let normal = [(b[1] - a[1]) / len, -(b[0] - a[0]) / len];
            current = current.clip_below(normal, dot(a, normal) - margin)?;
        }
        Some(current)
    }
}

fn bbox_diameter(v: &[Point2]) -> f64 {
    let (mut x0, mut x1, mut y0, mut y1) = (f64::MAX, f64::MIN, f64::MAX, f64::MIN);
    for p in v {
        x0 = x0.min(p[0]);
        x1 = x1.max(p[0]);
        y0 = y0.min(p[1]);
        y1 = y1.max(p[1]);
    }
    ((x1 - x0).powi(2) + (y1 - y0).powi(2)).sqrt()
}

/// Drops consecutive near-duplicate vertices and vertices on a straight run.
fn simplify(vertices: Vec<Point2>) -> Vec<Point2> {
    if vertices.len() < 3 {
        return vertices;
    }
    let scale = bbox_diameter(&vertices).max(f64::MIN_POSITIVE);
    let eps = 1e-13 * scale;
    let mut out: Vec<Point2> = Vec::with_capacity(vertices.len());
    for v in vertices {
        if let Some(last) = out.last() {
            if (last[0] - v[0]).abs() <= eps && (last[1] - v[1]).abs() <= eps {
                continue;
            }
        }
        out.push(v);
    }
    while out.len() > 1 {
        let (first, last) = (out[0], out[out.len() - 1]);
        if (first[0] - last[0]).abs() <= eps && (first[1] - last[1]).abs() <= eps {
            out.pop();
        } else {
            break;
        }
    }
    let mut changed = true;
    while changed && out.len() >= 3 {
        changed = false;
        let n = out.len();
        for i in 0..n {
            let prev = out[(i + n - 1) % n];
            let next = out[(i + 1) % n];
            if cross(prev, out[i], next).abs() <= 1e-14 * scale * scale {
                out.remove(i);
                changed = true;
                break;
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn triangle() -> ConvexPolygon2 {
        ConvexPolygon2::new(vec![[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]]).unwrap()
    }

    #[test]
    fn triangle_split_by_vertical_line() {
        let (left, right) = triangle().split([1.0, 0.0], 0.5).unwrap();
        assert!((left.area() - 0.375).abs() < 1e-15);
        assert!((right.area() - 0.125).abs() < 1e-15);
    }

    #[test]
    fn clockwise_input_is_reoriented() {
        let p = ConvexPolygon2::new(vec![[0.0, 0.0], [0.0, 1.0], [1.0, 0.0]]).unwrap();
        assert!(p.area() > 0.0);
    }

    #[test]
    fn rejects_nonconvex_and_flat() {
        let dart = vec![[0.0, 0.0], [2.0, 0.0], [0.5, 0.5], [0.0, 2.0]];
        assert!(ConvexPolygon2::new(dart).is_err());
        assert!(ConvexPolygon2::new(vec![[0.0, 0.0], [1.0, 0.0], [2.0, 0.0]]).is_err());
        assert!(ConvexPolygon2::new(vec![[0.0, 0.0], [1.0, 0.0]]).is_err());
    }

    #[test]
    fn split_through_vertex_keeps_shared_vertex() {
        let sq = ConvexPolygon2::new(vec![[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]]).unwrap();
        let u = [std::f64::consts::FRAC_1_SQRT_2, std::f64::consts::FRAC_1_SQRT_2];
        let (a, b) = sq.split(u, std::f64::consts::FRAC_1_SQRT_2).unwrap();
        assert_eq!(a.vertices().len(), 3);
        assert_eq!(b.vertices().len(), 3);
        assert!((a.area() + b.area() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn line_missing_the_polygon_gives_none() {
        assert!(triangle().split([1.0, 0.0], 2.0).is_none());
        assert!(triangle().split([1.0, 0.0], 0.0).is_none());
    }

    #[test]
    fn erosion_of_square() {
        let sq = ConvexPolygon2::new(vec![[0.0, 0.0], [4.0, 0.0], [4.0, 4.0], [0.0, 4.0]]).unwrap();
        let e = sq.eroded(1.0).unwrap();
        assert!((e.area() - 4.0).abs() < 1e-12);
        assert!(sq.eroded(2.0).is_none());
    }

    #[test]
    fn support_and_width() {
        let t = triangle();
        assert_eq!(t.support([1.0, 0.0]), (0.0, 1.0));
        let u = [std::f64::consts::FRAC_1_SQRT_2, std::f64::consts::FRAC_1_SQRT_2];
        assert!((t.width(u) - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-15);
        assert_eq!(t.lowest_vertex(), [0.0, 0.0]);
    }
}
