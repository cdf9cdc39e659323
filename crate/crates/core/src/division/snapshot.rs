use std::collections::HashSet;

use super::{Cell, EventLog};
use crate::error::{Error, Result};
use crate::geometry::{CellGeometry, ConvexPolygon2, Cuboid};

/// Relative tolerance for the volume checks.
const VOLUME_TOL: f64 = 1e-9;

/// The cells alive at one time.
#[derive(Debug, Clone, PartialEq)]
pub struct TessellationSnapshot {
    pub time: f64,
    pub cells: Vec<Cell>,
}

/// Cells of `log` alive at `t`, i.e. with `birth ≤ t < death`.
pub fn snapshot_at(log: &EventLog, t: f64) -> Result<TessellationSnapshot> {
    if !(t >= 0.0 && t <= log.horizon()) {
        return Err(Error::OutOfRange(format!("time {t} not in [0, {}]", log.horizon())));
    }
    Ok(TessellationSnapshot {
        time: t,
        cells: log.cells().iter().filter(|c| c.alive_at(t)).cloned().collect(),
    })
}

impl TessellationSnapshot {
    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    pub fn total_volume(&self) -> f64 {
        self.cells.iter().map(|c| c.geometry.volume()).sum()
    }

    /// Checks that the cells tile `window`: every cell lies in the window,
    /// interiors are pairwise disjoint and the volumes add up to the
    /// window's. Quadratic in the number of cells.
    pub fn check_tiling(&self, window: &CellGeometry) -> Result<()> {
        let scale = window.diameter();
        let tol = 1e-9 * scale;
        let wv = window.volume();
        let total = self.total_volume();
        if (total - wv).abs() > VOLUME_TOL * wv {
            return Err(Error::InvalidGeometry(format!("cell volumes sum to {total}, window has {wv}")));
        }
        for c in &self.cells {
            if !geometry_within(&c.geometry, window, tol) {
                return Err(Error::InvalidGeometry(format!("cell {} leaves the window", c.id)));
            }
        }
        for (i, a) in self.cells.iter().enumerate() {
            for b in &self.cells[i + 1..] {
                if interiors_overlap(&a.geometry, &b.geometry, tol) {
                    return Err(Error::InvalidGeometry(format!("cells {} and {} overlap", a.id, b.id)));
                }
            }
        }
        Ok(())
    }

    /// True when every cell here lies inside a cell of `coarser`, found by
    /// following parent links in `log`.
    pub fn refines(&self, coarser: &TessellationSnapshot, log: &EventLog) -> bool {
        if coarser.time > self.time {
            return false;
        }
        let ids: HashSet<usize> = coarser.cells.iter().map(|c| c.id).collect();
        let cells = log.cells();
        self.cells.iter().all(|c| {
            let mut cur = &cells[c.id];
            while cur.birth > coarser.time {
                match cur.parent {
                    Some(p) => cur = &cells[p],
                    None => return false,
                }
            }
            ids.contains(&cur.id) && geometry_within(&c.geometry, &cur.geometry, 1e-9 * cur.geometry.diameter())
        })
    }
}

fn cuboid_within(a: &Cuboid, b: &Cuboid, tol: f64) -> bool {
    (0..a.dim()).all(|k| a.lower()[k] >= b.lower()[k] - tol && a.upper()[k] <= b.upper()[k] + tol)
}

fn geometry_within(a: &CellGeometry, b: &CellGeometry, tol: f64) -> bool {
    match (a, b) {
        (CellGeometry::Cuboid(a), CellGeometry::Cuboid(b)) => cuboid_within(a, b, tol),
        _ => match (a.to_polygon(), b.to_polygon()) {
            (Ok(pa), Ok(pb)) => pa.vertices().iter().all(|&v| pb.contains_point(v, tol)),
            _ => false,
        },
    }
}

fn interiors_overlap(a: &CellGeometry, b: &CellGeometry, tol: f64) -> bool {
    match (a, b) {
        (CellGeometry::Cuboid(a), CellGeometry::Cuboid(b)) => {
            (0..a.dim()).all(|k| a.lower()[k].max(b.lower()[k]) < a.upper()[k].min(b.upper()[k]) - tol)
        }
        _ => match (a.to_polygon(), b.to_polygon()) {
            (Ok(pa), Ok(pb)) => !has_separating_edge(&pa, &pb, tol) && !has_separating_edge(&pb, &pa, tol),
            _ => true,
        },
    }
}

/// Separating-axis test over the edge normals of `p`.
fn has_separating_edge(p: &ConvexPolygon2, q: &ConvexPolygon2, tol: f64) -> bool {
    let vs = p.vertices();
    (0..vs.len()).any(|i| {
        let a = vs[i];
        let b = vs[(i + 1) % vs.len()];
        let n = [b[1] - a[1], a[0] - b[0]];
        let len = n[0].hypot(n[1]);
        let u = [n[0] / len, n[1] / len];
        let (plo, phi) = p.support(u);
        let (qlo, qhi) = q.support(u);
        phi <= qlo + tol || qhi <= plo + tol
    })
}
