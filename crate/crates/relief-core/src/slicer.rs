//! Planar slicing: intersect a mesh with horizontal planes and stitch
//! the intersection segments into the closed loops a printer would trace.
//!
//! Vertices lying exactly on a plane are classified "above" (half-open
//! convention), so no zero-length or duplicate segments are produced.
//! Segments are oriented with the solid interior to the left, which makes
//! outer boundaries counterclockwise after stitching.

use crate::mesh::TriangleMesh;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum SliceError {
    #[error("open chain at ({0}, {1}): input not watertight or tolerance too small")]
    OpenChain(f64, f64),
    #[error("layer thickness must be positive, got {0}")]
    NonPositiveStep(f64),
    #[error("stitch tolerance must be positive, got {0}")]
    NonPositiveTolerance(f64),
}

pub type Point2 = [f64; 2];

/// Directed in-plane segment from `a` to `b`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Segment {
    pub a: Point2,
    pub b: Point2,
}

/// All closed loops of one layer. Outer boundaries run counterclockwise.
#[derive(Debug, Clone, PartialEq)]
pub struct SlicePolygon {
    pub z: f64,
    /// Each loop lists its vertices once; closure is implicit.
    pub loops: Vec<Vec<Point2>>,
}

impl SlicePolygon {
    /// Sum of all loop perimeters, in mm.
    pub fn total_length(&self) -> f64 {
        self.loops.iter().map(|l| loop_perimeter(l)).sum()
    }
}

/// Perimeter of a closed loop given its vertices.
pub fn loop_perimeter(vertices: &[Point2]) -> f64 {
    if vertices.len() < 2 {
        return 0.0;
    }
    vertices
        .iter()
        .zip(vertices.iter().cycle().skip(1))
        .map(|(p, q)| ((q[0] - p[0]).powi(2) + (q[1] - p[1]).powi(2)).sqrt())
        .sum()
}

/// Twice the signed area of a closed loop; positive for counterclockwise.
pub fn loop_signed_area(vertices: &[Point2]) -> f64 {
    vertices
        .iter()
        .zip(vertices.iter().cycle().skip(1))
        .map(|(p, q)| p[0] * q[1] - q[0] * p[1])
        .sum::<f64>()
        / 2.0
}

/// Interpolate the plane crossing on the edge between vertex indices
/// `i` and `j`. Evaluated with the lower index first so the two
/// triangles sharing an edge produce bit-identical points.
fn edge_crossing(mesh: &TriangleMesh, i: u32, j: u32, z: f64) -> Point2 {
    let (lo, hi) = (i.min(j), i.max(j));
    let p = mesh.vertices[lo as usize];
    let q = mesh.vertices[hi as usize];
    let t = (z - p[2]) / (q[2] - p[2]);
    [p[0] + t * (q[0] - p[0]), p[1] + t * (q[1] - p[1])]
}

/// Intersect every facet with the plane at `z`, one directed segment per
/// straddling triangle. Returns an empty list if the plane misses the mesh.
pub fn slice_at(mesh: &TriangleMesh, z: f64) -> Vec<Segment> {
    let mut segments = Vec::new();
    for (fi, facet) in mesh.facets.iter().enumerate() {
        let above: Vec<bool> = facet
            .iter()
            .map(|&vi| mesh.vertices[vi as usize][2] >= z)
            .collect();
        let n_above = above.iter().filter(|&&a| a).count();
        if n_above == 0 || n_above == 3 {
            continue;
        }
        let mut points = Vec::with_capacity(2);
        for e in 0..3 {
            let (i, j) = (facet[e], facet[(e + 1) % 3]);
            if above[e] != above[(e + 1) % 3] {
                points.push(edge_crossing(mesh, i, j, z));
            }
        }
        debug_assert_eq!(points.len(), 2);
        let (mut a, mut b) = (points[0], points[1]);
        // Orient with the interior on the left: the segment direction
        // should align with z_hat x n = (-n.y, n.x).
        let [v0, v1, v2] = mesh.facet_vertices(fi);
        let ex = [v1[0] - v0[0], v1[1] - v0[1], v1[2] - v0[2]];
        let ey = [v2[0] - v0[0], v2[1] - v0[1], v2[2] - v0[2]];
        let n = [
            ex[1] * ey[2] - ex[2] * ey[1],
            ex[2] * ey[0] - ex[0] * ey[2],
        ];
        let d = [b[0] - a[0], b[1] - a[1]];
        if d[0] * (-n[1]) + d[1] * n[0] < 0.0 {
            std::mem::swap(&mut a, &mut b);
        }
        segments.push(Segment { a, b });
    }
    segments
}

/// Chain segments end-to-start into closed loops, using every segment
/// exactly once. Endpoints are matched within `tol` (hash grid with
/// neighbor lookup). Errors if a chain cannot be closed.
pub fn stitch_loops(segments: &[Segment], z: f64, tol: f64) -> Result<SlicePolygon, SliceError> {
    if !(tol > 0.0) {
        return Err(SliceError::NonPositiveTolerance(tol));
    }
    use std::collections::HashMap;
    let cell = |p: Point2| -> (i64, i64) {
        ((p[0] / tol).round() as i64, (p[1] / tol).round() as i64)
    };
    let mut starts: HashMap<(i64, i64), Vec<usize>> = HashMap::new();
    for (i, seg) in segments.iter().enumerate() {
        starts.entry(cell(seg.a)).or_default().push(i);
    }
    let close = |p: Point2, q: Point2| (p[0] - q[0]).abs() <= tol && (p[1] - q[1]).abs() <= tol;
    let take_next = |p: Point2, starts: &mut HashMap<(i64, i64), Vec<usize>>,
                         segments: &[Segment]|
     -> Option<usize> {
        let (cx, cy) = cell(p);
        for dx in -1..=1 {
            for dy in -1..=1 {
                if let Some(bucket) = starts.get_mut(&(cx + dx, cy + dy)) {
                    if let Some(pos) = bucket.iter().position(|&i| close(segments[i].a, p)) {
                        return Some(bucket.swap_remove(pos));
                    }
                }
            }
        }
        None
    };

    let mut used = vec![false; segments.len()];
    let mut loops = Vec::new();
    for start in 0..segments.len() {
        if used[start] {
            continue;
        }
        // Claim the seed segment by index so the chain walk never
        // re-enters it through the hash grid.
        let bucket = starts.get_mut(&cell(segments[start].a)).expect("seed bucket");
        let pos = bucket.iter().position(|&i| i == start).expect("seed entry");
        bucket.swap_remove(pos);
        used[start] = true;
        let mut chain = vec![segments[start].a];
        let mut tip = segments[start].b;
        loop {
            if close(tip, chain[0]) {
                break;
            }
            let next = take_next(tip, &mut starts, segments)
                .ok_or(SliceError::OpenChain(tip[0], tip[1]))?;
            used[next] = true;
            chain.push(segments[next].a);
            tip = segments[next].b;
        }
        if chain.len() >= 3 {
            loops.push(chain);
        }
    }
    Ok(SlicePolygon { z, loops })
}

/// Slice at mid-layer planes `z = dz/2 + k dz` up to the mesh top,
/// returning the nonempty layers in ascending z.
pub fn slice_all(mesh: &TriangleMesh, dz: f64) -> Result<Vec<SlicePolygon>, SliceError> {
    if !(dz > 0.0) {
        return Err(SliceError::NonPositiveStep(dz));
    }
    let zmax = mesh.max_z();
    let mut layers = Vec::new();
    let mut k = 0u64;
    loop {
        let bottom = k as f64 * dz;
        if bottom >= zmax {
            break;
        }
        // Mid-layer plane; the final partial layer is sampled at the
        // midpoint of the part that actually intersects the solid.
        let z = (bottom + dz / 2.0).min((bottom + zmax) / 2.0);
        let segments = slice_at(mesh, z);
        if !segments.is_empty() {
            layers.push(stitch_loops(&segments, z, 1e-6)?);
        }
        k += 1;
    }
    Ok(layers)
}

/// Render one layer as a standalone SVG document, 1 user unit = 1 mm.
pub fn layer_to_svg(layer: &SlicePolygon) -> String {
    let mut min = [f64::INFINITY; 2];
    let mut max = [f64::NEG_INFINITY; 2];
    for l in &layer.loops {
        for p in l {
            for k in 0..2 {
                min[k] = min[k].min(p[k]);
                max[k] = max[k].max(p[k]);
            }
        }
    }
    if layer.loops.is_empty() {
        min = [0.0, 0.0];
        max = [1.0, 1.0];
    }
    let pad = 1.0;
    let mut svg = format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"{} {} {} {}\">\n",
        min[0] - pad,
        min[1] - pad,
        max[0] - min[0] + 2.0 * pad,
        max[1] - min[1] + 2.0 * pad
    );
    for l in &layer.loops {
        svg.push_str("  <path d=\"");
        for (i, p) in l.iter().enumerate() {
            let cmd = if i == 0 { 'M' } else { 'L' };
            svg.push_str(&format!("{cmd}{} {} ", p[0], p[1]));
        }
        svg.push_str("Z\" fill=\"none\" stroke=\"black\" stroke-width=\"0.2\"/>\n");
    }
    svg.push_str("</svg>\n");
    svg
}
