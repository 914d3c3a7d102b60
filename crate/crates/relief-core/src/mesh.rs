//! Watertight triangle mesh generation from height fields, plus the
//! independent topology/orientation validator.
//!
//! The generated solid has a tessellated top surface (two triangles per
//! grid cell, split along the fixed (i,j) -> (i+1,j+1) diagonal), a
//! mirrored flat bottom at z = 0, and perimeter walls. For a closed
//! genus-0 shell the Euler characteristic V - E + F is 2.

use crate::heightmap::HeightField;
use std::collections::HashMap;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum MeshError {
    #[error("height field is {rows}x{cols}; need at least 2x2")]
    DegenerateGrid { rows: usize, cols: usize },
    #[error("all heights and the base are zero; the solid would be flat")]
    FlatSolid,
    #[error("degenerate triangle (area below 1e-12)")]
    DegenerateTriangle,
}

pub type Point3 = [f64; 3];

/// Indexed triangle mesh with per-facet unit outward normals.
/// Facets wind counterclockwise viewed from outside.
#[derive(Debug, Clone, PartialEq)]
pub struct TriangleMesh {
    pub vertices: Vec<Point3>,
    pub facets: Vec<[u32; 3]>,
    pub normals: Vec<Point3>,
}

impl TriangleMesh {
    pub fn empty() -> Self {
        TriangleMesh {
            vertices: Vec::new(),
            facets: Vec::new(),
            normals: Vec::new(),
        }
    }

    pub fn facet_count(&self) -> usize {
        self.facets.len()
    }

    pub fn max_z(&self) -> f64 {
        self.vertices
            .iter()
            .map(|v| v[2])
            .fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn facet_vertices(&self, facet: usize) -> [Point3; 3] {
        let [a, b, c] = self.facets[facet];
        [
            self.vertices[a as usize],
            self.vertices[b as usize],
            self.vertices[c as usize],
        ]
    }
}

fn sub(a: Point3, b: Point3) -> Point3 {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

fn cross(a: Point3, b: Point3) -> Point3 {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

fn norm(a: Point3) -> f64 {
    (a[0] * a[0] + a[1] * a[1] + a[2] * a[2]).sqrt()
}

/// Unit normal of the triangle (v0, v1, v2): normalized
/// `(v1 - v0) x (v2 - v0)`. Errors if the triangle area is below 1e-12.
pub fn facet_normal(v0: Point3, v1: Point3, v2: Point3) -> Result<Point3, MeshError> {
    let c = cross(sub(v1, v0), sub(v2, v0));
    let len = norm(c);
    // Area is len / 2.
    if len / 2.0 <= 1e-12 {
        return Err(MeshError::DegenerateTriangle);
    }
    Ok([c[0] / len, c[1] / len, c[2] / len])
}

fn push_facet(mesh: &mut TriangleMesh, a: u32, b: u32, c: u32) {
    let v0 = mesh.vertices[a as usize];
    let v1 = mesh.vertices[b as usize];
    let v2 = mesh.vertices[c as usize];
    let normal = facet_normal(v0, v1, v2).unwrap_or([0.0, 0.0, 0.0]);
    mesh.facets.push([a, b, c]);
    mesh.normals.push(normal);
}

/// Extrude a height field into a closed solid sitting on the build plate
/// z = 0. Top vertex z values are `base + height`.
///
/// Facet count is exactly `4(cols-1)(rows-1) + 4(cols-1) + 4(rows-1)`.
pub fn heightfield_to_mesh(hf: &HeightField) -> Result<TriangleMesh, MeshError> {
    let (rows, cols) = (hf.rows(), hf.cols());
    if rows < 2 || cols < 2 {
        return Err(MeshError::DegenerateGrid { rows, cols });
    }
    if hf.base == 0.0 && hf.max_height() == 0.0 {
        return Err(MeshError::FlatSolid);
    }

    let mut mesh = TriangleMesh::empty();
    mesh.vertices.reserve(2 * rows * cols);
    // Top grid first, bottom grid after.
    for i in 0..rows {
        for j in 0..cols {
            mesh.vertices.push([
                j as f64 * hf.dx,
                i as f64 * hf.dy,
                hf.base + hf.height(i, j),
            ]);
        }
    }
    for i in 0..rows {
        for j in 0..cols {
            mesh.vertices.push([j as f64 * hf.dx, i as f64 * hf.dy, 0.0]);
        }
    }
    let top = |i: usize, j: usize| (i * cols + j) as u32;
    let bottom = |i: usize, j: usize| (rows * cols + i * cols + j) as u32;

    // Top surface, split along the (i,j) -> (i+1,j+1) diagonal.
    for i in 0..rows - 1 {
        for j in 0..cols - 1 {
            push_facet(&mut mesh, top(i, j), top(i, j + 1), top(i + 1, j + 1));
            push_facet(&mut mesh, top(i, j), top(i + 1, j + 1), top(i + 1, j));
        }
    }
    // Bottom surface, mirrored winding so the normal points down.
    for i in 0..rows - 1 {
        for j in 0..cols - 1 {
            push_facet(&mut mesh, bottom(i, j), bottom(i + 1, j + 1), bottom(i, j + 1));
            push_facet(&mut mesh, bottom(i, j), bottom(i + 1, j), bottom(i + 1, j + 1));
        }
    }
    // Perimeter walls. Walk the boundary counterclockwise (viewed from
    // +z); for each directed edge P -> Q the quad (top P, top Q,
    // bottom Q, bottom P) winds outward as two triangles.
    let wall = |p: (usize, usize), q: (usize, usize), mesh: &mut TriangleMesh| {
        let (tp, tq) = (top(p.0, p.1), top(q.0, q.1));
        let (bp, bq) = (bottom(p.0, p.1), bottom(q.0, q.1));
        push_facet(mesh, tp, bp, bq);
        push_facet(mesh, tp, bq, tq);
    };
    for j in 0..cols - 1 {
        wall((0, j), (0, j + 1), &mut mesh);
    }
    for i in 0..rows - 1 {
        wall((i, cols - 1), (i + 1, cols - 1), &mut mesh);
    }
    for j in (0..cols - 1).rev() {
        wall((rows - 1, j + 1), (rows - 1, j), &mut mesh);
    }
    for i in (0..rows - 1).rev() {
        wall((i + 1, 0), (i, 0), &mut mesh);
    }

    Ok(mesh)
}

/// Topology and orientation findings for a mesh. An empty defect set plus
/// Euler characteristic 2 means a watertight single shell.
#[derive(Debug, Clone, Default)]
pub struct ValidationReport {
    /// Undirected edges used by exactly one facet.
    pub boundary_edges: Vec<(u32, u32)>,
    /// Undirected edges used by three or more facets.
    pub non_manifold_edges: Vec<(u32, u32)>,
    /// Edges whose two facets traverse them in the same direction.
    pub winding_conflicts: Vec<(u32, u32)>,
    /// Facet indices whose stored normal deviates from the computed one
    /// by more than 1e-6.
    pub normal_mismatches: Vec<usize>,
    pub euler_characteristic: i64,
    pub vertex_count: usize,
    pub edge_count: usize,
    pub facet_count: usize,
}

impl ValidationReport {
    pub fn defect_count(&self) -> usize {
        self.boundary_edges.len()
            + self.non_manifold_edges.len()
            + self.winding_conflicts.len()
            + self.normal_mismatches.len()
    }

    pub fn is_watertight(&self) -> bool {
        self.defect_count() == 0 && self.euler_characteristic == 2
    }
}

/// Check manifoldness, winding consistency, stored-normal fidelity, and
/// the Euler characteristic. Independent of the generator: works from the
/// facet list alone.
pub fn validate(mesh: &TriangleMesh) -> ValidationReport {
    // For each undirected edge, how often it is traversed as (min, max)
    // and as (max, min).
    let mut edges: HashMap<(u32, u32), (u32, u32)> = HashMap::new();
    for facet in &mesh.facets {
        for e in 0..3 {
            let a = facet[e];
            let b = facet[(e + 1) % 3];
            let entry = edges.entry((a.min(b), a.max(b))).or_insert((0, 0));
            if a < b {
                entry.0 += 1;
            } else {
                entry.1 += 1;
            }
        }
    }

    let mut report = ValidationReport {
        vertex_count: mesh.vertices.len(),
        edge_count: edges.len(),
        facet_count: mesh.facets.len(),
        ..Default::default()
    };
    for (&edge, &(fwd, rev)) in &edges {
        match fwd + rev {
            1 => report.boundary_edges.push(edge),
            2 => {
                if fwd != 1 {
                    report.winding_conflicts.push(edge);
                }
            }
            _ => report.non_manifold_edges.push(edge),
        }
    }
    report.boundary_edges.sort_unstable();
    report.non_manifold_edges.sort_unstable();
    report.winding_conflicts.sort_unstable();

    for idx in 0..mesh.facets.len() {
        let [v0, v1, v2] = mesh.facet_vertices(idx);
        if let Ok(computed) = facet_normal(v0, v1, v2) {
            let stored = mesh.normals[idx];
            let diff = norm(sub(stored, computed));
            if diff > 1e-6 {
                report.normal_mismatches.push(idx);
            }
        }
    }

    report.euler_characteristic =
        mesh.vertices.len() as i64 - edges.len() as i64 + mesh.facets.len() as i64;
    report
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::heightmap::HeightField;
    use crate::matrix::Matrix;

    fn constant_field(rows: usize, cols: usize, h: f64, base: f64) -> HeightField {
        HeightField::from_heights(Matrix::constant(rows, cols, h), base).unwrap()
    }

    #[test]
    fn unit_box_topology() {
        let mesh = heightfield_to_mesh(&constant_field(2, 2, 1.0, 0.0)).unwrap();
        assert_eq!(mesh.vertices.len(), 8);
        assert_eq!(mesh.facet_count(), 12);
        let report = validate(&mesh);
        assert!(report.is_watertight(), "{report:?}");
        assert_eq!(report.euler_characteristic, 2);
        assert_eq!(report.edge_count, 18);
    }

    #[test]
    fn three_by_three_facet_count() {
        let mesh = heightfield_to_mesh(&constant_field(3, 3, 2.0, 0.5)).unwrap();
        assert_eq!(mesh.facet_count(), 32);
        assert!(validate(&mesh).is_watertight());
    }

    #[test]
    fn flat_solid_rejected() {
        let hf = constant_field(2, 2, 0.0, 0.0);
        assert!(matches!(
            heightfield_to_mesh(&hf),
            Err(MeshError::FlatSolid)
        ));
    }

    #[test]
    fn degenerate_grid_rejected() {
        let hf = constant_field(1, 5, 1.0, 0.0);
        assert!(matches!(
            heightfield_to_mesh(&hf),
            Err(MeshError::DegenerateGrid { .. })
        ));
    }

    #[test]
    fn top_z_is_base_plus_height() {
        let m = Matrix::from_vec(2, 2, vec![1.0, 2.0, 3.0, 4.0]);
        let hf = HeightField::from_heights(m, 0.5).unwrap();
        let mesh = heightfield_to_mesh(&hf).unwrap();
        let expected = [1.5, 2.5, 3.5, 4.5];
        for (v, e) in mesh.vertices[..4].iter().zip(expected) {
            assert_eq!(v[2], e);
        }
    }

    #[test]
    fn facet_normal_axis_aligned() {
        let n = facet_normal([0.0, 0.0, 0.0], [1.0, 0.0, 0.0], [0.0, 1.0, 0.0]).unwrap();
        assert_eq!(n, [0.0, 0.0, 1.0]);
    }

    #[test]
    fn facet_normal_of_flipped_wall_block() {
        // With the vertex order (0,40,0), (0,40,40), (40,40,0) the
        // right-hand rule gives +y; the unflipped order gives -y.
        let n = facet_normal([0.0, 40.0, 0.0], [0.0, 40.0, 40.0], [40.0, 40.0, 0.0]).unwrap();
        assert!((n[1] - 1.0).abs() < 1e-12);
        let n = facet_normal([0.0, 40.0, 0.0], [40.0, 40.0, 0.0], [0.0, 40.0, 40.0]).unwrap();
        assert!((n[1] + 1.0).abs() < 1e-12);
    }

    #[test]
    fn facet_normal_collinear_errors() {
        assert!(matches!(
            facet_normal([0.0, 0.0, 0.0], [1.0, 1.0, 1.0], [2.0, 2.0, 2.0]),
            Err(MeshError::DegenerateTriangle)
        ));
    }

    #[test]
    fn deleting_a_facet_leaves_three_boundary_edges() {
        let mut mesh = heightfield_to_mesh(&constant_field(2, 2, 1.0, 0.0)).unwrap();
        mesh.facets.pop();
        mesh.normals.pop();
        let report = validate(&mesh);
        assert_eq!(report.boundary_edges.len(), 3);
        assert!(!report.is_watertight());
    }

    #[test]
    fn single_triangle_report() {
        let mesh = TriangleMesh {
            vertices: vec![[0.0, 0.0, 0.0], [1.0, 0.0, 0.0], [0.0, 1.0, 0.0]],
            facets: vec![[0, 1, 2]],
            normals: vec![[0.0, 0.0, 1.0]],
        };
        let report = validate(&mesh);
        assert_eq!(report.boundary_edges.len(), 3);
        assert_eq!(report.euler_characteristic, 3 - 3 + 1);
    }

    #[test]
    fn winding_conflict_detected() {
        let mut mesh = heightfield_to_mesh(&constant_field(2, 2, 1.0, 0.0)).unwrap();
        // Flip one facet's winding.
        mesh.facets[0].swap(1, 2);
        let report = validate(&mesh);
        assert!(!report.winding_conflicts.is_empty());
    }

    #[test]
    fn normal_mismatch_detected() {
        let mut mesh = heightfield_to_mesh(&constant_field(2, 2, 1.0, 0.0)).unwrap();
        mesh.normals[3] = [1.0, 0.0, 0.0];
        let report = validate(&mesh);
        assert_eq!(report.normal_mismatches, vec![3]);
    }
}
