//! STL reading and writing, ASCII and binary.
//!
//! Binary layout is the de facto standard: 80-byte header, little-endian
//! u32 facet count, then 50 bytes per facet (12 little-endian f32 values
//! for normal and three vertices, plus a zero u16 attribute). File size
//! is exactly `84 + 50 * facets` bytes.

use crate::mesh::{facet_normal, Point3, TriangleMesh};
use std::collections::HashMap;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum StlError {
    #[error("file of {0} bytes is below the 84-byte binary minimum and not ASCII")]
    TooShort(usize),
    #[error("binary size mismatch: header promises {expected} bytes, file has {actual}")]
    SizeMismatch { expected: usize, actual: usize },
    #[error("ASCII keyword violation near token {index}: expected {expected:?}, found {found:?}")]
    KeywordViolation {
        index: usize,
        expected: &'static str,
        found: String,
    },
    #[error("non-finite coordinate near token {0}")]
    NonFiniteValue(usize),
    #[error("unexpected end of ASCII input")]
    UnexpectedEnd,
}

/// Format a coordinate: shortest f64 round-trip text, always with a
/// decimal point so integral values print as "40.0", not "40".
fn fmt_coord(x: f64) -> String {
    let s = format!("{x}");
    if s.contains(['.', 'e', 'E']) {
        s
    } else {
        format!("{s}.0")
    }
}

/// Serialize as ASCII STL. Facets use the classic keyword block:
/// `facet normal` / `outer loop` / three `vertex` lines / `endloop` /
/// `endfacet`.
pub fn write_stl_ascii(mesh: &TriangleMesh, name: &str) -> Vec<u8> {
    let mut out = String::new();
    out.push_str(&format!("solid {name}\n"));
    for (facet, normal) in mesh.facets.iter().zip(&mesh.normals) {
        out.push_str(&format!(
            "  facet normal {} {} {}\n",
            fmt_coord(normal[0]),
            fmt_coord(normal[1]),
            fmt_coord(normal[2])
        ));
        out.push_str("    outer loop\n");
        for &vi in facet {
            let v = mesh.vertices[vi as usize];
            out.push_str(&format!(
                "      vertex {} {} {}\n",
                fmt_coord(v[0]),
                fmt_coord(v[1]),
                fmt_coord(v[2])
            ));
        }
        out.push_str("    endloop\n");
        out.push_str("  endfacet\n");
    }
    out.push_str(&format!("endsolid {name}\n"));
    out.into_bytes()
}

/// Serialize as binary STL. The header text is truncated or zero-padded
/// to 80 bytes; if it would begin with the bytes "solid" the first byte
/// is replaced so readers cannot mistake the file for ASCII.
pub fn write_stl_binary(mesh: &TriangleMesh, header: &str) -> Vec<u8> {
    let mut head = [0u8; 80];
    for (dst, src) in head.iter_mut().zip(header.bytes()) {
        *dst = src;
    }
    if head.starts_with(b"solid") {
        head[0] = b'#';
    }
    let mut out = Vec::with_capacity(84 + 50 * mesh.facets.len());
    out.extend_from_slice(&head);
    out.extend_from_slice(&(mesh.facets.len() as u32).to_le_bytes());
    for (facet, normal) in mesh.facets.iter().zip(&mesh.normals) {
        for &c in normal {
            out.extend_from_slice(&(c as f32).to_le_bytes());
        }
        for &vi in facet {
            for &c in &mesh.vertices[vi as usize] {
                out.extend_from_slice(&(c as f32).to_le_bytes());
            }
        }
        out.extend_from_slice(&0u16.to_le_bytes());
    }
    out
}

/// Parse either ASCII or binary STL into an indexed mesh. Bit-identical
/// vertices are merged; a zero stored normal is replaced with the
/// recomputed one where the triangle is nondegenerate.
pub fn read_stl(bytes: &[u8]) -> Result<TriangleMesh, StlError> {
    if bytes.starts_with(b"solid") {
        return read_stl_ascii(bytes);
    }
    read_stl_binary(bytes)
}

struct MeshBuilder {
    mesh: TriangleMesh,
    index: HashMap<[u64; 3], u32>,
}

impl MeshBuilder {
    fn new() -> Self {
        MeshBuilder {
            mesh: TriangleMesh::empty(),
            index: HashMap::new(),
        }
    }

    fn vertex(&mut self, p: Point3) -> u32 {
        let key = [p[0].to_bits(), p[1].to_bits(), p[2].to_bits()];
        *self.index.entry(key).or_insert_with(|| {
            self.mesh.vertices.push(p);
            (self.mesh.vertices.len() - 1) as u32
        })
    }

    fn facet(&mut self, normal: Point3, verts: [Point3; 3]) {
        let normal = if normal.iter().all(|c| c.abs() < 1e-12) {
            facet_normal(verts[0], verts[1], verts[2]).unwrap_or([0.0, 0.0, 0.0])
        } else {
            normal
        };
        let idx = [
            self.vertex(verts[0]),
            self.vertex(verts[1]),
            self.vertex(verts[2]),
        ];
        self.mesh.facets.push(idx);
        self.mesh.normals.push(normal);
    }
}

fn read_stl_binary(bytes: &[u8]) -> Result<TriangleMesh, StlError> {
    if bytes.len() < 84 {
        return Err(StlError::TooShort(bytes.len()));
    }
    let count = u32::from_le_bytes(bytes[80..84].try_into().unwrap()) as usize;
    let expected = 84 + 50 * count;
    if bytes.len() != expected {
        return Err(StlError::SizeMismatch {
            expected,
            actual: bytes.len(),
        });
    }
    let mut builder = MeshBuilder::new();
    for f in 0..count {
        let record = &bytes[84 + 50 * f..84 + 50 * f + 48];
        let mut floats = [0.0f64; 12];
        for (i, value) in floats.iter_mut().enumerate() {
            let v = f32::from_le_bytes(record[4 * i..4 * i + 4].try_into().unwrap());
            if !v.is_finite() {
                return Err(StlError::NonFiniteValue(f * 12 + i));
            }
            *value = v as f64;
        }
        builder.facet(
            [floats[0], floats[1], floats[2]],
            [
                [floats[3], floats[4], floats[5]],
                [floats[6], floats[7], floats[8]],
                [floats[9], floats[10], floats[11]],
            ],
        );
    }
    Ok(builder.mesh)
}

struct Tokens<'a> {
    iter: std::str::SplitWhitespace<'a>,
    index: usize,
}

impl<'a> Tokens<'a> {
    fn next(&mut self) -> Result<&'a str, StlError> {
        self.index += 1;
        self.iter.next().ok_or(StlError::UnexpectedEnd)
    }

    fn expect(&mut self, keyword: &'static str) -> Result<(), StlError> {
        let tok = self.next()?;
        if tok != keyword {
            return Err(StlError::KeywordViolation {
                index: self.index,
                expected: keyword,
                found: tok.to_string(),
            });
        }
        Ok(())
    }

    fn number(&mut self) -> Result<f64, StlError> {
        let tok = self.next()?;
        let v: f64 = tok.parse().map_err(|_| StlError::KeywordViolation {
            index: self.index,
            expected: "number",
            found: tok.to_string(),
        })?;
        if !v.is_finite() {
            return Err(StlError::NonFiniteValue(self.index));
        }
        Ok(v)
    }

    fn point(&mut self) -> Result<Point3, StlError> {
        Ok([self.number()?, self.number()?, self.number()?])
    }
}

fn read_stl_ascii(bytes: &[u8]) -> Result<TriangleMesh, StlError> {
    let text = std::str::from_utf8(bytes).map_err(|e| StlError::KeywordViolation {
        index: e.valid_up_to(),
        expected: "UTF-8 text",
        found: "invalid byte".to_string(),
    })?;
    // First line: "solid" plus an optional name (may contain spaces).
    let (first_line, rest) = text.split_once('\n').unwrap_or((text, ""));
    debug_assert!(first_line.trim_start().starts_with("solid"));
    let mut tokens = Tokens {
        iter: rest.split_whitespace(),
        index: 0,
    };
    let mut builder = MeshBuilder::new();
    loop {
        let tok = tokens.next()?;
        match tok {
            "facet" => {
                tokens.expect("normal")?;
                let normal = tokens.point()?;
                tokens.expect("outer")?;
                tokens.expect("loop")?;
                let mut verts = [[0.0; 3]; 3];
                for v in &mut verts {
                    tokens.expect("vertex")?;
                    *v = tokens.point()?;
                }
                tokens.expect("endloop")?;
                tokens.expect("endfacet")?;
                builder.facet(normal, verts);
            }
            "endsolid" => break,
            other => {
                return Err(StlError::KeywordViolation {
                    index: tokens.index,
                    expected: "facet or endsolid",
                    found: other.to_string(),
                })
            }
        }
    }
    Ok(builder.mesh)
}
