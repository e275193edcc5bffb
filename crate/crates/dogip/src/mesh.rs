//! Structured simplicial meshes of the unit square and unit cube.
//!
//! Each axis-aligned cell of an `N × N (× N)` grid is split into simplexes
//! with a fixed pattern: two triangles along the (low, low) → (high, high)
//! diagonal in 2D, six tetrahedra sharing the main cube diagonal (Kuhn
//! subdivision) in 3D. This yields exactly `2N²` or `6N³` elements on
//! `(N+1)^d` lattice vertices, and every element is the affine image
//! `F_T(x̂) = R_T x̂ + S_T` of the unit reference simplex.

use serde::Serialize;

use crate::{Error, Result};

/// Vertex orderings of the six Kuhn tetrahedra: each walks from the cube
/// origin to the far corner along a permutation of the axes.
const KUHN_AXIS_ORDERS: [[usize; 3]; 6] =
    [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]];

/// Structured simplicial mesh of `[0,1]^d`.
///
/// Immutable after construction; all accessors are safe for concurrent use.
#[derive(Debug, Clone)]
pub struct Mesh {
    pub d: usize,
    pub n: usize,
    vertices: Vec<[f64; 3]>,
    vertex_lattice: Vec<[u32; 3]>,
    /// Flat element-to-vertex connectivity, stride `d + 1`.
    elements: Vec<u32>,
}

/// Affine map `F_T(x̂) = R x̂ + S` from the reference simplex onto an element.
///
/// `r` and `rinv` are stored as padded 3×3 row-major arrays (unused rows and
/// columns carry identity entries so 3-loops stay valid in 2D); `det_r` is the
/// signed determinant of the d×d block.
#[derive(Debug, Clone, Copy)]
pub struct AffineMap {
    pub d: usize,
    pub r: [[f64; 3]; 3],
    pub rinv: [[f64; 3]; 3],
    pub s: [f64; 3],
    pub det_r: f64,
}

impl AffineMap {
    /// Maps a reference point to physical coordinates.
    #[inline]
    pub fn map_point(&self, xhat: [f64; 3]) -> [f64; 3] {
        let mut out = self.s;
        for i in 0..self.d {
            for j in 0..self.d {
                out[i] += self.r[i][j] * xhat[j];
            }
        }
        out
    }

    /// Element volume `|det R| / d!`.
    pub fn volume(&self) -> f64 {
        let dfact = if self.d == 2 { 2.0 } else { 6.0 };
        self.det_r.abs() / dfact
    }
}

/// Builds the structured simplicial mesh of `[0,1]^d` with `n` subdivisions
/// per axis.
pub fn build_structured_mesh(d: usize, n: usize) -> Result<Mesh> {
    if d != 2 && d != 3 {
        return Err(Error::InvalidDimension(d));
    }
    if n == 0 {
        return Err(Error::InvalidSubdivisions(n));
    }
    let np = n + 1;
    let h = 1.0 / n as f64;

    let mut vertices = Vec::with_capacity(np.pow(d as u32));
    let mut vertex_lattice = Vec::with_capacity(np.pow(d as u32));
    let zmax = if d == 3 { np } else { 1 };
    for iz in 0..zmax {
        for iy in 0..np {
            for ix in 0..np {
                vertices.push([ix as f64 * h, iy as f64 * h, iz as f64 * h]);
                vertex_lattice.push([ix as u32, iy as u32, iz as u32]);
            }
        }
    }

    let vid = |ix: usize, iy: usize, iz: usize| -> u32 { ((iz * np + iy) * np + ix) as u32 };

    let mut elements = Vec::new();
    if d == 2 {
        elements.reserve(2 * n * n * 3);
        for iy in 0..n {
            for ix in 0..n {
                let a = vid(ix, iy, 0);
                let b = vid(ix + 1, iy, 0);
                let c = vid(ix + 1, iy + 1, 0);
                let dd = vid(ix, iy + 1, 0);
                // diagonal a-c
                elements.extend_from_slice(&[a, b, c]);
                elements.extend_from_slice(&[a, c, dd]);
            }
        }
    } else {
        elements.reserve(6 * n * n * n * 4);
        for iz in 0..n {
            for iy in 0..n {
                for ix in 0..n {
                    let base = [ix, iy, iz];
                    for order in &KUHN_AXIS_ORDERS {
                        let mut corner = base;
                        let mut tet = [vid(corner[0], corner[1], corner[2]), 0, 0, 0];
                        for (step, &axis) in order.iter().enumerate() {
                            corner[axis] += 1;
                            tet[step + 1] = vid(corner[0], corner[1], corner[2]);
                        }
                        elements.extend_from_slice(&tet);
                    }
                }
            }
        }
    }

    Ok(Mesh { d, n, vertices, vertex_lattice, elements })
}

impl Mesh {
    pub fn element_count(&self) -> usize {
        self.elements.len() / (self.d + 1)
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    /// Vertex indices of element `t` (`d + 1` entries).
    #[inline]
    pub fn element(&self, t: usize) -> &[u32] {
        let s = self.d + 1;
        &self.elements[t * s..(t + 1) * s]
    }

    #[inline]
    pub fn vertex(&self, v: usize) -> [f64; 3] {
        self.vertices[v]
    }

    /// Integer lattice coordinates of vertex `v` (components in `0..=n`).
    #[inline]
    pub fn vertex_lattice(&self, v: usize) -> [u32; 3] {
        self.vertex_lattice[v]
    }

    /// Affine map of element `t`; columns of `R` are `v_i - v_0`, `S = v_0`.
    pub fn affine_map(&self, t: usize) -> Result<AffineMap> {
        if t >= self.element_count() {
            return Err(Error::ElementIndexOutOfRange { index: t, count: self.element_count() });
        }
        let verts = self.element(t);
        let v0 = self.vertices[verts[0] as usize];
        let mut r = [[0.0; 3], [0.0; 3], [0.0; 3]];
        r[2][2] = 1.0; // identity padding for d = 2
        for j in 0..self.d {
            let vj = self.vertices[verts[j + 1] as usize];
            for i in 0..self.d {
                r[i][j] = vj[i] - v0[i];
            }
        }
        let (det_r, rinv) = invert_padded(self.d, &r);
        Ok(AffineMap { d: self.d, r, rinv, s: v0, det_r })
    }

    /// Sum of element volumes; equals 1 for a valid mesh of the unit domain.
    pub fn total_volume(&self) -> f64 {
        (0..self.element_count()).map(|t| self.affine_map(t).unwrap().volume()).sum()
    }

    /// JSON dump `{"d":…, "N":…, "vertices":[[…]], "elements":[[…]]}`.
    pub fn to_json(&self) -> String {
        #[derive(Serialize)]
        struct Dump {
            d: usize,
            #[serde(rename = "N")]
            n: usize,
            vertices: Vec<Vec<f64>>,
            elements: Vec<Vec<u32>>,
        }
        let dump = Dump {
            d: self.d,
            n: self.n,
            vertices: self.vertices.iter().map(|v| v[..self.d].to_vec()).collect(),
            elements: (0..self.element_count()).map(|t| self.element(t).to_vec()).collect(),
        };
        serde_json::to_string(&dump).expect("mesh dump is always serializable")
    }

    /// Assembles a mesh from raw parts; used by tests that need elements in
    /// non-structured positions.
    pub(crate) fn from_parts(d: usize, n: usize, vertices: Vec<[f64; 3]>, elements: Vec<u32>) -> Mesh {
        let vertex_lattice = vertices
            .iter()
            .map(|v| {
                let s = n as f64;
                [(v[0] * s).round() as u32, (v[1] * s).round() as u32, (v[2] * s).round() as u32]
            })
            .collect();
        Mesh { d, n, vertices, vertex_lattice, elements }
    }
}

/// Determinant and inverse of the d×d block of a padded 3×3 matrix.
fn invert_padded(d: usize, r: &[[f64; 3]; 3]) -> (f64, [[f64; 3]; 3]) {
    let mut rinv = [[0.0; 3], [0.0; 3], [0.0; 3]];
    let det;
    if d == 2 {
        det = r[0][0] * r[1][1] - r[0][1] * r[1][0];
        rinv[0][0] = r[1][1] / det;
        rinv[0][1] = -r[0][1] / det;
        rinv[1][0] = -r[1][0] / det;
        rinv[1][1] = r[0][0] / det;
        rinv[2][2] = 1.0;
    } else {
        let c00 = r[1][1] * r[2][2] - r[1][2] * r[2][1];
        let c01 = r[1][2] * r[2][0] - r[1][0] * r[2][2];
        let c02 = r[1][0] * r[2][1] - r[1][1] * r[2][0];
        det = r[0][0] * c00 + r[0][1] * c01 + r[0][2] * c02;
        rinv[0][0] = c00 / det;
        rinv[0][1] = (r[0][2] * r[2][1] - r[0][1] * r[2][2]) / det;
        rinv[0][2] = (r[0][1] * r[1][2] - r[0][2] * r[1][1]) / det;
        rinv[1][0] = c01 / det;
        rinv[1][1] = (r[0][0] * r[2][2] - r[0][2] * r[2][0]) / det;
        rinv[1][2] = (r[0][2] * r[1][0] - r[0][0] * r[1][2]) / det;
        rinv[2][0] = c02 / det;
        rinv[2][1] = (r[0][1] * r[2][0] - r[0][0] * r[2][1]) / det;
        rinv[2][2] = (r[0][0] * r[1][1] - r[0][1] * r[1][0]) / det;
    }
    (det, rinv)
}
