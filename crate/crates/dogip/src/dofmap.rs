//! Global degree-of-freedom numbering for continuous and discontinuous
//! spaces on the structured mesh, with the local-to-global map `l_T`.
//!
//! Continuous spaces identify shared lattice nodes through exact integer
//! arithmetic: the node with barycentric index `(α_0, …, α_d)` of an element
//! whose vertices sit at lattice points `L_0, …, L_d` (in `{0, …, N}^d`)
//! lands on the global lattice point `Σ α_j L_j ∈ {0, …, kN}^d`. No
//! floating-point coordinates are hashed, so matching is bit-exact and the
//! numbering (lexicographic over the lattice) is deterministic.

use crate::element::{lattice_indices, reference_nodes, space_dim};
use crate::mesh::Mesh;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SpaceKind {
    Continuous,
    Discontinuous,
}

/// Local-to-global numbering of one polynomial space on a mesh.
#[derive(Debug, Clone)]
pub struct DofMap {
    pub kind: SpaceKind,
    pub d: usize,
    pub k: usize,
    /// Global DOF count.
    pub dim: usize,
    /// DOFs per element.
    pub v_t: usize,
    element_count: usize,
    /// Flat element-major table of global indices, stride `v_t`.
    l_t: Vec<u32>,
    /// Coordinates of every global DOF.
    coords: Vec<[f64; 3]>,
    /// Lattice points per axis minus one (`kN`); zero for discontinuous maps.
    lattice_extent: usize,
}

/// Numbers the continuous space of order `k ≥ 1`; `dim = (kN + 1)^d`.
pub fn build_continuous_dofmap(mesh: &Mesh, k: usize) -> Result<DofMap> {
    if k < 1 {
        return Err(Error::UnsupportedOrder { d: mesh.d, k, min: 1, max: usize::MAX });
    }
    let d = mesh.d;
    let np = k * mesh.n + 1;
    let dim = np.pow(d as u32);
    assert!(dim <= u32::MAX as usize, "DOF count exceeds u32 storage");
    let alphas = lattice_indices(d, k);
    let v_t = alphas.len();
    debug_assert_eq!(v_t, space_dim(d, k));

    let mut l_t = Vec::with_capacity(mesh.element_count() * v_t);
    for t in 0..mesh.element_count() {
        let verts = mesh.element(t);
        // lattice coordinates of the element's vertices
        let lat: Vec<[u32; 3]> = verts.iter().map(|&v| mesh.vertex_lattice(v as usize)).collect();
        for alpha in &alphas {
            let a0 = k as u32 - alpha[..d].iter().sum::<u32>();
            let mut g = [0u64; 3];
            for (j, l) in lat.iter().enumerate() {
                let w = if j == 0 { a0 } else { alpha[j - 1] } as u64;
                for r in 0..d {
                    g[r] += w * l[r] as u64;
                }
            }
            let idx = (g[2] * np as u64 + g[1]) * np as u64 + g[0];
            l_t.push(idx as u32);
        }
    }

    let h = 1.0 / (k * mesh.n) as f64;
    let mut coords = Vec::with_capacity(dim);
    let zmax = if d == 3 { np } else { 1 };
    for gz in 0..zmax {
        for gy in 0..np {
            for gx in 0..np {
                coords.push([gx as f64 * h, gy as f64 * h, gz as f64 * h]);
            }
        }
    }

    Ok(DofMap {
        kind: SpaceKind::Continuous,
        d,
        k,
        dim,
        v_t,
        element_count: mesh.element_count(),
        l_t,
        coords,
        lattice_extent: k * mesh.n,
    })
}

/// Numbers the discontinuous space of order `k ≥ 0` element by element;
/// `dim = |elements| · binom(k+d, d)`.
pub fn build_discontinuous_dofmap(mesh: &Mesh, k: usize) -> Result<DofMap> {
    let d = mesh.d;
    let v_t = space_dim(d, k);
    let dim = mesh.element_count() * v_t;
    assert!(dim <= u32::MAX as usize, "DOF count exceeds u32 storage");
    let nodes = reference_nodes(d, k)?;

    let mut l_t = Vec::with_capacity(dim);
    let mut coords = Vec::with_capacity(dim);
    for t in 0..mesh.element_count() {
        let map = mesh.affine_map(t)?;
        for (i, node) in nodes.iter().enumerate() {
            l_t.push((t * v_t + i) as u32);
            coords.push(map.map_point(*node));
        }
    }

    Ok(DofMap {
        kind: SpaceKind::Discontinuous,
        d,
        k,
        dim,
        v_t,
        element_count: mesh.element_count(),
        l_t,
        coords,
        lattice_extent: 0,
    })
}

impl DofMap {
    pub fn element_count(&self) -> usize {
        self.element_count
    }

    /// Global DOF indices of element `t` in reference-node order.
    #[inline]
    pub fn element_dofs(&self, t: usize) -> &[u32] {
        &self.l_t[t * self.v_t..(t + 1) * self.v_t]
    }

    #[inline]
    pub fn coord(&self, dof: usize) -> [f64; 3] {
        self.coords[dof]
    }

    /// Lattice coordinates of a continuous DOF (components in `0..=kN`).
    pub fn lattice_of(&self, dof: usize) -> [usize; 3] {
        debug_assert_eq!(self.kind, SpaceKind::Continuous);
        let np = self.lattice_extent + 1;
        [dof % np, (dof / np) % np, dof / (np * np)]
    }

    /// Global DOFs on the domain boundary (continuous maps only).
    pub fn boundary_dofs(&self) -> Vec<usize> {
        debug_assert_eq!(self.kind, SpaceKind::Continuous);
        let ext = self.lattice_extent;
        (0..self.dim)
            .filter(|&dof| {
                let g = self.lattice_of(dof);
                (0..self.d).any(|r| g[r] == 0 || g[r] == ext)
            })
            .collect()
    }
}
