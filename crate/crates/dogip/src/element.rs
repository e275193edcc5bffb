//! Lagrange nodal bases on the reference simplex and the reference-element
//! interpolation tables of the double-grid decomposition.
//!
//! Nodes are the equispaced lattice points with barycentric coordinates
//! `(α_0, …, α_d)/k`. On that lattice the Lagrange basis has the classical
//! closed product form
//!
//! ```text
//! φ_μ(λ) = ∏_{i=0}^{d} ∏_{j=0}^{μ_i - 1} (k λ_i - j) / (μ_i - j)
//! ```
//!
//! which this module evaluates both in `f64` and in exact rational
//! arithmetic. The interpolation tables (primal basis values, respectively
//! gradients, at the double-grid nodes) are built exactly and only then
//! rounded, so their nonzero counts are free of roundoff artifacts.

use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::{DenseMatrix, Error, Result};

pub(crate) type Rat = BigRational;

pub(crate) fn rat_int(v: i64) -> Rat {
    Rat::from_integer(v.into())
}

pub(crate) fn rat_frac(num: i64, den: i64) -> Rat {
    Rat::new(num.into(), den.into())
}

pub(crate) fn rat_to_f64(r: &Rat) -> f64 {
    let v = r.to_f64().expect("rational outside f64 range");
    debug_assert!(v.is_finite());
    v
}

/// Binomial coefficient as usize; arguments stay small here.
pub(crate) fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    acc as usize
}

/// Dimension of `P_k` on a d-simplex.
pub fn space_dim(d: usize, k: usize) -> usize {
    binomial(k + d, d)
}

/// Maximum supported basis order per dimension (the benchmark table range).
pub fn max_order(d: usize) -> usize {
    if d == 2 {
        8
    } else {
        4
    }
}

fn check_dimension(d: usize) -> Result<()> {
    if d == 2 || d == 3 {
        Ok(())
    } else {
        Err(Error::InvalidDimension(d))
    }
}

/// Cartesian lattice multi-indices `(α_1, …, α_d)` with `Σ α_i ≤ k`,
/// enumerated x-fastest. The implicit `α_0 = k - Σ α_i` completes the
/// barycentric index.
pub(crate) fn lattice_indices(d: usize, k: usize) -> Vec<[u32; 3]> {
    let mut out = Vec::with_capacity(space_dim(d, k));
    let k = k as u32;
    if d == 2 {
        for ay in 0..=k {
            for ax in 0..=(k - ay) {
                out.push([ax, ay, 0]);
            }
        }
    } else {
        for az in 0..=k {
            for ay in 0..=(k - az) {
                for ax in 0..=(k - az - ay) {
                    out.push([ax, ay, az]);
                }
            }
        }
    }
    out
}

/// Rational cartesian coordinates of the lattice nodes of order `k`; the
/// single node of the order-0 space is the barycentre.
pub(crate) fn rational_nodes(d: usize, k: usize) -> Vec<[Rat; 3]> {
    if k == 0 {
        let b = rat_frac(1, (d + 1) as i64);
        let z = if d == 3 { b.clone() } else { rat_int(0) };
        return vec![[b.clone(), b, z]];
    }
    lattice_indices(d, k)
        .iter()
        .map(|a| {
            [
                rat_frac(a[0] as i64, k as i64),
                rat_frac(a[1] as i64, k as i64),
                rat_frac(a[2] as i64, k as i64),
            ]
        })
        .collect()
}

/// Equispaced nodal points of `P_k` on the reference simplex.
pub fn reference_nodes(d: usize, k: usize) -> Result<Vec<[f64; 3]>> {
    check_dimension(d)?;
    Ok(rational_nodes(d, k)
        .iter()
        .map(|p| [rat_to_f64(&p[0]), rat_to_f64(&p[1]), rat_to_f64(&p[2])])
        .collect())
}

/// One linear factor `(k λ_lam - j) / denom` of a nodal basis function.
#[derive(Debug, Clone, Copy)]
struct Factor {
    lam: usize,
    j: u32,
    denom: f64,
}

/// Lagrange nodal basis `P_k` on the reference simplex.
///
/// Immutable after construction; evaluation methods are `&self` and safe for
/// concurrent use.
#[derive(Debug, Clone)]
pub struct ReferenceBasis {
    pub d: usize,
    pub k: usize,
    nodes: Vec<[f64; 3]>,
    node_indices: Vec<[u32; 3]>,
    /// Per basis function, the linear factors of the product form.
    factors: Vec<Vec<Factor>>,
}

impl ReferenceBasis {
    /// Builds the basis, rejecting orders outside the supported table range
    /// (`k ≤ 8` in 2D, `k ≤ 4` in 3D; `k = 0` is allowed for discontinuous
    /// spaces). The lattice product construction is exact, so no further
    /// conditioning check is necessary.
    pub fn build(d: usize, k: usize) -> Result<Self> {
        check_dimension(d)?;
        if k > max_order(d) {
            return Err(Error::UnsupportedOrder { d, k, min: 0, max: max_order(d) });
        }
        Ok(Self::build_any(d, k))
    }

    /// Builds a basis of arbitrary order; internal double-grid spaces go up
    /// to order `2k` and are constructed through this path.
    pub(crate) fn build_any(d: usize, k: usize) -> Self {
        let node_indices: Vec<[u32; 3]> =
            if k == 0 { vec![[0, 0, 0]] } else { lattice_indices(d, k) };
        let nodes = rational_nodes(d, k)
            .iter()
            .map(|p| [rat_to_f64(&p[0]), rat_to_f64(&p[1]), rat_to_f64(&p[2])])
            .collect();
        let factors = node_indices
            .iter()
            .map(|alpha| {
                let mut f = Vec::with_capacity(k);
                let mut bary = [0u32; 4];
                bary[0] = k as u32 - alpha[..3.min(d)].iter().sum::<u32>();
                for i in 0..d {
                    bary[i + 1] = alpha[i];
                }
                for (lam, &mu) in bary.iter().take(d + 1).enumerate() {
                    for j in 0..mu {
                        f.push(Factor { lam, j, denom: (mu - j) as f64 });
                    }
                }
                f
            })
            .collect();
        Self { d, k, nodes, node_indices, factors }
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn nodes(&self) -> &[[f64; 3]] {
        &self.nodes
    }

    pub(crate) fn node_indices(&self) -> &[[u32; 3]] {
        &self.node_indices
    }

    fn barycentric(&self, x: &[f64; 3]) -> [f64; 4] {
        let mut lam = [0.0; 4];
        let mut sum = 0.0;
        for i in 0..self.d {
            lam[i + 1] = x[i];
            sum += x[i];
        }
        lam[0] = 1.0 - sum;
        lam
    }

    fn check_inside(&self, points: &[[f64; 3]]) -> Result<()> {
        for (index, x) in points.iter().enumerate() {
            let lam = self.barycentric(x);
            for &l in lam.iter().take(self.d + 1) {
                if l < -1e-12 {
                    return Err(Error::PointOutsideSimplex { index, coord: l });
                }
            }
        }
        Ok(())
    }

    /// Evaluates every basis function at one point (no membership check).
    pub fn eval_point(&self, x: &[f64; 3]) -> Vec<f64> {
        let lam = self.barycentric(x);
        let kf = self.k as f64;
        self.factors
            .iter()
            .map(|factors| {
                factors.iter().map(|f| (kf * lam[f.lam] - f.j as f64) / f.denom).product()
            })
            .collect()
    }

    /// Basis values at the given points as a `|points| × V_T` matrix. Points
    /// must lie inside the closed reference simplex (tolerance `1e-12` on
    /// barycentric coordinates).
    pub fn eval(&self, points: &[[f64; 3]]) -> Result<DenseMatrix> {
        self.check_inside(points)?;
        let vt = self.node_count();
        let mut out = DenseMatrix::zeros(points.len(), vt);
        for (p, x) in points.iter().enumerate() {
            for (i, v) in self.eval_point(x).into_iter().enumerate() {
                out.set(p, i, v);
            }
        }
        Ok(out)
    }

    /// Gradient of every basis function at one point, as rows `(∂φ_i/∂x_r)`.
    pub fn eval_grad_point(&self, x: &[f64; 3]) -> Vec<[f64; 3]> {
        let lam = self.barycentric(x);
        let kf = self.k as f64;
        self.factors
            .iter()
            .map(|factors| {
                let n = factors.len();
                let vals: Vec<f64> =
                    factors.iter().map(|f| (kf * lam[f.lam] - f.j as f64) / f.denom).collect();
                // prefix/suffix products keep the product-rule stable at nodes
                let mut prefix = vec![1.0; n + 1];
                for i in 0..n {
                    prefix[i + 1] = prefix[i] * vals[i];
                }
                let mut suffix = vec![1.0; n + 1];
                for i in (0..n).rev() {
                    suffix[i] = suffix[i + 1] * vals[i];
                }
                let mut dlam = [0.0; 4];
                for (i, f) in factors.iter().enumerate() {
                    dlam[f.lam] += prefix[i] * suffix[i + 1] * kf / f.denom;
                }
                let mut g = [0.0; 3];
                for r in 0..self.d {
                    g[r] = dlam[r + 1] - dlam[0];
                }
                g
            })
            .collect()
    }

    /// Gradients at the given points; same membership check as [`eval`].
    ///
    /// [`eval`]: Self::eval
    pub fn eval_grad(&self, points: &[[f64; 3]]) -> Result<GradTable> {
        self.check_inside(points)?;
        let vt = self.node_count();
        let mut data = vec![0.0; points.len() * vt * 3];
        for (p, x) in points.iter().enumerate() {
            for (i, g) in self.eval_grad_point(x).into_iter().enumerate() {
                for r in 0..self.d {
                    data[(p * vt + i) * 3 + r] = g[r];
                }
            }
        }
        Ok(GradTable { npoints: points.len(), nbasis: vt, d: self.d, data })
    }

    /// Exact rational basis values at a rational point.
    pub(crate) fn eval_point_rational(&self, x: &[Rat; 3]) -> Vec<Rat> {
        let lam = self.barycentric_rational(x);
        let k = rat_int(self.k as i64);
        self.factors
            .iter()
            .map(|factors| {
                let mut acc = Rat::one();
                for f in factors {
                    let val = (&k * &lam[f.lam] - rat_int(f.j as i64)) / rat_int(f.denom as i64);
                    acc *= val;
                }
                acc
            })
            .collect()
    }

    /// Exact rational gradients at a rational point, rows `(∂φ_i/∂x_r)`.
    pub(crate) fn eval_grad_point_rational(&self, x: &[Rat; 3]) -> Vec<[Rat; 3]> {
        let lam = self.barycentric_rational(x);
        let k = rat_int(self.k as i64);
        self.factors
            .iter()
            .map(|factors| {
                let vals: Vec<Rat> = factors
                    .iter()
                    .map(|f| (&k * &lam[f.lam] - rat_int(f.j as i64)) / rat_int(f.denom as i64))
                    .collect();
                let mut dlam = [Rat::zero(), Rat::zero(), Rat::zero(), Rat::zero()];
                for (i, f) in factors.iter().enumerate() {
                    let mut others = Rat::one();
                    for (j, v) in vals.iter().enumerate() {
                        if j != i {
                            others *= v;
                        }
                    }
                    dlam[f.lam] += others * &k / rat_int(f.denom as i64);
                }
                let mut g = [Rat::zero(), Rat::zero(), Rat::zero()];
                for r in 0..self.d {
                    g[r] = &dlam[r + 1] - &dlam[0];
                }
                g
            })
            .collect()
    }

    fn barycentric_rational(&self, x: &[Rat; 3]) -> [Rat; 4] {
        let mut lam = [Rat::zero(), Rat::zero(), Rat::zero(), Rat::zero()];
        let mut sum = Rat::zero();
        for i in 0..self.d {
            lam[i + 1] = x[i].clone();
            sum += &x[i];
        }
        lam[0] = Rat::one() - sum;
        lam
    }
}

/// Gradients of a basis at a list of points, layout `[point][basis][dir]`.
#[derive(Debug, Clone)]
pub struct GradTable {
    pub npoints: usize,
    pub nbasis: usize,
    pub d: usize,
    data: Vec<f64>,
}

impl GradTable {
    #[inline]
    pub fn at(&self, p: usize, i: usize, r: usize) -> f64 {
        self.data[(p * self.nbasis + i) * 3 + r]
    }
}

/// Interpolation table of a mass-type double grid: primal basis values at
/// the order-`2k` lattice nodes, `B̂_jl = φ̂ˡ(x̂ʲ_W)`.
#[derive(Debug, Clone)]
pub struct InterpTableWp {
    pub d: usize,
    pub k: usize,
    pub w_t: usize,
    pub v_t: usize,
    pub values: DenseMatrix,
    nnz: usize,
    nnz_pm1: usize,
}

/// Builds the `W_T × V_T` interpolation table for the weighted-projection
/// double grid (`W_T = binom(2k+d, d)`), exact up to the final rounding.
pub fn build_interp_wp(d: usize, k: usize) -> Result<InterpTableWp> {
    check_dimension(d)?;
    if k < 1 || k > max_order(d) {
        return Err(Error::UnsupportedOrder { d, k, min: 1, max: max_order(d) });
    }
    let basis = ReferenceBasis::build(d, k)?;
    let wnodes = rational_nodes(d, 2 * k);
    let (w_t, v_t) = (wnodes.len(), basis.node_count());
    let mut values = DenseMatrix::zeros(w_t, v_t);
    let mut nnz = 0;
    let mut nnz_pm1 = 0;
    for (j, node) in wnodes.iter().enumerate() {
        for (l, v) in basis.eval_point_rational(node).iter().enumerate() {
            if !v.is_zero() {
                nnz += 1;
            }
            if v.abs() == Rat::one() {
                nnz_pm1 += 1;
            }
            values.set(j, l, rat_to_f64(v));
        }
    }
    Ok(InterpTableWp { d, k, w_t, v_t, values, nnz, nnz_pm1 })
}

impl InterpTableWp {
    /// Exact nonzero count of the table.
    pub fn nnz(&self) -> usize {
        self.nnz
    }

    /// Exact count of entries equal to `+1` or `-1`.
    pub fn nnz_pm1(&self) -> usize {
        self.nnz_pm1
    }
}

/// Interpolation table of a gradient-type double grid: primal basis
/// gradients at the order-`2(k-1)` lattice nodes,
/// `B̂_ril = ∂φ̂ˡ(x̂ⁱ_W)/∂x̂_r`, layout `[dir][w node][basis]`.
#[derive(Debug, Clone)]
pub struct InterpTableElliptic {
    pub d: usize,
    pub k: usize,
    pub w_t: usize,
    pub v_t: usize,
    values: Vec<f64>,
    nnz: usize,
    nnz_pm1: usize,
}

/// Builds the `d × W_T × V_T` gradient interpolation table for the elliptic
/// double grid (`W_T = binom(2(k-1)+d, d)`).
pub fn build_interp_elliptic(d: usize, k: usize) -> Result<InterpTableElliptic> {
    check_dimension(d)?;
    if k < 1 || k > max_order(d) {
        return Err(Error::UnsupportedOrder { d, k, min: 1, max: max_order(d) });
    }
    let basis = ReferenceBasis::build(d, k)?;
    let wnodes = rational_nodes(d, 2 * (k - 1));
    let (w_t, v_t) = (wnodes.len(), basis.node_count());
    let mut values = vec![0.0; d * w_t * v_t];
    let mut nnz = 0;
    let mut nnz_pm1 = 0;
    for (i, node) in wnodes.iter().enumerate() {
        for (l, g) in basis.eval_grad_point_rational(node).iter().enumerate() {
            for (r, comp) in g.iter().take(d).enumerate() {
                if !comp.is_zero() {
                    nnz += 1;
                }
                if comp.abs() == Rat::one() {
                    nnz_pm1 += 1;
                }
                values[(r * w_t + i) * v_t + l] = rat_to_f64(comp);
            }
        }
    }
    Ok(InterpTableElliptic { d, k, w_t, v_t, values, nnz, nnz_pm1 })
}

impl InterpTableElliptic {
    #[inline]
    pub fn at(&self, r: usize, i: usize, l: usize) -> f64 {
        self.values[(r * self.w_t + i) * self.v_t + l]
    }

    /// Contiguous `W_T × V_T` block for direction `r`.
    #[inline]
    pub fn block(&self, r: usize) -> &[f64] {
        &self.values[r * self.w_t * self.v_t..(r + 1) * self.w_t * self.v_t]
    }

    pub fn nnz(&self) -> usize {
        self.nnz
    }

    pub fn nnz_pm1(&self) -> usize {
        self.nnz_pm1
    }
}

#[cfg(test)]
mod tests {
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    use super::*;

    fn random_interior_point(rng: &mut impl Rng, d: usize) -> [f64; 3] {
        // rejection-free: scale a random point into the simplex
        loop {
            let mut x = [0.0; 3];
            let mut sum = 0.0;
            for v in x.iter_mut().take(d) {
                *v = rng.gen_range(0.0..1.0);
                sum += *v;
            }
            if sum < 1.0 {
                return x;
            }
        }
    }

    #[test]
    fn node_counts_and_first_orders() {
        let nodes = reference_nodes(2, 1).unwrap();
        assert_eq!(nodes.len(), 3);
        assert_eq!(nodes[0][..2], [0.0, 0.0]);
        assert_eq!(nodes[1][..2], [1.0, 0.0]);
        assert_eq!(nodes[2][..2], [0.0, 1.0]);

        let nodes = reference_nodes(2, 2).unwrap();
        assert_eq!(nodes.len(), 6);
        assert!(nodes.iter().any(|p| p[..2] == [0.5, 0.0]));
        assert!(nodes.iter().any(|p| p[..2] == [0.5, 0.5]));

        assert_eq!(reference_nodes(3, 4).unwrap().len(), 35);
        assert!(matches!(reference_nodes(4, 1), Err(Error::InvalidDimension(4))));
    }

    #[test]
    fn order_zero_is_single_barycentre_constant() {
        for d in [2, 3] {
            let basis = ReferenceBasis::build(d, 0).unwrap();
            assert_eq!(basis.node_count(), 1);
            let b = 1.0 / (d + 1) as f64;
            assert!((basis.nodes()[0][0] - b).abs() < 1e-15);
            let vals = basis.eval_point(&[0.2, 0.3, if d == 3 { 0.1 } else { 0.0 }]);
            assert_eq!(vals, vec![1.0]);
        }
    }

    #[test]
    fn delta_property_all_supported_orders() {
        for (d, kmax) in [(2, 8), (3, 4)] {
            for k in 1..=kmax {
                let basis = ReferenceBasis::build(d, k).unwrap();
                let phi = basis.eval(basis.nodes()).unwrap();
                let mut worst: f64 = 0.0;
                for i in 0..basis.node_count() {
                    for j in 0..basis.node_count() {
                        let expect = if i == j { 1.0 } else { 0.0 };
                        worst = worst.max((phi.at(i, j) - expect).abs());
                    }
                }
                assert!(worst <= 1e-10, "delta residual {worst:.2e} at d={d} k={k}");
            }
        }
    }

    #[test]
    fn partition_of_unity_at_random_points() {
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        for (d, kmax) in [(2, 8), (3, 4)] {
            for k in 1..=kmax {
                let basis = ReferenceBasis::build(d, k).unwrap();
                let points: Vec<[f64; 3]> =
                    (0..10).map(|_| random_interior_point(&mut rng, d)).collect();
                let phi = basis.eval(&points).unwrap();
                for p in 0..points.len() {
                    let sum: f64 = phi.row(p).iter().sum();
                    assert!((sum - 1.0).abs() <= 1e-10, "pou {sum} at d={d} k={k}");
                }
            }
        }
    }

    #[test]
    fn hat_functions_and_their_gradients() {
        let basis = ReferenceBasis::build(2, 1).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..5 {
            let x = random_interior_point(&mut rng, 2);
            let vals = basis.eval_point(&x);
            assert!((vals[0] - (1.0 - x[0] - x[1])).abs() < 1e-14);
            assert!((vals[1] - x[0]).abs() < 1e-14);
            assert!((vals[2] - x[1]).abs() < 1e-14);
            let grads = basis.eval_grad_point(&x);
            assert_eq!(grads[0][..2], [-1.0, -1.0]);
            assert_eq!(grads[1][..2], [1.0, 0.0]);
            assert_eq!(grads[2][..2], [0.0, 1.0]);
        }
    }

    #[test]
    fn midpoint_node_gives_unit_row() {
        let basis = ReferenceBasis::build(2, 2).unwrap();
        let idx = basis.nodes().iter().position(|p| p[..2] == [0.5, 0.0]).unwrap();
        let vals = basis.eval_point(&[0.5, 0.0, 0.0]);
        for (i, v) in vals.iter().enumerate() {
            let expect = if i == idx { 1.0 } else { 0.0 };
            assert!((v - expect).abs() < 1e-14);
        }
    }

    #[test]
    fn barycentre_row_of_linear_basis() {
        let basis = ReferenceBasis::build(2, 1).unwrap();
        let vals = basis.eval_point(&[1.0 / 3.0, 1.0 / 3.0, 0.0]);
        for v in vals {
            assert!((v - 1.0 / 3.0).abs() < 1e-14);
        }
    }

    #[test]
    fn gradients_match_central_differences() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let h = 1e-6;
        for (d, k) in [(2, 2), (2, 5), (3, 2), (3, 4)] {
            let basis = ReferenceBasis::build(d, k).unwrap();
            for _ in 0..5 {
                let x = random_interior_point(&mut rng, d);
                let grads = basis.eval_grad_point(&x);
                for r in 0..d {
                    let mut xp = x;
                    let mut xm = x;
                    xp[r] += h;
                    xm[r] -= h;
                    let vp = basis.eval_point(&xp);
                    let vm = basis.eval_point(&xm);
                    for i in 0..basis.node_count() {
                        let fd = (vp[i] - vm[i]) / (2.0 * h);
                        assert!(
                            (grads[i][r] - fd).abs() <= 1e-6,
                            "fd mismatch d={d} k={k} basis {i} dir {r}"
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn gradient_rows_sum_to_zero() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for (d, k) in [(2, 3), (3, 3)] {
            let basis = ReferenceBasis::build(d, k).unwrap();
            for _ in 0..5 {
                let x = random_interior_point(&mut rng, d);
                let grads = basis.eval_grad_point(&x);
                for r in 0..d {
                    let sum: f64 = grads.iter().map(|g| g[r]).sum();
                    assert!(sum.abs() <= 1e-10);
                }
            }
        }
    }

    #[test]
    fn outside_point_rejected() {
        let basis = ReferenceBasis::build(2, 2).unwrap();
        let err = basis.eval(&[[0.7, 0.7, 0.0]]).unwrap_err();
        assert!(matches!(err, Error::PointOutsideSimplex { .. }));
        // boundary within tolerance passes
        assert!(basis.eval(&[[1.0, 0.0, 0.0], [0.0, 0.0, 0.0]]).is_ok());
    }

    #[test]
    fn order_caps_enforced() {
        assert!(matches!(ReferenceBasis::build(2, 9), Err(Error::UnsupportedOrder { .. })));
        assert!(matches!(ReferenceBasis::build(3, 5), Err(Error::UnsupportedOrder { .. })));
        assert!(ReferenceBasis::build(2, 8).is_ok());
        assert!(ReferenceBasis::build(3, 4).is_ok());
    }

    #[test]
    fn wp_table_low_order_counts_and_values() {
        let t = build_interp_wp(2, 1).unwrap();
        assert_eq!((t.w_t, t.v_t), (6, 3));
        assert_eq!(t.nnz(), 9);
        assert_eq!(t.nnz_pm1(), 3);
        // midpoint rows interpolate with coefficients (1/2, 1/2)
        let mut halves = 0;
        for j in 0..t.w_t {
            for l in 0..t.v_t {
                let v = t.values.at(j, l);
                assert!(v == 0.0 || v == 1.0 || v == 0.5);
                if v == 0.5 {
                    halves += 1;
                }
            }
        }
        assert_eq!(halves, 6);

        let t = build_interp_wp(3, 1).unwrap();
        assert_eq!((t.w_t, t.v_t), (10, 4));
        assert_eq!(t.nnz(), 16);

        let t = build_interp_wp(2, 2).unwrap();
        assert_eq!((t.w_t, t.v_t), (15, 6));
        assert_eq!(t.nnz(), 39);
    }

    #[test]
    fn wp_table_rows_sum_to_one_and_unit_rows_at_primal_nodes() {
        for (d, k) in [(2, 1), (2, 3), (3, 2)] {
            let t = build_interp_wp(d, k).unwrap();
            let wnodes = rational_nodes(d, 2 * k);
            let vnodes = rational_nodes(d, k);
            for j in 0..t.w_t {
                let sum: f64 = t.values.row(j).iter().sum();
                assert!((sum - 1.0).abs() <= 1e-10);
                if vnodes.contains(&wnodes[j]) {
                    let ones = t.values.row(j).iter().filter(|&&v| v == 1.0).count();
                    let zeros = t.values.row(j).iter().filter(|&&v| v == 0.0).count();
                    assert_eq!((ones, zeros), (1, t.v_t - 1), "row {j} not a unit row");
                }
            }
        }
    }

    #[test]
    fn wp_table_interpolates_polynomials_exactly() {
        let mut rng = ChaCha8Rng::seed_from_u64(19);
        for (d, k) in [(2, 1), (2, 2), (2, 4), (3, 1), (3, 3)] {
            let t = build_interp_wp(d, k).unwrap();
            let vnodes = reference_nodes(d, k).unwrap();
            let wnodes = reference_nodes(d, 2 * k).unwrap();
            let exps = lattice_indices(d, k);
            for _ in 0..20 {
                let coeffs: Vec<f64> = (0..exps.len()).map(|_| rng.gen_range(-1.0..1.0)).collect();
                let poly = |x: &[f64; 3]| -> f64 {
                    exps.iter()
                        .zip(&coeffs)
                        .map(|(e, c)| {
                            c * x[0].powi(e[0] as i32)
                                * x[1].powi(e[1] as i32)
                                * x[2].powi(e[2] as i32)
                        })
                        .sum()
                };
                let primal: Vec<f64> = vnodes.iter().map(|p| poly(p)).collect();
                let interpolated = t.values.matvec(&primal);
                for (j, wn) in wnodes.iter().enumerate() {
                    assert!(
                        (interpolated[j] - poly(wn)).abs() <= 1e-10,
                        "interp exactness failed at d={d} k={k}"
                    );
                }
            }
        }
    }

    #[test]
    fn elliptic_table_order_one_is_hat_gradients() {
        let t = build_interp_elliptic(2, 1).unwrap();
        assert_eq!((t.d, t.w_t, t.v_t), (2, 1, 3));
        assert_eq!(t.nnz(), 4);
        assert_eq!(
            [t.at(0, 0, 0), t.at(0, 0, 1), t.at(0, 0, 2)],
            [-1.0, 1.0, 0.0]
        );
        assert_eq!(
            [t.at(1, 0, 0), t.at(1, 0, 1), t.at(1, 0, 2)],
            [-1.0, 0.0, 1.0]
        );

        let t = build_interp_elliptic(3, 1).unwrap();
        assert_eq!((t.d, t.w_t, t.v_t), (3, 1, 4));
        assert_eq!(t.nnz(), 6);

        let t = build_interp_elliptic(2, 2).unwrap();
        assert_eq!((t.d, t.w_t, t.v_t), (2, 6, 6));
        assert_eq!(t.nnz(), 44);
    }

    #[test]
    fn elliptic_table_rows_sum_to_zero() {
        for (d, k) in [(2, 1), (2, 3), (3, 2)] {
            let t = build_interp_elliptic(d, k).unwrap();
            for r in 0..d {
                for i in 0..t.w_t {
                    let sum: f64 = (0..t.v_t).map(|l| t.at(r, i, l)).sum();
                    assert!(sum.abs() <= 1e-10);
                }
            }
        }
    }

    #[test]
    fn elliptic_table_matches_float_gradient_evaluation() {
        for (d, k) in [(2, 2), (2, 4), (3, 2)] {
            let t = build_interp_elliptic(d, k).unwrap();
            let basis = ReferenceBasis::build(d, k).unwrap();
            let wnodes = reference_nodes(d, 2 * (k - 1)).unwrap();
            let grads = basis.eval_grad(&wnodes).unwrap();
            for r in 0..d {
                for i in 0..t.w_t {
                    for l in 0..t.v_t {
                        assert!((t.at(r, i, l) - grads.at(i, l, r)).abs() <= 1e-12);
                    }
                }
            }
        }
    }
}
