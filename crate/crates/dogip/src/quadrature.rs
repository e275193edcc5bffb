//! Grundmann–Möller quadrature on the reference simplex.
//!
//! The family provides fully symmetric rules of any odd exactness degree
//! `2s + 1` with closed-form rational points and weights; no tabulated data
//! is needed and the same construction covers triangles and tetrahedra.
//! Weights of the higher rules alternate in sign (an intrinsic property of
//! the family), so integration uses compensated summation and the rule
//! records whether negative weights are present.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::element::{lattice_indices, rat_to_f64, Rat};
use crate::mesh::AffineMap;
use crate::{Error, Result};

/// Quadrature rule on the unit reference simplex.
#[derive(Debug, Clone)]
pub struct QuadratureRule {
    pub d: usize,
    /// Guaranteed polynomial exactness degree (odd).
    pub degree: usize,
    pub points: Vec<[f64; 3]>,
    pub weights: Vec<f64>,
    has_negative_weights: bool,
}

impl QuadratureRule {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn has_negative_weights(&self) -> bool {
        self.has_negative_weights
    }
}

fn factorial_big(n: usize) -> BigInt {
    let mut acc = BigInt::one();
    for i in 2..=n {
        acc *= i;
    }
    acc
}

/// Builds the Grundmann–Möller rule of the smallest odd degree `2s + 1` that
/// is at least `degree`. Coinciding points across the rule's levels are
/// merged with their weights combined; the construction is exact in rational
/// arithmetic and rounded once at the end.
pub fn grundmann_moller(d: usize, degree: usize) -> Result<QuadratureRule> {
    if d != 2 && d != 3 {
        return Err(Error::InvalidDimension(d));
    }
    let s = if degree <= 1 { 0 } else { degree / 2 };
    let effective = 2 * s + 1;

    // first-encounter order with exact merging keeps the rule deterministic
    let mut order: Vec<[Rat; 3]> = Vec::new();
    let mut accum: std::collections::HashMap<[Rat; 3], Rat> = std::collections::HashMap::new();
    let four_pow_s = BigInt::from(4).pow(s as u32);
    for i in 0..=s {
        let dd = 2 * s + 1 + d - 2 * i;
        let num = BigInt::from(dd).pow(effective as u32);
        let den = &four_pow_s * factorial_big(i) * factorial_big(2 * s + 1 + d - i);
        let mut coeff = Rat::new(num, den);
        if i % 2 == 1 {
            coeff = -coeff;
        }
        // compositions of s - i into d + 1 parts; the point uses the last d
        for beta in compositions(d + 1, s - i) {
            let mut point = [Rat::zero(), Rat::zero(), Rat::zero()];
            for r in 0..d {
                point[r] = Rat::new((2 * beta[r + 1] + 1).into(), dd.into());
            }
            match accum.get_mut(&point) {
                Some(w) => *w += &coeff,
                None => {
                    order.push(point.clone());
                    accum.insert(point, coeff.clone());
                }
            }
        }
    }

    // exact sanity: weights integrate the constant 1 to the simplex volume
    let total: Rat = accum.values().sum();
    let volume = Rat::new(BigInt::one(), factorial_big(d));
    assert_eq!(total, volume, "Grundmann-Moller weights must sum to 1/d!");

    let mut points = Vec::with_capacity(order.len());
    let mut weights = Vec::with_capacity(order.len());
    let mut has_negative_weights = false;
    for p in &order {
        let w = &accum[p];
        if w.is_negative() {
            has_negative_weights = true;
        }
        points.push([rat_to_f64(&p[0]), rat_to_f64(&p[1]), rat_to_f64(&p[2])]);
        weights.push(rat_to_f64(w));
    }
    Ok(QuadratureRule { d, degree: effective, points, weights, has_negative_weights })
}

/// All compositions of `total` into `parts` non-negative integers.
fn compositions(parts: usize, total: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut current = vec![0usize; parts];
    fn rec(out: &mut Vec<Vec<usize>>, current: &mut Vec<usize>, pos: usize, left: usize) {
        if pos + 1 == current.len() {
            current[pos] = left;
            out.push(current.clone());
            return;
        }
        for v in 0..=left {
            current[pos] = v;
            rec(out, current, pos + 1, left - v);
        }
    }
    rec(&mut out, &mut current, 0, total);
    out
}

/// Pulled-back integral `|det R| · Σ_q w_q f(F_T(x̂_q))` with compensated
/// (Neumaier) summation to tame the alternating weights.
pub fn integrate_on_element<F: Fn([f64; 3]) -> f64>(
    rule: &QuadratureRule,
    map: &AffineMap,
    f: F,
) -> f64 {
    assert_eq!(rule.d, map.d, "rule and element dimension must agree");
    let mut sum = 0.0;
    let mut comp = 0.0;
    for (p, w) in rule.points.iter().zip(&rule.weights) {
        let term = w * f(map.map_point(*p));
        let t = sum + term;
        if sum.abs() >= term.abs() {
            comp += (sum - t) + term;
        } else {
            comp += (term - t) + sum;
        }
        sum = t;
    }
    map.det_r.abs() * (sum + comp)
}

/// Exact monomial moment `∫ x^α` over the unit reference simplex,
/// `(∏ α_i!) / (|α| + d)!`.
pub fn simplex_monomial_moment(d: usize, alpha: &[u32; 3]) -> f64 {
    let total: u32 = alpha[..d].iter().sum();
    let mut num = BigInt::one();
    for &a in &alpha[..d] {
        num *= factorial_big(a as usize);
    }
    let moment = BigRational::new(num, factorial_big(total as usize + d));
    rat_to_f64(&moment)
}

/// Largest relative error of the rule over all monomials up to its degree.
pub fn max_exactness_error(rule: &QuadratureRule) -> f64 {
    let mut worst: f64 = 0.0;
    for alpha in monomials_up_to(rule.d, rule.degree) {
        let mut sum = 0.0;
        let mut comp = 0.0;
        for (p, w) in rule.points.iter().zip(&rule.weights) {
            let term = w
                * p[0].powi(alpha[0] as i32)
                * p[1].powi(alpha[1] as i32)
                * p[2].powi(alpha[2] as i32);
            let t = sum + term;
            if sum.abs() >= term.abs() {
                comp += (sum - t) + term;
            } else {
                comp += (term - t) + sum;
            }
            sum = t;
        }
        let exact = simplex_monomial_moment(rule.d, &alpha);
        worst = worst.max(((sum + comp) - exact).abs() / exact);
    }
    worst
}

/// Monomial exponents with `|α| ≤ degree`.
pub(crate) fn monomials_up_to(d: usize, degree: usize) -> Vec<[u32; 3]> {
    lattice_indices(d, degree)
}
