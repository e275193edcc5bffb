//! Material coefficient fields for the two problem families, plus the small
//! polynomial expression language used by the CLI (`1 + 2*x*y^2` style:
//! constants and the variables `x`, `y`, `z` combined with `+`, `*`, `^`).

use std::fmt;
use std::sync::Arc;

use crate::{Error, Result};

type ScalarFn = dyn Fn([f64; 3]) -> f64 + Send + Sync;
type MatrixFn = dyn Fn([f64; 3]) -> [[f64; 3]; 3] + Send + Sync;

/// Scalar field `m(x)` with its declared polynomial degree (used to pick
/// quadrature degrees; non-polynomial fields should declare an adequate
/// surrogate degree).
#[derive(Clone)]
pub struct ScalarCoefficient {
    eval: Arc<ScalarFn>,
    pub degree: usize,
}

impl fmt::Debug for ScalarCoefficient {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ScalarCoefficient").field("degree", &self.degree).finish()
    }
}

impl ScalarCoefficient {
    pub fn constant(value: f64) -> Self {
        Self { eval: Arc::new(move |_| value), degree: 0 }
    }

    pub fn from_fn<F: Fn([f64; 3]) -> f64 + Send + Sync + 'static>(f: F, degree: usize) -> Self {
        Self { eval: Arc::new(f), degree }
    }

    pub fn from_expr(expr: &PolyExpr) -> Self {
        let e = expr.clone();
        let degree = e.degree();
        Self { eval: Arc::new(move |x| e.eval(x)), degree }
    }

    #[inline]
    pub fn eval(&self, x: [f64; 3]) -> f64 {
        (self.eval)(x)
    }
}

/// Symmetric matrix field `M(x)` for the elliptic problem. A coefficient
/// built through [`MatrixCoefficient::isotropic`] declares `M = m·I`, which
/// the operator builder may exploit with a reduced storage path.
#[derive(Clone)]
pub struct MatrixCoefficient {
    eval: Arc<MatrixFn>,
    pub degree: usize,
    iso: Option<ScalarCoefficient>,
}

impl fmt::Debug for MatrixCoefficient {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("MatrixCoefficient")
            .field("degree", &self.degree)
            .field("isotropic", &self.iso.is_some())
            .finish()
    }
}

impl MatrixCoefficient {
    pub fn identity() -> Self {
        Self::diagonal(&[1.0, 1.0, 1.0])
    }

    /// Constant diagonal matrix; entries beyond `d` are ignored.
    pub fn diagonal(entries: &[f64]) -> Self {
        let mut m = [[0.0; 3]; 3];
        for (i, &v) in entries.iter().take(3).enumerate() {
            m[i][i] = v;
        }
        for i in entries.len()..3 {
            m[i][i] = 1.0;
        }
        Self { eval: Arc::new(move |_| m), degree: 0, iso: None }
    }

    /// Constant full matrix (must be symmetric; checked at build time by the
    /// consumers).
    pub fn constant(m: [[f64; 3]; 3]) -> Self {
        Self { eval: Arc::new(move |_| m), degree: 0, iso: None }
    }

    /// Declares `M(x) = m(x)·I`.
    pub fn isotropic(m: ScalarCoefficient) -> Self {
        let mm = m.clone();
        let degree = m.degree;
        Self {
            eval: Arc::new(move |x| {
                let v = mm.eval(x);
                [[v, 0.0, 0.0], [0.0, v, 0.0], [0.0, 0.0, v]]
            }),
            degree,
            iso: Some(m),
        }
    }

    pub fn from_fn<F: Fn([f64; 3]) -> [[f64; 3]; 3] + Send + Sync + 'static>(
        f: F,
        degree: usize,
    ) -> Self {
        Self { eval: Arc::new(f), degree, iso: None }
    }

    #[inline]
    pub fn eval(&self, x: [f64; 3]) -> [[f64; 3]; 3] {
        (self.eval)(x)
    }

    pub fn isotropic_part(&self) -> Option<&ScalarCoefficient> {
        self.iso.as_ref()
    }

    /// Strips the isotropy declaration so consumers take the general path.
    pub fn as_full(&self) -> Self {
        Self { eval: self.eval.clone(), degree: self.degree, iso: None }
    }

    /// Checks symmetry and positive definiteness of `M` at one point.
    pub fn validate_at(&self, d: usize, x: [f64; 3]) -> Result<()> {
        let m = self.eval(x);
        let scale = m.iter().flatten().fold(1.0f64, |a, v| a.max(v.abs()));
        for i in 0..d {
            for j in (i + 1)..d {
                if (m[i][j] - m[j][i]).abs() > 1e-12 * scale {
                    return Err(Error::NonSymmetricCoefficient);
                }
            }
        }
        // leading principal minors of the d×d block
        let m11 = m[0][0];
        let m2 = m[0][0] * m[1][1] - m[0][1] * m[1][0];
        let spd = if d == 2 {
            m11 > 0.0 && m2 > 0.0
        } else {
            let m3 = m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
                - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
                + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
            m11 > 0.0 && m2 > 0.0 && m3 > 0.0
        };
        if !spd {
            return Err(Error::NotPositiveDefinite);
        }
        Ok(())
    }
}

/// Polynomial in `x`, `y`, `z` as a sum of monomial terms.
#[derive(Debug, Clone, PartialEq)]
pub struct PolyExpr {
    terms: Vec<(f64, [u32; 3])>,
}

impl PolyExpr {
    pub fn constant(c: f64) -> Self {
        Self { terms: vec![(c, [0, 0, 0])] }
    }

    /// Parses an expression restricted to `d` spatial variables.
    ///
    /// Grammar: `expr := term ('+' term)*`, `term := factor ('*' factor)*`,
    /// `factor := atom ('^' uint)?`, `atom := number | 'x' | 'y' | 'z'`.
    pub fn parse(src: &str, d: usize) -> Result<Self> {
        Parser { src: src.as_bytes(), pos: 0, d }.parse()
    }

    pub fn degree(&self) -> usize {
        self.terms.iter().map(|(_, e)| (e[0] + e[1] + e[2]) as usize).max().unwrap_or(0)
    }

    pub fn eval(&self, x: [f64; 3]) -> f64 {
        self.terms
            .iter()
            .map(|(c, e)| {
                c * x[0].powi(e[0] as i32) * x[1].powi(e[1] as i32) * x[2].powi(e[2] as i32)
            })
            .sum()
    }
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
    d: usize,
}

impl<'a> Parser<'a> {
    fn parse(mut self) -> Result<PolyExpr> {
        let expr = self.expr()?;
        self.skip_ws();
        if self.pos != self.src.len() {
            return Err(self.error("trailing input"));
        }
        Ok(expr)
    }

    fn error(&self, msg: &str) -> Error {
        Error::BadExpression(format!(
            "{msg} at byte {} of {:?}",
            self.pos,
            String::from_utf8_lossy(self.src)
        ))
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn expr(&mut self) -> Result<PolyExpr> {
        let mut terms = self.term()?;
        while self.peek() == Some(b'+') {
            self.pos += 1;
            terms.terms.extend(self.term()?.terms);
        }
        Ok(terms)
    }

    fn term(&mut self) -> Result<PolyExpr> {
        let mut acc = self.factor()?;
        while self.peek() == Some(b'*') {
            self.pos += 1;
            let rhs = self.factor()?;
            acc = (acc.0 * rhs.0, [acc.1[0] + rhs.1[0], acc.1[1] + rhs.1[1], acc.1[2] + rhs.1[2]]);
        }
        Ok(PolyExpr { terms: vec![acc] })
    }

    fn factor(&mut self) -> Result<(f64, [u32; 3])> {
        let (coeff, mut exps) = self.atom()?;
        if self.peek() == Some(b'^') {
            self.pos += 1;
            let power = self.uint()?;
            let var = exps.iter().position(|&e| e > 0);
            match var {
                Some(i) if coeff == 1.0 => exps[i] *= power,
                _ => return Err(self.error("'^' applies to a variable")),
            }
        }
        Ok((coeff, exps))
    }

    fn atom(&mut self) -> Result<(f64, [u32; 3])> {
        match self.peek() {
            Some(b'x') => {
                self.pos += 1;
                Ok((1.0, [1, 0, 0]))
            }
            Some(b'y') => {
                self.pos += 1;
                Ok((1.0, [0, 1, 0]))
            }
            Some(b'z') if self.d == 3 => {
                self.pos += 1;
                Ok((1.0, [0, 0, 1]))
            }
            Some(b'z') => Err(self.error("variable 'z' is not available in 2D")),
            Some(c) if c.is_ascii_digit() || c == b'.' => {
                let start = self.pos;
                while self
                    .src
                    .get(self.pos)
                    .is_some_and(|c| c.is_ascii_digit() || *c == b'.')
                {
                    self.pos += 1;
                }
                let text = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
                text.parse::<f64>().map(|v| (v, [0, 0, 0])).map_err(|_| self.error("bad number"))
            }
            _ => Err(self.error("expected a number or variable")),
        }
    }

    fn uint(&mut self) -> Result<u32> {
        self.skip_ws();
        let start = self.pos;
        while self.src.get(self.pos).is_some_and(|c| c.is_ascii_digit()) {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.error("expected an exponent"));
        }
        std::str::from_utf8(&self.src[start..self.pos])
            .unwrap()
            .parse()
            .map_err(|_| self.error("bad exponent"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_constants_and_polynomials() {
        let p = PolyExpr::parse("1", 2).unwrap();
        assert_eq!(p.degree(), 0);
        assert_eq!(p.eval([5.0, 5.0, 5.0]), 1.0);

        let p = PolyExpr::parse("1 + x", 2).unwrap();
        assert_eq!(p.degree(), 1);
        assert_eq!(p.eval([0.25, 0.0, 0.0]), 1.25);

        let p = PolyExpr::parse("2*x*y^2 + 0.5", 2).unwrap();
        assert_eq!(p.degree(), 3);
        assert!((p.eval([2.0, 3.0, 0.0]) - (2.0 * 2.0 * 9.0 + 0.5)).abs() < 1e-15);

        let p = PolyExpr::parse("x^2 + y^2 + z^2", 3).unwrap();
        assert_eq!(p.degree(), 2);
        assert_eq!(p.eval([1.0, 2.0, 3.0]), 14.0);
    }

    #[test]
    fn rejects_malformed_expressions() {
        assert!(PolyExpr::parse("z", 2).is_err());
        assert!(PolyExpr::parse("1 - x", 2).is_err());
        assert!(PolyExpr::parse("x^", 2).is_err());
        assert!(PolyExpr::parse("2^3", 2).is_err());
        assert!(PolyExpr::parse("", 2).is_err());
        assert!(PolyExpr::parse("1..5", 2).is_err());
    }

    #[test]
    fn scalar_coefficient_from_expression() {
        let m = ScalarCoefficient::from_expr(&PolyExpr::parse("1+x+y", 2).unwrap());
        assert_eq!(m.degree, 1);
        assert!((m.eval([0.5, 0.25, 0.0]) - 1.75).abs() < 1e-15);
    }

    #[test]
    fn matrix_coefficient_validation() {
        let good = MatrixCoefficient::diagonal(&[1.0, 2.0, 3.0]);
        assert!(good.validate_at(3, [0.1, 0.2, 0.3]).is_ok());

        let asym = MatrixCoefficient::constant([[1.0, 0.5, 0.0], [0.2, 1.0, 0.0], [0.0, 0.0, 1.0]]);
        assert!(matches!(asym.validate_at(2, [0.0; 3]), Err(Error::NonSymmetricCoefficient)));

        let indef = MatrixCoefficient::diagonal(&[1.0, -2.0]);
        assert!(matches!(indef.validate_at(2, [0.0; 3]), Err(Error::NotPositiveDefinite)));
    }

    #[test]
    fn isotropic_declaration_and_stripping() {
        let iso = MatrixCoefficient::isotropic(ScalarCoefficient::constant(2.5));
        assert!(iso.isotropic_part().is_some());
        assert_eq!(iso.eval([0.0; 3])[1][1], 2.5);
        assert!(iso.as_full().isotropic_part().is_none());
        assert!(MatrixCoefficient::identity().isotropic_part().is_none());
    }
}
