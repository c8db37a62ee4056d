use super::{find_roots_with, is_finite, Cx, Multiset, RootOptions, Tolerance};
use crate::error::{KochError, Result};
use nalgebra::DMatrix;

/// Dense complex square matrix. An empty (0 x 0) matrix stands for the
/// trivial space.
#[derive(Debug, Clone, PartialEq)]
pub struct SquareMatrix(DMatrix<Cx>);

impl SquareMatrix {
    pub fn zeros(n: usize) -> Self {
        Self(DMatrix::zeros(n, n))
    }

    pub fn identity(n: usize) -> Self {
        Self(DMatrix::identity(n, n))
    }

    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> Cx) -> Self {
        Self(DMatrix::from_fn(n, n, |i, j| f(i, j)))
    }

    pub fn from_rows(rows: &[Vec<Cx>]) -> Result<Self> {
        let n = rows.len();
        if let Some(bad) = rows.iter().find(|r| r.len() != n) {
            return Err(KochError::DimensionMismatch {
                expected: n,
                got: bad.len(),
            });
        }
        Ok(Self::from_fn(n, |i, j| rows[i][j]))
    }

    pub fn from_real_rows(rows: &[&[f64]]) -> Result<Self> {
        let rows: Vec<Vec<Cx>> = rows
            .iter()
            .map(|r| r.iter().map(|&x| Cx::new(x, 0.0)).collect())
            .collect();
        Self::from_rows(&rows)
    }

    pub fn n(&self) -> usize {
        self.0.nrows()
    }

    pub fn get(&self, i: usize, j: usize) -> Cx {
        self.0[(i, j)]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Cx) {
        self.0[(i, j)] = v;
    }

    pub fn rows(&self) -> Vec<Vec<Cx>> {
        (0..self.n())
            .map(|i| (0..self.n()).map(|j| self.get(i, j)).collect())
            .collect()
    }

    pub fn transpose(&self) -> Self {
        Self(self.0.transpose())
    }

    pub fn mul(&self, rhs: &Self) -> Self {
        Self(&self.0 * &rhs.0)
    }

    pub fn add(&self, rhs: &Self) -> Self {
        Self(&self.0 + &rhs.0)
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        Self(&self.0 - &rhs.0)
    }

    pub fn scale(&self, s: Cx) -> Self {
        Self(&self.0 * s)
    }

    pub fn pow(&self, p: usize) -> Self {
        let mut acc = Self::identity(self.n());
        for _ in 0..p {
            acc = acc.mul(self);
        }
        acc
    }

    pub fn mul_vec(&self, v: &[Cx]) -> Vec<Cx> {
        (0..self.n())
            .map(|i| (0..self.n()).map(|j| self.get(i, j) * v[j]).sum())
            .collect()
    }

    pub fn trace(&self) -> Cx {
        (0..self.n()).map(|i| self.get(i, i)).sum()
    }

    /// Largest entry modulus.
    pub fn max_abs(&self) -> f64 {
        self.0.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Maximum absolute row sum.
    pub fn inf_norm(&self) -> f64 {
        (0..self.n())
            .map(|i| (0..self.n()).map(|j| self.get(i, j).norm()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|z| is_finite(*z))
    }

    pub fn inverse(&self) -> Result<Self> {
        self.0.clone().try_inverse().map(Self).ok_or(KochError::Singular)
    }

    pub fn as_dmatrix(&self) -> &DMatrix<Cx> {
        &self.0
    }

    pub fn into_dmatrix(self) -> DMatrix<Cx> {
        self.0
    }
}

impl From<DMatrix<Cx>> for SquareMatrix {
    fn from(m: DMatrix<Cx>) -> Self {
        assert_eq!(m.nrows(), m.ncols(), "matrix must be square");
        Self(m)
    }
}

/// Coefficients `[c_0, ..., c_n]` of `det(x I - A)`, lowest degree first,
/// by the Faddeev-LeVerrier recursion.
pub fn characteristic_polynomial(a: &SquareMatrix) -> Vec<Cx> {
    let n = a.n();
    let mut coeffs = vec![Cx::new(0.0, 0.0); n + 1];
    coeffs[n] = Cx::new(1.0, 0.0);
    let mut m = SquareMatrix::zeros(n);
    for k in 1..=n {
        // M_k = A M_{k-1} + c_{n-k+1} I
        let mut next = a.mul(&m);
        for i in 0..n {
            let v = next.get(i, i) + coeffs[n - k + 1];
            next.set(i, i, v);
        }
        m = next;
        coeffs[n - k] = -a.mul(&m).trace() / k as f64;
    }
    coeffs
}

// Leading coefficients that sit at rounding level relative to
// binom(n, j) rho^(n-j) carry no information and are set to zero.
const ZERO_COEFF_TOL: f64 = 1e-12;

/// Eigenvalues with algebraic multiplicity.
///
/// Trailing coefficients of the characteristic polynomial that are zero to
/// rounding are deflated exactly: a nilpotent Jordan block of size `s`
/// perturbed by `eps` would otherwise show up as a ring of radius
/// `eps^(1/s)` instead of an exact zero eigenvalue.
pub fn eigenvalues(a: &SquareMatrix) -> Result<Multiset> {
    if !a.is_finite() {
        return Err(KochError::NonFinite("matrix entries"));
    }
    let n = a.n();
    let tol = Tolerance::default();
    if n == 0 {
        return Ok(Multiset::new(Vec::new(), tol));
    }
    let coeffs = characteristic_polynomial(a);
    let rho = a.inf_norm().max(f64::MIN_POSITIVE);

    let mut zeros = 0;
    let mut binom = 1.0f64;
    while zeros < n {
        let j = zeros;
        // binom(n, j)
        let scale = binom * rho.powi((n - j) as i32);
        if coeffs[j].norm() <= ZERO_COEFF_TOL * scale {
            zeros += 1;
            binom = binom * (n - j) as f64 / (j + 1) as f64;
        } else {
            break;
        }
    }

    let reduced: Vec<Cx> = coeffs[zeros..].to_vec();
    let degree = reduced.len() - 1;
    // Fujiwara bound on the moduli of the remaining roots
    let bound = (1..=degree)
        .map(|j| reduced[degree - j].norm().powf(1.0 / j as f64))
        .fold(0.0, f64::max)
        * 2.0;
    let horner = |x: Cx| {
        let mut p = Cx::new(0.0, 0.0);
        let mut dp = Cx::new(0.0, 0.0);
        for c in reduced.iter().rev() {
            dp = dp * x + p;
            p = p * x + c;
        }
        (p, dp)
    };
    let opts = RootOptions {
        // polynomial residuals scale with the coefficient size
        residual_tol: 1e-12 * coeffs.iter().map(|c| c.norm()).fold(1.0, f64::max),
        ..RootOptions::default()
    };
    let mut values = vec![Cx::new(0.0, 0.0); zeros];
    values.extend(find_roots_with(&horner, degree, bound.max(1.0), &opts)?);
    Ok(Multiset::new(values, tol))
}
