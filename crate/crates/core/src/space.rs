//! Sequence spaces and the maps acting on them.
//!
//! A point of `E` is a complex sequence `(x_1, x_2, ...)`, always with the
//! convention `x_0 = 0`. `M_{k,m}` is the `(k+m-1)`-dimensional subspace of
//! sequences with `x_{i+m} = x_i` for `i >= k+1` and `beta x_{k+m} = x_k`;
//! it is coordinatised by `x_1, ..., x_{k+m-1}`.

use crate::error::{KochError, Result};
use crate::numeric::{root_of_unity, Cx};
use serde::Serialize;

/// `(d, beta, k, m)`, with `beta = exp(2 pi i j / d)` given by its index `j`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct KochIndex {
    pub d: u32,
    pub beta_index: u32,
    pub k: usize,
    pub m: usize,
}

impl KochIndex {
    pub fn new(d: u32, beta_index: u32, k: usize, m: usize) -> Result<Self> {
        if d < 2 {
            return Err(KochError::InvalidIndex(format!("degree d = {d} must be at least 2")));
        }
        if beta_index == 0 || beta_index >= d {
            return Err(KochError::InvalidIndex(format!(
                "beta index {beta_index} must lie in 1..={}",
                d - 1
            )));
        }
        if m == 0 {
            return Err(KochError::InvalidIndex("period m must be at least 1".into()));
        }
        let idx = Self { d, beta_index, k, m };
        let beta = idx.beta();
        if (beta.powu(d) - 1.0).norm() > 1e-12 || (beta - 1.0).norm() <= 1e-12 {
            return Err(KochError::InvalidIndex(format!("beta = {beta} is not a nontrivial d-th root of unity")));
        }
        Ok(idx)
    }

    pub fn beta(&self) -> Cx {
        root_of_unity(self.beta_index as i64, self.d)
    }

    /// `dim M_{k,m} = k + m - 1`.
    pub fn dim(&self) -> usize {
        self.k + self.m - 1
    }

    pub fn type_pair(&self) -> TypePair {
        TypePair::new(self.k, self.m)
    }

    /// Same `d` and `beta`, other type.
    pub fn with_type(&self, t: TypePair) -> Self {
        Self {
            k: t.k,
            m: t.m,
            ..*self
        }
    }

    /// Writes `x_i` for a point of `M_{k,m}` as `coef * x_j` with `1 <= j <= k+m-1`,
    /// or `None` when `x_i` vanishes identically. The same rules reduce the
    /// coordinate forms `omega_i`.
    pub fn reduce(&self, i: usize) -> Option<(usize, Cx)> {
        let top = self.k + self.m;
        let mut i = i;
        let mut coef = Cx::new(1.0, 0.0);
        loop {
            if i == 0 {
                return None;
            }
            if i < top {
                return Some((i, coef));
            }
            if i == top {
                if self.k == 0 {
                    return None;
                }
                coef /= self.beta();
                i = self.k;
                continue;
            }
            i = self.k + 1 + (i - self.k - 1) % self.m;
        }
    }
}

/// Preperiod and period of a preperiodic sequence.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct TypePair {
    pub k: usize,
    pub m: usize,
}

impl TypePair {
    pub const fn new(k: usize, m: usize) -> Self {
        Self { k, m }
    }
}

impl std::fmt::Display for TypePair {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "({}, {})", self.k, self.m)
    }
}

/// `a ≼ b`: `m_a | m_b` and either `k_a = k_b`, or `k_a = 0` and `m_a | k_b`.
pub fn leq(a: TypePair, b: TypePair) -> bool {
    b.m % a.m == 0 && (a.k == b.k || (a.k == 0 && b.k % a.m == 0))
}

/// `a ≺ b`.
pub fn lt(a: TypePair, b: TypePair) -> bool {
    a != b && leq(a, b)
}

/// A point (or tangent vector) of `M_{k,m}` in coordinates `x_1..x_{k+m-1}`.
#[derive(Debug, Clone, PartialEq)]
pub struct SeqVec {
    index: KochIndex,
    coords: Vec<Cx>,
}

impl SeqVec {
    pub fn new(index: KochIndex, coords: Vec<Cx>) -> Result<Self> {
        if coords.len() != index.dim() {
            return Err(KochError::DimensionMismatch {
                expected: index.dim(),
                got: coords.len(),
            });
        }
        Ok(Self { index, coords })
    }

    pub fn zeros(index: KochIndex) -> Self {
        Self {
            index,
            coords: vec![Cx::new(0.0, 0.0); index.dim()],
        }
    }

    pub fn index(&self) -> &KochIndex {
        &self.index
    }

    pub fn coords(&self) -> &[Cx] {
        &self.coords
    }

    pub fn into_coords(self) -> Vec<Cx> {
        self.coords
    }

    /// `x_i` for any `i >= 0`.
    pub fn get(&self, i: usize) -> Cx {
        match self.index.reduce(i) {
            Some((j, coef)) => coef * self.coords[j - 1],
            None => Cx::new(0.0, 0.0),
        }
    }

    /// `(x_1, ..., x_len)`.
    pub fn expand(&self, len: usize) -> TruncVec {
        TruncVec::new((1..=len).map(|i| self.get(i)).collect())
    }

    pub fn sup_norm(&self) -> f64 {
        self.coords.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn scale(&self, a: Cx) -> Self {
        Self {
            index: self.index,
            coords: self.coords.iter().map(|x| a * x).collect(),
        }
    }

    /// The same sequence, read as a point of the space of `outer`.
    pub fn embed(&self, outer: KochIndex) -> SeqVec {
        SeqVec {
            index: outer,
            coords: (1..=outer.dim()).map(|i| self.get(i)).collect(),
        }
    }
}

/// `(x_1, ..., x_L)`, a truncated point of `E`.
#[derive(Debug, Clone, PartialEq)]
pub struct TruncVec {
    entries: Vec<Cx>,
}

impl TruncVec {
    pub fn new(entries: Vec<Cx>) -> Self {
        Self { entries }
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> &[Cx] {
        &self.entries
    }

    /// `x_i`, with `x_0 = 0`.
    pub fn get(&self, i: usize) -> Cx {
        if i == 0 {
            Cx::new(0.0, 0.0)
        } else {
            self.entries[i - 1]
        }
    }

    pub fn sup_norm(&self) -> f64 {
        self.entries.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }
}

fn require_len(x: &TruncVec, idx: &KochIndex) -> Result<()> {
    let need = idx.k + idx.m;
    if x.len() < need {
        return Err(KochError::TruncationTooShort { len: x.len(), need });
    }
    Ok(())
}

/// The projection of `E` onto `H_{k,m}` along the constants: `y_i = x_i - kappa`
/// with `kappa` chosen so that `beta y_{k+m} = y_k`.
pub fn project_pi(idx: &KochIndex, x: &TruncVec) -> Result<TruncVec> {
    require_len(x, idx)?;
    let kappa = if idx.k == 0 {
        x.get(idx.m)
    } else {
        let beta = idx.beta();
        (beta * x.get(idx.k + idx.m) - x.get(idx.k)) / (beta - 1.0)
    };
    Ok(TruncVec::new(x.entries.iter().map(|v| v - kappa).collect()))
}

/// `Q(x) = (0, x_1^d, x_2^d, ...)`.
pub fn q_map(d: u32, x: &TruncVec) -> TruncVec {
    let mut out = Vec::with_capacity(x.len());
    for i in 1..=x.len() {
        out.push(x.get(i - 1).powu(d));
    }
    TruncVec::new(out)
}

/// `F_{k,m} = pi_{k,m} ∘ Q` on truncated sequences.
pub fn apply_f_trunc(idx: &KochIndex, x: &TruncVec) -> Result<TruncVec> {
    project_pi(idx, &q_map(idx.d, x))
}

// The linear form shared by F, tau and the Jacobian: given a sequence u,
// returns -u_{m-1} (k = 0) or -(beta u_{k+m-1} - u_{k-1}) / (beta - 1).
pub(crate) fn first_entry(idx: &KochIndex, u: impl Fn(usize) -> Cx) -> Cx {
    if idx.k == 0 {
        -u(idx.m - 1)
    } else {
        let beta = idx.beta();
        -(beta * u(idx.k + idx.m - 1) - u(idx.k - 1)) / (beta - 1.0)
    }
}

/// `F_{k,m}` on `M_{k,m}`: `y_1` from the linear form above applied to
/// `x^d`, and `y_i = x_{i-1}^d + y_1`.
pub fn apply_f(idx: &KochIndex, x: &SeqVec) -> SeqVec {
    let n = idx.dim();
    let d = idx.d;
    let pow = |i: usize| x.get(i).powu(d);
    let y1 = first_entry(idx, pow);
    let mut coords = Vec::with_capacity(n);
    if n > 0 {
        coords.push(y1);
        for i in 2..=n {
            coords.push(pow(i - 1) + y1);
        }
    }
    SeqVec { index: *idx, coords }
}

fn require_g(idx: &KochIndex, len: usize) -> Result<()> {
    if idx.dim() < 2 {
        return Err(KochError::GUndefined { dim: idx.dim() });
    }
    if len != idx.dim() {
        return Err(KochError::DimensionMismatch {
            expected: idx.dim(),
            got: len,
        });
    }
    Ok(())
}

fn coord(x: &[Cx], i: usize) -> Cx {
    if i == 0 {
        Cx::new(0.0, 0.0)
    } else {
        x[i - 1]
    }
}

/// The linear change of coordinates `tau`: entries `(t, x_1 + t, ..., x_{n-1} + t)`
/// with `t = -x_{m-1}` (k = 0) or `t = -(beta x_{k+m-1} - x_{k-1}) / (beta - 1)`.
pub fn tau(idx: &KochIndex, x: &[Cx]) -> Result<Vec<Cx>> {
    require_g(idx, x.len())?;
    let t = first_entry(idx, |i| coord(x, i));
    let mut out = Vec::with_capacity(x.len());
    out.push(t);
    out.extend(x[..x.len() - 1].iter().map(|v| v + t));
    Ok(out)
}

/// Inverse of [`tau`].
pub fn tau_inverse(idx: &KochIndex, u: &[Cx]) -> Result<Vec<Cx>> {
    require_g(idx, u.len())?;
    let n = u.len();
    let t = u[0];
    let mut x: Vec<Cx> = (1..n).map(|i| u[i] - t).collect();
    let last = if idx.k == 0 {
        -t
    } else {
        let beta = idx.beta();
        (coord(&x, idx.k - 1) - (beta - 1.0) * t) / beta
    };
    x.push(last);
    Ok(x)
}

/// Coordinatewise power `x_i^d`.
pub fn power_map(d: u32, x: &[Cx]) -> Vec<Cx> {
    x.iter().map(|v| v.powu(d)).collect()
}

/// `G_{k,m} = power ∘ tau`.
pub fn apply_g(idx: &KochIndex, x: &[Cx]) -> Result<Vec<Cx>> {
    Ok(power_map(idx.d, &tau(idx, x)?))
}

/// `tau ∘ power`, which is `F_{k,m}` written in coordinates.
pub fn apply_f_tilde(idx: &KochIndex, x: &[Cx]) -> Result<Vec<Cx>> {
    tau(idx, &power_map(idx.d, x))
}

fn scaled(tol: f64, norm: f64) -> f64 {
    tol * (1.0 + norm)
}

/// Membership of a truncated sequence in `M_{k,m}`.
pub fn in_m(idx: &KochIndex, x: &TruncVec, tol: f64) -> bool {
    if x.len() < idx.k + idx.m {
        return false;
    }
    let eps = scaled(tol, x.sup_norm());
    let beta = idx.beta();
    let (k, m) = (idx.k, idx.m);
    if (beta * x.get(k + m) - x.get(k)).norm() > eps {
        return false;
    }
    (k + 1..=x.len().saturating_sub(m)).all(|i| (x.get(i + m) - x.get(i)).norm() <= eps)
}

/// Some two of `x_1, ..., x_{k+m}` coincide.
pub fn in_delta(idx: &KochIndex, x: &SeqVec, tol: f64) -> bool {
    let top = idx.k + idx.m;
    let vals: Vec<Cx> = (1..=top).map(|i| x.get(i)).collect();
    let eps = scaled(tol, x.sup_norm());
    (0..top).any(|i| (i + 1..top).any(|j| (vals[i] - vals[j]).norm() <= eps))
}

/// Some coordinate `x_i`, `1 <= i <= k+m-1`, vanishes.
pub fn is_critical(idx: &KochIndex, x: &SeqVec, tol: f64) -> bool {
    let eps = scaled(tol, x.sup_norm());
    (1..=idx.dim()).any(|i| x.get(i).norm() <= eps)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> Cx {
        Cx::new(re, 0.0)
    }

    fn reals(v: &[f64]) -> Vec<Cx> {
        v.iter().map(|&x| c(x)).collect()
    }

    fn idx(d: u32, j: u32, k: usize, m: usize) -> KochIndex {
        KochIndex::new(d, j, k, m).unwrap()
    }

    fn assert_close(a: &[Cx], b: &[Cx], tol: f64) {
        assert_eq!(a.len(), b.len());
        for (x, y) in a.iter().zip(b) {
            assert!((x - y).norm() <= tol, "{a:?} vs {b:?}");
        }
    }

    #[test]
    fn index_validation() {
        assert!(KochIndex::new(2, 0, 1, 1).is_err());
        assert!(KochIndex::new(2, 2, 1, 1).is_err());
        assert!(KochIndex::new(1, 1, 1, 1).is_err());
        assert!(KochIndex::new(2, 1, 1, 0).is_err());
        assert_eq!(idx(2, 1, 1, 1).beta(), c(-1.0));
        assert_eq!(idx(3, 2, 2, 3).dim(), 4);
    }

    #[test]
    fn expansion_conventions() {
        // (k, m) = (1, 2): x_3 = x_1 / beta, then period 2 from index 2
        let i = idx(2, 1, 1, 2);
        let x = SeqVec::new(i, reals(&[3.0, 5.0])).unwrap();
        let got: Vec<Cx> = (0..=6).map(|j| x.get(j)).collect();
        assert_eq!(got, reals(&[0.0, 3.0, 5.0, -3.0, 5.0, -3.0, 5.0]));

        // k = 0: x_m = 0
        let i = idx(2, 1, 0, 3);
        let x = SeqVec::new(i, reals(&[1.0, 2.0])).unwrap();
        let got: Vec<Cx> = (1..=7).map(|j| x.get(j)).collect();
        assert_eq!(got, reals(&[1.0, 2.0, 0.0, 1.0, 2.0, 0.0, 1.0]));
        assert!(in_m(&i, &x.expand(12), 1e-12));
    }

    #[test]
    fn projection_examples() {
        let y = project_pi(&idx(2, 1, 2, 1), &TruncVec::new(reals(&[1.0, 1.0, 1.0]))).unwrap();
        assert_eq!(y.entries(), reals(&[0.0, 0.0, 0.0]).as_slice());

        let x = TruncVec::new(reals(&[3.0, 5.0, 7.0, 9.0]));
        let y = project_pi(&idx(2, 1, 0, 2), &x).unwrap();
        assert_eq!(y.entries(), reals(&[-2.0, 0.0, 2.0, 4.0]).as_slice());

        let i = idx(2, 1, 1, 1);
        let y = project_pi(&i, &TruncVec::new(reals(&[4.0, 2.0]))).unwrap();
        assert_eq!(y.entries(), reals(&[1.0, -1.0]).as_slice());
        assert_eq!(i.beta() * y.get(2) - y.get(1), c(0.0));

        let err = project_pi(&idx(2, 1, 2, 2), &TruncVec::new(reals(&[1.0, 2.0, 3.0]))).unwrap_err();
        assert!(matches!(err, KochError::TruncationTooShort { len: 3, need: 4 }));
    }

    #[test]
    fn q_examples() {
        let y = q_map(2, &TruncVec::new(reals(&[2.0, 0.0, 0.0, 0.0])));
        assert_eq!(y.entries(), reals(&[0.0, 4.0, 0.0, 0.0]).as_slice());
        let y = q_map(3, &TruncVec::new(reals(&[1.0, 2.0])));
        assert_eq!(y.entries(), reals(&[0.0, 1.0]).as_slice());
        let y = q_map(5, &TruncVec::new(reals(&[0.0; 3])));
        assert_eq!(y.entries(), reals(&[0.0; 3]).as_slice());
    }

    #[test]
    fn f_examples() {
        let i = idx(2, 1, 2, 1);
        let y = apply_f(&i, &SeqVec::new(i, reals(&[2.0, 0.0])).unwrap());
        assert_eq!(y.coords(), reals(&[-2.0, 2.0]).as_slice());
        assert_eq!(y.expand(6).entries(), reals(&[-2.0, 2.0, -2.0, -2.0, -2.0, -2.0]).as_slice());

        let i = idx(2, 1, 3, 1);
        let y = apply_f(&i, &SeqVec::new(i, reals(&[2.0, 0.0, 0.0])).unwrap());
        assert_eq!(y.coords(), reals(&[0.0, 4.0, 0.0]).as_slice());

        let i = idx(2, 1, 1, 2);
        let z = SeqVec::new(i, reals(&[-2.0, 2.0])).unwrap();
        assert_eq!(apply_f(&i, &z), z);
    }

    #[test]
    fn f_trunc_examples() {
        let i = idx(2, 1, 2, 1);
        let x = TruncVec::new(reals(&[2.0, 0.0, 0.0, 0.0, 0.0, 0.0]));
        let y = apply_f_trunc(&i, &x).unwrap();
        assert_eq!(&y.entries()[..3], reals(&[-2.0, 2.0, -2.0]).as_slice());
        let zero = TruncVec::new(reals(&[0.0; 6]));
        assert_eq!(apply_f_trunc(&i, &zero).unwrap(), zero);
    }

    #[test]
    fn g_and_tau_examples() {
        // G = power ∘ tau; tau(1, 1) = (-1, 0) for (k, m) = (0, 3)
        let i = idx(2, 1, 0, 3);
        assert_eq!(tau(&i, &reals(&[1.0, 1.0])).unwrap(), reals(&[-1.0, 0.0]));
        assert_eq!(apply_g(&i, &reals(&[1.0, 1.0])).unwrap(), reals(&[1.0, 0.0]));

        let i = idx(2, 1, 1, 2);
        assert_eq!(apply_g(&i, &reals(&[0.0, 0.0])).unwrap(), reals(&[0.0, 0.0]));
        assert_eq!(tau(&i, &reals(&[-2.0, 2.0])).unwrap(), reals(&[-1.0, -3.0]));
        assert_eq!(tau(&i, &reals(&[0.0, 0.0])).unwrap(), reals(&[0.0, 0.0]));

        let err = apply_g(&idx(2, 1, 1, 1), &[]).unwrap_err();
        assert!(err.to_string().contains("G undefined at this size"));
        assert!(tau(&idx(2, 1, 0, 2), &reals(&[1.0])).is_err());
    }

    #[test]
    fn f_tilde_is_f_in_coordinates() {
        for (k, m) in [(0, 3), (1, 2), (2, 2), (3, 1), (2, 3)] {
            let i = idx(3, 2, k, m);
            let x: Vec<Cx> = (0..i.dim()).map(|j| Cx::new(0.3 * j as f64 - 0.5, 0.2 + 0.1 * j as f64)).collect();
            let f = apply_f(&i, &SeqVec::new(i, x.clone()).unwrap());
            assert_close(f.coords(), &apply_f_tilde(&i, &x).unwrap(), 1e-14);
        }
    }

    #[test]
    fn tau_inverse_round_trip() {
        for (k, m) in [(0, 3), (1, 2), (2, 1), (3, 3)] {
            let i = idx(3, 1, k, m);
            let x: Vec<Cx> = (0..i.dim()).map(|j| Cx::new(1.0 + j as f64, -0.5 * j as f64)).collect();
            let back = tau_inverse(&i, &tau(&i, &x).unwrap()).unwrap();
            assert_close(&back, &x, 1e-13);
        }
    }

    #[test]
    fn order_examples() {
        assert!(leq(TypePair::new(0, 1), TypePair::new(0, 2)));
        assert!(leq(TypePair::new(1, 1), TypePair::new(1, 2)));
        assert!(!leq(TypePair::new(0, 2), TypePair::new(1, 2)));
        assert!(leq(TypePair::new(0, 2), TypePair::new(2, 2)));
        assert!(!lt(TypePair::new(1, 2), TypePair::new(1, 2)));
    }

    #[test]
    fn membership_examples() {
        let i = idx(2, 1, 2, 2);
        let z = SeqVec::new(i, reals(&[-1.0, 0.0, -1.0])).unwrap();
        assert!(in_m(&i, &z.expand(12), 1e-9));
        assert!(in_delta(&i, &z, 1e-9));
        assert!(is_critical(&i, &z, 1e-9));

        let i = idx(2, 1, 1, 2);
        let x = SeqVec::new(i, reals(&[1.0, 2.0])).unwrap();
        assert!(!is_critical(&i, &x, 1e-9));
        assert!(!in_m(&i, &TruncVec::new(reals(&[1.0, 2.0, 3.0, 4.0])), 1e-9));
    }
}
