use super::Cx;
use serde::Serialize;
use std::cmp::Ordering;

/// Matching tolerance: two values agree when their distance is at most
/// `max(abs, rel * scale)`, with `scale` the largest modulus on either side.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Tolerance {
    pub abs: f64,
    pub rel: f64,
}

impl Tolerance {
    pub const fn new(abs: f64, rel: f64) -> Self {
        Self { abs, rel }
    }

    pub const fn absolute(abs: f64) -> Self {
        Self { abs, rel: 0.0 }
    }

    pub fn effective(&self, scale: f64) -> f64 {
        self.abs.max(self.rel * scale)
    }
}

impl Default for Tolerance {
    fn default() -> Self {
        Self::new(1e-7, 1e-7)
    }
}

/// Complex values with multiplicity, kept sorted by (modulus, argument).
#[derive(Debug, Clone, PartialEq)]
pub struct Multiset {
    values: Vec<Cx>,
    tol: Tolerance,
}

fn canonical_order(a: &Cx, b: &Cx) -> Ordering {
    a.norm()
        .total_cmp(&b.norm())
        .then_with(|| a.arg().total_cmp(&b.arg()))
}

impl Multiset {
    pub fn new(mut values: Vec<Cx>, tol: Tolerance) -> Self {
        values.sort_by(canonical_order);
        Self { values, tol }
    }

    pub fn values(&self) -> &[Cx] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn tolerance(&self) -> Tolerance {
        self.tol
    }

    pub fn with_tolerance(mut self, tol: Tolerance) -> Self {
        self.tol = tol;
        self
    }

    pub fn max_modulus(&self) -> f64 {
        self.values.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Union with multiplicities added.
    pub fn union(&self, other: &Multiset) -> Multiset {
        let mut v = self.values.clone();
        v.extend_from_slice(&other.values);
        Multiset::new(v, self.tol)
    }
}

/// A perfect matching between two multisets.
#[derive(Debug, Clone, PartialEq)]
pub struct Matching {
    /// `(index in a, index in b)`.
    pub pairs: Vec<(usize, usize)>,
    pub max_distance: f64,
    pub tolerance: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MatchFailure {
    pub reason: String,
    pub unmatched_a: Vec<Cx>,
    pub unmatched_b: Vec<Cx>,
}

impl std::fmt::Display for MatchFailure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.reason)?;
        if !self.unmatched_a.is_empty() || !self.unmatched_b.is_empty() {
            write!(f, " (unmatched: {:?} vs {:?})", self.unmatched_a, self.unmatched_b)?;
        }
        Ok(())
    }
}

/// Bipartite matching of `a` against `b` within the looser of the two
/// tolerances. Greedy nearest-neighbour pairing is tried first and repaired
/// with augmenting paths, so clustered values cannot block a valid matching.
pub fn multiset_match(a: &Multiset, b: &Multiset) -> Result<Matching, MatchFailure> {
    if a.len() != b.len() {
        return Err(MatchFailure {
            reason: format!("cardinality {} \u{2260} {}", a.len(), b.len()),
            unmatched_a: a.values.clone(),
            unmatched_b: b.values.clone(),
        });
    }
    let scale = a.max_modulus().max(b.max_modulus());
    let tol = a.tol.effective(scale).max(b.tol.effective(scale));
    let n = a.len();
    let dist = |i: usize, j: usize| (a.values[i] - b.values[j]).norm();
    let adj: Vec<Vec<usize>> = (0..n)
        .map(|i| {
            let mut js: Vec<usize> = (0..n).filter(|&j| dist(i, j) <= tol).collect();
            js.sort_by(|&x, &y| dist(i, x).total_cmp(&dist(i, y)));
            js
        })
        .collect();

    let mut match_b: Vec<Option<usize>> = vec![None; n];
    let mut match_a: Vec<Option<usize>> = vec![None; n];
    for i in 0..n {
        if let Some(&j) = adj[i].iter().find(|&&j| match_b[j].is_none()) {
            match_b[j] = Some(i);
            match_a[i] = Some(j);
        }
    }
    for i in 0..n {
        if match_a[i].is_none() {
            let mut seen = vec![false; n];
            augment(i, &adj, &mut seen, &mut match_a, &mut match_b);
        }
    }

    if match_a.iter().all(Option::is_some) {
        let pairs: Vec<(usize, usize)> = match_a
            .iter()
            .enumerate()
            .map(|(i, j)| (i, j.unwrap()))
            .collect();
        let max_distance = pairs.iter().map(|&(i, j)| dist(i, j)).fold(0.0, f64::max);
        Ok(Matching {
            pairs,
            max_distance,
            tolerance: tol,
        })
    } else {
        let unmatched_a = (0..n).filter(|&i| match_a[i].is_none()).map(|i| a.values[i]).collect();
        let unmatched_b = (0..n).filter(|&j| match_b[j].is_none()).map(|j| b.values[j]).collect();
        Err(MatchFailure {
            reason: format!("no matching within tolerance {tol:e}"),
            unmatched_a,
            unmatched_b,
        })
    }
}

fn augment(
    i: usize,
    adj: &[Vec<usize>],
    seen: &mut [bool],
    match_a: &mut [Option<usize>],
    match_b: &mut [Option<usize>],
) -> bool {
    for &j in &adj[i] {
        if seen[j] {
            continue;
        }
        seen[j] = true;
        let free = match match_b[j] {
            None => true,
            Some(other) => augment(other, adj, seen, match_a, match_b),
        };
        if free {
            match_b[j] = Some(i);
            match_a[i] = Some(j);
            return true;
        }
    }
    false
}
