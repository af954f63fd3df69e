use num_complex::Complex64;

use crate::rules::Square;

/// Amplitudes smaller than this (in modulus) are dropped after every operation.
pub const PRUNE_THRESHOLD: f64 = 1e-12;

/// Tolerance used when checking that a component factors exactly.
const FACTOR_TOLERANCE: f64 = 1e-12;

/// Largest `|left keys| * |right keys|` table examined when testing a factorization.
const FACTOR_TABLE_LIMIT: usize = 1 << 16;

/// A set of squares whose joint state is simulated explicitly.
///
/// Term keys are board-wide bitmasks restricted to `mask`: bit `s` of a key is the
/// occupancy of square `s` in that basis state. Terms are kept sorted by key.
#[derive(Debug, Clone, PartialEq)]
pub struct Component {
    pub(crate) mask: u64,
    pub(crate) terms: Vec<(u64, Complex64)>,
}

impl Component {
    pub(crate) fn new(mask: u64, mut terms: Vec<(u64, Complex64)>) -> Self {
        terms.sort_unstable_by_key(|t| t.0);
        Component { mask, terms }
    }

    pub fn mask(&self) -> u64 {
        self.mask
    }

    pub fn contains(&self, square: Square) -> bool {
        self.mask >> square & 1 == 1
    }

    /// Member squares in ascending order.
    pub fn squares(&self) -> Vec<Square> {
        mask_squares(self.mask).collect()
    }

    pub fn len(&self) -> usize {
        self.mask.count_ones() as usize
    }

    pub fn is_empty(&self) -> bool {
        self.mask == 0
    }

    /// `(key, amplitude)` pairs sorted by key.
    pub fn terms(&self) -> &[(u64, Complex64)] {
        &self.terms
    }

    pub fn norm_sqr(&self) -> f64 {
        self.terms.iter().map(|(_, a)| a.norm_sqr()).sum()
    }

    pub fn marginal(&self, square: Square) -> f64 {
        let bit = 1u64 << square;
        self.terms
            .iter()
            .filter(|(k, _)| k & bit != 0)
            .map(|(_, a)| a.norm_sqr())
            .sum()
    }

    /// Squares that are occupied in at least one term.
    pub(crate) fn support(&self) -> u64 {
        self.terms.iter().fold(0, |acc, (k, _)| acc | k)
    }

    /// Tensor product with a component on disjoint squares.
    pub(crate) fn tensor(&self, other: &Component) -> Component {
        debug_assert_eq!(self.mask & other.mask, 0);
        let mut terms = Vec::with_capacity(self.terms.len() * other.terms.len());
        for (ka, a) in &self.terms {
            for (kb, b) in &other.terms {
                terms.push((ka | kb, a * b));
            }
        }
        Component::new(self.mask | other.mask, terms)
    }

    /// Sort, combine duplicate keys, drop negligible terms and renormalize.
    pub(crate) fn canonicalize(&mut self) {
        self.terms.sort_unstable_by_key(|t| t.0);
        let mut merged: Vec<(u64, Complex64)> = Vec::with_capacity(self.terms.len());
        for &(k, a) in &self.terms {
            match merged.last_mut() {
                Some((lk, la)) if *lk == k => *la += a,
                _ => merged.push((k, a)),
            }
        }
        merged.retain(|(_, a)| a.norm() >= PRUNE_THRESHOLD);
        let norm = merged.iter().map(|(_, a)| a.norm_sqr()).sum::<f64>().sqrt();
        if norm > 0.0 && norm != 1.0 {
            for (_, a) in &mut merged {
                *a /= norm;
            }
        }
        self.terms = merged;
    }

    /// Removes squares whose bit is the same in every term. Returns
    /// `(removed_mask, removed_ones)`.
    pub(crate) fn strip_constant_squares(&mut self) -> (u64, u64) {
        let Some(&(first, _)) = self.terms.first() else {
            let removed = self.mask;
            self.mask = 0;
            return (removed, 0);
        };
        let (all, any) = self
            .terms
            .iter()
            .fold((first, 0u64), |(all, any), (k, _)| (all & k, any | k));
        let ones = all & self.mask;
        let zeros = self.mask & !any;
        let removed = ones | zeros;
        if removed != 0 {
            self.mask &= !removed;
            for (k, _) in &mut self.terms {
                *k &= self.mask;
            }
        }
        (removed, ones)
    }

    /// Splits the component into independent factors where it factors exactly.
    ///
    /// Candidate partitions come from pairwise correlations of the occupancy
    /// distribution; each candidate is accepted only if the amplitude table is an
    /// exact product.
    pub(crate) fn factorize(self) -> Vec<Component> {
        if self.len() <= 1 || self.terms.len() <= 1 {
            return vec![self];
        }
        let groups = correlation_groups(&self);
        if groups.len() <= 1 {
            return vec![self];
        }
        let mut out = Vec::new();
        let mut rest = self;
        for group in &groups[..groups.len() - 1] {
            if let Some((left, right)) = rest.try_split(*group) {
                out.push(left);
                rest = right;
            }
        }
        out.push(rest);
        out
    }

    /// Returns `(state on left_mask, state on the remaining squares)` if the
    /// component is exactly their product.
    fn try_split(&self, left_mask: u64) -> Option<(Component, Component)> {
        let right_mask = self.mask & !left_mask;
        if left_mask == 0 || right_mask == 0 {
            return None;
        }
        let mut left_keys: Vec<u64> = self.terms.iter().map(|(k, _)| k & left_mask).collect();
        left_keys.sort_unstable();
        left_keys.dedup();
        let mut right_keys: Vec<u64> = self.terms.iter().map(|(k, _)| k & right_mask).collect();
        right_keys.sort_unstable();
        right_keys.dedup();
        if left_keys.len() * right_keys.len() > FACTOR_TABLE_LIMIT {
            return None;
        }
        let cols = right_keys.len();
        let mut table = vec![Complex64::new(0.0, 0.0); left_keys.len() * cols];
        for (k, a) in &self.terms {
            let li = left_keys.binary_search(&(k & left_mask)).ok()?;
            let ri = right_keys.binary_search(&(k & right_mask)).ok()?;
            table[li * cols + ri] = *a;
        }
        let (pivot_idx, _) = table
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.norm_sqr().total_cmp(&b.1.norm_sqr()))?;
        let (pl, pr) = (pivot_idx / cols, pivot_idx % cols);
        let pivot = table[pivot_idx];
        for l in 0..left_keys.len() {
            for r in 0..cols {
                let lhs = table[l * cols + r] * pivot;
                let rhs = table[l * cols + pr] * table[pl * cols + r];
                if (lhs - rhs).norm() > FACTOR_TOLERANCE {
                    return None;
                }
            }
        }
        let left_terms: Vec<(u64, Complex64)> = left_keys
            .iter()
            .enumerate()
            .map(|(l, &k)| (k, table[l * cols + pr]))
            .collect();
        let right_terms: Vec<(u64, Complex64)> = right_keys
            .iter()
            .enumerate()
            .map(|(r, &k)| (k, table[pl * cols + r] / pivot))
            .collect();
        let mut left = Component::new(left_mask, left_terms);
        let mut right = Component::new(right_mask, right_terms);
        left.canonicalize();
        right.canonicalize();
        Some((left, right))
    }
}

/// Groups of squares linked by non-zero pairwise occupancy correlation, as masks
/// ordered by their lowest square.
fn correlation_groups(comp: &Component) -> Vec<u64> {
    let squares: Vec<Square> = comp.squares();
    let n = squares.len();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut [usize], mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    let marginals: Vec<f64> = squares.iter().map(|&s| comp.marginal(s)).collect();
    for i in 0..n {
        for j in i + 1..n {
            let (ri, rj) = (find(&mut parent, i), find(&mut parent, j));
            if ri == rj {
                continue;
            }
            let both = (1u64 << squares[i]) | (1u64 << squares[j]);
            let joint: f64 = comp
                .terms
                .iter()
                .filter(|(k, _)| k & both == both)
                .map(|(_, a)| a.norm_sqr())
                .sum();
            if (joint - marginals[i] * marginals[j]).abs() > FACTOR_TOLERANCE {
                parent[ri] = rj;
            }
        }
    }
    let mut groups: Vec<(usize, u64)> = Vec::new();
    for (i, &sq) in squares.iter().enumerate() {
        let root = find(&mut parent, i);
        match groups.iter_mut().find(|(r, _)| *r == root) {
            Some((_, m)) => *m |= 1u64 << sq,
            None => groups.push((root, 1u64 << sq)),
        }
    }
    groups.into_iter().map(|(_, m)| m).collect()
}

pub(crate) fn mask_squares(mut mask: u64) -> impl Iterator<Item = Square> {
    std::iter::from_fn(move || {
        if mask == 0 {
            None
        } else {
            let s = mask.trailing_zeros() as Square;
            mask &= mask - 1;
            Some(s)
        }
    })
}
