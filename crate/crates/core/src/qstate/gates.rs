//! The four game gates as small dense matrices.
//!
//! A gate acting on squares `(q0, q1, .., q{k-1})` is a `2^k x 2^k` matrix. The
//! local basis index of a configuration is `sum(bit(q_j) << (k - 1 - j))`, so for a
//! three-square gate `|100>` means "only `q0` occupied", matching the usual ket
//! notation with the first listed square leftmost.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);
const I: Complex64 = Complex64::new(0.0, 1.0);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GateKind {
    /// iSWAP on `(source, target)`.
    Move,
    /// Split on `(source, target1, target2)`.
    Split,
    /// Inverse split on `(target, source1, source2)`.
    Merge,
    /// Entangling capture on `(defender, attacker, landing)`.
    Capture,
}

impl GateKind {
    pub const ALL: [GateKind; 4] = [
        GateKind::Move,
        GateKind::Split,
        GateKind::Merge,
        GateKind::Capture,
    ];

    pub fn arity(self) -> usize {
        match self {
            GateKind::Move => 2,
            _ => 3,
        }
    }

    pub fn matrix(self) -> GateMatrix {
        match self {
            GateKind::Move => iswap(),
            GateKind::Split => split_matrix(),
            GateKind::Merge => split_matrix().adjoint(),
            GateKind::Capture => capture_matrix(),
        }
    }
}

/// Row-major square matrix over `2^arity` local basis states.
#[derive(Debug, Clone, PartialEq)]
pub struct GateMatrix {
    arity: usize,
    entries: Vec<Complex64>,
}

impl GateMatrix {
    pub fn identity(arity: usize) -> Self {
        let dim = 1 << arity;
        let mut entries = vec![ZERO; dim * dim];
        for i in 0..dim {
            entries[i * dim + i] = ONE;
        }
        GateMatrix { arity, entries }
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn dim(&self) -> usize {
        1 << self.arity
    }

    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.entries[row * self.dim() + col]
    }

    fn set(&mut self, row: usize, col: usize, value: Complex64) {
        let dim = self.dim();
        self.entries[row * dim + col] = value;
    }

    pub fn adjoint(&self) -> Self {
        let dim = self.dim();
        let mut out = GateMatrix::identity(self.arity);
        for r in 0..dim {
            for c in 0..dim {
                out.set(c, r, self.get(r, c).conj());
            }
        }
        out
    }

    pub fn mul(&self, other: &GateMatrix) -> GateMatrix {
        assert_eq!(self.arity, other.arity);
        let dim = self.dim();
        let mut out = GateMatrix::identity(self.arity);
        for r in 0..dim {
            for c in 0..dim {
                let mut acc = ZERO;
                for k in 0..dim {
                    acc += self.get(r, k) * other.get(k, c);
                }
                out.set(r, c, acc);
            }
        }
        out
    }

    /// `max |(U^dagger U - I)_{rc}|`.
    pub fn unitarity_defect(&self) -> f64 {
        let product = self.adjoint().mul(self);
        let dim = self.dim();
        let mut worst = 0.0f64;
        for r in 0..dim {
            for c in 0..dim {
                let target = if r == c { ONE } else { ZERO };
                worst = worst.max((product.get(r, c) - target).norm());
            }
        }
        worst
    }

    /// Nonzero entries of column `col` as `(row, value)`.
    pub(crate) fn column(&self, col: usize) -> impl Iterator<Item = (usize, Complex64)> + '_ {
        let dim = self.dim();
        (0..dim)
            .map(move |r| (r, self.get(r, col)))
            .filter(|(_, v)| *v != ZERO)
    }
}

fn iswap() -> GateMatrix {
    // basis |s t>: 00 -> 00, 01 -> i|10>, 10 -> i|01>, 11 -> 11
    let mut m = GateMatrix::identity(2);
    m.set(1, 1, ZERO);
    m.set(2, 2, ZERO);
    m.set(2, 1, I);
    m.set(1, 2, I);
    m
}

/// Single-excitation block of the split gate, columns are the images of
/// `(e_s, e_t1, e_t2)`. Every other basis state is left untouched.
pub fn split_block() -> [[Complex64; 3]; 3] {
    let p = Complex64::new(0.5, 0.5);
    let m = Complex64::new(0.5, -0.5);
    let half = Complex64::new(0.5, 0.0);
    // block[row][col]
    [
        [ZERO, p, m],
        [p, Complex64::new(0.0, -0.5), half],
        [m, half, Complex64::new(0.0, 0.5)],
    ]
}

fn split_matrix() -> GateMatrix {
    // local indices of e_s, e_t1, e_t2 in a 3-square register
    const SINGLE: [usize; 3] = [0b100, 0b010, 0b001];
    let block = split_block();
    let mut m = GateMatrix::identity(3);
    for (r, &row) in SINGLE.iter().enumerate() {
        for (c, &col) in SINGLE.iter().enumerate() {
            m.set(row, col, block[r][c]);
        }
    }
    m
}

fn capture_matrix() -> GateMatrix {
    // (d, a, l): |110> <-> i|001>
    let mut m = GateMatrix::identity(3);
    m.set(0b110, 0b110, ZERO);
    m.set(0b001, 0b001, ZERO);
    m.set(0b001, 0b110, I);
    m.set(0b110, 0b001, I);
    m
}
