//! Sparse occupancy simulator.
//!
//! Every playable square carries one occupancy qubit. Squares whose bit is
//! definite live in a classical bitboard; the rest are grouped into
//! [`Component`]s, each an explicit amplitude map over the occupancy bitstrings of
//! its member squares. Gates join the components they touch; measurements collapse
//! and then re-factor them.

mod component;
mod gates;
mod serde_impl;

use std::collections::BTreeMap;
use std::sync::OnceLock;

use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

pub use component::{Component, PRUNE_THRESHOLD};
pub use gates::{split_block, GateKind, GateMatrix};

pub(crate) use component::mask_squares;

use crate::error::{Error, Result};
use crate::rules::Square;

/// Largest board the bitboard representation supports.
pub const MAX_SQUARES: usize = 64;

pub type Amplitude = Complex64;

/// Bits sampled by one measurement, keyed by square.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct MeasurementOutcome {
    pub bits: BTreeMap<Square, bool>,
}

impl MeasurementOutcome {
    pub fn get(&self, square: Square) -> Option<bool> {
        self.bits.get(&square).copied()
    }

    pub fn squares_mask(&self) -> u64 {
        self.bits.keys().fold(0, |m, &s| m | 1u64 << s)
    }

    pub fn ones_mask(&self) -> u64 {
        self.bits
            .iter()
            .filter(|(_, &b)| b)
            .fold(0, |m, (&s, _)| m | 1u64 << s)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct QuantumBoardState {
    num_squares: usize,
    /// Definite occupancy of squares outside every component.
    classical: u64,
    components: Vec<Component>,
}

fn gate_matrix(kind: GateKind) -> &'static GateMatrix {
    static MATRICES: OnceLock<[GateMatrix; 4]> = OnceLock::new();
    let all = MATRICES.get_or_init(|| GateKind::ALL.map(GateKind::matrix));
    &all[kind as usize]
}

impl QuantumBoardState {
    /// Fully classical state with the given squares occupied.
    pub fn new(num_squares: usize, occupied: impl IntoIterator<Item = Square>) -> Result<Self> {
        if num_squares > MAX_SQUARES {
            return Err(Error::Domain(format!(
                "{num_squares} squares exceed the supported maximum of {MAX_SQUARES}"
            )));
        }
        let mut classical = 0u64;
        for s in occupied {
            if s >= num_squares {
                return Err(Error::SquareOutOfRange(s));
            }
            classical |= 1u64 << s;
        }
        Ok(QuantumBoardState {
            num_squares,
            classical,
            components: Vec::new(),
        })
    }

    pub fn num_squares(&self) -> usize {
        self.num_squares
    }

    pub fn components(&self) -> &[Component] {
        &self.components
    }

    fn all_mask(&self) -> u64 {
        if self.num_squares == 64 {
            u64::MAX
        } else {
            (1u64 << self.num_squares) - 1
        }
    }

    fn check(&self, square: Square) -> Result<()> {
        if square < self.num_squares {
            Ok(())
        } else {
            Err(Error::SquareOutOfRange(square))
        }
    }

    fn quantum_mask(&self) -> u64 {
        self.components.iter().fold(0, |m, c| m | c.mask)
    }

    pub fn component_of(&self, square: Square) -> Option<usize> {
        self.components.iter().position(|c| c.contains(square))
    }

    pub fn is_classical(&self, square: Square) -> bool {
        self.component_of(square).is_none()
    }

    /// The definite bit of a classical square, `None` for squares in a component.
    pub fn classical_bit(&self, square: Square) -> Option<bool> {
        self.is_classical(square)
            .then(|| self.classical >> square & 1 == 1)
    }

    /// Born probability that `square` is occupied.
    pub fn marginal(&self, square: Square) -> Result<f64> {
        self.check(square)?;
        Ok(match self.component_of(square) {
            Some(i) => self.components[i].marginal(square),
            None => (self.classical >> square & 1) as f64,
        })
    }

    pub fn marginals(&self) -> Vec<f64> {
        let mut out: Vec<f64> = (0..self.num_squares)
            .map(|s| (self.classical >> s & 1) as f64)
            .collect();
        for comp in &self.components {
            for s in mask_squares(comp.mask) {
                out[s] = 0.0;
            }
            for (k, a) in &comp.terms {
                let p = a.norm_sqr();
                for s in mask_squares(*k) {
                    out[s] += p;
                }
            }
        }
        out
    }

    /// Squares with nonzero occupancy probability.
    pub fn possibly_occupied(&self) -> u64 {
        self.components
            .iter()
            .fold(self.classical, |m, c| m | c.support())
    }

    fn is_possibly_occupied(&self, square: Square) -> bool {
        match self.component_of(square) {
            Some(i) => self.components[i].support() >> square & 1 == 1,
            None => self.classical >> square & 1 == 1,
        }
    }

    /// Brings every listed square into a single component (tensor product of the
    /// components and classical bits involved) and returns its index.
    pub fn join_components(&mut self, squares: &[Square]) -> Result<usize> {
        let mut mask = 0u64;
        for &s in squares {
            self.check(s)?;
            mask |= 1u64 << s;
        }
        Ok(self.join_mask(mask))
    }

    fn join_mask(&mut self, mask: u64) -> usize {
        let classical_part = mask & !self.quantum_mask();
        let mut joined = Component::new(
            classical_part,
            vec![(self.classical & classical_part, Complex64::new(1.0, 0.0))],
        );
        self.classical &= !classical_part;
        let mut i = 0;
        while i < self.components.len() {
            if self.components[i].mask & mask != 0 {
                let comp = self.components.remove(i);
                joined = if joined.mask == 0 {
                    comp
                } else {
                    comp.tensor(&joined)
                };
            } else {
                i += 1;
            }
        }
        self.components.push(joined);
        self.components.len() - 1
    }

    /// Applies a game gate to `squares` (ordered as documented on [`GateKind`])
    /// without checking occupancy preconditions.
    pub fn apply_gate(&mut self, kind: GateKind, squares: &[Square]) -> Result<()> {
        if squares.len() != kind.arity() {
            return Err(Error::Domain(format!(
                "{kind:?} gate takes {} squares, got {}",
                kind.arity(),
                squares.len()
            )));
        }
        let mut gate_mask = 0u64;
        for &s in squares {
            self.check(s)?;
            if gate_mask >> s & 1 == 1 {
                return Err(Error::Domain(format!(
                    "square {s} repeated in {kind:?} gate"
                )));
            }
            gate_mask |= 1u64 << s;
        }
        let matrix = gate_matrix(kind);
        let k = squares.len();
        let local_of = |key: u64| -> usize {
            squares.iter().enumerate().fold(0, |acc, (j, &s)| {
                acc | (((key >> s & 1) as usize) << (k - 1 - j))
            })
        };
        let key_of = |local: usize| -> u64 {
            squares.iter().enumerate().fold(0, |acc, (j, &s)| {
                acc | (((local >> (k - 1 - j)) as u64 & 1) << s)
            })
        };

        if gate_mask & self.quantum_mask() == 0 {
            let local = local_of(self.classical);
            let column: Vec<(usize, Complex64)> = matrix.column(local).collect();
            if let [(row, _)] = column.as_slice() {
                // basis state maps to a basis state: only a global phase is lost
                self.classical = (self.classical & !gate_mask) | key_of(*row);
                return Ok(());
            }
            self.classical &= !gate_mask;
            let terms = column.into_iter().map(|(r, a)| (key_of(r), a)).collect();
            let mut comp = Component::new(gate_mask, terms);
            comp.canonicalize();
            self.push_component(comp);
            return Ok(());
        }

        let idx = self.join_mask(gate_mask);
        let mut comp = self.components.swap_remove(idx);
        let mut out = Vec::with_capacity(comp.terms.len() * 2);
        for &(key, amp) in &comp.terms {
            let rest = key & !gate_mask;
            for (row, v) in matrix.column(local_of(key)) {
                out.push((rest | key_of(row), v * amp));
            }
        }
        comp.terms = out;
        comp.canonicalize();
        self.push_component(comp);
        Ok(())
    }

    /// Re-inserts a component after demoting its constant squares.
    fn push_component(&mut self, mut comp: Component) {
        let (_, ones) = comp.strip_constant_squares();
        self.classical |= ones;
        if comp.mask != 0 {
            self.components.push(comp);
            self.components.sort_by_key(|c| c.mask.trailing_zeros());
        }
    }

    /// Like [`push_component`](Self::push_component) but also splits off
    /// independent factors.
    fn push_factored(&mut self, mut comp: Component) {
        let (_, ones) = comp.strip_constant_squares();
        self.classical |= ones;
        if comp.mask == 0 {
            return;
        }
        for part in comp.factorize() {
            self.push_component(part);
        }
    }

    fn require_empty(&self, square: Square, what: &str) -> Result<()> {
        self.check(square)?;
        if self.is_possibly_occupied(square) {
            Err(Error::IllegalGate(format!(
                "{what} square {square} is occupied"
            )))
        } else {
            Ok(())
        }
    }

    fn require_occupied(&self, square: Square, what: &str) -> Result<()> {
        self.check(square)?;
        if self.is_possibly_occupied(square) {
            Ok(())
        } else {
            Err(Error::IllegalGate(format!(
                "{what} square {square} is empty"
            )))
        }
    }

    /// iSWAP from `source` to the empty `target`.
    pub fn apply_move_gate(&mut self, source: Square, target: Square) -> Result<()> {
        self.require_occupied(source, "source")?;
        self.require_empty(target, "target")?;
        self.apply_gate(GateKind::Move, &[source, target])
    }

    pub fn apply_split_gate(&mut self, source: Square, t1: Square, t2: Square) -> Result<()> {
        if t1 == t2 {
            return Err(Error::Domain(format!("split targets coincide at {t1}")));
        }
        self.require_occupied(source, "source")?;
        self.require_empty(t1, "target")?;
        self.require_empty(t2, "target")?;
        self.apply_gate(GateKind::Split, &[source, t1, t2])
    }

    pub fn apply_merge_gate(&mut self, target: Square, s1: Square, s2: Square) -> Result<()> {
        if s1 == s2 {
            return Err(Error::Domain(format!("merge sources coincide at {s1}")));
        }
        self.require_empty(target, "target")?;
        self.apply_gate(GateKind::Merge, &[target, s1, s2])
    }

    pub fn apply_capture_gate(
        &mut self,
        defender: Square,
        attacker: Square,
        landing: Square,
    ) -> Result<()> {
        self.require_empty(landing, "landing")?;
        self.apply_gate(GateKind::Capture, &[defender, attacker, landing])
    }

    /// Sets an occupied classical square to empty (piece removal).
    pub fn clear_square(&mut self, square: Square) -> Result<()> {
        self.check(square)?;
        match self.classical_bit(square) {
            Some(true) => {
                self.classical &= !(1u64 << square);
                Ok(())
            }
            Some(false) => Err(Error::IllegalGate(format!(
                "square {square} is already empty"
            ))),
            None => Err(Error::IllegalGate(format!(
                "square {square} is not classical and cannot be cleared"
            ))),
        }
    }

    /// Samples the listed squares with Born probabilities and collapses the state.
    pub fn measure<R: Rng + ?Sized>(
        &mut self,
        squares: &[Square],
        rng: &mut R,
    ) -> MeasurementOutcome {
        let mut mask = 0u64;
        for &s in squares {
            if s < self.num_squares {
                mask |= 1u64 << s;
            }
        }
        let mut bits = BTreeMap::new();
        for s in mask_squares(mask & !self.quantum_mask()) {
            bits.insert(s, self.classical >> s & 1 == 1);
        }
        let touched: Vec<usize> = (0..self.components.len())
            .filter(|&i| self.components[i].mask & mask != 0)
            .collect();
        let mut collapsed = Vec::with_capacity(touched.len());
        for &i in touched.iter().rev() {
            collapsed.push(self.components.remove(i));
        }
        collapsed.reverse();
        for mut comp in collapsed {
            let local = comp.mask & mask;
            let mut dist: BTreeMap<u64, f64> = BTreeMap::new();
            for (k, a) in &comp.terms {
                *dist.entry(k & local).or_insert(0.0) += a.norm_sqr();
            }
            let total: f64 = dist.values().sum();
            let mut draw = rng.gen::<f64>() * total;
            let mut chosen = *dist.keys().next_back().expect("component has terms");
            for (&outcome, &p) in &dist {
                if draw < p {
                    chosen = outcome;
                    break;
                }
                draw -= p;
            }
            for s in mask_squares(local) {
                bits.insert(s, chosen >> s & 1 == 1);
            }
            comp.terms.retain(|(k, _)| k & local == chosen);
            comp.canonicalize();
            self.push_factored(comp);
        }
        MeasurementOutcome { bits }
    }

    /// Projects onto a prescribed outcome and renormalizes. Returns the Born
    /// probability the outcome had.
    pub fn project(&mut self, outcome: &MeasurementOutcome) -> Result<f64> {
        let mask = outcome.squares_mask();
        let ones = outcome.ones_mask();
        if mask & !self.all_mask() != 0 {
            return Err(Error::SquareOutOfRange(
                (mask & !self.all_mask()).trailing_zeros() as Square,
            ));
        }
        let classical_part = mask & !self.quantum_mask();
        if self.classical & classical_part != ones & classical_part {
            return Ok(0.0);
        }
        let mut probability = 1.0;
        let touched: Vec<usize> = (0..self.components.len())
            .filter(|&i| self.components[i].mask & mask != 0)
            .collect();
        for &i in &touched {
            let comp = &self.components[i];
            let local = comp.mask & mask;
            probability *= comp
                .terms
                .iter()
                .filter(|(k, _)| k & local == ones & local)
                .map(|(_, a)| a.norm_sqr())
                .sum::<f64>();
        }
        if probability < PRUNE_THRESHOLD * PRUNE_THRESHOLD {
            return Ok(0.0);
        }
        for &i in touched.iter().rev() {
            let mut comp = self.components.remove(i);
            let local = comp.mask & mask;
            comp.terms.retain(|(k, _)| k & local == ones & local);
            comp.canonicalize();
            self.push_factored(comp);
        }
        Ok(probability)
    }

    /// `max |sum |amp|^2 - 1|` over components.
    pub fn normalization_error(&self) -> f64 {
        self.components
            .iter()
            .map(|c| (c.norm_sqr() - 1.0).abs())
            .fold(0.0, f64::max)
    }

    /// Debug dump: `{squares, terms: [{bits, re, im}]}` per component.
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("state serializes")
    }
}
