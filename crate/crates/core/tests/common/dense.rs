//! Full-board statevector, one amplitude per occupancy configuration.

use cheqqers_core::game::QuantumEvent;
use cheqqers_core::qstate::{GateKind, MeasurementOutcome, QuantumBoardState};
use num_complex::Complex64;

const I: Complex64 = Complex64::new(0.0, 1.0);

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Split on the single-excitation subspace, `SPLIT[row][col]` in the basis
/// (source, target1, target2).
fn split() -> [[Complex64; 3]; 3] {
    [
        [c(0.0, 0.0), c(0.5, 0.5), c(0.5, -0.5)],
        [c(0.5, 0.5), c(0.0, -0.5), c(0.5, 0.0)],
        [c(0.5, -0.5), c(0.5, 0.0), c(0.0, 0.5)],
    ]
}

pub struct DenseState {
    pub n: usize,
    pub amps: Vec<Complex64>,
}

impl DenseState {
    pub fn classical(n: usize, occupied: u64) -> Self {
        let mut amps = vec![Complex64::new(0.0, 0.0); 1 << n];
        amps[occupied as usize] = Complex64::new(1.0, 0.0);
        DenseState { n, amps }
    }

    fn zero(&self) -> Vec<Complex64> {
        vec![Complex64::new(0.0, 0.0); self.amps.len()]
    }

    pub fn marginal(&self, square: usize) -> f64 {
        self.amps
            .iter()
            .enumerate()
            .filter(|(b, _)| b >> square & 1 == 1)
            .map(|(_, a)| a.norm_sqr())
            .sum()
    }

    pub fn norm(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    fn swap_pair(&mut self, s: usize, t: usize) {
        let mut out = self.zero();
        for (b, &a) in self.amps.iter().enumerate() {
            let bs = b >> s & 1;
            let bt = b >> t & 1;
            if bs != bt {
                out[b ^ (1 << s) ^ (1 << t)] += I * a;
            } else {
                out[b] += a;
            }
        }
        self.amps = out;
    }

    /// Applies a 3x3 block on the single-excitation states of `(q0, q1, q2)`.
    fn single_excitation(&mut self, q: [usize; 3], block: [[Complex64; 3]; 3]) {
        let mask: usize = q.iter().map(|&s| 1 << s).sum();
        let mut out = self.zero();
        for (b, &a) in self.amps.iter().enumerate() {
            let set: Vec<usize> = (0..3).filter(|&j| b >> q[j] & 1 == 1).collect();
            if set.len() != 1 {
                out[b] += a;
                continue;
            }
            let col = set[0];
            for row in 0..3 {
                out[(b & !mask) | 1 << q[row]] += block[row][col] * a;
            }
        }
        self.amps = out;
    }

    fn capture(&mut self, d: usize, a: usize, l: usize) {
        let mut out = self.zero();
        let all = 1 << d | 1 << a | 1 << l;
        for (b, &amp) in self.amps.iter().enumerate() {
            let pattern = (b >> d & 1, b >> a & 1, b >> l & 1);
            match pattern {
                (1, 1, 0) | (0, 0, 1) => out[b ^ all] += I * amp,
                _ => out[b] += amp,
            }
        }
        self.amps = out;
    }

    pub fn gate(&mut self, kind: GateKind, squares: &[usize]) {
        match kind {
            GateKind::Move => self.swap_pair(squares[0], squares[1]),
            GateKind::Split => {
                self.single_excitation([squares[0], squares[1], squares[2]], split())
            }
            GateKind::Merge => {
                let s = split();
                let mut adj = s;
                for (r, row) in adj.iter_mut().enumerate() {
                    for (col, v) in row.iter_mut().enumerate() {
                        *v = s[col][r].conj();
                    }
                }
                self.single_excitation([squares[0], squares[1], squares[2]], adj)
            }
            GateKind::Capture => self.capture(squares[0], squares[1], squares[2]),
        }
    }

    /// Projects onto `outcome` and renormalizes; returns the outcome probability.
    pub fn project(&mut self, outcome: &MeasurementOutcome) -> f64 {
        let mut p = 0.0;
        for (b, a) in self.amps.iter_mut().enumerate() {
            let agrees = outcome
                .bits
                .iter()
                .all(|(&s, &bit)| (b >> s & 1 == 1) == bit);
            if agrees {
                p += a.norm_sqr();
            } else {
                *a = Complex64::new(0.0, 0.0);
            }
        }
        let scale = 1.0 / p.sqrt();
        for a in &mut self.amps {
            *a *= scale;
        }
        p
    }

    /// Empties a square known to be occupied.
    pub fn clear(&mut self, square: usize) {
        assert!(
            (self.marginal(square) - 1.0).abs() < 1e-9,
            "clear of uncertain square"
        );
        let mut out = self.zero();
        for (b, &a) in self.amps.iter().enumerate() {
            out[b & !(1 << square)] += a;
        }
        self.amps = out;
    }

    /// Replays one logged event. Returns the probability of a measurement or
    /// discard outcome, 1 otherwise.
    pub fn apply_event(&mut self, event: &QuantumEvent) -> f64 {
        match event {
            QuantumEvent::Gate { kind, squares } => {
                self.gate(*kind, squares);
                1.0
            }
            QuantumEvent::Measure { outcome } | QuantumEvent::Discard { outcome } => {
                self.project(outcome)
            }
            QuantumEvent::Clear { square } => {
                self.clear(*square);
                1.0
            }
        }
    }

    /// Largest difference in configuration probabilities against the factored state.
    pub fn max_probability_gap(&self, q: &QuantumBoardState) -> f64 {
        let mut worst = 0.0f64;
        for (b, a) in self.amps.iter().enumerate() {
            let b = b as u64;
            let mut p = 1.0;
            let mut covered = 0u64;
            for comp in q.components() {
                covered |= comp.mask();
                let key = b & comp.mask();
                p *= comp
                    .terms()
                    .iter()
                    .find(|(k, _)| *k == key)
                    .map_or(0.0, |(_, amp)| amp.norm_sqr());
            }
            for s in 0..self.n {
                if covered >> s & 1 == 0 {
                    let bit = b >> s & 1 == 1;
                    if q.classical_bit(s) != Some(bit) {
                        p = 0.0;
                    }
                }
            }
            worst = worst.max((p - a.norm_sqr()).abs());
        }
        worst
    }

    /// The factored state as a dense vector.
    pub fn from_factored(q: &QuantumBoardState) -> Self {
        let n = q.num_squares();
        let mut amps = vec![Complex64::new(0.0, 0.0); 1 << n];
        'basis: for (b, out) in amps.iter_mut().enumerate() {
            let b = b as u64;
            let mut amp = Complex64::new(1.0, 0.0);
            let mut covered = 0u64;
            for comp in q.components() {
                covered |= comp.mask();
                let key = b & comp.mask();
                match comp.terms().iter().find(|(k, _)| *k == key) {
                    Some((_, a)) => amp *= a,
                    None => continue 'basis,
                }
            }
            for s in 0..n {
                if covered >> s & 1 == 0 && q.classical_bit(s) != Some(b >> s & 1 == 1) {
                    continue 'basis;
                }
            }
            *out = amp;
        }
        DenseState { n, amps }
    }

    /// Largest amplitude difference against the factored state, after
    /// aligning the global phase.
    pub fn max_amplitude_gap(&self, q: &QuantumBoardState) -> f64 {
        let other = Self::from_factored(q);
        let (pivot, _) = self
            .amps
            .iter()
            .enumerate()
            .max_by(|x, y| x.1.norm_sqr().total_cmp(&y.1.norm_sqr()))
            .unwrap();
        if other.amps[pivot].norm() == 0.0 {
            return f64::INFINITY;
        }
        let phase = self.amps[pivot] / other.amps[pivot];
        let phase = phase / phase.norm();
        self.amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| (a - b * phase).norm())
            .fold(0.0, f64::max)
    }
}
