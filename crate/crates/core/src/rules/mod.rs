//! Board geometry, pieces, moves and legal-move generation for levels 0 to 3.

mod geometry;
mod moves;

use std::fmt;

use serde::{Deserialize, Serialize};

pub use geometry::{BoardGeometry, Direction};
pub use moves::{capture_legality, generate_moves, legal_moves, Move, PassReason};

use crate::error::{Error, Result};

/// Index of a playable (dark) square.
pub type Square = usize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Color {
    White,
    Black,
}

impl Color {
    pub fn opponent(self) -> Color {
        match self {
            Color::White => Color::Black,
            Color::Black => Color::White,
        }
    }
}

impl fmt::Display for Color {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Color::White => "white",
            Color::Black => "black",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct PieceId(pub u16);

impl fmt::Display for PieceId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

/// A piece and the squares on which it may be found.
///
/// Split parts keep the id of the piece they came from, so `lineage` equals `id`
/// for every piece created at setup.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Piece {
    pub id: PieceId,
    pub color: Color,
    pub crowned: bool,
    pub lineage: PieceId,
    /// Bitmask of squares with nonzero occupancy probability.
    pub support: u64,
}

impl Piece {
    pub fn squares(&self) -> impl Iterator<Item = Square> {
        crate::qstate::mask_squares(self.support)
    }

    pub fn occupies(&self, square: Square) -> bool {
        self.support >> square & 1 == 1
    }
}

/// Ruleset tier; each level adds moves on top of the previous one.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "u8", into = "u8")]
pub struct QuantumnessLevel(u8);

impl QuantumnessLevel {
    pub const CLASSICAL: QuantumnessLevel = QuantumnessLevel(0);
    pub const SUPERPOSITION: QuantumnessLevel = QuantumnessLevel(1);
    pub const ENTANGLEMENT: QuantumnessLevel = QuantumnessLevel(2);
    pub const INTERFERENCE: QuantumnessLevel = QuantumnessLevel(3);
    pub const ALL: [QuantumnessLevel; 4] = [
        Self::CLASSICAL,
        Self::SUPERPOSITION,
        Self::ENTANGLEMENT,
        Self::INTERFERENCE,
    ];

    pub fn new(level: u8) -> Result<Self> {
        if level <= 3 {
            Ok(QuantumnessLevel(level))
        } else {
            Err(Error::Domain(format!(
                "quantumness level {level} is not in 0..=3"
            )))
        }
    }

    pub fn value(self) -> u8 {
        self.0
    }

    pub fn allows_split(self) -> bool {
        self.0 >= 1
    }

    pub fn entangling_captures(self) -> bool {
        self.0 >= 2
    }

    pub fn allows_merge(self) -> bool {
        self.0 >= 3
    }
}

impl TryFrom<u8> for QuantumnessLevel {
    type Error = Error;

    fn try_from(v: u8) -> Result<Self> {
        QuantumnessLevel::new(v)
    }
}

impl From<QuantumnessLevel> for u8 {
    fn from(l: QuantumnessLevel) -> u8 {
        l.0
    }
}

impl fmt::Display for QuantumnessLevel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}
