use serde::{Deserialize, Serialize};

use super::{Color, Square};
use crate::error::{Error, Result};
use crate::qstate::MAX_SQUARES;

/// Diagonal directions as seen from White's side: "up" is towards Black.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    UpLeft = 0,
    UpRight = 1,
    DownLeft = 2,
    DownRight = 3,
}

impl Direction {
    pub const ALL: [Direction; 4] = [
        Direction::UpLeft,
        Direction::UpRight,
        Direction::DownLeft,
        Direction::DownRight,
    ];

    fn delta(self) -> (isize, isize) {
        match self {
            Direction::UpLeft => (1, -1),
            Direction::UpRight => (1, 1),
            Direction::DownLeft => (-1, -1),
            Direction::DownRight => (-1, 1),
        }
    }

    /// Directions a piece may move in.
    pub fn allowed(color: Color, crowned: bool) -> &'static [Direction] {
        const UP: [Direction; 2] = [Direction::UpLeft, Direction::UpRight];
        const DOWN: [Direction; 2] = [Direction::DownLeft, Direction::DownRight];
        match (crowned, color) {
            (true, _) => &Direction::ALL,
            (false, Color::White) => &UP,
            (false, Color::Black) => &DOWN,
        }
    }
}

/// Square board using only the dark squares, with a dark square in each
/// player's bottom-left corner.
///
/// Playable squares are numbered row-major from White's bottom-left: index 0 is
/// `(row 0, col 0)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BoardGeometry {
    side: usize,
    setup_rows: usize,
    coords: Vec<(usize, usize)>,
    neighbors: Vec<[Option<u8>; 4]>,
    jumps: Vec<[Option<u8>; 4]>,
    row_masks: Vec<u64>,
}

#[derive(Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
struct GeometryRepr {
    side: usize,
    setup_rows: usize,
}

impl Serialize for BoardGeometry {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        GeometryRepr {
            side: self.side,
            setup_rows: self.setup_rows,
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for BoardGeometry {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let r = GeometryRepr::deserialize(d)?;
        BoardGeometry::new(r.side, r.setup_rows).map_err(serde::de::Error::custom)
    }
}

impl BoardGeometry {
    pub const MIN_SIDE: usize = 4;

    pub fn new(side: usize, setup_rows: usize) -> Result<Self> {
        if side < Self::MIN_SIDE {
            return Err(Error::InvalidGeometry(format!(
                "side {side} is smaller than {}",
                Self::MIN_SIDE
            )));
        }
        if setup_rows < 1 {
            return Err(Error::InvalidGeometry(
                "at least one setup row is required".into(),
            ));
        }
        let mut coords = Vec::new();
        let mut index = vec![None; side * side];
        for row in 0..side {
            for col in 0..side {
                if (row + col) % 2 == 0 {
                    index[row * side + col] = Some(coords.len());
                    coords.push((row, col));
                }
            }
        }
        if coords.len() > MAX_SQUARES {
            return Err(Error::InvalidGeometry(format!(
                "{side}x{side} has {} playable squares, more than {MAX_SQUARES}",
                coords.len()
            )));
        }
        let per_side: usize = coords.iter().filter(|(r, _)| *r < setup_rows).count();
        if 2 * setup_rows > side || 2 * per_side > coords.len() {
            return Err(Error::InvalidGeometry(format!(
                "{setup_rows} setup rows do not fit on a {side}x{side} board"
            )));
        }
        let step = |(row, col): (usize, usize), dir: Direction, dist: isize| -> Option<u8> {
            let (dr, dc) = dir.delta();
            let r = row as isize + dr * dist;
            let c = col as isize + dc * dist;
            if r < 0 || c < 0 || r >= side as isize || c >= side as isize {
                return None;
            }
            index[r as usize * side + c as usize].map(|i| i as u8)
        };
        let neighbors = coords
            .iter()
            .map(|&rc| Direction::ALL.map(|d| step(rc, d, 1)))
            .collect();
        let jumps = coords
            .iter()
            .map(|&rc| Direction::ALL.map(|d| step(rc, d, 2)))
            .collect();
        let mut row_masks = vec![0u64; side];
        for (i, &(row, _)) in coords.iter().enumerate() {
            row_masks[row] |= 1u64 << i;
        }
        Ok(BoardGeometry {
            side,
            setup_rows,
            coords,
            neighbors,
            jumps,
            row_masks,
        })
    }

    pub fn side(&self) -> usize {
        self.side
    }

    pub fn setup_rows(&self) -> usize {
        self.setup_rows
    }

    pub fn num_squares(&self) -> usize {
        self.coords.len()
    }

    /// `(row, col)` with row 0 at White's side.
    pub fn coords(&self, square: Square) -> (usize, usize) {
        self.coords[square]
    }

    pub fn square_at(&self, row: usize, col: usize) -> Option<Square> {
        if row >= self.side || col >= self.side || !(row + col).is_multiple_of(2) {
            return None;
        }
        self.coords.iter().position(|&rc| rc == (row, col))
    }

    pub fn neighbor(&self, square: Square, dir: Direction) -> Option<Square> {
        self.neighbors[square][dir as usize].map(usize::from)
    }

    pub fn jump(&self, square: Square, dir: Direction) -> Option<Square> {
        self.jumps[square][dir as usize].map(usize::from)
    }

    pub fn row_mask(&self, row: usize) -> u64 {
        self.row_masks[row]
    }

    /// Row on which pieces of `color` are crowned.
    pub fn crowning_mask(&self, color: Color) -> u64 {
        match color {
            Color::White => self.row_masks[self.side - 1],
            Color::Black => self.row_masks[0],
        }
    }

    /// Starting squares of `color`.
    pub fn setup_squares(&self, color: Color) -> Vec<Square> {
        (0..self.num_squares())
            .filter(|&s| {
                let row = self.coords[s].0;
                match color {
                    Color::White => row < self.setup_rows,
                    Color::Black => row >= self.side - self.setup_rows,
                }
            })
            .collect()
    }
}
