//! Plain checkers move generation on a 2D grid.
//!
//! Men move one diagonal step forward (White towards higher rows), kings both
//! ways. Jumps are mandatory; each jump is its own move.

use std::collections::BTreeSet;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RefPiece {
    pub row: usize,
    pub col: usize,
    pub white: bool,
    pub king: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum RefMove {
    Step {
        from: (usize, usize),
        to: (usize, usize),
    },
    Jump {
        from: (usize, usize),
        over: (usize, usize),
        to: (usize, usize),
    },
}

pub fn moves(side: usize, pieces: &[RefPiece], white_to_move: bool) -> BTreeSet<RefMove> {
    let mut grid = vec![vec![None; side]; side];
    for p in pieces {
        grid[p.row][p.col] = Some(*p);
    }
    let at = |r: i64, c: i64| -> Option<Option<RefPiece>> {
        if r < 0 || c < 0 || r >= side as i64 || c >= side as i64 {
            None
        } else {
            Some(grid[r as usize][c as usize])
        }
    };
    let mut steps = BTreeSet::new();
    let mut jumps = BTreeSet::new();
    for p in pieces.iter().filter(|p| p.white == white_to_move) {
        let forward: i64 = if p.white { 1 } else { -1 };
        let mut dirs = vec![(forward, -1), (forward, 1)];
        if p.king {
            dirs.extend([(-forward, -1), (-forward, 1)]);
        }
        let (r, c) = (p.row as i64, p.col as i64);
        for (dr, dc) in dirs {
            match at(r + dr, c + dc) {
                Some(None) => {
                    steps.insert(RefMove::Step {
                        from: (p.row, p.col),
                        to: ((r + dr) as usize, (c + dc) as usize),
                    });
                }
                Some(Some(q)) if q.white != p.white => {
                    if let Some(None) = at(r + 2 * dr, c + 2 * dc) {
                        jumps.insert(RefMove::Jump {
                            from: (p.row, p.col),
                            over: ((r + dr) as usize, (c + dc) as usize),
                            to: ((r + 2 * dr) as usize, (c + 2 * dc) as usize),
                        });
                    }
                }
                _ => {}
            }
        }
    }
    if jumps.is_empty() {
        steps
    } else {
        jumps
    }
}
