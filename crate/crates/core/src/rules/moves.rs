use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::{BoardGeometry, Color, Direction, Piece, PieceId, QuantumnessLevel, Square};
use crate::game::GameState;

/// Why a capture attempt turned into a pass.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PassReason {
    /// The capturing piece was not found on the square it jumped from.
    AttackerAbsent,
    /// The piece being captured was not found on the jumped square.
    DefenderAbsent,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Move {
    Step {
        piece: PieceId,
        from: Square,
        to: Square,
    },
    Capture {
        piece: PieceId,
        from: Square,
        over: Square,
        landing: Square,
    },
    Split {
        piece: PieceId,
        from: Square,
        to1: Square,
        to2: Square,
    },
    Merge {
        piece: PieceId,
        from1: Square,
        from2: Square,
        to: Square,
    },
    Pass {
        reason: PassReason,
    },
}

impl Move {
    pub fn piece(&self) -> Option<PieceId> {
        match *self {
            Move::Step { piece, .. }
            | Move::Capture { piece, .. }
            | Move::Split { piece, .. }
            | Move::Merge { piece, .. } => Some(piece),
            Move::Pass { .. } => None,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            Move::Step { .. } => "step",
            Move::Capture { .. } => "capture",
            Move::Split { .. } => "split",
            Move::Merge { .. } => "merge",
            Move::Pass { .. } => "pass",
        }
    }

    /// Squares in field order.
    pub fn squares(&self) -> Vec<Square> {
        match *self {
            Move::Step { from, to, .. } => vec![from, to],
            Move::Capture {
                from,
                over,
                landing,
                ..
            } => vec![from, over, landing],
            Move::Split { from, to1, to2, .. } => vec![from, to1, to2],
            Move::Merge {
                from1, from2, to, ..
            } => vec![from1, from2, to],
            Move::Pass { .. } => Vec::new(),
        }
    }

    pub fn is_capture(&self) -> bool {
        matches!(self, Move::Capture { .. })
    }
}

#[derive(Serialize, Deserialize)]
struct MoveRepr {
    #[serde(rename = "type")]
    kind: String,
    piece: Option<PieceId>,
    squares: Vec<Square>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    reason: Option<PassReason>,
}

impl Serialize for Move {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        MoveRepr {
            kind: self.kind().to_string(),
            piece: self.piece(),
            squares: self.squares(),
            reason: match self {
                Move::Pass { reason } => Some(*reason),
                _ => None,
            },
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for Move {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        use serde::de::Error;
        let r = MoveRepr::deserialize(d)?;
        let piece = || {
            r.piece
                .ok_or_else(|| D::Error::custom("move needs a piece"))
        };
        let sq = &r.squares;
        let arity = |n: usize| {
            if sq.len() == n {
                Ok(())
            } else {
                Err(D::Error::custom(format!(
                    "{} move takes {n} squares, got {}",
                    r.kind,
                    sq.len()
                )))
            }
        };
        Ok(match r.kind.as_str() {
            "step" => {
                arity(2)?;
                Move::Step {
                    piece: piece()?,
                    from: sq[0],
                    to: sq[1],
                }
            }
            "capture" => {
                arity(3)?;
                Move::Capture {
                    piece: piece()?,
                    from: sq[0],
                    over: sq[1],
                    landing: sq[2],
                }
            }
            "split" => {
                arity(3)?;
                Move::Split {
                    piece: piece()?,
                    from: sq[0],
                    to1: sq[1],
                    to2: sq[2],
                }
            }
            "merge" => {
                arity(3)?;
                Move::Merge {
                    piece: piece()?,
                    from1: sq[0],
                    from2: sq[1],
                    to: sq[2],
                }
            }
            "pass" => Move::Pass {
                reason: r
                    .reason
                    .ok_or_else(|| D::Error::custom("pass needs a reason"))?,
            },
            other => return Err(D::Error::custom(format!("unknown move type {other:?}"))),
        })
    }
}

/// Legal moves for the side to move in `state`, evaluated under `level`.
pub fn legal_moves(state: &GameState, level: QuantumnessLevel) -> Vec<Move> {
    let mut out = Vec::new();
    if state.outcome().is_over() {
        return out;
    }
    generate_moves(
        state.geometry(),
        state.pieces(),
        state.to_move(),
        level,
        state.pending_chain(),
        &mut out,
    );
    out
}

/// Appends every legal move for `mover` to `out`.
///
/// `chain` restricts generation to continuation captures of one piece from one
/// square. Captures, when any exist, are the only moves generated.
pub fn generate_moves(
    geometry: &BoardGeometry,
    pieces: &[Piece],
    mover: Color,
    level: QuantumnessLevel,
    chain: Option<(PieceId, Square)>,
    out: &mut Vec<Move>,
) {
    let occupied = pieces.iter().fold(0u64, |m, p| m | p.support);
    let opponents = pieces
        .iter()
        .filter(|p| p.color != mover)
        .fold(0u64, |m, p| m | p.support);
    let start = out.len();

    for p in pieces.iter().filter(|p| p.color == mover) {
        if let Some((id, _)) = chain {
            if id != p.id {
                continue;
            }
        }
        for from in p.squares() {
            if let Some((_, sq)) = chain {
                if sq != from {
                    continue;
                }
            }
            for &dir in Direction::allowed(p.color, p.crowned) {
                let (Some(over), Some(landing)) =
                    (geometry.neighbor(from, dir), geometry.jump(from, dir))
                else {
                    continue;
                };
                if opponents >> over & 1 == 1 && occupied >> landing & 1 == 0 {
                    out.push(Move::Capture {
                        piece: p.id,
                        from,
                        over,
                        landing,
                    });
                }
            }
        }
    }
    if out.len() > start || chain.is_some() {
        return;
    }

    let mut targets: Vec<Square> = Vec::with_capacity(4);
    for p in pieces.iter().filter(|p| p.color == mover) {
        let dirs = Direction::allowed(p.color, p.crowned);
        for from in p.squares() {
            targets.clear();
            targets.extend(
                dirs.iter()
                    .filter_map(|&d| geometry.neighbor(from, d))
                    .filter(|&t| occupied >> t & 1 == 0),
            );
            targets.sort_unstable();
            for &to in &targets {
                out.push(Move::Step {
                    piece: p.id,
                    from,
                    to,
                });
            }
            if level.allows_split() {
                for (i, &to1) in targets.iter().enumerate() {
                    for &to2 in &targets[i + 1..] {
                        out.push(Move::Split {
                            piece: p.id,
                            from,
                            to1,
                            to2,
                        });
                    }
                }
            }
        }
        if level.allows_merge() && p.support.count_ones() >= 2 {
            push_merges(geometry, p, dirs, occupied, out);
        }
    }
}

fn push_merges(
    geometry: &BoardGeometry,
    p: &Piece,
    dirs: &[Direction],
    occupied: u64,
    out: &mut Vec<Move>,
) {
    let step_targets = |from: Square| -> u64 {
        dirs.iter()
            .filter_map(|&d| geometry.neighbor(from, d))
            .filter(|&t| occupied >> t & 1 == 0)
            .fold(0u64, |m, t| m | 1u64 << t)
    };
    let parts: Vec<Square> = p.squares().collect();
    for (i, &from1) in parts.iter().enumerate() {
        let t1 = step_targets(from1);
        if t1 == 0 {
            continue;
        }
        for &from2 in &parts[i + 1..] {
            for to in crate::qstate::mask_squares(t1 & step_targets(from2)) {
                out.push(Move::Merge {
                    piece: p.id,
                    from1,
                    from2,
                    to,
                });
            }
        }
    }
}

/// Whether a capture attempt is geometrically and occupationally legal: the
/// attacker may be at `from`, an opposing piece may be at `over`, `landing` holds
/// no piece support and the direction suits the attacker.
pub fn capture_legality(state: &GameState, attempt: &Move) -> bool {
    let Move::Capture {
        piece,
        from,
        over,
        landing,
    } = *attempt
    else {
        return false;
    };
    let geometry = state.geometry();
    let n = geometry.num_squares();
    if from >= n || over >= n || landing >= n {
        return false;
    }
    let Some(attacker) = state.piece(piece) else {
        return false;
    };
    if !attacker.occupies(from) {
        return false;
    }
    let defended = state
        .pieces()
        .iter()
        .any(|p| p.color != attacker.color && p.occupies(over));
    let landing_empty = state.pieces().iter().all(|p| !p.occupies(landing));
    let direction_ok = Direction::allowed(attacker.color, attacker.crowned)
        .iter()
        .any(|&d| {
            geometry.neighbor(from, d) == Some(over) && geometry.jump(from, d) == Some(landing)
        });
    defended && landing_empty && direction_ok
}
