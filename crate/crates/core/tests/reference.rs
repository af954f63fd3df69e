mod common;

use std::collections::BTreeSet;

use cheqqers_core::game::GameState;
use cheqqers_core::{BoardGeometry, Color, Move, QuantumnessLevel};
use common::reference::{moves, RefMove, RefPiece};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn engine_moves(g: &GameState) -> BTreeSet<RefMove> {
    let geo = g.geometry();
    g.legal_moves()
        .iter()
        .map(|m| match *m {
            Move::Step { from, to, .. } => RefMove::Step {
                from: geo.coords(from),
                to: geo.coords(to),
            },
            Move::Capture {
                from,
                over,
                landing,
                ..
            } => RefMove::Jump {
                from: geo.coords(from),
                over: geo.coords(over),
                to: geo.coords(landing),
            },
            other => panic!("unexpected level-0 move {other:?}"),
        })
        .collect()
}

fn reference_moves(g: &GameState) -> BTreeSet<RefMove> {
    let pieces: Vec<RefPiece> = g
        .pieces()
        .iter()
        .map(|p| {
            let (row, col) = g.geometry().coords(p.support.trailing_zeros() as usize);
            RefPiece {
                row,
                col,
                white: p.color == Color::White,
                king: p.crowned,
            }
        })
        .collect();
    moves(g.geometry().side(), &pieces, g.to_move() == Color::White)
}

#[test]
fn positions_from_play_match_reference() {
    let mut compared = 0;
    for (side, rows) in [(8, 3), (8, 1), (6, 2), (5, 1)] {
        let geo = BoardGeometry::new(side, rows).unwrap();
        for seed in 0..50 {
            let mut g = GameState::new(geo.clone(), QuantumnessLevel::CLASSICAL, seed).unwrap();
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            while !g.is_over() {
                // chained jumps are restricted to one piece; the reference has no chain state
                if g.pending_chain().is_none() {
                    assert_eq!(engine_moves(&g), reference_moves(&g), "{}", g.to_json());
                    compared += 1;
                }
                let mv = *g.legal_moves().choose(&mut rng).unwrap();
                g.step(&mv).unwrap();
            }
        }
    }
    assert!(compared > 1000);
}

#[test]
fn chain_only_continues_with_the_capturing_piece() {
    let geo = BoardGeometry::new(8, 3).unwrap();
    for seed in 0..200 {
        let mut g = GameState::new(geo.clone(), QuantumnessLevel::CLASSICAL, seed).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        while !g.is_over() {
            if let Some((piece, square)) = g.pending_chain() {
                let reference = reference_moves(&g);
                for m in g.legal_moves() {
                    let Move::Capture { piece: p, from, .. } = m else {
                        panic!("chain continuation must be a capture");
                    };
                    assert_eq!((p, from), (piece, square));
                    assert!(engine_moves(&g).is_subset(&reference));
                }
            }
            let mv = *g.legal_moves().choose(&mut rng).unwrap();
            g.step(&mv).unwrap();
        }
    }
}
