use cheqqers_core::game::GameState;
use cheqqers_core::rules::legal_moves;
use cheqqers_core::{BoardGeometry, Move, QuantumnessLevel};
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn geometry() -> impl Strategy<Value = BoardGeometry> {
    prop_oneof![
        Just(BoardGeometry::new(4, 1).unwrap()),
        Just(BoardGeometry::new(5, 1).unwrap()),
        Just(BoardGeometry::new(6, 2).unwrap()),
        Just(BoardGeometry::new(8, 3).unwrap()),
    ]
}

fn play(geo: BoardGeometry, level: u8, seed: u64, plies: u32) -> Vec<GameState> {
    let mut g = GameState::new(geo, QuantumnessLevel::new(level).unwrap(), seed).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut states = vec![g.clone()];
    while !g.is_over() && g.ply_count() < plies {
        let mv = *g.legal_moves().choose(&mut rng).unwrap();
        g.step(&mv).unwrap();
        states.push(g.clone());
    }
    states
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn higher_levels_only_add_moves(geo in geometry(), level in 0u8..4, seed in any::<u64>()) {
        for g in play(geo, level, seed, 120) {
            if g.is_over() {
                continue;
            }
            let mut previous: Vec<Move> = Vec::new();
            for l in QuantumnessLevel::ALL {
                let current = legal_moves(&g, l);
                prop_assert!(previous.iter().all(|m| current.contains(m)));
                if l == g.level() {
                    prop_assert_eq!(&current, &g.legal_moves());
                }
                previous = current;
            }
        }
    }

    #[test]
    fn state_stays_normalized(geo in geometry(), level in 0u8..4, seed in any::<u64>()) {
        for g in play(geo, level, seed, 300) {
            prop_assert!(g.qstate().normalization_error() < 1e-9);
            let total: f64 = g.qstate().marginals().iter().sum();
            let pieces: f64 = g.pieces().iter().map(|p| g.piece_probability(p.id)).sum();
            // every occupied square belongs to a piece
            prop_assert!((total - pieces).abs() < 1e-9, "{} vs {}", total, pieces);
        }
    }

    #[test]
    fn json_round_trip(geo in geometry(), level in 0u8..4, seed in any::<u64>()) {
        let states = play(geo, level, seed, 40);
        let g = states.last().unwrap();
        let back = GameState::from_json(&g.to_json()).unwrap();
        prop_assert_eq!(&back, g);
    }

    #[test]
    fn generated_moves_are_accepted(geo in geometry(), level in 0u8..4, seed in any::<u64>()) {
        for g in play(geo, level, seed, 60) {
            for mv in g.legal_moves() {
                let mut next = g.clone();
                prop_assert!(next.step(&mv).is_ok());
            }
        }
    }
}
