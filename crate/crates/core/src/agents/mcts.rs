use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::game::{GameState, Outcome};
use crate::rules::{Color, Move};

pub const DEFAULT_ROLLOUT_CAP: u32 = 200;

/// Score credited when a simulation hits the ply cap.
const CAP_SCORE: f64 = 0.5;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MctsConfig {
    pub rollouts: u32,
    pub c: f64,
    pub rollout_cap: u32,
}

impl Default for MctsConfig {
    fn default() -> Self {
        MctsConfig {
            rollouts: 800,
            c: std::f64::consts::SQRT_2,
            rollout_cap: DEFAULT_ROLLOUT_CAP,
        }
    }
}

impl MctsConfig {
    pub fn with_rollouts(rollouts: u32) -> Self {
        MctsConfig {
            rollouts,
            ..Self::default()
        }
    }
}

/// Root statistics of one search, for inspection and tests.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct SearchStats {
    pub iterations: u32,
    pub root_visits: u32,
    /// Root score, from the root player's side.
    pub root_score: f64,
    /// Sum of all simulation results.
    pub total_result: f64,
    /// `(move, visits, score)` per root edge.
    pub edges: Vec<(Move, u32, f64)>,
    /// Root edge chosen in each iteration.
    pub root_choices: Vec<Move>,
    pub nodes: usize,
}

struct Edge {
    mv: Move,
    visits: u32,
    score: f64,
    /// Chance children keyed by outcome signature.
    children: Vec<((u64, u64), usize)>,
}

struct Node {
    mover: Color,
    visits: u32,
    score: f64,
    untried: Vec<Move>,
    edges: Vec<Edge>,
}

impl Node {
    fn new(state: &GameState) -> Self {
        Node {
            mover: state.to_move(),
            visits: 0,
            score: 0.0,
            untried: state.legal_moves(),
            edges: Vec::new(),
        }
    }

    fn select(&self, root: Color, c: f64) -> usize {
        let ln_n = (self.visits.max(1) as f64).ln();
        let mut best = 0;
        let mut best_value = f64::NEG_INFINITY;
        for (i, e) in self.edges.iter().enumerate() {
            let value = if e.visits == 0 {
                f64::INFINITY
            } else {
                let mean = e.score / e.visits as f64;
                let q = if self.mover == root { mean } else { 1.0 - mean };
                q + c * (ln_n / e.visits as f64).sqrt()
            };
            if value > best_value {
                best_value = value;
                best = i;
            }
        }
        best
    }
}

fn terminal_score(outcome: Outcome, root: Color) -> f64 {
    match outcome.winner() {
        Some(w) if w == root => 1.0,
        Some(_) => 0.0,
        None => 0.5,
    }
}

fn rollout<R: Rng + ?Sized>(
    sim: &mut GameState,
    root: Color,
    cap: u32,
    buf: &mut Vec<Move>,
    rng: &mut R,
) -> f64 {
    let mut plies = 0;
    while !sim.is_over() {
        if plies >= cap {
            return CAP_SCORE;
        }
        sim.legal_moves_into(buf);
        let mv = buf[rng.gen_range(0..buf.len())];
        sim.apply_legal(&mv, rng);
        plies += 1;
    }
    terminal_score(sim.outcome(), root)
}

/// UCT search over the stochastic game; returns the most visited root move.
pub fn mcts_move<R: Rng + ?Sized>(
    state: &GameState,
    config: &MctsConfig,
    rng: &mut R,
) -> Result<Move> {
    let moves = state.legal_moves();
    if moves.len() == 1 {
        return Ok(moves[0]);
    }
    mcts_search(state, config, rng).map(|(mv, _)| mv)
}

/// Full search, also returning root statistics.
pub fn mcts_search<R: Rng + ?Sized>(
    state: &GameState,
    config: &MctsConfig,
    rng: &mut R,
) -> Result<(Move, SearchStats)> {
    if state.is_over() {
        return Err(Error::GameOver);
    }
    if config.rollouts == 0 {
        return Err(Error::Domain("rollouts must be positive".into()));
    }
    let root = state.to_move();
    let mut nodes = vec![Node::new(state)];
    if nodes[0].untried.is_empty() {
        return Err(Error::NoLegalMoves);
    }
    let mut stats = SearchStats::default();
    let mut buf = Vec::new();
    let mut path: Vec<(usize, usize)> = Vec::new();

    for _ in 0..config.rollouts {
        let mut sim = state.clone();
        path.clear();
        let mut node = 0;
        let value = loop {
            if sim.is_over() {
                break terminal_score(sim.outcome(), root);
            }
            let n = &mut nodes[node];
            let (edge, expanding) = if n.untried.is_empty() {
                (n.select(root, config.c), false)
            } else {
                let mv = n.untried.swap_remove(rng.gen_range(0..n.untried.len()));
                n.edges.push(Edge {
                    mv,
                    visits: 0,
                    score: 0.0,
                    children: Vec::new(),
                });
                (n.edges.len() - 1, true)
            };
            let mv = n.edges[edge].mv;
            if node == 0 {
                stats.root_choices.push(mv);
            }
            let signature = sim.apply_legal(&mv, rng).outcome_signature();
            path.push((node, edge));
            let known = nodes[node].edges[edge]
                .children
                .iter()
                .find(|(s, _)| *s == signature)
                .map(|&(_, child)| child);
            match known {
                Some(child) if !expanding => node = child,
                _ => {
                    let child = nodes.len();
                    nodes.push(Node::new(&sim));
                    nodes[node].edges[edge].children.push((signature, child));
                    node = child;
                    break rollout(&mut sim, root, config.rollout_cap, &mut buf, rng);
                }
            }
        };
        for &(n, e) in &path {
            let n = &mut nodes[n];
            n.visits += 1;
            n.score += value;
            n.edges[e].visits += 1;
            n.edges[e].score += value;
        }
        nodes[node].visits += 1;
        nodes[node].score += value;
        stats.total_result += value;
    }

    let root_node = &nodes[0];
    let top = root_node.edges.iter().map(|e| e.visits).max().unwrap_or(0);
    let best: Vec<Move> = root_node
        .edges
        .iter()
        .filter(|e| e.visits == top)
        .map(|e| e.mv)
        .collect();
    let choice = best[rng.gen_range(0..best.len())];
    stats.iterations = config.rollouts;
    stats.root_visits = root_node.visits;
    stats.root_score = root_node.score;
    stats.edges = root_node
        .edges
        .iter()
        .map(|e| (e.mv, e.visits, e.score))
        .collect();
    stats.nodes = nodes.len();
    Ok((choice, stats))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rules::{BoardGeometry, QuantumnessLevel};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn g5() -> BoardGeometry {
        BoardGeometry::new(5, 1).unwrap()
    }

    #[test]
    fn finds_the_winning_capture() {
        // 8x8: White (2,2) jumps (3,3) then (5,5) and wins; White (2,4) only takes one
        let g8 = BoardGeometry::new(8, 3).unwrap();
        let sq = |r, c| g8.square_at(r, c).unwrap();
        let g = GameState::from_position(
            g8.clone(),
            QuantumnessLevel::CLASSICAL,
            &[
                (sq(2, 2), Color::White, false),
                (sq(2, 4), Color::White, false),
                (sq(3, 3), Color::Black, false),
                (sq(5, 5), Color::Black, false),
            ],
            Color::White,
            0,
        )
        .unwrap();
        let win = Move::Capture {
            piece: crate::rules::PieceId(0),
            from: sq(2, 2),
            over: sq(3, 3),
            landing: sq(4, 4),
        };
        assert_eq!(g.legal_moves().len(), 2);
        assert!(g.legal_moves().contains(&win));
        for seed in 0..5 {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            assert_eq!(
                mcts_move(&g, &MctsConfig::with_rollouts(200), &mut rng).unwrap(),
                win
            );
        }
    }

    #[test]
    fn root_accounting() {
        let g = GameState::new(g5(), QuantumnessLevel::SUPERPOSITION, 5).unwrap();
        let branching = g.legal_moves().len();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let (mv, stats) = mcts_search(&g, &MctsConfig::with_rollouts(300), &mut rng).unwrap();
        assert!(g.legal_moves().contains(&mv));
        assert_eq!(stats.root_visits, 300);
        assert!((stats.root_score - stats.total_result).abs() < 1e-9);
        assert_eq!(stats.edges.iter().map(|e| e.1).sum::<u32>(), 300);
        assert!(stats.root_score >= 0.0 && stats.root_score <= 300.0);
        // every root move is tried once before any is revisited
        let first: std::collections::HashSet<_> = stats.root_choices[..branching].iter().collect();
        assert_eq!(first.len(), branching);
    }

    #[test]
    fn seeded_search_is_deterministic() {
        let g = GameState::new(g5(), QuantumnessLevel::CLASSICAL, 0).unwrap();
        let config = MctsConfig::with_rollouts(200);
        let a = mcts_search(&g, &config, &mut ChaCha8Rng::seed_from_u64(7)).unwrap();
        let b = mcts_search(&g, &config, &mut ChaCha8Rng::seed_from_u64(7)).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn search_leaves_state_untouched() {
        let g = GameState::new(g5(), QuantumnessLevel::INTERFERENCE, 1).unwrap();
        let before = g.clone();
        mcts_move(
            &g,
            &MctsConfig::with_rollouts(100),
            &mut ChaCha8Rng::seed_from_u64(1),
        )
        .unwrap();
        assert_eq!(g, before);
    }

    #[test]
    fn terminal_is_an_error() {
        let g = GameState::from_position(
            g5(),
            QuantumnessLevel::CLASSICAL,
            &[(0, Color::White, false)],
            Color::Black,
            0,
        )
        .unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        assert_eq!(
            mcts_move(&g, &MctsConfig::default(), &mut rng),
            Err(Error::GameOver)
        );
    }
}
