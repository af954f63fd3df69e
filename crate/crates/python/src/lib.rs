//! Python bindings.
//!
//! Moves and states cross the boundary as JSON strings; a move may also be
//! given by its index in `Game.legal_moves()`.
//!
//!     import cheqqers, json
//!     g = cheqqers.Game(size=5, level=1, seed=7)
//!     while not g.is_over():
//!         g.play(cheqqers.mcts_move(g, rollouts=200, seed=g.ply_count()))
//!     print(g.outcome())

use cheqqers_core::agents::{self, MctsConfig};
use cheqqers_core::game::GameView;
use cheqqers_core::rating::{self, GameResult, Rating, TrueSkillParams};
use cheqqers_core::{BoardGeometry, GameState, Move, Outcome, QuantumnessLevel};
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn value_err(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn move_json(mv: &Move) -> String {
    to_json(mv)
}

fn to_json<T: serde::Serialize>(v: &T) -> String {
    serde_json::to_string(v).expect("plain data serializes")
}

#[derive(FromPyObject)]
enum MoveArg {
    Index(usize),
    Json(String),
}

/// One game of quantum checkers.
#[pyclass(module = "cheqqers")]
struct Game {
    state: GameState,
}

#[pymethods]
impl Game {
    /// Args:
    ///     size: board side, 4 to 8.
    ///     level: quantumness level 0 to 3.
    ///     seed: measurement seed.
    ///     setup_rows: rows filled per player; all but the middle two by default.
    ///     draw_rule: end the game after 40 plies without a capture.
    #[new]
    #[pyo3(signature = (size=8, level=0, seed=0, setup_rows=None, draw_rule=true))]
    fn new(
        size: usize,
        level: u8,
        seed: u64,
        setup_rows: Option<usize>,
        draw_rule: bool,
    ) -> PyResult<Self> {
        let rows = setup_rows.unwrap_or((size.saturating_sub(2) / 2).max(1));
        let geometry = BoardGeometry::new(size, rows).map_err(value_err)?;
        let level = QuantumnessLevel::new(level).map_err(value_err)?;
        let state = GameState::new(geometry, level, seed)
            .map_err(value_err)?
            .with_draw_rule(draw_rule);
        Ok(Game { state })
    }

    /// Restores a game saved with `state_json`.
    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        GameState::from_json(text)
            .map(|state| Game { state })
            .map_err(value_err)
    }

    /// Legal moves as JSON objects `{type, piece, squares, reason}`.
    fn legal_moves(&self) -> Vec<String> {
        self.state.legal_moves().iter().map(move_json).collect()
    }

    /// Plays a move given by index or JSON and returns the turn record as JSON.
    fn play(&mut self, mv: MoveArg) -> PyResult<String> {
        let mv =
            match mv {
                MoveArg::Index(i) => *self.state.legal_moves().get(i).ok_or_else(|| {
                    PyValueError::new_err(format!("no legal move with index {i}"))
                })?,
                MoveArg::Json(text) => serde_json::from_str(&text).map_err(value_err)?,
            };
        let record = self.state.step(&mv).map_err(value_err)?;
        Ok(to_json(&record))
    }

    /// Probability that `square` is occupied.
    fn marginal(&self, square: usize) -> PyResult<f64> {
        self.state.qstate().marginal(square).map_err(value_err)
    }

    /// Occupancy probability of every square.
    fn marginals(&self) -> Vec<f64> {
        self.state.qstate().marginals()
    }

    /// Client view with per-piece square probabilities, as JSON.
    #[pyo3(signature = (exact=false))]
    fn view_json(&self, exact: bool) -> String {
        to_json(&GameView::new(&self.state, exact))
    }

    /// Full state, including the measurement generator, as JSON.
    fn state_json(&self) -> String {
        self.state.to_json()
    }

    /// "ongoing", "white", "black" or "draw".
    fn outcome(&self) -> &'static str {
        match self.state.outcome() {
            Outcome::Ongoing => "ongoing",
            Outcome::WhiteWins => "white",
            Outcome::BlackWins => "black",
            Outcome::Draw => "draw",
        }
    }

    fn is_over(&self) -> bool {
        self.state.is_over()
    }

    fn to_move(&self) -> String {
        self.state.to_move().to_string()
    }

    fn ply_count(&self) -> u32 {
        self.state.ply_count()
    }

    fn level(&self) -> u8 {
        self.state.level().value()
    }

    fn size(&self) -> usize {
        self.state.geometry().side()
    }

    fn copy(&self) -> Self {
        Game {
            state: self.state.clone(),
        }
    }

    fn __repr__(&self) -> String {
        format!(
            "Game(size={}, level={}, ply={}, outcome={:?})",
            self.size(),
            self.level(),
            self.ply_count(),
            self.outcome()
        )
    }
}

fn search_err(e: cheqqers_core::Error) -> PyErr {
    match e {
        cheqqers_core::Error::GameOver | cheqqers_core::Error::NoLegalMoves => {
            PyRuntimeError::new_err(e.to_string())
        }
        other => value_err(other),
    }
}

/// A uniformly random legal move, as JSON.
#[pyfunction]
#[pyo3(signature = (game, seed=0))]
fn random_move(game: &Game, seed: u64) -> PyResult<String> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    agents::random_move(&game.state, &mut rng)
        .map(|m| move_json(&m))
        .map_err(search_err)
}

/// The move chosen by a closed-loop MCTS search, as JSON.
#[pyfunction]
#[pyo3(signature = (game, rollouts=800, seed=0, c=None))]
fn mcts_move(
    py: Python<'_>,
    game: &Game,
    rollouts: u32,
    seed: u64,
    c: Option<f64>,
) -> PyResult<String> {
    if rollouts == 0 {
        return Err(PyValueError::new_err("rollouts must be positive"));
    }
    let mut config = MctsConfig::with_rollouts(rollouts);
    if let Some(c) = c {
        config.c = c;
    }
    let state = game.state.clone();
    py.detach(move || {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        agents::mcts_move(&state, &config, &mut rng)
    })
    .map(|m| move_json(&m))
    .map_err(search_err)
}

/// Two-player TrueSkill update.
///
/// Args:
///     a, b: `(mu, sigma)` before the game.
///     result: "a", "b" or "draw".
///
/// Returns the updated `(a, b)` pair.
#[pyfunction]
#[pyo3(signature = (a, b, result, beta=25.0 / 6.0, tau=25.0 / 300.0, draw_probability=0.1))]
fn trueskill_update(
    a: (f64, f64),
    b: (f64, f64),
    result: &str,
    beta: f64,
    tau: f64,
    draw_probability: f64,
) -> PyResult<((f64, f64), (f64, f64))> {
    let result = match result {
        "a" => GameResult::AWins,
        "b" => GameResult::BWins,
        "draw" => GameResult::Draw,
        other => {
            return Err(PyValueError::new_err(format!(
                "result must be a, b or draw, got {other:?}"
            )))
        }
    };
    let params = TrueSkillParams::new(beta, tau, draw_probability).map_err(value_err)?;
    let ra = Rating::new(a.0, a.1).map_err(value_err)?;
    let rb = Rating::new(b.0, b.1).map_err(value_err)?;
    let (na, nb) = rating::trueskill_update(ra, rb, result, &params);
    Ok(((na.mu, na.sigma), (nb.mu, nb.sigma)))
}

#[pymodule]
fn cheqqers(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<Game>()?;
    m.add_function(wrap_pyfunction!(random_move, m)?)?;
    m.add_function(wrap_pyfunction!(mcts_move, m)?)?;
    m.add_function(wrap_pyfunction!(trueskill_update, m)?)?;
    m.add("DEFAULT_MU", rating::DEFAULT_MU)?;
    m.add("DEFAULT_SIGMA", rating::DEFAULT_SIGMA)?;
    Ok(())
}
