use std::collections::HashMap;
use std::io::{self, BufRead, Write};
use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use cheqqers_core::agents::Agent;
use cheqqers_core::game::GameView;
use cheqqers_core::harness::{write_matchups, write_selfplay, write_tournaments, ExperimentConfig};
use cheqqers_core::{BoardGeometry, Color, GameState, Move, Outcome, QuantumnessLevel, TurnRecord};
use cheqqers_service::{default_setup_rows, Controller, ServiceConfig};
use clap::{Parser, Subcommand, ValueEnum};
use rand::Rng;

#[derive(Parser)]
#[command(
    name = "cheqqers",
    version,
    about = "Quantum checkers: play, experiments and game server"
)]
struct Cli {
    /// Log level for messages on stderr.
    #[arg(long, global = true, default_value = "info")]
    log_level: tracing::Level,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Play one game in the terminal.
    Play {
        #[arg(long, value_parser = clap::value_parser!(u8).range(0..=3))]
        level: u8,
        #[arg(long, default_value_t = 8)]
        size: usize,
        /// Rows filled per player at setup; defaults to all but the middle two rows.
        #[arg(long)]
        rows: Option<usize>,
        /// `human`, `random` or `mcts:N[:c=F]`.
        #[arg(long, default_value = "human")]
        white: Controller,
        #[arg(long, default_value = "mcts:800")]
        black: Controller,
        #[arg(long)]
        seed: Option<u64>,
        /// Disable the 40-ply no-capture draw.
        #[arg(long)]
        no_draw_rule: bool,
    },
    /// Run a batch experiment and write CSV tables.
    Experiment {
        kind: ExperimentKind,
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Start the HTTP game service.
    Serve {
        #[arg(long, default_value_t = 8080)]
        port: u16,
        /// Append created games and played moves to this JSON-lines file.
        #[arg(long)]
        session_log: Option<PathBuf>,
        /// Idle time in hours before a session is dropped.
        #[arg(long, default_value_t = 24.0)]
        idle_hours: f64,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum ExperimentKind {
    Selfplay,
    Matchup,
    Tournament,
}

fn main() -> Result<()> {
    let cli = Cli::parse();
    tracing_subscriber::fmt()
        .with_max_level(cli.log_level)
        .with_writer(io::stderr)
        .init();
    match cli.command {
        Command::Play {
            level,
            size,
            rows,
            white,
            black,
            seed,
            no_draw_rule,
        } => {
            let geometry =
                BoardGeometry::new(size, rows.unwrap_or_else(|| default_setup_rows(size)))?;
            let seed = seed.unwrap_or_else(|| rand::thread_rng().gen());
            let state = GameState::new(geometry, QuantumnessLevel::new(level)?, seed)?
                .with_draw_rule(!no_draw_rule);
            let stdin = io::stdin();
            play(
                state,
                [white, black],
                &mut stdin.lock(),
                &mut io::stdout().lock(),
            )
        }
        Command::Experiment { kind, config, out } => {
            let cfg = ExperimentConfig::load(&config)
                .with_context(|| format!("reading {}", config.display()))?;
            match kind {
                ExperimentKind::Selfplay => {
                    write_selfplay(&cfg, &out)?;
                }
                ExperimentKind::Matchup => {
                    write_matchups(&cfg, &out)?;
                }
                ExperimentKind::Tournament => {
                    write_tournaments(&cfg, &out)?;
                }
            }
            println!("results written to {}", out.display());
            Ok(())
        }
        Command::Serve {
            port,
            session_log,
            idle_hours,
        } => {
            if !(idle_hours > 0.0 && idle_hours.is_finite()) {
                bail!("--idle-hours must be positive");
            }
            let config = ServiceConfig {
                idle_ttl: std::time::Duration::from_secs_f64(idle_hours * 3600.0),
                session_log,
                ..ServiceConfig::default()
            };
            tokio::runtime::Runtime::new()?.block_on(cheqqers_service::serve(port, config))?;
            Ok(())
        }
    }
}

fn play(
    mut state: GameState,
    controllers: [Controller; 2],
    input: &mut dyn BufRead,
    out: &mut dyn Write,
) -> Result<()> {
    let seed = state.rng_seed();
    let side = state.geometry().side();
    writeln!(
        out,
        "level {} on {side}x{side}, seed {seed}: white = {}, black = {}",
        state.level().value(),
        controllers[0],
        controllers[1],
    )?;
    let mut agents: Vec<Option<Box<dyn Agent>>> = controllers
        .iter()
        .enumerate()
        .map(|(i, c)| match c {
            Controller::Human => None,
            Controller::Agent(spec) => {
                Some(spec.build(seed ^ (i as u64 + 1).wrapping_mul(0x9E37_79B9_7F4A_7C15)))
            }
        })
        .collect();
    while !state.is_over() {
        write!(out, "{}", render(&state))?;
        let mover = state.to_move();
        let idx = usize::from(mover == Color::Black);
        let mv = match agents[idx].as_mut() {
            Some(agent) => agent.select(&state)?,
            None => match ask(&state, input, out)? {
                Some(mv) => mv,
                None => {
                    writeln!(out, "input closed; game abandoned")?;
                    return Ok(());
                }
            },
        };
        let record = state.step(&mv)?;
        writeln!(out, "{mover}: {}", describe(&record))?;
    }
    write!(out, "{}", render(&state))?;
    let result = match state.outcome() {
        Outcome::WhiteWins => "white wins",
        Outcome::BlackWins => "black wins",
        _ => "draw",
    };
    writeln!(out, "game over after {} plies: {result}", state.ply_count())?;
    Ok(())
}

/// Prompts until the player picks a listed move. `None` on end of input.
fn ask(state: &GameState, input: &mut dyn BufRead, out: &mut dyn Write) -> Result<Option<Move>> {
    let moves = state.legal_moves();
    for (i, mv) in moves.iter().enumerate() {
        writeln!(out, "  {i:>2}) {}", format_move(mv))?;
    }
    loop {
        write!(out, "{} to move> ", state.to_move())?;
        out.flush()?;
        let mut line = String::new();
        if input.read_line(&mut line)? == 0 {
            return Ok(None);
        }
        match line.trim().parse::<usize>() {
            Ok(i) if i < moves.len() => return Ok(Some(moves[i])),
            _ => writeln!(out, "enter a number between 0 and {}", moves.len() - 1)?,
        }
    }
}

fn format_move(mv: &Move) -> String {
    let sq = mv.squares();
    match mv {
        Move::Step { .. } => format!("step {} -> {}", sq[0], sq[1]),
        Move::Capture { .. } => format!("capture {} x {} -> {}", sq[0], sq[1], sq[2]),
        Move::Split { .. } => format!("split {} -> {} + {}", sq[0], sq[1], sq[2]),
        Move::Merge { .. } => format!("merge {} + {} -> {}", sq[0], sq[1], sq[2]),
        Move::Pass { .. } => "pass".into(),
    }
}

fn describe(record: &TurnRecord) -> String {
    let mut s = format_move(&record.mv);
    if let Some(reason) = record.pass {
        s.push_str(&format!(" (measured, {reason:?}: turn passes)"));
    } else if !record.measurements.is_empty() {
        s.push_str(" (measured)");
    }
    if record.entangled {
        s.push_str(" (entangled)");
    }
    if !record.crowned.is_empty() {
        s.push_str(" (crowned)");
    }
    s
}

/// Board with row 0 (White's side) at the bottom. Each dark square shows its
/// index, the occupying color and, when uncertain, the percentage.
fn render(state: &GameState) -> String {
    let geo = state.geometry();
    let view = GameView::new(state, false);
    let mut cells: HashMap<usize, (Color, bool, f64)> = HashMap::new();
    for p in &view.pieces {
        for s in &p.squares {
            let e = cells.entry(s.square).or_insert((p.color, p.crowned, 0.0));
            e.2 += s.probability;
        }
    }
    let side = geo.side();
    let mut text = String::new();
    for row in (0..side).rev() {
        text.push_str(&format!("{row:>2} "));
        for col in 0..side {
            let cell = match geo.square_at(row, col) {
                None => "       ".to_string(),
                Some(sq) => match cells.get(&sq) {
                    Some(&(color, crowned, p)) if p > 0.0 => {
                        let c = match (color, crowned) {
                            (Color::White, false) => 'w',
                            (Color::White, true) => 'W',
                            (Color::Black, false) => 'b',
                            (Color::Black, true) => 'B',
                        };
                        if p >= 0.99995 {
                            format!("{sq:>2}:{c}   ")
                        } else {
                            format!("{sq:>2}:{c}{:>2.0}%", p * 100.0)
                        }
                    }
                    _ => format!("{sq:>2}:.   "),
                },
            };
            text.push_str(&cell);
        }
        text.push('\n');
    }
    if !view.entanglement.is_empty() {
        let groups: Vec<String> = view
            .entanglement
            .iter()
            .map(|g| {
                g.iter()
                    .map(|id| id.to_string())
                    .collect::<Vec<_>>()
                    .join("-")
            })
            .collect();
        text.push_str(&format!("entangled pieces: {}\n", groups.join(", ")));
    }
    text
}
