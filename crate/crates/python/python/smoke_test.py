"""Smoke test for the cheqqers extension module.

Build and install first:
    maturin develop --release -m crates/python/Cargo.toml
"""

import json
import math

import cheqqers


def test_split_gives_half_occupancy():
    g = cheqqers.Game(size=5, level=1, seed=3)
    assert g.to_move() == "white"
    assert len(json.loads(g.view_json())["pieces"]) == 6
    moves = [json.loads(m) for m in g.legal_moves()]
    split = next(i for i, m in enumerate(moves) if m["type"] == "split")
    _, to1, to2 = moves[split]["squares"]
    record = json.loads(g.play(split))
    assert record["mover"] == "white"
    assert math.isclose(g.marginal(to1), 0.5)
    assert math.isclose(g.marginal(to2), 0.5)
    assert math.isclose(sum(g.marginals()), 6.0)


def test_agents_finish_a_game():
    g = cheqqers.Game(size=5, level=2, seed=11)
    turn = 0
    while not g.is_over():
        if g.to_move() == "white":
            mv = cheqqers.mcts_move(g, rollouts=50, seed=turn)
        else:
            mv = cheqqers.random_move(g, seed=turn)
        g.play(mv)
        turn += 1
    assert g.outcome() in ("white", "black", "draw")
    try:
        cheqqers.random_move(g)
    except RuntimeError:
        pass
    else:
        raise AssertionError("finished game accepted a move")


def test_state_round_trip():
    g = cheqqers.Game(size=6, level=3, seed=5)
    for i in range(6):
        if g.is_over():
            break
        g.play(cheqqers.random_move(g, seed=i))
    copy = cheqqers.Game.from_json(g.state_json())
    assert copy.state_json() == g.state_json()
    assert copy.marginals() == g.marginals()


def test_trueskill_update():
    mu, sigma = cheqqers.DEFAULT_MU, cheqqers.DEFAULT_SIGMA
    (wa, sa), (wb, sb) = cheqqers.trueskill_update((mu, sigma), (mu, sigma), "a")
    assert wa > mu > wb
    assert sa < sigma and sb < sigma
    assert math.isclose(wa - mu, mu - wb)
    (da, _), (db, _) = cheqqers.trueskill_update((mu, sigma), (mu, sigma), "draw")
    assert math.isclose(da, mu) and math.isclose(db, mu)


def test_bad_input_raises():
    for kwargs in ({"size": 3}, {"level": 4}):
        try:
            cheqqers.Game(**kwargs)
        except ValueError:
            continue
        raise AssertionError(f"accepted {kwargs}")
    g = cheqqers.Game(size=5)
    try:
        g.play(99)
    except ValueError:
        pass
    else:
        raise AssertionError("accepted move index 99")


if __name__ == "__main__":
    for name, fn in list(globals().items()):
        if name.startswith("test_"):
            fn()
            print(f"ok {name}")
