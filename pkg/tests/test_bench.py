import json
import subprocess
import sys

import numpy as np
import pytest

from hoprl import QTable
from hoprl.bench import (
    RAW_HEADER,
    ConfigError,
    ExperimentConfig,
    load_config,
    load_qtable,
    parse_config_text,
    qvalue_distribution,
    run_experiment,
    save_qtable,
)
from hoprl.cli import main

FAST_CHAIN = {
    "env": "chain",
    "env.length": 5,
    "env.gates": (1, 2, 2, 4),
    "steps": 400,
    "checkpoint_every": 200,
    "reps": 1,
    "arms": ("qlearning",),
}


def make_cfg(tmp_path, **overrides):
    values = dict(FAST_CHAIN)
    values["out"] = str(tmp_path / "results.csv")
    values.update(overrides)
    return ExperimentConfig(values)


def read_rows(path):
    lines = path.read_text().splitlines()
    return lines[0], lines[1:]


def strip_wall(lines):
    out = []
    for line in lines:
        parts = line.split(",")
        parts[7] = "-"
        out.append(",".join(parts))
    return out


def test_single_trial_single_checkpoint_layout(tmp_path):
    cfg = make_cfg(tmp_path, steps=200, checkpoint_every=200)
    result = run_experiment(cfg)
    header, rows = read_rows(result.raw_path)
    assert header == RAW_HEADER
    assert len(rows) == 1
    fields = rows[0].split(",")
    assert fields[0] == "qlearning-s1"
    assert fields[1] == "qlearning"
    assert int(fields[3]) == 200
    assert int(fields[4]) + int(fields[5]) == 200


def test_percentages_stay_in_range(tmp_path):
    result = run_experiment(make_cfg(tmp_path, arms=("qlearning", "time_hopping_ep"), reps=2))
    for row in result.rows():
        assert 0.0 <= row.pct_of_optimal <= 110.0
        assert row.sim_steps + row.hop_steps == row.step


def test_rerun_is_byte_identical_except_wall_clock(tmp_path):
    result_a = run_experiment(make_cfg(tmp_path, arms=("qlearning", "time_hopping_ep"), reps=2))
    lines_a = result_a.raw_path.read_text().splitlines()
    result_b = run_experiment(make_cfg(tmp_path, arms=("qlearning", "time_hopping_ep"), reps=2))
    lines_b = result_b.raw_path.read_text().splitlines()
    assert strip_wall(lines_a) == strip_wall(lines_b)


def test_rows_are_canonically_ordered(tmp_path):
    result = run_experiment(make_cfg(tmp_path, arms=("time_hopping", "qlearning"), reps=2))
    _, rows = read_rows(result.raw_path)
    keys = [(r.split(",")[1], int(r.split(",")[2]), int(r.split(",")[3])) for r in rows]
    assert keys == sorted(keys)


def test_summary_matches_recomputation(tmp_path):
    result = run_experiment(make_cfg(tmp_path, reps=3, arms=("qlearning", "time_hopping")))
    raw = {}
    _, rows = read_rows(result.raw_path)
    for line in rows:
        f = line.split(",")
        raw.setdefault((f[1], int(f[3])), []).append(float(f[6]))
    header, summary_rows = read_rows(result.summary_path)
    assert header.startswith("arm,step,pct_mean,pct_std")
    for line in summary_rows:
        f = line.split(",")
        bucket = np.array(raw[(f[0], int(f[1]))])
        assert abs(float(f[2]) - bucket.mean()) <= 1e-12
        assert abs(float(f[3]) - bucket.std()) <= 1e-12


def test_seed_isolation(tmp_path):
    full = run_experiment(make_cfg(tmp_path, reps=3))
    _, full_rows = read_rows(full.raw_path)
    target_seed = 2  # base seed 1 + repetition 1
    expected = [r for r in full_rows if int(r.split(",")[2]) == target_seed]
    solo = run_experiment(make_cfg(tmp_path, reps=1, seed=target_seed, out=str(tmp_path / "solo.csv")))
    _, solo_rows = read_rows(solo.raw_path)
    assert strip_wall(solo_rows) == strip_wall(expected)


def test_meta_sidecar_labels_reconstructed_components(tmp_path):
    result = run_experiment(make_cfg(tmp_path))
    meta = json.loads(result.meta_path.read_text())
    assert meta["hop_impl"] == "reconstructed"
    assert meta["steps"] == 400
    assert meta["optimal_performance"] > 0


def test_config_text_parsing():
    values = parse_config_text(
        """
        # comment
        env = chain
        env.length = 4   # trailing comment
        env.gates = 1,2,2
        agent.gamma = 0.5
        arms = qlearning , time_hopping
        """
    )
    assert values["env.length"] == 4
    assert values["env.gates"] == (1, 2, 2)
    assert values["agent.gamma"] == 0.5
    assert values["arms"] == ("qlearning", "time_hopping")


@pytest.mark.parametrize(
    "text,fragment",
    [
        ("bogus = 1", "unknown config key"),
        ("env.length", "expected 'key = value'"),
        ("steps = ten", "bad value for steps"),
    ],
)
def test_config_text_errors(text, fragment):
    with pytest.raises(ConfigError, match=fragment):
        parse_config_text(text)


@pytest.mark.parametrize(
    "overrides,fragment",
    [
        ({"env": "pendulum"}, "env"),
        ({"arms": ()}, "arms"),
        ({"arms": ("sarsa",)}, "sarsa"),
        ({"reps": 0}, "reps"),
        ({"checkpoint_every": 1000, "steps": 10}, "checkpoint_every"),
        ({"env.gates": (1, 2)}, "env.gates"),
    ],
)
def test_config_validation_names_the_field(overrides, fragment):
    values = dict(FAST_CHAIN)
    values.update(overrides)
    with pytest.raises(ConfigError, match=fragment):
        ExperimentConfig(values)


def test_load_config_with_cli_style_overrides(tmp_path):
    path = tmp_path / "exp.cfg"
    path.write_text("env = chain\nenv.length = 5\nenv.gates = 1,2,2,4\nsteps = 100\ncheckpoint_every = 50\n")
    cfg = load_config(str(path), {"steps": "80", "checkpoint_every": "40", "arms": "qlearning"})
    assert cfg["steps"] == 80
    assert cfg["arms"] == ("qlearning",)


def test_qvalue_distribution():
    q = QTable(4, 2)
    assert list(qvalue_distribution(q, [])) == []
    q.set(0, 0, 1.0)
    q.set(1, 1, 3.0)
    q.set(2, 0, 2.0)
    assert list(qvalue_distribution(q, [0, 1, 2])) == [3.0, 2.0, 1.0]


def test_qtable_save_load_roundtrip(tmp_path):
    q = QTable(5, 3)
    q.values = np.random.default_rng(0).normal(size=(5, 3))
    path = tmp_path / "table.npz"
    save_qtable(path, q, [0, 2, 4])
    loaded, explored = load_qtable(path)
    assert loaded.equals(q)
    assert list(explored) == [0, 2, 4]


def run_cli(*argv):
    return main(list(argv))


def test_cli_run_and_artifacts(tmp_path):
    out = tmp_path / "r.csv"
    code = run_cli(
        "run",
        "--env", "chain",
        "--env.length", "5",
        "--env.gates", "1,2,2,4",
        "--steps", "300",
        "--checkpoint_every", "100",
        "--reps", "2",
        "--arm", "qlearning",
        "--arm", "time_hopping",
        "--out", str(out),
        "--save-qtables", str(tmp_path / "tables"),
        "--qdist-out", str(tmp_path / "qdist.csv"),
    )
    assert code == 0
    header, rows = read_rows(out)
    assert header == RAW_HEADER
    assert len(rows) == 2 * 2 * 3
    assert (tmp_path / "tables" / "qlearning-s1.npz").exists()
    qdist_lines = (tmp_path / "qdist.csv").read_text().splitlines()
    assert qdist_lines[0] == "arm,seed,rank,max_q"
    assert len(qdist_lines) > 1


def test_cli_distribution_roundtrip(tmp_path):
    out = tmp_path / "r.csv"
    run_cli(
        "run", "--env", "chain", "--env.length", "5", "--env.gates", "1,2,2,4",
        "--steps", "100", "--checkpoint_every", "100", "--reps", "1",
        "--arm", "qlearning", "--out", str(out),
        "--save-qtables", str(tmp_path / "tables"),
    )
    dist = tmp_path / "dist.csv"
    code = run_cli("distribution", "--qtable", str(tmp_path / "tables" / "qlearning-s1.npz"), "--out", str(dist))
    assert code == 0
    lines = dist.read_text().splitlines()
    assert lines[0] == "rank,max_q"
    values = [float(line.split(",")[1]) for line in lines[1:]]
    assert values == sorted(values, reverse=True)


def test_cli_oracle(capsys):
    code = run_cli("oracle", "--env", "chain", "--env.length", "5", "--env.gates", "1,2,2,4")
    assert code == 0
    out = capsys.readouterr().out
    assert "optimal_avg_reward_per_step=" in out
    assert "states=20" in out


def test_cli_dump_graph(tmp_path):
    path = tmp_path / "graph.csv"
    code = run_cli(
        "dump-graph", "--env", "chain", "--env.length", "5", "--env.gates", "1,2,2,4",
        "--walk-steps", "200", "--graph-out", str(path),
    )
    assert code == 0
    lines = path.read_text().splitlines()
    assert lines[0] == "from,action,reward,to"
    assert len(lines) > 10


def test_cli_exit_codes(tmp_path, capsys):
    bad_cfg = tmp_path / "bad.cfg"
    bad_cfg.write_text("bogus = 1\n")
    assert run_cli("run", "--config", str(bad_cfg)) == 2
    assert "config error" in capsys.readouterr().err

    assert run_cli("run", "--steps", "nope") == 2

    missing_dir = tmp_path / "no" / "such" / "dir" / "out.csv"
    code = run_cli(
        "run", "--env", "chain", "--env.length", "5", "--env.gates", "1,2,2,4",
        "--steps", "100", "--checkpoint_every", "100", "--reps", "1",
        "--arm", "qlearning", "--out", str(missing_dir),
    )
    assert code == 3
    assert "i/o error" in capsys.readouterr().err


def test_console_entry_point_works():
    proc = subprocess.run(
        [sys.executable, "-m", "hoprl", "oracle", "--env", "chain",
         "--env.length", "5", "--env.gates", "1,2,2,4"],
        capture_output=True,
        text=True,
    )
    assert proc.returncode == 0
    assert "optimal_avg_reward_per_step=" in proc.stdout
