"""End-to-end tests for the bmglab command line interface.

Each subcommand is driven through cli.main(argv) and judged on its exit
code, its CSV output (header provenance lines, column row, data rows), and
its stderr notes.
"""

import csv
import re

import pytest

from bmglab import cli
from bmglab.cli import (
    EXIT_CHECK_FAILED,
    EXIT_CONFIG,
    EXIT_OK,
    _parse_int_list,
    _parse_seeds,
    main,
)
from bmglab.engine import TRANSCRIPT_COLUMNS

HEADER_RE = re.compile(r"^# bmglab (?P<cmd>[a-z-]+) schema=v1 config=(?P<hash>[0-9a-f]{12})$")


def read_csv_file(path):
    """Returns (header comment lines, column row, data rows)."""
    lines = path.read_text().splitlines()
    comments = [l for l in lines if l.startswith("#")]
    body = [l for l in lines if not l.startswith("#") and l.strip()]
    rows = list(csv.reader(body))
    return comments, rows[0], rows[1:]


def check_header(comments, command):
    match = HEADER_RE.match(comments[0])
    assert match, comments[0]
    assert match.group("cmd") == command
    keys = [line[2:].split("=", 1)[0] for line in comments[1:]]
    assert keys == sorted(keys)
    return match.group("hash")


# =============================================================================
# Spec parsing helpers
# =============================================================================


def test_parse_seeds_forms():
    assert _parse_seeds("0:5") == [0, 1, 2, 3, 4]
    assert _parse_seeds("3,5,9") == [3, 5, 9]
    assert _parse_seeds("7") == [7]
    assert _parse_seeds(" 2 : 4 ".replace(" ", "")) == [2, 3]
    with pytest.raises(ValueError, match="empty seed range"):
        _parse_seeds("5:5")


def test_parse_int_list_accepts_commas_and_spaces():
    assert _parse_int_list("1,2 3") == [1, 2, 3]
    assert _parse_int_list("4") == [4]
    assert _parse_int_list("") == []


# =============================================================================
# simulate
# =============================================================================


def test_simulate_writes_transcript_csv(tmp_path):
    out = tmp_path / "sim.csv"
    code = main(
        [
            "simulate",
            "--game", "speeding",
            "--defender", "fixed:1",
            "--adversary", "a1",
            "--rounds", "7",
            "--seed", "0",
            "--k", "7",
            "--out", str(out),
            "--check",
        ]
    )
    assert code == EXIT_OK
    comments, columns, rows = read_csv_file(out)
    check_header(comments, "simulate")
    assert tuple(columns) == tuple(TRANSCRIPT_COLUMNS)
    assert len(rows) == 7
    assert [r[0] for r in rows] == ["0", "1", "2", "3", "4", "5", "6"]
    # the all-fast-lane driver gets ticketed after the first day
    assert [float(r[-1]) for r in rows] == [1.0] + [0.2] * 6


def test_simulate_stdout_and_stderr_note(capsys):
    code = main(
        [
            "simulate",
            "--game", "tiny",
            "--defender", "script:0,1",
            "--adversary", "seq:1,0",
            "--rounds", "4",
            "--seed", "3",
        ]
    )
    captured = capsys.readouterr()
    assert code == EXIT_OK
    first = captured.out.splitlines()[0]
    assert HEADER_RE.match(first)
    assert "simulate: 4 rounds" in captured.err


def test_simulate_config_hash_tracks_parameters(tmp_path):
    def header_for(seed):
        out = tmp_path / f"h{seed}.csv"
        argv = [
            "simulate", "--game", "tiny", "--defender", "fixed:0",
            "--adversary", "seq:0", "--rounds", "3", "--seed", str(seed),
            "--out", str(out),
        ]
        assert main(argv) == EXIT_OK
        comments, _, _ = read_csv_file(out)
        return check_header(comments, "simulate")

    assert header_for(1) == header_for(1)
    assert header_for(1) != header_for(2)


def test_simulate_adversary_script_file(tmp_path):
    script = tmp_path / "adv.txt"
    script.write_text("1 0 1 0\n")
    out = tmp_path / "out.csv"
    code = main(
        [
            "simulate",
            "--game", "tiny",
            "--defender", "fixed:0",
            "--adversary", f"script:{script}",
            "--rounds", "8",
            "--out", str(out),
        ]
    )
    assert code == EXIT_OK
    _, _, rows = read_csv_file(out)
    adversary_actions = [int(r[3]) for r in rows]
    assert adversary_actions == [1, 0, 1, 0, 1, 0, 1, 0]


@pytest.mark.parametrize(
    "argv",
    [
        # unknown names in every spec position
        ["simulate", "--game", "nosuch.json", "--defender", "fixed:0",
         "--adversary", "a1", "--rounds", "3"],
        ["simulate", "--game", "tiny", "--defender", "mystery",
         "--adversary", "a1", "--rounds", "3"],
        ["simulate", "--game", "tiny", "--defender", "fixed:0",
         "--adversary", "mystery", "--rounds", "3"],
        ["simulate", "--game", "tiny", "--defender", "block-exp3",
         "--adversary", "a1", "--experts", "mystery", "--rounds", "3"],
        # block-exp3 without experts
        ["simulate", "--game", "tiny", "--defender", "block-exp3",
         "--adversary", "a1", "--rounds", "3"],
        # fixed table of the wrong length for the game
        ["simulate", "--game", "speeding:3", "--defender", "fixed:0,1,0",
         "--adversary", "a1", "--rounds", "3"],
    ],
)
def test_simulate_config_errors_exit_2(argv, capsys):
    assert main(argv) == EXIT_CONFIG
    assert "error:" in capsys.readouterr().err


def test_missing_required_argument_is_an_argparse_error():
    with pytest.raises(SystemExit):
        main(["simulate", "--game", "tiny"])


# =============================================================================
# regret-curve
# =============================================================================


def test_regret_curve_rows_and_decreasing_check(tmp_path):
    out = tmp_path / "curve.csv"
    code = main(
        [
            "regret-curve",
            "--game", "tiny",
            "--learner", "exp3",
            "--adversary", "seq:0",
            "--experts", "all-fixed",
            "--rounds", "50,2000",
            "--seeds", "0:8",
            "--k", "0",
            "--samples", "50",
            "--out", str(out),
            "--check",
        ]
    )
    assert code == EXIT_OK
    comments, columns, rows = read_csv_file(out)
    check_header(comments, "regret-curve")
    assert columns[:3] == ["learner", "horizon", "seed"]
    # 8 seed rows plus one mean row per horizon
    assert len(rows) == 2 * 9
    mean_rows = [r for r in rows if r[2] == "mean"]
    assert len(mean_rows) == 2
    means = [float(r[8]) for r in mean_rows]
    assert means[1] < means[0]
    seed_rows = [r for r in rows if r[2] != "mean"]
    assert all(r[9] in ("exact", "monte-carlo") for r in seed_rows)


def test_regret_curve_flat_curve_fails_check(tmp_path, capsys):
    out = tmp_path / "flat.csv"
    code = main(
        [
            "regret-curve",
            "--game", "tiny",
            "--learner", "exp3",
            "--adversary", "seq:0",
            "--experts", "all-fixed",
            "--rounds", "100,100",
            "--seeds", "0:3",
            "--k", "0",
            "--samples", "50",
            "--out", str(out),
            "--check",
        ]
    )
    assert code == EXIT_CHECK_FAILED
    assert "check failed" in capsys.readouterr().err
    # the CSV is still written before the check runs
    comments, _, rows = read_csv_file(out)
    check_header(comments, "regret-curve")
    assert len(rows) == 2 * 4


def test_regret_curve_empty_seed_range_exit_2(capsys):
    code = main(
        [
            "regret-curve",
            "--game", "tiny",
            "--learner", "exp3",
            "--adversary", "seq:0",
            "--experts", "all-fixed",
            "--rounds", "50",
            "--seeds", "5:5",
        ]
    )
    assert code == EXIT_CONFIG
    assert "empty seed range" in capsys.readouterr().err


# =============================================================================
# hardness-demo
# =============================================================================


def test_hardness_demo_honest_random_planted(tmp_path, capsys):
    out = tmp_path / "hard.csv"
    code = main(
        [
            "hardness-demo",
            "--vars", "5",
            "--n-clauses", "12",
            "--phases", "20",
            "--defender", "honest",
            "--seed", "4",
            "--out", str(out),
            "--check",
        ]
    )
    assert code == EXIT_OK
    err = capsys.readouterr().err
    assert "mean phase payoff 1" in err
    assert "best fraction 1" in err
    comments, columns, rows = read_csv_file(out)
    check_header(comments, "hardness-demo")
    assert columns == ["phase", "clause", "raw_payoff", "fraction", "best_fraction"]
    assert len(rows) == 20
    assert all(r[2] == "1" for r in rows)  # honest play earns +1 per phase
    assert float(rows[-1][4]) == 1.0


def test_hardness_demo_cnf_file_with_assignment(tmp_path):
    cnf_path = tmp_path / "f.cnf"
    cnf_path.write_text("p cnf 3 3\n1 2 -3 0\n-1 -2 3 0\n1 -2 3 0\n")
    out = tmp_path / "hard.csv"
    code = main(
        [
            "hardness-demo",
            "--cnf", str(cnf_path),
            "--phases", "10",
            "--defender", "assignment:1,0,0",
            "--seed", "0",
            "--out", str(out),
            "--check",
        ]
    )
    assert code == EXIT_OK
    _, _, rows = read_csv_file(out)
    assert len(rows) == 10
    # (1,0,0) satisfies all three clauses, so every phase recovers 1.0
    assert all(float(r[3]) == 1.0 for r in rows)


def test_hardness_demo_honest_needs_assignment_for_files(tmp_path, capsys):
    cnf_path = tmp_path / "f.cnf"
    cnf_path.write_text("p cnf 3 1\n1 2 -3 0\n")
    code = main(["hardness-demo", "--cnf", str(cnf_path), "--defender", "honest"])
    assert code == EXIT_CONFIG
    assert "needs --assignment" in capsys.readouterr().err


def test_hardness_demo_unknown_defender_exit_2(capsys):
    code = main(["hardness-demo", "--defender", "mystery", "--phases", "2"])
    assert code == EXIT_CONFIG
    assert "unknown hardness defender" in capsys.readouterr().err


# =============================================================================
# counterexample-demo
# =============================================================================


def test_counterexample_demo_grid(tmp_path, capsys):
    out = tmp_path / "ce.csv"
    code = main(
        [
            "counterexample-demo",
            "--rounds", "200",
            "--seed", "0",
            "--samples", "50",
            "--out", str(out),
            "--check",
        ]
    )
    assert code == EXIT_OK
    err = capsys.readouterr().err
    assert "check ok" in err
    comments, columns, rows = read_csv_file(out)
    check_header(comments, "counterexample-demo")
    assert len(rows) == 6  # 3 defenders x 2 environments
    grid = {(r[0], r[1]): float(r[6]) for r in rows}
    assert grid[("always-enter", "always-block")] == pytest.approx(0.5)
    assert grid[("always-enter", "allow-once")] == pytest.approx(0.0)
    # every defender is made to regret >= 0.2 in some environment
    for name in ("always-enter", "always-stay", "exp3"):
        worst = max(grid[(name, env)] for env in ("always-block", "allow-once"))
        assert worst >= 0.2


# =============================================================================
# samp-check
# =============================================================================


def test_samp_check_law_agreement(tmp_path, capsys):
    out = tmp_path / "samp.csv"
    code = main(
        [
            "samp-check",
            "--updates", "5",
            "--draws", "20000",
            "--eta", "0.5",
            "--seed", "1",
            "--out", str(out),
            "--check",
        ]
    )
    assert code == EXIT_OK
    assert "check ok" in capsys.readouterr().err
    comments, columns, rows = read_csv_file(out)
    check_header(comments, "samp-check")
    assert columns == [
        "root", "tree", "actions", "sampler_prob", "weight_prob", "empirical_prob"
    ]
    roots = {r[0] for r in rows}
    trees_per_root = len(rows) // len(roots)
    assert len(rows) == len(roots) * trees_per_root
    for root in roots:
        probs = [float(r[3]) for r in rows if r[0] == root]
        assert sum(probs) == pytest.approx(1.0, abs=1e-9)
        for row in rows:
            if row[0] == root:
                assert float(row[3]) == pytest.approx(float(row[4]), abs=1e-9)
