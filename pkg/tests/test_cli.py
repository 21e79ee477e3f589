import json
from fractions import Fraction

import pytest

from stackmp import MealyStrategy, parse_game
from stackmp.cli import main
from stackmp.fixtures import FIXTURE_NAMES, build_fixture

from .conftest import TRADEOFF_TEXT, LOOP_TEXT


@pytest.fixture
def tradeoff_path(tmp_path):
    path = tmp_path / "tradeoff.game"
    path.write_text(TRADEOFF_TEXT)
    return str(path)


@pytest.fixture
def loop_path(tmp_path):
    path = tmp_path / "loop.game"
    path.write_text(LOOP_TEXT)
    return str(path)


@pytest.fixture
def strategy_path(tmp_path):
    game = parse_game(TRADEOFF_TEXT)
    sigma = MealyStrategy.memoryless(game, 0, {"v1": "v0", "v2": "v2"})
    path = tmp_path / "sigma.json"
    path.write_text(json.dumps(sigma.to_json()))
    return str(path)


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_solve_text_and_json(capsys, tradeoff_path):
    code, out, _ = run(capsys, "solve", "--game", tradeoff_path, "--vertex", "v0", "--eps", "1/4")
    assert code == 0
    assert "ASV^1/4(v0) = 3/4 (not attained)" in out
    code, out, _ = run(capsys, "solve", "--game", tradeoff_path, "--vertex", "v0", "--eps", "1/4", "--json")
    assert code == 0
    payload = json.loads(out)
    assert payload["value"] == "3/4"
    assert payload["attained"] is False


def test_solve_closed(capsys, tradeoff_path):
    code, out, _ = run(capsys, "solve", "--game", tradeoff_path, "--vertex", "v0", "--closed")
    assert code == 0
    assert "ASV(v0) = 1" in out


def test_threshold_yes_and_certificate(capsys, tmp_path, tradeoff_path):
    cert_file = tmp_path / "cert.json"
    code, out, _ = run(
        capsys,
        "threshold", "--game", tradeoff_path, "--vertex", "v0",
        "--eps", "1/4", "--c", "1/2", "--cert-out", str(cert_file),
    )
    assert code == 0
    assert out.startswith("yes")
    stored = json.loads(cert_file.read_text())
    assert stored["c"] == "1/2"


def test_threshold_no(capsys, tradeoff_path):
    code, out, _ = run(capsys, "threshold", "--game", tradeoff_path, "--vertex", "v0", "--eps", "1/4", "--c", "3/4")
    assert code == 0
    assert out.startswith("no")


def test_witness_command(capsys, loop_path):
    code, out, _ = run(
        capsys, "witness", "--game", loop_path, "--vertex", "a",
        "--eps", "1", "--c", "2", "--target", "5/2",
    )
    assert code == 0
    assert "cycle:  a" in out
    assert "payoffs: (3, 5)" in out


def test_maxeps_with_cross_check(capsys, tradeoff_path):
    code, out, _ = run(capsys, "maxeps", "--game", tradeoff_path, "--vertex", "v0", "--c", "1/2", "--check", "--json")
    assert code == 0
    payload = json.loads(out)
    assert payload["sup_eps"] == "1/2"
    assert payload["bisect"]["sup_eps"] == "1/2"


def test_mlsolve(capsys, tradeoff_path):
    code, out, _ = run(capsys, "mlsolve", "--game", tradeoff_path, "--vertex", "v0", "--eps", "1/4", "--json")
    assert code == 0
    payload = json.loads(out)
    # memoryless Leader either loops at v1 (value 0 via v2) or exits (value 1/2... )
    assert "value" in payload and "strategy" in payload


def test_eval_strategy(capsys, tradeoff_path, strategy_path):
    code, out, _ = run(
        capsys, "eval", "--game", tradeoff_path, "--vertex", "v0",
        "--strategy", strategy_path, "--eps", "1/4", "--json",
    )
    assert code == 0
    payload = json.loads(out)
    assert payload["d_star"] == "1"


def test_robust_writes_csv_and_plot(capsys, tmp_path, tradeoff_path, strategy_path):
    csv_path = tmp_path / "rows.csv"
    plot_path = tmp_path / "margins.svg"
    code, out, _ = run(
        capsys,
        "robust", "--game", tradeoff_path, "--vertex", "v0", "--strategy", strategy_path,
        "--eps", "1/4", "--delta", "1/4", "--samples", "3", "--seed", "5",
        "--csv", str(csv_path), "--plot", str(plot_path), "--json",
    )
    assert code == 0
    payload = json.loads(out)
    assert payload["violations"] == 0
    lines = csv_path.read_text().strip().splitlines()
    assert lines[0].startswith("check,sample,seed")
    assert len(lines) == 7
    assert plot_path.stat().st_size > 0


def test_robust_reports_are_seed_stable(capsys, tradeoff_path, strategy_path):
    _, first, _ = run(
        capsys, "robust", "--game", tradeoff_path, "--vertex", "v0", "--strategy", strategy_path,
        "--eps", "1/4", "--delta", "1/4", "--samples", "4", "--seed", "9", "--json",
    )
    _, second, _ = run(
        capsys, "robust", "--game", tradeoff_path, "--vertex", "v0", "--strategy", strategy_path,
        "--eps", "1/4", "--delta", "1/4", "--samples", "4", "--seed", "9", "--json",
    )
    assert first == second


def test_zerosum_and_zscheck(capsys, tmp_path, tradeoff_path, strategy_path):
    code, out, _ = run(capsys, "zerosum", "--game", tradeoff_path, "--json")
    assert code == 0
    payload = json.loads(out)
    assert payload["values"]["v2"] == "0"
    csv_path = tmp_path / "zs.csv"
    code, out, _ = run(
        capsys, "zscheck", "--game", tradeoff_path, "--strategy", strategy_path,
        "--delta", "1/2", "--samples", "3", "--seed", "2", "--csv", str(csv_path),
    )
    assert code == 0
    assert "violations: 0" in out
    assert csv_path.read_text().startswith("sample,vertex")


def test_badvertex_and_lambda(capsys, tmp_path, tradeoff_path):
    code, out, _ = run(
        capsys, "badvertex", "--game", tradeoff_path, "--vertex", "v1",
        "--c", "0", "--d", "1", "--eps", "1/4",
    )
    assert code == 0 and out.strip() == "bad"
    code, out, _ = run(
        capsys, "badvertex", "--game", tradeoff_path, "--vertex", "v1",
        "--c", "0", "--d", "3", "--eps", "1/4",
    )
    assert code == 0 and out.strip() == "not bad"
    svg = tmp_path / "lambda.svg"
    code, out, _ = run(
        capsys, "lambda", "--game", tradeoff_path, "--vertex", "v1", "--eps", "1/4",
        "--svg", str(svg), "--json",
    )
    assert code == 0
    payload = json.loads(out)
    assert payload["vars"] == ["c", "d"]
    assert svg.stat().st_size > 0


def test_regions_svg(capsys, tmp_path, tradeoff_path):
    svg = tmp_path / "regions.svg"
    code, out, _ = run(
        capsys, "regions", "--game", tradeoff_path, "--vertex", "v0", "--eps", "1/4", "--svg", str(svg)
    )
    assert code == 0
    assert svg.stat().st_size > 0


def test_extend_json(capsys, tradeoff_path):
    code, out, _ = run(capsys, "extend", "--game", tradeoff_path, "--vertex", "v0", "--json")
    assert code == 0
    payload = json.loads(out)
    assert len(payload["vertices"]) == 5


def test_partition_command(capsys, tmp_path):
    out_file = tmp_path / "partition.game"
    code, out, _ = run(capsys, "partition", "--values", "1,2,3", "-o", str(out_file))
    assert code == 0
    game = parse_game(out_file.read_text())
    assert len(game.vertices) == 5


def test_fixture_round_trips(capsys, tmp_path):
    for name in FIXTURE_NAMES:
        out_file = tmp_path / f"{name}.game"
        code, _, _ = run(capsys, "fixtures", name, "-o", str(out_file))
        assert code == 0
        emitted = out_file.read_text()
        assert parse_game(emitted) == build_fixture(name).arena
        # byte-stable emission
        code, _, _ = run(capsys, "fixtures", name, "-o", str(out_file))
        assert out_file.read_text() == emitted


def test_fixture_aliases_resolve(capsys, tmp_path):
    from stackmp.fixtures import FIXTURE_ALIASES

    for alias, target in FIXTURE_ALIASES.items():
        code, out, _ = run(capsys, "fixtures", alias, "--json")
        assert code == 0
        assert json.loads(out)["name"] == target


def test_fixture_fragile_scaling(capsys, tmp_path):
    out_file = tmp_path / "fragile.game"
    code, out, _ = run(
        capsys, "fixtures", "fragile", "--mu", "1", "--iota", "1/8", "-o", str(out_file), "--json"
    )
    assert code == 0
    payload = json.loads(out)
    assert payload["scale"] == 16
    game = parse_game(out_file.read_text())
    loop = next(e for e in game.edges if e.src == "v1")
    assert (loop.w0, loop.w1) == (-32, 15)


def test_domain_error_exit_code(capsys, tmp_path):
    bad = tmp_path / "bad.game"
    bad.write_text("vertex a 0\n")
    code, out, err = run(capsys, "solve", "--game", str(bad), "--vertex", "a", "--eps", "1")
    assert code == 1
    assert "error" in err
    code, out, err = run(capsys, "solve", "--game", str(bad), "--vertex", "a", "--eps", "1", "--json")
    assert code == 1
    assert json.loads(out)["kind"] == "GameFormatError"


def test_guard_exit_code(capsys, tradeoff_path):
    code, _, err = run(
        capsys, "extend", "--game", tradeoff_path, "--vertex", "v0", "--max-ext-vertices", "2"
    )
    assert code == 2
    assert "resource" in err or "exceeded" in err


def test_missing_eps_is_an_argument_error(capsys, tradeoff_path):
    with pytest.raises(SystemExit):
        main(["solve", "--game", tradeoff_path, "--vertex", "v0"])
