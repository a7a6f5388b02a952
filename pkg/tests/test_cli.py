import io
import json

import pytest

from adomit.cli import main


def run(argv):
    out = io.StringIO()
    code = main([str(a) for a in argv], out=out)
    return code, out.getvalue()


@pytest.fixture
def jump_map(tmp_path):
    p = tmp_path / "jump.txt"
    p.write_text("0\t0\n1000\t1000\n1553\t1000\n2553\t2000\n")
    return p


@pytest.fixture
def diagonal_map(tmp_path):
    p = tmp_path / "diag.txt"
    p.write_text("".join(f"{k * 100}\t{k * 110}\n" for k in range(11)))
    return p


@pytest.fixture
def clean_config(tmp_path):
    p = tmp_path / "clean.json"
    p.write_text(json.dumps({
        "width": 100000, "count": 10, "trials": 3, "seed": 4, "threshold_degrees": 15,
        "noise": {"interfere_prob": 0, "interfere_count": 0, "jitter_sigma": 0, "spurious_rate": 0},
    }))
    return p


def test_validate_ok(jump_map):
    code, out = run(["validate", "--map", jump_map, "--width", 2553, "--height", 2000])
    assert code == 0 and "4 points" in out


def test_validate_needs_dimensions(jump_map):
    code, _ = run(["validate", "--map", jump_map])
    assert code == 1
    code, out = run(["validate", "--map", jump_map, "--fit-space"])
    assert code == 0 and "2553 x 2000" in out


def test_validate_monotonicity_error(tmp_path, capsys):
    p = tmp_path / "bad.txt"
    p.write_text("0\t5\n3\t2\n")
    code, _ = run(["validate", "--map", p, "--width", 10, "--height", 10])
    err = capsys.readouterr().err
    assert code == 2
    assert "(0, 5)" in err and "(3, 2)" in err


def test_validate_parse_error_line(tmp_path, capsys):
    p = tmp_path / "bad.txt"
    p.write_text("0\t0\n# c\n1 2\n")
    code, _ = run(["validate", "--map", p, "--fit-space"])
    assert code == 2
    assert f"{p}:3:" in capsys.readouterr().err


def test_validate_empty_and_missing(tmp_path, capsys):
    p = tmp_path / "empty.txt"
    p.write_text("# nothing\n")
    assert run(["validate", "--map", p, "--fit-space"])[0] == 2
    assert "no points" in capsys.readouterr().err
    assert run(["validate", "--map", tmp_path / "nope.txt", "--fit-space"])[0] == 2
    assert "No such file" in capsys.readouterr().err


def test_detect_clean_diagonal_is_empty(diagonal_map):
    code, out = run(["detect", "--map", diagonal_map, "--width", 1000, "--height", 1100])
    assert code == 0 and out == ""


def test_detect_single_jump(jump_map):
    code, out = run(["detect", "--map", jump_map, "--fit-space", "--threshold-degrees", 37])
    assert code == 0
    lines = out.splitlines()
    assert len(lines) == 1
    assert "(1000, 1000) to (1553, 1000)" in lines[0] and "length 553" in lines[0]


def test_detect_records(jump_map):
    code, out = run(["detect", "--map", jump_map, "--fit-space", "--format", "records", "--method", "basic"])
    rec = json.loads(out)
    assert rec["rank"] == 1 and rec["length"] == 553 and rec["method"] == "basic"
    assert rec["threshold_degrees"] == 37.0


def test_detect_both_axes(tmp_path):
    p = tmp_path / "m.txt"
    p.write_text("0\t0\n500\t500\n1053\t500\n1200\t647\n1201\t947\n1500\t1246\n")
    code, out = run(["detect", "--map", p, "--fit-space", "--axis", "both", "--format", "records"])
    assert code == 0
    axes = [json.loads(line)["axis"] for line in out.splitlines()]
    assert axes == ["translation", "original"]


def test_detect_bad_threshold(jump_map):
    assert run(["detect", "--map", jump_map, "--fit-space", "--threshold-degrees", 90])[0] == 1
    assert run(["detect", "--map", jump_map, "--fit-space", "--method", "magic"])[0] == 1


def test_detect_threshold_above_diagonal(tmp_path, capsys):
    # the diagonal of a 2000 x 200 space is under 6 degrees, so 37 is too steep
    p = tmp_path / "flat.txt"
    p.write_text("0\t0\n1000\t100\n1100\t100\n2000\t200\n")
    assert run(["detect", "--map", p, "--fit-space", "--method", "basic"])[0] == 0
    assert run(["detect", "--map", p, "--fit-space", "--method", "adomit"])[0] == 2
    assert "threshold" in capsys.readouterr().err


def test_detect_figure(jump_map, tmp_path):
    fig = tmp_path / "map.png"
    code, _ = run(["detect", "--map", jump_map, "--fit-space", "--figure", fig])
    assert code == 0 and fig.stat().st_size > 0


def test_evaluate_clean_recall(clean_config):
    code, out = run(["evaluate", "--config", clean_config, "--format", "records"])
    assert code == 0
    records = [json.loads(line) for line in out.splitlines()]
    summaries = [r for r in records if r.get("type") == "summary"]
    assert len(summaries) == 2 * 2 * 3
    assert all(r["mean_recall"] == 1.0 for r in summaries)
    trials = [r for r in records if r.get("type") == "trial"]
    assert len(trials) == 2 * 2 * 3
    assert all(set(r["pattern"]) == {"T"} for r in trials)


def test_evaluate_text_blocks(clean_config):
    code, out = run(["evaluate", "--config", clean_config])
    assert code == 0
    assert out.count("method basic") == 2 and out.count("method adomit") == 2


def test_evaluate_single_trial_flagged(clean_config):
    code, out = run(["evaluate", "--config", clean_config, "--trials", 1])
    assert code == 0 and "single trial" in out
    code, out = run(["evaluate", "--config", clean_config, "--trials", 1, "--format", "records"])
    summaries = [json.loads(l) for l in out.splitlines() if '"summary"' in l]
    assert all(r["ci_degenerate"] and r["ci_low"] is None for r in summaries)


def test_evaluate_bad_config(tmp_path):
    p = tmp_path / "c.json"
    p.write_text('{"trails": 3}')
    assert run(["evaluate", "--config", p])[0] == 2
    p.write_text("[1, 2")
    assert run(["evaluate", "--config", p])[0] == 2


def test_evaluate_deterministic_and_figures(clean_config, tmp_path):
    a = run(["evaluate", "--config", clean_config, "--figures", tmp_path / "a"])
    b = run(["evaluate", "--config", clean_config, "--figures", tmp_path / "b"])
    assert a == b
    names = sorted(p.name for p in (tmp_path / "a").iterdir())
    assert names == sorted(p.name for p in (tmp_path / "b").iterdir())
    assert any(n.startswith("recall_") for n in names)
    for n in names:
        assert (tmp_path / "a" / n).read_bytes() == (tmp_path / "b" / n).read_bytes()


def test_sweep_single_threshold_matches_evaluate(clean_config):
    _, ev = run(["evaluate", "--config", clean_config, "--format", "records"])
    code, sw = run(["sweep", "--config", clean_config, "--thresholds", "15", "--format", "records"])
    assert code == 0
    def payload(text, kind):
        recs = [json.loads(line) for line in text.splitlines()]
        return [{k: v for k, v in r.items() if k != "type"} for r in recs if r["type"] == kind]

    assert payload(ev, "summary") == payload(sw, "sweep")


def test_sweep_requires_thresholds(clean_config):
    assert run(["sweep", "--config", clean_config, "--thresholds", ""])[0] == 1
    assert run(["sweep", "--config", clean_config])[0] == 1


def test_sweep_text(clean_config):
    code, out = run(["sweep", "--config", clean_config, "--thresholds", "10,15"])
    assert code == 0
    assert "10" in out and "15" in out
