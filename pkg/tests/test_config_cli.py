import csv
import json
import math

import pytest

from frame_transport.cli import main, run
from frame_transport.config import ConfigError, parse_config, parse_mix_spec, parse_pair_spec

CONE = "scenario=su2_cone\ntheta=1.0471975512\nomega=1.0\ndt=0.001\n"
RANDOM3 = "scenario=random_horizontal\nn=3\nseed=42\nK=3\nT=10\ndt=0.005\npairs=cartan\n"


def test_parse_cone_example():
    cfg = parse_config(CONE)
    assert cfg.scenario == "su2_cone"
    assert cfg.params == {"theta": 1.0471975512, "omega": 1.0}
    assert cfg.dt == 0.001
    assert cfg.pairs == "cartan"


def test_parse_comments_and_defaults():
    cfg = parse_config("# cone\nscenario = su2_cone  # inline\n\ndt=0.01\n")
    assert cfg.params["theta"] == pytest.approx(math.pi / 3)
    assert cfg.formats == ("csv", "json")


def test_echo_round_trip():
    cfg = parse_config(RANDOM3)
    again = parse_config(cfg.to_text())
    assert again.echo() == cfg.echo()
    assert again == cfg


@pytest.mark.parametrize("text, key", [
    ("scenario=su2_cone\ntheta=4.0\ndt=0.01", "theta"),
    ("scenario=su2_cone\ndt=-1", "dt"),
    ("scenario=su2_cone\ndt=abc", "dt"),
    ("scenario=su2_cone\ndt=0.01\nseed=3", "seed"),
    ("scenario=random_horizontal\ndt=0.01\nn=1", "n"),
    ("scenario=random_horizontal\ndt=0.01\nn=2.5", "n"),
    ("scenario=random_horizontal\ndt=0.01\nK=0", "K"),
    ("scenario=random_horizontal\ndt=0.01\nbogus=1", "bogus"),
    ("scenario=warp\ndt=0.01", "scenario"),
    ("scenario=su2_cone\ndt=0.01\npairs=1,5", "pairs"),
    ("scenario=su2_cone\ndt=0.01\nmix=phases:1,2,3", "mix"),
    ("scenario=su2_cone\ndt=0.01\nformat=xml", "format"),
    ("scenario=su2_cone\ndt=0.01\ndt=0.02", "dt"),
    ("scenario=su2_cone\ndt=nan", "dt"),
])
def test_parse_errors_name_key(text, key):
    with pytest.raises(ConfigError) as info:
        parse_config(text)
    assert info.value.key == key
    assert key in str(info.value)


def test_empty_document_lists_required():
    with pytest.raises(ConfigError) as info:
        parse_config("")
    assert "scenario" in str(info.value) and "dt" in str(info.value)


def test_malformed_line():
    with pytest.raises(ConfigError):
        parse_config("scenario su2_cone\n")


def test_pair_and_mix_specs():
    assert parse_pair_spec("all", 3) == "all"
    assert parse_pair_spec("1,2;4,5", 8) == [(0, 1), (3, 4)]
    assert parse_mix_spec("none", 2) is None
    assert parse_mix_spec("rotation", 2) == ("rotation", (math.pi / 2,))
    assert parse_mix_spec("phases:0.1,0.2", 2) == ("phases", (0.1, 0.2))
    assert parse_mix_spec("haar:7", 3) == ("haar", (7,))
    with pytest.raises(ConfigError):
        parse_mix_spec("haar:x", 3)


def write(tmp_path, name, text):
    p = tmp_path / name
    p.write_text(text, encoding="utf-8")
    return p


def test_cli_cone_default(tmp_path, capsys):
    cfg = write(tmp_path, "cone.cfg", CONE + "mix=rotation\n")
    out = tmp_path / "out"
    assert main(["run", str(cfg), "--out", str(out)]) == 0
    summary = json.loads((out / "summary.json").read_text())
    assert summary["passed"] and all(summary["checks"].values())
    assert len(summary["holonomy"]["phases"]) == 2
    assert summary["holonomy"]["phases"] == pytest.approx([-math.pi / 2, math.pi / 2], abs=1e-5)
    assert summary["nonlinearity_defect"] > 1e-2
    with open(out / "frames.csv") as fh:
        rows = list(csv.reader(fh))
    assert rows[0] == ["t", "a", "e_1", "e_2", "e_3"]
    assert len(rows) == 1 + 3 * (summary["values"]["steps"] + 1)
    assert all(len(r) == 5 for r in rows)
    with open(out / "defects.csv") as fh:
        header = next(csv.reader(fh))
    assert header == ["t", "a", "b", "defect_commutator", "defect_fd"]
    assert "all checks passed" in capsys.readouterr().out


def test_cli_random_cartan(tmp_path):
    cfg = write(tmp_path, "r3.cfg", RANDOM3)
    report = run(parse_config(RANDOM3), out_dir=tmp_path / "o", formats=("json",))
    assert report.ok
    assert report.defects and all(d["cartan"] for d in report.defects)
    assert max(d["max_abs_commutator"] for d in report.defects) <= 1e-9
    assert not (tmp_path / "o" / "frames.csv").exists()
    assert main(["run", str(cfg), "--out", str(tmp_path / "o2"), "--format", "json"]) == 0


def test_cli_coarse_fails_convergence(tmp_path, capsys):
    cfg = write(tmp_path, "coarse.cfg", "scenario=su2_cone\ndt=0.5\n")
    assert main(["run", str(cfg), "--out", str(tmp_path / "o")]) == 1
    assert "convergence" in capsys.readouterr().err
    summary = json.loads((tmp_path / "o" / "summary.json").read_text())
    assert summary["checks"]["convergence"] is False
    assert summary["passed"] is False


def test_cli_config_error_exit(tmp_path, capsys):
    cfg = write(tmp_path, "bad.cfg", "scenario=su2_cone\ntheta=4.0\ndt=0.01\n")
    assert main(["run", str(cfg), "--out", str(tmp_path / "o")]) == 2
    assert "theta" in capsys.readouterr().err


def test_cli_deterministic_outputs(tmp_path):
    text = "scenario=random_horizontal\nn=3\nseed=5\nK=2\nT=2\ndt=0.01\npairs=all\nmix=haar:3\n"
    cfg = write(tmp_path, "r.cfg", text)
    for d in ("a", "b"):
        assert main(["run", str(cfg), "--out", str(tmp_path / d)]) in (0, 1)
    for name in ("frames.csv", "defects.csv", "summary.json"):
        assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()


def test_cli_pairs_override(tmp_path):
    cfg = write(tmp_path, "r.cfg", "scenario=random_horizontal\nn=3\nseed=1\nT=1\ndt=0.01\n")
    out = tmp_path / "o"
    main(["run", str(cfg), "--out", str(out), "--pairs", "1,4;4,5"])
    summary = json.loads((out / "summary.json").read_text())
    assert [(d["a"], d["b"]) for d in summary["defects"]] == [(1, 4), (4, 5)]
    assert [d["cartan"] for d in summary["defects"]] == [False, True]
    assert summary["defects"][0]["max_abs_commutator"] > 1e-3
    assert summary["config"]["pairs"] == "1,4;4,5"


def test_cli_batch(tmp_path):
    a = write(tmp_path, "one.cfg", "scenario=su2_cone\ndt=0.01\n")
    b = write(tmp_path, "two.cfg", "scenario=random_horizontal\nT=1\ndt=0.01\n")
    out = tmp_path / "batch"
    assert main(["run", str(a), str(b), "--batch", "--out", str(out)]) == 0
    assert (out / "one" / "summary.json").exists()
    assert (out / "two" / "summary.json").exists()


def test_cli_requires_batch_for_many(tmp_path):
    a = write(tmp_path, "one.cfg", "scenario=su2_cone\ndt=0.01\n")
    with pytest.raises(SystemExit):
        main(["run", str(a), str(a)])
