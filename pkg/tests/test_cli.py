import csv
import io
import json

import jsonschema
import pytest

from hqdetect.cli import main, parse_config_text, schema
from hqdetect.errors import ConfigError
from hqdetect.pipeline import ConstantHead
from hqdetect.serialize import save_model
from hqdetect.telemetry import FEATURES

FAST = "n = 300\nseed = 3\nrf_trees = 8\nrf_depth = 6\nplots = {plots}\n"


def run(argv):
    buf = io.StringIO()
    code = main([str(a) for a in argv], stdout=buf)
    return code, buf.getvalue()


def write_config(tmp_path, extra="", plots=False, name="exp.cfg"):
    p = tmp_path / name
    p.write_text(FAST.format(plots=str(plots).lower()) + extra)
    return p


def read_rows(path):
    with open(path, newline="") as fh:
        return list(csv.reader(fh))


# -- gen ---------------------------------------------------------------------

def test_gen_balanced(tmp_path):
    out = tmp_path / "t.csv"
    code, text = run(["gen", "--n", 600, "--seed", 7, "--out", out])
    assert code == 0
    rows = read_rows(out)
    assert len(rows) == 601
    labels = [r[rows[0].index("attack_class")] for r in rows[1:]]
    assert all(labels.count(str(k)) == 100 for k in range(6))
    assert "Normal,100" in text


def test_gen_too_few_rows(tmp_path):
    code, _ = run(["gen", "--n", 3, "--out", tmp_path / "t.csv"])
    assert code == 2


# -- config ------------------------------------------------------------------

def test_config_diagnostics(tmp_path, capsys):
    cfg = tmp_path / "bad.cfg"
    cfg.write_text("n = 100\n\nbogus = 1\n")
    code, _ = run(["train-eval", "--config", cfg, "--out", tmp_path / "r"])
    assert code == 2
    err = capsys.readouterr().err
    assert "line 3" in err and "bogus" in err


def test_config_parse_errors():
    with pytest.raises(ConfigError) as e:
        parse_config_text("split = half\n")
    assert e.value.field == "split" and e.value.line == 1
    with pytest.raises(ConfigError):
        parse_config_text("n = 1\nn = 2\n")
    assert parse_config_text("layers = 1, 3  # comment\n")["layers"] == (1, 3)


def test_invalid_split_exits_2(tmp_path):
    code, _ = run(["train-eval", "--config", write_config(tmp_path), "--split", 1.0, "--out", tmp_path / "r"])
    assert code == 2


# -- train-eval --------------------------------------------------------------

def test_layer3_sweep_arity_schema_and_determinism(tmp_path):
    cfg = write_config(tmp_path, "layers = 3\nencodings = none, partial, full\n", plots=True)
    code, text = run(["train-eval", "--config", cfg, "--out", tmp_path / "a"])
    assert code == 0
    runs = sorted(p.parent.name for p in (tmp_path / "a").glob("*/metrics.json"))
    assert runs == ["L3_full_serial_rf", "L3_none_serial_rf", "L3_partial_serial_rf"]
    assert len(text.strip().splitlines()) == 4
    for name in runs:
        m = json.loads((tmp_path / "a" / name / "metrics.json").read_text())
        jsonschema.validate(m, schema("metrics"))
        assert m["auc"] is None
        assert (tmp_path / "a" / name / "confusion.png").stat().st_size > 0
    assert (tmp_path / "a" / "summary.png").exists()

    run(["train-eval", "--config", cfg, "--out", tmp_path / "b"])
    for name in runs:
        for f in ("metrics.json", "confusion.csv", "model.json", "confusion.png"):
            assert (tmp_path / "a" / name / f).read_bytes() == (tmp_path / "b" / name / f).read_bytes()
    assert (tmp_path / "a" / "summary.csv").read_bytes() == (tmp_path / "b" / "summary.csv").read_bytes()


def test_binary_run_has_auc(tmp_path):
    cfg = write_config(tmp_path, "layers = 2\n", plots=True)
    assert run(["train-eval", "--config", cfg, "--out", tmp_path / "r"])[0] == 0
    m = json.loads((tmp_path / "r" / "L2_none_serial_rf" / "metrics.json").read_text())
    assert m["n_classes"] == 2 and 0.0 <= m["auc"] <= 1.0
    assert (tmp_path / "r" / "L2_none_serial_rf" / "roc.png").exists()


def test_threads_do_not_change_results(tmp_path, monkeypatch):
    cfg = write_config(tmp_path, "layers = 1, 2\nheads = rf, mlp\nmlp_epochs = 3\n")
    run(["train-eval", "--config", cfg, "--out", tmp_path / "one"])
    monkeypatch.setenv("HQDETECT_THREADS", "3")
    run(["train-eval", "--config", cfg, "--out", tmp_path / "many"])
    for p in (tmp_path / "one").glob("*/metrics.json"):
        assert p.read_bytes() == (tmp_path / "many" / p.parent.name / "metrics.json").read_bytes()


def test_missing_csv_exits_3(tmp_path):
    cfg = write_config(tmp_path, f"source = csv\ndata = {tmp_path / 'nope.csv'}\n")
    assert run(["train-eval", "--config", cfg, "--out", tmp_path / "r"])[0] == 3


# -- pipeline ----------------------------------------------------------------

def test_stub_pipeline_wiring(tmp_path):
    paths = {}
    for name, head in (("l1", ConstantHead([0.0, 1.0])), ("l2", ConstantHead([1.0, 0.0])),
                       ("l3", ConstantHead([1 / 6] * 6))):
        paths[name] = tmp_path / f"{name}.json"
        save_model(head, paths[name])
    cfg = write_config(tmp_path, "".join(f"{k}_model = {v}\n" for k, v in paths.items()), plots=True)
    code, text = run(["pipeline", "--config", cfg, "--out", tmp_path / "p"])
    assert code == 0
    assert "L2-clear,300" in text and "total,300" in text
    rows = [json.loads(line) for line in (tmp_path / "p" / "outcomes.jsonl").read_text().splitlines()]
    assert len(rows) == 300
    assert all(r["final_label"] == 0 and r["stage"] == "L2-clear" for r in rows)
    summary = json.loads((tmp_path / "p" / "summary.json").read_text())
    assert sum(summary["stage_counts"].values()) == 300
    assert (tmp_path / "p" / "stages.png").exists()


def test_pipeline_missing_model_exits_3(tmp_path):
    cfg = write_config(tmp_path, "".join(f"l{i}_model = {tmp_path / 'x.json'}\n" for i in (1, 2, 3)))
    assert run(["pipeline", "--config", cfg, "--out", tmp_path / "p"])[0] == 3


# -- export-latent -----------------------------------------------------------

@pytest.mark.parametrize("enc, width", [("full", 7), ("none", 11)])
def test_export_latent_widths(tmp_path, enc, width):
    out = tmp_path / "z.csv"
    code, _ = run(["export-latent", "--n", 60, "--encoding", enc, "--out", out])
    assert code == 0
    rows = read_rows(out)
    assert rows[0] == [f"z_{i}" for i in range(1, width + 1)] + ["attack_class"]
    assert len(rows) == 61


def test_export_latent_empty_dataset(tmp_path):
    data = tmp_path / "empty.csv"
    data.write_text(",".join(list(FEATURES) + ["attack_class"]) + "\n")
    out = tmp_path / "z.csv"
    assert run(["export-latent", "--data", data, "--encoding", "full", "--out", out])[0] == 0
    assert read_rows(out) == [[f"z_{i}" for i in range(1, 8)] + ["attack_class"]]


def test_export_latent_from_trained_model(tmp_path):
    cfg = write_config(tmp_path, "encodings = amplitude3\n")
    run(["train-eval", "--config", cfg, "--out", tmp_path / "r"])
    out = tmp_path / "z.csv"
    model = tmp_path / "r" / "L3_amplitude3_serial_rf" / "model.json"
    assert run(["export-latent", "--n", 60, "--model", model, "--out", out])[0] == 0
    assert len(read_rows(out)[0]) == 7 + 1 + 1  # R readouts, the norm, the label


# -- resources ---------------------------------------------------------------

def test_resources_examples():
    code, text = run(["resources", "--n-proj", 1, "--m-list", "1,2,1"])
    assert code == 0 and "n_copies,93" in text
    code, text = run(["resources", "--m-list", "1,1", "--d-list", "2,2"])
    assert "n_tomography,30" in text
    code, text = run(["resources"])
    assert "n_copies,0" in text and "n_tomography,0" in text


def test_resources_errors(capsys):
    code, _ = run(["resources", "--m-list", "40,1"])
    assert code == 4
    assert "overflow" in capsys.readouterr().err
    with pytest.raises(SystemExit) as e:
        run(["resources", "--m-list", "1,x"])
    assert e.value.code == 2
