import importlib.util
import json
import sys
from pathlib import Path

SCRIPTS = Path(__file__).resolve().parent.parent / "scripts"


def load(name):
    spec = importlib.util.spec_from_file_location(name, SCRIPTS / f"{name}.py")
    mod = importlib.util.module_from_spec(spec)
    sys.modules[name] = mod
    spec.loader.exec_module(mod)
    return mod


def test_series_tables(tmp_path, capsys):
    assert load("series_tables").main(["--max-degree", "7", "--out", str(tmp_path)]) == 0
    rows = json.loads((tmp_path / "series.json").read_text())["rows"]
    assert rows[0]["magroot"] == [1, 1, 2, 7, 28, 121, 550]
    assert (tmp_path / "series.csv").read_text().startswith("S,T,n,mag,magroot\n")


def test_structure_grid(tmp_path, capsys):
    assert load("structure_grid").main(["--max-arity", "3", "--max-degree", "4", "--out", str(tmp_path)]) == 0
    records = json.loads((tmp_path / "grid.json").read_text())
    assert len(records) == 2 * 9 and all(r["compat"] and r["primitives"] for r in records)
