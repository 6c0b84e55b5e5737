import csv
import io
import json
import math
import xml.etree.ElementTree as ET

import pytest

from dehnfill.cli import fmt_num, main, parse_complex, parse_schedule, InputError
from dehnfill.filling import HEXAGON_VERTICES, hexagon_contains

NS = "{http://www.w3.org/2000/svg}"


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def _svg(path):
    root = ET.parse(path).getroot()
    return root, json.loads(root.find(f"{NS}metadata").text)


def test_parse_complex():
    assert parse_complex("0.5+0.5i") == 0.5 + 0.5j
    assert parse_complex("0") == 0
    assert parse_complex("2.0944i") == 2.0944j
    assert parse_complex("-1e-3-2i") == complex(-1e-3, -2)
    for bad in ("", "1+", "abc", "1+2k"):
        with pytest.raises(InputError):
            parse_complex(bad)


def test_parse_schedule():
    assert parse_schedule("0.1,0.5") == [0.1, 0.5]
    assert parse_schedule("0:1:3") == [0.0, 0.5, 1.0]


def test_number_format():
    assert fmt_num(math.inf) == "inf"
    assert fmt_num(-0.0) == "0"
    assert fmt_num(2 * math.pi / 3) == "2.0943951023931953"
    assert fmt_num(None) == ""


def test_moduli_single(capsys):
    code, out, _ = run(capsys, "moduli", "--c", "0.5+0.5i")
    assert code == 0
    recs = json.loads(out)
    assert len(recs) == 1
    r = recs[0]
    assert set(r) == {"c", "omega", "s", "region", "mu", "lambda", "t", "residual"}
    assert r["residual"] < 1e-9
    assert r["c"] == {"re": 0.5, "im": 0.5}
    assert r["omega"]["im"] > 0


def test_moduli_origin(capsys):
    code, out, _ = run(capsys, "moduli", "--c", "0")
    assert code == 0
    r = json.loads(out)[0]
    assert r["mu"] == "inf" and r["lambda"] == "inf" and r["region"] == "ORIGIN"


@pytest.mark.parametrize("value", ["0+3.2i", "0-3.1416i", "nonsense"])
def test_moduli_domain_errors(capsys, value):
    code, _, err = run(capsys, "moduli", f"--c={value}")
    assert code == 2
    assert "error" in err


def test_moduli_grid_all_regions(capsys, tmp_path):
    out = tmp_path / "grid"
    code, _, _ = run(capsys, "moduli", "--grid", "200x200", "--format", "csv", "--out", str(out))
    assert code == 0
    rows = list(csv.DictReader(open(tmp_path / "grid.csv", newline="")))
    assert len(rows) == 40_000
    assert {r["region"] for r in rows} >= {f"C{k}" for k in range(1, 13)}
    assert max(float(r["residual"]) for r in rows) < 1e-9


def test_moduli_deterministic_and_17_digits(capsys):
    a = run(capsys, "moduli", "--grid", "5x4", "--format", "csv")[1]
    b = run(capsys, "moduli", "--grid", "5x4", "--format", "csv")[1]
    assert a == b
    rows = list(csv.DictReader(io.StringIO(a)))
    for r in rows:
        for key in ("s", "mu", "omega_re"):
            if r[key] not in ("", "inf"):
                assert r[key] == format(float(r[key]), ".17g")
    assert "\r" not in a
    j1 = run(capsys, "moduli", "--grid", "3x3")[1]
    j2 = run(capsys, "moduli", "--grid", "3x3")[1]
    assert j1 == j2


def test_loci_csv(capsys):
    code, out, _ = run(capsys, "loci", "--s", "0.5")
    assert code == 0
    row = next(csv.DictReader(io.StringIO(out)))
    assert float(row["p4_re"]) == 0.0
    assert float(row["p4_im"]) == pytest.approx(2.0943951, abs=1e-7)
    assert len([k for k in row if k.startswith("p")]) == 24


def test_loci_svg(capsys, tmp_path):
    code, _, _ = run(capsys, "loci", "--format", "svg", "--out", str(tmp_path / "loci"))
    assert code == 0
    root, meta = _svg(tmp_path / "loci.svg")
    assert len(root.findall(f".//{NS}polyline")) == 12
    labels = {t.text for t in root.findall(f".//{NS}text")}
    assert {"t=-1", "t=0", "t=1/2", "t=1", "t=2", "t=∞"} <= labels
    assert {f"C{k}" for k in range(1, 13)} <= labels
    assert {f"l{k}" for k in range(1, 13)} <= labels


def test_loci_bad_level(capsys):
    assert run(capsys, "loci", "--s", "1.5")[0] == 2
    assert run(capsys, "loci", "--s", "0")[0] == 2


def test_dehnspace(capsys, tmp_path):
    code, _, err = run(capsys, "dehnspace", "--samples", "300", "--format", "svg",
                       "--out", str(tmp_path / "ds"))
    assert code == 0
    root, meta = _svg(tmp_path / "ds.svg")
    assert [tuple(v) for v in meta["hexagon_vertices"]] == list(HEXAGON_VERTICES)
    assert len(meta["hexagon_edges"]) == 6
    assert meta["inside"] + meta["outside"] == 300
    assert all(float(d) < 0.05 for d in meta["edge_approach"].values())
    assert root.find(f".//{NS}polygon") is not None
    assert "edge mu=2" in err

    code, out, _ = run(capsys, "dehnspace", "--samples", "300", "--format", "csv", "--s", "0.99,0.999")
    rows = [r for r in csv.DictReader(io.StringIO(out)) if r["kind"] == "sample"]
    flags = [r["inside"] == "true" for r in rows]
    assert flags == [hexagon_contains(float(r["mu"]), float(r["lambda"]), tol=1e-9) for r in rows]
    assert sum(flags) == meta["inside"]


def test_degenerate_11(capsys):
    code, out, _ = run(capsys, "degenerate", "--p", "1", "--q", "1")
    assert code == 0
    rows = list(csv.DictReader(io.StringIO(out)))
    angle = [float(r["angle"]) for r in rows]
    length = [float(r["length"]) for r in rows]
    assert abs(angle[-1] - 2 * math.pi) < 0.1
    assert all(r["angle_to_limit_decreasing"] == "true" for r in rows[1:])
    assert all(b > a for a, b in zip(length, length[1:]))
    assert length[-1] > 10


def test_degenerate_meridian(capsys):
    code, out, _ = run(capsys, "degenerate", "--p", "1", "--q", "0", "--s", "0.3,0.6,0.9")
    assert code == 0
    for r in csv.DictReader(io.StringIO(out)):
        assert float(r["c_re"]) == pytest.approx(0.0, abs=1e-12)
        assert float(r["angle"]) == pytest.approx(float(r["c_im"]), abs=1e-12)


def test_degenerate_noncoprime(capsys):
    assert run(capsys, "degenerate", "--p", "2", "--q", "4")[0] == 2
    assert run(capsys, "degenerate", "--p", "1")[0] == 2


def test_packing_hexagonal(capsys, tmp_path):
    code, _, _ = run(capsys, "packing", "--c", "0", "--window", "5", "--out", str(tmp_path / "hex"))
    assert code == 0
    root, meta = _svg(tmp_path / "hex.svg")
    assert float(meta["max_tangency_residual"]) < 1e-9
    assert meta["valid"] is True
    circles = root.findall(f".//{NS}circle")
    assert len(circles) == 121 + 2 * 100


def test_packing_spiral(capsys, tmp_path):
    code, out, _ = run(capsys, "packing", "--c", "0+2.0944i", "--format", "csv")
    assert code == 0
    rows = [r for r in csv.DictReader(io.StringIO(out)) if r["kind"] == "PACKING"]
    ratio = [float(r["radius"]) / abs(complex(float(r["center_re"]), float(r["center_im"])))
             for r in rows]
    assert max(ratio) - min(ratio) < 1e-12


def test_packing_validation_failure(capsys, tmp_path):
    assert run(capsys, "packing", "--c", "0", "--tol", "1e-20", "--out", str(tmp_path / "a"))[0] == 3
    assert run(capsys, "packing", "--c=0+2.0943951023931957i", "--kappa-fault", "1.01",
               "--out", str(tmp_path / "b"))[0] == 3
    assert run(capsys, "packing", "--c", "40", "--window", "20", "--out", str(tmp_path / "c"))[0] == 2


def test_packing_svg_deterministic(capsys, tmp_path):
    run(capsys, "packing", "--c", "1+1i", "--out", str(tmp_path / "a"))
    run(capsys, "packing", "--c", "1+1i", "--out", str(tmp_path / "b"))
    assert (tmp_path / "a.svg").read_bytes() == (tmp_path / "b.svg").read_bytes()


def test_config_file_and_override(capsys, tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("# flat config\nc = 0.5+0.5i\nformat = csv\ntheta-grid = 360\n")
    code, out, _ = run(capsys, "moduli", "--config", str(cfg))
    assert code == 0 and out.startswith("c_re,c_im")
    code, out, _ = run(capsys, "moduli", "--config", str(cfg), "--format", "json")
    assert json.loads(out)[0]["c"] == {"re": 0.5, "im": 0.5}
    cfg.write_text("bogus = 1\n")
    assert run(capsys, "moduli", "--config", str(cfg))[0] == 2


def test_config_validation(capsys):
    assert run(capsys, "moduli", "--c", "1", "--tol", "0")[0] == 2
    assert run(capsys, "moduli", "--c", "1", "--theta-grid", "32")[0] == 2
    assert run(capsys, "moduli", "--c", "1", "--format", "svg")[0] == 2
    assert run(capsys, "moduli")[0] == 2
