import json

import numpy as np
import pytest

from cubedec.cli import RunConfig, generate_field, main, run
from cubedec.operators import read_operator
from cubedec.torus import build_torus, read_field, write_field


def _run(argv):
    return main(argv)


def test_decompose_end_to_end(tmp_path, capsys):
    out = tmp_path / "a"
    assert _run(["decompose", "--n", "2", "--N", "3", "--seed", "7", "--field", "random1form",
                 "--output", str(out)]) == 0
    report = json.loads((out / "report.json").read_text())
    assert report["orthogonal"] and report["reconstructs"]
    manifest = json.loads((out / "manifest.json").read_text())
    assert manifest["config"]["seed"] == 7 and manifest["version"]
    assert set(manifest["outputs"]) == {"exact.txt", "coexact.txt", "harmonic.txt", "report.json"}
    m = build_torus(2, 3)
    parts = [read_field(m, (out / f).read_text()) for f in ("exact.txt", "coexact.txt", "harmonic.txt")]
    original = generate_field(m, "random1form", 7)
    assert np.allclose(sum(p.values for p in parts), original.values, atol=1e-12)


def test_outputs_are_byte_identical(tmp_path):
    for name in ("a", "b"):
        assert _run(["decompose", "--n", "3", "--N", "3", "--seed", "11", "--field", "random1form",
                     "--output", str(tmp_path / name)]) == 0
    for f in (tmp_path / "a").iterdir():
        assert f.read_bytes() == (tmp_path / "b" / f.name).read_bytes()


def test_check_stokes_with_files(tmp_path):
    m = build_torus(3, 4)
    j = generate_field(m, "randint1form", 5)
    (tmp_path / "j.txt").write_text(write_field(m, j))
    (tmp_path / "patch.txt").write_text("# two faces\n1 1 1 0 1\n1 2 1 0 1\n")
    assert _run(["check-stokes", "--n", "3", "--N", "4", "--faces", str(tmp_path / "patch.txt"),
                 "--field", str(tmp_path / "j.txt"), "--output", str(tmp_path / "s")]) == 0
    report = json.loads((tmp_path / "s" / "stokes.json").read_text())
    assert report["equal"] and report["same_sign"] and report["lhs"] == report["rhs"]


def test_check_divergence(tmp_path):
    (tmp_path / "cells.txt").write_text("0 0 0 1\n1 0 0 1\n")
    assert _run(["check-divergence", "--n", "3", "--N", "4", "--cells", str(tmp_path / "cells.txt"),
                 "--field", "randint2form", "--seed", "2", "--output", str(tmp_path)]) == 0
    assert json.loads((tmp_path / "divergence.json").read_text())["equal"]


def test_harmonic_command(tmp_path):
    assert _run(["harmonic", "--n", "3", "--N", "3", "--output", str(tmp_path)]) == 0
    report = json.loads((tmp_path / "harmonic.json").read_text())
    assert report["dimension"] == 3
    m = build_torus(3, 3)
    for i in range(3):
        phi = read_field(m, (tmp_path / f"harmonic_{i + 1}.txt").read_text())
        assert np.array_equal(m.to_grid(phi)[i], np.ones(m.shape, dtype=int))


def test_apply_and_roundtrip(tmp_path):
    assert _run(["apply", "--n", "3", "--N", "3", "--op", "curl", "--field", "randint1form",
                 "--mode", "exact", "--output", str(tmp_path / "c")]) == 0
    m = build_torus(3, 3)
    curl_j = read_field(m, (tmp_path / "c" / "result.txt").read_text())
    (tmp_path / "curl.txt").write_text(write_field(m, curl_j))
    assert _run(["apply", "--n", "3", "--N", "3", "--op", "div2", "--field", str(tmp_path / "curl.txt"),
                 "--mode", "exact", "--output", str(tmp_path / "d")]) == 0
    div = read_field(m, (tmp_path / "d" / "result.txt").read_text())
    assert not div.values.any()
    assert (tmp_path / "c" / "result.txt").read_text() == write_field(m, curl_j)


def test_export_operators(tmp_path):
    assert _run(["export-operators", "--n", "2", "--N", "3", "--mode", "exact",
                 "--output", str(tmp_path)]) == 0
    ops = build_torus(2, 3).operators("exact")
    meta, d1 = read_operator((tmp_path / "d_1.txt").read_text())
    assert (d1 != ops.d[1]).nnz == 0 and meta["kind"] == ["d"]


def test_build_and_validate(tmp_path, capsys):
    assert _run(["build", "--n", "3", "--N", "3", "--output", str(tmp_path)]) == 0
    assert json.loads(capsys.readouterr().out)["counts"] == [27, 81, 81, 27]
    assert _run(["validate", "--n", "2", "--N", "4", "--output", str(tmp_path)]) == 0
    assert json.loads((tmp_path / "validation.json").read_text())["ok"]


def test_exit_codes(tmp_path, capsys):
    assert _run(["build", "--n", "3", "--N", "2", "--output", str(tmp_path)]) == 2
    bad = tmp_path / "bad.txt"
    bad.write_text("1 1 x 0 1\n")
    code = _run(["check-stokes", "--n", "3", "--N", "4", "--faces", str(bad),
                 "--field", "randint1form", "--output", str(tmp_path)])
    assert code == 2
    assert f"{bad}:1:5:" in capsys.readouterr().err
    assert _run(["apply", "--n", "2", "--N", "3", "--op", "d", "--field", "random1form",
                 "--mode", "exact", "--output", str(tmp_path)]) == 2
    with pytest.raises(SystemExit) as info:
        _run(["apply", "--n", "2"])
    assert info.value.code == 2


def test_numerical_failure_exit_code(tmp_path, monkeypatch):
    import cubedec.cli as cli
    from cubedec.errors import SolverError

    def boom(*a, **k):
        raise SolverError("no convergence", residual=0.5, iterations=10)

    monkeypatch.setattr(cli, "decompose", boom)
    cfg = RunConfig("decompose", 2, 3, field="random1form", output=str(tmp_path))
    assert run(cfg) == 3


def test_tolerance_override_cannot_loosen(tmp_path):
    assert _run(["decompose", "--n", "2", "--N", "3", "--field", "random1form", "--tol", "0.5",
                 "--output", str(tmp_path)]) == 0
    assert json.loads((tmp_path / "report.json").read_text())["tolerance"] == 1e-10
