import io
import json
import math
from collections import Counter

import numpy as np
import pytest

from flexcross import angles, checks, cli, samples
from flexcross.config import config_from_dict, data_to_dict, parse_config
from flexcross.measure import sphere_volume

from .test_config import MINIMAL


@pytest.fixture(autouse=True)
def _no_env_seed(monkeypatch):
    monkeypatch.delenv("FLEXCROSS_SEED", raising=False)


def write(tmp_path, doc, name="c.json"):
    p = tmp_path / name
    p.write_text(json.dumps(doc))
    return str(p)


def random_doc(kind, n, seed, **extra):
    data = samples.random_data(kind, n, np.random.default_rng(seed))
    return {**data_to_dict(data), **extra}


class TestVerify:
    def test_minimal_passes(self, tmp_path, capsys):
        out = tmp_path / "report.csv"
        assert cli.main(["verify", write(tmp_path, MINIMAL), "--out", str(out)]) == 0
        text = capsys.readouterr().out
        assert "volume non-constant" in text
        lines = out.read_text().splitlines()
        assert lines[0] == "# schema_version=1"
        assert lines[5].split(",")[:3] == ["name", "anchor", "status"]
        assert all(",fail," not in line for line in lines)

    def test_every_check_has_anchor(self):
        cfg = config_from_dict({**MINIMAL, "u_grid": [0, 0.5, -2, "inf"]})
        report, status = cli.cmd_verify(cfg, stream=io.StringIO())
        assert status == 0
        assert all(r.anchor for r in report.records)
        assert len({r.name for r in report.records}) >= 16

    def test_equal_products_rejected(self, tmp_path, capsys):
        doc = random_doc("euclidean", 3, 0)
        doc["s_prime"] = [-v for v in doc["s"]]
        assert cli.main(["verify", write(tmp_path, doc)]) == 2
        assert "not all equal" in capsys.readouterr().err

    def test_failed_check_exit_one(self, tmp_path):
        doc = {**MINIMAL, "u_grid": [0, 0.5, "inf"]}
        # the dihedral residual is a few ulps, so a 1e-300 tolerance must fail
        assert cli.main(["verify", write(tmp_path, doc), "--tol", "dihedral=1e-300"]) == 1

    @pytest.mark.parametrize("kind", ["euclidean", "hyperbolic"])
    def test_other_geometries(self, tmp_path, kind):
        doc = random_doc(kind, 3, 3, u_grid=[0, 0.3, -1.5, "inf"])
        assert cli.main(["verify", write(tmp_path, doc)]) == 0


class TestExitContract:
    def rep(self, *statuses):
        return checks.VerificationReport([checks.CheckRecord(f"c{i}", "x", s, 0.0, 1.0) for i, s in enumerate(statuses)])

    def test_codes(self):
        assert self.rep(checks.PASS, checks.PASS).exit_status() == 0
        assert self.rep(checks.PASS, checks.FAIL).exit_status() == 1
        assert self.rep(checks.INCONCLUSIVE).exit_status() == 3
        assert self.rep(checks.INCONCLUSIVE).exit_status(allow_inconclusive=True) == 0
        assert self.rep(checks.FAIL, checks.INCONCLUSIVE).exit_status(True) == 1

    def test_missing_file(self, tmp_path):
        assert cli.main(["verify", str(tmp_path / "none.json")]) == 2

    def test_usage(self):
        with pytest.raises(SystemExit) as exc:
            cli.main(["frobnicate", "x.json"])
        assert exc.value.code == 2


class TestTrajectory:
    def test_shape_and_flatness(self, tmp_path):
        out = tmp_path / "t.csv"
        assert cli.main(["trajectory", write(tmp_path, MINIMAL), "--out", str(out)]) == 0
        comments, cols, table = cli.read_table(out)
        assert table.shape[0] == 65
        assert sum(c.endswith("_x0") for c in cols) == 6
        mcols = [i for i, c in enumerate(cols) if c.endswith("_m")]
        zero = table[:, 0] == 0
        assert np.max(np.abs(table[zero][:, mcols])) < 1e-15
        assert any(c.startswith("seed=") for c in comments)

    def test_angles_match_prediction(self, tmp_path):
        cfg = config_from_dict({**MINIMAL, "u_grid": [0, 0.2, -3, 40, "inf"]})
        cols = cli.trajectory_columns(cfg)
        rows = np.array(cli.trajectory_rows(cfg))
        for F in angles.ridge_faces(3):
            j = cols.index(f"psi_{F.label()}")
            for row in rows:
                want = angles.predicted_dihedral(cfg.data, F, row[0])
                d = (row[j] - want + math.pi) % (2 * math.pi) - math.pi
                assert abs(d) < 1e-8

    def test_round_trip_bit_identical(self, tmp_path):
        cfg = config_from_dict({**MINIMAL, "u_grid": [0, 1 / 3, -7.1, "inf"]})
        out = tmp_path / "t.csv"
        cli.cmd_trajectory(cfg, str(out))
        _, _, table = cli.read_table(out)
        direct = np.array(cli.trajectory_rows(cfg))
        assert np.array_equal(table, direct)


class TestVolume:
    def test_closed_form_value(self, tmp_path):
        cfg = config_from_dict({**MINIMAL, "u_grid": [1.0]})
        cols, rows = cli.volume_table(cfg, "closed-form")
        sig = sphere_volume(3)
        want = sig / 2 - sig / math.pi * math.atan(4.0)
        assert cols[:3] == ["u", "V_closed_form", "err_closed_form"]
        assert min(abs(rows[0][1] - want) % sig, sig - abs(rows[0][1] - want) % sig) < 1e-14

    def test_all_methods_agree(self):
        cfg = config_from_dict({**MINIMAL, "u_grid": [0, 0.4, -1.0, "inf"]})
        cols, rows = cli.volume_table(cfg, "all")
        diffs = [i for i, c in enumerate(cols) if c.startswith("diff_")]
        assert len(diffs) == 3
        tol = cfg.tolerances["volume_agreement"] * sphere_volume(3) + 1e-6
        for row in rows:
            assert max(row[i] for i in diffs) < tol

    def test_euclidean_decomposition_zero(self):
        cfg = config_from_dict(random_doc("euclidean", 3, 1, u_grid=[0, 0.5, -2, "inf"]))
        cols, rows = cli.volume_table(cfg, "decomposition")
        assert all(abs(r[1]) < 1e-12 for r in rows)

    def test_schlafli_euclidean_rejected(self, tmp_path, capsys):
        path = write(tmp_path, random_doc("euclidean", 3, 1))
        assert cli.main(["volume", path, "--method", "schlafli"]) == 2

    def test_monte_carlo_reproducible(self, tmp_path):
        path = write(tmp_path, {**MINIMAL, "u_grid": [0.5, 2.0]})
        outs = []
        for name in ("m1.csv", "m2.csv"):
            out = tmp_path / name
            assert cli.main(["volume", path, "--method", "monte-carlo", "--samples", "200", "--seed", "11", "--out", str(out)]) == 0
            outs.append(out.read_text())
        assert outs[0] == outs[1]
        third = tmp_path / "m3.csv"
        cli.main(["volume", path, "--method", "monte-carlo", "--samples", "200", "--seed", "12", "--out", str(third)])
        assert third.read_text() != outs[0]


class TestFlat:
    def test_parity_match(self):
        rep = cli.flat_report(config_from_dict(MINIMAL))
        assert rep["parity_match"] and not rep["errors"]
        p0 = rep["positions"]["0"]
        assert p0["case"] == "concentric-spheres-or-orispheres"
        for k, v in p0["per_k"].items():
            assert abs(v["detail"] - math.pi / 2) > 1e-3

    def test_perturbed(self, tmp_path, capsys):
        path = write(tmp_path, MINIMAL)
        assert cli.main(["flat", path, "--perturb", "1e-3"]) == 1
        assert "concurrency failure" in capsys.readouterr().out

    def test_json_output(self, tmp_path):
        out = tmp_path / "f.json"
        assert cli.main(["flat", write(tmp_path, random_doc("hyperbolic", 3, 2)), "--out", str(out)]) == 0
        doc = json.loads(out.read_text())
        assert set(doc["positions"]) == {"0", "inf"}

    def test_low_dimension(self, tmp_path):
        assert cli.main(["flat", write(tmp_path, random_doc("spherical", 2, 0))]) == 2


class TestEmbed:
    def test_small_u(self, tmp_path):
        out = tmp_path / "e.json"
        assert cli.main(["embed", write(tmp_path, MINIMAL), "--u", "1e-3", "--out", str(out)]) == 0
        assert json.loads(out.read_text())["verdict"]["status"] == "embedded"

    def test_infinity(self, tmp_path):
        out = tmp_path / "e.json"
        cli.main(["embed", write(tmp_path, MINIMAL), "--u", "inf", "--out", str(out)])
        v = json.loads(out.read_text())["verdict"]
        assert v["status"] == "self-intersecting"
        assert len(v["witness"]) == 4 and len(v["pair"]) == 2

    def test_certificate(self, tmp_path, capsys):
        assert cli.main(["embed", write(tmp_path, MINIMAL), "--theorem-1-1"]) == 0
        assert capsys.readouterr().out.count("PASS") == 4

    def test_certificate_needs_pattern(self, tmp_path):
        doc = {**MINIMAL, "s": [1, -1, -1], "s_prime": [-1, 1, 1]}
        assert cli.main(["embed", write(tmp_path, doc), "--theorem-1-1"]) == 2

    def test_needs_u(self, tmp_path):
        assert cli.main(["embed", write(tmp_path, MINIMAL)]) == 2


def parse_obj(text):
    v = [list(map(float, l.split()[1:])) for l in text.splitlines() if l.startswith("v ")]
    f = [list(map(int, l.split()[1:])) for l in text.splitlines() if l.startswith("f ")]
    return np.array(v), f


class TestMesh:
    @pytest.mark.parametrize("kind", ["spherical", "euclidean", "hyperbolic"])
    def test_counts_and_windings(self, kind):
        doc = MINIMAL if kind == "spherical" else random_doc(kind, 3, 4)
        text = cli.mesh_text(config_from_dict(doc), 0.7)
        assert text.splitlines()[0].startswith("# projection:")
        v, f = parse_obj(text)
        assert v.shape == (6, 3) and len(f) == 8
        directed = Counter((t[i], t[(i + 1) % 3]) for t in f for i in range(3))
        assert all(c == 1 for c in directed.values())
        for (p, q) in directed:
            assert (q, p) in directed

    def test_flat_sphere_on_common_sphere(self):
        v, _ = parse_obj(cli.mesh_text(config_from_dict(MINIMAL), 0.0))
        # the great sphere orthogonal to m projects from -m onto the unit sphere
        np.testing.assert_allclose(np.linalg.norm(v, axis=1), 1.0, atol=1e-14)
        A = np.hstack([2 * v, np.ones((6, 1))])
        b = np.sum(v * v, axis=1)
        sol, res, *_ = np.linalg.lstsq(A, b, rcond=None)
        assert np.max(np.abs(A @ sol - b)) < 1e-12

    def test_pole_on_vertex(self, tmp_path):
        cfg = config_from_dict(MINIMAL)
        from flexcross import flexion
        a1 = flexion.configuration(flexion.build(cfg.data), 0.0).a[0]
        path = write(tmp_path, MINIMAL)
        assert cli.main(["mesh", path, "--pole", ",".join(repr(x) for x in a1)]) == 2

    def test_wrong_dimension(self, tmp_path):
        assert cli.main(["mesh", write(tmp_path, random_doc("spherical", 4, 0))]) == 2


def test_write_atomic(tmp_path):
    target = tmp_path / "x.txt"
    target.write_text("old")
    cli.write_atomic(target, "new\n")
    assert target.read_text() == "new\n"
    assert [p.name for p in tmp_path.iterdir()] == ["x.txt"]
