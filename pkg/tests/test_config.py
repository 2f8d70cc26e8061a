import json
import math

import numpy as np
import pytest

from flexcross import config as cfgmod
from flexcross.config import ConfigError, ValidationError, parse_config

MINIMAL = {
    "space": "spherical",
    "n": 3,
    "G": [[1, 0, 0], [0, 1, 0], [0, 0, 1]],
    "lambda": [1, 2, 4],
    "s": [-1, -1, -1],
    "s_prime": [1, 1, 1],
}


def write(tmp_path, doc, name="c.json"):
    p = tmp_path / name
    p.write_text(doc if isinstance(doc, str) else json.dumps(doc))
    return p


class TestParse:
    def test_minimal(self, tmp_path, monkeypatch):
        monkeypatch.delenv(cfgmod.SEED_ENV, raising=False)
        cfg = parse_config(write(tmp_path, MINIMAL))
        assert cfg.n == 3
        assert cfg.seed == 0x5EED
        assert len(cfg.u_grid) == 65
        assert cfg.u_grid[0] < 0 and math.isinf(cfg.u_grid[-1])
        assert cfg.schema_version == 1

    def test_lambda_order(self, tmp_path):
        with pytest.raises(ValidationError) as exc:
            parse_config(write(tmp_path, {**MINIMAL, "lambda": [2, 1, 4]}))
        assert exc.value.condition == "lambda strictly increasing"

    def test_euclidean_determinant(self, tmp_path):
        a = math.sqrt(0.7)
        doc = {**MINIMAL, "space": "euclidean", "G": [[1, a, 0], [a, 1, 0], [0, 0, 1]]}
        with pytest.raises(ValidationError) as exc:
            parse_config(write(tmp_path, doc))
        assert "det sign regime" in exc.value.condition

    def test_malformed_json_line(self, tmp_path):
        text = '{\n  "space": "spherical",\n  "n": 3,,\n}'
        with pytest.raises(ConfigError) as exc:
            parse_config(write(tmp_path, text))
        assert exc.value.where.startswith("line 3")

    def test_unknown_field(self, tmp_path):
        with pytest.raises(ConfigError) as exc:
            parse_config(write(tmp_path, {**MINIMAL, "colour": "red"}))
        assert exc.value.where == "colour"

    def test_missing_field(self, tmp_path):
        doc = dict(MINIMAL)
        del doc["lambda"]
        with pytest.raises(ConfigError, match="lambda"):
            parse_config(write(tmp_path, doc))

    @pytest.mark.parametrize(
        "field,value",
        [("n", 1), ("n", True), ("space", "elliptic"), ("s", [1, 0, 1]), ("G", [[1, 0], [0, 1]]), ("schema_version", 2)],
    )
    def test_bad_fields(self, tmp_path, field, value):
        with pytest.raises(ConfigError) as exc:
            parse_config(write(tmp_path, {**MINIMAL, field: value}))
        assert exc.value.where == field

    def test_missing_file(self, tmp_path):
        with pytest.raises(ConfigError):
            parse_config(tmp_path / "absent.json")

    def test_grid_tokens(self, tmp_path):
        cfg = parse_config(write(tmp_path, {**MINIMAL, "u_grid": ["-inf", 1, 0, -2, "inf", 1]}))
        assert cfg.u_grid[:3] == [-2.0, 0.0, 1.0]
        assert len(cfg.u_grid) == 4 and math.isinf(cfg.u_grid[3])

    def test_bad_grid_token(self, tmp_path):
        with pytest.raises(ConfigError) as exc:
            parse_config(write(tmp_path, {**MINIMAL, "u_grid": [0, "nan"]}))
        assert exc.value.where == "u_grid[1]"

    def test_round_trip(self, tmp_path):
        cfg = parse_config(write(tmp_path, {**MINIMAL, "u_grid": [0, 0.5, "inf"], "seed": 9}))
        doc = cfgmod.data_to_dict(cfg.data, cfg.u_grid, cfg.seed)
        again = cfgmod.config_from_dict(doc)
        assert again.data == cfg.data and again.u_grid == cfg.u_grid


class TestTolerances:
    def test_dimension_dependent(self):
        assert cfgmod.resolve_tolerances(3)["facet_relation"] == 1e-9
        assert cfgmod.resolve_tolerances(4)["facet_relation"] == 1e-4

    def test_override(self, tmp_path):
        cfg = parse_config(write(tmp_path, {**MINIMAL, "tolerances": {"dihedral": 1e-6}}), tol_overrides={"ratio": 1e-5})
        assert cfg.tolerances["dihedral"] == 1e-6
        assert cfg.tolerances["ratio"] == 1e-5

    @pytest.mark.parametrize("bad", [{"nonsense": 1.0}, {"dihedral": -1.0}, {"dihedral": "x"}])
    def test_rejected(self, bad):
        with pytest.raises(ConfigError):
            cfgmod.resolve_tolerances(3, bad)

    def test_cli_items(self):
        assert cfgmod.parse_tol_overrides(["dihedral=1e-7"]) == {"dihedral": 1e-7}
        with pytest.raises(ConfigError):
            cfgmod.parse_tol_overrides(["dihedral"])


class TestSeeds:
    def test_precedence(self, monkeypatch):
        monkeypatch.setenv(cfgmod.SEED_ENV, "77")
        assert cfgmod.resolve_seed(5, 9) == 5
        assert cfgmod.resolve_seed(None, 9) == 77
        monkeypatch.delenv(cfgmod.SEED_ENV)
        assert cfgmod.resolve_seed(None, 9) == 9
        assert cfgmod.resolve_seed(None, None) == 0x5EED

    def test_bad_env(self, monkeypatch):
        monkeypatch.setenv(cfgmod.SEED_ENV, "seven")
        with pytest.raises(ConfigError):
            cfgmod.resolve_seed(None, None)

    def test_streams(self):
        a1 = cfgmod.check_rng(1, "x").random(4)
        a2 = cfgmod.check_rng(1, "x").random(4)
        b = cfgmod.check_rng(1, "y").random(4)
        np.testing.assert_array_equal(a1, a2)
        assert not np.allclose(a1, b)


class TestGrid:
    def test_default(self):
        g = cfgmod.default_u_grid()
        assert len(g) == 65
        assert g.count(0.0) == 1
        assert sum(v > 0 and not math.isinf(v) for v in g) == 32
        assert sum(v < 0 for v in g) == 31

    def test_normalize(self):
        assert cfgmod.normalize_grid([3, float("inf"), -0.0, 1, 3]) == [0.0, 1.0, 3.0, float("inf")]
