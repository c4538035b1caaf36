import json
import os
import pathlib

import pytest

from qsteer import cli, noise
from qsteer.cli import (
    DEFAULT_CONFIG,
    ConfigError,
    RunManifest,
    _merge,
    build_config,
    format_number,
    main,
    run,
    to_csv,
)

CONFIGS = pathlib.Path(__file__).resolve().parents[1] / "configs"


def write_config(tmp_path, **fields):
    path = tmp_path / "cfg.json"
    path.write_text(json.dumps(fields))
    return str(path)


class TestExitCodes:
    def test_bound_success(self, capsys):
        assert main(["bound", "--d", "2,4"]) == 0
        lines = capsys.readouterr().out.splitlines()
        assert lines[0] == "kind,d,kernel,stderr,bound,ratio,steerable,seed"
        assert len(lines) == 3

    @pytest.mark.parametrize("d", ["3", "0", "1", "512", "2,2", "x"])
    def test_bad_dimension(self, tmp_path, capsys, d):
        cfg = write_config(tmp_path, kind="epr")
        assert main(["run", cfg, "--d", d]) == 2
        assert "config error" in capsys.readouterr().err

    def test_missing_config(self, tmp_path):
        assert main(["run", str(tmp_path / "nope.json")]) == 2

    def test_malformed_config(self, tmp_path):
        path = tmp_path / "bad.json"
        path.write_text("{not json")
        assert main(["run", str(path)]) == 2

    def test_unknown_key(self, tmp_path):
        assert main(["run", write_config(tmp_path, kind="epr", colour="red")]) == 2

    def test_bad_shots(self, tmp_path):
        assert main(["run", write_config(tmp_path, kind="epr", d=[2]), "--shots", "-5"]) == 2
        assert main(["sweep", "--d", "2", "--visibility", "1", "--shots", "lots", "--seed", "0"]) == 2

    def test_jitter_needs_shots(self):
        assert main(["sweep", "--d", "2", "--visibility", "1", "--shots", "exact", "--seed", "0",
                     "--angle-jitter", "0.5"]) == 2

    def test_sweep_kind_validation(self):
        args = ["sweep", "--d", "2", "--visibility", "1", "--shots", "exact", "--seed", "0"]
        assert main(args + ["--kind", "epr,epr"]) == 2
        assert main(args + ["--kind", "lhs-bound"]) == 2

    def test_unwritable_output(self, tmp_path, capsys):
        target = tmp_path / "missing-dir" / "out.csv"
        assert main(["bound", "--d", "2", "--output", str(target)]) == 1
        assert "cannot write" in capsys.readouterr().err
        assert not target.exists()

    def test_failed_write_leaves_no_partial_file(self, tmp_path, monkeypatch):
        def broken_replace(src, dst):
            raise OSError(28, "No space left on device")

        monkeypatch.setattr(cli.os, "replace", broken_replace)
        target = tmp_path / "out.csv"
        assert main(["bound", "--d", "2", "--output", str(target)]) == 1
        assert os.listdir(tmp_path) == []


class TestOutput:
    def test_exact_epr_row(self, capsys):
        assert main(["sweep", "--d", "2", "--visibility", "1", "--shots", "exact", "--seed", "0",
                     "--kind", "epr"]) == 0
        out = capsys.readouterr().out.splitlines()
        assert out[1] == "epr,2,2.000000000000,0,1.707106781187,1.171572875254,true,0"

    def test_sweep_rows_sorted(self, capsys):
        assert main(["sweep", "--d", "8,2", "--visibility", "0.976", "--shots", "exact", "--seed", "0"]) == 0
        rows = [line.split(",")[:2] for line in capsys.readouterr().out.splitlines()[1:]]
        assert rows == [["epr", "2"], ["epr", "8"], ["ss", "2"], ["ss", "8"]]

    def test_header_only_for_empty_manifest(self):
        manifest = RunManifest(config={}, artifact_version="x", wall_time_s=0.0, rng=None, reports=[])
        assert to_csv(manifest) == "kind,d,kernel,stderr,bound,ratio,steerable,seed\n"

    def test_json_round_trip(self, tmp_path):
        target = tmp_path / "out.json"
        args = ["sweep", "--d", "2,4", "--visibility", "0.9", "--shots", "1000", "--seed", "5"]
        assert main(args + ["--format", "json", "--output", str(target)]) == 0
        data = json.loads(target.read_text())
        assert set(data) == {"config", "artifact_version", "wall_time_s", "rng", "reports"}
        assert data["rng"] == noise.RNG_NAME
        manifest = RunManifest.from_dict(data)
        assert manifest.to_dict() == data
        assert [r.d for r in manifest.reports] == [2, 4, 2, 4]

    def test_exact_manifest_has_no_rng(self, tmp_path):
        target = tmp_path / "out.json"
        assert main(["bound", "--d", "4", "--format", "json", "--output", str(target)]) == 0
        assert json.loads(target.read_text())["rng"] is None

    def test_csv_byte_identical_across_runs(self, tmp_path):
        paths = [tmp_path / "a.csv", tmp_path / "b.csv"]
        for p in paths:
            assert main(["sweep", "--d", "2,4,8", "--visibility", "0.95", "--shots", "5000", "--seed", "77",
                         "--angle-jitter", "0.3", "--output", str(p)]) == 0
        assert paths[0].read_bytes() == paths[1].read_bytes()

    def test_exact_mode_never_builds_rng(self, monkeypatch, capsys):
        def boom(*args, **kwargs):
            raise AssertionError("generator constructed in exact mode")

        monkeypatch.setattr(noise, "rng_for", boom)
        assert main(["sweep", "--d", "2,4,8,16", "--visibility", "0.976", "--shots", "exact", "--seed", "1"]) == 0
        assert len(capsys.readouterr().out.splitlines()) == 9


class TestShippedConfigs:
    def test_exact(self, capsys):
        assert main(["run", str(CONFIGS / "epr_exact.json")]) == 0
        rows = capsys.readouterr().out.splitlines()[1:]
        assert [r.split(",")[5] for r in rows] == [f"{2 / (1 + d**-0.5):.12f}" for d in (2, 4, 8, 16)]

    def test_reduced(self, capsys):
        assert main(["run", str(CONFIGS / "ss_reduced.json")]) == 0
        kernels = [float(r.split(",")[2]) for r in capsys.readouterr().out.splitlines()[1:]]
        assert kernels == pytest.approx([1.5, 1.25, 1.125], abs=1e-12)

    def test_noisy_with_output_override(self, tmp_path):
        target = tmp_path / "noisy.csv"
        assert main(["run", str(CONFIGS / "epr_noisy.json"), "--output", str(target)]) == 0
        rows = [r.split(",") for r in target.read_text().splitlines()[1:]]
        assert all(r[6] == "true" for r in rows)
        assert all(r[7] == "20160101" for r in rows)


class TestConfig:
    def test_defaults_validate(self):
        cfg = build_config(_merge(DEFAULT_CONFIG, {}))
        assert cfg.d == [2, 4, 8, 16] and cfg.shots is None

    def test_lhs_search_dimension_cap(self):
        with pytest.raises(ConfigError):
            build_config(_merge(DEFAULT_CONFIG, {"kind": "lhs-search", "d": [128]}))

    def test_non_power_of_two_allowed_for_bound(self):
        assert build_config(_merge(DEFAULT_CONFIG, {"kind": "lhs-bound", "d": [3, 5]})).d == [3, 5]

    def test_seed_range(self):
        with pytest.raises(ConfigError):
            build_config(_merge(DEFAULT_CONFIG, {"seed": 2**64}))
        with pytest.raises(ConfigError):
            build_config(_merge(DEFAULT_CONFIG, {"seed": -1}))

    def test_reduced_dim_rules(self):
        with pytest.raises(ConfigError):
            build_config(_merge(DEFAULT_CONFIG, {"kind": "epr", "ss": {"reduced_dim": 2}}))
        with pytest.raises(ConfigError):
            build_config(_merge(DEFAULT_CONFIG, {"kind": "ss", "d": [2], "ss": {"reduced_dim": 4}}))
        with pytest.raises(ConfigError):
            build_config(_merge(DEFAULT_CONFIG, {"kind": "ss", "ss": {"reduced_dim": 3}}))

    def test_lhs_search_run(self):
        cfg = build_config(_merge(DEFAULT_CONFIG, {"kind": "lhs-search", "d": [2], "search": {"restarts": 2}}))
        manifest = run(cfg)
        assert manifest.rng is not None
        assert manifest.reports[0].kernel == pytest.approx(1 + 2**-0.5, abs=1e-9)


@pytest.mark.parametrize(
    "x,text",
    [(0.0, "0"), (2.0, "2.000000000000"), (1.25, "1.250000000000"), (0.004, "0.00400000000000")],
)
def test_format_number(x, text):
    assert format_number(x) == text
