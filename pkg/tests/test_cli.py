import pytest

from chernofflab.cli import (KINDS, list_experiments, main, parse_config_text,
                             run_config_text, serialize_config)
from chernofflab.configs import BUILTINS
from chernofflab.errors import ConfigError


class TestCatalog:
    def test_at_least_eight_builtins(self):
        assert len(list_experiments()) >= 8

    def test_names_unique(self):
        names = [n for n, _ in list_experiments()]
        assert len(names) == len(set(names))

    def test_every_kind_covered(self):
        kinds = set()
        for _, (_, text) in BUILTINS.items():
            kinds.add(parse_config_text(text)["experiment"]["kind"])
        assert kinds == set(KINDS)

    def test_stable_order(self):
        assert [n for n, _ in list_experiments()] == \
               [n for n, _ in list_experiments()]

    @pytest.mark.parametrize("name", list(BUILTINS))
    def test_round_trip_parse_serialize_parse(self, name):
        text = BUILTINS[name][1]
        sections = parse_config_text(text)
        again = parse_config_text(serialize_config(sections))
        assert again == sections


class TestParser:
    def test_parse_error_carries_line(self):
        with pytest.raises(ConfigError) as err:
            parse_config_text("[experiment]\nkind lln\n")
        assert err.value.line == 2

    def test_key_outside_section(self):
        with pytest.raises(ConfigError) as err:
            parse_config_text("kind = lln\n")
        assert err.value.line == 1

    def test_comments_and_blanks_ignored(self):
        sections = parse_config_text(
            "# top comment\n[a]\nx = 1  # trailing\n\n[b]\ny = 2\n")
        assert sections == {"a": {"x": "1"}, "b": {"y": "2"}}

    def test_validation_error_names_field(self):
        text = BUILTINS["cramer_bernoulli"][1].replace("threshold = 0.5",
                                                       "thresh = 0.5")
        with pytest.raises(ConfigError) as err:
            run_config_text(text, output_root="/tmp/chernofflab_test_out")
        assert err.value.field == "set.threshold"

    def test_even_grid_rejected_with_field(self, tmp_path):
        text = BUILTINS["clt_binary_exact"][1].replace("N = 257", "N = 256")
        with pytest.raises(ConfigError) as err:
            run_config_text(text, output_root=str(tmp_path))
        assert err.value.field == "grid.N"


class TestRunners:
    def test_cramer_builtin_passes(self, tmp_path):
        ok, lines = run_config_text(BUILTINS["cramer_bernoulli"][1], str(tmp_path))
        assert ok, lines
        assert (tmp_path / "cramer_bernoulli" / "rate_report.csv").exists()
        assert any("slope_window: PASS" in ln for ln in lines)

    def test_poly_rate_builtin_passes(self, tmp_path):
        ok, lines = run_config_text(BUILTINS["poly_rate_bernoulli"][1], str(tmp_path))
        assert ok, lines

    def test_generator_builtins_pass(self, tmp_path):
        for name in ("generator_affine_drift", "generator_entropic_constant"):
            ok, lines = run_config_text(BUILTINS[name][1], str(tmp_path))
            assert ok, (name, lines)

    def test_clt_binary_builtin_passes(self, tmp_path):
        ok, lines = run_config_text(BUILTINS["clt_binary_exact"][1], str(tmp_path))
        assert ok, lines
        assert (tmp_path / "clt_binary_exact" / "clt_values.csv").exists()

    def test_every_builtin_passes_within_budget(self, tmp_path):
        import time
        for name, (_, text) in BUILTINS.items():
            start = time.perf_counter()
            ok, lines = run_config_text(text, str(tmp_path))
            elapsed = time.perf_counter() - start
            assert ok, (name, lines)
            assert elapsed < 60.0, (name, elapsed)

    def test_deterministic_artifacts(self, tmp_path):
        out1, out2 = tmp_path / "a", tmp_path / "b"
        run_config_text(BUILTINS["cramer_bernoulli"][1], str(out1))
        run_config_text(BUILTINS["cramer_bernoulli"][1], str(out2))
        f1 = (out1 / "cramer_bernoulli" / "rate_report.csv").read_bytes()
        f2 = (out2 / "cramer_bernoulli" / "rate_report.csv").read_bytes()
        assert f1 == f2

    def test_numerical_failure_exit_code(self, tmp_path, capsys):
        text = BUILTINS["cramer_bernoulli"][1].replace(
            "slope_window = -0.1409,-0.1259", "slope_window = -0.01,0.0")
        cfg = tmp_path / "failing.cfg"
        cfg.write_text(text)
        rc = main(["run", str(cfg), "--out", str(tmp_path / "out")])
        assert rc == 1
        assert "FAIL" in capsys.readouterr().out


class TestMain:
    def test_list_command(self, capsys):
        assert main(["list"]) == 0
        out = capsys.readouterr().out
        assert "lln_entropic_gaussian" in out

    def test_describe_command(self, capsys):
        assert main(["describe", "cramer_bernoulli"]) == 0
        out = capsys.readouterr().out
        assert "[experiment]" in out
        assert "kind = cramer" in out

    def test_describe_unknown(self, capsys):
        assert main(["describe", "nope"]) == 3

    def test_run_builtin_by_name(self, tmp_path, capsys):
        rc = main(["run", "cramer_bernoulli", "--out", str(tmp_path)])
        assert rc == 0
        out = capsys.readouterr().out
        assert "cramer_bernoulli: PASS" in out

    def test_run_missing_file(self, capsys):
        assert main(["run", "/no/such/config.cfg"]) == 2

    def test_run_config_file(self, tmp_path, capsys):
        cfg = tmp_path / "exp.cfg"
        cfg.write_text(BUILTINS["generator_entropic_constant"][1])
        assert main(["run", str(cfg), "--out", str(tmp_path / "out")]) == 0

    def test_run_invalid_field_exit_3(self, tmp_path, capsys):
        cfg = tmp_path / "bad.cfg"
        cfg.write_text(BUILTINS["clt_binary_exact"][1].replace("N = 257", "N = 256"))
        assert main(["run", str(cfg), "--out", str(tmp_path / "out")]) == 3

    def test_run_parse_error_exit_2(self, tmp_path, capsys):
        cfg = tmp_path / "broken.cfg"
        cfg.write_text("[experiment\nkind = lln\n")
        assert main(["run", str(cfg), "--out", str(tmp_path / "out")]) == 2

    def test_output_root_env_var(self, tmp_path, monkeypatch):
        monkeypatch.setenv("CHERNOFFLAB_OUT", str(tmp_path / "envroot"))
        ok, _ = run_config_text(BUILTINS["generator_entropic_constant"][1])
        assert ok
        assert (tmp_path / "envroot" / "generator_entropic_constant"
                / "summary.txt").exists()
