import pytest

from wsnsim.cli import main
from wsnsim.evalkit import bundled_descriptor_path
from wsnsim.scenario import MeshScenario, PingScenario, save_scenario


@pytest.fixture()
def ping_file(tmp_path):
    path = tmp_path / "ping.yaml"
    save_scenario(PingScenario(duration_s=5.0, seed=2), str(path))
    return str(path)


class TestRunCommand:
    def test_run_writes_csvs_and_reports_success(self, ping_file, tmp_path, capsys):
        out = tmp_path / "out"
        assert main(["run", ping_file, "--out", str(out)]) == 0
        captured = capsys.readouterr().out
        assert "events" in captured
        assert (out / "runs.csv").exists()
        assert (out / "energy.csv").exists()
        assert (out / "report.txt").exists()

    def test_run_honors_seed_and_model(self, ping_file, tmp_path, capsys):
        out = tmp_path / "out"
        assert main(["run", ping_file, "--seed", "9", "--model", "hier",
                     "--out", str(out)]) == 0
        assert "_hier_s9" in capsys.readouterr().out

    def test_missing_scenario_file_fails_with_diagnostic(self, tmp_path, capsys):
        code = main(["run", str(tmp_path / "absent.yaml"), "--out", str(tmp_path)])
        assert code != 0
        assert "error:" in capsys.readouterr().err

    def test_invalid_scenario_fails_with_field_diagnostic(self, tmp_path, capsys):
        bad = tmp_path / "bad.yaml"
        bad.write_text("kind: ping\npayload_bytes: 12\n", encoding="utf-8")
        code = main(["run", str(bad), "--out", str(tmp_path / "o")])
        assert code != 0
        assert "payload" in capsys.readouterr().err

    def test_env_var_overrides_output_dir(self, ping_file, tmp_path, monkeypatch, capsys):
        env_dir = tmp_path / "from-env"
        monkeypatch.setenv("WSNSIM_OUT", str(env_dir))
        assert main(["run", ping_file]) == 0
        assert (env_dir / "runs.csv").exists()


class TestBenchCommand:
    def test_bench_scale_small(self, tmp_path, capsys):
        out = tmp_path / "bench"
        assert main(["bench-scale", "--bc", "1,2", "--out", str(out)]) == 0
        lines = capsys.readouterr().out
        assert "nodes=   4" in lines and "nodes=   8" in lines
        assert (out / "runs.csv").exists()


class TestSweepCommand:
    def test_small_sweep(self, tmp_path, capsys):
        out = tmp_path / "sweep"
        assert main(["sweep-energy", "--protocols", "dot11b/ns2",
                     "--payloads", "10,20", "--freqs", "1", "--out", str(out)]) == 0
        assert "2 runs" in capsys.readouterr().out
        runs = (out / "runs.csv").read_text().strip().split("\n")
        assert len(runs) == 3  # header + 2 rows


class TestReportCommand:
    def test_report_renders_emitted_directory(self, ping_file, tmp_path, capsys):
        out = tmp_path / "out"
        main(["run", ping_file, "--out", str(out)])
        capsys.readouterr()
        assert main(["report", str(out)]) == 0
        assert "== runs ==" in capsys.readouterr().out

    def test_report_on_missing_dir_fails(self, tmp_path, capsys):
        assert main(["report", str(tmp_path / "void")]) != 0
        assert "error:" in capsys.readouterr().err


class TestDescribeCommand:
    def test_validate_bundled_descriptor(self, capsys):
        path = str(bundled_descriptor_path("ns2"))
        assert main(["describe", "validate", path]) == 0
        assert "NS2" in capsys.readouterr().out

    def test_validate_rejects_bad_descriptor(self, tmp_path, capsys):
        good = bundled_descriptor_path("ns2").read_text()
        bad = tmp_path / "bad.yaml"
        bad.write_text(good.replace("nature: simulator", "nature: dream"), encoding="utf-8")
        assert main(["describe", "validate", str(bad)]) != 0
        assert "nature" in capsys.readouterr().err

    def test_compare_prints_matrix(self, capsys):
        files = [str(bundled_descriptor_path(n)) for n in ("ns2", "tossim")]
        assert main(["describe", "compare", *files]) == 0
        out = capsys.readouterr().out
        assert "Criterion" in out
        assert "Energy model" in out

    def test_compare_single_descriptor_fails(self, capsys):
        path = str(bundled_descriptor_path("ns2"))
        assert main(["describe", "compare", path]) != 0
        assert "two" in capsys.readouterr().err

    def test_compare_writes_to_file(self, tmp_path, capsys):
        files = [str(bundled_descriptor_path(n)) for n in ("ns2", "omnetpp-inet")]
        target = tmp_path / "matrix.txt"
        assert main(["describe", "compare", *files, "--out", str(target)]) == 0
        assert target.read_text().startswith("Criterion")
