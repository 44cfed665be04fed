"""CLI commands, exit codes, and machine-readable failure output."""

import json
import shutil
import subprocess
import sys

import pytest

from gddforge.cli import main

from conftest import FIXTURES, TABLE2_AVG, TABLE2_CELLS


def run_cli(args, capsys):
    code = main(list(args))
    out, err = capsys.readouterr()
    return code, out, err


@pytest.fixture
def jobs_dir(tmp_path):
    return str(tmp_path / "jobs")


def _ingest(capsys, jobs_dir, name="platformer"):
    code, out, _ = run_cli(
        ["--jobs-dir", jobs_dir, "ingest", str(FIXTURES / "gdds" / f"{name}.md")], capsys
    )
    assert code == 0
    return json.loads(out)["job_id"]


def test_ingest_then_spec(capsys, jobs_dir):
    job_id = _ingest(capsys, jobs_dir)
    code, out, _ = run_cli(["--jobs-dir", jobs_dir, "spec", job_id], capsys)
    assert code == 0
    spec = json.loads(out)
    assert spec["title"] == "Sky Hopper"


def test_spec_edit_from_file(capsys, jobs_dir, tmp_path):
    job_id = _ingest(capsys, jobs_dir)
    _, out, _ = run_cli(["--jobs-dir", jobs_dir, "spec", job_id], capsys)
    spec = json.loads(out)
    spec["title"] = "Renamed"
    edited = tmp_path / "edited.json"
    edited.write_text(json.dumps(spec))
    code, out, _ = run_cli(["--jobs-dir", jobs_dir, "spec", job_id, "--edit", str(edited)], capsys)
    assert code == 0
    assert json.loads(out)["title"] == "Renamed"


def test_plan_select_generate_package(capsys, jobs_dir, tmp_path):
    job_id = _ingest(capsys, jobs_dir)
    code, out, _ = run_cli(["--jobs-dir", jobs_dir, "plan", job_id], capsys)
    assert code == 0
    plan = json.loads(out)
    assert any(r["class_name"] == "PlayerController" for r in plan["requirements"])

    code, out, _ = run_cli(
        ["--jobs-dir", jobs_dir, "select", job_id, "player_controller", "off"], capsys
    )
    assert code == 0
    assert "combat_system" in json.loads(out)["cascade"]
    code, _, _ = run_cli(["--jobs-dir", jobs_dir, "select", job_id, "player_controller", "on"], capsys)
    assert code == 0

    out_dir = tmp_path / "template"
    code, out, _ = run_cli(
        ["--jobs-dir", jobs_dir, "generate", job_id, "--backend", "mock", "--out", str(out_dir)],
        capsys,
    )
    assert code == 0
    result = json.loads(out)
    assert result["state"] == "packaged"
    assert len(result["generated"]) == 10
    assert (out_dir / "manifest.json").is_file()


def test_generate_twice_identical_digests(capsys, jobs_dir, tmp_path):
    digests = []
    for run in range(2):
        job_id = _ingest(capsys, jobs_dir + str(run))
        run_cli(["--jobs-dir", jobs_dir + str(run), "plan", job_id], capsys)
        out_dir = tmp_path / f"t{run}"
        code, out, _ = run_cli(
            ["--jobs-dir", jobs_dir + str(run), "generate", job_id, "--backend", "mock",
             "--out", str(out_dir)],
            capsys,
        )
        assert code == 0
        digests.append(json.loads(out)["package"]["template_digest"])
    assert digests[0] == digests[1]


def test_validate_clean_directory(capsys):
    code, out, _ = run_cli(["validate", str(FIXTURES / "csharp" / "good")], capsys)
    assert code == 0
    report = json.loads(out)
    assert all(f["structural_ok"] for f in report["files"])


def test_validate_broken_directory_exit_2_names_file(capsys, tmp_path):
    target = tmp_path / "mix"
    target.mkdir()
    shutil.copy(FIXTURES / "csharp" / "good" / "HealthSystem.cs", target / "HealthSystem.cs")
    shutil.copy(FIXTURES / "csharp" / "broken" / "unbalanced_braces.cs", target / "Broken.cs")
    code, out, err = run_cli(["validate", str(target)], capsys)
    assert code == 2
    failure = json.loads(err)
    assert failure["error"] == "validation_failed"
    assert any("Broken.cs" in f for f in failure["detail"]["files"])
    report = json.loads(out)
    assert any(not f["structural_ok"] for f in report["files"])


def test_eval_table_output_matches_published_averages(capsys):
    code, out, _ = run_cli(
        ["eval", str(FIXTURES / "table2_scores.csv"), "--format", "table_text",
         "--model-order", ",".join(TABLE2_CELLS)],
        capsys,
    )
    assert code == 0
    lines = out.splitlines()
    avgs = tuple(float(line.split()[-1]) for line in lines[2:7])
    assert avgs == TABLE2_AVG


def test_eval_radar_csv(capsys):
    code, out, _ = run_cli(
        ["eval", str(FIXTURES / "table2_scores.csv"), "--format", "radar_csv"], capsys
    )
    assert code == 0
    assert out.splitlines()[0] == "model,compilation,adherence,best_practices,modularity"


def test_export_pairs(capsys, jobs_dir, tmp_path):
    job_id = _ingest(capsys, jobs_dir)
    run_cli(["--jobs-dir", jobs_dir, "plan", job_id], capsys)
    run_cli(["--jobs-dir", jobs_dir, "generate", job_id, "--backend", "mock"], capsys)
    out_file = tmp_path / "pairs.jsonl"
    code, _, _ = run_cli(
        ["--jobs-dir", jobs_dir, "export-pairs", job_id, "--out", str(out_file)], capsys
    )
    assert code == 0
    record = json.loads(out_file.read_text().splitlines()[0])
    assert "Sky Hopper" in record["prompt"]
    assert "// ──── FILE: PlayerController.cs ────" in record["response"]


# --- exit codes ---------------------------------------------------------------


def test_usage_error_exit_1(capsys):
    code, _, err = run_cli(["frobnicate"], capsys)
    assert code == 1
    assert json.loads(err)["error"] in ("usage_error", "cli_error")


def test_unknown_job_validation_exit_2(capsys, jobs_dir):
    code, _, err = run_cli(["--jobs-dir", jobs_dir, "spec", "missing"], capsys)
    assert code == 2
    assert json.loads(err)["error"] == "unknown_job"


def test_backend_failure_exit_3(capsys, jobs_dir, monkeypatch):
    job_id = _ingest(capsys, jobs_dir)
    run_cli(["--jobs-dir", jobs_dir, "plan", job_id], capsys)
    import gddforge.cli as cli_mod
    from gddforge.errors import BackendError

    def explode(spec, plan, cfg):
        raise BackendError("backend is gone")

    monkeypatch.setattr(cli_mod, "generate_all", explode)
    code, _, err = run_cli(["--jobs-dir", jobs_dir, "generate", job_id], capsys)
    assert code == 3
    assert json.loads(err)["error"] == "backend_error"


def test_io_error_exit_4(capsys, jobs_dir, tmp_path):
    job_id = _ingest(capsys, jobs_dir)
    run_cli(["--jobs-dir", jobs_dir, "plan", job_id], capsys)
    out_dir = tmp_path / "occupied"
    out_dir.mkdir()
    (out_dir / "keep.txt").write_text("here first")
    run_cli(["--jobs-dir", jobs_dir, "generate", job_id, "--out", str(out_dir)], capsys)
    code, _, err = run_cli(
        ["--jobs-dir", jobs_dir, "generate", job_id, "--out", str(out_dir)], capsys
    )
    # second write without --overwrite refuses: package_exists is an io failure
    assert code == 4
    assert json.loads(err)["error"] == "package_exists"


def test_console_entrypoint_runs():
    proc = subprocess.run(
        [sys.executable, "-m", "gddforge.cli", "--help"], capture_output=True, text=True
    )
    assert proc.returncode == 0
    assert "gddforge" in proc.stdout
