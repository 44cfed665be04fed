"""Acceptance suite: one test per exit criterion, each printing PASS/FAIL.

Everything runs against the mock backend; no network, no UI.
"""

import random
import time

import pytest
from fastapi.testclient import TestClient

from gddforge.analyze import analyze, set_selection
from gddforge.backend import BackendConfig
from gddforge.config import AppConfig
from gddforge.csharp import check_structure, reconstruct, tokenize
from gddforge.docgen import generate_docs, new_manifest, write_package
from gddforge.evalharness import aggregate, ingest_scores
from gddforge.gamespec import extract_spec, validate_spec
from gddforge.generate import GeneratedScript, generate_all
from gddforge.jobstore import JobStore
from gddforge.scoring import CRITERIA, compilation_score, score_script
from gddforge.service import create_app
from gddforge.util import load_data_file

from conftest import (
    BROKEN_CS,
    GOOD_CS,
    TABLE2_AVG,
    TABLE2_CELLS,
    load_gdd,
    random_gamespec,
    table2_csv,
)
from test_csharp import EXPECTED_BROKEN


def _report(name: str, ok: bool, detail: str = ""):
    print(f"{'PASS' if ok else 'FAIL'}  {name}" + (f"  ({detail})" if detail else ""))
    assert ok, f"{name}: {detail}"


# --- criterion 1: score-table reproduction ---------------------------------------


def test_acceptance_score_table_reproduction():
    start = time.monotonic()
    records = ingest_scores(table2_csv())
    report = aggregate(records)
    elapsed = time.monotonic() - start
    avgs = tuple(report.per_model[m]["overall"] for m in TABLE2_CELLS)
    _report(
        "score-table reproduction",
        avgs == TABLE2_AVG and elapsed < 1.0,
        f"avg column {avgs}, {elapsed * 1000:.0f}ms",
    )


# --- criterion 2: end-to-end determinism over the three fixture GDDs ----------------


def _run_pipeline(gdd_name: str, out_dir):
    sectioned = load_gdd(gdd_name)
    spec = extract_spec(sectioned)
    plan = analyze(spec)
    report = generate_all(spec, plan, BackendConfig(kind="mock"))
    assert report.ok
    docs = generate_docs(plan, list(report.scripts))
    manifest = write_package(
        out_dir, list(report.scripts), docs, new_manifest(spec.digest(), plan.digest(), "mock"), plan
    )
    files = {
        str(p.relative_to(out_dir)): p.read_bytes()
        for p in sorted(out_dir.rglob("*"))
        if p.is_file() and p.name != "manifest.json"
    }
    return manifest.template_digest, files


def test_acceptance_end_to_end_determinism(tmp_path):
    all_ok = True
    details = []
    for name in ("platformer", "action_rpg", "puzzle"):
        start = time.monotonic()
        digest1, files1 = _run_pipeline(name, tmp_path / f"{name}-1")
        digest2, files2 = _run_pipeline(name, tmp_path / f"{name}-2")
        elapsed = time.monotonic() - start
        ok = digest1 == digest2 and files1 == files2 and elapsed < 20.0
        all_ok &= ok
        details.append(f"{name}: {digest1[:10]} x2 in {elapsed:.2f}s")
    _report("end-to-end determinism (3 fixture GDDs)", all_ok, "; ".join(details))


# --- criterion 3: plan properties on randomized specs ---------------------------------


def test_acceptance_plan_properties():
    rng = random.Random(424242)
    checked = 0
    for _ in range(200):
        spec = random_gamespec(rng)
        plan = analyze(spec)

        # acyclic + brute-force-valid topological order
        order = list(plan.generation_order)
        pos = {sid: i for i, sid in enumerate(order)}
        assert set(order) == plan.effective_selected()
        for f, t in plan.edges:
            if f in pos and t in pos:
                assert pos[t] < pos[f], (f, t)

        # closure holds through 20 random toggles
        ids = [r.script_id for r in plan.requirements]
        for _ in range(20):
            plan, _ = set_selection(plan, rng.choice(ids), rng.random() < 0.5)
            effective = plan.effective_selected()
            for node in effective:
                for dep in plan.dependencies_of(node):
                    assert dep in effective
            assert set(plan.generation_order) == effective
        checked += 1
    _report("plan properties (200 random specs, 20 toggles each)", checked == 200)


# --- criteria 4+5: validator totality, round-trip, corpora, proxy bounds ----------------


def _fuzz_corpus(n: int = 10000) -> list[str]:
    rng = random.Random(31337)
    seeds = [p.read_text() for p in GOOD_CS[:3]]
    corpus = []
    for i in range(n):
        kind = i % 4
        if kind == 0:  # random unicode
            length = rng.randint(0, 200)
            corpus.append("".join(chr(rng.randint(1, 0x2FF)) for _ in range(length)))
        elif kind == 1:  # random bytes via latin-1
            corpus.append(bytes(rng.randrange(256) for _ in range(rng.randint(0, 200))).decode("latin-1"))
        elif kind == 2:  # printable soup with C#-ish punctuation
            corpus.append(
                "".join(rng.choice(' {}()[];"\'/\\*@$_=<>abcdexyz\n\t') for _ in range(rng.randint(0, 220)))
            )
        else:  # mutated real code
            src = rng.choice(seeds)
            start = rng.randrange(len(src))
            corpus.append(src[start : start + rng.randint(0, 240)])
    return corpus


@pytest.fixture(scope="module")
def fuzz_corpus():
    return _fuzz_corpus()


def test_acceptance_validator_totality_and_round_trip(fuzz_corpus):
    for src in fuzz_corpus:
        tokens = tokenize(src)  # must not raise
        assert reconstruct(tokens) == src
        check_structure(src)  # must not raise either
    _report("validator totality + round-trip", True, f"{len(fuzz_corpus)} fuzz inputs")


def test_acceptance_golden_corpus_clean():
    assert len(GOOD_CS) >= 10
    bad = []
    for path in GOOD_CS:
        errors = [f for f in check_structure(path.read_text()) if f.severity == "error"]
        if errors:
            bad.append((path.name, [f.code for f in errors]))
    _report(f"golden corpus clean ({len(GOOD_CS)} known-good scripts)", not bad, str(bad))


def test_acceptance_broken_corpus_expected_codes():
    assert len(BROKEN_CS) >= 10
    missing = []
    for path in BROKEN_CS:
        codes = {f.code for f in check_structure(path.read_text()) if f.severity == "error"}
        if EXPECTED_BROKEN[path.name] not in codes:
            missing.append((path.name, EXPECTED_BROKEN[path.name], codes))
    _report(f"broken corpus expected findings ({len(BROKEN_CS)} scripts)", not missing, str(missing))


def test_acceptance_proxy_bounds_and_monotonicity(fuzz_corpus):
    spec = extract_spec(load_gdd("platformer"))
    plan = analyze(spec)
    weights = load_data_file("proxy_weights.json")

    for src in fuzz_corpus:
        script = GeneratedScript(
            script_id="game_manager", class_name="GameManager",
            source=src or "x", file_name="GameManager.cs",
        )
        report = score_script(script, spec, plan, weights)
        assert set(report.proxy_scores) == set(CRITERIA)
        for value in report.proxy_scores.values():
            assert 0.0 <= value <= 5.0, (value, src[:40])

    # monotonicity: one extra error finding never raises the compilation proxy
    from gddforge.csharp import Finding

    rng = random.Random(99)
    codes = list(weights["compilation"]["error_weights"])
    for _ in range(500):
        findings = [Finding("error", rng.choice(codes), 1, "") for _ in range(rng.randint(0, 8))]
        base = compilation_score(findings, weights)
        extra = compilation_score(findings + [Finding("error", rng.choice(codes), 1, "")], weights)
        assert extra <= base
    _report("proxy bounds + compilation monotonicity", True, f"{len(fuzz_corpus)} scored inputs")


# --- criterion 6: skip closure under exhaustive fault injection ---------------------------


def test_acceptance_skip_closure_exhaustive():
    spec = extract_spec(load_gdd("platformer"))
    plan = analyze(spec)
    failures = []
    for req in plan.requirements:
        cfg = BackendConfig(kind="mock", fail_classes=(req.class_name,))
        report = generate_all(spec, plan, cfg)
        failed = {sid for sid, _, _ in report.failed}
        skipped = {sid for sid, _ in report.skipped}
        expected = plan.transitive_dependents(req.script_id) & plan.effective_selected()
        if failed != {req.script_id} or skipped != expected:
            failures.append((req.script_id, failed, skipped, expected))
    _report(
        f"skip closure (fault-injecting each of {len(plan.requirements)} scripts)",
        not failures,
        str(failures),
    )


# --- criterion 7: schema round-trip on 1000 generated specs ---------------------------------


def test_acceptance_schema_round_trip_1000():
    rng = random.Random(1000003)
    for _ in range(1000):
        spec = random_gamespec(rng)
        serialized = spec.to_json()
        revalidated = validate_spec(serialized)
        assert revalidated == spec
        assert revalidated.to_json() == serialized
    _report("schema round-trip (1000 generated specs)", True)


# --- criterion 8: service state machine + crash recovery --------------------------------------


def test_acceptance_service_state_machine(tmp_path):
    from test_service import ALLOWED, _job_in_state, _state_actions

    cfg = AppConfig(jobs_dir=str(tmp_path / "jobs"), backend=BackendConfig(kind="mock"))
    violations = []
    with TestClient(create_app(cfg)) as client:
        for state, allowed in ALLOWED.items():
            job_id = _job_in_state(client, cfg, state)
            for name, act in _state_actions(client, job_id).items():
                if name in allowed:
                    continue
                resp = act()
                if resp.status_code != 409:
                    violations.append((state, name, resp.status_code))

        # crash during generating: reload -> failed + resumable -> regenerate
        from test_service import _to_plan_ready

        job_id = _to_plan_ready(client)
        store = JobStore(cfg.jobs_dir)
        job = store.load(job_id)
        job.state = "generating"
        store._save(job)

    with TestClient(create_app(cfg)) as client:
        job = client.get(f"/jobs/{job_id}").json()
        recovered = job["state"] == "failed" and job["resumable"] is True
        resumed = client.post(f"/jobs/{job_id}/generate", json={}).status_code == 202
        if not (recovered and resumed):
            violations.append(("crash-recovery", job["state"], job["resumable"]))
        deadline = time.monotonic() + 10
        while time.monotonic() < deadline:
            if client.get(f"/jobs/{job_id}").json()["state"] == "validated":
                break
            time.sleep(0.02)
        else:
            violations.append(("resume-never-validated",))

    _report("service state machine + crash recovery", not violations, str(violations))
