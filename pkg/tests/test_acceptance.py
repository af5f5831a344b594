"""Acceptance gate: one PASS/FAIL line per launch criterion.

Run with `pytest tests/test_acceptance.py -v -s` to see the checklist. Each
test prints exactly one PASS or FAIL line for its criterion and then asserts,
so a red gate always names what broke and by how much.
"""

import math
import time
from statistics import fmean

import numpy as np
import pytest
from fastapi.testclient import TestClient

import oracles
from helpers import (
    LEADERBOARD_FIXTURE,
    ScriptedCaptioner,
    TableEmbedder,
    TableFaceAnalyzer,
    constant_video,
    fixture_suite_results,
    make_record,
    payload_video,
    single_item_set,
    write_fixture_tree,
)
from videval.alignment import (
    AspectLabel,
    HumanRating,
    aggregate_ratings,
    evaluate_alignment,
    fit_alignment,
    kendall,
    spearman,
)
from videval.annotation import AnnotationStore, Study, create_app
from videval.backends.mocks import MockDetector, MockReferenceSource, mock_registry
from videval.cli import main as cli_main
from videval.kernels import (
    bleu,
    char_error_rate,
    inception_score,
    normalized_edit_distance,
    word_error_rate,
)
from videval.metrics import (
    MetricResult,
    blip_bleu,
    celebrity_id_score,
    clip_score,
    clip_temp,
    color_score,
    count_score,
    detection_score,
    face_consistency,
    flow_score,
    motion_ac_score,
    sd_score,
    warping_error,
)
from videval.suite import SuiteResult, load_suite_result


def _report(name: str, ok: bool, detail: str = "") -> None:
    suffix = f" — {detail}" if detail else ""
    print(f"{'PASS' if ok else 'FAIL'}: {name}{suffix}")
    assert ok, f"{name}{suffix}"


# ---------------------------------------------------------------------------
# Criterion 1: text/rank/regression kernels agree with independent
# brute-force oracles on randomized inputs (|diff| <= 1e-9, < 30 s).


def test_math_kernels_match_independent_oracles():
    start = time.perf_counter()
    rng = np.random.default_rng(20240817)
    vocab = np.array(
        ["the", "a", "red", "dog", "cat", "runs", "sits", "park", "fast", "blue", "bird", "sky"]
    )
    worst = 0.0
    cases = {"bleu": 0, "wer": 0, "cer": 0, "ned": 0, "spearman": 0, "kendall": 0, "ols": 0}

    def close(kind: str, got: float, want: float) -> bool:
        nonlocal worst
        diff = abs(got - want)
        worst = max(worst, diff)
        cases[kind] += 1
        return diff <= 1e-9

    ok = True
    for _ in range(60):
        reference = " ".join(rng.choice(vocab, size=int(rng.integers(1, 13))))
        hypothesis = " ".join(rng.choice(vocab, size=int(rng.integers(0, 13))))
        ok &= close("bleu", bleu(reference, hypothesis), oracles.bleu_oracle(reference, hypothesis))
        ok &= close("wer", word_error_rate(reference, hypothesis), oracles.wer_oracle(reference, hypothesis))
        ok &= close("cer", char_error_rate(reference, hypothesis), oracles.cer_oracle(reference, hypothesis))
        ok &= close(
            "ned",
            normalized_edit_distance(reference, hypothesis),
            oracles.ned_oracle(reference, hypothesis),
        )

    for _ in range(60):
        n = int(rng.integers(3, 41))
        x = rng.integers(0, 6, size=n).astype(float)  # integer grid forces ties
        y = rng.integers(0, 6, size=n).astype(float)
        if np.all(x == x[0]):
            x[0] += 1.0
        if np.all(y == y[0]):
            y[0] += 1.0
        ok &= close("spearman", spearman(x, y), oracles.spearman_oracle(x, y))
        ok &= close("kendall", kendall(x, y), oracles.kendall_oracle(x, y))

    metric_pool = ("sd_score", "clip_score", "blip_bleu")
    for case in range(50):
        n = int(rng.integers(8, 41))
        k = int(rng.integers(1, 4))
        design = rng.uniform(0.0, 1.0, size=(n, k))
        coefficients = rng.uniform(-0.5, 0.5, size=k)
        raw = design @ coefficients + rng.uniform(0.0, 0.3) + rng.normal(0.0, 0.05, size=n)
        low, high = raw.min(), raw.max()
        if high - low < 1e-9:
            raw[0] += 1.0
            low, high = raw.min(), raw.max()
        target = 0.05 + 0.9 * (raw - low) / (high - low)

        metric_ids = metric_pool[:k]
        prompts = [f"p-{i:04d}" for i in range(n)]
        results = {
            metric_id: MetricResult(
                metric_id=metric_id,
                per_video={p: float(design[i, j]) for i, p in enumerate(prompts)},
                aggregate=fmean(float(design[i, j]) for i in range(n)),
                direction="higher_better",
                applicable_count=n,
            )
            for j, metric_id in enumerate(metric_ids)
        }
        labels = [
            AspectLabel(model_id="gen", prompt_id=p, aspect="tv_alignment", value=float(target[i]))
            for i, p in enumerate(prompts)
        ]
        model = fit_alignment(
            labels,
            {"gen": SuiteResult(model_id="gen", results=results)},
            seed=case,
            train_size=n,
            holdout_size=0,
            aspect_metrics={"tv_alignment": metric_ids},
        )
        fitted = np.array([*model.aspects["tv_alignment"].coefficients, model.aspects["tv_alignment"].intercept])
        expected = oracles.ols_oracle(design, target)
        diff = float(np.max(np.abs(fitted - expected)))
        worst = max(worst, diff)
        cases["ols"] += 1
        ok &= diff <= 1e-9

    elapsed = time.perf_counter() - start
    ok &= elapsed < 30.0
    ok &= all(count >= 50 for count in cases.values())
    _report(
        "kernel-oracle agreement",
        ok,
        f"{sum(cases.values())} randomized cases, max |diff| {worst:.2e}, {elapsed:.1f}s",
    )


# ---------------------------------------------------------------------------
# Criterion 2: per-metric frame aggregation reproduces hand arithmetic
# exactly on two- and three-frame fixtures.

PROMPT = "a red dog runs in a park"
VECTORS = {
    PROMPT: [1.0, 0.0],
    "a red dog": [1.0, 0.0],
    "same": [1.0, 0.0],
    "cos06": [3.0, 4.0],
    "cos08": [4.0, 3.0],
    "ortho": [0.0, 1.0],
}


def _tagged(tags, prompt_id="animal-0001"):
    return payload_video([{"tag": t} for t in tags], prompt_id=prompt_id)


def _objects_video(frames_objects, prompt_id="animal-0001"):
    return payload_video([{"objects": list(objs)} for objs in frames_objects], prompt_id=prompt_id)


def test_frame_aggregation_matches_hand_arithmetic():
    embedder = TableEmbedder(VECTORS)
    checks: list[tuple[str, float, float]] = []

    # Prompt-to-frame embedding similarity, two frames.
    result = clip_score(single_item_set(make_record(text=PROMPT), _tagged(["cos08", "cos06"])), embedder)
    checks.append(("prompt-frame similarity", result.aggregate, (0.8 + 0.6) / 2))

    # Frame-by-reference similarity grid, two frames x two references.
    refs = MockReferenceSource(
        prompt_refs={
            "animal-0001": tuple(
                payload_video([{"tag": t, "ref": i}]).frames[0] for i, t in enumerate(["same", "ortho"])
            )
        }
    )
    result = sd_score(single_item_set(make_record(text=PROMPT), _tagged(["cos06", "ortho"])), embedder, refs)
    checks.append(
        ("reference-grid similarity", result.aggregate, ((0.6 + 0.8) / 2 + (0.0 + 1.0) / 2) / 2)
    )

    # Caption overlap with brevity penalty, two captions.
    result = blip_bleu(
        single_item_set(make_record(text="a red dog"), _tagged(["same"])),
        ScriptedCaptioner(["a red dog", "red dog"]),
        caption_count=2,
    )
    checks.append(("caption overlap", result.aggregate, (1.0 + math.exp(-0.5)) / 2))

    # Object presence across three frames: hit, hit, miss.
    record = make_record(objects=({"name": "dog", "count": 1},))
    video = _objects_video([[{"name": "dog", "count": 1}], [{"name": "dog", "count": 1}], []])
    checks.append(("object presence", detection_score(single_item_set(record, video), MockDetector()).aggregate, 2 / 3))

    # Count accuracy: target 2, per-frame counts [2, 2, 1, 2].
    record = make_record(objects=({"name": "dog", "count": 2},))
    video = _objects_video([[{"name": "dog", "count": c}] for c in (2, 2, 1, 2)])
    checks.append(("count accuracy", count_score(single_item_set(record, video), MockDetector()).aggregate, 0.875))

    # Color accuracy: match then mismatch.
    record = make_record(objects=({"name": "dog", "count": 1, "color": "red"},))
    video = _objects_video(
        [[{"name": "dog", "count": 1, "color": "red"}], [{"name": "dog", "count": 1, "color": "blue"}]]
    )
    checks.append(("color accuracy", color_score(single_item_set(record, video), MockDetector()).aggregate, 0.5))

    # Face-identity distance: min over gallery per frame, mean over frames.
    record = make_record("human-0001", meta_class="human", celebrity="famous_person_a")
    video = payload_video([{"face": "fa"}, {"face": "fb"}], prompt_id="human-0001")
    gallery = MockReferenceSource(
        celeb_refs={"famous_person_a": tuple(payload_video([{"face": g}]).frames[0] for g in ("g1", "g2"))}
    )
    analyzer = TableFaceAnalyzer(
        {("fa", "g1"): 0.25, ("fa", "g2"): 0.5, ("fb", "g1"): 1.0, ("fb", "g2"): 0.75}
    )
    checks.append(
        ("face-identity distance", celebrity_id_score(single_item_set(record, video), analyzer, gallery).aggregate, (0.25 + 0.75) / 2)
    )

    # Consecutive-frame embedding similarity over three frames.
    result = clip_temp(single_item_set(make_record(), _tagged(["cos06", "cos08", "cos08"])), embedder)
    checks.append(("consecutive-frame similarity", result.aggregate, (24 / 25 + 1.0) / 2))

    # Later-frames-to-first consistency over three frames.
    result = face_consistency(single_item_set(make_record(), _tagged(["same", "cos06", "same"])), embedder)
    checks.append(("first-frame consistency", result.aggregate, (0.6 + 1.0) / 2))

    mismatches = [(name, got, want) for name, got, want in checks if got != want]
    _report(
        "frame-aggregation hand fixtures",
        not mismatches,
        f"{len(checks) - len(mismatches)}/{len(checks)} exact" + (f"; first mismatch {mismatches[0]}" if mismatches else ""),
    )


# ---------------------------------------------------------------------------
# Criterion 3: a constant video is perfectly stable under every temporal
# metric (tolerance 1e-6).


def test_constant_video_invariants():
    registry = mock_registry()
    record = make_record(amplitude="small")
    item_set = single_item_set(record, constant_video(n=3))
    observed = {
        "warping_error": warping_error(item_set, registry.flow_estimator).aggregate,
        "clip_temp": clip_temp(item_set, registry.text_image_embedder).aggregate,
        "face_consistency": face_consistency(item_set, registry.text_image_embedder).aggregate,
        "flow_score": flow_score(item_set, registry.flow_estimator).aggregate,
        "motion_ac_score": motion_ac_score(item_set, registry.flow_estimator).aggregate,
    }
    expected = {
        "warping_error": 0.0,
        "clip_temp": 1.0,
        "face_consistency": 1.0,
        "flow_score": 0.0,
        "motion_ac_score": 1.0,  # zero motion classifies as small, matching the record
    }
    deltas = {name: abs(observed[name] - expected[name]) for name in expected}
    ok = all(delta <= 1e-6 for delta in deltas.values())
    _report(
        "constant-video invariants",
        ok,
        ", ".join(f"{name}={observed[name]:.8f}" for name in sorted(observed)),
    )


# ---------------------------------------------------------------------------
# Criterion 4: analytic distribution-diversity cases (tolerance 1e-6).


def test_inception_score_analytic_cases():
    identical = inception_score(np.full((8, 4), 0.25))
    one_hot_k = {k: inception_score(np.eye(k)) for k in (2, 3, 5, 10)}
    ok = abs(identical - 1.0) <= 1e-6 and all(abs(one_hot_k[k] - k) <= 1e-6 for k in one_hot_k)
    _report(
        "diversity-score analytic cases",
        ok,
        f"identical-rows={identical:.8f}, one-hot K={{{', '.join(f'{k}:{v:.6f}' for k, v in one_hot_k.items())}}}",
    )


# ---------------------------------------------------------------------------
# Criterion 5: replaying the published five-model fixture reproduces every
# recorded first place exactly.


def test_leaderboard_fixture_first_places():
    from videval.reporting import build_leaderboard

    board = build_leaderboard(fixture_suite_results())
    rows = {row.model_id: row for row in board.rows}
    expectations = [
        ("vqa_technical", "m5", 10.13),
        ("inception_score", "m1", 15.99),
        ("clip_score", "m3", 21.15),
        ("color_score", "m2", 46.35),
        ("clip_temp", "m4", 99.97),
        ("warping_error", "m5", 58.19),
    ]
    failures = []
    for metric_id, expected_model, expected_value in expectations:
        leader = next(model for model, row in rows.items() if row.ranks[metric_id] == 1)
        value = rows[leader].metrics[metric_id]
        if leader != expected_model or value != expected_value:
            failures.append((metric_id, leader, value))
    # The fixture table itself must be the one loaded into the rows.
    for model_id, aggregates in LEADERBOARD_FIXTURE.items():
        for metric_id, expected_value in aggregates.items():
            if rows[model_id].metrics[metric_id] != expected_value:
                failures.append((metric_id, model_id, rows[model_id].metrics[metric_id]))
    _report(
        "five-model fixture first places",
        not failures,
        "6/6 leaders exact" if not failures else f"mismatches: {failures[:3]}",
    )


# ---------------------------------------------------------------------------
# Criterion 6: the fitted linear combination tracks synthetic labels at
# least as well as the average-of-metrics baseline, and recovers exact
# coefficients when the labels are noiseless.

ASPECT = "tv_alignment"
PAIR = ("sd_score", "clip_score")


def _label_dataset(seed: int, noise_sd: float):
    rng = np.random.default_rng(seed)
    prompts = [f"p-{i:04d}" for i in range(500)]
    a = rng.uniform(0.1, 0.9, size=500)
    b = rng.uniform(0.1, 0.9, size=500)
    values = 0.7 * a + 0.3 * b
    if noise_sd > 0.0:
        values = np.clip(values + rng.normal(0.0, noise_sd, size=500), 0.0, 1.0)
    results = {}
    for metric_id, column in zip(PAIR, (a, b)):
        per_video = {p: float(v) for p, v in zip(prompts, column)}
        results[metric_id] = MetricResult(
            metric_id=metric_id,
            per_video=per_video,
            aggregate=fmean(per_video.values()),
            direction="higher_better",
            applicable_count=500,
        )
    labels = [
        AspectLabel(model_id="gen", prompt_id=p, aspect=ASPECT, value=float(v))
        for p, v in zip(prompts, values)
    ]
    return labels, {"gen": SuiteResult(model_id="gen", results=results)}


def test_fitted_alignment_beats_average_baseline():
    wins = 0
    for seed in range(100):
        labels, suites = _label_dataset(31_000 + seed, noise_sd=0.02)
        model = fit_alignment(
            labels, suites, seed=seed, train_size=300, holdout_size=200, aspect_metrics={ASPECT: PAIR}
        )
        entries = evaluate_alignment(model, labels, suites).aspects[ASPECT]
        if entries["fitted"][0] >= entries["average"][0]:
            wins += 1

    labels, suites = _label_dataset(77, noise_sd=0.0)
    model = fit_alignment(labels, suites, seed=0, train_size=300, holdout_size=200, aspect_metrics={ASPECT: PAIR})
    aspect_model = model.aspects[ASPECT]
    coefficient_error = max(
        abs(aspect_model.coefficients[0] - 0.7),
        abs(aspect_model.coefficients[1] - 0.3),
        abs(aspect_model.intercept),
    )
    noiseless_rho = evaluate_alignment(model, labels, suites).aspects[ASPECT]["fitted"][0]

    ok = wins >= 95 and coefficient_error <= 1e-6 and abs(noiseless_rho - 1.0) <= 1e-9
    _report(
        "fitted-combination alignment",
        ok,
        f"fitted >= average on {wins}/100 seeds; noiseless coefficient error {coefficient_error:.1e}; "
        f"noiseless holdout rho {noiseless_rho:.10f}",
    )


# ---------------------------------------------------------------------------
# Criterion 7: two full mock pipeline runs over the 12-prompt fixture tree
# finish inside five minutes and produce byte-identical result files.


def test_mock_pipeline_runs_are_byte_reproducible(tmp_path):
    start = time.perf_counter()
    tree = write_fixture_tree(tmp_path / "tree")
    outputs = []
    exit_codes = []
    for name in ("first.jsonl", "second.jsonl"):
        out = tmp_path / name
        exit_codes.append(
            cli_main(
                [
                    "run",
                    "--model-dir",
                    str(tree["model_dir"]),
                    "--benchmark",
                    str(tree["benchmark"]),
                    "--config",
                    str(tree["config"]),
                    "--out",
                    str(out),
                ]
            )
        )
        outputs.append(out)
    elapsed = time.perf_counter() - start
    identical = outputs[0].read_bytes() == outputs[1].read_bytes()
    suite = load_suite_result(outputs[0])
    ok = (
        exit_codes == [0, 0]
        and identical
        and elapsed < 300.0
        and len(suite.results) == 17
        and not suite.skips
    )
    _report(
        "pipeline reproducibility",
        ok,
        f"exit codes {exit_codes}, byte-identical={identical}, 17 metrics, {elapsed:.1f}s",
    )


# ---------------------------------------------------------------------------
# Companion service criterion: a full rating round trip stays blinded and
# aggregates to the documented label scale; nothing here needs the browser
# client to be built.


def test_rating_service_round_trip_and_blinding(tmp_path):
    media = tmp_path / "media"
    media.mkdir()
    entries = []
    for index, model_id in enumerate(("gen-a", "gen-b")):
        video = media / f"{index}.avi"
        video.write_bytes(b"x")
        refs = []
        for k in range(3):
            ref = media / f"{index}-{k}.png"
            ref.write_bytes(b"y")
            refs.append(str(ref))
        entries.append(
            {
                "model_id": model_id,
                "prompt_id": "animal-0001",
                "prompt_text": PROMPT,
                "video_path": str(video),
                "reference_paths": refs,
            }
        )
    study = Study.build("accept-study", "salt", entries)
    store = AnnotationStore.create(tmp_path / "store", study)
    client = TestClient(create_app(store))
    scores_by_model = {"gen-a": 5, "gen-b": 1}
    task_models = {item.task_id: item.model_id for item in study.items}

    leaked = False
    for rater in ("r1", "r2", "r3"):
        client.post("/api/raters", json={"rater_id": rater})
        while True:
            body = client.get(f"/api/raters/{rater}/next-task")
            payload = body.json()
            if "model_id" in body.text or "gen-a" in body.text or "gen-b" in body.text:
                leaked = True
            if payload["done"]:
                break
            task_id = payload["task"]["task_id"]
            value = scores_by_model[task_models[task_id]]
            client.post(
                "/api/ratings",
                json={
                    "rater_id": rater,
                    "task_id": task_id,
                    "scores": {aspect: value for aspect in
                               ("visual_quality", "tv_alignment", "motion_quality",
                                "temporal_consistency", "subjective_likeness")},
                },
            )

    export = client.get("/api/studies/accept-study/export").text
    record_lines = [line for line in export.splitlines()[1:] if line]
    ratings = store.ratings()
    labels = {(l.model_id, l.aspect): l.value for l in aggregate_ratings(ratings)}
    ok = (
        not leaked
        and len(record_lines) == 6
        and len(ratings) == 6
        and all(isinstance(r, HumanRating) for r in ratings)
        and labels[("gen-a", "visual_quality")] == 1.0
        and labels[("gen-b", "visual_quality")] == 0.0
    )
    _report(
        "rating-service round trip",
        ok,
        f"{len(record_lines)} exported records, blinded payloads={not leaked}, "
        f"unanimous 5s -> {labels[('gen-a', 'visual_quality')]}, unanimous 1s -> {labels[('gen-b', 'visual_quality')]}",
    )
