import hashlib
import json

import numpy as np
import pytest

from ordinalflow.cli import main
from ordinalflow.frameio import (
    load_frames,
    read_image,
    read_packed,
    write_image,
    write_packed,
)
from ordinalflow.imaging import Frame
from ordinalflow.providers import Detection, DetectionSet
from ordinalflow.render import bar_heights, render_annotated

REFERENCE_SCORES = [0.330, 0.019, 0.358, 0.225, 0.069]


def sha(path):
    return hashlib.sha256(path.read_bytes()).hexdigest()


@pytest.fixture(scope="module")
def corpus(tmp_path_factory):
    out = tmp_path_factory.mktemp("corpus")
    rc = main([
        "synth", "--out", str(out), "--level", "3", "--frames", "120", "--seed", "7",
    ])
    assert rc == 0
    return out


# ------------------------------------------------------------------ frameio

def test_pgm_round_trip(tmp_path):
    rng = np.random.default_rng(0)
    f = Frame(rng.integers(0, 256, (7, 9)).astype(np.uint8), 3)
    p = tmp_path / "f.pgm"
    write_image(p, f)
    g = read_image(p, index=3)
    assert np.array_equal(f.pixels, g.pixels)
    assert p.read_bytes().startswith(b"P5")


def test_ppm_round_trip(tmp_path):
    rng = np.random.default_rng(1)
    f = Frame(rng.integers(0, 256, (5, 4, 3)).astype(np.uint8))
    p = tmp_path / "f.ppm"
    write_image(p, f)
    assert np.array_equal(read_image(p).pixels, f.pixels)
    assert p.read_bytes().startswith(b"P6")


def test_pgm_reader_accepts_comments(tmp_path):
    p = tmp_path / "c.pgm"
    p.write_bytes(b"P5\n# a comment\n2 2\n255\n" + bytes([0, 64, 128, 255]))
    g = read_image(p)
    assert g.pixels.tolist() == [[0, 64], [128, 255]]


def test_packed_round_trip(tmp_path):
    rng = np.random.default_rng(2)
    frames = [Frame(rng.integers(0, 256, (6, 8)).astype(np.uint8), t) for t in range(4)]
    p = tmp_path / "x.ordv"
    write_packed(p, frames)
    assert p.read_bytes()[:5] == b"ORDV1"
    back = read_packed(p)
    assert len(back) == 4
    for a, b in zip(frames, back):
        assert np.array_equal(a.pixels, b.pixels)
        assert a.index == b.index


def test_load_frames_dispatch(corpus):
    frames = load_frames(corpus / "frames")
    assert len(frames) == 120
    assert frames[0].index == 0


# ------------------------------------------------------------------- render

def test_bar_heights_uniform_scores_equal_bars():
    assert bar_heights([0.2] * 5) == [48] * 5


def test_bar_heights_reference_vector_peaks_at_level3():
    heights = bar_heights(REFERENCE_SCORES)
    assert int(np.argmax(heights)) + 1 == 3
    assert heights[2] == 48


def test_bar_heights_proportional_within_one_pixel():
    rng = np.random.default_rng(3)
    for _ in range(100):
        scores = rng.random(5) + 1e-3
        heights = bar_heights(scores)
        top = scores.max()
        for s, h in zip(scores, heights):
            assert abs(h - s / top * 48) <= 1.0


def test_render_no_detections_uniform_scores():
    f = Frame(np.full((224, 224), 90, dtype=np.uint8))
    out = render_annotated(f, None, [0.2] * 5, 1)
    assert out.pixels.shape == (224, 224, 3)
    # all five bars present with equal height
    cols = [4 + i * 12 for i in range(5)]
    for x in cols:
        col = out.pixels[:, x]
        assert (col == (230, 230, 230)).all(axis=1).sum() > 0
    # no green anywhere (no boxes drawn)
    green = (out.pixels == (0, 255, 0)).all(axis=2)
    assert not green.any()


def test_render_draws_green_box_outline():
    f = Frame(np.full((224, 224), 90, dtype=np.uint8))
    ds = DetectionSet(0, [Detection(100, 100, 20, 10, 0.9)])
    out = render_annotated(f, ds, REFERENCE_SCORES, 3)
    green = (out.pixels == (0, 255, 0)).all(axis=2)
    assert green[100, 100] and green[100, 119] and green[109, 100]
    assert not green[105, 110]  # outline only, interior untouched


def test_render_preserves_pixels_outside_overlays():
    rng = np.random.default_rng(4)
    px = rng.integers(0, 256, (224, 224)).astype(np.uint8)
    out = render_annotated(Frame(px), None, [0.2] * 5, 2)
    # far right half has no chart, banner, or boxes
    assert np.array_equal(out.pixels[:, 120:, 0], px[:, 120:])
    assert np.array_equal(out.pixels[:, 120:, 1], px[:, 120:])


def test_render_is_pure():
    px = np.full((224, 224), 90, dtype=np.uint8)
    f = Frame(px)
    render_annotated(f, None, [0.5] * 5, 5)
    assert (f.pixels == 90).all()


def test_render_rejects_bad_level():
    f = Frame(np.zeros((32, 32), dtype=np.uint8))
    with pytest.raises(ValueError):
        render_annotated(f, None, [0.2] * 5, 0)


# -------------------------------------------------------------------- synth

def test_synth_writes_complete_corpus(corpus):
    assert (corpus / "frames").is_dir()
    assert len(list((corpus / "frames").glob("*.pgm"))) == 120
    assert (corpus / "scores.jsonl").exists()
    assert (corpus / "detections.jsonl").exists()
    assert (corpus / "truth.txt").read_text() == "3\n3\n"


def test_synth_invalid_level_exit_4(tmp_path):
    assert main(["synth", "--out", str(tmp_path / "x"), "--level", "6"]) == 4


def test_synth_regen_byte_identical(tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    for out in (a, b):
        rc = main([
            "synth", "--out", str(out), "--level", "2", "--frames", "30",
            "--seed", "9", "--packed",
        ])
        assert rc == 0
    for name in ("frames.ordv", "scores.jsonl", "detections.jsonl", "truth.txt"):
        assert sha(a / name) == sha(b / name)


# ----------------------------------------------------------------- classify

def classify_args(corpus, out, extra=()):
    return [
        "classify",
        "--frames", str(corpus / "frames"),
        "--scores", str(corpus / "scores.jsonl"),
        "--detections", str(corpus / "detections.jsonl"),
        "--out", str(out),
        *extra,
    ]


def test_classify_clean_corpus_all_level_3(corpus, tmp_path):
    out = tmp_path / "report.json"
    assert main(classify_args(corpus, out)) == 0
    report = json.loads(out.read_text())
    assert report["tool"] == "ordinalflow"
    assert report["n_frames"] == 120
    assert [s["level"] for s in report["segments"]] == [3, 3]
    assert [s["smoothed_level"] for s in report["segments"]] == [3, 3]
    starts = [s["frame_start"] for s in report["segments"]]
    counts = [s["frame_count"] for s in report["segments"]]
    assert starts == [0, 100] and counts == [100, 20]
    assert report["wall_clock_seconds"] > 0


def test_classify_short_scores_exit_3(corpus, tmp_path):
    short = tmp_path / "short.jsonl"
    lines = (corpus / "scores.jsonl").read_text().splitlines()
    short.write_text("\n".join(lines[:-1]) + "\n")
    rc = main([
        "classify", "--frames", str(corpus / "frames"), "--scores", str(short),
        "--detections", str(corpus / "detections.jsonl"),
        "--out", str(tmp_path / "r.json"),
    ])
    assert rc == 3
    assert not (tmp_path / "r.json").exists()  # no partial report


def test_classify_malformed_scores_exit_2(corpus, tmp_path):
    bad = tmp_path / "bad.jsonl"
    bad.write_text("{not json\n")
    rc = main([
        "classify", "--frames", str(corpus / "frames"), "--scores", str(bad),
        "--detections", str(corpus / "detections.jsonl"),
        "--out", str(tmp_path / "r.json"),
    ])
    assert rc == 2


def test_classify_bad_config_exit_4(corpus, tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text('{"fusion": {"not_a_key": 1}}')
    rc = main(classify_args(corpus, tmp_path / "r.json", ["--config", str(cfg)]))
    assert rc == 4
    cfg.write_text('{"bgsub": {"learning_rate": 0.0}}')
    assert main(classify_args(corpus, tmp_path / "r.json", ["--config", str(cfg)])) == 4


def test_classify_config_echo_reflects_overrides(corpus, tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text('{"pipeline": {"segment_len": 60}, "fusion": {"alpha_boost": 1.3}}')
    out = tmp_path / "r.json"
    assert main(classify_args(corpus, out, ["--config", str(cfg)])) == 0
    report = json.loads(out.read_text())
    assert report["config"]["pipeline"]["segment_len"] == 60
    assert report["config"]["fusion"]["alpha_boost"] == 1.3
    assert len(report["segments"]) == 2


def test_classify_rerun_byte_identical_with_no_timing(corpus, tmp_path):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    for out in (a, b):
        assert main(classify_args(corpus, out, ["--no-timing"])) == 0
    assert sha(a) == sha(b)
    assert json.loads(a.read_text())["wall_clock_seconds"] == 0.0


def test_classify_trace_and_annotate(corpus, tmp_path):
    ann = tmp_path / "ann"
    out = tmp_path / "r.json"
    rc = main(classify_args(corpus, out, [
        "--trace", "--annotate-dir", str(ann), "--annotate-stride", "40",
    ]))
    assert rc == 0
    report = json.loads(out.read_text())
    assert len(report["frames"]) == 120
    assert all(1 <= f["level"] <= 5 for f in report["frames"])
    names = sorted(p.name for p in ann.glob("*.ppm"))
    assert names == ["000000.ppm", "000040.ppm", "000080.ppm"]
    img = read_image(ann / "000000.ppm")
    assert img.pixels.shape == (224, 224, 3)


# ----------------------------------------------------------------- evaluate

def test_evaluate_perfect_report(corpus, tmp_path):
    report = tmp_path / "r.json"
    assert main(classify_args(corpus, report)) == 0
    out = tmp_path / "metrics.json"
    rc = main([
        "evaluate", "--report", str(report),
        "--truth", str(corpus / "truth.txt"), "--out", str(out),
    ])
    assert rc == 0
    m = json.loads(out.read_text())["metrics"]
    assert m["accuracy"] == 1.0
    assert m["qwk"] == 1.0
    assert m["mae"] == 0.0


def test_evaluate_truth_length_mismatch_exit_3(corpus, tmp_path):
    report = tmp_path / "r.json"
    assert main(classify_args(corpus, report)) == 0
    truth = tmp_path / "t.txt"
    truth.write_text("3\n")
    rc = main(["evaluate", "--report", str(report), "--truth", str(truth)])
    assert rc == 3


def test_evaluate_matches_metrics_module(corpus, tmp_path, capsys):
    from ordinalflow.metrics import evaluate as eval_fn

    report = tmp_path / "r.json"
    assert main(classify_args(corpus, report)) == 0
    rc = main(["evaluate", "--report", str(report), "--truth", str(corpus / "truth.txt")])
    assert rc == 0
    got = json.loads(capsys.readouterr().out)["metrics"]
    pred = [s["smoothed_level"] for s in json.loads(report.read_text())["segments"]]
    want = eval_fn([3, 3], pred)
    assert got["accuracy"] == want.accuracy
    assert got["qwk"] == want.qwk
    assert got["macro_f1"] == want.macro_f1


def test_evaluate_garbage_report_exit_2(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text("not json")
    truth = tmp_path / "t.txt"
    truth.write_text("3\n")
    assert main(["evaluate", "--report", str(bad), "--truth", str(truth)]) == 2


def test_evaluate_garbage_truth_exit_2(corpus, tmp_path):
    report = tmp_path / "r.json"
    assert main(classify_args(corpus, report)) == 0
    truth = tmp_path / "t.txt"
    truth.write_text("three\nthree\n")
    assert main(["evaluate", "--report", str(report), "--truth", str(truth)]) == 2


# -------------------------------------------------------------- motion-dump

def test_motion_dump(corpus, tmp_path):
    out = tmp_path / "motion.jsonl"
    rc = main(["motion-dump", "--frames", str(corpus / "frames"), "--out", str(out)])
    assert rc == 0
    lines = out.read_text().splitlines()
    assert len(lines) == 120
    rec = json.loads(lines[0])
    assert set(rec) == {"frame", "coverage", "intensity", "contour_density",
                        "stability", "trend"}
    last = json.loads(lines[-1])
    assert 0.0 <= last["coverage"] <= 1.0
    assert 0.8 <= last["stability"] <= 1.0
