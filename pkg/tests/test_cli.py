"""CLI behavior: exit codes, artifact accounting, determinism, report."""

import filecmp
import json
import shutil
import threading
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from pathlib import Path

import pytest
from click.testing import CliRunner

from cs_probe.cli import main

FIXTURES = Path(__file__).parent / "fixtures"
INPUT_FILES = (
    "embeddings_2d.txt",
    "sentences_10.tsv",
    "pairs_12.tsv",
    "sentence_candidates.jsonl",
    "pair_candidates.jsonl",
)
ARTIFACTS_CONFIDENCE = ("pair_results.jsonl", "summary.json", "plot.json")
ARTIFACTS_CLOZE = ("mask_scores.jsonl", "sentence_scores.jsonl", "summary.json", "plot.json")


@pytest.fixture
def workdir(tmp_path, monkeypatch):
    for name in INPUT_FILES:
        shutil.copy(FIXTURES / name, tmp_path / name)
    monkeypatch.chdir(tmp_path)
    return tmp_path


def run_cli(*args):
    return CliRunner().invoke(main, list(args))


def cloze_args(out="out_cloze", **extra):
    args = [
        "cloze-eval",
        "--embeddings", "embeddings_2d.txt",
        "--dataset", "sentences_10.tsv",
        "--fixture", "sentence_candidates.jsonl",
        "--out", out,
    ]
    for key, value in extra.items():
        args += [f"--{key.replace('_', '-')}", str(value)]
    return args


def confidence_args(out="out_conf", **extra):
    args = [
        "confidence-eval",
        "--embeddings", "embeddings_2d.txt",
        "--dataset", "pairs_12.tsv",
        "--fixture", "pair_candidates.jsonl",
        "--out", out,
    ]
    for key, value in extra.items():
        args += [f"--{key.replace('_', '-')}", str(value)]
    return args


def read_summary(path: Path) -> dict:
    return json.loads((path / "summary.json").read_text())


class TestRuns:
    def test_cloze_eval_writes_artifacts(self, workdir):
        result = run_cli(*cloze_args())
        assert result.exit_code == 0, result.output
        for name in ARTIFACTS_CLOZE:
            assert (workdir / "out_cloze" / name).exists()

    def test_confidence_eval_writes_artifacts(self, workdir):
        result = run_cli(*confidence_args())
        assert result.exit_code == 0, result.output
        for name in ARTIFACTS_CONFIDENCE:
            assert (workdir / "out_conf" / name).exists()

    def test_confidence_accounting_reconciles(self, workdir):
        assert run_cli(*confidence_args()).exit_code == 0
        counts = read_summary(workdir / "out_conf")["counts"]
        assert counts["encodable"] + counts["not_encodable"]["total"] == counts["dataset"]
        assert (
            counts["correct"] + counts["incorrect"] + counts["skipped"]["total"]
            == counts["encodable"]
        )

    def test_cloze_mask_accounting_reconciles(self, workdir):
        assert run_cli(*cloze_args()).exit_code == 0
        counts = read_summary(workdir / "out_cloze")["counts"]
        assert counts["masks_scored"] + counts["masks_failed"] == counts["masks_total"]
        records = [
            json.loads(line)
            for line in (workdir / "out_cloze" / "mask_scores.jsonl").read_text().splitlines()
        ]
        assert len(records) == counts["masks_total"]

    def test_empty_dataset_succeeds_with_empty_reports(self, workdir):
        (workdir / "empty.tsv").write_text("")
        result = run_cli(*cloze_args(dataset="empty.tsv", out="out_empty"))
        assert result.exit_code == 0
        summary = read_summary(workdir / "out_empty")
        assert summary["counts"]["sentences"] == 0
        assert all(c["r"] is None for c in summary["correlations"])

    def test_custom_stopword_list_changes_masking(self, workdir):
        (workdir / "stops.txt").write_text("the\n")  # tiny list -> more masks
        assert run_cli(*cloze_args()).exit_code == 0
        assert run_cli(*cloze_args(out="out_more", stopwords="stops.txt")).exit_code == 3
        # with fewer stopwords, extra masks have no fixture records


class TestExitCodes:
    def test_both_providers_is_config_error(self, workdir):
        result = run_cli(*confidence_args(), "--lm-url", "http://localhost:1")
        assert result.exit_code == 2
        err = json.loads(result.stderr.strip().splitlines()[-1])
        assert err["error"] == "ConfigError"

    def test_no_provider_is_config_error(self, workdir):
        args = [a for a in confidence_args()]
        i = args.index("--fixture")
        del args[i : i + 2]
        result = run_cli(*args)
        assert result.exit_code == 2

    def test_env_var_counts_as_provider(self, workdir, monkeypatch):
        monkeypatch.setenv("CS_PROBE_LM_URL", "http://localhost:1")
        result = run_cli(*confidence_args())  # plus --fixture -> conflict
        assert result.exit_code == 2

    def test_missing_fixture_record_is_data_error(self, workdir):
        result = run_cli(*confidence_args(fixture="sentence_candidates.jsonl"))
        assert result.exit_code == 3
        err = json.loads(result.stderr.strip().splitlines()[-1])
        assert err["error"] == "MissingFixtureError"

    def test_dim_override_mismatch_is_data_error(self, workdir):
        result = run_cli(*cloze_args(dim=3))
        assert result.exit_code == 3

    def test_unreadable_dataset_is_usage_or_data_error(self, workdir):
        result = run_cli(*cloze_args(dataset="nope.tsv"))
        assert result.exit_code != 0


class TestDeterminism:
    def _assert_identical_trees(self, a: Path, b: Path, names):
        for name in names:
            assert filecmp.cmp(a / name, b / name, shallow=False), name

    def test_two_confidence_runs_are_byte_identical(self, workdir):
        assert run_cli(*confidence_args(out="run1")).exit_code == 0
        assert run_cli(*confidence_args(out="run2")).exit_code == 0
        self._assert_identical_trees(
            workdir / "run1", workdir / "run2", ARTIFACTS_CONFIDENCE
        )

    def test_two_cloze_runs_are_byte_identical(self, workdir):
        assert run_cli(*cloze_args(out="run1")).exit_code == 0
        assert run_cli(*cloze_args(out="run2")).exit_code == 0
        self._assert_identical_trees(workdir / "run1", workdir / "run2", ARTIFACTS_CLOZE)

    def test_worker_count_does_not_change_artifacts(self, workdir):
        assert run_cli(*confidence_args(out="w1")).exit_code == 0
        assert run_cli(*confidence_args(out="w4", workers=4)).exit_code == 0
        self._assert_identical_trees(workdir / "w1", workdir / "w4", ARTIFACTS_CONFIDENCE)

    def test_seed_changes_artifacts_only_through_clustering(self, workdir):
        # same seed -> same bytes; the config echo pins the seed value
        assert run_cli(*confidence_args(out="s7", seed=7)).exit_code == 0
        assert run_cli(*confidence_args(out="s8", seed=8)).exit_code == 0
        a = read_summary(workdir / "s7")
        b = read_summary(workdir / "s8")
        assert a["config"]["seed"] == 7 and b["config"]["seed"] == 8


class TestProviderSubstitutability:
    """The per-item artifacts must not depend on where candidates come
    from: a fill-mask endpoint replaying the fixture records yields the
    same records as reading the fixture file directly."""

    @staticmethod
    def _serve_fixture(path: Path) -> ThreadingHTTPServer:
        by_text = {}
        for line in path.read_text().splitlines():
            record = json.loads(line)
            by_text[record["masked_text"]] = record

        class Handler(BaseHTTPRequestHandler):
            def do_POST(self):
                body = json.loads(self.rfile.read(int(self.headers["Content-Length"])))
                record = by_text.get(body["masked_text"])
                if record is None:
                    self.send_response(404)
                    self.end_headers()
                    return
                ordered = sorted(
                    record["candidates"], key=lambda c: (-c["p"], c["word"])
                )
                payload = json.dumps(
                    {
                        "model_name": record["model_name"],
                        "candidates": ordered[: body["top_k"]],
                    }
                ).encode()
                self.send_response(200)
                self.send_header("Content-Length", str(len(payload)))
                self.end_headers()
                self.wfile.write(payload)

            def log_message(self, *args):
                pass

        return ThreadingHTTPServer(("127.0.0.1", 0), Handler)

    def test_http_and_fixture_runs_agree(self, workdir):
        server = self._serve_fixture(workdir / "pair_candidates.jsonl")
        thread = threading.Thread(target=server.serve_forever, daemon=True)
        thread.start()
        try:
            assert run_cli(*confidence_args(out="via_fixture")).exit_code == 0
            args = [a for a in confidence_args(out="via_http")]
            i = args.index("--fixture")
            del args[i : i + 2]
            url = f"http://127.0.0.1:{server.server_address[1]}"
            result = run_cli(*args, "--lm-url", url)
            assert result.exit_code == 0, result.output
        finally:
            server.shutdown()
            server.server_close()
        for name in ("pair_results.jsonl", "plot.json"):
            assert filecmp.cmp(
                workdir / "via_fixture" / name, workdir / "via_http" / name, shallow=False
            ), name


class TestReport:
    def test_report_reproduces_run_summary_bytes(self, workdir):
        assert run_cli(*confidence_args()).exit_code == 0
        out = workdir / "out_conf"
        before_summary = (out / "summary.json").read_bytes()
        before_plot = (out / "plot.json").read_bytes()
        result = run_cli("report", "--out", str(out))
        assert result.exit_code == 0, result.output
        assert (out / "summary.json").read_bytes() == before_summary
        assert (out / "plot.json").read_bytes() == before_plot

    def test_report_on_cloze_run(self, workdir):
        assert run_cli(*cloze_args()).exit_code == 0
        out = workdir / "out_cloze"
        before = (out / "summary.json").read_bytes()
        assert run_cli("report", "--out", str(out)).exit_code == 0
        assert (out / "summary.json").read_bytes() == before

    def test_report_without_records_is_config_error(self, workdir, tmp_path):
        empty = workdir / "not_a_run"
        empty.mkdir()
        result = run_cli("report", "--out", str(empty))
        assert result.exit_code == 2

    def test_report_is_rerunnable(self, workdir):
        assert run_cli(*confidence_args()).exit_code == 0
        out = workdir / "out_conf"
        assert run_cli("report", "--out", str(out)).exit_code == 0
        first = (out / "summary.json").read_bytes()
        assert run_cli("report", "--out", str(out)).exit_code == 0
        assert (out / "summary.json").read_bytes() == first
