"""cs-probe command line: cloze-eval, confidence-eval, report."""

from __future__ import annotations

import json
import sys

import click

from cs_probe import pipeline
from cs_probe.errors import CsProbeError, exit_code_for


def _fail(exc: BaseException) -> None:
    code = exit_code_for(exc)
    record = {"error": type(exc).__name__, "message": str(exc), "exit_code": code}
    click.echo(json.dumps(record, sort_keys=True), err=True)
    sys.exit(code)


def _run(fn, *args):
    try:
        return fn(*args)
    except CsProbeError as exc:
        _fail(exc)
    except OSError as exc:
        _fail(exc)
    except Exception as exc:  # internal invariant violation
        _fail(exc)


def provider_options(fn):
    fn = click.option("--fixture", type=click.Path(exists=True, dir_okay=False),
                      help="Candidate fixture file (JSONL).")(fn)
    fn = click.option("--lm-url", envvar="CS_PROBE_LM_URL",
                      help="Fill-mask endpoint base URL (env: CS_PROBE_LM_URL).")(fn)
    fn = click.option("--timeout", type=float, default=10.0, show_default=True,
                      help="HTTP timeout in seconds.")(fn)
    fn = click.option("--retries", type=int, default=2, show_default=True,
                      help="Extra HTTP attempts on transport failure.")(fn)
    return fn


def common_options(fn):
    fn = click.option("--embeddings", required=True,
                      type=click.Path(exists=True, dir_okay=False),
                      help="GloVe-format embedding file.")(fn)
    fn = click.option("--dim", type=int, default=None,
                      help="Expected embedding dimension (default: inferred from the first line).")(fn)
    fn = click.option("--dataset", required=True,
                      type=click.Path(exists=True, dir_okay=False),
                      help="Tab-separated dataset file.")(fn)
    fn = click.option("--stopwords", type=click.Path(exists=True, dir_okay=False),
                      default=None, help="Stopword file, one token per line (default: bundled list).")(fn)
    fn = click.option("--seed", type=int, default=7, show_default=True,
                      help="Run seed; all randomness derives from it.")(fn)
    fn = click.option("--workers", type=int, default=1, show_default=True,
                      help="Worker pool width; outputs stay in input order.")(fn)
    fn = click.option("--out", required=True, type=click.Path(file_okay=False),
                      help="Output directory for run artifacts.")(fn)
    fn = provider_options(fn)
    return fn


@click.group()
def main():
    """Probe a masked LM's common-sense ability with cloze tests."""


@main.command("cloze-eval")
@common_options
@click.option("--k", type=int, default=5, show_default=True,
              help="Top-k replacements scored per mask.")
def cloze_eval(embeddings, dim, dataset, stopwords, seed, workers, out,
               fixture, lm_url, timeout, retries, k):
    """Score every maskable word of each sentence (dispersion metrics)."""
    config = pipeline.RunConfig(
        embeddings=embeddings, dataset=dataset, out=out, fixture=fixture,
        lm_url=lm_url, dim=dim, k=k, seed=seed, stopwords=stopwords,
        workers=workers, timeout=timeout, retries=retries,
    )
    _run(pipeline.run_cloze_eval, config)
    click.echo(f"cloze-eval artifacts written to {out}")


@main.command("confidence-eval")
@common_options
@click.option("--candidates-k", type=int, default=30, show_default=True,
              help="Candidate pool size fetched for clustering.")
@click.option("--components", type=int, default=2, show_default=True,
              help="Mixture components for candidate clustering.")
@click.option("--zc-over", type=click.Choice(["choices", "candidates"]),
              default="choices", show_default=True,
              help="What the differential-distance normalizer sums over.")
@click.option("--mass", type=click.Choice(["normalized", "raw"]),
              default="normalized", show_default=True,
              help="Cluster probability mass: normalized to sum 1, or raw sums.")
@click.option("--gmm-restarts", type=int, default=1, show_default=True,
              help="Independent EM restarts; best log-likelihood wins.")
def confidence_eval(embeddings, dim, dataset, stopwords, seed, workers, out,
                    fixture, lm_url, timeout, retries,
                    candidates_k, components, zc_over, mass, gmm_restarts):
    """Score two-choice pairs with cluster-weighted confidence."""
    config = pipeline.RunConfig(
        embeddings=embeddings, dataset=dataset, out=out, fixture=fixture,
        lm_url=lm_url, dim=dim, candidates_k=candidates_k,
        n_components=components, seed=seed, stopwords=stopwords,
        zc_over=zc_over, mass=mass, workers=workers,
        gmm_restarts=gmm_restarts, timeout=timeout, retries=retries,
    )
    _run(pipeline.run_confidence_eval, config)
    click.echo(f"confidence-eval artifacts written to {out}")


@main.command("report")
@click.option("--out", required=True, type=click.Path(exists=True, file_okay=False),
              help="Run directory whose summary/plot should be rebuilt from records.")
def report(out):
    """Regenerate summary.json and plot.json from per-item records."""
    kind = _run(pipeline.regenerate_report, out)
    click.echo(f"{kind} report regenerated in {out}")


if __name__ == "__main__":
    main()
