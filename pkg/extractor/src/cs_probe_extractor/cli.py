"""cs-probe-extractor command line: extract fixtures or serve fill-mask."""

from __future__ import annotations

import json
import logging

import click

from cs_probe_extractor.extract import ExtractionJob, run_extraction
from cs_probe_extractor.fillmask import DEFAULT_MODEL


@click.group()
@click.option("-v", "--verbose", is_flag=True, help="Debug logging.")
def main(verbose):
    """Run a masked LM over cloze datasets for cs-probe."""
    logging.basicConfig(level=logging.DEBUG if verbose else logging.INFO)


@main.command()
@click.option("--dataset", required=True, type=click.Path(exists=True, dir_okay=False),
              help="TSV dataset: id<TAB>sentence or id<TAB>a<TAB>b<TAB>gold.")
@click.option("--model", default=DEFAULT_MODEL, show_default=True,
              help="Model name or local path for the fill-mask pipeline.")
@click.option("--top-k", type=int, default=30, show_default=True,
              help="Clean candidates per request (use >= the largest k any run needs).")
@click.option("--out", required=True, type=click.Path(dir_okay=False),
              help="Fixture file to write (JSONL).")
@click.option("--device", default="-1", show_default=True,
              help="Device spec passed to transformers (-1 = CPU).")
@click.option("--stopwords", type=click.Path(exists=True, dir_okay=False), default=None,
              help="Stopword override; must match the evaluation run's list.")
def extract(dataset, model, top_k, out, device, stopwords):
    """Write one candidate record per cloze item / encodable pair."""
    device_spec = int(device) if device.lstrip("-").isdigit() else device
    job = ExtractionJob(
        dataset=dataset, out=out, model=model, top_k=top_k,
        device=device_spec, stopwords=stopwords,
    )
    stats = run_extraction(job)
    click.echo(json.dumps(stats, sort_keys=True))


@main.command()
@click.option("--model", default=DEFAULT_MODEL, show_default=True)
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", type=int, default=8000, show_default=True)
@click.option("--device", default="-1", show_default=True)
@click.option("--max-in-flight", type=int, default=4, show_default=True,
              help="Concurrent fill-mask invocations.")
def serve(model, host, port, device, max_in_flight):
    """Serve the fill-mask wire protocol on POST /fill."""
    from cs_probe_extractor.server import serve as run_server

    device_spec = int(device) if device.lstrip("-").isdigit() else device
    run_server(model, host, port, device=device_spec, max_in_flight=max_in_flight)


if __name__ == "__main__":
    main()
