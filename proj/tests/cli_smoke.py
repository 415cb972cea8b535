"""End-to-end run of the fxga binary: exit codes, artifacts and JSON schemas."""

import csv
import json
import pathlib
import subprocess
import sys
import tempfile

import jsonschema

FXGA = pathlib.Path(sys.argv[1])
SCHEMAS = pathlib.Path(sys.argv[2])
SMALL = ["--population", "10", "--generations", "3", "--set", "tsne.max_points=200", "tsne.iterations=260",
         "tsne.perplexity=15"]

failures = []


def run(*args, expect=0):
    proc = subprocess.run([str(FXGA), *map(str, args)], capture_output=True, text=True)
    if proc.returncode != expect:
        failures.append(f"{' '.join(map(str, args))}: exit {proc.returncode}, wanted {expect}\n{proc.stderr}")
    return proc


def check(cond, what):
    if not cond:
        failures.append(what)


def validate(path, schema):
    try:
        jsonschema.validate(json.loads(path.read_text()), json.loads((SCHEMAS / f"{schema}.schema.json").read_text()))
    except (jsonschema.ValidationError, OSError, json.JSONDecodeError) as e:
        failures.append(f"{path}: {e}")


def header_lines(path):
    lines = path.read_text().splitlines()
    return [l for l in lines if l.startswith("#")]


with tempfile.TemporaryDirectory() as tmp:
    tmp = pathlib.Path(tmp)
    data = tmp / "candles.csv"
    run("synth", "--out", data, "--candles", "2500", "--seed", "4")
    run("ingest-check", "--data", data)

    # usage and configuration errors
    run("baseline", "--data", data, "--out", tmp / "x", expect=2)
    run("baseline", "--bogus", expect=2)
    run(expect=2)
    bad_cfg = tmp / "bad.cfg"
    bad_cfg.write_text("seed = 1\nga.population = many\n")
    proc = run("baseline", "--data", data, "--config", bad_cfg, expect=2)
    check("line 2" in proc.stderr, f"config error should name the line: {proc.stderr!r}")
    run("optimize", "--data", data, "--seed", "1", "--set", "cv.k=1", expect=2)

    # data errors
    rows = data.read_text().splitlines()
    swapped = tmp / "swapped.csv"
    swapped.write_text("\n".join([rows[0], rows[2], rows[1], *rows[3:]]) + "\n")
    proc = run("baseline", "--data", swapped, "--seed", "1", "--out", tmp / "x", expect=3)
    check("NonMonotonicTimestamp" in proc.stderr and "line 3" in proc.stderr, proc.stderr)
    negative = tmp / "negative.csv"
    negative.write_text("\n".join([rows[0], rows[1].rsplit(",", 1)[0] + ",-1", *rows[2:]]) + "\n")
    run("ingest-check", "--data", negative, expect=3)
    run("ingest-check", "--data", tmp / "missing.csv", expect=3)

    # full pipeline
    out = tmp / "run"
    cfg = tmp / "run.cfg"
    cfg.write_text(f"# smoke run\ndata = {data}\nseed = 11\n")
    run("print-config", "--config", cfg)
    run("baseline", "--config", cfg, "--out", out, *SMALL)
    run("optimize", "--config", cfg, "--out", out, "--threads", "2", *SMALL)
    run("embed", "--config", cfg, "--out", out, *SMALL)
    run("report", "--out", out)

    hash_proc = run("print-config", "--config", cfg, *SMALL)
    config_hash = hash_proc.stdout.strip().splitlines()[-1].split("=")[-1].strip()
    for stage in ("baseline", "optimize"):
        d = out / stage
        validate(d / "report.json", "report")
        validate(d / "cv_report.json", "cv_report")
        validate(d / "backtest_train.json", "backtest")
        validate(d / "backtest_validation.json", "backtest")
        validate(d / "model.json", "model")
        for name in ("signals_train.csv", "signals_validation.csv", "equity_train.csv", "equity_validation.csv"):
            check(header_lines(d / name)[:2] == ["# seed=11", f"# config_hash={config_hash}"], f"{d / name} header")
        report = json.loads((d / "report.json").read_text())
        check(report["meta"]["config_hash"] == config_hash, f"{stage} config hash")
    validate(out / "optimize" / "chromosome.json", "chromosome")
    check((out / "optimize" / "ga_trace.csv").exists(), "ga_trace.csv missing")

    emb = out / "embed" / "embedding.csv"
    body = [l for l in emb.read_text().splitlines() if not l.startswith("#")]
    points = list(csv.DictReader(body))
    embed_report = json.loads((out / "embed" / "report.json").read_text())
    check(len(points) == min(embed_report["rows"], 200), f"embedding rows {len(points)}")
    check(all(0.0 <= float(p["posterior"]) <= 1.0 for p in points), "posterior outside [0, 1]")
    check((out / "embed" / "embedding.svg").read_text().startswith("<svg") or "<svg" in
          (out / "embed" / "embedding.svg").read_text(), "embedding.svg")

    # same seed, single thread, different directory: identical artifacts
    again = tmp / "again"
    run("optimize", "--config", cfg, "--out", again, *SMALL)
    run("embed", "--config", cfg, "--out", again, *SMALL)
    for rel in ("optimize/chromosome.json", "optimize/ga_trace.csv", "optimize/report.json", "embed/embedding.csv"):
        check((out / rel).read_bytes() == (again / rel).read_bytes(), f"{rel} differs between reruns")

    # a series whose next move is fully determined
    alt = tmp / "alt.csv"
    run("synth", "--out", alt, "--candles", "600", "--alternating")
    run("baseline", "--data", alt, "--seed", "2", "--out", tmp / "alt_run")
    alt_report = json.loads((tmp / "alt_run" / "baseline" / "report.json").read_text())
    check(alt_report["validation"]["accuracy"] == 1.0, f"alternating accuracy {alt_report['validation']['accuracy']}")

for f in failures:
    print("FAIL:", f)
print(f"cli smoke: {len(failures)} failure(s)")
sys.exit(1 if failures else 0)
