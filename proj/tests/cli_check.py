"""End-to-end checks of the wlab binary: exit codes, environment overrides,
schema validity of every JSON summary and CSV headers."""

import json
import os
import subprocess
import sys
import tempfile
from pathlib import Path

import jsonschema

WLAB = Path(sys.argv[1]).resolve()

SMALL = """system:
  cells: 3
  theta: 0.2
compute:
  samples: 20000
  graph_points: 65536
  scales: [3, 10]
  anchors: 100
  scan_xi: 12
  scan_x: 33
  tsujii_levels: 3
  ks_samples: 20000
  sweep:
    t_count: 3
"""

DEGENERATE = """system:
  cells: 3
  lambda: 0.6
  g: piecewise-linear
  g_slopes: [0, 0, 0]
  g_intercepts: [1, 1, 1]
compute:
  scan_xi: 8
  scan_x: 16
"""

HEADERS = {
    "eval.csv": "x,w",
    "graph.csv": "x,w",
    "pointwise.csv": "anchor,slope",
    "box.csv": "scale,count,box_count,raw_count",
    "theta.csv": "sample,x,theta",
    "theta_corr.csv": "r,C",
    "tsujii.csv": "r,I,stderr,hits,bound",
    "sweep.csv": "t,s_bowen,boxdim,boxdim_err,corrdim",
}

failures = []


def check(ok, what):
    print(("ok   " if ok else "FAIL ") + what)
    if not ok:
        failures.append(what)


def run(args, env=None):
    full = dict(os.environ)
    full.update(env or {})
    p = subprocess.run([str(WLAB), *args], capture_output=True, text=True, env=full)
    return p.returncode, p.stdout


with tempfile.TemporaryDirectory() as tmp:
    tmp = Path(tmp)
    small = tmp / "small.yaml"
    small.write_text(SMALL)
    degenerate = tmp / "degenerate.yaml"
    degenerate.write_text(DEGENERATE)

    commands = ["validate", "eval", "sample-graph", "bowen", "dims", "boxdim", "theta",
                "transversality", "tsujii", "sweep", "report"]
    for cmd in commands:
        out = tmp / cmd
        code, stdout = run(["--config", str(small), "--out", str(out), cmd])
        check(code == 0, f"{cmd} exits 0")
        schema = json.loads((out / "schema.json").read_text())
        doc = json.loads((out / f"{cmd}.json").read_text())
        errors = list(jsonschema.Draft7Validator(schema).iter_errors(doc))
        check(not errors, f"{cmd}.json validates" + (f": {errors[0].message}" if errors else ""))
        check(json.loads(stdout) == doc, f"{cmd} prints its summary")
        for csv in sorted(out.glob("*.csv")):
            header = csv.read_text().split("\n", 1)[0]
            check(HEADERS.get(csv.name) == header, f"{cmd}/{csv.name} header '{header}'")

    code, stdout = run(["--config", str(small), "--out", str(tmp / "env"), "bowen"], {"WLAB_SEED": "7"})
    check(code == 0 and json.loads(stdout)["provenance"]["seed"] == 7, "WLAB_SEED overrides the seed")
    code, stdout = run(["--config", str(small), "--out", str(tmp / "flag"), "--seed", "9", "bowen"], {"WLAB_SEED": "7"})
    check(json.loads(stdout)["provenance"]["seed"] == 9, "--seed wins over WLAB_SEED")

    a = json.loads(run(["--config", str(small), "--out", str(tmp / "t1"), "--threads", "1", "theta"])[1])
    b = json.loads(run(["--config", str(small), "--out", str(tmp / "t2"), "--threads", "2", "theta"])[1])
    check(a == b and (tmp / "t1" / "theta.csv").read_bytes() == (tmp / "t2" / "theta.csv").read_bytes(),
          "theta output does not depend on --threads")

    weak = tmp / "weak.yaml"
    weak.write_text("system:\n  cells: 3\n  lambda: 0.3\n")
    code, stdout = run(["--config", str(weak), "--out", str(tmp / "weak"), "validate"])
    doc = json.loads(stdout)
    check(code == 1 and doc["valid"] is False and len(doc["violations"]) == 3,
          "lambda 0.3 is rejected with three violations")
    check(jsonschema.Draft7Validator(schema).is_valid(doc), "the rejection validates against the schema")

    typo = tmp / "typo.yaml"
    typo.write_text("compute:\n  seed: 1\n  sead: 2\n")
    code, stdout = run(["--config", str(typo), "bowen"])
    check(code == 1 and "line 3" in json.loads(stdout)["message"], "unknown key is rejected with its line")

    code, _ = run(["--config", str(small), "--scales", "9..x", "bowen"])
    check(code == 1, "malformed --scales exits 1")
    code, _ = run(["--config", str(tmp / "missing.yaml"), "bowen"])
    check(code == 1, "missing config exits 1")
    code, _ = run(["frobnicate"])
    check(code == 1, "unknown subcommand exits 1")

    code, stdout = run(["--config", str(degenerate), "--out", str(tmp / "deg"), "tsujii"])
    doc = json.loads(stdout)
    check(code == 2 and doc["kind"] == "error", "tsujii on the degenerate system exits 2")
    check(jsonschema.Draft7Validator(schema).is_valid(doc), "the error document validates against the schema")

print(f"{len(failures)} failed")
sys.exit(1 if failures else 0)
