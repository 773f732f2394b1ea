#!/usr/bin/env python3
"""End-to-end checks of the bench CLI: exit codes, output layout, schema
validation and byte-identical reruns.

usage: check_cli.py <bench-binary> <schema.json> <scratch-dir>
"""

import json
import os
import shutil
import subprocess
import sys

import jsonschema

BENCH, SCHEMA, SCRATCH = sys.argv[1:4]

SMALL = """version = 1
problem = robust
seeds = 0..2
n = 100
p = 5
k = 6
solver amrr_fc {
}
solver robust_gpgd {
}
"""

failures = []


def check(cond, what):
    if not cond:
        failures.append(what)
        print("FAIL:", what)


def run(*args, env=None):
    return subprocess.run([BENCH, *args], capture_output=True, text=True, env=env)


def write(name, text):
    path = os.path.join(SCRATCH, name)
    with open(path, "w") as f:
        f.write(text)
    return path


def read_dir(path):
    out = {}
    for name in sorted(os.listdir(path)):
        with open(os.path.join(path, name), "rb") as f:
            out[name] = f.read()
    return out


shutil.rmtree(SCRATCH, ignore_errors=True)
os.makedirs(SCRATCH)
small = write("small.cfg", SMALL)

# CSV run, rerun with a different job count: identical bytes with timing off.
a = run("run", "--config", small, "--out", os.path.join(SCRATCH, "a"), "--no-timing")
check(a.returncode == 0, "csv run exits 0 (stderr: %s)" % a.stderr.strip())
env = dict(os.environ, NCOPT_BENCH_JOBS="3")
b = run("run", "--config", small, "--out", os.path.join(SCRATCH, "b"), "--no-timing", env=env)
check(b.returncode == 0, "rerun with NCOPT_BENCH_JOBS=3 exits 0")
files_a, files_b = read_dir(os.path.join(SCRATCH, "a")), read_dir(os.path.join(SCRATCH, "b"))
check(files_a == files_b, "reruns are byte-identical")
check("results.csv" in files_a, "results.csv written")
check("amrr_fc_0_trace.csv" in files_a and "robust_gpgd_2_trace.csv" in files_a, "trace sidecars written")
check(len(files_a) == 7, "one results file plus six sidecars")
header = files_a["results.csv"].decode().splitlines()[0]
check(header == "problem,solver,seed,n,p,s,r,k,iterations,final_error,wall_seconds,converged", "results header")
check(files_a["amrr_fc_1_trace.csv"].decode().startswith("iteration,objective,error,elapsed\n"), "trace header")

# JSON output validates against the shipped schema.
j = run("run", "--config", small, "--out", os.path.join(SCRATCH, "j"), "--format", "json")
check(j.returncode == 0, "json run exits 0")
with open(SCHEMA) as f:
    schema = json.load(f)
with open(os.path.join(SCRATCH, "j", "results.json")) as f:
    doc = json.load(f)
try:
    jsonschema.validate(doc, schema)
except jsonschema.ValidationError as e:
    check(False, "results.json validates: %s" % e.message)
check(len(doc["rows"]) == 6, "json has six rows")
bad = dict(doc, schema_version=2)
check(not jsonschema.Draft202012Validator(schema).is_valid(bad), "schema rejects a wrong version")

# Config errors exit 2 with a JSON report naming the problem.
c = run("run", "--config", write("bad.cfg", SMALL.replace("amrr_fc", "amrr_xx")), "--out", os.path.join(SCRATCH, "c"))
check(c.returncode == 2, "unknown solver exits 2")
try:
    report = json.loads(c.stderr.strip().splitlines()[-1])
    check(report["error"] == "config" and "amrr_xx" in report["message"], "config report names the solver")
except (ValueError, IndexError, KeyError):
    check(False, "config error report is JSON")
check(run("run", "--config", os.path.join(SCRATCH, "missing.cfg"), "--out", SCRATCH).returncode == 2,
      "missing config exits 2")
check(run("run", "--config", small, "--out", SCRATCH, "--format", "xml").returncode == 2, "bad format exits 2")
check(run("run", "--config", small).returncode == 2, "missing --out exits 2")
check(run("list-solvers", "--problem", "nope").returncode == 2, "unknown problem exits 2")

# Run failures exit 1 and leave failures.json next to the results.
f = run("run", "--config", write("fail.cfg", SMALL.replace("k = 6", "k = 60")), "--out", os.path.join(SCRATCH, "f"))
check(f.returncode == 1, "generator failure exits 1")
fail_path = os.path.join(SCRATCH, "f", "failures.json")
check(os.path.exists(fail_path), "failures.json written")
if os.path.exists(fail_path):
    with open(fail_path) as fh:
        check(len(json.load(fh)["failures"]) == 6, "every run reported")

# list-solvers
ls = run("list-solvers", "--problem", "phase")
check(ls.returncode == 0 and "solver gsam" in ls.stdout and "solver wf" in ls.stdout, "list-solvers phase")

if failures:
    print("%d CLI check(s) failed" % len(failures))
    sys.exit(1)
print("all CLI checks passed")
