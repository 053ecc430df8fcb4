"""Validates the JSON documents written by stab, and the shipped catalog, against schemas/."""
import json
import os
import subprocess
import sys
import tempfile

import jsonschema

STAB, SRC = sys.argv[1], sys.argv[2]
SCHEMAS = os.path.join(SRC, "schemas")
failures = []


def schema(name):
    with open(os.path.join(SCHEMAS, name + ".schema.json")) as f:
        s = json.load(f)
    jsonschema.Draft202012Validator.check_schema(s)
    return s


def validate(label, doc, name):
    try:
        jsonschema.validate(doc, schema(name), cls=jsonschema.Draft202012Validator)
        print("PASS " + label)
    except jsonschema.ValidationError as e:
        print(f"FAIL {label}: {e.message} at {list(e.absolute_path)}")
        failures.append(label)


with open(os.path.join(SRC, "data", "catalog.json")) as f:
    validate("data/catalog.json", json.load(f), "catalog")

runs = [
    ("conjugate", ["conjugate", "--res", "32"], "conjugate"),
    ("centralizer build ms", ["centralizer", "build", "--map", "northsouth", "--kind", "ms"], "centralizer_build"),
    ("centralizer build bump", ["centralizer", "build", "--map", "da", "--kind", "bump"], "centralizer_build"),
    ("centralizer family ns", ["centralizer", "family", "--map", "northsouth", "--steps", "3"], "centralizer_family"),
    ("centralizer family da", ["centralizer", "family", "--map", "da", "--steps", "3"], "centralizer_family"),
    ("centralizer probe", ["centralizer", "probe", "--map", "cat", "--grid", "4"], "centralizer_probe"),
    ("expansive", ["expansive", "--map", "northsouth"], "expansive"),
    ("sensitivity", ["sensitivity", "--map", "northsouth"], "sensitivity"),
    ("certificate", ["certificate", "shrinking-ball"], "certificate"),
    ("chains", ["chains", "analyze", "--builtin", "example44", "--one-step"], "chains"),
    ("verify", ["verify", "chains"], "verify"),
]

with tempfile.TemporaryDirectory() as d:
    for k, (label, args, name) in enumerate(runs):
        out = os.path.join(d, f"{k}.json")
        p = subprocess.run([STAB, *args, "--out", out], capture_output=True, text=True)
        if p.returncode not in (0, 3):
            print(f"FAIL {label}: exit {p.returncode} {p.stderr.strip()}")
            failures.append(label)
            continue
        with open(out) as f:
            validate(label, json.load(f), name)
        validate(label + " summary", json.loads(p.stdout.strip().splitlines()[-1]), "summary")

    with open(os.path.join(d, "bad.txt"), "w") as f:
        f.write("ambient 2\nedge A > B\n")
    out = os.path.join(d, "bad.json")
    subprocess.run([STAB, "chains", "analyze", "--spec", os.path.join(d, "bad.txt"), "--out", out], capture_output=True)
    with open(out) as f:
        validate("chains invalid spec", json.load(f), "chains")

print(f"{len(failures)} failure(s)")
sys.exit(1 if failures else 0)
