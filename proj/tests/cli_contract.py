"""Exit codes, summary lines and output files of the stab command-line tool."""
import json
import os
import subprocess
import sys
import tempfile

STAB, SRC = sys.argv[1], sys.argv[2]
failures = []


def run(*args, env=None):
    e = dict(os.environ)
    if env:
        e.update(env)
    p = subprocess.run([STAB, *args], capture_output=True, text=True, env=e)
    return p.returncode, p.stdout, p.stderr


def summary(out):
    lines = [l for l in out.splitlines() if l.strip()]
    return json.loads(lines[-1]) if lines else None


def check(name, cond, detail=""):
    print(("PASS " if cond else "FAIL ") + name + ("" if cond else "  " + detail))
    if not cond:
        failures.append(name)


def read(path):
    with open(path, "rb") as f:
        return f.read()


with tempfile.TemporaryDirectory() as d:
    p = lambda n: os.path.join(d, n)

    rc, out, err = run()
    check("no subcommand exits 2 with usage", rc == 2 and "Usage" in err, f"rc={rc}")
    rc, out, err = run("orbit", "--bogus")
    check("unknown flag exits 2", rc == 2 and "Usage" in err, f"rc={rc}")
    rc, out, err = run("catalog", "list")
    s = summary(out)
    check("catalog list", rc == 0 and s["ok"] and [m["name"] for m in s["maps"]] ==
          ["cat", "catpert", "northsouth", "da", "product", "cat2"], out)
    rc, out, err = run("--catalog", os.path.join(SRC, "data", "catalog.json"), "catalog", "list")
    check("catalog file loads", rc == 0, err)
    rc, out, err = run("--catalog", p("missing.json"), "catalog", "list")
    check("missing catalog exits 2", rc == 2 and summary(out)["ok"] is False, f"rc={rc}")
    rc, out, err = run("orbit", "--map", "nosuch", "--x", "0.1", "--out", p("o.csv"))
    check("unknown map exits 2", rc == 2, f"rc={rc}")

    rc, out, err = run("orbit", "--map", "cat", "--x", "0.1,0.2", "--range", "-2:3", "--out", p("o.csv"))
    rows = read(p("o.csv")).decode().splitlines()
    check("orbit csv", rc == 0 and rows[0] == "n,x,y" and len(rows) == 7 and rows[3].startswith("0,0.1"), str(rows[:4]))
    rc, out, err = run("orbit", "--map", "product", "--x", "0.1,0.2,0.3", "--out", p("op.csv"))
    check("product orbit header", rc == 0 and read(p("op.csv")).decode().startswith("n,theta,x,y\n"))
    rc, out, err = run("orbit", "--map", "cat", "--x", "0.1", "--out", p("bad.csv"))
    check("wrong point dimension exits 2", rc == 2, f"rc={rc}")

    rc, out, err = run("conjugate", "--eps", "0.5", "--res", "32")
    s = summary(out)
    check("too-large perturbation exits 1", rc == 1 and s["ok"] is False and "too large" in s["error"], out)
    for k in (1, 2):
        rc, out, err = run("conjugate", "--eps", "0.01", "--res", "64", "--out", p(f"conj{k}.json"))
    s = summary(out)
    check("conjugate residual", rc == 0 and s["residual"] < 1e-6 and s["injectivity_violations"] == 0, out)
    check("conjugate rerun byte-identical", read(p("conj1.json")) == read(p("conj2.json")))
    rc, out, err = run("conjugate", "--pert", "constant:1,0", "--res", "16", "--out", p("const.json"))
    u = json.loads(read(p("const.json")))["u"]
    check("constant perturbation closed form", rc == 0 and all(abs(a) < 1e-12 and abs(b + 0.01) < 1e-12 for a, b in u))

    rc, out, err = run("centralizer", "build", "--map", "northsouth", "--kind", "ms", "--out", p("ms.json"))
    s = summary(out)
    check("ms centralizer", rc == 0 and s["commutation_residual"] < 1e-8 and s["d0_to_identity"] > 0, out)
    rc, out, err = run("centralizer", "build", "--map", "da", "--kind", "bump", "--zeta", "0.02", "--t", "1")
    check("bump push too large exits 2", rc == 2 and "quarter" in summary(out)["error"], out)
    rc, out, err = run("centralizer", "probe", "--map", "cat", "--grid", "8")
    s = summary(out)
    check("cat probe finds no witness", rc == 0 and s["witnesses"] == [], out)

    rc, out, err = run("expansive", "--map", "northsouth", "--out", p("ns.json"))
    s = summary(out)
    csv = read(p("ns.failing.csv")).decode().splitlines()
    check("expansive default csv", rc == 0 and csv[0] == "x0,y0,max_separation" and len(csv) == s["failing"] + 1, str(csv[:2]))
    a = run("expansive", "--map", "cat", "--set", "random:200:4", "--out", p("t1.json"), env={"STAB_THREADS": "1"})
    b = run("expansive", "--map", "cat", "--set", "random:200:4", "--out", p("t3.json"), env={"STAB_THREADS": "3"})
    check("thread count does not change output", a[1] == b[1] and read(p("t1.json")) == read(p("t3.json")))
    rc, out, err = run("expansive", "--map", "cat", "--set", "lattice:4")
    check("bad point set exits 2", rc == 2, f"rc={rc}")

    rc, out, err = run("sensitivity", "--map", "product", "--horizon", "30", "--eps", "0.1", "--out", p("sen.json"))
    check("product sensitivity", rc == 0 and summary(out)["fraction"] == 1.0, out)
    rc, out, err = run("certificate", "shrinking-ball", "--out", p("cert.json"))
    s = summary(out)
    check("certificate valid", rc == 0 and s["valid"] and s["certified_bound"] < 0.1, out)
    rc, out, err = run("certificate", "shrinking-ball", "--eps", "0.6")
    check("certificate eps too large exits 2", rc == 2, f"rc={rc}")

    rc, out, err = run("chains", "analyze", "--spec", os.path.join(SRC, "data", "specs", "da.txt"), "--format", "text")
    s = summary(out)
    check("chains da", rc == 0 and s["verdict"]["densely_expansive"] and not s["verdict"]["anosov"] and
          "theta_a = {}" in out, out)
    with open(p("bad.txt"), "w") as f:
        f.write("ambient 2\npiece A kind=attractor trivial=yes dim_u=1 dim_s=1\n")
    rc, out, err = run("chains", "analyze", "--spec", p("bad.txt"))
    s = summary(out)
    check("invalid spec exits 2 with line", rc == 2 and s["valid"] is False and s["violations"][0]["line"] == 2, out)
    rc, out, err = run("chains", "analyze", "--spec", p("nope.txt"))
    check("missing spec exits 2", rc == 2, f"rc={rc}")
    rc, out, err = run("chains", "analyze", "--builtin", "da", "--spec", p("bad.txt"))
    check("both spec sources exits 2", rc == 2, f"rc={rc}")

    for suite in ("chains", "centralizer"):
        rc, out, err = run("verify", suite, "--out", p(f"v_{suite}.json"))
        s = summary(out)
        doc = json.loads(read(p(f"v_{suite}.json")))
        check(f"verify {suite} exit matches summary", rc == (0 if s["ok"] else 3) and s["ok"] == doc["pass"], f"rc={rc} {out[-200:]}")
    rc, out, err = run("verify", "nonsense")
    check("verify unknown suite exits 2", rc == 2, f"rc={rc}")

print(f"{len(failures)} failure(s)")
sys.exit(1 if failures else 0)
