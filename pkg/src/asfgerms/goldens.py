"""Golden corpus: fixed CLI runs whose canonical reports must stay byte-identical.

Layout of a corpus directory:
    manifest.json       job name -> argv ("{corpus}" expands to the directory)
    inputs/*.json       gamma files
    reports/<name>.json canonical report of each job

Jobs are dealt round-robin to worker processes and merged by name, so the
stored bytes cannot depend on the shard count.
"""

from __future__ import annotations

import difflib
import json
import os
from concurrent.futures import ProcessPoolExecutor

from .report import canonical_json

# gamma files: name -> (p, a, b, c) with {exponent: coefficient}
GAMMAS = {
    "split_1_q3": (3, {0: 1}, {}, {}),
    "split_t_q3": (3, {1: 1}, {}, {}),
    "ram_q3": (3, {}, {0: 1}, {1: 1}),
    "ram_eps_q3": (3, {}, {0: 1}, {1: 2}),
    "unram_q3": (3, {}, {0: 1}, {0: 2}),
    "unram_t_q5": (5, {}, {1: 1}, {1: 2}),
    "split_t_q5": (5, {1: 1}, {}, {}),
    "ram_q5": (5, {}, {0: 1}, {1: 1}),
}


def _gamma_path(name: str) -> str:
    return "{corpus}/inputs/" + name + ".json"


def default_jobs() -> dict:
    jobs = {
        "grade_A1_origin": ["grade", "--group", "A1", "--x", "0", "--q", "3"],
        "grade_A2_barycenter": ["grade", "--group", "A2", "--x", "1/3 1/3", "--q", "7"],
        "grade_C2_quarter": ["grade", "--group", "C2", "--x", "1/4 1/4", "--q", "5"],
        "nilorbits_A1_origin": ["nilorbits", "--group", "A1", "--x", "0", "--d", "0", "--q", "3"],
        "nilorbits_A1_iwahori": ["nilorbits", "--group", "A1", "--x=-1/4", "--d", "1/2", "--q", "5"],
        "nilorbits_A2_barycenter": ["nilorbits", "--group", "A2", "--x", "1/3 1/3", "--d", "1/3", "--q", "7"],
        "hess_A1_regular": ["hess", "--group", "A1", "--x", "0", "--d", "0", "--q", "3", "--e", "0,0,1", "--gamma", "1,0,1"],
        "descend_A1_iwahori": ["descend", "--group", "A1", "--x=-1/4", "--d", "1/2", "--q", "5", "--e", "0,0,1"],
    }
    for name in ("ram_q3", "split_t_q3", "unram_q3"):
        for x, d in (("0", "0"), ("-1/4", "0")):
            tag = f"{name}_x{x.replace('/', '_')}_d{d}"
            for action in ("count", "stratify"):
                jobs[f"asf_{action}_{tag}"] = ["asf", action, "--q", "3", "--gamma", _gamma_path(name), f"--x={x}", "--d", d, "--precision", "3"]
    jobs["asf_descend_split_t_q3"] = ["asf", "descend", "--q", "3", "--gamma", _gamma_path("split_t_q3"), "--x", "0", "--d", "0", "--precision", "3"]
    jobs["asf_descend_ram_q5"] = ["asf", "descend", "--q", "5", "--gamma", _gamma_path("ram_q5"), "--x=-1/4", "--d", "0", "--precision", "3"]
    for name, spec in GAMMAS.items():
        jobs[f"shalika_{name}"] = ["shalika", "germs", "--q", str(spec[0]), "--gamma", _gamma_path(name), "--precision", "3"]
    return jobs


def _gamma_json(p: int, a: dict, b: dict, c: dict) -> dict:
    mk = lambda d: {"coeffs": {str(k): str(v) for k, v in sorted(d.items())}, "precision": None}
    return {"field": {"p": p, "r": 1}, "a": mk(a), "b": mk(b), "c": mk(c)}


def _run_job(item) -> tuple[str, int, str]:
    from .cli import run

    name, argv, corpus = item
    code, rep, msg = run([s.replace("{corpus}", corpus) for s in argv])
    if rep is None:
        return name, code, canonical_json({"exit": code, "message": msg})
    return name, code, rep.dumps()


def run_jobs(corpus: str, jobs: dict, shards: int) -> dict:
    items = [(name, jobs[name], corpus) for name in sorted(jobs)]
    if shards <= 1:
        done = [_run_job(it) for it in items]
    else:
        parts = [items[i::shards] for i in range(shards)]
        with ProcessPoolExecutor(max_workers=shards) as ex:
            done = [r for part in ex.map(_run_shard, parts) for r in part]
    return {name: (code, text) for name, code, text in sorted(done)}


def _run_shard(items) -> list:
    return [_run_job(it) for it in items]


def write_inputs(corpus: str) -> None:
    os.makedirs(os.path.join(corpus, "inputs"), exist_ok=True)
    for name, spec in GAMMAS.items():
        with open(os.path.join(corpus, "inputs", f"{name}.json"), "w") as fh:
            fh.write(canonical_json(_gamma_json(*spec)))


def regen_corpus(corpus: str, shards: int = 1) -> dict:
    """Write inputs, manifest and reports; returns the exit code of every job."""
    write_inputs(corpus)
    jobs = default_jobs()
    with open(os.path.join(corpus, "manifest.json"), "w") as fh:
        fh.write(canonical_json({"jobs": jobs}))
    out = run_jobs(corpus, jobs, shards)
    os.makedirs(os.path.join(corpus, "reports"), exist_ok=True)
    for name, (code, text) in out.items():
        with open(os.path.join(corpus, "reports", f"{name}.json"), "w") as fh:
            fh.write(text if text.endswith("\n") else text + "\n")
    return {name: code for name, (code, _) in out.items()}


def check_corpus(corpus: str, shards: int = 1) -> list[str]:
    """Rerun every job and compare bytes; returns human-readable differences."""
    with open(os.path.join(corpus, "manifest.json")) as fh:
        jobs = json.load(fh)["jobs"]
    out = run_jobs(corpus, jobs, shards)
    diffs = []
    for name, (_, text) in out.items():
        text = text if text.endswith("\n") else text + "\n"
        path = os.path.join(corpus, "reports", f"{name}.json")
        try:
            with open(path) as fh:
                stored = fh.read()
        except OSError:
            diffs.append(f"missing golden {path}")
            continue
        if stored != text:
            delta = difflib.unified_diff(stored.splitlines(), text.splitlines(), path, "rerun", lineterm="", n=1)
            diffs.append("\n".join(list(delta)[:40]))
    return diffs
