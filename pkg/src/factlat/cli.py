"""Command-line interface: ``factlat <command> [options]``.

Every command except ``hasse`` prints a report (JSON by default).  Reports
for identical command, config and seed are byte-identical apart from the
``timing`` subobject.  Exit codes: 0 when every check passes, 1 on a
verification failure, 2 on a usage or limit error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import random
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict
from pathlib import Path

from . import factlat, propcheck, serialize, wigner
from .config import Caps, get_caps, parse_caps
from .errors import FactlatError, LimitExceeded, PipelineError, TooLarge, VerificationFailure
from .partitions import Permutation

PRNG = "MT19937"
EXIT_PASS, EXIT_FAIL, EXIT_USAGE = 0, 1, 2
OCTET_SAMPLES = 20_000


# -- report assembly ---------------------------------------------------------------

def _config(args, caps: Caps, **extra) -> dict:
    cfg = {"ground_size": args.n}
    for key in ("seed", "trials", "jobs"):
        if hasattr(args, key):
            cfg[key] = getattr(args, key)
    cfg.update(extra)
    cfg["format"] = args.format
    cfg["output"] = args.output or "-"
    cfg["caps"] = asdict(caps)
    cfg["prng"] = PRNG
    return cfg


def _report(command: str, config: dict, checks: list[dict], result: dict, started: float,
            error: str | None = None) -> dict:
    if error is not None:
        status, code = "error", EXIT_USAGE
    elif all(c["status"] in ("pass", "skip") for c in checks):
        status, code = "pass", EXIT_PASS
    else:
        status, code = "fail", EXIT_FAIL
    doc = serialize.document(command=command, config=config, checks=checks, result=result,
                             status=status, exit_code=code)
    if error is not None:
        doc["error"] = error
    doc["timing"] = {"seconds": round(time.perf_counter() - started, 3)}
    return doc


def _check(name: str, ok: bool, witness=None) -> dict:
    return {"name": name, "status": "pass" if ok else "fail", "witness": None if ok else witness}


def _render(doc: dict, fmt: str) -> str:
    if fmt == "json":
        return serialize.dumps(doc)
    if fmt == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["name", "status", "witness"])
        for c in doc["checks"]:
            writer.writerow([c["name"], c["status"], "" if c["witness"] is None else json.dumps(c["witness"])])
        return buf.getvalue()
    lines = [f"{doc['command']}: {doc['status']} (exit {doc['exit_code']})"]
    if "error" in doc:
        lines.append(f"error: {doc['error']}")
    for key, value in doc["result"].items():
        if isinstance(value, (list, dict)):
            continue
        lines.append(f"{key}: {_pretty(value)}")
    for c in doc["checks"]:
        lines.append(f"  [{c['status']}] {c['name']}")
    return "\n".join(lines) + "\n"


def _pretty(value):
    if isinstance(value, str) and value.isdigit():
        return f"{int(value):,}"
    return value


# -- commands ------------------------------------------------------------------------

def cmd_count(args, caps: Caps) -> dict:
    started = time.perf_counter()
    config = _config(args, caps, verify=args.verify)
    if args.n < 1:
        return _report("count", config, [], {}, started, error="n must be at least 1")
    total = factlat.fact_cardinality(args.n)
    table = [{"divisor": row["divisor"], "pairs": str(row["pairs"])} for row in factlat.count_table(args.n)]
    result = {"n": args.n, "total": str(total), "table": table}
    checks = []
    if args.verify:
        if args.n > caps.verify_cap:
            return _report("count", config, [], result, started,
                           error=f"--verify is capped at n={caps.verify_cap}")
        enumerated = sum(1 for _ in factlat.iter_factor_pairs(args.n))
        result["enumerated"] = str(enumerated)
        checks.append(_check("formula_matches_enumeration", enumerated == total,
                             {"formula": str(total), "enumerated": str(enumerated)}))
    return _report("count", config, checks, result, started)


def cmd_axioms(args, caps: Caps) -> dict:
    started = time.perf_counter()
    config = _config(args, caps, octet_samples=OCTET_SAMPLES)
    if args.n < 1:
        return _report("axioms", config, [], {}, started, error="n must be at least 1")
    try:
        poset = factlat.enumerate_fact(args.n, limit=min(caps.poset_cap, caps.order_cap))
    except LimitExceeded as exc:
        return _report("axioms", config, [], {}, started, error=str(exc))
    omp = factlat.check_omp_axioms(poset)
    checks = [
        {"name": r.name, "status": "pass" if r.passed else "fail",
         "witness": None if r.passed else [list(v) for v in r.violations]}
        for r in omp.results
    ]
    size = len(poset)
    if args.n <= 8:
        pairs = ((i, j) for i in range(size) for j in range(size))
        mode, checked = "exhaustive", size * size
    else:
        rng = random.Random(args.seed)
        pairs = ((rng.randrange(size), rng.randrange(size)) for _ in range(OCTET_SAMPLES))
        mode, checked = "sampled", OCTET_SAMPLES
    mismatch = None
    for i, j in pairs:
        below = bool(poset.up(i) >> j & 1)
        if below != (factlat.boolean_octet(poset[i], poset[j]) is not None):
            mismatch = [i, j]
            break
    checks.append(_check("order_matches_octet", mismatch is None, mismatch))
    result = {"n": args.n, "size": size, "octet_mode": mode, "octet_pairs": checked}
    return _report("axioms", config, checks, result, started)


def _roundtrip_trial(n: int, index: int, seed: int, adversarial: bool) -> dict:
    rng = random.Random(seed)
    entry = {"trial": index, "seed": str(seed)}
    if adversarial:
        beta, info = wigner.corrupted_beta(n, rng)
        entry["corruption"] = {k: info[k] for k in ("u", "v", "w", "overridden")}
        sigma = None
    else:
        sigma = Permutation.identity(n) if index == 0 else Permutation.random(n, rng)
        beta = wigner.psi_star(sigma)
    try:
        got, trace = wigner.extract_permutation(beta, seed=seed)
    except VerificationFailure as exc:
        entry.update(outcome="verification-failure", message=str(exc))
        return entry
    except PipelineError as exc:
        entry.update(outcome="pipeline-error", error=type(exc).__name__, message=str(exc))
        return entry
    entry["audits"] = trace.audits_passed
    if sigma is None:
        entry["outcome"] = "accepted"
    else:
        entry["outcome"] = "recovered" if got == sigma else "wrong-permutation"
    return entry


def cmd_wigner_roundtrip(args, caps: Caps) -> dict:
    started = time.perf_counter()
    config = _config(args, caps, adversarial=args.adversarial)
    if args.n < 12 or args.n % 12:
        return _report("wigner-roundtrip", config, [], {}, started,
                       error="n must be a positive multiple of 12")
    if args.trials < 1 or args.jobs < 1:
        return _report("wigner-roundtrip", config, [], {}, started,
                       error="trials and jobs must be at least 1")
    master = random.Random(args.seed)
    seeds = [master.getrandbits(64) for _ in range(args.trials)]
    work = [(args.n, i, s, args.adversarial) for i, s in enumerate(seeds)]
    if args.jobs > 1:
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            trials = list(pool.map(_roundtrip_trial, *zip(*work)))
    else:
        trials = [_roundtrip_trial(*w) for w in work]
    trials.sort(key=lambda t: t["trial"])
    tally: dict[str, int] = {}
    for t in trials:
        tally[t["outcome"]] = tally.get(t["outcome"], 0) + 1
    checks = [
        {"name": f"trial_{t['trial']}", "status": "pass" if t["outcome"] == "recovered" else "fail",
         "witness": None if t["outcome"] == "recovered" else t}
        for t in trials
    ]
    result = {
        "n": args.n,
        "recovered": tally.get("recovered", 0),
        "trials": args.trials,
        "outcomes": dict(sorted(tally.items())),
        "audits_passed": sum(t.get("audits", 0) for t in trials),
        "per_trial": trials,
    }
    return _report("wigner-roundtrip", config, checks, result, started)


def cmd_aut(args, caps: Caps) -> dict:
    started = time.perf_counter()
    config = _config(args, caps, order_only=args.order_only)
    if args.n < 1:
        return _report("aut", config, [], {}, started, error="n must be at least 1")
    try:
        poset = factlat.enumerate_fact(args.n, limit=caps.poset_cap)
        group = wigner.brute_force_aut(poset, respect_perp=True, cap=caps.aut_cap)
        loose = wigner.brute_force_aut(poset, respect_perp=False, cap=caps.aut_cap) if args.order_only else None
    except (LimitExceeded, TooLarge) as exc:
        return _report("aut", config, [], {}, started, error=str(exc))
    image, kernel, _ = wigner.gamma_image_kernel(poset)
    holds = image == group.order and kernel == 1
    bad_gen = next((g for g in group.generators if not wigner.is_poset_automorphism(poset, g)), None)
    checks = [
        _check("generators_are_automorphisms", bad_gen is None, bad_gen),
        _check("gamma_image_divides_group_order", group.order % image == 0,
               {"order": str(group.order), "image": image}),
    ]
    result = {
        "n": args.n,
        "size": len(poset),
        "aut_order": str(group.order),
        "gamma_image": image,
        "gamma_kernel": kernel,
        "verdict": "holds" if holds else "fails",
        "group": serialize.group_to_json(group),
    }
    if loose is not None:
        result["order_only_aut_order"] = str(loose.order)
    return _report("aut", config, checks, result, started)


def cmd_hasse(args, caps: Caps) -> int:
    if args.n < 1:
        print("error: n must be at least 1", file=sys.stderr)
        return EXIT_USAGE
    try:
        poset = factlat.enumerate_fact(args.n, limit=caps.poset_cap)
    except LimitExceeded as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    text = serialize.hasse_dot(poset) if args.format == "dot" else serialize.dumps(serialize.hasse_json(poset))
    _emit(text, args.output)
    return EXIT_PASS


def cmd_propcheck(args, caps: Caps) -> dict:
    started = time.perf_counter()
    config = _config(args, caps, suite=args.suite)
    if args.n < 1 or args.trials < 1:
        return _report("propcheck", config, [], {}, started, error="n and trials must be at least 1")
    results = propcheck.run_suite(args.suite, args.n, args.trials, args.seed)
    checks = [{"name": f"{r.suite}.{r.name}", "status": r.status, "witness": r.witness} for r in results]
    tally = {s: sum(1 for r in results if r.status == s) for s in ("pass", "fail", "skip")}
    return _report("propcheck", config, checks, {"suite": args.suite, **tally}, started)


# -- entry point ---------------------------------------------------------------------

def _emit(text: str, output: str | None) -> None:
    if output and output != "-":
        Path(output).write_text(text)
    else:
        sys.stdout.write(text)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="factlat", description="Factor-pair posets and their automorphisms.")
    parser.add_argument("--caps", help="override resource caps, e.g. poset_cap=10,aut_cap=400")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, formats=("json", "text", "csv"), default="json"):
        p.add_argument("--n", type=int, required=True, help="ground set size")
        p.add_argument("--format", choices=formats, default=default)
        p.add_argument("--output", help="write to this path instead of stdout")
        return p

    p = common(sub.add_parser("count", help="count factor pairs"))
    p.add_argument("--verify", action="store_true", help="cross-check the formula by enumeration")

    p = common(sub.add_parser("axioms", help="check the orthomodular poset axioms"))
    p.add_argument("--seed", type=int, default=0)

    p = common(sub.add_parser("wigner-roundtrip", help="recover random permutations from their induced maps"))
    p.add_argument("--trials", type=int, default=10)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--adversarial", action="store_true", help="feed corrupted tables instead")

    p = common(sub.add_parser("aut", help="automorphism group of a small poset"))
    p.add_argument("--order-only", action="store_true", help="also count automorphisms ignoring the complement")

    common(sub.add_parser("hasse", help="export the Hasse diagram"), formats=("dot", "json"), default="dot")

    p = common(sub.add_parser("propcheck", help="run randomized invariant checks"))
    p.add_argument("--suite", choices=(*propcheck.SUITES, "all", "none"), default="all")
    p.add_argument("--trials", type=int, default=100)
    p.add_argument("--seed", type=int, default=0)
    return parser


COMMANDS = {
    "count": cmd_count,
    "axioms": cmd_axioms,
    "wigner-roundtrip": cmd_wigner_roundtrip,
    "aut": cmd_aut,
    "propcheck": cmd_propcheck,
}


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        caps = parse_caps(args.caps, get_caps())
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    if args.command == "hasse":
        return cmd_hasse(args, caps)
    try:
        doc = COMMANDS[args.command](args, caps)
    except FactlatError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    _emit(_render(doc, args.format), args.output)
    return doc["exit_code"]


if __name__ == "__main__":
    sys.exit(main())
