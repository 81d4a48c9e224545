"""Command line entry point: ``verify``, ``measure`` and ``witness``.

Exit codes: 0 pass, 1 mathematical failure, 2 usage or config error,
3 internal error.  ``HILBMNC_WORKERS`` sets the worker count.
"""

from __future__ import annotations

import argparse
import os
import sys
import traceback
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np

from .. import oracle
from ..covering import distance_matrix
from ..hmodule import block_part, vec_norm
from ..opmnc import image_ball_sampler, lambda_op_profile
from ..seminorm import (AdmissiblePair, SamplerExhausted, WindowTooSmall, basis_pair, build_blocked_system,
                        build_witness_system, validate_certificate)
from ..serialize import certificate_to_json, dumps
from ..setmnc import head_family, lambda_profile, lambda_via_projection_family, mnc_bracket
from . import suites
from .config import (ConfigError, Scenario, build_operator, build_projection, build_set, build_states,
                     derive_seed, load_scenario)

EXIT_OK, EXIT_FAIL, EXIT_CONFIG, EXIT_INTERNAL = 0, 1, 2, 3
WORKERS_ENV = "HILBMNC_WORKERS"


class MathFailure(RuntimeError):
    pass


def worker_count() -> int:
    raw = os.environ.get(WORKERS_ENV)
    if raw is None:
        return min(4, os.cpu_count() or 1)
    try:
        n = int(raw)
    except ValueError:
        raise ConfigError(f"{WORKERS_ENV}={raw!r} is not an integer") from None
    if n < 1:
        raise ConfigError(f"{WORKERS_ENV} must be >= 1")
    return n


def _parallel(fn, items):
    """Run ``fn`` over ``items``; results come back in declaration order."""
    items = list(items)
    with ThreadPoolExecutor(max_workers=worker_count()) as pool:
        return list(pool.map(fn, items))


def _write(out: Path, name: str, text: str):
    out.mkdir(parents=True, exist_ok=True)
    (out / name).write_text(text)


def _objects(sc: Scenario, validate_projections: bool = True):
    try:
        projections = {p.name: build_projection(sc, p, validate_projections) for p in sc.projections}
        operators = {o.name: build_operator(sc, o) for o in sc.operators}
    except ConfigError:
        raise
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    return projections, operators


# -- verify ------------------------------------------------------------------

def cmd_verify(sc: Scenario, out: Path, audit: bool = False) -> int:
    projections, operators = _objects(sc, validate_projections=False)
    shape, N, T = sc.shape, sc.N, sc.verify.trials
    tol = sc.tolerances
    # only projection-free sets can be built before the projections are known to be valid
    valid_proj = {k: Q for k, Q in projections.items() if max(Q.defects()) <= tol.projection}
    sets = {s.name: build_set(sc, s, valid_proj, operators) for s in sc.sets
            if s.kind != "submodule_ball" or s.projection in valid_proj}

    jobs = [
        lambda rng: suites.algebra_checks(shape, N, T, rng),
        lambda rng: suites.hmodule_checks(shape, N, T, rng),
        lambda rng: suites.projection_checks(projections, tol.projection),
        lambda rng: suites.seminorm_checks(shape, N, T, sc.verify.samples, rng),
        lambda rng: suites.setmnc_checks(shape, N, T, sc.m_range, tol.bracket, rng),
        lambda rng: suites.bracket_checks(sets, N, sc.window, sc.m_range, tol.bracket),
        lambda rng: suites.opmnc_checks(shape, N, T, operators, rng),
    ]
    if audit:
        jobs.append(lambda rng: suites.oracle_checks(shape, N, T, rng))
    seeds = np.random.SeedSequence(sc.seed).spawn(len(jobs))
    groups = _parallel(lambda job: job[0](np.random.default_rng(job[1])), zip(jobs, seeds))
    results = [r for g in groups for r in g]
    passed = all(r.passed for r in results)
    report = {"command": "verify", "seed": sc.seed, "algebra": sc.algebra, "N": N, "passed": passed,
              "invariants": [r.to_dict() for r in results]}
    _write(out, "verify.json", dumps(report))
    for r in results:
        if not r.passed:
            print(f"FAIL {r.name}: worst margin {r.worst_margin:.3e} {r.detail}".rstrip(), file=sys.stderr)
    print(f"verify: {sum(r.passed for r in results)}/{len(results)} invariants hold")
    return EXIT_OK if passed else EXIT_FAIL


# -- measure -----------------------------------------------------------------

def _blocked_pair(sc: Scenario, E, desc, rng) -> AdmissiblePair:
    breaks = desc.breaks
    if breaks[-1] > sc.N:
        raise ConfigError(f"blocked pair breaks {breaks} exceed N = {sc.N}")
    Y = []
    for a, b in zip(breaks, breaks[1:]):
        Y.append(max(E.points, key=lambda x: vec_norm(block_part(x, a, b))))
    return AdmissiblePair(build_blocked_system(Y, breaks), build_states(sc, desc, len(Y), rng))


def _measure_one(sc: Scenario, name: str, E, projections: dict, profile=None) -> tuple[str, dict, str]:
    E.label = name
    window = sc.window
    prof = lambda_profile(E, window) if profile is None else profile
    lam = float(prof[-1])
    pairs, notes, cert = [], [], None
    for idx, desc in enumerate(sc.pairs):
        rng = np.random.default_rng(derive_seed(sc, desc.seed + idx))
        if desc.kind == "basis":
            pairs.append(basis_pair(sc.shape, sc.N, build_states(sc, desc, sc.N, rng)))
        elif desc.kind == "blocked":
            try:
                pairs.append(_blocked_pair(sc, E, desc, rng))
            except ValueError as exc:
                notes.append(f"pair {idx} skipped: {exc}")
        else:
            if not desc.epsilon < lam:
                notes.append(f"pair {idx} skipped: epsilon {desc.epsilon} >= lambda {lam!r}")
                continue
            try:
                c = build_witness_system(E, prof, desc.epsilon, seed=derive_seed(sc, desc.seed))
            except SamplerExhausted as exc:
                raise MathFailure(f"{name}: {exc} (best achieved {exc.best!r})") from exc
            pairs.append(c.pair)
            cert = c if cert is None or c.guaranteed_bound > cert.guaranteed_bound else cert
    if not pairs:
        pairs.append(basis_pair(sc.shape, sc.N))
        notes.append("no usable pair configured; fell back to the basis pair")
    rep = mnc_bracket(E, pairs, window, sc.m_range, certificate=cert)
    if profile is not None:
        rep.lambda_profile = [float(v) for v in profile]
    # infimum over head projections and the declared (projective) ones; reported next to the head value
    family = head_family(sc.shape, sc.N, window) + list(projections.values())
    doc = {"schema": "mnc-report", "version": 1, "descriptor": name, "seed": sc.seed, "n_max": window,
           "m_range": list(sc.m_range), **rep.to_dict(),
           "lambda_projective": lambda_via_projection_family(E, family), "notes": notes}
    return name, doc, rep.to_csv()


def cmd_measure(sc: Scenario, out: Path, audit: bool = False) -> int:
    if not sc.sets and not sc.operators:
        raise ConfigError("measure needs at least one set or operator descriptor")
    projections, operators = _objects(sc)
    targets = []
    for s in sc.sets:
        targets.append((s.name, lambda s=s: build_set(sc, s, projections, operators), None))
    for o in sc.operators:
        T = operators[o.name]
        targets.append((f"operator-{o.name}",
                        lambda T=T, o=o: image_ball_sampler(T, 8, seed=derive_seed(sc, o.seed)),
                        lambda T=T: lambda_op_profile(T, sc.window)))

    def run(target):
        name, make, prof = target
        return _measure_one(sc, name, make(), projections, None if prof is None else prof())

    results = _parallel(run, targets)
    index = []
    for name, doc, csv_text in results:
        if audit:
            doc["audit"] = _audit_profile(sc, doc)
        _write(out, f"{name}.json", dumps(doc))
        _write(out, f"{name}.csv", csv_text)
        index.append({"descriptor": name, "lambda_value": doc["lambda_value"], "chi_lower": doc["chi_lower"],
                      "chi_upper": doc["chi_upper"]})
        print(f"{name}: lambda = {doc['lambda_value']:.6g}, chi in [{doc['chi_lower']:.6g}, {doc['chi_upper']:.6g}]")
    _write(out, "measure.json", dumps({"command": "measure", "seed": sc.seed, "descriptors": index}))
    return EXIT_OK


def _audit_profile(sc: Scenario, doc: dict) -> dict:
    name = doc["descriptor"]
    if not name.startswith("operator-"):
        return {"checked": False}
    T = build_operator(sc, next(o for o in sc.operators if f"operator-{o.name}" == name))
    worst = 0.0
    for n, v in enumerate(doc["lambda_profile"]):
        mats = [m.copy() for m in T.mats]
        for d, m in zip(sc.shape.block_dims, mats):
            m[: n * d] = 0
        ref = max(oracle.spectral_norm_reference(m) for m in mats)
        worst = max(worst, abs(ref - v) / max(ref, 1e-300))
    return {"checked": True, "spectral_relative_error": worst, "ok": worst <= 1e-8}


# -- witness -----------------------------------------------------------------

def cmd_witness(sc: Scenario, out: Path, audit: bool = False) -> int:
    if sc.witness is None:
        raise ConfigError("witness needs a 'witness' section")
    w = sc.witness
    projections, operators = _objects(sc)
    E = build_set(sc, next(s for s in sc.sets if s.name == w.set), projections, operators)
    prof = lambda_profile(E, sc.window)
    lam = float(prof[-1])
    if not w.epsilon < lam:
        raise ConfigError(f"witness.epsilon: {w.epsilon} must be below lambda = {lam!r} of set {w.set!r}")
    try:
        cert = build_witness_system(E, prof, w.epsilon, seed=derive_seed(sc, 0), count=w.count)
    except SamplerExhausted as exc:
        print(f"witness: unreachable tail level; best achieved {exc.best!r}", file=sys.stderr)
        return EXIT_FAIL
    except WindowTooSmall as exc:
        print(f"witness: {exc}; minimal N = {exc.minimal_N}", file=sys.stderr)
        return EXIT_FAIL
    check = validate_certificate(cert, m_max=w.m_max, samples=E.points[:16])
    doc = certificate_to_json(cert)
    doc["validation"] = {
        "valid": check.valid,
        "failures": check.failures,
        "head_values": check.head_values,
        "worst_leak": check.worst_leak,
        "admissible_residual": check.admissible_residual,
        "pairwise_min": check.pairwise_min,
        "cover_floor": {str(m): v for m, v in check.cover_floor.items()},
    }
    if audit:
        doc["audit"] = _audit_certificate(cert, check)
    _write(out, "certificate.json", dumps(doc))
    for f in check.failures:
        print(f"FAIL {f}", file=sys.stderr)
    print(f"witness: {len(cert.witnesses)} witnesses, bound {cert.guaranteed_bound:.6g}, "
          f"{'valid' if check.valid else 'INVALID'}")
    ok = check.valid and doc.get("audit", {}).get("ok", True)
    return EXIT_OK if ok else EXIT_FAIL


def _audit_certificate(cert, check) -> dict:
    Z, pair = cert.witnesses, cert.pair
    dist = distance_matrix(Z, pair)
    idx = list(range(len(Z)))
    metric = lambda a, b: float(dist[a, b])
    floors, budget = {}, oracle.DEFAULT_BUDGET
    if len(Z) <= budget.max_points:
        for m, v in check.cover_floor.items():
            if m <= budget.max_centers:
                floors[str(m)] = oracle.exact_cover_radius(idx, m, metric)
    semi = None
    if len(pair) <= 64:
        semi = max(abs(oracle.seminorm_reference(pair, z) - pair(z)) for z in Z)
    ok = all(floors[k] == check.cover_floor[int(k)] for k in floors) and (semi is None or semi <= 1e-12)
    return {"oracle_cover_floor": floors, "seminorm_max_deviation": semi, "ok": ok}


# -- entry -------------------------------------------------------------------

COMMANDS = {"verify": cmd_verify, "measure": cmd_measure, "witness": cmd_witness}


def _u64(text: str) -> int:
    v = int(text, 0)
    if not 0 <= v < 2 ** 64:
        raise argparse.ArgumentTypeError("seed must be an unsigned 64-bit integer")
    return v


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="hilbmnc", description=__doc__.splitlines()[0])
    p.add_argument("command", choices=sorted(COMMANDS))
    p.add_argument("--config", help="scenario JSON file (default: built-in scenario, A = C, N = 8)")
    p.add_argument("--seed", type=_u64, help="override the scenario seed")
    p.add_argument("--out", default="out", help="output directory (default: ./out)")
    p.add_argument("--audit-oracle", action="store_true", help=argparse.SUPPRESS)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_CONFIG
    try:
        sc = load_scenario(args.config)
        if args.seed is not None:
            sc = sc.model_copy(update={"seed": args.seed})
        return COMMANDS[args.command](sc, Path(args.out), args.audit_oracle)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except MathFailure as exc:
        print(f"failure: {exc}", file=sys.stderr)
        return EXIT_FAIL
    except Exception:
        traceback.print_exc()
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
