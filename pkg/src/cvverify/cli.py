"""Command-line front end.

Subcommands: verify (run a scenario), oracle (true fidelity vs analytic
witness), plan (print the m+5 measurement plan), lemmas (Fock-oracle
operator-inequality suites), budget (sample-count table), sweep (accept rate
vs additive noise).  Scenario/config files are JSON documents; reports are
JSON (schema in cvverify/schemas/report.schema.json) or CSV.

Exit codes: 0 success, 1 file/parse error, 2 config invariant violation.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import fock, protocols
from .channels import ProverChannel
from .measurement import build_measurement_plan, required_moments
from .protocols import VerificationConfig

MAX_TWO_MODE_DIM = 4096


def _load_json(path: str) -> dict:
    try:
        with open(path) as fh:
            return json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise SystemExit(f"error: cannot read scenario {path!r}: {exc}")


def _parse_scenario(data: dict):
    try:
        cfg = VerificationConfig.from_dict(data["config"])
        prover = ProverChannel.from_dict(data["prover"]) if "prover" in data else None
        reps = int(data.get("repetitions", 1))
        seed = int(data.get("seed", 0))
        shot_cap = data.get("shot_cap")
        shot_cap = int(shot_cap) if shot_cap is not None else None
    except (KeyError, TypeError) as exc:
        raise SystemExit(f"error: malformed scenario: {exc}")
    except ValueError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        raise SystemExit(2)
    return cfg, prover, reps, seed, shot_cap


def _emit(report: dict, args) -> None:
    text = json.dumps(report, indent=2)
    if args.out:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        (out / f"{args.command}.json").write_text(text + "\n")
    print(text)


def cmd_verify(args) -> int:
    data = _load_json(args.config)
    cfg, prover, reps, seed, shot_cap = _parse_scenario(data)
    seed = args.seed if args.seed is not None else seed
    reps = args.reps if args.reps is not None else reps
    if prover is None:
        raise SystemExit("error: verify requires a prover in the scenario")
    try:
        rate, verdicts = protocols.accept_rate(prover, cfg, reps, seed, shot_cap)
    except ValueError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    report = {
        "name": data.get("name", Path(args.config).stem),
        "accept_rate": rate,
        "repetitions": reps,
        "seed": seed,
        "verdicts": [v.to_dict() for v in verdicts],
    }
    _emit(report, args)
    return 0


def cmd_oracle(args) -> int:
    data = _load_json(args.config)
    cfg, prover, _, seed, _ = _parse_scenario(data)
    seed = args.seed if args.seed is not None else seed
    if prover is None:
        raise SystemExit("error: oracle requires a prover in the scenario")
    report = protocols.oracle_report(prover, cfg, seed)
    if cfg.m == 1:
        cutoff = args.cutoff or fock.default_cutoff(cfg.lam)
        if cfg.protocol == "amplification":
            W = fock.witness_fock_amp(cfg.g, cfg.lam, cutoff)
        else:
            W = fock.witness_fock_unitary(cfg.target, cfg.lam, cutoff)
        from .channels import elementary_factors

        state = fock.entangled_output_fock(elementary_factors(prover), cfg.lam, cutoff)
        report["fock_omega"] = fock.expectation(W, state)
        report["fock_cutoff"] = cutoff
        report["fock_state_leakage"] = state.leakage
    _emit(report, args)
    return 0


def cmd_plan(args) -> int:
    plan = build_measurement_plan(args.m)
    settings = []
    for j, s in enumerate(plan.settings):
        settings.append({
            "id": j,
            "label": s.label,
            "angles": [None if a is None else float(a) for a in s.angles],
        })
    report = {
        "m": args.m,
        "n_settings": len(plan.settings),
        "settings": settings,
        "coverage": {str(k): v for k, v in plan.coverage.items()},
        "n_required_moments": len(required_moments(args.m)),
    }
    for s in settings:
        angles = ", ".join("-" if a is None else f"{a:.3f}" for a in s["angles"])
        print(f"setting {s['id']:2d}  [{angles}]  {s['label']}")
    _emit(report, args)
    return 0


def cmd_lemmas(args) -> int:
    cutoff = args.cutoff
    if cutoff * cutoff > MAX_TWO_MODE_DIM:
        raise SystemExit(
            f"error: two-mode dimension {cutoff * cutoff} exceeds cap {MAX_TWO_MODE_DIM}"
        )
    thetas = [float(t) for t in args.thetas.split(",")]
    results = []
    ok = True

    # damping-operator inequality: G^(x)m >= 1 - sum n_i / cosh^2(theta)
    for theta in thetas:
        for m in (1, 2):
            G = fock.g_theta(theta, cutoff).matrix
            n1 = fock.number_op(cutoff).matrix
            if m == 1:
                lhs = G - (np.eye(cutoff) - n1 / np.cosh(theta) ** 2)
            else:
                eye = np.eye(cutoff)
                total_n = np.kron(n1, eye) + np.kron(eye, n1)
                lhs = np.kron(G, G) - (np.eye(cutoff**2) - total_n / np.cosh(theta) ** 2)
            min_eig = float(np.min(np.linalg.eigvalsh(lhs)))
            passed = min_eig >= -1e-10
            ok &= passed
            results.append({
                "suite": "damping-inequality", "theta": theta, "m": m,
                "min_eigenvalue": min_eig, "passed": passed,
            })

    # canonical observable vs closed forms at lam = 1
    lam = 1.0
    small = min(cutoff, 14)
    for g in (1.0, 2.0):
        O = fock.canonical_observable(g, lam, small, check_convergence=False).matrix
        C = fock.canonical_observable_closed_form(g, lam, small).matrix
        dev = float(np.max(np.abs(O - C)))
        passed = dev <= 1e-3
        ok &= passed
        results.append({
            "suite": "closed-form", "g": g, "lam": lam, "cutoff": small,
            "max_deviation": dev, "passed": passed,
        })

    # witness below observable (same-cutoff squeezer on both sides, so the
    # operator inequality holds exactly, not just up to truncation)
    for g, builder in ((1.0, None), (2.0, "amp")):
        small2 = min(cutoff, 16)
        O = fock.canonical_observable_closed_form(g, lam, small2, embed_cutoff=small2).matrix
        if builder == "amp":
            W = fock.witness_fock_amp(g, lam, small2).matrix
        else:
            from . import symplectic

            W = fock.witness_fock_unitary(symplectic.identity(1), lam, small2).matrix
        max_eig = float(np.max(np.linalg.eigvalsh(W - O)))
        passed = max_eig <= 1e-6
        ok &= passed
        results.append({
            "suite": "witness-below-observable", "g": g, "cutoff": small2,
            "max_eigenvalue": max_eig, "passed": passed,
        })

    for r in results:
        status = "PASS" if r["passed"] else "FAIL"
        detail = {k: v for k, v in r.items() if k not in ("suite", "passed")}
        print(f"{status}  {r['suite']}  {detail}")
    _emit({"results": results, "all_passed": ok}, args)
    return 0 if ok else 1


def cmd_budget(args) -> int:
    data = _load_json(args.config)
    try:
        cfg = VerificationConfig.from_dict(data.get("config", data))
        budget = protocols.sample_budget(cfg)
    except ValueError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    report = {"config": cfg.to_dict(), "budget": budget.to_dict()}
    for name, count in sorted(budget.counts.items()):
        print(f"{name}: {count}")
    print(f"channel uses: {budget.channel_uses}")
    print(f"entangled-pair copies: {budget.tmsv_copies}")
    _emit(report, args)
    return 0


def cmd_sweep(args) -> int:
    data = _load_json(args.config)
    cfg, _, reps, seed, shot_cap = _parse_scenario(data)
    seed = args.seed if args.seed is not None else seed
    reps = args.reps if args.reps is not None else reps
    variances = np.linspace(args.v_min, args.v_max, args.points)
    rows = []
    for v in variances:
        prover = ProverChannel("AdditiveNoise", variance=float(v), n_modes=cfg.m)
        rate, _ = protocols.accept_rate(prover, cfg, reps, seed, shot_cap)
        omega = protocols.witness_analytic(prover, cfg)
        rows.append({"variance": float(v), "accept_rate": rate, "analytic_omega": omega})
        print(f"v={v:.4f}  omega={omega:+.4f}  accept_rate={rate:.3f}")
    report = {"sweep": rows, "repetitions": reps, "seed": seed}
    if args.format == "csv" and args.out:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        lines = ["variance,accept_rate,analytic_omega"]
        lines += [f"{r['variance']},{r['accept_rate']},{r['analytic_omega']}" for r in rows]
        (out / "sweep.csv").write_text("\n".join(lines) + "\n")
    else:
        _emit(report, args)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cvverify",
        description="Verification of bosonic Gaussian channels via average-fidelity witnesses",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, needs_config=True):
        if needs_config:
            p.add_argument("--config", required=True, help="scenario JSON file")
        p.add_argument("--seed", type=int, default=None)
        p.add_argument("--out", default=None, help="output directory")
        p.add_argument("--reps", type=int, default=None)
        p.add_argument("--format", choices=("json", "csv"), default="json")

    p = sub.add_parser("verify", help="run the verification protocol")
    common(p)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("oracle", help="true fidelity vs analytic witness")
    common(p)
    p.add_argument("--cutoff", type=int, default=None, help="Fock cutoff for m=1 cross-check")
    p.set_defaults(func=cmd_oracle)

    p = sub.add_parser("plan", help="print the m+5 homodyne settings")
    p.add_argument("m", type=int)
    common(p, needs_config=False)
    p.set_defaults(func=cmd_plan)

    p = sub.add_parser("lemmas", help="Fock-oracle operator-inequality suites")
    p.add_argument("--cutoff", type=int, default=30)
    p.add_argument("--thetas", default="0.1,0.5,1.0,2.0")
    common(p, needs_config=False)
    p.set_defaults(func=cmd_lemmas)

    p = sub.add_parser("budget", help="sample-count table for a config")
    common(p)
    p.set_defaults(func=cmd_budget)

    p = sub.add_parser("sweep", help="accept rate vs additive-noise variance")
    common(p)
    p.add_argument("--v-min", type=float, default=0.0)
    p.add_argument("--v-max", type=float, default=0.5)
    p.add_argument("--points", type=int, default=6)
    p.set_defaults(func=cmd_sweep)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except SystemExit as exc:
        if isinstance(exc.code, str):
            print(exc.code, file=sys.stderr)
            return 1
        raise


if __name__ == "__main__":
    sys.exit(main())
