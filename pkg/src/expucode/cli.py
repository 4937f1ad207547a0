"""Command-line interface.

Subcommands:
  exponents   rate sweep of random-coding and expurgated exponents (CSV)
  sample      draw one codebook and print it as JSON
  trial       run one census trial and print it as JSON
  exact-check compare the union-Bhattacharyya bound against exact ML errors
  experiment  full Monte-Carlo grid with contract checks and output files
"""

from __future__ import annotations

import argparse
import json
import math
import sys

import numpy as np

from .channel import bhattacharyya_matrix, load_channel
from .ensembles import EnsembleSpec, nearest_composition, sample_codebook
from .errors import ExpucodeError
from .exponents import (
    GammaKind,
    InputDistribution,
    optimize_rho,
    random_coding_exponent,
)
from .expurgation import evaluate_codebook, exact_ml_errors
from .harness import (
    ExperimentConfig,
    run_experiment,
    result_csv,
    write_run,
    _block_context,
    _load_channel,
)


def _parse_q(text: str) -> InputDistribution:
    return InputDistribution(np.array([float(v) for v in text.split(",")]))


def _parse_rates(text: str) -> list[float]:
    """"start:stop:step" (inclusive grid) or a single value."""
    if ":" not in text:
        return [float(text)]
    parts = text.split(":")
    if len(parts) != 3:
        raise ValueError(f"rates must be 'start:stop:step', got {text!r}")
    start, stop, step = (float(p) for p in parts)
    if step <= 0:
        raise ValueError("rate step must be positive")
    count = int(math.floor((stop - start) / step + 1e-9)) + 1
    return [start + k * step for k in range(max(count, 1))]


def _add_channel_q(p: argparse.ArgumentParser) -> None:
    p.add_argument("--channel", required=True, help="channel JSON file")
    p.add_argument("--q", required=True, help="input pmf, e.g. '0.5,0.5'")


def _build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="expucode", description=__doc__)
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("exponents", help="rate sweep of E_r and E_ex (CSV on stdout)")
    _add_channel_q(p)
    p.add_argument("--rates", required=True, help="'start:stop:step' or single rate")
    p.add_argument("--rho-max", type=float, default=64.0)
    p.add_argument("--gamma", default="sqrt-exp",
                   help="sqrt-exp | poly:K | fixed:G (validated; not used by this sweep)")

    p = sub.add_parser("sample", help="draw one codebook as JSON")
    _add_channel_q(p)
    p.add_argument("--rate", type=float, required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--eps", type=float, required=True)
    p.add_argument("--kind", choices=("iid", "cc"), default="iid")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--trial", type=int, default=0)

    p = sub.add_parser("trial", help="one census trial as JSON")
    _add_channel_q(p)
    p.add_argument("--rate", type=float, required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--eps", type=float, required=True)
    p.add_argument("--eps1", type=float, required=True)
    p.add_argument("--gamma", default="sqrt-exp")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--trial", type=int, default=0)
    p.add_argument("--method", choices=("ub", "exact"), default="ub")
    p.add_argument("--kind", choices=("iid", "cc"), default="iid")
    p.add_argument("--rho-max", type=float, default=64.0)
    p.add_argument("--rate-convention", choices=("mother", "nominal"), default="mother")

    p = sub.add_parser("exact-check", help="UB vs exact ML on one sampled code")
    _add_channel_q(p)
    p.add_argument("--rate", type=float, required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--eps", type=float, default=0.0)
    p.add_argument("--kind", choices=("iid", "cc"), default="iid")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--trial", type=int, default=0)

    p = sub.add_parser("experiment", help="full Monte-Carlo grid")
    p.add_argument("--config", help="JSON file with the experiment configuration")
    p.add_argument("--channel")
    p.add_argument("--q")
    p.add_argument("--rate", type=float)
    p.add_argument("--eps", type=float)
    p.add_argument("--eps1", type=float)
    p.add_argument("--gamma", default="sqrt-exp")
    p.add_argument("--n-grid", help="comma-separated block lengths, e.g. '40,80,120'")
    p.add_argument("--trials", type=int)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--method", choices=("ub", "exact"), default="ub")
    p.add_argument("--kind", choices=("iid", "cc"), default="iid")
    p.add_argument("--rho-max", type=float, default=64.0)
    p.add_argument("--rate-convention", choices=("mother", "nominal"), default="mother")
    p.add_argument("--out", required=True, help="directory for the run outputs")
    return ap


def _spec_from_args(args, q: InputDistribution) -> EnsembleSpec:
    if args.kind == "cc":
        counts = nearest_composition(q, args.n)
        return EnsembleSpec.constant_composition(counts, args.n, args.rate, args.eps)
    return EnsembleSpec.iid(q, args.n, args.rate, args.eps)


def _cmd_exponents(args) -> int:
    ch = load_channel(args.channel)
    q = _parse_q(args.q)
    GammaKind.parse(args.gamma)  # accepted for interface symmetry
    bm = bhattacharyya_matrix(ch)
    print("rate,rho_star_rc,e_r,rho_hat,e_ex,capped")
    for rate in _parse_rates(args.rates):
        rho_star, e_r = random_coding_exponent(rate, q, ch)
        sol = optimize_rho(rate, q, bm, args.rho_max)
        print(
            f"{rate!r},{rho_star!r},{e_r!r},{sol.rho_hat!r},{sol.e_ex!r},"
            f"{'true' if sol.capped else 'false'}"
        )
    return 0


def _cmd_sample(args) -> int:
    ch = load_channel(args.channel)
    q = _parse_q(args.q)
    if q.pmf.size != ch.input_size:
        raise ExpucodeError(
            f"Q has {q.pmf.size} atoms but the channel has {ch.input_size} inputs"
        )
    spec = _spec_from_args(args, q)
    code = sample_codebook(spec, args.seed, args.trial)
    obj = {
        "kind": spec.kind,
        "n": spec.n,
        "rate": spec.rate,
        "eps": spec.eps,
        "m_n": spec.m_n,
        "m_prime": spec.m_prime,
        "seed": code.seed,
        "trial_id": code.trial_id,
        "rows": code.rows.tolist(),
    }
    print(json.dumps(obj, indent=2))
    return 0


def _census_config(args) -> ExperimentConfig:
    return ExperimentConfig(
        channel_path=args.channel,
        q=_parse_q(args.q),
        rate=args.rate,
        eps=args.eps,
        eps1=args.eps1,
        gamma_kind=GammaKind.parse(args.gamma),
        n_grid=(args.n,),
        trials=1,
        master_seed=args.seed,
        method=args.method,
        rho_max=args.rho_max,
        rate_convention=args.rate_convention,
        kind=args.kind,
    )


def _cmd_trial(args) -> int:
    cfg = _census_config(args)
    ch = _load_channel(cfg, None)
    bm = bhattacharyya_matrix(ch)
    ctx = _block_context(cfg, args.n, ch, bm)
    code = sample_codebook(ctx.spec, cfg.master_seed, args.trial)
    evals = evaluate_codebook(code, bm, method=cfg.method, ch=ch)
    from .expurgation import census as run_census

    c = run_census(evals, ctx.threshold, ctx.spec.m_n, cfg.eps1)
    obj = {
        "n": args.n,
        "m_n": c.m_n,
        "m_prime": c.m_prime,
        "eps1": c.eps1,
        "threshold": c.threshold,
        "big_phi": c.big_phi,
        "big_psi": c.big_psi,
        "passed": c.passed,
        "phi": [int(v) for v in c.phi],
        "exponents": [e.exponent for e in evals],
    }
    print(json.dumps(obj, indent=2))
    return 0


def _cmd_exact_check(args) -> int:
    ch = load_channel(args.channel)
    q = _parse_q(args.q)
    bm = bhattacharyya_matrix(ch)
    spec = _spec_from_args(args, q)
    code = sample_codebook(spec, args.seed, args.trial)
    evals = evaluate_codebook(code, bm, method="ub")
    exact = exact_ml_errors(code, ch)
    max_ratio = 0.0
    dominance_ok = True
    for m in range(code.m_prime):
        ub = evals[m].pe_bound
        ex = float(exact[m])
        if ex > ub + 1e-12:
            dominance_ok = False
        if ub > 0.0:
            max_ratio = max(max_ratio, ex / ub)
    obj = {
        "m_prime": code.m_prime,
        "n": code.n,
        "max_ratio_exact_over_bound": max_ratio,
        "dominance_ok": dominance_ok,
        "pe_bound": [e.pe_bound for e in evals],
        "pe_exact": exact.tolist(),
    }
    print(json.dumps(obj, indent=2))
    return 0 if dominance_ok else 1


def _cmd_experiment(args) -> int:
    if args.config:
        cfg = ExperimentConfig.from_json(args.config)
    else:
        required = ("channel", "q", "rate", "eps", "eps1", "n_grid", "trials")
        missing = [k for k in required if getattr(args, k) in (None, "")]
        if missing:
            raise ExpucodeError(
                f"experiment needs --config or all of: {', '.join('--' + m.replace('_', '-') for m in missing)}"
            )
        cfg = ExperimentConfig(
            channel_path=args.channel,
            q=_parse_q(args.q),
            rate=args.rate,
            eps=args.eps,
            eps1=args.eps1,
            gamma_kind=GammaKind.parse(args.gamma),
            n_grid=tuple(int(v) for v in args.n_grid.split(",")),
            trials=args.trials,
            master_seed=args.seed,
            method=args.method,
            rho_max=args.rho_max,
            rate_convention=args.rate_convention,
            kind=args.kind,
        )
    result = run_experiment(cfg)
    run_dir = write_run(result, args.out)
    print(result_csv(result), end="")
    for c in result.checks:
        state = "ok" if c.passed else "FAIL"
        print(f"# check {c.name} n={c.n}: {c.value:.6g} {c.op} {c.limit:.6g} [{state}]")
    print(f"# outputs: {run_dir}")
    return 0 if result.all_pass else 1


_COMMANDS = {
    "exponents": _cmd_exponents,
    "sample": _cmd_sample,
    "trial": _cmd_trial,
    "exact-check": _cmd_exact_check,
    "experiment": _cmd_experiment,
}


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except ExpucodeError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
