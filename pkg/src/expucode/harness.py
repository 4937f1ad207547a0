"""Monte-Carlo verification harness.

Runs independent codebook trials over a grid of block lengths and aggregates
the census counts into empirical estimates of the per-codeword lower bound
(probability at least 1 - 1/gamma_n), the mean survivor count, the tail of
the below-threshold count, and the main census event
Phi >= ceil(M_n (1 + eps1)).  Trials are keyed by (n, trial_id) and are
deterministic in the configuration, so any degree of parallelism produces
bit-identical output; EXPU_THREADS caps the worker count and affects speed
only.
"""

from __future__ import annotations

import json
import math
import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Optional, Sequence, TypeVar

import numpy as np

from .channel import BhattMatrix, Channel, bhattacharyya_matrix, load_channel
from .ensembles import Codebook, EnsembleSpec, nearest_composition, sample_codebook
from .errors import ConfigError, NoConvergenceError
from .exponents import (
    ExponentSolution,
    GammaKind,
    InputDistribution,
    Schedule,
    n0_threshold,
    optimize_rho,
    schedule,
)
from .expurgation import CodewordEval, TrialCensus, census, evaluate_codebook

WILSON_Z = 1.959963984540054  # two-sided 95%
SE_SLACK = 4.0  # false-alarm probability < 1e-4 per statistical check

T = TypeVar("T")


@dataclass(frozen=True)
class ExperimentConfig:
    """Full description of one experiment; serializable to/from JSON."""

    channel_path: str
    q: InputDistribution
    rate: float
    eps: float
    eps1: float
    gamma_kind: GammaKind
    n_grid: tuple[int, ...]
    trials: int
    master_seed: int
    method: str = "ub"
    rho_max: float = 64.0
    rate_convention: str = "mother"
    kind: str = "iid"

    def __post_init__(self):
        object.__setattr__(self, "n_grid", tuple(int(n) for n in self.n_grid))
        if not 0.0 < self.eps1 < self.eps:
            raise ConfigError(f"need 0 < eps1 < eps, got {self.eps1}, {self.eps}")
        if self.trials < 1:
            raise ConfigError(f"trials must be >= 1, got {self.trials}")
        if not self.n_grid:
            raise ConfigError("n_grid must be nonempty")
        if any(n < 1 for n in self.n_grid):
            raise ConfigError("block lengths must be >= 1")
        if list(self.n_grid) != sorted(set(self.n_grid)):
            raise ConfigError("n_grid must be strictly ascending")
        if self.rate < 0.0:
            raise ConfigError(f"rate must be nonnegative, got {self.rate}")
        if self.method not in ("ub", "exact"):
            raise ConfigError(f"unknown method {self.method!r}")
        if self.rate_convention not in ("mother", "nominal"):
            raise ConfigError(f"unknown rate convention {self.rate_convention!r}")
        if self.kind not in ("iid", "cc"):
            raise ConfigError(f"unknown ensemble kind {self.kind!r}")
        if self.rho_max < 1.0:
            raise ConfigError(f"rho_max must be >= 1, got {self.rho_max}")

    def to_dict(self) -> dict:
        return {
            "channel": self.channel_path,
            "q": [float(v) for v in self.q.pmf],
            "rate": self.rate,
            "eps": self.eps,
            "eps1": self.eps1,
            "gamma": str(self.gamma_kind),
            "n_grid": list(self.n_grid),
            "trials": self.trials,
            "master_seed": self.master_seed,
            "method": self.method,
            "rho_max": self.rho_max,
            "rate_convention": self.rate_convention,
            "kind": self.kind,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "ExperimentConfig":
        try:
            return cls(
                channel_path=d.get("channel", d.get("channel_path", "")),
                q=InputDistribution(np.array(d["q"], dtype=np.float64)),
                rate=float(d["rate"]),
                eps=float(d["eps"]),
                eps1=float(d["eps1"]),
                gamma_kind=GammaKind.parse(d.get("gamma", "sqrt-exp")),
                n_grid=tuple(d["n_grid"]),
                trials=int(d["trials"]),
                master_seed=int(d["master_seed"]),
                method=d.get("method", "ub"),
                rho_max=float(d.get("rho_max", 64.0)),
                rate_convention=d.get("rate_convention", "mother"),
                kind=d.get("kind", "iid"),
            )
        except KeyError as exc:
            raise ConfigError(f"config missing key {exc}") from exc

    @classmethod
    def from_json(cls, path: str | Path) -> "ExperimentConfig":
        with open(path) as fh:
            return cls.from_dict(json.load(fh))


@dataclass(frozen=True)
class NBlockResult:
    """Aggregates for one block length; one CSV row."""

    n: int
    m_n: int
    m_prime: int
    rho_hat: float
    e_ex: float
    delta: float
    gamma: float
    threshold: float
    p_hat: float
    ci_lo: float
    ci_hi: float
    mean_phi: float
    mean_psi: float
    lemma_rate: float
    lemma_bound: float
    theorem_bound: float
    psi_tail_rate: float
    psi_tail_bound: float
    n0: int


@dataclass(frozen=True)
class CheckResult:
    """One statistical contract check with its slackened limit."""

    name: str
    n: int
    value: float
    limit: float
    op: str  # ">=" or "<="
    passed: bool


@dataclass(frozen=True)
class ExperimentResult:
    config: ExperimentConfig
    rows: tuple[NBlockResult, ...]
    checks: tuple[CheckResult, ...]
    all_pass: bool

    def to_dict(self) -> dict:
        return {
            "config": self.config.to_dict(),
            "rows": [vars(r) for r in self.rows],
            "checks": [vars(c) for c in self.checks],
            "all_pass": self.all_pass,
        }


@dataclass(frozen=True)
class ExponentHistogram:
    """Pooled per-codeword exponent histogram around the census threshold.

    Even bin counts place the threshold exactly on a bin edge, so bins=2
    reproduces the (Psi, Phi) split; +inf exponents land in the overflow
    count.
    """

    n: int
    threshold: float
    e_ex: float
    delta: float
    edges: tuple[float, ...]
    counts: tuple[int, ...]
    overflow: int
    total: int
    median: float
    q25: float
    q75: float
    iqr: float


@dataclass(frozen=True)
class _BlockContext:
    n: int
    spec: EnsembleSpec
    bm: BhattMatrix
    channel: Channel
    rate_used: float
    solution: ExponentSolution
    sched: Schedule
    threshold: float


def wilson_interval(successes: int, total: int, z: float = WILSON_Z) -> tuple[float, float]:
    """Wilson 95% score interval; well-behaved for proportions near 1."""
    p = successes / total
    denom = 1.0 + z * z / total
    center = (p + z * z / (2.0 * total)) / denom
    half = z * math.sqrt(p * (1.0 - p) / total + z * z / (4.0 * total * total)) / denom
    return center - half, center + half


def _load_channel(cfg: ExperimentConfig, channel: Optional[Channel]) -> Channel:
    ch = channel if channel is not None else load_channel(cfg.channel_path)
    if ch.input_size != cfg.q.pmf.size:
        raise ConfigError(
            f"Q has {cfg.q.pmf.size} atoms but the channel has {ch.input_size} inputs"
        )
    return ch


def _block_context(cfg: ExperimentConfig, n: int, ch: Channel, bm: BhattMatrix) -> _BlockContext:
    if cfg.kind == "iid":
        spec = EnsembleSpec.iid(cfg.q, n, cfg.rate, cfg.eps)
    else:
        spec = EnsembleSpec.constant_composition(
            nearest_composition(cfg.q, n), n, cfg.rate, cfg.eps
        )
    if cfg.rate_convention == "mother":
        # rate seen by the union over the M' - 1 competitors; keeps the
        # per-codeword bound exact at finite n
        rate_used = math.log2(spec.m_prime - 1) / n if spec.m_prime > 1 else 0.0
    else:
        rate_used = cfg.rate
    solution = optimize_rho(rate_used, cfg.q, bm, cfg.rho_max)
    sched = schedule(n, solution.rho_hat, cfg.gamma_kind)
    return _BlockContext(
        n=n,
        spec=spec,
        bm=bm,
        channel=ch,
        rate_used=rate_used,
        solution=solution,
        sched=sched,
        threshold=solution.e_ex - sched.delta,
    )


def _trial_evals(
    cfg: ExperimentConfig, ctx: _BlockContext, trial_id: int
) -> list[CodewordEval]:
    code = sample_codebook(ctx.spec, cfg.master_seed, trial_id)
    return evaluate_codebook(code, ctx.bm, method=cfg.method, ch=ctx.channel)


def _trial_census(cfg: ExperimentConfig, ctx: _BlockContext, trial_id: int) -> TrialCensus:
    evals = _trial_evals(cfg, ctx, trial_id)
    return census(evals, ctx.threshold, ctx.spec.m_n, cfg.eps1)


def _worker_count(tasks: int) -> int:
    cap = os.cpu_count() or 1
    env = os.environ.get("EXPU_THREADS", "")
    if env:
        cap = min(cap, max(1, int(env)))
    return max(1, min(cap, tasks))


def _map_trials(fn: Callable[[int], T], trial_ids: Sequence[int]) -> list[T]:
    # results come back in trial_id order whatever the execution order
    workers = _worker_count(len(trial_ids))
    if workers <= 1:
        return [fn(t) for t in trial_ids]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, trial_ids))


def run_trial(
    cfg: ExperimentConfig, n: int, trial_id: int, channel: Optional[Channel] = None
) -> TrialCensus:
    """One codebook trial at block length n; deterministic in (cfg, n, trial_id)."""
    ch = _load_channel(cfg, channel)
    bm = bhattacharyya_matrix(ch)
    ctx = _block_context(cfg, n, ch, bm)
    return _trial_census(cfg, ctx, trial_id)


def _binom_se(p: float, count: int) -> float:
    p = min(max(p, 0.0), 1.0)
    return math.sqrt(p * (1.0 - p) / count)


def _compute_n0(cfg: ExperimentConfig) -> int:
    # -1 flags a gamma kind for which the tail gap never opens (fixed hook)
    try:
        return n0_threshold(cfg.eps, cfg.eps1, cfg.gamma_kind)
    except NoConvergenceError:
        return -1


def run_experiment(
    cfg: ExperimentConfig, channel: Optional[Channel] = None
) -> ExperimentResult:
    """Run the full grid and attach the statistical contract checks.

    Each check compares an empirical quantity against its analytic bound with
    4 standard errors of slack (binomial SE at the bound for rates, sample SE
    for the mean); the census event check applies from n0 onward.
    """
    ch = _load_channel(cfg, channel)
    bm = bhattacharyya_matrix(ch)
    n0 = _compute_n0(cfg)
    trial_ids = range(cfg.trials)
    rows: list[NBlockResult] = []
    checks: list[CheckResult] = []
    for n in cfg.n_grid:
        ctx = _block_context(cfg, n, ch, bm)
        censuses = _map_trials(lambda t: _trial_census(cfg, ctx, t), trial_ids)
        t_count = cfg.trials
        m_prime = ctx.spec.m_prime
        passes = sum(c.passed for c in censuses)
        p_hat = passes / t_count
        ci_lo, ci_hi = wilson_interval(passes, t_count)
        total_phi = sum(c.big_phi for c in censuses)
        mean_phi = total_phi / t_count
        mean_psi = m_prime - mean_phi
        lemma_rate = total_phi / (t_count * m_prime)
        lemma_bound = ctx.sched.lemma_bound
        theorem_bound = ctx.sched.theorem_bound
        psi_cut = ctx.spec.m_n * (1.0 + cfg.eps) / math.sqrt(ctx.sched.gamma)
        psi_tail_rate = sum(c.big_psi > psi_cut for c in censuses) / t_count
        psi_tail_bound = 1.0 / math.sqrt(ctx.sched.gamma)
        rows.append(
            NBlockResult(
                n=n,
                m_n=ctx.spec.m_n,
                m_prime=m_prime,
                rho_hat=ctx.solution.rho_hat,
                e_ex=ctx.solution.e_ex,
                delta=ctx.sched.delta,
                gamma=ctx.sched.gamma,
                threshold=ctx.threshold,
                p_hat=p_hat,
                ci_lo=ci_lo,
                ci_hi=ci_hi,
                mean_phi=mean_phi,
                mean_psi=mean_psi,
                lemma_rate=lemma_rate,
                lemma_bound=lemma_bound,
                theorem_bound=theorem_bound,
                psi_tail_rate=psi_tail_rate,
                psi_tail_bound=psi_tail_bound,
                n0=n0,
            )
        )

        limit = lemma_bound - SE_SLACK * _binom_se(lemma_bound, t_count * m_prime)
        checks.append(
            CheckResult("lemma_rate", n, lemma_rate, limit, ">=", lemma_rate >= limit)
        )
        phi_bound = m_prime * lemma_bound
        phi_arr = np.array([c.big_phi for c in censuses], dtype=np.float64)
        se_mean = (
            float(phi_arr.std(ddof=1)) / math.sqrt(t_count) if t_count > 1 else 0.0
        )
        limit = phi_bound - SE_SLACK * se_mean
        checks.append(
            CheckResult("mean_phi", n, mean_phi, limit, ">=", mean_phi >= limit)
        )
        limit = psi_tail_bound + SE_SLACK * _binom_se(psi_tail_bound, t_count)
        checks.append(
            CheckResult(
                "psi_tail", n, psi_tail_rate, limit, "<=", psi_tail_rate <= limit
            )
        )
        if 0 <= n0 <= n:
            limit = theorem_bound - SE_SLACK * _binom_se(theorem_bound, t_count)
            checks.append(
                CheckResult("theorem", n, p_hat, limit, ">=", p_hat >= limit)
            )
    return ExperimentResult(
        config=cfg,
        rows=tuple(rows),
        checks=tuple(checks),
        all_pass=all(c.passed for c in checks),
    )


def lemma1_report(
    cfg: ExperimentConfig, n: int, channel: Optional[Channel] = None
) -> tuple[float, float]:
    """Pooled fraction of codewords above the threshold vs 1 - 1/gamma_n."""
    ch = _load_channel(cfg, channel)
    bm = bhattacharyya_matrix(ch)
    ctx = _block_context(cfg, n, ch, bm)
    censuses = _map_trials(lambda t: _trial_census(cfg, ctx, t), range(cfg.trials))
    total_phi = sum(c.big_phi for c in censuses)
    return total_phi / (cfg.trials * ctx.spec.m_prime), ctx.sched.lemma_bound


def mean_phi_report(
    cfg: ExperimentConfig, n: int, channel: Optional[Channel] = None
) -> tuple[float, float]:
    """Empirical mean survivor count vs M'_n (1 - 1/gamma_n)."""
    ch = _load_channel(cfg, channel)
    bm = bhattacharyya_matrix(ch)
    ctx = _block_context(cfg, n, ch, bm)
    censuses = _map_trials(lambda t: _trial_census(cfg, ctx, t), range(cfg.trials))
    mean_phi = sum(c.big_phi for c in censuses) / cfg.trials
    return mean_phi, ctx.spec.m_prime * ctx.sched.lemma_bound


def _quantile(svals: np.ndarray, frac: float) -> float:
    # linear interpolation, with an equal-endpoint shortcut so runs of +inf
    # order statistics cannot produce inf - inf
    h = (svals.size - 1) * frac
    lo = int(math.floor(h))
    hi = int(math.ceil(h))
    a, b = float(svals[lo]), float(svals[hi])
    if a == b:
        return a
    return a + (b - a) * (h - lo)


def concentration_histogram(
    cfg: ExperimentConfig, n: int, bins: int, channel: Optional[Channel] = None
) -> ExponentHistogram:
    """Pooled per-codeword exponent histogram across all trials at one n.

    Bins are symmetric around the census threshold; +inf exponents go to the
    overflow count.  Median and quartiles are reported next to the optimized
    exponent so concentration can be judged directly.
    """
    if bins < 2:
        raise ValueError(f"bins must be >= 2, got {bins}")
    ch = _load_channel(cfg, channel)
    bm = bhattacharyya_matrix(ch)
    ctx = _block_context(cfg, n, ch, bm)
    arrays = _map_trials(
        lambda t: np.array(
            [e.exponent for e in _trial_evals(cfg, ctx, t)], dtype=np.float64
        ),
        range(cfg.trials),
    )
    vals = np.concatenate(arrays)
    finite = vals[np.isfinite(vals)]
    overflow = int(vals.size - finite.size)
    thr = ctx.threshold
    span = float(np.max(np.abs(finite - thr))) if finite.size else 1.0
    span = max(span, 1e-12)
    edges = thr + np.linspace(-span, span, bins + 1)
    idx = np.searchsorted(edges, finite, side="left") - 1
    idx = np.clip(idx, 0, bins - 1)
    counts = np.bincount(idx, minlength=bins)
    svals = np.sort(vals)
    q25 = _quantile(svals, 0.25)
    q75 = _quantile(svals, 0.75)
    return ExponentHistogram(
        n=n,
        threshold=thr,
        e_ex=ctx.solution.e_ex,
        delta=ctx.sched.delta,
        edges=tuple(float(e) for e in edges),
        counts=tuple(int(c) for c in counts),
        overflow=overflow,
        total=int(vals.size),
        median=_quantile(svals, 0.5),
        q25=q25,
        q75=q75,
        iqr=0.0 if q25 == q75 else q75 - q25,
    )


CSV_COLUMNS = (
    "n",
    "m_n",
    "m_prime",
    "rho_hat",
    "e_ex",
    "delta",
    "gamma",
    "threshold",
    "p_hat",
    "ci_lo",
    "ci_hi",
    "mean_phi",
    "mean_psi",
    "lemma_rate",
    "lemma_bound",
    "theorem_bound",
    "psi_tail_rate",
    "psi_tail_bound",
    "n0",
)


def _fmt(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, int):
        return str(v)
    return repr(float(v))


def result_csv(result: ExperimentResult) -> str:
    lines = [",".join(CSV_COLUMNS)]
    for row in result.rows:
        lines.append(",".join(_fmt(getattr(row, col)) for col in CSV_COLUMNS))
    return "\n".join(lines) + "\n"


def write_run(result: ExperimentResult, out_dir: str | Path) -> Path:
    """Persist one run into a fresh timestamped directory (never appends).

    Contents: config.json (exact echo), results.csv (one row per n), and
    summary.json (full result including checks).
    """
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    stamp = time.strftime("%Y%m%d-%H%M%S")
    run_dir = None
    for k in range(10000):
        suffix = f"-{k}" if k else ""
        cand = out / f"run-{stamp}{suffix}"
        try:
            cand.mkdir()
        except FileExistsError:
            continue
        run_dir = cand
        break
    if run_dir is None:
        raise RuntimeError(f"could not allocate a run directory under {out}")
    with open(run_dir / "config.json", "w") as fh:
        json.dump(result.config.to_dict(), fh, indent=2)
        fh.write("\n")
    with open(run_dir / "results.csv", "w") as fh:
        fh.write(result_csv(result))
    with open(run_dir / "summary.json", "w") as fh:
        json.dump(result.to_dict(), fh, indent=2)
        fh.write("\n")
    return run_dir
