"""``bnscore`` command-line entry point.

Every command writes one JSON report to stdout (or ``--out``). Failures exit
nonzero with ``{"error": {"type": ..., "message": ...}}`` on stderr.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass, field

import numpy as np

from . import consistency, discrete, gaussian, io, search
from .dag import covered_reversal_sequence, independence_equivalent
from .discrete import DirichletJointPrior
from .elicitation import (
    DiscretePriorNetwork,
    discrete_prior_from_network,
    gaussian_prior_from_network,
)
from .errors import BnscoreError, UsageError

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_USAGE = 2


def _sig(x: float) -> float:
    """Round to 12 significant digits for reporting."""
    return float(f"{x:.12g}")


@dataclass
class RunConfig:
    command: str
    data: str | None = None
    dag: str | None = None
    dag2: str | None = None
    prior: str | None = None
    network: str | None = None
    model: str | None = None
    ess: float | None = None
    a_mu: float | None = None
    a_w: float | None = None
    alpha_arc: float | None = None
    restarts: int = 1
    max_parents: int = 5
    seed: int | None = None
    points: int = 100
    out: str | None = None
    trace: str | None = None
    extra: dict = field(default_factory=dict)


def _need(cfg: RunConfig, *names):
    missing = [f"--{n.replace('_', '-')}" for n in names if getattr(cfg, n) is None]
    if missing:
        raise UsageError(f"{cfg.command} requires {', '.join(missing)}")


def _load_prior_and_data(cfg: RunConfig):
    prior_obj = io.load_json(cfg.prior)
    prior = io.prior_from_json(prior_obj)
    model = cfg.model or ("discrete" if isinstance(prior, DirichletJointPrior) else "gaussian")
    if model == "discrete":
        if not isinstance(prior, DirichletJointPrior):
            raise UsageError("--model discrete needs a Dirichlet prior")
        data = io.load_discrete_csv(cfg.data, io.declared_scheme(prior_obj))
    elif model == "gaussian":
        if isinstance(prior, DirichletJointPrior):
            raise UsageError("--model gaussian needs a normal-Wishart prior")
        data = io.load_continuous_csv(cfg.data)
        if data.names != prior.names:
            raise UsageError(f"data columns {list(data.names)} differ from prior {list(prior.names)}")
    else:
        raise UsageError(f"unknown model {model!r}")
    return model, prior, data


def _score(cfg: RunConfig) -> dict:
    _need(cfg, "data", "dag", "prior")
    model, prior, data = _load_prior_and_data(cfg)
    dag = io.load_dag(cfg.dag)
    if model == "discrete":
        primary = discrete.log_score_bde(dag, data, prior)
        forms = {"family": primary, "ratio": discrete.log_score_bde_ratio(dag, data, prior)}
    else:
        primary = gaussian.log_score_bge(dag, data, prior)
        sequential = sum(
            gaussian.log_sequential_predictive_gaussian(dag, data.head(l), data.rows[l], prior)
            for l in range(data.m)
        )
        forms = {"ratio": primary, "sequential": sequential}
    values = list(forms.values())
    return {
        "command": "score",
        "model": model,
        "m": data.m,
        "log_score": _sig(primary),
        "forms": {k: _sig(v) for k, v in forms.items()},
        "difference": _sig(abs(values[0] - values[1])),
    }


def _learn(cfg: RunConfig) -> dict:
    _need(cfg, "data", "prior", "seed")
    model, prior, data = _load_prior_and_data(cfg)
    sprior = (
        search.StructurePrior("arc-penalty", cfg.alpha_arc)
        if cfg.alpha_arc is not None
        else search.StructurePrior()
    )
    config = search.SearchConfig(max_parents=cfg.max_parents, restarts=cfg.restarts, seed=cfg.seed)
    result = search.hill_climb(data, prior, sprior, config)
    trace = [dict(t, score=_sig(t["score"])) for t in result.trace]
    if cfg.trace:
        with open(cfg.trace, "w", encoding="utf-8") as fh:
            for t in trace:
                fh.write(json.dumps(t) + "\n")
    return {
        "command": "learn",
        "model": model,
        "dag": result.dag.to_json(),
        "log_posterior": _sig(result.score),
        "restart_scores": [_sig(s) for s in result.restart_scores],
        "trace": trace,
    }


def _equiv(cfg: RunConfig) -> dict:
    _need(cfg, "dag", "dag2")
    d1, d2 = io.load_dag(cfg.dag), io.load_dag(cfg.dag2)
    equivalent = independence_equivalent(d1, d2)
    seq = covered_reversal_sequence(d1, d2) if equivalent else None
    return {
        "command": "equiv",
        "equivalent": equivalent,
        "reversals": None if seq is None else [[d1.names[a], d1.names[b]] for a, b in seq],
    }


def _prior_build(cfg: RunConfig) -> dict:
    _need(cfg, "network")
    net = io.network_from_json(io.load_json(cfg.network))
    if isinstance(net, DiscretePriorNetwork):
        _need(cfg, "ess")
        return io.prior_to_json(discrete_prior_from_network(net, cfg.ess))
    _need(cfg, "a_mu", "a_w")
    return io.prior_to_json(gaussian_prior_from_network(net, cfg.a_mu, cfg.a_w))


def _check_consistency(cfg: RunConfig) -> dict:
    _need(cfg, "prior", "seed")
    prior = io.prior_from_json(io.load_json(cfg.prior))
    rng = np.random.default_rng(cfg.seed)
    if isinstance(prior, DirichletJointPrior):
        model, tol = "discrete", 1e-8
        result = consistency.check_dirichlet(prior, cfg.points, rng)
    else:
        model, tol = "gaussian", 1e-6
        result = consistency.check_normal_wishart(prior, cfg.points, rng)
    return {
        "command": "check-consistency",
        "model": model,
        "points": cfg.points,
        "max_deviation": _sig(result["max_deviation"]),
        "max_factorization_defect": _sig(result["max_factorization_defect"]),
        "tolerance": tol,
        "consistent": result["max_deviation"] < tol and result["max_factorization_defect"] < tol,
    }


COMMANDS = {
    "score": _score,
    "learn": _learn,
    "equiv": _equiv,
    "prior-build": _prior_build,
    "check-consistency": _check_consistency,
}


def run_command(cfg: RunConfig):
    """Run one command; returns ``(exit_status, report)``."""
    try:
        report = COMMANDS[cfg.command](cfg)
    except BnscoreError as exc:
        status = EXIT_USAGE if isinstance(exc, UsageError) else EXIT_ERROR
        return status, {"error": {"type": exc.kind, "message": str(exc)}}
    except OSError as exc:
        return EXIT_ERROR, {"error": {"type": "io", "message": f"{exc.filename}: {exc.strerror}"}}
    return EXIT_OK, report


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="bnscore", description="Score and learn Bayesian-network structures.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("score", help="log marginal likelihood of a DAG")
    p.add_argument("--data", required=True)
    p.add_argument("--dag", required=True)
    p.add_argument("--prior", required=True)
    p.add_argument("--model", choices=["discrete", "gaussian"])

    p = sub.add_parser("learn", help="hill-climbing structure search")
    p.add_argument("--data", required=True)
    p.add_argument("--prior", required=True)
    p.add_argument("--model", choices=["discrete", "gaussian"])
    p.add_argument("--alpha-arc", type=float, help="log prior penalty per arc (<= 0)")
    p.add_argument("--restarts", type=int, default=1)
    p.add_argument("--max-parents", type=int, default=5)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--trace", help="write the score trace as JSON lines")

    p = sub.add_parser("equiv", help="independence equivalence of two DAGs")
    p.add_argument("--dag1", dest="dag", required=True)
    p.add_argument("--dag2", required=True)

    p = sub.add_parser("prior-build", help="scoring prior from a prior network")
    p.add_argument("--network", required=True)
    p.add_argument("--ess", type=float, help="effective sample size (discrete)")
    p.add_argument("--amu", dest="a_mu", type=float, help="normal component ESS (Gaussian)")
    p.add_argument("--aw", dest="a_w", type=float, help="Wishart degrees of freedom (Gaussian)")

    p = sub.add_parser("check-consistency", help="density-factorization identities at random points")
    p.add_argument("--prior", required=True)
    p.add_argument("--points", type=int, default=100)
    p.add_argument("--seed", type=int, required=True)

    for p in sub.choices.values():
        p.add_argument("--out", help="write the report here instead of stdout")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    cfg = RunConfig(**{k: v for k, v in vars(args).items() if k in RunConfig.__dataclass_fields__})
    status, report = run_command(cfg)
    if status != EXIT_OK:
        sys.stderr.write(json.dumps(report) + "\n")
        return status
    text = io.write_json(report, cfg.out)
    if cfg.out is None:
        sys.stdout.write(text)
    return status


if __name__ == "__main__":
    sys.exit(main())
