"""Command-line interface.

Exit status of ``reconstruct``: 0 certified exact, 3 flagged lower bound,
4 assumption violation. Numerical failures (singular spectra, heavy filter
tails, exhausted search budgets) print one line to stderr and exit with 5. Defaults may come from a YAML config file named by
``--config`` or the ``UTFSR_CONFIG`` environment variable.
"""
from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import dataclass, fields, replace

import yaml

from . import io
from .errors import UtfsrError
from .lti import FrequencyGrid, covariances_from_psd
from .model import Ldim, psd, simulate, validate_utf
from .reconstruct import ReconstructionConfig, utf_sr
from .wiener import DELAYED, PRESENT, cwsep, wsep

CONFIG_ENV = "UTFSR_CONFIG"
EXIT_NUMERICAL = 5


@dataclass(frozen=True)
class RunConfig:
    grid: int = 1024
    max_lag: int = 32
    eps: float = 1e-6
    search_cap: int = 12
    seed: int = 0
    format: str = "json"

    def reconstruction(self, self_lags: bool = False) -> ReconstructionConfig:
        return ReconstructionConfig(self.max_lag, self.eps, self.search_cap, self_lags)


def _load_config(args) -> RunConfig:
    cfg = RunConfig()
    path = args.config or os.environ.get(CONFIG_ENV)
    if path:
        with open(path) as fh:
            doc = yaml.safe_load(fh) or {}
        known = {f.name for f in fields(RunConfig)}
        unknown = set(doc) - known
        if unknown:
            raise SystemExit(f"unknown config keys: {sorted(unknown)}")
        cfg = replace(cfg, **doc)
    overrides = {k: getattr(args, k) for k in ("grid", "max_lag", "eps", "search_cap", "seed", "format")
                 if getattr(args, k, None) is not None}
    return replace(cfg, **overrides)


def _spectrum(path, cfg: RunConfig, from_csv: bool = False):
    grid = FrequencyGrid(cfg.grid)
    if from_csv:
        return io.psd_from_samples(io.read_samples(path), grid)
    obj = io.load_any(path)
    return psd(obj, grid) if isinstance(obj, Ldim) else obj


def _emit(text: str, out):
    if out:
        with open(out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def cmd_validate(args, cfg):
    report = validate_utf(io.load_model(args.model))
    print(report.summary())
    return 0 if report.is_utf else 1


def cmd_psd(args, cfg):
    S = psd(io.load_model(args.model), FrequencyGrid(cfg.grid))
    _emit(json.dumps(io.psd_to_dict(S)) + "\n", args.output)
    return 0


def cmd_reconstruct(args, cfg):
    S = _spectrum(args.input, cfg, args.experimental_from_csv)
    report = utf_sr(S, cfg.reconstruction(args.self_lags))
    if cfg.format == "dot":
        text = report.to_dot()
    else:
        text = json.dumps(report.to_dict(), indent=2) + "\n"
    _emit(text, args.output)
    return report.status.exit_code


def _nodes(text):
    if not text:
        return []
    return [int(tok) - 1 for tok in text.replace(" ", "").split(",") if tok]


def cmd_query(args, cfg, parser):
    j, i = args.target - 1, args.tested - 1
    cond, cond_delayed = _nodes(args.cond), _nodes(args.cond_delayed)
    if i == j:
        parser.error("the tested node must differ from the target")
    if i in cond or i in cond_delayed or j in cond or set(cond) & set(cond_delayed):
        parser.error("conditioning sets must be disjoint and exclude the tested node "
                     "and the target's present value")
    S = _spectrum(args.input, cfg)
    if args.kind == "wsep":
        if cond_delayed or args.delayed:
            parser.error("wsep takes present conditioning nodes only")
        verdict = wsep(S, j, cond, i, cfg.eps, cfg.max_lag)
    else:
        R = covariances_from_psd(S, cfg.max_lag)
        entries = [(k, PRESENT) for k in cond] + [(k, DELAYED) for k in cond_delayed]
        verdict = cwsep(R, j, entries, i, delayed=args.delayed, eps=cfg.eps, max_lag=cfg.max_lag)
    out = {
        "kind": args.kind,
        "target": args.target,
        "tested": args.tested,
        "tested_delayed": bool(args.delayed),
        "cond": [k + 1 for k in cond],
        "cond_delayed": [k + 1 for k in cond_delayed],
        "separated": bool(verdict.separated),
        "margin": verdict.margin,
        "eps": cfg.eps,
        "low_confidence": verdict.low_confidence,
    }
    print(json.dumps(out))
    return 0


def cmd_simulate(args, cfg):
    y = simulate(io.load_model(args.model), args.samples, cfg.seed)
    if args.output:
        with open(args.output, "w", newline="") as fh:
            io.write_samples(y, fh)
    else:
        io.write_samples(y, sys.stdout)
    return 0


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help=f"YAML file of defaults (else ${CONFIG_ENV})")
    common.add_argument("--grid", type=int, help="frequency grid size (power of two)")
    common.add_argument("--max-lag", type=int, help="lags per causal regressor")
    common.add_argument("--eps", type=float, help="separation margin threshold")
    common.add_argument("--search-cap", type=int, help="largest conditioning pool searched")
    common.add_argument("--seed", type=int)
    common.add_argument("--format", choices=["json", "dot"])

    parser = argparse.ArgumentParser(
        prog="utfsr", description="Skeleton reconstruction of triangle-free linear dynamic networks.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", parents=[common], help="check the triangle-free assumption")
    p.add_argument("model")

    p = sub.add_parser("psd", parents=[common], help="dump the output spectrum of a model")
    p.add_argument("model")
    p.add_argument("-o", "--output")

    p = sub.add_parser("reconstruct", parents=[common], help="reconstruct and certify the skeleton")
    p.add_argument("input", help="model file or spectrum dump")
    p.add_argument("-o", "--output")
    p.add_argument("--self-lags", action="store_true",
                   help="let removal tests condition on the target's own past")
    p.add_argument("--experimental-from-csv", action="store_true",
                   help="treat INPUT as CSV samples and estimate the spectrum by averaged "
                        "periodograms (no correctness guarantee)")

    p = sub.add_parser("query", parents=[common], help="one Wiener separation test")
    p.add_argument("input", help="model file or spectrum dump")
    p.add_argument("kind", choices=["wsep", "cwsep"])
    p.add_argument("--target", type=int, required=True)
    p.add_argument("--tested", type=int, required=True)
    p.add_argument("--cond", default="", help="comma-separated present nodes")
    p.add_argument("--cond-delayed", default="", help="comma-separated delayed nodes (cwsep)")
    p.add_argument("--delayed", action="store_true", help="test the tested node's past only")

    p = sub.add_parser("simulate", parents=[common], help="write a sample path as CSV")
    p.add_argument("model")
    p.add_argument("--samples", type=int, required=True)
    p.add_argument("-o", "--output")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    cfg = _load_config(args)
    handlers = {"validate": cmd_validate, "psd": cmd_psd, "reconstruct": cmd_reconstruct,
                "simulate": cmd_simulate}
    try:
        if args.command == "query":
            return cmd_query(args, cfg, parser)
        return handlers[args.command](args, cfg)
    except UtfsrError as exc:
        print(f"utfsr: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
