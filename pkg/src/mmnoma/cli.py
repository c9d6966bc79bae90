"""Command-line front end: ``mmnoma run | sweep | compare``.

Results go to CSV (default) or JSON lines, one row per
(axis value, population, policy, metric).
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys

from .config import ConfigError, ScenarioConfig, load_config, parse_overrides
from .simulation import (
    METRICS, SWEEP_AXES, CampaignStats, Summary, paired_delta, run_campaign, sweep,
)

COLUMNS = (
    "fingerprint", "axis", "axis_value", "population", "scheme", "policy", "allocator",
    "clustering", "metric", "mean", "std", "ci_lo", "ci_hi", "trials", "seed",
)


def _num(x: float) -> str:
    return repr(float(x))


def _row(cfg: ScenarioConfig, axis: str, axis_value, population: str, policy: str,
         metric: str, s: Summary) -> dict:
    return {
        "fingerprint": cfg.fingerprint(),
        "axis": axis,
        "axis_value": "" if axis_value is None else str(axis_value),
        "population": population,
        "scheme": cfg.scheme,
        "policy": policy,
        "allocator": cfg.allocator,
        "clustering": "on" if cfg.clustering_on else "off",
        "metric": metric,
        "mean": _num(s.mean),
        "std": _num(s.std),
        "ci_lo": _num(s.ci_lo),
        "ci_hi": _num(s.ci_hi),
        "trials": str(s.n),
        "seed": str(cfg.master_seed),
    }


def campaign_rows(stats: CampaignStats, axis: str = "none", axis_value=None) -> list[dict]:
    return [
        _row(stats.config, axis, axis_value, pop, pol, metric, stats.summaries[(pop, pol, metric)])
        for pop, pol, metric in _ordered_keys(stats)
    ]


def _ordered_keys(stats: CampaignStats):
    cfg = stats.config
    for pop, pols in (("near", cfg.near_policies()), ("far", cfg.far_policies())):
        for pol in pols:
            for metric in METRICS:
                yield pop, pol.value, metric


def compare_rows(variants: list[CampaignStats]) -> list[dict]:
    """Absolute rows per variant, then paired ``variant_i - variant_0`` deltas."""
    rows = []
    for i, stats in enumerate(variants):
        rows.extend(campaign_rows(stats, "variant", i))
    ref = variants[0]
    for i, stats in enumerate(variants[1:], start=1):
        for key in _ordered_keys(stats):
            delta = paired_delta(ref, stats, key)
            pop, pol, metric = key
            rows.append(_row(stats.config, "variant", f"{i}-0", pop, pol, f"{metric}_delta",
                             delta.summary))
    return rows


def render(rows: list[dict], fmt: str) -> str:
    buf = io.StringIO()
    if fmt == "csv":
        writer = csv.DictWriter(buf, fieldnames=COLUMNS, lineterminator="\n")
        writer.writeheader()
        writer.writerows(rows)
    else:
        for row in rows:
            buf.write(json.dumps(row, sort_keys=False) + "\n")
    return buf.getvalue()


def _emit(text: str, out: str | None) -> None:
    if out is None or out == "-":
        sys.stdout.write(text)
    else:
        with open(out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)


def _load(args) -> ScenarioConfig:
    return load_config(args.config, master_seed=args.seed, trials=args.trials)


def cmd_run(args) -> int:
    cfg = _load(args)
    stats = run_campaign(cfg, args.threads)
    _emit(render(campaign_rows(stats), args.format), args.out)
    return 0


def cmd_sweep(args) -> int:
    cfg = _load(args)
    values = [float(v) for v in args.values.split(",") if v.strip()]
    if not values:
        raise ConfigError("sweep needs at least one value")
    rows = []
    for value, stats in sweep(cfg, args.axis, values, args.threads):
        rows.extend(campaign_rows(stats, args.axis, value))
    _emit(render(rows, args.format), args.out)
    return 0


def cmd_compare(args) -> int:
    cfg = _load(args)
    if len(args.variant) < 2:
        raise ConfigError("compare needs at least two --variant options")
    configs = [cfg.replace(**parse_overrides(v.split())) for v in args.variant]
    stats = [run_campaign(c, args.threads) for c in configs]
    _emit(render(compare_rows(stats), args.format), args.out)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="mmnoma", description="Near/far-field massive MIMO-NOMA link-level campaigns"
    )
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", required=True, help="INI scenario file")
    common.add_argument("--out", default=None, help="output file (default stdout)")
    common.add_argument("--format", choices=("csv", "jsonl"), default="csv")
    common.add_argument("--seed", type=int, default=None, help="override master_seed")
    common.add_argument("--trials", type=int, default=None, help="override trial count")
    common.add_argument("--threads", type=int, default=None,
                        help="worker threads, 0 = one per CPU (env MMNOMA_THREADS)")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", parents=[common], help="run one campaign")
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("sweep", parents=[common], help="one campaign per axis value")
    p.add_argument("--axis", choices=SWEEP_AXES, required=True)
    p.add_argument("--values", required=True, help="comma-separated axis values")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("compare", parents=[common], help="paired comparison of variants")
    p.add_argument("--variant", action="append", default=[],
                   help="space-separated key=value overrides; repeat per variant")
    p.set_defaults(func=cmd_compare)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"mmnoma: config error: {exc}", file=sys.stderr)
        return 2
    except (OSError, ValueError) as exc:
        print(f"mmnoma: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
