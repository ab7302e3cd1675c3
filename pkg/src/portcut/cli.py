"""Command-line frontend: cut, allocate and backtest pipelines over price CSVs.

Exit codes: 0 success, 1 usage error, 2 data or numeric error. Data errors
are emitted as one-line JSON objects on stderr so callers can parse them.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import asdict, dataclass
from typing import List, Optional, Sequence, Tuple

import numpy as np

from . import __version__
from .allocation import AllocationScheme, allocate, asset_weights
from .backtest import BacktestConfig, StrategyKind, StrategySpec, run_backtest
from .errors import DegenerateAssetError, InvalidInputError, PortfolioCutError
from .ingest import IngestReport, MissingPolicy, PriceCsvSpec, ingest_prices_with_report, timestamp_sort_key
from .market_graph import (
    PriceMatrix,
    market_graph_from_covariance,
    sample_covariance,
    simple_returns,
)
from .serialization import (
    canonical_json,
    report_to_dict,
    tree_from_dict,
    tree_to_dict,
    wealth_to_csv,
    wealth_to_svg,
    weights_to_csv,
    weights_to_dict,
)
from .spectral import CutObjective
from .tree import CutPolicy, LeafSelection, build_cut_tree

__all__ = ["main", "console_main", "cmd_cut", "cmd_allocate", "cmd_backtest", "RunManifest"]

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2

STRATEGY_TOKENS = ("ew", "mv", "cutn-as1", "cutn-as2", "cutv-as1", "cutv-as2")


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    """argparse that signals usage problems instead of exiting with code 2."""

    def error(self, message):
        raise _UsageError(f"{self.prog}: {message}")


@dataclass(frozen=True)
class RunManifest:
    """Echo of the resolved configuration plus a digest of the input."""

    command: str
    input_path: str
    date_column: str
    missing_policy: str
    drop_degenerate: bool
    n_rows: int
    n_assets: int
    first_date: str
    last_date: str
    dropped_rows: int
    dropped_assets: List[str]
    objective: Optional[str] = None
    max_cuts: Optional[int] = None
    lambda2_threshold: Optional[float] = None
    leaf_selection: Optional[str] = None
    min_leaf_size: Optional[int] = None
    scheme: Optional[str] = None
    split_index: Optional[int] = None
    split_date: Optional[str] = None
    strategies: Optional[List[str]] = None
    mv_ridge: Optional[float] = None
    annualization_factor: Optional[float] = None
    version: str = __version__


def _add_input_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("prices", help="price CSV (header row, one date column)")
    parser.add_argument("--date-column", default="date")
    parser.add_argument("--delimiter", default=",")
    parser.add_argument("--missing-policy", default="error",
                        choices=[p.value for p in MissingPolicy])
    parser.add_argument("--drop-degenerate", action="store_true",
                        help="drop zero-variance assets instead of failing")


def _add_policy_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--max-cuts", type=int, default=1)
    parser.add_argument("--lambda2-threshold", type=float, default=None)
    parser.add_argument("--leaf-selection", default="vertices",
                        choices=[s.value for s in LeafSelection])
    parser.add_argument("--min-leaf-size", type=int, default=2)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="portcut",
                     description="Spectral portfolio cuts over correlation market graphs")
    parser.add_argument("--version", action="version", version=f"portcut {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p_cut = sub.add_parser("cut", help="build a cut tree from a price CSV")
    _add_input_flags(p_cut)
    p_cut.add_argument("--objective", default="cutn",
                       choices=[o.value for o in CutObjective])
    _add_policy_flags(p_cut)
    p_cut.add_argument("-o", "--output", default="-", help="tree JSON path ('-' = stdout)")

    p_alloc = sub.add_parser("allocate", help="turn a tree JSON into asset weights")
    p_alloc.add_argument("--tree", required=True, help="cut tree JSON path")
    p_alloc.add_argument("--scheme", required=True,
                         choices=[s.value for s in AllocationScheme])
    p_alloc.add_argument("--format", default="json", choices=["json", "csv"])
    p_alloc.add_argument("-o", "--output", default="-")

    p_bt = sub.add_parser("backtest", help="in/out-sample evaluation of strategies")
    _add_input_flags(p_bt)
    _add_policy_flags(p_bt)
    split = p_bt.add_mutually_exclusive_group(required=True)
    split.add_argument("--split-index", type=int,
                       help="first out-sample return row")
    split.add_argument("--split-date",
                       help="last in-sample date (returns dated by period end)")
    p_bt.add_argument("--strategies", default=",".join(STRATEGY_TOKENS),
                      help=f"comma list from {', '.join(STRATEGY_TOKENS)}")
    p_bt.add_argument("--mv-ridge", type=float, default=0.0)
    p_bt.add_argument("--annualization", type=float, default=252.0)
    p_bt.add_argument("-o", "--output", default="-", help="report JSON path")
    p_bt.add_argument("--wealth-csv", default=None, help="wealth curve CSV path")
    p_bt.add_argument("--svg", default=None, help="wealth curve SVG path")
    return parser


def _write(text: str, destination: str) -> None:
    if destination == "-":
        sys.stdout.write(text)
    else:
        with open(destination, "w") as handle:
            handle.write(text)


def _load_prices(args) -> Tuple[PriceMatrix, IngestReport]:
    spec = PriceCsvSpec(
        path=args.prices,
        date_column=args.date_column,
        delimiter=args.delimiter,
        missing_policy=MissingPolicy(args.missing_policy),
    )
    matrix, report = ingest_prices_with_report(spec)
    if args.drop_degenerate:
        matrix, dropped = _drop_degenerate(matrix)
        if dropped:
            print(f"dropped zero-variance asset(s): {', '.join(dropped)}",
                  file=sys.stderr)
            report = IngestReport(
                n_rows=matrix.n_rows,
                n_assets=matrix.n_assets,
                dropped_rows=report.dropped_rows,
                dropped_assets=report.dropped_assets + tuple(dropped),
            )
    return matrix, report


def _drop_degenerate(matrix: PriceMatrix) -> Tuple[PriceMatrix, List[str]]:
    sigma = sample_covariance(simple_returns(matrix)).sigma
    keep = np.flatnonzero(np.diag(sigma) > 0.0)
    dropped = [matrix.asset_ids[i] for i in range(matrix.n_assets) if i not in keep]
    if not dropped:
        return matrix, []
    if keep.size == 0:
        raise DegenerateAssetError(dropped, "every asset has zero variance")
    return PriceMatrix(
        prices=matrix.prices[:, keep],
        asset_ids=tuple(matrix.asset_ids[i] for i in keep),
        timestamps=matrix.timestamps,
    ), dropped


def _policy_from_args(args) -> CutPolicy:
    return CutPolicy(
        max_cuts=args.max_cuts,
        lambda2_threshold=args.lambda2_threshold,
        leaf_selection=LeafSelection(args.leaf_selection),
        min_leaf_size=args.min_leaf_size,
    )


def _manifest_base(args, command: str, matrix: PriceMatrix,
                   report: IngestReport) -> dict:
    return {
        "command": command,
        "input_path": args.prices,
        "date_column": args.date_column,
        "missing_policy": args.missing_policy,
        "drop_degenerate": bool(args.drop_degenerate),
        "n_rows": matrix.n_rows,
        "n_assets": matrix.n_assets,
        "first_date": matrix.timestamps[0],
        "last_date": matrix.timestamps[-1],
        "dropped_rows": len(report.dropped_rows),
        "dropped_assets": list(report.dropped_assets),
    }


def cmd_cut(args) -> int:
    matrix, report = _load_prices(args)
    graph = market_graph_from_covariance(
        sample_covariance(simple_returns(matrix)), asset_ids=matrix.asset_ids
    )
    tree = build_cut_tree(graph, _policy_from_args(args), CutObjective(args.objective))
    payload = tree_to_dict(tree)
    payload["manifest"] = asdict(RunManifest(
        **_manifest_base(args, "cut", matrix, report),
        objective=args.objective,
        max_cuts=args.max_cuts,
        lambda2_threshold=args.lambda2_threshold,
        leaf_selection=args.leaf_selection,
        min_leaf_size=args.min_leaf_size,
    ))
    _write(canonical_json(payload), args.output)
    return EXIT_OK


def cmd_allocate(args) -> int:
    try:
        with open(args.tree) as handle:
            payload = json.load(handle)
    except OSError as exc:
        raise InvalidInputError(f"cannot read tree file: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise InvalidInputError(f"tree file is not valid JSON: {exc}") from exc
    tree = tree_from_dict(payload)
    clusters = allocate(tree, AllocationScheme(args.scheme))
    weights = asset_weights(tree, clusters)
    if args.format == "csv":
        _write(weights_to_csv(tree.asset_ids, weights), args.output)
    else:
        _write(canonical_json(
            weights_to_dict(tree.asset_ids, weights, clusters.per_leaf)
        ), args.output)
    return EXIT_OK


def _parse_strategies(tokens: str) -> Tuple[str, ...]:
    seen = set()
    for token in tokens.split(","):
        token = token.strip().lower()
        if not token:
            continue
        if token not in STRATEGY_TOKENS:
            raise _UsageError(
                f"unknown strategy {token!r}; choose from {', '.join(STRATEGY_TOKENS)}"
            )
        if token in seen:
            raise _UsageError(f"duplicate strategy {token!r}")
        seen.add(token)
    if not seen:
        raise _UsageError("empty strategy list")
    return tuple(sorted(seen, key=STRATEGY_TOKENS.index))


def _strategy_specs(tokens: Sequence[str], policy: CutPolicy) -> Tuple[StrategySpec, ...]:
    specs = []
    for token in tokens:
        if token == "ew":
            specs.append(StrategySpec(kind=StrategyKind.EW))
        elif token == "mv":
            specs.append(StrategySpec(kind=StrategyKind.MV))
        else:
            objective, scheme = token.split("-")
            specs.append(StrategySpec(
                kind=StrategyKind.CUT,
                objective=CutObjective(objective),
                policy=policy,
                scheme=AllocationScheme(scheme),
            ))
    return tuple(specs)


def _resolve_split(args, matrix: PriceMatrix) -> int:
    if args.split_index is not None:
        return args.split_index
    key = timestamp_sort_key(args.split_date)
    # Return row t realizes at timestamps[t+1]; in-sample keeps dates <= split.
    return sum(1 for stamp in matrix.timestamps[1:]
               if timestamp_sort_key(stamp) <= key)


def cmd_backtest(args) -> int:
    matrix, report = _load_prices(args)
    tokens = _parse_strategies(args.strategies)
    policy = _policy_from_args(args)
    split_index = _resolve_split(args, matrix)
    config = BacktestConfig(
        split_index=split_index,
        strategies=_strategy_specs(tokens, policy),
        annualization_factor=args.annualization,
        mv_ridge=args.mv_ridge,
    )
    result = run_backtest(matrix, config)
    manifest = asdict(RunManifest(
        **_manifest_base(args, "backtest", matrix, report),
        max_cuts=args.max_cuts,
        lambda2_threshold=args.lambda2_threshold,
        leaf_selection=args.leaf_selection,
        min_leaf_size=args.min_leaf_size,
        split_index=split_index,
        split_date=args.split_date,
        strategies=list(tokens),
        mv_ridge=args.mv_ridge,
        annualization_factor=args.annualization,
    ))
    _write(canonical_json(report_to_dict(result, manifest)), args.output)
    if args.wealth_csv:
        _write(wealth_to_csv(result), args.wealth_csv)
    if args.svg:
        _write(wealth_to_svg(result), args.svg)
    return EXIT_OK


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if args.command == "cut":
            return cmd_cut(args)
        if args.command == "allocate":
            return cmd_allocate(args)
        return cmd_backtest(args)
    except _UsageError as exc:
        print(str(exc), file=sys.stderr)
        return EXIT_USAGE
    except PortfolioCutError as exc:
        print(json.dumps({"error": type(exc).__name__, "message": str(exc)}),
              file=sys.stderr)
        return EXIT_DATA


def console_main() -> None:
    sys.exit(main())


if __name__ == "__main__":
    console_main()
