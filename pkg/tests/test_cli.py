import json

import numpy as np
import pytest

from portcut import (
    AllocationScheme,
    CutObjective,
    CutPolicy,
    allocate,
    asset_weights,
    block_factor_market,
    build_cut_tree,
    ingest_prices,
    market_graph_from_covariance,
    sample_covariance,
    simple_returns,
    PriceCsvSpec,
)
from portcut.cli import main

from conftest import make_prices, write_prices_csv


@pytest.fixture
def market_csv(tmp_path):
    prices, _ = block_factor_market([3, 5], 40, seed=3)
    path = tmp_path / "prices.csv"
    write_prices_csv(path, prices)
    return str(path)


@pytest.fixture
def zero_degree_csv(tmp_path):
    """Asset C has exactly zero sample covariance with A and B.

    All prices and returns are dyadic, so the cross-covariances cancel
    exactly in floating point and C is an isolated (zero-degree) vertex.
    """
    rows = [
        ("2020-01-01", 64.0, 64.0, 64.0),
        ("2020-01-02", 80.0, 48.0, 80.0),
        ("2020-01-03", 60.0, 60.0, 100.0),
        ("2020-01-04", 75.0, 45.0, 75.0),
        ("2020-01-05", 56.25, 56.25, 56.25),
    ]
    lines = ["date,A,B,C"]
    lines += [f"{d},{a!r},{b!r},{c!r}" for d, a, b, c in rows]
    path = tmp_path / "isolated.csv"
    path.write_text("\n".join(lines) + "\n")
    return str(path)


class TestCutCommand:
    def test_zero_cuts_single_leaf_json(self, market_csv, capsys):
        assert main(["cut", market_csv, "--max-cuts", "0"]) == 0
        payload = json.loads(capsys.readouterr().out)
        assert payload["k_performed"] == 0
        assert payload["leaf_ids"] == [0]
        assert payload["nodes"][0]["members"] == list(range(8))
        assert payload["schema_version"] == 1
        assert payload["manifest"]["command"] == "cut"

    def test_two_block_csv_recovers_blocks(self, market_csv, capsys):
        assert main(["cut", market_csv, "--max-cuts", "1",
                     "--min-leaf-size", "1"]) == 0
        payload = json.loads(capsys.readouterr().out)
        leaves = sorted(
            tuple(node["members"]) for node in payload["nodes"] if node["is_leaf"]
        )
        assert leaves == [(0, 1, 2), (3, 4, 5, 6, 7)]

    def test_volume_objective_zero_degree_exits_2(self, zero_degree_csv, capsys):
        code = main(["cut", zero_degree_csv, "--objective", "cutv",
                     "--max-cuts", "1", "--min-leaf-size", "1"])
        captured = capsys.readouterr()
        assert code == 2
        err = json.loads(captured.err)
        assert err["error"] == "DegenerateDegreeError"

    def test_normalized_objective_isolates_zero_degree(self, zero_degree_csv, capsys):
        assert main(["cut", zero_degree_csv, "--objective", "cutn",
                     "--max-cuts", "1", "--min-leaf-size", "1"]) == 0
        payload = json.loads(capsys.readouterr().out)
        leaves = sorted(
            tuple(node["members"]) for node in payload["nodes"] if node["is_leaf"]
        )
        assert leaves == [(0, 1), (2,)]

    def test_edge_budget_trace_present(self, market_csv, capsys):
        assert main(["cut", market_csv, "--max-cuts", "2",
                     "--min-leaf-size", "1"]) == 0
        payload = json.loads(capsys.readouterr().out)
        trace = payload["edge_budget_trace"]
        assert trace[0] == 36
        assert all(b < a for a, b in zip(trace, trace[1:]))
        internal = [n for n in payload["nodes"] if not n["is_leaf"]]
        assert all(n["lambda2_at_split"] is not None for n in internal)


class TestAllocateCommand:
    def test_round_trip_matches_in_process_pipeline(self, market_csv, tmp_path, capsys):
        tree_path = str(tmp_path / "tree.json")
        assert main(["cut", market_csv, "--max-cuts", "2", "--min-leaf-size", "1",
                     "-o", tree_path]) == 0
        assert main(["allocate", "--tree", tree_path, "--scheme", "as1"]) == 0
        payload = json.loads(capsys.readouterr().out)
        cli_weights = {row["asset_id"]: row["weight"] for row in payload["weights"]}

        matrix = ingest_prices(PriceCsvSpec(path=market_csv))
        graph = market_graph_from_covariance(
            sample_covariance(simple_returns(matrix)), asset_ids=matrix.asset_ids)
        tree = build_cut_tree(graph, CutPolicy(max_cuts=2, min_leaf_size=1),
                              CutObjective.NORMALIZED)
        wv = asset_weights(tree, allocate(tree, AllocationScheme.AS1))
        expected = dict(zip(tree.asset_ids, wv.weights))
        assert cli_weights.keys() == expected.keys()
        for asset, weight in expected.items():
            assert cli_weights[asset] == weight  # bit-identical through JSON

    def test_example_shaped_tree_cluster_weights(self, nested_block_graph,
                                                 tmp_path, capsys):
        from portcut.serialization import canonical_json, tree_to_dict

        tree = build_cut_tree(nested_block_graph,
                              CutPolicy(max_cuts=4, min_leaf_size=1))
        tree_path = tmp_path / "shaped.json"
        tree_path.write_text(canonical_json(tree_to_dict(tree)))

        assert main(["allocate", "--tree", str(tree_path), "--scheme", "as1"]) == 0
        payload = json.loads(capsys.readouterr().out)
        assert sorted(payload["cluster_weights"].values()) == [
            0.125, 0.125, 0.25, 0.25, 0.25]
        assert [row["weight"] for row in payload["weights"]] == [0.125] * 8

        assert main(["allocate", "--tree", str(tree_path), "--scheme", "as2"]) == 0
        payload = json.loads(capsys.readouterr().out)
        assert list(payload["cluster_weights"].values()) == [1.0 / 5.0] * 5

    def test_csv_format(self, market_csv, tmp_path, capsys):
        tree_path = str(tmp_path / "tree.json")
        main(["cut", market_csv, "--max-cuts", "1", "-o", tree_path])
        capsys.readouterr()
        assert main(["allocate", "--tree", tree_path, "--scheme", "as2",
                     "--format", "csv"]) == 0
        lines = capsys.readouterr().out.strip().splitlines()
        assert lines[0] == "asset_id,weight"
        assert len(lines) == 9
        total = sum(float(line.split(",")[1]) for line in lines[1:])
        assert abs(total - 1.0) <= 1e-10

    def test_missing_tree_file_exits_2(self, tmp_path, capsys):
        code = main(["allocate", "--tree", str(tmp_path / "nope.json"),
                     "--scheme", "as1"])
        assert code == 2
        assert json.loads(capsys.readouterr().err)["error"] == "InvalidInputError"

    def test_corrupt_tree_rejected(self, tmp_path, capsys):
        bad = tmp_path / "bad.json"
        bad.write_text('{"kind": "cut_tree", "schema_version": 1}')
        assert main(["allocate", "--tree", str(bad), "--scheme", "as1"]) == 2


class TestBacktestCommand:
    def test_constant_prices_flat_wealth(self, tmp_path, capsys):
        prices = make_prices(
            [[100.0, 101.0, 99.0, 100.0, 100.0, 100.0, 100.0]], asset_ids=["only"])
        csv_path = tmp_path / "flat.csv"
        write_prices_csv(csv_path, prices)
        wealth_path = tmp_path / "wealth.csv"
        assert main(["backtest", str(csv_path), "--split-index", "3",
                     "--strategies", "ew", "--wealth-csv", str(wealth_path)]) == 0
        payload = json.loads(capsys.readouterr().out)
        strat = payload["strategies"]["ew"]
        assert strat["status"] == "ok"
        assert strat["wealth_curve"] == [1.0, 1.0, 1.0, 1.0]
        assert strat["sharpe"] is None
        assert strat["sharpe_degenerate"] is True
        rows = wealth_path.read_text().strip().splitlines()
        assert rows[0] == "date,ew"
        assert all(line.endswith(",1.0") for line in rows[1:])

    def test_duplicated_assets_mv_fails_ew_survives(self, tmp_path, capsys):
        col = [100.0, 102.0, 99.0, 101.0, 104.0, 103.0, 106.0]
        other = [50.0, 51.0, 49.5, 50.5, 52.0, 51.5, 53.0]
        csv_path = tmp_path / "dup.csv"
        write_prices_csv(csv_path, make_prices([col, col, other]))
        assert main(["backtest", str(csv_path), "--split-index", "3",
                     "--strategies", "ew,mv", "--mv-ridge", "0"]) == 0
        payload = json.loads(capsys.readouterr().out)
        assert payload["strategies"]["ew"]["status"] == "ok"
        mv = payload["strategies"]["mv"]
        assert mv["status"] == "error"
        assert mv["error_kind"] == "SingularCovarianceError"

    def test_six_strategy_two_block_run(self, tmp_path, capsys):
        prices, _ = block_factor_market([8, 12], 400, seed=9)
        csv_path = tmp_path / "blocks.csv"
        write_prices_csv(csv_path, prices)
        svg_path = tmp_path / "wealth.svg"
        assert main(["backtest", str(csv_path), "--split-index", "200",
                     "--min-leaf-size", "1", "--mv-ridge", "1e-8",
                     "--svg", str(svg_path)]) == 0
        payload = json.loads(capsys.readouterr().out)
        strategies = payload["strategies"]
        assert set(strategies) == {"ew", "mv", "cutn-as1", "cutn-as2",
                                   "cutv-as1", "cutv-as2"}
        ew_std = strategies["ew"]["std_return"]
        for label in ("cutn-as1", "cutn-as2", "cutv-as1", "cutv-as2"):
            assert strategies[label]["status"] == "ok"
            assert strategies[label]["std_return"] < ew_std
            assert strategies[label]["metadata"]["k_performed"] == 1
        assert svg_path.read_text().startswith("<svg")
        assert payload["manifest"]["strategies"] == [
            "ew", "mv", "cutn-as1", "cutn-as2", "cutv-as1", "cutv-as2"]

    def test_split_date_equivalent_to_index(self, market_csv, tmp_path):
        by_index = tmp_path / "a.json"
        by_date = tmp_path / "b.json"
        assert main(["backtest", market_csv, "--split-index", "20",
                     "--strategies", "ew", "-o", str(by_index)]) == 0
        assert main(["backtest", market_csv, "--split-date", "t00020",
                     "--strategies", "ew", "-o", str(by_date)]) == 0
        a = json.loads(by_index.read_text())
        b = json.loads(by_date.read_text())
        assert a["split_index"] == b["split_index"] == 20
        assert a["strategies"] == b["strategies"]

    def test_wealth_csv_columns(self, market_csv, tmp_path):
        wealth_path = tmp_path / "w.csv"
        assert main(["backtest", market_csv, "--split-index", "20",
                     "--strategies", "ew,cutn-as2", "--min-leaf-size", "1",
                     "-o", str(tmp_path / "r.json"),
                     "--wealth-csv", str(wealth_path)]) == 0
        rows = wealth_path.read_text().strip().splitlines()
        assert rows[0] == "date,ew,cutn-as2"
        assert len(rows) == 1 + 21  # wealth has T - t* + 1 = 21 points


class TestDeterminism:
    def test_cut_byte_identical(self, market_csv, tmp_path):
        out1, out2 = str(tmp_path / "t1.json"), str(tmp_path / "t2.json")
        args = ["cut", market_csv, "--max-cuts", "3", "--min-leaf-size", "1"]
        assert main(args + ["-o", out1]) == 0
        assert main(args + ["-o", out2]) == 0
        assert open(out1, "rb").read() == open(out2, "rb").read()

    def test_backtest_byte_identical(self, market_csv, tmp_path):
        out1, out2 = str(tmp_path / "r1.json"), str(tmp_path / "r2.json")
        args = ["backtest", market_csv, "--split-index", "20",
                "--min-leaf-size", "1", "--mv-ridge", "1e-8"]
        assert main(args + ["-o", out1]) == 0
        assert main(args + ["-o", out2]) == 0
        assert open(out1, "rb").read() == open(out2, "rb").read()


class TestExitCodes:
    def test_usage_error_unknown_flag(self, market_csv, capsys):
        assert main(["cut", market_csv, "--not-a-flag"]) == 1

    def test_usage_error_unknown_strategy(self, market_csv, capsys):
        assert main(["backtest", market_csv, "--split-index", "5",
                     "--strategies", "warp"]) == 1
        assert "warp" in capsys.readouterr().err

    def test_usage_error_missing_split(self, market_csv):
        assert main(["backtest", market_csv]) == 1

    def test_data_error_missing_file(self, tmp_path, capsys):
        assert main(["cut", str(tmp_path / "ghost.csv")]) == 2
        err = json.loads(capsys.readouterr().err)
        assert err["error"] == "InvalidInputError"

    def test_data_error_bad_split(self, market_csv, capsys):
        assert main(["backtest", market_csv, "--split-index", "1",
                     "--strategies", "ew"]) == 2

    def test_success_zero(self, market_csv, capsys):
        assert main(["cut", market_csv, "--max-cuts", "0"]) == 0


class TestDropDegenerate:
    def test_flag_drops_flat_asset(self, tmp_path, capsys):
        moving = [100.0, 102.0, 99.0, 101.0, 104.0, 103.0, 106.0]
        other = [50.0, 51.0, 49.5, 50.5, 52.0, 51.5, 53.0]
        flat = [10.0] * 7
        csv_path = tmp_path / "flat.csv"
        write_prices_csv(csv_path, make_prices([moving, flat, other],
                                               asset_ids=["m", "flat", "o"]))
        assert main(["cut", str(csv_path), "--max-cuts", "1"]) == 2
        capsys.readouterr()
        assert main(["cut", str(csv_path), "--max-cuts", "1",
                     "--drop-degenerate"]) == 0
        payload = json.loads(capsys.readouterr().out)
        assert payload["asset_ids"] == ["m", "o"]
        assert "flat" in payload["manifest"]["dropped_assets"]
