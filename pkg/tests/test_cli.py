"""End-to-end command line runs: validation, sweeps, bounds, oracle checks."""

import csv
import json
import math

import numpy as np
import pytest

from sampcap import CausalPolicy, binary_entropy, cli

from conftest import BSC_CONFIG_PATH, MARKOVIAN_CONFIG_PATH

INFORMED_CAPACITY = math.log2(5.0) - 2.0
COMMON_INPUT_CAPACITY = binary_entropy(0.25) - 0.5


def write_variant(tmp_path, base_path, mutate, name="variant.json"):
    """Copy a bundled config, apply an in-place mutation, write it back."""
    with open(base_path, "r", encoding="utf-8") as fh:
        doc = json.load(fh)
    mutate(doc)
    path = tmp_path / name
    path.write_text(json.dumps(doc, indent=1), encoding="utf-8")
    return str(path)


def read_rows(path):
    with open(path, newline="", encoding="utf-8") as fh:
        rows = list(csv.reader(fh))
    return rows[0], rows[1:]


class TestValidate:
    def test_bundled_configs_are_valid(self, capsys):
        for path in (BSC_CONFIG_PATH, MARKOVIAN_CONFIG_PATH):
            assert cli.cmd_validate(str(path)) == cli.EXIT_OK
            assert f"{path}: valid" in capsys.readouterr().out

    def test_kernel_defect_is_located_by_pointer(self, tmp_path, capsys):
        def mutate(doc):
            doc["channel"]["kernel"][0][0][0][0] = 0.6

        path = write_variant(tmp_path, BSC_CONFIG_PATH, mutate)
        assert cli.cmd_validate(path) == cli.EXIT_SEMANTIC
        out = capsys.readouterr().out
        assert "/channel/kernel/0/0" in out
        assert "row sums to" in out
        assert "valid" not in out

    def test_malformed_json_reports_the_position(self, tmp_path, capsys):
        path = tmp_path / "broken.json"
        path.write_text('{"channel": [,]}', encoding="utf-8")
        assert cli.cmd_validate(str(path)) == cli.EXIT_PARSE
        out = capsys.readouterr().out
        assert "parse error at line 1" in out

    def test_missing_file(self, tmp_path, capsys):
        assert cli.cmd_validate(str(tmp_path / "nope.json")) == cli.EXIT_IO
        assert "cannot read" in capsys.readouterr().out


class TestCapacitySweep:
    def test_outputs_are_deterministic_across_thread_counts(self, tmp_path):
        out1 = tmp_path / "run1"
        out2 = tmp_path / "run2"
        assert cli.cmd_capacity_sweep(str(BSC_CONFIG_PATH), str(out1),
                                      threads=2) == cli.EXIT_OK
        assert cli.cmd_capacity_sweep(str(BSC_CONFIG_PATH), str(out2),
                                      threads=1) == cli.EXIT_OK
        for n in (1, 2, 3):
            for stem in (f"sweep_{n}.csv", f"envelope_{n}.csv"):
                assert (out1 / stem).read_bytes() == (out2 / stem).read_bytes()
        header, rows = read_rows(out1 / "sweep_1.csv")
        assert header == ["lambda", "gamma", "c_lambda", "i_lower", "i_upper",
                          "iterations", "converged"]
        assert len(rows) == 26
        assert all(row[-1] == "true" for row in rows)
        with open(out1 / "report.json", encoding="utf-8") as fh:
            report = json.load(fh)
        assert [run["block_length"] for run in report["runs"]] == [1, 2, 3]
        for run in report["runs"]:
            assert run["nonconverged_points"] == 0
            assert run["max_final_gap"] <= report["epsilon"]

    def test_single_lambda_point(self, tmp_path):
        def mutate(doc):
            doc["block_lengths"] = [2]
            doc["algorithm"]["lambda_grid"] = [0.0]
            doc["algorithm"]["gamma_points"] = 11

        path = write_variant(tmp_path, MARKOVIAN_CONFIG_PATH, mutate)
        out = tmp_path / "out"
        assert cli.cmd_capacity_sweep(path, str(out)) == cli.EXIT_OK
        header, rows = read_rows(out / "sweep_2.csv")
        assert len(rows) == 1
        lam, gamma, _, _, i_upper, _, converged = rows[0]
        assert float(lam) == 0.0
        assert 0.0 <= float(gamma) <= 1.0
        # lambda = 0 leaves sampling free, so the bound hits the known value
        assert float(i_upper) == pytest.approx(INFORMED_CAPACITY, abs=5e-6)
        assert converged == "true"
        _, env_rows = read_rows(out / "envelope_2.csv")
        assert len(env_rows) == 11

    def test_empty_block_lengths_are_rejected(self, tmp_path, capsys):
        def mutate(doc):
            doc["block_lengths"] = []

        path = write_variant(tmp_path, MARKOVIAN_CONFIG_PATH, mutate)
        assert cli.cmd_capacity_sweep(path, str(tmp_path / "out")) \
            == cli.EXIT_SEMANTIC
        assert "/block_lengths" in capsys.readouterr().err


class TestBounds:
    def test_budget_table(self, tmp_path):
        def mutate(doc):
            doc["algorithm"]["resolution"] = 21
            doc["algorithm"]["gamma_points"] = 11

        path = write_variant(tmp_path, MARKOVIAN_CONFIG_PATH, mutate)
        out = tmp_path / "out"
        assert cli.cmd_bounds(path, str(out)) == cli.EXIT_OK
        header, rows = read_rows(out / "bounds.csv")
        assert header == ["gamma", "c_enc_lower", "c_dec_lower",
                          "time_sharing", "c0", "c1"]
        assert len(rows) == 11
        c0 = float(rows[0][4])
        c1 = float(rows[0][5])
        assert c0 == pytest.approx(COMMON_INPUT_CAPACITY, abs=1e-4)
        assert c1 == pytest.approx(INFORMED_CAPACITY, abs=1e-4)
        first, last = rows[0], rows[-1]
        assert float(first[0]) == 0.0
        assert float(first[1]) == pytest.approx(c0, abs=1e-6)
        assert float(first[3]) == pytest.approx(c0, abs=1e-12)
        assert float(last[0]) == 1.0
        for col in (1, 2, 3):
            assert float(last[col]) == pytest.approx(c1, abs=1e-4)
        for row in rows:
            assert float(row[2]) >= float(row[1]) - 1e-6

    def test_requires_the_single_letter_section(self, tmp_path, capsys):
        def mutate(doc):
            del doc["single_letter"]

        path = write_variant(tmp_path, MARKOVIAN_CONFIG_PATH, mutate)
        assert cli.cmd_bounds(path, str(tmp_path / "out")) == cli.EXIT_SEMANTIC
        assert "/single_letter" in capsys.readouterr().err


class TestOracleCheck:
    def test_memoryless_config_passes(self, tmp_path, capsys):
        out = tmp_path / "out"
        assert cli.cmd_oracle_check(str(BSC_CONFIG_PATH), str(out)) \
            == cli.EXIT_OK
        with open(out / "oracle_report.json", encoding="utf-8") as fh:
            report = json.load(fh)
        assert report["passed"] is True
        assert len(report["checks"]) == 10
        assert all(check["passed"] for check in report["checks"])
        assert report["skipped"] == []
        stdout = capsys.readouterr().out
        assert "PASS directed_info_n1_uniform" in stdout
        assert "FAIL" not in stdout

    def test_two_state_config_skips_the_oversized_grid(self, tmp_path, capsys):
        out = tmp_path / "out"
        assert cli.cmd_oracle_check(str(MARKOVIAN_CONFIG_PATH), str(out)) \
            == cli.EXIT_OK
        with open(out / "oracle_report.json", encoding="utf-8") as fh:
            report = json.load(fh)
        assert report["passed"] is True
        assert all(check["passed"] for check in report["checks"])
        skipped = {skip["quantity"] for skip in report["skipped"]}
        assert "grid_capacity_n2" in skipped
        assert "SKIP grid_capacity_n2" in capsys.readouterr().out

    def test_corrupted_policy_update_is_caught(self, tmp_path, monkeypatch):
        # the negative control: nudge every updated policy slice toward
        # uniform by one part in a thousand and the literal product-of-powers
        # reference must flag the mismatch
        true_update = cli.update_r

        def crooked_update(state, lam=None):
            policy = true_update(state, lam)
            tables = tuple(
                0.999 * table + 0.001 / table.shape[1]
                for table in policy.tables
            )
            return CausalPolicy(block_length=policy.block_length,
                                u_size=policy.u_size, z_size=policy.z_size,
                                tables=tables)

        monkeypatch.setattr(cli, "update_r", crooked_update)
        monkeypatch.setattr(cli, "ORACLE_BLOCKS", (1,))
        out = tmp_path / "out"
        assert cli.cmd_oracle_check(str(MARKOVIAN_CONFIG_PATH), str(out)) \
            == cli.EXIT_SEMANTIC
        with open(out / "oracle_report.json", encoding="utf-8") as fh:
            report = json.load(fh)
        assert report["passed"] is False
        failing = [check["quantity"] for check in report["checks"]
                   if not check["passed"]]
        assert failing
        assert all(name.startswith("r_update") for name in failing)


class TestExponent:
    def test_exponent_table(self, tmp_path):
        out = tmp_path / "out"
        assert cli.cmd_exponent(str(MARKOVIAN_CONFIG_PATH), str(out)) \
            == cli.EXIT_OK
        header, rows = read_rows(out / "exponent.csv")
        assert header == ["rho", "s0", "value"]
        assert len(rows) == 14
        by_state = {0: [], 1: []}
        for rho, s0, value in rows:
            by_state[int(s0)].append((float(rho), float(value)))
        for s0, series in by_state.items():
            assert len(series) == 7
            assert series[0] == (0.0, 0.0)
            values = [v for _, v in series]
            assert all(b >= a - 1e-12 for a, b in zip(values, values[1:]))
        # the two start states are mirror images, so the exponents agree
        for (_, v0), (_, v1) in zip(by_state[0], by_state[1]):
            assert abs(v0 - v1) <= 1e-12

    def test_requires_the_exponent_section(self, tmp_path, capsys):
        def mutate(doc):
            del doc["exponent"]

        path = write_variant(tmp_path, MARKOVIAN_CONFIG_PATH, mutate)
        assert cli.cmd_exponent(path, str(tmp_path / "out")) \
            == cli.EXIT_SEMANTIC
        assert "/exponent" in capsys.readouterr().err


class TestMain:
    def test_dispatch(self, capsys):
        code = cli.main(["validate", "--config", str(BSC_CONFIG_PATH)])
        assert code == cli.EXIT_OK
        assert "valid" in capsys.readouterr().out

    def test_unknown_command_exits_with_usage_error(self):
        with pytest.raises(SystemExit) as excinfo:
            cli.main(["transmogrify", "--config", "x.json"])
        assert excinfo.value.code == 2

    def test_config_flag_is_required(self):
        with pytest.raises(SystemExit) as excinfo:
            cli.main(["validate"])
        assert excinfo.value.code == 2
