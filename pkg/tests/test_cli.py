import json
import math

import numpy as np
import pytest
from click.testing import CliRunner

from prol import radial_eval
from prol.cli import (
    cli,
    load_records,
    parse_bandlimit,
    records_to_gpsfs,
)

C_FIGURE_TEXT = "20pi"


@pytest.fixture()
def runner():
    return CliRunner()


class TestParseBandlimit:
    @pytest.mark.parametrize(
        "text,expected",
        [
            ("20pi", 20.0 * math.pi),
            ("pi", math.pi),
            ("62.8318530718", 62.8318530718),
            ("1e-3", 1e-3),
            ("2.5 pi", 2.5 * math.pi),
        ],
    )
    def test_values(self, text, expected):
        assert parse_bandlimit(text) == pytest.approx(expected, rel=1e-15)

    def test_rejects_garbage(self):
        with pytest.raises(ValueError):
            parse_bandlimit("fast")


class TestEigensystemCommand:
    def test_record_count_and_norms(self, runner, tmp_path):
        out = tmp_path / "eig.json"
        result = runner.invoke(
            cli,
            ["eigensystem", "--dim", "3", "--c", "62.8318530718", "--N", "0",
             "--n-max", "40", "--format", "json", "--out", str(out)],
        )
        assert result.exit_code == 0, result.output
        payload = load_records(out)
        assert payload["meta"]["p"] == 1
        assert len(payload["records"]) == 41
        for rec in payload["records"]:
            norm = np.linalg.norm(rec["coeffs"])
            assert abs(norm - 1.0) <= 1e-14
            assert len(rec["coeffs"]) == payload["meta"]["K"]

    def test_odd_record_has_negative_leading_coefficient(self, runner, tmp_path):
        out = tmp_path / "eig.json"
        result = runner.invoke(
            cli,
            ["eigensystem", "--dim", "3", "--c", C_FIGURE_TEXT, "--N", "0",
             "--n-max", "1", "--out", str(out)],
        )
        assert result.exit_code == 0, result.output
        records = load_records(out)["records"]
        assert records[1]["n"] == 1
        assert records[1]["coeffs"][0] < 0.0

    def test_dim_two_maps_to_p_zero(self, runner, tmp_path):
        out = tmp_path / "eig.json"
        result = runner.invoke(
            cli, ["eigensystem", "--dim", "2", "--c", "5", "--n-max", "0", "--out", str(out)]
        )
        assert result.exit_code == 0, result.output
        assert load_records(out)["meta"]["p"] == 0

    def test_deterministic_output(self, runner, tmp_path):
        args = ["eigensystem", "--dim", "3", "--c", "5", "--N", "0", "--N", "1", "--n-max", "4"]
        first = runner.invoke(cli, args + ["--out", str(tmp_path / "a.json")])
        second = runner.invoke(cli, args + ["--out", str(tmp_path / "b.json")])
        assert first.exit_code == 0 and second.exit_code == 0
        assert (tmp_path / "a.json").read_bytes() == (tmp_path / "b.json").read_bytes()

    def test_round_trip_reconstruction(self, runner, tmp_path):
        out = tmp_path / "eig.json"
        result = runner.invoke(
            cli, ["eigensystem", "--dim", "3", "--c", "10", "--N", "0", "--n-max", "3",
                  "--out", str(out)]
        )
        assert result.exit_code == 0, result.output
        gpsfs = records_to_gpsfs(load_records(out))
        from prol import ProblemParams, compute_radial_gpsfs

        _, _, fresh = compute_radial_gpsfs(ProblemParams(1, 10.0, 0), 3)
        grid = np.linspace(0.0, 1.0, 33)
        for loaded, direct in zip(gpsfs, fresh):
            assert np.max(np.abs(radial_eval(loaded, grid) - radial_eval(direct, grid))) <= 1e-12

    def test_csv_format(self, runner):
        result = runner.invoke(
            cli, ["eigensystem", "--dim", "3", "--c", "5", "--n-max", "1", "--format", "csv"]
        )
        assert result.exit_code == 0, result.output
        header = result.output.splitlines()[0]
        assert header.startswith("N,n,chi,gamma,beta,alpha_mag,nu_mag,phase_order,energy_deficit")
        assert "coeff_0" in header

    def test_requires_bandlimit(self, runner):
        result = runner.invoke(cli, ["eigensystem", "--dim", "3"])
        assert result.exit_code != 0
        assert "--c" in result.output

    def test_rejects_bad_dimension(self, runner):
        result = runner.invoke(cli, ["eigensystem", "--dim", "1", "--c", "5"])
        assert result.exit_code != 0


class TestEvalCommand:
    def test_two_point_grid(self, runner):
        result = runner.invoke(
            cli,
            ["eval", "--dim", "3", "--c", "5", "--n-max", "0", "--grid", "2", "--format", "csv"],
        )
        assert result.exit_code == 0, result.output
        lines = result.output.strip().splitlines()
        assert len(lines) == 3
        assert lines[1].startswith("0.0,")
        assert lines[2].startswith("1.0,")

    def test_weighted_is_weight_times_radial(self, runner, tmp_path):
        shared = ["--dim", "3", "--c", "10", "--N", "1", "--n-max", "2", "--grid", "65"]
        ra = runner.invoke(cli, ["eval", *shared, "--kind", "radial", "--out", str(tmp_path / "r.json")])
        wa = runner.invoke(cli, ["eval", *shared, "--kind", "weighted", "--out", str(tmp_path / "w.json")])
        assert ra.exit_code == 0 and wa.exit_code == 0
        radial = json.loads((tmp_path / "r.json").read_text())
        weighted = json.loads((tmp_path / "w.json").read_text())
        x = np.array(radial["x"])
        for rs, ws in zip(radial["series"], weighted["series"]):
            expect = x ** ((1 + 1) / 2.0) * np.array(rs["values"])
            assert np.max(np.abs(expect - np.array(ws["values"]))) <= 1e-13 * max(
                1.0, np.max(np.abs(expect))
            )

    def test_figure_scale_table(self, runner, tmp_path):
        out = tmp_path / "fig.csv"
        result = runner.invoke(
            cli,
            ["eval", "--dim", "3", "--c", C_FIGURE_TEXT, "--N", "0", "--n-max", "5",
             "--grid", "512", "--format", "csv", "--out", str(out)],
        )
        assert result.exit_code == 0, result.output
        lines = out.read_text().strip().splitlines()
        assert lines[0] == "x,Phi_N0_n0,Phi_N0_n1,Phi_N0_n2,Phi_N0_n3,Phi_N0_n4,Phi_N0_n5"
        assert len(lines) == 513


class TestEigentableCommand:
    def test_first_row_near_unity(self, runner, tmp_path):
        out = tmp_path / "table.json"
        result = runner.invoke(
            cli,
            ["eigentable", "--dim", "3", "--c", C_FIGURE_TEXT, "--N", "0", "--n-max", "10",
             "--out", str(out)],
        )
        assert result.exit_code == 0, result.output
        rows = json.loads(out.read_text())["rows"]
        assert 1.0 - rows[0]["nu_mag"] <= 1e-8

    def test_magnitudes_within_unit_bound(self, runner, tmp_path):
        out = tmp_path / "table.json"
        result = runner.invoke(
            cli,
            ["eigentable", "--dim", "3", "--c", C_FIGURE_TEXT, "--N", "0", "--N", "1",
             "--N", "2", "--N", "3", "--n-max", "60", "--out", str(out)],
        )
        assert result.exit_code == 0, result.output
        rows = json.loads(out.read_text())["rows"]
        assert len(rows) == 4 * 61
        assert all(0.0 <= r["nu_mag"] <= 1.0 + 1e-10 for r in rows)

    def test_decay_flags_present(self, runner):
        result = runner.invoke(
            cli,
            ["eigentable", "--dim", "3", "--c", "5", "--n-max", "12", "--format", "csv"],
        )
        assert result.exit_code == 0, result.output
        lines = result.output.strip().splitlines()
        assert lines[0] == "N,n,nu_mag,energy_deficit,gamma,beta,below_chain_precision"
        assert lines[-1].endswith("true")


class TestVerifyCommand:
    def test_default_spec_passes(self, runner):
        result = runner.invoke(cli, ["verify"])
        assert result.exit_code == 0, result.output
        assert "verification PASSED" in result.output
        assert result.output.count("PASS") >= 5

    def test_injected_fault_detected(self, runner):
        result = runner.invoke(cli, ["verify", "--inject-fault"])
        assert result.exit_code == 1
        assert "integral-residual" in result.output
        assert "FAIL" in result.output

    def test_small_bandlimit_asymptotic_check(self, runner):
        result = runner.invoke(cli, ["verify", "--c", "1e-3", "--N", "0", "--n-max", "2"])
        assert result.exit_code == 0, result.output
        assert "small-c-asymptotic" in result.output
