"""Matrix file I/O and command-line interface tests."""

import json
import math

import numpy as np
import pytest

from mimome.cli import main
from mimome.errors import ParseError
from mimome.io import read_matrix, write_matrix


def crandn(rng, m, n):
    return (rng.standard_normal((m, n)) + 1j * rng.standard_normal((m, n))) / np.sqrt(2)


class TestMatrixIo:
    def test_round_trip_bit_identical(self, tmp_path):
        rng = np.random.default_rng(71)
        for i in range(10):
            m = crandn(rng, int(rng.integers(1, 5)), int(rng.integers(1, 5)))
            path = tmp_path / f"m{i}.json"
            write_matrix(path, m)
            m2 = read_matrix(path)
            assert m2.shape == m.shape
            assert np.array_equal(m.view(np.float64), m2.view(np.float64))

    def test_json_layout(self, tmp_path):
        path = tmp_path / "a.json"
        write_matrix(path, np.array([[1.0 + 2.0j, 3.0]]))
        doc = json.loads(path.read_text())
        assert doc["rows"] == 1 and doc["cols"] == 2
        assert doc["data"] == [[1.0, 2.0], [3.0, 0.0]]

    def test_malformed_json_reports_position(self, tmp_path):
        path = tmp_path / "bad.json"
        path.write_text('{"rows": 1,\n "cols": }\n')
        with pytest.raises(ParseError) as err:
            read_matrix(path)
        assert "line 2" in str(err.value)
        assert "column" in str(err.value)

    def test_wrong_data_length(self, tmp_path):
        path = tmp_path / "short.json"
        path.write_text('{"rows": 2, "cols": 2, "data": [[1, 0]]}')
        with pytest.raises(ParseError):
            read_matrix(path)

    def test_nonfinite_rejected(self, tmp_path):
        path = tmp_path / "inf.json"
        path.write_text('{"rows": 1, "cols": 1, "data": [[Infinity, 0]]}')
        with pytest.raises(ParseError):
            read_matrix(path)

    def test_csv_complex_tokens(self, tmp_path):
        path = tmp_path / "m.csv"
        path.write_text("1+2i, 3\n0, -1i\n")
        m = read_matrix(path)
        assert np.allclose(m, np.array([[1 + 2j, 3], [0, -1j]]))

    def test_csv_bad_token_reports_position(self, tmp_path):
        path = tmp_path / "bad.csv"
        path.write_text("1, 2\n3, oops\n")
        with pytest.raises(ParseError) as err:
            read_matrix(path)
        assert "line 2" in str(err.value)
        assert "column 2" in str(err.value)

    def test_csv_ragged_rows(self, tmp_path):
        path = tmp_path / "ragged.csv"
        path.write_text("1, 2\n3\n")
        with pytest.raises(ParseError):
            read_matrix(path)


@pytest.fixture
def scalar_files(tmp_path):
    hr = tmp_path / "hr.json"
    he = tmp_path / "he.json"
    write_matrix(hr, np.array([[2.0]]))
    write_matrix(he, np.array([[1.0]]))
    return str(hr), str(he)


@pytest.fixture
def diag_files(tmp_path):
    hr = tmp_path / "hr2.json"
    he = tmp_path / "he2.json"
    write_matrix(hr, np.diag([2.0, 0.5]))
    write_matrix(he, np.eye(2))
    return str(hr), str(he)


class TestCliCapacity:
    def test_scalar_capacity(self, scalar_files, tmp_path, capsys):
        hr, he = scalar_files
        out = str(tmp_path / "out")
        code = main(["capacity", hr, he, "--power", "1",
                     "--emit-covariances", "--out", out])
        assert code == 0
        stdout = capsys.readouterr().out
        assert "capacity_bits 1.32192809" in stdout
        report = json.loads((tmp_path / "out" / "report.json").read_text())
        assert report["results"]["capacity_bits"] == pytest.approx(math.log2(2.5), abs=1e-5)
        assert report["results"]["gap_bits"] <= 1e-5
        assert set(report["tolerances"]) == {"rank_rel", "conv_abs", "psd_margin"}
        assert report["wall_time_s"] > 0
        assert len(report["inputs"]) == 2
        for digest in report["inputs"].values():
            assert len(digest) == 64
        k_bar = read_matrix(tmp_path / "out" / "k_bar.json")
        assert k_bar.shape == (1, 1)

    def test_equal_channels_zero_cap(self, tmp_path, capsys):
        h = tmp_path / "h.json"
        write_matrix(h, np.array([[1.0, 0.5], [0.25, 2.0]]))
        code = main(["capacity", str(h), str(h), "--power", "2", "--json"])
        assert code == 0
        report = json.loads(capsys.readouterr().out)
        assert report["results"]["capacity_bits"] == pytest.approx(0.0, abs=1e-9)
        assert report["results"]["zero_cap"] is True

    def test_malformed_input_fails(self, tmp_path, capsys):
        bad = tmp_path / "bad.json"
        bad.write_text("{nope")
        ok = tmp_path / "he.json"
        write_matrix(ok, np.array([[1.0]]))
        code = main(["capacity", str(bad), str(ok), "--power", "1"])
        assert code == 1
        assert "error" in capsys.readouterr().err

    def test_dimension_mismatch_fails(self, tmp_path, capsys):
        a = tmp_path / "a.json"
        b = tmp_path / "b.json"
        write_matrix(a, np.eye(2))
        write_matrix(b, np.ones((1, 3)))
        code = main(["capacity", str(a), str(b), "--power", "1"])
        assert code == 1
        assert "transmit dimension" in capsys.readouterr().err


class TestCliVerify:
    def test_round_trip_verifies(self, scalar_files, tmp_path, capsys):
        hr, he = scalar_files
        out = str(tmp_path / "sol")
        assert main(["capacity", hr, he, "--power", "1",
                     "--emit-covariances", "--out", out]) == 0
        capsys.readouterr()
        code = main(["verify", hr, he, f"{out}/k_bar.json",
                     f"{out}/phi_bar.json", "--power", "1", "--json"])
        assert code == 0
        report = json.loads(capsys.readouterr().out)
        assert report["results"]["gap_bits"] <= 1e-5


class TestCliGsvd:
    def test_dims_and_factors(self, tmp_path, capsys):
        hr = tmp_path / "hr.json"
        he = tmp_path / "he.json"
        write_matrix(hr, np.eye(2))
        write_matrix(he, np.array([[1.0, 0.0]]))
        out = str(tmp_path / "g")
        code = main(["gsvd", str(hr), str(he), "--check", "--out", out])
        assert code == 0
        stdout = capsys.readouterr().out
        assert "dims k=2 p=1 s=1" in stdout
        for name in ("psi_r", "psi_e", "psi_t", "omega"):
            assert (tmp_path / "g" / f"{name}.json").exists()

    def test_identity_pair_residual(self, tmp_path, capsys):
        h = tmp_path / "i.json"
        write_matrix(h, np.eye(2))
        code = main(["gsvd", str(h), str(h), "--check", "--json"])
        assert code == 0
        report = json.loads(capsys.readouterr().out)
        assert report["results"]["sigma"] == pytest.approx([1.0, 1.0], abs=1e-10)
        assert report["results"]["reconstruction_resid"] <= 1e-12
        assert all(report["results"]["checks"].values())


class TestCliRegimes:
    def test_high_snr(self, diag_files, capsys):
        hr, he = diag_files
        code = main(["high-snr", hr, he, "--power", "1e6", "--json"])
        assert code == 0
        report = json.loads(capsys.readouterr().out)
        assert report["results"]["total_bits"] == pytest.approx(2.0, abs=1e-9)
        assert report["results"]["c0_bits"] == 0.0

    def test_masked(self, diag_files, capsys):
        hr, he = diag_files
        code = main(["masked", hr, he, "--power", "1e6", "--json"])
        assert code == 0
        report = json.loads(capsys.readouterr().out)
        assert report["results"]["masked_rate_bits"] == pytest.approx(0.0, abs=1e-4)
        assert report["results"]["asymptotic_gap_bits"] == pytest.approx(2.0, abs=1e-9)
        assert report["results"]["cross_check_delta_bits"] <= 1e-9

    def test_masked_precondition_exit(self, tmp_path, capsys):
        hr = tmp_path / "hr.json"
        he = tmp_path / "he.json"
        write_matrix(hr, np.ones((3, 2)))   # Nr > Nt
        write_matrix(he, np.eye(2))
        code = main(["masked", str(hr), str(he), "--power", "1"])
        assert code == 1

    def test_masked_sweep_outputs(self, scalar_files, tmp_path, capsys):
        hr, he = scalar_files
        out = str(tmp_path / "sweep")
        code = main(["masked", hr, he, "--power", "1e4", "--sweep",
                     "--sweep-points", "3", "--out", out])
        assert code == 0
        csv = (tmp_path / "sweep" / "masked_sweep.csv").read_text().splitlines()
        assert csv[0] == "power [linear],capacity [bits],masked_rate [bits]"
        assert len(csv) == 4
        assert (tmp_path / "sweep" / "masked_sweep.svg").exists()


class TestCliScaling:
    def test_frontier_csv(self, tmp_path, capsys):
        out = str(tmp_path / "f")
        code = main(["scaling", "frontier", "--points", "100", "--out", out])
        assert code == 0
        lines = (tmp_path / "f" / "frontier.csv").read_text().splitlines()
        assert lines[0] == "beta [Nt/Ne],gamma [Nr/Ne]"
        assert len(lines) == 101
        assert lines[1].split(",") == ["0", "1"]
        assert lines[-1].split(",") == ["0.5", "0"]
        assert (tmp_path / "f" / "frontier.svg").exists()

    def test_allocation(self, tmp_path, capsys):
        out = str(tmp_path / "a")
        code = main(["scaling", "allocation", "--points", "13",
                     "--out", out, "--json"])
        assert code == 0
        report = json.loads(capsys.readouterr().out)
        assert report["results"]["beta_opt"] == pytest.approx(2 / 9, abs=1e-9)
        assert report["results"]["gamma_opt"] == pytest.approx(1 / 9, abs=1e-9)
        assert report["results"]["min_ratio_at_two_thirds"] == pytest.approx(3.0, abs=1e-9)
        assert report["results"]["min_ratio_at_half"] == pytest.approx(
            1.5 + math.sqrt(2), abs=1e-6)
        assert (tmp_path / "a" / "allocation.csv").exists()
        assert (tmp_path / "a" / "allocation.svg").exists()

    def test_mc_deterministic(self, capsys):
        argv = ["scaling", "mc", "--nt", "6", "--nr", "6", "--ne", "24",
                "--trials", "8", "--seed", "7", "--json"]
        assert main(argv) == 0
        first = json.loads(capsys.readouterr().out)["results"]
        assert main(argv) == 0
        second = json.loads(capsys.readouterr().out)["results"]
        assert first == second
        assert first["trials"] == 8 and first["seed"] == 7
