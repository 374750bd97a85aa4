import io

import numpy as np
import pytest
from scipy.stats import qmc

from antsweep.sampling import (
    DimSpec,
    ParameterSpace,
    ParameterTuple,
    SobolGenerator,
    default_space,
    read_tuples_csv,
    saltelli_sample,
    scale_unit,
    sobol_points,
    write_tuples_csv,
)


class TestSobol:
    def test_first_points_2d(self):
        pts = sobol_points(2, 4)
        # zero point skipped: the sequence opens at the cube midpoint
        assert pts[0].tolist() == [0.5, 0.5]
        assert pts[1].tolist() == [0.75, 0.25]
        assert pts[2].tolist() == [0.25, 0.75]
        assert pts[3].tolist() == [0.375, 0.375]

    @pytest.mark.parametrize("dims", [1, 2, 3, 4, 5, 6, 7, 8])
    def test_matches_reference_generator(self, dims):
        eng = qmc.Sobol(d=dims, scramble=False, bits=32)
        eng.fast_forward(1)
        ref = eng.random(256)
        assert np.array_equal(sobol_points(dims, 256), ref)

    def test_incremental_draws_match_bulk(self):
        gen = SobolGenerator(4)
        a = np.vstack([gen.next_points(3), gen.next_points(5)])
        assert np.array_equal(a, sobol_points(4, 8))

    def test_balance_property(self):
        # each dimension of the first 2^k points (plus the skipped zero)
        # hits every dyadic interval once
        pts = sobol_points(3, 15)
        for dim in range(3):
            col = np.sort(np.concatenate([[0.0], pts[:, dim]]))
            assert np.array_equal(col * 16, np.arange(16))

    def test_range_and_dims_validation(self):
        pts = sobol_points(8, 100)
        assert ((pts >= 0.0) & (pts < 1.0)).all()
        with pytest.raises(ValueError):
            sobol_points(9, 1)
        with pytest.raises(ValueError):
            sobol_points(0, 1)


class TestScaling:
    def test_real_affine(self):
        dim = DimSpec("alpha", 0.5, 2.0)
        assert scale_unit(0.0, dim) == 0.5
        assert scale_unit(0.5, dim) == 1.25
        assert abs(scale_unit(0.999, dim) - (0.5 + 0.999 * 1.5)) < 1e-15

    def test_integer_rounds_half_away_and_clamps(self):
        dim = DimSpec("ants", 50, 250, kind="integer")
        assert scale_unit(0.0, dim) == 50
        assert scale_unit(0.5, dim) == 150
        # 50 + 0.0025 * 200 = 50.5 -> rounds away from zero to 51
        assert scale_unit(0.0025, dim) == 51
        assert scale_unit(0.9999999, dim) == 250
        assert isinstance(scale_unit(0.3, dim), int)

    def test_rejects_out_of_cube(self):
        dim = DimSpec("x", 0.0, 1.0)
        with pytest.raises(ValueError):
            scale_unit(1.0, dim)
        with pytest.raises(ValueError):
            scale_unit(-0.1, dim)


class TestSpaceValidation:
    def test_default_space(self):
        sp = default_space()
        assert sp.dimension == 4
        assert [d.name for d in sp.dims] == ["alpha", "beta", "rho", "ants"]

    def test_rho_bounds(self):
        with pytest.raises(ValueError):
            ParameterSpace(
                alpha=DimSpec("alpha", 0.5, 2.0),
                beta=DimSpec("beta", 1.0, 5.0),
                rho=DimSpec("rho", 0.1, 1.0),
                ants=DimSpec("ants", 50, 250, kind="integer"),
            )

    def test_positive_alpha(self):
        with pytest.raises(ValueError):
            ParameterSpace(
                alpha=DimSpec("alpha", 0.0, 2.0),
                beta=DimSpec("beta", 1.0, 5.0),
                rho=DimSpec("rho", 0.1, 0.9),
                ants=DimSpec("ants", 50, 250, kind="integer"),
            )


class TestSaltelli:
    def test_count_law(self):
        # N * (D + 2) tuples for D = 4
        for n_base in (1, 2, 8, 16):
            if n_base & (n_base - 1):
                continue
            assert len(saltelli_sample(default_space(), n_base)) == n_base * 6

    def test_indices_are_emission_order(self):
        tuples = saltelli_sample(default_space(), 8)
        assert [t.index for t in tuples] == list(range(48))

    def test_values_within_ranges(self):
        sp = default_space()
        for t in saltelli_sample(sp, 8):
            assert sp.alpha.low < t.alpha < sp.alpha.high
            assert sp.beta.low < t.beta < sp.beta.high
            assert sp.rho.low < t.rho < sp.rho.high
            assert sp.ants.low <= t.ants <= sp.ants.high
            assert isinstance(t.ants, int)

    def test_block_structure(self):
        """Within one base-row block the D middle rows each replace exactly
        one column of the A row with the B row's value."""
        sp = default_space()
        tuples = saltelli_sample(sp, 8)
        fields = ("alpha", "beta", "rho", "ants")
        for j in range(8):
            block = tuples[6 * j : 6 * (j + 1)]
            a_row, b_row = block[0], block[5]
            for i, cross in enumerate(block[1:5]):
                for f_idx, f in enumerate(fields):
                    expected = getattr(b_row if f_idx == i else a_row, f)
                    assert getattr(cross, f) == expected, (j, i, f)

    def test_base_matrices_come_from_one_8d_sequence(self):
        sp = default_space()
        tuples = saltelli_sample(sp, 4)
        base = sobol_points(8, 4)
        dims = sp.dims
        for j in range(4):
            a_vals = [scale_unit(float(base[j, i]), dims[i]) for i in range(4)]
            b_vals = [scale_unit(float(base[j, 4 + i]), dims[i]) for i in range(4)]
            got_a = tuples[6 * j]
            got_b = tuples[6 * j + 5]
            assert [got_a.alpha, got_a.beta, got_a.rho, got_a.ants] == a_vals
            assert [got_b.alpha, got_b.beta, got_b.rho, got_b.ants] == b_vals

    def test_non_power_of_two_warns(self):
        with pytest.warns(UserWarning, match="power of two"):
            saltelli_sample(default_space(), 3)
        with pytest.raises(ValueError):
            saltelli_sample(default_space(), 3, strict=True)


class TestTuplesCsv:
    def test_roundtrip_exact(self):
        tuples = saltelli_sample(default_space(), 8)
        buf = io.StringIO()
        write_tuples_csv(tuples, buf)
        again = read_tuples_csv(io.StringIO(buf.getvalue()))
        assert again == tuples  # float fields survive via repr

    def test_header_and_integer_ants(self):
        buf = io.StringIO()
        write_tuples_csv([ParameterTuple(0, 1.0, 2.0, 0.5, 100)], buf)
        lines = buf.getvalue().splitlines()
        assert lines[0] == "index,alpha,beta,rho,ants"
        assert lines[1].endswith(",100")  # no decimal point on the count

    def test_rejects_bad_header(self):
        with pytest.raises(ValueError, match="header"):
            read_tuples_csv(io.StringIO("a,b,c\n"))

    def test_rejects_duplicate_indices(self):
        text = "index,alpha,beta,rho,ants\n0,1.0,2.0,0.5,100\n0,1.1,2.0,0.5,100\n"
        with pytest.raises(ValueError, match="duplicate"):
            read_tuples_csv(io.StringIO(text))

    def test_rejects_non_numeric(self):
        text = "index,alpha,beta,rho,ants\n0,xyz,2.0,0.5,100\n"
        with pytest.raises(ValueError, match="non-numeric"):
            read_tuples_csv(io.StringIO(text))

    def test_file_roundtrip(self, tmp_path):
        tuples = saltelli_sample(default_space(), 2)
        path = tmp_path / "tuples.csv"
        write_tuples_csv(tuples, path)
        assert read_tuples_csv(path) == tuples
