import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fraclps.grid import (
    BanachSpec,
    Field,
    GridSpec,
    Spectrum,
    e0_project,
    field_from_coefficients,
    forward_transform,
    frequency_band,
    inverse_transform,
    lp_norm,
    random_band_limited_field,
    read_field_csv,
    resample,
    single_mode_field,
    write_field_csv,
)

TWO_PI = 2.0 * np.pi


class TestSpecs:
    def test_grid_rejects_bad_n(self):
        with pytest.raises(ValueError):
            GridSpec(dim=1, n=100)
        with pytest.raises(ValueError):
            GridSpec(dim=1, n=4)
        with pytest.raises(ValueError):
            GridSpec(dim=3, n=16)
        with pytest.raises(ValueError):
            GridSpec(dim=1, n=16, period=-1.0)

    def test_banach_rejects_bad_exponent(self):
        with pytest.raises(ValueError):
            BanachSpec.sequence(3, 0.5)
        with pytest.raises(ValueError):
            BanachSpec.sequence(0, 2.0)

    def test_field_rejects_nonfinite(self, grid1, scalar):
        values = np.zeros(grid1.shape + (1,), dtype=complex)
        values[3, 0] = np.nan
        with pytest.raises(ValueError):
            Field(grid1, scalar, values)

    def test_field_values_immutable(self, grid1, scalar):
        f = single_mode_field(grid1, 1)
        with pytest.raises(ValueError):
            f.values[0, 0] = 1.0


class TestTransforms:
    def test_constant_field_spectrum(self, grid1, scalar):
        f = single_mode_field(grid1, 0, amplitude=2.5 + 1j)
        s = forward_transform(f)
        assert s.coefficients[0, 0] == pytest.approx(2.5 + 1j)
        rest = np.abs(s.coefficients).sum() - abs(s.coefficients[0, 0])
        assert rest < 1e-13

    def test_single_exponential_spectrum(self):
        grid = GridSpec(dim=1, n=16)
        f = single_mode_field(grid, 1)
        s = forward_transform(f)
        assert s.coefficients[1, 0] == pytest.approx(1.0, abs=1e-14)
        others = np.delete(s.coefficients[:, 0], 1)
        assert np.abs(others).max() < 1e-14

    def test_matches_direct_dft(self, rng):
        grid = GridSpec(dim=1, n=16)
        f = Field(grid, BanachSpec.scalar(),
                  rng.standard_normal((16, 1)) + 1j * rng.standard_normal((16, 1)))
        s = forward_transform(f)
        x = grid.axis()
        ks = np.fft.fftfreq(16, d=1.0 / 16)
        for idx, k in enumerate(ks):
            direct = (f.values[:, 0] * np.exp(-1j * (TWO_PI * k / grid.period) * x)).sum() / 16
            assert s.coefficients[idx, 0] == pytest.approx(direct, abs=1e-13)

    @pytest.mark.parametrize("dim,n,m,r", [(1, 128, 1, 2.0), (1, 64, 3, 4.0),
                                           (2, 32, 1, 2.0), (2, 16, 2, np.inf)])
    def test_round_trip(self, rng, dim, n, m, r):
        grid = GridSpec(dim=dim, n=n)
        banach = BanachSpec.scalar() if m == 1 else BanachSpec.sequence(m, r)
        for _ in range(25):
            values = rng.standard_normal(grid.shape + (m,)) + 1j * rng.standard_normal(
                grid.shape + (m,))
            f = Field(grid, banach, values)
            back = inverse_transform(forward_transform(f))
            err = np.abs(back.values - f.values).max() / np.abs(f.values).max()
            assert err < 1e-12

    def test_zero_spectrum_gives_zero_field(self, grid1, scalar):
        s = Spectrum(grid1, scalar, np.zeros(grid1.shape + (1,), dtype=complex))
        assert np.all(inverse_transform(s).values == 0)

    def test_parseval(self, rng, grid1, seq42):
        f = random_band_limited_field(grid1, seq42, rng, 1, 30)
        s = forward_transform(f)
        lhs = grid1.period * (np.abs(s.coefficients) ** 2).sum()
        rhs = lp_norm(f, 2.0) ** 2
        assert abs(lhs - rhs) / rhs < 1e-10


class TestNorms:
    def test_constant_l2(self):
        grid = GridSpec(dim=1, n=64)
        f = single_mode_field(grid, 0, amplitude=1.0)
        assert lp_norm(f, 2.0) == pytest.approx(math.sqrt(TWO_PI), rel=1e-13)

    def test_zero_field(self, grid1):
        f = single_mode_field(grid1, 0, amplitude=0.0)
        assert lp_norm(f, 3.0) == 0.0

    @pytest.mark.parametrize("p", [1.0, 2.0, 3.5, np.inf])
    def test_unimodular_field(self, grid1, p):
        f = single_mode_field(grid1, 1)
        expect = TWO_PI ** (1.0 / p) if not np.isinf(p) else 1.0
        assert lp_norm(f, p) == pytest.approx(expect, rel=1e-12)

    def test_rejects_p_below_one(self, grid1):
        f = single_mode_field(grid1, 1)
        with pytest.raises(ValueError):
            lp_norm(f, 0.5)

    def test_homogeneity(self, rng, grid1, seq42):
        f = random_band_limited_field(grid1, seq42, rng, 1, 20)
        c = -2.7 + 1.1j
        for p in (1.0, 2.0, 4.0, np.inf):
            assert lp_norm(c * f, p) == pytest.approx(abs(c) * lp_norm(f, p), rel=1e-13)

    def test_monotone_in_p_probability_measure(self, rng):
        grid = GridSpec(dim=1, n=64, period=1.0)
        f = random_band_limited_field(grid, BanachSpec.scalar(), rng, 1, 10)
        norms = [lp_norm(f, p) for p in (1.0, 2.0, 4.0, 8.0, np.inf)]
        assert all(a <= b * (1 + 1e-12) for a, b in zip(norms, norms[1:]))


class TestProjection:
    def test_constant_is_fixed(self, grid1):
        f = single_mode_field(grid1, 0, amplitude=3.3 - 0.2j)
        p = e0_project(f)
        assert np.abs(p.values - f.values).max() < 1e-14

    def test_pure_mode_projects_to_zero(self, grid1):
        f = single_mode_field(grid1, 1)
        assert np.abs(e0_project(f).values).max() < 1e-14

    def test_mean_extraction(self, grid1, scalar):
        f = field_from_coefficients(grid1, scalar, {0: 3.0, 2: 1.0})
        p = e0_project(f)
        assert np.abs(p.values - 3.0).max() < 1e-12

    def test_idempotent_and_contractive(self, rng, grid1, seq42):
        f = random_band_limited_field(grid1, seq42, rng, 1, 20)
        shifted = Field(grid1, seq42, f.values + 0.7)
        p = e0_project(shifted)
        pp = e0_project(p)
        assert np.abs(pp.values - p.values).max() < 1e-12
        for q in (1.0, 2.0, 4.0, np.inf):
            assert lp_norm(p, q) <= lp_norm(shifted, q) * (1 + 1e-12)


@st.composite
def complex_vectors(draw):
    m = draw(st.integers(min_value=1, max_value=6))
    elems = st.floats(min_value=-1e6, max_value=1e6, allow_nan=False)
    re1 = draw(st.lists(elems, min_size=m, max_size=m))
    im1 = draw(st.lists(elems, min_size=m, max_size=m))
    re2 = draw(st.lists(elems, min_size=m, max_size=m))
    im2 = draw(st.lists(elems, min_size=m, max_size=m))
    r = draw(st.sampled_from([1.0, 1.5, 2.0, 3.0, np.inf]))
    u = np.array(re1) + 1j * np.array(im1)
    v = np.array(re2) + 1j * np.array(im2)
    return u, v, r


class TestBanachNormProperties:
    @given(complex_vectors())
    @settings(max_examples=200, deadline=None)
    def test_triangle_and_homogeneity(self, data):
        u, v, r = data
        spec = BanachSpec.sequence(u.size, r) if u.size > 1 else BanachSpec.scalar()
        nu = float(spec.norm(u[None, :])[0])
        nv = float(spec.norm(v[None, :])[0])
        nsum = float(spec.norm((u + v)[None, :])[0])
        assert nsum <= nu + nv + 1e-9 * (1 + nu + nv)
        c = 3.25 - 1.5j
        scaled = float(spec.norm((c * u)[None, :])[0])
        assert scaled == pytest.approx(abs(c) * nu, rel=1e-12, abs=1e-9)


class TestSerialization:
    def test_round_trip_exact(self, tmp_path, rng, grid1, seq42):
        f = random_band_limited_field(grid1, seq42, rng, 1, 20)
        path = tmp_path / "field.csv"
        write_field_csv(f, path)
        back = read_field_csv(path, banach=seq42)
        assert back.grid == f.grid
        assert np.array_equal(back.values, f.values)

    def test_round_trip_2d(self, tmp_path, rng, grid2, scalar):
        f = random_band_limited_field(grid2, scalar, rng, 1, 6)
        path = tmp_path / "field2.csv"
        write_field_csv(f, path)
        back = read_field_csv(path)
        assert back.grid == f.grid
        assert np.array_equal(back.values, f.values)

    def test_malformed_row_reports_line(self, tmp_path):
        path = tmp_path / "bad.csv"
        lines = ["x,re_0,im_0"] + [f"{i},1,0" for i in range(8)]
        lines[4] = "3,break"
        path.write_text("\n".join(lines) + "\n")
        from fraclps.errors import InputError

        with pytest.raises(InputError, match="line 5"):
            read_field_csv(path)


class TestHelpers:
    def test_frequency_band(self, grid1, scalar):
        f = field_from_coefficients(grid1, scalar, {3: 1.0, 7: 0.5, -3: 0.2})
        lo, hi = frequency_band(f)
        assert lo == pytest.approx(3.0)
        assert hi == pytest.approx(7.0)

    def test_resample_matches_on_common_points(self, rng, grid1, scalar):
        f = random_band_limited_field(grid1, scalar, rng, 1, 30)
        fine = resample(f, GridSpec(dim=1, n=512))
        assert np.abs(fine.values[::4] - f.values).max() < 1e-12

    def test_nyquist_rejected(self, grid1):
        with pytest.raises(ValueError):
            single_mode_field(grid1, grid1.n // 2)
