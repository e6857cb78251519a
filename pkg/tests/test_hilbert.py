import math

import numpy as np
import pytest

from fraclps.grid import BanachSpec, GridSpec
from fraclps.hilbert import (
    CutoffPhi,
    LineSample,
    convergence_eps_sequence,
    convergence_probe,
    default_eps_grid,
    hardy_littlewood_maximal,
    hardy_littlewood_maximal_periodic,
    maximal_hilbert,
    read_line_csv,
    smoothed_maximal_hilbert,
    truncated_hilbert,
    write_line_csv,
)

N = 2**13
A = 16.0


def gaussian(n=N, a=A):
    return LineSample.from_function(lambda x: np.exp(-(x**2)), a, n)


def box(n=N, a=A):
    return LineSample.from_function(lambda x: (np.abs(x) <= 1.0).astype(complex), a, n)


class TestCutoff:
    @pytest.mark.parametrize("phi", [CutoffPhi(), CutoffPhi(0.5, 1.5)])
    def test_sandwich_and_monotone(self, phi):
        u = np.linspace(0.0, 3.0, 4001)
        vals = phi(u)
        assert np.all(vals >= (u >= 1.5) - 1e-15)
        assert np.all(vals <= (u >= 0.5) + 1e-15)
        assert np.all(np.diff(vals) >= -1e-15)
        # derivative bounded: quintic smoothstep peaks at 15/8 over the window
        assert np.abs(np.diff(vals)).max() / (u[1] - u[0]) < 1.875 / (phi.hi - phi.lo) + 0.1


class TestTruncatedHilbert:
    def test_even_field_vanishes_at_center(self):
        f = gaussian()
        H = truncated_hilbert(f, 16 * f.step)
        i0 = int(np.argmin(np.abs(f.x)))
        assert abs(complex(H.values[i0, 0])) < 1e-12

    def test_box_log3(self):
        f = box(n=2**14)
        H = truncated_hilbert(f, 4 * f.step)
        i2 = int(np.argmin(np.abs(f.x - 2.0)))
        assert abs(H.values[i2, 0].real - math.log(3.0)) < 5e-3

    def test_linear_and_real_preserving(self):
        f, g = gaussian(), box()
        eps = 8 * f.step
        lhs = truncated_hilbert(LineSample(A, f.banach, 2.0 * f.values + 3.0 * g.values), eps)
        rhs = 2.0 * truncated_hilbert(f, eps).values + 3.0 * truncated_hilbert(g, eps).values
        assert np.abs(lhs.values - rhs).max() < 1e-12
        assert np.abs(truncated_hilbert(f, eps).values.imag).max() < 1e-12

    def test_sub_resolution_eps_rejected(self):
        f = gaussian()
        with pytest.raises(ValueError):
            truncated_hilbert(f, 0.5 * f.step)

    def test_reflection_antisymmetry(self):
        f = gaussian()
        eps = 8 * f.step
        H = truncated_hilbert(f, eps).values[:, 0]
        # reflect the input through the origin on the grid (x -> -x)
        refl = np.zeros_like(f.values)
        refl[1:, 0] = f.values[:0:-1, 0]
        refl[0, 0] = f.values[0, 0]
        Hr = truncated_hilbert(LineSample(A, f.banach, refl), eps).values[:, 0]
        # H[f(-.)](-x) = -H[f](x) away from the window edge
        flipped = np.zeros_like(Hr)
        flipped[1:] = Hr[:0:-1]
        assert np.abs((flipped + H)[N // 4 : 3 * N // 4]).max() < 1e-12

    def test_translation_commutes(self):
        f = gaussian()
        eps = 8 * f.step
        H = truncated_hilbert(f, eps)
        shifted = LineSample(A, f.banach, np.roll(f.values, 50, axis=0))
        Hs = truncated_hilbert(shifted, eps)
        core = slice(200, N - 200)
        assert np.abs(Hs.values[core] - np.roll(H.values, 50, axis=0)[core]).max() < 1e-10


class TestMaximal:
    def test_zero_field(self):
        z = LineSample.from_function(lambda x: np.zeros_like(x, dtype=complex), A, 1024)
        assert maximal_hilbert(z).max() == 0.0

    def test_dominates_single_truncation(self):
        f = box()
        grid = default_eps_grid(f, count=12)
        Hmax = maximal_hilbert(f, grid)
        single = np.abs(truncated_hilbert(f, grid[-1]).values[:, 0])
        assert np.all(Hmax >= single - 1e-14)

    def test_far_field_decay(self):
        f = gaussian()
        Hs = maximal_hilbert(f)
        mass = f.values[:, 0].real.sum() * f.step
        for xv in (8.0, 12.0):
            ix = int(np.argmin(np.abs(f.x - xv)))
            assert Hs[ix] * xv / mass == pytest.approx(1.0, rel=0.05)

    def test_smoothed_equals_plain_off_transition_zone(self):
        # with f vanishing on the annulus eps/2 <= |x - y| <= 3 eps/2 around x,
        # the sharp and smooth cutoffs integrate the same mass
        f = box()
        eps = 1.0
        x_probe = 4.0  # support [-1, 1] is entirely beyond 3 eps/2 from x
        sharp = maximal_hilbert(f, [eps])
        smooth = smoothed_maximal_hilbert(f, CutoffPhi(), [eps])
        ix = int(np.argmin(np.abs(f.x - x_probe)))
        assert abs(sharp[ix] - smooth[ix]) < 1e-12

    def test_comparison_bounded_by_maximal_function(self):
        f = gaussian()
        hs = maximal_hilbert(f)
        hp = smoothed_maximal_hilbert(f)
        m = hardy_littlewood_maximal(
            LineSample(A, BanachSpec.scalar(), np.abs(f.values)))
        ratio = np.abs(hp - hs) / np.maximum(m, 1e-300)
        assert np.isfinite(ratio.max())
        assert ratio.max() < 10.0

    def test_comparison_stable_under_refinement(self, rng):
        # both runs take the sup over the same truncation radii, all in the
        # resolved regime eps >> h where the sharp cutoff's O(h/eps)
        # discretization error stays below the continuum comparison level
        h_coarse = 2 * A / 2**13
        eps_grid = np.exp(np.linspace(np.log(64 * h_coarse), np.log(2 * A), 60))
        worst = 0.0
        for trial in range(4):
            c = rng.uniform(-2, 2)
            w = rng.uniform(0.4, 1.0)

            def fn(x, c=c, w=w):
                return np.exp(-(((x - c) / w) ** 2))

            def ratio(n):
                f = LineSample.from_function(fn, A, n)
                hs = maximal_hilbert(f, eps_grid)
                hp = smoothed_maximal_hilbert(f, eps_grid=eps_grid)
                m = hardy_littlewood_maximal(
                    LineSample(A, BanachSpec.scalar(), np.abs(f.values)))
                return float((np.abs(hp - hs) / np.maximum(m, 1e-300)).max())

            r1, r2 = ratio(2**13), ratio(2**14)
            worst = max(worst, abs(r2 / r1 - 1.0))
        assert worst < 0.10


class TestHardyLittlewood:
    def test_constant_fixed_point(self):
        c = LineSample.from_function(lambda x: np.full_like(x, 3.0), A, 1024)
        m = hardy_littlewood_maximal(c)
        assert np.abs(m - 3.0).max() < 1e-12

    def test_dominates_smooth_input(self):
        f = gaussian(n=2**12)
        m = hardy_littlewood_maximal(LineSample(A, f.banach, np.abs(f.values)))
        h = np.abs(f.values[:, 0])
        assert np.all(m >= h * (1.0 - 1e-4))

    def test_hot_cell_far_field(self):
        n = 2**12
        vals = np.zeros((n, 1), dtype=complex)
        step = 2 * A / n
        vals[n // 2, 0] = 1.0 / step  # unit mass
        hot = LineSample(A, BanachSpec.scalar(), vals)
        m = hardy_littlewood_maximal(hot)
        x = hot.x
        for xv in (1.0, 4.0):
            ix = int(np.argmin(np.abs(x - xv)))
            assert m[ix] * 2 * abs(x[ix]) == pytest.approx(1.0, rel=0.02)

    def test_sublinear(self, rng):
        n = 1024
        v1 = np.abs(rng.standard_normal(n))
        v2 = np.abs(rng.standard_normal(n))
        mk = lambda v: LineSample(A, BanachSpec.scalar(), v[:, None].astype(complex))
        lhs = hardy_littlewood_maximal(mk(v1 + v2))
        rhs = hardy_littlewood_maximal(mk(v1)) + hardy_littlewood_maximal(mk(v2))
        assert np.all(lhs <= rhs + 1e-12)

    def test_rejects_negative(self):
        vals = -np.ones((1024, 1), dtype=complex)
        with pytest.raises(ValueError):
            hardy_littlewood_maximal(LineSample(A, BanachSpec.scalar(), vals))

    def test_periodic_constant(self):
        grid = GridSpec(dim=1, n=256)
        m = hardy_littlewood_maximal_periodic(grid, np.full(256, 2.0))
        assert np.abs(m - 2.0).max() < 1e-12

    def test_periodic_2d_runs(self):
        grid = GridSpec(dim=2, n=16)
        vals = np.zeros((16, 16))
        vals[3, 5] = 1.0
        m = hardy_littlewood_maximal_periodic(grid, vals)
        # smallest Euclidean ball holds the center plus 4 axis neighbours
        assert m.max() == pytest.approx(1.0 / 5.0, rel=1e-10)


class TestConvergence:
    def test_zero_field(self):
        z = LineSample.from_function(lambda x: np.zeros_like(x, dtype=complex), A, 1024)
        rep = convergence_probe(z, convergence_eps_sequence(z))
        assert rep.median_oscillation == 0.0
        assert rep.fraction_below == 1.0

    def test_smooth_field_linear_decay(self):
        f1, f2 = gaussian(n=2**13), gaussian(n=2**14)
        m1 = convergence_probe(f1, convergence_eps_sequence(f1)).median_oscillation
        m2 = convergence_probe(f2, convergence_eps_sequence(f2)).median_oscillation
        assert m1 / m2 == pytest.approx(2.0, rel=0.25)

    def test_vector_valued_mirrors_scalar(self):
        def coords(x):
            return np.stack([np.exp(-(x**2)), 0.5 * np.exp(-((x - 1.0) ** 2))], axis=-1)

        b = BanachSpec.sequence(2, 2.0)
        f1 = LineSample.from_function(coords, A, 2**13, b)
        f2 = LineSample.from_function(coords, A, 2**14, b)
        m1 = convergence_probe(f1, convergence_eps_sequence(f1)).median_oscillation
        m2 = convergence_probe(f2, convergence_eps_sequence(f2)).median_oscillation
        assert m1 / m2 == pytest.approx(2.0, rel=0.3)

    def test_requires_decreasing_eps(self):
        f = gaussian(n=1024)
        with pytest.raises(ValueError):
            convergence_probe(f, [0.1, 0.2])


class TestSerialization:
    def test_round_trip(self, tmp_path):
        b = BanachSpec.sequence(2, 2.0)
        f = LineSample.from_function(
            lambda x: np.stack([np.exp(-(x**2)), np.sin(x) * np.exp(-(x**2))], axis=-1),
            A, 512, b)
        path = tmp_path / "line.csv"
        write_line_csv(f, path)
        back = read_line_csv(path)
        assert back.half_width == pytest.approx(f.half_width)
        assert np.array_equal(back.values, f.values)
