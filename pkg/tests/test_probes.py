import math

import numpy as np
import pytest

from fraclps.fracderiv import FracOrder
from fraclps.grid import GridSpec, lp_norm
from fraclps.probes import (
    ProbeConfig,
    cotype_ratio,
    lacunary_ladder,
    make_lacunary_field,
    make_ladder_field,
    run_cotype_probe,
    run_type_probe,
    type_ratio,
)
from fraclps.timegrid import default_time_grid


@pytest.fixture
def grid():
    return GridSpec(dim=1, n=1024)


class TestLadder:
    def test_pure_powers_when_room(self):
        assert lacunary_ladder(5, 2, 512) == (2, 4, 8, 16, 32)

    def test_compression_keeps_rungs_distinct(self):
        ladder = lacunary_ladder(64, 2, 4096)
        assert len(set(ladder)) == 64
        assert all(b > a for a, b in zip(ladder, ladder[1:]))
        assert ladder[-1] < 4096

    def test_impossible_ladder_rejected(self):
        with pytest.raises(ValueError):
            lacunary_ladder(64, 2, 64)


class TestLacunaryField:
    def test_single_rung_unit_modulus(self, grid):
        f = make_lacunary_field(grid, 1, 2.0, [1.0], [1.0])
        assert np.abs(f.pointwise_norm() - 1.0).max() < 1e-12

    @pytest.mark.parametrize("r", [1.0, 2.0, 4.0, np.inf])
    def test_two_rungs_norm(self, grid, r):
        f = make_lacunary_field(grid, 2, r, [1.0, 1.0], [1.0, -1.0])
        expect = 2.0 ** (1.0 / r) if not np.isinf(r) else 1.0
        assert np.abs(f.pointwise_norm() - expect).max() < 1e-12

    def test_zero_mean(self, grid):
        from fraclps.grid import e0_project

        f = make_lacunary_field(grid, 3, 2.0, [1.0, 0.5, 2.0], [1.0, 1.0, -1.0])
        assert np.abs(e0_project(f).values).max() < 1e-12

    def test_nyquist_rejected(self, grid):
        with pytest.raises(ValueError):
            make_lacunary_field(grid, 10, 2.0, np.ones(10), np.ones(10))

    def test_duplicate_rungs_rejected(self, grid):
        with pytest.raises(ValueError):
            make_ladder_field(grid, [3, 3], 2.0, [1.0, 1.0], [1.0, 1.0])


class TestRatios:
    def test_scalar_single_mode_cotype_ratio(self, grid):
        f = make_lacunary_field(grid, 1, 2.0, [1.0], [1.0], base_freq=16)
        tg = default_time_grid(16.0, 16.0, 400)
        ratio = cotype_ratio(f, FracOrder.of(1.0), 2.0, 2.0, tg)
        assert ratio == pytest.approx(0.5, rel=1e-6)

    def test_two_mode_pythagorean(self, grid):
        # r = q = 2: per-coordinate masses add, ratio stays 1/2
        f = make_lacunary_field(grid, 2, 2.0, [1.0, 1.0], [1.0, 1.0], base_freq=16)
        tg = default_time_grid(16.0, 32.0, 400)
        ratio = cotype_ratio(f, FracOrder.of(1.0), 2.0, 2.0, tg)
        assert ratio == pytest.approx(0.5, rel=1e-6)

    def test_scaling_invariance(self, grid):
        f = make_lacunary_field(grid, 2, 4.0, [1.0, 0.7], [1.0, -1.0], base_freq=16)
        tg = default_time_grid(16.0, 32.0, 400)
        o = FracOrder.of(1.0)
        r1 = cotype_ratio(f, o, 2.0, 2.0, tg)
        r7 = cotype_ratio(7.0 * f, o, 2.0, 2.0, tg)
        assert r7 == pytest.approx(r1, rel=1e-12)

    def test_type_ratio_single_mode(self, grid):
        f = make_lacunary_field(grid, 1, 2.0, [1.0], [1.0], base_freq=16)
        tg = default_time_grid(16.0, 16.0, 400)
        ratio = type_ratio(f, FracOrder.of(1.0), 2.0, 2.0, tg)
        assert ratio == pytest.approx(2.0, rel=1e-6)

    def test_type_ratio_constant_field(self, grid):
        from fraclps.grid import single_mode_field

        c = single_mode_field(grid, 0, amplitude=2.0)
        tg = default_time_grid(1.0, 1.0, 200)
        ratio = type_ratio(c, FracOrder.of(1.0), 2.0, 2.0, tg)
        assert ratio == pytest.approx(1.0, rel=1e-10)


SMALL = dict(m_list=(2, 4, 8), grid_n=1024, time_count=300, trials=2, alpha=4.0)


class TestProbeRuns:
    def test_deterministic(self):
        cfg = ProbeConfig(r=4.0, q=2.0, **SMALL)
        r1 = run_cotype_probe(cfg)
        r2 = run_cotype_probe(cfg)
        assert r1.rho == r2.rho
        assert r1.growth_exponent == r2.growth_exponent

    def test_rho_nondecreasing(self):
        cfg = ProbeConfig(r=4.0, q=2.0, **SMALL)
        res = run_cotype_probe(cfg)
        assert all(b >= a for a, b in zip(res.rho, res.rho[1:]))

    def test_q_two_dominates_q_four(self):
        res2 = run_cotype_probe(ProbeConfig(r=4.0, q=2.0, **SMALL))
        res4 = run_cotype_probe(ProbeConfig(r=4.0, q=4.0, **SMALL))
        assert all(a >= b for a, b in zip(res2.rho, res4.rho))

    def test_hilbert_valued_flat(self):
        res = run_cotype_probe(ProbeConfig(r=2.0, q=2.0, **SMALL))
        assert res.trend_ratio == pytest.approx(1.0, abs=1e-6)

    def test_type_probe_runs_and_bounded_for_r2(self):
        res = run_type_probe(ProbeConfig(r=2.0, q=2.0, **SMALL))
        assert res.trend_ratio <= 1.2

    def test_type_probe_rejects_large_q(self):
        with pytest.raises(ValueError):
            run_type_probe(ProbeConfig(r=2.0, q=3.0, m_list=(2, 4), grid_n=512))

    def test_csv_round(self, tmp_path):
        cfg = ProbeConfig(r=4.0, q=2.0, **SMALL)
        res = run_cotype_probe(cfg)
        path = tmp_path / "probe.csv"
        res.write_csv(path)
        lines = path.read_text().strip().splitlines()
        assert lines[0] == "m,rho,trials,growth_exponent"
        assert len(lines) == 1 + len(cfg.m_list)

    def test_config_validation(self):
        with pytest.raises(ValueError):
            ProbeConfig(m_list=(4, 2))
        with pytest.raises(ValueError):
            ProbeConfig(trials=0)
