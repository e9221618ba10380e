import numpy as np
import pytest

from prepblock.construct import linked_block, square_lattice
from prepblock.criteria import (
    a2_value,
    a_bound,
    a_eff,
    a_value,
    criteria_report,
    k0,
    k_thresholds,
    lemma1_check,
    mv_bound_a,
    mv_eff,
    mv_thresholds,
    mv_value,
    round_eff,
    round_half_away,
)
from prepblock.enumeration import block_mv
from prepblock.linalg import pinv
from prepblock.model import DesignError, FullDesignSpec, dual, info_C, info_Ctilde
from prepblock.oracle import random_spec
from prepblock.reports import FIXTURES, load_fixture


def r3(x):
    return round_half_away(x, 3)


def fixture_specs():
    """Every bundled fixture at k0 and at k0 + 4."""
    out = []
    for name in FIXTURES:
        d = load_fixture(name)
        for k in (k0(d), k0(d) + 4):
            out.append(pytest.param(FullDesignSpec(d, k), id=f"{name}-k{k}"))
    return out


class TestRounding:
    def test_half_away(self):
        assert round_half_away(0.9525) == 0.953
        assert round_half_away(-0.0005) == -0.001
        assert round_half_away(0.97849) == 0.978

    def test_efficiency_never_rounds_to_one(self):
        assert round_eff(0.99990) == 0.999
        assert round_eff(1.0 - 1e-12) == 1.0
        assert round_eff(0.9584) == 0.958


class TestABound:
    def test_hand_value(self):
        assert a_bound(3, 3, 3) == pytest.approx(32.5)

    def test_needs_single_treatments(self):
        with pytest.raises(DesignError):
            a_bound(3, 3, 2)


class TestAValue:
    def test_bibd_attains_bound(self):
        for k in range(3, 21):
            spec = FullDesignSpec(linked_block(1, 3), k)
            assert a_value(spec)[0] == pytest.approx(a_bound(3, 3, k), rel=1e-12)
            assert r3(a_eff(spec)) == 1.0

    @pytest.mark.parametrize("name,k,target", [
        ("example2a", 5, 0.952), ("example2a", 6, 0.971), ("example2a", 7, 0.978),
        ("example2b", 6, 0.952), ("example2b", 7, 0.974),
        ("example2c", 5, 0.975), ("linked_2_4", 7, 0.986),
    ])
    def test_published_efficiencies(self, name, k, target):
        assert r3(a_eff(FullDesignSpec(load_fixture(name), k))) == target

    def test_example2b_high_k(self):
        d = load_fixture("example2b")
        assert all(a_eff(FullDesignSpec(d, k)) >= 0.98 for k in range(8, 21))

    @pytest.mark.parametrize("spec", fixture_specs())
    def test_parts_sum(self, spec):
        total, uu, ww, uw = a_value(spec)
        assert uu + ww + uw == pytest.approx(total, rel=1e-8)
        assert a_bound(spec.u, spec.b, spec.k) <= total * (1 + 1e-8)

    def test_parts_sum_random(self, rng):
        for _ in range(200):
            spec = random_spec(rng)
            total, uu, ww, uw = a_value(spec)
            assert uu + ww + uw == pytest.approx(total, rel=1e-8)
            assert a_bound(spec.u, spec.b, spec.k) <= total * (1 + 1e-8)

    def test_invalid_spec(self):
        with pytest.raises(DesignError):
            a_value(FullDesignSpec(linked_block(1, 3), 2))


class TestTraceInequalities:
    """The two trace bounds and the S-weighted bound that the A bound is built from."""

    def test_random(self, rng):
        for _ in range(300):
            spec = random_spec(rng)
            u, b, w = spec.u, spec.b, spec.w
            cp, ctp = pinv(info_C(spec)), pinv(info_Ctilde(spec))
            assert np.trace(cp) >= (u - 1) ** 2 / (2 * u - b) - 1e-9
            assert np.trace(ctp) >= (b - 1) ** 2 / u - 1e-9
            assert np.diag(ctp) @ spec.s >= w * (b - 1) ** 2 / (b * u) - 1e-9


class TestKThresholds:
    @pytest.mark.parametrize("name,row", [
        ("example2a", (5, 5, 5, 8)), ("example4a", (7, 7, 7, 9)),
        ("example4b", (6, 6, 6, 10)), ("example4a_r19dual", (7, 7, 7, 8)),
        ("example4b_ls28", (5, 5, 5, 13)),
    ])
    def test_published_rows(self, name, row):
        kk0, ka = k_thresholds(load_fixture(name))
        assert (kk0, ka[0.90], ka[0.95], ka[0.98]) == row

    def test_lattice_six(self):
        kk0, ka = k_thresholds(square_lattice(6))
        assert (kk0, *ka.values()) == (7, 7, 7, 11)

    def test_unattained_is_none(self):
        _, ka = k_thresholds(load_fixture("example2a"), alphas=(0.999,))
        assert ka[0.999] is None

    def test_k0(self):
        assert k0(linked_block(1, 3)) == 3
        assert k0(load_fixture("example2a")) == 5

    def test_scan_definition(self):
        d = load_fixture("example4a")
        kk0, ka = k_thresholds(d, alphas=(0.97,), k_cap=20)
        k = ka[0.97]
        assert all(a_eff(FullDesignSpec(d, j)) >= 0.97 for j in range(k, 21))
        if k > kk0:
            assert a_eff(FullDesignSpec(d, k - 1)) < 0.97

    @pytest.mark.parametrize("name", [n for n in FIXTURES if n != "linked_1_3"])
    def test_monotone_in_k(self, name):
        d = load_fixture(name)
        effs = [a_eff(FullDesignSpec(d, k)) for k in range(k0(d), 21)]
        assert np.all(np.diff(effs) >= -1e-12)


class TestMV:
    def test_smallest_linked(self):
        mv = mv_value(FullDesignSpec(linked_block(1, 3), 3))
        assert mv.total == pytest.approx(2 + 4 / 3)
        assert mv.ww == pytest.approx(mv.total)

    @pytest.mark.parametrize("lam,b", [(1, 3), (1, 5), (2, 4), (3, 3), (1, 6)])
    def test_linked_family(self, lam, b):
        d = linked_block(lam, b)
        for k in range(lam * (b - 1) + 1, lam * (b - 1) + 6):
            mv = mv_value(FullDesignSpec(d, k))
            assert mv.total == pytest.approx(2 + 4 / (lam * b))
            assert mv.ww == pytest.approx(mv.total)
        for k in range(max(lam * b, mv_thresholds(d)[2]), lam * b + 5):
            assert mv_eff(FullDesignSpec(d, k)) == pytest.approx(1.0)

    @pytest.mark.parametrize("name,kstar,target", [
        ("example2a", 6, 0.923), ("example2b", 7, 0.971), ("example4a", 8, 0.968),
        ("example4b", 6, 0.953), ("example4a_r19dual", 8, 0.989), ("example4b_ls28", 5, 0.958),
    ])
    def test_published_efficiencies(self, name, kstar, target):
        d = load_fixture(name)
        assert mv_thresholds(d)[2] == kstar
        for k in range(kstar, kstar + 6):
            assert r3(mv_eff(FullDesignSpec(d, k))) == target

    def test_lattice_six(self):
        d = square_lattice(6)
        k_sharp, _, k_star = mv_thresholds(d)
        assert (k_sharp, k_star) == (7, 7)
        assert r3(mv_eff(FullDesignSpec(d, 7))) == 0.979

    def test_thresholds(self):
        assert mv_thresholds(load_fixture("example2a")) == (6, 22, 6)
        assert mv_thresholds(linked_block(1, 3)) == (3, 5, 3)

    def test_below_threshold(self):
        with pytest.raises(DesignError, match="k\\* = 6"):
            mv_eff(FullDesignSpec(load_fixture("example2a"), 5))
        with pytest.raises(DesignError, match="k\\+"):
            mv_eff(FullDesignSpec(load_fixture("example2a"), 6), mv_min=1.0)

    def test_total_is_max_of_parts(self, rng):
        for _ in range(100):
            spec = random_spec(rng)
            mv = mv_value(spec)
            parts = [x for x in (mv.uu, mv.ww, mv.uw, mv.within_block) if x is not None]
            assert mv.total == max(parts)
            assert mv.populated == tuple(j + 1 for j in np.flatnonzero(spec.s >= 1))

    def test_within_block_constant(self):
        spec = FullDesignSpec(linked_block(1, 4), 6)   # s_j = 3
        assert mv_value(spec).within_block == 2.0

    @pytest.mark.parametrize("name", FIXTURES)
    def test_constant_in_k(self, name):
        d = load_fixture(name)
        vals = [mv_value(FullDesignSpec(d, k)) for k in range(d.k_max + 1, d.k_max + 8)]
        for mv in vals[1:]:
            assert mv.total == pytest.approx(vals[0].total, rel=1e-10)
            assert mv.ww == pytest.approx(vals[0].ww, rel=1e-10)

    @pytest.mark.parametrize("name", FIXTURES)
    def test_dual_identity(self, name):
        d = load_fixture(name)
        spec = FullDesignSpec(d, mv_thresholds(d)[2])
        assert mv_value(spec).ww - 2.0 == pytest.approx(block_mv(dual(d)), rel=1e-9)

    def test_bound_a_dominance(self, rng):
        for _ in range(200):
            spec = random_spec(rng)
            if spec.k >= mv_thresholds(spec)[0]:
                assert mv_bound_a(spec.u, spec.b) <= mv_value(spec).total + 1e-8


class TestA2:
    @pytest.mark.parametrize("lam,b", [(1, 3), (1, 5), (2, 4)])
    def test_linked_is_a2_optimal(self, lam, b):
        d = linked_block(lam, b)
        for k in range(k0(d), k0(d) + 5):
            assert a2_value(FullDesignSpec(d, k))[3] == pytest.approx(1.0)

    def test_example2a_higher_than_a(self):
        spec = FullDesignSpec(load_fixture("example2a"), 10)
        assert a2_value(spec)[3] > a_eff(spec)

    def test_consistency(self, rng):
        for _ in range(100):
            spec = random_spec(rng)
            a_ww, a2_sum, bound, eff = a2_value(spec)
            _, _, ww, uw = a_value(spec)
            assert a_ww == pytest.approx(ww, rel=1e-10)
            assert a2_sum == pytest.approx(ww + uw, rel=1e-8)
            assert bound <= a2_sum * (1 + 1e-8)


class TestTraceInequality:
    def test_equality_for_bibd(self):
        spec = FullDesignSpec(linked_block(1, 3), 3)
        res = lemma1_check(spec, np.diag(spec.s.astype(float)))
        assert res.holds and res.lhs == pytest.approx(res.rhs)
        assert res.diag_holds

    def test_zero(self):
        res = lemma1_check(FullDesignSpec(linked_block(1, 3), 4), np.zeros((3, 3)))
        assert res.lhs == 0.0 and res.rhs == 0.0 and res.holds

    def test_random(self, rng):
        for _ in range(100):
            spec = random_spec(rng)
            g = rng.standard_normal((spec.b, 2))
            for delta in (np.diag(spec.s.astype(float)), np.eye(spec.b), g @ g.T):
                res = lemma1_check(spec, delta)
                assert res.holds
                assert res.diag_holds in (None, True)

    def test_rejects_indefinite(self):
        with pytest.raises(DesignError):
            lemma1_check(FullDesignSpec(linked_block(1, 3), 3), -np.eye(3))


class TestReport:
    def test_fields(self):
        rep = criteria_report(FullDesignSpec(load_fixture("example2a"), 6))
        assert rep.a_total == pytest.approx(rep.a_uu + rep.a_ww + rep.a_uw)
        assert r3(rep.a_eff) == 0.971
        assert r3(rep.mv_eff) == 0.923
        assert rep.mv_bound_b is None
        assert (rep.k0, rep.k_sharp, rep.k_plus, rep.k_star) == (5, 6, 22, 6)
        assert set(rep.to_dict()) >= {"a_total", "mv_total", "a2_eff"}

    def test_mv_eff_absent_below_k_star(self):
        rep = criteria_report(FullDesignSpec(load_fixture("example2a"), 5))
        assert rep.mv_eff is None and rep.mv_bound_a is None

    def test_mv_min_form(self):
        d = linked_block(1, 3)
        rep = criteria_report(FullDesignSpec(d, 5), mv_min=4 / 3)
        assert rep.mv_bound_b == pytest.approx(2 + 4 / 3)
        assert rep.mv_eff == pytest.approx(1.0)
