"""Nash enumeration, best responses, flip conditions, classification."""

from __future__ import annotations

import random

import pytest

from wardgames import (
    Action,
    ActionProfile,
    Classification,
    EffortReduction,
    LinearBenefit,
    Mechanism,
    Observability,
    ResourceLimitError,
    Scenario,
    ScenarioError,
    TableBenefit,
    Ward,
    best_response,
    enumerate_nash,
    flip_conditions,
    is_nash,
    symmetric_scenario,
)
from conftest import random_scenario


def nash_set(report):
    return {(p.mask, strict) for p, strict in report.nash_profiles}


class TestBestResponse:
    def test_buffer_best_against_buffering(self, s0):
        others = (Action.BUFFER,) * 3
        assert best_response(s0, others, 0) == {Action.BUFFER}

    def test_mechanism_flips_best_response(self, s0):
        s = Scenario(s0.wards, s0.benefit, (Mechanism(1.2),))
        others = (Action.BUFFER,) * 3
        assert best_response(s, others, 0) == {Action.EXPOSE}

    def test_exact_tie_returns_both(self):
        s = symmetric_scenario(3, 1.0, 1.0, TableBenefit((0.5, 0.5, 0.5, 0.5)))
        assert best_response(s, (Action.BUFFER, Action.BUFFER), 0) == {
            Action.EXPOSE,
            Action.BUFFER,
        }

    def test_wrong_length_rejected(self, s0):
        with pytest.raises(ScenarioError):
            best_response(s0, (Action.BUFFER,) * 4, 0)


class TestIsNash:
    def test_all_buffer_strict_nash(self, s0):
        ok, violators, strict = is_nash(s0, ActionProfile.all_buffer(4))
        assert ok and strict and violators == frozenset()

    def test_all_expose_not_nash(self, s0):
        ok, violators, strict = is_nash(s0, ActionProfile.all_expose(4))
        assert not ok
        assert violators == frozenset({0, 1, 2, 3})
        assert strict is False

    def test_veto_all_expose_strict_nash(self, v0):
        ok, violators, strict = is_nash(v0, ActionProfile.all_expose(4))
        assert ok and strict and violators == frozenset()

    def test_epsilon_widens_ties(self, s0):
        # margin to deviate from all-Buffer is -0.7; a huge epsilon makes it weak
        ok, _, strict = is_nash(s0, ActionProfile.all_buffer(4), epsilon=0.8)
        assert ok and not strict


class TestEnumerate:
    def test_s0_unique_dominant_buffer(self, s0):
        report = enumerate_nash(s0)
        assert nash_set(report) == {(0b0000, True)}
        assert report.classification is Classification.DOMINANT_BUFFER
        assert report.dominant_strategy == (Action.BUFFER,) * 4
        assert str(report.welfare_optimum[0]) == "EEEE"
        assert report.welfare_optimum[1] == -3.2
        assert report.welfare_gap == (-3.2) - (-4.0)

    def test_v0_bistable(self, v0):
        report = enumerate_nash(v0)
        assert nash_set(report) == {(0b0000, True), (0b1111, True)}
        assert report.classification is Classification.BISTABLE
        assert report.dominant_strategy == (None,) * 4

    def test_mechanism_dominant_expose(self, s0):
        s = Scenario(s0.wards, s0.benefit, (Mechanism(1.2),))
        report = enumerate_nash(s)
        assert nash_set(report) == {(0b1111, True)}
        assert report.classification is Classification.DOMINANT_EXPOSE

    def test_boundary_penalty_all_profiles_weak_nash(self, s0):
        # at pF = 0.7 every ward is exactly indifferent at every profile
        s = Scenario(
            s0.wards, s0.benefit, (Observability(p0=0.5, p_slope=0.0, penalty=1.4),)
        )
        report = enumerate_nash(s)
        masks = {m for m, _ in nash_set(report)}
        assert masks == set(range(16))
        assert all(not strict for _, strict in nash_set(report))
        assert report.classification is Classification.BISTABLE

    def test_matches_is_nash_exhaustively(self):
        rng = random.Random(41)
        for _ in range(25):
            s = random_scenario(rng, max_n=6, with_interventions=True)
            report = enumerate_nash(s, force_brute=True)
            found = {p.mask for p, _ in report.nash_profiles}
            expected = set()
            for mask in range(1 << s.n):
                check = is_nash(s, ActionProfile.from_mask(mask, s.n))
                if check.is_nash:
                    expected.add(mask)
                    if (mask, check.strict) not in nash_set(report):
                        raise AssertionError(
                            f"strictness mismatch at mask {mask} in {s}"
                        )
            assert found == expected

    def test_fast_path_equals_brute_force(self):
        rng = random.Random(43)
        for _ in range(30):
            s = random_scenario(rng, max_n=10, symmetric=True, with_interventions=True)
            fast = enumerate_nash(s)
            brute = enumerate_nash(s, force_brute=True)
            assert nash_set(fast) == nash_set(brute)
            assert fast.classification is brute.classification
            assert fast.welfare_optimum == brute.welfare_optimum
            assert fast.welfare_gap == brute.welfare_gap

    def test_worker_count_does_not_change_result(self):
        rng = random.Random(47)
        s = random_scenario(rng, n=10, symmetric=False)
        reports = [enumerate_nash(s, workers=w) for w in (1, 2, 8)]
        assert nash_set(reports[0]) == nash_set(reports[1]) == nash_set(reports[2])
        assert (
            reports[0].welfare_optimum
            == reports[1].welfare_optimum
            == reports[2].welfare_optimum
        )

    def test_worker_count_from_environment(self, monkeypatch):
        rng = random.Random(49)
        s = random_scenario(rng, n=8, symmetric=True)
        monkeypatch.setenv("WARDGAMES_THREADS", "4")
        env_report = enumerate_nash(s, force_brute=True)
        monkeypatch.delenv("WARDGAMES_THREADS")
        assert nash_set(env_report) == nash_set(enumerate_nash(s, force_brute=True))
        monkeypatch.setenv("WARDGAMES_THREADS", "0")  # 0 = auto
        auto_report = enumerate_nash(s, force_brute=True)
        assert nash_set(auto_report) == nash_set(env_report)

    def test_brute_force_cap_enforced(self):
        wards = tuple(Ward(i, 2.0 + 0.01 * i, 1.0) for i in range(26))
        s = Scenario(wards, LinearBenefit(0.1))
        with pytest.raises(ResourceLimitError):
            enumerate_nash(s, brute_force_cap=24)

    def test_uniform_shift_leaves_report_invariant(self):
        rng = random.Random(53)
        for _ in range(20):
            s = random_scenario(rng, with_interventions=True)
            delta = rng.choice([0.1 * j for j in range(1, 21)])
            shifted = Scenario(
                s.wards, s.benefit, s.interventions + (EffortReduction(delta, delta),)
            )
            a = enumerate_nash(s)
            b = enumerate_nash(shifted)
            assert nash_set(a) == nash_set(b)
            assert a.dominant_strategy == b.dominant_strategy
            assert a.classification is b.classification


class TestFlipConditions:
    def test_baseline_margins(self, s0):
        report = flip_conditions(s0)
        for w in report.wards:
            assert w.baseline_margin == pytest.approx(-0.7)
            assert w.baseline_buffer_best

    def test_observability_boundary_margin_zero(self, s0):
        s = Scenario(
            s0.wards, s0.benefit, (Observability(p0=0.5, p_slope=0.0, penalty=1.4),)
        )
        report = flip_conditions(s)
        for w in report.wards:
            assert w.observability_margin == 0.0
            assert w.observability_buffer_holds

    def test_effort_flip(self, s0):
        s = Scenario(s0.wards, s0.benefit, (EffortReduction(0.9, 0.0),))
        report = flip_conditions(s)
        for w in report.wards:
            assert w.effort_margin == pytest.approx(0.2)
            assert not w.effort_buffer_holds

    def test_per_ward_blocking(self, s0):
        wards = s0.wards[:3] + (Ward(3, 5.0, 1.0),)
        uneven = Scenario(wards, s0.benefit, (Mechanism((1.2, 1.2, 1.2, 5.0)),))
        report = flip_conditions(uneven)
        assert report.blocking_wards == frozenset({3})
        assert not is_nash(uneven, ActionProfile.all_expose(4)).is_nash
        assert report.wards[3].mechanism_margin < -1.0

        broadcast = Scenario(wards, s0.benefit, (Mechanism(1.2),))
        report2 = flip_conditions(broadcast)
        assert report2.blocking_wards == frozenset()
        assert is_nash(broadcast, ActionProfile.all_expose(4)).is_nash

    def test_blocking_iff_all_expose_not_nash(self):
        rng = random.Random(59)
        for _ in range(40):
            s = random_scenario(rng, with_interventions=True)
            report = flip_conditions(s)
            all_e = is_nash(s, ActionProfile.all_expose(s.n))
            assert (report.blocking_wards == frozenset()) == all_e.is_nash

    def test_mechanism_condition_matches_nash_in_linear_family(self):
        # with a linear benefit the margins at both poles coincide, so the
        # per-ward condition agrees with all-Expose membership in the Nash set
        rng = random.Random(61)
        for _ in range(30):
            cb = rng.uniform(0.2, 1.5)
            ce = cb + rng.uniform(0.1, 2.0)
            s = symmetric_scenario(
                rng.randint(2, 8),
                ce,
                cb,
                LinearBenefit(rng.uniform(0.0, 1.0)),
                [Mechanism(rng.uniform(0.0, ce))],
            )
            report = flip_conditions(s)
            holds_all = all(w.mechanism_expose_holds for w in report.wards)
            in_nash = any(
                p.exposer_count == s.n for p, _ in enumerate_nash(s).nash_profiles
            )
            assert holds_all == in_nash
