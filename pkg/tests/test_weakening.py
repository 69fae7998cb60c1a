"""Parameterized weakening: slots, instantiation, duality, and monotonicity."""

import itertools
import random

import pytest

from weakres import (EmptyIntervalError, Interval, Not, Polarity, Pred,
                     Signal, Theta, ThetaBoundsError, degree_of_weakening,
                     instantiate, is_plain, minimal_requirement, parse_stl,
                     parse_weakstl, robustness, satisfied, theta_slots,
                     to_text, weak_satisfied, weaken_param_count)
from gen import random_signal, random_weak_formula

ALT = Signal(("alt",), ((6.0,), (3.0,), (5.5,)))


def theta(phi, *values):
    return Theta.of(phi, values)


class TestParameterSlots:
    def test_annotated_window_with_plain_child(self):
        phi = parse_weakstl("G[0,2]{0,2}(alt - 5 > 0)")
        assert weaken_param_count(phi) == 2

    def test_pred_slack_is_one(self):
        assert weaken_param_count(parse_weakstl("(alt - 5 > 0){3}")) == 1

    def test_plain_formula_has_none(self):
        assert weaken_param_count(parse_stl("G[0,2](alt - 5 > 0)")) == 0

    def test_connectives_concatenate_in_preorder(self):
        phi = parse_weakstl("(a > 0){1} & G[0,2]{1,0}((b > 0){2})")
        slots = theta_slots(phi)
        assert [s.kind for s in slots] == ["slack", "window_lo", "window_hi", "slack"]
        assert [s.bound for s in slots] == [1, 1, 0, 2]

    def test_until_children_counted(self):
        phi = parse_weakstl("(a > 0){1} U[0,1] (b > 0){2}")
        assert weaken_param_count(phi) == 2


class TestInstantiate:
    def test_window_shrink_on_weaken(self):
        phi = parse_weakstl("G[0,2]{0,2}(alt - 5 > 0)")
        out = instantiate(phi, theta(phi, 0, 2))
        assert out == parse_stl("G[0,0](alt - 5 > 0)")

    def test_zero_theta_strips_annotations(self):
        phi = parse_weakstl("G[0,2]{0,2}((alt - 5 > 0){3})")
        out = instantiate(phi, Theta.zeros(phi))
        assert out == parse_stl("G[0,2](alt - 5 > 0)")
        assert is_plain(out)

    def test_pred_slack_shifts_constant(self):
        phi = parse_weakstl("(alt - 5 > 0){3}")
        out = instantiate(phi, theta(phi, 3))
        assert out == parse_stl("alt - 2 > 0")

    def test_negated_pred_weakens_by_strengthening_child(self):
        """Weakening under a negation lowers the inner trigger threshold."""
        phi = Not(parse_weakstl("(40 - battery > 0){20}"))
        out = instantiate(phi, theta(phi, 20))
        assert out == Not(parse_stl("40 - battery - 20 > 0"))

    def test_eventually_grows_on_weaken_with_clamp(self):
        phi = parse_weakstl("F[1,2]{2,1}(a > 0)")
        out = instantiate(phi, theta(phi, 2, 1))
        assert out.interval == Interval(0, 3)

    def test_strengthen_is_the_dual(self):
        pred = parse_weakstl("(alt - 5 > 0){3}")
        strong = instantiate(pred, theta(pred, 3), Polarity.STRENGTHEN)
        assert strong == parse_stl("alt - 8 > 0")

        box = parse_weakstl("G[1,3]{1,1}(a > 0)")
        strong = instantiate(box, theta(box, 1, 1), Polarity.STRENGTHEN)
        assert strong.interval == Interval(0, 4)

    def test_strengthened_eventually_can_empty(self):
        phi = parse_weakstl("F[0,2]{1,2}(a > 0)")
        with pytest.raises(EmptyIntervalError):
            instantiate(phi, theta(phi, 1, 2), Polarity.STRENGTHEN)

    def test_double_negation_weakens_normally(self):
        phi = Not(Not(parse_weakstl("(alt - 5 > 0){3}")))
        out = instantiate(phi, theta(phi, 3))
        assert out == Not(Not(parse_stl("alt - 2 > 0")))

    def test_arity_mismatch_rejected(self):
        phi = parse_weakstl("(alt - 5 > 0){3}")
        with pytest.raises(ThetaBoundsError):
            instantiate(phi, Theta((1, 1), (3, 3)))

    def test_out_of_bounds_rejected(self):
        with pytest.raises(ThetaBoundsError):
            Theta((4,), (3,))

    def test_scale_converts_units(self):
        phi = Pred(parse_stl("alt - 5 > 0").expr, slack_bound=2, slack_scale=0.5)
        out = instantiate(phi, theta(phi, 2))
        assert out == parse_stl("alt - 4 > 0")


class TestMinimalRequirement:
    def test_threshold_example(self):
        phi = parse_weakstl("(alt - 5 > 0){3}")
        assert minimal_requirement(phi) == parse_stl("alt - 2 > 0")

    def test_landing_antecedent_example(self):
        """Weakening an implication's antecedent lowers its trigger level."""
        phi = parse_weakstl("G[0,1]((battery < 40){20} -> F[0,1](is_landing >= 1))")
        minimal = minimal_requirement(phi)
        expected = parse_stl("G[0,1]((battery < 40 - 20) -> F[0,1](is_landing >= 1))")
        assert minimal == expected

    def test_minimal_dominates_every_member(self):
        rng = random.Random(31337)
        checked = 0
        for _ in range(150):
            phi = random_weak_formula(rng, depth=2)
            bounds = tuple(s.bound for s in theta_slots(phi))
            if not bounds or any(b > 2 for b in bounds):
                continue
            signal = random_signal(rng, n_steps=9)
            minimal = minimal_requirement(phi)
            for values in itertools.product(*(range(b + 1) for b in bounds)):
                member = instantiate(phi, Theta(tuple(values), bounds))
                assert (robustness(minimal, signal, 0)
                        >= robustness(member, signal, 0) - 1e-12)
                checked += 1
        assert checked > 100


class TestDegreeOfWeakening:
    def test_window_shrink_gain(self):
        """Dropping the dip at step 1 lifts the score from -2 to +1."""
        phi = parse_weakstl("G[0,2]{0,2}(alt - 5 > 0)")
        th = theta(phi, 0, 2)
        weakened = instantiate(phi, th)
        assert robustness(weakened, ALT, 0) == 1.0
        assert degree_of_weakening(phi, th, ALT, 0) == 3.0

    def test_zero_theta_gives_zero_degree(self):
        phi = parse_weakstl("(alt - 5 > 0){3}")
        assert degree_of_weakening(phi, Theta.zeros(phi), ALT, 0) == 0.0

    def test_degree_never_negative(self):
        rng = random.Random(2024)
        checked = 0
        for _ in range(200):
            phi = random_weak_formula(rng, depth=2)
            bounds = tuple(s.bound for s in theta_slots(phi))
            if not bounds:
                continue
            signal = random_signal(rng, n_steps=9)
            values = tuple(rng.randint(0, b) for b in bounds)
            d = degree_of_weakening(phi, Theta(values, bounds), signal, 0)
            assert d >= -1e-12
            checked += 1
        assert checked > 120


class TestMonotonicity:
    def test_componentwise_increase_never_hurts(self):
        rng = random.Random(808)
        checked = 0
        for _ in range(400):
            phi = random_weak_formula(rng, depth=2)
            bounds = tuple(s.bound for s in theta_slots(phi))
            if not bounds:
                continue
            signal = random_signal(rng, n_steps=9)
            base = tuple(rng.randint(0, b) for b in bounds)
            rho_base = robustness(instantiate(phi, Theta(base, bounds)), signal, 0)
            for i, b in enumerate(bounds):
                if base[i] >= b:
                    continue
                bumped = base[:i] + (base[i] + 1,) + base[i + 1:]
                rho_bumped = robustness(instantiate(phi, Theta(bumped, bounds)), signal, 0)
                assert rho_bumped >= rho_base - 1e-12, (phi, base, i)
                checked += 1
        assert checked > 150


class TestWeakSatisfiability:
    def test_matches_enumeration(self):
        """Holds iff some in-bounds theta satisfies; checked by brute force."""
        rng = random.Random(60606)
        checked = 0
        for _ in range(120):
            phi = random_weak_formula(rng, depth=2)
            bounds = tuple(s.bound for s in theta_slots(phi))
            if any(b > 2 for b in bounds):
                continue
            signal = random_signal(rng, n_steps=9)
            combos = itertools.product(*(range(b + 1) for b in bounds))
            want = any(
                satisfied(instantiate(phi, Theta(tuple(v), bounds)), signal, 0)
                for v in combos)
            assert weak_satisfied(phi, signal, 0) == want
            checked += 1
        assert checked > 80


def test_round_trip_of_instantiated_formulas():
    rng = random.Random(5050)
    from weakres import parse_stl as parse_plain
    for _ in range(100):
        phi = random_weak_formula(rng, depth=2)
        bounds = tuple(s.bound for s in theta_slots(phi))
        values = tuple(rng.randint(0, b) for b in bounds)
        out = instantiate(phi, Theta(values, bounds))
        assert parse_plain(to_text(out)) == out
