import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from cetk.cbba import CBBA, commitments, random_cbba, validate
from cetk.errors import FrameMismatch, FrameTooLarge, InvalidSpeed, NonProductFocal, TotalConflict
from cetk.frame import Frame, popcount, product_frame, rectangle
from cetk.transforms import (
    FusionState,
    combine,
    cpbt,
    cpbt_iterate,
    exp_negation,
    fcbba,
    joint,
    joint_fcbba,
    negate_iter,
)

X = Frame(("x1", "x2"))
Y = Frame(("y1", "y2"))
TWO_STATE = CBBA(X, {"x1": 0.1 - 0.1j, ("x1", "x2"): 0.9 + 0.1j})
MX = CBBA(X, {"x1": 0.2 + 0.1j, "x2": 0.5 + 0.1j, ("x1", "x2"): 0.3 - 0.2j})
MY = CBBA(Y, {"y1": 0.3 + 0.2j, "y2": 0.2 + 0.1j, ("y1", "y2"): 0.5 - 0.3j})


def close(a, b, tol=1e-12):
    return abs(complex(a) - complex(b)) < tol


def brute_fcbba(c):
    """Sum over every focal superset, written straight from the definition."""
    out = {}
    for a in range(1, c.frame.full + 1):
        out[a] = sum((z / (2 ** popcount(b) - 1) for b, z in c.items() if b & a == a), 0j)
    return out


def brute_combine(*cbbas):
    """Multi-way conjunctive sum over every tuple of focal sets."""
    frame = cbbas[0].frame
    acc, conflict = {}, 0j
    for combo in itertools.product(*(c.items() for c in cbbas)):
        meet = frame.full
        prod = 1 + 0j
        for bits, z in combo:
            meet &= bits
            prod *= z
        if meet:
            acc[meet] = acc.get(meet, 0j) + prod
        else:
            conflict += prod
    return {k: v / (1 - conflict) for k, v in acc.items()}


class TestCPBT:
    def test_hand_example(self):
        out = cpbt(TWO_STATE)
        assert close(out["x1"], 0.55 - 0.05j)
        assert close(out["x2"], 0.45 + 0.05j)

    def test_bayesian_identity(self):
        c = CBBA(Frame.of_size(3), {1: 0.2, 2: 0.3 + 0.1j, 4: 0.5 - 0.1j})
        assert list(cpbt(c).values()) == [0.2, 0.3 + 0.1j, 0.5 - 0.1j]

    def test_uniform(self):
        frame = Frame.of_size(3)
        out = cpbt(CBBA(frame, {frame.full: 1}))
        assert all(close(v, 1 / 3) for v in out.values())

    @given(st.integers(0, 2 ** 32 - 1), st.integers(1, 5))
    def test_conserves_mass(self, seed, n):
        c = random_cbba(Frame.of_size(n), seed, "complex-general")
        assert abs(sum(cpbt(c).values()) - 1) < 1e-9


class TestCPBTIterate:
    def test_step_zero_identity(self):
        assert cpbt_iterate(TWO_STATE, 3, 0) == [TWO_STATE]

    def test_bayesian_fixed_point(self):
        c = CBBA(X, {"x1": 0.4, "x2": 0.6})
        assert all(s == c for s in cpbt_iterate(c, 3, 5))

    def test_recursion_two_elements(self):
        states = cpbt_iterate(TWO_STATE, 4, 3)
        prev = TWO_STATE
        for s in states[1:]:
            theta = prev[("x1", "x2")]
            assert close(s["x1"], prev["x1"] + theta / 4)
            assert close(s["x2"], prev["x2"] + theta / 4)
            assert close(s[("x1", "x2")], theta * (1 - 2 / 4))
            prev = s

    def test_invalid_speed(self):
        with pytest.raises(InvalidSpeed):
            cpbt_iterate(TWO_STATE, 2, 1)

    def test_geometric_limit(self):
        # the pair mass decays as (1 - 2/p)^t, so the singletons approach M(x) + M(pair)/2
        last = cpbt_iterate(TWO_STATE, 3, 50)[-1]
        assert close(last["x1"], 0.55 - 0.05j, 1e-9)
        assert close(last["x2"], 0.45 + 0.05j, 1e-9)

    @settings(max_examples=50)
    @given(st.integers(0, 2 ** 32 - 1), st.sampled_from([3, 5, 10]))
    def test_limit_matches_cpbt(self, seed, p):
        frame = Frame.of_size(3)
        rng = np.random.default_rng(seed)
        keys = [b for b in range(1, 8) if popcount(b) <= 2]
        re = rng.dirichlet(np.ones(len(keys)))
        c = CBBA(frame, dict(zip(keys, re)))
        states = cpbt_iterate(c, p, 200)
        for s in states:
            assert abs(s.total() - 1) < 1e-9
        com = commitments(states[-1])
        pig = cpbt(c)
        total = sum(abs(z) for z in pig.values())
        for i, label in enumerate(frame.labels):
            assert abs(com.get(1 << i, 0.0) - abs(pig[label]) / total) < 1e-6


class TestFCBBA:
    def test_hand_example(self):
        mf = fcbba(MX)
        assert close(mf["x1"], 0.3 + 0.1j / 3)
        assert close(mf["x2"], 0.6 + 0.1j / 3)
        assert close(mf[("x1", "x2")], 0.1 - 0.2j / 3)

    def test_theta_split(self):
        mf = fcbba(CBBA(X, {X.full: 1}))
        assert all(close(v, 1 / 3) for v in mf.masses.values())
        assert len(mf.masses) == 3

    def test_bayesian_identity(self):
        c = CBBA(X, {"x1": 0.3 + 0.2j, "x2": 0.7 - 0.2j})
        assert dict(fcbba(c).masses) == dict(c.masses)

    @given(st.integers(0, 2 ** 32 - 1), st.integers(1, 5))
    def test_matches_brute_force(self, seed, n):
        c = random_cbba(Frame.of_size(n), seed, "complex-general")
        mf = fcbba(c)
        assert abs(mf.total() - 1) < 1e-9
        for a, z in brute_fcbba(c).items():
            assert close(mf[a], z)

    @given(st.integers(0, 2 ** 32 - 1))
    def test_real_stays_real(self, seed):
        mf = fcbba(random_cbba(Frame.of_size(4), seed, "real-general"))
        assert all(z.imag == 0 for z in mf.masses.values())


class TestExpNegation:
    def test_symmetric(self):
        out = exp_negation(CBBA(X, {"x1": 0.4, "x2": 0.4, X.full: 0.2}))
        assert close(out["x1"], out["x2"])

    def test_hand_example(self):
        # M(x1) = 1: B over {∅, {x1}, {x2}} with masses (0, 1, 0)
        out = exp_negation(CBBA(X, {"x1": 1}))
        raw = {1: 1 + 1 + 1, 2: 1 + math.exp(-1) + 1, 3: 2 + math.exp(-1)}
        total = sum(raw.values())
        for a, v in raw.items():
            assert close(out[a], v / total)

    def test_exclude_empty(self):
        out = exp_negation(CBBA(X, {"x1": 1}), include_empty=False)
        raw = {1: 2, 2: math.exp(-1) + 1, 3: 1 + math.exp(-1)}
        total = sum(raw.values())
        for a, v in raw.items():
            assert close(out[a], v / total)

    @given(st.integers(0, 2 ** 32 - 1), st.integers(1, 4), st.booleans())
    def test_sums_to_one(self, seed, n, include_empty):
        out = exp_negation(random_cbba(Frame.of_size(n), seed, "complex-general"), include_empty)
        assert abs(out.total() - 1) < 1e-9

    def test_iterate_length(self):
        assert len(negate_iter(TWO_STATE, 4)) == 5


class TestCombine:
    def test_identity(self):
        a = CBBA(X, {"x1": 1})
        out, k = combine(a, a)
        assert out == a and k == 0

    def test_total_conflict(self):
        with pytest.raises(TotalConflict):
            combine(CBBA(X, {"x1": 1}), CBBA(X, {"x2": 1}))

    def test_frame_mismatch(self):
        with pytest.raises(FrameMismatch):
            combine(MX, MY)

    def test_vacuous_is_neutral(self):
        out, k = combine(MX, CBBA(X, {X.full: 1}))
        assert k == 0
        for b, z in MX.items():
            assert close(out[b], z)

    @given(st.integers(0, 2 ** 32 - 1), st.integers(0, 2 ** 32 - 1))
    def test_commutative(self, s1, s2):
        frame = Frame.of_size(3)
        a = random_cbba(frame, s1, "complex-general")
        b = random_cbba(frame, s2, "complex-general")
        try:
            ab, kab = combine(a, b)
        except TotalConflict:
            with pytest.raises(TotalConflict):
                combine(b, a)
            return
        ba, kba = combine(b, a)
        assert close(kab, kba)
        for key in set(ab.masses) | set(ba.masses):
            assert close(ab[key], ba[key])

    @settings(max_examples=50)
    @given(st.integers(0, 2 ** 32 - 1))
    def test_associative_against_brute_force(self, seed):
        frame = Frame.of_size(3)
        rng = np.random.default_rng(seed)
        a, b, c = (random_cbba(frame, rng, "complex-general") for _ in range(3))
        try:
            left = combine(combine(a, b)[0], c)[0]
            right = combine(a, combine(b, c)[0])[0]
        except TotalConflict:
            return
        oracle = brute_combine(a, b, c)
        for key in range(1, frame.full + 1):
            assert abs(left[key] - right[key]) < 1e-9
            assert abs(left[key] - oracle.get(key, 0j)) < 1e-9

    def test_fusion_state(self):
        s = FusionState(MX).fold(MX, "second")
        assert s.history[0][:2] == (1, "second")
        assert s.current == combine(MX, MX)[0]


class TestJoint:
    def test_products(self):
        j = joint(MX, MY)
        assert len(j.masses) == 9
        for bx, zx in MX.items():
            for by, zy in MY.items():
                assert j[rectangle(j.frame, bx, by)] == zx * zy
        assert abs(j.total() - 1) < 1e-12

    def test_bayesian(self):
        j = joint(CBBA(X, {"x1": 0.5, "x2": 0.5}), CBBA(Y, {"y1": 0.3, "y2": 0.7}))
        assert all(popcount(b) == 1 for b in j.masses)

    def test_one_element_factor(self):
        one = Frame(("y1",))
        j = joint(MX, CBBA(one, {"y1": 1}))
        assert list(j.masses.values()) == list(MX.masses.values())
        assert [m.real for m in fcbba(j).masses.values()] == [m.real for m in fcbba(MX).masses.values()]

    def test_too_large(self):
        with pytest.raises(FrameTooLarge):
            joint(CBBA(Frame.of_size(5), {1: 1}), CBBA(Frame.of_size(5), {1: 1}))

    def test_factorization(self):
        mf = joint_fcbba(MX, MY)
        fx, fy = fcbba(MX), fcbba(MY)
        for bx, zx in fx.masses.items():
            for by, zy in fy.masses.items():
                assert abs(abs(mf[rectangle(mf.frame, bx, by)]) - abs(zx) * abs(zy)) < 1e-12
        assert abs(mf.total() - 1) < 1e-12

    def test_real_inputs_stay_real(self):
        a = CBBA(X, {"x1": 0.5, X.full: 0.5})
        b = CBBA(Y, {"y2": 0.2, Y.full: 0.8})
        assert all(z.imag == 0 for z in joint_fcbba(a, b).masses.values())

    def test_non_product_focal(self):
        frame = product_frame(X, Y)
        diag = rectangle(frame, 1, 1) | rectangle(frame, 2, 2)
        with pytest.raises(NonProductFocal):
            fcbba(CBBA(frame, {diag: 1}))

    def test_valid_output(self):
        assert validate(joint(MX, MY))
