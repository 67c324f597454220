import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

import oracles
from evsvm.belief import Frame, MassFunction, bel_all
from evsvm.decision import (ONETWO, TWOONE, Decision, appriou_scores, build_appriou_weights, decide_appriou,
                            decide_maxbel_reject, decide_pignistic, decide_process)

F3 = Frame("abc")


def M(frame, focal):
    return MassFunction.from_focal(frame, {tuple(k): v for k, v in focal.items()})


def expected_appriou(m, r):
    """Oracle argmax: ties to the smaller subset, then the lower mask."""
    sets = oracles.as_sets(m)
    scores = oracles.appriou_argmax(sets, m.frame.labels, r)
    best = max(scores.values())
    cand = [X for X, v in scores.items() if v >= best - 1e-12 * best]
    return min((m.frame.mask(X) for X in cand), key=lambda k: (bin(k).count("1"), k))


@st.composite
def mass_functions(draw, n=None, allow_empty=False):
    n = draw(st.integers(2, 4)) if n is None else n
    frame = Frame("abcd"[:n])
    seed = draw(st.integers(0, 2**32 - 1))
    rng = np.random.default_rng(seed)
    return MassFunction(frame, oracles.to_dense(frame, oracles.random_masses(rng, frame.labels,
                                                                              allow_empty=allow_empty)))


class TestDecisionType:
    def test_labels(self):
        assert Decision.of_class(1).label(F3) == "b"
        assert Decision.of_mask(0b101).label(F3) == "{a,c}"
        assert Decision.rejected().label(F3) == "reject"

    def test_invalid(self):
        with pytest.raises(ValueError):
            Decision("singleton", 0b11)
        with pytest.raises(ValueError):
            Decision("union", 0b1)
        with pytest.raises(ValueError):
            Decision("rejected", 1)
        with pytest.raises(ValueError):
            Decision("maybe", 1)


class TestPignistic:
    def test_example(self):
        assert decide_pignistic(M(F3, {"a": 0.3, "ab": 0.6, "abc": 0.1})) == 0

    def test_tie_lowest_index(self):
        assert decide_pignistic(M(F3, {"bc": 1.0})) == 1
        assert decide_pignistic(MassFunction.vacuous(F3)) == 0


class TestMaxBelReject:
    def test_accept(self):
        assert decide_maxbel_reject(M(F3, {"a": 0.6, "bc": 0.3, "abc": 0.1})) == Decision.of_class(0)

    def test_reject(self):
        assert decide_maxbel_reject(M(F3, {"a": 0.4, "bc": 0.45, "abc": 0.15})).is_rejected

    def test_boundary_accepts(self):
        assert decide_maxbel_reject(M(F3, {"a": 0.5, "bc": 0.5})) == Decision.of_class(0)

    def test_vacuous_accepts_first_class(self):
        assert decide_maxbel_reject(MassFunction.vacuous(F3)) == Decision.of_class(0)

    @given(mass_functions())
    def test_against_definition(self, m):
        b = bel_all(m)
        d = decide_maxbel_reject(m)
        singles = [b[1 << i] for i in range(m.frame.size)]
        k = int(np.argmax(singles))
        if d.is_rejected:
            assert singles[k] < b[m.frame.full ^ (1 << k)]
        else:
            assert d.class_index == k


class TestAppriouWeights:
    def test_uniform_at_zero(self):
        w = build_appriou_weights(F3, 0.0)
        np.testing.assert_allclose(w.weights[1:], 1 / 7, atol=1e-15)
        assert w.weights[0] == 0.0

    def test_normaliser_two_classes(self):
        w = build_appriou_weights(Frame("ab"), 1.0)
        assert w["a"] == pytest.approx(0.4, abs=1e-15)
        assert w[("a", "b")] == pytest.approx(0.2, abs=1e-15)

    def test_normaliser_three_classes(self):
        w = build_appriou_weights(F3, 0.6)
        assert w["a"] == pytest.approx(0.1819325107175557, abs=1e-12)

    def test_sum_to_one(self):
        for r in (0, 0.25, 0.6, 1):
            assert build_appriou_weights(Frame("abcd"), r).weights.sum() == pytest.approx(1.0, abs=1e-12)

    def test_invalid(self):
        with pytest.raises(ValueError):
            build_appriou_weights(F3, 1.5)
        with pytest.raises(ValueError):
            build_appriou_weights(F3, 0.5, lambdas=np.zeros(8))


class TestAppriou:
    A = {"a": 0.5, "ab": 0.3, "abc": 0.2}
    B = {"a": 0.4, "b": 0.35, "abc": 0.25}
    C = {"a": 0.3, "b": 0.3, "ab": 0.1, "abc": 0.3}

    def test_r0_whole_frame(self):
        for focal in (self.A, self.B, self.C):
            assert decide_appriou(M(F3, focal), 0.0) == Decision.of_mask(0b111)

    def test_fixture_singleton(self):
        assert decide_appriou(M(F3, self.A), 0.6) == Decision.of_class(0)

    def test_fixture_close_scores(self):
        # brute-force scores: a 0.13099, b 0.12735, ab 0.12003, abc 0.09411, ...
        m = M(F3, {"a": 0.30, "b": 0.28, "ab": 0.30, "abc": 0.12})
        assert decide_appriou(m, 0.6) == Decision.of_class(0)
        scores = appriou_scores(m, build_appriou_weights(F3, 0.6))
        assert scores[0b001] == pytest.approx(0.1309914077166401, abs=1e-12)

    def test_fixture_union(self):
        assert decide_appriou(M(F3, self.B), 0.6) == Decision.of_mask(0b011)
        assert decide_appriou(M(F3, self.B), 1.0) == Decision.of_class(0)

    def test_exact_tie_lower_mask(self):
        assert decide_appriou(M(F3, self.C), 0.6) == Decision.of_class(0)

    def test_precomputed_weights(self):
        w = build_appriou_weights(F3, 0.6)
        assert decide_appriou(M(F3, self.B), w) == decide_appriou(M(F3, self.B), 0.6)

    def test_frame_mismatch(self):
        with pytest.raises(ValueError):
            decide_appriou(M(F3, self.A), build_appriou_weights(Frame("ab"), 0.6))

    @settings(max_examples=200)
    @given(mass_functions(), st.floats(0.01, 1.0))
    def test_against_oracle(self, m, r):
        assert decide_appriou(m, r).mask == expected_appriou(m, r)

    @given(mass_functions())
    def test_r1_is_singleton(self, m):
        assert decide_appriou(m, 1.0).kind == "singleton"

    @given(mass_functions())
    def test_cardinality_non_increasing_in_r(self, m):
        sizes = [bin(decide_appriou(m, r).mask).count("1") for r in np.linspace(0, 1, 11)]
        assert all(a >= b for a, b in zip(sizes, sizes[1:]))

    @given(mass_functions(allow_empty=True), st.floats(0.05, 1.0))
    def test_renormalisation_invariant(self, m, r):
        if m.masses[0] > 0.99:
            return
        norm = m.masses.copy()
        norm[0] = 0.0
        closed = MassFunction(m.frame, norm / norm.sum())
        assert decide_appriou(m, r) == decide_appriou(closed, r)


class TestProcess:
    def test_onetwo_rejects_where_twoone_commits(self):
        m = M(F3, {"a": 0.4, "bc": 0.45, "abc": 0.15})
        assert decide_process(m, 1.0, ONETWO).is_rejected
        assert decide_process(m, 1.0, TWOONE).kind == "singleton"

    def test_twoone_resolves_union(self):
        m = M(F3, TestAppriou.B)
        assert decide_process(m, 0.6, ONETWO) == Decision.of_mask(0b011)
        assert decide_process(m, 0.6, TWOONE) == Decision.of_class(0)

    def test_bad_order(self):
        with pytest.raises(ValueError):
            decide_process(MassFunction.vacuous(F3), 0.6, "three")

    @given(mass_functions(), st.floats(0, 1))
    def test_structure(self, m, r):
        one = decide_process(m, r, ONETWO)
        two = decide_process(m, r, TWOONE)
        rej = decide_maxbel_reject(m)
        app = decide_appriou(m, r)
        assert one == (rej if rej.is_rejected else app)
        assert two == (app if app.kind == "singleton" else rej)
        # a twoone rejection implies a onetwo rejection
        if two.is_rejected:
            assert one.is_rejected
