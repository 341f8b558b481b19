"""Judging term pairs against the three equational theories:
plain conversion, the theory that equates all mute (meaningless)
terms, and the observational theory."""

import pytest

from strata import (
    CBN,
    CBV,
    H,
    HSTAR,
    LAMBDA,
    THEORIES,
    falsify_observational,
    judge,
    plug,
    reverify,
)

from conftest import DELTA, ID, OMEGA_LOOP, p


class TestJudgments:
    def test_convertible_pair_is_equal_everywhere(self, ):
        j = judge(p(rf"({ID}) ({ID})"), p(ID), CBV)
        for th in THEORIES:
            assert j[th].result == "equal"
        assert j[LAMBDA].certificate.kind == "common-reduct"
        assert reverify(j)

    def test_interconvertible_mute_terms_are_equal_everywhere(self):
        j = judge(p(OMEGA_LOOP), p(rf"(x x)[x\{DELTA}]"), CBV)
        for th in THEORIES:
            assert j[th].result == "equal"
        assert reverify(j)

    def test_mute_terms_with_different_shapes_merge_beyond_conversion(self):
        # x applied to a loop is as meaningless as the loop itself by
        # value, but the two never reduce to a common term
        j = judge(p(OMEGA_LOOP), p(rf"x ({OMEGA_LOOP})"), CBV)
        assert j[LAMBDA].result == "unknown"
        assert j[H].result == "equal" and j[HSTAR].result == "equal"
        assert j[H].certificate.kind == "both-meaningless"
        assert reverify(j)

    def test_distinct_normal_forms_split_mute_from_observational(self):
        j = judge(p(ID), p(r"\x.\y.x y"), CBV)
        assert j[LAMBDA].result == "not-equal"
        assert j[H].result == "not-equal"
        assert j[H].certificate.kind == "distinct-normal-forms"
        # distinct normal forms alone do not refute observational
        # equivalence; without a separating context the judge abstains
        assert j[HSTAR].result == "unknown"
        assert reverify(j)

    def test_meaningfulness_separation_refutes_mute_and_observational(self):
        j = judge(p(ID), p(OMEGA_LOOP), CBV)
        assert j[H].result == "not-equal"
        assert j[HSTAR].result == "not-equal"
        assert j[HSTAR].certificate.kind in (
            "meaningfulness-separation", "context-witness")
        assert reverify(j)

    @pytest.mark.parametrize("calculus", [CBV, CBN])
    def test_judgments_exist_in_both_calculi(self, calculus):
        j = judge(p(ID), p(ID), calculus)
        assert j.calculus == calculus
        assert all(j[th].result == "equal" for th in THEORIES)


class TestContextSearch:
    def test_trivial_hole_separates_a_value_from_a_loop(self):
        ctx = falsify_observational(p(ID), p(OMEGA_LOOP), CBV)
        assert ctx is not None
        # plugging really does separate: one side normalizes, not the other
        from strata import Oracle
        oracle = Oracle(CBV, 400)
        statuses = {oracle.status(plug(ctx, p(ID))),
                    oracle.status(plug(ctx, p(OMEGA_LOOP)))}
        assert statuses == {"meaningful", "meaningless"}

    def test_no_witness_for_identical_terms(self):
        assert falsify_observational(p(ID), p(ID), CBV,
                                     max_context_size=4) is None


class TestCertificates:
    def test_every_certificate_describes_itself(self):
        pairs = [(rf"({ID}) ({ID})", ID), (OMEGA_LOOP, rf"(x x)[x\{DELTA}]"),
                 (ID, r"\x.\y.x y"), (ID, OMEGA_LOOP)]
        for a, b in pairs:
            j = judge(p(a), p(b), CBV)
            for th in THEORIES:
                cert = j[th].certificate
                if cert is not None:
                    assert isinstance(cert.describe(), str) and cert.describe()
