"""End-to-end genericity pipeline: replacing a meaningless subterm by
anything else must not change the observable outcome, and the
randomized campaigns backing that claim must produce replayable
certificates when they fail."""

import pytest

from strata import (
    CBN,
    CBV,
    OMEGA,
    Oracle,
    alpha_eq,
    axiom_suite,
    normalize,
    parse_context,
    reproduce_violation,
    show,
    stratified_genericity_check,
    surface_genericity_check,
)
from strata.reduce import step_to_dict

from conftest import ID, OMEGA_LOOP, p

PROBES = ["x", ID, r"\w.w w", "y z"]


class TestPipeline:
    @pytest.mark.parametrize("level", [0.0, 1.0, 2.0])
    def test_value_guarded_erasing_context(self, cbv_oracle, level):
        ctx = parse_context(rf"(\y.{ID}) (\z.@)")
        for probe in PROBES:
            r = stratified_genericity_check(
                p(OMEGA_LOOP), ctx, p(probe), CBV, level, cbv_oracle)
            assert r.status == "ok", r.detail
            assert alpha_eq(r.lifted_t_end, r.lifted_u_end) or level < OMEGA

    @pytest.mark.parametrize("ctx_text", [rf"(\y.{ID}) @", rf"\x.x ({ID}) @"])
    def test_by_name_erasing_and_frozen_contexts(self, cbn_oracle, ctx_text):
        for probe in PROBES:
            r = surface_genericity_check(
                p(OMEGA_LOOP), parse_context(ctx_text), p(probe), CBN,
                cbn_oracle)
            assert r.status == "ok", r.detail

    def test_unguarded_by_value_context_is_vacuous(self, cbv_oracle):
        # by value the diverging argument must be evaluated, so the
        # plugged term has no normal form and the claim holds vacuously
        r = surface_genericity_check(
            p(OMEGA_LOOP), parse_context(rf"(\y.{ID}) @"), p("x"), CBV,
            cbv_oracle)
        assert r.status == "vacuous"

    def test_meaningful_seed_is_rejected(self, cbv_oracle):
        r = surface_genericity_check(
            p(ID), parse_context(rf"(\y.{ID}) (\z.@)"), p("x"), CBV,
            cbv_oracle)
        assert r.status == "violated"
        assert "meaningful" in r.detail

    def test_undecidable_seed_is_unknown(self):
        oracle = Oracle(CBV, 40)
        r = surface_genericity_check(
            p(r"(\x.x x x) (\x.x x x)"), parse_context(rf"(\y.{ID}) (\z.@)"),
            p("x"), CBV, oracle)
        assert r.status == "unknown"

    def test_report_carries_the_partial_reduction(self, cbv_oracle):
        ctx = parse_context(rf"(\y.{ID}) (\z.@)")
        r = surface_genericity_check(p(OMEGA_LOOP), ctx, p("x"), CBV,
                                     cbv_oracle)
        assert r.approximant is not None
        assert r.partial_steps and alpha_eq(r.partial_end, p(ID))
        assert alpha_eq(r.lifted_u_end, p(ID))


class TestAxiomCampaign:
    @pytest.mark.parametrize("calculus", [CBV, CBN])
    def test_small_campaign_is_clean(self, calculus):
        report = axiom_suite(calculus, n=300, seed=7)
        assert report.ok, report.violations
        assert report.calculus == calculus
        assert all(count > 0 for count in report.checked.values())

    def test_seeded_campaigns_are_reproducible(self):
        a = axiom_suite(CBV, n=100, seed=3)
        b = axiom_suite(CBV, n=100, seed=3)
        assert a.checked == b.checked and a.violations == b.violations


class TestCertificateReplay:
    def _step_cert(self, kind, calculus, text, level=0.0):
        trace = normalize(p(text), calculus, level, 400)
        step = trace.steps[0]
        return {"kind": kind, "calculus": calculus,
                "step": step_to_dict(step)}, step

    def test_true_violations_replay_as_real(self):
        # a fabricated "lift" certificate whose target is not a
        # refinement of the source really does fail again
        cert, step = self._step_cert("lift", CBV, rf"({ID}) ({ID})")
        cert["refined"] = show(p("x y"))
        assert reproduce_violation(cert) is True

    def test_sound_steps_replay_as_non_violations(self):
        cert, step = self._step_cert("approximate", CBV, rf"({ID}) ({ID})")
        assert reproduce_violation(cert) is False

        bno_cert = {"kind": "bno", "calculus": CBN, "level": 0.0,
                    "term": show(p(r"x (\y.y)"))}
        assert reproduce_violation(bno_cert) is False
