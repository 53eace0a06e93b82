"""The three six-stage decision pipelines."""

import numpy as np
import pytest

from conftest import deep_slices
from tiso.errors import BadParams, ShapeMismatch
from tiso.gf import field_create
from tiso.matgf import random_invertible
from tiso.solvers import (STAGES, StageTrace, solve, solve_algiso, solve_mcc,
                          solve_t4)
from tiso.tensor import (act_algebra, act_code_conj, gen_instance, reassemble,
                         verify_witness)

F5 = field_create(5)


def _check_trace(trace):
    seen = []
    for e in trace.entries:
        assert e["stage"] in STAGES
        assert e["outcome"] in ("pass", "failure", "not_isomorphic")
        seen.append(e["stage"])
    # stages are visited in order and only the last entry may be non-pass
    assert seen == sorted(seen, key=STAGES.index)
    for e in trace.entries[:-1]:
        assert e["outcome"] == "pass"


@pytest.mark.parametrize("problem,n,q", [
    ("algiso", 8, 5), ("mcc", 8, 5), ("t4", 3, 2)])
def test_verdicts_and_traces_well_formed(problem, n, q):
    for seed in range(10):
        mode = "planted" if seed % 2 == 0 else "unrelated"
        A, B, _w = gen_instance(problem, n, q, mode, seed)
        verdict, trace = solve(problem, A, B, rng=seed)
        assert verdict.kind in ("Isomorphic", "NotIsomorphic", "Failure")
        _check_trace(trace)
        if verdict.kind == "Isomorphic":
            res = verify_witness(problem, A, B, verdict.witness)
            assert res[0] if problem == "algiso" else res
        else:
            assert verdict.stage in STAGES


def test_determinism_given_seed():
    A, B, _w = gen_instance("algiso", 8, 5, "planted", 77)
    v1, t1 = solve_algiso(A, B, np.random.default_rng(123))
    v2, t2 = solve_algiso(A, B, np.random.default_rng(123))
    assert v1.kind == v2.kind and v1.stage == v2.stage
    assert t1.to_json() == t2.to_json()


def test_algiso_deep_instance_full_pipeline():
    """Engineered hull-surviving instance; frozen seed reaches stage six and
    recovers a verifying witness."""
    rng = np.random.default_rng(8)
    mats = deep_slices(F5, 8, rng)
    A = reassemble(F5, mats, "horizontal")
    T = random_invertible(F5, 8, rng)
    B = act_algebra(A, T)
    verdict, trace = solve_algiso(A, B, np.random.default_rng(8))
    assert verdict.kind == "Isomorphic"
    assert trace.outcome("step6") == "pass"
    ok, lam = verify_witness("algiso", A, B, verdict.witness)
    assert ok and lam == 1


def test_mcc_deep_instance_full_pipeline():
    rng = np.random.default_rng(6)
    mats = deep_slices(F5, 8, rng)
    A = reassemble(F5, mats, "frontal")
    S = random_invertible(F5, 8, rng)
    T = random_invertible(F5, 8, rng)
    B = act_code_conj(A, S, T)
    verdict, trace = solve_mcc(A, B, np.random.default_rng(6))
    assert verdict.kind == "Isomorphic"
    assert trace.outcome("step6") == "pass"
    assert verify_witness("mcc", A, B, verdict.witness)


def test_mcc_self_solve_on_deep_instance():
    """A deep instance against a planted copy of itself with the identity
    transformation is still recognized."""
    rng = np.random.default_rng(6)
    mats = deep_slices(F5, 8, rng)
    A = reassemble(F5, mats, "frontal")
    verdict, _ = solve_mcc(A, A, np.random.default_rng(0))
    assert verdict.kind in ("Isomorphic", "Failure")
    if verdict.kind == "Isomorphic":
        assert verify_witness("mcc", A, A, verdict.witness)


def test_t4_planted_corank_success():
    hits = 0
    for seed in range(20):
        A, B, _w = gen_instance("t4", 3, 2, "planted_corank(3)", seed)
        verdict, trace = solve_t4(A, B, rng=seed)
        _check_trace(trace)
        if verdict.kind == "Isomorphic":
            hits += 1
            assert verify_witness("t4", A, B, verdict.witness)
    assert hits >= 5  # empirical success rate well above 0.5


def test_t4_unrelated_never_isomorphic():
    for seed in range(20):
        A, B, _w = gen_instance("t4", 3, 2, "unrelated", seed)
        verdict, _ = solve_t4(A, B, rng=seed)
        assert verdict.kind != "Isomorphic"


def test_failure_vs_notiso_sides():
    """First-input breakdowns are Failure; certified mismatches on the
    second input are NotIsomorphic."""
    fail_stages = set()
    notiso_seen = False
    for seed in range(60):
        A, B, _w = gen_instance("algiso", 8, 5, "unrelated", seed)
        verdict, trace = solve_algiso(A, B, rng=seed)
        if verdict.kind == "Failure":
            fail_stages.add(verdict.stage)
        elif verdict.kind == "NotIsomorphic":
            notiso_seen = True
    assert "step2" in fail_stages  # the hull gate dominates
    assert notiso_seen  # A passing + B failing a gate must occur


def test_input_validation():
    A, B, _w = gen_instance("algiso", 3, 5, "unrelated", 0)
    C, _D, _w2 = gen_instance("algiso", 4, 5, "unrelated", 0)
    with pytest.raises(ShapeMismatch):
        solve_algiso(A, C)
    with pytest.raises(BadParams):
        solve("frobnicate", A, B)
    small, small2, _ = gen_instance("mcc", 2, 5, "unrelated", 0)
    with pytest.raises(BadParams):
        solve_mcc(small, small2)
