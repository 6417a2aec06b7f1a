"""This module contains test routines for the controllability decision procedure."""

from itertools import product
from typing import TypedDict
import numpy as np
import pytest
from components.algebra import identity
from components.derivation import StructuralPredicates, descends_to_quotient, make_derivation
from components.group_class import GroupClass
from components.linear_system import DistributionInfo, LinearSystem, ad_rank, larc, normalize
from components.verdict import CLASS_TAGS, CLAUSES, DIM3_TRIVIAL, LARC_FAIL, decide, select_clause
from helpers.types import CertificateKind, GroupKind
from simulation.constants import BARRIER_ACCEPTANCE, BARRIER_TOLERANCE, DEFAULT_SEED, \
    FLIPPED_BARRIER_MINIMUM
from simulation.monitor import validate_certificate


class VerdictCase(TypedDict):
    """
    One row of the decision table.
    """
    group: GroupClass
    dstar: list[list[float]]
    xi: list[float]
    controls: list[list[float]]
    controllable: bool
    clause: str

r2 = GroupClass(GroupKind.R2)
r2_tilde = GroupClass(GroupKind.R2_TILDE)
r3 = GroupClass(GroupKind.R3)
r3_lambda = GroupClass(GroupKind.R3_LAMBDA, lambda_=0.5)
r3_unit = GroupClass(GroupKind.R3_LAMBDA, lambda_=1.0)
e_tilde = GroupClass(GroupKind.E_TILDE)
zero: list[list[float]] = [[0.0, 0.0], [0.0, 0.0]]
unit: list[list[float]] = [[1.0, 0.0], [0.0, 1.0]]
rotation: list[list[float]] = [[0.0, -1.0], [1.0, 0.0]]
nilpotent: list[list[float]] = [[0.0, 1.0], [0.0, 0.0]]
one_control: list[list[float]] = [[1.0, 0.0, 0.0]]
with_e1: list[list[float]] = [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0]]
with_e2: list[list[float]] = [[1.0, 0.0, 0.0], [0.0, 0.0, 1.0]]

def case(group: GroupClass, dstar: list[list[float]], xi: list[float], controls: list[list[float]],
         controllable: bool, clause: str) -> VerdictCase:
    return {"group": group, "dstar": dstar, "xi": xi, "controls": controls,
            "controllable": controllable, "clause": clause}

verdict_table: list[VerdictCase] = [
    case(r3_lambda, [[1.0, 0.0], [0.0, -1.0]], [0.0, 0.0], one_control, False, LARC_FAIL),
    case(r2_tilde, [[0.0, 0.0], [0.0, 1.0]], [0.0, 0.0], [[0.0, 1.0, 0.0]], False, LARC_FAIL),
    case(e_tilde, rotation, [0.0, 0.0], one_control, False, LARC_FAIL),
    case(r2_tilde, zero, [1.0, 0.0], with_e1, False, LARC_FAIL),
    case(r3_lambda, [[1.0, 0.0], [0.0, -1.0]], [1.0, 1.0], [[1.0, 0.0, 0.0], [0.0, 1.0, 1.0]], True, DIM3_TRIVIAL),
    case(e_tilde, unit, [1.0, 0.0], with_e1, True, DIM3_TRIVIAL),
    case(GroupClass(GroupKind.R3_PRIME_LAMBDA, lambda_=0.5), unit, [1.0, 0.0], with_e1, True, DIM3_TRIVIAL),
    case(r2, [[0.0, 0.0], [0.0, 1.0]], [1.0, 1.0], one_control, False, "T1.R2"),
    case(r2, zero, [1.0, 1.0], one_control, True, "T1.R2"),
    case(r2, [[0.0, 0.0], [0.0, -1.0]], [1.0, 1.0], one_control, False, "T1.R2"),
    case(r2, [[1.0, 0.0], [0.0, 0.0]], [1.0, 1.0], one_control, True, "T1.R2"),
    case(r2_tilde, [[1.0, 0.0], [0.0, 0.0]], [1.0, 1.0], one_control, True, "T1.R2Tilde"),
    case(r2_tilde, zero, [1.0, 1.0], one_control, False, "T1.R2Tilde"),
    case(r2_tilde, [[0.0, 0.0], [0.0, 1.0]], [1.0, 1.0], one_control, False, "T1.R2Tilde"),
    case(e_tilde, rotation, [1.0, 0.0], one_control, True, "T1.E"),
    case(GroupClass(GroupKind.E_N, n=1), rotation, [1.0, 0.0], one_control, True, "T1.E"),
    case(GroupClass(GroupKind.E_N, n=3), rotation, [1.0, 0.0], one_control, True, "T1.E"),
    case(e_tilde, zero, [1.0, 0.0], one_control, False, "T1.E"),
    case(e_tilde, unit, [1.0, 1.0], one_control, False, "T1.E"),
    case(r3, [[1.0, 2.0], [0.0, 1.0]], [1.0, 1.0], one_control, False, "T1.R3"),
    case(r3, nilpotent, [1.0, 1.0], one_control, True, "T1.R3"),
    case(r3, zero, [0.0, 1.0], one_control, False, "T1.R3"),
    case(r3_lambda, [[1.0, 0.0], [0.0, -1.0]], [1.0, 1.0], one_control, False, "T1.R3Lambda"),
    case(r3_lambda, [[1.0, 0.0], [0.0, 2.0]], [1.0, 1.0], one_control, False, "T1.R3Lambda"),
    case(r3_lambda, zero, [1.0, 1.0], one_control, False, "T1.R3Lambda"),
    case(r3_lambda, [[0.0, 0.0], [0.0, 1.0]], [1.0, 1.0], one_control, False, "T1.R3Lambda"),
    case(r3_unit, rotation, [1.0, 0.0], one_control, True, "T1.R3Lambda"),
    case(r3_unit, nilpotent, [0.0, 1.0], one_control, True, "T1.R3Lambda"),
    case(r3_unit, [[1.0, 0.0], [0.0, 2.0]], [1.0, 1.0], one_control, False, "T1.R3Lambda"),
    case(GroupClass(GroupKind.R3_PRIME_LAMBDA, lambda_=2.0), [[1.0, -1.0], [1.0, 1.0]], [1.0, 0.0],
         one_control, True, "T1.R3Prime"),
    case(GroupClass(GroupKind.R3_PRIME_LAMBDA, lambda_=1.0), zero, [1.0, 0.0], one_control, True,
         "T1.R3Prime"),
    case(r2_tilde, [[0.0, 0.0], [0.0, 1.0]], [0.0, 1.0], with_e1, True, "T2.R2Tilde"),
    case(r2_tilde, unit, [1.0, 0.0], with_e2, True, "T2.R2Tilde"),
    case(r2_tilde, unit, [0.0, 1.0], with_e1, False, "T2.R2Tilde"),
    case(r2, [[0.0, 0.0], [0.0, -1.0]], [0.0, 1.0], with_e1, True, "T2.R2"),
    case(r2, zero, [0.0, 1.0], with_e1, True, "T2.R2"),
    case(r2, unit, [0.0, 1.0], with_e1, False, "T2.R2"),
    case(r3, nilpotent, [0.0, 1.0], with_e1, True, "T2.R3"),
    case(r3, unit, [0.0, 1.0], with_e1, False, "T2.R3"),
    case(r3_lambda, [[0.0, 0.0], [0.0, 1.0]], [1.0, 0.0], with_e2, True, "T2.R3Lambda"),
    case(r3_lambda, [[0.0, 0.0], [0.0, 1.0]], [0.0, 1.0], with_e1, False, "T2.R3Lambda"),
    case(r3_lambda, zero, [0.0, 1.0], with_e1, True, "T2.R3Lambda"),
    case(r3_unit, rotation, [0.0, 0.0], with_e1, True, "T2.R3Lambda"),
    case(r3_unit, [[1.0, 0.0], [0.0, 2.0]], [0.0, 1.0], with_e1, False, "T2.R3Lambda")]

def create_system(row: VerdictCase) -> LinearSystem:
    derivation = make_derivation(row["group"], row["dstar"], row["xi"])
    return LinearSystem.from_arrays(row["group"], derivation, row["controls"])

def row_label(row: VerdictCase) -> str:
    return f"{row['group'].name} D*={row['dstar']} xi={row['xi']} controls={row['controls']}"

def find_row(clause: str, dstar: list[list[float]]) -> VerdictCase:
    rows = [row for row in verdict_table if row["clause"] == clause and row["dstar"] == dstar]
    assert len(rows) == 1, (clause, dstar)
    return rows[0]

negative_rows: list[VerdictCase] = [row for row in verdict_table
                                    if not row["controllable"] and row["clause"] != LARC_FAIL]
quotient_rows: list[VerdictCase] = [
    row for row in verdict_table
    if row["group"].kind in (GroupKind.R2, GroupKind.R2_TILDE)
    and descends_to_quotient(make_derivation(r2, row["dstar"], row["xi"]))]

def test_decision_table() -> None:
    for row in verdict_table:
        verdict = decide(create_system(row))
        label = row_label(row)
        assert verdict.clause == row["clause"], label
        assert verdict.controllable == row["controllable"], label

def test_reachable_clauses_are_covered() -> None:
    covered = {row["clause"] for row in verdict_table}
    # on E and R3Prime a nilradical control and its bracket already span g
    assert covered == set(CLAUSES) - {"T2.E", "T2.R3Prime"}

def test_negative_verdicts_carry_certificates() -> None:
    for row in verdict_table:
        verdict = decide(create_system(row))
        if verdict.controllable or verdict.clause == LARC_FAIL:
            assert verdict.certificate is None
        else:
            assert verdict.certificate is not None, row

def test_certificate_kinds() -> None:
    expected = {
        (GroupKind.R3_LAMBDA, "T1.R3Lambda", ((1.0, 0.0), (0.0, -1.0))): CertificateKind.HALF_PLANE_F,
        (GroupKind.R2_TILDE, "T1.R2Tilde", ((0.0, 0.0), (0.0, 0.0))): CertificateKind.MONOTONE_COORDINATE,
        (GroupKind.E_TILDE, "T1.E", ((1.0, 0.0), (0.0, 1.0))): CertificateKind.EXPANDING_DISK,
        (GroupKind.R2, "T1.R2", ((0.0, 0.0), (0.0, 1.0))): CertificateKind.HALF_PLANE_H}
    for row in verdict_table:
        key = (row["group"].kind, row["clause"], tuple(tuple(r) for r in row["dstar"]))
        if key in expected:
            verdict = decide(create_system(row))
            assert verdict.certificate is not None
            assert verdict.certificate.kind is expected[key]

def test_verdict_is_invariant_under_control_changes() -> None:
    base = case(r3_lambda, [[1.0, 0.0], [0.0, -1.0]], [1.0, 1.0], [[1.0, 2.0, 3.0]], False, "T1.R3Lambda")
    scaled = case(r3_lambda, [[1.0, 0.0], [0.0, -1.0]], [1.0, 1.0], [[-2.0, -4.0, -6.0]], False, "T1.R3Lambda")
    for row in (base, scaled):
        verdict = decide(create_system(row))
        assert verdict.clause == row["clause"] and verdict.controllable == row["controllable"]
        assert verdict.certificate is not None

def test_en_verdicts_do_not_depend_on_n() -> None:
    for dstar, xi in ((rotation, [1.0, 0.0]), (unit, [1.0, 1.0]), (zero, [0.0, 1.0])):
        verdicts = [decide(create_system(case(GroupClass(GroupKind.E_N, n=n), dstar, xi, one_control,
                                              False, "T1.E")))
                    for n in (1, 2, 5)]
        covering = GroupClass(GroupKind.E_N, n=1).covering()
        assert covering == e_tilde
        verdicts.append(decide(create_system(case(covering, dstar, xi, one_control, False, "T1.E"))))
        assert len({(verdict.controllable, verdict.clause) for verdict in verdicts}) == 1

def test_verdict_record() -> None:
    row = find_row("T1.R3Lambda", [[1.0, 0.0], [0.0, -1.0]])
    record = decide(create_system(row)).to_dict()
    assert record["larc"] and record["ad_rank"]
    assert record["delta_dim"] == 1 and record["g0_dim"] == 1
    assert record["controllable"] is False and record["clause"] == "T1.R3Lambda"
    assert record["spectrum"] == [[-1.0, 0.0], [0.0, 0.0], [1.0, 0.0]]
    assert record["certificate"]["kind"] == "HalfPlaneF"
    assert record["certificate"]["space"] == "PlaneF"
    assert np.allclose(record["certificate"]["params"]["ell"], [0.0, 1.0])

@pytest.mark.parametrize("row", verdict_table, ids=row_label)
def test_normalization_keeps_rank_conditions(row: VerdictCase) -> None:
    system = create_system(row)
    normalized = normalize(system).system
    assert larc(normalized) == larc(system)
    assert ad_rank(normalized) == ad_rank(system)

@pytest.mark.parametrize("row", quotient_rows, ids=row_label)
def test_covering_verdict_descends_to_the_quotient(row: VerdictCase) -> None:
    assert r2.covering() == r2_tilde
    on_cover = decide(create_system(case(r2_tilde, row["dstar"], row["xi"], row["controls"],
                                         row["controllable"], row["clause"])))
    on_quotient = decide(create_system(case(r2, row["dstar"], row["xi"], row["controls"],
                                            row["controllable"], row["clause"])))
    assert on_quotient.controllable or not on_cover.controllable

@pytest.mark.parametrize("row", verdict_table, ids=row_label)
def test_verdict_is_invariant_under_positive_scaling(row: VerdictCase) -> None:
    expected = decide(create_system(row))
    for factor in (0.5, 3.0):
        controls = [[factor * value for value in control] for control in row["controls"]]
        dstar = [[factor * value for value in line] for line in row["dstar"]]
        xi = [factor * value for value in row["xi"]]
        for scaled in (case(row["group"], row["dstar"], row["xi"], controls, False, ""),
                       case(row["group"], dstar, xi, row["controls"], False, "")):
            verdict = decide(create_system(scaled))
            assert (verdict.controllable, verdict.clause) == (expected.controllable,
                                                              expected.clause)

@pytest.mark.parametrize("kind", list(GroupKind))
def test_clause_table_is_total(kind: GroupKind) -> None:
    flags = (False, True)
    for unit_lambda, larc_holds, rank, delta_dim, delta_is_aff, gzero_dim, dstar_zero, \
            complex_pair, g_equals_g0, g0_is_aff, kernel_outside in product(
                flags, flags, flags, (1, 2, 3), flags, (1, 2, 3), flags, flags, flags, flags, flags):
        info = DistributionInfo(delta_basis=(), delta_dim=delta_dim, delta_is_aff=delta_is_aff,
                                larc=larc_holds, ad_rank=rank)
        predicates = StructuralPredicates(dstar_invertible=not dstar_zero,
                                          dstar_zero=dstar_zero,
                                          complex_pair=complex_pair,
                                          g_equals_g0=g_equals_g0,
                                          g0_is_aff=g0_is_aff,
                                          gzero_dim=gzero_dim,
                                          ker_dstar_basis=())
        controllable, clause, explanation = select_clause(kind, unit_lambda, info, predicates,
                                                          kernel_outside)
        assert isinstance(controllable, bool) and explanation
        if not larc_holds:
            assert (controllable, clause) == (False, LARC_FAIL)
        elif delta_dim == 3:
            assert (controllable, clause) == (True, DIM3_TRIVIAL)
        else:
            assert clause == f"T{delta_dim}.{CLASS_TAGS[kind]}"
        assert clause in CLAUSES

@pytest.mark.slow
@pytest.mark.parametrize("row", negative_rows, ids=row_label)
def test_certificates_hold_across_the_table(row: VerdictCase) -> None:
    count, horizon, dt = BARRIER_ACCEPTANCE
    system = create_system(row)
    certificate = decide(system).certificate
    assert certificate is not None
    starts = [identity(system.group), certificate.projection.lift(certificate.boundary_point())]
    violation = validate_certificate(system, certificate, count, horizon=horizon,
                                     seed=DEFAULT_SEED, dt=dt, starts=starts, workers=4)
    assert violation <= BARRIER_TOLERANCE
    flipped = certificate.flipped()
    start = flipped.projection.lift(flipped.boundary_point())
    assert validate_certificate(system, flipped, 200, horizon=horizon, seed=DEFAULT_SEED,
                                dt=1e-2, starts=[start]) > FLIPPED_BARRIER_MINIMUM

def test_negative_rows_span_every_certificate_kind() -> None:
    assert len(negative_rows) == 18
    kinds = {decide(create_system(row)).certificate.kind for row in negative_rows}
    assert kinds == set(CertificateKind)
