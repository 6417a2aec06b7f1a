"""This module contains the controllability decision procedure.
Each verdict is tagged with a stable clause identifier:

    LARC-FAIL      the rank condition fails
    DIM3-TRIVIAL   the controls generate g
    T1.<class>     one-dimensional control distribution
    T2.<class>     two-dimensional control distribution

where <class> is one of R2, R2Tilde, E, R3, R3Lambda, R3Prime."""

from dataclasses import dataclass
import logging
from typing import Any, Optional
import numpy as np
from components.certificate import BarrierCertificate, barrier_certificate
from components.derivation import Decomposition, StructuralPredicates, decompose, \
    structural_predicates
from components.linear_system import DistributionInfo, LinearSystem, distribution_info, \
    normalize
from helpers.functions import in_span, span_basis
from helpers.types import GroupKind, NoCertificate

logger = logging.getLogger(__name__)

CLASS_TAGS: dict[GroupKind, str] = {
    GroupKind.R2:              "R2",
    GroupKind.R2_TILDE:        "R2Tilde",
    GroupKind.E_N:             "E",
    GroupKind.E_TILDE:         "E",
    GroupKind.R3:              "R3",
    GroupKind.R3_LAMBDA:       "R3Lambda",
    GroupKind.R3_PRIME_LAMBDA: "R3Prime"}

LARC_FAIL: str = "LARC-FAIL"
DIM3_TRIVIAL: str = "DIM3-TRIVIAL"
CLAUSES: tuple[str, ...] = (
    LARC_FAIL, DIM3_TRIVIAL,
    *(f"T1.{tag}" for tag in dict.fromkeys(CLASS_TAGS.values())),
    *(f"T2.{tag}" for tag in dict.fromkeys(CLASS_TAGS.values())))


@dataclass(frozen=True)
class Verdict():
    """
    Outcome of `decide`. `certificate` is set only for negative
    verdicts of systems satisfying LARC.
    """
    controllable: bool
    clause: str
    explanation: str
    info: DistributionInfo
    predicates: StructuralPredicates
    decomposition: Decomposition
    certificate: Optional[BarrierCertificate]=None

    def __post_init__(self):
        assert self.clause in CLAUSES, f"Unknown clause {self.clause}"
        assert self.info.larc or self.clause == LARC_FAIL

    def to_dict(self) -> dict[str, Any]:
        return {"larc": self.info.larc,
                "ad_rank": self.info.ad_rank,
                "delta_dim": self.info.delta_dim,
                "g0_dim": self.decomposition.gzero_dim,
                "spectrum": self.decomposition.sorted_spectrum,
                "controllable": self.controllable,
                "clause": self.clause,
                "explanation": self.explanation,
                "certificate": None if self.certificate is None else self.certificate.to_dict()}


def kernel_outside_distribution(system: LinearSystem,
                                predicates: StructuralPredicates) -> bool:
    """
    Whether ker D* ⊄ Δ ∩ ({0} × ℝ²).
    """
    nilradical = [control.vector for control in system.controls if control.in_nilradical]
    basis = span_basis(np.array(nilradical)) if nilradical else np.zeros((0, 3))
    for vector in predicates.kernel_vectors():
        if not in_span(np.array([0.0, vector[0], vector[1]]), basis):
            return True
    return False


def _one_control(kind: GroupKind, unit_lambda: bool, info: DistributionInfo,
                 predicates: StructuralPredicates) -> tuple[bool, str]:
    if kind is GroupKind.R2:
        return (predicates.g0_is_aff or predicates.g_equals_g0,
                "g0 is aff(R) or g = g0")
    if kind is GroupKind.R2_TILDE:
        return predicates.g0_is_aff, "g0 is aff(R)"
    if kind in (GroupKind.E_N, GroupKind.E_TILDE, GroupKind.R3):
        return (predicates.g_equals_g0 and not predicates.dstar_zero,
                "g = g0 and D* != 0")
    if kind is GroupKind.R3_LAMBDA:
        return ((unit_lambda and predicates.complex_pair)
                or (predicates.g_equals_g0 and info.ad_rank),
                "lambda = 1 with complex eigenvalues of D*, or g = g0 with the ad-rank condition")
    return True, "every system satisfying LARC is controllable"


def _two_controls(kind: GroupKind, kernel_outside: bool, predicates: StructuralPredicates,
                  info: DistributionInfo) -> tuple[bool, str]:
    if kind in (GroupKind.R2, GroupKind.R2_TILDE):
        return (predicates.gzero_dim > 1 or (predicates.gzero_dim == 1 and info.delta_is_aff),
                "dim g0 > 1, or dim g0 = 1 with a nonabelian distribution")
    if kind is GroupKind.R3:
        return predicates.g_equals_g0, "g = g0"
    if kind is GroupKind.R3_LAMBDA:
        return (kernel_outside or predicates.complex_pair
                or predicates.g_equals_g0,
                "ker D* not contained in the distribution, complex eigenvalues of D*, or g = g0")
    return True, "every system satisfying LARC is controllable"


def select_clause(kind: GroupKind,
                  unit_lambda: bool,
                  info: DistributionInfo,
                  predicates: StructuralPredicates,
                  kernel_outside: bool) -> tuple[bool, str, str]:
    """
    The clause table: (controllable, clause, explanation) for one
    combination of group class, distribution facts and predicates.
    """
    tag = CLASS_TAGS[kind]
    if not info.larc:
        return False, LARC_FAIL, "the rank condition fails"
    if info.delta_dim == 3:
        return True, DIM3_TRIVIAL, "the controls generate g"
    if info.delta_dim == 1:
        controllable, explanation = _one_control(kind, unit_lambda, info, predicates)
        return controllable, f"T1.{tag}", explanation
    controllable, explanation = _two_controls(kind, kernel_outside, predicates, info)
    return controllable, f"T2.{tag}", explanation


def decide(system: LinearSystem) -> Verdict:
    """
    Decides controllability clause by clause on the normalized system
    and attaches a barrier certificate to negative verdicts.
    """
    info = distribution_info(system)
    normalized = normalize(system)
    reduced = normalized.system
    predicates = structural_predicates(reduced.derivation)
    decomposition = decompose(reduced.derivation)
    controllable, clause, explanation = select_clause(
        system.group.kind, system.group.is_unit_lambda, info, predicates,
        kernel_outside_distribution(reduced, predicates))
    logger.info("%s: %s by %s", system.group.name,
                "controllable" if controllable else "not controllable", clause)
    certificate = None
    if info.larc and not controllable:
        try:
            certificate = barrier_certificate(normalized)
        except NoCertificate as exc:
            logger.warning("No barrier certificate for %s (%s)", clause, exc)
    return Verdict(controllable=controllable,
                   clause=clause,
                   explanation=explanation,
                   info=info,
                   predicates=predicates,
                   decomposition=decomposition,
                   certificate=certificate)
