"""
Mechanical checks of the moment conditions behind the normal and stable limits.
Each condition gets its own verdict in the ConditionReport.
"""

import logging
import math
from typing import Optional

from utils.errors import AlphaOutOfRange, NonConvergent, NotBalanced, NotTwoConnected
from utils.layers.base_law import BaseLayerLaw, ConditionReport, LawKind, MomentSpec
from utils.motifs.motif import Motif

logger = logging.getLogger(__name__)

GAMMA_TOLERANCE = 1e-12


def r_hat(r: int) -> int:
    """Smallest b with b* = r: C(r-1, 2) + 1."""
    return math.comb(r - 1, 2) + 1


def _finite(law: BaseLayerLaw, s: float, t: float) -> Optional[bool]:
    try:
        return math.isfinite(law.mixed_moment(MomentSpec(s=s, t=t)))
    except NonConvergent as e:
        logger.warning("moment E[X^%s Q^%s] left undecided: %s", s, t, e)
        return None


def _register_families(report: ConditionReport) -> None:
    # The clique moments may stand in for the overlap moments.
    report.families = {
        "overlap": [name for name in report.conditions if name.startswith("overlap_moment")],
        "clique": [name for name in report.conditions if name.startswith("clique_moment")],
    }


def _require_two_connected(motif: Motif) -> None:
    if not motif.is_two_connected or motif.vertices < 3:
        raise NotTwoConnected(f"{motif.name} is not a 2-connected graph on at least 3 vertices")


def check_normal_conditions(law: BaseLayerLaw, motif: Motif) -> ConditionReport:
    _require_two_connected(motif)
    v, e = motif.vertices, motif.e_f
    report = ConditionReport(regime="normal", motif=motif.name)

    report.conditions["mean_size_finite"] = _finite(law, 1, 0)
    # Finite variance reduces to a single moment only for balanced motifs.
    report.conditions["second_moment_surrogate"] = _finite(law, 2 * v, 2 * e) if motif.is_balanced else None
    for s in range(1, v):
        exponent = 1 + s * (1 - 1 / (2 * e))
        report.conditions[f"overlap_moment[s={s}]"] = _finite(law, exponent, s)

    if motif.shape == "clique":
        k = v
        hats = {}
        for r in range(2, k + 1):
            rh = r_hat(r)
            hats[r] = rh
            report.conditions[f"clique_moment[r={r}]"] = _finite(law, r - rh / (k * (k - 1)), rh)
        report.details["r_hat"] = hats
        _register_families(report)

    if law.kind is LawKind.INDEPENDENT_PRODUCT and law.q_moment(1) > 0:
        report.conditions["independent_size_moment"] = _finite(law, 2 * v, 0)

    if not report.satisfied:
        logger.warning("normal-regime conditions fail for %s: %s", motif.name, ", ".join(report.failed))
    return report


def check_stable_conditions(law: BaseLayerLaw, motif: Motif, alpha: float,
                            tail_constant: Optional[float] = None) -> ConditionReport:
    """
    Conditions of the stable limit. For independent marginals with a power-law X the
    tail exponent must satisfy gamma = alpha * v_F, and the limit constant
    a = b (a_F / v_F!)^(gamma / v_F) E[Q^(gamma e_F / v_F)] is reported.
    """
    if not 0 < alpha < 2:
        raise AlphaOutOfRange(f"alpha must lie in (0, 2), got {alpha}")
    _require_two_connected(motif)
    if not motif.is_balanced:
        raise NotBalanced(f"{motif.name} is not balanced")

    v, e = motif.vertices, motif.e_f
    report = ConditionReport(regime="stable", motif=motif.name)
    report.details["alpha"] = alpha

    report.conditions["mean_size_finite"] = _finite(law, 1, 0)
    for s in range(1, v):
        exponent = 1 + s * (1 - 1 / (alpha * e))
        report.conditions[f"overlap_moment[s={s}]"] = _finite(law, exponent, s)

    if motif.shape == "clique":
        k = v
        hats = {}
        for r in range(2, k + 1):
            rh = r_hat(r)
            hats[r] = rh
            exponent = r - rh * 2 / (alpha * k * (k - 1))
            report.conditions[f"clique_moment[r={r}]"] = _finite(law, exponent, rh)
        report.details["r_hat"] = hats
        _register_families(report)

    gamma = law.tail_exponent
    if law.kind is LawKind.INDEPENDENT_PRODUCT and gamma is not None:
        gamma_from_alpha = alpha * v
        b = tail_constant if tail_constant is not None else law.tail_constant
        lhs = 1 + (v - 1) * (1 - 1 / (alpha * e))
        report.conditions["gamma_matches_alpha"] = abs(gamma - gamma_from_alpha) <= GAMMA_TOLERANCE * max(1.0, gamma)
        report.conditions["gamma_range"] = 1 < gamma < 2 * v
        report.conditions["size_tail_inequality"] = lhs < gamma
        report.details.update({
            "gamma": gamma,
            "gamma_from_alpha": gamma_from_alpha,
            "alpha_from_gamma": gamma / v,
            "tail_inequality_lhs": lhs,
            "b": b,
            "a": b * (motif.a_f / math.factorial(v)) ** (gamma / v) * law.q_moment(gamma * e / v),
        })

    if not report.satisfied:
        logger.warning("stable-regime conditions fail for %s: %s", motif.name, ", ".join(report.failed))
    return report
