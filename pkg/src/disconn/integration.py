"""From continuous connections to discrete ones via retractions.

Given a connection A and a group-equivariant retraction R on the total
space, the induced discrete connection on a pair (q0, q1) is computed in
three steps: invert the reduced retraction on the base to find the base
direction from phi(q0) to phi(q1), lift it horizontally and retract to get
the horizontal representative over phi(q1), then read off the fiber
translation carrying that representative to q1.  Differentiating the
result recovers A.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import bundles, connections, groups, manifolds
from .bundles import (BundlePoint, BundleTangent, DomainSpec, HopfBundle,
                      PrincipalBundle, TrivialBundle)
from .connections import ConnectionForm, eval_connection, horizontal_lift
from .discrete import ComposedDiscrete, DiscreteConnectionForm
from .errors import BundleMismatch, NotEquivariant, OutsideDomain
from .groups import AlgebraElement, GroupElement
from .manifolds import (EUCLIDEAN_RADIUS_SENTINEL, ManifoldPoint, Metric,
                        Retraction, TangentVector)


# ---------------------------------------------------------------------------
# Invariant metrics

@dataclass(frozen=True)
class BundleMetric:
    """Bilinear pairing of bundle tangents at a common point."""

    bundle: PrincipalBundle
    name: str
    pairing: Callable[[BundleTangent, BundleTangent], float]

    def inner(self, u, w):
        return self.pairing(u, w)


def build_invariant_metric(A: ConnectionForm,
                           base_metric: Metric = None) -> BundleMetric:
    """Group-invariant metric splitting tangents with the connection A.

    Pairs the base projections with the base metric and the connection
    values with the Euclidean pairing on the algebra, which is invariant
    under the adjoint action for every supported group.
    """
    if base_metric is None:
        base_metric = manifolds.flat_metric()

    def pairing(u, w):
        pu = bundles.tangent_projection(u)
        pw = bundles.tangent_projection(w)
        horizontal = base_metric.inner(pu, pw)
        au = eval_connection(A, u).vector
        aw = eval_connection(A, w).vector
        return float(horizontal + np.dot(au, aw))

    return BundleMetric(A.bundle, f"invariant({base_metric.name})", pairing)


def metric_invariance_defect(gm: BundleMetric, g: GroupElement,
                             u: BundleTangent, w: BundleTangent) -> float:
    moved = gm.inner(bundles.tangent_lift_action(g, u),
                     bundles.tangent_lift_action(g, w))
    return abs(moved - gm.inner(u, w))


# ---------------------------------------------------------------------------
# Bundle retractions

@dataclass(frozen=True)
class BundleRetraction:
    bundle: PrincipalBundle
    name: str
    step: Callable[[BundlePoint, BundleTangent], BundlePoint]
    domain_radius: float


def trivial_product_retraction(bundle: TrivialBundle,
                               base_rule: Retraction = None) -> BundleRetraction:
    """Base retraction on the base block, group exponential on the fiber.

    Equivariant for every structure group: the fiber step sends (g, xi) to
    exp(xi) g, and exp intertwines the adjoint action with conjugation.
    """
    if base_rule is None:
        base_rule = manifolds.metric_exponential(bundle.base)

    def step(q, v):
        base, fiber = bundles.split_trivial(v)
        m = bundle.base.validate(base_rule.step(q.base_point.coords, base))
        g = groups.compose(
            groups.exp(AlgebraElement.of(bundle.group, fiber)), q.group_part)
        return BundlePoint.trivial(bundle, m, g)

    return BundleRetraction(bundle, f"product({base_rule.rule})", step,
                            base_rule.domain_radius)


def trivial_skewed_retraction(bundle: TrivialBundle,
                              strength: float = 0.3) -> BundleRetraction:
    """Valid retraction whose fiber step depends on the group representative.

    The second-order term couples the fiber step to the stored coordinates
    of the group element, which change under the action; used as a negative
    control for the equivariance certification.
    """
    base_rule = manifolds.metric_exponential(bundle.base)

    def step(q, v):
        base, fiber = bundles.split_trivial(v)
        m = bundle.base.validate(base_rule.step(q.base_point.coords, base))
        skew = strength * float(np.linalg.norm(fiber)) ** 2 \
            * float(np.linalg.norm(np.ravel(
                groups.log(q.group_part).vector)))
        xi = AlgebraElement.of(bundle.group, fiber + skew)
        g = groups.compose(groups.exp(xi), q.group_part)
        return BundlePoint.trivial(bundle, m, g)

    return BundleRetraction(bundle, "skewed", step, base_rule.domain_radius)


def hopf_geodesic_retraction(bundle: HopfBundle,
                             domain_radius: float = np.pi) -> BundleRetraction:
    """Great-circle steps on the round S^3; circle rotations are isometries,
    so the rule is equivariant."""

    def step(q, v):
        norm = float(np.linalg.norm(v.components))
        if norm < 1e-300:
            return q
        p = np.cos(norm) * q.ambient + np.sin(norm) * v.components / norm
        return BundlePoint.hopf(bundle, p / np.linalg.norm(p))

    return BundleRetraction(bundle, "great_circle", step, domain_radius)


def retract_bundle(R: BundleRetraction, v: BundleTangent) -> BundlePoint:
    if v.base_point.bundle != R.bundle:
        raise BundleMismatch("tangent does not live on the retraction's bundle")
    if v.norm >= R.domain_radius:
        raise OutsideDomain(
            f"|v| = {v.norm:.4g} >= domain radius {R.domain_radius:.4g}")
    return R.step(v.base_point, v)


def equivariance_defect(R: BundleRetraction, g: GroupElement,
                        v: BundleTangent) -> float:
    """Distance between R(g . v) and g . R(v)."""
    moved = retract_bundle(R, bundles.tangent_lift_action(g, v))
    expected = bundles.act(g, retract_bundle(R, v))
    return bundles.point_distance(moved, expected)


def certify_equivariance(R: BundleRetraction, samples, tol: float = 1e-8):
    """Check R(g . v) = g . R(v) on (g, v) samples; raise on failure."""
    worst = 0.0
    for g, v in samples:
        worst = max(worst, equivariance_defect(R, g, v))
    if worst > tol:
        raise NotEquivariant(
            f"equivariance defect {worst:.3e} exceeds {tol:.1e}")
    return worst


# ---------------------------------------------------------------------------
# Reduced retraction and integration

def _default_reduced_radius(bundle, R):
    if isinstance(bundle, TrivialBundle):
        return min(R.domain_radius, EUCLIDEAN_RADIUS_SENTINEL)
    # Horizontal great circles of S^3 project onto base geodesics at twice
    # the speed, so cap the reduced radius at the base injectivity margin.
    return min(R.domain_radius, np.pi / 2.0)


def reduced_retraction(A: ConnectionForm, R: BundleRetraction,
                       domain_radius: float = None) -> Retraction:
    """Base retraction phi(R(horizontal lift)), independent of the fiber
    point by equivariance of A and R."""
    if A.bundle != R.bundle:
        raise BundleMismatch("connection and retraction bundles differ")
    bundle = A.bundle
    base_kind = bundle.base
    if domain_radius is None:
        domain_radius = _default_reduced_radius(bundle, R)

    def step(m_coords, components):
        m = ManifoldPoint.of(base_kind, m_coords)
        q = bundles.section_over(bundle, m)
        delta = TangentVector(m, base_kind.project_tangent(m_coords,
                                                           components))
        h = horizontal_lift(A, q, delta)
        return bundles.project(R.step(q, h)).coords

    return Retraction(base_kind, f"reduced({R.name})", step, domain_radius)


def integrate_connection(A: ConnectionForm, R: BundleRetraction,
                         domain: DomainSpec,
                         newton_tol: float = 1e-12) -> DiscreteConnectionForm:
    """Discrete connection induced by A and an equivariant retraction R."""
    if A.bundle != R.bundle or domain.bundle != A.bundle:
        raise BundleMismatch("connection, retraction and domain must agree")
    bundle = A.bundle
    reduced = reduced_retraction(A, R)

    def rule(q0, q1):
        m0, m1 = bundles.project(q0), bundles.project(q1)
        delta = manifolds.invert_extended(reduced, m0, m1, tol=newton_tol)
        h = horizontal_lift(A, q0, delta)
        q_h = retract_bundle(R, h)
        return bundles.fiber_translation(q_h, q1)

    return ComposedDiscrete(bundle, rule, domain, name="integrated")
