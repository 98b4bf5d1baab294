"""Differentiating discrete connection data into continuous connections.

The derivation rule differentiates a discrete connection form in its second
slot along the diagonal: the value on a tangent vector v at q is

    d/dt log A_d(q, q(t)) |_{t=0}

for any curve q(t) through q with velocity v.  On trivial bundles the
result is packaged as a genuine local one-form (so curvature is available
downstream); elsewhere it stays an opaque evaluation rule.  The companion
map differentiates discrete horizontal lifts, and the diagram check
confirms that the two constructions produce the same horizontal subspaces.
"""

from __future__ import annotations

import numpy as np

from . import bundles, connections, groups
from .bundles import BundlePoint, BundleTangent, TrivialBundle
from .connections import ConnectionForm, GenericConnection, TrivialLocalConnection
from .discrete import DiscreteConnectionForm, discrete_horizontal_lift, eval_discrete
from .groups import AlgebraElement
from .manifolds import ManifoldPoint, TangentVector
from .numdiff import DerivativeSpec, richardson_derivative


def pair_derivative(Ad: DiscreteConnectionForm, q: BundlePoint,
                    v: BundleTangent, spec: DerivativeSpec) -> np.ndarray:
    """Second-slot derivative of A_d at (q, q) in the direction v."""

    def f(t):
        value = eval_discrete(Ad, q, bundles.bundle_curve(q, v, t))
        return groups.log(value).vector

    return richardson_derivative(f, spec, check_consistency=True)


def derive_connection(Ad: DiscreteConnectionForm,
                      spec: DerivativeSpec = DerivativeSpec()) -> ConnectionForm:
    """Continuous connection obtained by differentiating a discrete one."""
    bundle = Ad.bundle
    if isinstance(bundle, TrivialBundle):
        def omega(m_coords, delta_components):
            q = BundlePoint.trivial(bundle, np.asarray(m_coords, dtype=float),
                                    groups.identity(bundle.group))
            v = bundles.make_trivial_tangent(
                q, delta_components, np.zeros(bundle.group.dim))
            return pair_derivative(Ad, q, v, spec)

        return TrivialLocalConnection(bundle, omega, name="derived")

    def rule(v: BundleTangent):
        return AlgebraElement.of(
            bundle.group, pair_derivative(Ad, v.base_point, v, spec))

    return GenericConnection(bundle, rule, name="derived")


def derive_horizontal(Ad: DiscreteConnectionForm, q: BundlePoint,
                      delta_m: TangentVector,
                      spec: DerivativeSpec = DerivativeSpec()) -> BundleTangent:
    """Derivative of the discrete horizontal lift in its base slot."""
    m = bundles.project(q)

    def f(t):
        stepped = ManifoldPoint.of(
            m.kind, m.kind.geodesic_step(m.coords, t * delta_m.components))
        return bundles.local_coords(q, discrete_horizontal_lift(Ad, q, stepped))

    comps = richardson_derivative(f, spec, check_consistency=True)
    return BundleTangent(q, comps)


def check_diagram(Ad: DiscreteConnectionForm, q: BundlePoint,
                  delta_m: TangentVector,
                  spec: DerivativeSpec = DerivativeSpec()) -> float:
    """Defect between the derived lift and the lift of the derived form."""
    direct = derive_horizontal(Ad, q, delta_m, spec)
    via_form = connections.horizontal_lift(derive_connection(Ad, spec), q,
                                           delta_m)
    return float(np.linalg.norm(direct.components - via_form.components))
