"""Numerical connections on principal bundles, continuous and discrete.

Modules:

* ``groups`` -- matrix Lie groups (translations, tori, SO(3), products);
* ``manifolds`` -- base manifolds, metrics, retractions;
* ``bundles`` -- trivial bundles and the Hopf bundle;
* ``connections`` -- connection one-forms, lifts, curvature;
* ``discrete`` -- discrete connection forms and discrete curvature;
* ``derivation`` -- differentiating discrete data back to connections;
* ``integration`` -- retraction-based integration of connections;
* ``abelian`` -- descent, flat and curvature-matched integration;
* ``scenarios`` / ``cli`` -- the JSON-driven verification harness.
"""

__version__ = "0.1.0"
