"""Weighted optimal-transport distances and hierarchical clustering for 2D curves.

Curves are (n, 2) float arrays. Configs and weight schemes are plain dicts
with the same fields as the JSON config files (or, for schemes, a bare kind
name such as "uniform").
"""

import json as _json

import numpy as np

from . import _curveot
from ._curveot import (
    CurveotError,
    adjusted_rand_index,
    construct_penalties,
    euclidean_cost,
    procrustes_distance,
    reduced_cost,
)

__all__ = [
    "CurveotError",
    "adjusted_rand_index",
    "build_measure",
    "cluster",
    "config",
    "construct_penalties",
    "cut_clusters",
    "distance",
    "euclidean_cost",
    "experiment",
    "oracle_solve",
    "pairwise_matrix",
    "preprocess",
    "procrustes_distance",
    "reduced_cost",
    "run_pair",
    "solve",
]

CurveotError.code = property(lambda self: self.args[0])
CurveotError.message = property(lambda self: self.args[1] if len(self.args) > 1 else "")


def _config_text(cfg):
    if cfg is None:
        return _curveot.default_config()
    if isinstance(cfg, int):
        return _curveot.experiment_preset(cfg)
    if isinstance(cfg, str):
        return cfg
    return _json.dumps(cfg)


def config(overrides=None, experiment=None):
    """Full config dict: defaults (or an experiment preset) with overrides applied."""
    base = _json.loads(_config_text(experiment))
    base.update(overrides or {})
    return _json.loads(_curveot.normalize_config(_json.dumps(base)))


def experiment(number):
    """Config dict for experiment preset 1..8."""
    return _json.loads(_curveot.experiment_preset(number))


def build_measure(points, scheme="uniform"):
    text = scheme if isinstance(scheme, str) else _json.dumps(scheme)
    return _curveot.build_measure(points, text)


def preprocess(points, cfg=None):
    return _curveot.preprocess(points, _config_text(cfg))


def solve(cost, beta, alpha, variant="balanced", nu=None, mu=None):
    """Transport plan dict: pi, objective, transported_mass, duals p/q/t and a verification report."""
    return _curveot.solve(cost, beta, alpha, variant, nu, mu)


def oracle_solve(cost, beta, alpha, variant="balanced", nu=None, mu=None):
    """Same LP solved by the dense reference simplex (n * m <= 400)."""
    return _curveot.oracle_solve(cost, beta, alpha, variant, nu, mu)


def run_pair(a, b, cfg=None):
    return _curveot.run_pair(a, b, _config_text(cfg))


def distance(a, b, cfg=None):
    return run_pair(a, b, cfg)["distance"]


def pairwise_matrix(curves, cfg=None, ids=None, jobs=0):
    """Symmetric distance matrix; `curves` is a list of arrays or a dict id -> array."""
    if isinstance(curves, dict):
        ids = list(curves.keys())
        curves = list(curves.values())
    if ids is None:
        ids = [f"c{i}" for i in range(len(curves))]
    return _curveot.pairwise_matrix([np.asarray(c, dtype=float) for c in curves], list(ids), _config_text(cfg), jobs)


def cluster(matrix, labels=None, linkage="average"):
    """Dendrogram dict: linkage ((N-1) x 4), newick, leaf_order and the JSON form."""
    matrix = np.asarray(matrix, dtype=float)
    if labels is None:
        labels = [f"c{i}" for i in range(matrix.shape[0])]
    out = _curveot.hierarchical_cluster(matrix, list(labels), linkage)
    out["svg"] = _curveot.dendrogram_svg(out["json"])
    return out


def cut_clusters(dendrogram, k):
    """Flat cluster labels from a dendrogram dict returned by cluster()."""
    return _curveot.cut_clusters(dendrogram["json"], k)
