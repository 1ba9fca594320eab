"""Randomised exact-identity checks of the finite algebra and the flow geometry.

Each check returns the number of violated instances; a correct build returns
zero everywhere.
"""
from __future__ import annotations

import math

import numpy as np

from .central_sampler import OnCircle, PointConfig, make_lambda, sample_positions
from .flow_spectrum import delta_arc, distance, eval_eigenfunction, flow_apply
from .perm_core import Permutation, conjugate, project, shift_count
from .rng import Stream

FLOAT_TOL = 1e-12

# perimeters used by the geometric checks; includes an irrational-ish one
CHECK_LAMBDA = (0.45, 0.3, 1 / math.pi / 4, 0.04)


def _random_perms(stream: Stream, count: int, max_size: int):
    u = stream.uniforms(np.arange(count * (max_size + 1), dtype=np.uint64)).reshape(count, max_size + 1)
    sizes = 2 + (u[:, 0] * (max_size - 1)).astype(int)
    keys = np.where(np.arange(max_size)[None, :] < sizes[:, None], u[:, 1:], 2.0)
    order = np.argsort(keys, axis=1).tolist()
    for row, n in zip(order, sizes.tolist()):
        yield Permutation(tuple(range(n)), tuple(row[:n]))


def _circ(config: PointConfig, a: float, b: float, k: int) -> float:
    """Circular distance between two representatives on circle k."""
    return distance(config, OnCircle(k, a), OnCircle(k, b))


def check_projection_composition(instances: int, stream: Stream, max_size: int = 9) -> int:
    fails = 0
    u = stream.child(1).uniforms(np.arange(instances * 2 * max_size, dtype=np.uint64)).reshape(instances, 2, max_size)
    for p, (uj, ui) in zip(_random_perms(stream.child(0), instances, max_size), u.tolist()):
        n = len(p)
        mid = [x for x in range(n) if uj[x] < 0.7] or [0]
        small = [x for x in mid if ui[x] < 0.7] or mid[:1]
        fails += project(project(p, mid), small) != project(p, small)
    return fails


def check_conjugation(instances: int, stream: Stream, max_size: int = 9) -> int:
    fails = 0
    u = stream.child(1).uniforms(np.arange(instances * max_size, dtype=np.uint64)).reshape(instances, max_size)
    for p, row in zip(_random_perms(stream.child(0), instances, max_size), u):
        g = Permutation(p.elements, tuple(np.argsort(row[: len(p)]).tolist()))
        c = conjugate(p, g)
        images = {frozenset(g(x) for x in cyc) for cyc in p.cycles}
        fails += images != {frozenset(cyc) for cyc in c.cycles}
        fails += sorted(map(len, c.cycles)) != sorted(map(len, p.cycles))
    return fails


def check_shift_cocycle(instances: int, stream: Stream, max_size: int = 12) -> int:
    fails = 0
    u = stream.child(1).uniforms(np.arange(instances, dtype=np.uint64), words=3)
    for p, (a, b, c) in zip(_random_perms(stream.child(0), instances, max_size), u.tolist()):
        cyc = max(p.cycles, key=len)
        ell = len(cyc)
        x, y, z = (cyc[int(v * ell)] for v in (a, b, c))
        total = shift_count(p, x, y) + shift_count(p, y, z) - shift_count(p, x, z)
        fails += total % ell != 0
        fails += total not in (0, ell)
    return fails


def _geometry(instances: int, stream: Stream):
    """Random points on CHECK_LAMBDA (3 per instance) and pairs of flow times."""
    lam = make_lambda(CHECK_LAMBDA)
    config = sample_positions(lam, range(3 * instances), stream.child(0))
    pts = [config[x] for x in range(3 * instances)]
    alphas = (stream.child(1).uniforms(np.arange(instances, dtype=np.uint64), words=2) - 0.5) * 6.0
    return config, pts, alphas.tolist()



def check_flow(instances: int, stream: Stream, geometry=None) -> int:
    """Group law, period and isometry of the rotation flow."""
    config, pts, alphas = geometry or _geometry(instances, stream)
    fails = 0
    for i, (a, b) in enumerate(alphas):
        p, q = pts[3 * i], pts[3 * i + 1]
        fails += distance(config, flow_apply(config, flow_apply(config, p, a), b),
                          flow_apply(config, p, a + b)) > FLOAT_TOL
        if isinstance(p, OnCircle):
            fails += distance(config, flow_apply(config, p, config.lam.perimeter(p.circle)), p) > FLOAT_TOL
        else:
            fails += flow_apply(config, p, a) != p
        fails += abs(distance(config, flow_apply(config, p, a), flow_apply(config, q, a))
                     - distance(config, p, q)) > FLOAT_TOL
    return fails


def check_delta_cocycle(instances: int, stream: Stream, geometry=None) -> int:
    config, pts, _ = geometry or _geometry(instances, stream)
    by_circle: dict[int, list] = {}
    for p in pts:
        if isinstance(p, OnCircle):
            by_circle.setdefault(p.circle, []).append(p)
    u = stream.child(5).uniforms(np.arange(instances, dtype=np.uint64), words=4).tolist()
    circles = sorted(by_circle)
    fails = 0
    for w in u:
        k = circles[int(w[0] * len(circles))]
        group = by_circle[k]
        p, q, r = (group[int(v * len(group))] for v in w[1:])
        lam = config.lam.perimeter(k)
        lhs = delta_arc(config, p, q).value + delta_arc(config, q, r).value
        fails += _circ(config, lhs % lam, delta_arc(config, p, r).value, k) > FLOAT_TOL
        fails += delta_arc(config, p, p).value != 0.0
        fails += _circ(config, delta_arc(config, p, q).value, (-delta_arc(config, q, p).value) % lam, k) > FLOAT_TOL
    return fails


def check_metric(instances: int, stream: Stream, geometry=None) -> int:
    config, pts, _ = geometry or _geometry(instances, stream)
    fails = 0
    for i in range(instances):
        p, q, r = pts[3 * i: 3 * i + 3]
        d_pq, d_qp = distance(config, p, q), distance(config, q, p)
        fails += abs(d_pq - d_qp) > FLOAT_TOL
        fails += distance(config, p, p) != 0.0
        fails += (d_pq == 0.0) != (p == q)
        fails += distance(config, p, r) > d_pq + distance(config, q, r) + FLOAT_TOL
        fails += not 0.0 <= d_pq <= 1.0
    return fails


def exactness_suite(instances: int = 10_000, seed: int = 0xC1C1E5) -> dict[str, int]:
    """Failure counts of every exact identity over ``instances`` random cases each."""
    base = Stream.from_seed(seed).child(99)
    # the three geometric checks share one random configuration
    geo_stream = base.child(4)
    geo = _geometry(instances, geo_stream)
    return {
        "projection_composition": check_projection_composition(instances, base.child(1)),
        "conjugation_cycle_images": check_conjugation(instances, base.child(2)),
        "shift_count_cocycle": check_shift_cocycle(instances, base.child(3)),
        "flow_group_period_isometry": check_flow(instances, geo_stream, geo),
        "delta_cocycle": check_delta_cocycle(instances, geo_stream, geo),
        "metric_axioms": check_metric(instances, geo_stream, geo),
    }


def generator_check(triples: int = 1000, seed: int = 0xC1C1E5, steps=(1e-3, 1e-4, 1e-5),
                    max_multiple: int = 5) -> tuple[int, float]:
    """Finite-difference derivative of eigenfunctions along the flow.

    For admissible ``a = 2 pi m / lambda_k`` checks
    ``|(f(S^h y) - f(y)) / h - i a f(y)| <= a^2 h``.  Returns the number of
    violations and the largest observed error / bound ratio.
    """
    stream = Stream.from_seed(seed).child(98)
    lam = make_lambda(CHECK_LAMBDA)
    config = sample_positions(lam, range(4 * triples), stream.child(0))
    on = [config[x] for x in range(4 * triples) if isinstance(config[x], OnCircle)]
    by_circle: dict[int, list] = {}
    for p in on:
        by_circle.setdefault(p.circle, []).append(p)
    u = stream.child(1).uniforms(np.arange(triples, dtype=np.uint64), words=4).tolist()
    fails = 0
    worst = 0.0
    for w in u:
        base = on[int(w[0] * len(on))]
        group = by_circle[base.circle]
        y = group[int(w[1] * len(group))]
        m = 1 + int(w[2] * max_multiple)
        if w[3] < 0.5:
            m = -m
        a = 2 * math.pi * m / lam.perimeter(base.circle)
        fy = eval_eigenfunction(config, base, y, a)
        for h in steps:
            fh = eval_eigenfunction(config, base, flow_apply(config, y, h), a)
            err = abs((fh - fy) / h - 1j * a * fy)
            bound = a * a * h
            worst = max(worst, err / bound)
            fails += err > bound
    return fails, worst
