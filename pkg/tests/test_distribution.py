import json
import math

import numpy as np
import pytest

from jordan_attractors import distribution as dist


def _measure(taus, **kw):
    return dist.EmpiricalMeasure.from_points(taus, dist.HistogramSpec(**kw))


def test_self_distance_zero():
    m = _measure(dist.hyperbolic_uniform_sample(500, 20, np.random.default_rng(0)), y_max=20)
    assert dist.compare(m, m).tv == 0


def test_hyperbolic_sample_matches_hyperbolic_rho():
    rng = np.random.default_rng(1)
    spec = dict(nx=10, ny=10, y_max=30.0)
    m = _measure(dist.hyperbolic_uniform_sample(200000, 30, rng), **spec)
    assert dist.compare(m, dist.DensityRho("hyperbolic")).tv < 0.02


def test_negative_control():
    # everything piled into one bin is far from any smooth density
    m = _measure([0.01 + 1.5j] * 200, nx=10, ny=10, y_max=30)
    for name in dist.RHO_INTERPRETATIONS:
        assert dist.compare(m, dist.DensityRho(name)).tv > 0.5


def test_rho_normalized_and_nonnegative():
    spec = dist.HistogramSpec(nx=8, ny=8, y_max=50)
    for name in dist.RHO_INTERPRETATIONS:
        b = dist.DensityRho(name).bin_masses(spec)
        assert b.min() >= 0 and b.sum() == pytest.approx(1)
        assert np.all(b[:, -1] == 0)


def test_angular_closed_form():
    rng = np.random.default_rng(2)
    psi = np.linspace(0, 2 * np.pi, 200001)[:-1]
    for _ in range(5):
        A, B = rng.normal(), rng.normal() + 1j * rng.normal()
        f = A + 2 * abs(B) * np.cos(psi)
        quad = np.mean(np.where(f > 0, f, 0)) * 2 * np.pi
        assert dist._angular(A, B) == pytest.approx(quad, rel=1e-4, abs=1e-6)


def test_outside_domain_rejected():
    with pytest.raises(ValueError):
        _measure([0.1 + 0.5j])


def test_unknown_interpretation():
    with pytest.raises(ValueError):
        dist.DensityRho("flat")


def test_counts_monotone_and_exact_grouping():
    a, b = dist.attractor_sample(200), dist.attractor_sample(400)
    assert len(a) < len(b)
    ex = dist.attractor_sample(400, grouping="exact")
    assert ex and all(c.disc == -400 for c in ex)


def test_merge():
    rng = np.random.default_rng(3)
    pts = dist.hyperbolic_uniform_sample(300, 20, rng)
    m1, m2 = _measure(pts[:100], y_max=20), _measure(pts[100:], y_max=20)
    m = m1.merge(m2)
    assert m.total == 300 and np.array_equal(m.counts, _measure(pts, y_max=20).counts)
    with pytest.raises(ValueError):
        m1.merge(_measure(pts, y_max=10))


def test_exports(tmp_path):
    pts = [c.tau for c in dist.attractor_sample(500)]
    m = _measure(pts, nx=5, ny=5, y_max=math.sqrt(500))
    rho = dist.DensityRho()
    dist.histogram_csv(m, rho, tmp_path / "h.csv")
    dist.plot_json(m, rho, tmp_path / "h.json")
    lines = (tmp_path / "h.csv").read_text().splitlines()
    assert len(lines) == 1 + 5 * 6
    doc = json.loads((tmp_path / "h.json").read_text())
    assert sum(map(sum, doc["counts"])) == len(pts)
