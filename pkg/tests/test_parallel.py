import numpy as np

from subfn._parallel import ordered_map, worker_count
from subfn.calculus import SubordinationPlan, subordinate_apply
from subfn.semigroup import HeatSemigroup, periodic_grid
from subfn.subordinator import ContourConfig, Stable, stable_density_contour


def test_worker_count(monkeypatch):
    monkeypatch.setenv("SUBFN_THREADS", "3")
    assert worker_count() == 3
    monkeypatch.setenv("SUBFN_THREADS", "0")
    assert 1 <= worker_count() <= 8
    monkeypatch.setenv("SUBFN_THREADS", "many")
    assert 1 <= worker_count() <= 8


def test_ordered_map_keeps_order(monkeypatch):
    monkeypatch.setenv("SUBFN_THREADS", "4")
    assert ordered_map(lambda v: v * v, range(50)) == [v * v for v in range(50)]
    assert ordered_map(abs, []) == []


def test_results_do_not_depend_on_thread_count(monkeypatch):
    s = np.geomspace(0.01, 100.0, 300)
    x = periodic_grid(np.cos)
    plan = SubordinationPlan(Stable(0.6), n_atoms=1500, contour=ContourConfig(nodes=15))
    out = []
    for threads in ("1", "4"):
        monkeypatch.setenv("SUBFN_THREADS", threads)
        out.append((stable_density_contour(0.6, 1.0, s),
                    subordinate_apply(HeatSemigroup(1), plan, 1.0, x).samples))
    assert out[0][0].tobytes() == out[1][0].tobytes()
    assert out[0][1].tobytes() == out[1][1].tobytes()
