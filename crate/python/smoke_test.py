"""Quick end-to-end check of the Python bindings.

Build first, e.g. `maturin develop --release -m crates/py/Cargo.toml`, then run
`python python/smoke_test.py`.
"""

import json
import math

import scps_py as s


def main():
    tri = s.Instance.tri_station("a")
    res = s.solve(tri, "le")
    assert res.plan.visits == [0, 1, 2], res.plan
    assert abs(res.cost.alpha - 6.0) < 1e-12
    assert res.stats["labels_created"] > 0

    plan = s.Plan([0, 2, 1])
    assert abs(s.expected_cost(tri, plan).alpha - 8.0) < 1e-12

    inst = s.Instance.generate(variant="b", chargers=7, seed=3)
    assert inst.chargers == 7 and inst.variant == "B"
    again = s.Instance.from_json(inst.to_json())
    assert again.to_json() == inst.to_json()

    best_plan, best_alpha = s.enumerate_optimal(inst)
    exact = s.solve(inst, "le")
    assert abs(exact.cost.alpha - best_alpha) < 1e-9
    for algo in ("lh", "ro", "greedy", "naive"):
        assert s.solve(inst, algo).cost.alpha >= best_alpha - 1e-9, algo

    plans = [("le", exact.plan), ("greedy", s.solve(inst, "greedy").plan)]
    report = s.simulate(inst, plans, runs=2000, seed=11)
    assert report == s.simulate(inst, plans, runs=2000, seed=11)
    assert [m["algorithm"] for m in report["algorithms"]] == ["le", "greedy"]
    assert all(m["success_rate"] == 1.0 for m in report["algorithms"])

    want = 0.5 * (1 - math.exp(-2))
    assert abs(s.recovery_probability(0.5, 120.0, 120.0) - want) < 1e-12

    red_inst, info = s.reduce_tsp([[0, 1, 2], [1, 0, 1], [2, 1, 0]], theta=4, q=0.95)
    assert abs(info["threshold"] - 73.205) < 1e-3
    assert red_inst.chargers == 3

    try:
        s.solve(tri, "nope")
    except ValueError:
        pass
    else:
        raise AssertionError("unknown algorithm accepted")

    print(json.dumps({"alpha": exact.cost.alpha, "oracle": best_alpha, "ok": True}))


if __name__ == "__main__":
    main()
