"""Smoke test for the trimoip Python module.

Build and install first, e.g. ``maturin develop -m crates/py/Cargo.toml``.
"""

import trimoip


def main():
    p = trimoip.Problem.knapsack(
        [[4, 2, 3, 6], [5, 3, 1, 8], [6, 4, 2, 7]], [1, 1, 1, 1], 4
    )
    assert p.kind == "knapsack" and p.n == 4 and p.m == 1
    assert p.senses == ["max", "max", "max"]
    assert p.evaluate([1, 0, 1, 0]) == [-7, -6, -8]
    assert p.evaluate_original([1, 0, 1, 0]) == [7, 6, 8]
    assert p.is_feasible([1, 1, 1, 1])

    # reading the instance back from its text form gives the same problem
    q = trimoip.Problem.from_text(p.to_text())
    assert q.to_text() == p.to_text()

    ks = trimoip.Problem.generate_knapsack(10, seed=7)
    reference = trimoip.exact_front(ks)
    assert reference == trimoip.filter_nondominated(reference)

    lb = trimoip.compute_lb_set(ks)
    assert lb and all(len(pt.x) == 10 for pt in lb)

    scores = {}
    for variant in ("RD", "PI"):
        result = trimoip.run(ks, variant=variant, seed=1)
        ys = [y for _, y in result.front]
        assert ys == sorted(trimoip.filter_nondominated(ys))
        assert all(ks.is_feasible(list(x)) for x, _ in result.front)
        assert result.stats["front_size"] == len(ys)
        scores[variant] = trimoip.hv_percent(ys, reference)
    assert 0 < scores["RD"] <= scores["PI"] <= 100 + 1e-9
    first, second = (trimoip.run(ks, variant="PI", seed=1) for _ in range(2))
    assert first.front == second.front

    ap = trimoip.Problem.generate_assignment(4, seed=3)
    for pt in trimoip.compute_lb_set(ap):
        assert all(abs(v - round(v)) < 1e-6 for v in pt.x)

    assert abs(trimoip.hypervolume([(0.2, 0.2, 0.2)]) - 0.512) < 1e-12
    assert abs(trimoip.hypervolume([(0, 0.5, 0.5), (0.5, 0, 0.5)]) - 0.375) < 1e-12

    try:
        trimoip.run(ks, variant="nope")
    except ValueError:
        pass
    else:
        raise AssertionError("unknown variant accepted")

    print("variants:", ", ".join(trimoip.VARIANTS))
    print("HV%% RD %.2f, PI %.2f" % (scores["RD"], scores["PI"]))
    print("smoke test passed")


if __name__ == "__main__":
    main()
