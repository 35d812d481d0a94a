import pytest

from reeb_lab.census import counting


def test_fixed_point_count():
    assert counting.fixed_point_count(2, 0) == 3
    assert counting.fixed_point_count(2, 5) == 8
    assert counting.fixed_point_count(3, 2) == 8


@pytest.mark.parametrize("k", range(3, 101))
def test_realize_reeb_n2(k):
    r = counting.realize_reeb(2, k)
    assert r.feasible and counting.fixed_point_count(2, r.a) == k


def test_realize_reeb_infeasible():
    assert not counting.realize_reeb(2, 2).feasible
    r = counting.realize_reeb(3, 5)
    assert not r.feasible and "mod" in r.reason
    with pytest.raises(ValueError):
        counting.realize_reeb(1, 3)


def test_plan_examples():
    p = counting.realize_hypersurface(2, 45)
    assert (p.b, p.c, p.plugs) == (6, 0, 0)
    assert p.trace == [3, 10, 17, 24, 31, 38, 45]
    p = counting.realize_hypersurface(2, 0)
    assert p.plugs == 3 and p.trace == [3, 2, 1, 0]
    assert not counting.realize_hypersurface(1, 1).feasible
    assert counting.realize_hypersurface(1, 2).trace == [2]


def test_brute_force_agreement():
    for n in (1, 2, 3):
        for k in range(0, 201):
            assert counting.realize_hypersurface(n, k).feasible == counting.brute_force_feasible(n, k), (n, k)


def test_plans_are_minimal_in_plugs():
    for n in (2, 3):
        for k in range(0, 201):
            p = counting.realize_hypersurface(n, k)
            if not p.feasible:
                continue
            assert p.count() == k
            # no plan with fewer plugs exists
            for d in range(p.plugs):
                assert counting._surgeries(n, k + d - (n + 1)) is None


@pytest.mark.parametrize("n", range(2, 11))
def test_threshold(n):
    t = counting.threshold(n)
    assert t == 16 * n * n - 11 * n + 3 == n + 1 + (4 * n - 2) * (4 * n - 1)
    assert t == counting.semigroup_onset(n)
    assert t == n + 1 + counting.frobenius_two(4 * n - 1, 4 * n) + 1


def test_frobenius():
    assert counting.frobenius_two(3, 4) == 5
    assert counting.frobenius_two(7, 8) == 41
    with pytest.raises(ValueError):
        counting.frobenius_two(4, 6)


def test_consecutive_block():
    assert counting.consecutive_block(2) == list(range(45, 52))


def test_dimension_three():
    assert [k for k in range(0, 50) if counting.realize_hypersurface(1, k).feasible] == list(range(2, 50))


def test_bad_arguments():
    with pytest.raises(ValueError):
        counting.realize_hypersurface(0, 5)
    assert not counting.realize_hypersurface(2, -1).feasible


def test_weight_vector():
    assert counting.WeightVector((1, 2)).effective_isolated
    assert counting.WeightVector((2, 4)).problems()
    assert counting.WeightVector((1, 1)).problems()
    assert counting.WeightVector((0, 1)).problems()
    w = counting.WeightVector((1, 3))
    assert [counting.moment_value(w, z) for z in counting.fixed_points(w)] == [0.0, 0.5, 1.5]
    with pytest.raises(ValueError):
        counting.moment_value(w, [0, 0, 0])
