import numpy as np
import pytest

from questeig.errors import BracketError, ConvergenceError
from questeig.rootfind import Bracket, bracket_root, find_zero


def test_known_root_sqrt2():
    root = find_zero(lambda x: x * x - 2.0, bracket_root(lambda x: x * x - 2.0, 1.0, 2.0))
    assert abs(root - np.sqrt(2.0)) < 1e-7
    assert abs(root - np.sqrt(2.0)) < 1e-12  # in practice much tighter


def test_linear_lands_exactly():
    f = lambda x: x - 0.5
    root = find_zero(f, bracket_root(f, 0.0, 1.0))
    assert root == 0.5


def test_reciprocal_square_closed_form():
    # (1 - x)^2 = 1/3 with x < 1
    f = lambda x: 1.0 / (1.0 - x) ** 2 - 3.0
    root = find_zero(f, bracket_root(f, 0.0, 0.9))
    expected = 1.0 - 1.0 / np.sqrt(3.0)
    assert abs(root - expected) < 1e-12


def test_infinite_endpoint_value():
    # pole at the lower end, as happens when a grid point sits on a cluster
    def f(x):
        return np.inf if x == 0 else 1.0 / x - 1.0

    root = find_zero(f, Bracket(0.0, 2.0, np.inf, -0.5))
    assert abs(root - 1.0) < 1e-12


def test_invalid_bracket():
    with pytest.raises(BracketError):
        Bracket(0.0, 1.0, 1.0, 2.0)
    with pytest.raises(BracketError):
        Bracket(1.0, 0.0, -1.0, 2.0)
    with pytest.raises(BracketError):
        Bracket(0.0, 1.0, np.nan, 2.0)


def test_max_iter_carries_best():
    f = lambda x: x * x - 2.0
    with pytest.raises(ConvergenceError) as err:
        find_zero(f, bracket_root(f, 1.0, 2.0), max_iter=2)
    assert 1.0 <= err.value.best <= 2.0


def test_root_stays_inside_bracket():
    rng = np.random.default_rng(7)
    for _ in range(50):
        r = rng.uniform(-3, 3)
        shift = rng.uniform(0.1, 2.0, size=2)
        f = lambda x, r=r: (x - r) ** 3 + 0.2 * (x - r)
        lo, hi = r - shift[0], r + shift[1]
        root = find_zero(f, bracket_root(f, lo, hi))
        assert lo <= root <= hi
        assert abs(root - r) < 1e-7


def test_converged_result_independent_of_max_iter():
    f = lambda x: np.tanh(x) - 0.3
    b = bracket_root(f, -2.0, 2.0)
    assert find_zero(f, b, max_iter=50) == find_zero(f, b, max_iter=200)
