import io
from typing import List, Tuple

import numpy as np
import pytest
from hypothesis import strategies as st

from crprolong import cli
from crprolong.scalar import Scalar
from crprolong.symexpr import Const, Expr, add, conj, inv, mul, neg, z, zbar


def run_cli(argv: List[str]) -> Tuple[int, str, str]:
    out, err = io.StringIO(), io.StringIO()
    code = cli.run(argv, stdout=out, stderr=err)
    return code, out.getvalue(), err.getvalue()


@pytest.fixture
def cli_run(monkeypatch):
    monkeypatch.delenv("CRPROLONG_SEED", raising=False)
    return run_cli


def fd_wirtinger(fn, p, k: int, bar: bool, h: float = 1e-6) -> complex:
    """Central-difference d/dz_k (or d/dzbar_k) of a numeric function at p."""
    p = np.array(p, dtype=complex)
    e = np.zeros_like(p)
    e[k - 1] = 1.0
    dx = (fn(p + h * e) - fn(p - h * e)) / (2 * h)
    dy = (fn(p + 1j * h * e) - fn(p - 1j * h * e)) / (2 * h)
    return (dx + 1j * dy) / 2 if bar else (dx - 1j * dy) / 2


# random rational expressions in n=2 coordinates
N_RANDOM = 2

_scalars = st.builds(lambda a, b, d: Scalar(a, b) / d,
                     st.integers(-3, 3), st.integers(-3, 3), st.integers(1, 3))
_leaves = st.one_of(
    st.integers(1, N_RANDOM).map(z),
    st.integers(1, N_RANDOM).map(zbar),
    _scalars.map(Const),
)


def _safe_inv(e: Expr) -> Expr:
    # 2 + e*conj(e)/8 stays away from 0 on the sampling polydisc for small e
    return inv(add(Const(Scalar(2)), mul(Const(Scalar(1) / 8), e, conj(e))))


def _extend(children):
    return st.one_of(
        st.lists(children, min_size=2, max_size=3).map(lambda xs: add(*xs)),
        st.lists(children, min_size=2, max_size=3).map(lambda xs: mul(*xs)),
        children.map(neg),
        children.map(conj),
        children.map(_safe_inv),
    )


rational_exprs = st.recursive(_leaves, _extend, max_leaves=8)


def random_expr(rng: np.random.Generator, n: int = N_RANDOM, depth: int = 3) -> Expr:
    """Seeded random rational expression (numpy counterpart of ``rational_exprs``)."""
    if depth == 0 or rng.random() < 0.25:
        r = rng.random()
        j = int(rng.integers(1, n + 1))
        if r < 0.4:
            return z(j)
        if r < 0.8:
            return zbar(j)
        return Const(Scalar(int(rng.integers(-3, 4)), int(rng.integers(-3, 4))) / int(rng.integers(1, 4)))
    kind = int(rng.integers(0, 5))
    if kind == 0:
        return add(*(random_expr(rng, n, depth - 1) for _ in range(int(rng.integers(2, 4)))))
    if kind == 1:
        return mul(*(random_expr(rng, n, depth - 1) for _ in range(int(rng.integers(2, 4)))))
    if kind == 2:
        return neg(random_expr(rng, n, depth - 1))
    if kind == 3:
        return conj(random_expr(rng, n, depth - 1))
    return _safe_inv(random_expr(rng, n, depth - 1))


_SESSION = {}


def pytest_sessionstart(session):
    import time
    _SESSION["t0"] = time.perf_counter()


def pytest_terminal_summary(terminalreporter):
    import time
    if "t0" in _SESSION:
        dt = time.perf_counter() - _SESSION["t0"]
        verdict = "PASS" if dt < 60 else "FAIL"
        terminalreporter.write_line(f"full suite wall-clock: {dt:.1f} s (budget 60 s): {verdict}")
