import numpy as np
import pytest
from hypothesis import strategies as st

from aoi_jamgame.model import JamDistribution, equilibrium_distribution, validate_config


@pytest.fixture
def cfg41():
    return validate_config(4, 1)


@pytest.fixture
def fstar41(cfg41):
    return equilibrium_distribution(cfg41)


@st.composite
def jam_distributions(draw, a_max=4.0, max_atoms=4, max_pieces=3, allow_pieces=True):
    """Random mixed law on [0, a_max] with a positive mean."""
    n_atoms = draw(st.integers(0, max_atoms))
    n_pieces = draw(st.integers(0, max_pieces)) if allow_pieces else 0
    if n_atoms + n_pieces == 0:
        n_atoms = 1
    locs = draw(st.lists(st.floats(0, a_max), min_size=n_atoms, max_size=n_atoms))
    cuts = sorted(draw(st.lists(st.floats(0, a_max), min_size=2 * n_pieces,
                                max_size=2 * n_pieces, unique=True)))
    pieces = [(cuts[2 * i], cuts[2 * i + 1]) for i in range(n_pieces)]
    pieces = [(lo, hi) for lo, hi in pieces if hi - lo > 1e-3]
    weights = draw(st.lists(st.floats(0.05, 1.0), min_size=len(locs) + len(pieces),
                            max_size=len(locs) + len(pieces)))
    if not weights:
        locs, weights = [a_max / 2], [1.0]
    total = sum(weights)
    atoms = [(x, w / total) for x, w in zip(locs, weights)]
    pcs = [(lo, hi, w / total / (hi - lo)) for (lo, hi), w in zip(pieces, weights[len(locs):])]
    dist = JamDistribution(tuple(atoms), tuple(pcs))
    if dist.support_max <= 1e-6:
        dist = JamDistribution(((a_max, 1.0),))
    return dist


def atomic_best_response(dist):
    """Independent oracle: exact fixed point for a purely atomic law.

    Between consecutive support points the fixed-point equation is the
    quadratic P b^2 + 2 M1 b - S2 = 0 with P the mass at or below b and M1, S2
    the first and second moments above b.
    """
    xs = np.array([x for x, _ in dist.atoms])
    ms = np.array([m for _, m in dist.atoms])
    edges = np.concatenate([[0.0], xs, [np.inf]])
    for lo, hi in zip(edges, edges[1:]):
        below = xs <= lo
        P = ms[below].sum()
        M1 = (ms * xs)[~below].sum()
        S2 = (ms * xs * xs)[~below].sum()
        if P == 0:
            b = S2 / (2 * M1)
        else:
            b = (-M1 + np.sqrt(M1 * M1 + P * S2)) / P
        if lo <= b <= hi:
            return float(b)
    raise AssertionError("no root found")


ACCEPTANCE_LINES = []


@pytest.fixture
def acceptance():
    """Record one PASS/FAIL line per acceptance criterion for the run summary."""
    def record(n, passed, text):
        line = f"[criterion {n}] {'PASS' if passed else 'FAIL'}  {text}"
        ACCEPTANCE_LINES.append(line)
        print(line)
        return passed
    return record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
