import numpy as np
import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from spectra.lattice import make_lattice

settings.register_profile(
    "default", deadline=None, suppress_health_check=[HealthCheck.too_slow], print_blob=True
)
settings.load_profile("default")

# columns are the basis vectors
Z2 = [[1, 0], [0, 1]]
TILTED = [[2, 1], [0, 2]]  # span{(2,0),(1,2)}
CHECKER = [[1, 1], [1, -1]]  # span{(1,1),(1,-1)}
P3 = [[1, 3], [1, 0]]  # span{(1,1),(3,0)}
Z3 = np.eye(3, dtype=int).tolist()


@st.composite
def bases(draw, dims=(2, 3), bound=3, max_index=None):
    d = draw(st.sampled_from(dims))
    entries = st.integers(-bound, bound)
    b = draw(st.lists(st.lists(entries, min_size=d, max_size=d), min_size=d, max_size=d))
    det = round(np.linalg.det(np.array(b, dtype=float)))
    if det == 0 or (max_index is not None and abs(det) > max_index):
        from hypothesis import reject

        reject()
    return b


@pytest.fixture(scope="session")
def lattices():
    return {
        "Z2": make_lattice(Z2),
        "tilted": make_lattice(TILTED),
        "checker": make_lattice(CHECKER),
        "p3": make_lattice(P3),
        "Z3": make_lattice(Z3),
    }


def pytest_terminal_summary(terminalreporter):
    import sys

    mod = sys.modules.get("test_acceptance")
    results = getattr(mod, "RESULTS", None)
    if not results:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(results):
        ok, secs, budget, msg = results[n]
        limit = f" / {budget} s" if budget else ""
        line = f"criterion {n:2d}: {'PASS' if ok else 'FAIL'} ({secs:.2f} s{limit}) {msg}"
        terminalreporter.write_line(line)
