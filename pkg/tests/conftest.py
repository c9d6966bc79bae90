import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from oracles import Instance  # noqa: E402

from mmnoma.beamforming import BeamSet, Scheme  # noqa: E402
from mmnoma.geometry import ChannelVector, FieldClass  # noqa: E402
from mmnoma.scheduling import LinkState  # noqa: E402


def cgauss(rng, *shape):
    return (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / np.sqrt(2)


def _cols(vectors, n):
    if not vectors:
        return np.zeros((n, 0), dtype=complex)
    return np.column_stack(vectors)


def random_instance(rng, n_near=None, n_far=None, n_antennas=None, clustered=None,
                    form="literal"):
    """Random small link instance as both an oracle ``Instance`` and a ``LinkState``."""
    n = int(rng.integers(1, 9)) if n_antennas is None else n_antennas
    if n_near is None and n_far is None:
        total = int(rng.integers(1, 5))
        n_near = int(rng.integers(0, total + 1))
        n_far = total - n_near
    near_h = [cgauss(rng, n) * rng.uniform(0.2, 2.0) for _ in range(n_near)]
    far_h = [cgauss(rng, n) for _ in range(n_far)]
    far_pl = [rng.uniform(1.0, 5.0) ** rng.uniform(2.0, 4.0) for _ in range(n_far)]
    near_w = [cgauss(rng, n) * rng.uniform(0.1, 3.0) for _ in range(n_near)]
    far_w = [cgauss(rng, n) * rng.uniform(0.1, 3.0) for _ in range(n_far)]
    near_p = list(rng.uniform(0.0, 2.0, n_near))
    far_p = list(rng.uniform(0.0, 2.0, n_far))
    noise = float(rng.uniform(0.01, 1.0))
    if clustered is None:
        clustered = bool(rng.integers(0, 2))
    labels = list(rng.integers(0, 3, n_near + n_far)) if clustered else None
    rho = float(rng.uniform(0.0, 1.0))
    inst = Instance(
        [list(h) for h in near_h], [list(h) for h in far_h], far_pl,
        [list(w) for w in near_w], [list(w) for w in far_w],
        near_p, far_p, noise, labels, rho if clustered else 1.0,
    )
    far_ch = [ChannelVector(h, 1.0 / pl, j, FieldClass.FAR) for j, (h, pl) in enumerate(zip(far_h, far_pl))]
    beams = BeamSet(Scheme.RANDOM, _cols(near_w, n), _cols(far_w, n))
    state = LinkState(
        _cols(near_h, n), far_ch if far_ch else np.zeros((n, 0), dtype=complex), beams,
        np.array(near_p), np.array(far_p), noise,
        None if labels is None else np.array(labels), rho if clustered else 1.0, form,
    )
    return inst, state


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def pytest_terminal_summary(terminalreporter, config):
    lines = getattr(config, "_acceptance_lines", None)
    if not lines:
        return
    terminalreporter.section("acceptance criteria")
    for line in lines:
        terminalreporter.write_line(line)


@pytest.fixture
def record(request):
    """Log one PASS/FAIL line for the acceptance summary."""
    config = request.config
    if not hasattr(config, "_acceptance_lines"):
        config._acceptance_lines = []

    def _record(name, ok, detail=""):
        line = f"{'PASS' if ok else 'FAIL'}  {name}: {detail}"
        config._acceptance_lines.append(line)
        print(line)
        return ok

    return _record
