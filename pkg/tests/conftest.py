from math import lcm

import pytest

from cachenet.model import config_from_dimensions, derive_config, partition_dimensions
from cachenet.placement import needed_count, place_hypercube
from cachenet.scheduler import delta_hcb

PACKET_CAP = 100_000


def dof_grid(cap=PACKET_CAP):
    """Configs with delta in {1,2}, D_R in [delta+1..5], t_R in [1..3], D_T in [1..3].

    N is the smallest common multiple of D_T and D_R that is >= K_R so that
    the default demand (receiver j wants file j) is all-distinct.
    """
    out = []
    for delta in (1, 2):
        for d_r in range(delta + 1, 6):
            for t_r in (1, 2, 3):
                for d_t in (1, 2, 3):
                    base = lcm(d_t, d_r)
                    n = base * -(-(d_r * t_r) // base)
                    cfg = config_from_dimensions(d_t, delta * t_r, d_r, t_r, n=n)
                    packets = cfg.k_r * needed_count(cfg) * delta_hcb(cfg)
                    if packets <= cap:
                        out.append((cfg, packets))
    return out


@pytest.fixture
def worked():
    cfg = derive_config(4, 4, 4, 2, 2)
    dims = partition_dimensions(cfg)
    return cfg, dims, place_hypercube(cfg, dims)


@pytest.fixture
def cfg_2232():
    """D_T=2, t_T=2, D_R=3, t_R=2 with N=6 (K_T=4, K_R=6)."""
    cfg = config_from_dimensions(2, 2, 3, 2, n=6)
    dims = partition_dimensions(cfg)
    return cfg, dims, place_hypercube(cfg, dims)


_acceptance_results = []


def pytest_runtest_logreport(report):
    if report.when == "call" and "acceptance" in report.keywords:
        _acceptance_results.append((report.nodeid, report.outcome))


def pytest_terminal_summary(terminalreporter):
    if not _acceptance_results:
        return
    terminalreporter.section("acceptance criteria")
    for nodeid, outcome in _acceptance_results:
        name = nodeid.split("::")[-1]
        terminalreporter.write_line(f"{'PASS' if outcome == 'passed' else 'FAIL'}  {name}")
