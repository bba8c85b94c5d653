import numpy as np
import pytest

from jamcord.beads import BeadSpec, Variant


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    """One pass/fail line per acceptance criterion at the end of the run."""
    rows = {}
    for rep in terminalreporter.stats.get("passed", []):
        nodeid = getattr(rep, "nodeid", "")
        if "test_acceptance.py" in nodeid and rep.when == "call":
            rows[nodeid.split("::")[-1]] = "PASS"
    for status in ("failed", "error"):
        for rep in terminalreporter.stats.get(status, []):
            nodeid = getattr(rep, "nodeid", "")
            if "test_acceptance.py" in nodeid:
                rows[nodeid.split("::")[-1]] = "FAIL"
    if rows:
        terminalreporter.write_sep("=", "acceptance criteria")
        for name in sorted(rows):
            terminalreporter.write_line(f"{rows[name]}  {name}")


def make_bead(D1=6.0, variant=Variant.CUP_SHAPED, effective_angle=15.0,
              r1=2.0, r2=1.5, SD1=None, SD2=0.9, e=0.5, **overrides):
    if SD1 is None:
        # large enough that the clearance-implied angle clears the
        # effective angle and no consistency warning fires
        SD1 = SD2 + e + D1 * np.tan(np.radians(min(effective_angle, 89.0)) / 2) + 0.01
    params = dict(
        D1=D1, R1=D1 / 2, R2=D1 / 2, R3=D1 / 2,
        r1=r1, r2=r2, SD1=SD1, SD2=SD2, e=e,
        effective_angle=effective_angle, variant=variant,
    )
    params.update(overrides)
    return BeadSpec(**params)


def random_valid_bead(rng: np.random.Generator, variant=Variant.CUP_SHAPED):
    D1 = rng.uniform(2.0, 20.0)
    r2 = rng.uniform(0.2, 2.0)
    SD2 = rng.uniform(0.05, 0.3) * D1
    e = rng.uniform(0.02, 0.1) * D1
    # keep the clearance-implied angle above effective_angle: no warning noise
    angle = rng.uniform(5.0, 40.0)
    sd_gap = D1 * np.tan(np.radians(angle) / 2.0) + rng.uniform(0.01, 0.5)
    return BeadSpec(
        D1=D1, R1=D1 / 2, R2=D1 / 2, R3=D1 / 2,
        r1=r2 * rng.uniform(1.05, 3.0), r2=r2,
        SD1=SD2 + e + sd_gap, SD2=SD2, e=e,
        effective_angle=angle, variant=variant,
    )


@pytest.fixture
def rng():
    return np.random.default_rng(20260808)
