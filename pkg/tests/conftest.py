import numpy as np
import pytest

from aircomp.model import SystemConfig, derive_rng, generate_channel_instance


def make_case(seed, num_wds=4, num_rx_antennas=2, power=2.0, est_error_var=0.1,
              noise_var=0.5):
    """Config plus one channel-estimate draw, reproducible from ``seed``."""
    rng = derive_rng(seed)
    config = SystemConfig.uniform(num_wds, num_rx_antennas, power, est_error_var, noise_var,
                                  rng.uniform(0.5, 1.5, num_wds))
    return config, generate_channel_instance(config, rng).est_channel


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def worked_siso():
    """K=1, h=1, P=1, no estimation error, unit noise."""
    config = SystemConfig.uniform(1, 1, power=1.0, est_error_var=0.0, noise_var=1.0)
    return config, np.array([[1.0 + 0j]])


# criterion id -> list of (part, passed, detail); printed after the run
ACCEPTANCE: dict[str, list[tuple[str, bool, str]]] = {}


def record(criterion: str, passed: bool, detail: str, part: str = "") -> None:
    ACCEPTANCE.setdefault(criterion, []).append((part, bool(passed), detail))
    print(f"[{'PASS' if passed else 'FAIL'}] criterion {criterion}{part}: {detail}")


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for crit in sorted(ACCEPTANCE, key=int):
        parts = ACCEPTANCE[crit]
        ok = all(p[1] for p in parts)
        if len(parts) == 1:
            detail = parts[0][2]
        else:
            detail = "; ".join(f"{p}: {'ok' if good else 'FAILED'} ({d})" for p, good, d in parts)
        terminalreporter.write_line(f"[{'PASS' if ok else 'FAIL'}] criterion {crit}: {detail}")
