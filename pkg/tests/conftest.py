import pytest

from cavity_retrieval import PhysicalParams, Pulse, TimeGrid, simulate


@pytest.fixture(scope="session")
def plateau():
    """Resonant plateau point: Delta = delta = 0, Omega = 80 MHz, tau = 150 ns,
    C = 100.  Returns (params, pulse, grid, trajectory, report)."""
    params = PhysicalParams.from_mhz(9, 3, C=100)
    pulse = Pulse.from_mhz(80, 150)
    grid = TimeGrid.for_pulse(params, pulse)
    traj, report = simulate(params, pulse, grid)
    return params, pulse, grid, traj, report


@pytest.fixture(scope="session")
def strong_coupling():
    """Resonant run at C = 200, Omega = 80 MHz, tau = 200 ns (the analytic
    comparison reference)."""
    params = PhysicalParams.from_mhz(9, 3, C=200)
    pulse = Pulse.from_mhz(80, 200)
    grid = TimeGrid.for_pulse(params, pulse)
    traj, report = simulate(params, pulse, grid)
    return params, pulse, grid, traj, report


@pytest.fixture(scope="session")
def detuned():
    """Phase-rich detuned point: Delta = 300 MHz, delta = -2.8 MHz,
    Omega = 80 MHz, tau = 150 ns, C = 100."""
    params = PhysicalParams.from_mhz(9, 3, C=100, Delta_mhz=300, delta_mhz=-2.8)
    pulse = Pulse.from_mhz(80, 150)
    grid = TimeGrid.for_pulse(params, pulse)
    traj, report = simulate(params, pulse, grid)
    return params, pulse, grid, traj, report


@pytest.fixture(scope="session")
def long_pulse():
    """tau = 1000 ns resonant run for the constant-delay regime."""
    params = PhysicalParams.from_mhz(9, 3, C=100)
    pulse = Pulse.from_mhz(80, 1000)
    grid = TimeGrid.for_pulse(params, pulse)
    traj, report = simulate(params, pulse, grid)
    return params, pulse, grid, traj, report
