import subprocess
import sys
import time

import pytest

from spinmux import demo_config_path


@pytest.fixture(scope="session")
def demo_config() -> str:
    return demo_config_path("demo_register")


@pytest.fixture(scope="session")
def close_pair_config() -> str:
    return demo_config_path("demo_close_pair")


def run_cli(args, **kwargs):
    """Run the CLI in a subprocess; returns CompletedProcess."""
    return subprocess.run([sys.executable, "-m", "spinmux", *args],
                          capture_output=True, text=True, **kwargs)


@pytest.fixture(scope="session")
def close_pair_run(tmp_path_factory, close_pair_config):
    """One full selective-pulse synthesis in the 1.1 MHz regime.

    Shared across tests that need a converged pulse; returns the pulse path,
    trace path, and wall time of the CLI invocation.
    """
    out = tmp_path_factory.mktemp("close_pair")
    pulse_path = out / "pulse.csv"
    trace_path = out / "trace.jsonl"
    start = time.monotonic()
    proc = run_cli([
        "optimize",
        "--config", close_pair_config,
        "--target-site", "nv-b",
        "--idle-site", "nv-c",
        "--lambda", "1e-9",
        "--steps", "200",
        "--duration", "10e-6",
        "--seed", "0",
        "--restarts", "5",
        "--out-pulse", str(pulse_path),
        "--out-trace", str(trace_path),
    ])
    elapsed = time.monotonic() - start
    assert proc.returncode == 0, proc.stderr
    return pulse_path, trace_path, elapsed
