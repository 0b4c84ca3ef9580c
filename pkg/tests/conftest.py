"""Shared test configuration: headless matplotlib, acceptance line passthrough."""
from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

_config = None


def pytest_configure(config):
    global _config
    _config = config


def pytest_runtest_logreport(report):
    # Re-emit the per-criterion verdict lines that output capture would
    # otherwise swallow, so they appear in every pytest run.
    if report.when != "call" or _config is None:
        return
    terminal = _config.pluginmanager.get_plugin("terminalreporter")
    if terminal is None:
        return
    for line in getattr(report, "capstdout", "").splitlines():
        if line.startswith("ACCEPTANCE"):
            terminal.write_line(line)
