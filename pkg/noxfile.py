"""nox-poetry sessions: tests on each supported Python, coverage and packaging checks."""

from calcipy.dev.noxfile import build_check, build_dist, coverage, tests  # noqa: F401
