import numpy as np
import pytest

from vidshift.core import Clip


def make_natural_frame(h=224, w=224, seed=0):
    """Deterministic stand-in for a natural image: smooth shading, edges and fine texture."""
    rng = np.random.default_rng(seed)
    yy, xx = np.mgrid[0:h, 0:w] / max(h, w)
    base = np.stack(
        [
            0.5 + 0.3 * np.sin(6 * xx + 1.0) * np.cos(4 * yy),
            0.4 + 0.3 * np.cos(5 * yy + 3 * xx),
            0.5 + 0.25 * np.sin(9 * (xx + yy)),
        ],
        axis=-1,
    )
    for _ in range(6):
        y0, x0 = rng.integers(0, max(1, h - 16)), rng.integers(0, max(1, w - 16))
        dy, dx = rng.integers(2, max(3, h // 3)), rng.integers(2, max(3, w // 3))
        base[y0 : y0 + dy, x0 : x0 + dx] = rng.uniform(0.1, 0.9, 3)
    base += rng.normal(0, 0.03, base.shape)
    return (np.clip(base, 0, 1) * 255 + 0.5).astype(np.uint8)


def make_clip(video_id="v1", T=16, h=64, w=64, seed=0):
    frames = [np.roll(make_natural_frame(h, w, seed), 2 * t, axis=1) for t in range(T)]
    return Clip(video_id, np.stack(frames))


def constant_frame(value, h=32, w=32):
    return np.full((h, w, 3), value, dtype=np.uint8)


@pytest.fixture
def natural_frame():
    return make_natural_frame()


@pytest.fixture
def small_clip():
    return make_clip()


# -- acceptance summary: one line per criterion at the end of the run

ACCEPTANCE = {}


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker and (report.when == "call" or (report.when == "setup" and report.outcome != "passed")):
        ACCEPTANCE.setdefault(marker.args[0], []).append((item.name, report.outcome))


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(label): acceptance criterion this test checks")


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for label in sorted(ACCEPTANCE, key=lambda s: int(s.split(".")[0])):
        results = ACCEPTANCE[label]
        if not results:
            continue
        skipped = all(o == "skipped" for _, o in results)
        ok = all(o in ("passed", "skipped") for _, o in results)
        status = "SKIP" if skipped else ("PASS" if ok else "FAIL")
        failed = [n for n, o in results if o == "failed"]
        extra = f"  (failed: {', '.join(failed)})" if failed else ""
        terminalreporter.write_line(f"{status}  {label}{extra}")
