import subprocess
import sys

import numpy as np
import pytest

from helpers import random_curve, random_metric, random_string, random_timed
from trajsim import BACKEND, _backend
from trajsim.bench import bench_backends, bench_metric_edit, bench_tw_cells, run_all, scaling_exponent
from trajsim.editdist import metric_edit_distance
from trajsim.frechet import discrete_frechet, frechet_decision, frechet_distance
from trajsim.timewindow import tw_dtw, tw_frechet_distance

needs_compiled = pytest.mark.skipif(_backend.compiled is None, reason="compiled kernels not built")


def test_backend_name():
    assert BACKEND in ("cython", "python")
    with pytest.raises(ValueError):
        _backend.get("fortran")


@needs_compiled
def test_parity(rng):
    for _ in range(40):
        P, Q = random_curve(rng, 2, 10), random_curve(rng, 2, 10)
        assert discrete_frechet(P, Q, backend="python") == discrete_frechet(P, Q, backend="cython")
        eps = float(rng.random() * 3)
        assert frechet_decision(P, Q, eps, backend="python") == frechet_decision(P, Q, eps, backend="cython")
        assert frechet_distance(P, Q, backend="python") == frechet_distance(P, Q, backend="cython")
        A, B = random_timed(rng, 2, 8), random_timed(rng, 2, 8)
        s = float(rng.random() * 0.3)
        assert tw_dtw(A, B, s, backend="python") == pytest.approx(tw_dtw(A, B, s, backend="cython"), rel=1e-12)
        assert tw_frechet_distance(A, B, s, backend="python") == tw_frechet_distance(A, B, s, backend="cython")
        m = random_metric(rng)
        a, b = random_string(rng, m), random_string(rng, m)
        assert metric_edit_distance(a, b, m, backend="python") == pytest.approx(
            metric_edit_distance(a, b, m, backend="cython"), abs=1e-12)


def test_pure_python_env_switch():
    code = "import trajsim; print(trajsim.BACKEND)"
    out = subprocess.run([sys.executable, "-c", code], env={"TRAJSIM_PURE_PYTHON": "1", "PATH": ""},
                         capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "python"


def test_scaling_exponent_of_power_law():
    n = np.array([10, 20, 40, 80])
    assert scaling_exponent(n, 3e-6 * n ** 2.0) == pytest.approx(2.0)


def test_bench_smoke():
    tw = bench_tw_cells(n=128, sigmas=[0.01, 0.1, 1.0], repeats=1)
    assert [r["cells"] for r in tw["rows"]] == sorted(r["cells"] for r in tw["rows"])
    me = bench_metric_edit((3, 4))
    assert me["model_ratio"] == pytest.approx((4 / 3) ** 7)
    be = bench_backends((16,), repeats=1)
    assert be["available"] == (_backend.compiled is not None)


@pytest.mark.slow
def test_run_all_quick():
    out = run_all(quick=True)
    assert out["schema"] == 1
    assert set(out) >= {"discrete_frechet", "tw_cells", "backends", "metric_edit"}
