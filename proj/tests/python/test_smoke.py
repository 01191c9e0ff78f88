"""End-to-end smoke of the python surface: fields, operators, norms,
exponents, simulation, and the persisted pipeline."""

import math
import tempfile
from pathlib import Path

import numpy as np
import pytest

try:
    import regwatch as rw
except ImportError:  # direct module on PYTHONPATH during ctest
    import _regwatch as rw


def config_text(outdir: str) -> str:
    return f"""
[solver]
n = 8
dt = 1e-3
end_time = 0.05
nu = 1.0
snapshot_stride = 10
diagnostic_stride = 5
betas = 1.0

[initial]
kind = abc

[criterion]
kind = kappa_beta
parameter = 1.0
gamma = 6.0
alpha = 4.0

[output]
directory = {outdir}

[verify]
checks = balance, holder, young
"""


def test_beltrami_field_identities():
    v = rw.abc(16)
    assert v.shape == (3, 16, 16, 16)
    # For the unit-coefficient flow the vorticity is the velocity itself.
    assert np.max(np.abs(rw.curl(v) - v)) <= 1e-10
    # Velocity parallel to vorticity kills both the nonlinearity and the
    # alignment functionals.
    assert np.max(np.abs(rw.nonlinear_rotational(v))) <= 1e-12
    for kind in ("kappa_beta", "kappa", "eta", "weighted_kappa"):
        field = rw.criterion_field(v, kind, 1.0)
        assert field.shape == (16, 16, 16)
        assert np.max(np.abs(field)) <= 1e-12
    energy, dissipation, production = rw.energy_diagnostics(v, 1.0)
    assert energy > 0 and dissipation > 0
    assert abs(production) <= 1e-10 * dissipation


def test_random_field_and_projection():
    a = rw.random_divfree(16, seed=7, amplitude=0.5)
    b = rw.random_divfree(16, seed=7, amplitude=0.5)
    assert np.array_equal(a, b)
    # Already solenoidal: projection is the identity up to roundoff.
    assert np.max(np.abs(rw.leray_project(a) - a)) <= 1e-12
    assert abs(rw.spatial_norm(a, 2.0) - 0.5) <= 1e-10
    field = rw.criterion_field(a, "kappa_beta", 1.5)
    assert field.min() >= 0.0 and np.isfinite(field).all()


def test_norms_against_closed_forms():
    n = 16
    ones = np.ones((n, n, n))
    assert abs(rw.spatial_norm(ones, 3.0) - 2.0 * math.pi) <= 1e-12
    assert rw.mixed_norm([0.0, 0.5, 1.0], [1.0, 3.0, 2.0], math.inf, 0.0, 1.0) == 3.0
    x = np.linspace(0.0, 2.0 * math.pi, n, endpoint=False)
    sx = np.broadcast_to(np.sin(x), (n, n, n)).copy()  # varies along the last axis
    assert abs(rw.spatial_norm(sx, 2.0) - math.sqrt(4.0 * math.pi**3)) <= 1e-12
    lam = rw.lambda_beta(sx, 2.0)
    assert np.max(np.abs(lam - sx)) <= 1e-10  # |k| = 1 eigenfunction
    mask = rw.ball_mask(16, (math.pi, math.pi, math.pi), 1.0)
    assert 0 < mask.sum() < mask.size
    full = rw.spatial_norm(sx, 2.0)
    assert rw.spatial_norm(sx, 2.0, center=(math.pi, math.pi, math.pi), radius=1.0) < full


def test_exponent_bookkeeping():
    p, q = rw.pq_exponents(6.0, 1.0)
    assert abs(1.0 / p + 1.0 / q - 5.0 / 6.0) <= 1e-12
    assert rw.young_time_exponent(6.0) == 4.0
    ok, _ = rw.admissible("kappa_beta_mixed", 6.0, 4.0, 1.0)
    assert ok
    bad, detail = rw.admissible("kappa_beta_mixed", 4.0, 2.0, 1.0)
    assert not bad and detail
    assert rw.young_split_margin(2.0, 1.5, 0.5, 6.0) >= 0.0


def test_simulate_and_pipeline(tmp_path: Path):
    text = config_text(str(tmp_path / "out"))
    result = rw.simulate(text)
    assert result["betas"] == [1.0]
    times = result["times"]
    assert times[0] == 0.0 and abs(times[-1] - 0.05) <= 1e-12
    energy = result["energy"][:, 0]
    assert (np.diff(energy) < 0).all()  # viscous decay
    # Exact exponential decay of the Beltrami run, sampled at the diagnostics.
    expected = energy[0] * np.exp(-2.0 * times)
    assert np.max(np.abs(energy - expected) / expected) <= 1e-8
    assert result["snapshots"][0].shape == (3, 8, 8, 8)

    rw.run_simulate(text)
    outdir = tmp_path / "out"
    assert (outdir / "manifest.txt").exists()
    assert (outdir / "diagnostics.csv").exists()

    rw.run_diagnose(config_text(str(tmp_path / "diag")), str(outdir))
    assert (tmp_path / "diag" / "criteria.csv").exists()

    outcome = rw.run_verify(config_text(str(tmp_path / "verify")), str(outdir))
    assert outcome["all_passed"]
    assert [c["name"] for c in outcome["checks"]] == ["balance", "holder", "young"]

    with pytest.raises(ValueError):
        rw.simulate("[solver]\nn = 7\n")


def test_snapshot_roundtrip(tmp_path: Path):
    v = rw.random_divfree(16, seed=3)
    path = tmp_path / "field.rgw"
    rw.write_snapshot(str(path), 0.25, v)
    t, back = rw.read_snapshot(str(path))
    assert t == 0.25
    assert np.array_equal(v, back)

    with pytest.raises(OSError):
        rw.read_snapshot(str(tmp_path / "missing.rgw"))


def test_canonical_config_is_idempotent(tmp_path: Path):
    text = config_text(str(tmp_path))
    once = rw.canonical_config(text)
    assert rw.canonical_config(once) == once


if __name__ == "__main__":
    raise SystemExit(pytest.main([__file__, "-q"]))
