from __future__ import annotations

import logging
from pathlib import Path

import pytest

from config import SEED_MAX, RunConfig, configure_logging, degen_threads, env_tolerance
from toric.errors import InputError


@pytest.fixture(autouse=True)
def clean_env(monkeypatch):
    for name in ("TORIC_EPS_GEOM", "TORIC_EPS_OPT", "TORIC_EPS_LIMIT", "TORIC_DEGEN_THREADS", "TORIC_LOG_LEVEL"):
        monkeypatch.delenv(name, raising=False)


def test_default_tolerance():
    tol = env_tolerance()
    assert (tol.eps_geom, tol.eps_opt, tol.eps_limit) == (1e-9, 1e-10, 1e-6)


def test_tolerance_from_environment(monkeypatch):
    monkeypatch.setenv("TORIC_EPS_GEOM", "1e-7")
    monkeypatch.setenv("TORIC_EPS_LIMIT", " 1e-4 ")
    tol = env_tolerance()
    assert tol.eps_geom == 1e-7
    assert tol.eps_limit == 1e-4


def test_bad_tolerances(monkeypatch):
    monkeypatch.setenv("TORIC_EPS_GEOM", "tiny")
    with pytest.raises(InputError) as exc:
        env_tolerance()
    assert exc.value.field == "TORIC_EPS_GEOM"
    monkeypatch.setenv("TORIC_EPS_GEOM", "1e-12")
    with pytest.raises(InputError) as exc:
        env_tolerance()
    assert exc.value.field == "tolerance"


def test_flags_override_environment(monkeypatch):
    monkeypatch.setenv("TORIC_EPS_GEOM", "1e-7")
    run = RunConfig.from_options("subdivide", {"config": Path("a.json"), "fan": None}, tol_geom=1e-8)
    assert run.tol.eps_geom == 1e-8
    assert run.inputs == {"config": Path("a.json")}
    assert run.output("subdivide.json") is None


def test_seed_range():
    assert RunConfig("verify", seed=SEED_MAX).seed == SEED_MAX
    with pytest.raises(InputError):
        RunConfig("verify", seed=-1)
    with pytest.raises(InputError):
        RunConfig("verify", seed=SEED_MAX + 1)


def test_output_paths(tmp_path):
    run = RunConfig("limit", out_dir=tmp_path)
    assert run.output("limit.json") == tmp_path / "limit.json"


def test_thread_cap(monkeypatch):
    assert degen_threads() == 1
    monkeypatch.setenv("TORIC_DEGEN_THREADS", "4")
    assert degen_threads() == 4
    monkeypatch.setenv("TORIC_DEGEN_THREADS", "-2")
    assert degen_threads() == 1
    monkeypatch.setenv("TORIC_DEGEN_THREADS", "many")
    assert degen_threads() == 1
    assert RunConfig.from_options("degenerate", {}).n_jobs == 1


def test_configure_logging(monkeypatch):
    monkeypatch.setenv("TORIC_LOG_LEVEL", "debug")
    configure_logging()
    assert logging.getLogger().level == logging.DEBUG
    configure_logging("bogus")
    assert logging.getLogger().level == logging.WARNING
    configure_logging("INFO")
    assert logging.getLogger().level == logging.INFO
    configure_logging("WARNING")
