import math
import os
import subprocess

import pytest

import anonsense as an


def test_fields_and_moments():
    cfg = an.draw_fields(1000, seed=3)
    assert len(cfg) == 1000
    assert all(1.0 <= w <= 5.0 for w in cfg.omegas)
    assert an.exact_moment(an.FieldConfig([1.0, 5.0]), 2) == 13.0
    assert an.draw_fields(10, seed=3) == an.draw_fields(10, seed=3)


def test_char_fn_and_estimator():
    cfg = an.FieldConfig([1.0, 5.0])
    b = an.char_fn(cfg, math.pi / 3)
    assert abs(b - 0.5) < 1e-15
    report = an.uncertainty(cfg, 1, 0.2, 10_000)
    assert report["expectation"] == pytest.approx(2.600350789007394, rel=1e-12)
    assert report["variance"] == pytest.approx(41.34259270752841, rel=1e-12)
    assert report["total_uncertainty"] == pytest.approx(0.4047885264156645, rel=1e-12)
    assert an.fd_moment(an.FieldConfig([1.0]), 1, 0.1) == pytest.approx(0.9983341664682815, abs=1e-12)


def test_outcomes_and_sampling():
    p = an.outcome_distribution(an.FieldConfig([1.0, 5.0]), math.pi / 3, "x")
    assert p == pytest.approx((0.5625, 0.0625, 0.375), abs=1e-15)
    cfg = an.draw_fields(64, seed=1)
    run = an.sample_protocol(cfg, 1, 0.3, 20_000, seed=5)
    assert run == an.sample_protocol(cfg, 1, 0.3, 20_000, seed=5)
    se = math.sqrt(an.variance_C(cfg, 1, 0.3) / 20_000)
    assert abs(run["d_estimate"] - an.expectation_C(cfg, 1, 0.3)) < 5 * se


def test_anonymity():
    assert an.qfi_matrix(2, 1, 1.0) == (0.75, -0.25)
    assert an.qfi_inverse(2, 1, 1.0) == (1.5, 0.5)
    assert an.max_secure_N(1_000_000, 1) == 50_660
    assert an.security_margin(1_000_000, 1, 50_660)[1]
    assert not an.security_margin(1_000_000, 1, 50_661)[1]


def test_sweeps_and_validation():
    sweep = an.sweep_dt(L=10_000, k=1, dt_grid=50)
    assert 0 < sweep["best_index"] < 49
    assert sweep["metadata"]["resolved"]["N"] == 506
    trend = an.sweep_L(L_list=[1000, 10_000], dt_grid=30)
    assert trend["non_increasing"]
    assert an.validate(oracle_sites=[2, 4], trials=3)["passed"]
    with pytest.raises(an.ConfigError):
        an.sweep_dt(L=0)
    with pytest.raises(ValueError):
        an.validate(oracle_sites=[6])


@pytest.mark.skipif("ANONSENSE_CLI" not in os.environ, reason="CLI path not provided")
def test_cli_matches_module():
    out = subprocess.run(
        [os.environ["ANONSENSE_CLI"], "anonymity", "-L", "1000000", "--dt", "0.1"],
        capture_output=True, text=True, check=True,
    )
    assert '"N": 50660' in out.stdout
    assert out.stderr.startswith("SECURE")
