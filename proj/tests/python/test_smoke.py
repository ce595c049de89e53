import math

import pytest

import lsc


def test_divergence_and_estimate():
    assert lsc.binary_kl(0.5, 0.5) == 0.0
    assert math.isinf(lsc.binary_kl(0.2, 0.0))
    assert lsc.estimate(3, 10, "mle") == pytest.approx(0.3)
    assert lsc.estimate(0, 10, "add_alpha:0.5") == pytest.approx(0.5 / 11)


def test_bounds():
    conv = lsc.iid_converse_a(1000, 1e-6)
    ach = lsc.iid_achievable_a(1000, 1e-6)
    assert conv["a"] == pytest.approx(0.01726049506, rel=1e-9)
    assert ach["a"] > conv["a"]
    assert ach["b"] == pytest.approx(lsc.b_upper(1e-6))
    assert lsc.training_threshold(4096) == 493


def test_exact_and_monte_carlo_tail():
    exact = lsc.exact_tail_iid(100, 0.3, 0.01, "add_alpha:0.5")
    [(value, ci)] = lsc.mc_tail_iid([0.3], 100, "add_alpha:0.5", 0.01, 20000, 5)
    assert abs(value - exact) <= 2 * ci


def test_compress_roundtrip():
    bits = lsc.sample_markov(0.9, 0.7, 3, 400, 1)
    for model, params in [("kt_iid", []), ("kt_markov", []), ("iid", [0.4]), ("markov", [0.9, 0.7])]:
        packed = lsc.compress(bits, model, params)
        assert lsc.decompress(packed) == bits
    with pytest.raises(ValueError):
        lsc.decompress(b"LSC1garbage")


def test_cli():
    rc, out, _ = lsc.run_cli(["bounds", "--m", "100", "--pe", "0.01"])
    assert rc == 0
    assert out.startswith("kind,a_bits")
    rc, _, _ = lsc.run_cli(["bounds"])
    assert rc == 2
