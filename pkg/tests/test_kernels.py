"""Backend equivalence: the compiled and pure kernels must agree bit-for-bit."""
import numpy as np
import pytest

from polycorr._kernels import _pure, available_backends

compiled = pytest.importorskip(
    "polycorr._kernels._core",
    reason="compiled kernel extension not built")


def _random_packed(db, rng):
    names = db.names()
    k = int(rng.integers(1, len(names) + 1))
    idx = rng.choice(len(names), size=k, replace=False)
    x = rng.random(k)
    x /= x.sum()
    return db.pack(tuple(names[i] for i in idx), tuple(float(v) for v in x))


def test_backends_listed(db):
    assert available_backends() == ("compiled", "python")


def test_real_kernel_bit_parity(db):
    rng = np.random.default_rng(20240901)
    checked = 0
    for _ in range(400):
        packed = _random_packed(db, rng)
        P = float(rng.uniform(1e5, 250e5))
        T = float(rng.uniform(220.0, 600.0))
        args = (P, T, packed.x, packed.mw, packed.tc, packed.pc,
                packed.omega, packed.kij, packed.cpc)
        try:
            a = _pure.eval_state_real(*args)
        except ValueError:
            with pytest.raises(ValueError):
                compiled.eval_state_real(*args)
            continue
        b = compiled.eval_state_real(*args)
        assert a == b  # bit-identical tuples
        checked += 1
    assert checked > 300


def test_ideal_kernel_bit_parity(db):
    rng = np.random.default_rng(7)
    for _ in range(200):
        packed = _random_packed(db, rng)
        P = float(rng.uniform(1e4, 300e5))
        T = float(rng.uniform(200.0, 900.0))
        a = _pure.eval_state_ideal(P, T, packed.x, packed.mw, packed.cpc)
        b = compiled.eval_state_ideal(P, T, packed.x, packed.mw, packed.cpc)
        assert a == b


def test_compiled_rejects_oversized_mixture(db):
    packed = db.pack(db.names(), tuple([1.0 / 8] * 8))
    x = np.concatenate([packed.x] * 3)
    mw = np.concatenate([packed.mw] * 3)
    tc = np.concatenate([packed.tc] * 3)
    pc = np.concatenate([packed.pc] * 3)
    omega = np.concatenate([packed.omega] * 3)
    kij = np.zeros(24 * 24)
    cpc = np.concatenate([packed.cpc] * 3)
    with pytest.raises(ValueError):
        compiled.eval_state_real(50e5, 300.0, x / 3.0, mw, tc, pc, omega, kij, cpc)
