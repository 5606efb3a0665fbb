"""Smoke test for the Python bindings.

Build first with `pip install -e crates/py --no-build-isolation`.
"""

import cmath
import math

import pseudoherm_py as ph


def main():
    # A = B = 0 is the ordinary Hermitian oscillator.
    levels = ph.Model(0.0, 0.0, cutoff=20).spectrum(6)
    assert [round(l.numeric.real) for l in levels] == [1, 2, 2, 3, 3, 3]

    m = ph.Model(0.5, 0.5)
    for level in m.spectrum(10):
        assert level.residual < 1e-8, level
        assert abs(level.numeric.imag) < 1e-8, level
        assert level.analytic == ph.energy(level.n1, level.n2, 0.5, 0.5)

    failed = [c for c in m.verify() + m.verify_ladder(3) if not c.passed]
    assert not failed, failed

    ground = m.state()
    assert len(ground) == 30 * 30
    assert all(math.isfinite(abs(z)) for z in ground)

    ev = m.evolve(t_max=10.0, steps=20)
    assert len(ev.times) == 21
    assert ev.max_relative_drift < 1e-8

    g = ph.gram(3, 0.5, 0.5)
    for n in range(4):
        for k in range(4):
            assert abs(g[n][k] - (1.0 if n == k else 0.0)) < 1e-8

    assert abs(ph.hermite(3, 1j) - (-20j)) < 1e-12

    nc = ph.nc_spectrum(0.5, 0.5, 0.01, 0.01, count=6)
    for level in nc:
        assert abs(level.numeric.real - level.analytic) < 1e-3, level
    failed = [c for c in ph.verify_noncommutative(0.5, 0.5, 0.01, 0.01) if not c.passed]
    assert not failed, failed

    for bad in (lambda: ph.Model(0.5, 0.5, cutoff=4), lambda: ph.nc_spectrum(0.5, 0.5, 0.5, 0.0)):
        try:
            bad()
        except ValueError:
            pass
        else:
            raise AssertionError("expected ValueError")

    print("pseudoherm_py", ph.__version__, "smoke test ok")


if __name__ == "__main__":
    main()
