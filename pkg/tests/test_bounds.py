"""Precision bounds and the Cramer-Rao conversion."""
import math

import numpy as np
import pytest

from metrolab import (ContractViolationError, collective_ops, cramer_rao,
                      dephasing_bound, dephasing_s_constant, dynamical_bound,
                      hermitian, low_temperature_bound, thermal_bound)


def test_dynamical_bound_values():
    sz = collective_ops(5).sz
    assert dynamical_bound(sz, 2.0).value == pytest.approx(4 * 25)
    assert dynamical_bound(sz, 0.0).value == 0.0
    assert dynamical_bound(hermitian(np.diag([3.0, 1.0, 0.0])), 1.0).value == pytest.approx(9.0)


def test_dephasing_bound_asymptotic():
    rep = dephasing_bound(2.0, 1.0)
    assert rep.value == pytest.approx((3 + math.pi ** 2) / 3 * 4, rel=1e-12)
    assert rep.kind == "dephasing_asymptotic"


def test_dephasing_bound_finite_d():
    assert dephasing_s_constant(3) == pytest.approx(2.0)
    rep = dephasing_bound(2.0, 1.0, d=3)  # ||H_S||_inf = 1
    assert rep.value == pytest.approx(12.0)
    # the qutrit attainable value 6 sits below it
    assert 6.0 <= rep.value


def test_dephasing_s_constant_monotone_limit():
    values = [dephasing_s_constant(d) for d in range(2, 60)]
    assert all(a <= b + 1e-15 for a, b in zip(values, values[1:]))
    big = 4 * (1 + dephasing_s_constant(10 ** 5))
    assert big == pytest.approx(4 * (3 + math.pi ** 2) / 3, rel=1e-3)


def test_thermal_bound_values():
    sz = collective_ops(4).sz
    assert thermal_bound(sz, 2.0).value == pytest.approx(4 * 16 / 4)
    assert thermal_bound(2.0, 3.0).value == pytest.approx(9.0)
    assert thermal_bound(1.0, 1e-9).value <= 1e-17


def test_low_temperature_bound():
    assert low_temperature_bound(4.0, 2.0).value == pytest.approx(4.0)
    assert low_temperature_bound(3.0, 3.0).value == pytest.approx(1.0)
    assert "caveat" in low_temperature_bound(1.0, 1.0).inputs


def test_cramer_rao():
    assert cramer_rao(4.0, 25) == pytest.approx(0.01)
    assert cramer_rao(2.0, 1) == pytest.approx(0.5)
    assert cramer_rao(2.0, 2) == pytest.approx(cramer_rao(2.0, 1) / 2)
    t, N = 3.0, 7
    assert cramer_rao(t * t * N * N) == pytest.approx(1 / (t * t * N * N))


def test_guards():
    with pytest.raises(ContractViolationError):
        dephasing_bound(1.0, 0.0)
    with pytest.raises(ContractViolationError):
        thermal_bound(1.0, 0.0)
    with pytest.raises(ContractViolationError):
        low_temperature_bound(1.0, -1.0)
    with pytest.raises(ContractViolationError):
        cramer_rao(0.0, 1)
    with pytest.raises(ContractViolationError):
        cramer_rao(1.0, 0)
    with pytest.raises(ContractViolationError):
        dephasing_s_constant(1)
