import math

import numpy as np
import pytest

from superbracket import expressions as ex
from superbracket.expressions import add, const, mul, var
from superbracket.sampling import (
    MomentumPoint,
    Sampler,
    constancy,
    is_zero,
    registered_singular_loci,
)

P = var("p")
PL = var("pL")


def test_sampler_deterministic_and_clear_of_loci():
    s = Sampler(seed=7, count=200)
    a = s.momenta()
    b = s.momenta()
    assert np.array_equal(a, b)
    for locus in registered_singular_loci():
        assert np.all(np.abs(a - locus) >= 0.05)


def test_constrained_pairs_respect_the_map():
    f = mul(const(-1.0), PL)
    s = Sampler(seed=5, count=50)
    pl, pr = s.pairs((f, const(-1.0)))
    assert np.allclose(pr, -pl)
    for locus in registered_singular_loci():
        assert np.all(np.abs(pr - locus) >= 0.05)


def test_is_zero_pythagorean():
    e = add(
        mul(ex.sin(mul(const(0.5), P)), ex.sin(mul(const(0.5), P))),
        mul(ex.cos(mul(const(0.5), P)), ex.cos(mul(const(0.5), P))),
        const(-1),
    )
    rep = is_zero(e, Sampler())
    assert rep.passed and rep.max_residual <= 1e-12


def test_is_zero_detects_nonzero():
    # sin(p/2) - p/2 is visibly nonzero; at p = 2 the residual is ~0.1585
    e = add(ex.sin(mul(const(0.5), P)), mul(const(-0.5), P))
    rep = is_zero(e, Sampler())
    assert not rep.passed
    at_two = abs(math.sin(1.0) - 1.0)
    assert at_two == pytest.approx(0.1585290, abs=1e-6)
    assert rep.max_residual >= at_two


def test_is_zero_constant_zero():
    rep = is_zero(ex.ZERO, Sampler())
    assert rep.passed and rep.max_residual == 0.0


def test_zero_report_records_seed_and_vacuous():
    rep = is_zero(ex.ZERO, Sampler(seed=99, count=0))
    assert rep.vacuous and rep.passed and rep.seed == 99


def test_momentum_point_constraint_validation():
    f = mul(const(-1.0), PL)
    MomentumPoint(1.0, -1.0, (f, const(-1.0)))
    with pytest.raises(ValueError):
        MomentumPoint(1.0, 1.0, (f, const(-1.0)))


def test_constancy():
    ok, val = constancy(const(3.5), Sampler(count=20))
    assert ok and val == pytest.approx(3.5)
    ok, _ = constancy(ex.sin(P), Sampler(count=20))
    assert not ok
