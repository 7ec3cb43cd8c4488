"""Shared fixtures and frozen oracle values.

High-precision reference roots and function values were computed with
mpmath (50 significant digits) from the defining formulas and frozen here;
the ``mp_charfn`` helper re-derives characteristic values on demand for
cross-checks so the extended-precision path stays independent of the
production scaled arithmetic.
"""

from __future__ import annotations

import numpy as np
import pytest

from waveheat.characteristic import BoundaryVariant

# polished determinant roots (branch index -> root), mpmath findroot, dps=40
NEUMANN_ROOTS = {
    0: -0.50321147613682114907 + 2.2052996976448137949j,
    1: -0.29586769237902242797 + 5.0874275315510632786j,
    2: -0.22919809387807315879 + 8.1267908687944567783j,
    5: -0.16391647442010413163 + 17.451246134059159762j,
    10: -0.1214859523075931445 + 33.110994556394967942j,
    100: -0.039747756768158264125 + 315.76989846230868406j,
    200: -0.02815809934320528148 + 629.91751622075189438j,
}
DIRICHLET_ROOTS = {
    1: -0.36779995364999181609 + 3.6117893298580890519j,
    2: -0.25492023565037463186 + 6.5973128794376711478j,
    5: -0.17074083727630705747 + 15.889375361989192698j,
    10: -0.12439234354944120612 + 31.543294679010886186j,
    100: -0.039846753119692324017 + 314.19920181278458377j,
}

# assorted frozen determinant values (mpmath, dps=30)
DN_AT_5_7J = -1443.0117832370663611 + 1288.0569479205727523j
DD_AT_5_7J = -1443.035348142410379 + 1287.9651184608778174j
DN_AT_3_4J = 66.306722886955609482 - 96.888508654744674888j
DN_AT_1 = 3.7621956910836314596  # = cosh(2)
COTH_1 = 1.3130352854993313036
TANH_1 = 0.76159415595576488812

# particular integrals for constant data (mpmath quadrature / closed forms)
U_CONST_S10 = 0.18390715290764524523j
UP_CONST_S10 = -0.5440211108893698134j
W_CONST_S25 = 0.26318650401662008877 - 0.67423917105349633459j
WP_CONST_S25 = -3.1706550695892494749 + 1.3064815587345915539j


def mp_charfn(lam: complex, variant: BoundaryVariant, dps: int = 40) -> complex:
    """Extended-precision determinant evaluation (test oracle only)."""
    import mpmath as mp

    with mp.workdps(dps):
        z = mp.mpc(lam)
        r = mp.sqrt(z)
        if variant is BoundaryVariant.NEUMANN:
            val = r * mp.cosh(z) * mp.cosh(r) + mp.sinh(z) * mp.sinh(r)
        else:
            val = r * mp.sinh(z) * mp.cosh(r) + mp.cosh(z) * mp.sinh(r)
        return complex(val)


@pytest.fixture(scope="session")
def rng():
    return np.random.default_rng(20240817)
