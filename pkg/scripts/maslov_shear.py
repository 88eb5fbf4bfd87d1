"""Compare two sign conventions for the exterior derivative of the Maslov form.

Builds the rank-two Lagrangian ``(u, v) -> (u, v, u, v + a sin u)`` in
dS^2 x dS^2 with G^- and reports ``sup |da - rho/2|`` and ``sup |da + rho|``
as the grid is refined. The pulled-back Ricci form does not depend on ``a``
(the shear has unit Jacobian), so one value of ``a`` suffices.
"""

import math

import numpy as np

from parakahler import lagrangian as lag
from parakahler import models
from parakahler.product import ProductSpace


def shear(a, n=24):
    ds = models.desitter(1.0).chart
    sp = ProductSpace(ds, ds, -1)
    s = np.linspace(-0.6, 0.6, n)

    def phi(u, v):
        return np.array([u, v, u, v + a * math.sin(u)])

    def dphi(u, v):
        return np.array([[1.0, 0.0], [0.0, 1.0], [1.0, 0.0], [a * math.cos(u), 1.0]])

    def ddphi(u, v):
        out = np.zeros((4, 2, 2))
        out[3, 0, 0] = -a * math.sin(u)
        return out

    return lag.custom_immersion(sp, s, s, phi, dphi, ddphi)


def main():
    print(f"{'n':>5} {'sup|rho|':>10} {'da=rho/2':>10} {'da=-rho':>10}")
    for n in (12, 24, 48):
        rep = lag.maslov_form(shear(0.5, n))
        rho = float(np.max(np.abs(lag._interior(rep.pulled_ricci))))
        print(f"{n:5d} {rho:10.3e} {rep.residual:10.2e} {rep.stated_residual:10.2e}")


if __name__ == "__main__":
    main()
