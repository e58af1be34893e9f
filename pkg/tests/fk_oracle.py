"""Straight-line scalar transcription of the closed-form chain equations.

Deliberately written without numpy vectorization or shared subexpressions
so it stays an independent check on the library implementation.
"""

import math


def fk_oracle(theta_w, theta_rs, theta_re, theta_rf, theta_ls, theta_le, theta_lf, theta_h,
              l01, l12, l23, l34, lh1, lh2, cos=math.cos, sin=math.sin):
    """Returns the nine coordinates (right hand, left hand, head center).

    ``cos``/``sin`` can be swapped for cmath versions to evaluate the chain
    with complex arguments (complex-step differentiation).
    """
    x_rh = (l12 * sin(theta_w)
            + l23 * (cos(theta_re) * sin(theta_w)
                     + cos(theta_w) * sin(theta_rs) * sin(theta_re))
            + l34 * (-cos(theta_rf) * (-cos(theta_re) * sin(theta_w)
                                            + cos(theta_w) * sin(theta_rs) * sin(theta_re))
                     + (cos(theta_w) * cos(theta_re) * sin(theta_rs)
                        - sin(theta_w) * sin(theta_re)) * sin(theta_rf)))

    y_rh = (-l12 * cos(theta_w)
            + l23 * (-cos(theta_re) * cos(theta_w)
                     + sin(theta_w) * sin(theta_rs) * sin(theta_re))
            + l34 * (-cos(theta_rf) * (cos(theta_re) * cos(theta_w)
                                            + sin(theta_w) * sin(theta_rs) * sin(theta_re))
                     + (sin(theta_w) * cos(theta_re) * cos(theta_w)
                        + cos(theta_w) * sin(theta_re)) * sin(theta_rf)))

    z_rh = (l01
            - l23 * cos(theta_rs) * sin(theta_re)
            + l34 * (-cos(theta_rs) * cos(theta_rf) * sin(theta_re)
                     - cos(theta_rs) * cos(theta_re) * sin(theta_rf)))

    x_lh = (-l12 * sin(theta_w)
            + l23 * (-cos(theta_le) * sin(theta_w)
                     - cos(theta_w) * sin(theta_ls) * sin(theta_le))
            + l34 * (cos(theta_lf) * (-cos(theta_le) * sin(theta_w)
                                           + cos(theta_w) * sin(theta_ls) * sin(theta_le))
                     - (cos(theta_w) * cos(theta_le) * sin(theta_ls)
                        - sin(theta_w) * sin(theta_le)) * sin(theta_lf)))

    y_lh = (l12 * cos(theta_w)
            + l23 * (cos(theta_le) * cos(theta_w)
                     - sin(theta_w) * sin(theta_ls) * sin(theta_le))
            + l34 * (cos(theta_lf) * (cos(theta_le) * cos(theta_w)
                                           + sin(theta_w) * sin(theta_ls) * sin(theta_le))
                     - (sin(theta_w) * cos(theta_le) * cos(theta_w)
                        + cos(theta_w) * sin(theta_le)) * sin(theta_lf)))

    z_lh = (-l01
            + l23 * cos(theta_ls) * sin(theta_le)
            + l34 * (cos(theta_ls) * cos(theta_lf) * sin(theta_le)
                     + cos(theta_ls) * cos(theta_le) * sin(theta_lf)))

    x_hc = lh2 * cos(theta_w) * cos(theta_h)
    y_hc = lh2 * sin(theta_w) * cos(theta_h)
    z_hc = l01 + lh1 + lh2 * cos(theta_h)

    return (x_rh, y_rh, z_rh, x_lh, y_lh, z_lh, x_hc, y_hc, z_hc)
