"""Regenerate the synthetic decay-exponent ledger fixtures.

Each fixture is an exact log-linear ledger: |z|_i = z0 * rho^i and
E_i = |z|_i^(1/(1-theta)) with the limit energy at exactly zero. The
ratio rho = 3^-(1-theta) makes consecutive energies satisfy
E_{i-1} = 3 E_i, so the default tail estimate E_N - (E_{N-1} - E_N)/2
lands on the limit up to round-off and the fit recovers theta to
machine precision.
"""

import os
import sys

sys.path.insert(0, os.path.join(os.path.dirname(__file__), "..", "src"))

from vesflow.io import CSV_HEADER


def rows_for(theta, z0=0.5, n=32):
    rho = 3.0 ** -(1.0 - theta)
    expo = 1.0 / (1.0 - theta)
    out = []
    for i in range(n):
        z = z0 * rho**i
        e = z**expo
        out.append((0.1 * i, i, e, z))
    return out


def write(path, theta):
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(CSV_HEADER + "\n")
        for t, step, e, z in rows_for(theta):
            cells = {
                "t": t, "step": step, "E_total": e, "E_kin": 0.0,
                "E_willmore": e, "E_penalty": 0.0, "area": 1.0,
                "mass_mean": 0.0, "u_l2": 0.0, "grad_u_l2": 0.0,
                "z_l2": z, "grad_z_l2": z, "psi_h1": 1.0, "psi_h3": 1.0,
                "residual": 0.0,
            }
            rendered = [
                str(cells[name]) if name == "step" else f"{cells[name]:.17g}"
                for name in CSV_HEADER.split(",")
            ]
            fh.write(",".join(rendered) + "\n")


if __name__ == "__main__":
    here = os.path.dirname(__file__)
    fixtures = os.path.join(here, "..", "tests", "fixtures")
    os.makedirs(fixtures, exist_ok=True)
    write(os.path.join(fixtures, "loja_theta05.csv"), 0.5)
    write(os.path.join(fixtures, "loja_theta025.csv"), 0.25)
    print("wrote loja_theta05.csv and loja_theta025.csv")
