"""Fine-step oracle for the cone-loop geometric phases.

Integrates dU/dt = -i h(t) U for the su2_cone scenario with classical RK4 at
dt = 1e-5 (no renormalization, independent of the library integrator) and
prints the diagonal phases of U0^dag U(T).  The printed values are frozen in
tests/test_acceptance.py.

    python scripts/holonomy_oracle.py [theta] [steps]
"""
import sys

import numpy as np

SIGMA_Y = np.array([[0, -1j], [1j, 0]])
SIGMA_Z = np.diag([1.0 + 0j, -1.0])


def rhs(U, H):
    d = np.einsum("in,ij,jn->n", U.conj(), H, U).real
    h = H - (U * d) @ U.conj().T
    return -1j * h @ U


def main(theta=np.pi / 3, steps=628319):
    T = 2 * np.pi
    dt = T / steps
    H = 0.5 * SIGMA_Z
    c, s = np.cos(theta / 2), np.sin(theta / 2)
    U0 = np.array([[c, -s], [s, c]], dtype=complex)
    U = U0.copy()
    for _ in range(steps):
        k1 = rhs(U, H)
        k2 = rhs(U + 0.5 * dt * k1, H)
        k3 = rhs(U + 0.5 * dt * k2, H)
        k4 = rhs(U + dt * k3, H)
        U = U + dt / 6 * (k1 + 2 * k2 + 2 * k3 + k4)
    V = U0.conj().T @ U
    print(f"theta={theta!r} steps={steps} dt={dt!r}")
    print("phases", [repr(float(x)) for x in np.angle(np.diag(V))])
    print("leak", repr(float(abs(V[0, 1]))), "unitarity", repr(float(np.max(np.abs(U.conj().T @ U - np.eye(2))))))


if __name__ == "__main__":
    args = sys.argv[1:]
    main(float(args[0]) if args else np.pi / 3, int(args[1]) if len(args) > 1 else 628319)
