"""Reference implementations written independently of the package code paths."""

import math

import mpmath as mp
import numpy as np


def jacobi_eigenvalues(A, tol=1e-15, max_sweeps=100):
    """Cyclic Jacobi rotations on a dense symmetric matrix; returns sorted eigenvalues."""
    A = np.array(A, dtype=float)
    n = len(A)
    scale = np.abs(A).max()
    for _ in range(max_sweeps):
        off = math.sqrt(sum(A[p, q] ** 2 for p in range(n) for q in range(n) if p != q))
        if off <= tol * scale:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                if A[p, q] == 0.0:
                    continue
                tau = (A[q, q] - A[p, p]) / (2 * A[p, q])
                t = math.copysign(1.0, tau) / (abs(tau) + math.sqrt(1 + tau * tau))
                c = 1 / math.sqrt(1 + t * t)
                s = t * c
                J = np.eye(n)
                J[p, p] = J[q, q] = c
                J[p, q], J[q, p] = s, -s
                A = J.T @ A @ J
    return np.sort(np.diag(A))


def geometric_alpha(eta, b, theta, M, L):
    """i eta b sum over (+M, -M)-type sequence in closed form, with high precision.

    The sequence is M kicks of +1 followed by L - M kicks of -1 at phase
    step theta; for L = 2M this is (1 - e^{i theta M})^2 / (1 - e^{i theta}).
    """
    mp.mp.dps = 40
    q = mp.expj(mp.mpf(theta))
    first = (1 - q**M) / (1 - q)
    second = q**M * (1 - q ** (L - M)) / (1 - q)
    return complex(1j * mp.mpf(eta) * mp.mpf(b) * (first - second))


def shoelace_theta(eta, b, omega, times, signs, i=0, j=1):
    """Rotation angle from phase-space areas of the four spin configurations.

    For each configuration the kicks displace every mode by
    beta_l = i eta_k (b_i s_i + b_j s_j) s_l exp(i omega_k t_l).  Composing
    displacement operators gives a phase sum_l Im(P_{l-1}^* beta_l), twice
    the signed area swept from the origin.  The ZZ part of the phase is
    the rotation angle.
    """
    phases = {}
    for si in (1, -1):
        for sj in (1, -1):
            total = 0.0
            for k, w in enumerate(omega):
                P = 0j
                for t, s in zip(times, signs):
                    beta = 1j * eta[k] * (b[i][k] * si + b[j][k] * sj) * s * complex(math.cos(w * t), math.sin(w * t))
                    total += (P.conjugate() * beta).imag
                    P += beta
            phases[si, sj] = total
    return -(phases[1, 1] + phases[-1, -1] - phases[1, -1] - phases[-1, 1]) / 4


def shoelace_area(points):
    """Signed polygon area of a closed path through ``points``."""
    x = np.array([p.real for p in points])
    y = np.array([p.imag for p in points])
    return 0.5 * float(np.sum(x * np.roll(y, -1) - np.roll(x, -1) * y))
