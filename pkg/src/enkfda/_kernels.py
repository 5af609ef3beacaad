"""Compiled RK4 kernels for the two Lorenz vector fields.

The classical fourth-order Runge-Kutta loops over the internal substeps
of one observation interval dominate experiment runtime, so they are
jitted with numba. States are column-stacked (d, n) arrays; the kernels
are the only integration path for these models, keeping runs bit-stable.
"""
import numba
import numpy as np


@numba.njit(cache=True)
def _l96_rhs_into(u, forcing, out):
    d, n = u.shape
    for j in range(n):
        for i in range(d):
            ip1 = i + 1 if i + 1 < d else i + 1 - d
            im1 = i - 1 if i >= 1 else i - 1 + d
            im2 = i - 2 if i >= 2 else i - 2 + d
            out[i, j] = (u[ip1, j] - u[im2, j]) * u[im1, j] - u[i, j] + forcing


@numba.njit(cache=True)
def rk4_lorenz96(u0, forcing, h, nsub):
    d, n = u0.shape
    u = u0.copy()
    y = np.empty((d, n))
    k1 = np.empty((d, n))
    k2 = np.empty((d, n))
    k3 = np.empty((d, n))
    k4 = np.empty((d, n))
    for _ in range(nsub):
        _l96_rhs_into(u, forcing, k1)
        for j in range(n):
            for i in range(d):
                y[i, j] = u[i, j] + 0.5 * h * k1[i, j]
        _l96_rhs_into(y, forcing, k2)
        for j in range(n):
            for i in range(d):
                y[i, j] = u[i, j] + 0.5 * h * k2[i, j]
        _l96_rhs_into(y, forcing, k3)
        for j in range(n):
            for i in range(d):
                y[i, j] = u[i, j] + h * k3[i, j]
        _l96_rhs_into(y, forcing, k4)
        for j in range(n):
            for i in range(d):
                u[i, j] = u[i, j] + (h / 6.0) * (
                    k1[i, j] + 2.0 * k2[i, j] + 2.0 * k3[i, j] + k4[i, j]
                )
    return u


@numba.njit(cache=True)
def _l63_rhs_into(u, sigma, b, rho, out):
    n = u.shape[1]
    for j in range(n):
        x = u[0, j]
        y = u[1, j]
        z = u[2, j]
        out[0, j] = sigma * (y - x)
        out[1, j] = -sigma * x - y - x * z
        out[2, j] = x * y - b * z - b * (rho + sigma)


@numba.njit(cache=True)
def rk4_lorenz63(u0, sigma, b, rho, h, nsub):
    n = u0.shape[1]
    u = u0.copy()
    y = np.empty((3, n))
    k1 = np.empty((3, n))
    k2 = np.empty((3, n))
    k3 = np.empty((3, n))
    k4 = np.empty((3, n))
    for _ in range(nsub):
        _l63_rhs_into(u, sigma, b, rho, k1)
        for j in range(n):
            for i in range(3):
                y[i, j] = u[i, j] + 0.5 * h * k1[i, j]
        _l63_rhs_into(y, sigma, b, rho, k2)
        for j in range(n):
            for i in range(3):
                y[i, j] = u[i, j] + 0.5 * h * k2[i, j]
        _l63_rhs_into(y, sigma, b, rho, k3)
        for j in range(n):
            for i in range(3):
                y[i, j] = u[i, j] + h * k3[i, j]
        _l63_rhs_into(y, sigma, b, rho, k4)
        for j in range(n):
            for i in range(3):
                u[i, j] = u[i, j] + (h / 6.0) * (
                    k1[i, j] + 2.0 * k2[i, j] + 2.0 * k3[i, j] + k4[i, j]
                )
    return u
