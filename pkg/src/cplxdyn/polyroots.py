"""Polynomial utilities on ascending-degree complex coefficient tuples.

The package stores every polynomial lowest-degree-first, as in the
rational-potential coefficient lists.  Root finding goes through the
companion matrix (numpy.roots) and is then polished with damped Newton
iteration; nearby roots are clustered into multiplicity groups and a
multiplicity-m root is refined as a simple root of the (m-1)-th
derivative.
"""

from __future__ import annotations

import cmath

import numpy as np

from .errors import NoConvergence

Coeffs = tuple[complex, ...]

#: roots closer than this collapse into one multiplicity group
CLUSTER_RADIUS = 1e-7


def trim(coeffs) -> Coeffs:
    """Drop trailing (highest-degree) coefficients that are negligible."""
    c = [complex(v) for v in coeffs]
    scale = max((abs(v) for v in c), default=0.0)
    cutoff = 1e-14 * scale
    while c and abs(c[-1]) <= cutoff:
        c.pop()
    return tuple(c)


def degree(coeffs: Coeffs) -> int:
    """Degree of a trimmed coefficient tuple; -1 for the zero polynomial."""
    return len(coeffs) - 1


def polyval(coeffs: Coeffs, x: complex) -> complex:
    """Horner evaluation."""
    acc = 0j
    for c in reversed(coeffs):
        acc = acc * x + c
    return acc


def polyder(coeffs: Coeffs) -> Coeffs:
    return tuple(k * coeffs[k] for k in range(1, len(coeffs)))


def polyadd(a: Coeffs, b: Coeffs) -> Coeffs:
    n = max(len(a), len(b))
    return tuple(
        (a[k] if k < len(a) else 0j) + (b[k] if k < len(b) else 0j) for k in range(n)
    )


def polysub(a: Coeffs, b: Coeffs) -> Coeffs:
    return polyadd(a, tuple(-v for v in b))


def polymul(a: Coeffs, b: Coeffs) -> Coeffs:
    if not a or not b:
        return ()
    out = [0j] * (len(a) + len(b) - 1)
    for i, ai in enumerate(a):
        for j, bj in enumerate(b):
            out[i + j] += ai * bj
    return tuple(out)


def polyscale(a: Coeffs, s: complex) -> Coeffs:
    return tuple(s * v for v in a)


def poly_divmod(a: Coeffs, b: Coeffs) -> tuple[Coeffs, Coeffs]:
    """Euclidean division a = q*b + r with deg r < deg b."""
    b = trim(b)
    if not b:
        raise ZeroDivisionError("polynomial division by zero")
    r = list(a)
    q = [0j] * max(len(a) - len(b) + 1, 1)
    db = len(b) - 1
    lead = b[-1]
    for k in range(len(r) - 1, db - 1, -1):
        f = r[k] / lead
        q[k - db] = f
        for j in range(db + 1):
            r[k - db + j] -= f * b[j]
    return trim(q), trim(r)


def poly_gcd(a: Coeffs, b: Coeffs, tol: float = 1e-12) -> Coeffs:
    """Monic approximate GCD via the Euclidean remainder sequence.

    Remainders with norm below tol (relative to the running scale) count
    as zero, so clustered floating-point inputs still reduce.
    """
    a, b = trim(a), trim(b)
    if not a:
        return _monic(b)
    if not b:
        return _monic(a)
    while b:
        scale = max(abs(v) for v in b)
        _, r = poly_divmod(a, b)
        if r and max(abs(v) for v in r) <= tol * max(scale, 1.0):
            r = ()
        a, b = b, r
    return _monic(a)


def _monic(c: Coeffs) -> Coeffs:
    c = trim(c)
    if not c:
        return ()
    return tuple(v / c[-1] for v in c)


def newton_polish(coeffs: Coeffs, root: complex, tol: float = 1e-13,
                  max_iter: int = 60) -> complex:
    """Damped Newton on a simple root; raises NoConvergence on failure."""
    der = polyder(coeffs)
    scale = max(abs(v) for v in coeffs)
    x = root
    fx = polyval(coeffs, x)
    for _ in range(max_iter):
        if abs(fx) <= tol * scale * max(1.0, abs(x)) ** degree(coeffs):
            return x
        dfx = polyval(der, x)
        if dfx == 0:
            break
        step = fx / dfx
        # damp: never accept a step that grows |f|
        for _ in range(30):
            xn = x - step
            fn = polyval(coeffs, xn)
            if abs(fn) <= abs(fx):
                x, fx = xn, fn
                break
            step /= 2
        else:
            break
    if abs(fx) <= 1e-9 * scale * max(1.0, abs(x)) ** degree(coeffs):
        return x
    raise NoConvergence(f"Newton polishing stalled at |f| = {abs(fx):.3e}")


def roots_with_multiplicity(coeffs: Coeffs,
                            cluster_radius: float = CLUSTER_RADIUS) -> list[tuple[complex, int]]:
    """All roots of the polynomial as (location, multiplicity) pairs.

    Companion-matrix roots are clustered within cluster_radius; a cluster
    of size m is refined by Newton iteration on the (m-1)-th derivative,
    where the multiple root is simple.
    """
    coeffs = trim(coeffs)
    if degree(coeffs) < 1:
        return []
    raw = np.roots(np.asarray(coeffs[::-1], dtype=complex))
    order = np.lexsort((raw.imag, raw.real))
    raw = list(raw[order])

    groups: list[list[complex]] = []
    for r in raw:
        z = complex(r)
        placed = False
        for g in groups:
            if any(abs(z - v) <= cluster_radius for v in g):
                g.append(z)
                placed = True
                break
        if not placed:
            groups.append([z])

    result = []
    for g in groups:
        m = len(g)
        center = sum(g) / m
        target = coeffs
        for _ in range(m - 1):
            target = polyder(target)
        refined = complex(newton_polish(target, center))
        result.append((refined, m))
    return result
