"""Exact and floating-point evaluation of the protocol's combinatorial functions.

The memory-simulation closed forms are built from one family of integer
coefficients and a few generating-function style sums:

  - ``f_coeff(j, k) = C(j-1+k, k)``, equivalently the recurrence
    f_j(0) = 1, f_j(k+1) = sum_{j'=1..j} f_j'(k);
  - Catalan numbers C(2n, n) / (n + 1);
  - ``L(n, m, x) = (1-x)^n * sum_{j<=m} f_n(j) x^j`` and the companions
    K (j-weighted) and I ((n-j)-weighted) with K + I = L;
  - ``delta_d(gamma)``: the Catalan tail sum_{n>=d} cat(n) [gamma(1-gamma)]^n,
    computed through the exact finite identity
    delta_d = (1-gamma)/gamma - sum_{n<d} cat(n) [gamma(1-gamma)]^n,
    valid for gamma > 1/2 (never by truncating the slowly converging tail);
  - ``I_d(x, y)``: the double sum controlling the memory-assisted work
    extraction error, evaluated with multiplicative term recurrences so no
    oversized binomial is ever formed in float mode.

Every function accepts ``fractions.Fraction`` arguments and then evaluates
exactly; float arguments use double precision.  L has three independent
evaluation routes (definition, alternating sum, quadrature) that are
cross-checked in the test suite.  The alternating route is evaluated in
exact rational arithmetic internally because its raw floating-point form
cancels catastrophically already around n = 25.
"""

from __future__ import annotations

import math
from fractions import Fraction

import numpy as np

SQRT_PI = math.sqrt(math.pi)

# gamma must exceed 1/2 by at least this much for the delta_d closed form;
# the bounding constant diverges at gamma = 1/2.
DELTA_GAMMA_MARGIN = 1.0e-9

# C(2d-2, d-1) overflows double around d = 515; well before 1000 the term
# recurrences start mixing overflow-prone ratios, so float mode is capped.
MAX_FLOAT_D = 1000


def _require_int(value, name, minimum):
    if not isinstance(value, (int, np.integer)) or isinstance(value, bool):
        raise ValueError(f"{name} must be an integer")
    if value < minimum:
        raise ValueError(f"{name} must be >= {minimum}")
    return int(value)


def _is_exact(x) -> bool:
    return isinstance(x, (Fraction, int)) and not isinstance(x, bool)


def f_coeff(j: int, k: int) -> int:
    """Coefficient f_j(k) = C(j-1+k, k), exact integer."""
    j = _require_int(j, "j", 1)
    k = _require_int(k, "k", 0)
    return math.comb(j - 1 + k, k)


def f_table(max_j: int, max_k: int):
    """Table f[j][k] for j = 1..max_j, k = 0..max_k via the recurrence.

    Row k+1 is the column-wise prefix sum of row k; returned as a dict keyed
    by j so the 1-based level index stays explicit.  Used as the independent
    cross-check of the closed binomial form.
    """
    max_j = _require_int(max_j, "max_j", 1)
    max_k = _require_int(max_k, "max_k", 0)
    rows = {j: [1] for j in range(1, max_j + 1)}
    prev = [1] * max_j
    for _ in range(max_k):
        acc = 0
        nxt = []
        for j in range(max_j):
            acc += prev[j]
            nxt.append(acc)
            rows[j + 1].append(acc)
        prev = nxt
    return rows


def catalan(n: int) -> int:
    """Catalan number C(2n, n) / (n + 1), exact integer."""
    n = _require_int(n, "n", 0)
    return math.comb(2 * n, n) // (n + 1)


def _l_definition(n, m, x):
    one = Fraction(1) if _is_exact(x) else 1.0
    term = one
    acc = one
    for j in range(m):
        term = term * x * (n + j) / (j + 1)
        acc = acc + term
    return (one - x) ** n * acc


def _l_alternating(n, m, x):
    """1 - n C(n+m, m) x^{m+1} sum_l C(n-1, l) (-x)^l / (m+l+1), exactly.

    The sum alternates with huge binomial terms; it is only meaningful in
    exact arithmetic, so float inputs are promoted to their exact binary
    Fraction first and the result is rounded once at the end.
    """
    exact_in = _is_exact(x)
    xq = x if isinstance(x, Fraction) else Fraction(x)
    acc = Fraction(0)
    sign = 1
    xpow = Fraction(1)
    for l in range(n):
        acc += Fraction(sign * math.comb(n - 1, l), m + l + 1) * xpow
        xpow *= xq
        sign = -sign
    result = 1 - n * math.comb(n + m, m) * xq ** (m + 1) * acc
    return result if exact_in else float(result)


def _simpson_to_tolerance(m, n_minus_1, upper, rel_tol=1.0e-12):
    """Integral of t^m (1-t)^{n-1} on [0, upper] by refined composite Simpson.

    Panel count doubles until the Richardson error estimate |S_h - S_2h|/15
    drops below rel_tol relative to the running value.  The integrand is a
    smooth polynomial, so convergence is O(h^4).
    """
    if upper == 0.0:
        return 0.0

    def total(panels):
        ts = np.linspace(0.0, upper, 2 * panels + 1)
        vals = ts ** m * (1.0 - ts) ** n_minus_1
        h = upper / (2 * panels)
        return h / 3.0 * (vals[0] + vals[-1]
                          + 4.0 * vals[1:-1:2].sum() + 2.0 * vals[2:-1:2].sum())

    panels = 64
    prev = total(panels)
    for _ in range(16):
        panels *= 2
        cur = total(panels)
        if abs(cur - prev) <= 15.0 * rel_tol * max(abs(cur), 1.0e-300):
            return cur
        prev = cur
    return prev


def _l_quadrature(n, m, x):
    x = float(x)
    integral = _simpson_to_tolerance(m, n - 1, x)
    return 1.0 - n * math.comb(n + m, m) * integral


_L_ROUTES = {
    "definition": _l_definition,
    "alternating": _l_alternating,
    "quadrature": _l_quadrature,
}


def L_eval(n: int, m: int, x, route: str = "definition"):
    """L(n, m, x) = (1-x)^n sum_{j=0}^m f_n(j) x^j via the chosen route.

    L(n, m, 0) = 1 and L(n, m, 1) = 0 for every n >= 1, m >= 0.
    """
    n = _require_int(n, "n", 1)
    m = _require_int(m, "m", 0)
    if not (0 <= x <= 1):
        raise ValueError("x must lie in [0, 1]")
    try:
        fn = _L_ROUTES[route]
    except KeyError:
        raise ValueError(f"unknown route {route!r}; pick one of {sorted(_L_ROUTES)}")
    return fn(n, m, x)


def L_derivative(n: int, m: int, x):
    """Closed-form derivative dL/dx = -n C(n+m, m) x^m (1-x)^{n-1}."""
    n = _require_int(n, "n", 1)
    m = _require_int(m, "m", 0)
    return -n * math.comb(n + m, m) * x ** m * (1 - x) ** (n - 1)


def K_eval(n: int, m: int, x):
    """K(n, m, x) = ((1-x)^n / n) sum_{j=0}^m j f_n(j) x^j.

    Satisfies K = x L / (1-x) + (x/n) dL/dx.
    """
    n = _require_int(n, "n", 1)
    m = _require_int(m, "m", 0)
    one = Fraction(1) if _is_exact(x) else 1.0
    term = one  # f_n(j) x^j, starting at j = 0
    acc = 0 * one
    for j in range(m):
        term = term * x * (n + j) / (j + 1)
        acc = acc + (j + 1) * term
    return (one - x) ** n * acc / n


def I_nm_eval(n: int, m: int, x):
    """I(n, m, x) = ((1-x)^n / n) sum_{j=0}^m (n-j) f_n(j) x^j = L - K."""
    n = _require_int(n, "n", 1)
    m = _require_int(m, "m", 0)
    one = Fraction(1) if _is_exact(x) else 1.0
    term = one
    acc = n * one
    for j in range(m):
        term = term * x * (n + j) / (j + 1)
        acc = acc + (n - j - 1) * term
    return (one - x) ** n * acc / n


def delta_d(d: int, gamma):
    """Catalan tail sum_{n>=d} cat(n) [gamma(1-gamma)]^n for gamma in (1/2, 1).

    Evaluated by the exact finite identity: the full series equals
    (1-gamma)/gamma, so the tail is that total minus the first d-1 terms.
    delta_1 is the full series; the tail is strictly decreasing in d.
    Fraction input gives the exact rational value.
    """
    d = _require_int(d, "d", 1)
    g = float(gamma)
    if not (0.5 + DELTA_GAMMA_MARGIN < g < 1.0):
        raise ValueError("gamma must lie in (1/2, 1), strictly above 1/2")
    one = Fraction(1) if _is_exact(gamma) else 1.0
    z = gamma * (one - gamma)
    acc = (one - gamma) / gamma
    term = z  # catalan(n) z^n, starting at n = 1
    for n in range(1, d):
        acc = acc - term
        term = term * z * (2 * (2 * n + 1)) / (n + 2)
    return acc


def catalan_tail_bound(d: int, gamma) -> float:
    """Explicit upper bound (4 gamma(1-gamma))^d / (sqrt(pi) d^{3/2} (2 gamma - 1)^2).

    Bounds delta_d(gamma); derived from Stirling asymptotics, so it is only
    asserted for d >= 10 in the test suite.
    """
    d = _require_int(d, "d", 1)
    g = float(gamma)
    if not (0.5 < g < 1.0):
        raise ValueError("gamma must lie in (1/2, 1)")
    return (4.0 * g * (1.0 - g)) ** d / (SQRT_PI * d ** 1.5 * (2.0 * g - 1.0) ** 2)


def _geometric_terms_exact(d, x):
    """Terms f_d(k) x^k (1-x)^d for k = 0..d-1, exact rationals."""
    t = (1 - x) ** d
    out = [t]
    for k in range(d - 1):
        t = t * x * (d + k) / (k + 1)
        out.append(t)
    return out


def _geometric_terms_float(d, x):
    t0 = (1.0 - x) ** d
    if d == 1:
        return np.array([t0])
    ks = np.arange(1, d, dtype=np.float64)
    ratios = x * (d + ks - 1.0) / ks
    out = np.empty(d)
    out[0] = t0
    out[1:] = t0 * np.cumprod(ratios)
    return out


def I_d_eval(d: int, x, y):
    """Double sum (1/d) sum_{j+k<=d-1} (d-j-k) f_d(k) x^k f_d(j) y^j (1-x)^d (1-y)^d.

    Symmetric under swapping x and y.  Evaluated with prefix sums over the
    term recurrences, O(d) per call.  Float mode rejects d > 1000 (binomial
    magnitudes overflow doubles); pass Fraction arguments for exact
    evaluation beyond that.
    """
    d = _require_int(d, "d", 1)
    if not (0 <= x < 1 and 0 <= y < 1):
        raise ValueError("x and y must lie in [0, 1)")
    exact = _is_exact(x) and _is_exact(y)
    if not exact and d > MAX_FLOAT_D:
        raise ValueError(
            f"d = {d} exceeds float-mode limit {MAX_FLOAT_D}; "
            "pass Fraction arguments for exact evaluation")
    if exact:
        tx = _geometric_terms_exact(d, x)
        ty = _geometric_terms_exact(d, y)
        p = [tx[0]]  # prefix sums of tx
        q = [0 * tx[0]]  # prefix sums of k * tx_k
        for k in range(1, d):
            p.append(p[-1] + tx[k])
            q.append(q[-1] + k * tx[k])
        total = 0 * tx[0]
        for j in range(d):
            total += ty[j] * ((d - j) * p[d - 1 - j] - q[d - 1 - j])
        return total / d
    tx = _geometric_terms_float(d, float(x))
    ty = _geometric_terms_float(d, float(y))
    p = np.cumsum(tx)
    q = np.cumsum(np.arange(d) * tx)
    js = np.arange(d)
    total = float(np.sum(ty * ((d - js) * p[::-1] - q[::-1])))
    return total / d


def I_d_limit(x: float, y: float) -> float:
    """Large-d limit of I_d: max(0, 1 - x/(1-x) - y/(1-y))."""
    if not (0 <= x < 1 and 0 <= y < 1):
        raise ValueError("x and y must lie in [0, 1)")
    value = 1.0 - x / (1.0 - x) - y / (1.0 - y)
    return value if value > 0.0 else 0.0
