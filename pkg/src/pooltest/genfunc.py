"""Generating-function arithmetic for ensemble-average event probabilities,
and the optimized exponents that decide when decoding succeeds.

The probability that a fixed input/output pair is consistent over a random
wiring reduces to one coefficient of a product of per-test enumerator
polynomials, divided by a count of socket arrangements.  Coefficients are
exact big integers (or rationals) whenever the inputs are exact.

The direct-part margins minimize log-domain objectives of the form
"weighted log enumerator minus linear term".  Each such objective is a sum
of log-sum-exp functions of u = log2(z), hence convex in u, so bracketed
golden-section search is reliable.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .bounds import binary_entropy, entropy
from .ensemble import SystemParams, TestFunction
from .errors import ConfigurationError, InputError, ReducedAlphabetError

_LN2 = math.log(2)
_PHI = (math.sqrt(5) + 1) / 2

Z_SEARCH_TOL = 1e-10       # width, in log2(z), of the final 1-D bracket
SIGMA_REFINE_TOL = 1e-9
COORDINATE_SWEEP_TOL = 1e-8
MAX_SWEEPS = 200


# ---------------------------------------------------------------------------
# polynomials
# ---------------------------------------------------------------------------


class Polynomial:
    """Dense univariate polynomial over int, Fraction or float coefficients."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: Sequence):
        coeffs = list(coeffs)
        while coeffs and coeffs[-1] == 0:
            coeffs.pop()
        self.coeffs = tuple(coeffs)

    @property
    def degree(self) -> int:
        """Degree, or -1 for the zero polynomial."""
        return len(self.coeffs) - 1

    @property
    def order(self) -> int:
        """Lowest exponent with a nonzero coefficient, or -1 for zero."""
        for j, c in enumerate(self.coeffs):
            if c != 0:
                return j
        return -1

    def coeff(self, k: int):
        if 0 <= k < len(self.coeffs):
            return self.coeffs[k]
        return 0

    def __eq__(self, other) -> bool:
        return isinstance(other, Polynomial) and self.coeffs == other.coeffs

    def __hash__(self) -> int:
        return hash(self.coeffs)

    def __repr__(self) -> str:
        return f"Polynomial({list(self.coeffs)})"

    def __add__(self, other):
        if not isinstance(other, Polynomial):
            other = Polynomial([other])
        a, b = self.coeffs, other.coeffs
        if len(a) < len(b):
            a, b = b, a
        out = list(a)
        for j, c in enumerate(b):
            out[j] = out[j] + c
        return Polynomial(out)

    __radd__ = __add__

    def __mul__(self, other):
        if not isinstance(other, Polynomial):
            return Polynomial([c * other for c in self.coeffs])
        a, b = self.coeffs, other.coeffs
        if not a or not b:
            return Polynomial([])
        out = [0] * (len(a) + len(b) - 1)
        for i, ca in enumerate(a):
            if ca == 0:
                continue
            for j, cb in enumerate(b):
                out[i + j] += ca * cb
        return Polynomial(out)

    __rmul__ = __mul__

    def __pow__(self, exponent: int):
        if exponent < 0:
            raise InputError("negative polynomial powers are not defined here")
        result = Polynomial([1])
        base = self
        e = exponent
        while e:
            if e & 1:
                result = result * base
            base = base * base if e > 1 else base
            e >>= 1
        return result

    def evaluate(self, z):
        acc = 0
        for c in reversed(self.coeffs):
            acc = acc * z + c
        return acc

    def clamp_small_negatives(self, tol: float = 1e-12) -> tuple["Polynomial", int]:
        """Zero out rounding-noise negatives; a materially negative coefficient
        is an error since these polynomials count weighted arrangements."""
        clamped = 0
        out = []
        for c in self.coeffs:
            if c < 0:
                if c < -tol:
                    raise InputError(f"coefficient {c} is negative beyond tolerance")
                out.append(0 * c)
                clamped += 1
            else:
                out.append(c)
        return Polynomial(out), clamped


class MultiPolynomial:
    """Sparse multivariate polynomial: exponent tuples mapped to coefficients."""

    __slots__ = ("nvars", "terms")

    def __init__(self, nvars: int, terms: dict):
        self.nvars = nvars
        self.terms = {tuple(t): c for t, c in terms.items() if c != 0}
        for t in self.terms:
            if len(t) != nvars:
                raise InputError(f"exponent tuple {t} does not have {nvars} entries")

    def coeff(self, exponents: Sequence[int]):
        return self.terms.get(tuple(exponents), 0)

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, MultiPolynomial)
            and self.nvars == other.nvars
            and self.terms == other.terms
        )

    def __mul__(self, other: "MultiPolynomial") -> "MultiPolynomial":
        if self.nvars != other.nvars:
            raise InputError("variable counts differ")
        out: dict = {}
        for ta, ca in self.terms.items():
            for tb, cb in other.terms.items():
                key = tuple(a + b for a, b in zip(ta, tb))
                out[key] = out.get(key, 0) + ca * cb
        return MultiPolynomial(self.nvars, out)

    def __pow__(self, exponent: int) -> "MultiPolynomial":
        if exponent < 0:
            raise InputError("negative polynomial powers are not defined here")
        result = MultiPolynomial(self.nvars, {(0,) * self.nvars: 1})
        base = self
        e = exponent
        while e:
            if e & 1:
                result = result * base
            base = base * base if e > 1 else base
            e >>= 1
        return result

    def evaluate(self, point: Sequence):
        total = 0
        for t, c in self.terms.items():
            v = c
            for e, z in zip(t, point):
                v = v * z**e
            total = total + v
        return total


def or_pool_poly(r: int) -> Polynomial:
    """(1+z)^r - 1: weight enumerator of inputs that fire a size-r OR pool."""
    if r < 1:
        raise ConfigurationError("r must be positive")
    return Polynomial([0] + [math.comb(r, j) for j in range(1, r + 1)])


def multinomial(total: int, parts: Sequence[int]) -> int:
    if sum(parts) != total:
        raise InputError(f"multinomial parts {parts} do not sum to {total}")
    out = 1
    remaining = total
    for c in parts:
        out *= math.comb(remaining, c)
        remaining -= c
    return out


def type_enumerator(f: TestFunction, k: int) -> MultiPolynomial:
    """Multivariate enumerator of the input types a test maps to output k,
    each type weighted by its number of orderings."""
    if not 0 <= k < f.num_outputs:
        raise InputError(f"output index {k} outside [0, {f.num_outputs})")
    terms = {
        t: multinomial(f.arity, t) for t, out in f.table.items() if out == k
    }
    return MultiPolynomial(f.num_inputs, terms)


def weight_enumerator(f: TestFunction, k: int) -> Polynomial:
    """Univariate enumerator, by defect count, of the binary inputs a test
    maps to output k."""
    if f.num_inputs != 2:
        raise InputError("weight enumerators need a binary input alphabet")
    r = f.arity
    coeffs = [0] * (r + 1)
    for t, out in f.table.items():
        if out == k:
            coeffs[t[1]] = math.comb(r, t[1])
    return Polynomial(coeffs)


# ---------------------------------------------------------------------------
# exact ensemble-average event probabilities
# ---------------------------------------------------------------------------


def _check_event(params: SystemParams, w: int, s: int) -> None:
    if not 0 <= w <= params.n:
        raise InputError(f"input weight {w} outside [0, {params.n}]")
    if not 0 <= s <= params.m:
        raise InputError(f"output weight {s} outside [0, {params.m}]")


def ensemble_event_probability(params: SystemParams, w: int, s: int) -> Fraction:
    """Probability, over a uniform wiring, that the noiseless OR outcome of a
    fixed weight-w input equals a fixed weight-s output vector.  Exact."""
    _check_event(params, w, s)
    l = params.l
    numer = (or_pool_poly(params.r) ** s).coeff(l * w)
    denom = math.comb(params.num_sockets, w * l)
    return Fraction(numer, denom)


def noisy_ensemble_event_probability(params: SystemParams, w: int, s: int):
    """Same event with every test outcome flipped independently with
    probability q.  Exact (a Fraction) when params.q is a Fraction;
    double precision otherwise."""
    _check_event(params, w, s)
    q = params.q
    pool = or_pool_poly(params.r)
    if isinstance(q, Fraction):
        fire = pool * (1 - q) + q
        quiet = pool * q + (1 - q)
    else:
        fire = pool * (1.0 - q) + q
        quiet = pool * q + (1.0 - q)
    mixed = (fire**s) * (quiet ** (params.m - s))
    if not isinstance(q, Fraction):
        mixed, _ = mixed.clamp_small_negatives()
    numer = mixed.coeff(params.l * w)
    denom = math.comb(params.num_sockets, w * params.l)
    if isinstance(numer, Fraction) or isinstance(numer, int):
        return Fraction(numer, denom)
    return numer / denom


def general_ensemble_event_probability(
    params: SystemParams,
    f: TestFunction,
    input_counts: Sequence[int],
    output_counts: Sequence[int],
) -> Fraction:
    """Probability, over a uniform wiring, that the outcome of a fixed input
    of the given type equals a fixed output of the given type.  Exact."""
    if f.arity != params.r:
        raise InputError(f"test function arity {f.arity} != r={params.r}")
    if len(input_counts) != f.num_inputs:
        raise InputError("input counts length must match the input alphabet")
    if len(output_counts) != f.num_outputs:
        raise InputError("output counts length must match the output alphabet")
    if sum(input_counts) != params.n:
        raise InputError(f"input counts must sum to n={params.n}")
    if sum(output_counts) != params.m:
        raise InputError(f"output counts must sum to m={params.m}")
    l = params.l
    prod = MultiPolynomial(f.num_inputs, {(0,) * f.num_inputs: 1})
    for k, s_k in enumerate(output_counts):
        if s_k:
            prod = prod * (type_enumerator(f, k) ** s_k)
    numer = prod.coeff(tuple(l * w for w in input_counts))
    denom = multinomial(params.num_sockets, [l * w for w in input_counts])
    return Fraction(numer, denom)


def general_converse_bound(
    f: TestFunction, l: int, r: int, probs: Sequence[float]
) -> float:
    """Asymptotic converse margin for an arbitrary symmetric test function:
    source entropy minus the per-object entropy of a single test outcome.
    Positive means reliable recovery is impossible."""
    if f.arity != r:
        raise InputError(f"test function arity {f.arity} != r={r}")
    if len(probs) != f.num_inputs:
        raise InputError("probs length must match the input alphabet")
    if abs(sum(probs) - 1) > 1e-9:
        raise InputError("probs must sum to 1")
    value = entropy(probs)
    for k in range(f.num_outputs):
        a_k = type_enumerator(f, k).evaluate(probs)
        if a_k > 0:
            value += (l / r) * a_k * math.log2(a_k)
    return value


# ---------------------------------------------------------------------------
# convex log-domain minimization
# ---------------------------------------------------------------------------


def _log_terms(poly: Polynomial) -> list[tuple[int, float]]:
    return [(j, math.log2(c)) for j, c in enumerate(poly.coeffs) if c > 0]


def _lse2(terms: list[tuple[int, float]], u: float) -> float:
    """log2 of poly(2^u), from precomputed (exponent, log2 coefficient) terms."""
    best = max(lg + j * u for j, lg in terms)
    acc = 0.0
    for j, lg in terms:
        acc += math.exp(_LN2 * (lg + j * u - best))
    return best + math.log2(acc)


def _lse2_slope(terms: list[tuple[int, float]], u: float) -> float:
    """d/du of _lse2(terms, u): the weight-averaged exponent at z = 2^u.
    A ratio of like-sized sums, so it stays accurate at any u, unlike the
    objective itself whose linear parts cancel catastrophically far out."""
    best = max(lg + j * u for j, lg in terms)
    tot = acc = 0.0
    for j, lg in terms:
        weight = math.exp(_LN2 * (lg + j * u - best))
        tot += weight
        acc += j * weight
    return acc / tot


def golden_section_min(fn, lo: float, hi: float, tol: float) -> tuple[float, float]:
    """Minimize a unimodal fn on [lo, hi]; returns (argmin, min value).
    Stops when the bracket is narrower than tol or rounding stops it from
    shrinking (probe points must stay strictly interior and ordered)."""
    a, b = lo, hi
    c = b - (b - a) / _PHI
    d = a + (b - a) / _PHI
    fc, fd = fn(c), fn(d)
    while b - a > tol and a < c < d < b:
        if fc < fd:
            b, d, fd = d, c, fc
            c = b - (b - a) / _PHI
            fc = fn(c)
        else:
            a, c, fc = c, d, fd
            d = a + (b - a) / _PHI
            fd = fn(d)
    mid = 0.5 * (a + b)
    return mid, fn(mid)


def _bracket_and_minimize(fn, right_deriv, tol: float) -> tuple[float, float]:
    """Minimize a convex fn of one real variable: bracket by doubling outward
    from 0 until the right derivative changes sign, then golden-section.

    Convexity makes the right derivative nondecreasing, so right_deriv(lo) < 0
    puts the minimum at or after lo and right_deriv(hi) > 0 puts it at or
    before hi.  The sign test saturates within a couple of doublings of the
    minimizer, keeping the bracket tight even when one asymptotic slope is
    within an ulp of zero (where value-based bracketing overshoots so far
    that cancellation noise swamps the comparison)."""
    lo = -1.0
    for _ in range(64):
        if right_deriv(lo) < 0:
            break
        lo *= 2
    hi = 1.0
    for _ in range(64):
        if right_deriv(hi) > 0:
            break
        hi *= 2
    return golden_section_min(fn, lo, hi, tol)


@dataclass(frozen=True)
class Infimum:
    """Result of a 1-D infimum: `bounded` is False when the objective is
    unbounded below, in which case `value` is -inf and must not be compared
    against finite results without checking the flag."""

    value: float
    z: float | None
    bounded: bool


def _weighted_infimum(
    fire: Polynomial, quiet: Polynomial, sigma: float, lp: float
) -> Infimum:
    """inf over z > 0 of sigma*log2 fire(z) + (1-sigma)*log2 quiet(z) - lp*log2 z.

    The asymptotic slopes in u = log2 z are read off the polynomials' lowest
    and highest exponents; a strictly one-signed slope pair means the infimum
    escapes to a boundary (finite limit when the escaping slope is exactly
    zero, unbounded otherwise).
    """
    ford, fdeg = fire.order, fire.degree
    qord, qdeg = quiet.order, quiet.degree
    slope_left = sigma * ford + (1 - sigma) * qord - lp
    slope_right = sigma * fdeg + (1 - sigma) * qdeg - lp
    if slope_left > 0 or slope_right < 0:
        return Infimum(-math.inf, None, False)
    fire_terms = _log_terms(fire)
    quiet_terms = _log_terms(quiet)
    if slope_left == 0:
        value = sigma * math.log2(fire.coeff(ford)) + (1 - sigma) * math.log2(
            quiet.coeff(qord)
        )
        return Infimum(value, None, True)
    if slope_right == 0:
        value = sigma * math.log2(fire.coeff(fdeg)) + (1 - sigma) * math.log2(
            quiet.coeff(qdeg)
        )
        return Infimum(value, None, True)

    def objective(u: float) -> float:
        val = -lp * u
        if sigma != 0:
            val += sigma * _lse2(fire_terms, u)
        if sigma != 1:
            val += (1 - sigma) * _lse2(quiet_terms, u)
        return val

    def derivative(u: float) -> float:
        val = -lp
        if sigma != 0:
            val += sigma * _lse2_slope(fire_terms, u)
        if sigma != 1:
            val += (1 - sigma) * _lse2_slope(quiet_terms, u)
        return val

    u_star, val = _bracket_and_minimize(objective, derivative, Z_SEARCH_TOL)
    return Infimum(val, 2.0**u_star, True)


def exponent_infimum(sigma: float, l: int, r: int, p: float) -> Infimum:
    """inf over z > 0 of sigma*log2((1+z)^r - 1) - l*p*log2(z).

    Unbounded below (flagged sentinel) whenever sigma falls outside
    [l*p/r, l*p]; in particular at sigma = 0 for any p > 0.
    """
    _check_exponent_args(l, r, p)
    if not 0 <= sigma <= l / r:
        raise InputError(f"sigma={sigma} outside [0, l/r]")
    return _weighted_infimum(or_pool_poly(r), Polynomial([1]), sigma, l * p)


def _check_exponent_args(l: int, r: int, p: float) -> None:
    if l < 1 or r < 1:
        raise ConfigurationError("degrees l and r must be positive integers")
    if not 0 < p < 1:
        raise InputError(f"p={p} must lie strictly inside (0, 1)")


def _sigma_window(
    fire: Polynomial, quiet: Polynomial, lp: float, sigma_max: float
) -> tuple[float, float]:
    """The closed sigma interval on which the weighted infimum is finite."""
    lo, hi = 0.0, sigma_max
    # left constraint: sigma*ford + (1-sigma)*qord <= lp
    a, b = quiet.order, fire.order - quiet.order
    if b > 0:
        hi = min(hi, (lp - a) / b)
    elif b < 0:
        lo = max(lo, (lp - a) / b)
    elif a > lp:
        return (1.0, 0.0)
    # right constraint: sigma*fdeg + (1-sigma)*qdeg >= lp
    a, b = quiet.degree, fire.degree - quiet.degree
    if b > 0:
        lo = max(lo, (lp - a) / b)
    elif b < 0:
        hi = min(hi, (lp - a) / b)
    elif a < lp:
        return (1.0, 0.0)
    return (lo, hi)


@dataclass(frozen=True)
class DirectExponent:
    """A maximized error exponent and the outcome-weight fraction achieving it."""

    value: float
    sigma: float


def _max_over_sigma(
    fire: Polynomial,
    quiet: Polynomial,
    lp: float,
    sigma_max: float,
    sigma_step: float,
) -> tuple[float, float]:
    """Maximize the weighted infimum over sigma by grid scan plus one local
    golden-section refinement.  The value is concave in sigma (an infimum of
    affine functions), so the refinement is safe."""
    lo, hi = _sigma_window(fire, quiet, lp, sigma_max)
    if lo > hi:
        raise InputError("the exponent is unbounded for every outcome weight")

    def phi(sigma: float) -> float:
        return _weighted_infimum(fire, quiet, sigma, lp).value

    candidates = {lo, hi, 0.5 * (lo + hi)}
    steps = int(sigma_max / sigma_step)
    for i in range(steps + 1):
        s = min(i * sigma_step, sigma_max)
        if lo <= s <= hi:
            candidates.add(s)
    best_sigma = max(sorted(candidates), key=phi)
    a = max(lo, best_sigma - sigma_step)
    b = min(hi, best_sigma + sigma_step)
    sigma_star, neg_val = golden_section_min(lambda s: -phi(s), a, b, SIGMA_REFINE_TOL)
    if -neg_val >= phi(best_sigma):
        return -neg_val, sigma_star
    return phi(best_sigma), best_sigma


def noiseless_direct_exponent(
    l: int, r: int, p: float, sigma_step: float = 1e-3
) -> DirectExponent:
    """Worst-case growth rate of the expected number of confusable typical
    inputs under noiseless OR tests; negative means decoding succeeds."""
    _check_exponent_args(l, r, p)
    phi, sigma = _max_over_sigma(
        or_pool_poly(r), Polynomial([1]), l * p, l / r, sigma_step
    )
    return DirectExponent(-(l - 1) * binary_entropy(p) + phi, sigma)


def noisy_direct_exponent(
    l: int, r: int, p: float, q: float, sigma_step: float = 1e-3
) -> DirectExponent:
    """Direct-part exponent with test outcomes flipped at rate q."""
    _check_exponent_args(l, r, p)
    if not 0 <= q < 1:
        raise InputError(f"q={q} outside [0, 1)")
    pool = or_pool_poly(r)
    fire = pool * (1.0 - q) + q
    quiet = pool * q + (1.0 - q)
    phi, sigma = _max_over_sigma(fire, quiet, l * p, l / r, sigma_step)
    value = -(l - 1) * binary_entropy(p) + (l / r) * binary_entropy(q) + phi
    return DirectExponent(value, sigma)


# ---------------------------------------------------------------------------
# margins for arbitrary symmetric test functions
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Margin:
    """A direct-part margin and the generating-variable argument achieving it."""

    value: float
    z: float


def binary_direct_margin(f: TestFunction, l: int, r: int, p: float) -> Margin:
    """Direct-part margin for a binary-input symmetric test function:
    -(l-1) h(p) + inf over z>0 of [(l/r) max_k log2 B_k(z) - l p log2 z],
    where B_k enumerates by weight the pool contents producing output k."""
    _check_exponent_args(l, r, p)
    if f.arity != r:
        raise InputError(f"test function arity {f.arity} != r={r}")
    enumerators = [weight_enumerator(f, k) for k in range(f.num_outputs)]
    term_lists = [_log_terms(e) for e in enumerators if e.degree >= 0]
    lp = l * p
    ratio = l / r

    def objective(u: float) -> float:
        return ratio * max(_lse2(t, u) for t in term_lists) - lp * u

    def right_deriv(u: float) -> float:
        # subgradient of a max of smooth convex pieces: steepest active slope
        vals = [_lse2(t, u) for t in term_lists]
        top = max(vals)
        slope = max(
            _lse2_slope(t, u) for t, v in zip(term_lists, vals) if v >= top - 1e-9
        )
        return ratio * slope - lp

    u_star, val = _bracket_and_minimize(objective, right_deriv, Z_SEARCH_TOL)
    return Margin(-(l - 1) * binary_entropy(p) + val, 2.0**u_star)


@dataclass(frozen=True)
class GeneralMargin:
    """Direct-part margin over a u-ary alphabet, with optimizer diagnostics."""

    value: float
    z: tuple[float, ...]
    sweeps: int
    converged: bool


def general_direct_margin(
    f: TestFunction, l: int, r: int, probs: Sequence[float]
) -> GeneralMargin:
    """Direct-part margin for an arbitrary symmetric test function over a
    finite input alphabet with symbol distribution probs.

    The inner objective (l/r) max_k log2 A_k(z) - l sum_i p_i log2 z_i is
    convex in the coordinates u_i = log2 z_i and scale invariant, so z_1 is
    pinned to 1 and the rest minimized by cyclic coordinate descent.
    """
    if l < 1 or r < 1:
        raise ConfigurationError("degrees l and r must be positive integers")
    if f.arity != r:
        raise InputError(f"test function arity {f.arity} != r={r}")
    nv = f.num_inputs
    if len(probs) != nv:
        raise InputError("probs length must match the input alphabet")
    for p_i in probs:
        if p_i <= 0:
            raise ReducedAlphabetError(
                f"symbol probability {p_i} is not positive; drop the symbol first"
            )
    if abs(sum(probs) - 1) > 1e-9:
        raise InputError("probs must sum to 1")

    # terms per output: (exponent tuple, log2 multiplicity)
    term_lists = []
    for k in range(f.num_outputs):
        alpha = type_enumerator(f, k)
        if alpha.terms:
            term_lists.append(
                [(t, math.log2(c)) for t, c in sorted(alpha.terms.items())]
            )
    ratio = l / r

    def lse_multi(terms, u_vec):
        best = -math.inf
        vals = []
        for t, lg in terms:
            v = lg
            for e, u_i in zip(t, u_vec):
                v += e * u_i
            vals.append(v)
            if v > best:
                best = v
        return best + math.log2(sum(math.exp(_LN2 * (v - best)) for v in vals))

    def lse_multi_slope(terms, u_vec, j):
        best = -math.inf
        vals = []
        for t, lg in terms:
            v = lg
            for e, u_i in zip(t, u_vec):
                v += e * u_i
            vals.append(v)
            if v > best:
                best = v
        tot = acc = 0.0
        for (t, _), v in zip(terms, vals):
            weight = math.exp(_LN2 * (v - best))
            tot += weight
            acc += t[j] * weight
        return acc / tot

    def objective(u_vec) -> float:
        val = ratio * max(lse_multi(t, u_vec) for t in term_lists)
        for p_i, u_i in zip(probs, u_vec):
            val -= l * p_i * u_i
        return val

    def coordinate_right_deriv(u_vec, j) -> float:
        vals = [lse_multi(t, u_vec) for t in term_lists]
        top = max(vals)
        slope = max(
            lse_multi_slope(t, u_vec, j)
            for t, v in zip(term_lists, vals)
            if v >= top - 1e-9
        )
        return ratio * slope - l * probs[j]

    u_vec = [0.0] * nv
    current = objective(u_vec)
    sweeps = 0
    converged = nv == 1
    while sweeps < MAX_SWEEPS and not converged:
        sweeps += 1
        previous = current
        for j in range(1, nv):
            base = u_vec[j]

            def along(du: float, j=j, base=base) -> float:
                u_vec[j] = base + du
                return objective(u_vec)

            def along_deriv(du: float, j=j, base=base) -> float:
                u_vec[j] = base + du
                return coordinate_right_deriv(u_vec, j)

            du_star, val = _bracket_and_minimize(along, along_deriv, Z_SEARCH_TOL)
            if val < current:
                u_vec[j] = base + du_star
                current = val
            else:
                u_vec[j] = base
        if previous - current < COORDINATE_SWEEP_TOL:
            converged = True
    value = -(l - 1) * entropy(probs) + current
    return GeneralMargin(value, tuple(2.0**u for u in u_vec), sweeps, converged)
