"""Projective-space metric, proximality, and contraction estimates.

The projective space P(V) over a local field carries the distance

    d(x1, x2) = inf { ||v1 - v2|| : v_i a unit representative of x_i }

for the coordinate sup-norm.  Over R the infimum runs over two signs;
over C over a unit-modulus phase; over Q_p over the unit group, where it
collapses to an exact closed form: for sup-normalized representatives,

    d(x1, x2) = max_{i<j} |v_i w_j - v_j w_i|.

(The 2x2-minor formula provably equals the infimum: ">=" because
(v - uw) ^ w = v ^ w and the ultrametric bounds each minor by
||v - uw||; "<=" by taking u = v_j / w_j at a unit coordinate j of w.)

An endomorphism is proximal when a unique simple eigenvalue dominates in
absolute value; it then contracts P(V) away from a repelling hyperplane
toward an attracting line.  Over R/C the classification is a floating
eigensolve with an explicit resolution threshold; over Q_p it is exact,
via the Newton polygon of the characteristic polynomial, with the
dominant eigenvalue lifted to prescribed p-adic precision.

All distances are relative to the coordinate basis fixing the sup-norm
(weight-adapted coordinates, in the representation-theoretic setting);
epsilon thresholds are basis-relative in the same sense.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field as dc_field
from fractions import Fraction

import numpy as np

from .cartan import cartan, to_float_array, weight_pairing
from .errors import IndeterminateError, NumericalError, PreconditionError
from .exact import (
    charpoly,
    det as exact_det,
    inverse as exact_inverse,
    mat_from_rows,
    mat_mul,
)
from .fields import INF, FieldDesc, rational_valuation

_EQ_TOL = 1e-12
_GAP_TOL = 1e-8


# ---------------------------------------------------------------------------
# points and hyperplanes


def _sup_normalize_exact(vec, p):
    vals = [rational_valuation(x, p) for x in vec if x != 0]
    if not vals:
        raise PreconditionError("zero vector")
    m = min(vals)
    scale = Fraction(p) ** (-m)
    return tuple(Fraction(x) * scale for x in vec)


def _sup_normalize_float(vec):
    a = np.asarray(vec)
    a = a.astype(complex) if np.iscomplexobj(a) else a.astype(float)
    s = np.abs(a).max()
    if s == 0:
        raise PreconditionError("zero vector")
    return a / s


class ProjPoint:
    """A point of projective space, stored as a sup-normalized vector."""

    __slots__ = ("field", "vec")

    def __init__(self, vec, field: FieldDesc):
        self.field = field
        if field.kind == "padic":
            self.vec = _sup_normalize_exact(vec, field.p)
        else:
            self.vec = _sup_normalize_float(vec)

    @property
    def dim(self) -> int:
        return len(self.vec)

    def __eq__(self, other):
        if not isinstance(other, ProjPoint) or other.field != self.field:
            return NotImplemented
        if self.dim != other.dim:
            return False
        if self.field.kind == "padic":
            return all(
                self.vec[i] * other.vec[j] == self.vec[j] * other.vec[i]
                for i in range(self.dim)
                for j in range(i + 1, self.dim)
            )
        v, w = self.vec, other.vec
        cross = np.abs(np.outer(v, w) - np.outer(w, v).T)
        return bool(cross.max() < _EQ_TOL)

    def __hash__(self):  # pragma: no cover - points are not dict keys in hot paths
        return hash(self.dim)

    def aligned_axis(self):
        """Index j if the point is the j-th coordinate line, else None."""
        if self.field.kind == "padic":
            nz = [i for i, x in enumerate(self.vec) if x != 0]
        else:
            nz = [i for i, x in enumerate(self.vec) if abs(x) > _EQ_TOL]
        return nz[0] if len(nz) == 1 else None

    def __repr__(self):
        return f"ProjPoint({list(self.vec)!r})"


class ProjHyperplane:
    """A projective hyperplane, stored as a sup-normalized functional."""

    __slots__ = ("field", "functional")

    def __init__(self, functional, field: FieldDesc):
        self.field = field
        if field.kind == "padic":
            self.functional = _sup_normalize_exact(functional, field.p)
        else:
            self.functional = _sup_normalize_float(functional)

    @property
    def dim(self) -> int:
        return len(self.functional)

    def pair(self, point: ProjPoint):
        if self.field.kind == "padic":
            return sum(a * b for a, b in zip(self.functional, point.vec))
        f = np.asarray(self.functional)
        return complex(np.dot(f, point.vec)) if np.iscomplexobj(f) or np.iscomplexobj(
            point.vec
        ) else float(np.dot(f, point.vec))

    def contains(self, point: ProjPoint) -> bool:
        val = self.pair(point)
        if self.field.kind == "padic":
            return val == 0
        return abs(val) < _EQ_TOL

    def aligned_axis(self):
        if self.field.kind == "padic":
            nz = [i for i, x in enumerate(self.functional) if x != 0]
        else:
            nz = [i for i, x in enumerate(self.functional) if abs(x) > _EQ_TOL]
        return nz[0] if len(nz) == 1 else None

    def basis(self):
        """A basis of the underlying linear hyperplane."""
        if self.field.kind == "padic":
            f = self.functional
            j = min(
                range(len(f)),
                key=lambda i: rational_valuation(f[i], self.field.p)
                if f[i] != 0
                else INF,
            )
            out = []
            for i in range(len(f)):
                if i == j:
                    continue
                v = [Fraction(0)] * len(f)
                v[i] = Fraction(1)
                v[j] = -f[i] / f[j]
                out.append(tuple(v))
            return out
        f = np.asarray(self.functional, dtype=complex if np.iscomplexobj(
            self.functional) else float)
        j = int(np.abs(f).argmax())
        out = []
        for i in range(len(f)):
            if i == j:
                continue
            v = np.zeros(len(f), dtype=f.dtype)
            v[i] = 1
            v[j] = -f[i] / f[j]
            out.append(v)
        return out

    def __repr__(self):
        return f"ProjHyperplane({list(self.functional)!r})"


def _padic_abs(x, p):
    if x == 0:
        return Fraction(0)
    return Fraction(p) ** (-rational_valuation(x, p))


def proj_distance(x1: ProjPoint, x2: ProjPoint):
    """Exact infimum distance between two projective points.

    Real: minimum over the sign choice.  Complex: minimized over the
    unit-modulus phase (dense scan plus golden-section refinement, well
    below 1e-10).  Padic: the exact 2x2-minor formula; returns a
    Fraction (a power of p, or 0).
    """
    if x1.field != x2.field:
        raise PreconditionError("points live over different fields")
    if x1.dim != x2.dim:
        raise PreconditionError("dimension mismatch")
    if x1.field.kind == "padic":
        p = x1.field.p
        best = Fraction(0)
        v, w = x1.vec, x2.vec
        for i in range(len(v)):
            for j in range(i + 1, len(v)):
                m = _padic_abs(v[i] * w[j] - v[j] * w[i], p)
                if m > best:
                    best = m
        return best
    v = np.asarray(x1.vec)
    w = np.asarray(x2.vec)
    if x1.field.kind == "complex" or np.iscomplexobj(v) or np.iscomplexobj(w):
        return _complex_phase_min(v.astype(complex), w.astype(complex))
    return float(min(np.abs(v - w).max(), np.abs(v + w).max()))


def _complex_phase_min(v, w, coarse=720, refine_iters=80):
    def f(theta):
        return float(np.abs(v - np.exp(1j * theta) * w).max())

    thetas = np.linspace(0.0, 2 * math.pi, coarse, endpoint=False)
    vals = [f(t) for t in thetas]
    k = int(np.argmin(vals))
    lo = thetas[k] - 2 * math.pi / coarse
    hi = thetas[k] + 2 * math.pi / coarse
    gr = (math.sqrt(5) - 1) / 2
    a, b = lo, hi
    c = b - gr * (b - a)
    d = a + gr * (b - a)
    fc, fd = f(c), f(d)
    for _ in range(refine_iters):
        if fc < fd:
            b, d, fd = d, c, fc
            c = b - gr * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + gr * (b - a)
            fd = f(d)
    return min(vals[k], fc, fd)


@dataclass
class HyperplaneDistance:
    """Distance from a point to a hyperplane: certified bounds.

    ``exact`` means lower == upper is the true infimum (always over
    padic fields and for coordinate hyperplanes over R).
    """

    lower: float
    upper: float
    exact: bool

    @property
    def value(self):
        return self.lower


def point_hyperplane_distance(x: ProjPoint, H: ProjHyperplane) -> HyperplaneDistance:
    if x.field != H.field or x.dim != H.dim:
        raise PreconditionError("incompatible point/hyperplane")
    if x.field.kind == "padic":
        d = _padic_abs(H.pair(x), x.field.p)
        return HyperplaneDistance(d, d, True)
    f = np.asarray(H.functional)
    v = np.asarray(x.vec)
    val = abs(complex(np.dot(f, v)))
    lower = val / float(np.abs(f).sum())
    axis = H.aligned_axis()
    if axis is not None and x.field.kind == "real":
        # coordinate hyperplane {x_axis = 0}: distance is exactly |v_axis|
        d = float(abs(v[axis]))
        return HyperplaneDistance(d, d, True)
    # generic upper bound: snap to the Euclidean projection, renormalized
    upper = lower
    if val < np.abs(f @ f.conj()):
        w = v - (np.dot(f.conj(), v) / np.dot(f, f.conj())) * f.conj()
        if np.abs(w).max() > 0:
            pw = ProjPoint(w, x.field)
            upper = float(proj_distance(x, pw))
    upper = max(upper, lower)
    return HyperplaneDistance(float(lower), float(upper), False)


# ---------------------------------------------------------------------------
# proximality


@dataclass
class ProximalData:
    """Dominant-eigenvalue data of a proximal endomorphism."""

    eigenvalue: object
    attracting: ProjPoint
    repelling: ProjHyperplane
    gap_ratio: float
    eigenvalue_exact: bool = True
    precision: int | None = None


def newton_polygon(points):
    """Lower convex hull of (abscissa, ordinate) pairs, left to right.

    Returns the hull vertices; infinite ordinates are skipped by the
    caller.  Used to read off root valuations of p-adic polynomials.
    """
    pts = sorted(points)
    hull = []
    for pt in pts:
        while len(hull) >= 2:
            (x1, y1), (x2, y2) = hull[-2], hull[-1]
            # keep the hull lower-convex
            if (y2 - y1) * (pt[0] - x1) >= (pt[1] - y1) * (x2 - x1):
                hull.pop()
            else:
                break
        hull.append(pt)
    return hull


def root_valuations(coeffs, p):
    """Valuations (with multiplicity, ascending) of the roots of a
    p-adic polynomial given by exact rational coefficients c_0..c_n."""
    pts = [
        (i, rational_valuation(c, p)) for i, c in enumerate(coeffs) if c != 0
    ]
    if len(pts) < 2:
        raise PreconditionError("polynomial has at most one term")
    hull = newton_polygon(pts)
    vals = []
    for (x1, y1), (x2, y2) in zip(hull, hull[1:]):
        slope = Fraction(y2 - y1, x2 - x1)
        vals.extend([-slope] * (x2 - x1))
    return sorted(vals)


def _modinv(a, m):
    return pow(a % m, -1, m)


def _rational_reconstruct(a, m):
    """Small rational x/y with x/y = a mod m, |x|, y <= sqrt(m/2), or None."""
    bound = math.isqrt(m // 2)
    r0, r1 = m, a % m
    s0, s1 = 0, 1
    while r1 > bound:
        qq = r0 // r1
        r0, r1 = r1, r0 - qq * r1
        s0, s1 = s1, s0 - qq * s1
    if abs(s1) > bound or s1 == 0:
        return None
    return Fraction(r1, s1) if s1 > 0 else Fraction(-r1, -s1)


def _hensel_dominant_root(coeffs, p, vmin, precision):
    """Lift the unique minimal-valuation root of the polynomial.

    coeffs are the exact coefficients of a monic-after-rescaling
    polynomial whose Newton polygon has a length-1 segment of minimal
    root valuation vmin.  Substituting X = p^vmin * Y yields a monic
    p-integral polynomial with a single unit root, simple mod p; Newton
    iteration then converges quadratically.
    """
    n = len(coeffs) - 1
    mod = p ** precision
    scaled = []
    for i, c in enumerate(coeffs):
        b = Fraction(c) * Fraction(p) ** ((i - n) * vmin)
        num, den = b.numerator, b.denominator
        if den % p == 0:
            raise NumericalError("rescaled coefficient not p-integral")
        scaled.append(num * _modinv(den, mod) % mod)
    # sum of roots = -b_{n-1}; all non-dominant roots vanish mod p
    y = (-scaled[n - 1]) % mod
    if y % p == 0:
        raise NumericalError("dominant residue unexpectedly zero mod p")

    def poly_eval(cs, x):
        acc = 0
        for c in reversed(cs):
            acc = (acc * x + c) % mod
        return acc

    deriv = [(i * scaled[i]) % mod for i in range(1, n + 1)]
    for _ in range(precision.bit_length() + 3):
        fy = poly_eval(scaled, y)
        if fy == 0:
            break
        dy = poly_eval(deriv, y)
        y = (y - fy * _modinv(dy, mod)) % mod
    return Fraction(y) * Fraction(p) ** vmin, mod


def proximal_analyze(
    matrix,
    field: FieldDesc,
    gap_tol: float = _GAP_TOL,
    precision: int = 60,
):
    """Classify a square matrix as proximal or not; return its data.

    Archimedean: full eigensolve; declared proximal when the relative
    modulus gap between the two largest eigenvalues is >= gap_tol;
    an exact floating tie means not proximal (None); a nonzero gap below
    gap_tol raises IndeterminateError (floating eigensolves cannot
    certify equality of moduli).

    Padic: exact characteristic polynomial and Newton polygon; proximal
    iff the minimal-valuation segment has horizontal length 1.  The
    dominant eigenvalue is then lifted to ``precision`` p-adic digits
    (exact when rational reconstruction finds a true root), and the
    attracting line / repelling hyperplane are obtained from the exact
    adjugate of (g - lambda), accurate to the same precision.
    """
    if field.kind == "padic":
        return _proximal_padic(matrix, field, precision)
    a = to_float_array(matrix)
    if not np.all(np.isfinite(a)) or np.abs(a).max() == 0:
        raise PreconditionError("matrix must be nonzero with finite entries")
    try:
        eigvals, eigvecs = np.linalg.eig(a)
    except np.linalg.LinAlgError as e:
        raise NumericalError(f"eigensolve failed: {e}") from e
    moduli = np.abs(eigvals)
    order = np.argsort(-moduli)
    m0, m1 = moduli[order[0]], moduli[order[1]]
    if m0 == 0:
        return None
    rel_gap = (m0 - m1) / m0
    if rel_gap < gap_tol:
        if rel_gap == 0.0:
            return None
        raise IndeterminateError(
            f"modulus gap {rel_gap:.3e} below resolution threshold {gap_tol:.1e}"
        )
    lam = eigvals[order[0]]
    if field.kind == "real":
        lam = float(lam.real) if np.iscomplexobj(eigvals) else float(lam)
    vec = eigvecs[:, order[0]]
    if field.kind == "real" and np.iscomplexobj(vec):
        vec = vec.real if np.abs(vec.imag).max() < 1e-9 * np.abs(vec).max() else vec
        if np.iscomplexobj(vec):  # pragma: no cover - guarded by the gap test
            raise NumericalError("complex attracting line for a real matrix")
    # repelling hyperplane = kernel of the dominant left eigenvector
    lvals, lvecs = np.linalg.eig(a.T)
    li = int(np.argmin(np.abs(lvals - lam)))
    functional = lvecs[:, li]
    if field.kind == "real" and np.iscomplexobj(functional):
        functional = functional.real
    return ProximalData(
        eigenvalue=lam,
        attracting=ProjPoint(vec, field),
        repelling=ProjHyperplane(functional, field),
        gap_ratio=float(m1 / m0),
        eigenvalue_exact=False,
    )


def _proximal_padic(matrix, field, precision):
    M = mat_from_rows(matrix)
    p = field.p
    coeffs = charpoly(M)
    if coeffs[0] == 0:
        raise PreconditionError("matrix is not invertible")
    vals = root_valuations(coeffs, p)
    vmin = vals[0]
    if vals.count(vmin) != 1 or vmin.denominator != 1:
        return None
    vmin = int(vmin)
    lam, mod = _hensel_dominant_root(coeffs, p, vmin, precision)
    exact = _poly_eval_exact(coeffs, lam) == 0
    if not exact:
        rec = _rational_reconstruct(
            int(lam / Fraction(p) ** vmin), mod
        )
        if rec is not None:
            cand = rec * Fraction(p) ** vmin
            if _poly_eval_exact(coeffs, cand) == 0:
                lam, exact = cand, True
    n = len(M)
    shifted = tuple(
        tuple(M[i][j] - (lam if i == j else 0) for j in range(n)) for i in range(n)
    )
    d = exact_det(shifted)
    if d == 0:
        adj_cols = _kernel_columns(shifted)
        attract = adj_cols[0]
        repel = _kernel_columns(tuple(zip(*shifted)))[0]
    else:
        inv = exact_inverse(shifted)
        adj = tuple(tuple(d * inv[i][j] for j in range(n)) for i in range(n))
        attract = max(
            (tuple(adj[i][j] for i in range(n)) for j in range(n)),
            key=lambda col: _sup_val(col, p),
        )
        repel = max(
            (adj[i] for i in range(n)), key=lambda row: _sup_val(row, p)
        )
    gap = float(Fraction(p) ** (vmin - vals[1]))
    return ProximalData(
        eigenvalue=lam,
        attracting=ProjPoint(attract, field),
        repelling=ProjHyperplane(repel, field),
        gap_ratio=gap,
        eigenvalue_exact=exact,
        precision=None if exact else precision,
    )


def _poly_eval_exact(coeffs, x):
    acc = Fraction(0)
    for c in reversed(coeffs):
        acc = acc * x + c
    return acc


def _sup_val(vec, p):
    vals = [rational_valuation(x, p) for x in vec if x != 0]
    return -min(vals) if vals else -INF


def _kernel_columns(M):
    from .exact import nullspace

    basis = nullspace(M)
    if not basis:
        raise NumericalError("expected a nontrivial kernel")
    return basis


# ---------------------------------------------------------------------------
# epsilon-proximality and the product sandwich


@dataclass
class EpsProximalVerdict:
    ok: bool
    certified: bool
    reason: str = ""
    samples_checked: int = 0


def _sample_projpoints(dim, field, count, seed):
    rng = np.random.default_rng(seed)
    points = []
    if field.kind == "padic":
        p = field.p
        depth = 3
        for _ in range(count):
            digits = rng.integers(0, p, size=(dim, depth))
            vec = [
                Fraction(int(sum(int(digits[i, k]) * p**k for k in range(depth))))
                for i in range(dim)
            ]
            if all(x % p == 0 for x in vec):
                vec[int(rng.integers(0, dim))] += 1
            if all(x == 0 for x in vec):
                vec[0] = Fraction(1)
            points.append(ProjPoint(vec, field))
        return points
    for _ in range(count):
        v = rng.standard_normal(dim)
        if field.kind == "complex":
            v = v + 1j * rng.standard_normal(dim)
        points.append(ProjPoint(v, field))
    return points


def _apply_to_point(matrix, x: ProjPoint) -> ProjPoint:
    if x.field.kind == "padic":
        M = mat_from_rows(matrix)
        vec = tuple(
            sum(M[i][j] * x.vec[j] for j in range(len(x.vec)))
            for i in range(len(M))
        )
        return ProjPoint(vec, x.field)
    a = to_float_array(matrix)
    return ProjPoint(a @ np.asarray(x.vec), x.field)


def sup_operator_norm(matrix, field: FieldDesc):
    """Operator norm for the coordinate sup-norm.

    Real/complex: max absolute row sum.  Padic: max entry absolute
    value (ultrametric), returned as an exact Fraction.
    """
    if field.kind == "padic":
        p = field.p
        best = Fraction(0)
        for row in matrix:
            for x in row:
                a = _padic_abs(Fraction(x), p)
                if a > best:
                    best = a
        return best
    a = to_float_array(matrix)
    return float(np.abs(a).sum(axis=1).max())


def _is_isometry(matrix, field: FieldDesc) -> bool:
    if field.kind == "padic":
        M = mat_from_rows(matrix)
        p = field.p
        if any(
            x != 0 and rational_valuation(x, p) < 0 for row in M for x in row
        ):
            return False
        return rational_valuation(exact_det(M), p) == 0
    a = to_float_array(matrix)
    n = a.shape[0]
    # sup-norm isometries are signed (real) / phased (complex) permutations
    mags = np.abs(a)
    for axis in (0, 1):
        if not np.allclose(mags.sum(axis=axis), np.ones(n), atol=1e-9):
            return False
    big = mags > 1e-9
    return bool((big.sum(axis=0) == 1).all() and (big.sum(axis=1) == 1).all())


def _coordinate_split(x0: ProjPoint, X0: ProjHyperplane):
    """Axis index when (x0, X0) are coordinate-aligned and transverse."""
    j = x0.aligned_axis()
    if j is None or X0.aligned_axis() != j:
        return None
    return j


@dataclass
class REpsEstimate:
    """The homothety-coefficient log-range sup of the contraction lemma.

    value = 2 * sup |log |t_v|| over unit v with d([v], X0) >= eps,
    where v = t_v v0 + (hyperplane part).  Closed form (exact=True) when
    the pair is coordinate-aligned; otherwise a sampled estimate, which
    can only under-estimate the true sup.  ``padic_k`` stores the exact
    exponent for non-Archimedean closed forms.
    """

    value: float
    exact: bool
    method: str
    samples_used: int = 0
    aligned_lower: float | None = None
    padic_k: int | None = None
    padic_p: int | None = None

    def contraction_factor(self, n: int):
        """exp(-(n-1) * value); exact Fraction for padic closed forms."""
        if self.padic_k is not None:
            return Fraction(self.padic_p) ** (-2 * self.padic_k * (n - 1))
        return math.exp(-(n - 1) * self.value)


def _padic_eps_exponent(eps, p) -> int:
    """Largest k >= 0 with p**-k >= eps (exact integer arithmetic)."""
    if eps > 1:
        raise PreconditionError("eps must be <= 1")
    k = 0
    bound = Fraction(eps) if isinstance(eps, (int, Fraction)) else Fraction(
        *float(eps).as_integer_ratio()
    )
    while Fraction(1, p ** (k + 1)) >= bound:
        k += 1
    return k


def r_eps(
    x0_plus: ProjPoint,
    X0_minus: ProjHyperplane,
    eps: float,
    samples: int = 4096,
    seed: int = 0,
) -> REpsEstimate:
    """Log-range of homothety coefficients over the eps-far set.

    Requires d(x0+, X0-) >= 2*eps.  Coordinate-aligned pairs use the
    closed form (|t| in [eps, 1] over R; powers of p in [eps, 1] over
    Q_p); generic pairs are sampled on a deterministic seeded grid and
    reported with the sample count and the aligned lower bound.
    """
    dd = point_hyperplane_distance(x0_plus, X0_minus)
    if dd.lower < 2 * eps:
        raise PreconditionError(
            f"d(x0+, X0-) = {dd.lower} < 2 eps = {2 * eps}"
        )
    field = x0_plus.field
    axis = _coordinate_split(x0_plus, X0_minus)
    if axis is not None:
        if field.kind == "padic":
            k = _padic_eps_exponent(eps, field.p)
            return REpsEstimate(
                value=2 * k * math.log(field.p),
                exact=True,
                method="closed-form",
                padic_k=k,
                padic_p=field.p,
            )
        return REpsEstimate(
            value=-2.0 * math.log(eps), exact=True, method="closed-form"
        )
    aligned_lower = -2.0 * math.log(eps)
    best = 0.0
    used = 0
    for x in _sample_projpoints(x0_plus.dim, field, samples, seed):
        if point_hyperplane_distance(x, X0_minus).lower < eps:
            continue
        used += 1
        t = _homothety_coefficient(x, x0_plus, X0_minus)
        if t == 0:
            continue
        mag = abs(t) if field.kind != "padic" else float(_padic_abs(t, field.p))
        best = max(best, abs(math.log(mag)))
    return REpsEstimate(
        value=2 * best,
        exact=False,
        method="sampled",
        samples_used=used,
        aligned_lower=aligned_lower,
    )


def _homothety_coefficient(x: ProjPoint, x0: ProjPoint, X0: ProjHyperplane):
    """t with v = t*v0 + w, w in the hyperplane, for the unit rep of x."""
    num = X0.pair(x)
    den = X0.pair(x0)
    if x.field.kind == "padic":
        return num / den
    return num / den


def eps_proximal_check(
    g,
    eps: float,
    field: FieldDesc,
    pd: ProximalData | None = None,
    samples: int = 10_000,
    seed: int = 0,
    gap_tol: float = _GAP_TOL,
) -> EpsProximalVerdict:
    """Check the two epsilon-proximality conditions for g.

    (1) d(x+, X-) >= 2*eps; (2) every x with d(x, X-) >= eps satisfies
    d(g.x, x+) <= eps.  Condition (2) is certified analytically when the
    eigendata is coordinate-aligned (contraction factor times coordinate
    conditioning); otherwise it is checked on a deterministic sample
    grid and the verdict is flagged as sampled.
    """
    if pd is None:
        try:
            pd = proximal_analyze(g, field, gap_tol=gap_tol)
        except IndeterminateError:
            return EpsProximalVerdict(False, False, "indeterminate proximality")
    if pd is None:
        return EpsProximalVerdict(False, True, "not proximal")
    d1 = point_hyperplane_distance(pd.attracting, pd.repelling)
    if d1.lower < 2 * eps:
        reason = "condition (1) fails: attracting point too close to hyperplane"
        return EpsProximalVerdict(False, d1.exact, reason)
    axis = _coordinate_split(pd.attracting, pd.repelling)
    if axis is not None:
        ok, certified = _aligned_contraction(g, field, axis, eps)
        if certified:
            return EpsProximalVerdict(ok, True, "aligned analytic bound")
    checked = 0
    for x in _sample_projpoints(pd.attracting.dim, field, samples, seed):
        if point_hyperplane_distance(x, pd.repelling).lower < eps:
            continue
        checked += 1
        gx = _apply_to_point(g, x)
        d2 = proj_distance(gx, pd.attracting)
        if float(d2) > eps:
            return EpsProximalVerdict(
                False, False, "condition (2) fails on a sample", checked
            )
    return EpsProximalVerdict(True, False, "sampled", checked)


def _aligned_contraction(g, field, axis, eps):
    """(ok, certified) for condition (2) with coordinate-aligned data."""
    if field.kind == "padic":
        M = mat_from_rows(g)
        n = len(M)
        lam = M[axis][axis]
        off_row = any(M[axis][j] != 0 for j in range(n) if j != axis)
        off_col = any(M[i][axis] != 0 for i in range(n) if i != axis)
        if off_row or off_col or lam == 0:
            return False, False
        block = tuple(
            tuple(M[i][j] for j in range(n) if j != axis)
            for i in range(n)
            if i != axis
        )
        p = field.p
        eta = sup_operator_norm(block, field) / _padic_abs(lam, p)
        k = _padic_eps_exponent(eps, p)
        bound = eta * Fraction(p) ** k  # eta / c(eps)
        eps_frac = (
            Fraction(eps)
            if isinstance(eps, (int, Fraction))
            else Fraction(*float(eps).as_integer_ratio())
        )
        if bound <= eps_frac:
            return True, True
        return False, False  # sufficient bound failed; fall back to sampling
    a = to_float_array(g)
    n = a.shape[0]
    lam = a[axis, axis]
    mask = np.ones(n, dtype=bool)
    mask[axis] = False
    if np.abs(a[axis, mask]).max(initial=0) > _EQ_TOL or np.abs(
        a[mask, axis]
    ).max(initial=0) > _EQ_TOL or lam == 0:
        return False, False
    block = a[np.ix_(mask, mask)]
    eta = float(np.abs(block).sum(axis=1).max()) / (abs(lam) * eps)
    if eta < 1 and 2 * eta / (1 - eta) <= eps:
        return True, True
    return False, False  # not certified either way; fall back to sampling


@dataclass
class SandwichReport:
    lower: object
    value: object
    upper: object
    passed: bool
    r_eps: REpsEstimate
    analytic_pass: bool | None = None
    eps_verdicts: list = dc_field(default_factory=list)


def product_sandwich_check(
    zs,
    ks,
    eps: float,
    field: FieldDesc,
    attracting: ProjPoint | None = None,
    repelling: ProjHyperplane | None = None,
    samples: int = 2000,
    seed: int = 0,
    rel_tol: float = 1e-9,
) -> SandwichReport:
    """Verify the norm sandwich for z_1 k_2 z_2 ... k_n z_n.

    Hypotheses are verified, not assumed: each z_i must be eps-proximal
    with the common attracting line / repelling hyperplane and act on
    the line as a homothety of ratio equal to its operator norm; each
    k_i must be a sup-norm isometry whose image of the attracting point
    stays 2*eps away from the hyperplane.  Violations raise
    PreconditionError naming the offending index.

    The bounds are exp(-(n-1) r_eps) * prod ||z_i|| <= ||product|| <=
    prod ||z_i||, compared exactly over padic fields and with relative
    tolerance over R/C.
    """
    n = len(zs)
    if n == 0:
        raise PreconditionError("need at least one contracting factor")
    if len(ks) != n - 1:
        raise PreconditionError(
            f"need exactly {n - 1} isometries for {n} factors, got {len(ks)}"
        )
    if attracting is None or repelling is None:
        pd0 = proximal_analyze(zs[0], field)
        if pd0 is None:
            raise PreconditionError("z_1 is not proximal", index=0)
        attracting = attracting or pd0.attracting
        repelling = repelling or pd0.repelling

    est = r_eps(attracting, repelling, eps, samples=samples, seed=seed)

    verdicts = []
    for i, z in enumerate(zs):
        zi_x0 = _apply_to_point(z, attracting)
        if zi_x0 != attracting:
            raise PreconditionError(
                f"z_{i + 1} does not fix the attracting line", index=i
            )
        if not _preserves_hyperplane(z, repelling, field):
            raise PreconditionError(
                f"z_{i + 1} does not preserve the repelling hyperplane", index=i
            )
        ratio = _line_ratio(z, attracting, field)
        norm = sup_operator_norm(z, field)
        if field.kind == "padic":
            if _padic_abs(ratio, field.p) != norm:
                raise PreconditionError(
                    f"z_{i + 1} homothety ratio differs from its norm", index=i
                )
        else:
            if abs(abs(ratio) - norm) > rel_tol * norm:
                raise PreconditionError(
                    f"z_{i + 1} homothety ratio differs from its norm", index=i
                )
        verdict = eps_proximal_check(
            z, eps, field,
            pd=ProximalData(ratio, attracting, repelling, 0.0),
            samples=samples, seed=seed,
        )
        if not verdict.ok:
            raise PreconditionError(
                f"z_{i + 1} is not eps-proximal: {verdict.reason}", index=i
            )
        verdicts.append(verdict)
    for i, k in enumerate(ks):
        if not _is_isometry(k, field):
            raise PreconditionError(f"k_{i + 2} is not a sup-norm isometry", index=i)
        kx = _apply_to_point(k, attracting)
        dk = point_hyperplane_distance(kx, repelling)
        if dk.lower < 2 * eps:
            raise PreconditionError(
                f"k_{i + 2} moves the attracting point too close to the "
                f"hyperplane (d = {float(dk.lower)})",
                index=i,
            )

    if field.kind == "padic":
        prod = mat_from_rows(zs[0])
        for k, z in zip(ks, zs[1:]):
            prod = mat_mul(mat_mul(prod, mat_from_rows(k)), mat_from_rows(z))
        value = sup_operator_norm(prod, field)
        upper = Fraction(1)
        for z in zs:
            upper *= sup_operator_norm(z, field)
        lower = est.contraction_factor(n) * upper
        passed = lower <= value <= upper
    else:
        prod = to_float_array(zs[0])
        for k, z in zip(ks, zs[1:]):
            prod = prod @ to_float_array(k) @ to_float_array(z)
        value = sup_operator_norm(prod, field)
        upper = 1.0
        for z in zs:
            upper *= sup_operator_norm(z, field)
        lower = est.contraction_factor(n) * upper
        passed = value <= upper * (1 + rel_tol) and value >= lower * (1 - rel_tol)
    return SandwichReport(lower, value, upper, bool(passed), est, eps_verdicts=verdicts)


def _preserves_hyperplane(z, H: ProjHyperplane, field) -> bool:
    """Whether z maps the hyperplane into itself (functional covariance)."""
    if field.kind == "padic":
        M = mat_from_rows(z)
        f = H.functional
        n = len(f)
        pulled = tuple(
            sum(f[i] * M[i][j] for i in range(n)) for j in range(n)
        )
        return all(
            pulled[i] * f[j] == pulled[j] * f[i]
            for i in range(n)
            for j in range(i + 1, n)
        )
    a = to_float_array(z)
    f = np.asarray(H.functional)
    pulled = f @ a
    cross = np.outer(pulled, f) - np.outer(f, pulled)
    scale = max(np.abs(pulled).max(), 1e-300)
    return bool(np.abs(cross).max() < 1e-9 * scale)


def _line_ratio(z, x0: ProjPoint, field):
    if field.kind == "padic":
        M = mat_from_rows(z)
        v = x0.vec
        w = tuple(sum(M[i][j] * v[j] for j in range(len(v))) for i in range(len(M)))
        j = next(i for i, x in enumerate(v) if x != 0)
        return w[j] / v[j]
    a = to_float_array(z)
    v = np.asarray(x0.vec)
    w = a @ v
    j = int(np.abs(v).argmax())
    return complex(w[j] / v[j]) if np.iscomplexobj(w) else float(w[j] / v[j])


# ---------------------------------------------------------------------------
# weight-pairing defect of products


def chi_mu_gap(gs, i0: int):
    """|<chi_i0, mu(prod) - sum mu(g_i)>| for SL_n elements.

    Always >= 0, and equal to the log-norm defect of the wedge-power
    product by the norm identities; submultiplicativity makes the sum
    side the larger one.
    """
    if not gs:
        raise PreconditionError("empty element list")
    prod = gs[0]
    for g in gs[1:]:
        prod = prod @ g
    total = sum(weight_pairing(i0, cartan(g)) for g in gs)
    return abs(weight_pairing(i0, cartan(prod)) - total)
