"""Quadratic-form Lie algebras, centralizers, and bending deformations.

Everything here is exact linear algebra over Q or Q(sqrt(r)) except the
matrix exponential.  For a diagonal form J the algebra so(J) is
{X : X^T J + J X = 0}, with the explicit basis c_j E_ij - c_i E_ji
(i < j); subalgebras so(m,1) inside so(m,2) are the elements supported
away from one distinguished coordinate.

Bending deforms an amalgam by conjugating one side by exp(t*Y), or an
HNN extension by right-multiplying the stable letter by exp(t*Y), where
Y spans a centralizer direction of the edge subgroup that leaves the
fixed rank-one subalgebra.  The Zariski-density witness is the
linear-algebra certificate that the fixed subalgebra together with its
Ad(exp(t*Y)) image bracket-generates the ambient algebra; it certifies
density for any group containing the subgroup's identity component and
its conjugate, and the shipped Schottky surrogates import that
subgroup-level density as a stated input assumption.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np
from scipy.linalg import expm as _scipy_expm

from .cartan import GroupDesc, GroupElement, to_float_array
from .errors import PreconditionError
from .exact import (
    in_span,
    mat_from_rows,
    mat_mul,
    mat_sub,
    nullspace,
    rank,
    solve,
    transpose,
)
from .fields import QuadElement, as_exact, is_exact_scalar
from .wordgroups import (
    AmalgamStructure,
    HnnStructure,
    Homomorphism,
    Presentation,
    check_relators,
    evaluate,
)


@dataclass(frozen=True)
class QuadFormSpace:
    """A diagonal quadratic form with its real-embedding signature."""

    coeffs: tuple

    def __post_init__(self):
        coeffs = tuple(as_exact(c) if is_exact_scalar(c) else c for c in self.coeffs)
        if any(_sign(c) == 0 for c in coeffs):
            raise PreconditionError("form coefficients must be nonzero")
        object.__setattr__(self, "coeffs", coeffs)

    @property
    def dim(self) -> int:
        return len(self.coeffs)

    @property
    def signature(self) -> tuple:
        pos = sum(1 for c in self.coeffs if _sign(c) > 0)
        return pos, self.dim - pos

    def form_matrix(self):
        zero = Fraction(0)
        return tuple(
            tuple(self.coeffs[i] if i == j else zero for j in range(self.dim))
            for i in range(self.dim)
        )


def _sign(c) -> int:
    if isinstance(c, QuadElement):
        return c.sign()
    return (c > 0) - (c < 0)


def standard_so_form(p: int, q: int) -> QuadFormSpace:
    return QuadFormSpace(tuple([Fraction(1)] * p + [Fraction(-1)] * q))


def frobenius(A, B):
    return sum(a * b for ra, rb in zip(A, B) for a, b in zip(ra, rb))


def bracket(A, B):
    return mat_sub(mat_mul(A, B), mat_mul(B, A))


def _flatten(M):
    return tuple(x for row in M for x in row)


class LieBasis:
    """A list of matrices spanning a Lie subalgebra of so(J).

    Construction verifies, exactly: the defining equation X^T J + J X = 0
    for every element, linear independence, and closure of brackets
    within the span.
    """

    def __init__(self, matrices, space: QuadFormSpace, check: bool = True):
        self.space = space
        self.matrices = tuple(mat_from_rows(m) for m in matrices)
        if check:
            self._validate()

    def _validate(self):
        J = self.space.form_matrix()
        zero = Fraction(0)
        for k, X in enumerate(self.matrices):
            resid = [
                [a + b for a, b in zip(ra, rb)]
                for ra, rb in zip(mat_mul(transpose(X), J), mat_mul(J, X))
            ]
            if any(x != zero for row in resid for x in row):
                raise PreconditionError(
                    f"basis element {k} violates the form equation"
                )
        flat = [_flatten(X) for X in self.matrices]
        if flat and rank(tuple(flat)) != len(flat):
            raise PreconditionError("basis matrices are linearly dependent")
        for i, A in enumerate(self.matrices):
            for B in self.matrices[i + 1:]:
                if not in_span(flat, _flatten(bracket(A, B))):
                    raise PreconditionError("span is not closed under brackets")

    def __len__(self):
        return len(self.matrices)

    def __iter__(self):
        return iter(self.matrices)

    def flat_vectors(self):
        return [_flatten(X) for X in self.matrices]

    def contains(self, X) -> bool:
        return in_span(self.flat_vectors(), _flatten(mat_from_rows(X)))


def so_form_algebra(space: QuadFormSpace) -> LieBasis:
    """Basis of so(J) for the diagonal form: c_j E_ij - c_i E_ji, i < j."""
    d = space.dim
    zero = Fraction(0)
    mats = []
    for i in range(d):
        for j in range(i + 1, d):
            X = [[zero] * d for _ in range(d)]
            X[i][j] = space.coeffs[j] + zero
            X[j][i] = -(space.coeffs[i] + zero)
            mats.append(tuple(tuple(row) for row in X))
    return LieBasis(mats, space, check=True)


def so_subalgebra_basis(space: QuadFormSpace, fixed_coordinate: int) -> LieBasis:
    """so of the form restricted away from one coordinate, inside so(J)."""
    d = space.dim
    if not 0 <= fixed_coordinate < d:
        raise PreconditionError("fixed coordinate out of range")
    zero = Fraction(0)
    mats = []
    for i in range(d):
        for j in range(i + 1, d):
            if fixed_coordinate in (i, j):
                continue
            X = [[zero] * d for _ in range(d)]
            X[i][j] = space.coeffs[j] + zero
            X[j][i] = -(space.coeffs[i] + zero)
            mats.append(tuple(tuple(row) for row in X))
    return LieBasis(mats, space, check=True)


def centralizer_in_algebra(elements, ambient: LieBasis) -> LieBasis:
    """Basis of {X in span(ambient) : s X s^-1 = X for all s}, exact."""
    basis = ambient.matrices
    if not basis:
        return LieBasis([], ambient.space, check=False)
    d = ambient.space.dim
    rows = []
    for s in elements:
        mat = s.matrix if isinstance(s, GroupElement) else mat_from_rows(s)
        for B in basis:
            comm = mat_sub(mat_mul(mat, B), mat_mul(B, mat))
            rows.append(_flatten(comm))
    if not rows:
        return ambient
    # unknowns: coefficients x_k with sum x_k * (s B_k - B_k s) = 0 per s
    ncols = len(basis)
    system = []
    per_element = len(basis)
    for eq_block in range(len(rows) // per_element):
        block = rows[eq_block * per_element:(eq_block + 1) * per_element]
        for entry in range(d * d):
            system.append(tuple(block[k][entry] for k in range(ncols)))
    kernel = nullspace(tuple(system))
    mats = []
    zero = Fraction(0)
    for coeffs in kernel:
        acc = [[zero] * d for _ in range(d)]
        for c, B in zip(coeffs, basis):
            if c != zero:
                for i in range(d):
                    for j in range(d):
                        acc[i][j] += c * B[i][j]
        mats.append(tuple(tuple(row) for row in acc))
    return LieBasis(mats, ambient.space, check=True)


def pick_Y(centralizer: LieBasis, subalgebra: LieBasis):
    """Centralizer basis vector farthest from the subalgebra span.

    Distance is Frobenius-orthogonal, computed exactly via the normal
    equations; comparisons use the real embedding; ties break by basis
    index.  No direction outside the subalgebra is an error (the
    bending hypothesis fails for this edge subgroup).
    """
    if len(centralizer) == 0:
        raise PreconditionError("trivial centralizer: no bending direction")
    h_flat = subalgebra.flat_vectors()
    best = None
    best_val = 0.0
    for idx, Y in enumerate(centralizer.matrices):
        y = _flatten(Y)
        dist2 = _ortho_distance_sq(y, h_flat)
        val = float(dist2) if not isinstance(dist2, QuadElement) else float(dist2)
        if val > best_val + 0.0:
            best_val = val
            best = (idx, Y)
    if best is None or best_val <= 0.0:
        raise PreconditionError(
            "centralizer is contained in the fixed subalgebra: "
            "no bending direction exists for this edge subgroup"
        )
    return best[1]


def _ortho_distance_sq(y, basis_flat):
    yy = sum(a * a for a in y)
    if not basis_flat:
        return yy
    k = len(basis_flat)
    G = tuple(
        tuple(sum(a * b for a, b in zip(basis_flat[i], basis_flat[j])) for j in range(k))
        for i in range(k)
    )
    b = tuple(sum(a * c for a, c in zip(basis_flat[i], y)) for i in range(k))
    x = solve(G, b)
    if x is None:
        raise PreconditionError("degenerate Gram matrix in distance computation")
    return yy - sum(bi * xi for bi, xi in zip(b, x))


def matrix_exp(Y, t: float) -> np.ndarray:
    """exp(t*Y): closed cosh/sinh form when Y^3 = Y exactly, else
    scaling-and-squaring (scipy)."""
    if all(is_exact_scalar(x) for row in Y for x in row):
        Ym = mat_from_rows(Y)
        Y3 = mat_mul(mat_mul(Ym, Ym), Ym)
        if all(
            all(a == b for a, b in zip(ra, rb)) for ra, rb in zip(Y3, Ym)
        ):
            Yf = to_float_array(Ym)
            Y2 = Yf @ Yf
            n = Yf.shape[0]
            return np.eye(n) + math.sinh(t) * Yf + (math.cosh(t) - 1.0) * Y2
    Yf = to_float_array(Y)
    return _scipy_expm(t * Yf)


@dataclass
class BendingFamily:
    """An amalgam or HNN presentation with a bending direction.

    The presentation's structure decides the rule; Y must centralize the
    edge-subgroup images (checked at construction via the group-level
    identity s Y s^-1 = Y) and, when a fixed subalgebra is supplied, lie
    outside its span.
    """

    presentation: Presentation
    Y: object
    subalgebra: LieBasis | None = None

    def __post_init__(self):
        s = self.presentation.structure
        if isinstance(s, AmalgamStructure):
            self.rule = "amalgam"
            edge_words = [w for pair in s.gamma0_pairs for w in pair[:1]]
        elif isinstance(s, HnnStructure):
            self.rule = "hnn"
            edge_words = [w for w, _ in s.pairings]
        else:
            raise PreconditionError("bending needs an amalgam or HNN structure")
        phi = Homomorphism(self.presentation.generators, self.presentation.group)
        exact_y = all(is_exact_scalar(x) for row in self.Y for x in row)
        for w in edge_words:
            g = evaluate(w, phi)
            if exact_y and g.is_exact:
                lhs = mat_mul(g.matrix, mat_from_rows(self.Y))
                rhs = mat_mul(mat_from_rows(self.Y), g.matrix)
                if not all(
                    all(a == b for a, b in zip(ra, rb)) for ra, rb in zip(lhs, rhs)
                ):
                    raise PreconditionError(
                        "Y does not centralize the edge subgroup image of "
                        f"{w.format(self.presentation.symbols)}"
                    )
            else:
                gf = to_float_array(g.matrix)
                yf = to_float_array(self.Y)
                if np.abs(gf @ yf - yf @ gf).max() > 1e-9:
                    raise PreconditionError("Y does not centralize the edge subgroup")
        if self.subalgebra is not None and self.subalgebra.contains(self.Y):
            raise PreconditionError("Y lies in the fixed subalgebra; bending is trivial")


def bend(family: BendingFamily, t: float, relator_tol: float = 1e-10) -> Homomorphism:
    """The bent homomorphism at parameter t; relators are re-verified."""
    P = family.presentation
    group = P.group
    if t == 0:
        phi = Homomorphism(P.generators, group)
    else:
        C = matrix_exp(family.Y, t)
        Cinv = matrix_exp(family.Y, -t)
        images = []
        s = P.structure
        if family.rule == "amalgam":
            side2 = set(s.side2)
            for i, g in enumerate(P.generators):
                if i in side2:
                    images.append(
                        GroupElement(C @ to_float_array(g.matrix) @ Cinv, group,
                                     check=False)
                    )
                else:
                    images.append(g)
        else:
            for i, g in enumerate(P.generators):
                if i == s.stable:
                    images.append(
                        GroupElement(to_float_array(g.matrix) @ C, group, check=False)
                    )
                else:
                    images.append(g)
        phi = Homomorphism(images, group)
    report = check_relators(P, phi, tol=relator_tol)
    if not report.ok:
        raise PreconditionError(
            f"bent homomorphism violates relators at t={t}: {report.failures}"
        )
    return phi


# ---------------------------------------------------------------------------
# density witnesses


@dataclass
class ModuleDecompositionVerdict:
    dim_sub: int
    dim_complement: int
    dim_ambient: int
    module_ok: bool
    closures_ok: bool

    @property
    def ok(self) -> bool:
        return (
            self.dim_sub + self.dim_complement == self.dim_ambient
            and self.module_ok
            and self.closures_ok
        )


def bracket_closure_exact(vectors, dim):
    """Span basis of the bracket closure of exact d x d matrices."""
    mats = [mat_from_rows(m) for m in vectors]
    flats = []
    basis = []
    for m in mats:
        f = _flatten(m)
        if not in_span(flats, f):
            flats.append(f)
            basis.append(m)
    changed = True
    while changed:
        changed = False
        for i in range(len(basis)):
            for j in range(i + 1, len(basis)):
                br = bracket(basis[i], basis[j])
                f = _flatten(br)
                if not in_span(flats, f):
                    flats.append(f)
                    basis.append(br)
                    changed = True
    return basis


def module_decomposition_check(m: int) -> ModuleDecompositionVerdict:
    """Checks on the complement of so(m,1) inside so(m,2).

    Exact arithmetic over Q with the standard split form: the
    Frobenius-orthogonal complement has dimension m+1, is invariant
    under brackets with the subalgebra, and adjoining any one of its
    basis vectors to so(m,1) bracket-generates all of so(m,2).
    """
    if m < 2:
        raise PreconditionError("m must be >= 2")
    space = standard_so_form(m, 2)
    ambient = so_form_algebra(space)
    sub = so_subalgebra_basis(space, space.dim - 1)
    sub_flat = sub.flat_vectors()
    complement = []
    for X in ambient.matrices:
        f = _flatten(X)
        # ambient basis splits cleanly: keep the vectors orthogonal to the sub
        if all(frobenius(X, H) == 0 for H in sub.matrices):
            complement.append(X)
    module_ok = True
    for H in sub.matrices:
        for W in complement:
            br = bracket(H, W)
            if any(frobenius(br, H2) != 0 for H2 in sub.matrices):
                module_ok = False
    closures_ok = True
    dim_ambient = len(ambient)
    for W in complement:
        closure = bracket_closure_exact(list(sub.matrices) + [W], space.dim)
        if len(closure) != dim_ambient:
            closures_ok = False
    return ModuleDecompositionVerdict(
        len(sub), len(complement), dim_ambient, module_ok, closures_ok
    )


def _float_rank(vectors, tol=1e-9):
    A = np.array([np.asarray(v, dtype=float).reshape(-1) for v in vectors])
    if A.size == 0:
        return 0
    sv = np.linalg.svd(A, compute_uv=False)
    return int((sv > tol * sv[0]).sum()) if sv[0] > 0 else 0


def zariski_density_witness(Y, t: float, m: int, tol: float = 1e-9) -> bool:
    """Density certificate for the group generated by SO(m,1)-degree
    subgroups and the conjugate by exp(t*Y).

    True iff (a) Ad(exp(t*Y)) moves the fixed subalgebra off itself and
    (b) the union of the subalgebra and its image bracket-generates
    so(m,2).  False at t = 0 and for Y inside the subalgebra (Ad then
    normalizes it).
    """
    space = standard_so_form(m, 2)
    sub = so_subalgebra_basis(space, space.dim - 1)
    C = matrix_exp(Y, t)
    Cinv = matrix_exp(Y, -t)
    h_float = [to_float_array(H) for H in sub.matrices]
    moved = [C @ H @ Cinv for H in h_float]
    base_rank = _float_rank(h_float, tol)
    if _float_rank(h_float + moved, tol) <= base_rank:
        return False
    target = (m + 2) * (m + 1) // 2
    basis = list(h_float) + moved
    flats = [b.reshape(-1) for b in basis]
    current = _float_rank(flats, tol)
    changed = True
    while changed and current < target:
        changed = False
        new = []
        for i in range(len(basis)):
            for j in range(i + 1, len(basis)):
                br = basis[i] @ basis[j] - basis[j] @ basis[i]
                r2 = _float_rank(flats + [br.reshape(-1)], tol)
                if r2 > current:
                    flats.append(br.reshape(-1))
                    new.append(br)
                    current = r2
                    changed = True
        basis.extend(new)
    return current >= target


# ---------------------------------------------------------------------------
# the unitary embedding


@dataclass
class UnitaryEmbedding:
    """Realification of U(n,1) into SO(2n,2).

    Complex entries a + b*i become 2x2 blocks [[a, -b], [b, a]]; the
    Hermitian form |z_1|^2 + ... + |z_n|^2 - |z_{n+1}|^2 turns into the
    split quadratic form with the two negative coordinates last.
    """

    n: int

    @property
    def source_size(self) -> int:
        return self.n + 1

    @property
    def target_space(self) -> QuadFormSpace:
        return standard_so_form(2 * self.n, 2)

    def realify(self, matrix):
        size = self.source_size
        rows = list(matrix)
        if len(rows) != size or any(len(r) != size for r in rows):
            raise PreconditionError(f"matrix is not {size}x{size}")
        exact = all(
            isinstance(x, tuple) or is_exact_scalar(x) for r in rows for x in r
        )
        d = 2 * size
        if exact:
            out = [[Fraction(0)] * d for _ in range(d)]
        else:
            out = np.zeros((d, d))
        for i in range(size):
            for j in range(size):
                x = rows[i][j]
                if isinstance(x, tuple):
                    a, b = Fraction(x[0]), Fraction(x[1])
                elif is_exact_scalar(x):
                    a, b = Fraction(x), Fraction(0)
                else:
                    z = complex(x)
                    a, b = z.real, z.imag
                # interleave: complex coordinate k -> real coords (2k, 2k+1)
                out[2 * i][2 * j] = a
                out[2 * i][2 * j + 1] = -b
                out[2 * i + 1][2 * j] = b
                out[2 * i + 1][2 * j + 1] = a
        if exact:
            return tuple(tuple(r) for r in out)
        return out

    def as_group_element(self, matrix, group: GroupDesc) -> GroupElement:
        return GroupElement(self.realify(matrix), group)

    def base_point_fixed(self, matrix, tol=1e-9) -> bool:
        """Whether the realified matrix fixes the split-space vector
        with 1 in the first negative coordinate (the symmetric-space
        base point of the embedding)."""
        R = to_float_array(self.realify(matrix))
        v = np.zeros(R.shape[0])
        v[2 * self.n] = 1.0
        return bool(np.abs(R @ v - v).max() <= tol)


def u_embed(n: int) -> UnitaryEmbedding:
    if n < 1:
        raise PreconditionError("n must be >= 1")
    return UnitaryEmbedding(n)
