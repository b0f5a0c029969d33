import math
from fractions import Fraction as F

import numpy as np
import pytest

from cartanlab import (
    COMPLEX,
    REAL,
    GroupElement,
    IndeterminateError,
    PreconditionError,
    ProjHyperplane,
    ProjPoint,
    chi_mu_gap,
    newton_polygon,
    padic,
    product_sandwich_check,
    proj_distance,
    proximal_analyze,
    r_eps,
    special_linear,
)
from cartanlab.projective import (
    eps_proximal_check,
    point_hyperplane_distance,
    root_valuations,
    sup_operator_norm,
)

Q3 = padic(3)


# -- distance ---------------------------------------------------------------


def test_distance_trivial_and_axes():
    x = ProjPoint([1.0, 0.3], REAL)
    assert proj_distance(x, x) == 0
    e1 = ProjPoint([1.0, 0.0], REAL)
    e2 = ProjPoint([0.0, 1.0], REAL)
    assert proj_distance(e1, e2) == 1.0
    p1 = ProjPoint([F(1), F(0)], Q3)
    p2 = ProjPoint([F(0), F(1)], Q3)
    assert proj_distance(p1, p2) == 1


def test_distance_small_parameter_monotone():
    e1 = ProjPoint([1.0, 0.0], REAL)
    last = 0.0
    for t in (0.01, 0.05, 0.2, 0.8):
        d = proj_distance(e1, ProjPoint([1.0, t], REAL))
        # oracle: brute 1-parameter minimization over the sign choice
        vals = []
        for s in (1.0, -1.0):
            w = np.array([1.0, t]) / max(1.0, abs(t))
            vals.append(np.abs(np.array([1.0, 0.0]) - s * w).max())
        assert d == pytest.approx(min(vals), abs=1e-12)
        assert d > last
        last = d


def test_padic_distance_beats_residue_enumeration():
    # v = (1+p, p^3), w = (1, 0): true infimum 1/27 at the unit 1+p,
    # while lifts of residues mod p would give only 1/3
    v = ProjPoint([F(4), F(27)], Q3)
    w = ProjPoint([F(1), F(0)], Q3)
    assert proj_distance(v, w) == F(1, 27)


def test_padic_distance_is_exact_infimum_on_candidates():
    # oracle: evaluate the defining infimum on a candidate set of units
    rng = np.random.default_rng(3)
    for _ in range(25):
        v = [F(int(rng.integers(-20, 21))), F(int(rng.integers(-20, 21)))]
        w = [F(int(rng.integers(-20, 21))), F(int(rng.integers(-20, 21)))]
        if all(x == 0 for x in v) or all(x == 0 for x in w):
            continue
        x, y = ProjPoint(v, Q3), ProjPoint(w, Q3)
        d = proj_distance(x, y)
        cands = [F(a) for a in range(1, 30) if a % 3 != 0]
        cands += [F(a, b) for a in range(1, 10) for b in range(1, 10)
                  if a % 3 and b % 3]
        best = min(
            _padic_sup([a - u * b for a, b in zip(x.vec, y.vec)])
            for u in cands
        )
        assert d <= best  # formula is a lower bound for every candidate
        # and it is attained at u = v_j / w_j for a unit coordinate j
        j = next(i for i, c in enumerate(y.vec) if _val3(c) == 0)
        if _val3(x.vec[j]) == 0:
            u = x.vec[j] / y.vec[j]
            attained = _padic_sup([a - u * b for a, b in zip(x.vec, y.vec)])
            assert d == attained


def _val3(x):
    from cartanlab.fields import rational_valuation

    return rational_valuation(x, 3)


def _padic_sup(vec):
    from cartanlab.fields import rational_valuation

    vals = [rational_valuation(x, 3) for x in vec if x != 0]
    if not vals:
        return F(0)
    return F(3) ** (-min(vals))


def test_metric_properties_real():
    rng = np.random.default_rng(11)
    pts = [ProjPoint(rng.standard_normal(4), REAL) for _ in range(12)]
    for i in range(len(pts)):
        for j in range(len(pts)):
            dij = proj_distance(pts[i], pts[j])
            assert dij == pytest.approx(proj_distance(pts[j], pts[i]), abs=1e-12)
            # over R the sharp bound for unit sup-norm reps is 2
            # (attained, e.g., by the lines (1,-1) and (1,1))
            assert dij <= 2.0 + 1e-12
    for _ in range(100):
        a, b, c = (pts[k] for k in rng.integers(0, len(pts), 3))
        assert proj_distance(a, c) <= (
            proj_distance(a, b) + proj_distance(b, c) + 1e-9
        )
    far = proj_distance(ProjPoint([1.0, -1.0], REAL), ProjPoint([1.0, 1.0], REAL))
    assert far == pytest.approx(2.0)


def test_metric_properties_padic_bounded_by_one():
    rng = np.random.default_rng(29)
    pts = []
    for _ in range(10):
        v = [F(int(rng.integers(-20, 21))) for _ in range(3)]
        if any(x != 0 for x in v):
            pts.append(ProjPoint(v, Q3))
    for x in pts:
        for y in pts:
            d = proj_distance(x, y)
            assert d <= 1  # ultrametric: unit reps differ by at most a unit
            assert d == proj_distance(y, x)
    for _ in range(60):
        a, b, c = (pts[k] for k in rng.integers(0, len(pts), 3))
        assert proj_distance(a, c) <= max(
            proj_distance(a, b), proj_distance(b, c)
        )


def test_isometry_invariance():
    rng = np.random.default_rng(13)
    k = np.zeros((3, 3))
    k[0, 1], k[1, 0], k[2, 2] = 1.0, -1.0, 1.0  # signed permutation
    for _ in range(25):
        x = ProjPoint(rng.standard_normal(3), REAL)
        y = ProjPoint(rng.standard_normal(3), REAL)
        dx = proj_distance(x, y)
        dk = proj_distance(
            ProjPoint(k @ np.asarray(x.vec), REAL),
            ProjPoint(k @ np.asarray(y.vec), REAL),
        )
        assert dk == pytest.approx(dx, abs=1e-9)


def test_complex_phase_distance():
    e1 = ProjPoint([1.0 + 0j, 0.0], COMPLEX)
    rot = ProjPoint([1j, 0.0], COMPLEX)
    assert proj_distance(e1, rot) == pytest.approx(0.0, abs=1e-9)
    z = ProjPoint([1.0 + 0j, 0.5j], COMPLEX)
    d1 = proj_distance(e1, z)
    assert 0 < d1 <= 0.5 + 1e-9


# -- proximality ------------------------------------------------------------


def test_proximal_diagonal():
    pd = proximal_analyze(np.diag([4.0, 1.0, 1.0]), REAL)
    assert pd is not None
    assert pd.eigenvalue == pytest.approx(4.0)
    assert pd.attracting == ProjPoint([1.0, 0.0, 0.0], REAL)
    assert pd.repelling.contains(ProjPoint([0.0, 1.0, 0.0], REAL))
    assert pd.repelling.contains(ProjPoint([0.0, 0.0, 1.0], REAL))
    assert pd.gap_ratio == pytest.approx(0.25)


def test_rotation_not_proximal():
    rot = np.array([[0.0, -1.0], [1.0, 0.0]])
    assert proximal_analyze(rot, REAL) is None


def test_small_gap_indeterminate():
    with pytest.raises(IndeterminateError):
        proximal_analyze(np.diag([1.0 + 1e-9, 1.0]), REAL)
    # lowering the certification threshold resolves it
    pd = proximal_analyze(np.diag([1.0 + 1e-9, 1.0]), REAL, gap_tol=1e-12)
    assert pd is not None


def test_padic_proximal_companions():
    # X^2 - p^-1 X + 1: root valuations -1 and +1 (Newton polygon oracle)
    comp = [[F(0), F(-1)], [F(1), F(1, 3)]]
    assert root_valuations([F(1), F(-1, 3), F(1)], 3) == [-1, 1]
    pd = proximal_analyze(comp, Q3)
    assert pd is not None
    assert pd.gap_ratio == pytest.approx(1.0 / 9.0)
    # the lifted eigenvalue satisfies the polynomial to high p-adic order
    lam = pd.eigenvalue
    resid = F(1) - F(1, 3) * lam + lam * lam
    from cartanlab.fields import rational_valuation

    assert rational_valuation(resid, 3) >= 50
    # X^2 - pX - p: single segment of length 2, slope 1/2
    comp2 = [[F(0), F(3)], [F(1), F(3)]]
    assert root_valuations([F(-3), F(-3), F(1)], 3) == [F(1, 2), F(1, 2)]
    assert proximal_analyze(comp2, Q3) is None


def test_padic_proximal_exact_rational_root():
    # eigenvalues 9 and 1/9; the 3-adically dominant one is 1/9 (|1/9| = 9)
    g = [[F(9), F(1)], [F(0), F(1, 9)]]
    pd = proximal_analyze(g, Q3)
    assert pd is not None and pd.eigenvalue_exact
    assert pd.eigenvalue == F(1, 9)
    assert pd.gap_ratio == pytest.approx(1.0 / 81.0)


def test_newton_polygon_hull():
    hull = newton_polygon([(0, 0), (1, -1), (2, 0)])
    assert hull == [(0, 0), (1, -1), (2, 0)]
    hull = newton_polygon([(0, 1), (1, 5), (2, 0)])
    assert hull == [(0, 1), (2, 0)]


def test_archimedean_padic_classifier_agreement():
    # diagonally dominant integer examples classify identically
    mats = [
        [[F(9), F(0)], [F(0), F(1)]],
        [[F(1), F(0)], [F(0), F(1)]],
        [[F(2), F(1)], [F(0), F(2)]],  # repeated eigenvalue: not proximal
    ]
    for m in mats:
        arch = _arch_proximal(m)
        pad = proximal_analyze(m, Q3) is not None
        assert arch == pad


def _arch_proximal(m):
    a = np.array([[float(x) for x in row] for row in m])
    try:
        return proximal_analyze(a, REAL) is not None
    except IndeterminateError:
        return False


# -- epsilon-proximality and r_eps -------------------------------------------


def test_eps_proximal_strong_diagonal():
    g = np.diag([500.0, 1.0, 1.0])
    v = eps_proximal_check(g, 0.1, REAL, gap_tol=1e-12)
    assert v.ok and v.certified


def test_eps_proximal_identity_false():
    v = eps_proximal_check(np.eye(3), 0.1, REAL)
    assert not v.ok
    assert v.reason == "not proximal"


def test_eps_proximal_tiny_gap_false():
    g = np.diag([1.0 + 1e-9, 1.0])
    pd = proximal_analyze(g, REAL, gap_tol=1e-12)
    v = eps_proximal_check(g, 0.1, REAL, pd=pd, samples=500)
    assert not v.ok  # contraction far too weak


def test_r_eps_closed_forms():
    x0 = ProjPoint([1.0, 0.0, 0.0], REAL)
    X0 = ProjHyperplane([1.0, 0.0, 0.0], REAL)
    est = r_eps(x0, X0, 0.1)
    assert est.exact and est.value == pytest.approx(-2 * math.log(0.1))
    x0p = ProjPoint([F(1), F(0)], Q3)
    X0p = ProjHyperplane([F(1), F(0)], Q3)
    est = r_eps(x0p, X0p, 0.1)
    assert est.exact and est.padic_k == 2  # 1/9 >= 0.1 > 1/27
    assert est.value == pytest.approx(4 * math.log(3))
    assert est.contraction_factor(3) == F(1, 3 ** 8)


def test_r_eps_monotone_and_generic():
    x0 = ProjPoint([1.0, 0.0, 0.0], REAL)
    X0 = ProjHyperplane([1.0, 0.0, 0.0], REAL)
    vals = [r_eps(x0, X0, e).value for e in (0.05, 0.1, 0.2, 0.4)]
    assert all(a >= b for a, b in zip(vals, vals[1:]))
    # oblique attracting point over the coordinate hyperplane {x_1 = 0}:
    # t_v = v_1 exactly, so the true sup is the aligned closed form and the
    # sampled estimate must approach it from below
    x0g = ProjPoint([1.0, 0.3, 0.2], REAL)
    X0g = ProjHyperplane([1.0, 0.0, 0.0], REAL)
    eps = 0.25
    est = r_eps(x0g, X0g, eps, samples=4000, seed=1)
    assert not est.exact and est.method == "sampled"
    truth = -2 * math.log(eps)
    assert est.value <= truth + 1e-9
    assert est.value >= 0.5 * truth
    assert est.aligned_lower == pytest.approx(truth)


def test_precondition_r_eps():
    x0 = ProjPoint([1.0, 0.0], REAL)
    X0 = ProjHyperplane([1.0, 0.0], REAL)
    with pytest.raises(PreconditionError):
        r_eps(x0, X0, 0.6)  # 2*eps > 1 = d(x0+, X0-)


# -- the product sandwich -----------------------------------------------------


def _aligned_real_instance(dim, lam, eps, seed=0):
    rng = np.random.default_rng(seed)
    z = np.zeros((dim, dim))
    z[0, 0] = lam
    block = rng.standard_normal((dim - 1, dim - 1))
    block *= (lam * eps * eps * 0.2) / np.abs(block).sum(axis=1).max()
    z[1:, 1:] = block
    return z


def test_sandwich_single_factor():
    x0 = ProjPoint([1.0, 0.0, 0.0], REAL)
    X0 = ProjHyperplane([1.0, 0.0, 0.0], REAL)
    z = _aligned_real_instance(3, 100.0, 0.2)
    rep = product_sandwich_check([z], [], 0.2, REAL, attracting=x0, repelling=X0)
    assert rep.passed
    assert rep.lower <= rep.value <= rep.upper
    assert rep.value == pytest.approx(sup_operator_norm(z, REAL))


def test_sandwich_diag8_signed_permutations():
    x0 = ProjPoint([1.0, 0.0, 0.0], REAL)
    X0 = ProjHyperplane([1.0, 0.0, 0.0], REAL)
    eps = 0.33
    z = np.diag([8.0, 0.2, 0.2])
    k = np.array([[1.0, 0, 0], [0, 0, -1.0], [0, 1.0, 0]])
    rep = product_sandwich_check(
        [z] * 4, [k] * 3, eps, REAL, attracting=x0, repelling=X0, samples=400
    )
    assert rep.passed
    assert rep.value / rep.upper <= 1 + 1e-12
    assert rep.lower / rep.value <= 1 + 1e-12


def test_sandwich_padic_exact():
    x0 = ProjPoint([F(1), F(0), F(0)], Q3)
    X0 = ProjHyperplane([F(1), F(0), F(0)], Q3)
    lam = F(1, 3 ** 6)
    z = [[lam, 0, 0], [0, F(1), 0], [0, 0, F(3)]]
    k = [[F(1), 0, 0], [0, F(1), F(2)], [0, F(1), F(1)]]  # integral, det unit
    rep = product_sandwich_check(
        [z, z, z], [k, k], 0.1, Q3, attracting=x0, repelling=X0
    )
    assert rep.passed
    assert isinstance(rep.value, F)  # exact arithmetic end to end


def test_sandwich_guard_violation():
    x0 = ProjPoint([1.0, 0.0, 0.0], REAL)
    X0 = ProjHyperplane([1.0, 0.0, 0.0], REAL)
    z = _aligned_real_instance(3, 100.0, 0.2)
    kbad = np.zeros((3, 3))
    kbad[1, 0], kbad[0, 1], kbad[2, 2] = 1.0, 1.0, 1.0  # sends x0+ into X0-
    with pytest.raises(PreconditionError) as err:
        product_sandwich_check(
            [z, z], [kbad], 0.2, REAL, attracting=x0, repelling=X0, samples=100
        )
    assert err.value.index == 0


def test_sandwich_rejects_non_isometry():
    x0 = ProjPoint([1.0, 0.0, 0.0], REAL)
    X0 = ProjHyperplane([1.0, 0.0, 0.0], REAL)
    z = _aligned_real_instance(3, 100.0, 0.2)
    knot = np.diag([2.0, 0.5, 1.0])
    with pytest.raises(PreconditionError):
        product_sandwich_check(
            [z, z], [knot], 0.2, REAL, attracting=x0, repelling=X0, samples=100
        )


# -- weight-pairing defect ----------------------------------------------------


def test_chi_mu_gap_cases():
    sl2 = special_linear(2, REAL)
    g = GroupElement([[F(4), 0], [0, F(1, 4)]], sl2)
    assert chi_mu_gap([g], 1) == pytest.approx(0.0, abs=1e-12)
    sl3 = special_linear(3, REAL)
    d1 = GroupElement([[F(4), 0, 0], [0, F(1), 0], [0, 0, F(1, 4)]], sl3)
    d2 = GroupElement([[F(2), 0, 0], [0, F(2), 0], [0, 0, F(1, 4)]], sl3)
    for i0 in (1, 2):
        assert chi_mu_gap([d1, d2], i0) == pytest.approx(0.0, abs=1e-10)
    # g, g^-1: defect is 2 * weight_pairing for SL_2
    from cartanlab import cartan, weight_pairing

    gap = chi_mu_gap([g, g.inv()], 1)
    assert gap == pytest.approx(2 * weight_pairing(1, cartan(g)), abs=1e-10)


def test_chi_mu_gap_bounded_linearly_for_transverse_products():
    # the weight-pairing gap bound through the wedge representation: for
    # diagonal factors with a strong simple-root gap, interleaved with
    # compact permutations fixing the relevant wedge line, the defect is
    # at most n * r_eps (the contraction lemma applied to the compound
    # matrices, which are aligned eps-proximal by construction)
    rng = np.random.default_rng(31)
    sl3 = special_linear(3, REAL)
    eps = 0.45
    r_alpha = -2 * math.log(eps)
    # i0 = 1: permutations fixing e1; i0 = 2: fixing the e1^e2 line
    w1 = GroupElement([[F(1), 0, 0], [0, 0, F(-1)], [0, F(1), 0]], sl3)
    w2 = GroupElement([[F(0), F(-1), 0], [F(1), 0, 0], [0, 0, F(1)]], sl3)
    for i0, w in ((1, w1), (2, w2)):
        for n in (2, 4, 6, 8):
            gs = []
            for _ in range(n):
                # both simple-root gaps large, so the relevant compound
                # matrices contract strongly enough for eps = 0.45
                s = float(rng.uniform(2.0, 3.0))
                t = float(rng.uniform(2 * s + 1.5, 2 * s + 3.0))
                a = np.diag([math.exp(t), math.exp(s - t / 2),
                             math.exp(-s - t / 2)])
                a /= np.linalg.det(a) ** (1 / 3)
                gs.append(GroupElement(a, sl3, check=False) @ w)
            gap = chi_mu_gap(gs, i0)
            assert gap <= n * r_alpha + 1e-9


def test_chi_mu_gap_one_sided():
    # submultiplicativity: the product side never exceeds the sum side
    import numpy as np

    from cartanlab import cartan, weight_pairing
    from util import random_sl_element

    rng = np.random.default_rng(23)
    sl3 = special_linear(3, REAL)
    for _ in range(50):
        gs = [random_sl_element(rng, 3, sl3) for _ in range(3)]
        prod = gs[0] @ gs[1] @ gs[2]
        for i0 in (1, 2):
            total = sum(weight_pairing(i0, cartan(g)) for g in gs)
            assert weight_pairing(i0, cartan(prod)) <= total + 1e-9
