"""Poincare polynomials of the level sets and 2-plane families in ``C^4``.

Three independent routes give the Poincare polynomial of ``mu^{-1}(0)``:

* the closed form ``sum_{i <= (n-1)/2} (t^{4i} + t^{4n-3-4i})``;
* a Gysin computation over ``Gr_2(C^{n+1})`` (the level set is a circle
  bundle over it): ``b_{2k} = b_{2k}(Gr) - b_{2k-2}(Gr)`` up to the middle
  dimension, completed by Poincare duality in dimension ``4n - 3``;
* the same Gysin step fed with the factorized Grassmannian polynomial
  instead of the Gaussian binomial.

The second half classifies intersections of four families of 2-planes in
``C^4`` through their Pluecker images on the Klein quadric.
"""
from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations

import numpy as np

# ---------------------------------------------------------------------------
# integer polynomials


@dataclass(frozen=True)
class IntPolynomial:
    """Integer polynomial in ``t``; ``coeffs[d]`` is the coefficient of ``t^d``."""

    coeffs: tuple[int, ...] = ()

    def __post_init__(self):
        c = [int(x) for x in self.coeffs]
        while c and c[-1] == 0:
            c.pop()
        object.__setattr__(self, "coeffs", tuple(c))

    @classmethod
    def monomial(cls, d: int, c: int = 1) -> "IntPolynomial":
        return cls((0,) * d + (c,))

    @classmethod
    def geometric(cls, step: int, top: int) -> "IntPolynomial":
        """``1 + t^step + ... + t^top``."""
        c = [0] * (top + 1)
        for d in range(0, top + 1, step):
            c[d] = 1
        return cls(tuple(c))

    @classmethod
    def parse(cls, s: str) -> "IntPolynomial":
        """Parse strings like ``1+t^4+2t^5+t``."""
        c: dict[int, int] = {}
        for term in s.replace(" ", "").split("+"):
            if "t" not in term:
                coef, d = int(term), 0
            else:
                pre, _, post = term.partition("t")
                coef = int(pre) if pre else 1
                d = int(post[1:]) if post.startswith("^") else 1
            c[d] = c.get(d, 0) + coef
        top = max(c) if c else -1
        return cls(tuple(c.get(d, 0) for d in range(top + 1)))

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def __getitem__(self, d: int) -> int:
        return self.coeffs[d] if 0 <= d < len(self.coeffs) else 0

    def __add__(self, other: "IntPolynomial") -> "IntPolynomial":
        m = max(len(self.coeffs), len(other.coeffs))
        return IntPolynomial(tuple(self[d] + other[d] for d in range(m)))

    def __sub__(self, other: "IntPolynomial") -> "IntPolynomial":
        m = max(len(self.coeffs), len(other.coeffs))
        return IntPolynomial(tuple(self[d] - other[d] for d in range(m)))

    def __mul__(self, other: "IntPolynomial") -> "IntPolynomial":
        if not self.coeffs or not other.coeffs:
            return IntPolynomial()
        out = [0] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if a:
                for j, b in enumerate(other.coeffs):
                    out[i + j] += a * b
        return IntPolynomial(tuple(out))

    def __call__(self, t):
        return sum(c * t ** d for d, c in enumerate(self.coeffs))

    def substitute_power(self, k: int) -> "IntPolynomial":
        """``p(t^k)``."""
        out = [0] * (k * self.degree + 1) if self.coeffs else []
        for d, c in enumerate(self.coeffs):
            out[k * d] = c
        return IntPolynomial(tuple(out))

    def is_palindromic(self, dim: int | None = None) -> bool:
        dim = self.degree if dim is None else dim
        return all(self[d] == self[dim - d] for d in range(dim + 1))

    @property
    def nonnegative(self) -> bool:
        return all(c >= 0 for c in self.coeffs)

    def __str__(self) -> str:
        terms = []
        for d, c in enumerate(self.coeffs):
            if c == 0:
                continue
            mono = "" if d == 0 else ("t" if d == 1 else f"t^{d}")
            if d == 0:
                terms.append(str(c))
            else:
                terms.append(("" if c == 1 else str(c)) + mono)
        return "+".join(terms) if terms else "0"


ONE = IntPolynomial((1,))


def gaussian_binomial(m: int, k: int) -> IntPolynomial:
    """``[m choose k]_q`` by the q-Pascal recursion."""
    if k < 0 or k > m:
        return IntPolynomial()
    if k == 0 or k == m:
        return ONE
    # [m,k] = [m-1,k-1] + q^k [m-1,k]
    return gaussian_binomial(m - 1, k - 1) + IntPolynomial.monomial(k) * gaussian_binomial(m - 1, k)


def poincare_grassmannian(n: int) -> IntPolynomial:
    """``Gr_2(C^{n+1})`` as the Gaussian binomial ``[n+1, 2]`` in ``t^2``."""
    if n < 1:
        raise ValueError("n >= 1")
    return gaussian_binomial(n + 1, 2).substitute_power(2)


def poincare_grassmannian_factored(n: int) -> IntPolynomial:
    """Product formula, split by the parity of ``n + 1``.

    ``n+1 = 2m``: ``(1 + t^2 + ... + t^{2n-2}) (1 + t^4 + ... + t^{4m-4})``;
    ``n+1 = 2m+1``: ``(1 + t^4 + ... + t^{4m-4}) (1 + t^2 + ... + t^{2n})``.
    """
    if n < 1:
        raise ValueError("n >= 1")
    if (n + 1) % 2 == 0:
        m = (n + 1) // 2
        return IntPolynomial.geometric(2, 2 * n - 2) * IntPolynomial.geometric(4, 4 * m - 4)
    m = n // 2
    return IntPolynomial.geometric(4, 4 * m - 4) * IntPolynomial.geometric(2, 2 * n)


def poincare_mu0(n: int) -> IntPolynomial:
    """Closed form for ``mu^{-1}(0) in HP^n`` (dimension ``4n - 3``)."""
    if n < 2:
        raise ValueError("n >= 2")
    p = IntPolynomial()
    for i in range((n - 1) // 2 + 1):
        p = p + IntPolynomial.monomial(4 * i) + IntPolynomial.monomial(4 * n - 3 - 4 * i)
    return p


def poincare_mu0_gysin(n: int, base: IntPolynomial | None = None) -> IntPolynomial:
    """Gysin route from the Betti numbers of ``Gr_2(C^{n+1})``.

    Below the middle dimension ``2n - 2`` of the base, cup product with the
    Kaehler class is injective, so even Betti numbers of the circle bundle
    are consecutive differences and odd ones vanish.  Duality in dimension
    ``4n - 3`` fills in the rest.
    """
    if n < 2:
        raise ValueError("n >= 2")
    base = poincare_grassmannian(n) if base is None else base
    dim = 4 * n - 3
    c = [0] * (dim + 1)
    for k in range(n):
        c[2 * k] = base[2 * k] - (base[2 * k - 2] if k else 0)
    for d in range(2 * n - 1, dim + 1):
        c[d] = c[dim - d]
    return IntPolynomial(tuple(c))


def poincare_nu0(k: int) -> IntPolynomial:
    """``nu^{-1}(0) in HP^{2k+2}``: ``sum_{i<k} (t^{4i} + t^{8k-1-4i})``."""
    if k < 1:
        raise ValueError("k >= 1")
    p = IntPolynomial()
    for i in range(k):
        p = p + IntPolynomial.monomial(4 * i) + IntPolynomial.monomial(8 * k - 1 - 4 * i)
    return p


MU0_TABLE = {
    3: "1+t^4+t^5+t^9",
    4: "1+t^4+t^9+t^13",
    5: "1+t^4+t^8+t^9+t^13+t^17",
    6: "1+t^4+t^8+t^13+t^17+t^21",
    7: "1+t^4+t^8+t^12+t^13+t^17+t^21+t^25",
    8: "1+t^4+t^8+t^12+t^17+t^21+t^25+t^29",
}


def check_table() -> list[tuple[int, str, str]]:
    """Mismatches ``(n, expected, computed)`` against the reference table."""
    out = []
    for n, ref in MU0_TABLE.items():
        got = str(poincare_mu0(n))
        if got != ref:
            out.append((n, ref, got))
    return out


# ---------------------------------------------------------------------------
# 2-plane families in C^4

TOL = 1e-10

FAMILY_TAGS = ("F", "F'", "F''", "F'''")
# name of the base family and of its circle-bundle lift inside mu^{-1}(0) in HP^3
FAMILY_BASE = {"F": "CP2", "F'": "CP2'", "F''": "S4", "F'''": "CP1xCP1"}
FAMILY_LIFT = {"F": "S5", "F'": "S5'", "F''": "S4xS1", "F'''": "S3xS2"}


class NonGenericError(ValueError):
    pass


def _orth(A, tol=TOL) -> np.ndarray:
    """Orthonormal basis of the column span."""
    A = np.asarray(A, dtype=complex)
    if A.ndim == 1:
        A = A[:, None]
    u, s, _ = np.linalg.svd(A, full_matrices=False)
    return u[:, s > tol * max(1.0, s[0] if len(s) else 1.0)]


def _rank(A, tol=TOL) -> int:
    s = np.linalg.svd(np.asarray(A, dtype=complex), compute_uv=False)
    return int(np.sum(s > tol * max(1.0, s[0] if len(s) else 1.0)))


def _intersect(A, B, tol=TOL) -> np.ndarray:
    """Orthonormal basis of ``span(A) & span(B)``."""
    A, B = _orth(A, tol), _orth(B, tol)
    if A.shape[1] == 0 or B.shape[1] == 0:
        return np.zeros((A.shape[0], 0), dtype=complex)
    M = np.hstack([A, -B])
    _, s, vh = np.linalg.svd(M)
    null = vh[np.sum(s > tol):].conj().T
    return _orth(A @ null[: A.shape[1]], tol) if null.shape[1] else np.zeros((A.shape[0], 0), dtype=complex)


def quaternionic_structure(U=None) -> np.ndarray:
    """Matrix ``M`` of the antilinear map ``v -> M conj(v)`` with square ``-Id``."""
    M0 = np.zeros((4, 4), dtype=complex)
    M0[0, 1], M0[1, 0], M0[2, 3], M0[3, 2] = -1, 1, -1, 1
    if U is None:
        return M0
    U = np.asarray(U, dtype=complex)
    return U @ M0 @ U.T


def apply_structure(M, v) -> np.ndarray:
    return np.asarray(M) @ np.conj(v)


@dataclass
class FamilyMember:
    """One member: ``F`` (3-space ``W``), ``F'`` (line), ``F''`` (structure ``M``), ``F'''`` (plane pair)."""

    tag: str
    data: tuple

    @property
    def base(self) -> str:
        return FAMILY_BASE[self.tag]

    @property
    def lift(self) -> str:
        return FAMILY_LIFT[self.tag]


def family_member(tag: str, *data) -> FamilyMember:
    """Validate defining data and build a member."""
    if tag not in FAMILY_TAGS:
        raise ValueError(f"unknown family {tag!r}")
    if tag == "F":
        W = _orth(data[0])
        if W.shape[1] != 3:
            raise ValueError("F needs a 3-space")
        return FamilyMember(tag, (W,))
    if tag == "F'":
        ell = _orth(data[0])
        if ell.shape[1] != 1:
            raise ValueError("F' needs a line")
        return FamilyMember(tag, (ell,))
    if tag == "F''":
        M = np.asarray(data[0], dtype=complex)
        if M.shape != (4, 4) or np.max(np.abs(M @ M.conj() + np.eye(4))) > 1e-10:
            raise ValueError("structure map must square to -Id")
        return FamilyMember(tag, (M,))
    P1, P2 = _orth(data[0]), _orth(data[1])
    if P1.shape[1] != 2 or P2.shape[1] != 2:
        raise ValueError("F''' needs two planes")
    if np.max(np.abs(P1.conj().T @ P2)) > 1e-10:
        raise ValueError("planes must be orthogonal")
    return FamilyMember(tag, (P1, P2))


def family_contains(m: FamilyMember, plane, tol: float = TOL) -> bool:
    P = _orth(plane)
    if P.shape[1] != 2:
        raise ValueError("not a 2-plane")
    if m.tag == "F":
        return _rank(np.hstack([m.data[0], P]), tol) == 3
    if m.tag == "F'":
        return _rank(np.hstack([P, m.data[0]]), tol) == 2
    if m.tag == "F''":
        return _rank(np.hstack([P, apply_structure(m.data[0], P)]), tol) == 2
    P1, P2 = m.data
    return _rank(np.hstack([P, P1]), tol) <= 3 and _rank(np.hstack([P, P2]), tol) <= 3


# Pluecker coordinates on Lambda^2 C^4 = C^6
PAIRS = list(combinations(range(4), 2))


def wedge(a, b) -> np.ndarray:
    return np.array([a[i] * b[j] - a[j] * b[i] for i, j in PAIRS])


def klein_form(p, q) -> complex:
    """Symmetric form with ``p ^ q = klein_form(p, q) e_0123``."""
    return (p[0] * q[5] - p[1] * q[4] + p[2] * q[3] + p[3] * q[2] - p[4] * q[1] + p[5] * q[0])


KLEIN = np.array([[klein_form(np.eye(6)[a], np.eye(6)[b]) for b in range(6)] for a in range(6)])


def plane_from_plucker(p, tol: float = 1e-8) -> np.ndarray:
    """The 2-plane of a decomposable Pluecker vector."""
    A = np.zeros((4, 4), dtype=complex)
    for (i, j), v in zip(PAIRS, p):
        A[i, j], A[j, i] = v, -v
    P = _orth(A, tol)
    if P.shape[1] != 2:
        raise ValueError("Pluecker vector is not decomposable")
    return P


def plucker_span(m: FamilyMember) -> np.ndarray | None:
    """Linear span of the member's Pluecker image (``None`` for the real family ``F''``)."""
    if m.tag == "F":
        W = m.data[0]
        return _orth(np.column_stack([wedge(W[:, a], W[:, b]) for a, b in combinations(range(3), 2)]))
    if m.tag == "F'":
        ell = m.data[0][:, 0]
        return _orth(np.column_stack([wedge(ell, e) for e in np.eye(4)]))
    if m.tag == "F'''":
        P1, P2 = m.data
        return _orth(np.column_stack([wedge(P1[:, a], P2[:, b]) for a in range(2) for b in range(2)]))
    return None


@dataclass
class Intersection:
    """Intersection at the Grassmannian level and its lift in ``mu^{-1}(0)``."""

    kind: str                 # "empty", "point", "two-points", "curve", "surface"
    lifted: str               # "empty", "circle", "two circles", "S3", "S5"
    planes: list[np.ndarray]  # the planes, when finitely many
    dimension: int            # complex dimension of the span intersection (complex pairs)


_LIFT = {"empty": "empty", "point": "circle", "two-points": "two circles", "curve": "S3", "surface": "S5"}

GENERIC_SPAN_DIM = {
    ("F", "F"): 1, ("F'", "F'"): 1, ("F", "F'"): 0,
    ("F", "F'''"): 1, ("F'", "F'''"): 1, ("F'''", "F'''"): 2,
}


def _complex_case(m1: FamilyMember, m2: FamilyMember, generic: bool) -> Intersection:
    V = _intersect(plucker_span(m1), plucker_span(m2))
    d = V.shape[1]
    key = tuple(sorted((m1.tag, m2.tag), key=FAMILY_TAGS.index))
    if generic and GENERIC_SPAN_DIM.get(key) != d:
        raise NonGenericError(f"span intersection has dimension {d}, generic is {GENERIC_SPAN_DIM.get(key)}")
    B = V.T @ KLEIN @ V
    r = _rank(B, 1e-9)
    if d == 0:
        return Intersection("empty", _LIFT["empty"], [], 0)
    if d == 1:
        if abs(B[0, 0]) > 1e-9:
            return Intersection("empty", _LIFT["empty"], [], 1)
        return Intersection("point", _LIFT["point"], [plane_from_plucker(V[:, 0])], 1)
    if d == 2:
        if r == 0:
            return Intersection("curve", _LIFT["curve"], [], 2)
        if r == 1:
            raise NonGenericError("tangent intersection")
        # roots of B(su + v, su + v) = 0
        a, b, c = B[0, 0], 2 * B[0, 1], B[1, 1]
        if abs(a) < 1e-12:
            roots = [None, -c / b]
        else:
            disc = np.sqrt(b * b - 4 * a * c)
            roots = [(-b + disc) / (2 * a), (-b - disc) / (2 * a)]
        planes = [plane_from_plucker(V[:, 0] if s is None else s * V[:, 0] + V[:, 1]) for s in roots]
        return Intersection("two-points", _LIFT["two-points"], planes, 2)
    if d == 3:
        if r == 3:
            return Intersection("curve", _LIFT["curve"], [], 3)
        if r == 0:
            return Intersection("surface", _LIFT["surface"], [], 3)
        raise NonGenericError("singular conic")
    raise NonGenericError("members coincide along a surface")


def _structure_with_plane(M, P) -> np.ndarray:
    """The unique ``M``-invariant plane inside the 3-space or through the line ``P``."""
    if P.shape[1] == 3:
        S = _intersect(P, apply_structure(M, P))
    else:
        S = _orth(np.hstack([P, apply_structure(M, P)]))
    if S.shape[1] != 2:
        raise NonGenericError("invariant part is not a plane")
    return S


def _structure_pair(M1, M2) -> list[np.ndarray]:
    """Planes invariant under two quaternionic structures.

    Such a plane is invariant under the linear map ``A = -J2 J1``.  An
    eigenspace of multiplicity two is a candidate as is; a simple eigenvector
    ``v`` gives the candidate ``span(v, J1 v)``.
    """
    A = -M2 @ M1.conj()
    lam = np.linalg.eigvals(A)
    clusters: list[complex] = []
    for x in lam:
        if all(abs(x - c) > 1e-6 for c in clusters):
            clusters.append(x)
    planes: list[np.ndarray] = []
    for c in clusters:
        _, s, vh = np.linalg.svd(A - c * np.eye(4))
        E = vh[s < 1e-6].conj().T
        if E.shape[1] > 2:
            raise NonGenericError("structures share an invariant 3- or 4-space")
        P = E if E.shape[1] == 2 else _orth(np.column_stack([E[:, 0], apply_structure(M1, E[:, 0])]))
        if P.shape[1] != 2 or _rank(np.hstack([P, apply_structure(M1, P)])) != 2 \
                or _rank(np.hstack([P, apply_structure(M2, P)])) != 2:
            continue
        if not any(_rank(np.hstack([P, Q_])) == 2 for Q_ in planes):
            planes.append(P)
    return planes


def _structure_lines(M, P1, P2, generic: bool) -> list[np.ndarray] | str:
    """``M``-invariant planes of the form ``l1 + l2``, ``l_i`` in ``P_i``.

    With ``a`` spanning ``l1`` the plane must be ``span(a, J a)``, which needs
    the ``P1``-component ``N conj(a)`` of ``J a`` to be parallel to ``a``.  For
    a unitary structure ``N`` is antisymmetric, so this forces ``N = 0``: the
    intersection is empty unless ``J P1 = P2``, when every ``a`` works.
    """
    N = P1.conj().T @ M @ P1.conj()
    if np.max(np.abs(N)) < 1e-10:
        if generic:
            raise NonGenericError("structure swaps the two planes")
        return "curve"
    rho, vecs = np.linalg.eig(N @ N.conj())
    if abs(rho[0] - rho[1]) < 1e-8:
        if rho[0].real < 0 and abs(rho[0].imag) < 1e-8:
            return []
        raise NonGenericError("degenerate line-pair condition")
    planes = []
    for k in range(2):
        if abs(rho[k].imag) > 1e-8 or rho[k].real < -1e-8:
            continue
        a = P1 @ vecs[:, k]
        planes.append(_orth(np.column_stack([a, apply_structure(M, a)])))
    return planes


def classify_intersection(m1: FamilyMember, m2: FamilyMember, generic: bool = True) -> Intersection:
    """Intersection of two family members in ``Gr_2(C^4)`` and its lifted name.

    A point lifts to a circle, two points to two disjoint circles and a
    ``CP^1`` to ``S^3``.  Degenerate positions raise :class:`NonGenericError`;
    with ``generic=True`` special but clean positions (e.g. a line inside the
    3-space) raise as well.
    """
    a, b = sorted((m1, m2), key=lambda m: FAMILY_TAGS.index(m.tag))
    if "F''" not in (a.tag, b.tag):
        return _complex_case(a, b, generic)
    if a.tag == "F''" and b.tag == "F''":
        planes = _structure_pair(a.data[0], b.data[0])
    elif a.tag == "F''":
        planes = _structure_lines(a.data[0], *b.data, generic)
        if planes == "curve":
            return Intersection("curve", _LIFT["curve"], [], -1)
    else:
        # a is F or F', b is F''
        planes = [_structure_with_plane(b.data[0], a.data[0])]
    kind = {0: "empty", 1: "point", 2: "two-points"}.get(len(planes))
    if kind is None:
        raise NonGenericError(f"{len(planes)} planes")
    return Intersection(kind, _LIFT[kind], planes, -1)


# ---------------------------------------------------------------------------
# sampling helpers

def random_unitary(rng, d: int = 4) -> np.ndarray:
    from scipy.stats import unitary_group

    return unitary_group.rvs(d, random_state=rng)


def random_member(tag: str, rng) -> FamilyMember:
    U = random_unitary(rng)
    if tag == "F":
        return family_member(tag, U[:, :3])
    if tag == "F'":
        return family_member(tag, U[:, :1])
    if tag == "F''":
        return family_member(tag, quaternionic_structure(U))
    return family_member(tag, U[:, :2], U[:, 2:])


def sample_plane(m: FamilyMember, rng) -> np.ndarray:
    """A random plane of the member."""
    c = lambda k: rng.standard_normal(k) + 1j * rng.standard_normal(k)  # noqa: E731
    if m.tag == "F":
        W = m.data[0]
        return _orth(W @ np.column_stack([c(3), c(3)]))
    if m.tag == "F'":
        return _orth(np.column_stack([m.data[0][:, 0], c(4)]))
    if m.tag == "F''":
        v = c(4)
        return _orth(np.column_stack([v, apply_structure(m.data[0], v)]))
    P1, P2 = m.data
    return _orth(np.column_stack([P1 @ c(2), P2 @ c(2)]))


def lift_plane(plane, theta: float = 0.0) -> np.ndarray:
    """Unit HVector on ``mu^{-1}(0) in HP^3`` over the plane (circle parameter ``theta``)."""
    from .moment import stiefel_point

    P = _orth(plane)
    return stiefel_point(np.exp(1j * theta) * P[:, 0], np.exp(1j * theta) * P[:, 1])
