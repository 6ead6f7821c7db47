"""Exact bisimilarity of subdistributions, the discounted trace pseudometric,
and state-level partition refinement.

Two subdistributions are bisimilar exactly when every word leaves them with
the same surviving mass. The word functionals ``w -> M_w 1`` live in a space
of dimension at most ``n``, so a breadth-first spanning set over backward
vectors (kept as primitive integer vectors, eliminated fraction-free) decides
the question with rational arithmetic and yields a shortest witness word.

The distance ``sup_w c^|w| |mass_mu(w) - mass_nu(w)|`` is bounded by a
level-by-level exploration of the word tree. Subtrees that cannot beat the
current lower bound are dropped (masses never increase along a word), and in
exact mode so are subtrees whose pair of subdistributions is already
certified bisimilar by the span basis.
"""

from __future__ import annotations

import enum
import math
import weakref
from dataclasses import dataclass
from fractions import Fraction
from functools import reduce
from itertools import combinations

import numpy as np

from . import frontier
from .errors import (
    ActionMismatch,
    BudgetExhausted,
    ExactModeRequired,
    InvalidDiscount,
    TheoremViolation,
)
from .model import INT64_SAFE, FiniteLmp, Number, SubDist, dirac, to_exact

DEFAULT_MAX_FRONTIER = 2_000_000


@dataclass(frozen=True)
class DistanceBounds:
    lower: Number
    upper: Number
    horizon_used: int
    discount: Number
    witness: tuple = ()

    @property
    def gap(self) -> Number:
        return self.upper - self.lower

    def to_json(self) -> dict:
        def num(x):
            return str(x) if isinstance(x, Fraction) else float(x)

        return {
            "lower": num(self.lower),
            "upper": num(self.upper),
            "witness": list(self.witness),
            "horizon": self.horizon_used,
            "discount": num(self.discount),
        }


@dataclass(frozen=True)
class Partition:
    blocks: tuple

    def block_of(self, state) -> int:
        for i, block in enumerate(self.blocks):
            if state in block:
                return i
        raise KeyError(state)

    def same_block(self, s, t) -> bool:
        return self.block_of(s) == self.block_of(t)

    def to_json(self) -> list:
        return [list(b) for b in self.blocks]


class Approx(enum.Enum):
    YES = "yes"
    NO = "no"
    UNKNOWN = "unknown"


@dataclass(frozen=True)
class ApproxResult:
    verdict: Approx
    bounds: DistanceBounds


def _require_exact(lmp: FiniteLmp, *dists: SubDist):
    if not lmp.exact or not all(d.exact for d in dists):
        raise ExactModeRequired("this operation needs a rational model and rational subdistributions")


def check_discount(c, exact: bool) -> Number:
    if isinstance(c, bool):
        raise InvalidDiscount(f"discount must be a number, got {c!r}")
    if exact:
        c = Fraction(repr(c)) if isinstance(c, float) else to_exact(c)
    else:
        c = float(c)
    if not 0 < c <= 1:
        raise InvalidDiscount(f"discount {c} not in (0, 1]")
    return c


def _primitive(v: np.ndarray) -> np.ndarray:
    g = reduce(math.gcd, (int(x) for x in v), 0)
    if g > 1:
        v = v // g
    return v


def _to_object(a: np.ndarray) -> np.ndarray:
    if a.dtype == object:
        return a
    out = np.empty(a.shape, dtype=object)
    out[...] = a.tolist()
    return out


def scaled_pair(mu: SubDist, nu: SubDist) -> tuple[int, list, list]:
    """Common denominator ``d`` and integer numerators of both subdistributions."""
    d = reduce(math.lcm, (m.denominator for m in (*mu.mass, *nu.mass)), 1)
    return d, [int(m * d) for m in mu.mass], [int(m * d) for m in nu.mass]


class BackwardBasis:
    """Breadth-first basis of ``span{M_w 1 : w in A*}`` over the rationals.

    ``words[i]`` labels ``vectors[i]``; vectors are primitive integer
    multiples of the true functionals, which is harmless for zero tests.
    """

    def __init__(self, lmp: FiniteLmp):
        _require_exact(lmp)
        _, mats = lmp.integer_form
        self.actions = lmp.actions
        self.n = lmp.n
        mats = {a: _to_object(m) for a, m in mats.items()}
        words, vectors = [], []
        echelon = []  # (pivot, row) in insertion order

        def reduce_against(v):
            for piv, row in echelon:
                if v[piv] != 0:
                    v = _primitive(row[piv] * v - v[piv] * row)
            return v

        def try_add(word, v):
            if not any(v):
                return False
            r = reduce_against(v.copy())
            if not any(r):
                return False
            piv = next(i for i, x in enumerate(r) if x != 0)
            echelon.append((piv, r))
            words.append(word)
            vectors.append(v)
            return True

        ones = np.empty(lmp.n, dtype=object)
        ones[:] = [1] * lmp.n
        queue = []
        if try_add((), ones):
            queue.append(0)
        head = 0
        while head < len(queue) and len(words) < lmp.n:
            i = queue[head]
            head += 1
            for a in lmp.actions:
                v = _primitive(mats[a] @ vectors[i])
                if try_add((a,) + words[i], v):
                    queue.append(len(words) - 1)
        self.words = words
        self.vectors = vectors
        if vectors:
            self.matrix = np.array(vectors, dtype=object).reshape(len(vectors), lmp.n)
        else:
            self.matrix = np.zeros((0, lmp.n), dtype=object)
        # <delta M_a, v> = <delta, M_a v>: one product per action, reused for every child
        self._after = {a: mats[a] @ self.matrix.T for a in lmp.actions}
        self._after_bound = {a: int(np.abs(w).max()) if w.size else 0 for a, w in self._after.items()}

    @property
    def dimension(self) -> int:
        return len(self.words)

    def witness(self, delta: list) -> tuple | None:
        """First basis word on which ``delta`` has nonzero inner product."""
        for word, v in zip(self.words, self.vectors):
            if sum(int(x) * int(y) for x, y in zip(delta, v) if x) != 0:
                return word
        return None

    def annihilates(self, rows: np.ndarray) -> np.ndarray:
        """Boolean mask: rows orthogonal to every basis vector."""
        if rows.shape[0] == 0 or self.dimension == 0:
            return np.ones(rows.shape[0], dtype=bool)
        prod = _to_object(rows) @ self.matrix.T
        return np.array([not any(r) for r in prod], dtype=bool)

    def annihilates_after(self, rows: np.ndarray, a: str) -> np.ndarray:
        """Mask of rows ``delta`` whose successor ``delta M_a`` is orthogonal to the basis."""
        if rows.shape[0] == 0 or self.dimension == 0:
            return np.ones(rows.shape[0], dtype=bool)
        w = self._after[a]
        top = int(np.abs(rows).max()) if rows.size else 0
        if top * self._after_bound[a] * self.n < INT64_SAFE:
            prod = rows.astype(np.int64) @ w.astype(np.int64)
        else:
            prod = _to_object(rows) @ w
        return ~np.asarray(prod != 0).any(axis=1)


_BASIS_CACHE: "weakref.WeakKeyDictionary[FiniteLmp, BackwardBasis]" = weakref.WeakKeyDictionary()


def backward_basis(lmp: FiniteLmp) -> BackwardBasis:
    basis = _BASIS_CACHE.get(lmp)
    if basis is None:
        basis = BackwardBasis(lmp)
        _BASIS_CACHE[lmp] = basis
    return basis


def dbisim_witness(lmp: FiniteLmp, mu: SubDist, nu: SubDist) -> tuple | None:
    """A shortest word separating the trace masses of ``mu`` and ``nu``, or None."""
    _require_exact(lmp, mu, nu)
    lmp.check_dist(mu)
    lmp.check_dist(nu)
    _, a, b = scaled_pair(mu, nu)
    return backward_basis(lmp).witness([x - y for x, y in zip(a, b)])


def decide_dbisim(lmp: FiniteLmp, mu: SubDist, nu: SubDist) -> bool:
    return dbisim_witness(lmp, mu, nu) is None


def _min_horizon(c, tol) -> int:
    # smallest H with c^(H+1) <= tol, so the frontier term alone is within tol
    h = 0
    term = c
    while term > tol:
        term *= c
        h += 1
    return h


def distance(lmp: FiniteLmp, mu: SubDist, nu: SubDist, c, tol=None, max_horizon=None,
             *, max_frontier: int = DEFAULT_MAX_FRONTIER, use_extension: bool = True) -> DistanceBounds:
    """Certified bounds on ``sup_w c^|w| |mass_mu(w) - mass_nu(w)|``.

    With ``tol`` the search stops once ``upper - lower <= tol``; with only
    ``max_horizon`` it returns the bounds after exploring words up to that
    length (``lower`` is then the exact horizon-truncated distance).
    Raises :class:`BudgetExhausted` when ``tol`` cannot be met within
    ``max_horizon`` or the frontier grows past ``max_frontier`` rows.
    """
    lmp.check_dist(mu)
    lmp.check_dist(nu)
    exact = lmp.exact and mu.exact and nu.exact
    c = check_discount(c, exact)
    if tol is None and max_horizon is None:
        raise ValueError("give tol or max_horizon")
    if tol is not None:
        tol = to_exact(tol) if exact and not isinstance(tol, float) else (
            Fraction(repr(tol)) if exact else float(tol))
        if tol < 0:
            raise ValueError("tol must be nonnegative")
    if max_horizon is None and c < 1 and tol is not None and tol > 0:
        max_horizon = _min_horizon(c, tol)
    budget_is_error = tol is not None and c < 1

    actions = lmp.actions
    if exact:
        D, imats = lmp.integer_form
        scale, a, b = scaled_pair(mu, nu)
        F_mu = np.array([a], dtype=np.int64 if scale < INT64_SAFE else object)
        F_nu = np.array([b], dtype=F_mu.dtype)
        mats = np.stack([imats[x] for x in actions]) if all(
            imats[x].dtype == np.int64 for x in actions) else np.stack([_to_object(imats[x]) for x in actions])
        if F_mu.dtype == object or mats.dtype == object:
            F_mu, F_nu, mats = _to_object(F_mu), _to_object(F_nu), _to_object(mats)
        basis = backward_basis(lmp)
        zero, one = Fraction(0), Fraction(1)
    else:
        D, scale = 1, 1
        F_mu = np.array([[float(x) for x in mu.mass]])
        F_nu = np.array([[float(x) for x in nu.mass]])
        mats = np.stack([lmp.float_matrices[x] for x in actions])
        basis = None
        zero, one = 0.0, 1.0

    def frac(num, den):
        return Fraction(int(num), int(den)) if exact else float(num) / den

    m_mu, m_nu = F_mu.sum(), F_nu.sum()
    lower = frac(abs(m_mu - m_nu), scale)
    witness = ()
    if exact and basis.witness((F_mu[0] - F_nu[0]).tolist()) is None:
        return DistanceBounds(zero, zero, 0, c, ())
    frontier_max = [max(m_mu, m_nu)]
    levels = []  # per level: (parents, acts) of kept rows

    def word_of(level, idx):
        out = []
        while level > 0:
            parents, acts = levels[level - 1]
            out.append(actions[acts[idx]])
            idx = parents[idx]
            level -= 1
        return tuple(reversed(out))

    L = 0
    cL1 = c  # c^(L+1)
    while True:
        B = frac(max(frontier_max), scale) if frontier_max else zero
        upper = max(lower, cL1 * B)
        bounds = DistanceBounds(lower, min(upper, one), L, c, witness)
        if not frontier_max or upper == lower:
            return bounds
        if tol is not None and upper - lower <= tol:
            return bounds
        if max_horizon is not None and L >= max_horizon:
            if budget_is_error:
                raise BudgetExhausted(f"gap {upper - lower} > tol after horizon {L}", bounds)
            return bounds
        # level L -> L+1
        next_scale = scale * D
        if exact and F_mu.dtype != object and next_scale >= INT64_SAFE:
            F_mu, F_nu, mats = _to_object(F_mu), _to_object(F_nu), _to_object(mats)
        R = np.ascontiguousarray(mats.sum(axis=2).T)
        M_mu = frontier.child_masses(F_mu, R, use_extension)
        M_nu = frontier.child_masses(F_nu, R, use_extension)
        diff = np.abs(M_mu - M_nu).ravel()
        k = int(np.argmax(diff))
        cand = cL1 * frac(diff[k], next_scale)
        if cand > lower:
            lower = cand
            witness = word_of(L, k // len(actions)) + (actions[k % len(actions)],)
        cL2 = cL1 * c
        biggest = np.maximum(M_mu, M_nu).ravel()
        if exact:
            thr = lower * next_scale / cL2
            t_int = min(thr.numerator // thr.denominator, next_scale)
            keep = biggest > t_int
        else:
            keep = biggest > lower / cL2 * next_scale
        flat = np.nonzero(keep)[0]
        parents = flat // len(actions)
        acts = flat % len(actions)
        if exact and len(flat):
            delta = F_mu - F_nu
            alive = np.ones(len(flat), dtype=bool)
            for ai, a in enumerate(actions):
                sel = acts == ai
                if sel.any():
                    alive[sel] = ~basis.annihilates_after(delta[parents[sel]], a)
            flat, parents, acts = flat[alive], parents[alive], acts[alive]
        if len(flat) > max_frontier:
            raise BudgetExhausted(f"frontier of {len(flat)} words exceeds {max_frontier}", bounds)
        F_mu = frontier.expand(F_mu, mats, parents, acts, use_extension)
        F_nu = frontier.expand(F_nu, mats, parents, acts, use_extension)
        frontier_max = biggest[flat].tolist()
        levels.append((parents, acts))
        scale = next_scale
        L += 1
        cL1 = cL2


def truncated_distance(lmp: FiniteLmp, mu: SubDist, nu: SubDist, c, horizon: int, **kw) -> Number:
    """``max_{|w| <= horizon} c^|w| |mass_mu(w) - mass_nu(w)|`` (exact in rational mode)."""
    return distance(lmp, mu, nu, c, max_horizon=horizon, **kw).lower


def approx_bisim(lmp: FiniteLmp, mu: SubDist, nu: SubDist, epsilon, c, tol=None,
                 max_horizon=None, **kw) -> ApproxResult:
    exact = lmp.exact and mu.exact and nu.exact
    eps = (Fraction(repr(epsilon)) if isinstance(epsilon, float) else to_exact(epsilon)) if exact else float(epsilon)
    if eps < 0:
        raise ValueError("epsilon must be nonnegative")
    if tol is None and max_horizon is None:
        tol = Fraction(1, 10**9) if exact else 1e-9
    try:
        bounds = distance(lmp, mu, nu, c, tol, max_horizon, **kw)
    except BudgetExhausted as exc:
        bounds = exc.bounds
    if bounds.upper <= eps:
        return ApproxResult(Approx.YES, bounds)
    if bounds.lower > eps:
        return ApproxResult(Approx.NO, bounds)
    return ApproxResult(Approx.UNKNOWN, bounds)


def disjoint_union(m1: FiniteLmp, m2: FiniteLmp, prefixes=("L:", "R:")) -> tuple[FiniteLmp, SubDist, SubDist]:
    """Side-by-side model plus the two initial distributions embedded in it."""
    if set(m1.actions) != set(m2.actions):
        raise ActionMismatch(f"action sets differ: {sorted(m1.actions)} vs {sorted(m2.actions)}")
    exact = m1.exact and m2.exact
    conv = (lambda x: x) if exact else float
    n1, n2 = m1.n, m2.n
    zero = Fraction(0) if exact else 0.0
    names = tuple(prefixes[0] + s for s in m1.state_names) + tuple(prefixes[1] + s for s in m2.state_names)
    trans = {}
    for a in m1.actions:
        rows = [tuple(conv(x) for x in r) + (zero,) * n2 for r in m1.trans[a]]
        rows += [(zero,) * n1 + tuple(conv(x) for x in r) for r in m2.trans[a]]
        trans[a] = rows
    pi1 = tuple(conv(x) for x in m1.initial) + (zero,) * n2
    pi2 = (zero,) * n1 + tuple(conv(x) for x in m2.initial)
    union = FiniteLmp(names, m1.actions, trans, SubDist(pi1), "rational" if exact else "float")
    return union, SubDist(pi1), SubDist(pi2)


def equivalence_metric(m1: FiniteLmp, m2: FiniteLmp, tol=None, max_horizon=None, **kw) -> DistanceBounds:
    """Bounds on ``D(m1, m2)``: the undiscounted distance between the initial distributions."""
    union, p1, p2 = disjoint_union(m1, m2)
    if union.exact and decide_dbisim(union, p1, p2):
        return DistanceBounds(Fraction(0), Fraction(0), 0, Fraction(1), ())
    if tol is None and max_horizon is None:
        raise ValueError("give tol or max_horizon")
    try:
        return distance(union, p1, p2, 1, tol, max_horizon, **kw)
    except BudgetExhausted as exc:
        return exc.bounds


def state_bisim_partition(lmp: FiniteLmp) -> Partition:
    """Coarsest partition where same-block states put equal mass into every block, per action."""
    if not lmp.exact:
        raise ExactModeRequired("partition refinement needs a rational model")
    _, mats = lmp.integer_form
    n = lmp.n
    block = np.zeros(n, dtype=np.int64)
    count = 1
    while True:
        ind = np.zeros((n, count), dtype=np.int64)
        ind[np.arange(n), block] = 1
        sigs = [(mats[a] @ ind) for a in lmp.actions]
        keys = {}
        new_block = np.empty(n, dtype=np.int64)
        for s in range(n):
            key = (int(block[s]),) + tuple(tuple(sig[s].tolist()) for sig in sigs)
            new_block[s] = keys.setdefault(key, len(keys))
        if len(keys) == count:
            break
        block, count = new_block, len(keys)
    groups: dict[int, list] = {}
    for s in range(n):
        groups.setdefault(int(block[s]), []).append(lmp.state_names[s])
    return Partition(tuple(tuple(g) for g in sorted(groups.values(), key=lambda g: lmp.index(g[0]))))


def check_state_implies_dist(lmp: FiniteLmp) -> list[tuple]:
    """Verify that every state-bisimilar pair has bisimilar Dirac subdistributions.

    Returns the verified pairs; a refuted pair raises :class:`TheoremViolation`.
    """
    part = state_bisim_partition(lmp)
    verified = []
    for block in part.blocks:
        for s, t in combinations(block, 2):
            if not decide_dbisim(lmp, dirac(lmp, s), dirac(lmp, t)):
                raise TheoremViolation(f"{s} and {t} are state bisimilar but their Dirac distributions are not")
            verified.append((s, t))
    return verified
