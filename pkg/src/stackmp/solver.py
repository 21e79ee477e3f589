"""Top of the pipeline: exact adversarial Stackelberg values, threshold
decisions with checkable certificates, regular lasso witnesses, the largest
admissible tolerance, finite-memory strategy evaluation, the memoryless
restriction, the robustness harnesses, and the partition-game generator.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .model import (
    Arena,
    CertificateError,
    DEFAULT_GUARDS,
    Guards,
    Lasso,
    MealyStrategy,
    ModelError,
    enumerate_memoryless,
    format_rational,
    make_lasso,
    perturb_game,
    product_with_strategy,
)
from .graphs import (
    CycleRecord,
    ExtendedArena,
    SccRecord,
    build_extended_game,
    enumerate_simple_cycles,
    tarjan_scc,
)
from .geometry import (
    Cell,
    Region,
    canonical_region,
    convex_hull_2d,
    fmin_closure,
    lincon,
    lp_inf,
    lp_sup,
    polygon_boundary_pair,
    polygon_max_x_at_y,
    region_complement,
    region_intersect,
    region_lift,
    region_rename,
    region_substitute,
    region_union,
    sample_point,
    empty_region,
)
from .badness import BadnessQuery, SYMBOLIC, defends, find_punishing, is_bad_vertex, lambda_region


RHO_VARS = ("x", "y", "c")


@dataclass(frozen=True)
class SccTrace:
    """Per-SCC audit record of the value computation."""

    scc_id: int
    base_vertices: tuple[str, ...]
    phi: Region
    psi: Region
    sup: object  # Fraction or -inf
    attained: bool

    def to_json(self) -> dict:
        return {
            "scc": self.scc_id,
            "vertices": list(self.base_vertices),
            "phi": self.phi.to_json(),
            "psi": self.psi.to_json(),
            "sup": format_rational(self.sup),
            "attained": self.attained,
        }


@dataclass(frozen=True)
class AsvResult:
    value: object  # Fraction or -inf
    attained: bool
    achieving_scc: int | None
    trace: tuple[SccTrace, ...]

    def to_json(self) -> dict:
        return {
            "value": format_rational(self.value),
            "attained": self.attained,
            "achieving_scc": self.achieving_scc,
            "trace": [t.to_json() for t in self.trace],
        }


def phi_region(ext: ExtendedArena, scc: SccRecord, guards: Guards = DEFAULT_GUARDS) -> Region:
    """Achievable mean-payoff pairs of plays trapped in the SCC."""
    cycles = enumerate_simple_cycles(scc, ext.arena, guards)
    return fmin_closure([c.coordinate for c in cycles])


def psi_region(
    ext: ExtendedArena,
    scc: SccRecord,
    eps: Fraction,
    strict_second: bool = True,
    guards: Guards = DEFAULT_GUARDS,
    _cache: dict | None = None,
) -> Region:
    """Union of the badness regions over every base vertex the SCC's plays
    visit (prefix included: the visited-set component records all of them)."""
    variables = ("c", "d") if eps is not SYMBOLIC else ("c", "d", "eps")
    acc = empty_region(variables)
    for u in sorted(ext.visited_of(scc)):
        if _cache is not None and u in _cache:
            lam = _cache[u]
        else:
            lam = lambda_region(ext.base, u, eps, strict_second, guards)
            if _cache is not None:
                _cache[u] = lam
        acc = region_union(acc, lam)
    return acc


def _nontrivial_sccs(ext: ExtendedArena) -> list[SccRecord]:
    return [s for s in tarjan_scc(ext.arena) if not s.is_trivial]


def _rho_region(phi: Region, psi: Region) -> Region:
    """rho(c): exists (x, y) with x > c, (x, y) achievable, and (c, y) safe."""
    not_psi = region_rename(region_complement(psi), "d", "y")
    pieces = [
        region_lift(phi, RHO_VARS),
        Region(RHO_VARS, (Cell((lincon({"x": 1, "c": -1}, ">", 0),)),)),
        region_lift(not_psi, RHO_VARS),
    ]
    acc = pieces[0]
    for piece in pieces[1:]:
        acc = region_intersect(acc, piece)
    return acc


def _asv_pipeline(
    arena: Arena, v: str, eps: Fraction, strict_second: bool, guards: Guards
) -> tuple[AsvResult, ExtendedArena]:
    ext = build_extended_game(arena, v, guards)
    cache: dict = {}
    traces = []
    best = -math.inf
    best_attained = False
    best_id = None
    for scc in _nontrivial_sccs(ext):
        phi = phi_region(ext, scc, guards)
        psi = psi_region(ext, scc, eps, strict_second, guards, _cache=cache)
        sup, attained = lp_sup(_rho_region(phi, psi), "c")
        traces.append(
            SccTrace(scc.id, tuple(sorted(ext.visited_of(scc))), phi, psi, sup, attained)
        )
        if sup > best:
            best, best_attained, best_id = sup, attained, scc.id
        elif sup == best and attained and not best_attained:
            best_attained = True
    if best == -math.inf:
        best_attained = False
    return AsvResult(best, best_attained, best_id, tuple(traces)), ext


def asv_epsilon(
    arena: Arena,
    v: str,
    eps: Fraction,
    guards: Guards = DEFAULT_GUARDS,
) -> AsvResult:
    """ASV^eps(v): the max over extended-game SCCs of the per-SCC supremum."""
    eps = Fraction(eps)
    if eps <= 0:
        raise ModelError("eps must be positive")
    result, _ = _asv_pipeline(arena, v, eps, True, guards)
    return result


def asv(arena: Arena, v: str, guards: Guards = DEFAULT_GUARDS) -> AsvResult:
    """ASV(v): same pipeline with the closed badness variant (MP1 >= d)."""
    result, _ = _asv_pipeline(arena, v, Fraction(0), False, guards)
    return result


@dataclass(frozen=True)
class WitnessCertificate:
    """The checkable certificate behind a positive threshold answer: two simple
    cycles, the three connecting paths, the exact mixture, and one memoryless
    punishing strategy per support vertex."""

    arena: Arena
    vertex: str
    c: Fraction
    eps: Fraction
    strict_second: bool
    pi1: tuple[str, ...]
    pi2: tuple[str, ...]
    pi3: tuple[str, ...]
    pi1_edges: tuple[int, ...]
    pi2_edges: tuple[int, ...]
    pi3_edges: tuple[int, ...]
    l1: CycleRecord
    l2: CycleRecord
    alpha: Fraction
    beta: Fraction
    c_prime: Fraction
    d: Fraction
    punishing: tuple[tuple[str, MealyStrategy], ...] = ()

    def support_vertices(self) -> tuple[str, ...]:
        support = set(self.pi1) | set(self.pi2) | set(self.pi3)
        support |= set(self.l1.vertices) | set(self.l2.vertices)
        return tuple(sorted(support))

    def badness_query(self, vertex: str) -> BadnessQuery:
        return BadnessQuery(vertex, self.c, self.d, self.eps, self.strict_second)

    def verify(self, guards: Guards = DEFAULT_GUARDS) -> None:
        """Re-check every certificate invariant exactly; raise CertificateError on failure."""
        if not (0 < self.alpha <= 1 and 0 <= self.beta <= 1 and self.alpha + self.beta == 1):
            raise CertificateError("mixture weights must be positive and sum to 1")
        mix0 = self.alpha * self.l1.mp0 + self.beta * self.l2.mp0
        mix1 = self.alpha * self.l1.mp1 + self.beta * self.l2.mp1
        if mix0 != self.c_prime or mix1 != self.d:
            raise CertificateError("mixture does not reproduce (c', d)")
        if self.c_prime <= self.c:
            raise CertificateError("certificate value does not beat the threshold")
        if self.pi1[0] != self.vertex or self.pi1[-1] != self.l1.vertices[0]:
            raise CertificateError("pi1 must run from the query vertex to l1")
        if self.pi2[0] != self.l1.vertices[0] or self.pi2[-1] != self.l2.vertices[0]:
            raise CertificateError("pi2 must run from l1 to l2")
        if self.pi3[0] != self.l2.vertices[0] or self.pi3[-1] != self.l1.vertices[0]:
            raise CertificateError("pi3 must run from l2 back to l1")
        for path, edges in ((self.pi1, self.pi1_edges), (self.pi2, self.pi2_edges), (self.pi3, self.pi3_edges)):
            for k, idx in enumerate(edges):
                e = self.arena.edges[idx]
                if e.src != path[k] or e.dst != path[k + 1]:
                    raise CertificateError("path edges do not match path vertices")
        for cyc in (self.l1, self.l2):
            n = len(cyc.vertices)
            for k, idx in enumerate(cyc.edge_indices):
                e = self.arena.edges[idx]
                if e.src != cyc.vertices[k] or e.dst != cyc.vertices[(k + 1) % n]:
                    raise CertificateError("cycle edges do not match cycle vertices")
        stored = dict(self.punishing)
        for u in self.support_vertices():
            # polynomial route: the stored memoryless strategy must defend u
            if u in stored and not defends(self.arena, stored[u], self.badness_query(u)):
                raise CertificateError(f"stored punishing strategy fails at {u}")
            # exhaustive route: no strategy at all would make u safe
            if is_bad_vertex(self.arena, self.badness_query(u), guards):
                raise CertificateError(f"support vertex {u} is punishable at (c, d)")

    def to_json(self) -> dict:
        return {
            "vertex": self.vertex,
            "c": format_rational(self.c),
            "eps": format_rational(self.eps),
            "closed": not self.strict_second,
            "pi1": list(self.pi1),
            "pi2": list(self.pi2),
            "pi3": list(self.pi3),
            "l1": {"vertices": list(self.l1.vertices), "mp0": format_rational(self.l1.mp0), "mp1": format_rational(self.l1.mp1)},
            "l2": {"vertices": list(self.l2.vertices), "mp0": format_rational(self.l2.mp0), "mp1": format_rational(self.l2.mp1)},
            "alpha": format_rational(self.alpha),
            "beta": format_rational(self.beta),
            "c_prime": format_rational(self.c_prime),
            "d": format_rational(self.d),
            "punishing": {u: sigma.to_json() for u, sigma in self.punishing},
        }


def _bfs_path(arena: Arena, allowed: set[str], src: str, dst: str) -> tuple[tuple[str, ...], tuple[int, ...]]:
    """Shortest path inside the induced subgraph, deterministic (lexicographic
    neighbor order)."""
    if src == dst:
        return ((src,), ())
    parent: dict[str, tuple[str, int]] = {}
    frontier = [src]
    seen = {src}
    while frontier:
        nxt = []
        for u in frontier:
            steps = sorted(
                ((arena.edges[i].dst, i) for i in arena.out_indices(u) if arena.edges[i].dst in allowed),
            )
            for w, i in steps:
                if w in seen:
                    continue
                seen.add(w)
                parent[w] = (u, i)
                if w == dst:
                    path = [dst]
                    edges = []
                    cur = dst
                    while cur != src:
                        p, idx = parent[cur]
                        path.append(p)
                        edges.append(idx)
                        cur = p
                    return (tuple(reversed(path)), tuple(reversed(edges)))
                nxt.append(w)
        frontier = nxt
    raise CertificateError(f"no path {src} -> {dst} inside the safe vertex set")


def _base_cycles(ext: ExtendedArena, scc: SccRecord, guards: Guards) -> list[CycleRecord]:
    """Cycles of the extended SCC projected onto the base arena."""
    out = []
    for cyc in enumerate_simple_cycles(scc, ext.arena, guards):
        verts = tuple(ext.base_vertex[u] for u in cyc.vertices)
        edges = tuple(ext.origin_edges[i] for i in cyc.edge_indices)
        out.append(CycleRecord(verts, edges, cyc.mp0, cyc.mp1))
    return out


def _pick_cycle(cycles: Sequence[CycleRecord], coordinate) -> CycleRecord:
    matches = [c for c in cycles if c.coordinate == coordinate]
    if not matches:
        raise CertificateError(f"no cycle at hull coordinate {coordinate}")
    return min(matches, key=lambda c: (len(c.vertices), c.vertices, c.edge_indices))


def _extract_certificate(
    arena: Arena,
    ext: ExtendedArena,
    scc: SccRecord,
    c: Fraction,
    eps: Fraction,
    strict_second: bool,
    v: str,
    phi: Region,
    psi: Region,
    guards: Guards,
) -> WitnessCertificate:
    not_psi_y = region_rename(region_complement(psi), "d", "y")
    c_var = "c"
    fixed = region_substitute(region_lift(not_psi_y, ("y", c_var)), c_var, c)
    witness_xy = region_intersect(
        region_intersect(phi, Region(("x", "y"), (Cell((lincon({"x": 1}, ">", c),)),))),
        region_lift(fixed, ("x", "y")),
    )
    if witness_xy.is_empty():
        raise CertificateError("threshold holds but the witness region is empty")
    point = sample_point(witness_xy.cells[0], ("x", "y"))
    if point is None:
        raise CertificateError("failed to sample a witness point")
    y_star = point["y"]
    cycles = _base_cycles(ext, scc, guards)
    hull = convex_hull_2d([cy.coordinate for cy in cycles])
    x2 = polygon_max_x_at_y(hull, y_star)
    if x2 is None or x2 < point["x"]:
        raise CertificateError("no cycle mixture dominates the witness point")
    p, q = polygon_boundary_pair(hull, (x2, y_star))
    if p == q:
        l1 = l2 = _pick_cycle(cycles, p)
        alpha, beta = Fraction(1, 2), Fraction(1, 2)
    else:
        l1 = _pick_cycle(cycles, p)
        l2 = _pick_cycle(cycles, q)
        if p[0] != q[0]:
            alpha = (x2 - q[0]) / (p[0] - q[0])
        else:
            alpha = (y_star - q[1]) / (p[1] - q[1])
        beta = 1 - alpha
        if alpha == 0:
            l1, l2 = l2, l1
            alpha, beta = beta, alpha
        if beta == 0:
            l2 = l1
            alpha, beta = Fraction(1, 2), Fraction(1, 2)
    safe = set(ext.visited_of(scc))
    scc_base = {ext.base_vertex[u] for u in scc.vertex_set}
    pi1, pi1_edges = _bfs_path(arena, safe, v, l1.vertices[0])
    pi2, pi2_edges = _bfs_path(arena, scc_base, l1.vertices[0], l2.vertices[0])
    pi3, pi3_edges = _bfs_path(arena, scc_base, l2.vertices[0], l1.vertices[0])
    support = set(pi1) | set(pi2) | set(pi3) | set(l1.vertices) | set(l2.vertices)
    punishing = []
    for u in sorted(support):
        sigma = find_punishing(arena, BadnessQuery(u, c, y_star, eps, strict_second), guards)
        if sigma is None:
            raise CertificateError(f"no punishing strategy exists at {u}; solver bug")
        punishing.append((u, sigma))
    cert = WitnessCertificate(
        arena, v, c, eps, strict_second,
        pi1, pi2, pi3, pi1_edges, pi2_edges, pi3_edges,
        l1, l2, alpha, beta, x2, y_star, tuple(punishing),
    )
    cert.verify(guards)
    return cert


def threshold(
    arena: Arena,
    v: str,
    c: Fraction,
    eps: Fraction,
    strict_second: bool = True,
    guards: Guards = DEFAULT_GUARDS,
) -> tuple[bool, WitnessCertificate | None]:
    """Decide ASV^eps(v) > c (strictly) and extract a verified certificate when true."""
    c = Fraction(c)
    eps = Fraction(eps)
    if strict_second and eps <= 0:
        raise ModelError("eps must be positive")
    result, ext = _asv_pipeline(arena, v, eps, strict_second, guards)
    decision = result.value > c
    if not decision:
        return (False, None)
    trace = next(t for t in result.trace if t.sup == result.value)
    scc = next(s for s in _nontrivial_sccs(ext) if s.id == trace.scc_id)
    cert = _extract_certificate(
        arena, ext, scc, c, eps, strict_second, v, trace.phi, trace.psi, guards
    )
    return (True, cert)


@dataclass(frozen=True)
class RegularWitness:
    lasso: Lasso
    k: Fraction | None
    tau: Fraction | None
    repetitions: tuple[int, int] | None

    def to_json(self) -> dict:
        return {
            "lasso": self.lasso.to_json(),
            "k": None if self.k is None else format_rational(self.k),
            "tau": None if self.tau is None else format_rational(self.tau),
            "repetitions": list(self.repetitions) if self.repetitions else None,
        }


def witness_multipliers(cert: WitnessCertificate, c_target: Fraction) -> tuple[Fraction, Fraction]:
    """Exact real-valued repetition counts (m1, m2) making the periodic block
    hit payoffs (c_target, d) exactly, connector paths included.

    Solves the linear system obtained from the two mean-payoff identities of
    the block l1^m1 . pi2 . l2^m2 . pi3.
    """
    l1, l2, d = cert.l1, cert.l2, cert.d
    c_t = Fraction(c_target)
    L1, L2 = len(l1.vertices), len(l2.vertices)
    W01, W11 = l1.mp0 * L1, l1.mp1 * L1
    W02, W12 = l2.mp0 * L2, l2.mp1 * L2
    v_len = len(cert.pi2_edges) + len(cert.pi3_edges)
    z0 = sum((cert.arena.edges[i].w0 for i in cert.pi2_edges + cert.pi3_edges), Fraction(0))
    z1 = sum((cert.arena.edges[i].w1 for i in cert.pi2_edges + cert.pi3_edges), Fraction(0))
    a11, a12, b1 = W01 - c_t * L1, W02 - c_t * L2, c_t * v_len - z0
    a21, a22, b2 = W11 - d * L1, W12 - d * L2, d * v_len - z1
    det = a11 * a22 - a12 * a21
    if det == 0:
        raise CertificateError("degenerate cycle pair: multipliers are not determined")
    m1 = (b1 * a22 - b2 * a12) / det
    m2 = (a11 * b2 - a21 * b1) / det
    return m1, m2


def _block_lasso(cert: WitnessCertificate, m1: int, m2: int) -> Lasso:
    """Assemble pi1 . (l1^m1 . pi2 . l2^m2 . pi3)^omega as a concrete lasso."""
    arena = cert.arena
    verts: list[str] = []
    edges: list[int] = []

    def extend(path_vertices, path_edges):
        if verts:
            assert verts[-1] == path_vertices[0]
            verts.extend(path_vertices[1:])
        else:
            verts.extend(path_vertices)
        edges.extend(path_edges)

    def cycle_walk(cyc: CycleRecord, times: int):
        seq = list(cyc.vertices) + [cyc.vertices[0]]
        for _ in range(times):
            extend(seq, list(cyc.edge_indices))

    extend(cert.pi1, cert.pi1_edges)
    start = len(edges)
    cycle_walk(cert.l1, m1)
    extend(cert.pi2, cert.pi2_edges)
    cycle_walk(cert.l2, m2)
    extend(cert.pi3, cert.pi3_edges)
    prefix = tuple(verts[:start])
    prefix_edges = tuple(edges[:start])
    cycle_vertices = tuple(verts[start:-1])
    cycle_edges = tuple(edges[start:])
    return make_lasso(arena, prefix, cycle_vertices, prefix_edges or None, cycle_edges)


def build_regular_witness(cert: WitnessCertificate, c_target: Fraction) -> RegularWitness:
    """Concrete eventually-periodic witness from a certificate.

    When the two cycles trade off the players' payoffs, the repetition counts
    come from the exact closed forms (rounded up, enlarged if rounding breaks
    an inequality); when one cycle dominates, repeating it alone suffices.
    The returned lasso always satisfies payoff0 > c and payoff1 >= d.
    """
    c_target = Fraction(c_target)
    arena = cert.arena
    p1x, p1y = cert.l1.coordinate
    p2x, p2y = cert.l2.coordinate
    trade_off = (p1x - p2x) * (p1y - p2y) < 0
    if cert.l1.coordinate == cert.l2.coordinate or not trade_off:
        best = cert.l1 if (p1x, p1y) >= (p2x, p2y) else cert.l2
        if best is cert.l1:
            prefix, prefix_edges = cert.pi1[:-1], cert.pi1_edges
        else:
            prefix = cert.pi1[:-1] + cert.pi2[:-1]
            prefix_edges = cert.pi1_edges + cert.pi2_edges
        lasso = make_lasso(arena, prefix, best.vertices, prefix_edges or None, best.edge_indices)
        if not (lasso.payoff0 > cert.c and lasso.payoff1 >= cert.d):
            raise CertificateError("dominating-cycle witness fails the payoff bounds")
        return RegularWitness(lasso, None, None, None)
    if not (cert.c < c_target < cert.c_prime):
        raise ModelError("need c < c_target < c_prime for the trade-off construction")
    try:
        m1_exact, m2_exact = witness_multipliers(cert, c_target)
    except CertificateError:
        m1_exact = m2_exact = Fraction(0)  # singular system; repair search only
    # appendix-style parameters: counts split as m1 = alpha_hat*k, m2 = beta_hat*(k+tau)
    L1, L2 = len(cert.l1.vertices), len(cert.l2.vertices)
    share = cert.alpha / L1 + cert.beta / L2
    alpha_hat = (cert.alpha / L1) / share
    beta_hat = (cert.beta / L2) / share
    if m1_exact > 0 and m2_exact > 0:
        k = m1_exact / alpha_hat
        tau = m2_exact / beta_hat - k
    else:
        k = tau = None  # no positive exact solution; fall back to the repair search
    # coefficient of m2 in the payoff1 >= d inequality
    coef2 = cert.l2.mp1 * L2 - cert.d * L2
    z1 = sum((arena.edges[i].w1 for i in cert.pi2_edges + cert.pi3_edges), Fraction(0))
    v_len = len(cert.pi2_edges) + len(cert.pi3_edges)
    c1 = cert.l1.mp1 * L1 - cert.d * L1

    def minimal_m2(m1: int) -> int | None:
        # payoff1 >= d  <=>  m1*c1 + m2*coef2 + z1 - d*v_len >= 0
        rhs = cert.d * v_len - z1 - m1 * c1
        if coef2 > 0:
            return max(1, math.ceil(rhs / coef2))
        if coef2 < 0:
            bound = rhs / coef2  # dividing flips: m2 <= bound
            return math.floor(bound) if bound >= 1 else None
        return 1 if rhs <= 0 else None

    L1w0, L2w0 = cert.l1.mp0 * L1, cert.l2.mp0 * L2
    z0 = sum((arena.edges[i].w0 for i in cert.pi2_edges + cert.pi3_edges), Fraction(0))

    def payoffs(m1: int, m2: int) -> tuple[Fraction, Fraction]:
        length = m1 * L1 + m2 * L2 + v_len
        p0 = (m1 * L1w0 + m2 * L2w0 + z0) / length
        p1 = (m1 * cert.l1.mp1 * L1 + m2 * cert.l2.mp1 * L2 + z1) / length
        return p0, p1

    def attempts():
        if m1_exact > 0 and m2_exact > 0:
            yield (math.ceil(m1_exact), math.ceil(m2_exact))
        scale = Fraction(1)
        base_m1 = m1_exact if m1_exact > 0 else Fraction(1)
        for _ in range(64):
            m1 = max(1, math.ceil(base_m1 * scale))
            m2 = minimal_m2(m1)
            if m2 is not None:
                yield (m1, m2)
            scale *= 2

    for m1, m2 in attempts():
        p0, p1 = payoffs(m1, m2)
        if not (p0 > cert.c and p1 >= cert.d):
            continue
        if m1 * L1 + m2 * L2 > 100_000:
            raise CertificateError("witness repetition counts exceed the materialization cap")
        lasso = _block_lasso(cert, m1, m2)
        assert (lasso.payoff0, lasso.payoff1) == (p0, p1)
        return RegularWitness(lasso, k, tau, (m1, m2))
    raise CertificateError("could not realize the witness with integer repetition counts")


@dataclass(frozen=True)
class MaxEpsResult:
    sup: object  # Fraction, 0 for empty, or +inf
    attained: bool

    def to_json(self) -> dict:
        return {"sup_eps": format_rational(self.sup), "attained": self.attained}


def _symbolic_rho(ext: ExtendedArena, scc: SccRecord, c: Fraction, guards: Guards, cache: dict) -> Region:
    variables = ("x", "y", "c", "eps")
    phi = region_lift(phi_region(ext, scc, guards), variables)
    psi = psi_region(ext, scc, SYMBOLIC, True, guards, _cache=cache)
    not_psi = region_lift(region_rename(region_complement(psi), "d", "y"), variables)
    rho = region_intersect(phi, not_psi)
    rho = region_intersect(
        rho,
        Region(variables, (Cell((lincon({"x": 1, "c": -1}, ">", 0), lincon({"eps": 1}, ">", 0))),)),
    )
    return region_substitute(rho, "c", c)


def max_epsilon(arena: Arena, v: str, c: Fraction, guards: Guards = DEFAULT_GUARDS) -> MaxEpsResult:
    """sup { eps > 0 : ASV^eps(v) > c }, exactly, by re-running the region
    pipeline with eps symbolic and maximizing it.  Returns 0 when no positive
    tolerance works and +inf when every tolerance works."""
    c = Fraction(c)
    ext = build_extended_game(arena, v, guards)
    cache: dict = {}
    best = -math.inf
    attained = False
    for scc in _nontrivial_sccs(ext):
        sup, att = lp_sup(_symbolic_rho(ext, scc, c, guards, cache), "eps")
        if sup > best:
            best, attained = sup, att
        elif sup == best and att:
            attained = True
    if best == -math.inf:
        return MaxEpsResult(Fraction(0), False)
    return MaxEpsResult(best, attained)


def max_epsilon_candidates(arena: Arena, v: str, c: Fraction, guards: Guards = DEFAULT_GUARDS) -> list[Fraction]:
    """Finite eps breakpoints harvested from the symbolic region construction."""
    from .geometry import _objective_interval  # internal reuse for breakpoint harvest

    c = Fraction(c)
    ext = build_extended_game(arena, v, guards)
    cache: dict = {}
    values = set()
    for scc in _nontrivial_sccs(ext):
        for cell in _symbolic_rho(ext, scc, c, guards, cache).cells:
            interval = _objective_interval(cell, "eps")
            if interval is None:
                continue
            lo, _, hi, _ = interval
            for bound in (lo, hi):
                if bound is not None and bound > 0:
                    values.add(bound)
    return sorted(values)


def max_epsilon_bisect(
    arena: Arena, v: str, c: Fraction, guards: Guards = DEFAULT_GUARDS
) -> MaxEpsResult:
    """Independent route: locate sup{eps : ASV^eps(v) > c} on the breakpoint
    grid with direct asv_epsilon probes (valid by monotonicity in eps)."""
    c = Fraction(c)

    def holds(e: Fraction) -> bool:
        return asv_epsilon(arena, v, e, guards).value > c

    cands = max_epsilon_candidates(arena, v, c, guards)
    if not cands:
        probe = Fraction(1)
        return MaxEpsResult(math.inf, False) if holds(probe) else MaxEpsResult(Fraction(0), False)
    if holds(cands[-1] + 1):
        return MaxEpsResult(math.inf, False)
    prev = Fraction(0)
    for i, cand in enumerate(cands):
        if holds(cand):
            prev = cand
            continue
        mid = (prev + cand) / 2 if prev < cand else cand / 2
        if mid > 0 and holds(mid):
            return MaxEpsResult(cand, False)
        return MaxEpsResult(prev, prev > 0)
    return MaxEpsResult(cands[-1], True)


@dataclass(frozen=True)
class StrategyValue:
    inf_mp0: Fraction
    attained: bool
    d_star: Fraction

    def to_json(self) -> dict:
        return {
            "value": format_rational(self.inf_mp0),
            "attained": self.attained,
            "d_star": format_rational(self.d_star),
        }


def strategy_value(
    arena: Arena,
    sigma0: MealyStrategy,
    v: str,
    eps: Fraction,
    guards: Guards = DEFAULT_GUARDS,
) -> StrategyValue:
    """Worst payoff the Leader strategy yields over Follower's eps-best
    responses (exact best responses when eps = 0), via the strategy product."""
    eps = Fraction(eps)
    if eps < 0:
        raise ModelError("eps must be nonnegative")
    prod = product_with_strategy(arena, sigma0, start=v)
    sccs = [s for s in tarjan_scc(prod.arena) if not s.is_trivial]
    if not sccs:
        raise ModelError("no cycle reachable in the strategy product")
    payoff_sets = []
    d_star = None
    for scc in sccs:
        cycles = enumerate_simple_cycles(scc, prod.arena, guards)
        reg = fmin_closure([cy.coordinate for cy in cycles])
        top, _ = lp_sup(reg, "y")
        payoff_sets.append(reg)
        if d_star is None or top > d_star:
            d_star = top
    if eps > 0:
        bound_cell = Cell((lincon({"y": 1}, ">", d_star - eps),))
    else:
        bound_cell = Cell((lincon({"y": 1}, ">=", d_star),))
    best = math.inf
    attained = False
    for reg in payoff_sets:
        admissible = region_intersect(reg, Region(("x", "y"), (bound_cell,)))
        if admissible.is_empty():
            continue
        lo, att = lp_inf(admissible, "x")
        if lo < best:
            best, attained = lo, att
        elif lo == best and att:
            attained = True
    return StrategyValue(best, attained, d_star)


def asv_ml(arena: Arena, v: str, eps: Fraction, guards: Guards = DEFAULT_GUARDS) -> Fraction:
    """ASV restricted to memoryless Leader strategies (eps = 0: best responses only)."""
    value, _ = asv_ml_detailed(arena, v, eps, guards)
    return value


def asv_ml_detailed(
    arena: Arena, v: str, eps: Fraction, guards: Guards = DEFAULT_GUARDS
) -> tuple[Fraction, MealyStrategy]:
    best = None
    best_sigma = None
    for sigma0 in enumerate_memoryless(arena, 0, guards):
        value = strategy_value(arena, sigma0, v, eps, guards).inf_mp0
        if best is None or value > best:
            best, best_sigma = value, sigma0
    return best, best_sigma


@dataclass(frozen=True)
class RobustnessRow:
    check: str
    sample_index: int
    seed: int
    value: Fraction
    bound: Fraction
    margin: Fraction

    @property
    def ok(self) -> bool:
        return self.margin > 0

    def to_json(self) -> dict:
        return {
            "check": self.check,
            "sample": self.sample_index,
            "seed": self.seed,
            "value": format_rational(self.value),
            "bound": format_rational(self.bound),
            "margin": format_rational(self.margin),
            "ok": self.ok,
        }


@dataclass(frozen=True)
class RobustnessReport:
    vertex: str
    eps: Fraction
    delta: Fraction
    base_combined: Fraction
    base_plain: Fraction
    rows: tuple[RobustnessRow, ...]

    @property
    def violations(self) -> int:
        return sum(1 for r in self.rows if not r.ok)

    def min_margin(self, check: str) -> Fraction:
        return min(r.margin for r in self.rows if r.check == check)

    def to_json(self) -> dict:
        return {
            "vertex": self.vertex,
            "eps": format_rational(self.eps),
            "delta": format_rational(self.delta),
            "combined_base_value": format_rational(self.base_combined),
            "plain_base_value": format_rational(self.base_plain),
            "violations": self.violations,
            "min_margins": {
                check: format_rational(self.min_margin(check))
                for check in sorted({r.check for r in self.rows})
            },
            "rows": [r.to_json() for r in self.rows],
        }

    def to_csv(self) -> str:
        lines = ["check,sample,seed,value,bound,margin,ok"]
        for r in self.rows:
            lines.append(
                f"{r.check},{r.sample_index},{r.seed},{format_rational(r.value)},"
                f"{format_rational(r.bound)},{format_rational(r.margin)},{int(r.ok)}"
            )
        return "\n".join(lines) + "\n"


def robustness_harness(
    arena: Arena,
    sigma0: MealyStrategy,
    v: str,
    eps: Fraction,
    delta: Fraction,
    samples: int,
    seed: int,
    granularity: int = 16,
    guards: Guards = DEFAULT_GUARDS,
) -> RobustnessReport:
    """Exercise both robustness guarantees on sampled perturbations.

    Combined check: with L the strategy value in G at tolerance 2*delta + eps
    and any threshold just below L, every game in the +-delta band keeps the
    eps-tolerance value above threshold - delta.  Plain check: every game in
    the +-eps band keeps the best-response value above the 2*eps-tolerance
    value in G minus eps.  Any non-positive margin is a violation (and a
    solver bug, since the guarantees are unconditional).
    """
    eps = Fraction(eps)
    delta = Fraction(delta)
    if eps <= 0 or delta <= 0:
        raise ModelError("eps and delta must be positive")
    margin = Fraction(1, 10**6)
    base_combined = strategy_value(arena, sigma0, v, 2 * delta + eps, guards).inf_mp0
    threshold_c = base_combined - margin
    base_plain = strategy_value(arena, sigma0, v, 2 * eps, guards).inf_mp0
    rows = []
    for k in range(samples):
        sample = perturb_game(arena, delta, seed + k, granularity)
        value = strategy_value(sample.arena, sigma0, v, eps, guards).inf_mp0
        bound = threshold_c - delta
        rows.append(RobustnessRow("combined", k, seed + k, value, bound, value - bound))
    for k in range(samples):
        sample = perturb_game(arena, eps, seed + 10_000 + k, granularity)
        value = strategy_value(sample.arena, sigma0, v, Fraction(0), guards).inf_mp0
        bound = base_plain - eps
        rows.append(RobustnessRow("plain", k, seed + 10_000 + k, value, bound, value - bound))
    return RobustnessReport(v, eps, delta, base_combined, base_plain, tuple(rows))


@dataclass(frozen=True)
class PartitionGame:
    arena: Arena
    values: tuple[int, ...]
    scale: int
    threshold: Fraction  # scaled (T-1)/n
    eps_bound: Fraction  # scaled 1/(2n)

    def to_json(self) -> dict:
        return {
            "values": list(self.values),
            "scale": self.scale,
            "threshold": format_rational(self.threshold),
            "eps_bound": format_rational(self.eps_bound),
        }


def make_partition_game(values: Sequence[int]) -> PartitionGame:
    """The partition-problem reduction arena, scaled by 2n to integer weights.

    Follower starts at v0 choosing the ring or the opt-out loop; Leader owns
    the ring and splits each number onto her or Follower's dimension.
    """
    values = tuple(int(a) for a in values)
    if not values or any(a <= 0 for a in values):
        raise ModelError("partition values must be positive integers")
    n = len(values)
    scale = 2 * n
    total = sum(values)  # = 2T
    vertices = [("v0", 1)] + [(f"v{i}", 0) for i in range(1, n + 1)] + [("vp", 0)]
    edges = [("v0", "v1", 0, 0), ("v0", "vp", 0, 0)]
    for i, a in enumerate(values, start=1):
        nxt = f"v{i % n + 1}"
        edges.append((f"v{i}", nxt, scale * a, 0))
        edges.append((f"v{i}", nxt, 0, scale * a))
    edges.append(("vp", "vp", 0, total - 1))  # = scale * (T - 1/2)/n
    arena = Arena(vertices, edges)
    return PartitionGame(
        arena,
        values,
        scale,
        Fraction(total - 2),  # scale * (T-1)/n
        Fraction(1),  # scale * 1/(2n)
    )
