"""Named verification suites.

Every suite is a plain function ``(lattice, params, seed) -> dict`` so it can
run in a worker process.  The returned dict holds check records, dimension
tables and solved constants, all JSON-ready (rationals as strings).
"""
from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional

from .exactmath import Scalar, as_scalar, partition_count_series
from .fockspace import (
    LatticeContext,
    State,
    enumerate_basis,
    exp_state,
    graded_dimension,
    heis_state,
    weight_of,
)
from .logdeform import (
    ModeFamily,
    build_M2,
    deformed_field_module,
    deformed_generator_mode,
    deformed_mode,
    deformed_module,
    delta_apply,
    mu,
    nilpotent_rank,
    partner_screening_mode,
    second_screening_mode,
)
from .screenings import (
    charge_screening_G,
    kernel_strata,
    screening_zero_mode,
    strong_generation_span,
    triplet_generators,
    wpp_generators,
)
from .vertexops import (
    CheckResult,
    bracket_check,
    commutator,
    composite_mode,
    conformal_vector,
    identity,
    iterate_mode,
    locality_order_check,
    shift_check,
    virasoro_mode,
)
from .zhuc2 import (
    GradedAlgebra,
    TruncationPolicy,
    c2_class,
    c2_membership,
    c2_quotient_dims,
    c2_relation_constant,
    h_rs,
    o_zero_mode,
    ov_relation_constant,
    poisson_bracket_consistent,
    singlet_relation_vectors,
)

PASS, FAIL, UNSTABLE = "pass", "fail", "unstable"


def fmt(x) -> str:
    return str(as_scalar(x))


def _table(rows) -> List[List]:
    return [[fmt(w), int(d)] for w, d in rows]


class Outcome:
    def __init__(self):
        self.checks: List[dict] = []
        self.tables: Dict[str, List[List]] = {}
        self.constants: Dict[str, str] = {}

    def add(self, name: str, anchor: str, status, details: Optional[dict] = None, counterexample=None):
        if isinstance(status, bool):
            status = PASS if status else FAIL
        self.checks.append({
            "name": name,
            "anchor": anchor,
            "status": status,
            "details": details or {},
            "counterexample": counterexample,
        })

    def add_result(self, r: CheckResult, anchor: str, **details):
        self.add(r.name, anchor, r.passed, dict(details, statesChecked=r.checked), r.counterexample)

    def as_dict(self) -> dict:
        return {"checks": self.checks, "tables": self.tables, "solvedConstants": self.constants}


def _ctx(lattice: dict) -> LatticeContext:
    return LatticeContext.a1(lattice["p"], lattice.get("pprime"))


def _basis_states(ctx: LatticeContext, cutoff, single_charge: bool = False) -> List[State]:
    b = enumerate_basis(ctx, ctx.zero, cutoff, single_charge)
    return [State({m: 1}) for m in b.all_monomials()]


def _virasoro_expected(ctx: LatticeContext, fam: Callable[[int], object], m: int, n: int):
    e = fam(m + n) * (m - n)
    if m + n == 0:
        e = e + identity(ctx) * (Scalar(m ** 3 - m, 12) * ctx.c)
    return e


def _virasoro_closure(ctx, fam, rng: range, tests, name: str) -> CheckResult:
    checked = 0
    for m in rng:
        for n in rng:
            r = bracket_check(fam(m), fam(n), _virasoro_expected(ctx, fam, m, n), tests)
            checked += r.checked
            if not r.passed:
                return CheckResult(name, False, checked, dict(r.counterexample, m=m, n=n))
    return CheckResult(name, True, checked)


# ---------------------------------------------------------------------------
# suites


def suite_virasoro(lattice: dict, params: dict, seed: int) -> dict:
    ctx = _ctx(lattice)
    out = Outcome()
    k = int(params["modeRange"])
    tests = _basis_states(ctx, params["maxWeight"])
    fam = ModeFamily(lambda n: virasoro_mode(ctx, n))
    anchor = "Virasoro commutation relations of the shifted conformal vector"
    r = _virasoro_closure(ctx, fam, range(-k, k + 1), tests, "L(m) closure")
    out.add_result(r, anchor, centralCharge=fmt(ctx.c), modeRange=k)
    bad = [s for s in tests if fam(0)(s) != s * next(iter(s.weights(ctx)))]
    out.add("L(0) grades the basis", "L(0) eigenvalue equals h(gamma) plus level", not bad, {},
            {"state": bad[0].format()} if bad else None)
    # seeded oracle: mode formula against the iterate recursion
    rnd = random.Random(seed)
    small = [s for s in _basis_states(ctx, min(as_scalar(params["maxWeight"]), 3)) if s]
    pairs = int(params["oraclePairs"])
    mismatch = None
    for _ in range(pairs):
        v = rnd.choice(small)
        s = rnd.choice(tests)
        m = rnd.randint(-3, 3)
        if composite_mode(ctx, v, m)(s) != iterate_mode(ctx, v, m)(s):
            mismatch = {"vertex": v.format(), "mode": m, "state": s.format()}
            break
    out.add("mode formula matches iterate recursion", "iterate formula for (a_{-n}b)_m", mismatch is None,
            {"pairs": pairs, "seed": seed}, mismatch)
    out.tables["V_L graded dimension"] = _table(graded_dimension(ctx, ctx.zero, params["maxWeight"]))
    return out.as_dict()


def suite_screening_commute(lattice: dict, params: dict, seed: int) -> dict:
    ctx = _ctx(lattice)
    out = Outcome()
    k = int(params["modeRange"])
    tests = _basis_states(ctx, params["maxWeight"])
    q = screening_zero_mode(ctx, "long")
    qt = screening_zero_mode(ctx, "short")
    anchor = "screening zero modes commute with the Virasoro modes"
    for scr in (q, qt):
        checked, bad = 0, None
        for n in range(-k, k + 1):
            r = bracket_check(virasoro_mode(ctx, n), scr, None, tests)
            checked += r.checked
            if not r.passed:
                bad = dict(r.counterexample, n=n)
                break
        out.add(f"[L(n), {scr.label}] = 0", anchor, bad is None, {"statesChecked": checked}, bad)
    out.add_result(bracket_check(q, qt, None, tests, "[long, short] = 0"), "long and short screenings commute")
    for scr in (q, qt):
        out.add_result(shift_check(scr, tests, ctx), "screenings preserve conformal weight")
    return out.as_dict()


def suite_triplet_kernel(lattice: dict, params: dict, seed: int) -> dict:
    ctx = _ctx(lattice)
    out = Outcome()
    p = ctx.p
    gens = triplet_generators(ctx)
    qt = screening_zero_mode(ctx, "short")
    q = screening_zero_mode(ctx, "long")
    for name, s in gens.items():
        img = qt(s)
        out.add(f"short screening kills {name}", "triplet generators lie in the short-screening kernel", not img,
                {"weight": fmt(s.weight(ctx)), "terms": len(s)}, {"residual": img.format()} if img else None)
    ws = {k: gens[k].weight(ctx) for k in ("F", "H", "E")}
    out.add("weights of F, H, E", "triplet primaries have weight 2p-1",
            all(w == 2 * p - 1 for w in ws.values()), {k: fmt(w) for k, w in ws.items()})
    img = q(gens["E"])
    out.add("long screening kills E", "third power of the long screening kills F", not img,
            {}, {"residual": img.format()} if img else None)
    out.add("H and E nonzero", "H = QF and E = Q^2 F are nonzero", bool(gens["H"]) and bool(gens["E"]))
    strata = kernel_strata(ctx, [qt], ctx.zero, params["maxWeight"])
    out.tables["short-screening kernel on V_L"] = _table((w, k.dim) for w, k in strata.items())
    return out.as_dict()


def suite_strong_generation(lattice: dict, params: dict, seed: int) -> dict:
    ctx = _ctx(lattice)
    out = Outcome()
    cutoff = params["maxWeight"]
    gens = triplet_generators(ctx)
    span = strong_generation_span(ctx, list(gens.values()), cutoff)
    qt = screening_zero_mode(ctx, "short")
    ker = kernel_strata(ctx, [qt], ctx.zero, cutoff)
    kd = {w: k.dim for w, k in ker.items()}
    sd = dict(span.dims)
    weights = sorted(set(kd) | set(sd))
    diff = [fmt(w) for w in weights if kd.get(w, 0) != sd.get(w, 0)]
    out.add("span of generator monomials equals kernel", "omega, E, F, H strongly generate the triplet algebra",
            not diff, {"maxWeight": fmt(cutoff)}, {"weights": diff} if diff else None)
    vir = dict(strong_generation_span(ctx, [gens["omega"]], cutoff).dims)
    over = [fmt(w) for w in weights if vir.get(w, 0) > kd.get(w, 0)]
    out.add("Virasoro span is contained in kernel", "the vacuum Virasoro module sits inside the kernel",
            not over, {}, {"weights": over} if over else None)
    out.tables["generator span"] = _table((w, sd.get(w, 0)) for w in weights)
    out.tables["short-screening kernel on V_L"] = _table((w, kd.get(w, 0)) for w in weights)
    out.tables["Virasoro span"] = _table((w, vir.get(w, 0)) for w in weights)
    return out.as_dict()


def suite_c2_structure(lattice: dict, params: dict, seed: int) -> dict:
    ctx = _ctx(lattice)
    out = Outcome()
    p = ctx.p
    g = triplet_generators(ctx)
    om, e, f, h = g["omega"], g["E"], g["F"], g["H"]
    policy = TruncationPolicy(params["maxWeight"], params["maxWeight"], int(params["window"]))
    alg = GradedAlgebra.from_generators(ctx, g, policy.weight_cutoff + policy.window, "triplet")
    rep = c2_quotient_dims(alg, policy)
    expected = 6 * p - 1
    details = {"history": rep.history, "expected": expected, "window": policy.window}
    if not rep.stable:
        out.add("C2 quotient dimension", "Poisson algebra dimension 6p-1", UNSTABLE, details)
    else:
        out.add("C2 quotient dimension", "Poisson algebra dimension 6p-1", rep.total == expected,
                dict(details, total=rep.total))
    out.tables["C2 quotient"] = _table(rep.dims)
    out.tables["triplet algebra"] = _table(alg.dims())

    def member(name, anchor, v):
        ok, _ = c2_membership(alg, v)
        out.add(name, anchor, ok, {"weight": fmt(v.weight(ctx))} if v else {"vanishesIdentically": True})

    zero_anchor = "squares and mixed products of E, F, H vanish in the Poisson algebra"
    for (x, y), nm in (((e, e), "E E"), ((f, f), "F F"), ((h, e), "H E"), ((h, f), "H F")):
        member(f"{nm} in C2", zero_anchor, c2_class(alg, x, y))
    member("H H + E F in C2", "H^2 = -EF in the Poisson algebra", c2_class(alg, h, h) + c2_class(alg, e, f))
    power = c2_class(alg, *([om] * (2 * p - 1)))
    nu = c2_relation_constant(alg, c2_class(alg, h, h), power)
    out.add("H H = nu omega^(2p-1) with unique nonzero nu", "H^2 is a nonzero multiple of omega^(2p-1)",
            nu is not None and nu != 0, {"nu": fmt(nu) if nu is not None else None})
    if nu is not None:
        out.constants["nu"] = fmt(nu)
    for x, nm in ((e, "E"), (f, "F"), (h, "H")):
        member(f"omega^p {nm} in C2", "omega^p times a weight 2p-1 primary vanishes", c2_class(alg, *([om] * p), x))
    # Poisson bracket is well defined on seeded sample pairs
    rnd = random.Random(seed)
    low = [w for w in alg.weights() if 0 < w <= 3]
    bad = None
    samples = int(params["poissonSamples"])
    for _ in range(samples):
        a = rnd.choice(alg.basis(rnd.choice(low)))
        b = rnd.choice(alg.basis(rnd.choice(low)))
        # move one representative at a time so every bracket stays below the cutoff
        shift = composite_mode(ctx, rnd.choice(list(g.values())), -2)
        sa, sb = (shift(a), State()) if rnd.random() < 0.5 else (State(), shift(b))
        if not poisson_bracket_consistent(alg, a, b, sa, sb):
            bad = {"a": a.format(), "b": b.format()}
            break
    out.add("Poisson bracket independent of representatives", "bracket a_0 b is well defined modulo C2",
            bad is None, {"samples": samples, "seed": seed}, bad)
    return out.as_dict()


def suite_singlet_zhu(lattice: dict, params: dict, seed: int) -> dict:
    ctx = _ctx(lattice)
    out = Outcome()
    p = ctx.p
    g = triplet_generators(ctx)
    om, h = g["omega"], g["H"]
    budget = as_scalar(params["generatorBudget"])
    window = int(params["window"])
    top = as_scalar(params["maxBudget"])
    alg = GradedAlgebra.from_generators(ctx, {"omega": om, "H": h}, budget + window, "singlet")
    target, unknown = singlet_relation_vectors(ctx, h, p)
    anchor = "H*H is a nonzero multiple of the degree 2p-1 polynomial in omega modulo O(V)"
    res = None
    while budget + window <= top:
        res = ov_relation_constant(alg, target, unknown, TruncationPolicy(params["maxWeight"], budget, window))
        if res.stable:
            break
        budget += 1
    details = {"budgets": [fmt(b) for b in res.budgets] if res else [],
               "constants": [fmt(c) if c is not None else None for c in res.constants] if res else []}
    if res is None or not res.stable:
        out.add("singlet Zhu relation", anchor, UNSTABLE, details)
    else:
        out.add("singlet Zhu relation", anchor, res.constant != 0, dict(details, C_p=fmt(res.constant)))
        out.constants["C_p"] = fmt(res.constant)
    # independent oracle: zero modes on lowest-weight vectors of charged Fock modules
    oh, oom = o_zero_mode(ctx, h), o_zero_mode(ctx, om)
    pts = [as_scalar(x) for x in params["oracleCharges"]]
    vals = []
    for lam in pts:
        v = exp_state(ctx, (lam,))
        x = oom(v).coeff(next(iter(v.terms)))
        y = oh(v).coeff(next(iter(v.terms)))
        poly = Scalar(1)
        for i in range(1, p):
            poly *= (x - h_rs(p, i, 1)) ** 2
        poly *= x - h_rs(p, p, 1)
        vals.append((lam, x, y, poly))
    ratios = {fmt(y * y / poly) for _, _, y, poly in vals if poly}
    consistent = len(ratios) == 1 and ("C_p" not in out.constants or ratios == {out.constants["C_p"]})
    out.add("zero-mode eigenvalues satisfy the relation", "top-level eigenvalues solve y^2 = C_p P(x)", consistent,
            {"charges": [fmt(v[0]) for v in vals], "ratios": sorted(ratios)})
    qt = screening_zero_mode(ctx, "short")
    ker = GradedAlgebra.from_kernel(ctx, [qt], ctx.zero, params["maxWeight"], single_charge=True)
    kd, ad = dict(ker.dims()), dict(alg.dims())
    diff = [fmt(w) for w in kd if w <= as_scalar(params["maxWeight"]) and kd[w] != ad.get(w, 0)]
    out.add("omega and H generate the singlet kernel", "singlet algebra is generated by omega and H", not diff,
            {}, {"weights": diff} if diff else None)
    out.tables["singlet kernel in M(1)"] = _table(ker.dims())
    return out.as_dict()


def _m2_setup(lattice: dict, params: dict, sign: str):
    ctx = _ctx(lattice)
    levels = int(params["levels"])
    # each coset representative bounds the minimum of its coset from above
    probe = build_M2(ctx, sign, 0)
    probe = build_M2(ctx, sign, max(weight_of(ctx, c) for c in probe.cosets))
    module = build_M2(ctx, sign, probe.min_weight + levels)
    return ctx, module, module.test_states(levels)


def suite_tv1_com2(lattice: dict, params: dict, seed: int) -> dict:
    out = Outcome()
    k = int(params["modeRange"])
    rng = range(-k, k + 1)
    for sign in ("+", "-"):
        ctx, module, tests = _m2_setup(lattice, params, sign)
        G = ModeFamily(lambda n: second_screening_mode(ctx, n))
        Gb = ModeFamily(lambda n: partner_screening_mode(ctx, n))
        L = ModeFamily(lambda n: virasoro_mode(ctx, n))
        Q = screening_zero_mode(ctx, "long")
        m_ = mu(ctx.p)
        tag = f"M2{sign}"

        def grid(name, anchor, pairs):
            checked = 0
            for idx, a, b, e in pairs:
                r = bracket_check(a, b, e, tests)
                checked += r.checked
                if not r.passed:
                    out.add(name, anchor, False, {"statesChecked": checked}, dict(r.counterexample, **idx))
                    return
            out.add(name, anchor, True, {"statesChecked": checked})

        grid(f"[L(n), G(m)] = -m G(n+m) on {tag}", "pair-screening field is primary of weight one",
             (({"n": n, "m": m}, L(n), G(m), G(n + m) * (-m)) for n in rng for m in rng))
        grid(f"[Q, G(m)] = -m mu Gbar(m-1) on {tag}", "long screening maps G to its partner field",
             (({"m": m}, Q, G(m), Gb(m - 1) * (-m * m_)) for m in rng))
        grid(f"[Q, G(0)] = 0 on {tag}", "the zero mode G(0) commutes with the long screening",
             (({}, Q, G(0), None),))
        grid(f"[L(n), Gbar(m)] = -(n+m+1) Gbar(n+m) on {tag}", "partner field has weight zero",
             (({"n": n, "m": m}, L(n), Gb(m), Gb(n + m) * (-(n + m + 1))) for n in rng for m in rng))
        bad = None
        for m in rng:
            for op in (G(m), Gb(m)):
                r = shift_check(op, tests, ctx)
                if not r.passed:
                    bad = r.counterexample
        out.add(f"declared shifts of G, Gbar on {tag}", "mode weight and charge bookkeeping", bad is None, {}, bad)
        out.tables[f"{tag} graded dimension"] = _table((w, len(module.stratum(w))) for w in module.weights())
    return out.as_dict()


def suite_locality(lattice: dict, params: dict, seed: int) -> dict:
    out = Outcome()
    k = int(params["modeRange"])
    rng = range(-k, k + 1)
    for sign in ("+", "-"):
        ctx, module, tests = _m2_setup(lattice, params, sign)
        G = ModeFamily(lambda n: second_screening_mode(ctx, n))
        F = triplet_generators(ctx)["F"]
        Lf = ModeFamily(lambda n: virasoro_mode(ctx, n - 1))
        Ff = ModeFamily(lambda n: composite_mode(ctx, F, n))
        order = 2 * ctx.p - 1
        out.add_result(locality_order_check(Lf, G, 3, rng, rng, tests, f"(z1-z2)^3 [L(z1), G(z2)] = 0 on M2{sign}"),
                       "Virasoro field and pair-screening field are local of order three")
        out.add_result(locality_order_check(Ff, G, order, rng, rng, tests,
                                            f"(z1-z2)^{order} [F(z1), G(z2)] = 0 on M2{sign}"),
                       "triplet primary and pair-screening field are local of order 2p-1")
    # control: Heisenberg field is local of order two with itself
    ctx = _ctx(lattice)
    hf = ModeFamily(lambda n: composite_mode(ctx, heis_state(ctx, [(1, 0)]), n))
    out.add_result(locality_order_check(hf, hf, 2, rng, rng, _basis_states(ctx, 3), "(z1-z2)^2 [a(z1), a(z2)] = 0"),
                   "Heisenberg field is local of order two")
    return out.as_dict()


def suite_log_deform(lattice: dict, params: dict, seed: int) -> dict:
    out = Outcome()
    k = int(params["modeRange"])
    rng = range(-k, k + 1)
    for sign in ("+", "-"):
        ctx, module, tests = _m2_setup(lattice, params, sign)
        tag = f"M2{sign}"
        deformed = deformed_field_module(module)
        Lt = deformed.virasoro
        G = ModeFamily(lambda n: second_screening_mode(ctx, n))
        L0 = virasoro_mode(ctx, 0)
        top = module.min_weight + int(params["levels"])
        weights = [w for w in module.weights() if w <= top]
        low = weights[0]
        ranks = []
        for w in weights:
            mons = module.stratum(w)
            ranks.append((w, len(mons), nilpotent_rank(Lt(0), mons, w, w).rank, nilpotent_rank(L0, mons, w, w).rank))
        out.tables[f"{tag} deformed L(0) Jordan rank"] = [[fmt(w), r] for w, _, r, _ in ranks]
        if sign == "+":
            mons = module.stratum(low)
            # spectrum of L~(0) on the lowest stratum: (L~(0) - h)^dim vanishes
            rep = nilpotent_rank(Lt(0), mons, low, low)
            out.add(f"lowest L~(0) eigenvalue on {tag}", "deformed L(0) = L(0) + G(0)",
                    rep.rank > 0 and rep.kernel_dims[-1] == len(mons),
                    {"eigenvalue": fmt(low), "stratumDim": len(mons)})
            out.add(f"Jordan rank at lowest stratum of {tag}", "deformed L(0) has nilpotent rank two",
                    rep.rank == 2, {"rank": rep.rank, "kernelDims": rep.kernel_dims})
        out.add(f"undeformed L(0) semisimple on {tag}", "grading operator is diagonal",
                all(r0 == 1 for *_, r0 in ranks), {})
        bad = None
        g2 = G(0) @ G(0)
        for w in weights:
            for mon in module.stratum(w):
                img = g2(State({mon: 1}))
                if img:
                    bad = {"weight": fmt(w), "state": State({mon: 1}).format(), "residual": img.format()}
                    break
            if bad:
                break
        out.add(f"G(0)^2 = 0 on {tag}", "deformed L(0) has nilpotent rank two", bad is None,
                {"weights": [fmt(w) for w in weights]}, bad)
        out.add_result(_virasoro_closure(ctx, Lt, rng, tests, f"L~(m) closure on {tag}"),
                       "deformed Virasoro modes keep the central charge", centralCharge=fmt(ctx.c))
        dims_same = deformed.dims() == [(w, len(module.stratum(w))) for w in module.weights()]
        out.add(f"deformation preserves graded dimension on {tag}", "same underlying space", dims_same)
        om = conformal_vector(ctx)
        bad = None
        for n in rng:
            a = deformed_generator_mode(ctx, om, n + 1, G, 3)
            for t in tests:
                if a(t) != Lt(n)(t):
                    bad = {"n": n, "state": t.format()}
                    break
            if bad:
                break
        out.add(f"field-product route gives L(n) + G(n) on {tag}", "deformed field from n-products with G(z)",
                bad is None, {}, bad)
        if sign == "+":
            Q = screening_zero_mode(ctx, "long")
            indep = any(G(n)(t) for n in rng for t in tests) and any(commutator(Q, G(n))(t) for n in rng for t in tests)
            out.add(f"G and [Q, G] independent on {tag}", "top component of the G-generated space is two-dimensional",
                    indep, {"chargeShifts": [fmt(G(0).charge_shift[0]), fmt(G(0).charge_shift[0] + 1)]})
    # independent path: Delta-deformation by e^alpha on V_L
    ctx = _ctx(lattice)
    v = exp_state(ctx, (Scalar(1),))
    om = conformal_vector(ctx)
    basis = enumerate_basis(ctx, ctx.zero, params["deltaWeight"])
    tests = [State({m: 1}) for m in basis.all_monomials()]
    expansion = delta_apply(ctx, v, om)
    out.add("Delta(e^alpha, x) omega = omega + x^-1 e^alpha", "Delta operator on the conformal vector",
            expansion == {0: om, 1: v}, {"terms": {str(k): s.format() for k, s in expansion.items()}})
    dm = deformed_module(ctx, [basis], v)
    bad = None
    for n in rng:
        a = deformed_mode(ctx, v, om, n + 1)
        for t in tests:
            if a(t) != dm.virasoro(n)(t):
                bad = {"n": n, "state": t.format()}
                break
        if bad:
            break
    out.add("Delta route equals L(n) + v_n on V_L", "deformed conformal modes", bad is None, {}, bad)
    out.add_result(_virasoro_closure(ctx, dm.virasoro, rng, tests, "L(n) + e^alpha_n closure on V_L"),
                   "deformed Virasoro modes keep the central charge")
    return out.as_dict()


def suite_wpp2_generators(lattice: dict, params: dict, seed: int) -> dict:
    ctx = _ctx(lattice)
    out = Outcome()
    g = wpp_generators(ctx)
    f, h, e = g["F"], g["H"], g["E"]
    q = screening_zero_mode(ctx, "q")
    qt = screening_zero_mode(ctx, "qtilde")
    anchor = "generators F = Q e^{-3alpha/2}, H = GF, E = G^2 F"
    wf = f.weight(ctx)
    seed_weight = weight_of(ctx, (Scalar(-3, 2),))
    expected = params.get("expectedWeight")
    expected = seed_weight if expected is None else as_scalar(expected)
    out.add("weight of F", anchor, wf == expected and f.is_homogeneous(ctx),
            {"weight": fmt(wf), "expected": fmt(expected), "seedWeight": fmt(seed_weight)})
    out.add("charge of F", anchor, f.charges() == {(Scalar(-1),)}, {"charges": sorted(fmt(c[0]) for c in f.charges())})
    for op, nm in ((q, "Q"), (qt, "Qtilde")):
        img = op(f)
        out.add(f"{nm} F = 0", "F lies in the joint screening kernel", not img, {},
                {"residual": img.format()} if img else None)
    out.add("H = G F nonzero", anchor, bool(h), {"terms": len(h), "weight": fmt(h.weight(ctx)) if h else None})
    out.add("E = G^2 F constructed", anchor, bool(e), {"terms": len(e), "weight": fmt(e.weight(ctx)) if e else None})
    gop = charge_screening_G(ctx)
    out.add_result(shift_check(gop, [f, h], ctx), "G preserves weight and shifts charge by alpha")
    return out.as_dict()


def suite_character(lattice: dict, params: dict, seed: int) -> dict:
    ctx = _ctx(lattice)
    out = Outcome()
    n = int(as_scalar(params["maxWeight"]))
    fock = graded_dimension(ctx, ctx.zero, n, single_charge=True)
    got = [d for _, d in fock]
    oracle = partition_count_series(n, ctx.rank)
    out.add("M(1) graded dimension equals partition numbers", "Fock space character is 1/(q)_infinity",
            got == oracle, {"dims": got, "oracle": oracle})
    out.tables["M(1) graded dimension"] = _table(fock)
    coset = (as_scalar(params["coset"]),)
    out.tables["lattice coset graded dimension"] = _table(graded_dimension(ctx, coset, params["cosetMaxWeight"]))
    return out.as_dict()


@dataclass(frozen=True)
class Suite:
    name: str
    anchor: str
    run: Callable[[dict, dict, int], dict]
    defaults: Dict[str, object] = field(default_factory=dict)
    # "single": rank one with <alpha,alpha> = 2p; "pair2": (p, p') with p' = 2
    lattice_mode: str = "single"


CATALOG: List[Suite] = [
    Suite("virasoro", "Virasoro algebra of the shifted conformal vector", suite_virasoro,
          {"maxWeight": "6", "modeRange": 3, "oraclePairs": 100}),
    Suite("screening-commute", "screening operators commute with Virasoro and each other", suite_screening_commute,
          {"maxWeight": "6", "modeRange": 2}),
    Suite("triplet-kernel", "triplet generators in the short-screening kernel", suite_triplet_kernel,
          {"maxWeight": "6"}),
    Suite("strong-generation", "strong generation of the triplet algebra", suite_strong_generation,
          {"maxWeight": "6"}),
    Suite("c2-structure", "C2 quotient and Poisson relations of the triplet algebra", suite_c2_structure,
          {"maxWeight": "10", "window": 2, "poissonSamples": 12}),
    Suite("singlet-zhu", "Zhu algebra relation of the singlet algebra", suite_singlet_zhu,
          {"maxWeight": "10", "generatorBudget": "10", "window": 2, "maxBudget": "12",
           "oracleCharges": ["1/3", "1/5", "2/7", "-3/4"]}),
    Suite("tv1-com2", "pair-screening field commutators with L(n) and the long screening", suite_tv1_com2,
          {"levels": 4, "modeRange": 2}),
    Suite("locality", "locality orders of the pair-screening field", suite_locality,
          {"levels": 4, "modeRange": 2}),
    Suite("log-deform", "logarithmic deformation L(0) + G(0) and Delta-deformation", suite_log_deform,
          {"levels": 4, "modeRange": 2, "deltaWeight": "4"}),
    Suite("wpp2-generators", "generators of the (p, 2) extended algebra", suite_wpp2_generators,
          {"expectedWeight": None}, "pair2"),
    Suite("character", "graded dimensions against partition counts", suite_character,
          {"maxWeight": "6", "coset": "0", "cosetMaxWeight": "6"}),
]

SUITES: Dict[str, Suite] = {s.name: s for s in CATALOG}
