import json
import random

import pytest
from hypothesis import given, strategies as st

from ptrace.intp import IObj, Intp
from ptrace.kleene import Undefined, is_defined
from ptrace.paracat import Path, PathError, TotalCategory, concat, eps, path_tensor, path_tensor_flip, whisker_left, whisker_right
from ptrace.pathcomp import (
    CertificateError,
    CongruenceRule,
    QuotMor,
    RewriteCertificate,
    Step,
    StrictFunctor,
    certificate_from,
    certificate_json,
    check_certificate,
    decide_singleton,
    functor_f,
    induced_l,
    quot_compose,
    quot_identity,
    quot_symmetry,
    quot_tensor,
    quot_trace,
    search_equiv,
    soundness_spot_check,
    splice,
)
from ptrace.ratlin import Matrix
from ptrace.vectcat import DirectSum, FloatDirectSum

IP = Intp()
T = IP.tensor_obj
seeds = st.integers(0, 100_000)


def _arrow(rng, a, b, ip=IP):
    return ip.random_arrow(rng, a, b)


def _undefined_pair(rng):
    """Two composable arrows whose composite is undefined."""
    while True:
        a, b, c = (IP.random_object(rng) for _ in range(3))
        f, g = _arrow(rng, a, b), _arrow(rng, b, c)
        if not is_defined(IP.compose(IP.path(f, g))):
            return f, g


def _defined_pair(rng):
    while True:
        a, b, c = (IP.random_object(rng) for _ in range(3))
        f, g = _arrow(rng, a, b), _arrow(rng, b, c)
        v = IP.compose(IP.path(f, g))
        if is_defined(v):
            return f, g, v


def collapse_all(p: Path) -> RewriteCertificate:
    r = CongruenceRule("collapse", (0, len(p)))
    return RewriteCertificate(p, (Step(r, IP.single(IP.compose(p))),))


# --- certificates --------------------------------------------------------------

def test_single_collapse_is_valid():
    f, g, v = _defined_pair(random.Random(0))
    assert check_certificate(IP, collapse_all(IP.path(f, g)))


def test_collapse_on_undefined_path_is_invalid():
    f, g = _undefined_pair(random.Random(0))
    p = IP.path(f, g)
    bogus = IP.single(IP.make(p.dom, p.cod, Matrix.zeros(p.cod.plus + p.dom.minus, p.dom.plus + p.cod.minus)))
    c = RewriteCertificate(p, (Step(CongruenceRule("collapse", (0, 2)), bogus),))
    assert not check_certificate(IP, c)


def test_collapse_with_wrong_result_is_invalid():
    f, g, v = _defined_pair(random.Random(3))
    c = RewriteCertificate(IP.path(f, g), (Step(CongruenceRule("collapse", (0, 2)), IP.path(f, g)),))
    assert not check_certificate(IP, c)


def test_empty_collapse_inserts_identity():
    rng = random.Random(1)
    a, b = IObj(1, 1), IObj(2, 0)
    f = _arrow(rng, a, b)
    p = IP.path(f)
    q = splice(p, 1, 1, IP.single(IP.identity(b)))
    c = RewriteCertificate(p, (Step(CongruenceRule("collapse", (1, 1)), q),))
    assert check_certificate(IP, c) and check_certificate(IP, c.reversed())


def test_whiskering_a_valid_step_is_valid():
    f, g, v = _defined_pair(random.Random(2))
    inner = collapse_all(IP.path(f, g))
    x = IObj(1, 1)
    for rule, wrap in [("whisker-left", lambda p: whisker_left(IP, x, p)),
                       ("whisker-right", lambda p: whisker_right(IP, p, x))]:
        start = wrap(inner.start)
        c = RewriteCertificate(start, (Step(CongruenceRule(rule, (0, 2), obj=x, nested=inner), wrap(inner.end)),))
        assert check_certificate(IP, c)
        assert check_certificate(IP, c.reversed())
        assert soundness_spot_check(IP, c)


def test_whiskering_an_invalid_step_is_invalid():
    f, g = _undefined_pair(random.Random(2))
    p = IP.path(f, g)
    fake = RewriteCertificate(p, (Step(CongruenceRule("collapse", (0, 2)), p.span(0, 1)),))
    x = IObj(0, 1)
    c = RewriteCertificate(whisker_left(IP, x, p),
                           (Step(CongruenceRule("whisker-left", (0, 2), obj=x, nested=fake),
                                 whisker_left(IP, x, fake.end)),))
    assert not check_certificate(IP, c)


def test_concat_compat_inside_a_longer_path():
    rng = random.Random(4)
    f, g, v = _defined_pair(rng)
    h = _arrow(rng, IP.cod(g), IObj(1, 0))
    inner = collapse_all(IP.path(f, g))
    p = IP.path(f, g, h)
    c = RewriteCertificate(p, (Step(CongruenceRule("concat-compat", (0, 2), nested=inner), IP.path(v, h)),))
    assert check_certificate(IP, c)
    assert check_certificate(IP, c.reversed())


def test_paracat_law_step():
    rng = random.Random(6)
    f, g, v = _defined_pair(rng)
    p = IP.path(f, g)
    one = IP.identity(v.cod)
    law = CongruenceRule("paracat-law", (0, 2), new_len=2)
    good = RewriteCertificate(p, (Step(law, IP.path(v, one)),))
    assert check_certificate(IP, good) and check_certificate(IP, good.reversed())
    other = IP.make(v.dom, v.cod, v.under + Matrix.identity(v.under.rows).submatrix(0, v.under.rows, 0, v.under.cols))
    assert not check_certificate(IP, RewriteCertificate(p, (Step(law, IP.path(other, one)),)))


def test_malformed_rules_are_rejected():
    with pytest.raises(CertificateError):
        CongruenceRule("commute", (0, 1))
    with pytest.raises(CertificateError):
        CongruenceRule("collapse", (2, 1))
    with pytest.raises(CertificateError):
        certificate_from({"start": {"objects": [[1, 1]], "arrows": []}}, IP)


def test_certificates_compose():
    rng = random.Random(7)
    f, g, v = _defined_pair(rng)
    c = collapse_all(IP.path(f, g))
    loop = c.then(c.reversed())
    assert loop.end == c.start and check_certificate(IP, loop)
    with pytest.raises(CertificateError):
        c.then(c)


def test_certificate_json_round_trip():
    rng = random.Random(9)
    f, g, v = _defined_pair(rng)
    inner = collapse_all(IP.path(f, g))
    x = IObj(1, 0)
    c = RewriteCertificate(whisker_left(IP, x, inner.start),
                           (Step(CongruenceRule("whisker-left", (0, 2), obj=x, nested=inner),
                                 whisker_left(IP, x, inner.end)),))
    c = c.then(c.reversed())
    back = certificate_from(json.loads(json.dumps(certificate_json(c))), IP)
    assert back == c and check_certificate(IP, back)


# --- the singleton decision ----------------------------------------------------

def test_decide_singleton_examples():
    rng = random.Random(10)
    f, g, v = _defined_pair(rng)
    assert decide_singleton(IP, IP.path(f, g), v)
    assert decide_singleton(IP, IP.path(f, g), IP.single(v))
    h, k = _undefined_pair(rng)
    p = IP.path(h, k)
    zero = IP.make(p.dom, p.cod, Matrix.zeros(p.cod.plus + p.dom.minus, p.dom.plus + p.cod.minus))
    assert not decide_singleton(IP, p, zero)
    assert decide_singleton(IP, eps(IObj(2, 1)), IP.identity(IObj(2, 1)))
    with pytest.raises(ValueError):
        decide_singleton(IP, p, IP.path(h, k))


@given(seeds)
def test_faithfulness_of_f(seed):
    rng = random.Random(seed)
    a, b = IP.random_object(rng), IP.random_object(rng)
    x, y = _arrow(rng, a, b), _arrow(rng, a, b)
    assert decide_singleton(IP, IP.single(x), y) == (x == y)
    assert decide_singleton(IP, IP.single(x), x)


@given(seeds)
def test_functor_f_preserves_composition(seed):
    rng = random.Random(seed)
    f, g, v = _defined_pair(rng)
    composite = quot_compose(functor_f(IP, f), functor_f(IP, g))
    assert decide_singleton(IP, composite.rep, v)


def test_decision_agrees_with_search():
    rng = random.Random(11)
    hits = 0
    for _ in range(60):
        objs = [IP.random_object(rng) for _ in range(4)]
        p = IP.path(*(_arrow(rng, a, b) for a, b in zip(objs, objs[1:])))
        v = IP.compose(p)
        if not is_defined(v):
            continue
        c = search_equiv(IP, p, IP.single(v), depth=4)
        assert is_defined(c) and check_certificate(IP, c)
        assert decide_singleton(IP, p, v)
        hits += 1
    assert hits > 10


# --- search --------------------------------------------------------------------

def test_search_finds_collapse_in_one_step():
    f, g, v = _defined_pair(random.Random(12))
    c = search_equiv(IP, IP.path(f, g), IP.single(v), depth=1)
    assert is_defined(c) and len(c) == 1 and check_certificate(IP, c)


def test_search_trivial_and_mismatched():
    p = eps(IObj(1, 1))
    assert len(search_equiv(IP, p, p)) == 0
    assert search_equiv(IP, p, eps(IObj(1, 0))) == Undefined("endpoint-mismatch")
    with pytest.raises(ValueError):
        search_equiv(IP, p, p, depth=0)


@given(seeds)
def test_path_tensor_flip(seed):
    rng = random.Random(seed)
    a, b, c, d = (IP.random_object(rng) for _ in range(4))
    f, g = _arrow(rng, a, b), _arrow(rng, c, d)
    p, q = path_tensor(IP, IP.single(f), IP.single(g)), path_tensor_flip(IP, IP.single(f), IP.single(g))
    cert = search_equiv(IP, p, q, depth=8)
    assert is_defined(cert) and len(cert) <= 8
    assert check_certificate(IP, cert) and soundness_spot_check(IP, cert)


def test_unrelated_generators_not_found():
    rng = random.Random(13)
    found = 0
    for _ in range(20):
        a, b = IObj(1, 1), IObj(1, 1)
        x, y = _arrow(rng, a, b), _arrow(rng, a, b)
        if x == y:
            continue
        for depth in (1, 4, 8):
            r = search_equiv(IP, IP.single(x), IP.single(y), depth=depth)
            assert r == Undefined("not-found")
        found += 1
    assert found


def test_search_respects_budget():
    rng = random.Random(14)
    objs = [IObj(1, 0)] * 7
    p = IP.path(*(_arrow(rng, a, b) for a, b in zip(objs, objs[1:])))
    q = IP.path(*(_arrow(rng, a, b) for a, b in zip(objs, objs[1:])))
    assert search_equiv(IP, p, q, depth=8, max_nodes=5) == Undefined("search-budget")
    # with minus parts zero every span composes, so a roomy search meets in the middle
    c = search_equiv(IP, p, IP.single(IP.compose(p)), depth=8)
    assert is_defined(c) and check_certificate(IP, c)


# --- the quotient ---------------------------------------------------------------

def test_quotient_identity_and_symmetry():
    a, b = IObj(1, 2), IObj(2, 0)
    assert quot_identity(a).rep == eps(a)
    assert quot_symmetry(IP, a, b) == functor_f(IP, IP.symmetry(a, b))
    swap_twice = quot_compose(quot_symmetry(IP, a, b), quot_symmetry(IP, b, a))
    assert decide_singleton(IP, swap_twice.rep, IP.identity(T(a, b)))


@given(seeds)
def test_f_is_strictly_monoidal(seed):
    rng = random.Random(seed)
    a, b, c, d = (IP.random_object(rng) for _ in range(4))
    f, g = _arrow(rng, a, b), _arrow(rng, c, d)
    lhs = functor_f(IP, IP.tensor(f, g))
    rhs = quot_tensor(IP, functor_f(IP, f), functor_f(IP, g))
    cert = search_equiv(IP, lhs.rep, rhs.rep, depth=8)
    assert is_defined(cert) and check_certificate(IP, cert)


def test_quot_trace_shape_check():
    f = functor_f(IP, IP.identity(IObj(1, 1)))
    with pytest.raises(PathError):
        quot_trace(IP, f, IObj(1, 0), IObj(1, 0), IObj(0, 0))


def _yank_rep(u):
    return quot_trace(IP, quot_symmetry(IP, u, u), u, u, u).rep


@pytest.mark.parametrize("u", [IObj(1, 0), IObj(0, 1), IObj(1, 1), IObj(2, 1)])
def test_yanking_representative_reduces_to_identity(u):
    cert = search_equiv(IP, _yank_rep(u), eps(u), depth=8)
    assert is_defined(cert) and len(cert) <= 8
    assert check_certificate(IP, cert) and soundness_spot_check(IP, cert)


def _embedded(rng, a, u, b):
    from ptrace.axioms import _structured_endo
    from ptrace.intp import embed_n

    f = _structured_endo(rng, IP.base, a, u, b)
    return f, embed_n(f)


def test_quot_trace_preserves_and_reflects():
    from ptrace.intp import embed_n
    from ptrace.vectcat import tr_ki

    rng = random.Random(15)
    seen = set()
    for _ in range(80):
        a, u, b = (rng.randint(0, 2) for _ in range(3))
        f, nf = _embedded(rng, a, u, b)
        rep = quot_trace(IP, functor_f(IP, nf), embed_n(u), embed_n(a), embed_n(b)).rep
        want = tr_ki(f, a, u, b)
        seen.add(is_defined(want))
        if is_defined(want):
            assert decide_singleton(IP, rep, embed_n(want))
        else:
            pool = [embed_n(IP.base.random_morphism(rng, a, b)) for _ in range(5)]
            pool.append(embed_n(Matrix.zeros(b, a)))
            assert not any(decide_singleton(IP, rep, x) for x in pool)
    assert seen == {True, False}


class TraceAxioms:
    """Both sides of each total-trace axiom as quotient arrows on Intp."""

    def __init__(self, rng):
        self.rng = rng

    def arr(self, a, b):
        return functor_f(IP, _arrow(self.rng, a, b))

    def tr(self, f, u, a, b):
        return quot_trace(IP, f, u, a, b)

    def cases(self):
        o = lambda: IP.random_object(self.rng)
        a, b, c, d, u, v = (o() for _ in range(6))
        f = self.arr(T(a, u), T(b, u))
        wr = lambda m, x: QuotMor(whisker_right(IP, m.rep, x))
        wl = lambda x, m: QuotMor(whisker_left(IP, x, m.rep))

        def cat(*ms):
            out = ms[0]
            for m in ms[1:]:
                out = quot_compose(out, m)
            return out

        g, h = self.arr(b, c), self.arr(d, a)
        yield "naturality", self.tr(cat(wr(h, u), f, wr(g, u)), u, d, c), cat(h, self.tr(f, u, a, b), g)
        f2, g2 = self.arr(T(a, u), T(b, v)), self.arr(v, u)
        yield "dinaturality", self.tr(cat(f2, wl(b, g2)), u, a, b), self.tr(cat(wl(a, g2), f2), v, a, b)
        yield "vanishing_i", self.tr(f, IP.unit, T(a, u), T(b, u)), f
        f3 = self.arr(T(T(a, u), v), T(T(b, u), v))
        yield "vanishing_ii", self.tr(f3, T(u, v), a, b), self.tr(self.tr(f3, v, T(a, u), T(b, u)), u, a, b)
        g4 = self.arr(c, d)
        yield "superposing", self.tr(quot_tensor(IP, g4, f), u, T(c, a), T(d, b)), quot_tensor(IP, g4, self.tr(f, u, a, b))
        yield "yanking", self.tr(quot_symmetry(IP, u, u), u, u, u), quot_identity(u)


def test_quotient_trace_axioms():
    gen = TraceAxioms(random.Random(16))
    reached = total = 0
    for _ in range(25):
        for name, lhs, rhs in gen.cases():
            total += 1
            left, right = IP.compose(lhs.rep), IP.compose(rhs.rep)
            if is_defined(left) and is_defined(right):
                assert IP.equal(left, right), name
            cert = search_equiv(IP, lhs.rep, rhs.rep, depth=8)
            if is_defined(cert):
                assert check_certificate(IP, cert) and soundness_spot_check(IP, cert), name
                reached += 1
    assert reached >= 0.9 * total


# --- the induced functor --------------------------------------------------------

SRC = TotalCategory(DirectSum("ki"), max_dim=3)
TO_FLOAT = StrictFunctor(lambda a: a, lambda m: FloatDirectSum().lift(m), FloatDirectSum())
IDENT = StrictFunctor(lambda a: a, lambda m: m, DirectSum("ki"))


@pytest.mark.parametrize("g", [IDENT, TO_FLOAT], ids=["identity", "to-float"])
def test_l_after_f_is_g(g):
    rng = random.Random(17)
    for _ in range(30):
        a, b = SRC.random_object(rng), SRC.random_object(rng)
        x = SRC.random_arrow(rng, a, b)
        assert g.target.equal(induced_l(g, functor_f(SRC, x)), g.on_arrows(x))
    for a in range(4):
        assert g.target.equal(induced_l(g, quot_identity(a)), g.target.identity(a))


@pytest.mark.parametrize("g", [IDENT, TO_FLOAT], ids=["identity", "to-float"])
def test_l_is_well_defined_on_certified_representatives(g):
    rng = random.Random(18)
    checked = 0
    for _ in range(30):
        objs = [SRC.random_object(rng) for _ in range(4)]
        p = SRC.path(*(SRC.random_arrow(rng, a, b) for a, b in zip(objs, objs[1:])))
        f, h = SRC.random_arrow(rng, objs[0], objs[0]), SRC.random_arrow(rng, objs[-1], objs[-1])
        q = concat(concat(SRC.single(f), p), SRC.single(h))
        r = SRC.single(SRC.compose(q))
        cert = search_equiv(SRC, q, r, depth=8)
        assert is_defined(cert) and check_certificate(SRC, cert)
        assert g.target.equal(induced_l(g, QuotMor(cert.start)), induced_l(g, QuotMor(cert.end)))
        for step in cert.steps:
            assert g.target.equal(induced_l(g, QuotMor(step.result)), induced_l(g, QuotMor(cert.start)))
        checked += 1
    assert checked == 30


def test_l_preserves_tensor():
    rng = random.Random(19)
    for _ in range(20):
        a, b, c, d = (SRC.random_object(rng) for _ in range(4))
        x, y = functor_f(SRC, SRC.random_arrow(rng, a, b)), functor_f(SRC, SRC.random_arrow(rng, c, d))
        lhs = induced_l(IDENT, quot_tensor(SRC, x, y))
        assert lhs == DirectSum("ki").tensor(induced_l(IDENT, x), induced_l(IDENT, y))
