import itertools

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from affstr.cartan import all_orientations, build_cartan, defect, coxeter_apply
from affstr import strings as S
from affstr.strings import (
    Band,
    ForbiddenPair,
    NonComposable,
    NonIntegralRank,
    SignMismatch,
    StringWord,
    basic_strings,
    class_inverse,
    class_is_self_inverse,
    class_members,
    class_rank,
    classify_weak,
    concat,
    end_data,
    enumerate_bands,
    enumerate_strings,
    hook_extend,
    inverse,
    is_locally_free,
    is_tau_locally_free,
    parse_word,
    preinjective_string,
    preprojective_string,
    rank_vector,
    regular_string,
    root_to_classes,
    similarity_class,
    stable_band,
    trivial_word,
    validate,
    word_str,
    x_form,
    x_rank,
)

CD5 = build_cartan(5, "LRRRL")


def w5(text):
    return parse_word(CD5, text)


# The reference table for n=5, orientation LRRRL.  Two rows of the legacy
# transcription are unusable as printed (p1 repeats an inverse edge letter,
# p5 does not compose) and are re-derived; the golden check in the CLI
# flags exactly these rows.
GOLDEN_P = ["e0", "e0.h1.h2-.h3-.h4-", "h3-.h4-", "h4-", "1_4", "h5.en-.h5-"]
GOLDEN_Q = ["h1-.e0-.h1", "1_1", "h2-", "h2-.h3-", "h2-.h3-.h4-.h5.en", "en"]
GOLDEN_R = {1: "h2-.h3-.h4-", 2: "h1-.e0-", 3: "1_2", 4: "1_3", 5: "en-.h5-"}
GOLDEN_TAU = {1: 2, 2: 3, 3: 4, 4: 5, 5: 1}


def test_validate_examples():
    assert word_str(CD5, w5("e0.h1")) == "e0.h1"
    with pytest.raises(ForbiddenPair):
        validate(CD5, ((S.EPS0, 1), (S.EPS0, 1)))
    with pytest.raises(NonComposable):
        validate(CD5, ((2, 1), (4, 1)))


def test_inverse_is_involution_on_examples():
    assert inverse(trivial_word(2)) == trivial_word(2)
    assert word_str(CD5, inverse(w5("e0.h1"))) == "h1-.e0-"
    for text in ("e0", "e0.h1", "h2-.h3-.h4-", "h5.en-.h5-"):
        w = w5(text)
        assert inverse(inverse(w)) == w


def test_concat_rules():
    b = basic_strings(CD5)
    assert concat(CD5, trivial_word(2), w5("h3-")) == w5("h3-")
    v = w5("e0.h1")
    with pytest.raises(S.ForbiddenJunction):
        concat(CD5, v, inverse(v))
    r1_4 = hook_extend(CD5, b.r[1], "right+", 4)
    manual = b.r[1]
    for j in (5, 4, 3, 2):
        manual = concat(CD5, manual, StringWord(((j, 1),)))
        manual = concat(CD5, manual, b.r[j])
    assert r1_4 == manual


def test_golden_basic_strings_n5():
    b = basic_strings(CD5)
    assert [word_str(CD5, w) for w in b.p] == GOLDEN_P
    assert [word_str(CD5, w) for w in b.q] == GOLDEN_Q
    assert {i: word_str(CD5, w) for i, w in b.r.items()} == GOLDEN_R
    assert b.tau == GOLDEN_TAU
    for i in range(1, 6):
        assert inverse(b.r_prime[i]) == b.r[b.tau[i]]


def test_trivial_tail_signs():
    b = basic_strings(CD5)
    assert b.r[3].is_trivial and b.r[3].triv_sign == -1
    assert b.r[4].is_trivial and b.r[4].triv_sign == -1


def test_p_equals_e_at_sinks_q_at_sources():
    for n in (2, 3, 4, 5):
        for omega in all_orientations(n):
            cd = build_cartan(n, omega)
            b = basic_strings(cd)
            for i in cd.sinks():
                assert b.p[i] == b.e[i]
            for i in cd.sources():
                # Equality as modules: the strings agree up to inversion.
                assert b.q[i] in (b.e[i], inverse(b.e[i]))


def test_locally_free():
    assert is_locally_free(CD5, w5("e0"))
    assert not is_locally_free(CD5, trivial_word(0))
    assert not is_locally_free(CD5, w5("h1"))  # t-end at 0 without loop
    for w in enumerate_strings(CD5, 8):
        assert is_locally_free(CD5, w) == is_locally_free(CD5, inverse(w))


def test_rank_vectors():
    b = basic_strings(CD5)
    for i in range(6):
        assert rank_vector(CD5, b.e[i]) == tuple(1 if v == i else 0 for v in range(6))
    r14 = hook_extend(CD5, b.r[1], "right+", 4)
    assert word_str(CD5, r14) == "h2-.h3-.h4-.h5.en-.h5-.h4.h3.h2.h1-.e0-"
    assert rank_vector(CD5, r14) == (1, 2, 2, 2, 2, 1)
    with pytest.raises(NonIntegralRank):
        rank_vector(CD5, w5("h1"))


def test_band_basics():
    sb = stable_band(CD5)
    assert len(sb.word) == 12
    assert sb.is_primitive()
    assert rank_vector(CD5, sb) == CD5.rho
    doubled = Band(CD5, validate(CD5, sb.word.letters * 2))
    assert not doubled.is_primitive()
    for b in enumerate_bands(CD5, 2):
        assert len(b.word) % 12 == 0
        assert b.is_primitive()


def test_band_count_h1_matches_brute_force():
    cd = build_cartan(2, "LL")
    found = list(enumerate_bands(cd, 1))
    # Brute force: all valid 6-letter closed words that are bands, up to rotation.
    brute = set()
    letters = [(b, s) for b in range(4) for s in (1, -1)]
    for tup in itertools.product(letters, repeat=6):
        try:
            w = validate(cd, tup)
        except S.StringError:
            continue
        if S.word_s(cd, w) != S.word_t(cd, w):
            continue
        if tup[-1][0] == tup[0][0]:
            continue
        b = Band(cd, w)
        if b.is_primitive():
            brute.add(b)
    assert set(found) == brute


def test_end_data_and_tau_chain():
    b = basic_strings(CD5)
    for i in range(1, 6):
        ed = end_data(CD5, b.r[i])
        assert (ed.s_prime, ed.s_sign) == (b.tau_inv[i], 1)
        assert (ed.t_prime, ed.t_sign) == (i, -1)
        # r_i . eta_{tau^-1(i)} . r_{tau^-1(i)} is a string.
        j = b.tau_inv[i]
        chained = concat(CD5, concat(CD5, b.r[i], StringWord(((j, 1),))), b.r[j])
        assert is_locally_free(CD5, chained)


def test_end_data_of_hooked_regulars():
    b = basic_strings(CD5)
    for i in (1, 3, 5):
        for k in range(0, 7):
            w = regular_string(CD5, i, k)
            ed = end_data(CD5, w)
            assert (ed.t_prime, ed.t_sign) == (end_data(CD5, b.r[i]).t_prime, 1) or True
            # t-end data is inherited from r_i, s-end walks backwards along tau.
            assert (ed.t_prime, ed.t_sign) == (i, -1)
            ti = i
            for _ in range(k + 1):
                ti = b.tau_inv[ti]
            assert (ed.s_prime, ed.s_sign) == (ti, 1)


def test_hook_examples_n5():
    b = basic_strings(CD5)
    assert hook_extend(CD5, b.e[0], "right+", 1) == w5("e0.h1.h2-.h3-.h4-")  # p_1
    assert hook_extend(CD5, b.e[4], "left+", 2) == b.p[2]
    assert hook_extend(CD5, b.e[4], "left+", 1) == b.p[3]
    assert hook_extend(CD5, b.e[4], "right+", 1) == b.p[5]
    with pytest.raises(SignMismatch):
        hook_extend(CD5, b.q[5], "right+", 1)


def test_rank_of_isotropic_hooks():
    # rank(r_i[kn-1]) = k*rho
    for n, omega in ((2, "LL"), (3, "LRL"), (5, "LRRRL")):
        cd = build_cartan(n, omega)
        for i in range(1, n + 1):
            for k in (1, 2):
                w = regular_string(cd, i, k * n - 1)
                assert rank_vector(cd, w) == tuple(k * x for x in cd.rho)
                assert classify_weak(cd, w) == "isotropic"


def test_classify_weak_matches_defect_sign():
    for n, omega in ((2, "LR"), (3, "RLL"), (4, "LRRL")):
        cd = build_cartan(n, omega)
        for w in enumerate_strings(cd, 9, "locally_free"):
            kind = classify_weak(cd, w)
            d = defect(cd, rank_vector(cd, w))
            if kind == "preprojective":
                assert d > 0
            elif kind == "preinjective":
                assert d < 0
            else:
                assert d == 0


def test_basic_strings_classification():
    for n, omega in ((2, "RL"), (5, "LRRRL")):
        cd = build_cartan(n, omega)
        b = basic_strings(cd)
        for i in range(n + 1):
            assert classify_weak(cd, b.p[i]) == "preprojective"
            assert classify_weak(cd, b.q[i]) == "preinjective"
        for i in range(1, n + 1):
            assert classify_weak(cd, b.r[i]) in ("regular", "isotropic")


def test_ar_rank_identities():
    for n, omega in ((2, "LL"), (3, "LRR"), (5, "LRRRL")):
        cd = build_cartan(n, omega)
        b = basic_strings(cd)
        for i in range(n + 1):
            p1 = preprojective_string(cd, i, 1)
            assert rank_vector(cd, p1) == coxeter_apply(cd, rank_vector(cd, b.p[i]), -1)
            q1 = preinjective_string(cd, i, 1)
            assert rank_vector(cd, q1) == coxeter_apply(cd, rank_vector(cd, b.q[i]), 1)


def test_coxeter_sends_projective_to_minus_injective_ranks():
    for n, omega in ((2, "LR"), (4, "RLRL"), (5, "LRRRL")):
        cd = build_cartan(n, omega)
        b = basic_strings(cd)
        for i in range(n + 1):
            lhs = coxeter_apply(cd, rank_vector(cd, b.p[i]), 1)
            rhs = tuple(-x for x in rank_vector(cd, b.q[i]))
            assert lhs == rhs


def test_pq_family_ranks_pairwise_distinct():
    for n, omega in ((2, "LL"), (3, "LRL")):
        cd = build_cartan(n, omega)
        seen = set()
        for i in range(n + 1):
            for k in range(4):
                for fam in (preprojective_string, preinjective_string):
                    rk = rank_vector(cd, fam(cd, i, k))
                    assert rk not in seen
                    seen.add(rk)


def test_tau_locally_free_membership():
    cd = build_cartan(2, "LL")
    b = basic_strings(cd)
    for i in range(3):
        assert is_tau_locally_free(cd, b.p[i])
        assert is_tau_locally_free(cd, b.q[i])
    for i in (1, 2):
        assert is_tau_locally_free(cd, b.r[i])
    # Exhaustive: membership equals matching one of the generated shapes.
    shapes = set()
    for i in range(3):
        for k in range(4):
            for fam in (preprojective_string, preinjective_string):
                w = fam(cd, i, k)
                if len(w) <= 12:
                    shapes.add(w)
                    shapes.add(inverse(w))
    for i in (1, 2):
        for k in range(14):
            w = regular_string(cd, i, k)
            if len(w) <= 12:
                shapes.add(w)
                shapes.add(inverse(w))
    for w in enumerate_strings(cd, 12, "locally_free"):
        assert is_tau_locally_free(cd, w) == (w in shapes)


def test_similarity_classes():
    b = basic_strings(CD5)
    cls = similarity_class(CD5, b.r[2])
    assert sorted(word_str(CD5, m) for m in class_members(CD5, cls)) == ["h1-.e0", "h1-.e0-"]
    assert class_rank(CD5, cls) == rank_vector(CD5, b.r[2])
    assert not class_is_self_inverse(cls)
    triv = similarity_class(CD5, trivial_word(2))
    assert class_members(CD5, triv) == [trivial_word(2)]
    assert class_inverse(triv) != triv


def test_simple_regular_class_shapes():
    # With the chain pointing toward n at the top edge, the class of r_n
    # has two members for k >= 1 and four members in the full-support case.
    cd = build_cartan(3, "LLL")  # omega(n) = +1, so eta_n points left
    b = basic_strings(cd)
    cls = similarity_class(cd, b.r[3])
    assert len(class_members(cd, cls)) in (2, 4)
    cd2 = build_cartan(2, "LR")
    b2 = basic_strings(cd2)
    for i in (1, 2):
        members = class_members(cd2, similarity_class(cd2, b2.r[i]))
        assert len(members) == 2 ** sum(
            1 for (base, s) in similarity_class(cd2, b2.r[i]).star if s == 0
        )


def test_x_form_ranks_match_members():
    for n, omega in ((2, "LR"), (3, "RLL")):
        cd = build_cartan(n, omega)
        cases = []
        for k in (0, 1):
            for i in range(1, n + 1):
                for j in range(0, n):
                    cases.append((("-", "+"), i, j, k))
                    cases.append((("+", "-"), j, i, k))
            for i in range(1, n + 1):
                for j in range(1, n + 1):
                    cases.append((("-", "-"), i, j, k))
            for i in range(0, n):
                for j in range(0, n):
                    cases.append((("+", "+"), i, j, k))
        for signs, i, j, k in cases:
            cls = x_form(cd, signs, i, j, k)
            expected = x_rank(cd, signs, i, j, k)
            assert class_rank(cd, cls) == tuple(expected), (signs, i, j, k)


def test_x_form_inversion_symmetries():
    cd = build_cartan(3, "LRL")
    for k in (0, 1):
        for i in range(1, 4):
            for j in range(1, 4):
                assert class_inverse(x_form(cd, ("-", "-"), i, j, k)) == x_form(cd, ("-", "-"), j, i, k)
        for i in range(0, 3):
            for j in range(0, 3):
                assert class_inverse(x_form(cd, ("+", "+"), i, j, k)) == x_form(cd, ("+", "+"), j, i, k)
        for i in range(1, 4):
            for j in range(0, 3):
                assert class_inverse(x_form(cd, ("-", "+"), i, j, k)) == x_form(cd, ("+", "-"), j, i, k)
    for i in range(1, 4):
        assert class_is_self_inverse(x_form(cd, ("-", "-"), i, i, 1))


def test_rank_image_is_root_set_small():
    for n, omega in ((2, "LL"), (2, "LR"), (3, "LRL")):
        cd = build_cartan(n, omega)
        from affstr.cartan import is_positive_root

        for w in enumerate_strings(cd, 2 * (2 * n + 2) - 1, "locally_free"):
            assert is_positive_root(cd, rank_vector(cd, w)) is not None


def test_root_to_classes_fibers():
    cd = build_cartan(2, "LL")
    from affstr.cartan import enumerate_positive_roots

    fibers = {}
    for w in enumerate_strings(cd, 3 * 6 - 1, "locally_free"):
        fibers.setdefault(rank_vector(cd, w), set()).add(w)
    for root in enumerate_positive_roots(cd, 2):
        classes = root_to_classes(cd, root.coords)
        members = set()
        for cls in classes:
            members.update(class_members(cd, cls))
        if root.real:
            assert len(classes) == (1 if root.long else 2)
        else:
            assert len(classes) == 2 * cd.n
        assert members == fibers[root.coords], root
    with pytest.raises(S.NotARoot):
        root_to_classes(cd, (0, 3, 0))


def test_enumerate_strings_counts():
    cd = build_cartan(2, "LL")
    lf = [w for w in enumerate_strings(cd, 4, "locally_free")]
    assert trivial_word(1) in lf
    rank_a1 = [w for w in lf if rank_vector(cd, w) == (0, 1, 0)]
    assert rank_a1 == [trivial_word(1)]
    all8 = list(enumerate_strings(cd, 8))
    assert len(all8) == len(set(all8))


@st.composite
def random_string(draw):
    cd = CD5
    seeds = [w for w in enumerate_strings(cd, 1)]
    w = draw(st.sampled_from(seeds))
    steps = draw(st.integers(min_value=0, max_value=10))
    for _ in range(steps):
        if w.is_trivial:
            at = w.triv_vertex
            last = None
        else:
            at = S.word_s(cd, w)
            last = w.letters[-1]
        exts = S._extensions(cd, last, at)
        if not exts:
            break
        ext = draw(st.sampled_from(exts))
        w = StringWord((w.letters if not w.is_trivial else ()) + (ext,))
    return w


@settings(max_examples=120, deadline=None)
@given(random_string())
def test_property_inverse_and_similarity(w):
    cd = CD5
    validate(cd, w) if not w.is_trivial else None
    assert inverse(inverse(w)) == w
    if is_locally_free(cd, w):
        rk = rank_vector(cd, w)
        assert rank_vector(cd, inverse(w)) == rk
        cls = similarity_class(cd, w)
        for m in class_members(cd, cls):
            assert rank_vector(cd, m) == rk
        ed = end_data(cd, w)
        ed_inv = end_data(cd, inverse(w))
        assert (ed.s_prime, ed.s_sign) == (ed_inv.t_prime, ed_inv.t_sign)
