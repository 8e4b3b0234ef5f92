"""Convolution algebra of constructible functions on locally free modules.

Functions are finitely supported rational combinations of isomorphism
class symbols, graded by rank vector.  Products of characteristic
functions are evaluated on targets by exact Euler-characteristic counts:

* on string modules, by counting pairs of winding morphisms whose images
  cut the thin host into a successor-closed subset and its complement;
* on band modules with Jordan size 1, the same count on the cyclic host;
* on band modules with Jordan size >= 2, through the graph-map (admissible
  triple) description of Hom spaces into band modules: with a unique
  triple the Hom space is one Jordan column, the submodule family is a
  single orbit of the unipotent automorphisms of the band module, hence an
  affine space with Euler characteristic 1 and constant quotient type;
* on direct sums, by the splitting rule for functions supported on
  indecomposables.

Every structural claim the fast paths rely on is re-checked at run time by
exact linear algebra; configurations outside the certified shapes raise
UnsupportedBandEvaluation instead of guessing.
"""

import itertools
from fractions import Fraction

from .cartan import defect, is_positive_root, vec_add, vec_sub, vec_scale
from . import strings as ST
from .strings import (
    Band,
    StringError,
    StringWord,
    basic_strings,
    class_inverse,
    class_is_self_inverse,
    class_members,
    end_data,
    enumerate_bands,
    enumerate_strings,
    hook_extend,
    inverse,
    is_locally_free,
    preinjective_string,
    preprojective_string,
    rank_vector,
    regular_string,
    root_to_classes,
    similarity_class,
    trivial_word,
    word_str,
)
from . import windings as WD
from .windings import Band as _unused_band_alias  # noqa: F401  (re-export guard)
from .windings import band_host_rep, morphisms, winding_of_band, winding_of_string
from . import linalg

DEFAULT_T_SAMPLES = (Fraction(2), Fraction(3), Fraction(5), Fraction(7), Fraction(-1))


class NotLocallyFree(StringError):
    pass


class IncompleteUniverse(StringError):
    pass


class UnsupportedBandEvaluation(StringError):
    pass


class NonConstantOnFamily(AssertionError):
    pass


class NotSimpleRegular(StringError):
    pass


class NotRealRoot(StringError):
    pass


class OutOfBounds(StringError):
    pass


# ---------------------------------------------------------------------------
# symbols


ZERO_SYMBOL = ("zero",)


def string_symbol(cd, w):
    """Iso-class symbol of a string module: the smaller of w, w^{-1}."""
    return ("str", min(w, inverse(w)))


def band_symbol(cd, b, m):
    """Iso-class family symbol of band modules: rotation- and inversion-
    canonical word plus the Jordan size; the parameter is a family
    coordinate, never pinned inside a symbol."""
    letters = b.canonical_letters()
    inv_letters = Band(cd, inverse(StringWord(letters))).canonical_letters()
    return ("band", min(letters, inv_letters), m)


def sum_symbol(parts):
    parts = tuple(sorted(parts, key=symbol_key))
    if len(parts) < 2:
        raise StringError("sum symbols need at least two parts")
    return ("sum", parts)


def symbol_key(sym):
    kind = sym[0]
    if kind == "zero":
        return (0,)
    if kind == "str":
        return (1, len(sym[1]), sym[1].key())
    if kind == "band":
        return (2, sym[2], sym[1])
    return (3, tuple(symbol_key(p) for p in sym[1]))


def symbol_str(cd, sym):
    kind = sym[0]
    if kind == "zero":
        return "0-module"
    if kind == "str":
        return word_str(cd, sym[1])
    if kind == "band":
        letters = ".".join(ST.letter_str(cd, x) for x in sym[1])
        return f"band:{letters}#m={sym[2]}"
    return "sum(" + " ; ".join(symbol_str(cd, p) for p in sym[1]) + ")"


def symbol_rank(cd, sym):
    kind = sym[0]
    if kind == "zero":
        return tuple(0 for _ in range(cd.n + 1))
    if kind == "str":
        return rank_vector(cd, sym[1])
    if kind == "band":
        b = Band(cd, StringWord(sym[1]))
        return tuple(sym[2] * x for x in rank_vector(cd, b))
    total = tuple(0 for _ in range(cd.n + 1))
    for p in sym[1]:
        total = vec_add(total, symbol_rank(cd, p))
    return total


def symbol_is_indecomposable(sym):
    return sym[0] in ("str", "band")


# ---------------------------------------------------------------------------
# constructible functions


class ConstructibleFunction:
    """Finite rational combination of iso-class symbols of one grade."""

    __slots__ = ("cd", "grade", "terms")

    def __init__(self, cd, grade, terms):
        self.cd = cd
        self.grade = tuple(grade)
        self.terms = {s: Fraction(c) for s, c in terms.items() if c != 0}

    def __eq__(self, other):
        return (
            isinstance(other, ConstructibleFunction)
            and self.grade == other.grade
            and self.terms == other.terms
        )

    def __hash__(self):
        return hash(
            (self.grade, tuple(sorted((symbol_key(s), c) for s, c in self.terms.items())))
        )

    def is_zero(self):
        return not self.terms

    def __add__(self, other):
        assert self.grade == other.grade, "cannot add functions of different grades"
        terms = dict(self.terms)
        for s, c in other.terms.items():
            terms[s] = terms.get(s, Fraction(0)) + c
        return ConstructibleFunction(self.cd, self.grade, terms)

    def __sub__(self, other):
        return self + other.scale(-1)

    def scale(self, c):
        return ConstructibleFunction(
            self.cd, self.grade, {s: Fraction(c) * v for s, v in self.terms.items()}
        )

    def coefficient(self, sym):
        return self.terms.get(sym, Fraction(0))

    def support(self):
        return sorted(self.terms, key=symbol_key)

    def to_json_dict(self):
        return {
            "grade": list(self.grade),
            "terms": [
                {"symbol": symbol_str(self.cd, s), "coeff": str(self.terms[s])}
                for s in self.support()
            ],
        }

    def __repr__(self):
        if not self.terms:
            return f"CF(0 | grade={self.grade})"
        parts = [f"{self.terms[s]}*[{symbol_str(self.cd, s)}]" for s in self.support()]
        return "CF(" + " + ".join(parts) + f" | grade={self.grade})"


def zero_function(cd, grade):
    return ConstructibleFunction(cd, grade, {})


def unit_function(cd):
    zero = tuple(0 for _ in range(cd.n + 1))
    return ConstructibleFunction(cd, zero, {ZERO_SYMBOL: Fraction(1)})


def chi(cd, w):
    if not is_locally_free(cd, w):
        raise NotLocallyFree(f"{w!r} is not locally free")
    return ConstructibleFunction(cd, rank_vector(cd, w), {string_symbol(cd, w): Fraction(1)})


def chi_class(cd, cls):
    """Characteristic function of a similarity class: the member sum,
    halved when the class contains the inverses of its members."""
    members = class_members(cd, cls)
    coeff = Fraction(1, 2) if class_is_self_inverse(cls) else Fraction(1)
    grade = rank_vector(cd, members[0])
    terms = {}
    for m in members:
        sym = string_symbol(cd, m)
        terms[sym] = terms.get(sym, Fraction(0)) + coeff
    f = ConstructibleFunction(cd, grade, terms)
    assert all(c == 1 for c in f.terms.values()), "class coefficients must be 1"
    return f


def theta_generator(cd, i):
    return chi(cd, basic_strings(cd).e[i])


# ---------------------------------------------------------------------------
# universes of evaluation targets


_FIBER_CACHE = {}
_BAND_CACHE = {}
_INDEC_CACHE = {}
_MOR_CACHE = {}
_WINDING_CACHE = {}


def _cd_key(cd):
    return (cd.n, cd.omega)


def _weights(cd):
    return tuple(cd.D[i][i] for i in cd.vertices)


def strings_of_rank(cd, grade):
    """All locally free strings of the given rank (complete: such a string
    has exactly sum(D * grade) - 1 letters)."""
    need = sum(d * g for d, g in zip(_weights(cd), grade)) - 1
    if need < 0:
        return []
    key = _cd_key(cd)
    cache = _FIBER_CACHE.setdefault(key, {"max_len": -1, "by_rank": {}})
    if cache["max_len"] < need:
        by_rank = {}
        for w in enumerate_strings(cd, need, "locally_free"):
            by_rank.setdefault(rank_vector(cd, w), []).append(w)
        cache["by_rank"] = by_rank
        cache["max_len"] = need
    return list(cache["by_rank"].get(tuple(grade), []))


def bands_of_rank(cd, grade):
    """(band, m) families with m * h(b) * rho = grade."""
    grade = tuple(grade)
    k = grade[0]
    if k <= 0 or grade != tuple(k * x for x in cd.rho):
        return []
    key = (_cd_key(cd), k)
    if key not in _BAND_CACHE:
        out = []
        for h in range(1, k + 1):
            if k % h:
                continue
            for b in enumerate_bands(cd, h):
                if b.h(cd) == h:
                    out.append((b, k // h))
        _BAND_CACHE[key] = out
    return _BAND_CACHE[key]


def indecomposable_symbols(cd, grade):
    grade = tuple(grade)
    key = (_cd_key(cd), grade)
    if key not in _INDEC_CACHE:
        syms = {string_symbol(cd, w) for w in strings_of_rank(cd, grade)}
        syms.update(band_symbol(cd, b, m) for b, m in bands_of_rank(cd, grade))
        _INDEC_CACHE[key] = sorted(syms, key=symbol_key)
    return _INDEC_CACHE[key]


def _subgrades(grade):
    for tup in itertools.product(*(range(x + 1) for x in grade)):
        if any(tup):
            yield tup


_UNIVERSE_CACHE = {}


def universe(cd, grade):
    """All iso-class symbols of grade: indecomposables plus multisets of
    smaller indecomposables summing to it."""
    grade = tuple(grade)
    cache_key = (_cd_key(cd), grade)
    if cache_key in _UNIVERSE_CACHE:
        return _UNIVERSE_CACHE[cache_key]
    targets = list(indecomposable_symbols(cd, grade))
    pool = []
    for g in _subgrades(grade):
        if g == grade:
            continue
        for s in indecomposable_symbols(cd, g):
            pool.append((g, s))
    pool.sort(key=lambda gs: symbol_key(gs[1]))
    sums = []

    def extend(start, remaining, chosen):
        if not any(remaining):
            if len(chosen) >= 2:
                sums.append(sum_symbol(chosen))
            return
        for idx in range(start, len(pool)):
            g, s = pool[idx]
            if any(a > b for a, b in zip(g, remaining)):
                continue
            chosen.append(s)
            extend(idx, vec_sub(remaining, g), chosen)
            chosen.pop()

    extend(0, grade, [])
    out = targets + sums
    _UNIVERSE_CACHE[cache_key] = out
    return out


# ---------------------------------------------------------------------------
# evaluation of chi_v * chi_w on targets


def _string_winding(cd, w):
    key = (_cd_key(cd), ("s", w.key()))
    if key not in _WINDING_CACHE:
        _WINDING_CACHE[key] = winding_of_string(cd, w)
    return _WINDING_CACHE[key]


def _band_winding(cd, letters):
    key = (_cd_key(cd), ("b", letters))
    if key not in _WINDING_CACHE:
        _WINDING_CACHE[key] = winding_of_band(cd, Band(cd, StringWord(letters)))
    return _WINDING_CACHE[key]


def _cached_morphisms(cd, src_key, Fsrc, dst_key, Fdst):
    key = (_cd_key(cd), src_key, dst_key)
    if key not in _MOR_CACHE:
        _MOR_CACHE[key] = morphisms(cd, Fsrc, Fdst)
    return _MOR_CACHE[key]


def _successor_closed(host, image):
    return all(t in image for (s, t) in host.arrows if s in image)


def _pair_count_on_thin(cd, v, w, Fx):
    """Morphism-pair count on a thin host: injective images splitting the
    vertex set into a successor-closed part and its complement."""
    Gs = _cached_morphisms(cd, ("s", v.key()), _string_winding(cd, v), Fx[0], Fx[1])
    Hs = _cached_morphisms(cd, ("s", w.key()), _string_winding(cd, w), Fx[0], Fx[1])
    host = Fx[1].host
    all_verts = frozenset(range(host.nv))
    total = 0
    for G in Gs:
        if not G.is_vertex_injective():
            continue
        img = G.image_vertices()
        if not _successor_closed(host, img):
            continue
        comp = all_verts - img
        for H in Hs:
            if H.is_vertex_injective() and H.image_vertices() == comp:
                total += 1
    return total


_VALUE_CACHE = {}


def evaluate_product_on_string(cd, v, w, x):
    """(chi_v * chi_w)(M_x) for strings v, w, x."""
    if vec_add(rank_vector(cd, v), rank_vector(cd, w)) != rank_vector(cd, x):
        return 0
    key = (_cd_key(cd), "s", v.key(), w.key(), x.key())
    if key not in _VALUE_CACHE:
        Fx = (("ts", x.key()), _string_winding(cd, x))
        _VALUE_CACHE[key] = _pair_count_on_thin(cd, v, w, Fx)
    return _VALUE_CACHE[key]


def evaluate_product_on_band(cd, v, w, b, t, m, force_tier=None):
    """(chi_v * chi_w)(M_{(b,t,m)})."""
    target_rank = tuple(m * x for x in rank_vector(cd, b))
    if vec_add(rank_vector(cd, v), rank_vector(cd, w)) != target_rank:
        return 0
    if t == 0:
        raise UnsupportedBandEvaluation("band parameter must be nonzero")
    tier = force_tier if force_tier is not None else (1 if m == 1 else 2)
    letters = b.canonical_letters()
    key = (_cd_key(cd), "b", tier, v.key(), w.key(), letters, m, Fraction(t))
    if key in _VALUE_CACHE:
        return _VALUE_CACHE[key]
    if tier == 1:
        if m != 1:
            raise UnsupportedBandEvaluation("thin count needs Jordan size 1")
        Fb = (("tb", letters), _band_winding(cd, letters))
        val = _pair_count_on_thin(cd, v, w, Fb)
    else:
        val = _band_value_jordan(cd, v, w, Band(cd, StringWord(letters)), t, m)
    _VALUE_CACHE[key] = val
    return val


# --- Jordan tier -----------------------------------------------------------


def _walk_of_morphism(cd, word, G):
    """Walk of the pushforward along G in host-arrow letters: pairs
    (arrow index, +-1) with +1 meaning the arrow runs toward the walk
    start, matching the string convention."""
    if word.is_trivial:
        return ()
    return tuple((G.amap[j], word.letters[j][1]) for j in range(len(word.letters)))


def _line_letter(band_word, p):
    """Letter of the periodic line at step p (arrows indexed so that arrow
    q connects line positions q and q+1)."""
    l = len(band_word.letters)
    idx = (p - 1) % l
    return (idx, band_word.letters[idx][1])


def _walk_position_vertex(walk, start_vertex, pos, l):
    v = start_vertex
    for k in range(pos):
        idx, sign = walk[k]
        a, bnd = idx, (idx + 1) % l
        v = bnd if v == a else a
    return v


def _count_admissible_triples(walk, start_vertex, band_word):
    """Graph-map basis count for maps of the walk's string module into the
    band: factor intervals of the walk placed on the periodic line as
    submodule intervals (matching labeled subwalks, either orientation),
    counted per period."""
    L = len(walk)
    l = len(band_word.letters)
    count = 0
    for a in range(L + 1):
        if not (a == 0 or walk[a - 1][1] == 1):
            continue
        for bb in range(a, L + 1):
            if not (bb == L or walk[bb][1] == -1):
                continue
            segment = walk[a:bb]
            candidates = [segment]
            if segment:
                candidates.append(tuple((idx, -s) for idx, s in reversed(segment)))
            placed = set()
            for cand in candidates:
                for X in range(l):
                    if _line_letter(band_word, X)[1] != -1:
                        continue
                    if _line_letter(band_word, X + len(cand) + 1)[1] != 1:
                        continue
                    ok = all(
                        _line_letter(band_word, X + k) == cand[k - 1]
                        for k in range(1, len(cand) + 1)
                    )
                    if ok and not cand:
                        ok = X % l == _walk_position_vertex(walk, start_vertex, a, l)
                    if ok:
                        placed.add(X)
            count += len(placed)
    return count


def _host_pushforward(G, src_host, dst_host):
    offsets = []
    dim_at = [0] * dst_host.nv
    for hv in range(src_host.nv):
        dv = G.vmap[hv]
        offsets.append(dim_at[dv])
        dim_at[dv] += 1
    dims = tuple(dim_at)
    mats = [linalg.zeros(dims[t], dims[s]) for (s, t) in dst_host.arrows]
    for idx, (s, t) in enumerate(src_host.arrows):
        mats[G.amap[idx]][offsets[t]][offsets[s]] += Fraction(1)
    return WD.HostRep(host=dst_host, dims=dims, mats=tuple(mats))


def _host_defect(host, dims):
    """<all-ones, dims> in the host Euler form; negative on preprojectives."""
    return sum(dims) - sum(dims[t] for (s, t) in host.arrows)


def _band_value_jordan(cd, v, w, b, t, m):
    letters = b.canonical_letters()
    band_word = StringWord(letters)
    Fb = _band_winding(cd, letters)
    _, R = band_host_rep(cd, b, t, m)
    Gs = _cached_morphisms(cd, ("s", v.key()), _string_winding(cd, v), ("tb", letters), Fb)
    Hs = _cached_morphisms(cd, ("s", w.key()), _string_winding(cd, w), ("tb", letters), Fb)
    Fv, Fw = _string_winding(cd, v), _string_winding(cd, w)
    total = 0
    for G in Gs:
        A = _host_pushforward(G, Fv.host, Fb.host)
        walk = _walk_of_morphism(cd, v, G)
        for H in Hs:
            B = _host_pushforward(H, Fw.host, Fb.host)
            if tuple(x + y for x, y in zip(A.dims, B.dims)) != R.dims:
                continue
            total += _jordan_pair_value(Fb.host, A, walk, G.vmap[0], B, R, band_word, m)
    return total


def _jordan_pair_value(host, A, walk, start_vertex, B, R, band_word, m):
    """Euler characteristic of {U <= R : U iso A, R/U iso B} in the
    certified unique-triple configuration."""
    hom = WD.host_hom_basis(host, A, R)
    if _host_defect(host, A.dims) >= 0:
        if hom:
            raise UnsupportedBandEvaluation(
                "homomorphisms from a non-preprojective source into a homogeneous band"
            )
        return 0
    triples = _count_admissible_triples(walk, start_vertex, band_word)
    if len(hom) != m * triples:
        raise UnsupportedBandEvaluation(
            f"Hom dimension {len(hom)} is not {m} x {triples} triples"
        )
    if triples == 0:
        return 0
    if triples != 1:
        raise UnsupportedBandEvaluation("more than one admissible triple")
    if not any(A.dims[hv] > m - 1 for hv in range(host.nv)):
        raise UnsupportedBandEvaluation("cannot certify layer maps non-injective")
    # phi0: a basis element whose top Jordan layer is nonzero.
    phi0 = None
    for cand in hom:
        if any(
            cand[hv][m - 1][j] != 0
            for hv in range(host.nv)
            for j in range(A.dims[hv])
        ):
            phi0 = cand
            break
    if phi0 is None:
        raise UnsupportedBandEvaluation("all homomorphisms factor through layers")
    if not _injective_blocks(phi0, A.dims):
        raise UnsupportedBandEvaluation("top-layer homomorphism is not injective")
    # The nilpotent endomorphism N of R shifts Jordan layers; if the orbit
    # {N^j phi0} spans Hom, every map is (unit or nilpotent)(N) . phi0:
    # units give automorphic images (constant quotient), nilpotents land in
    # the layer submodule and cannot be injective.  The family of
    # submodules is then one unipotent orbit: an affine space, chi = 1.
    shift = _layer_shift(m)
    powers = [_flatten_hom(phi0, A.dims)]
    current = phi0
    for _ in range(m - 1):
        current = [[[sum(shift[i][k] * blk[k][j] for k in range(m)) for j in range(len(blk[0]) if blk else 0)]
                    for i in range(m)] for blk in current]
        powers.append(_flatten_hom(current, A.dims))
    if linalg.rank(powers) != m:
        raise UnsupportedBandEvaluation("shift orbit does not span the Hom space")
    quo = _host_quotient(host, R, phi0, A)
    return 1 if WD.host_modules_isomorphic(host, quo, B) else 0


def _layer_shift(m):
    """Shift matrix: e_1 -> 0, e_j -> e_{j-1}; the nilpotent part of the
    Jordan block, an endomorphism of every band module."""
    s = linalg.zeros(m, m)
    for i in range(m - 1):
        s[i][i + 1] = Fraction(1)
    return s


def _flatten_hom(phi, src_dims):
    out = []
    for hv, block in enumerate(phi):
        for i in range(len(block)):
            for j in range(src_dims[hv]):
                out.append(block[i][j])
    return out


def _injective_blocks(phi, src_dims):
    for hv, block in enumerate(phi):
        if src_dims[hv] and linalg.rank(block) != src_dims[hv]:
            return False
    return True


def _host_quotient(host, R, phi, A):
    """Quotient of R by the image of the injective map phi."""
    change, keep, dims = {}, {}, []
    for hv in range(host.nv):
        d = R.dims[hv]
        cols = [[phi[hv][i][j] for i in range(d)] for j in range(A.dims[hv])]
        chosen = []
        for j in range(d):
            if len(chosen) == d - A.dims[hv]:
                break
            cand = [Fraction(1) if r == j else Fraction(0) for r in range(d)]
            trial = cols + chosen + [cand]
            if linalg.rank([list(r) for r in zip(*trial)]) == len(trial):
                chosen.append(cand)
        assert len(chosen) == d - A.dims[hv], "complement construction failed"
        full = [list(r) for r in zip(*(cols + chosen))]
        change[hv] = linalg.inverse(full) if d else []
        keep[hv] = chosen
        dims.append(d - A.dims[hv])
    mats = []
    for idx, (s, t) in enumerate(host.arrows):
        mat = linalg.zeros(dims[t], dims[s])
        for jj, vec in enumerate(keep[s]):
            col = [sum(R.mats[idx][r][c] * vec[c] for c in range(R.dims[s]))
                   for r in range(R.dims[t])]
            coords = linalg.mat_vec(change[t], col) if R.dims[t] else ()
            for ii in range(dims[t]):
                mat[ii][jj] = coords[A.dims[t] + ii]
        mats.append(mat)
    return WD.HostRep(host=host, dims=tuple(dims), mats=tuple(mats))


# --- direct sums -----------------------------------------------------------


def evaluate_product_on_sum(cd, v, w, parts):
    """(chi_v * chi_w)(sum of indecomposables): ordered pairs of distinct
    summand slots isomorphic to v and w."""
    sv, sw = string_symbol(cd, v), string_symbol(cd, w)
    mv = sum(1 for p in parts if p == sv)
    mw = sum(1 for p in parts if p == sw)
    if sv == sw:
        return mv * (mv - 1)
    return mv * mw


# ---------------------------------------------------------------------------
# convolution, bracket


def _check_indecomposable_support(f):
    for s in f.terms:
        if s[0] == "sum":
            raise StringError(
                "products are implemented for functions supported on indecomposables"
            )


def evaluate_function_product(cd, f, g, target_sym, t_samples=DEFAULT_T_SAMPLES):
    """(f * g)(target): bilinear extension of the pairwise counts; band
    family symbols are sampled over t and must be constant."""
    kind = target_sym[0]
    values = []
    sample_space = t_samples if kind == "band" else (None,)
    for t in sample_space:
        total = Fraction(0)
        for sa, ca in f.terms.items():
            for sb, cb in g.terms.items():
                if sa[0] != "str" or sb[0] != "str":
                    raise StringError("product factors must be string-supported")
                va, wb = sa[1], sb[1]
                if kind == "str":
                    val = evaluate_product_on_string(cd, va, wb, target_sym[1])
                elif kind == "band":
                    b = Band(cd, StringWord(target_sym[1]))
                    val = evaluate_product_on_band(cd, va, wb, b, t, target_sym[2])
                elif kind == "sum":
                    val = evaluate_product_on_sum(cd, va, wb, target_sym[1])
                else:
                    raise StringError(f"cannot evaluate on {target_sym!r}")
                total += ca * cb * val
        values.append(total)
    if len(set(values)) != 1:
        raise NonConstantOnFamily(
            f"value on band family {symbol_str(cd, target_sym)} varies over t: {values}"
        )
    return values[0]


def convolve(f, g, support_universe=None, t_samples=DEFAULT_T_SAMPLES):
    """f * g as a constructible function, tabulated over every iso class
    of the product grade."""
    cd = f.cd
    if f.terms == {ZERO_SYMBOL: Fraction(1)}:
        return g
    if g.terms == {ZERO_SYMBOL: Fraction(1)}:
        return f
    _check_indecomposable_support(f)
    _check_indecomposable_support(g)
    grade = vec_add(f.grade, g.grade)
    if support_universe is None:
        support_universe = universe(cd, grade)
    else:
        needed = set(universe(cd, grade))
        if not needed <= set(support_universe):
            raise IncompleteUniverse("support universe misses iso classes of the grade")
    terms = {}
    for sym in support_universe:
        val = evaluate_function_product(cd, f, g, sym, t_samples)
        if val:
            terms[sym] = val
    return ConstructibleFunction(cd, grade, terms)


def bracket(f, g, support_universe=None, t_samples=DEFAULT_T_SAMPLES):
    return convolve(f, g, support_universe, t_samples) - convolve(
        g, f, support_universe, t_samples
    )


# ---------------------------------------------------------------------------
# the closed bracket formula with a simple weakly regular string


def _simple_regular_index(cd, r):
    basics = basic_strings(cd)
    cls = similarity_class(cd, r)
    for i in range(1, cd.n + 1):
        if cls == similarity_class(cd, basics.r[i]):
            return i
    raise NotSimpleRegular(f"{r!r} is not similar to any hook tail")


def key_bracket(cd, w, r):
    """[chi_w, chi_r] for r similar to a hook tail r_i, as the four-term
    hook/co-hook expression."""
    if not is_locally_free(cd, w):
        raise NotLocallyFree(f"{w!r} is not locally free")
    i = _simple_regular_index(cd, r)
    basics = basic_strings(cd)
    zeta = basics.tau_inv[i]
    ed = end_data(cd, w)
    grade = vec_add(rank_vector(cd, w), rank_vector(cd, r))
    out = zero_function(cd, grade)
    if ed.s_sign == 1 and ed.s_prime == i:
        word = ST.concat(cd, ST.concat(cd, w, StringWord(((i, 1),))), r)
        out = out + chi(cd, word)
    if ed.s_sign == -1 and ed.s_prime == zeta:
        word = ST.concat(cd, ST.concat(cd, w, StringWord(((zeta, -1),))), inverse(r))
        out = out - chi(cd, word)
    if ed.t_sign == 1 and ed.t_prime == i:
        word = ST.concat(cd, ST.concat(cd, inverse(r), StringWord(((i, -1),))), w)
        out = out + chi(cd, word)
    if ed.t_sign == -1 and ed.t_prime == zeta:
        word = ST.concat(cd, ST.concat(cd, r, StringWord(((zeta, 1),))), w)
        out = out - chi(cd, word)
    return out


# ---------------------------------------------------------------------------
# Serre relations


def serre_check(cd, i, j, t_samples=DEFAULT_T_SAMPLES):
    """(ad theta_i)^{1 - c_ij}(theta_j) must vanish."""
    if i == j:
        raise StringError("Serre check needs two distinct vertices")
    power = 1 - cd.C[i][j]
    acc = theta_generator(cd, j)
    ti = theta_generator(cd, i)
    for _ in range(power):
        acc = bracket(ti, acc, t_samples=t_samples)
    return acc.is_zero()


# ---------------------------------------------------------------------------
# primitive elements


_THETA_CACHE = {}


def _tail_class_function(cd, i):
    return chi_class(cd, similarity_class(cd, basic_strings(cd).r[i]))


def _tail_theta_chain(cd, i):
    """chi of the class of the hook tail r_i as an iterated bracket of the
    generators, peeling the support walk from its source end."""
    basics = basic_strings(cd)
    r = basics.r[i]
    verts = ST.walk_vertices(cd, r)
    chain = []
    for v in (verts if not r.is_trivial else (r.triv_vertex,)):
        if v not in chain:
            chain.append(v)
    chain = list(reversed(chain)) if not r.is_trivial else chain
    acc = theta_generator(cd, chain[0])
    for v in chain[1:]:
        acc = bracket(acc, theta_generator(cd, v))
    expected = _tail_class_function(cd, i)
    if acc != expected:
        raise AssertionError(f"tail chain for {i} does not match its class function")
    return acc


def iterated_regular_bracket(cd, i, k, t_samples=DEFAULT_T_SAMPLES):
    """Left-nested brackets of the hook-tail class functions along tau."""
    basics = basic_strings(cd)
    acc = _tail_class_function(cd, i)
    idx = i
    for _ in range(k):
        idx = basics.tau_inv[idx]
        acc = bracket(acc, _tail_class_function(cd, idx), t_samples=t_samples)
    return acc


def expected_regular_bracket(cd, i, k):
    """The closed form the iterated bracket must equal.

    For n = 2 the tail permutation is an involution, so at every stage
    k = 0 mod n the difference term glues back onto the main class and the
    bracket doubles; the accumulated factor is 2^(k // 2).  For n >= 3 the
    factor is 1.
    """
    basics = basic_strings(cd)
    f = chi_class(cd, similarity_class(cd, regular_string(cd, i, k)))
    if k % cd.n == cd.n - 1:
        g = chi_class(cd, similarity_class(cd, regular_string(cd, basics.tau[i], k)))
        out = f - g
    else:
        out = f
    if cd.n == 2:
        out = out.scale(Fraction(2) ** (k // 2))
    return out


def _find_family_index(cd, coords, kind):
    from .cartan import coxeter_apply

    basics = basic_strings(cd)
    height = sum(coords)
    for k in range(height + 2):
        if kind == "pre":
            for i in range(cd.n + 1):
                if coxeter_apply(cd, rank_vector(cd, basics.p[i]), -k) == coords:
                    return i, k
        elif kind == "inj":
            for i in range(cd.n + 1):
                if coxeter_apply(cd, rank_vector(cd, basics.q[i]), k) == coords:
                    return i, k
        else:
            for i in range(1, cd.n + 1):
                if rank_vector(cd, regular_string(cd, i, k)) == coords:
                    return i, k
    raise AssertionError(f"no {kind} family index for {coords}")


def _strip_right_hook(cd, w, hook_sign):
    """Undo one hook at the right end: find v with w = v . eta_j^s . tail.

    Returns v or None.  The reconstruction is verified exactly, including
    the formal sign when v degenerates to a trivial word.
    """
    basics = basic_strings(cd)
    side = "right+" if hook_sign == 1 else "right-"
    for j in range(1, cd.n + 1):
        tail = basics.r[j] if hook_sign == 1 else basics.r_prime[j]
        midtail = ((j, hook_sign),) + (() if tail.is_trivial else tail.letters)
        L = len(midtail)
        if len(w) < L or w.letters[-L:] != midtail:
            continue
        if len(w) == L:
            vertex = ST.letter_t(cd, (j, hook_sign))
            candidates = [trivial_word(vertex, s) for s in (1, -1)]
        else:
            candidates = [StringWord(w.letters[:-L])]
        for v in candidates:
            if not is_locally_free(cd, v):
                continue
            try:
                if hook_extend(cd, v, side, 1) == w:
                    return v
            except ST.StringError:
                continue
    return None


def _peel_hook(cd, w, hook_sign):
    """Predecessor v and side with w = hook(v); tries both ends."""
    v = _strip_right_hook(cd, w, hook_sign)
    if v is not None:
        return v, "right+" if hook_sign == 1 else "right-"
    v = _strip_right_hook(cd, inverse(w), hook_sign)
    if v is not None:
        return inverse(v), "left+" if hook_sign == 1 else "left-"
    raise AssertionError(f"no hook to strip from {w!r}")


def theta_real(cd, coords, t_samples=DEFAULT_T_SAMPLES):
    """The spanning primitive function at a real root, built by the
    inductive bracket recipe from the generators."""
    coords = tuple(coords)
    key = (_cd_key(cd), coords)
    if key in _THETA_CACHE:
        return _THETA_CACHE[key]
    root = is_positive_root(cd, coords)
    if root is None or not root.real:
        raise NotRealRoot(f"{coords} is not a real positive root")
    simple = [i for i in cd.vertices if coords == tuple(1 if v == i else 0 for v in cd.vertices)]
    if simple:
        out = theta_generator(cd, simple[0])
        _THETA_CACHE[key] = out
        return out
    d = defect(cd, coords)
    if d == 0:
        i, k = _find_family_index(cd, coords, "reg")
        if k % cd.n == cd.n - 1:
            raise NotRealRoot("isotropic grade reached in the real recursion")
        out = iterated_regular_bracket(cd, i, k, t_samples=t_samples)
        coeffs = set(out.terms.values())
        if len(coeffs) != 1:
            raise AssertionError(f"regular bracket not a single multiple at {coords}")
        out = out.scale(1 / coeffs.pop())
    else:
        if d > 0:
            i, k = _find_family_index(cd, coords, "pre")
            v, side = _peel_hook(cd, preprojective_string(cd, i, k), 1)
        else:
            i, k = _find_family_index(cd, coords, "inj")
            v, side = _peel_hook(cd, preinjective_string(cd, i, k), -1)
        ed = end_data(cd, v)
        theta_v = theta_real(cd, rank_vector(cd, v), t_samples=t_samples)
        if side == "right+":
            tail = ed.s_prime
        elif side == "left+":
            tail = ed.t_prime
        elif side == "right-":
            tail = basic_strings(cd).tau[ed.s_prime]
        else:
            tail = basic_strings(cd).tau[ed.t_prime]
        tail_fn = _tail_class_function(cd, tail)
        if d > 0:
            out = bracket(theta_v, tail_fn, t_samples=t_samples)
        else:
            out = bracket(tail_fn, theta_v, t_samples=t_samples)
        if root.long:
            out = out.scale(Fraction(1, 2))
    expected_syms = set()
    for cls in root_to_classes(cd, coords):
        for mem in class_members(cd, cls):
            expected_syms.add(string_symbol(cd, mem))
    if set(out.terms) != expected_syms or any(c != 1 for c in out.terms.values()):
        raise AssertionError(f"bracket recipe failed at root {coords}: {out!r}")
    _THETA_CACHE[key] = out
    return out


def theta_isotropic(cd, k, i, t_samples=DEFAULT_T_SAMPLES):
    """Primitive functions at grade k*rho: differences of isotropic string
    class functions for i < n, the bracket with the top generator for i = n."""
    if k < 1:
        raise OutOfBounds("k must be >= 1")
    n = cd.n
    if not 1 <= i <= n:
        raise OutOfBounds(f"index {i} out of range")
    basics = basic_strings(cd)
    if i < n:
        f = chi_class(cd, similarity_class(cd, regular_string(cd, i, k * n - 1)))
        g = chi_class(cd, similarity_class(cd, regular_string(cd, basics.tau[i], k * n - 1)))
        return f - g
    grade = vec_scale(k, cd.rho)
    beta = vec_sub(grade, tuple(1 if v == n else 0 for v in cd.vertices))
    theta_beta = theta_real(cd, beta, t_samples=t_samples)
    return bracket(theta_beta, theta_generator(cd, n), t_samples=t_samples)


def is_primitive(f):
    return all(symbol_is_indecomposable(s) for s in f.terms)


def linear_independent(fns):
    """Exact rank test over the union of supports."""
    fns = list(fns)
    if not fns:
        return True
    symbols = sorted({s for f in fns for s in f.terms}, key=symbol_key)
    index = {s: j for j, s in enumerate(symbols)}
    rows = []
    for f in fns:
        row = [Fraction(0)] * len(symbols)
        for s, c in f.terms.items():
            row[index[s]] = c
        rows.append(row)
    return linalg.rank(rows) == len(fns)


def family_rank(fns):
    fns = list(fns)
    if not fns:
        return 0
    symbols = sorted({s for f in fns for s in f.terms}, key=symbol_key)
    index = {s: j for j, s in enumerate(symbols)}
    rows = []
    for f in fns:
        row = [Fraction(0)] * len(symbols)
        for s, c in f.terms.items():
            row[index[s]] = c
        rows.append(row)
    return linalg.rank(rows)
