"""String and band combinatorics for the doubled-endpoint affine chain.

The quiver has vertices 0..n, edge arrows eta_1..eta_n along the chain and
nilpotent loops eps_0, eps_n at the ends (eps^2 = 0).  Letters are arrows
or formal inverses; words compose like paths, i.e. for w = w_1 w_2 ... w_l
we require s(w_{j-1}) = t(w_j) and w_{j-1} != w_j^{+-1}.  The second
condition excludes both backtracking and the square of a loop.

Letters serialize as ``e0``, ``e0-``, ``h3``, ``h3-``, ``en``, ``en-``,
words as dot-joined letters, trivial words as ``1_i``, bands with a
``band:`` prefix and starred loop letters as ``e0*`` / ``en*``.
"""

import itertools
from dataclasses import dataclass, field

from .cartan import (
    CartanError,
    alpha_interval,
    beta_interval,
    coxeter_apply,
    defect,
    is_positive_root,
    vec_add,
    vec_scale,
    vec_sub,
)

EPS0 = 0


def eps_n(cd):
    return cd.n + 1


class StringError(ValueError):
    pass


class NonComposable(StringError):
    def __init__(self, position):
        super().__init__(f"letters at position {position} do not compose")
        self.position = position


class ForbiddenPair(StringError):
    def __init__(self, position):
        super().__init__(f"forbidden pair w_{position-1} = w_{position}^(+-1)")
        self.position = position


class IncompatibleEndpoints(StringError):
    pass


class ForbiddenJunction(StringError):
    pass


class NonIntegralRank(StringError):
    pass


class SignMismatch(StringError):
    pass


class NotARoot(StringError):
    pass


class IndexOutOfRange(StringError):
    pass


# ---------------------------------------------------------------------------
# letters


def letter_endpoints(cd, letter):
    """(t, s) of a letter; arrows run from s to t."""
    base, sign = letter
    n = cd.n
    if base == EPS0:
        return (0, 0)
    if base == n + 1:
        return (n, n)
    if not 1 <= base <= n:
        raise StringError(f"unknown letter base {base}")
    if cd.omega_of(base) == 1:
        t, s = base - 1, base
    else:
        t, s = base, base - 1
    if sign == 1:
        return (t, s)
    return (s, t)


def letter_t(cd, letter):
    return letter_endpoints(cd, letter)[0]


def letter_s(cd, letter):
    return letter_endpoints(cd, letter)[1]


def letter_inverse(letter):
    return (letter[0], -letter[1])


def letter_str(cd, letter, star=False):
    base, sign = letter
    if base == EPS0:
        name = "e0"
    elif base == cd.n + 1:
        name = "en"
    else:
        name = f"h{base}"
    if star:
        return name + "*"
    return name + ("-" if sign == -1 else "")


def parse_letter(cd, text):
    star = text.endswith("*")
    neg = text.endswith("-")
    core = text[:-1] if (star or neg) else text
    if core == "e0":
        base = EPS0
    elif core == "en":
        base = cd.n + 1
    elif core.startswith("h"):
        base = int(core[1:])
        if not 1 <= base <= cd.n:
            raise StringError(f"edge letter out of range: {text}")
    else:
        raise StringError(f"cannot parse letter {text!r}")
    if star:
        if base not in (EPS0, cd.n + 1):
            raise StringError("only loop letters may be starred")
        return (base, 0)
    return (base, -1 if neg else 1)


# ---------------------------------------------------------------------------
# words


class StringWord:
    """An immutable string: a letter tuple, or a trivial word at a vertex.

    Trivial words carry a bookkeeping sign (the two formal trivial words at
    a vertex).  Equality and hashing ignore that sign: the two trivial
    words are identified in storage, and the sign is only consulted by the
    end-data computation, where the two formal versions extend through the
    two different edges at the vertex.
    """

    __slots__ = ("letters", "triv_vertex", "triv_sign")

    def __init__(self, letters=(), triv_vertex=None, triv_sign=1):
        self.letters = tuple(letters)
        if self.letters:
            self.triv_vertex = None
            self.triv_sign = 1
        else:
            if triv_vertex is None:
                raise StringError("empty word needs a vertex")
            self.triv_vertex = triv_vertex
            self.triv_sign = triv_sign

    @property
    def is_trivial(self):
        return not self.letters

    def __len__(self):
        return len(self.letters)

    def key(self):
        if self.is_trivial:
            return (0, (self.triv_vertex,))
        return (1, self.letters)

    def __eq__(self, other):
        return isinstance(other, StringWord) and self.key() == other.key()

    def __hash__(self):
        return hash(self.key())

    def __lt__(self, other):
        return (len(self), self.key()) < (len(other), other.key())

    def __repr__(self):
        if self.is_trivial:
            sign = "" if self.triv_sign == 1 else "^-"
            return f"StringWord(1_{self.triv_vertex}{sign})"
        return f"StringWord({self.letters!r})"


def trivial_word(vertex, sign=1):
    return StringWord((), triv_vertex=vertex, triv_sign=sign)


def validate(cd, letters):
    """Check the two string conditions; return the validated StringWord."""
    if isinstance(letters, StringWord):
        if letters.is_trivial:
            return letters
        letters = letters.letters
    letters = tuple(letters)
    if not letters:
        raise StringError("use trivial_word for empty words")
    for j in range(1, len(letters)):
        prev, cur = letters[j - 1], letters[j]
        if letter_s(cd, prev) != letter_t(cd, cur):
            raise NonComposable(j + 1)
        if prev[0] == cur[0]:
            raise ForbiddenPair(j + 1)
    for letter in letters:
        letter_endpoints(cd, letter)  # range check
    return StringWord(letters)


def word_t(cd, w):
    return w.triv_vertex if w.is_trivial else letter_t(cd, w.letters[0])


def word_s(cd, w):
    return w.triv_vertex if w.is_trivial else letter_s(cd, w.letters[-1])


def inverse(w):
    if w.is_trivial:
        return trivial_word(w.triv_vertex, -w.triv_sign)
    return StringWord(tuple(letter_inverse(x) for x in reversed(w.letters)))


def concat(cd, v, w):
    """Concatenate compatible strings; trivial words act as identities."""
    if v.is_trivial and w.is_trivial:
        if v.triv_vertex != w.triv_vertex:
            raise IncompatibleEndpoints("trivial words at different vertices")
        return v
    if v.is_trivial:
        if v.triv_vertex != word_t(cd, w):
            raise IncompatibleEndpoints("s(v) != t(w)")
        return w
    if w.is_trivial:
        if word_s(cd, v) != w.triv_vertex:
            raise IncompatibleEndpoints("s(v) != t(w)")
        return v
    if word_s(cd, v) != word_t(cd, w):
        raise IncompatibleEndpoints("s(v) != t(w)")
    if v.letters[-1][0] == w.letters[0][0]:
        raise ForbiddenJunction("junction letters share a base")
    return validate(cd, v.letters + w.letters)


def word_str(cd, w):
    if w.is_trivial:
        return f"1_{w.triv_vertex}"
    return ".".join(letter_str(cd, x) for x in w.letters)


def parse_word(cd, text):
    text = text.strip()
    if text.startswith("1_"):
        v = int(text[2:])
        if not 0 <= v <= cd.n:
            raise StringError(f"trivial word vertex out of range: {text}")
        return trivial_word(v)
    letters = tuple(parse_letter(cd, tok) for tok in text.split("."))
    if any(sign == 0 for _, sign in letters):
        raise StringError("starred letters belong to classes, not words")
    return validate(cd, letters)


def walk_vertices(cd, w):
    """Vertices visited by the walk: t(w_1), s(w_1), ..., s(w_l)."""
    if w.is_trivial:
        return (w.triv_vertex,)
    out = [letter_t(cd, w.letters[0])]
    for letter in w.letters:
        out.append(letter_s(cd, letter))
    return tuple(out)


def is_locally_free(cd, w):
    if w.is_trivial:
        return 1 <= w.triv_vertex <= cd.n - 1
    ends = (0, cd.n)
    if word_s(cd, w) in ends and w.letters[-1][0] not in (EPS0, cd.n + 1):
        return False
    if word_t(cd, w) in ends and w.letters[0][0] not in (EPS0, cd.n + 1):
        return False
    return True


def rank_vector(cd, x):
    """Rank vector of a locally free string or of a band: vertex visit
    counts along the walk, halved at the loop vertices."""
    if isinstance(x, Band):
        verts = walk_vertices(cd, x.word)[:-1]
    else:
        if not is_locally_free(cd, x):
            raise NonIntegralRank("string is not locally free")
        verts = walk_vertices(cd, x)
    counts = [0] * (cd.n + 1)
    for v in verts:
        counts[v] += 1
    for v in (0, cd.n):
        if counts[v] % 2:
            raise NonIntegralRank(f"odd visit count at loop vertex {v}")
        counts[v] //= 2
    return tuple(counts)


# ---------------------------------------------------------------------------
# bands


class Band:
    """A cyclic string: word such that word . word is again a string.

    Identity is the rotation class of the word.  Inversion is tracked
    separately (it flips the module parameter t to 1/t), so two mutually
    inverse bands are distinct Band values with the same unoriented trace.
    """

    __slots__ = ("word", "_canon")

    def __init__(self, cd, word):
        if word.is_trivial or len(word) < 2:
            raise StringError("bands need at least two letters")
        validate(cd, word.letters)
        if word_s(cd, word) != word_t(cd, word):
            raise StringError("band must be a closed walk")
        if word.letters[-1][0] == word.letters[0][0]:
            raise StringError("band seam repeats a base letter")
        self.word = word
        self._canon = min(word.letters[i:] + word.letters[:i] for i in range(len(word)))

    def __len__(self):
        return len(self.word)

    def rotations(self):
        l = self.word.letters
        return [StringWord(l[i:] + l[:i]) for i in range(len(l))]

    def canonical_letters(self):
        return self._canon

    def __eq__(self, other):
        return isinstance(other, Band) and self._canon == other._canon

    def __hash__(self):
        return hash(("band", self._canon))

    def __repr__(self):
        return f"Band({self._canon!r})"

    def is_primitive(self):
        l = self.word.letters
        m = len(l)
        for d in range(1, m):
            if m % d == 0 and l == l[d:] + l[:d]:
                return False
        return True

    def h(self, cd):
        period = 2 * cd.n + 2
        if len(self.word) % period:
            raise AssertionError("band length is not a multiple of 2n+2")
        return len(self.word) // period


def band_str(cd, b):
    return "band:" + ".".join(letter_str(cd, x) for x in b.canonical_letters())


def parse_band(cd, text):
    if not text.startswith("band:"):
        raise StringError("band text must start with 'band:'")
    w = parse_word(cd, text[len("band:"):])
    return Band(cd, w)


def band_inverse(cd, b):
    return Band(cd, inverse(StringWord(b.canonical_letters())))


# ---------------------------------------------------------------------------
# the basic locally free strings


def _out_arrows(cd, v):
    """Arrows with source v, as letter bases."""
    out = []
    if v == 0:
        out.append(EPS0)
        if cd.omega_of(1) == -1:
            out.append(1)
        return out
    if v == cd.n:
        if cd.omega_of(cd.n) == 1:
            out.append(cd.n)
        out.append(cd.n + 1)
        return out
    if cd.omega_of(v) == 1:
        out.append(v)
    if cd.omega_of(v + 1) == -1:
        out.append(v + 1)
    return out


def _in_arrows(cd, v):
    out = []
    if v == 0:
        out.append(EPS0)
        if cd.omega_of(1) == 1:
            out.append(1)
        return out
    if v == cd.n:
        if cd.omega_of(cd.n) == -1:
            out.append(cd.n)
        out.append(cd.n + 1)
        return out
    if cd.omega_of(v) == -1:
        out.append(v)
    if cd.omega_of(v + 1) == 1:
        out.append(v + 1)
    return out


def _arrow_target(cd, base):
    return letter_t(cd, (base, 1))


def _arrow_source(cd, base):
    return letter_s(cd, (base, 1))


def _max_path_from(cd, first_base):
    """Longest path (direct string) whose first arrow is first_base;
    returned as a letter tuple, first arrow rightmost."""
    letters = [(first_base, 1)]
    cur = _arrow_target(cd, first_base)
    prev = first_base
    while True:
        nxt = [b for b in _out_arrows(cd, cur) if b != prev]
        if not nxt:
            break
        assert len(nxt) == 1
        prev = nxt[0]
        letters.append((prev, 1))
        cur = _arrow_target(cd, prev)
    return tuple(reversed(letters))


def _max_path_into(cd, lead_base):
    """Longest path whose last arrow (leftmost letter) is lead_base;
    grows to the right through earlier arrows."""
    letters = [(lead_base, 1)]
    cur = _arrow_source(cd, lead_base)
    prev = lead_base
    while True:
        nxt = [b for b in _in_arrows(cd, cur) if b != prev]
        if not nxt:
            break
        assert len(nxt) == 1
        prev = nxt[0]
        letters.append((prev, 1))
        cur = _arrow_source(cd, prev)
    return tuple(letters)


def _left_out_slot(cd, v):
    """Outgoing arrow on the 0-side of v (the loop counts as the 0-side
    slot at vertex 0), or None."""
    if v == 0:
        return EPS0
    if v == cd.n:
        return cd.n if cd.omega_of(cd.n) == 1 else None
    return v if cd.omega_of(v) == 1 else None


def _right_out_slot(cd, v):
    if v == cd.n:
        return cd.n + 1
    if v == 0:
        return 1 if cd.omega_of(1) == -1 else None
    return v + 1 if cd.omega_of(v + 1) == -1 else None


def _left_in_slot(cd, v):
    if v == 0:
        return EPS0
    if v == cd.n:
        return cd.n if cd.omega_of(cd.n) == -1 else None
    return v if cd.omega_of(v) == -1 else None


def _right_in_slot(cd, v):
    if v == cd.n:
        return cd.n + 1
    if v == 0:
        return 1 if cd.omega_of(1) == 1 else None
    return v + 1 if cd.omega_of(v + 1) == 1 else None


def generator_string(cd, i):
    """The string of the rank-alpha_i locally free module: the loop at the
    ends (inverted at n), the trivial word in between."""
    if i == 0:
        return StringWord(((EPS0, 1),))
    if i == cd.n:
        return StringWord(((cd.n + 1, -1),))
    return trivial_word(i)


@dataclass(frozen=True)
class BasicStrings:
    """The projective, injective and hook-tail strings plus the tail
    permutation tau (an n-cycle on 1..n with co-tail(i)^{-1} = tail(tau(i)))."""

    p: tuple
    q: tuple
    e: tuple
    r: dict = field(hash=False)
    r_prime: dict = field(hash=False)
    tau: dict = field(hash=False)
    tau_inv: dict = field(hash=False)


def _projective_string(cd, i):
    lb = _left_out_slot(cd, i)
    rb = _right_out_slot(cd, i)
    left = StringWord(_max_path_from(cd, lb)) if lb is not None else trivial_word(i)
    right = StringWord(_max_path_from(cd, rb)) if rb is not None else trivial_word(i)
    return concat(cd, left, inverse(right))


def _injective_string(cd, i):
    lb = _left_in_slot(cd, i)
    rb = _right_in_slot(cd, i)
    left = StringWord(_max_path_into(cd, lb)) if lb is not None else trivial_word(i)
    right = StringWord(_max_path_into(cd, rb)) if rb is not None else trivial_word(i)
    return concat(cd, inverse(left), right)


def _hook_tail(cd, i):
    """r_i: the longest inverse string such that eta_i . r_i is a string.

    A trivial tail still remembers which of the two edges at its vertex it
    blocks, via the formal sign: forward extension of 1_u^{+} uses the
    upper edge eta_{u+1}, of 1_u^{-} the lower edge eta_u.
    """
    u = letter_s(cd, (i, 1))
    candidates = [b for b in _out_arrows(cd, u) if b != i]
    if not candidates:
        return trivial_word(u, sign=cd.omega_of(i))
    letters = []
    prev = i
    cur = u
    while True:
        nxt = [b for b in _out_arrows(cd, cur) if b != prev]
        if not nxt:
            break
        prev = nxt[0]
        letters.append((prev, -1))
        cur = _arrow_target(cd, prev)
    return validate(cd, letters)


def _cohook_tail(cd, i):
    """r'_i: the longest direct string such that eta_i^{-1} . r'_i is a string."""
    u = letter_t(cd, (i, 1))
    candidates = [b for b in _in_arrows(cd, u) if b != i]
    if not candidates:
        return trivial_word(u, sign=-cd.omega_of(i))
    letters = []
    prev = i
    cur = u
    while True:
        nxt = [b for b in _in_arrows(cd, cur) if b != prev]
        if not nxt:
            break
        prev = nxt[0]
        letters.append((prev, 1))
        cur = _arrow_source(cd, prev)
    return validate(cd, letters)


_BASIC_CACHE = {}


def basic_strings(cd):
    key = (cd.n, cd.omega)
    if key in _BASIC_CACHE:
        return _BASIC_CACHE[key]
    n = cd.n
    p = tuple(_projective_string(cd, i) for i in range(n + 1))
    q = tuple(_injective_string(cd, i) for i in range(n + 1))
    e = tuple(generator_string(cd, i) for i in range(n + 1))
    r = {i: _hook_tail(cd, i) for i in range(1, n + 1)}
    rp = {i: _cohook_tail(cd, i) for i in range(1, n + 1)}
    tau = {}
    for i in range(1, n + 1):
        inv_rp = inverse(rp[i])
        matches = [
            j
            for j in range(1, n + 1)
            if r[j] == inv_rp
            and (not r[j].is_trivial or r[j].triv_sign == inv_rp.triv_sign)
        ]
        if len(matches) != 1:
            raise AssertionError(f"tail permutation broken at {i}: {matches}")
        tau[i] = matches[0]
    # tau must be a single n-cycle.
    seen, cur = [], 1
    for _ in range(n):
        seen.append(cur)
        cur = tau[cur]
    if cur != 1 or sorted(seen) != list(range(1, n + 1)):
        raise AssertionError(f"tau is not an n-cycle: {tau}")
    tau_inv = {v: k for k, v in tau.items()}
    basics = BasicStrings(p=p, q=q, e=e, r=r, r_prime=rp, tau=tau, tau_inv=tau_inv)
    _BASIC_CACHE[key] = basics
    return basics


def tau_permutation(cd):
    return dict(basic_strings(cd).tau)


# ---------------------------------------------------------------------------
# end data and hooks


@dataclass(frozen=True)
class EndData:
    s_prime: int
    s_sign: int
    t_prime: int
    t_sign: int


def _forward_data(cd, w):
    """The unique (j, sign) with w . eta_j^{sign} a string."""
    if w.is_trivial:
        v = w.triv_vertex
        if not 1 <= v <= cd.n - 1:
            raise StringError("end data needs a locally free string")
        if w.triv_sign == 1:
            return (v + 1, cd.omega_of(v + 1))
        return (v, -cd.omega_of(v))
    sv = word_s(cd, w)
    last = w.letters[-1]
    found = []
    for j in range(1, cd.n + 1):
        for sign in (1, -1):
            cand = (j, sign)
            if letter_t(cd, cand) != sv:
                continue
            if cand[0] == last[0]:
                continue
            found.append(cand)
    if len(found) != 1:
        raise AssertionError(f"end data not unique for {w}: {found}")
    return found[0]


def end_data(cd, w):
    if not is_locally_free(cd, w):
        raise StringError("end data needs a locally free string")
    sp, ss = _forward_data(cd, w)
    tp, ts = _forward_data(cd, inverse(w))
    return EndData(s_prime=sp, s_sign=ss, t_prime=tp, t_sign=ts)


def hook_right(cd, w, sign):
    """w[1] (sign=+1: append eta then the hook tail) or w[-1] (sign=-1:
    append eta^{-1} then the co-hook tail)."""
    basics = basic_strings(cd)
    sp, ss = _forward_data(cd, w)
    if ss != sign:
        raise SignMismatch(f"end sign is {ss}, hook needs {sign}")
    if sign == 1:
        mid = StringWord(((sp, 1),))
        tail = basics.r[sp]
    else:
        mid = StringWord(((sp, -1),))
        tail = basics.r_prime[sp]
    return concat(cd, concat(cd, w, mid), tail)


def hook_left(cd, w, sign):
    return inverse(hook_right(cd, inverse(w), sign))


def hook_extend(cd, w, direction, count=1):
    """Iterated hooks: direction in {'right+', 'left+', 'right-', 'left-'}."""
    ops = {
        "right+": lambda u: hook_right(cd, u, 1),
        "left+": lambda u: hook_left(cd, u, 1),
        "right-": lambda u: hook_right(cd, u, -1),
        "left-": lambda u: hook_left(cd, u, -1),
    }
    if direction not in ops:
        raise StringError(f"unknown hook direction {direction!r}")
    if count < 0:
        raise StringError("count must be >= 0")
    for _ in range(count):
        w = ops[direction](w)
    return w


def classify_weak(cd, w):
    """'preprojective' / 'regular' / 'isotropic' / 'preinjective', by the
    signs with which the two ends extend (isotropic = regular with equal
    end indices)."""
    ed = end_data(cd, w)
    if ed.s_sign == 1 and ed.t_sign == 1:
        return "preprojective"
    if ed.s_sign == -1 and ed.t_sign == -1:
        return "preinjective"
    if ed.s_prime == ed.t_prime:
        return "isotropic"
    return "regular"


# ---------------------------------------------------------------------------
# tau-locally free shape families


def preprojective_string(cd, i, k):
    """[k]p_i[k]."""
    w = basic_strings(cd).p[i]
    w = hook_extend(cd, w, "right+", k)
    w = hook_extend(cd, w, "left+", k)
    return w


def preinjective_string(cd, i, k):
    """[-k]q_i[-k]."""
    w = basic_strings(cd).q[i]
    w = hook_extend(cd, w, "right-", k)
    w = hook_extend(cd, w, "left-", k)
    return w


def regular_string(cd, i, k):
    """r_i[k]."""
    w = basic_strings(cd).r[i]
    return hook_extend(cd, w, "right+", k)


_TAU_LF_CACHE = {}


def _tau_lf_words(cd, max_letters):
    key = (cd.n, cd.omega)
    cached_bound, cached = _TAU_LF_CACHE.get(key, (-1, None))
    if cached_bound >= max_letters:
        return cached
    words = set()
    n = cd.n
    for i in range(n + 1):
        for build in (preprojective_string, preinjective_string):
            k = 0
            while True:
                w = build(cd, i, k)
                if len(w) > max_letters:
                    break
                words.add(w)
                words.add(inverse(w))
                k += 1
    for i in range(1, n + 1):
        k = 0
        while True:
            w = regular_string(cd, i, k)
            if len(w) > max_letters:
                break
            words.add(w)
            words.add(inverse(w))
            k += 1
    _TAU_LF_CACHE[key] = (max_letters, words)
    return words


def is_tau_locally_free(cd, w):
    if not is_locally_free(cd, w):
        raise StringError("tau-local freeness is about locally free strings")
    return w in _tau_lf_words(cd, max(len(w), 1))


# ---------------------------------------------------------------------------
# similarity classes (resign the loop letters)


class SimilarityClass:
    """Orbit of a string under resigning its loop letters.

    Nontrivial classes are stored as a star word: loop letters get sign 0,
    edge letters keep their sign.  Trivial classes keep the formal sign of
    the trivial word, so a trivial class and its inverse are distinct,
    matching the convention for nontrivial short strings.
    """

    __slots__ = ("star", "triv_vertex", "triv_sign")

    def __init__(self, star=(), triv_vertex=None, triv_sign=1):
        self.star = tuple(star)
        self.triv_vertex = triv_vertex
        self.triv_sign = triv_sign if not self.star else 1

    def key(self):
        if not self.star:
            return (0, self.triv_vertex, self.triv_sign)
        return (1, self.star)

    def __eq__(self, other):
        return isinstance(other, SimilarityClass) and self.key() == other.key()

    def __hash__(self):
        return hash(("cls", self.key()))

    def __repr__(self):
        return f"SimilarityClass({self.key()!r})"


def similarity_class(cd, w):
    if w.is_trivial:
        return SimilarityClass((), w.triv_vertex, w.triv_sign)
    loops = (EPS0, cd.n + 1)
    star = tuple((b, 0) if b in loops else (b, s) for b, s in w.letters)
    return SimilarityClass(star)


def class_str(cd, cls):
    if not cls.star:
        return f"1_{cls.triv_vertex}" + ("" if cls.triv_sign == 1 else "-")
    return ".".join(letter_str(cd, (b, s), star=(s == 0)) for b, s in cls.star)


def class_inverse(cls):
    if not cls.star:
        return SimilarityClass((), cls.triv_vertex, -cls.triv_sign)
    return SimilarityClass(tuple((b, -s) for b, s in reversed(cls.star)))


def class_members(cd, cls):
    """All strings with this star word, in deterministic order."""
    if not cls.star:
        return [trivial_word(cls.triv_vertex, cls.triv_sign)]
    slots = [i for i, (b, s) in enumerate(cls.star) if s == 0]
    out = []
    for signs in itertools.product((1, -1), repeat=len(slots)):
        letters = list(cls.star)
        for pos, sg in zip(slots, signs):
            letters[pos] = (letters[pos][0], sg)
        out.append(validate(cd, letters))
    return sorted(out)


def class_rank(cd, cls):
    members = class_members(cd, cls)
    ranks = {rank_vector(cd, m) for m in members}
    if len(ranks) != 1:
        raise AssertionError("similarity class with inconsistent ranks")
    return next(iter(ranks))


def class_is_self_inverse(cls):
    return cls == class_inverse(cls)


# ---------------------------------------------------------------------------
# canonical shapes by first letter and length


def _eta_block_star(cd, i, j):
    """Star letters of eta_{i,j} = eta_{i+1}^{w} ... eta_j^{w} (t=i, s=j)."""
    return tuple((k, cd.omega_of(k)) for k in range(i + 1, j + 1))


def _star_inv(block):
    return tuple((b, -s) for b, s in reversed(block))


def x_form(cd, signs, i, j, k):
    """The canonical similarity class with the given end signs, interval
    indices and winding number; see x_rank for the rank it carries."""
    n = cd.n
    if k < 0:
        raise IndexOutOfRange("k must be >= 0")
    e0 = (EPS0, 0)
    en = (n + 1, 0)
    eta = _eta_block_star(cd, 0, n)
    if signs == ("-", "+"):
        if not (1 <= i <= n and 0 <= j <= n - 1):
            raise IndexOutOfRange(f"x^-+ indices out of range: ({i},{j})")
        period = _eta_block_star(cd, j, n) + (en,) + _star_inv(eta) + (e0,) + _eta_block_star(cd, 0, j)
        if i <= j:
            word = _eta_block_star(cd, i, j) + period * k
        else:
            word = (
                _eta_block_star(cd, i, n) + (en,) + _star_inv(eta) + (e0,) + _eta_block_star(cd, 0, j)
                + period * k
            )
    elif signs == ("-", "-"):
        if not (1 <= i <= n and 1 <= j <= n):
            raise IndexOutOfRange(f"x^-- indices out of range: ({i},{j})")
        period = _star_inv(_eta_block_star(cd, 0, j)) + (e0,) + eta + (en,) + _star_inv(_eta_block_star(cd, j, n))
        word = _eta_block_star(cd, i, n) + (en,) + _star_inv(_eta_block_star(cd, j, n)) + period * k
    elif signs == ("+", "-"):
        if not (0 <= i <= n - 1 and 1 <= j <= n):
            raise IndexOutOfRange(f"x^+- indices out of range: ({i},{j})")
        period = _star_inv(_eta_block_star(cd, 0, j)) + (e0,) + eta + (en,) + _star_inv(_eta_block_star(cd, j, n))
        if i >= j:
            word = _star_inv(_eta_block_star(cd, j, i)) + period * k
        else:
            word = (
                _star_inv(_eta_block_star(cd, 0, i)) + (e0,) + eta + (en,) + _star_inv(_eta_block_star(cd, j, n))
                + period * k
            )
    elif signs == ("+", "+"):
        if not (0 <= i <= n - 1 and 0 <= j <= n - 1):
            raise IndexOutOfRange(f"x^++ indices out of range: ({i},{j})")
        period = _eta_block_star(cd, j, n) + (en,) + _star_inv(eta) + (e0,) + _eta_block_star(cd, 0, j)
        word = _star_inv(_eta_block_star(cd, 0, i)) + (e0,) + _eta_block_star(cd, 0, j) + period * k
    else:
        raise IndexOutOfRange(f"unknown sign pair {signs!r}")
    if not word:
        # Mixed signs with i = j and k = 0 degenerate to a trivial class;
        # the formal sign follows the reading direction of the family.
        return SimilarityClass((), i, 1 if signs == ("-", "+") else -1)
    return SimilarityClass(word)


def x_rank(cd, signs, i, j, k):
    """Rank vector attached to x_form(signs, i, j, k), by the case table."""
    n = cd.n
    rho = cd.rho
    if signs == ("-", "+"):
        if i <= j:
            return vec_add(vec_scale(k, rho), alpha_interval(cd, i, j))
        if i == j + 1:
            return vec_scale(k + 1, rho)
        return vec_sub(vec_scale(k + 1, rho), alpha_interval(cd, j + 1, i - 1))
    if signs == ("-", "-"):
        if i <= j < n:
            return vec_add(vec_scale(k, rho), beta_interval(cd, i, j))
        if i <= j == n:
            return vec_add(vec_scale(k, rho), alpha_interval(cd, i, n))
        if n > i >= j:
            return vec_add(vec_scale(k, rho), beta_interval(cd, j, i))
        return vec_add(vec_scale(k, rho), alpha_interval(cd, j, n))
    if signs == ("+", "-"):
        if i >= j:
            return vec_add(vec_scale(k, rho), alpha_interval(cd, j, i))
        if i == j - 1:
            return vec_scale(k + 1, rho)
        return vec_sub(vec_scale(k + 1, rho), alpha_interval(cd, i + 1, j - 1))
    if signs == ("+", "+"):
        if i <= j < n - 1:
            return vec_sub(vec_scale(k + 1, rho), beta_interval(cd, i + 1, j + 1))
        if i <= j == n - 1:
            return vec_sub(vec_scale(k + 1, rho), alpha_interval(cd, i + 1, n))
        if n - 1 > i >= j:
            return vec_sub(vec_scale(k + 1, rho), beta_interval(cd, j + 1, i + 1))
        return vec_sub(vec_scale(k + 1, rho), alpha_interval(cd, j + 1, n))
    raise IndexOutOfRange(f"unknown sign pair {signs!r}")


# ---------------------------------------------------------------------------
# fibers of the rank map


def root_to_classes(cd, coords):
    """All similarity classes of locally free strings with the given rank.

    Real roots give the class of one shape string and of its inverse (one
    class when the root is long); k*rho gives the 2n classes of the
    isotropic shape strings r_i[nk-1] and their inverses.
    """
    root = is_positive_root(cd, coords)
    if root is None:
        raise NotARoot(f"{coords} is not a positive root")
    basics = basic_strings(cd)
    n = cd.n
    if not root.real:
        k = root.k
        out = []
        for i in range(1, n + 1):
            w = regular_string(cd, i, n * k - 1)
            out.append(similarity_class(cd, w))
            out.append(class_inverse(similarity_class(cd, w)))
        return out
    d = defect(cd, coords)
    if d > 0:
        family, indices = preprojective_string, range(n + 1)
        target = lambda i, k: coxeter_apply(cd, rank_vector(cd, basics.p[i]), power=-k)
    elif d < 0:
        family, indices = preinjective_string, range(n + 1)
        target = lambda i, k: coxeter_apply(cd, rank_vector(cd, basics.q[i]), power=k)
    else:
        family, indices = regular_string, range(1, n + 1)
        target = None
    height = sum(coords)
    k = 0
    while True:
        found = None
        exhausted = True
        for i in indices:
            if target is not None:
                rk = target(i, k)
            else:
                rk = rank_vector(cd, regular_string(cd, i, k))
            if sum(rk) <= height + 1:
                exhausted = False
            if tuple(rk) == tuple(coords):
                found = i
                break
        if found is not None:
            w = family(cd, found, k)
            cls = similarity_class(cd, w)
            inv = class_inverse(cls)
            return [cls] if inv == cls else [cls, inv]
        if exhausted:
            raise AssertionError(f"no shape string found for root {coords}")
        k += 1


# ---------------------------------------------------------------------------
# enumeration


def _extensions(cd, last_letter, at_vertex):
    """Letters x with t(x) = at_vertex, excluding base repetition."""
    out = []
    for base in sorted({EPS0, cd.n + 1} | set(range(1, cd.n + 1))):
        if last_letter is not None and base == last_letter[0]:
            continue
        for sign in (1, -1):
            if letter_t(cd, (base, sign)) == at_vertex:
                out.append((base, sign))
    return out


def enumerate_strings(cd, max_letters, lf_filter="all"):
    """Yield all strings with at most max_letters letters, by length then
    lexicographically.  lf_filter: 'all', 'locally_free', 'tau_locally_free'."""
    if max_letters < 0:
        raise StringError("max_letters must be >= 0")
    predicate = {
        "all": lambda w: True,
        "locally_free": lambda w: is_locally_free(cd, w),
        "tau_locally_free": lambda w: is_locally_free(cd, w) and is_tau_locally_free(cd, w),
    }[lf_filter]

    for v in cd.vertices:
        w = trivial_word(v)
        if predicate(w):
            yield w
    level = []
    for base in sorted({EPS0, cd.n + 1} | set(range(1, cd.n + 1))):
        for sign in (1, -1):
            level.append(((base, sign),))
    level.sort()
    length = 1
    while length <= max_letters and level:
        for letters in level:
            w = StringWord(letters)
            if predicate(w):
                yield w
        nxt = []
        for letters in level:
            at = letter_s(cd, letters[-1])
            for ext in _extensions(cd, letters[-1], at):
                nxt.append(letters + (ext,))
        nxt.sort()
        level = nxt
        length += 1


def enumerate_bands(cd, max_h):
    """Primitive bands up to rotation, for winding numbers h <= max_h.

    Every primitive band is, up to loop-letter signs, a power of the basic
    cycle eps0 . eta-up . eps_n . eta-down; the sign pattern along the 2h
    loop slots determines the band, and primitivity says the pattern is
    not a proper cyclic power.
    """
    if max_h < 0:
        raise StringError("max_h must be >= 0")
    n = cd.n
    chain_down = _eta_block_star_signed(cd)          # t = 0, s = n
    chain_up = tuple(letter_inverse(x) for x in reversed(chain_down))
    out = []
    for h in range(1, max_h + 1):
        seen = set()
        for signs in itertools.product((1, -1), repeat=2 * h):
            letters = []
            for p in range(h):
                letters.append((EPS0, signs[2 * p]))
                letters.extend(chain_down)
                letters.append((n + 1, signs[2 * p + 1]))
                letters.extend(chain_up)
            try:
                word = validate(cd, letters)
            except StringError:
                continue
            band = Band(cd, word)
            if not band.is_primitive():
                continue
            if band in seen:
                continue
            seen.add(band)
            out.append(band)
        out.sort(key=lambda b: b.canonical_letters())
        yield from [b for b in out if b.h(cd) == h]
        out = []


def _eta_block_star_signed(cd):
    """Letters of the full down-chain word eta_{0,n} (t = 0, s = n)."""
    return tuple((k, cd.omega_of(k)) for k in range(1, cd.n + 1))


def stable_band(cd):
    """The band eta^{-1} . eps0^{-1} . eta . eps_n^{-1} used for the
    isotropic evaluations."""
    eta = _eta_block_star_signed(cd)
    eta_inv = tuple(letter_inverse(x) for x in reversed(eta))
    letters = eta_inv + ((EPS0, -1),) + eta + ((cd.n + 1, -1),)
    return Band(cd, validate(cd, letters))
