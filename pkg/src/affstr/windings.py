"""Windings over the chain-with-loops quiver and their module theory.

A winding is a quiver morphism F from a type A (path) or cyclic host into
the main quiver, locally injective on arrows sharing a source or a target.
Pushing thin (resp. Jordan) representations of the host forward along F
produces the string (resp. band) modules as explicit matrix
representations over Q, on which Hom spaces, extensions and isomorphism
tests are computed exactly.
"""

import itertools
from dataclasses import dataclass
from fractions import Fraction

from . import linalg
from .strings import (
    EPS0,
    Band,
    StringError,
    StringWord,
    classify_weak,
    basic_strings,
    hook_extend,
    inverse,
    is_locally_free,
    letter_endpoints,
    letter_s,
    letter_t,
    rank_vector,
    walk_vertices,
)


class RelationViolation(AssertionError):
    pass


class UnsupportedShape(StringError):
    pass


class NotApplicable(StringError):
    pass


# ---------------------------------------------------------------------------
# hosts and windings


@dataclass(frozen=True)
class HostQuiver:
    """Vertices 0..nv-1; arrows as (src, tgt) pairs.  cyclic marks a
    single-cycle underlying graph, otherwise the graph is a path."""

    nv: int
    arrows: tuple
    cyclic: bool


@dataclass(frozen=True)
class Winding:
    host: HostQuiver
    vlabel: tuple  # host vertex -> main quiver vertex
    alabel: tuple  # host arrow -> letter base

    def fiber(self, cd, vertex):
        return [i for i, v in enumerate(self.vlabel) if v == vertex]

    def to_json_dict(self):
        return {
            "vertices": list(self.vlabel),
            "cyclic": self.host.cyclic,
            "arrows": [
                {"src": s, "tgt": t, "label": lab}
                for (s, t), lab in zip(self.host.arrows, self.alabel)
            ],
        }


def winding_of_string(cd, w):
    """Host of type A with len(w)+1 vertices following the walk of w."""
    verts = walk_vertices(cd, w)
    arrows = []
    labels = []
    if not w.is_trivial:
        for j, letter in enumerate(w.letters, start=1):
            base, sign = letter
            if sign == 1:
                arrows.append((j, j - 1))
            else:
                arrows.append((j - 1, j))
            labels.append(base)
    host = HostQuiver(nv=len(verts), arrows=tuple(arrows), cyclic=False)
    return Winding(host=host, vlabel=tuple(verts), alabel=tuple(labels))


def winding_of_band(cd, b):
    """Host of cyclic type with len(b) vertices; arrow j carries letter j."""
    word = StringWord(b.canonical_letters())
    verts = walk_vertices(cd, word)[:-1]
    l = len(word)
    arrows = []
    labels = []
    for j, letter in enumerate(word.letters, start=1):
        base, sign = letter
        a, bb = (j % l, j - 1) if sign == 1 else (j - 1, j % l)
        arrows.append((a, bb))
        labels.append(base)
    host = HostQuiver(nv=l, arrows=tuple(arrows), cyclic=True)
    return Winding(host=host, vlabel=tuple(verts), alabel=tuple(labels))


def check_winding(cd, F):
    """Verify the quiver-morphism and local-injectivity conditions."""
    for (src, tgt), base in zip(F.host.arrows, F.alabel):
        t, s = letter_endpoints(cd, (base, 1))
        if (F.vlabel[src], F.vlabel[tgt]) != (s, t):
            raise AssertionError("arrow label incompatible with vertex labels")
    for pick in (0, 1):
        incident = {}
        for idx, (src, tgt) in enumerate(F.host.arrows):
            key = (src if pick == 0 else tgt, F.alabel[idx])
            if key in incident:
                raise AssertionError("two arrows sharing an end carry one label")
            incident[key] = idx
    return True


def is_admissible(cd, F):
    """Underlying shape plus trivial automorphisms plus no relation path."""
    check_winding(cd, F)
    for a1, (s1, t1) in enumerate(F.host.arrows):
        for a2, (s2, t2) in enumerate(F.host.arrows):
            if a1 != a2 and s1 == t2 and F.alabel[a1] == F.alabel[a2] in (EPS0, cd.n + 1):
                return False
    return len(morphisms(cd, F, F)) == 1


@dataclass(frozen=True)
class WindingMorphism:
    vmap: tuple
    amap: tuple

    def is_vertex_injective(self):
        return len(set(self.vmap)) == len(self.vmap)

    def image_vertices(self):
        return frozenset(self.vmap)


def _arrows_at(F):
    """vertex -> list of (arrow index, other endpoint, outgoing?)."""
    table = [[] for _ in range(F.host.nv)]
    for idx, (src, tgt) in enumerate(F.host.arrows):
        table[src].append((idx, tgt, True))
        table[tgt].append((idx, src, False))
    return table


def morphisms(cd, Fsrc, Fdst):
    """All winding morphisms Fsrc -> Fdst (label-commuting quiver maps).

    Seeded at source vertex 0 over every label-compatible target vertex;
    the local injectivity of the target forces at most one extension per
    source arrow, so the search is linear per seed.
    """
    dst_at = _arrows_at(Fdst)
    src_at = _arrows_at(Fsrc)
    out = []
    for seed in range(Fdst.host.nv):
        if Fdst.vlabel[seed] != Fsrc.vlabel[0]:
            continue
        vmap = [None] * Fsrc.host.nv
        amap = [None] * len(Fsrc.host.arrows)
        vmap[0] = seed
        stack = [0]
        ok = True
        while stack and ok:
            v = stack.pop()
            for idx, other, outgoing in src_at[v]:
                label = Fsrc.alabel[idx]
                cands = [
                    (didx, dother)
                    for didx, dother, doutgoing in dst_at[vmap[v]]
                    if doutgoing == outgoing and Fdst.alabel[didx] == label
                ]
                if not cands:
                    ok = False
                    break
                assert len(cands) == 1
                didx, dother = cands[0]
                if amap[idx] is not None:
                    if amap[idx] != didx:
                        ok = False
                        break
                    continue
                amap[idx] = didx
                if vmap[other] is None:
                    vmap[other] = dother
                    stack.append(other)
                elif vmap[other] != dother:
                    ok = False
                    break
        if ok and all(x is not None for x in vmap) and all(x is not None for x in amap):
            out.append(WindingMorphism(vmap=tuple(vmap), amap=tuple(amap)))
    return out


def windings_isomorphic(cd, F, G):
    if sorted(F.vlabel) != sorted(G.vlabel):
        return False
    if len(F.host.arrows) != len(G.host.arrows) or sorted(F.alabel) != sorted(G.alabel):
        return False
    return any(m.is_vertex_injective() and len(set(m.vmap)) == G.host.nv
               for m in morphisms(cd, F, G))


# ---------------------------------------------------------------------------
# representations


@dataclass
class HostRep:
    """Representation of a host quiver: dims per vertex, one matrix per arrow."""

    host: HostQuiver
    dims: tuple
    mats: tuple  # one matrix (list of list of Fraction) per arrow

    @staticmethod
    def thin(host):
        dims = tuple(1 for _ in range(host.nv))
        mats = tuple([[Fraction(1)]] for _ in host.arrows)
        return HostRep(host=host, dims=dims, mats=mats)


def jordan_block(m, t):
    """Upper triangular Jordan block: J e_1 = t e_1, J e_j = t e_j + e_{j-1}."""
    mat = linalg.zeros(m, m)
    for i in range(m):
        mat[i][i] = Fraction(t)
        if i + 1 < m:
            mat[i][i + 1] = Fraction(1)
    return mat


def band_host_rep(cd, b, t, m):
    """Jordan rep of the cyclic host: the block sits at the first arrow,
    inverted parameter when the first letter is an inverse letter."""
    if t == 0:
        raise StringError("band parameter must be nonzero")
    F = winding_of_band(cd, b)
    word = StringWord(b.canonical_letters())
    first_sign = word.letters[0][1]
    mats = []
    for idx in range(len(F.host.arrows)):
        if idx == 0:
            mats.append(jordan_block(m, Fraction(t) if first_sign == 1 else 1 / Fraction(t)))
        else:
            mats.append(linalg.identity(m))
    return F, HostRep(host=F.host, dims=tuple(m for _ in range(F.host.nv)), mats=tuple(mats))


@dataclass
class HRep:
    """Representation of the main algebra: dims indexed by 0..n, one exact
    matrix per letter base (loops included)."""

    cd: object
    dims: tuple
    mats: dict  # base -> matrix

    def dim_total(self):
        return sum(self.dims)


def arrow_bases(cd):
    return [EPS0] + list(range(1, cd.n + 1)) + [cd.n + 1]


def pushforward(cd, F, rep):
    """Explicit matrix pushforward of a host representation along F."""
    offsets = []
    dim_at = [0] * (cd.n + 1)
    for hv in range(F.host.nv):
        qv = F.vlabel[hv]
        offsets.append(dim_at[qv])
        dim_at[qv] += rep.dims[hv]
    dims = tuple(dim_at)
    mats = {}
    for base in arrow_bases(cd):
        t, s = letter_endpoints(cd, (base, 1))
        mats[base] = linalg.zeros(dims[t], dims[s])
    for idx, (src, tgt) in enumerate(F.host.arrows):
        base = F.alabel[idx]
        block = rep.mats[idx]
        r0, c0 = offsets[tgt], offsets[src]
        m = mats[base]
        for i in range(len(block)):
            for j in range(len(block[0]) if block else 0):
                m[r0 + i][c0 + j] += block[i][j]
    out = HRep(cd=cd, dims=dims, mats=mats)
    for v in (0, cd.n):
        base = EPS0 if v == 0 else cd.n + 1
        sq = linalg.mat_mul(out.mats[base], out.mats[base])
        if any(x != 0 for row in sq for x in row):
            raise RelationViolation("loop square does not vanish")
    return out


def string_module(cd, w):
    F = winding_of_string(cd, w)
    return pushforward(cd, F, HostRep.thin(F.host))


def band_module(cd, b, t, m):
    F, rep = band_host_rep(cd, b, t, m)
    return pushforward(cd, F, rep)


def module_rank_vector(rep):
    cd = rep.cd
    out = list(rep.dims)
    for v in (0, cd.n):
        if out[v] % 2:
            raise StringError("odd dimension at a loop vertex")
        out[v] //= 2
    return tuple(out)


def is_locally_free_module(rep):
    cd = rep.cd
    for v in (0, cd.n):
        base = EPS0 if v == 0 else cd.n + 1
        if rep.dims[v] % 2:
            return False
        if linalg.rank(rep.mats[base]) != rep.dims[v] // 2:
            return False
    return True


# ---------------------------------------------------------------------------
# Hom, End, Ext and isomorphism over the main algebra


def _hom_system(cd, M, N):
    """Unknowns: block matrices T_v (dims N_v x M_v); equations
    T_{t(a)} M(a) = N(a) T_{s(a)} per arrow."""
    var_offset = []
    total = 0
    for v in range(cd.n + 1):
        var_offset.append(total)
        total += N.dims[v] * M.dims[v]
    rows = []
    for base in arrow_bases(cd):
        t, s = letter_endpoints(cd, (base, 1))
        Ma, Na = M.mats[base], N.mats[base]
        for i in range(N.dims[t]):
            for j in range(M.dims[s]):
                row = [Fraction(0)] * total
                # (T_t M(a))_{ij} = sum_k T_t[i][k] Ma[k][j]
                for k in range(M.dims[t]):
                    row[var_offset[t] + i * M.dims[t] + k] += Ma[k][j]
                # (N(a) T_s)_{ij} = sum_k Na[i][k] T_s[k][j]
                for k in range(N.dims[s]):
                    row[var_offset[s] + k * M.dims[s] + j] -= Na[i][k]
                if any(x != 0 for x in row):
                    rows.append(row)
    return rows, var_offset, total


def hom_basis(cd, M, N):
    """Basis of Hom(M, N) as lists of per-vertex matrices."""
    rows, var_offset, total = _hom_system(cd, M, N)
    if total == 0:
        return []
    kernel = linalg.nullspace(rows) if rows else [
        tuple(1 if i == j else 0 for i in range(total)) for j in range(total)
    ]
    out = []
    for vec in kernel:
        blocks = []
        for v in range(cd.n + 1):
            block = [
                [Fraction(vec[var_offset[v] + i * M.dims[v] + j]) for j in range(M.dims[v])]
                for i in range(N.dims[v])
            ]
            blocks.append(block)
        out.append(blocks)
    return out


def hom_dim(cd, M, N):
    return len(hom_basis(cd, M, N))


def _combo(blocks_list, coeffs):
    out = []
    for v in range(len(blocks_list[0])):
        rows = len(blocks_list[0][v])
        cols = len(blocks_list[0][v][0]) if rows else 0
        acc = [[sum(c * B[v][i][j] for c, B in zip(coeffs, blocks_list)) for j in range(cols)]
               for i in range(rows)]
        out.append(acc)
    return out


def _blocks_invertible(blocks):
    for block in blocks:
        nrows = len(block)
        ncols = len(block[0]) if nrows else 0
        if nrows != ncols:
            return False
        if nrows and linalg.rank(block) != nrows:
            return False
    return True


def modules_isomorphic(cd, M, N):
    """Exact isomorphism test: dims equal and some Q-combination of a Hom
    basis is invertible.  The determinant is a polynomial of total degree
    <= dim in the combination coefficients, so scanning the integer grid
    {0..dim}^k decides nonvanishing exactly; unit vectors and small sums
    are tried first because graph maps usually witness the isomorphism.
    """
    if M.dims != N.dims:
        return False
    if sum(M.dims) == 0:
        return True
    basis = hom_basis(cd, M, N)
    if not basis:
        return False
    k = len(basis)
    deg = sum(M.dims)
    quick = []
    for i in range(k):
        e = [0] * k
        e[i] = 1
        quick.append(tuple(e))
    for i in range(k):
        for j in range(i + 1, k):
            e = [0] * k
            e[i] = 1
            e[j] = 1
            quick.append(tuple(e))
            e2 = list(e)
            e2[j] = -1
            quick.append(tuple(e2))
    tried = set()
    for coeffs in quick:
        tried.add(coeffs)
        if _blocks_invertible(_combo(basis, coeffs)):
            return True
    if k > 4:
        raise UnsupportedShape("isomorphism scan too large; Hom space dim > 4")
    for coeffs in itertools.product(range(deg + 1), repeat=k):
        if coeffs in tried:
            continue
        if _blocks_invertible(_combo(basis, coeffs)):
            return True
    return False


# projectives and extensions ------------------------------------------------


def projective_rep(cd, i):
    """He_i with the path basis: vertex v carries the paths i -> v."""
    paths = [((), i)]  # (arrow base sequence applied left-to-right), endpoint
    frontier = [((), i)]
    while frontier:
        nxt = []
        for seq, v in frontier:
            for b in _out_bases(cd, v):
                if seq and seq[-1] == b:
                    continue
                new = (seq + (b,), letter_t(cd, (b, 1)))
                nxt.append(new)
                paths.append(new)
        frontier = nxt
    by_vertex = [[] for _ in range(cd.n + 1)]
    for seq, v in paths:
        by_vertex[v].append(seq)
    for v in range(cd.n + 1):
        by_vertex[v].sort()
    index = {}
    for v in range(cd.n + 1):
        for pos, seq in enumerate(by_vertex[v]):
            index[seq] = (v, pos)
    dims = tuple(len(by_vertex[v]) for v in range(cd.n + 1))
    mats = {}
    for base in arrow_bases(cd):
        t, s = letter_endpoints(cd, (base, 1))
        m = linalg.zeros(dims[t], dims[s])
        for pos, seq in enumerate(by_vertex[s]):
            if seq and seq[-1] == base:
                continue  # relation or backtrack: product is zero or illegal
            new = seq + (base,)
            if new in index:
                vv, pp = index[new]
                m[pp][pos] = Fraction(1)
        mats[base] = m
    return HRep(cd=cd, dims=dims, mats=mats)


def _out_bases(cd, v):
    out = []
    for base in arrow_bases(cd):
        t, s = letter_endpoints(cd, (base, 1))
        if s == v:
            out.append(base)
    return out


def radical_dims(cd, M):
    """Dimensions of the radical: span of all arrow images at each vertex."""
    rad = []
    for v in range(cd.n + 1):
        cols = []
        for base in arrow_bases(cd):
            t, s = letter_endpoints(cd, (base, 1))
            if t != v:
                continue
            for j in range(M.dims[s]):
                cols.append([M.mats[base][i][j] for i in range(M.dims[v])])
        if not cols:
            rad.append(0)
        else:
            rad.append(linalg.rank([list(r) for r in zip(*cols)]))
    return tuple(rad)


def top_dims(cd, M):
    rad = radical_dims(cd, M)
    return tuple(M.dims[v] - rad[v] for v in range(cd.n + 1))


def ext1_dim(cd, M, N):
    """dim Ext^1(M, N) through a projective presentation of M.

    For modules of projective dimension <= 1 the kernel of the projective
    cover is projective, so dim Hom(P, N) collapses to a weighted sum of
    the dims of N; the alternating sum with dim Hom(M, N) gives Ext^1.
    """
    t_tops = top_dims(cd, M)
    # Multiplicities of each projective in the kernel, via rank bookkeeping:
    # rk(ker) = sum t_i rk(P_i) - rk(M), and kernel tops = kernel multiplicities.
    projs = [projective_rep(cd, i) for i in range(cd.n + 1)]
    # Build the cover explicitly to extract the kernel as a representation.
    cover_cols = {v: [] for v in range(cd.n + 1)}
    maps = []
    for i in range(cd.n + 1):
        if t_tops[i] == 0:
            continue
        gens = _top_lift_vectors(cd, M, i)
        assert len(gens) == t_tops[i]
        for g in gens:
            maps.append((i, g))
    # Basis bookkeeping for P0 = sum P_i^{t_i}.
    offset = []
    total_dims = [0] * (cd.n + 1)
    for i, g in maps:
        offset.append(tuple(total_dims))
        for v in range(cd.n + 1):
            total_dims[v] += projs[i].dims[v]
    phi = {v: linalg.zeros(M.dims[v], total_dims[v]) for v in range(cd.n + 1)}
    for idx, (i, g) in enumerate(maps):
        P = projs[i]
        cols = _projective_map_columns(cd, P, i, M, g)
        for v in range(cd.n + 1):
            for c in range(P.dims[v]):
                for r in range(M.dims[v]):
                    phi[v][r][offset[idx][v] + c] = cols[v][r][c]
    # Surjectivity of the cover.
    for v in range(cd.n + 1):
        if M.dims[v] and linalg.rank(phi[v]) != M.dims[v]:
            raise AssertionError("projective cover is not surjective")
    kernel_dims = tuple(total_dims[v] - M.dims[v] for v in range(cd.n + 1))
    # Kernel as a representation: restrict the big projective to ker(phi).
    P0 = _direct_sum([projs[i] for i, _ in maps], cd)
    ker_basis = {}
    for v in range(cd.n + 1):
        if total_dims[v] == 0:
            ker_basis[v] = []
        elif M.dims[v] == 0:
            ker_basis[v] = [
                tuple(Fraction(1 if i == j else 0) for i in range(total_dims[v]))
                for j in range(total_dims[v])
            ]
        else:
            ker_basis[v] = linalg.nullspace(phi[v])
    for v in range(cd.n + 1):
        assert len(ker_basis[v]) == kernel_dims[v]
    K = _restrict(cd, P0, ker_basis)
    s_tops = top_dims(cd, K)
    hom_mn = hom_dim(cd, M, N)
    return hom_mn - sum(t_tops[v] * N.dims[v] for v in range(cd.n + 1)) + sum(
        s_tops[v] * N.dims[v] for v in range(cd.n + 1)
    )


def _top_lift_vectors(cd, M, i):
    """Column vectors of M(i) spanning a complement of the radical."""
    rad_cols = []
    for base in arrow_bases(cd):
        t, s = letter_endpoints(cd, (base, 1))
        if t != i:
            continue
        for j in range(M.dims[s]):
            rad_cols.append([M.mats[base][r][j] for r in range(M.dims[i])])
    out = []
    current = [list(c) for c in rad_cols]
    base_rank = linalg.rank([list(r) for r in zip(*current)]) if current else 0
    for j in range(M.dims[i]):
        cand = [Fraction(1) if r == j else Fraction(0) for r in range(M.dims[i])]
        trial = current + [cand]
        r = linalg.rank([list(r) for r in zip(*trial)])
        if r > base_rank + len(out):
            out.append(tuple(cand))
            current = trial
    return out


def _projective_map_columns(cd, P, i, M, gen):
    """The map P_i -> M sending e_i to gen: path basis vector p maps to
    M(p) gen."""
    by_vertex = [[] for _ in range(cd.n + 1)]
    paths = [((), i)]
    frontier = [((), i)]
    while frontier:
        nxt = []
        for seq, v in frontier:
            for b in _out_bases(cd, v):
                if seq and seq[-1] == b:
                    continue
                nxt.append((seq + (b,), letter_t(cd, (b, 1))))
        paths.extend(nxt)
        frontier = nxt
    for seq, v in paths:
        by_vertex[v].append(seq)
    for v in range(cd.n + 1):
        by_vertex[v].sort()
    cols = {}
    for v in range(cd.n + 1):
        mat = linalg.zeros(M.dims[v], P.dims[v])
        for pos, seq in enumerate(by_vertex[v]):
            vec = list(gen)
            for b in seq:
                t, s = letter_endpoints(cd, (b, 1))
                vec = [sum(M.mats[b][r][c] * vec[c] for c in range(M.dims[s]))
                       for r in range(M.dims[t])]
            for r in range(M.dims[v]):
                mat[r][pos] = vec[r]
        cols[v] = mat
    return cols


def _direct_sum(reps, cd):
    dims = tuple(sum(r.dims[v] for r in reps) for v in range(cd.n + 1))
    mats = {}
    for base in arrow_bases(cd):
        t, s = letter_endpoints(cd, (base, 1))
        m = linalg.zeros(dims[t], dims[s])
        ro = co = 0
        for r in reps:
            block = r.mats[base]
            for i in range(r.dims[t]):
                for j in range(r.dims[s]):
                    m[ro + i][co + j] = block[i][j]
            ro += r.dims[t]
            co += r.dims[s]
        mats[base] = m
    return HRep(cd=cd, dims=dims, mats=mats)


def direct_sum(cd, reps):
    return _direct_sum(list(reps), cd)


def _restrict(cd, M, basis):
    """Restrict M to the subspaces spanned by basis[v] (each a list of
    coordinate tuples); asserts invariance."""
    mats = {}
    dims = tuple(len(basis[v]) for v in range(cd.n + 1))
    col_mats = {v: [list(col) for col in zip(*basis[v])] if basis[v] else [] for v in range(cd.n + 1)}
    for base in arrow_bases(cd):
        t, s = letter_endpoints(cd, (base, 1))
        m = linalg.zeros(dims[t], dims[s])
        for j, vec in enumerate(basis[s]):
            img = [sum(M.mats[base][r][c] * vec[c] for c in range(M.dims[s]))
                   for r in range(M.dims[t])]
            coords = _solve_in_span(col_mats[t], img)
            if coords is None:
                raise AssertionError("subspace is not arrow-invariant")
            for i in range(dims[t]):
                m[i][j] = coords[i]
        mats[base] = m
    return HRep(cd=cd, dims=dims, mats=mats)


def _solve_in_span(col_mat, vec):
    """Coordinates of vec in the column span, or None."""
    if not col_mat:
        return [] if all(x == 0 for x in vec) else None
    rows = len(col_mat)
    cols = len(col_mat[0])
    aug = [[col_mat[i][j] for j in range(cols)] + [vec[i]] for i in range(rows)]
    red, pivots = linalg.rref(aug)
    if cols in pivots:
        return None
    coords = [Fraction(0)] * cols
    for r, c in enumerate(pivots):
        coords[c] = red[r][cols]
    return coords


# ---------------------------------------------------------------------------
# interval decomposition of coordinate subsets of thin hosts


def iso_type(host, subset):
    """Multiset of connected intervals of a coordinate subset of a thin
    representation of an A-type or cyclic host.  Two coordinate
    restrictions are isomorphic iff these multisets agree."""
    subset = set(subset)
    if not subset <= set(range(host.nv)):
        raise UnsupportedShape("subset out of range")
    if not subset:
        return ()
    unvisited = set(subset)
    comps = []
    while unvisited:
        v = min(unvisited)
        comp = {v}
        stack = [v]
        while stack:
            x = stack.pop()
            for nb in _host_neighbors(host, x):
                if nb in unvisited and nb not in comp:
                    comp.add(nb)
                    stack.append(nb)
        unvisited -= comp
        comps.append(tuple(sorted(comp)))
    return tuple(sorted(comps))


def _host_neighbors(host, v):
    out = []
    for (s, t) in host.arrows:
        if s == v:
            out.append(t)
        elif t == v:
            out.append(s)
    return out


def closed_coordinate_subsets(host, arrow_alive=None):
    """All successor-closed coordinate subsets of a thin host rep: subsets
    S such that every arrow with source in S has its target in S.  For
    cyclic hosts the nonzero scalar on the seam arrow does not change
    closedness, so the combinatorics is orientation-only."""
    n = host.nv
    out = []
    for bits in range(2 ** n):
        sub = {v for v in range(n) if (bits >> v) & 1}
        ok = True
        for (s, t) in host.arrows:
            if s in sub and t not in sub:
                ok = False
                break
        if ok:
            out.append(frozenset(sub))
    return out


# ---------------------------------------------------------------------------
# host-level solvers (representations of the host quiver itself)


def host_hom_basis(host, A, B):
    """Basis of intertwiners between two host representations."""
    var_offset = []
    total = 0
    for v in range(host.nv):
        var_offset.append(total)
        total += B.dims[v] * A.dims[v]
    if total == 0:
        return []
    rows = []
    for idx, (s, t) in enumerate(host.arrows):
        Ma, Na = A.mats[idx], B.mats[idx]
        for i in range(B.dims[t]):
            for j in range(A.dims[s]):
                row = [Fraction(0)] * total
                for k in range(A.dims[t]):
                    row[var_offset[t] + i * A.dims[t] + k] += Ma[k][j]
                for k in range(B.dims[s]):
                    row[var_offset[s] + k * A.dims[s] + j] -= Na[i][k]
                if any(x != 0 for x in row):
                    rows.append(row)
    kernel = linalg.nullspace(rows) if rows else [
        tuple(1 if i == j else 0 for i in range(total)) for j in range(total)
    ]
    out = []
    for vec in kernel:
        blocks = []
        for v in range(host.nv):
            block = [
                [Fraction(vec[var_offset[v] + i * A.dims[v] + j]) for j in range(A.dims[v])]
                for i in range(B.dims[v])
            ]
            blocks.append(block)
        out.append(blocks)
    return out


def host_modules_isomorphic(host, A, B):
    if A.dims != B.dims:
        return False
    if sum(A.dims) == 0:
        return True
    basis = host_hom_basis(host, A, B)
    if not basis:
        return False
    k = len(basis)
    deg = sum(A.dims)
    quick = []
    for i in range(k):
        e = [0] * k
        e[i] = 1
        quick.append(tuple(e))
    for i in range(k):
        for j in range(i + 1, k):
            for sj in (1, -1):
                e = [0] * k
                e[i] = 1
                e[j] = sj
                quick.append(tuple(e))
    tried = set()
    for coeffs in quick:
        tried.add(coeffs)
        if _blocks_invertible(_combo(basis, coeffs)):
            return True
    if k > 4:
        raise UnsupportedShape("isomorphism scan too large; Hom space dim > 4")
    for coeffs in itertools.product(range(deg + 1), repeat=k):
        if coeffs in tried:
            continue
        if _blocks_invertible(_combo(basis, coeffs)):
            return True
    return False


# ---------------------------------------------------------------------------
# the coarse inverse/direct translation on strings


def ar_translate(cd, w):
    """String-level translation: preinjective strings lose one co-hook at
    each end; the simple weakly regular tails advance along tau."""
    basics = basic_strings(cd)
    for i in range(1, cd.n + 1):
        if w == basics.r[i] or inverse(w) == basics.r[i]:
            return basics.r[basics.tau[i]]
    kind = classify_weak(cd, w)
    if kind == "preinjective":
        return hook_extend(cd, hook_extend(cd, w, "right-", 1), "left-", 1)
    raise NotApplicable(f"translate undefined for {kind} string")


def ar_translate_inverse(cd, w):
    basics = basic_strings(cd)
    for i in range(1, cd.n + 1):
        if w == basics.r[i] or inverse(w) == basics.r[i]:
            return basics.r[basics.tau_inv[i]]
    kind = classify_weak(cd, w)
    if kind == "preprojective":
        return hook_extend(cd, hook_extend(cd, w, "right+", 1), "left+", 1)
    raise NotApplicable(f"inverse translate undefined for {kind} string")


# ---------------------------------------------------------------------------
# explicit-matrix brute force (test oracle)


def coordinate_submodule_subsets(rep):
    """All coordinate subsets (per-vertex index sets) closed under every
    arrow matrix; exact span checks, usable up to total dim ~ 12."""
    cd = rep.cd
    axes = [list(range(rep.dims[v])) for v in range(cd.n + 1)]
    vertex_subsets = [
        [frozenset(c) for size in range(len(ax) + 1) for c in itertools.combinations(ax, size)]
        for ax in axes
    ]
    out = []
    for choice in itertools.product(*vertex_subsets):
        ok = True
        for base in arrow_bases(cd):
            t, s = letter_endpoints(cd, (base, 1))
            span_cols = [[Fraction(1) if r == idx else Fraction(0) for idx in sorted(choice[t])]
                         for r in range(rep.dims[t])]
            for j in choice[s]:
                img = [rep.mats[base][r][j] for r in range(rep.dims[t])]
                if _solve_in_span(span_cols, img) is None:
                    ok = False
                    break
            if not ok:
                break
        if ok:
            out.append(choice)
    return out


def restrict_to_subset(rep, choice):
    cd = rep.cd
    basis = {
        v: [tuple(Fraction(1) if r == idx else Fraction(0) for r in range(rep.dims[v]))
            for idx in sorted(choice[v])]
        for v in range(cd.n + 1)
    }
    return _restrict(cd, rep, basis)


def quotient_by_subset(rep, choice):
    cd = rep.cd
    mats = {}
    keep = {v: [r for r in range(rep.dims[v]) if r not in choice[v]] for v in range(cd.n + 1)}
    dims = tuple(len(keep[v]) for v in range(cd.n + 1))
    for base in arrow_bases(cd):
        t, s = letter_endpoints(cd, (base, 1))
        m = linalg.zeros(dims[t], dims[s])
        for jj, j in enumerate(keep[s]):
            for ii, i in enumerate(keep[t]):
                m[ii][jj] = rep.mats[base][i][j]
        mats[base] = m
    return HRep(cd=cd, dims=dims, mats=mats)


def brute_product_value(cd, Mv, Mw, target):
    """(chi_v * chi_w)(target) by enumerating coordinate subspaces of the
    explicit matrices of the target and isomorphism-testing restriction
    and quotient.  Only for small total dimension (test oracle)."""
    total = 0
    for choice in coordinate_submodule_subsets(target):
        sub = restrict_to_subset(target, choice)
        if sub.dims != Mv.dims:
            continue
        quo = quotient_by_subset(target, choice)
        if quo.dims != Mw.dims:
            continue
        if modules_isomorphic(cd, sub, Mv) and modules_isomorphic(cd, quo, Mw):
            total += 1
    return total
