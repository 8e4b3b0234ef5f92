"""Root-system linear algebra for affine type C with minimal symmetrizer.

The index set is I = {0, ..., n}.  The Cartan matrix is the affine C-type
one (double bonds at both ends), the symmetrizer is diag(2, 1, ..., 1, 2),
and an orientation of the underlying diagram is recorded as a sign word
``omega`` of length n: omega[j-1] = +1 iff the edge arrow eta_j points to
the left, i.e. from vertex j to vertex j-1.  Externally orientations are
written over the alphabet {L, R} with L meaning +1.

From this data we derive the non-symmetric bilinear form R (the Euler form
of the associated algebra), the Coxeter transformation -R^{-1}R^t, the
defect linear form <-, rho>, and the classified list of positive roots
k*rho +/- alpha_{ij}, k*rho +/- beta_{ij}, k*rho.
"""

from dataclasses import dataclass
from fractions import Fraction

from . import linalg


class CartanError(ValueError):
    pass


def parse_orientation(n, orientation):
    """Accept 'LRRL...' strings or iterables of +-1; return a sign tuple."""
    if isinstance(orientation, str):
        signs = []
        for ch in orientation:
            if ch == "L":
                signs.append(1)
            elif ch == "R":
                signs.append(-1)
            else:
                raise CartanError(f"orientation letters must be L or R, got {ch!r}")
        omega = tuple(signs)
    else:
        omega = tuple(int(x) for x in orientation)
        if any(x not in (1, -1) for x in omega):
            raise CartanError("orientation signs must be +1 or -1")
    if len(omega) != n:
        raise CartanError(f"orientation must have length n={n}, got {len(omega)}")
    return omega


def orientation_str(omega):
    return "".join("L" if s == 1 else "R" for s in omega)


def all_orientations(n):
    """All 2^n orientations in lexicographic L<R order."""
    out = []
    for bits in range(2 ** n):
        out.append(tuple(1 if (bits >> (n - 1 - k)) & 1 == 0 else -1 for k in range(n)))
    return out


@dataclass(frozen=True)
class CartanData:
    """Immutable Cartan/orientation package for one (n, omega)."""

    n: int
    omega: tuple
    C: tuple
    D: tuple
    R: tuple
    coxeter: tuple
    coxeter_inv: tuple

    @property
    def vertices(self):
        return range(self.n + 1)

    @property
    def rho(self):
        return tuple([1] + [2] * (self.n - 1) + [1])

    def omega_of(self, j):
        """Sign of the edge arrow eta_j, 1 <= j <= n."""
        return self.omega[j - 1]

    def sinks(self):
        """Sinks of the loopless diagram quiver, in increasing order."""
        out = []
        for v in self.vertices:
            if v == 0:
                if self.omega_of(1) == 1:
                    out.append(v)
            elif v == self.n:
                if self.omega_of(self.n) == -1:
                    out.append(v)
            elif self.omega_of(v) == -1 and self.omega_of(v + 1) == 1:
                out.append(v)
        return out

    def sources(self):
        out = []
        for v in self.vertices:
            if v == 0:
                if self.omega_of(1) == -1:
                    out.append(v)
            elif v == self.n:
                if self.omega_of(self.n) == 1:
                    out.append(v)
            elif self.omega_of(v) == 1 and self.omega_of(v + 1) == -1:
                out.append(v)
        return out

    def to_json_dict(self):
        return {
            "n": self.n,
            "omega": orientation_str(self.omega),
            "C": [list(r) for r in self.C],
            "D": [list(r) for r in self.D],
            "R": [list(r) for r in self.R],
            "coxeter": [list(r) for r in self.coxeter],
        }


def build_cartan(n, orientation):
    """Construct CartanData for given rank n >= 2 and orientation."""
    if n < 2:
        raise CartanError(f"rank must be at least 2, got n={n}")
    omega = parse_orientation(n, orientation)

    C = [[0] * (n + 1) for _ in range(n + 1)]
    for i in range(n + 1):
        C[i][i] = 2
    C[1][0] = -2
    C[n - 1][n] = -2
    for i in range(n + 1):
        for j in range(n + 1):
            if abs(i - j) == 1 and C[i][j] == 0:
                C[i][j] = -1
    D = [[0] * (n + 1) for _ in range(n + 1)]
    for i in range(n + 1):
        D[i][i] = 2 if i in (0, n) else 1

    R = [[0] * (n + 1) for _ in range(n + 1)]
    for i in range(n + 1):
        R[i][i] = D[i][i]
    for k in range(1, n + 1):
        d = 2 if (k == 1 or k == n) else 1
        if omega[k - 1] == 1:
            # eta_k: k -> k-1, so the form pairs alpha_k with alpha_{k-1}.
            R[k][k - 1] = -d
        else:
            R[k - 1][k] = -d

    r_frac = linalg.mat(R)
    cox = linalg.mat_neg(linalg.mat_mul(linalg.inverse(r_frac), linalg.transpose(r_frac)))
    if not linalg.is_integral(cox):
        raise AssertionError("Coxeter matrix is not integral; construction of R is broken")
    cox_int = tuple(tuple(int(x) for x in row) for row in cox)
    cox_inv = linalg.inverse(linalg.mat(cox_int))
    if not linalg.is_integral(cox_inv):
        raise AssertionError("inverse Coxeter matrix is not integral")
    cox_inv_int = tuple(tuple(int(x) for x in row) for row in cox_inv)

    return CartanData(
        n=n,
        omega=omega,
        C=tuple(tuple(r) for r in C),
        D=tuple(tuple(r) for r in D),
        R=tuple(tuple(r) for r in R),
        coxeter=cox_int,
        coxeter_inv=cox_inv_int,
    )


def euler_form(cd, a, b):
    """The bilinear form a^T R b on integer vectors of length n+1."""
    if len(a) != cd.n + 1 or len(b) != cd.n + 1:
        raise CartanError("vector length must be n+1")
    total = 0
    for i, row in enumerate(cd.R):
        ai = a[i]
        if ai:
            total += ai * sum(row[j] * b[j] for j in range(cd.n + 1))
    return total


def coxeter_matrix(cd):
    return cd.coxeter


def coxeter_apply(cd, v, power=1):
    m = cd.coxeter if power >= 0 else cd.coxeter_inv
    out = tuple(v)
    for _ in range(abs(power)):
        out = tuple(sum(m[i][j] * out[j] for j in range(cd.n + 1)) for i in range(cd.n + 1))
    return out


def defect(cd, a):
    """The linear form <a, rho>; its sign splits roots into three classes."""
    return euler_form(cd, a, cd.rho)


def defect_vector(cd):
    """R * rho, which equals 2*(sum of sinks - sum of sources) coordinatewise."""
    return linalg.mat_vec(linalg.mat(cd.R), cd.rho)


def alpha_interval(cd, i, j):
    """alpha_{ij} = alpha_i + ... + alpha_j for 1 <= i <= j <= n."""
    if not (1 <= i <= j <= cd.n):
        raise CartanError(f"alpha indices out of range: ({i},{j})")
    return tuple(1 if i <= v <= j else 0 for v in cd.vertices)


def beta_interval(cd, i, j):
    """beta_{ij} = alpha_{i,n} + alpha_{j,n-1} for 1 <= i <= j <= n-1."""
    if not (1 <= i <= j <= cd.n - 1):
        raise CartanError(f"beta indices out of range: ({i},{j})")
    a = alpha_interval(cd, i, cd.n)
    b = alpha_interval(cd, j, cd.n - 1)
    return tuple(x + y for x, y in zip(a, b))


def vec_add(a, b):
    return tuple(x + y for x, y in zip(a, b))


def vec_sub(a, b):
    return tuple(x - y for x, y in zip(a, b))


def vec_scale(k, a):
    return tuple(k * x for x in a)


@dataclass(frozen=True)
class Root:
    """A positive root together with its classification tags.

    family is one of 'alpha+', 'beta+', 'iso', 'alpha-', 'beta-'; (i, j) are
    the interval indices (0, 0) for isotropic roots; k is the rho
    coefficient.  Long roots are exactly k*rho +- beta_{ii} and
    k*rho +- alpha_{nn}: those are the classes fixed by word inversion.
    """

    coords: tuple
    k: int
    family: str
    i: int
    j: int
    real: bool
    long: bool
    defect: int

    def to_json_dict(self):
        return {
            "coords": list(self.coords),
            "real": self.real,
            "long": self.long,
            "defect": self.defect,
        }


_FAMILY_ORDER = ("alpha+", "beta+", "iso", "alpha-", "beta-")


def _make_root(cd, coords, k, family, i, j):
    real = family != "iso"
    if family in ("alpha+", "alpha-"):
        is_long = i == j == cd.n
    elif family in ("beta+", "beta-"):
        is_long = i == j
    else:
        is_long = False
    return Root(
        coords=coords,
        k=k,
        family=family,
        i=i,
        j=j,
        real=real,
        long=is_long,
        defect=defect(cd, coords),
    )


def enumerate_positive_roots(cd, k_max):
    """All positive roots with rho-coefficient <= k_max, in the fixed
    lexicographic (k, family, i, j) order."""
    if k_max < 0:
        raise CartanError("k_max must be >= 0")
    n = cd.n
    rho = cd.rho
    out = []
    for k in range(k_max + 1):
        base = vec_scale(k, rho)
        for family in _FAMILY_ORDER:
            if family == "iso":
                if k >= 1:
                    out.append(_make_root(cd, base, k, "iso", 0, 0))
                continue
            sign = 1 if family.endswith("+") else -1
            if sign == -1 and k == 0:
                continue
            if family.startswith("alpha"):
                pairs = [(i, j) for i in range(1, n + 1) for j in range(i, n + 1)]
                vec_of = alpha_interval
            else:
                pairs = [(i, j) for i in range(1, n) for j in range(i, n)]
                vec_of = beta_interval
            for i, j in pairs:
                delta = vec_of(cd, i, j)
                coords = vec_add(base, vec_scale(sign, delta))
                out.append(_make_root(cd, coords, k, family, i, j))
    seen = set()
    for r in out:
        if r.coords in seen:
            raise AssertionError(f"duplicate root generated: {r}")
        seen.add(r.coords)
    return out


def _match_interval_pattern(cd, x):
    """Classify a nonnegative vector x as alpha_{ij}, beta_{ij} or neither."""
    n = cd.n
    if x[0] != 0:
        return None
    support = [v for v in range(1, n + 1) if x[v] != 0]
    if not support:
        return None
    lo, hi = support[0], support[-1]
    if all(x[v] == 1 for v in range(lo, hi + 1)) and hi - lo + 1 == len(support):
        return ("alpha", lo, hi)
    # beta_{ij}: ones on [i, j-1], twos on [j, n-1], one at n.
    if x[n] != 1:
        return None
    if hi != n:
        return None
    i = lo
    two_positions = [v for v in range(1, n) if x[v] == 2]
    one_positions = [v for v in range(1, n) if x[v] == 1]
    if not two_positions:
        return None
    j = two_positions[0]
    if two_positions != list(range(j, n)):
        return None
    if one_positions != list(range(i, j)):
        return None
    if not (1 <= i <= j <= n - 1):
        return None
    return ("beta", i, j)


def is_positive_root(cd, coords):
    """Return the classified Root if coords is a positive root, else None."""
    coords = tuple(coords)
    if len(coords) != cd.n + 1 or any(c < 0 for c in coords) or not any(coords):
        return None
    k = coords[0]
    rho = cd.rho
    base = vec_scale(k, rho)
    x = vec_sub(coords, base)
    if all(v == 0 for v in x):
        return _make_root(cd, coords, k, "iso", 0, 0) if k >= 1 else None
    if all(v >= 0 for v in x):
        m = _match_interval_pattern(cd, x)
        if m:
            fam, i, j = m
            return _make_root(cd, coords, k, fam + "+", i, j)
        return None
    if all(v <= 0 for v in x) and k >= 1:
        m = _match_interval_pattern(cd, tuple(-v for v in x))
        if m:
            fam, i, j = m
            return _make_root(cd, coords, k, fam + "-", i, j)
    return None


def roots_to_json(cd, roots):
    return {
        **cd.to_json_dict(),
        "roots": [r.to_json_dict() for r in roots],
    }
