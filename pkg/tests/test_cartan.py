from fractions import Fraction

import pytest

from affstr import linalg
from affstr.cartan import (
    CartanError,
    all_orientations,
    build_cartan,
    coxeter_apply,
    defect,
    defect_vector,
    enumerate_positive_roots,
    euler_form,
    is_positive_root,
    parse_orientation,
)


def unit(n, i):
    return tuple(1 if v == i else 0 for v in range(n + 1))


def test_cartan_matrix_n2():
    cd = build_cartan(2, "LL")
    assert cd.C == ((2, -1, 0), (-2, 2, -2), (0, -1, 2))
    assert cd.D == ((2, 0, 0), (0, 1, 0), (0, 0, 2))


def test_orientation_parsing_example_n5():
    # Omega = {(0,1),(2,1),(3,2),(4,3),(4,5)} corresponds to LRRRL.
    omega = parse_orientation(5, "LRRRL")
    assert omega == (1, -1, -1, -1, 1)
    cd = build_cartan(5, omega)
    assert cd.sinks() == [0, 4]
    assert cd.sources() == [1, 5]


def test_bad_inputs_rejected():
    with pytest.raises(CartanError):
        build_cartan(1, "L")
    with pytest.raises(CartanError):
        build_cartan(3, "LL")
    with pytest.raises(CartanError):
        parse_orientation(2, "LX")


@pytest.mark.parametrize("n", [2, 3, 4, 5, 6])
def test_r_symmetrization_and_coxeter_all_orientations(n):
    for omega in all_orientations(n):
        cd = build_cartan(n, omega)
        R = linalg.mat(cd.R)
        DC = linalg.mat_mul(linalg.mat(cd.D), linalg.mat(cd.C))
        assert linalg.mat_eq(linalg.mat_add(R, linalg.transpose(R)), DC)
        # Coxeter matrix is integral by construction; it must fix rho.
        assert coxeter_apply(cd, cd.rho) == cd.rho
        ident = tuple(tuple(int(x) for x in row) for row in linalg.identity(n + 1))
        prod = linalg.mat_mul(linalg.mat(cd.coxeter), linalg.mat(cd.coxeter_inv))
        assert tuple(tuple(int(x) for x in r) for r in prod) == ident


def test_euler_form_diagonal_and_distance():
    cd = build_cartan(4, "LRLR")
    assert euler_form(cd, unit(4, 0), unit(4, 0)) == 2
    assert euler_form(cd, unit(4, 4), unit(4, 4)) == 2
    for i in (1, 2, 3):
        assert euler_form(cd, unit(4, i), unit(4, i)) == 1
    for i in range(5):
        for j in range(5):
            if abs(i - j) >= 2:
                assert euler_form(cd, unit(4, i), unit(4, j)) == 0


def test_rho_is_isotropic_via_direct_arithmetic():
    for n in (2, 3, 5):
        for omega in ("L" * n, "R" * n, "LR" * (n // 2) + "L" * (n % 2)):
            cd = build_cartan(n, omega)
            rho = cd.rho
            # C * rho = 0, hence rho^T R rho = rho^T (DC) rho / 2 = 0.
            c_rho = linalg.mat_vec(linalg.mat(cd.C), rho)
            assert all(x == 0 for x in c_rho)
            assert euler_form(cd, rho, rho) == 0


def test_defect_against_sink_source_formula():
    for n in (2, 3, 4, 5):
        for omega in all_orientations(n):
            cd = build_cartan(n, omega)
            expected = [0] * (n + 1)
            for s in cd.sinks():
                expected[s] += 2
            for s in cd.sources():
                expected[s] -= 2
            assert list(defect_vector(cd)) == expected
            for i in range(n + 1):
                assert defect(cd, unit(n, i)) == expected[i]


def test_defect_example_n5():
    cd = build_cartan(5, "LRRRL")
    assert defect(cd, unit(5, 0)) == 2
    assert defect(cd, unit(5, 1)) == -2
    assert defect(cd, unit(5, 2)) == 0
    assert defect(cd, cd.rho) == 0
    # defect(a + rho) = defect(a)
    a = (3, 1, 4, 1, 5, 9)
    shifted = tuple(x + r for x, r in zip(a, cd.rho))
    assert defect(cd, shifted) == defect(cd, a)


def test_finite_c2_roots_at_k0():
    cd = build_cartan(2, "LL")
    roots = [r for r in enumerate_positive_roots(cd, 0)]
    coords = {r.coords for r in roots}
    # The textbook positive roots of finite C2 sitting at rho-coefficient 0.
    assert coords == {(0, 1, 0), (0, 0, 1), (0, 1, 1), (0, 2, 1)}


def test_root_enumeration_tags():
    cd = build_cartan(2, "LR")
    roots = enumerate_positive_roots(cd, 2)
    by_coords = {r.coords: r for r in roots}
    rho = cd.rho
    assert by_coords[rho].real is False
    assert by_coords[rho].defect == 0
    assert by_coords[tuple(2 * x for x in rho)].real is False
    # k*rho - alpha_{ij} stays nonnegative for k >= 1.
    for r in roots:
        assert all(c >= 0 for c in r.coords)
    # Real roots never equal a multiple of rho.
    for r in roots:
        if r.real:
            assert r.coords not in {rho, tuple(2 * x for x in rho)}


def test_long_short_tagging():
    # Long roots are the self-paired classes: k*rho +- beta_{ii} and
    # k*rho +- alpha_{nn}; in particular alpha_0 = rho - beta_11 is long.
    cd = build_cartan(2, "LL")
    roots = enumerate_positive_roots(cd, 1)
    by_coords = {r.coords: r for r in roots}
    assert by_coords[(0, 0, 1)].long is True      # alpha_2 = alpha_nn
    assert by_coords[(0, 2, 1)].long is True      # beta_11
    assert by_coords[(0, 1, 0)].long is False     # alpha_1
    assert by_coords[(0, 1, 1)].long is False     # alpha_12
    assert by_coords[(1, 0, 0)].long is True      # alpha_0 = rho - beta_11
    # Norm oracle: ||a||^2 = a^T (DC) a equals 4 exactly for long roots.
    DC = linalg.mat_mul(linalg.mat(cd.D), linalg.mat(cd.C))
    for r in roots:
        if not r.real:
            continue
        norm = linalg.vec_mat_vec(r.coords, DC, r.coords)
        assert norm in (2, 4)
        assert r.long == (norm == 4)


def test_defect_trichotomy_partitions():
    for n in (2, 3, 4):
        for omega in all_orientations(n):
            cd = build_cartan(n, omega)
            roots = enumerate_positive_roots(cd, 2)
            for r in roots:
                if not r.real:
                    assert r.defect == 0
            kinds = {(r.defect > 0, r.defect == 0, r.defect < 0) for r in roots}
            assert all(sum(k) == 1 for k in kinds)


def test_is_positive_root_roundtrip():
    for n in (2, 3, 4):
        cd = build_cartan(n, "L" * n)
        roots = enumerate_positive_roots(cd, 2)
        for r in roots:
            back = is_positive_root(cd, r.coords)
            assert back is not None
            assert back.family == r.family and (back.i, back.j) == (r.i, r.j)
        assert is_positive_root(cd, tuple([0] * (n + 1))) is None
        assert is_positive_root(cd, tuple([3] + [0] * n)) is None


def test_coxeter_orbit_of_preprojective_stays_rooted():
    cd = build_cartan(3, "LRL")
    roots = enumerate_positive_roots(cd, 3)
    pre = [r for r in roots if r.defect > 0]
    assert pre
    for r in pre[:6]:
        v = r.coords
        for _ in range(3):
            v = coxeter_apply(cd, v, power=-1)
            assert is_positive_root(cd, v) is not None
