import pytest

from torsion_density.nilpotent import NilAlgebra, heisenberg


def pytest_configure(config):
    config._acceptance_log = []


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    log = getattr(config, "_acceptance_log", [])
    if not log:
        return
    terminalreporter.section("acceptance criteria")
    for number, ok, detail in sorted(log, key=lambda t: t[0]):
        terminalreporter.write_line(f"criterion {number:>2}: {'PASS' if ok else 'FAIL'}  {detail}")


@pytest.fixture
def acceptance_log(request):
    return request.config._acceptance_log


def free_step4():
    """Free nilpotent algebra of rank 2 and step 4 in a Hall basis:
    X, Y, [X,Y], [X,[X,Y]], [Y,[X,Y]], [X,[X,[X,Y]]], [Y,[X,[X,Y]]], [Y,[Y,[X,Y]]]."""
    c = {(0, 1, 2): 1, (0, 2, 3): 1, (1, 2, 4): 1, (0, 3, 5): 1, (1, 3, 6): 1, (0, 4, 6): 1, (1, 4, 7): 1}
    return NilAlgebra(8, c, ["X", "Y", "XY", "XXY", "YXY", "XXXY", "YXXY", "YYXY"])


def free_step3():
    c = {(0, 1, 2): 1, (0, 2, 3): 1, (1, 2, 4): 1}
    return NilAlgebra(5, c, ["X", "Y", "XY", "XXY", "YXY"])


def free_step2_rank3():
    c = {(0, 1, 3): 1, (0, 2, 4): 1, (1, 2, 5): 1}
    return NilAlgebra(6, c)


def filiform4():
    """[X1, X2] = X3, [X1, X3] = X4: dimension 4, step 3."""
    return NilAlgebra(4, {(0, 1, 2): 1, (0, 2, 3): 1})


def upper_triangular_pairs(k):
    """Index pairs (i, j), i < j, of the strictly upper triangular k x k
    matrices, ordered by distance from the diagonal."""
    return sorted(((i, j) for i in range(k) for j in range(i + 1, k)), key=lambda p: (p[1] - p[0], p[0]))


def strictly_upper(k):
    """n_k with basis E_ij, [E_ij, E_jl] = E_il; step k - 1."""
    pairs = upper_triangular_pairs(k)
    index = {p: n for n, p in enumerate(pairs)}
    c = {}
    for (i, j) in pairs:
        for (j2, l) in pairs:
            if j == j2:
                c[(index[(i, j)], index[(j2, l)], index[(i, l)])] = 1
    return NilAlgebra(len(pairs), c)


@pytest.fixture
def h3():
    return heisenberg(1)


@pytest.fixture
def h2():
    return heisenberg(2)
