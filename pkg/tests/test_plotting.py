from __future__ import annotations

from modpchain.codim0 import check_grid_bound
from modpchain.generate import random_1chain, random_grid
from modpchain.plotting import plot_grid, plot_repair, plot_sweep, write_tsv
from modpchain.repair import repair


def test_repair_figure_is_reproducible(tmp_path):
    K, T = random_1chain(3, vertices=5, edges=9, coeff_range=9)
    _, cert = repair(T, 5)
    a, b = tmp_path / "a.png", tmp_path / "b.png"
    plot_repair(cert, a)
    plot_repair(cert, b)
    assert a.read_bytes() == b.read_bytes() and a.read_bytes()[:4] == b"\x89PNG"


def test_grid_figures(tmp_path):
    for dims in [(6,), (4, 5), (3, 3, 3)]:
        plot_grid(random_grid(1, dims, 6), 3, tmp_path / f"g{len(dims)}.png")
        assert (tmp_path / f"g{len(dims)}.png").stat().st_size > 0
    rows = []
    for i in range(5):
        r = check_grid_bound(random_grid(i, (4, 4), 9), 3)
        rows.append({"p": 3, "pmass_boundary": r.rhs / 2, "select_boundary_mass": r.lhs})
    plot_sweep(rows, tmp_path / "s.png")
    assert (tmp_path / "s.png").stat().st_size > 0


def test_tsv(tmp_path):
    write_tsv(tmp_path / "t.tsv", ["a", "b"], [[1, "x y"], [2, "3/4"]])
    assert (tmp_path / "t.tsv").read_text() == "a\tb\n1\tx y\n2\t3/4\n"
