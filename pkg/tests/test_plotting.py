import numpy as np
import pytest

from recmap.image import png_bytes
from recmap.plotting import render_heatmap, plot_table
from recmap.recoverability import CellResult, EvalTable, map_from_grid


def test_all_true_map_renders_solid_high_color_with_rim_boundary():
    grid = np.ones((90, 90), dtype=bool)
    m = map_from_grid(grid, 0.9)
    img = render_heatmap(grid.astype(float), boundary=(m.beta_max, m.alpha_max))
    px = img.pixels
    # interior cells all carry the high end of the ramp
    assert tuple(px[40, 200]) == (248, 220, 72)
    # boundary polyline hugs the outer frame: red pixels near the top edge
    assert (px[6:12] == (220, 50, 47)).all(axis=2).any()


def test_rectangle_map_shows_step():
    grid = np.zeros((90, 90), dtype=bool)
    grid[:45, :45] = True
    m = map_from_grid(grid, 0.9)
    img = render_heatmap(grid.astype(float), boundary=(m.beta_max, m.alpha_max))
    values = img.pixels
    low = tuple(values[30 + 6, 30 + 300])  # alpha large, beta large area
    assert low == (16, 28, 78)


def test_render_deterministic_bytes():
    rng = np.random.default_rng(81)
    values = rng.random((90, 90))
    a = png_bytes(render_heatmap(values))
    b = png_bytes(render_heatmap(values))
    assert a == b


def test_plot_table_unknown_channel(tmp_path):
    cells = [
        CellResult(alpha=a, beta=b, n_images=1, psnr=30, ssim=0.9,
                   psnr_worst=25, ssim_worst=0.8, ocr_digit=1.0, ocr_plate=1.0)
        for a in range(2)
        for b in range(2)
    ]
    table = EvalTable(cells, seed=0, grid_max=1, easy_n=1, hard_n=1, easy_cutoff=60)
    with pytest.raises(ValueError):
        plot_table(table, "nonsense", tmp_path / "x.png")
