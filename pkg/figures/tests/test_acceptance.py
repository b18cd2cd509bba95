"""Acceptance for the renderer: boundary masking and deterministic output."""

import numpy as np
from PIL import Image

from purefig.render import FigureSpec, render


def test_criterion_10_renderer(bbpssw_csv, tmp_path):
    spec_a = FigureSpec(bbpssw_csv, "landscape", tmp_path / "a.png")
    spec_b = FigureSpec(bbpssw_csv, "landscape", tmp_path / "b.png")
    result = render(spec_a)
    render(spec_b)

    below_boundary_cells = 0
    clean = True
    for panel in result.panels:
        for i, w0 in enumerate(panel.w0s):
            for j, ell in enumerate(panel.ells):
                if w0 < 3.0 ** (-1.0 / ell):
                    below_boundary_cells += 1
                    if not panel.values.mask[i, j]:
                        clean = False

    img_a = np.asarray(Image.open(tmp_path / "a.png"))
    img_b = np.asarray(Image.open(tmp_path / "b.png"))
    identical = img_a.shape == img_b.shape and np.array_equal(img_a, img_b)

    ok = clean and identical and below_boundary_cells > 0
    print(
        f"ACCEPTANCE 10: {'PASS' if ok else 'FAIL'} - "
        f"{below_boundary_cells} below-boundary cells all masked; "
        f"re-render pixel-identical ({img_a.shape})"
    )
    assert ok
