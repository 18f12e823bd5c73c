"""
Canonical polygon output.

The CSV carries the exact vertices (dim E_i, H(E_i)²) as strings. The SVG
plots deg E_i = −log H(E_i) against dim E_i; the floating values are used
for drawing only and the exact vertex list is embedded in the metadata.
Rendering is deterministic: same filtration, byte-identical file.
"""
import logging
from pathlib import Path
from typing import List, Union

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402
import pandas as pd  # noqa: E402

from src.core.posreal import epr_format, epr_log  # noqa: E402
from src.lattice.filtration import Filtration  # noqa: E402

logger = logging.getLogger(__name__)

PathLike = Union[str, Path]

SVG_HASHSALT = "slopeforge"


def polygon_frame(filtration: Filtration) -> pd.DataFrame:
    """Exact vertices, one row per E_i (E_0 = 0 included)."""
    return pd.DataFrame(
        {
            "dim": [d for d, _ in filtration.polygon],
            "sq_height": [epr_format(v) for _, v in filtration.polygon],
        }
    )


def write_polygon_csv(filtration: Filtration, path: PathLike) -> pd.DataFrame:
    frame = polygon_frame(filtration)
    frame.to_csv(path, index=False, lineterminator="\n")
    logger.info(f"Wrote {len(frame)} polygon vertices to {path}")
    return frame


def degrees(filtration: Filtration) -> np.ndarray:
    """deg E_i = −log H(E_i) in double precision."""
    return np.array([-0.5 * epr_log(v) for _, v in filtration.polygon], dtype=float)


def _vertex_labels(filtration: Filtration) -> List[str]:
    return [f"({d}, {epr_format(v)})" for d, v in filtration.polygon]


def write_polygon_svg(filtration: Filtration, path: PathLike, title: str = "") -> None:
    dims = np.array([d for d, _ in filtration.polygon], dtype=float)
    ys = degrees(filtration)
    labels = _vertex_labels(filtration)

    with plt.rc_context({"svg.hashsalt": SVG_HASHSALT, "svg.fonttype": "none"}):
        fig, ax = plt.subplots(figsize=(5, 4))
        try:
            ax.plot(dims, ys, marker="o", color="black", gid="canonical-polygon")
            for x, y, label in zip(dims, ys, labels):
                ax.annotate(label, (x, y), textcoords="offset points", xytext=(4, 6), fontsize=7)
            ax.set_xlabel("rank")
            ax.set_ylabel("deg = -log H")
            ax.set_xticks(dims)
            ax.set_title(title or (filtration.lattice.label or "canonical polygon"))
            ax.grid(True, linewidth=0.3)
            fig.savefig(
                path,
                format="svg",
                metadata={
                    "Date": None,
                    "Creator": "slopeforge",
                    "Description": "vertices (dim, H^2): " + " ".join(labels),
                },
            )
        finally:
            plt.close(fig)
    logger.info(f"Wrote polygon plot to {path}")
