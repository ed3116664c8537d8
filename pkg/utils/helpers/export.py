import io
from pathlib import Path
from typing import List, Optional, Sequence, Union

import numpy as np
import pandas as pd
from jinja2 import Environment, FileSystemLoader, select_autoescape

from utils.helpers.centers import CenterResult
from utils.helpers.extremal import ExtremalBall
from utils.helpers.geometry import Body, CircleLoop, bounding_box
from utils.helpers.logger import logger
from utils.helpers.potential import PotentialSample
from utils.helpers.unfolding import UnfoldedRegion

FIELD_COLUMNS = ["x", "y", "value", "regime", "defined"]
TRAJECTORY_COLUMNS = ["alpha", "cx", "cy", "value", "clusters", "converged"]
UF_COLUMNS = ["x", "y"]
FLOAT_FORMAT = "%.12f"
TEMPLATE_DIR = Path(__file__).resolve().parents[2] / "data"
TRAJECTORY_TEMPLATE = "trajectory_template.svg"
SVG_WIDTH = 640


def field_grid(body: Body, resolution: int, padding: float = 0.2) -> np.ndarray:
    """Row-major (y outer, x inner) resolution x resolution grid over the padded bounding box."""
    xmin, ymin, xmax, ymax = bounding_box(body)
    pad_x, pad_y = padding * (xmax - xmin), padding * (ymax - ymin)
    xs = np.linspace(xmin - pad_x, xmax + pad_x, resolution)
    ys = np.linspace(ymin - pad_y, ymax + pad_y, resolution)
    gx, gy = np.meshgrid(xs, ys)
    return np.column_stack([gx.ravel(), gy.ravel()])


def field_frame(points: np.ndarray, samples: Sequence[Optional[PotentialSample]], regime: str) -> pd.DataFrame:
    return pd.DataFrame(
        {
            "x": points[:, 0],
            "y": points[:, 1],
            "value": [s.value if s is not None else np.nan for s in samples],
            "regime": regime,
            "defined": [int(s is not None) for s in samples],
        },
        columns=FIELD_COLUMNS,
    )


def trajectory_frame(results: Sequence[CenterResult]) -> pd.DataFrame:
    """One row per center; a failed alpha gives a single row with converged=0."""
    rows = []
    for result in results:
        if not result.centers:
            rows.append((result.alpha, np.nan, np.nan, result.extremal_value, 0, int(result.converged)))
            continue
        for cx, cy in result.centers:
            rows.append((result.alpha, cx, cy, result.extremal_value, result.clusters, int(result.converged)))
    return pd.DataFrame(rows, columns=TRAJECTORY_COLUMNS)


def region_frame(region: UnfoldedRegion) -> pd.DataFrame:
    return pd.DataFrame(region.vertices, columns=UF_COLUMNS)


def to_csv_text(frame: pd.DataFrame) -> str:
    buffer = io.StringIO()
    frame.to_csv(buffer, index=False, float_format=FLOAT_FORMAT, na_rep="nan", lineterminator="\n")
    return buffer.getvalue()


def write_csv(frame: pd.DataFrame, path: Union[str, Path]) -> None:
    Path(path).write_text(to_csv_text(frame), encoding="utf-8", newline="")
    logger.info(f"Wrote {len(frame)} rows to {path}")


def _loop_items(body: Body) -> List[dict]:
    items = []
    for loop in sorted(body.loops, key=lambda lp: -lp.orientation):
        fill = "#e8e8e8" if loop.orientation == 1 else "#ffffff"
        if isinstance(loop, CircleLoop):
            items.append({"kind": "circle", "cx": loop.center[0], "cy": loop.center[1], "r": loop.radius, "fill": fill})
        else:
            points = " ".join(f"{x:.9g},{y:.9g}" for x, y in loop.vertices)
            items.append({"kind": "polygon", "points": points, "fill": fill})
    return items


def render_trajectory_svg(
    body: Body,
    region: Optional[UnfoldedRegion],
    results: Sequence[CenterResult],
    minmax: Optional[ExtremalBall] = None,
    maxmin: Sequence[ExtremalBall] = (),
) -> str:
    """SVG with the body outline, the unfolded region, the center path and the min-max / max-min markers."""
    xmin, ymin, xmax, ymax = bounding_box(body)
    pad = 0.05 * body.diameter
    width, height = xmax - xmin + 2 * pad, ymax - ymin + 2 * pad
    path = [r.centers[0] for r in results if r.centers]
    env = Environment(loader=FileSystemLoader(TEMPLATE_DIR), autoescape=select_autoescape(["svg"]))
    template = env.get_template(TRAJECTORY_TEMPLATE)
    return template.render(
        width=SVG_WIDTH,
        height=round(SVG_WIDTH * height / width),
        view_box=f"{xmin - pad:.9g} {-(ymax + pad):.9g} {width:.9g} {height:.9g}",
        stroke=body.diameter / 400,
        marker=body.diameter / 120,
        loops=_loop_items(body),
        region=" ".join(f"{x:.9g},{y:.9g}" for x, y in region.polygon) if region else "",
        path=" ".join(f"{x:.9g},{y:.9g}" for x, y in path),
        minmax=minmax,
        maxmin=list(maxmin),
    )


def write_svg(svg: str, path: Union[str, Path]) -> None:
    Path(path).write_text(svg, encoding="utf-8")
    logger.info(f"Wrote trajectory plot to {path}")
