import json
from pathlib import Path
from typing import Any, Dict, Union

from utils.helpers.errors import BodyError, BodyFileError
from utils.helpers.geometry import Body, CircleLoop, Loop, PolygonLoop
from utils.helpers.logger import logger

BODY_KEYS = {"dimension", "loops"}
POLYGON_KEYS = {"kind", "orientation", "vertices"}
CIRCLE_KEYS = {"kind", "orientation", "center", "radius"}


def _check_keys(obj: Dict[str, Any], allowed: set, where: str) -> None:
    if not isinstance(obj, dict):
        raise BodyFileError(f"{where} must be a JSON object")
    unknown = set(obj) - allowed
    if unknown:
        raise BodyFileError(f"{where} has unknown keys: {', '.join(sorted(unknown))}")
    missing = allowed - set(obj) - {"orientation"}
    if missing:
        raise BodyFileError(f"{where} is missing keys: {', '.join(sorted(missing))}")


def _parse_loop(obj: Dict[str, Any], index: int) -> Loop:
    where = f"loops[{index}]"
    if not isinstance(obj, dict) or obj.get("kind") not in ("polygon", "circle"):
        raise BodyFileError(f"{where}.kind must be 'polygon' or 'circle'")
    orientation = obj.get("orientation", 1)
    if orientation not in (1, -1) or isinstance(orientation, bool):
        raise BodyFileError(f"{where}.orientation must be 1 or -1")
    try:
        if obj["kind"] == "polygon":
            _check_keys(obj, POLYGON_KEYS, where)
            vertices = tuple((float(x), float(y)) for x, y in obj["vertices"])
            return PolygonLoop(vertices, orientation)
        _check_keys(obj, CIRCLE_KEYS, where)
        cx, cy = obj["center"]
        return CircleLoop((float(cx), float(cy)), float(obj["radius"]), orientation)
    except BodyFileError:
        raise
    except BodyError as e:
        raise BodyFileError(f"{where}: {e.message}") from e
    except (TypeError, ValueError) as e:
        raise BodyFileError(f"{where} has malformed coordinates: {e}") from e


def parse_body(document: Dict[str, Any]) -> Body:
    """
    Build a Body from the decoded body-file document.

    Raises:
        BodyFileError: On unknown keys, a dimension other than 2, or invalid loops.
    """
    _check_keys(document, BODY_KEYS, "body")
    dimension = document["dimension"]
    if dimension != 2 or isinstance(dimension, bool):
        raise BodyFileError(f"only dimension 2 body files are supported (got {dimension!r})")
    loops = document["loops"]
    if not isinstance(loops, list) or not loops:
        raise BodyFileError("loops must be a nonempty list")
    parsed = tuple(_parse_loop(loop, i) for i, loop in enumerate(loops))
    try:
        return Body(parsed, dimension=2)
    except BodyError as e:
        raise BodyFileError(e.message) from e


def load_body(path: Union[str, Path]) -> Body:
    path = Path(path)
    try:
        document = json.loads(path.read_text(encoding="utf-8"))
    except OSError as e:
        raise BodyFileError(f"cannot read body file {path}: {e.strerror}") from e
    except json.JSONDecodeError as e:
        raise BodyFileError(f"{path} is not valid JSON: {e.msg} (line {e.lineno})") from e
    body = parse_body(document)
    logger.debug(f"Loaded body with {len(body.loops)} loop(s) from {path}")
    return body


def body_to_dict(body: Body) -> Dict[str, Any]:
    loops = []
    for loop in body.loops:
        if isinstance(loop, PolygonLoop):
            loops.append(
                {"kind": "polygon", "orientation": loop.orientation, "vertices": [list(v) for v in loop.vertices]}
            )
        else:
            loops.append(
                {"kind": "circle", "orientation": loop.orientation, "center": list(loop.center), "radius": loop.radius}
            )
    return {"dimension": body.dimension, "loops": loops}


def dump_body(body: Body, path: Union[str, Path]) -> None:
    Path(path).write_text(json.dumps(body_to_dict(body), indent=2) + "\n", encoding="utf-8")
