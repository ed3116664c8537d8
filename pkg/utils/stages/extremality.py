from utils.helpers.body_file import load_body
from utils.helpers.errors import EXIT_NUMERICAL, EXIT_OK
from utils.helpers.oracle import ball_extremality_report, energy_extremality_report
from utils.session import RunConfig
from utils.utils import format_number


def extremality_stage(config: RunConfig) -> int:
    """Compare equal-area shapes with the disk: Mm^(alpha) (--kind ball) or the energy (--kind energy)."""
    shapes = [load_body(path) for path in config.bodies]
    names = [path.stem for path in config.bodies]
    if config.kind == "energy":
        rows = energy_extremality_report(shapes, config.alpha, config.grid, names)
    else:
        rows = ball_extremality_report(shapes, config.alpha, names, config.centers)
    print("name value reference gap stderr holds strict")
    for row in rows:
        print(
            f"{row.name} {format_number(row.value)} {format_number(row.reference)} "
            f"{format_number(row.gap)} {row.stderr:.3e} {int(row.holds)} {int(row.strict)}"
        )
    return EXIT_OK if all(row.holds for row in rows) else EXIT_NUMERICAL
