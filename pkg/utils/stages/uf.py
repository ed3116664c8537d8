import sys

from utils.helpers.body_file import load_body
from utils.helpers.errors import EXIT_OK
from utils.helpers.export import region_frame, to_csv_text, write_csv
from utils.helpers.unfolding import diameter_ratio, unfolded_region
from utils.session import RunConfig
from utils.utils import format_number


def uf_stage(config: RunConfig) -> int:
    """Vertices of the minimal unfolded region and diam(Uf) / diam(body)."""
    body = load_body(config.bodies[0])
    region = unfolded_region(body, config.centers.uf_dirs, config.centers.uf_tol)
    frame = region_frame(region)
    if config.out:
        write_csv(frame, config.out)
    else:
        sys.stdout.write(to_csv_text(frame))
    print(f"diameter_ratio,{format_number(diameter_ratio(region, body))}")
    return EXIT_OK
