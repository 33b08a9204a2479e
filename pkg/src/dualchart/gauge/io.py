"""
CSV storage for lattice connections and curvature maps.

Layout: a few `#`-prefixed header lines, then one row per grid point.

    # dims: 64,64
    # spacing: 0.05,0.05
    # components: 2
    # constants: m=1.3,c=1.0,chi=0.7,hbar=1.0
    i0,i1,B0,B1
    0,0,...

Curvature files store the upper-triangle components F_μν (μ < ν) and only
the unmasked interior points.
"""
import csv
import logging
from pathlib import Path
from typing import Dict, List, Tuple

import numpy as np

from dualchart.classical.phase_space import PhysicalConstants
from dualchart.exceptions import DualChartError
from dualchart.gauge.lattice import CurvatureTensor, LatticeConnection

logger = logging.getLogger(__name__)


def _format(values) -> str:
    return ",".join(repr(v) if isinstance(v, float) else str(v) for v in values)


def _write_header(f, header: Dict[str, str]) -> None:
    for key, value in header.items():
        f.write(f"# {key}: {value}\n")


def _read_header(path: Path) -> Tuple[Dict[str, str], List[str]]:
    header = {}
    body = []
    with open(path, "r", encoding="utf-8") as f:
        for line in f:
            if line.startswith("#"):
                key, _, value = line[1:].partition(":")
                header[key.strip()] = value.strip()
            elif line.strip():
                body.append(line)
    return header, body


def save_connection(conn: LatticeConnection, path: Path) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    k = conn.constants
    with open(path, "w", newline="", encoding="utf-8") as f:
        _write_header(f, {
            "dims": _format(conn.dims),
            "spacing": _format(conn.spacing),
            "components": str(conn.ndim),
            "constants": f"m={k.m!r},c={k.c!r},chi={k.chi!r},hbar={k.hbar!r}",
        })
        writer = csv.writer(f)
        writer.writerow([f"i{mu}" for mu in range(conn.ndim)] + [f"B{mu}" for mu in range(conn.ndim)])
        for index in np.ndindex(*conn.dims):
            values = [repr(float(conn.B[(mu,) + index])) for mu in range(conn.ndim)]
            writer.writerow(list(index) + values)
    logger.debug(f"Wrote connection {conn.dims} to {path}")


def load_connection(path: Path) -> LatticeConnection:
    """
    Read a connection written by save_connection.

    Raises:
        DualChartError: If the header is incomplete or the rows do not fill the grid.
    """
    path = Path(path)
    header, body = _read_header(path)
    try:
        dims = tuple(int(v) for v in header["dims"].split(","))
        spacing = tuple(float(v) for v in header["spacing"].split(","))
        components = int(header["components"])
        raw_constants = dict(item.split("=") for item in header["constants"].split(","))
    except (KeyError, ValueError) as e:
        raise DualChartError(f"Malformed connection header in {path}: {e}")
    constants = PhysicalConstants(**{key: float(value) for key, value in raw_constants.items()})
    B = np.full((components,) + dims, np.nan)
    reader = csv.reader(body[1:])
    for row in reader:
        index = tuple(int(v) for v in row[:len(dims)])
        for mu in range(components):
            B[(mu,) + index] = float(row[len(dims) + mu])
    if np.any(np.isnan(B)):
        raise DualChartError(f"Connection file {path} does not cover the full grid {dims}")
    return LatticeConnection(dims, spacing, B, constants)


def save_curvature(curvature: CurvatureTensor, conn: LatticeConnection, path: Path) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    pairs = [(mu, nu) for mu in range(conn.ndim) for nu in range(mu + 1, conn.ndim)]
    mask = np.ma.getmaskarray(curvature.F)
    with open(path, "w", newline="", encoding="utf-8") as f:
        _write_header(f, {
            "dims": _format(conn.dims),
            "spacing": _format(conn.spacing),
            "components": str(len(pairs)),
        })
        writer = csv.writer(f)
        writer.writerow([f"i{mu}" for mu in range(conn.ndim)] + [f"F{mu}{nu}" for mu, nu in pairs])
        for index in np.ndindex(*conn.dims):
            if all(mask[(mu, nu) + index] for mu, nu in pairs):
                continue
            values = [repr(float(np.ma.getdata(curvature.F)[(mu, nu) + index])) for mu, nu in pairs]
            writer.writerow(list(index) + values)
