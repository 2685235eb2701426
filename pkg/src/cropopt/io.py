"""CSV exports of fields and run summaries (17 significant digits)."""
import csv
import io

import numpy as np

from .exceptions import DimensionError

SUMMARY_HEADER = "domain,h,D,alpha,T,L,J,area,xi,quantization_gap"


def _fmt(x):
    return f"{x:.17g}"


def nodal_csv(mesh, v):
    """``x,y,value`` rows, one per vertex."""
    v = np.asarray(v, dtype=float)
    if v.shape != (mesh.n_vertices,):
        raise DimensionError("nodal field does not match the mesh")
    rows = ["x,y,value"]
    rows += [f"{_fmt(x)},{_fmt(y)},{_fmt(val)}" for (x, y), val in zip(mesh.vertices, v)]
    return "\n".join(rows) + "\n"


def element_csv(mesh, w):
    """``cx,cy,value`` rows, one per element centroid."""
    w = np.asarray(w, dtype=float)
    if w.shape != (mesh.n_triangles,):
        raise DimensionError("element field does not match the mesh")
    rows = ["cx,cy,value"]
    rows += [f"{_fmt(x)},{_fmt(y)},{_fmt(val)}" for (x, y), val in zip(mesh.centroids, w)]
    return "\n".join(rows) + "\n"


def summary_row(domain, h, params, J, area, xi="", gap=""):
    values = [domain, _fmt(h), _fmt(params.D), _fmt(params.alpha), _fmt(params.T),
              _fmt(params.L), _fmt(J), _fmt(area),
              _fmt(xi) if xi != "" else "", _fmt(gap) if gap != "" else ""]
    return ",".join(values)


def read_csv(text_or_path):
    """Parse one of the CSV exports into a header and a float array."""
    if isinstance(text_or_path, str) and "\n" in text_or_path:
        text = text_or_path
    else:
        with open(text_or_path, encoding="utf-8") as fh:
            text = fh.read()
    reader = csv.reader(io.StringIO(text))
    header = next(reader)
    rows = [r for r in reader if r]
    return header, rows
