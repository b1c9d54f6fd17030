"""CSV, JSON and Wavefront OBJ writers.

Floats are always written with 17 significant digits (``%.17g``), which
round-trips every double exactly through ``float()``.
"""

import csv
import io
import json
import math

import numpy as np

FLOAT_FMT = "%.17g"


def fmt(v):
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        v = float(v)
        if math.isnan(v):
            return "NaN"
        if math.isinf(v):
            return "Infinity" if v > 0 else "-Infinity"
        return FLOAT_FMT % v
    if v is None:
        return ""
    return str(v)


def write_csv(stream, header, rows):
    w = csv.writer(stream, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([fmt(v) for v in row])


def csv_string(header, rows):
    buf = io.StringIO()
    write_csv(buf, header, rows)
    return buf.getvalue()


def read_csv(stream):
    """(header, rows) with every numeric cell parsed back to float."""
    r = csv.reader(stream)
    header = next(r)
    rows = []
    for row in r:
        out = []
        for cell in row:
            try:
                out.append(float(cell))
            except ValueError:
                out.append(cell)
        rows.append(out)
    return header, rows


def _json_value(v, indent, level):
    pad = " " * (indent * (level + 1))
    end = " " * (indent * level)
    if isinstance(v, dict):
        if not v:
            return "{}"
        items = [f"{pad}{json.dumps(str(k))}: {_json_value(x, indent, level + 1)}" for k, x in v.items()]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(v, np.ndarray):
        v = v.tolist()
    if isinstance(v, (list, tuple)):
        if not v:
            return "[]"
        if all(not isinstance(x, (dict, list, tuple, np.ndarray)) for x in v):
            return "[" + ", ".join(_json_value(x, indent, level + 1) for x in v) + "]"
        items = [pad + _json_value(x, indent, level + 1) for x in v]
        return "[\n" + ",\n".join(items) + "\n" + end + "]"
    if isinstance(v, str):
        return json.dumps(v)
    if v is None:
        return "null"
    text = fmt(v)
    if isinstance(v, (float, np.floating)) and not any(c in text for c in ".eEIN"):
        text += ".0"  # keep floats floats, so -0.0 survives json.loads
    return text


def json_string(obj, indent=2):
    """JSON text with 17-significant-digit floats (NaN/Infinity as Python's json reads them)."""
    return _json_value(obj, indent, 0) + "\n"


def write_obj(stream, points):
    """Grid of shape (n_u, n_v, 3) as vertices plus row-major quad faces."""
    points = np.asarray(points, float)
    if points.ndim != 3 or points.shape[-1] != 3:
        raise ValueError("OBJ export needs a (n_u, n_v, 3) grid")
    nu, nv, _ = points.shape
    for p in points.reshape(-1, 3):
        stream.write("v %s %s %s\n" % tuple(fmt(c) for c in p))
    for i in range(nu - 1):
        for j in range(nv - 1):
            a = i * nv + j + 1
            stream.write(f"f {a} {a + 1} {a + nv + 1} {a + nv}\n")


def obj_string(points):
    buf = io.StringIO()
    write_obj(buf, points)
    return buf.getvalue()


def read_obj(stream):
    verts, faces = [], []
    for line in stream:
        parts = line.split()
        if not parts:
            continue
        if parts[0] == "v":
            verts.append([float(p) for p in parts[1:4]])
        elif parts[0] == "f":
            faces.append([int(p) for p in parts[1:]])
    return np.array(verts), faces
