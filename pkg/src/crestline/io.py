"""File formats: axis CSV, profile CSV, field CSV, solution JSON and SVG.

All numbers are written with 17 significant digits so that a file read back
reproduces the binary value and identical runs give identical bytes.
"""

from __future__ import annotations

import json
import math
from pathlib import Path

import numpy as np

from . import funcrep
from .errors import InvalidInputError
from .forward import FlowField, HeightField, PhysParams
from .funcrep import FuncP
from .recover import AxisData

FORMAT_VERSION = 1


def fmt(v: float) -> str:
    return "%.17g" % v


def _encode(obj) -> str:
    if isinstance(obj, dict):
        return "{" + ", ".join(json.dumps(str(k)) + ": " + _encode(v) for k, v in obj.items()) + "}"
    if isinstance(obj, (list, tuple)):
        return "[" + ", ".join(_encode(v) for v in obj) + "]"
    if isinstance(obj, np.ndarray):
        return _encode(obj.tolist())
    if isinstance(obj, (bool, np.bool_)):
        return "true" if obj else "false"
    if obj is None:
        return "null"
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        v = float(obj)
        if math.isnan(v):
            return "null"
        if math.isinf(v):
            return '"inf"' if v > 0 else '"-inf"'
        return fmt(v)
    if isinstance(obj, str):
        return json.dumps(obj)
    raise TypeError(f"cannot serialise {type(obj).__name__}")


def write_json(path: Path, obj: dict) -> None:
    Path(path).write_text(_encode(obj) + "\n", encoding="utf-8")


def read_json(path: Path) -> dict:
    try:
        data = json.loads(Path(path).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise InvalidInputError(f"cannot read JSON {path}: {exc}") from None
    if data.get("format_version") != FORMAT_VERSION:
        raise InvalidInputError(f"{path}: unsupported format_version {data.get('format_version')!r}")
    return data


def _num(v) -> float:
    if isinstance(v, str):
        return float(v)
    return float("nan") if v is None else float(v)


# ---------------------------------------------------------------- axis CSV


def write_axis_csv(path: Path, axis: AxisData) -> None:
    lines = [f"# d={fmt(axis.d)}", f"# g={fmt(axis.g)}", f"# lambda={fmt(axis.lam)}", f"# x0={fmt(axis.x0)}"]
    if axis.c is not None:
        lines.append(f"# c={fmt(axis.c)}")
    for flag in axis.flags:
        lines.append(f"# flag={flag}")
    lines.append("y,w")
    lines += [f"{fmt(a)},{fmt(b)}" for a, b in zip(axis.y, axis.w)]
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def _read_table(path: Path):
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise InvalidInputError(f"cannot read {path}: {exc}") from None
    meta, header, rows = {}, None, []
    for n, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith("#"):
            body = line[1:].strip()
            if "=" in body:
                k, v = body.split("=", 1)
                meta.setdefault(k.strip(), []).append(v.strip())
            continue
        if header is None:
            header = [h.strip() for h in line.split(",")]
            continue
        try:
            rows.append([float(t) for t in line.split(",")])
        except ValueError:
            raise InvalidInputError(f"{path}:{n}: not a row of numbers") from None
        if len(rows[-1]) != len(header):
            raise InvalidInputError(f"{path}:{n}: expected {len(header)} columns")
    if header is None or not rows:
        raise InvalidInputError(f"{path}: no data rows")
    return meta, header, np.array(rows)


def read_axis_csv(path: Path) -> AxisData:
    meta, header, data = _read_table(path)
    get = lambda k, default=None: float(meta[k][-1]) if k in meta else default
    d, g, lam = get("d"), get("g", 9.81), get("lambda")
    if d is None or lam is None:
        raise InvalidInputError(f"{path}: header must give d and lambda")
    c = get("c")
    cols = {h: i for i, h in enumerate(header)}
    if "y" not in cols:
        raise InvalidInputError(f"{path}: missing y column")
    y = data[:, cols["y"]]
    flags = tuple(meta.get("flag", ()))
    if "w" in cols:
        return AxisData(y=y, w=data[:, cols["w"]], d=d, lam=lam, g=g, x0=get("x0", 0.0), c=c, flags=flags)
    if "u" in cols:
        if c is None:
            raise InvalidInputError(f"{path}: a u column needs '# c=' in the header")
        return AxisData.from_velocity(y, data[:, cols["u"]], c, d, lam, g=g, x0=get("x0", 0.0), flags=flags)
    raise InvalidInputError(f"{path}: need a w or u column")


# ---------------------------------------------------------------- profiles and fields


def write_profile_csv(path: Path, x, eta, period: float | None, meta: dict | None = None) -> None:
    """``x,eta``; with a period the first sample is repeated at ``x + period``."""
    x, eta = np.asarray(x, float), np.asarray(eta, float)
    if period is not None:
        x, eta = np.append(x, x[0] + period), np.append(eta, eta[0])
    lines = [f"# {k}={v if isinstance(v, str) else fmt(v)}" for k, v in (meta or {}).items()]
    lines.append("x,eta")
    lines += [f"{fmt(a)},{fmt(b)}" for a, b in zip(x, eta)]
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def read_profile_csv(path: Path):
    meta, header, data = _read_table(path)
    if header[:2] != ["x", "eta"]:
        raise InvalidInputError(f"{path}: header must be x,eta")
    period = float(meta["lambda"][-1]) if "lambda" in meta else data[-1, 0] - data[0, 0]
    return data[:, 0], data[:, 1], period, {k: v[-1] for k, v in meta.items()}


def write_field_csv(path: Path, ff: FlowField) -> None:
    X = np.broadcast_to(ff.x[:, None], ff.y.shape)
    lines = ["x,y,u,v,P"]
    for i in range(ff.y.shape[0]):
        for j in range(ff.y.shape[1]):
            lines.append(",".join(fmt(a[i, j]) for a in (X, ff.y, ff.u, ff.v, ff.P)))
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


# ---------------------------------------------------------------- solution JSON


def funcp_to_dict(f: FuncP) -> dict:
    return {"p0": f.p0, "coef": f.coef, "tag": f.tag}


def funcp_from_dict(d: dict) -> FuncP:
    return FuncP(_num(d["p0"]), [_num(c) for c in d["coef"]], d.get("tag", "derived"))


def flow_to_dict(ff: FlowField) -> dict:
    p = ff.params
    return {
        "params": {"g": p.g, "d": p.d, "c": p.c, "lambda": p.lam, "P0": p.P0},
        "x": ff.x,
        "s": ff.s,
        "x_kind": ff.x_kind,
        "s_kind": ff.s_kind,
        "y": ff.y,
        "u": ff.u,
        "v": ff.v,
        "P": ff.P,
        "eta": ff.eta,
    }


def flow_from_dict(d: dict) -> FlowField:
    pr = d["params"]
    params = PhysParams(d=_num(pr["d"]), c=_num(pr["c"]), lam=_num(pr["lambda"]), g=_num(pr["g"]), P0=_num(pr["P0"]))
    arr = lambda k: np.array(d[k], dtype=float)
    return FlowField(params, arr("x"), arr("s"), arr("y"), arr("u"), arr("v"), arr("P"), arr("eta"), d["x_kind"], d["s_kind"])


def height_to_dict(hf: HeightField) -> dict:
    return {
        "p0": hf.p0,
        "q": hf.q,
        "p": hf.p,
        "h": hf.h,
        "Q": hf.Q,
        "lambda": hf.lam,
        "g": hf.g,
        "q_kind": hf.q_kind,
        "p_kind": hf.p_kind,
        "gamma": funcp_to_dict(hf.gamma),
    }


def height_from_dict(d: dict) -> HeightField:
    arr = lambda k: np.array(d[k], dtype=float)
    return HeightField(
        _num(d["p0"]),
        arr("q"),
        arr("p"),
        arr("h"),
        funcp_from_dict(d["gamma"]),
        _num(d["Q"]),
        _num(d["lambda"]),
        _num(d["g"]),
        d["q_kind"],
        d["p_kind"],
    )


def solution_dict(source: str, flow: FlowField, height: HeightField | None, gamma: FuncP, Q: float, **extra) -> dict:
    out = {
        "format_version": FORMAT_VERSION,
        "source": source,
        "Q": Q,
        "p0": gamma.p0,
        "gamma": funcp_to_dict(gamma),
        "flow": flow_to_dict(flow),
        "height": None if height is None else height_to_dict(height),
    }
    out.update(extra)
    return out


# ---------------------------------------------------------------- SVG


def overlay_svg(profiles: list, width: int = 720, height: int = 360) -> str:
    """Static line plot of several ``(label, x, eta)`` profiles."""
    colors = ["#1f4e9c", "#c0392b", "#2e8b57", "#7d3c98"]
    xs = np.concatenate([np.asarray(p[1], float) for p in profiles])
    ys = np.concatenate([np.asarray(p[2], float) for p in profiles])
    x0, x1 = float(xs.min()), float(xs.max())
    y0, y1 = float(ys.min()), float(ys.max())
    if y1 - y0 <= 0:
        y0, y1 = y0 - 1.0, y1 + 1.0
    pad = 50
    sx = lambda v: pad + (v - x0) / (x1 - x0) * (width - 2 * pad)
    sy = lambda v: height - pad - (v - y0) / (y1 - y0) * (height - 2 * pad)
    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" viewBox="0 0 {width} {height}">',
        f'<rect x="{pad}" y="{pad}" width="{width - 2 * pad}" height="{height - 2 * pad}" fill="none" stroke="#444"/>',
        f'<text x="{pad}" y="{height - pad / 3:.1f}" font-size="12">x from {x0:.6g} to {x1:.6g}</text>',
        f'<text x="{pad}" y="{pad * 0.6:.1f}" font-size="12">eta from {y0:.6g} to {y1:.6g}</text>',
    ]
    for n, (label, x, eta) in enumerate(profiles):
        pts = " ".join(f"{sx(a):.2f},{sy(b):.2f}" for a, b in zip(x, eta))
        col = colors[n % len(colors)]
        out.append(f'<polyline fill="none" stroke="{col}" stroke-width="1.5" points="{pts}"/>')
        out.append(f'<text x="{width - pad - 150}" y="{pad + 16 * (n + 1)}" font-size="12" fill="{col}">{label}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def gamma_from_samples(path: Path, p0: float, degree: int = 16) -> FuncP:
    meta, header, data = _read_table(path)
    if header[:2] != ["p", "gamma"]:
        raise InvalidInputError(f"{path}: header must be p,gamma")
    deg = min(degree, data.shape[0] - 1)
    return funcrep.fit(data[:, 0], data[:, 1], deg, p0=p0, tag="measured")
