"""JSON documents for models, jets, gauge functions and reports.

Scalars travel as rational strings (``"-2/3"``), tensors as sparse lists of
``[i, j, ..., value]`` rows with 1-based indices, sorted, zeros omitted.
Parsing converts to 0-based in-memory arrays; nothing else in the package
sees 1-based indices.
"""

from __future__ import annotations

import json
import re
from fractions import Fraction

import numpy as np

from .curvature import CurvatureModel, SymmetryReport
from .errors import ShapeError, WeylcurvError
from .realization import (
    KINDS,
    ConnectionJet,
    GaugeFunction,
    MetricJet,
    OneFormJet,
    RealizationReport,
    WeylJet,
)
from .tensor_core import MAX_DIM, InnerProduct, zeros

FORMAT_VERSION = "1"

_RATIONAL = re.compile(r"^[+-]?\d+(/\d+)?$")


class DocumentError(WeylcurvError):
    """Malformed document; the message names the offending field."""


def parse_rational(value, where: str = "value"):
    if isinstance(value, bool) or isinstance(value, float):
        raise DocumentError(f"{where}: expected a rational string, got {value!r}")
    if isinstance(value, int):
        return value
    if not isinstance(value, str):
        raise DocumentError(f"{where}: expected a rational string, got {value!r}")
    text = value.strip().replace("−", "-")
    if not _RATIONAL.match(text):
        raise DocumentError(f"{where}: {value!r} is not a rational like '-2/3'")
    num, _, den = text.partition("/")
    if den and int(den) == 0:
        raise DocumentError(f"{where}: zero denominator in {value!r}")
    q = Fraction(int(num), int(den or 1))
    return q.numerator if q.denominator == 1 else q


def format_rational(x) -> str:
    return str(Fraction(x))


def loads(text: str, source: str = "<input>") -> dict:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise DocumentError(f"{source}: invalid JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}")
    if not isinstance(doc, dict):
        raise DocumentError(f"{source}: top level must be a JSON object")
    return doc


def _render(value, depth: int) -> str:
    pad = " " * depth
    if isinstance(value, dict) and value:
        items = [f'{pad} {json.dumps(k)}: {_render(v, depth + 1)}' for k, v in value.items()]
        return "{\n" + ",\n".join(items) + f"\n{pad}}}"
    if isinstance(value, list) and value and isinstance(value[0], list):
        rows = [f"{pad} {json.dumps(row, ensure_ascii=False)}" for row in value]
        return "[\n" + ",\n".join(rows) + f"\n{pad}]"
    return json.dumps(value, ensure_ascii=False)


def dumps(doc: dict) -> str:
    """Deterministic rendering: one key per line, one sparse row per line."""
    return _render(doc, 0) + "\n"


# -- sparse tensors ----------------------------------------------------------


def emit_sparse(t: np.ndarray) -> list:
    rows = []
    for idx in np.ndindex(t.shape):
        x = t[idx]
        if x != 0:
            rows.append([i + 1 for i in idx] + [format_rational(x)])
    return rows


def parse_sparse(rows, n: int, rank: int, where: str) -> np.ndarray:
    if not isinstance(rows, list):
        raise DocumentError(f"{where}: expected a list of [index..., value] rows")
    out = zeros((n,) * rank)
    seen = set()
    for r, row in enumerate(rows):
        here = f"{where}[{r}]"
        if not isinstance(row, list) or len(row) != rank + 1:
            raise DocumentError(f"{here}: expected {rank} indices and a value")
        idx = row[:rank]
        if not all(isinstance(i, int) and not isinstance(i, bool) and 1 <= i <= n for i in idx):
            raise DocumentError(f"{here}: indices must be integers in [1, {n}]")
        key = tuple(i - 1 for i in idx)
        if key in seen:
            raise DocumentError(f"{here}: duplicate index {tuple(idx)}")
        seen.add(key)
        out[key] = parse_rational(row[rank], f"{here} value")
    return out


def _require(doc: dict, key: str, where: str):
    if key not in doc:
        raise DocumentError(f"{where}: missing field {key!r}")
    return doc[key]


def _check_version(doc: dict, where: str):
    version = _require(doc, "format_version", where)
    if str(version) != FORMAT_VERSION:
        raise DocumentError(f"{where}: unsupported format_version {version!r}")


def _parse_dim(doc: dict, where: str) -> int:
    n = _require(doc, "dim", where)
    if not isinstance(n, int) or isinstance(n, bool) or not 2 <= n <= MAX_DIM:
        raise DocumentError(f"{where}.dim: expected an integer in [2, {MAX_DIM}]")
    return n


# -- metric ------------------------------------------------------------------


def emit_metric(h: InnerProduct) -> dict:
    p, q = h.signature
    if p + q == h.dim and _same_matrix(h, InnerProduct.from_signature(p, q)):
        return {"signature": [p, q]}
    return {"h": [[format_rational(x) for x in row] for row in h.matrix]}


def _same_matrix(a: InnerProduct, b: InnerProduct) -> bool:
    return all(x == y for x, y in zip(a.matrix.flat, b.matrix.flat))


def parse_metric(doc: dict, n: int, where: str) -> InnerProduct:
    """Read ``signature`` or ``h``; a singular ``h`` raises DegeneracyError."""
    if "signature" in doc:
        sig = doc["signature"]
        if (not isinstance(sig, list) or len(sig) != 2
                or not all(isinstance(x, int) and not isinstance(x, bool) and x >= 0 for x in sig)):
            raise DocumentError(f"{where}.signature: expected [p, q]")
        if sum(sig) != n:
            raise DocumentError(f"{where}.signature: p + q = {sum(sig)} but dim = {n}")
        return InnerProduct.from_signature(*sig)
    rows = _require(doc, "h", where)
    if not isinstance(rows, list) or len(rows) != n or not all(
            isinstance(r, list) and len(r) == n for r in rows):
        raise DocumentError(f"{where}.h: expected a {n}x{n} array")
    m = zeros((n, n))
    for i, row in enumerate(rows):
        for j, x in enumerate(row):
            m[i, j] = parse_rational(x, f"{where}.h[{i + 1}][{j + 1}]")
    try:
        return InnerProduct.from_matrix(m)
    except ShapeError as exc:
        raise DocumentError(f"{where}.h: {exc}")


# -- models ------------------------------------------------------------------


def model_to_doc(model: CurvatureModel) -> dict:
    return {
        "format_version": FORMAT_VERSION,
        "dim": model.dim,
        **emit_metric(model.h),
        "A": emit_sparse(model.A),
    }


def doc_to_model(doc: dict, where: str = "model") -> CurvatureModel:
    if not isinstance(doc, dict):
        raise DocumentError(f"{where}: expected an object")
    _check_version(doc, where)
    n = _parse_dim(doc, where)
    h = parse_metric(doc, n, where)
    A = parse_sparse(_require(doc, "A", where), n, 4, f"{where}.A")
    return CurvatureModel(h, A)


# -- jets --------------------------------------------------------------------


def jet_to_doc(jet: WeylJet) -> dict:
    doc = {
        "format_version": FORMAT_VERSION,
        "kind": jet.kind,
        "dim": jet.dim,
        **emit_metric(jet.metric.h),
        "metric_quad": emit_sparse(jet.metric.quad),
    }
    if any(x != 0 for x in jet.metric.linear.flat):
        doc["metric_lin"] = emit_sparse(jet.metric.linear)
    doc["phi"] = emit_sparse(jet.phi.linear)
    if any(x != 0 for x in jet.phi.const.flat):
        doc["phi_const"] = emit_sparse(jet.phi.const)
    doc["connection"] = emit_sparse(jet.conn.linear)
    if any(x != 0 for x in jet.conn.const.flat):
        doc["connection_const"] = emit_sparse(jet.conn.const)
    if jet.model is not None:
        doc["model"] = model_to_doc(jet.model)
    return doc


def doc_to_jet(doc: dict, where: str = "jet") -> WeylJet:
    """Parse a jet. Without a ``connection`` block the Weyl connection of
    ``(metric, phi)`` is used."""
    _check_version(doc, where)
    n = _parse_dim(doc, where)
    kind = doc.get("kind", "weyl")
    if kind not in KINDS:
        raise DocumentError(f"{where}.kind: expected one of {', '.join(KINDS)}")
    model = doc_to_model(doc["model"], f"{where}.model") if "model" in doc else None
    if model is not None and model.dim != n:
        raise DocumentError(f"{where}.model: dim {model.dim} differs from jet dim {n}")
    if "signature" in doc or "h" in doc:
        h = parse_metric(doc, n, where)
    elif model is not None:
        h = model.h
    else:
        raise DocumentError(f"{where}: missing metric ('signature' or 'h')")
    try:
        metric = MetricJet(
            h,
            parse_sparse(doc.get("metric_quad", []), n, 4, f"{where}.metric_quad"),
            parse_sparse(doc.get("metric_lin", []), n, 3, f"{where}.metric_lin"),
        )
    except ShapeError as exc:
        raise DocumentError(f"{where}.metric_quad: {exc}")
    phi = OneFormJet(
        parse_sparse(doc.get("phi", []), n, 2, f"{where}.phi"),
        parse_sparse(doc.get("phi_const", []), n, 1, f"{where}.phi_const"),
    )
    if "connection" in doc or "connection_const" in doc:
        conn = ConnectionJet(
            parse_sparse(doc.get("connection", []), n, 4, f"{where}.connection"),
            parse_sparse(doc.get("connection_const", []), n, 3, f"{where}.connection_const"),
        )
        return WeylJet(metric, phi, conn, model, kind)
    return WeylJet.from_structure(metric, phi, model, kind)


# -- gauge functions ---------------------------------------------------------


def gauge_to_doc(f: GaugeFunction) -> dict:
    return {"dim": f.dim, "linear": emit_sparse(f.linear), "quad": emit_sparse(f.quad)}


def doc_to_gauge(doc: dict, where: str = "f") -> GaugeFunction:
    if not isinstance(doc, dict):
        raise DocumentError(f"{where}: expected an object")
    n = _parse_dim(doc, where)
    linear = parse_sparse(doc.get("linear", []), n, 1, f"{where}.linear")
    quad = parse_sparse(doc.get("quad", []), n, 2, f"{where}.quad")
    try:
        return GaugeFunction(linear, quad)
    except ShapeError as exc:
        raise DocumentError(f"{where}.quad: {exc}")


# -- reports -----------------------------------------------------------------


def symmetry_report_to_doc(report: SymmetryReport, n: int) -> dict:
    return {
        "format_version": FORMAT_VERSION,
        "kind": "symmetry_report",
        "dim": n,
        "residuals": {"eq_" + k.replace(".", ""): format_rational(v) for k, v in report.residuals.items()},
        "in_R": report.in_R,
        "in_W": report.in_W,
        "in_A": report.in_A,
        "class": report.membership.finest,
        "violated": report.violated,
        "violated_at": list(report.violated_at) if report.violated_at else None,
        "success": report.in_R,
    }


_REALIZATION_CHECKS = (
    ("max_abs_difference", "curvature"),
    ("metric_difference", "metric"),
    ("compatibility_max", "compatibility"),
    ("torsion_max", "torsion"),
    ("dphi_check", "dphi"),
)


def realization_report_to_doc(report: RealizationReport, kind: str) -> dict:
    doc = {"format_version": FORMAT_VERSION, "kind": "realization_report", "target": kind}
    violated = None
    for attr, label in _REALIZATION_CHECKS:
        value = getattr(report, attr)
        doc[attr] = None if value is None else format_rational(value)
        if violated is None and value is not None and value != 0:
            violated = label
    doc["success"] = report.success
    doc["violated"] = violated
    return doc
