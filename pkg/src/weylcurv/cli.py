"""``weylcurv`` command line.

Exit codes: 0 success or class membership, 1 semantic failure, 2 parse or
usage error, 3 degenerate metric.
"""

from __future__ import annotations

import argparse
import sys

from .curvature import CurvatureModel, higa_decompose, random_in_class, require_class
from .errors import ClassError, DegeneracyError, DimensionError, WeylcurvError
from .realization import gauge_transform, realize, verify_realization
from .serialization import (
    FORMAT_VERSION,
    DocumentError,
    doc_to_gauge,
    doc_to_jet,
    doc_to_model,
    dumps,
    emit_metric,
    emit_sparse,
    jet_to_doc,
    loads,
    model_to_doc,
    realization_report_to_doc,
    symmetry_report_to_doc,
)
from .tensor_core import InnerProduct

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_DEGENERATE = 0, 1, 2, 3

REQUIRED_CLASS = {"weyl": "W", "riemann": "A", "affine": "R"}


def _read(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    try:
        with open(path, encoding="utf-8") as fh:
            return fh.read()
    except OSError as exc:
        raise DocumentError(f"{path}: {exc.strerror}")


def _write(path: str | None, text: str):
    if path in (None, "-"):
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)


def _load_model(path: str) -> CurvatureModel:
    return doc_to_model(loads(_read(path), path), path)


def _failure_doc(kind: str, message: str, violated=None, **extra) -> dict:
    return {"format_version": FORMAT_VERSION, "kind": kind, "success": False,
            "violated": violated, "message": message, **extra}


def cmd_classify(args) -> int:
    model = _load_model(args.input)
    _write(args.out, dumps(symmetry_report_to_doc(model.report, model.dim)))
    return EXIT_OK if model.report.in_R else EXIT_FAIL


def cmd_decompose(args) -> int:
    model = _load_model(args.input)
    try:
        A1, psi = higa_decompose(model)
    except ClassError as exc:
        _write(args.out, dumps(_failure_doc("decomposition", str(exc), exc.equation)))
        return EXIT_FAIL
    doc = {
        "format_version": FORMAT_VERSION,
        "kind": "decomposition",
        "dim": model.dim,
        **emit_metric(model.h),
        "A1": emit_sparse(A1),
        "psi": emit_sparse(psi),
        "success": True,
        "violated": None,
    }
    _write(args.out, dumps(doc))
    return EXIT_OK


def cmd_realize(args) -> int:
    model = _load_model(args.input)
    required = REQUIRED_CLASS[args.target]
    try:
        require_class(model.A, model.h, required)
    except ClassError as exc:
        msg = f"target {args.target} requires class {required}: {exc}"
        print(msg, file=sys.stderr)
        _write(None, dumps(_failure_doc("realization", msg, exc.equation, required_class=required)))
        return EXIT_FAIL
    _write(args.out, dumps(jet_to_doc(realize(model, args.target))))
    return EXIT_OK


def cmd_verify(args) -> int:
    jet = doc_to_jet(loads(_read(args.jet), args.jet), args.jet)
    if jet.model is None:
        raise DocumentError(f"{args.jet}: jet has no embedded model to verify against")
    report = verify_realization(jet)
    _write(args.out, dumps(realization_report_to_doc(report, jet.kind)))
    return EXIT_OK if report.success else EXIT_FAIL


def _parse_signature(text: str) -> tuple[int, int]:
    try:
        p, q = (int(x) for x in text.split(","))
    except ValueError:
        raise DocumentError(f"--signature: expected 'p,q', got {text!r}")
    return p, q


def cmd_gen(args) -> int:
    if args.signature is None:
        if args.dim is None:
            raise DocumentError("gen: give --dim or --signature")
        p, q = args.dim, 0
    else:
        p, q = _parse_signature(args.signature)
    if args.dim is not None and p + q != args.dim:
        raise DocumentError(f"--signature {p},{q} does not match --dim {args.dim}")
    h = InnerProduct.from_signature(p, q)
    A = random_in_class(args.cls, h.dim, h, args.seed)
    _write(args.out, dumps(model_to_doc(CurvatureModel(h, A))))
    return EXIT_OK


def cmd_gauge(args) -> int:
    jet = doc_to_jet(loads(_read(args.jet), args.jet), args.jet)
    text = args.f if args.f.lstrip().startswith("{") else _read(args.f)
    f = doc_to_gauge(loads(text, "--f"), "--f")
    if f.dim != jet.dim:
        raise DocumentError(f"--f: dimension {f.dim} does not match jet dimension {jet.dim}")
    _write(args.out, dumps(jet_to_doc(gauge_transform(jet, f))))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="weylcurv", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("classify", help="report symmetry residuals and class membership")
    p.add_argument("input", help="model document, '-' for stdin")
    p.add_argument("--out", default="-")
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("decompose", help="split a Weyl tensor as A1 + sigma(psi)")
    p.add_argument("input")
    p.add_argument("--out", default="-")
    p.set_defaults(func=cmd_decompose)

    p = sub.add_parser("realize", help="build a jet realizing the model at the origin")
    p.add_argument("input")
    p.add_argument("--target", choices=sorted(REQUIRED_CLASS), default="weyl")
    p.add_argument("--out", default="-")
    p.set_defaults(func=cmd_realize)

    p = sub.add_parser("verify", help="check a jet against its embedded model")
    p.add_argument("--jet", required=True)
    p.add_argument("--out", default="-")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("gen", help="random model in a symmetry class")
    p.add_argument("--class", dest="cls", choices=["R", "W", "A"], required=True)
    p.add_argument("--dim", type=int)
    p.add_argument("--signature", help="p,q")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default="-")
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("gauge", help="apply (g, phi) -> (e^{2f} g, phi - df)")
    p.add_argument("--jet", required=True)
    p.add_argument("--f", required=True, help="gauge function as inline JSON or a path")
    p.add_argument("--out", default="-")
    p.set_defaults(func=cmd_gauge)
    return parser


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as exc:  # argparse usage errors and --help
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE
    try:
        return args.func(args)
    except DegeneracyError as exc:
        print(f"weylcurv: degenerate metric: {exc}", file=sys.stderr)
        return EXIT_DEGENERATE
    except ClassError as exc:
        print(f"weylcurv: {exc}", file=sys.stderr)
        return EXIT_FAIL
    except (DocumentError, DimensionError, WeylcurvError) as exc:
        print(f"weylcurv: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
