"""Command-line front end.

Exit codes: 0 check passed or construction succeeded, 1 check failed or a
hypothesis was violated (details on stdout), 2 invalid input (JSON error on
stderr).  Results are printed as one line of JSON with sorted keys.
"""
import argparse
import json
import sys

import numpy as np

from . import codec
from .errors import FrameError, InvalidInput
from .frames import (
    FrameSystem,
    frame_bounds,
    is_equal_norm,
    is_parseval,
    naimark_dilate,
    parseval_residual,
)
from .kduals import equal_norm_dual, error_identity_report, is_kdual, kdual_family
from .kframes import (
    KFrameInstance,
    canonical_parseval,
    coimage_projector,
    extend_to_knorm,
    frame_to_subspace,
    is_parseval_kframe,
    kframe_bounds,
    kframe_dilation,
    parseval_kframe_residual,
    random_parseval_kframe,
    subspace_to_frame,
    trace_eigen_report,
)
from .opcore import (
    Subspace,
    Tolerance,
    adjoint,
    fro,
    is_projector,
    op_norm,
    principal_angles,
    random_complex,
    random_unitary,
)

CHECKS = ("frame", "parseval", "equal-norm", "kframe", "parseval-kframe", "kdual", "dilation", "correspondence")
CONSTRUCTS = (
    "canonical-parseval",
    "extend-knorm",
    "dilate",
    "k-dilate",
    "kdual",
    "equal-norm-dual",
    "frame-to-subspace",
    "subspace-to-frame",
)


class Outcome(Exception):
    """Carries the result body and exit code out of a handler."""

    def __init__(self, body, code):
        super().__init__(code)
        self.body = body
        self.code = code


def _tolerance(args):
    return Tolerance(eq_abs=args.tol_abs, eq_rel=args.tol_rel)


def _need(args, name):
    value = getattr(args, name)
    if value is None:
        raise InvalidInput(f"--{name.replace('_', '-')} is required for this command")
    return value


def _load(args, name, kind):
    path = _need(args, name)
    doc = codec.codec_load(path)
    if doc.kind != kind:
        raise InvalidInput(f"{path}: expected a {kind} document, got {doc.kind}")
    return codec.decode(doc)


def _emit(doc, args, extra=None):
    """Write ``doc`` to ``--out`` (or stdout) and return the result body."""
    body = dict(extra or {})
    if args.out:
        codec.codec_save(doc, args.out)
        body["out"] = args.out
    else:
        body["document"] = doc.payload
    return body


def parse_k_spec(spec, n, rng):
    """Build ``K`` from ``identity | diag:<csv> | random | scaled-unitary:<c> | projection:<r>``."""
    name, _, arg = spec.partition(":")
    if name == "diag":
        try:
            values = [float(x) for x in arg.split(",")]
        except ValueError:
            raise InvalidInput(f"bad diag spec {spec!r}") from None
        if n is not None and len(values) != n:
            raise InvalidInput(f"diag spec has {len(values)} entries but --n is {n}")
        return np.diag(np.array(values, dtype=np.complex128))
    if n is None or n < 1:
        raise InvalidInput("--n (positive) is required for this k-spec")
    if name == "identity":
        return np.eye(n, dtype=np.complex128)
    if name == "random":
        return random_complex(rng, (n, n))
    if name == "scaled-unitary":
        try:
            c = float(arg)
        except ValueError:
            raise InvalidInput(f"bad scale in {spec!r}") from None
        return c * random_unitary(n, rng)
    if name == "projection":
        try:
            r = int(arg)
        except ValueError:
            raise InvalidInput(f"bad rank in {spec!r}") from None
        if not 0 <= r <= n:
            raise InvalidInput(f"projection rank {r} outside [0, {n}]")
        q = random_unitary(n, rng)[:, :r]
        return q @ adjoint(q)
    raise InvalidInput(f"unknown k-spec {spec!r}")


def cmd_gen(args):
    seed = _need(args, "seed")
    k_rng, f_rng = (np.random.default_rng(s) for s in np.random.SeedSequence(seed).spawn(2))
    what = args.what
    if what == "operator":
        k = parse_k_spec(args.k_spec or "random", args.n, k_rng)
        return _emit(codec.operator_doc(k), args, {"rows": k.shape[0], "cols": k.shape[1]})
    if what == "frame":
        n, m = _need(args, "n"), _need(args, "m")
        if n < 1 or m < 1:
            raise InvalidInput("--n and --m must be positive")
        f = FrameSystem(random_complex(f_rng, (n, m)))
        return _emit(codec.frame_doc(f), args, {"dim": n, "count": m})
    if what == "subspace":
        n, d = _need(args, "n"), _need(args, "dim")
        if not 0 <= d <= n:
            raise InvalidInput("--dim must lie in [0, n]")
        basis = random_unitary(n, f_rng)[:, :d]
        return _emit(codec.subspace_doc(Subspace(n, basis)), args, {"ambient_dim": n, "dim": d})
    # parseval-kframe
    k = parse_k_spec(args.k_spec or "identity", args.n, k_rng)
    m = _need(args, "m")
    inst = random_parseval_kframe(k, m, int(f_rng.integers(2**63 - 1)))
    if args.k_out:
        codec.codec_save(codec.operator_doc(k), args.k_out)
    body = _emit(
        codec.frame_doc(inst.frame),
        args,
        {"dim": inst.n, "count": m, "residual": parseval_kframe_residual(inst), "k_out": args.k_out},
    )
    if not args.k_out:
        body["k_document"] = codec.operator_doc(k).payload
    return body


def _check_result(ok, body):
    body["passed"] = bool(ok)
    raise Outcome(body, 0 if ok else 1)


def cmd_check(args):
    tol = _tolerance(args)
    what = args.what
    f = _load(args, "frame", "frame")
    if what == "frame":
        b = frame_bounds(f, tol)
        _check_result(b.lower > 0, {"lower": b.lower, "upper": b.upper})
    if what == "parseval":
        res = parseval_residual(f)
        _check_result(is_parseval(f, tol), {"residual": res})
    if what == "equal-norm":
        ok, c = is_equal_norm(f, tol)
        norms = f.norms()
        _check_result(ok, {"c": c, "spread": float(norms.max() - norms.min())})
    if what == "dilation":
        k = _load(args, "k", "operator") if args.k else None
        return _check_dilation(args, k, f, tol)
    k = _load(args, "k", "operator")
    if what == "kframe":
        b = kframe_bounds(KFrameInstance(k, f), tol)
        _check_result(b.lower > 0, {"lower": b.lower, "upper": b.upper})
    if what == "parseval-kframe":
        inst = KFrameInstance(k, f)
        res = parseval_kframe_residual(inst)
        _check_result(is_parseval_kframe(inst, tol), {"residual": res})
    if what == "kdual":
        g = _load(args, "dual", "frame")
        pair = is_kdual(k, f, g, tol, seed=args.seed if args.seed is not None else 0)
        _check_result(
            pair.accepted and pair.dual_is_kstar_frame,
            {
                "residual": pair.residual,
                "reconstruction_residual": pair.reconstruction_residual if pair.accepted else None,
                "dual_is_kstar_frame": pair.dual_is_kstar_frame,
            },
        )
    # correspondence
    p = _load(args, "p", "operator") if args.p else coimage_projector(k, tol)
    w = _load(args, "subspace", "subspace")
    phi = frame_to_subspace(k, p, f, tol)
    if phi.dim != w.dim:
        _check_result(False, {"dim_frame": phi.dim, "dim_subspace": w.dim})
    angle = float(np.max(principal_angles(phi.basis, w.basis))) if w.dim else 0.0
    _check_result(angle <= 1e-6, {"max_principal_angle": angle})


def _check_dilation(args, k, f, tol):
    body = codec.decode(_load_report(args, "dilation"))
    basis = codec.decode(codec.validate(body["basis"]))
    proj = codec.decode(codec.validate(body["projector"]))
    embed = codec.decode(codec.validate(body["embed"]))
    recon = adjoint(embed) @ proj @ basis
    if k is not None:
        recon = k @ recon
    if recon.shape != f.synthesis.shape:
        raise InvalidInput("dilation does not match the frame dimensions")
    residual = float(np.max(np.linalg.norm(f.synthesis - recon, axis=0)))
    onb = fro(adjoint(basis) @ basis - np.eye(basis.shape[1]))
    ok = residual <= tol.eq_abs * max(1.0, op_norm(f.synthesis)) and is_projector(proj, tol) and onb <= tol.eq_abs
    _check_result(ok, {"residual": residual, "basis_orthonormality": onb})


def _load_report(args, name):
    path = _need(args, name)
    doc = codec.codec_load(path)
    if doc.kind != "report":
        raise InvalidInput(f"{path}: expected a report document")
    return doc


def cmd_bounds(args):
    tol = _tolerance(args)
    f = _load(args, "frame", "frame")
    if args.what == "frame":
        b = frame_bounds(f, tol)
    else:
        b = kframe_bounds(KFrameInstance(_load(args, "k", "operator"), f), tol)
    return {"lower": b.lower, "upper": b.upper, "is_frame": b.lower > 0}


def _dilation_doc(dil, name):
    return codec.report_doc(
        name,
        {
            "big_dim": dil.big_dim,
            "basis": codec.operator_doc(dil.basis).payload,
            "projector": codec.operator_doc(dil.projector).payload,
            "embed": codec.operator_doc(dil.embed).payload,
            "residual": dil.residual,
        },
    )


def cmd_construct(args):
    tol = _tolerance(args)
    what = args.what
    k = _load(args, "k", "operator") if what != "dilate" else None
    if what == "subspace-to-frame":
        p = _load(args, "p", "operator") if args.p else coimage_projector(k, tol)
        w = _load(args, "subspace", "subspace")
        g = subspace_to_frame(k, p, w, tol)
        return _emit(codec.frame_doc(g), args, {"count": g.count})
    f = _load(args, "frame", "frame")
    if what == "canonical-parseval":
        g, proj = canonical_parseval(KFrameInstance(k, f), tol)
        if args.proj_out:
            codec.codec_save(codec.operator_doc(proj), args.proj_out)
        return _emit(codec.frame_doc(g), args, {"proj_out": args.proj_out, "rank": int(round(np.trace(proj).real))})
    if what == "extend-knorm":
        inst = extend_to_knorm(k, f, tight_mode=args.tight, tol=tol)
        knorm_sq = op_norm(k) ** 2
        return _emit(
            codec.frame_doc(inst.frame),
            args,
            {"count": inst.frame.count, "bounds": [f.count, f.count * knorm_sq], "tight": args.tight},
        )
    if what == "dilate":
        dil = naimark_dilate(f, tol)
        return _emit(_dilation_doc(dil, "dilation"), args, {"residual": dil.residual})
    if what == "k-dilate":
        dil = kframe_dilation(KFrameInstance(k, f), tol)
        return _emit(_dilation_doc(dil, "k-dilation"), args, {"residual": dil.residual})
    if what == "kdual":
        z = _load(args, "z", "operator") if args.z else None
        g = kdual_family(k, f, z, tol)
        residual = fro(f.synthesis @ adjoint(g.synthesis) - k)
        return _emit(codec.frame_doc(g), args, {"residual": residual})
    if what == "equal-norm-dual":
        a = _need(args, "a")
        u = _load(args, "u", "operator") if args.u else None
        if u is None:
            _need(args, "seed")
        g, rep = equal_norm_dual(k, f, a, u, tol, seed=args.seed if args.seed is not None else 0)
        return _emit(
            codec.frame_doc(g),
            args,
            {
                "a": rep.a,
                "norms": list(rep.norms),
                "max_norm_spread": rep.max_norm_spread,
                "formula_value": rep.formula_value,
                "formula_applies": rep.formula_applies,
                "formula_residual": rep.formula_residual if rep.formula_applies else None,
                "duality_residual": rep.duality_residual,
                "orthogonality_residual": rep.orthogonality_residual,
            },
        )
    # frame-to-subspace
    p = _load(args, "p", "operator") if args.p else coimage_projector(k, tol)
    w = frame_to_subspace(k, p, f, tol)
    return _emit(codec.subspace_doc(w), args, {"dim": w.dim})


def cmd_report(args):
    tol = _tolerance(args)
    k = _load(args, "k", "operator")
    f = _load(args, "frame", "frame")
    if args.what == "trace-eigen":
        rep = trace_eigen_report(KFrameInstance(k, f), tol)
        return {
            "eigenvalues": list(rep.eigenvalues),
            "sum_norms_sq": rep.sum_norms_sq,
            "n_knorm_sq": rep.n_knorm_sq,
            "trace_kkstar": rep.trace_kkstar,
            "trace_residual": rep.trace_residual,
            "eigen_claim_holds": rep.eigen_claim_holds,
            "regime_scalar_kkstar": rep.regime_scalar_kkstar,
        }
    g = _load(args, "dual", "frame")
    seed = _need(args, "seed")
    rep = error_identity_report(k, f, g, tol, samples=args.samples, seed=seed)
    body = {
        "samples": rep.samples,
        "max_identity_residual": rep.max_identity_residual,
        "accepted": rep.accepted,
        "t_minus_k_theta_sq": rep.t_minus_k_theta_sq,
        "lower_bound": rep.lower_bound,
        "upper_bound": rep.upper_bound,
        "lower_vacuous": rep.lower_vacuous,
        "bound_holds": rep.bound_holds,
    }
    raise Outcome(body, 0 if rep.accepted else 1)


class _Parser(argparse.ArgumentParser):
    # usage errors are invalid input too: JSON on stderr, exit 2
    def error(self, message):
        err = {"error": "InvalidInput", "message": message, "usage": self.format_usage().strip()}
        sys.stderr.write(json.dumps(err, sort_keys=True) + "\n")
        sys.exit(2)


def build_parser():
    parser = _Parser(prog="kframekit", description=__doc__.splitlines()[0])
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--k", help="operator document")
    common.add_argument("--frame", help="frame document")
    common.add_argument("--dual", help="dual frame document")
    common.add_argument("--p", help="projector document (defaults to the projector onto R(K*))")
    common.add_argument("--subspace", help="subspace document")
    common.add_argument("--dilation", help="dilation report document")
    common.add_argument("--out", help="output document path (stdout if omitted)")
    common.add_argument("--seed", type=int)
    common.add_argument("--tol-abs", type=float, default=1e-9)
    common.add_argument("--tol-rel", type=float, default=1e-8)
    sub = parser.add_subparsers(dest="group", required=True)

    gen = sub.add_parser("gen", parents=[common])
    gen.add_argument("what", choices=("parseval-kframe", "frame", "operator", "subspace"))
    gen.add_argument("--n", type=int)
    gen.add_argument("--m", type=int)
    gen.add_argument("--dim", type=int, help="subspace dimension")
    gen.add_argument("--k-spec", help="identity | diag:<csv> | random | scaled-unitary:<c> | projection:<r>")
    gen.add_argument("--k-out", help="where to write K for parseval-kframe")
    gen.set_defaults(handler=cmd_gen)

    check = sub.add_parser("check", parents=[common])
    check.add_argument("what", choices=CHECKS)
    check.set_defaults(handler=cmd_check)

    bounds = sub.add_parser("bounds", parents=[common])
    bounds.add_argument("what", choices=("frame", "kframe"))
    bounds.set_defaults(handler=cmd_bounds)

    construct = sub.add_parser("construct", parents=[common])
    construct.add_argument("what", choices=CONSTRUCTS)
    construct.add_argument("--tight", action="store_true")
    construct.add_argument("--z", help="free parameter (n x m operator) for kdual")
    construct.add_argument("--a", type=float, help="nonzero scale for equal-norm-dual")
    construct.add_argument("--u", help="partial isometry (n x m operator) for equal-norm-dual")
    construct.add_argument("--proj-out", help="where to write P_R(K) for canonical-parseval")
    construct.set_defaults(handler=cmd_construct)

    report = sub.add_parser("report", parents=[common])
    report.add_argument("what", choices=("trace-eigen", "error-identity"))
    report.add_argument("--samples", type=int, default=100)
    report.set_defaults(handler=cmd_report)
    return parser


def _jsonable(obj):
    if isinstance(obj, dict):
        return {k: _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.floating, float)):
        return float(obj) if np.isfinite(obj) else None
    return obj


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    command = f"{args.group} {args.what}"
    try:
        tol = _tolerance(args)
        try:
            body, code = args.handler(args), 0
        except Outcome as out:
            body, code = out.body, out.code
    except InvalidInput as exc:
        err = exc.to_dict()
        err["command"] = command
        sys.stderr.write(json.dumps(_jsonable(err), sort_keys=True) + "\n")
        return 2
    except FrameError as exc:
        body, code = exc.to_dict(), 1
    body = dict(body)
    body["command"] = command
    body["tolerance"] = {"eq_abs": tol.eq_abs, "eq_rel": tol.eq_rel, "rank_rel": tol.rank_rel}
    sys.stdout.write(json.dumps(_jsonable(body), sort_keys=True) + "\n")
    return code


if __name__ == "__main__":
    sys.exit(main())
