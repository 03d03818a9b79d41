"""Command-line interface.

::

    lancaster maxcorr   --spec SPEC [--K 12]
    lancaster oracle    --spec SPEC_OR_JOINT [--bins 128] [--tol 1e-8]
    lancaster simulate  --spec REQUEST [--replicates N] [--seed S]
    lancaster reproduce [--filter TEXT] [--replicates N] [--seed S]

``--spec`` takes a file path or inline JSON.  Results go to stdout (or
``--out``) as JSON, or CSV with ``--format csv``; diagnostics go to
stderr.  ``--plot`` also writes an SVG chart next to the output.

Exit codes: 0 ok, 1 a reproduce row failed, 2 invalid input,
3 truncation unproven, 4 ACE did not converge, 5 degenerate variance.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
import warnings
from pathlib import Path
from typing import Any, Sequence

from .errors import DegenerateVariance, LancasterError, NoConvergenceWarning
from .families import FamilySpec, FinitePopOrderStats, closed_form_R
from .joint import DiscreteJoint
from .maxcorr import maximal_correlation
from .oracle import DEFAULT_BINS, ace_maxcorr, discretize, svd_maxcorr
from .simulate import SimRequest

EXIT_OK = 0
EXIT_ROW_FAILED = 1
EXIT_INVALID = 2
EXIT_TRUNCATION = 3
EXIT_NO_CONVERGENCE = 4
EXIT_DEGENERATE = 5

REPRODUCE_REPLICATES = 1_000_000


class _InvalidInput(Exception):
    pass


def _load_json(text: str) -> Any:
    raw = text.strip()
    if not raw.startswith(("{", "[")):
        try:
            raw = Path(text).read_text()
        except OSError as exc:
            raise _InvalidInput(f"cannot read spec file {text!r}: {exc.strerror}") from None
    try:
        return json.loads(raw)
    except json.JSONDecodeError as exc:
        raise _InvalidInput(f"malformed JSON: {exc}") from None


def _csv(rows: Sequence[dict], columns: Sequence[str]) -> str:
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=list(columns), extrasaction="ignore", lineterminator="\n")
    w.writeheader()
    for r in rows:
        w.writerow({k: ("" if r.get(k) is None else r.get(k)) for k in columns})
    return buf.getvalue()


def _emit(args, doc: Any, rows: Sequence[dict] | None = None, columns: Sequence[str] | None = None) -> None:
    if args.format == "csv":
        if rows is None:
            rows = [doc]
        text = _csv(rows, columns or list(rows[0].keys()))
    else:
        text = json.dumps(doc, indent=2) + "\n"
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)


def _plot_path(args) -> Path:
    if args.out:
        return Path(args.out).with_suffix(".svg")
    return Path(f"lancaster-{args.command}.svg")


def _note(msg: str) -> None:
    print(msg, file=sys.stderr)


# --------------------------------------------------------------------------- #
# Commands
# --------------------------------------------------------------------------- #


def cmd_maxcorr(args) -> int:
    spec = FamilySpec.from_dict(_load_json(args.spec))
    rep = maximal_correlation(spec, args.K)
    doc = rep.to_dict()
    _emit(args, doc)
    _note(rep.attainment)
    if args.plot:
        from .plotting import plot_sequence

        _note(f"wrote {plot_sequence(rep.sequence.rho, rep.R, _plot_path(args))}")
    if not rep.truncation_proven:
        _note(rep.truncation_note)
        return EXIT_TRUNCATION
    return EXIT_OK


def cmd_oracle(args) -> int:
    doc_in = _load_json(args.spec)
    if not isinstance(doc_in, dict):
        raise _InvalidInput("oracle input must be a JSON object")
    spec = None
    if "family" in doc_in:
        spec = FamilySpec.from_dict(doc_in)
    if spec is None or isinstance(spec, FinitePopOrderStats):
        try:
            joint = DiscreteJoint.from_dict(doc_in) if spec is None else discretize(spec)
        except (KeyError, TypeError, ValueError) as exc:
            raise _InvalidInput(f"invalid joint table: {exc}") from None
        r = svd_maxcorr(joint)
        out = {"R_hat": r, "method": "svd"}
        if spec is not None:
            out["residual_vs_closed_form"] = abs(r - closed_form_R(spec))
        _emit(args, out)
        return EXIT_OK

    joint = discretize(spec, args.bins)
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always", NoConvergenceWarning)
        res = ace_maxcorr(joint, tol=args.tol, max_iter=args.max_iter, seed=args.seed)
    out = {
        "R_hat": res.R_hat,
        "method": "ace",
        "residual_vs_closed_form": abs(res.R_hat - closed_form_R(spec)),
        "converged": res.converged,
        "iterations": res.iterations,
        "bins": args.bins,
    }
    _emit(args, out)
    if args.plot:
        from .plotting import plot_transforms

        J = joint.restricted()
        _note(f"wrote {plot_transforms(J.x_support, res.g_table, J.y_support, res.h_table, _plot_path(args))}")
    for w in caught:
        _note(str(w.message))
    return EXIT_OK if res.converged else EXIT_NO_CONVERGENCE


def cmd_simulate(args) -> int:
    req = SimRequest.from_dict(_load_json(args.spec))
    est = req.run(replicates=args.replicates, seed=args.seed, workers=args.workers)
    _emit(args, est.to_dict())
    if args.plot:
        from .plotting import plot_estimate

        _note(f"wrote {plot_estimate(est.corr_hat, est.stderr, est.bound, req.model, _plot_path(args))}")
    return EXIT_OK


def cmd_reproduce(args) -> int:
    from .reproduce import CSV_COLUMNS, results_matrix

    reps = REPRODUCE_REPLICATES if args.replicates is None else args.replicates
    seed = 0 if args.seed is None else args.seed
    rows = results_matrix(args.filter, replicates=reps, seed=seed, bins=args.bins or 200, tol=args.tol)
    if not rows:
        _note(f"no checks match filter {args.filter!r}")
    dicts = [r.to_dict() for r in rows]
    _emit(args, dicts, rows=dicts, columns=CSV_COLUMNS)
    failed = [r.check_id for r in rows if not r.passed]
    for cid in failed:
        _note(f"FAILED {cid}")
    _note(f"{len(rows) - len(failed)}/{len(rows)} checks passed")
    if args.plot and rows:
        from .plotting import plot_matrix

        sel = [r for r in rows if r.group not in ("identities", "diagonal")] or rows
        _note(f"wrote {plot_matrix([r.paper_value for r in sel], [r.computed for r in sel], [r.passed for r in sel], _plot_path(args))}")
    return EXIT_ROW_FAILED if failed else EXIT_OK


# --------------------------------------------------------------------------- #
# Parser
# --------------------------------------------------------------------------- #


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="lancaster", description="Maximal correlation of diagonal bivariate laws.")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, spec_required=True):
        if spec_required:
            sp.add_argument("--spec", required=True, help="JSON file path or inline JSON")
        sp.add_argument("--out", help="write the result here instead of stdout")
        sp.add_argument("--format", choices=("json", "csv"), default="json")
        sp.add_argument("--plot", action="store_true", help="also write an SVG chart")

    sp = sub.add_parser("maxcorr", help="R from the regression coefficients")
    common(sp)
    sp.add_argument("--K", type=int, default=12, help="degree cap")
    sp.set_defaults(func=cmd_maxcorr)

    sp = sub.add_parser("oracle", help="numerical R (SVD or ACE)")
    common(sp)
    sp.add_argument("--bins", type=int, default=DEFAULT_BINS)
    sp.add_argument("--tol", type=float, default=1e-8)
    sp.add_argument("--max-iter", type=int, default=10_000)
    sp.add_argument("--seed", type=int, default=0)
    sp.set_defaults(func=cmd_oracle)

    sp = sub.add_parser("simulate", help="Monte Carlo correlation estimate")
    common(sp)
    sp.add_argument("--replicates", type=int)
    sp.add_argument("--seed", type=int)
    sp.add_argument("--workers", type=int, default=1)
    sp.set_defaults(func=cmd_simulate)

    sp = sub.add_parser("reproduce", help="run the full results matrix")
    common(sp, spec_required=False)
    sp.add_argument("--filter")
    sp.add_argument("--replicates", type=int)
    sp.add_argument("--seed", type=int)
    sp.add_argument("--bins", type=int)
    sp.add_argument("--tol", type=float, default=1e-8)
    sp.set_defaults(func=cmd_reproduce)
    return p


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except _InvalidInput as exc:
        _note(f"error: {exc}")
        return EXIT_INVALID
    except DegenerateVariance as exc:
        _note(f"error: degenerate variance: {exc}")
        return EXIT_DEGENERATE
    except (LancasterError, ValueError) as exc:
        _note(f"error: {exc}")
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
