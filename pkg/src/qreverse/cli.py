"""Command-line front end.

Subcommands read a JSON input document, dispatch to the library, and print a
machine-readable report to stdout.  Exit codes form a stable contract for
scripting: 0 for an affirmative verdict, 2 for a negative verdict, 1 for
usage or input errors.  Diagnostics go to stderr only.
"""

from __future__ import annotations

import argparse
import sys

import numpy as np

from .demon import DemonConfig, canonical_scheme, run_cycle, second_law_check
from .documents import InputDocument, dump_report, load_input_document
from .errors import (
    AnnihilationError,
    InputDocumentError,
    NotReversibleError,
    QReverseError,
)
from .linalg import hermitian_eig
from .measures import (
    entanglement_fidelity,
    entropy_exchange,
    fano_check,
    subadditivity_report,
    w_matrix,
)
from .reversal import (
    adjoint_condition_check,
    algebraic_m_matrix,
    construct_reversal,
    degeneracy_report,
    info_theoretic_reversibility,
    verify_reversal,
)

EXIT_OK = 0
EXIT_INPUT_ERROR = 1
EXIT_NEGATIVE = 2


class _Parser(argparse.ArgumentParser):
    """argparse exits with 2 on usage errors; our contract reserves 2 for verdicts."""

    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_INPUT_ERROR)


def _build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="qreverse", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(p):
        p.add_argument("--input", required=True, help="input document path, or - for stdin")
        p.add_argument("--tolerance", type=float, default=None, help="override eq_tol")
        p.add_argument("--rank-cutoff", type=float, default=None, help="override rank_cutoff")
        p.add_argument(
            "--log-base", choices=["2", "e"], default=None, help="entropy unit (bits or nats)"
        )
        p.add_argument("--figures", default=None, metavar="DIR", help="render figures into DIR")

    p_check = sub.add_parser("check", help="decide reversibility of an operation on a code")
    p_check.add_argument("operation")
    p_check.add_argument("code")
    common(p_check)

    p_rev = sub.add_parser("reverse", help="construct and verify the reversal operation")
    p_rev.add_argument("operation")
    p_rev.add_argument("code")
    p_rev.add_argument(
        "--emit-reversal", default=None, metavar="PATH", help="write the reversal kraus JSON"
    )
    common(p_rev)

    p_ent = sub.add_parser("entropy", help="entanglement fidelity, entropy exchange, inequalities")
    p_ent.add_argument("operation")
    p_ent.add_argument("state")
    common(p_ent)

    p_dem = sub.add_parser("demon", help="run one error-correction cycle and audit its entropy")
    p_dem.add_argument("noise")
    p_dem.add_argument("state")
    p_dem.add_argument("code")
    p_dem.add_argument(
        "--scheme",
        default="canonical",
        help="'canonical' to derive the scheme from the reversal, or a named scheme",
    )
    p_dem.add_argument(
        "--record-model", choices=["ideal", "shannon"], default="ideal", help="record cost model"
    )
    common(p_dem)
    return parser


def _read_document(args) -> InputDocument:
    if args.input == "-":
        text = sys.stdin.read()
    else:
        try:
            with open(args.input, "r", encoding="utf-8") as fh:
                text = fh.read()
        except OSError as exc:
            raise InputDocumentError(f"cannot read {args.input}: {exc}") from exc
    overrides = {
        "eq_tol": args.tolerance,
        "rank_cutoff": args.rank_cutoff,
        "log_base": {None: None, "2": 2.0, "e": float(np.e)}[args.log_base],
    }
    return load_input_document(text, overrides)


def _tolerance_block(tol) -> dict:
    return {"eq_tol": tol.eq_tol, "rank_cutoff": tol.rank_cutoff, "log_base": tol.log_base}


def _check_block(check) -> dict:
    return {
        "name": check.name,
        "lhs": check.lhs,
        "rhs": check.rhs,
        "slack": check.slack,
        "holds": check.holds,
        "saturated": check.saturated,
    }


def cmd_check(args) -> int:
    doc = _read_document(args)
    e = doc.operation(args.operation)
    code = doc.code(args.code)
    tol = doc.tolerance
    verdict = info_theoretic_reversibility(e, code, tol)
    m, algebraic_holds = algebraic_m_matrix(e, code, tol)
    adjoint_rep = adjoint_condition_check(e, code, tol)
    reversible = bool(verdict.reversible and algebraic_holds)
    degeneracy = None
    if algebraic_holds:
        try:
            deg = degeneracy_report(e, code, tol)
        except NotReversibleError:
            deg = None
        if deg is not None:
            degeneracy = {
                "degenerate": deg.degenerate,
                "span_dim_full": deg.span_dim_full,
                "span_dim_restricted": deg.span_dim_restricted,
                "zero_weights": deg.zero_weights,
            }
    report = {
        "command": "check",
        "input": args.input,
        "operation": args.operation,
        "code": args.code,
        "tolerance": _tolerance_block(tol),
        "reversible": reversible,
        "failure_reason": verdict.failure_reason,
        "mu_squared": verdict.mu_squared,
        "condition1": None
        if verdict.condition1 is None
        else {
            "holds": verdict.condition1.holds,
            "mu_squared": verdict.condition1.mu_squared,
            "residual": verdict.condition1.residual,
        },
        "condition2": None
        if verdict.condition2 is None
        else {
            "holds": verdict.condition2.holds,
            "lhs": verdict.condition2.lhs,
            "rhs": verdict.condition2.rhs,
            "residual": verdict.condition2.residual,
        },
        "algebraic": {
            "holds": algebraic_holds,
            "mu_squared": m.mu_squared,
            "proportionality_residual": m.proportionality_residual,
            "m_matrix": m.matrix,
        },
        "adjoint_condition": {
            "holds": adjoint_rep.holds,
            "gamma_squared": adjoint_rep.gamma_squared,
            "worst_residual": adjoint_rep.worst_residual,
        },
        "degeneracy": degeneracy,
    }
    status = EXIT_OK if reversible else EXIT_NEGATIVE
    report["exit_status"] = status
    sys.stdout.write(dump_report(report))
    return status


def cmd_reverse(args) -> int:
    doc = _read_document(args)
    e = doc.operation(args.operation)
    code = doc.code(args.code)
    tol = doc.tolerance
    try:
        construction = construct_reversal(e, code, tol)
    except (NotReversibleError, AnnihilationError) as exc:
        report = {
            "command": "reverse",
            "input": args.input,
            "operation": args.operation,
            "code": args.code,
            "tolerance": _tolerance_block(tol),
            "reversible": False,
            "error": str(exc),
            "exit_status": EXIT_NEGATIVE,
        }
        sys.stdout.write(dump_report(report))
        return EXIT_NEGATIVE
    verification = verify_reversal(construction.reversal, e, code, tol)
    report = {
        "command": "reverse",
        "input": args.input,
        "operation": args.operation,
        "code": args.code,
        "tolerance": _tolerance_block(tol),
        "reversible": True,
        "mu_squared": construction.mu_squared,
        "degenerate": construction.degenerate,
        "weights": construction.weights,
        "lambdas": construction.lambdas,
        "syndrome_projectors": list(construction.syndrome_projectors),
        "reversal_kraus": list(construction.reversal.kraus),
        "verification": {
            "ok": verification.ok,
            "mu_squared": verification.mu_squared,
            "worst_residual": verification.worst_residual,
        },
        "exit_status": EXIT_OK,
    }
    if args.emit_reversal:
        payload = {
            "version": "1",
            "dim": e.dim,
            "kraus": list(construction.reversal.kraus),
        }
        with open(args.emit_reversal, "w", encoding="utf-8") as fh:
            fh.write(dump_report(payload))
    sys.stdout.write(dump_report(report))
    if args.figures:
        from .figures import render_reversal_figure

        path = render_reversal_figure(
            {
                "operation": args.operation,
                "code": args.code,
                "weights": [float(w) for w in construction.weights],
                "degenerate": construction.degenerate,
                "mu_squared": construction.mu_squared,
            },
            args.figures,
        )
        print(f"wrote figure {path}", file=sys.stderr)
    return EXIT_OK


def cmd_entropy(args) -> int:
    doc = _read_document(args)
    e = doc.operation(args.operation)
    rho = doc.state(args.state)
    tol = doc.tolerance
    try:
        fidelity = entanglement_fidelity(e, rho, tol)
        w = w_matrix(e, rho, tol)
        exchange = entropy_exchange(e, rho, tol)
        fano = fano_check(e, rho, tol)
        sub = subadditivity_report(e, rho, tol)
    except AnnihilationError as exc:
        report = {
            "command": "entropy",
            "input": args.input,
            "operation": args.operation,
            "state": args.state,
            "tolerance": _tolerance_block(tol),
            "error": str(exc),
            "exit_status": EXIT_NEGATIVE,
        }
        sys.stdout.write(dump_report(report))
        return EXIT_NEGATIVE
    eigenvalues = hermitian_eig(w.matrix, tol).eigenvalues
    report = {
        "command": "entropy",
        "input": args.input,
        "operation": args.operation,
        "state": args.state,
        "tolerance": _tolerance_block(tol),
        "entanglement_fidelity": fidelity,
        "entropy_exchange": exchange,
        "w_eigenvalues": eigenvalues,
        "fano": {
            "holds": fano.holds,
            "entropy_exchange": fano.entropy_exchange,
            "fidelity": fano.fidelity,
            "bound": fano.bound,
            "slack": fano.bound - fano.entropy_exchange,
        },
        "subadditivity": {
            "s_reference": sub.s_reference,
            "s_system": sub.s_system,
            "entropy_exchange": sub.entropy_exchange,
            "checks": [_check_block(c) for c in sub.checks],
            "rq_product_state": sub.rq_product_state,
            "all_hold": sub.all_hold,
        },
        "exit_status": EXIT_OK,
    }
    sys.stdout.write(dump_report(report))
    if args.figures:
        from .documents import jsonable
        from .figures import render_entropy_figure

        path = render_entropy_figure(jsonable(report), args.figures)
        print(f"wrote figure {path}", file=sys.stderr)
    return EXIT_OK


def cmd_demon(args) -> int:
    doc = _read_document(args)
    noise = doc.operation(args.noise)
    rho = doc.state(args.state)
    code = doc.code(args.code)
    tol = doc.tolerance
    if args.scheme == "canonical":
        try:
            scheme = canonical_scheme(noise, code, tol)
        except (NotReversibleError, AnnihilationError) as exc:
            report = {
                "command": "demon",
                "input": args.input,
                "noise": args.noise,
                "state": args.state,
                "code": args.code,
                "scheme": args.scheme,
                "tolerance": _tolerance_block(tol),
                "error": f"cannot build canonical scheme: {exc}",
                "exit_status": EXIT_NEGATIVE,
            }
            sys.stdout.write(dump_report(report))
            return EXIT_NEGATIVE
    else:
        scheme = doc.scheme(args.scheme)
    record_model = {"ideal": "ideal_H", "shannon": "shannon_code_lengths"}[args.record_model]
    cfg = DemonConfig(
        noise=noise, scheme=scheme, initial_state=rho, code=code, record_model=record_model
    )
    ledger = run_cycle(cfg, tol)
    chain = second_law_check(ledger, tol)
    report = {
        "command": "demon",
        "input": args.input,
        "noise": args.noise,
        "state": args.state,
        "code": args.code,
        "scheme": args.scheme,
        "record_model": record_model,
        "tolerance": _tolerance_block(tol),
        "ledger": {
            "delta_s": ledger.delta_s,
            "delta_s_c": ledger.delta_s_c,
            "shannon_h": ledger.shannon_h,
            "entropy_exchange_reversal": ledger.entropy_exchange_reversal,
            "avg_record_length": ledger.avg_record_length,
            "record_lengths": list(ledger.record_lengths),
            "probabilities": list(ledger.probabilities),
            "labels": list(ledger.labels),
            "pruned_labels": list(ledger.pruned_labels),
            "cycle_closed": ledger.cycle_closed,
            "correction_uniform": ledger.correction_uniform,
            "chain_holds": ledger.chain_holds,
        },
        "chain": [_check_block(link) for link in chain.links],
        "exit_status": EXIT_OK if chain.holds else EXIT_NEGATIVE,
    }
    sys.stdout.write(dump_report(report))
    if args.figures:
        from .documents import jsonable
        from .figures import render_demon_figure

        path = render_demon_figure(jsonable(report), args.figures)
        print(f"wrote figure {path}", file=sys.stderr)
    return EXIT_OK if chain.holds else EXIT_NEGATIVE


_COMMANDS = {
    "check": cmd_check,
    "reverse": cmd_reverse,
    "entropy": cmd_entropy,
    "demon": cmd_demon,
}


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return _COMMANDS[args.command](args)
    except InputDocumentError as exc:
        print(f"qreverse: input error: {exc}", file=sys.stderr)
        return EXIT_INPUT_ERROR
    except QReverseError as exc:
        print(f"qreverse: input error: {exc}", file=sys.stderr)
        return EXIT_INPUT_ERROR
    except OSError as exc:
        print(f"qreverse: {exc}", file=sys.stderr)
        return EXIT_INPUT_ERROR


def run() -> None:
    sys.exit(main())
