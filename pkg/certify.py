#!/usr/bin/env python3
"""
Certificate Emitter

Runs one demonstration per subcommand and prints a JSON certificate envelope:
the parameters, the exact result and every verification check that was run.

Usage:
    # Atomic rank-2 monoid without ACCP, stage 1, with atom checks and chain
    python certify.py construct --stages 1 --verify-atoms --chain

    # Classify Z^2
    python certify.py classify-group --relations "[[0,0],[0,0]]"

    # Figure for stage 1
    python certify.py figure --stages 1 --csv out/points.csv --figure out/points.svg

    # Re-check an emitted certificate
    python certify.py verify out/construct.json

Exit codes: 0 all checks passed, 2 a check failed (the envelope is still written),
1 usage error.
"""

import argparse
import json
import logging
import sys
from pathlib import Path
from typing import Any, Dict, List, Optional, Protocol

# Load environment variables from .env file
try:
    from dotenv import load_dotenv
    load_dotenv()
except ImportError:
    pass

from atomcraft import certify, list_families, load_family, verify_envelope
from atomcraft.api import Settings
from atomcraft.models import CertificateEnvelope, CheckResult, UnsupportedFamilyError
from atomcraft.utils import env_str

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_VERIFICATION = 2


class UsageError(Exception):
    """Raised for bad command lines instead of argparse's own exit."""


class CertifyArgumentParser(argparse.ArgumentParser):
    def error(self, message: str) -> None:
        raise UsageError(f"{self.prog}: {message}")


class Sink(Protocol):
    """
    Output sink for documents.
    Implementations decide where text is written.
    """
    def write(self, text: str) -> None:
        ...


class StdoutSink:
    """Prints documents to stdout."""
    def write(self, text: str) -> None:
        sys.stdout.write(text)
        if not text.endswith("\n"):
            sys.stdout.write("\n")


class FileSink:
    """Writes a document to a file, creating parent directories."""
    def __init__(self, path: str):
        self.path = Path(path)

    def write(self, text: str) -> None:
        self.path.parent.mkdir(parents=True, exist_ok=True)
        with self.path.open("w", newline="\n", encoding="utf-8") as f:
            f.write(text if text.endswith("\n") else text + "\n")


def status(ok: bool, message: str) -> None:
    print(f"{'✓' if ok else '✗'} {message}", file=sys.stderr)


# ============================================================================
# Argument helpers
# ============================================================================

def _json_arg(text: str, name: str) -> Any:
    try:
        return json.loads(text)
    except json.JSONDecodeError as e:
        raise UsageError(f"Invalid JSON for {name}: {e}") from e


def _int_list(text: str, name: str) -> List[int]:
    try:
        return [int(part) for part in text.split(",") if part.strip()]
    except ValueError as e:
        raise UsageError(f"Invalid {name}: {text!r}. Expected comma-separated integers") from e


def _family_params(pairs: Optional[List[str]]) -> Dict[str, Any]:
    params: Dict[str, Any] = {}
    for pair in pairs or []:
        if "=" not in pair:
            raise UsageError(f"Invalid --param {pair!r}. Use key=value")
        key, value = pair.split("=", 1)
        if "," in value:
            params[key] = [v.strip() for v in value.split(",")]
        else:
            try:
                params[key] = int(value)
            except ValueError:
                params[key] = value
    return params


def _rule(text: Optional[str]) -> Optional[Dict[str, Any]]:
    if text is None:
        return None
    kind, _, base = text.partition(":")
    rule: Dict[str, Any] = {"kind": kind}
    if base:
        try:
            rule["base"] = int(base)
        except ValueError as e:
            raise UsageError(f"Invalid --rule {text!r}. Use power:B or factorial") from e
    return rule


def _with_family(params: Dict[str, Any], args: argparse.Namespace) -> Dict[str, Any]:
    params["family"] = args.family
    family_params = _family_params(args.param)
    if family_params:
        params["familyParams"] = family_params
    return params


def _with_chain(params: Dict[str, Any], args: argparse.Namespace) -> Dict[str, Any]:
    params["chain"] = _int_list(args.chain, "--chain")
    rule = _rule(args.rule)
    if rule is not None:
        params["rule"] = rule
    return params


# ============================================================================
# Parameter builders (one per subcommand)
# ============================================================================

def params_construct(args: argparse.Namespace) -> Dict[str, Any]:
    params: Dict[str, Any] = {"stages": args.stages}
    if args.verify_atoms:
        params["verifyAtoms"] = True
    if args.chain:
        params["chain"] = True
    if args.figure or args.csv:
        params["figure"] = True
    if args.enumerate_up_to is not None:
        params["enumerateUpTo"] = args.enumerate_up_to
    return params


def params_atoms(args: argparse.Namespace) -> Dict[str, Any]:
    if args.family:
        return _with_family({"count": args.count}, args)
    if args.generators:
        if not args.functional:
            raise UsageError("--generators requires --functional")
        return {
            "generators": _json_arg(args.generators, "--generators"),
            "functional": args.functional,
        }
    params: Dict[str, Any] = {"stages": args.stages}
    if args.enumerate_up_to is not None:
        params["enumerateUpTo"] = args.enumerate_up_to
    return params


def params_chain(args: argparse.Namespace) -> Dict[str, Any]:
    if args.family:
        return _with_family({"count": args.count}, args)
    return {"stages": args.stages}


def params_member(args: argparse.Namespace) -> Dict[str, Any]:
    if args.family:
        params = _with_family({"count": args.count, "target": args.target}, args)
        if args.normal_form:
            params["normalForm"] = True
        return params
    if not args.generators:
        raise UsageError("member requires --generators or --family")
    params = {
        "generators": _json_arg(args.generators, "--generators"),
        "target": _json_arg(args.target, "--target"),
    }
    if args.functional:
        params["functional"] = args.functional
    elif args.bound is not None:
        params["bound"] = args.bound
    else:
        raise UsageError("lattice membership requires --bound or --functional")
    return params


def params_classify_group(args: argparse.Namespace) -> Dict[str, Any]:
    if args.chain:
        return _with_chain({}, args)
    params: Dict[str, Any] = {"relations": _json_arg(args.relations or "[]", "--relations")}
    if args.generators is not None:
        params["generators"] = args.generators
    elif not params["relations"]:
        raise UsageError("classify-group requires --relations, --generators or --chain")
    return params


def params_classify_algebra(args: argparse.Namespace) -> Dict[str, Any]:
    params: Dict[str, Any] = {
        "characteristic": args.characteristic,
        "algebraic": not args.transcendental,
    }
    if args.chain:
        return _with_chain(params, args)
    if args.relations:
        params["relations"] = _json_arg(args.relations, "--relations")
        return params
    params["group"] = args.group
    return params


def params_frobenius(args: argparse.Namespace) -> Dict[str, Any]:
    params: Dict[str, Any] = {"element": args.element, "p": args.p}
    if args.group:
        params["group"] = args.group
    return params


def params_lengths(args: argparse.Namespace) -> Dict[str, Any]:
    params: Dict[str, Any] = {
        "primesUpTo": args.primes_up_to,
        "modulus": args.modulus,
        "element": args.element,
    }
    if args.split:
        params["split"] = args.split
    return params


def params_figure(args: argparse.Namespace) -> Dict[str, Any]:
    return {"stages": args.stages, "digits": args.digits}


def params_zaks(args: argparse.Namespace) -> Dict[str, Any]:
    return {"k": args.k, "extra": args.extra}


def params_gottili(args: argparse.Namespace) -> Dict[str, Any]:
    return {"count": args.count, "base": args.base, "beta": args.beta}


def params_witness(args: argparse.Namespace) -> Dict[str, Any]:
    if args.kind == "rank2":
        return {
            "kind": "rank2",
            "u": _int_list(args.u, "--u"),
            "v": _int_list(args.v, "--v"),
        }
    if not args.chain:
        raise UsageError("witness --kind rank1 requires --chain with --rule")
    params = _with_chain({"kind": "rank1", "count": args.count}, args)
    if args.moduli:
        params["moduli"] = _int_list(args.moduli, "--moduli")
    if args.torsion:
        params["torsion"] = _json_arg(args.torsion, "--torsion")
    return params


def params_search(args: argparse.Namespace) -> Dict[str, Any]:
    params: Dict[str, Any] = {"element": args.element, "modulus": args.modulus}
    if args.family:
        if args.count is None:
            raise UsageError("search --family requires --count")
        _with_family(params, args)
        params["count"] = args.count
    if args.budget is not None:
        params["budget"] = args.budget
    return params


BUILDERS = {
    "construct": params_construct,
    "atoms": params_atoms,
    "chain": params_chain,
    "member": params_member,
    "classify-group": params_classify_group,
    "classify-algebra": params_classify_algebra,
    "frobenius": params_frobenius,
    "lengths": params_lengths,
    "figure": params_figure,
    "zaks": params_zaks,
    "gottili": params_gottili,
    "witness": params_witness,
    "search": params_search,
}


# ============================================================================
# Parser
# ============================================================================

def build_parser() -> CertifyArgumentParser:
    common = CertifyArgumentParser(add_help=False)
    common.add_argument("--out", type=str, help="Write the JSON document to this file")
    common.add_argument("--verbose", action="store_true", help="Debug logging on stderr")

    family = CertifyArgumentParser(add_help=False)
    family.add_argument("--family", type=str, help="Puiseux family name (see 'families')")
    family.add_argument(
        "--param", action="append", help="Family parameter key=value (e.g. q=2/3, base=5)"
    )

    parser = CertifyArgumentParser(
        prog="certify.py",
        description="Emit exact certificates for atomicity and ACCP demonstrations",
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog="""
Examples:
  # Construction with atom checks and the ascending chain
  python certify.py construct --stages 1 --verify-atoms --chain

  # Puiseux chain certificate
  python certify.py chain --family geometric --param q=2/3 --count 8

  # Group classification
  python certify.py classify-group --relations "[[0,0],[0,0]]"
  python certify.py classify-group --chain 1,2,4 --rule power:2

  # Frobenius root in F_2[Z[1/2]]
  python certify.py frobenius --element "1 + x" --p 2

  # Re-check a document
  python certify.py verify out/construct.json
        """,
    )
    sub = parser.add_subparsers(dest="command", parser_class=CertifyArgumentParser)

    p = sub.add_parser("construct", parents=[common], help="Run the lattice construction")
    p.add_argument("--stages", type=int, default=1, help="Number of stages (default: 1)")
    p.add_argument("--verify-atoms", action="store_true", help="Check atom sets per stage")
    p.add_argument("--chain", action="store_true", help="Emit the non-stabilizing chain")
    p.add_argument("--enumerate-up-to", type=int, help="Last stage checked by enumeration")
    p.add_argument("--csv", type=str, help="Also write the figure CSV to this path")
    p.add_argument("--figure", type=str, help="Also write the figure SVG to this path")

    p = sub.add_parser("atoms", parents=[common, family], help="Atom sets with certificates")
    p.add_argument("--stages", type=int, default=2)
    p.add_argument("--enumerate-up-to", type=int)
    p.add_argument("--count", type=int, default=5, help="Generators spot-checked (families)")
    p.add_argument("--generators", type=str, help='Lattice generators as JSON, e.g. "[[1,0]]"')
    p.add_argument("--functional", nargs="+", help='Positive functional, entries "a,b"')

    p = sub.add_parser("chain", parents=[common, family], help="Ascending principal ideals")
    p.add_argument("--stages", type=int, default=3)
    p.add_argument("--count", type=int, default=8)

    p = sub.add_parser("member", parents=[common, family], help="Membership certificates")
    p.add_argument("--target", type=str, required=True)
    p.add_argument("--generators", type=str)
    p.add_argument("--bound", type=int)
    p.add_argument("--functional", nargs="+")
    p.add_argument("--count", type=int, default=5)
    p.add_argument("--normal-form", action="store_true", help="Digit normal form")

    p = sub.add_parser("classify-group", parents=[common], help="Hereditary atomicity of G")
    p.add_argument("--relations", type=str, help="Relation matrix as JSON rows")
    p.add_argument("--generators", type=int, help="Number of generators")
    p.add_argument("--chain", type=str, help="Denominator chain prefix, e.g. 1,2,4")
    p.add_argument("--rule", type=str, help="Continuation: power:B or factorial")

    p = sub.add_parser("classify-algebra", parents=[common], help="Hereditary atomicity of F[G]")
    p.add_argument("--characteristic", type=int, default=2)
    p.add_argument("--transcendental", action="store_true")
    p.add_argument(
        "--group", choices=["infinite-cyclic", "trivial", "other"], default="infinite-cyclic"
    )
    p.add_argument("--relations", type=str)
    p.add_argument("--chain", type=str)
    p.add_argument("--rule", type=str)

    p = sub.add_parser("frobenius", parents=[common], help="p-th root witness")
    p.add_argument("--element", type=str, required=True, help='e.g. "1 + x^(1/2)"')
    p.add_argument("--p", type=int, required=True)
    p.add_argument("--group", type=str, help="Exponent group: Z, Q or Z[1/p] (default Z[1/p])")

    p = sub.add_parser("lengths", parents=[common], help="Length sets in <1/p>")
    p.add_argument("--primes-up-to", type=int, default=7)
    p.add_argument("--modulus", type=int, default=2)
    p.add_argument("--element", type=str, default="1")
    p.add_argument("--split", type=str, help="Also split this rational q > 1")

    p = sub.add_parser("figure", parents=[common], help="CSV/SVG of the construction")
    p.add_argument("--stages", type=int, default=1)
    p.add_argument("--digits", type=int, default=12)
    p.add_argument("--csv", type=str, help="CSV output path")
    p.add_argument("--figure", type=str, help="SVG output path")

    p = sub.add_parser("zaks", parents=[common], help="Zaks generator truncation")
    p.add_argument("--k", type=int, default=3)
    p.add_argument("--extra", type=int, default=0, help="Product with N_0^extra")

    p = sub.add_parser("gottili", parents=[common], help="Rank-2 monoid over sparse primes")
    p.add_argument("--count", type=int, default=3)
    p.add_argument("--base", type=int, default=5)
    p.add_argument("--beta", type=str, default="0,1", help='beta = a + b*sqrt2 as "a,b"')

    p = sub.add_parser("witness", parents=[common], help="Non-atomic witness monoids")
    p.add_argument("--kind", choices=["rank2", "rank1"], default="rank2")
    p.add_argument("--u", type=str, default="1,0")
    p.add_argument("--v", type=str, default="0,1")
    p.add_argument("--chain", type=str)
    p.add_argument("--rule", type=str)
    p.add_argument("--moduli", type=str, help="Torsion moduli, e.g. 2,3")
    p.add_argument("--torsion", type=str, help="Torsion terms t_n as JSON rows")
    p.add_argument("--count", type=int, default=5)

    p = sub.add_parser("search", parents=[common, family], help="Bounded irreducibility search")
    p.add_argument("--element", type=str, required=True)
    p.add_argument("--modulus", type=int, default=2)
    p.add_argument("--count", type=int)
    p.add_argument("--budget", type=int)

    p = sub.add_parser("verify", parents=[common], help="Re-check an emitted document")
    p.add_argument("file", type=str)

    sub.add_parser("families", parents=[common], help="List Puiseux families")
    return parser


# ============================================================================
# Entry points
# ============================================================================

def configure_logging(verbose: bool) -> None:
    level = logging.DEBUG if verbose else env_str("ATOMCRAFT_LOG_LEVEL", "WARNING").upper()
    logging.basicConfig(
        stream=sys.stderr, level=level, format="%(levelname)s %(name)s: %(message)s"
    )


def _emit(text: str, out: Optional[str]) -> None:
    sink: Sink = FileSink(out) if out else StdoutSink()
    sink.write(text)


def run_verify(path: str, settings: Settings, out: Optional[str]) -> int:
    try:
        document = json.loads(Path(path).read_text(encoding="utf-8"))
    except FileNotFoundError as e:
        raise UsageError(f"File not found: {path}") from e
    except json.JSONDecodeError as e:
        raise UsageError(f"Invalid JSON in {path}: {e}") from e
    checks: List[CheckResult] = verify_envelope(document, settings)
    passed = all(c.passed for c in checks)
    report = {"file": path, "passed": passed, "checks": [c.to_dict() for c in checks]}
    _emit(json.dumps(report, indent=2, sort_keys=True), out)
    for check in checks:
        status(check.passed, f"{check.name}: {check.detail}")
    return EXIT_OK if passed else EXIT_VERIFICATION


def run_families(out: Optional[str]) -> int:
    rows = []
    for name in list_families():
        module = load_family(name)
        rows.append({
            "name": name,
            "description": getattr(module, "DESCRIPTION", ""),
            "atomSet": module.ATOM_SET,
            "chain": hasattr(module, "chain_step"),
        })
    _emit(json.dumps(rows, indent=2, sort_keys=True), out)
    return EXIT_OK


def _write_figure(args: argparse.Namespace, envelope: CertificateEnvelope) -> None:
    """Write --csv/--figure files for the commands that produce a figure."""
    if args.command == "figure":
        figure = envelope.result
    elif args.command == "construct":
        figure = envelope.result.get("figure", {})
    else:
        return
    for path, key in ((args.csv, "csv"), (args.figure, "svg")):
        if path and key in figure:
            FileSink(path).write(figure[key])
            status(True, f"Wrote {key.upper()} to {path}")


def run_command(args: argparse.Namespace, settings: Settings) -> int:
    params = json.loads(json.dumps(BUILDERS[args.command](args)))
    envelope: CertificateEnvelope = certify(args.command, params, settings)
    _emit(envelope.to_json(), args.out)

    _write_figure(args, envelope)

    for check in envelope.verification:
        if not check.passed:
            status(False, f"{check.name}: {check.detail}")
    status(
        envelope.passed,
        f"{args.command}: {sum(c.passed for c in envelope.verification)}"
        f"/{len(envelope.verification)} checks passed",
    )
    return EXIT_OK if envelope.passed else EXIT_VERIFICATION


def run(argv: Optional[List[str]] = None) -> int:
    """Parse argv, run the subcommand and return the exit code."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as e:
        parser.print_usage(sys.stderr)
        status(False, str(e))
        return EXIT_USAGE
    except SystemExit as e:
        return int(e.code or 0)

    if not args.command:
        parser.print_usage(sys.stderr)
        status(False, "a subcommand is required")
        return EXIT_USAGE

    configure_logging(args.verbose)
    try:
        settings = Settings.from_env()
        if getattr(args, "budget", None) is not None:
            settings = Settings(settings.verify_stages, args.budget)
        if args.command == "verify":
            return run_verify(args.file, settings, args.out)
        if args.command == "families":
            return run_families(args.out)
        return run_command(args, settings)
    except (UsageError, UnsupportedFamilyError, ValueError, KeyError, FileNotFoundError) as e:
        status(False, str(e))
        return EXIT_USAGE


def main():
    """Main function."""
    sys.exit(run())


if __name__ == "__main__":
    main()
