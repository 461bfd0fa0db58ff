"""Command-line client for the measurement service.

Every subcommand builds a request payload and sends it to the service
layer: in process by default, or to a running server via --server. The
result report is printed to stdout as JSON with sorted keys, so identical
inputs produce byte-identical output; --pretty adds human-readable tables
on stderr. Exit codes: 0 success, 2 parse error, 3 validation error,
4 runtime error.
"""

from __future__ import annotations

import argparse
import json
import sys

from .errors import ExperimentParseError, ExperimentValidationError, QmeasError

EXIT_CODES = {"parse": 2, "validation": 3, "runtime": 4}


class ServiceError(Exception):
    def __init__(self, kind: str, message: str):
        super().__init__(message)
        self.kind = kind if kind in EXIT_CODES else "runtime"
        self.message = message


class LocalBackend:
    """Calls the service handlers directly, no HTTP."""

    def call(self, path: str, payload: dict) -> dict:
        from .service import handlers

        routes = {
            "/run": handlers.handle_run,
            "/validate": handlers.handle_validate,
            "/qec": handlers.handle_qec,
            "/usd": handlers.handle_usd,
            "/channel": handlers.handle_channel,
        }
        try:
            return routes[path](payload)
        except ExperimentParseError as exc:
            raise ServiceError("parse", str(exc))
        except ExperimentValidationError as exc:
            raise ServiceError("validation", str(exc))
        except QmeasError as exc:
            raise ServiceError("runtime", str(exc))


class HttpBackend:
    """Talks to a running qmeas server."""

    def __init__(self, base_url: str):
        self.base_url = base_url.rstrip("/")

    def call(self, path: str, payload: dict) -> dict:
        import httpx

        try:
            response = httpx.post(self.base_url + path, json=payload, timeout=600.0)
        except httpx.HTTPError as exc:
            raise ServiceError("runtime", f"cannot reach {self.base_url}: {exc}")
        if response.status_code == 200:
            return response.json()
        kind = {400: "parse", 422: "validation"}.get(response.status_code, "runtime")
        try:
            body = response.json()
            info = body.get("error", {})
            raise ServiceError(info.get("kind", kind), info.get("message", response.text))
        except ValueError:
            raise ServiceError(kind, response.text)


def _backend(args) -> LocalBackend | HttpBackend:
    return HttpBackend(args.server) if args.server else LocalBackend()


def _load_json_file(path: str) -> dict:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return json.load(fh)
    except json.JSONDecodeError as exc:
        raise ServiceError(
            "parse", f"{path}: line {exc.lineno} column {exc.colno}: {exc.msg}")
    except OSError as exc:
        raise ServiceError("parse", f"cannot read {path}: {exc}")


def _parse_inline_json(text: str, what: str) -> dict:
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ServiceError("parse", f"{what}: line {exc.lineno} column {exc.colno}: {exc.msg}")


def _emit(report: dict, pretty: bool):
    sys.stdout.write(json.dumps(report, indent=2, sort_keys=True) + "\n")
    if pretty:
        _pretty_report(report)


def _pretty_report(report: dict):
    out = sys.stderr
    for table in report.get("measurements", []) or []:
        out.write(f"measurement {table['label']}\n")
        out.write(f"  {'outcome':>10} {'exact':>12} {'frequency':>12} {'count':>10}\n")
        for row in table["outcomes"]:
            exact = "-" if row["exact_probability"] is None else f"{row['exact_probability']:.6f}"
            freq = "-" if row["sampled_frequency"] is None else f"{row['sampled_frequency']:.6f}"
            count = "-" if row["count"] is None else str(row["count"])
            out.write(f"  {row['label']:>10} {exact:>12} {freq:>12} {count:>10}\n")
    for row in report.get("expectations", []) or []:
        exact = "-" if row["exact"] is None else f"{row['exact']:.6f}"
        est = "-" if row["sampled_estimate"] is None else f"{row['sampled_estimate']:.6f}"
        out.write(f"expectation {row['label']}: exact {exact} sampled {est}\n")
    for row in report.get("rows", []) or []:
        out.write(f"error {row['error']:>5}: syndrome {row['syndrome']} "
                  f"fidelity {row['fidelity']:.10f}\n")
    if "logical_error_rate" in report and report.get("mode") == "monte_carlo":
        out.write(f"logical error rate {report['logical_error_rate']:.6f} "
                  f"(majority-vote prediction {report['majority_vote_rate']:.6f})\n")
    for check in report.get("checks", []) or []:
        status = "ok" if check["passed"] else "FAIL"
        message = check.get("message") or ""
        out.write(f"{status:>4} {check['target']} {check['name']} "
                  f"deviation {check['deviation']:.3e} {message}\n")
    for div in report.get("divergences", []) or []:
        out.write(f"DIVERGENCE {div['measurement']}[{div['outcome']}]: "
                  f"exact {div['exact']:.6f} vs frequency {div['frequency']:.6f}\n")


# -- subcommands ---------------------------------------------------------------

def _cmd_run(args) -> int:
    doc = _load_json_file(args.file)
    payload = {"experiment": doc, "shots": args.shots, "seed": args.seed,
               "mode": args.mode}
    report = _backend(args).call("/run", payload)
    _emit(report, args.pretty)
    return 0


def _cmd_validate(args) -> int:
    doc = _load_json_file(args.file)
    report = _backend(args).call("/validate", {"experiment": doc})
    _emit(report, args.pretty)
    return 0 if report.get("ok") else EXIT_CODES["validation"]


def _cmd_qec(args) -> int:
    payload = {"kind": args.kind, "p": args.p, "error": args.error,
               "shots": args.shots if args.shots is not None else 10000,
               "seed": args.seed if args.seed is not None else 0,
               "noise": args.noise}
    report = _backend(args).call("/qec", payload)
    _emit(report, args.pretty)
    return 0


def _cmd_usd(args) -> int:
    payload = {
        "psi0": _parse_inline_json(args.psi0, "--psi0"),
        "psi1": _parse_inline_json(args.psi1, "--psi1"),
        "true_state": args.true_state,
        "shots": args.shots if args.shots is not None else 100000,
        "seed": args.seed if args.seed is not None else 0,
        "mode": args.mode or "both",
    }
    report = _backend(args).call("/usd", payload)
    _emit(report, args.pretty)
    return 0


def _cmd_channel(args) -> int:
    if args.file:
        doc = _load_json_file(args.file)
    else:
        doc = {}
    if args.channel:
        doc["channel"] = _parse_inline_json(args.channel, "--channel")
    if args.state:
        doc["state"] = _parse_inline_json(args.state, "--state")
    report = _backend(args).call("/channel", doc)
    _emit(report, args.pretty)
    return 0


def _cmd_serve(args) -> int:
    import uvicorn

    from .service import create_app

    uvicorn.run(create_app(), host=args.host, port=args.port)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="qmeas", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--server", help="base URL of a running qmeas server")
        p.add_argument("--pretty", action="store_true",
                       help="print human-readable tables on stderr")
        p.add_argument("--shots", type=int, default=None)
        p.add_argument("--seed", type=int, default=None)
        p.add_argument("--mode", choices=["exact", "sample", "both"], default=None)

    p_run = sub.add_parser("run", help="execute an experiment file")
    p_run.add_argument("file")
    common(p_run)
    p_run.set_defaults(func=_cmd_run)

    p_val = sub.add_parser("validate", help="structurally validate an experiment file")
    p_val.add_argument("file")
    common(p_val)
    p_val.set_defaults(func=_cmd_validate)

    p_qec = sub.add_parser("qec", help="three-qubit repetition-code demo")
    p_qec.add_argument("--kind", choices=["bit-flip", "phase-flip"], default="bit-flip")
    p_qec.add_argument("--p", type=float, default=None,
                       help="flip probability; enables Monte-Carlo mode")
    p_qec.add_argument("--error", choices=["none", "0", "1", "2", "all"], default=None,
                       help="deterministic single error case (default: all four)")
    p_qec.add_argument("--noise", choices=["independent", "at-most-one"],
                       default="independent")
    common(p_qec)
    p_qec.set_defaults(func=_cmd_qec)

    p_usd = sub.add_parser("usd", help="unambiguous state discrimination")
    p_usd.add_argument("--psi0", required=True, help="state literal JSON")
    p_usd.add_argument("--psi1", required=True, help="state literal JSON")
    p_usd.add_argument("--true-state", choices=["psi0", "psi1"], default="psi0",
                       dest="true_state")
    common(p_usd)
    p_usd.set_defaults(func=_cmd_usd)

    p_chan = sub.add_parser("channel", help="apply a channel spec to a state")
    p_chan.add_argument("file", nargs="?", help="JSON file with 'channel' and 'state'")
    p_chan.add_argument("--channel", help="channel literal JSON")
    p_chan.add_argument("--state", help="state literal JSON")
    common(p_chan)
    p_chan.set_defaults(func=_cmd_channel)

    p_serve = sub.add_parser("serve", help="start the HTTP service")
    p_serve.add_argument("--host", default="127.0.0.1")
    p_serve.add_argument("--port", type=int, default=8000)
    p_serve.set_defaults(func=_cmd_serve)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ServiceError as exc:
        sys.stderr.write(f"{exc.kind} error: {exc.message}\n")
        return EXIT_CODES[exc.kind]


if __name__ == "__main__":
    sys.exit(main())
