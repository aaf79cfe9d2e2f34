"""
Command-line front end.

    phsolve list-models
    phsolve spectrum --config <path> [--out <path>]
    phsolve verify   --config <path> [--report <path>]

Exit status: 0 success / all checks passed, 1 some check failed, 2 bad
configuration, 3 numerical or solver failure.
"""
import argparse
import csv
import io
import json
import sys
import traceback
from datetime import datetime, timezone
from pathlib import Path

from . import __version__
from .config import load_config
from .errors import ConfigurationError, NumericalError, PhsolveError
from .model import CATALOG
from .operators import build_pair
from .spectra import eigen_general, eigen_hermitian, match_spectra
from .verify import EmptyReportError, _jsonable, run_all

EXIT_OK, EXIT_FAIL, EXIT_CONFIG, EXIT_SOLVER = 0, 1, 2, 3
CSV_HEADER = ("level", "re_hermitian", "re_pseudo", "im_pseudo", "abs_diff")


def cmd_list_models(stream=None):
    stream = stream or sys.stdout
    for name, e in CATALOG.items():
        params = ", ".join(f"{k}={v}" for k, v in e.defaults.items()) or "-"
        if name == "custom":
            params = "V, f (function specs)"
        print(f"{name}", file=stream)
        print(f"    dimension={e.dimension} representation={e.representation} "
              f"oracle={e.oracle or 'none'} domain=[{e.domain[0]:g}, {e.domain[1]:g}]", file=stream)
        print(f"    params: {params}", file=stream)
        print(f"    {e.provenance}", file=stream)


def spectrum_rows(config, mode):
    """Matched (H_H, H) levels for one construction mode, ordered by H_H level."""
    herm, pseudo = build_pair(config.grid, config.model, config.scheme, mode)
    k = config.k_levels
    b = eigen_hermitian(herm, k, vectors=False)
    a = eigen_general(pseudo, k)
    rep = match_spectra(a, b, k, float("inf"), float("inf"))
    rows = []
    for i_h, i_hh, diff, _ in sorted(rep.pairs, key=lambda p: p[1]):
        z = a.eigenvalues[i_h]
        rows.append((i_hh, float(b.eigenvalues[i_hh].real), float(z.real), float(z.imag), diff))
    return rows


def format_csv(rows):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_HEADER)
    for level, re_h, re_p, im_p, diff in rows:
        w.writerow([level, repr(re_h), repr(re_p), repr(im_p), repr(diff)])
    return buf.getvalue()


def _spectra_targets(out, modes):
    if out is None:
        return {m: None for m in modes}
    if len(modes) == 1:
        return {modes[0]: Path(out)}
    p = Path(out)
    return {m: p.with_name(f"{p.stem}.{m}{p.suffix or '.csv'}") for m in modes}


def cmd_spectrum(config, out=None):
    out = out or config.output.get("spectra")
    written = []
    for mode, target in _spectra_targets(out, config.modes).items():
        text = format_csv(spectrum_rows(config, mode))
        if target is None:
            if len(config.modes) > 1:
                sys.stdout.write(f"# mode={mode}\n")
            sys.stdout.write(text)
        else:
            target.parent.mkdir(parents=True, exist_ok=True)
            target.write_text(text)
            written.append(target)
    return written


def build_report(config, report):
    out = report.to_dict()
    out["resolved_config"] = _jsonable(config.resolved)
    out["meta"] = {"version": __version__,
                   "timestamp": datetime.now(timezone.utc).isoformat(timespec="seconds")}
    return out


def cmd_verify(config, report_path=None):
    """Run the configured checks, write the JSON report, return the exit status."""
    report_path = report_path or config.output.get("report")
    # the Hermitian/non-Hermitian pair must build and diagonalize; failures here are solver errors
    for mode in config.modes:
        herm, pseudo = build_pair(config.grid, config.model, config.scheme, mode)
        eigen_hermitian(herm, config.k_levels, vectors=False)
    report = run_all(config.model, config.grid, config.modes, config.k_levels, config.scheme,
                     config.tolerances, config.checks)
    doc = build_report(config, report)
    text = json.dumps(doc, indent=2, sort_keys=False) + "\n"
    if report_path is None:
        sys.stdout.write(text)
    else:
        Path(report_path).parent.mkdir(parents=True, exist_ok=True)
        Path(report_path).write_text(text)
    for c in report.checks:
        status = "skip" if c.skipped else ("pass" if c.passed else "FAIL")
        print(f"[{status}] {c.check_id}: residual={c.residual:.3e} tol={c.tolerance:.3e}"
              + (f" ({c.reason})" if c.skipped else ""), file=sys.stderr)
    return EXIT_OK if report.overall else EXIT_FAIL


def _parser():
    p = argparse.ArgumentParser(prog="phsolve", description=__doc__.strip().splitlines()[0])
    p.add_argument("--version", action="version", version=f"phsolve {__version__}")
    sub = p.add_subparsers(dest="command", required=True)
    sub.add_parser("list-models", help="list catalog models")
    sp = sub.add_parser("spectrum", help="write matched spectra as CSV")
    sp.add_argument("--config", required=True)
    sp.add_argument("--out")
    vp = sub.add_parser("verify", help="run verification checks and write a JSON report")
    vp.add_argument("--config", required=True)
    vp.add_argument("--report")
    return p


def main(argv=None):
    args = _parser().parse_args(argv)
    try:
        if args.command == "list-models":
            cmd_list_models()
            return EXIT_OK
        config = load_config(args.config)
        if args.command == "spectrum":
            cmd_spectrum(config, args.out)
            return EXIT_OK
        return cmd_verify(config, args.report)
    except ConfigurationError as exc:
        print(f"phsolve: configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (NumericalError, EmptyReportError) as exc:
        print(f"phsolve: solver error: {exc}", file=sys.stderr)
        return EXIT_SOLVER
    except PhsolveError as exc:
        print(f"phsolve: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_SOLVER
    except Exception:  # noqa: BLE001 - anything else still maps onto the documented codes
        traceback.print_exc()
        return EXIT_SOLVER


if __name__ == "__main__":
    sys.exit(main())
