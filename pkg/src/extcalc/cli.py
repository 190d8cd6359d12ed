"""Command-line entry point: ``extcalc verify --scenario FILE``."""
import argparse
import sys
import time
from importlib import resources

from .expr import ParseError
from .verify import emit_report, load_scenario, run_scenario
from .verify.suites import SUITES

EXIT_PASS, EXIT_FAIL, EXIT_INPUT = 0, 1, 2


def bundled_scenarios():
    """Paths of the scenario files shipped with the package, sorted by name."""
    root = resources.files("extcalc") / "scenarios"
    return sorted((p for p in root.iterdir() if p.name.endswith(".scn")), key=lambda p: p.name)


def _suite_list(text):
    names = [s.strip() for s in text.split(",") if s.strip()]
    if not names:
        raise argparse.ArgumentTypeError("empty suite list")
    unknown = [s for s in names if s not in SUITES]
    if unknown:
        raise argparse.ArgumentTypeError(f"unknown suite(s): {', '.join(unknown)}")
    return names


def build_parser():
    p = argparse.ArgumentParser(prog="extcalc", description="Verify calculus identities on scenario files.")
    sub = p.add_subparsers(dest="command", required=True)

    v = sub.add_parser("verify", help="run the suites of one scenario")
    v.add_argument("--scenario", required=True, help="scenario file path, or bundled:<name>")
    v.add_argument("--points", type=int, default=None, help="sample count (default from scenario, else 64)")
    v.add_argument("--seed", type=int, default=None, help="sampling seed (default from scenario, else 42)")
    v.add_argument("--tol-first", type=float, default=None)
    v.add_argument("--tol-second", type=float, default=None)
    v.add_argument("--suites", type=_suite_list, default=None, help="comma-separated subset of suites")
    v.add_argument("--format", choices=("json", "text"), default="json")
    v.add_argument("--out", default=None, help="write the report here instead of stdout")

    c = sub.add_parser("corpus", help="run every bundled scenario and print one line each")
    c.add_argument("--points", type=int, default=None)
    c.add_argument("--seed", type=int, default=None)

    sub.add_parser("list-suites", help="print the known suite names")
    sub.add_parser("list-scenarios", help="print the bundled scenario names")
    return p


def _resolve(path):
    if path.startswith("bundled:"):
        name = path.split(":", 1)[1]
        for p in bundled_scenarios():
            if p.name in (name, name + ".scn"):
                return p
        raise FileNotFoundError(f"no bundled scenario named {name!r}")
    return path


def _load(path):
    p = _resolve(path)
    if hasattr(p, "read_text") and not isinstance(p, str):
        from .verify.scenario import parse_scenario
        return parse_scenario(p.read_text(encoding="utf-8"), source=p.name)
    return load_scenario(p)


def _verify(args):
    try:
        sc = _load(args.scenario)
    except ParseError as err:
        print(f"{args.scenario}: {err}", file=sys.stderr)
        return EXIT_INPUT
    except (OSError, UnicodeDecodeError) as err:
        print(f"{args.scenario}: {err}", file=sys.stderr)
        return EXIT_INPUT
    if args.points is not None and args.points < 1:
        print("--points must be positive", file=sys.stderr)
        return EXIT_INPUT
    report = run_scenario(sc, suites=args.suites, points=args.points, seed=args.seed,
                          tol_first=args.tol_first, tol_second=args.tol_second)
    text = emit_report(report, args.format)
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return EXIT_PASS if report.passed else EXIT_FAIL


def _corpus(args):
    worst = EXIT_PASS
    for p in bundled_scenarios():
        sc = _load(f"bundled:{p.name}")
        t0 = time.perf_counter()
        report = run_scenario(sc, points=args.points, seed=args.seed)
        dt = time.perf_counter() - t0
        status = "PASS" if report.passed else "FAIL " + ",".join(report.failed_suites)
        print(f"{p.name:<32} {len(report.results):4d} checks {dt:7.2f}s  {status}")
        if not report.passed:
            worst = EXIT_FAIL
    return worst


def main(argv=None):
    args = build_parser().parse_args(argv)
    if args.command == "verify":
        return _verify(args)
    if args.command == "corpus":
        return _corpus(args)
    if args.command == "list-suites":
        print("\n".join(SUITES))
        return EXIT_PASS
    if args.command == "list-scenarios":
        print("\n".join(p.name for p in bundled_scenarios()))
        return EXIT_PASS
    return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
