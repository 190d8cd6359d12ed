"""Serialize reports as JSON or one-line-per-suite text."""
import json

from .runner import CheckResult, Report


def to_dict(report):
    return {
        "header": report.header,
        "suites": [r.as_dict() for r in report.results],
        "summary": {
            "pass": report.passed,
            "suites": [{"suite": s, "pass": ok} for s, ok in report.suite_status.items()],
        },
    }


def to_json(report):
    return json.dumps(to_dict(report), indent=2, sort_keys=True, allow_nan=False) + "\n"


def from_json(text):
    data = json.loads(text)
    results = []
    for d in data["suites"]:
        mr = d["max_residual"]
        results.append(CheckResult(
            suite=d["suite"], id=d["id"], eq=d["eq"], points=d["points"],
            max_residual=float("inf") if mr is None else mr, tol=d["tol"], tier=d["tier"],
            passed=d["pass"], worst_point=d["worst_point"], error=d["error"]))
    return Report(data["header"], results)


def _fmt(x):
    return "inf" if x == float("inf") else f"{x:.3e}"


def to_text(report):
    """One line per suite with its worst check, then one line per failing check."""
    h = report.header
    lines = [f"# scenario {h['scenario']} dim={h['dim']} points={h['points']} seed={h['seed']} version={h['version']}"]
    for note in h.get("notes", []):
        lines.append(f"# note: {note}")
    by_suite = {}
    for r in report.results:
        by_suite.setdefault(r.suite, []).append(r)
    for suite, rows in by_suite.items():
        ok = all(r.passed for r in rows)
        worst = max(rows, key=lambda r: r.max_residual / r.tol)
        lines.append(f"{'PASS' if ok else 'FAIL'} {suite}: {len(rows)} checks, worst {worst.id} "
                     f"residual {_fmt(worst.max_residual)} (tol {worst.tol:.0e})")
        for r in rows:
            if not r.passed:
                where = f" at {r.worst_point}" if r.worst_point is not None else ""
                why = f": {r.error}" if r.error else ""
                lines.append(f"    failed {r.id} residual {_fmt(r.max_residual)} tol {r.tol:.0e}{where}{why}")
    lines.append("PASS" if report.passed else "FAIL " + ",".join(report.failed_suites))
    return "\n".join(lines) + "\n"


def emit_report(report, fmt="json"):
    if fmt == "json":
        return to_json(report)
    if fmt == "text":
        return to_text(report)
    raise ValueError(f"unknown report format {fmt!r}")
