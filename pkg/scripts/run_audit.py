"""Run the full audit, write text and JSON reports, and print a series check.

    python scripts/run_audit.py --zeros-file data/zeros_100k.txt --out-dir results/
"""
import argparse
import time
from dataclasses import replace
from pathlib import Path

from xiaudit.audit import series_consistency
from xiaudit.catalog import open_catalog
from xiaudit.cli import build_report
from xiaudit.config import Config
from xiaudit.render import ball_text, report_json, report_text


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--zeros-file", default="data/zeros_100k.txt")
    ap.add_argument("--out-dir", default="results")
    ap.add_argument("--prec-bits", type=int, default=Config.precision_bits)
    ap.add_argument("--z1", default="1.0e-10")
    ap.add_argument("--z5", default="0.005025")
    ap.add_argument("--series-z", default="1e-4")
    args = ap.parse_args(argv)

    cfg = replace(Config(), zeros_file=args.zeros_file, precision_bits=args.prec_bits)
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)

    t0 = time.perf_counter()
    report, failure = build_report(cfg, "all", args.z1, args.z5)
    if failure is not None:
        report.summary.append(f"incomplete: {failure}")
    (out / "audit.txt").write_text(report_text(report))
    (out / "audit.json").write_text(report_json(report))
    print(report_text(report), end="")
    print(f"audit: {time.perf_counter() - t0:.1f}s, reports in {out}/")

    cat = open_catalog(args.zeros_file)
    n = len(cat.omega1)
    ns = [k for k in (10, 100, 1000, 10_000, n) if k <= n]
    rep = series_consistency(args.series_z, cat, ns)
    print(f"\nsum log(1 + lambda_m z) at z = {rep.z}, psi = {ball_text(rep.psi, 20)}")
    for row in rep.rows:
        state = {True: "inside", False: "OUTSIDE", None: "-"}[row.consistent]
        print(f"  n = {row.n_terms:>6}: residual {ball_text(row.residual, 12)}  tail window {state}")


if __name__ == "__main__":
    main()
