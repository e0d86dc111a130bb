"""Generate a first-N-zeros ordinate table in the plain one-per-line format.

Uses python-flint's certified zero isolation; only needed when no public
table is at hand.  Ordinates are written with 12 decimals, so the default
declared accuracy of 5e-10 is conservative.

    python scripts/make_zero_table.py 100000 data/zeros_100k.txt
"""
import argparse
import sys
from decimal import Decimal

from flint import acb, ctx


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("count", type=int)
    ap.add_argument("out")
    ap.add_argument("--block", type=int, default=1000)
    args = ap.parse_args(argv)

    ctx.prec = 96
    with open(args.out, "w") as fh:
        fh.write(f"# first {args.count} nontrivial zeta zero ordinates (python-flint, 12 decimals)\n")
        n = 1
        while n <= args.count:
            num = min(args.block, args.count - n + 1)
            for z in acb.zeta_zeros(n, num):
                if z.imag.rad() > 1e-13:
                    raise SystemExit(f"zero {n} not resolved: {z}")
                mid = Decimal(z.imag.mid().str(30, radius=False))
                fh.write(f"{mid.quantize(Decimal('1e-12'))}\n")
            n += num
            print(f"{n - 1}/{args.count}", file=sys.stderr, flush=True)


if __name__ == "__main__":
    main()
