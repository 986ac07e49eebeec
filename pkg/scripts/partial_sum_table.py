"""Print the free-energy partial-sum table with deviation flags.

Compares low-order Taylor partial sums of the leading free-energy
constant against its closed form at negative dimensions, and marks the
entries whose previously reported values the computation does not
reproduce.

Usage: python scripts/partial_sum_table.py [--orders 1,2,3] [--dims -1,-2]
"""

import argparse

from dimkit import dimexp


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--orders", default="1,2", help="comma-separated partial-sum orders")
    parser.add_argument("--dims", default="-1,-2", help="comma-separated dimensions")
    args = parser.parse_args()

    orders = tuple(int(tok) for tok in args.orders.split(","))
    dims = tuple(float(tok) for tok in args.dims.split(","))
    report = dimexp.table1_report(orders=orders, dimensions=dims)

    header = report.header
    print("  ".join(f"{name:>12}" for name in header))
    for row in report.rows:
        cells = [f"{row.dimension:>12.4g}"]
        cells += [f"{s:>12.6f}" for s in row.partial_sums]
        cells += [f"{row.exact:>12.6f}"]
        print("  ".join(cells))
        for k, ref, flag in zip(orders, row.references, row.flags):
            if ref is None:
                continue
            marker = "DEVIATES" if flag else "matches"
            print(f"{'':>12}  order {k}: reported {ref:g} ({marker})")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
