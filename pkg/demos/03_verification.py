"""Run the verification suite and show a per-check summary."""

import sys

from wsforge.mm_verify import run_all

n = int(sys.argv[1]) if len(sys.argv) > 1 else 4
report = run_all(n, threads=2)
for check in report.checks:
    print(f"{check.name:<16} {check.status:<5} {len(check.witnesses):>6} witnesses  {check.seconds:6.1f}s")
filt = report.check("filtration")
print("\ntop filtration quotient nonzero:", filt.notes["top_quotient_nonzero"])
print("overall:", "PASS" if report.passed else "FAIL")
