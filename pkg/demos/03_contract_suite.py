"""
Exhaustive contract checks
==========================

Every (set, current, previous) level triple, silent inputs included, is
simulated in one batch and each logic layer is checked against its rule.
A deliberately broken AND gate shows what a failure report looks like.
"""

from klinokinesis.contracts import run_contract_suite
from klinokinesis.network import build_default_network

net = build_default_network(1000)
report = run_contract_suite(net)
for r in report.results:
    print(f"{'PASS' if r.passed else 'FAIL'}  {r.name:24s} {r.checked} checks")

broken = net.with_params("N7", threshold=0.9)
bad = run_contract_suite(broken)
print()
print("N7 threshold lowered to 0.9:")
for r in bad.results:
    if not r.passed:
        print(f"FAIL  {r.name}: e.g. {r.counterexamples[0]}")
