"""Exhaustive behavioural contracts for a network topology.

`run_contract_suite` sweeps every (set, current, previous) level triple in
one batched simulation and checks each logic layer against its rule. Each
contract reports pass/fail, how many cases it checked and up to a few
counterexamples.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .network import (AXES, ROLES, ChemotaxisNetwork, MotorState, NetworkTopology,
                      build_default_network, run_windows, table1_oracle)
from .ratecode import DEFAULT_TABLE, SensoryEncoder, default_encoder, level_to_period

__all__ = ["ContractResult", "ContractReport", "run_contract_suite", "level_triples"]

MAX_COUNTEREXAMPLES = 5


@dataclass
class ContractResult:
    name: str
    passed: bool
    checked: int
    counterexamples: list = field(default_factory=list)

    def to_dict(self) -> dict:
        return {"name": self.name, "passed": self.passed, "checked": self.checked,
                "counterexamples": self.counterexamples}


@dataclass
class ContractReport:
    results: list

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.results)

    def __getitem__(self, name: str) -> ContractResult:
        for r in self.results:
            if r.name == name:
                return r
        raise KeyError(name)

    def to_dict(self) -> dict:
        return {"passed": self.passed, "contracts": [r.to_dict() for r in self.results]}


class _Checker:
    def __init__(self, name):
        self.result = ContractResult(name, True, 0)

    def check(self, ok: bool, case):
        self.result.checked += 1
        if not ok:
            self.result.passed = False
            if len(self.result.counterexamples) < MAX_COUNTEREXAMPLES:
                self.result.counterexamples.append(case)


def _rank(level):
    return -np.inf if level is None else level


def level_triples(levels, with_silent: bool = False) -> list:
    inputs = ([None] if with_silent else []) + list(levels)
    return [(s, c, p) for s in levels for c in inputs for p in inputs]


def _rate_code(encoder: SensoryEncoder) -> ContractResult:
    chk = _Checker("rate_code_fidelity")
    w = encoder.window_steps
    counts = {lvl: encoder.count(lvl) for lvl in encoder.table}
    for lvl, n in counts.items():
        expected = w // level_to_period(lvl, encoder.table)
        chk.check(abs(n - expected) <= 1, {"level": lvl, "count": n, "expected": expected})
    chk.check(len(set(counts.values())) == len(counts), {"duplicate_counts": counts})
    chk.check(encoder.count(None) == 0, {"silent_count": encoder.count(None)})
    return chk.result


def _sweep_contracts(triples, out) -> list:
    c = {r: out.count(r) for r in ROLES}
    comparators = {
        "N3": lambda s, cur, p: _rank(s) > _rank(cur),
        "N4": lambda s, cur, p: _rank(s) < _rank(cur),
        "N5": lambda s, cur, p: _rank(p) > _rank(cur),
        "N6": lambda s, cur, p: _rank(p) < _rank(cur),
    }
    results = []
    for role, rule in comparators.items():
        chk = _Checker(f"comparator_{role}")
        # Each comparator depends on one input pair; check every distinct pair once.
        seen = {}
        for i, t in enumerate(triples):
            key = (t[0], t[1]) if role in ("N3", "N4") else (t[2], t[1])
            fired = bool(c[role][i] > 0)
            if key not in seen:
                seen[key] = fired
                chk.check(fired == rule(*t), {"pair": key, "spikes": int(c[role][i])})
            elif seen[key] != fired:
                chk.check(False, {"pair": key, "inconsistent_across_triples": True})
        results.append(chk.result)

    for gate, (a, b) in {"N7": ("N3", "N5"), "N8": ("N4", "N6")}.items():
        chk = _Checker(f"and_gate_{gate}")
        combos = set()
        for i, t in enumerate(triples):
            ia, ib = bool(c[a][i]), bool(c[b][i])
            combos.add((ia, ib))
            chk.check(bool(c[gate][i]) == (ia and ib),
                      {"triple": t, a: int(c[a][i]), b: int(c[b][i]), gate: int(c[gate][i])})
        # All four input combinations must have been exercised.
        chk.check(len(combos) == 4, {"input_combinations_seen": sorted(combos)})
        results.append(chk.result)

    chk = _Checker("n7_n8_mutual_exclusion")
    for i, t in enumerate(triples):
        chk.check(not (c["N7"][i] and c["N8"][i]), {"triple": t})
    results.append(chk.result)

    chk = _Checker("n11_once_per_window")
    for i, t in enumerate(triples):
        want = 1 if c["N7"][i] + c["N8"][i] >= 1 else 0
        chk.check(int(c["N11"][i]) == want,
                  {"triple": t, "N7": int(c["N7"][i]), "N8": int(c["N8"][i]), "N11": int(c["N11"][i])})
    results.append(chk.result)

    chk = _Checker("oracle_equivalence")
    for t, axis in zip(triples, out.turn_axes):
        verdict = table1_oracle(*t)
        chk.check((axis is not None) == (verdict == "change"),
                  {"triple": t, "turn_axis": axis, "oracle": verdict})
    results.append(chk.result)
    return results


def _n11_injection(topology: NetworkTopology, encoder: SensoryEncoder) -> ContractResult:
    # Quiet sensors (all equal) plus forced N7 trains: a lone spike anywhere
    # early enough to propagate, or a spike on every step, yields one N11 spike.
    chk = _Checker("n11_injected_evidence")
    w = topology.window_steps
    lvl = encoder.table.levels[len(encoder.table) // 2]
    cases = {}
    for step in sorted({0, 1, w // 10, w // 2, w - 20, w - 12}):
        train = np.zeros(w, dtype=bool)
        train[step] = True
        cases[f"single@{step}"] = train
    cases["every_step"] = np.ones(w, dtype=bool)
    cases["none"] = np.zeros(w, dtype=bool)
    for name, train in cases.items():
        out = ChemotaxisNetwork(topology, encoder).run_window(lvl, lvl, lvl, inject={"N7": train})
        want = 1 if train.any() else 0
        chk.check(out.n11_spike_count == want, {"case": name, "N11": out.n11_spike_count})
    return chk.result


def _motor_cycle(topology: NetworkTopology, encoder: SensoryEncoder, n_windows: int = 30,
                 seed: int = 0) -> ContractResult:
    chk = _Checker("motor_cycle")
    levels = encoder.table.levels
    turn = (levels[4], levels[5], levels[4])      # set < cur, prev < cur
    keep = (levels[4], levels[4], levels[4])
    rng = np.random.default_rng(seed)
    for start in AXES:
        net = ChemotaxisNetwork(topology, encoder, initial_axis=start)
        expect = AXES.index(start)
        for k in range(n_windows):
            do_turn = bool(rng.integers(2))
            out = net.run_window(*(turn if do_turn else keep))
            motor = [out.counts[m] for m in ("N_r1", "N_r2", "N_r3")]
            if do_turn:
                chk.check(out.turn_axis == AXES[expect] and sum(motor) == 1,
                          {"start": start, "window": k, "expected": AXES[expect], "motor": motor})
                expect = (expect + 1) % 3
            else:
                chk.check(out.turn_axis is None and sum(motor) == 0,
                          {"start": start, "window": k, "motor": motor})
    return chk.result


def run_contract_suite(topology: Optional[NetworkTopology] = None,
                       encoder: Optional[SensoryEncoder] = None,
                       with_silent: bool = True) -> ContractReport:
    topology = topology or build_default_network()
    encoder = encoder or default_encoder(topology.window_steps)
    results = [_rate_code(encoder)]
    triples = level_triples(encoder.table.levels, with_silent=with_silent)
    out = run_windows(topology, triples, encoder=encoder)
    results.extend(_sweep_contracts(triples, out))
    results.append(_n11_injection(topology, encoder))
    results.append(_motor_cycle(topology, encoder))
    return ContractReport(results)
