"""Acceptance criteria A1-A8. Each test prints one PASS/FAIL line with its runtime.

Run with pytest (lines collected in the terminal summary) or directly as a script.
"""

import time

import pytest

from shimlab import cli

RESULTS = []

BUDGETS = {"A1": 10, "A2": 60, "A3": 120, "A4": 60, "A5": 120, "A6": 600, "A7": 60, "A8": 30}
EXPERIMENTS = {
    "A1": "trace-tau",
    "A2": "slopes",
    "A3": "waldspurger-ratio",
    "A4": "fiber-dimension",
    "A5": "vanishing",
    "A6": "interpolation-congruence",
    "A7": "eigencurve-suite",
    "A8": "sections",
}


def _summary(cid, res):
    r = res["results"]
    if cid == "A1":
        return f"tau(1..50) mismatches={r['mismatches']}"
    if cid == "A2":
        return "; ".join(f"w={x['weight']} slopes={x.get('slopesClassical')} relprec={x.get('achievedRelPrec')}"
                         f" stable={x.get('stable')}" for x in r["weights"])
    if cid == "A3":
        return "; ".join(f"({x['m']},{x['n']}) ratio={x['ratioResidual']:.1e} phi2={x['phiSquareResidual']:.1e}"
                         f" Lerr={x['lError']:.1e}" for x in r["pairs"])
    if cid == "A4":
        return f"computed={r['computed']} predicted={r['predicted']}"
    if cid == "A5":
        return (f"n={r['count']} disagreements={r['disagreements']} indeterminate={r['indeterminate']}"
                f" uncorroborated={r['uncorroborated']}")
    if cid == "A6":
        a = r.get("analog", {})
        return f"{r['verdict']}; analog v5(Phi(12)-Phi(52))={a.get('valuationOfDifference')}"
    if cid == "A7":
        f = r["fixture"]
        return (f"families={r['stats']['families']} failed={len(r['failedSeeds'])} gluing={f['gluing']}"
                f" negative={f['gluingNegative']} tail={f['tail']}")
    if cid == "A8":
        rows = ", ".join(f"k={x['weight']}:{x['agreement']}" for x in r["demo"]["rows"])
        return (f"planted={r['planted']} failures={len(r['plantedFailures'])} rejections={r['rejections']}"
                f" demo agreement [{rows}]")
    return ""


def check(cid):
    t0 = time.time()
    res, err = None, None
    try:
        res = cli.run(EXPERIMENTS[cid])
    except Exception as exc:         # report, then fail below
        err = exc
    dt = time.time() - t0
    ok = res is not None and res["pass"] and dt < BUDGETS[cid]
    detail = _summary(cid, res) if res is not None else f"error: {err}"
    line = f"{cid} {'PASS' if ok else 'FAIL'} ({dt:.1f}s, budget {BUDGETS[cid]}s) {detail}"
    RESULTS.append(line)
    print(line)
    return ok, line


@pytest.mark.parametrize("cid", list(EXPERIMENTS))
def test_acceptance(cid):
    ok, line = check(cid)
    assert ok, line


if __name__ == "__main__":
    import sys
    results = [check(c)[0] for c in EXPERIMENTS]
    sys.exit(0 if all(results) else 1)
