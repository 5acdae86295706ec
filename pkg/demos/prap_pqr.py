"""Classical probabilistic abduction on the p, q, r example, both routes side by side.

Run from the repository root:  python3 demos/prap_pqr.py
"""

from pathlib import Path

from fpabd import prap
from fpabd.formulas import parse_problem, render

FIXTURES = Path(__file__).resolve().parent.parent / "fixtures"


def main() -> None:
    P = parse_problem((FIXTURES / "pqr.fp").read_text())
    print("assignment as FP formulas:", [render(f) for f in prap.to_fp_counterpart(P.assignment)])
    print("coherent:", bool(prap.is_coherent(P.assignment)))
    sols = prap.prap_solutions(P)
    print(f"{'term':<14}{'direct':<8}{'via FP':<8}preferred")
    for tau in prap.candidate_terms(P):
        direct = prap.prap_recognize(P, tau)
        via_fp = prap.prap_recognize_fp(P, tau)
        pref = prap.prap_preferred(P, tau, sols) if direct else False
        print(f"{render(tau):<14}{direct!s:<8}{via_fp!s:<8}{pref}")


if __name__ == "__main__":
    main()
