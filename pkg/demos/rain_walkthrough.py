"""Walk through the rain problem: recognition, search and entropy.

Run from the repository root:  python3 demos/rain_walkthrough.py
"""

from pathlib import Path

from fpabd.abduce import exists_sufficient, recognize_full, recognize_minimal, recognize_sufficient, solve_concise_full
from fpabd.formulas import classify, parse_pit, parse_problem, render
from fpabd.semantics import entropy

FIXTURES = Path(__file__).resolve().parent.parent / "fixtures"


def load_pit(name, P):
    return parse_pit((FIXTURES / name).read_text(), P.variables)


def main() -> None:
    P = parse_problem((FIXTURES / "rain.fp").read_text())
    print("theory:")
    for g in P.theory:
        print("  ", render(g))
    print("observation:", render(P.observation))
    print("CIP:", classify(P).is_CIP)

    eta = load_pit("eta_rain.fp", P)
    rep = recognize_sufficient(P, eta)
    print("\neta_rain sufficient:", rep.verdict)
    rep = recognize_minimal(P, eta)
    print("eta_rain minimal:", rep.verdict, "| weaker solution:", render(rep.evidence["defeater"]))

    for name in ("theta_rain.fp", "theta_rain_corrected.fp"):
        theta = load_pit(name, P)
        rep = recognize_full(P, theta)
        print(f"\n{name}: full={rep.verdict} entropy={entropy(theta):.3f}", rep.reason or "")

    rep = solve_concise_full(P)
    print("\nconcise full solution:", render(rep.solution), f"entropy={entropy(rep.solution):.3f}")

    # the search takes several seconds on this problem
    print("\nsufficient solution:", render(exists_sufficient(P)))


if __name__ == "__main__":
    main()
