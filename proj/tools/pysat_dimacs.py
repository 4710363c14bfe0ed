#!/usr/bin/env python3
"""DIMACS front end for a PySAT solver: `pysat_dimacs.py FILE [--solver NAME]`.

Prints `s SATISFIABLE` with a `v` line, or `s UNSATISFIABLE`, and exits with
10 or 20.
"""
import argparse
import sys

from pysat.formula import CNF
from pysat.solvers import Solver


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("dimacs")
    ap.add_argument("--solver", default="cadical153")
    args = ap.parse_args()

    cnf = CNF(from_file=args.dimacs)
    with Solver(name=args.solver, bootstrap_with=cnf.clauses) as s:
        if not s.solve():
            print("s UNSATISFIABLE")
            return 20
        model = set(s.get_model() or [])
    values = [v if v in model else -v for v in range(1, cnf.nv + 1)]
    print("s SATISFIABLE")
    print("v " + " ".join(map(str, values)) + " 0")
    return 10


if __name__ == "__main__":
    sys.exit(main())
