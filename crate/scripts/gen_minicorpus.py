#!/usr/bin/env python3
"""Writes the synthetic 3-variable mini-corpus and its cell-count labels.

Counts are a made-up cost: eliminating a variable of high degree early is
expensive, plus seeded noise. A few orderings time out and one problem times
out everywhere, so the quarantine path is exercised.
"""

import itertools
import random
from pathlib import Path

SEED = 20150601
N = 30
OUT = Path(__file__).resolve().parent.parent / "data" / "minicorpus"
VARS = ["x0", "x1", "x2"]
RELS = ["=", "<", ">", "<=", ">="]


def random_poly(rng):
    terms = {}
    for _ in range(rng.randint(2, 4)):
        exps = [0, 0, 0]
        for _ in range(rng.randint(1, 4)):
            exps[rng.randrange(3)] += 1
        coeff = rng.choice([-3, -2, -1, 1, 2, 3, 5])
        terms[tuple(exps)] = terms.get(tuple(exps), 0) + coeff
    if rng.random() < 0.6:
        terms[(0, 0, 0)] = rng.randint(-9, 9)
    return {e: c for e, c in terms.items() if c != 0}


def native_term(e, c):
    mono = "*".join(v if k == 1 else f"{v}^{k}" for v, k in zip(VARS, e) if k)
    if not mono:
        return str(abs(c))
    return mono if abs(c) == 1 else f"{abs(c)}*{mono}"


def native_poly(p):
    out = ""
    for i, (e, c) in enumerate(sorted(p.items(), reverse=True)):
        sign = "-" if c < 0 else "+"
        t = native_term(e, c)
        out += (f"-{t}" if c < 0 else t) if i == 0 else f" {sign} {t}"
    return out


def smt_poly(p):
    parts = []
    for e, c in sorted(p.items(), reverse=True):
        factors = [v for v, k in zip(VARS, e) for _ in range(k)]
        coeff = str(c) if c >= 0 else f"(- {-c})"
        if not factors:
            parts.append(coeff)
        elif c == 1:
            parts.append(factors[0] if len(factors) == 1 else f"(* {' '.join(factors)})")
        else:
            parts.append(f"(* {coeff} {' '.join(factors)})")
    return parts[0] if len(parts) == 1 else f"(+ {' '.join(parts)})"


def degree(p, i):
    return max(e[i] for e in p)


def main():
    rng = random.Random(SEED)
    OUT.mkdir(parents=True, exist_ok=True)
    for old in OUT.glob("p*.*"):
        old.unlink()
    lines = ["# synthetic cell counts for the mini-corpus; see scripts/gen_minicorpus.py"]
    for k in range(N):
        pid = f"p{k:02d}"
        polys = []
        while len(polys) < rng.randint(1, 3):
            p = random_poly(rng)
            if any(e != (0, 0, 0) for e in p) and p not in polys:
                polys.append(p)
        rels = [rng.choice(RELS) for _ in polys]
        if k % 2 == 0:
            atoms = [f"({r} {native_poly(p)})" for r, p in zip(rels, polys)]
            formula = atoms[0] if len(atoms) == 1 else f"(and {' '.join(atoms)})"
            text = (
                f"id: {pid}\nvars: x0 x1 x2\nquantifiers: E x0, E x1, E x2\n"
                f"formula: {formula}\n"
            )
            (OUT / f"{pid}.prob").write_text(text)
        else:
            decls = "".join(f"(declare-fun {v} () Real)\n" for v in VARS)
            atoms = [f"({r} {smt_poly(p)} 0)" for r, p in zip(rels, polys)]
            body = atoms[0] if len(atoms) == 1 else f"(and {' '.join(atoms)})"
            text = f"(set-logic QF_NRA)\n{decls}(assert {body})\n(check-sat)\n"
            (OUT / f"{pid}.smt2").write_text(text)

        degs = [max(degree(p, i) for p in polys) for i in range(3)]
        entries = []
        for order in itertools.permutations(range(3)):
            cost = 3 * degs[order[0]] + degs[order[1]]
            count = 5 + cost * cost + rng.randint(0, 8)
            if k == N - 1 or rng.random() < 0.05:
                entries.append(f"{','.join(VARS[i] for i in order)}=TIMEOUT")
            else:
                entries.append(f"{','.join(VARS[i] for i in order)}={count}")
        lines.append(f"{pid} output_cells {';'.join(entries)}")
    (OUT / "labels.txt").write_text("\n".join(lines) + "\n")


if __name__ == "__main__":
    main()
