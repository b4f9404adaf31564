"""Writes the structure-constant files under data/algebras.

Constants for the quantum algebra are integers written as coefficient lists
over Q(zeta_4); the loader re-checks every Hopf axiom, so nothing here is
trusted.
"""
import json
import os

OUT = os.path.join(os.path.dirname(__file__), "..", "data", "algebras")


def dense(vec, d):
    out = [0] * d
    for i, c in vec.items():
        out[i] += c
    return out


def tensor_mul(mul, x, y):
    out = {}
    for (a1, a2), c in x.items():
        for (b1, b2), e in y.items():
            for p, u in mul(a1, b1).items():
                for q, v in mul(a2, b2).items():
                    out[(p, q)] = out.get((p, q), 0) + c * e * u * v
    return {k: v for k, v in out.items() if v}


def alg_mul(mul, x, y):
    out = {}
    for a, c in x.items():
        for b, e in y.items():
            for p, u in mul(a, b).items():
                out[p] = out.get(p, 0) + c * e * u
    return {k: v for k, v in out.items() if v}


def document(name, field, basis, mul, comul, counit, antipode, wrap=lambda c: c):
    d = len(basis)
    return {
        "name": name,
        "dimension": d,
        "field": field,
        "basis": basis,
        "mul": [[[wrap(c) for c in dense(mul(i, j), d)] for j in range(d)] for i in range(d)],
        "unit": [wrap(int(i == 0)) for i in range(d)],
        "comul": [
            [[wrap(comul[i].get((j, k), 0)) for k in range(d)] for j in range(d)]
            for i in range(d)
        ],
        "counit": [wrap(c) for c in counit],
        "antipode": [[wrap(antipode[j].get(i, 0)) for j in range(d)] for i in range(d)],
    }


def z2(name="z2", field="rational", corrupt=False):
    mul = lambda a, b: {(a + b) % 2: 1}
    comul = [{(0, 0): 1}, {(1, 1): 1}]
    antipode = [{}, {}] if corrupt else [{0: 1}, {1: 1}]
    return document(name, field, ["1", "u"], mul, comul, [1, 1], antipode)


def sweedler():
    # index a + 2b for w^a x^b
    def mul(i, j):
        a, b, c, d = i % 2, i // 2, j % 2, j // 2
        if b + d > 1:
            return {}
        return {(a + c) % 2 + 2 * (b + d): (-1) ** (b * c)}

    comul = [{(0, 0): 1}, {(1, 1): 1}, {(2, 0): 1, (1, 2): 1}, {(3, 1): 1, (0, 3): 1}]
    antipode = [{0: 1}, {1: 1}, {3: -1}, {2: 1}]
    return document("sweedler", "rational", ["1", "w", "x", "wx"], mul, comul, [1, 1, 0, 0], antipode)


def quantum():
    # basis K^a E^b F^c at index a + 2b + 4c; K^2 = 1, E^2 = F^2 = 0,
    # KE = -EK, KF = -FK, EF = FE
    def mul(i, j):
        a, b, c = i & 1, (i >> 1) & 1, (i >> 2) & 1
        a2, b2, c2 = j & 1, (j >> 1) & 1, (j >> 2) & 1
        if b + b2 > 1 or c + c2 > 1:
            return {}
        sign = (-1) ** ((b + c) * a2)
        return {((a + a2) % 2) + 2 * (b + b2) + 4 * (c + c2): sign}

    K, E, F = 1, 2, 4
    gens_comul = {
        K: {(K, K): 1},
        E: {(E, K): 1, (0, E): 1},
        F: {(F, 0): 1, (K, F): 1},
    }
    # S(E) = -EK = KE, S(F) = -KF
    gens_antipode = {K: {K: 1}, E: {E + K: 1}, F: {K + F: -1}}

    comul, antipode, counit = [], [], []
    for i in range(8):
        a, b, c = i & 1, (i >> 1) & 1, (i >> 2) & 1
        delta = {(0, 0): 1}
        s = {0: 1}
        for g, present in ((K, a), (E, b), (F, c)):
            if present:
                delta = tensor_mul(mul, delta, gens_comul[g])
                s = alg_mul(mul, gens_antipode[g], s)
        comul.append(delta)
        antipode.append(s)
        counit.append(int(b == 0 and c == 0))
    names = []
    for i in range(8):
        a, b, c = i & 1, (i >> 1) & 1, (i >> 2) & 1
        names.append("".join(n for n, p in (("K", a), ("E", b), ("F", c)) if p) or "1")
    doc = document(
        "small_quantum_sl2", {"cyclotomic": 4}, names, mul, comul, counit, antipode,
        wrap=lambda c: [c, 0],
    )
    return doc


def main():
    os.makedirs(OUT, exist_ok=True)
    docs = {
        "z2.json": z2(),
        "z2_f2.json": z2("z2_f2", {"prime": 2}),
        "corrupted_z2.json": z2("corrupted_z2", corrupt=True),
        "sweedler.json": sweedler(),
        "small_quantum_sl2.json": quantum(),
    }
    for fname, doc in docs.items():
        with open(os.path.join(OUT, fname), "w") as fh:
            json.dump(doc, fh, indent=1)
            fh.write("\n")


if __name__ == "__main__":
    main()
