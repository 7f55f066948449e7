"""Regenerate the orthogonal-array data files shipped in heatcast/data.

OA(729,10,3,5): the rows are a translate of a 6-dimensional ternary linear code,
enumerated as a base-3 counter over six generator rows (first generator cycling
fastest).  Four generators and the sum of the last two follow from the reference
rows 1-12, 394-402 and 725-729; the split of that sum is the first completion in
search order that gives strength 5.

OA(81,10,3,2): a translate of a 4-dimensional code whose generator columns are
pairwise independent; row 1 is the all-neutral row.
"""

import itertools
from pathlib import Path

import numpy as np

# reference rows (1-based levels), keyed by 1-based experiment number
KNOWN = {
    1: "2222222222", 2: "1222222111", 3: "3222222333", 4: "2122223213",
    5: "1122223132", 6: "3122223321", 7: "2322221231", 8: "1322221123",
    9: "3322221312", 10: "2212223121", 11: "1212223313", 12: "3212223232",
    394: "2313113333", 395: "1313113222", 396: "3313113111", 397: "2233112223",
    398: "1233112112", 399: "3233112331", 400: "2133113211", 401: "1133113133",
    402: "3133113322", 725: "1133332123", 726: "3133332312", 727: "2333333222",
    728: "1333333111", 729: "3333333333",
}
DATA = Path(__file__).resolve().parents[1] / "src" / "heatcast" / "data"


def digits(r, n=6):
    return [(r // 3**i) % 3 for i in range(n)]


def code_value(levels):
    # level 2 is the neutral setting -> 0
    return np.array([(int(c) - 2) % 3 for c in levels])


def rank_gf3(m):
    m = m.copy() % 3
    rank = 0
    rows, cols = m.shape
    for c in range(cols):
        piv = next((r for r in range(rank, rows) if m[r, c]), None)
        if piv is None:
            continue
        m[[rank, piv]] = m[[piv, rank]]
        m[rank] = (m[rank] * m[rank, c]) % 3  # inverse of 1 is 1, of 2 is 2
        for r in range(rows):
            if r != rank and m[r, c]:
                m[r] = (m[r] - m[r, c] * m[rank]) % 3
        rank += 1
    return rank


def strength(gen):
    # strength t iff every t columns of the generator matrix are independent
    k = gen.shape[1]
    t = 0
    for size in range(1, k + 1):
        if all(rank_gf3(gen[:, list(c)]) == size for c in itertools.combinations(range(k), size)):
            t = size
        else:
            break
    return t


def rows_of(gen):
    n = gen.shape[0]
    out = []
    for r in range(3**n):
        d = np.array(digits(r, n))
        out.append((d @ gen) % 3)
    return np.array(out)


def build_729():
    g = {1: code_value(KNOWN[2]), 2: code_value(KNOWN[4]), 3: code_value(KNOWN[10])}
    # every reference row r satisfies sum_i d_i(r) g_i = c(r); recover g4 and g5+g6
    for r, lv in KNOWN.items():
        d = digits(r - 1)
        assert d[3] != 0 or d[4] != 0 or d[5] != 0 or np.array_equal(
            (d[0] * g[1] + d[1] * g[2] + d[2] * g[3]) % 3, code_value(lv)
        ), r
    # row 728 (0-based 727): digits (1,2,2,2,2,2); row 394 (0-based 393): (0,2,1,2,1,1)
    c727 = code_value(KNOWN[728])
    c393 = code_value(KNOWN[394])
    base727 = (1 * g[1] + 2 * g[2] + 2 * g[3]) % 3
    base393 = (0 * g[1] + 2 * g[2] + 1 * g[3]) % 3
    # 2 g4 + 2 g5 + 2 g6 = c727 - base727 ; 2 g4 + g5 + g6 = c393 - base393
    a = (c727 - base727) % 3
    b = (c393 - base393) % 3
    # subtract: g5 + g6 = a - b ; then 2 g4 = b - (g5 + g6)
    s56 = (a - b) % 3
    g4 = ((b - s56) * 2) % 3
    g[4] = g4
    for cand in itertools.product(range(3), repeat=10):
        g5 = np.array(cand)
        g6 = (s56 - g5) % 3
        gen = np.array([g[1], g[2], g[3], g4, g5, g6])
        if rank_gf3(gen) < 6:
            continue
        if all(rank_gf3(gen[:, list(c)]) == 5 for c in itertools.combinations(range(10), 5)):
            rows = rows_of(gen)
            ok = all(np.array_equal(rows[r - 1], code_value(lv)) for r, lv in KNOWN.items())
            if ok:
                return rows
    raise RuntimeError("no strength-5 completion found")


def build_81():
    # ten pairwise-independent points of PG(3,3) spanning the whole space
    cols = [
        (1, 0, 0, 0), (0, 1, 0, 0), (0, 0, 1, 0), (0, 0, 0, 1), (1, 1, 0, 0),
        (1, 0, 1, 0), (1, 0, 0, 1), (0, 1, 1, 0), (0, 1, 0, 1), (0, 0, 1, 1),
    ]
    gen = np.array(cols).T
    assert strength(gen) >= 2 and rank_gf3(gen) == 4
    return rows_of(gen)


def write(path, rows, n, k, s, t):
    # file levels 0/1/2 are printed levels 1/2/3; neutral code value 0 -> level 1
    lines = [f"{n} {k} {s} {t}"]
    lines += [" ".join(str((v + 1) % 3) for v in row) for row in rows]
    path.write_text("\n".join(lines) + "\n")


if __name__ == "__main__":
    DATA.mkdir(parents=True, exist_ok=True)
    write(DATA / "oa_729_10_3_5.txt", build_729(), 729, 10, 3, 5)
    write(DATA / "oa_81_10_3_2.txt", build_81(), 81, 10, 3, 2)
    print("written to", DATA)
