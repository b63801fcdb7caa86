"""Independent reference values frozen into the C++ tests.

Run: python3 tests/oracles/gen_oracles.py
"""
import itertools
import math

import numpy as np


def fmt(v):
    return "{" + ", ".join(repr(float(x)) for x in np.ravel(v)) + "}"


def affine_case():
    w = [[0.5, -1.25], [2.0, 0.75], [-0.3, 0.1]]
    x = [1.5, -2.0]
    b = [0.2, -0.4, 1.0]
    y = [sum(w[r][c] * x[c] for c in range(2)) + b[r] for r in range(3)]
    print("affine", fmt(y))


def softmax_case():
    e = math.exp(1.0)
    print("softmax[1,2]", 1 / (1 + e), e / (1 + e))


def lstm_case():
    sig = lambda z: 1 / (1 + math.exp(-z))
    wi = np.array([[0.1, -0.2, 0.3], [0.05, 0.4, -0.1], [-0.3, 0.2, 0.1], [0.25, -0.15, 0.05],
                   [0.2, 0.1, -0.4], [-0.1, -0.3, 0.2], [0.3, 0.05, 0.1], [-0.2, 0.15, 0.35]])
    wr = np.array([[0.1, -0.05], [0.2, 0.1], [-0.1, 0.3], [0.05, -0.2],
                   [0.15, 0.1], [-0.25, 0.05], [0.1, 0.1], [0.0, -0.1]])
    b = np.array([0.0, 0.1, 1.0, 1.0, -0.1, 0.2, 0.05, -0.05])
    x = np.array([0.5, -1.0, 2.0])
    h = np.array([0.3, -0.2])
    c = np.array([0.1, 0.4])
    z = wi @ x + wr @ h + b
    i = [sig(v) for v in z[0:2]]
    f = [sig(v) for v in z[2:4]]
    g = [math.tanh(v) for v in z[4:6]]
    o = [sig(v) for v in z[6:8]]
    c2 = [f[k] * c[k] + i[k] * g[k] for k in range(2)]
    h2 = [o[k] * math.tanh(c2[k]) for k in range(2)]
    print("lstm h", fmt(h2), "c", fmt(c2))


def adam_case():
    w, m, v = 1.0, 0.0, 0.0
    lr, b1, b2, eps, g = 5e-4, 0.9, 0.999, 1e-8, 0.1
    for t in range(1, 4):
        m = b1 * m + (1 - b1) * g
        v = b2 * v + (1 - b2) * g * g
        mh = m / (1 - b1 ** t)
        vh = v / (1 - b2 ** t)
        w -= lr * mh / (math.sqrt(vh) + eps)
    print("adam3", repr(w))


def metrics_case():
    gold = [0, 1, 2, 2]
    pred = [0, 2, 2, 3]
    tp, fp, fn = [0] * 4, [0] * 4, [0] * 4
    for g, p in zip(gold, pred):
        if g == p:
            tp[p] += 1
        else:
            fp[p] += 1
            fn[g] += 1
    f1s = []
    for k in range(4):
        pr = tp[k] / (tp[k] + fp[k]) if tp[k] + fp[k] else 0.0
        rc = tp[k] / (tp[k] + fn[k]) if tp[k] + fn[k] else 0.0
        f1s.append(2 * pr * rc / (pr + rc) if pr + rc else 0.0)
    print("hand f1", f1s, "macro", sum(f1s) / 4, "tp", tp, "fp", fp, "fn", fn)


def crf_case():
    rng = np.random.default_rng(7)
    T, S = 3, 4
    E = rng.normal(size=(T, S))
    A = rng.normal(size=(S, S))
    st = rng.normal(size=S)
    en = rng.normal(size=S)
    allowed = [[0, 2], [1], [1, 3]]

    def score(path):
        s = st[path[0]] + en[path[-1]] + sum(E[t, path[t]] for t in range(T))
        return s + sum(A[path[t], path[t + 1]] for t in range(T - 1))

    alls = [score(p) for p in itertools.product(range(S), repeat=T)]
    cons = [score(p) for p in itertools.product(*allowed)]
    lz = np.logaddexp.reduce(alls)
    lc = np.logaddexp.reduce(cons)
    print("crf E", fmt(E))
    print("crf A", fmt(A))
    print("crf start", fmt(st), "end", fmt(en))
    print("crf logZ", repr(lz), "constrained", repr(lc), "nll", repr(lz - lc))


if __name__ == "__main__":
    affine_case()
    softmax_case()
    lstm_case()
    adam_case()
    metrics_case()
    crf_case()
