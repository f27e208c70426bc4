"""Random test objects shared by the test modules."""
from __future__ import annotations

import random

from supertheta.linalg import identity, matmul, rank


def jordan(size: int):
    return [[1 if j == i + 1 else 0 for j in range(size)] for i in range(size)]


def kron(F, A, B):
    n, m = len(A), len(B)
    return [[F.mul(A[i // m][j // m], B[i % m][j % m]) for j in range(n * m)] for i in range(n * m)]


def random_invertible(F, dim: int, rng: random.Random):
    while True:
        P = [[rng.randrange(F.q) for _ in range(dim)] for _ in range(dim)]
        if rank(F, P) == dim:
            return P


def _inverse(F, P):
    from supertheta.linalg import solve
    dim = len(P)
    cols = [solve(F, P, [1 if i == j else 0 for i in range(dim)]) for j in range(dim)]
    return [[cols[j][i] for j in range(dim)] for i in range(dim)]


def _madd(F, A, B):
    return [[F.add(a, b) for a, b in zip(ra, rb)] for ra, rb in zip(A, B)]


def _mscale(F, c, A):
    return [[F.mul(c, a) for a in r] for r in A]


def random_comodule_ops(F, m: int, n: int, rng: random.Random, max_dim: int = 27):
    """n commuting matrices with X^{p^m} = 0, built from two commuting Jordan blocks."""
    top = F.p ** m
    while True:
        a, b = rng.randint(1, top), rng.randint(1, top)
        if a * b <= max_dim:
            break
    gens = [kron(F, jordan(a), identity(b)), kron(F, identity(a), jordan(b))]
    dim = a * b
    monos = [gens[0], gens[1], matmul(F, gens[0], gens[1]), matmul(F, gens[0], gens[0])]
    X = []
    for _ in range(n):
        M = [[0] * dim for _ in range(dim)]
        for mono in monos:
            M = _madd(F, M, _mscale(F, rng.randrange(F.q), mono))
        X.append(M)
    P = random_invertible(F, dim, rng)
    Pi = _inverse(F, P)
    return [matmul(F, matmul(F, P, A), Pi) for A in X]
