"""Dense linear algebra over a FieldDesc, on raw integer encodings."""
from __future__ import annotations

from .ffield import FieldDesc


def rref(F: FieldDesc, rows):
    """Reduced row echelon form; returns (matrix, pivot columns)."""
    M = [list(r) for r in rows]
    if not M:
        return M, []
    ncols = len(M[0])
    pivots = []
    r = 0
    for c in range(ncols):
        piv = next((i for i in range(r, len(M)) if M[i][c]), None)
        if piv is None:
            continue
        M[r], M[piv] = M[piv], M[r]
        inv = F.inv(M[r][c])
        M[r] = [F.mul(inv, v) for v in M[r]]
        row_r = M[r]
        for i in range(len(M)):
            if i != r and M[i][c]:
                f = F.neg(M[i][c])
                M[i] = [F.add(a, F.mul(f, b)) if b else a for a, b in zip(M[i], row_r)]
        pivots.append(c)
        r += 1
        if r == len(M):
            break
    return M, pivots


def rank(F: FieldDesc, rows) -> int:
    return len(rref(F, rows)[1])


def nullspace(F: FieldDesc, rows, ncols=None):
    """Basis of {v : rows * v = 0} as a list of vectors."""
    if not rows:
        n = ncols or 0
        return [[1 if i == j else 0 for i in range(n)] for j in range(n)]
    ncols = len(rows[0])
    R, piv = rref(F, rows)
    free = [c for c in range(ncols) if c not in piv]
    basis = []
    for f in free:
        v = [0] * ncols
        v[f] = 1
        for i, pc in enumerate(piv):
            if R[i][f]:
                v[pc] = F.neg(R[i][f])
        basis.append(v)
    return basis


def solve(F: FieldDesc, rows, rhs):
    """One solution x of rows * x = rhs, or None."""
    aug = [list(r) + [b] for r, b in zip(rows, rhs)]
    ncols = len(rows[0])
    R, piv = rref(F, aug)
    if ncols in piv:
        return None
    x = [0] * ncols
    for i, pc in enumerate(piv):
        x[pc] = R[i][ncols]
    return x


def matmul(F: FieldDesc, A, B):
    Bt = list(zip(*B))
    out = []
    for row in A:
        out_row = []
        for col in Bt:
            s = 0
            for a, b in zip(row, col):
                if a and b:
                    s = F.add(s, F.mul(a, b))
            out_row.append(s)
        out.append(out_row)
    return out


def matvec(F: FieldDesc, A, v):
    out = []
    for row in A:
        s = 0
        for a, b in zip(row, v):
            if a and b:
                s = F.add(s, F.mul(a, b))
        out.append(s)
    return out


def identity(n):
    return [[1 if i == j else 0 for j in range(n)] for i in range(n)]


def is_zero_matrix(A):
    return all(not v for row in A for v in row)


def intersect_kernels(F: FieldDesc, mats, dim):
    """Basis of the common kernel of a list of square matrices."""
    rows = [row for A in mats for row in A]
    return nullspace(F, rows, dim) if rows else nullspace(F, [], dim)


def proportional(F: FieldDesc, u, v) -> bool:
    """u and v are nonzero multiples of each other."""
    i = next((k for k, a in enumerate(u) if a), None)
    j = next((k for k, a in enumerate(v) if a), None)
    if i is None or j is None or i != j:
        return False
    s = F.div(v[i], u[i])
    return all(F.mul(s, a) == b for a, b in zip(u, v))
