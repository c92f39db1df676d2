"""Dense Gaussian elimination over K = F_p(pi)."""

from .coeffs import CoeffScalar
from .errors import DivisionByZero


def inverse(matrix, p):
    """Inverse of a square matrix of CoeffScalar; raises DivisionByZero if singular."""
    n = len(matrix)
    zero = CoeffScalar.zero(p)
    one = CoeffScalar.one(p)
    a = [list(row) + [one if i == j else zero for j in range(n)] for i, row in enumerate(matrix)]
    for col in range(n):
        piv = next((r for r in range(col, n) if a[r][col]), None)
        if piv is None:
            raise DivisionByZero("singular matrix")
        a[col], a[piv] = a[piv], a[col]
        inv = a[col][col].inverse()
        a[col] = [v * inv for v in a[col]]
        for r in range(n):
            if r != col and a[r][col]:
                f = a[r][col]
                a[r] = [x - f * y for x, y in zip(a[r], a[col])]
    return [row[n:] for row in a]


def determinant(matrix):
    """Leibniz-free determinant of a small square matrix of ring elements via cofactors."""
    n = len(matrix)
    if n == 1:
        return matrix[0][0]
    if n == 2:
        return matrix[0][0] * matrix[1][1] - matrix[0][1] * matrix[1][0]
    total = None
    for j in range(n):
        minor = [row[:j] + row[j + 1:] for row in matrix[1:]]
        term = matrix[0][j] * determinant(minor)
        if j % 2:
            term = -term
        total = term if total is None else total + term
    return total


def adjugate(matrix):
    n = len(matrix)
    if n == 1:
        return [[matrix[0][0] * 0 + 1]]
    adj = [[None] * n for _ in range(n)]
    for i in range(n):
        for j in range(n):
            minor = [row[:j] + row[j + 1:] for k, row in enumerate(matrix) if k != i]
            c = determinant(minor)
            adj[j][i] = -c if (i + j) % 2 else c
    return adj
