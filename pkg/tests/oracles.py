"""Independent pure-Python oracles: Jordan types of unipotent matrices over F_p via ranks."""


def rank_mod_p(rows, p):
    rows = [list(r) for r in rows]
    rank, col, n = 0, 0, len(rows[0]) if rows else 0
    while rank < len(rows) and col < n:
        pivot = next((i for i in range(rank, len(rows)) if rows[i][col] % p), None)
        if pivot is None:
            col += 1
            continue
        rows[rank], rows[pivot] = rows[pivot], rows[rank]
        inv = pow(rows[rank][col], -1, p)
        rows[rank] = [v * inv % p for v in rows[rank]]
        for i in range(len(rows)):
            if i != rank and rows[i][col] % p:
                c = rows[i][col]
                rows[i] = [(v - c * w) % p for v, w in zip(rows[i], rows[rank])]
        rank += 1
        col += 1
    return rank


def matmul(a, b, p):
    return [[sum(x * y for x, y in zip(row, colm)) % p for colm in zip(*b)] for row in a]


def jordan_blocks_oracle(u, p):
    n = len(u)
    nil = [[(u[i][j] - (i == j)) % p for j in range(n)] for i in range(n)]
    ranks = [n]
    power = [[int(i == j) for j in range(n)] for i in range(n)]
    while ranks[-1]:
        power = matmul(power, nil, p)
        ranks.append(rank_mod_p(power, p))
    # number of blocks of size >= k is rank(N^(k-1)) - rank(N^k)
    at_least = [ranks[k - 1] - ranks[k] for k in range(1, len(ranks))]
    blocks = []
    for k, count in enumerate(at_least, start=1):
        exactly = count - (at_least[k] if k < len(at_least) else 0)
        blocks += [k] * exactly
    return tuple(sorted(blocks))


def sigma_list(block_sizes):
    n = sum(block_sizes)
    u = [[int(i == j) for j in range(n)] for i in range(n)]
    start = 0
    for k in block_sizes:
        for i in range(start, start + k - 1):
            u[i][i + 1] = 1
        start += k
    return u


def kron(a, b, p):
    return [[a[i][j] * b[k][l] % p for j in range(len(a)) for l in range(len(b))] for i in range(len(a)) for k in range(len(b))]
