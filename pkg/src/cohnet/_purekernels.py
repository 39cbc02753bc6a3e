"""Pure-Python table kernels.

Tables are sequences of ints; member lists are sorted, duplicate-free
sequences of ints. Every function returns a tuple. ``_speedups`` provides
the same functions compiled with Cython.
"""


def compose(f, g):
    """``g . f`` as a table: ``i -> g[f[i]]``."""
    return tuple([g[x] for x in f])


def constant(value, n):
    return (value,) * n


def pair_tables(tables, sizes, n):
    """Tuple the tables into one table over the mixed-radix product."""
    out = [0] * n
    for table, size in zip(tables, sizes):
        for i in range(n):
            out[i] = out[i] * size + table[i]
    return tuple(out)


def projection(sizes, k):
    stride = 1
    for s in sizes[k + 1:]:
        stride *= s
    total = stride * sizes[k]
    for s in sizes[:k]:
        total *= s
    size = sizes[k]
    return tuple([(i // stride) % size for i in range(total)])


def equalizer(f, g):
    return tuple([i for i in range(len(f)) if f[i] == g[i]])


def pullback(f, g):
    """Indices ``a * len(g) + b`` with ``f[a] == g[b]``, ascending."""
    buckets = {}
    for b, y in enumerate(g):
        buckets.setdefault(y, []).append(b)
    width = len(g)
    out = []
    for a, x in enumerate(f):
        base = a * width
        for b in buckets.get(x, ()):
            out.append(base + b)
    return tuple(out)


def image(f, cod_size):
    seen = [False] * cod_size
    for x in f:
        seen[x] = True
    return tuple([y for y in range(cod_size) if seen[y]])


def preimage(table, members, cod_size):
    mask = [False] * cod_size
    for m in members:
        mask[m] = True
    return tuple([i for i, x in enumerate(table) if mask[x]])


def meet(a, b):
    out = []
    i = j = 0
    na, nb = len(a), len(b)
    while i < na and j < nb:
        x, y = a[i], b[j]
        if x == y:
            out.append(x)
            i += 1
            j += 1
        elif x < y:
            i += 1
        else:
            j += 1
    return tuple(out)


def join(a, b):
    out = []
    i = j = 0
    na, nb = len(a), len(b)
    while i < na and j < nb:
        x, y = a[i], b[j]
        if x == y:
            out.append(x)
            i += 1
            j += 1
        elif x < y:
            out.append(x)
            i += 1
        else:
            out.append(y)
            j += 1
    out.extend(a[i:])
    out.extend(b[j:])
    return tuple(out)


def first_missing(a, b):
    """Least element of ``a`` absent from ``b``, or -1 when ``a <= b``."""
    j = 0
    nb = len(b)
    for x in a:
        while j < nb and b[j] < x:
            j += 1
        if j == nb or b[j] != x:
            return x
    return -1


def drop_first(members, rest_size):
    """Image of ``members`` under the projection that forgets the slowest
    coordinate of a product whose remaining factors have ``rest_size``."""
    seen = [False] * rest_size
    for m in members:
        seen[m % rest_size] = True
    return tuple([r for r in range(rest_size) if seen[r]])
