# cython: language_level=3, boundscheck=False, wraparound=False, initializedcheck=False
"""Compiled table kernels; same contract as ``cohnet._purekernels``."""

from cpython.mem cimport PyMem_Malloc, PyMem_Free

ctypedef long long idx_t


cdef idx_t* _load(seq, Py_ssize_t n) except NULL:
    cdef idx_t* buf = <idx_t*> PyMem_Malloc((n if n > 0 else 1) * sizeof(idx_t))
    cdef Py_ssize_t i
    if buf == NULL:
        raise MemoryError()
    for i in range(n):
        buf[i] = seq[i]
    return buf


cdef tuple _dump(idx_t* buf, Py_ssize_t n):
    cdef Py_ssize_t i
    out = [0] * n
    for i in range(n):
        out[i] = buf[i]
    return tuple(out)


def compose(f, g):
    cdef Py_ssize_t n = len(f), m = len(g), i
    cdef idx_t* fa = _load(f, n)
    cdef idx_t* ga = NULL
    cdef idx_t* out = NULL
    try:
        ga = _load(g, m)
        out = <idx_t*> PyMem_Malloc((n if n > 0 else 1) * sizeof(idx_t))
        for i in range(n):
            if fa[i] < 0 or fa[i] >= m:
                raise IndexError("table entry out of range")
            out[i] = ga[fa[i]]
        return _dump(out, n)
    finally:
        PyMem_Free(fa)
        PyMem_Free(ga)
        PyMem_Free(out)


def constant(value, n):
    return (value,) * n


def pair_tables(tables, sizes, Py_ssize_t n):
    cdef idx_t* out = <idx_t*> PyMem_Malloc((n if n > 0 else 1) * sizeof(idx_t))
    cdef idx_t* t = NULL
    cdef idx_t size
    cdef Py_ssize_t i
    try:
        for i in range(n):
            out[i] = 0
        for table, s in zip(tables, sizes):
            size = s
            t = _load(table, n)
            for i in range(n):
                out[i] = out[i] * size + t[i]
            PyMem_Free(t)
            t = NULL
        return _dump(out, n)
    finally:
        PyMem_Free(out)
        PyMem_Free(t)


def projection(sizes, Py_ssize_t k):
    cdef idx_t stride = 1, total, size = sizes[k]
    cdef Py_ssize_t i
    for s in sizes[k + 1:]:
        stride *= s
    total = stride * size
    for s in sizes[:k]:
        total *= s
    cdef idx_t* out = <idx_t*> PyMem_Malloc((total if total > 0 else 1) * sizeof(idx_t))
    try:
        for i in range(total):
            out[i] = (i // stride) % size
        return _dump(out, total)
    finally:
        PyMem_Free(out)


def equalizer(f, g):
    cdef Py_ssize_t n = len(f), i
    cdef idx_t* fa = _load(f, n)
    cdef idx_t* ga = NULL
    try:
        ga = _load(g, n)
        return tuple([i for i in range(n) if fa[i] == ga[i]])
    finally:
        PyMem_Free(fa)
        PyMem_Free(ga)


def pullback(f, g):
    cdef Py_ssize_t n = len(f), m = len(g), a, b
    cdef idx_t* fa = _load(f, n)
    cdef idx_t* ga = NULL
    out = []
    try:
        ga = _load(g, m)
        for a in range(n):
            for b in range(m):
                if fa[a] == ga[b]:
                    out.append(a * m + b)
        return tuple(out)
    finally:
        PyMem_Free(fa)
        PyMem_Free(ga)


def image(f, Py_ssize_t cod_size):
    cdef Py_ssize_t n = len(f), i
    cdef idx_t* fa = _load(f, n)
    cdef char* seen = <char*> PyMem_Malloc(cod_size if cod_size > 0 else 1)
    try:
        for i in range(cod_size):
            seen[i] = 0
        for i in range(n):
            seen[fa[i]] = 1
        return tuple([i for i in range(cod_size) if seen[i]])
    finally:
        PyMem_Free(fa)
        PyMem_Free(seen)


def preimage(table, members, Py_ssize_t cod_size):
    cdef Py_ssize_t n = len(table), i
    cdef idx_t* ta = _load(table, n)
    cdef char* mask = <char*> PyMem_Malloc(cod_size if cod_size > 0 else 1)
    try:
        for i in range(cod_size):
            mask[i] = 0
        for m in members:
            mask[<Py_ssize_t> m] = 1
        return tuple([i for i in range(n) if mask[ta[i]]])
    finally:
        PyMem_Free(ta)
        PyMem_Free(mask)


def meet(a, b):
    cdef Py_ssize_t na = len(a), nb = len(b), i = 0, j = 0
    cdef idx_t* aa = _load(a, na)
    cdef idx_t* ba = NULL
    out = []
    try:
        ba = _load(b, nb)
        while i < na and j < nb:
            if aa[i] == ba[j]:
                out.append(aa[i])
                i += 1
                j += 1
            elif aa[i] < ba[j]:
                i += 1
            else:
                j += 1
        return tuple(out)
    finally:
        PyMem_Free(aa)
        PyMem_Free(ba)


def join(a, b):
    cdef Py_ssize_t na = len(a), nb = len(b), i = 0, j = 0
    cdef idx_t* aa = _load(a, na)
    cdef idx_t* ba = NULL
    out = []
    try:
        ba = _load(b, nb)
        while i < na and j < nb:
            if aa[i] == ba[j]:
                out.append(aa[i])
                i += 1
                j += 1
            elif aa[i] < ba[j]:
                out.append(aa[i])
                i += 1
            else:
                out.append(ba[j])
                j += 1
        while i < na:
            out.append(aa[i])
            i += 1
        while j < nb:
            out.append(ba[j])
            j += 1
        return tuple(out)
    finally:
        PyMem_Free(aa)
        PyMem_Free(ba)


def first_missing(a, b):
    cdef Py_ssize_t na = len(a), nb = len(b), i, j = 0
    cdef idx_t* aa = _load(a, na)
    cdef idx_t* ba = NULL
    try:
        ba = _load(b, nb)
        for i in range(na):
            while j < nb and ba[j] < aa[i]:
                j += 1
            if j == nb or ba[j] != aa[i]:
                return aa[i]
        return -1
    finally:
        PyMem_Free(aa)
        PyMem_Free(ba)


def drop_first(members, Py_ssize_t rest_size):
    cdef Py_ssize_t n = len(members), i
    cdef idx_t* ma = _load(members, n)
    cdef char* seen = <char*> PyMem_Malloc(rest_size if rest_size > 0 else 1)
    try:
        for i in range(rest_size):
            seen[i] = 0
        for i in range(n):
            seen[ma[i] % rest_size] = 1
        return tuple([i for i in range(rest_size) if seen[i]])
    finally:
        PyMem_Free(ma)
        PyMem_Free(seen)
