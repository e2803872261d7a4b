# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled four-point scan over a matrix of exponential Gromov values.

Must stay float-for-float identical to _fourpoint_py.scan: same association
order (E[x,y] - E[x,z]) - E[z,y], strict-improvement updates only, so the
reported triple is the lexicographically first maximizer.
"""


def scan(double[:, ::1] e):
    cdef Py_ssize_t n = e.shape[0]
    cdef Py_ssize_t x, y, z
    cdef Py_ssize_t bx = -1, by = 0, bz = 0
    cdef double best = -1e308
    cdef double exy, d
    for x in range(n):
        for y in range(n):
            exy = e[x, y]
            for z in range(n):
                d = (exy - e[x, z]) - e[z, y]
                if d > best:
                    best = d
                    bx = x
                    by = y
                    bz = z
    return best, bx, by, bz
