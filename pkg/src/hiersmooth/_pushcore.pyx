# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""int64 kernel for the DFS push-search solver.

Same state machine as the pure-Python path in l1tree.py, with eps = -1 as the
"unbounded" sentinel instead of None. The caller guarantees that the sum of
scaled targets (and of weights) is small enough that every intermediate fits
in 64 bits.
"""

from libc.stdlib cimport malloc, free


cdef struct Counters:
    long long pushes
    long long total
    long long visits


cdef long long _push(int root, long long delta0,
                     long long* a, long long* w, long long* x,
                     int* cstart, int* cflat,
                     int* st_node, int* st_next,
                     long long* st_din, long long* st_ein,
                     long long* st_push, long long* st_d, long long* st_e,
                     Counters* cnt) noexcept:
    cdef int top = 0
    cdef int u, i, deg
    cdef long long d, e, ein, cs, slack, l, t, ret
    cdef bint have_ret = False
    st_node[0] = root
    st_din[0] = delta0
    st_ein[0] = -1
    st_push[0] = 0
    st_next[0] = -1
    ret = 0
    while top >= 0:
        u = st_node[top]
        if st_next[top] == -1:
            cnt.visits += 1
            ein = st_ein[top]
            if x[u] > a[u]:
                d = st_din[top] + w[u]
                e = x[u] - a[u]
            else:
                d = st_din[top] - w[u]
                e = x[u]
            if ein != -1 and ein < e:
                e = ein
            if e == 0:
                ret = 0
                have_ret = True
                top -= 1
                continue
            cs = 0
            for i in range(cstart[u], cstart[u + 1]):
                cs += x[cflat[i]]
            slack = x[u] - cs
            if d > 0 and slack > 0:
                l = e if e < slack else slack
                x[u] -= l
                st_push[top] += l
                cnt.pushes += 1
                cnt.total += l
                ein = st_ein[top]
                if ein != -1:
                    ein = ein - st_push[top]
                if x[u] > a[u]:
                    d = st_din[top] + w[u]
                    e = x[u] - a[u]
                else:
                    d = st_din[top] - w[u]
                    e = x[u]
                if ein != -1 and ein < e:
                    e = ein
                if e == 0:
                    ret = st_push[top]
                    have_ret = True
                    top -= 1
                    continue
            st_d[top] = d
            st_e[top] = e
            st_next[top] = 0
            have_ret = False
        elif have_ret:
            t = ret
            have_ret = False
            if t > 0:
                x[u] -= t
                st_push[top] += t
                ein = st_ein[top]
                if ein != -1:
                    ein = ein - st_push[top]
                if x[u] > a[u]:
                    d = st_din[top] + w[u]
                    e = x[u] - a[u]
                else:
                    d = st_din[top] - w[u]
                    e = x[u]
                if ein != -1 and ein < e:
                    e = ein
                st_d[top] = d
                st_e[top] = e
                if e == 0:
                    ret = st_push[top]
                    have_ret = True
                    top -= 1
                    continue
        i = st_next[top]
        deg = cstart[u + 1] - cstart[u]
        if i < deg:
            st_next[top] = i + 1
            top += 1
            st_node[top] = cflat[cstart[u] + i]
            st_din[top] = st_d[top - 1]
            st_ein[top] = st_e[top - 1]
            st_push[top] = 0
            st_next[top] = -1
        else:
            ret = st_push[top]
            have_ret = True
            top -= 1
    return ret


def solve_dfs(list a_list, list w_list, list cstart_list, list cflat_list,
              list post_list, bint weighted):
    """Run the full solve; returns (x list, pushes, total_pushed, visits)."""
    cdef int n = len(a_list)
    cdef int ne = len(cflat_list)
    cdef int idx, v, i
    cdef long long s, wv, cs
    cdef long long* a = <long long*> malloc(n * sizeof(long long))
    cdef long long* w = <long long*> malloc(n * sizeof(long long))
    cdef long long* x = <long long*> malloc(n * sizeof(long long))
    cdef int* cstart = <int*> malloc((n + 1) * sizeof(int))
    cdef int* cflat = <int*> malloc((ne if ne > 0 else 1) * sizeof(int))
    cdef int* post = <int*> malloc(n * sizeof(int))
    cdef int* st_node = <int*> malloc(n * sizeof(int))
    cdef int* st_next = <int*> malloc(n * sizeof(int))
    cdef long long* st_din = <long long*> malloc(n * sizeof(long long))
    cdef long long* st_ein = <long long*> malloc(n * sizeof(long long))
    cdef long long* st_push = <long long*> malloc(n * sizeof(long long))
    cdef long long* st_d = <long long*> malloc(n * sizeof(long long))
    cdef long long* st_e = <long long*> malloc(n * sizeof(long long))
    cdef Counters cnt
    cnt.pushes = 0
    cnt.total = 0
    cnt.visits = 0
    try:
        for i in range(n):
            a[i] = a_list[i]
            w[i] = w_list[i]
            post[i] = post_list[i]
        for i in range(n + 1):
            cstart[i] = cstart_list[i]
        for i in range(ne):
            cflat[i] = cflat_list[i]

        for idx in range(n):
            v = post[idx]
            cs = 0
            for i in range(cstart[v], cstart[v + 1]):
                cs += x[cflat[i]]
            x[v] = a[v] if a[v] > cs else cs
            if weighted:
                wv = w[v]
                s = 1
                while s <= wv:
                    if x[v] <= a[v]:
                        break
                    _push(v, s - wv, a, w, x, cstart, cflat,
                          st_node, st_next, st_din, st_ein, st_push, st_d, st_e,
                          &cnt)
                    s += 1
            else:
                if x[v] > a[v]:
                    _push(v, 0, a, w, x, cstart, cflat,
                          st_node, st_next, st_din, st_ein, st_push, st_d, st_e,
                          &cnt)

        out = [x[i] for i in range(n)]
        return out, cnt.pushes, cnt.total, cnt.visits
    finally:
        free(a)
        free(w)
        free(x)
        free(cstart)
        free(cflat)
        free(post)
        free(st_node)
        free(st_next)
        free(st_din)
        free(st_ein)
        free(st_push)
        free(st_d)
        free(st_e)
