# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled visibility kernel; same API and semantics as ``_pykernel``.

Bitsets are rows of uint64 words in 2-D numpy buffers that double in
capacity as events arrive.
"""
import numpy as np
cimport numpy as cnp
from libc.stdint cimport uint64_t, int32_t, uint8_t

cnp.import_array()

cdef extern from *:
    int __builtin_clzll(unsigned long long) nogil
    int __builtin_ctzll(unsigned long long) nogil


cdef inline int _top_bit(uint64_t v) nogil:
    return 63 - __builtin_clzll(v)


cdef inline int _low_bit(uint64_t v) nogil:
    return __builtin_ctzll(v)


cdef class Kernel:
    cdef public int n_peers
    cdef public int threshold
    cdef public int n
    cdef int cap
    cdef int W
    cdef object _anc_buf, _self_buf, _cm_buf, _clean_buf, _forked_buf
    cdef object _creator_buf, _sp_buf, _round_buf, _wit_buf
    cdef uint64_t[:, ::1] anc
    cdef uint64_t[:, ::1] selfanc
    cdef uint64_t[:, ::1] cmask
    cdef uint64_t[:, ::1] clean
    cdef uint8_t[:, ::1] fk
    cdef int32_t[::1] creator_of
    cdef int32_t[::1] sp_of
    cdef int32_t[::1] round_of
    cdef uint8_t[::1] wit

    backend = "cython"

    def __init__(self, int n_peers):
        self.n_peers = n_peers
        self.threshold = 2 * n_peers // 3 + 1
        self.n = 0
        self.cap = 0
        self.W = 0
        self._grow(256)

    cdef void _grow(self, int cap):
        cdef int W = cap // 64
        anc = np.zeros((cap, W), dtype=np.uint64)
        selfanc = np.zeros((cap, W), dtype=np.uint64)
        cm = np.zeros((self.n_peers, W), dtype=np.uint64)
        clean = np.zeros((self.n_peers, W), dtype=np.uint64)
        fk = np.zeros((cap, self.n_peers), dtype=np.uint8)
        creator = np.zeros(cap, dtype=np.int32)
        sp = np.zeros(cap, dtype=np.int32)
        rnd = np.zeros(cap, dtype=np.int32)
        wit = np.zeros(cap, dtype=np.uint8)
        if self.cap:
            anc[:self.cap, :self.W] = self._anc_buf
            selfanc[:self.cap, :self.W] = self._self_buf
            cm[:, :self.W] = self._cm_buf
            clean[:, :self.W] = self._clean_buf
            fk[:self.cap] = self._forked_buf
            creator[:self.cap] = self._creator_buf
            sp[:self.cap] = self._sp_buf
            rnd[:self.cap] = self._round_buf
            wit[:self.cap] = self._wit_buf
        self._anc_buf, self._self_buf = anc, selfanc
        self._cm_buf, self._clean_buf, self._forked_buf = cm, clean, fk
        self._creator_buf, self._sp_buf = creator, sp
        self._round_buf, self._wit_buf = rnd, wit
        self.anc, self.selfanc, self.cmask, self.clean, self.fk = anc, selfanc, cm, clean, fk
        self.creator_of, self.sp_of, self.round_of, self.wit = creator, sp, rnd, wit
        self.cap, self.W = cap, W

    cpdef int add(self, int creator, int sp, int op):
        cdef int x = self.n
        cdef int w, q, top, words, m
        cdef uint64_t v
        cdef bint chain
        if x >= self.cap:
            self._grow(self.cap * 2)
        words = (x >> 6) + 1
        self.creator_of[x] = creator
        self.sp_of[x] = sp
        if sp < 0:
            self.anc[x, x >> 6] = (<uint64_t>1) << (x & 63)
            self.selfanc[x, x >> 6] = (<uint64_t>1) << (x & 63)
        else:
            for w in range(words):
                self.anc[x, w] = self.anc[sp, w] | self.anc[op, w]
                self.selfanc[x, w] = self.selfanc[sp, w]
            self.anc[x, x >> 6] |= (<uint64_t>1) << (x & 63)
            self.selfanc[x, x >> 6] |= (<uint64_t>1) << (x & 63)
            for q in range(self.n_peers):
                self.fk[x, q] = self.fk[sp, q] | self.fk[op, q]
        self.cmask[creator, x >> 6] |= (<uint64_t>1) << (x & 63)
        if sp >= 0:
            for q in range(self.n_peers):
                if self.fk[x, q]:
                    continue
                top = -1
                for w in range(words - 1, -1, -1):
                    v = self.anc[x, w] & self.cmask[q, w]
                    if v:
                        top = w * 64 + _top_bit(v)
                        break
                if top < 0:
                    continue
                chain = True
                for w in range(words):
                    if (self.anc[x, w] & self.cmask[q, w]) != self.selfanc[top, w]:
                        chain = False
                        break
                if not chain:
                    self.fk[x, q] = 1
        for q in range(self.n_peers):
            if not self.fk[x, q]:
                self.clean[q, x >> 6] |= (<uint64_t>1) << (x & 63)
        self.n += 1
        if sp < 0:
            self.round_of[x] = 0
            self.wit[x] = 1
        else:
            m = self.round_of[sp]
            if self.round_of[op] > m:
                m = self.round_of[op]
            if self._advances(x, m):
                m += 1
            self.round_of[x] = m
            self.wit[x] = m > self.round_of[sp]
        return x

    cdef bint _advances(self, int x, int m):
        cdef int need = self.threshold
        cdef int remaining = self.n_peers
        cdef int q, w, z
        cdef int words = (x >> 6) + 1
        cdef uint64_t v
        cdef bint hit
        for q in range(self.n_peers):
            remaining -= 1
            hit = False
            for w in range(words):
                v = self.anc[x, w] & self.cmask[q, w]
                while v and not hit:
                    z = w * 64 + _low_bit(v)
                    v &= v - 1
                    if z != x and self.round_of[z] == m and self._stsees_count(x, z, self.threshold) >= self.threshold:
                        hit = True
                if hit:
                    break
            if hit:
                need -= 1
            if need <= 0:
                return True
            if need > remaining:
                return False
        return False

    cdef int _stsees_count(self, int y, int x, int limit):
        cdef int p, q, w, z, top, count = 0
        cdef int words = (y >> 6) + 1
        cdef uint64_t v
        cdef bint found
        if not (self.anc[y, x >> 6] >> (x & 63)) & 1:
            return 0
        p = self.creator_of[x]
        for q in range(self.n_peers):
            found = False
            if not self.fk[y, q]:
                for w in range(words - 1, -1, -1):
                    v = self.anc[y, w] & self.clean[p, w] & self.cmask[q, w]
                    if v:
                        top = w * 64 + _top_bit(v)
                        found = (self.anc[top, x >> 6] >> (x & 63)) & 1
                        break
            else:
                for w in range(words):
                    v = self.anc[y, w] & self.clean[p, w] & self.cmask[q, w]
                    while v:
                        z = w * 64 + _low_bit(v)
                        v &= v - 1
                        if (self.anc[z, x >> 6] >> (x & 63)) & 1:
                            found = True
                            break
                    if found:
                        break
            if found:
                count += 1
                if limit > 0 and count >= limit:
                    break
        return count

    # queries -----------------------------------------------------------

    def creator(self, int x):
        return self.creator_of[x]

    def round(self, int x):
        return self.round_of[x]

    def witness(self, int x):
        return bool(self.wit[x])

    def self_parent(self, int x):
        return self.sp_of[x]

    cpdef bint is_anc(self, int x, int y):
        return (self.anc[y, x >> 6] >> (x & 63)) & 1

    cpdef bint is_self_anc(self, int x, int y):
        return (self.selfanc[y, x >> 6] >> (x & 63)) & 1

    cpdef bint forked(self, int y, int p):
        return self.fk[y, p]

    cpdef bint sees(self, int y, int x):
        return self.is_anc(x, y) and not self.fk[y, self.creator_of[x]]

    def stsees_count(self, int y, int x, limit=None):
        return self._stsees_count(y, x, 0 if limit is None else limit)

    cpdef bint stsees(self, int y, int x):
        return self._stsees_count(y, x, self.threshold) >= self.threshold

    def ancestors(self, int y):
        cdef int w, words = (y >> 6) + 1
        cdef uint64_t v
        out = []
        for w in range(words):
            v = self.anc[y, w]
            while v:
                out.append(w * 64 + _low_bit(v))
                v &= v - 1
        return out

    def strongly_seen(self, int y):
        """Indices of every event strongly seen by ``y``, ascending."""
        cdef int w, x, words = (y >> 6) + 1
        cdef uint64_t v
        out = []
        for w in range(words):
            v = self.anc[y, w]
            while v:
                x = w * 64 + _low_bit(v)
                v &= v - 1
                if self._stsees_count(y, x, self.threshold) >= self.threshold:
                    out.append(x)
        return out
