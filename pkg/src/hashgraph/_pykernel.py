"""Pure-Python visibility kernel over big-int bitsets.

Bit ``i`` of a mask stands for the event with local index ``i``; indices are
assigned in insertion order, which is a topological order of the DAG.
"""


def _bits(mask):
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


class Kernel:
    backend = "python"

    def __init__(self, n_peers):
        self.n_peers = n_peers
        self.threshold = 2 * n_peers // 3 + 1
        self.n = 0
        self._creator = []
        self._self_parent = []
        self._anc = []
        self._selfanc = []
        self._forked = []
        self._round = []
        self._witness = []
        self._cmask = [0] * n_peers
        self._clean = [0] * n_peers
        self._rmask = []

    def add(self, creator, sp, op):
        x = self.n
        bit = 1 << x
        if sp < 0:
            anc = bit
            selfanc = bit
            forked = 0
        else:
            anc = self._anc[sp] | self._anc[op] | bit
            selfanc = self._selfanc[sp] | bit
            forked = self._forked[sp] | self._forked[op]
        self._creator.append(creator)
        self._self_parent.append(sp)
        self._anc.append(anc)
        self._selfanc.append(selfanc)
        self._cmask[creator] |= bit

        if sp >= 0:
            for q in range(self.n_peers):
                if forked >> q & 1:
                    continue
                mine = anc & self._cmask[q]
                if mine and mine != self._selfanc[mine.bit_length() - 1]:
                    forked |= 1 << q
        self._forked.append(forked)
        for p in range(self.n_peers):
            if not forked >> p & 1:
                self._clean[p] |= bit
        self.n += 1

        if sp < 0:
            rnd = 0
        else:
            m = max(self._round[sp], self._round[op])
            rnd = m + 1 if self._advances(x, m) else m
        self._round.append(rnd)
        self._witness.append(sp < 0 or rnd > self._round[sp])
        while len(self._rmask) <= rnd:
            self._rmask.append(0)
        self._rmask[rnd] |= bit
        return x

    def _advances(self, x, m):
        need = self.threshold
        pool = (self._anc[x] & self._rmask[m]) & ~(1 << x)
        remaining = self.n_peers
        for q in range(self.n_peers):
            remaining -= 1
            for z in _bits(pool & self._cmask[q]):
                if self.stsees(x, z):
                    need -= 1
                    break
            if need <= 0:
                return True
            if need > remaining:
                return False
        return False

    # queries -----------------------------------------------------------

    def creator(self, x):
        return self._creator[x]

    def round(self, x):
        return self._round[x]

    def witness(self, x):
        return self._witness[x]

    def is_anc(self, x, y):
        return bool(self._anc[y] >> x & 1)

    def is_self_anc(self, x, y):
        return bool(self._selfanc[y] >> x & 1)

    def forked(self, y, p):
        return bool(self._forked[y] >> p & 1)

    def sees(self, y, x):
        return bool(self._anc[y] >> x & 1) and not self._forked[y] >> self._creator[x] & 1

    def stsees_count(self, y, x, limit=None):
        """Number of creators with an event z such that x sees-into z <= y."""
        if not self._anc[y] >> x & 1:
            return 0
        anc = self._anc
        base = anc[y] & self._clean[self._creator[x]]
        fy = self._forked[y]
        count = 0
        for q in range(self.n_peers):
            pool = base & self._cmask[q]
            if not pool:
                continue
            if not fy >> q & 1:
                if anc[pool.bit_length() - 1] >> x & 1:
                    count += 1
            else:
                for z in _bits(pool):
                    if anc[z] >> x & 1:
                        count += 1
                        break
            if limit is not None and count >= limit:
                break
        return count

    def stsees(self, y, x):
        return self.stsees_count(y, x, self.threshold) >= self.threshold

    def ancestors(self, y):
        return list(_bits(self._anc[y]))

    def self_parent(self, x):
        return self._self_parent[x]

    def strongly_seen(self, y):
        """Indices of every event strongly seen by ``y``, ascending."""
        return [x for x in _bits(self._anc[y]) if self.stsees(y, x)]
