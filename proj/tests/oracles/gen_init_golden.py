"""Independent reference for SSMRegressor.init_params.

Re-implements splitmix64 seeding, xoshiro256**, the 53-bit uniform mapping
and the documented parameter layout, then writes one value per line.

    python3 gen_init_golden.py 42 17 2 2 > ../fixtures/init_seed42_h2.txt
"""
import math
import sys

MASK = (1 << 64) - 1


def splitmix64(state):
    state = (state + 0x9E3779B97F4A7C15) & MASK
    z = state
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK
    return state, z ^ (z >> 31)


def rotl(x, k):
    return ((x << k) | (x >> (64 - k))) & MASK


class Xoshiro:
    def __init__(self, s):
        self.s = list(s)

    @classmethod
    def seeded(cls, seed):
        st, words = seed, []
        for _ in range(4):
            st, w = splitmix64(st)
            words.append(w)
        return cls(words)

    def next(self):
        s = self.s
        result = (rotl((s[1] * 5) & MASK, 7) * 9) & MASK
        t = (s[1] << 17) & MASK
        s[2] ^= s[0]
        s[3] ^= s[1]
        s[1] ^= s[2]
        s[0] ^= s[3]
        s[2] ^= t
        s[3] = rotl(s[3], 45)
        return result

    def uniform(self, lo, hi):
        u = (self.next() >> 11) * 2.0**-53
        return lo + (hi - lo) * u


# published reference outputs for state {1, 2, 3, 4}
_REF = [11520, 0, 1509978240, 1215971899390074240]
_r = Xoshiro([1, 2, 3, 4])
assert [_r.next() for _ in range(4)] == _REF


def init_params(seed, input_dim, hidden, layers):
    rng = Xoshiro.seeded(seed)
    out = []

    def fill(count, fan_in):
        bound = 1.0 / math.sqrt(fan_in)
        out.extend(rng.uniform(-bound, bound) for _ in range(count))

    fill(hidden * input_dim, input_dim)
    fill(hidden, input_dim)
    for _ in range(layers):
        fill(hidden, 1)
        fill(hidden * hidden, hidden)
        fill(hidden * hidden, hidden)
        fill(hidden * hidden, hidden)
        fill(hidden, hidden)
    fill(hidden, hidden)
    fill(1, hidden)
    return out


if __name__ == "__main__":
    seed, d, h, l = (int(a) for a in sys.argv[1:5])
    for v in init_params(seed, d, h, l):
        print(repr(v))
