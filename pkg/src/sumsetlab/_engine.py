"""Strategy-switching exact addition of finite sets of non-negative integers.

A value is held as a packed int, a list of maximal runs, or both (converted
lazily).  ``add`` picks, per call, the cheapest exact route:

* shift-or of the larger operand by every member of the smaller one;
* run arithmetic: when one operand owns a run longer than the other's largest
  gap, that run swallows the middle of the result and only the two end windows
  are computed (recursively); otherwise all run pairs are added;
* FFT convolution of indicator vectors, rounded, with an integrality guard.

All routes produce identical sets; tests pin that down against brute force.
"""
import numpy as np
import scipy.fft as sfft

from . import _bits

SHIFT_BUDGET = 4_000_000     # word operations we accept for shift-or without looking further
PAIR_BUDGET = 3_000_000      # run pairs materialised at once
FFT_BLOCK = 1 << 24          # operand block length once a single FFT would be too long


class Packed:
    __slots__ = ("bound", "_bits", "_runs", "_count")

    def __init__(self, bound, bits=None, runs=None):
        self.bound = int(bound)
        self._bits = bits
        self._runs = runs
        self._count = None

    @classmethod
    def empty(cls, bound=0):
        return cls(bound, bits=0)

    @property
    def bits(self):
        if self._bits is None:
            s, e = self._runs
            self._bits = _bits.runs_to_bits(s, e, self.bound)
        return self._bits

    @property
    def runs(self):
        if self._runs is None:
            self._runs = bits_to_runs(self._bits, self.bound)
        return self._runs

    @property
    def count(self):
        if self._count is None:
            if self._bits is not None:
                self._count = self._bits.bit_count()
            else:
                s, e = self._runs
                self._count = int(np.sum(e - s + 1))
        return self._count

    def is_empty(self):
        if self._bits is not None:
            return self._bits == 0
        return len(self._runs[0]) == 0

    def lo_hi(self):
        if self._runs is not None:
            s, e = self._runs
            return int(s[0]), int(e[-1])
        b = self._bits
        return (b & -b).bit_length() - 1, b.bit_length() - 1

    def nruns(self):
        return len(self.runs[0])


def bits_to_runs(bits, bound):
    """Maximal runs of a packed set, chunked so dense huge sets stay cheap."""
    if bits == 0:
        z = np.zeros(0, dtype=np.int64)
        return z, z.copy()
    buf = _bits.bits_to_bytes(bits, bound)
    starts, ends = [], []
    step = _bits._CHUNK_BYTES
    prev = 0
    for off in range(0, len(buf), step):
        chunk = np.unpackbits(buf[off:off + step], bitorder="little").astype(np.int8)
        d = np.diff(chunk, prepend=np.int8(prev))
        base = 8 * off
        st = np.flatnonzero(d == 1)
        en = np.flatnonzero(d == -1)
        if len(st):
            starts.append(st.astype(np.int64) + base)
        if len(en):
            ends.append(en.astype(np.int64) + base - 1)
        prev = int(chunk[-1])
    s = np.concatenate(starts) if starts else np.zeros(0, dtype=np.int64)
    e = np.concatenate(ends) if ends else np.zeros(0, dtype=np.int64)
    if len(e) < len(s):
        e = np.r_[e, 8 * len(buf) - 1]
    return s, e


def _indicator(p):
    return _bits.bits_to_bool(p.bits, p.bound).astype(np.float64)


def _shift_or(x, y):
    small, big = (x, y) if x.count <= y.count else (y, x)
    bb = big.bits
    acc = 0
    sbits = small.bits
    if small.count <= 64:
        while sbits:
            low = sbits & -sbits
            acc |= bb << (low.bit_length() - 1)
            sbits ^= low
    else:
        for m in _bits.bits_to_indices(sbits, small.bound).tolist():
            acc |= bb << m
    return Packed(x.bound + y.bound, bits=acc)


def _fft(x, y):
    if x is y:
        a = _indicator(x)
        counts = _bits.fft_counts(a, a)
    else:
        counts = _bits.fft_counts(_indicator(x), _indicator(y))
    return Packed(x.bound + y.bound, bits=_bits.bool_to_bits(counts > 0))


def _block_spectra(p, size, fft_size):
    """{block index: rfft of the block indicator} over nonempty blocks."""
    out = {}
    mask = (1 << size) - 1
    for i, off in enumerate(range(0, p.bound + 1, size)):
        chunk = (p.bits >> off) & mask
        if chunk:
            ind = _bits.bits_to_bool(chunk, size - 1).astype(np.float64)
            out[i] = sfft.rfft(ind, fft_size)
    return out


def _fft_blocked(x, y):
    """Exact sumset by blocked FFT.

    Block products landing on the same offset are summed in the frequency
    domain, so there is one inverse transform per offset.
    """
    B = FFT_BLOCK
    size = sfft.next_fast_len(2 * B - 1, real=True)
    fx = _block_spectra(x, B, size)
    fy = fx if y is x else _block_spectra(y, B, size)
    acc = 0
    for t in range(max(fx) + max(fy) + 1):
        spec = None
        for i, sx in fx.items():
            sy = fy.get(t - i)
            if sy is not None:
                spec = sx * sy if spec is None else spec + sx * sy
        if spec is None:
            continue
        conv = sfft.irfft(spec, size)[:2 * B - 1]
        del spec
        rounded = np.rint(conv)
        if np.max(np.abs(conv - rounded)) >= 0.25:
            raise ArithmeticError("blocked FFT convolution lost integrality")
        acc |= _bits.bool_to_bits(rounded > 0.5) << (t * B)
    return Packed(x.bound + y.bound, bits=acc)


def _fft_cost(x, y):
    fft_len = x.bound + y.bound + 1
    if fft_len <= _bits.FFT_MAX_LEN:
        return 40.0 * fft_len, False
    nx = x.bound // FFT_BLOCK + 1
    ny = y.bound // FFT_BLOCK + 1
    return 40.0 * nx * ny * 2 * FFT_BLOCK, True


def _pairwise_runs(xr, yr):
    xs, xe = xr
    ys, ye = yr
    s = (xs[:, None] + ys[None, :]).ravel()
    e = (xe[:, None] + ye[None, :]).ravel()
    return _bits.merge_runs(s, e)


def _clip(runs, lo, hi):
    s, e = runs
    keep = (e >= lo) & (s <= hi)
    return np.maximum(s[keep], lo), np.minimum(e[keep], hi)


def _window_sum(xr, yr, lo, hi, bound):
    """Runs of (X + Y) intersected with [lo, hi], X and Y already clipped."""
    if len(xr[0]) == 0 or len(yr[0]) == 0 or lo > hi:
        z = np.zeros(0, dtype=np.int64)
        return z, z.copy()
    xoff = int(xr[0][0])
    yoff = int(yr[0][0])
    # shift both operands to start at 0 so the recursive call has tight bounds
    xp = Packed(int(xr[1][-1]) - xoff, runs=(xr[0] - xoff, xr[1] - xoff))
    yp = Packed(int(yr[1][-1]) - yoff, runs=(yr[0] - yoff, yr[1] - yoff))
    z = add(xp, yp)
    s, e = z.runs
    return _clip((s + xoff + yoff, e + xoff + yoff), lo, hi)


def _middle_trick(x, y):
    """Run arithmetic exploiting a dominant run; returns None if not applicable."""
    best = None
    for a, b in ((x, y), (y, x)):
        s, e = a.runs
        lengths = e - s
        k = int(np.argmax(lengths))
        bs, be = b.runs
        gap = int(np.max(bs[1:] - be[:-1] - 1)) if len(bs) > 1 else 0
        if gap <= int(lengths[k]) and (best is None or lengths[k] > best[0]):
            best = (int(lengths[k]), a, b, int(s[k]), int(e[k]))
    if best is None:
        return None
    _, a, b, ms, me = best
    alo, ahi = a.lo_hi()
    blo, bhi = b.lo_hi()
    cl, ch = ms + blo, me + bhi
    # everything in [cl, ch] is covered by the dominant run plus b
    rest_s, rest_e = a.runs
    k = int(np.flatnonzero(rest_s == ms)[0])
    rest = (np.delete(rest_s, k), np.delete(rest_e, k))
    bound = a.bound + b.bound
    low = _window_sum(_clip(rest, alo, cl - blo - 1), _clip(b.runs, blo, cl - alo - 1),
                      0, cl - 1, bound)
    high = _window_sum(_clip(rest, ch - bhi + 1, ahi), _clip(b.runs, ch - ahi + 1, bhi),
                       ch + 1, bound, bound)
    s = np.r_[low[0], cl, high[0]].astype(np.int64)
    e = np.r_[low[1], ch, high[1]].astype(np.int64)
    return Packed(bound, runs=_bits.merge_runs(s, e))


def add(x, y):
    """Exact sumset of two Packed values; bound of the result is the sum of bounds."""
    bound = x.bound + y.bound
    if x.is_empty() or y.is_empty():
        return Packed.empty(bound)
    words = bound // 64 + 1
    k = min(x.count, y.count)
    shift_cost = 2.0 * k * words
    if shift_cost <= SHIFT_BUDGET:
        return _shift_or(x, y)
    # run view costs one pass over the packed bytes; worth it at this point
    if x._runs is None and x._bits is not None and bound > 0:
        x.runs
    if y._runs is None and y._bits is not None:
        y.runs
    r = _middle_trick(x, y)
    if r is not None:
        return r
    pair_cost = 60.0 * x.nruns() * y.nruns()
    fft_cost, blocked = _fft_cost(x, y)
    best = min(shift_cost, pair_cost, fft_cost)
    if best == pair_cost and x.nruns() * y.nruns() <= PAIR_BUDGET:
        return Packed(bound, runs=_pairwise_runs(x.runs, y.runs))
    if best == fft_cost:
        try:
            return _fft_blocked(x, y) if blocked else _fft(x, y)
        except (ArithmeticError, MemoryError):
            pass
    if x.nruns() * y.nruns() <= 20 * PAIR_BUDGET and pair_cost < shift_cost:
        return _pairwise_runs_chunked(x, y)
    return _shift_or(x, y)


def _pairwise_runs_chunked(x, y):
    xs, xe = x.runs
    step = max(1, PAIR_BUDGET // max(1, y.nruns()))
    acc_s, acc_e = [], []
    for i in range(0, len(xs), step):
        s, e = _pairwise_runs((xs[i:i + step], xe[i:i + step]), y.runs)
        acc_s.append(s)
        acc_e.append(e)
    return Packed(x.bound + y.bound, runs=_bits.merge_runs(np.concatenate(acc_s), np.concatenate(acc_e)))


def add_mod(xbits, ybits, n):
    """Sumset of two subsets of Z_n given as n-bit packed ints."""
    if xbits == 0 or ybits == 0:
        return 0
    mask = (1 << n) - 1
    kx, ky = xbits.bit_count(), ybits.bit_count()
    words = n // 64 + 1
    if min(kx, ky) * words * 3 <= SHIFT_BUDGET or 2 * n > _bits.FFT_MAX_LEN:
        small, big = (xbits, ybits) if kx <= ky else (ybits, xbits)
        acc = 0
        for m in _bits.bits_to_indices(small, n - 1).tolist():
            acc |= _bits.rotl(big, m, n, mask)
        return acc
    a = _bits.bits_to_bool(xbits, n - 1).astype(np.float64)
    b = a if xbits == ybits else _bits.bits_to_bool(ybits, n - 1).astype(np.float64)
    counts = _bits.cyclic_fft_counts(a, b, n)
    return _bits.bool_to_bits(counts > 0)
