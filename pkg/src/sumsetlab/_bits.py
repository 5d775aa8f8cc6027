"""Low-level bitset helpers shared by the engines.

Sets are packed into Python ints (bit k set <=> k is a member), which gives
word-packed shift/or/and in C.  Bulk conversion to and from numpy goes through
little-endian byte buffers.
"""
import numpy as np
from scipy import fft as sfft

# unpackbits materialises one byte per bit; stay below this per chunk
_CHUNK_BYTES = 1 << 22

# largest FFT length we are willing to allocate (complex buffers ~ 8 bytes/bit)
FFT_MAX_LEN = 1 << 26


def nbytes_for(bound):
    return bound // 8 + 1


def bits_to_bytes(bits, bound):
    return np.frombuffer(bits.to_bytes(nbytes_for(bound), "little"), dtype=np.uint8)


def bytes_to_bits(buf):
    return int.from_bytes(np.ascontiguousarray(buf, dtype=np.uint8).tobytes(), "little")


def bits_to_indices(bits, bound):
    """Sorted int64 array of the set bits of ``bits`` (all below ``bound + 1``)."""
    if bits == 0:
        return np.zeros(0, dtype=np.int64)
    buf = bits_to_bytes(bits, bound)
    out = []
    for off in range(0, len(buf), _CHUNK_BYTES):
        chunk = np.unpackbits(buf[off:off + _CHUNK_BYTES], bitorder="little")
        nz = np.flatnonzero(chunk)
        if len(nz):
            out.append(nz.astype(np.int64) + 8 * off)
    return np.concatenate(out) if out else np.zeros(0, dtype=np.int64)


def bits_to_bool(bits, bound):
    buf = bits_to_bytes(bits, bound)
    return np.unpackbits(buf, bitorder="little")[: bound + 1].astype(bool)


def bool_to_bits(arr):
    return bytes_to_bits(np.packbits(np.asarray(arr, dtype=bool), bitorder="little"))


def indices_to_bits(idx, bound):
    """Pack non-negative indices (duplicates allowed) into an int."""
    idx = np.asarray(idx, dtype=np.int64)
    if idx.size == 0:
        return 0
    if bound < (1 << 27):
        arr = np.zeros(bound + 1, dtype=bool)
        arr[idx] = True
        return bool_to_bits(arr)
    return bytes_to_bits(pack_indices(idx, bound))


def pack_indices(idx, bound):
    """Packed uint8 buffer with the given bits set; avoids a bool array of size bound."""
    idx = np.unique(np.asarray(idx, dtype=np.int64))
    packed = np.zeros(nbytes_for(bound), dtype=np.uint8)
    if idx.size == 0:
        return packed
    byte = idx >> 3
    val = (np.uint8(1) << (idx & 7).astype(np.uint8)).astype(np.uint8)
    starts = np.flatnonzero(np.r_[True, byte[1:] != byte[:-1]])
    packed[byte[starts]] = np.bitwise_or.reduceat(val, starts)
    return packed


def runs_of_indices(idx):
    """Maximal runs of consecutive integers in a sorted index array -> (starts, ends)."""
    idx = np.asarray(idx, dtype=np.int64)
    if idx.size == 0:
        return np.zeros(0, dtype=np.int64), np.zeros(0, dtype=np.int64)
    brk = np.flatnonzero(np.diff(idx) != 1)
    starts = np.r_[idx[0], idx[brk + 1]]
    ends = np.r_[idx[brk], idx[-1]]
    return starts, ends


def runs_to_bits(starts, ends, bound):
    """Pack inclusive runs [starts[i], ends[i]] into an int."""
    if len(starts) == 0:
        return 0
    if bound < (1 << 27):
        delta = np.zeros(bound + 2, dtype=np.int32)
        np.add.at(delta, starts, 1)
        np.add.at(delta, ends + 1, -1)
        return bool_to_bits(np.cumsum(delta[:-1]) > 0)
    packed = np.zeros(nbytes_for(bound), dtype=np.uint8)
    for s, e in zip(starts.tolist(), ends.tolist()):
        _fill_packed(packed, s, e)
    return bytes_to_bits(packed)


def _fill_packed(packed, s, e):
    sb, eb = s >> 3, e >> 3
    if sb == eb:
        packed[sb] |= ((0xFF << (s & 7)) & (0xFF >> (7 - (e & 7)))) & 0xFF
        return
    packed[sb] |= (0xFF << (s & 7)) & 0xFF
    packed[sb + 1:eb] = 0xFF
    packed[eb] |= 0xFF >> (7 - (e & 7))


def merge_runs(starts, ends):
    """Union of inclusive intervals (unsorted, overlapping or adjacent ok)."""
    if len(starts) == 0:
        return starts, ends
    order = np.argsort(starts, kind="stable")
    s = starts[order]
    e = ends[order]
    reach = np.maximum.accumulate(e)
    # a new run begins where the start is beyond everything seen so far (+1 merges adjacency)
    new = np.r_[True, s[1:] > reach[:-1] + 1]
    grp = np.cumsum(new) - 1
    out_s = s[new]
    out_e = np.zeros(len(out_s), dtype=np.int64)
    np.maximum.at(out_e, grp, e)
    return out_s, out_e


def fft_counts(a, b, length=None):
    """Exact integer convolution of two non-negative integer vectors via real FFT.

    Raises ArithmeticError if rounding is not safe (residual >= 0.25).
    """
    n = len(a) + len(b) - 1 if length is None else length
    size = sfft.next_fast_len(n, real=True)
    if size > FFT_MAX_LEN:
        raise MemoryError(f"FFT length {size} exceeds {FFT_MAX_LEN}")
    fa = sfft.rfft(np.asarray(a, dtype=np.float64), size)
    if b is a:
        fa *= fa
    else:
        fa *= sfft.rfft(np.asarray(b, dtype=np.float64), size)
    conv = sfft.irfft(fa, size)[:n]
    del fa
    rounded = np.rint(conv)
    if rounded.size and np.max(np.abs(conv - rounded)) >= 0.25:
        raise ArithmeticError("FFT convolution lost integrality")
    return rounded.astype(np.int64)


def cyclic_fft_counts(a, b, n):
    """Exact cyclic convolution mod n of two length-n 0/1 vectors."""
    lin = fft_counts(a, b)
    out = lin[:n].copy()
    out[: len(lin) - n] += lin[n:]
    return out


def rotl(bits, k, n, mask):
    """Rotate an n-bit set left by k (i.e. add k modulo n)."""
    k %= n
    if k == 0:
        return bits
    return ((bits << k) | (bits >> (n - k))) & mask
