"""Monte-Carlo simulation of the two-phase relaying protocol.

One round: both users transmit simultaneously (multiple-access phase), the
relay jointly ML-decodes the pair, quantizes the fade state to pick a
denoising map, and broadcasts the map's cluster label over N_t channel
uses; each user inverts the label with its own symbol to recover the other
user's data.

Channel conventions: unit-energy constellations, relay noise CN(0, 1), so
SNR_iR = |H_i|^2 in linear scale.  The broadcast links mirror the
multiple-access SNRs per user.
"""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass

import numpy as np

from .clustering import ClusterMap, MapLibrary, broadcast_length
from .psk import SchemePair
from .quantizer import classify_fades, _KIND_SFS
from .sfs import SingularFadeState

__all__ = [
    "AWGN_RANDOM_PHASE",
    "RAYLEIGH_BLOCK",
    "ChannelModel",
    "SimConfig",
    "SimResult",
    "ma_phase_decode",
    "relay_map_apply",
    "map_indices_for_fades",
    "bc_phase",
    "label_to_symbols",
    "symbols_to_label",
    "user_decode",
    "simulate",
    "sweep",
]

AWGN_RANDOM_PHASE = "awgn_random_phase"
RAYLEIGH_BLOCK = "rayleigh_block"

_KIND_ALIASES = {
    "awgn": AWGN_RANDOM_PHASE,
    "awgn_random_phase": AWGN_RANDOM_PHASE,
    "rayleigh": RAYLEIGH_BLOCK,
    "rayleigh_block": RAYLEIGH_BLOCK,
}

_CHUNK_BLOCKS = 1 << 16
_MASK64 = (1 << 64) - 1

# Philox stream tags, one independent stream per randomness source per chunk.
_TAG_FADE = 0
_TAG_BITS = 1
_TAG_MA_NOISE = 2
_TAG_BC_FADE = 3
_TAG_BC_NOISE = 4


@dataclass(frozen=True)
class ChannelModel:
    kind: str
    snr_ar_db: float
    snr_br_db: float
    block_length: int = 1

    def __post_init__(self):
        kind = _KIND_ALIASES.get(self.kind)
        if kind is None:
            raise ValueError(f"unknown channel kind {self.kind!r}")
        object.__setattr__(self, "kind", kind)
        if self.block_length < 1:
            raise ValueError("block_length must be positive")


@dataclass(frozen=True)
class SimConfig:
    scheme: SchemePair
    channel: ChannelModel
    library: MapLibrary
    max_maps_used: int | None = None
    symbols: int = 100_000
    seed: int = 0

    def __post_init__(self):
        if self.symbols < 1:
            raise ValueError("symbols must be >= 1")
        if self.max_maps_used is not None and not (
            1 <= self.max_maps_used <= len(self.library.maps)
        ):
            raise ValueError("max_maps_used must be in [1, number of maps]")


@dataclass(frozen=True)
class SimResult:
    rer: float
    ber_ab: float
    ber_ba: float
    ber_avg: float
    counts: dict

    @staticmethod
    def from_counts(scheme: SchemePair, counts: dict) -> "SimResult":
        lam1 = scheme.user_a.bits_per_symbol
        lam2 = scheme.user_b.bits_per_symbol
        n = counts["symbols"]
        rer = counts["relay_errors"] / n
        ber_ab = counts["bit_errors_ab"] / counts["bits_ab"]
        ber_ba = counts["bit_errors_ba"] / counts["bits_ba"]
        ber_avg = (lam1 * ber_ab + lam2 * ber_ba) / (lam1 + lam2)
        return SimResult(rer=rer, ber_ab=ber_ab, ber_ba=ber_ba,
                         ber_avg=ber_avg, counts=counts)


def _stream(seed: int, chunk: int, tag: int) -> np.random.Generator:
    key = np.array([seed & _MASK64, (chunk * 16 + tag) & _MASK64], dtype=np.uint64)
    return np.random.Generator(np.random.Philox(key=key))


def _cn(rng: np.random.Generator, shape, variance: float) -> np.ndarray:
    scale = math.sqrt(variance / 2.0)
    return scale * (rng.standard_normal(shape) + 1j * rng.standard_normal(shape))


def ma_phase_decode(y, h_a, h_b, scheme: SchemePair):
    """Joint ML estimate of the transmitted pair from the relay observation.

    Accepts scalars or broadcastable arrays; ties resolve to the lowest
    (index_a, index_b).
    """
    s1 = scheme.user_a.array()
    s2 = scheme.user_b.array()
    y_arr, h_a_arr, h_b_arr = np.broadcast_arrays(
        np.asarray(y, dtype=complex),
        np.asarray(h_a, dtype=complex),
        np.asarray(h_b, dtype=complex),
    )
    grid1 = np.repeat(s1, scheme.m2)
    grid2 = np.tile(s2, scheme.m1)
    dist = np.abs(
        y_arr[..., None]
        - h_a_arr[..., None] * grid1
        - h_b_arr[..., None] * grid2
    )
    flat = np.argmin(dist, axis=-1)
    a_idx = flat // scheme.m2
    b_idx = flat % scheme.m2
    if np.isscalar(y) and np.isscalar(h_a) and np.isscalar(h_b):
        return int(a_idx), int(b_idx)
    return a_idx, b_idx


def _coverage_first(library: MapLibrary, max_maps: int | None) -> np.ndarray:
    """First usable map index per nonzero SFS (enumeration order); SFS whose
    covering maps are all excluded fall back to map 0."""
    limit = len(library.maps) if max_maps is None else max_maps
    first = []
    for s, cov in zip(library.sfs_list, library.coverage):
        if s.is_origin:
            continue
        first.append(next((mi for mi in cov if mi < limit), 0))
    return np.asarray(first, dtype=int)


def map_indices_for_fades(ws, library: MapLibrary, max_maps: int | None = None):
    """Library map index chosen for each fade value.

    SFS-region fades use the first map removing their SFS; CI-region fades
    use the map of the nearest nonzero SFS.
    """
    scheme = library.scheme
    kinds, sidx, nearest = classify_fades(ws, scheme)
    first = _coverage_first(library, max_maps)
    if first.size != len(library.sfs_list) - 1:  # pragma: no cover
        raise AssertionError("library SFS list does not match scheme enumeration")
    return np.where(kinds == _KIND_SFS, first[sidx], first[nearest])


def relay_map_apply(pair, fs, library: MapLibrary, max_maps: int | None = None) -> int:
    """Cluster label the relay broadcasts for a decoded pair at fade fs."""
    w = fs.value if hasattr(fs, "value") else complex(fs)
    idx = int(map_indices_for_fades(np.array([w]), library, max_maps)[0])
    a, b = pair
    return int(library.maps[idx].cells[b, a])


def label_to_symbols(label: int, m: ClusterMap) -> tuple[int, ...]:
    """Serialize a label into broadcast symbol indices, natural binary,
    MSB first, bits-per-symbol of the smaller constellation per chunk."""
    lam2 = m.scheme.user_b.bits_per_symbol
    nt = broadcast_length(m)
    return tuple((label >> (lam2 * (nt - 1 - t))) & (m.scheme.m2 - 1)
                 for t in range(nt))


def symbols_to_label(indices, m: ClusterMap) -> int:
    lam2 = m.scheme.user_b.bits_per_symbol
    label = 0
    for c in indices:
        label = (label << lam2) | int(c)
    return label


def bc_phase(label: int, m: ClusterMap, channels, noise) -> tuple[int, int]:
    """Broadcast a label and recover it at both users.

    channels and noise each hold one per-transmission sequence per user
    ((user A, user B), length N_t); every transmission is ML-decoded
    independently and the label reassembled from the decoded chunks.
    """
    if not 0 <= label < m.label_count:
        raise ValueError("label out of range for map")
    s2 = m.scheme.user_b.array()
    nt = broadcast_length(m)
    sent = label_to_symbols(label, m)
    out = []
    for gains, zs in zip(channels, noise):
        gains = np.broadcast_to(np.asarray(gains, dtype=complex), (nt,))
        zs = np.broadcast_to(np.asarray(zs, dtype=complex), (nt,))
        y = gains * s2[np.asarray(sent)] + zs
        dec = np.argmin(np.abs(y[:, None] - gains[:, None] * s2[None, :]), axis=1)
        out.append(symbols_to_label(dec, m))
    return out[0], out[1]


def user_decode(own_symbol_index: int, label: int, m: ClusterMap, user: str) -> int:
    """Recover the other user's symbol index from a label; -1 when the label
    matches no cell consistent with the known own symbol."""
    if user not in ("A", "B"):
        raise ValueError("user must be 'A' or 'B'")
    if not 0 <= label < m.label_count:
        return -1
    if user == "B":
        return int(m.inverse_by_row[own_symbol_index, label])
    return int(m.inverse_by_col[own_symbol_index, label])


def _popcounts(n: int) -> np.ndarray:
    return np.array([bin(i).count("1") for i in range(n)], dtype=int)


def simulate(config: SimConfig) -> SimResult:
    """Run the full protocol for config.symbols MA uses.

    Fades are drawn per block of channel.block_length symbols; all
    randomness comes from counter-based streams keyed by (seed, chunk, tag)
    so results are reproducible and schedule-independent.
    """
    scheme = config.scheme
    ch = config.channel
    lib = config.library
    if lib.scheme.m1 != scheme.m1 or lib.scheme.m2 != scheme.m2:
        raise ValueError("library scheme does not match config scheme")
    m1, m2 = scheme.m1, scheme.m2
    lam1 = scheme.user_a.bits_per_symbol
    lam2 = scheme.user_b.bits_per_symbol
    s1 = scheme.user_a.array()
    s2 = scheme.user_b.array()
    pop1 = _popcounts(m1)
    pop2 = _popcounts(m2)

    amp_a = 10.0 ** (ch.snr_ar_db / 20.0)
    amp_b = 10.0 ** (ch.snr_br_db / 20.0)
    var_a = 10.0 ** (ch.snr_ar_db / 10.0)
    var_b = 10.0 ** (ch.snr_br_db / 10.0)

    bl = ch.block_length
    n_blocks = -(-config.symbols // bl)
    cells_stack = np.stack([m.cells for m in lib.maps])
    inv_row_stack = [m.inverse_by_row for m in lib.maps]
    inv_col_stack = [m.inverse_by_col for m in lib.maps]
    nts = [broadcast_length(m) for m in lib.maps]
    grid1 = np.repeat(s1, m2)
    grid2 = np.tile(s2, m1)

    relay_errors = 0
    bit_errors_ab = 0
    bit_errors_ba = 0

    for chunk, lo in enumerate(range(0, n_blocks, _CHUNK_BLOCKS)):
        nb = min(_CHUNK_BLOCKS, n_blocks - lo)
        reps = np.full(nb, bl, dtype=int)
        if lo + nb == n_blocks:
            reps[-1] = config.symbols - bl * (n_blocks - 1)
        ns = int(reps.sum())

        rng_f = _stream(config.seed, chunk, _TAG_FADE)
        if ch.kind == AWGN_RANDOM_PHASE:
            h_a = np.full(nb, amp_a, dtype=complex)
            theta = rng_f.uniform(0.0, 2.0 * math.pi, nb)
            h_b = amp_b * np.exp(1j * theta)
        else:
            h_a = _cn(rng_f, nb, var_a)
            h_b = _cn(rng_f, nb, var_b)
        ws = h_b / h_a
        map_idx = map_indices_for_fades(ws, lib, config.max_maps_used)

        sym_block = np.repeat(np.arange(nb), reps)
        h_a_s = h_a[sym_block]
        h_b_s = h_b[sym_block]
        map_s = map_idx[sym_block]

        rng_b = _stream(config.seed, chunk, _TAG_BITS)
        a_true = rng_b.integers(0, m1, ns)
        b_true = rng_b.integers(0, m2, ns)

        rng_n = _stream(config.seed, chunk, _TAG_MA_NOISE)
        y = h_a_s * s1[a_true] + h_b_s * s2[b_true] + _cn(rng_n, ns, 1.0)

        dist = np.abs(y[:, None] - h_a_s[:, None] * grid1 - h_b_s[:, None] * grid2)
        flat = np.argmin(dist, axis=1)
        a_hat = flat // m2
        b_hat = flat % m2

        label_true = cells_stack[map_s, b_true, a_true]
        label_hat = cells_stack[map_s, b_hat, a_hat]
        relay_errors += int(np.count_nonzero(label_hat != label_true))

        rng_bf = _stream(config.seed, chunk, _TAG_BC_FADE)
        rng_bn = _stream(config.seed, chunk, _TAG_BC_NOISE)
        for mi in np.unique(map_s):
            sel = map_s == mi
            n_sel = int(np.count_nonzero(sel))
            nt = nts[mi]
            k = lib.maps[mi].label_count
            lab = label_hat[sel]
            shifts = lam2 * (nt - 1 - np.arange(nt))
            sent = (lab[:, None] >> shifts[None, :]) & (m2 - 1)

            if ch.kind == AWGN_RANDOM_PHASE:
                g_a = np.full((n_sel, nt), amp_a, dtype=complex)
                g_b = np.full((n_sel, nt), amp_b, dtype=complex)
            else:
                g_a = _cn(rng_bf, (n_sel, nt), var_a)
                g_b = _cn(rng_bf, (n_sel, nt), var_b)
            z_a = _cn(rng_bn, (n_sel, nt), 1.0)
            z_b = _cn(rng_bn, (n_sel, nt), 1.0)

            x_bc = s2[sent]
            dec_a = np.argmin(
                np.abs((g_a * x_bc + z_a)[:, :, None] - g_a[:, :, None] * s2), axis=2
            )
            dec_b = np.argmin(
                np.abs((g_b * x_bc + z_b)[:, :, None] - g_b[:, :, None] * s2), axis=2
            )
            lab_a = (dec_a << shifts[None, :]).sum(axis=1)
            lab_b = (dec_b << shifts[None, :]).sum(axis=1)

            a_own = a_true[sel]
            b_own = b_true[sel]
            ok_a = (lab_a >= 0) & (lab_a < k)
            ok_b = (lab_b >= 0) & (lab_b < k)
            b_dec = np.where(ok_a, inv_col_stack[mi][a_own, np.where(ok_a, lab_a, 0)], -1)
            a_dec = np.where(ok_b, inv_row_stack[mi][b_own, np.where(ok_b, lab_b, 0)], -1)

            err_a_bits = np.where(a_dec < 0, lam1, pop1[np.where(a_dec < 0, 0, a_dec) ^ a_own])
            err_b_bits = np.where(b_dec < 0, lam2, pop2[np.where(b_dec < 0, 0, b_dec) ^ b_own])
            bit_errors_ab += int(err_a_bits.sum())
            bit_errors_ba += int(err_b_bits.sum())

    counts = {
        "symbols": config.symbols,
        "relay_errors": relay_errors,
        "bit_errors_ab": bit_errors_ab,
        "bits_ab": lam1 * config.symbols,
        "bit_errors_ba": bit_errors_ba,
        "bits_ba": lam2 * config.symbols,
    }
    return SimResult.from_counts(scheme, counts)


def _point_seed(seed: int, idx: int) -> int:
    ss = np.random.SeedSequence(entropy=(seed & _MASK64, idx))
    return int(ss.generate_state(1, dtype=np.uint64)[0])


def sweep(config: SimConfig, snr_ar_values) -> list[tuple[float, SimResult]]:
    """Independent simulate runs over SNR_AR points with derived seeds."""
    values = list(snr_ar_values)
    if not values:
        raise ValueError("snr_ar_values must be nonempty")
    out = []
    for i, snr in enumerate(values):
        channel = dataclasses.replace(config.channel, snr_ar_db=float(snr))
        point = dataclasses.replace(
            config, channel=channel, seed=_point_seed(config.seed, i)
        )
        out.append((float(snr), simulate(point)))
    return out
