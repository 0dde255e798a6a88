"""Independent oracles used to cross-check the production code paths.

Everything here is deliberately written against dense representations and
brute-force enumeration, sharing no machinery with the package internals:
dense GF(2) bit-plane syndrome/orthogonality/rank, polynomial-gcd dimension
counting for generalized bicycle codes, exhaustive 4^n posterior
enumeration for small codes, and a scalar reference decoder composed from
the package's per-node update functions (to cross-check the vectorized
kernel's composition).
"""

from __future__ import annotations

import itertools

import numpy as np

from qsagms.channel import ChannelPrior
from qsagms.decoder import (
    DecoderConfig,
    cn_update,
    effective_gain,
    hard_decision,
    syndrome_ratio,
    vn_update,
    _marginal_init,
)
from qsagms.pauli import trace_inner


# -- dense GF(2) bit-plane oracles ------------------------------------------


def dense_planes(H) -> tuple[np.ndarray, np.ndarray]:
    """(m, n) X and Z bit planes of a sparse check matrix."""
    hx = np.zeros((H.m, H.n), dtype=np.uint8)
    hz = np.zeros((H.m, H.n), dtype=np.uint8)
    for i, row in enumerate(H.rows):
        for j, sym in row:
            hx[i, j] = sym & 1
            hz[i, j] = sym >> 1
    return hx, hz


def syndrome_dense(H, e) -> np.ndarray:
    """Syndrome via dense symplectic matrix-vector product over GF(2)."""
    hx, hz = dense_planes(H)
    e = np.asarray(e, dtype=np.uint8)
    ex, ez = e & 1, e >> 1
    return ((hx @ ez + hz @ ex) % 2).astype(np.uint8)


def orthogonal_dense(H) -> bool:
    """Row commutation via the dense symplectic Gram matrix."""
    hx, hz = dense_planes(H)
    gram = (hx.astype(np.int64) @ hz.T + hz.astype(np.int64) @ hx.T) % 2
    return not gram.any()


def gf2_rank_dense(M: np.ndarray) -> int:
    """GF(2) rank by dense Gaussian elimination (independent of the packed
    integer elimination used in production)."""
    M = (np.asarray(M) % 2).astype(np.uint8).copy()
    rows, cols = M.shape
    r = 0
    for c in range(cols):
        pivots = np.nonzero(M[r:, c])[0]
        if pivots.size == 0:
            continue
        p = r + int(pivots[0])
        M[[r, p]] = M[[p, r]]
        elim = np.nonzero(M[:, c])[0]
        for i in elim:
            if i != r:
                M[i] ^= M[r]
        r += 1
        if r == rows:
            break
    return r


def code_dimension_dense(H) -> int:
    """k = n - rank of the dense [X | Z] expansion."""
    hx, hz = dense_planes(H)
    return H.n - gf2_rank_dense(np.hstack([hx, hz]))


# -- polynomial oracle for generalized bicycle dimensions --------------------


def _gf2_poly_mod(a: int, b: int) -> int:
    db = b.bit_length()
    while a and a.bit_length() >= db:
        a ^= b << (a.bit_length() - db)
    return a


def _gf2_poly_gcd(a: int, b: int) -> int:
    while b:
        a, b = b, _gf2_poly_mod(a, b)
    return a


def gb_dimension_from_gcd(ell: int, a_exps, b_exps) -> int:
    """k = 2 * deg gcd(a(x), b(x), x^ell - 1) over GF(2)."""
    a = sum(1 << e for e in a_exps)
    b = sum(1 << e for e in b_exps)
    ring = (1 << ell) | 1
    g = _gf2_poly_gcd(_gf2_poly_gcd(a, b), ring)
    return 2 * (g.bit_length() - 1)


# -- exhaustive posterior enumeration (small n) -------------------------------


def _all_patterns(n: int) -> np.ndarray:
    """(4^n, n) array of all Pauli code patterns."""
    return np.array(list(itertools.product(range(4), repeat=n)), dtype=np.uint8)


def _pattern_weights(patterns: np.ndarray, eps0: float) -> np.ndarray:
    wt = (patterns != 0).sum(axis=1)
    n = patterns.shape[1]
    return (1.0 - eps0) ** (n - wt) * (eps0 / 3.0) ** wt


def _pattern_syndromes(H, patterns: np.ndarray) -> np.ndarray:
    hx, hz = dense_planes(H)
    ex, ez = patterns & 1, patterns >> 1
    return ((ez @ hx.T.astype(np.int64) + ex @ hz.T.astype(np.int64)) % 2).astype(
        np.uint8
    )


def posterior_marginals(H, s, eps0: float) -> np.ndarray:
    """(n, 4) per-qubit posterior over {I, X, Z, Y} given the syndrome."""
    patterns = _all_patterns(H.n)
    match = (_pattern_syndromes(H, patterns) == np.asarray(s, dtype=np.uint8)).all(
        axis=1
    )
    pats = patterns[match]
    w = _pattern_weights(pats, eps0)
    marg = np.zeros((H.n, 4))
    for j in range(H.n):
        np.add.at(marg[j], pats[:, j], w)
    return marg / w.sum()


def map_decisions(H, s, eps0: float) -> np.ndarray:
    """Per-qubit maximum-posterior Pauli, ties toward the smaller code."""
    marg = posterior_marginals(H, s, eps0)
    return np.argmax(marg, axis=1).astype(np.uint8)


def brute_vn_message(H, s, eps0: float, check: int, qubit: int) -> float:
    """Exact qubit-to-check message on a cycle-free code.

    LLR that the qubit's error commutes with its symbol on edge
    (check, qubit), under the prior conditioned on every *other* check's
    syndrome bit.
    """
    sym = dict(H.rows[check])[qubit]
    patterns = _all_patterns(H.n)
    syndromes = _pattern_syndromes(H, patterns)
    others = [i for i in range(H.m) if i != check]
    s = np.asarray(s, dtype=np.uint8)
    match = (syndromes[:, others] == s[others]).all(axis=1)
    pats = patterns[match]
    w = _pattern_weights(pats, eps0)
    anti = np.array([trace_inner(int(e), sym) for e in range(4)])[pats[:, qubit]]
    num = w[anti == 0].sum()
    den = w[anti == 1].sum()
    return float(np.log(num) - np.log(den))


# -- scalar reference decoder --------------------------------------------------


def reference_decode(H, s, prior: ChannelPrior, cfg: DecoderConfig, record=None):
    """Flooding decoder written as plain loops over the spec's node updates.

    Returns (success, e_hat, iterations, gamma_trace).  If ``record`` is a
    list, (vn_to_cn, cn_to_vn) message dictionaries keyed by (check, qubit)
    are appended after each iteration's updates.
    """
    edges = [(i, j, sym) for i, row in enumerate(H.rows) for j, sym in row]
    cn_members = {i: [] for i in range(H.m)}
    vn_members = {j: [] for j in range(H.n)}
    for idx, (i, j, _) in enumerate(edges):
        cn_members[i].append(idx)
        vn_members[j].append(idx)

    if cfg.vn_mode == "marginal":
        v0 = _marginal_init(prior.llr)
    else:
        v0 = prior.llr
    vmsg = {idx: v0 for idx in range(len(edges))}
    cmsg = {idx: 0.0 for idx in range(len(edges))}
    s = np.asarray(s, dtype=np.uint8)

    gamma_trace = []
    e_hat = np.zeros(H.n, dtype=np.uint8)
    for ell in range(1, cfg.l_max + 1):
        e_hat = np.zeros(H.n, dtype=np.uint8)
        for j in range(H.n):
            incoming = [cmsg[k] for k in vn_members[j]]
            syms = [edges[k][2] for k in vn_members[j]]
            e_hat[j] = hard_decision(prior, incoming, syms)
        residual = s ^ syndrome_dense(H, e_hat)
        gamma = syndrome_ratio(residual)
        gamma_trace.append(gamma)
        if not residual.any():
            return True, e_hat, ell, gamma_trace

        new_cmsg = {}
        for i in range(H.m):
            for k in cn_members[i]:
                incoming = [vmsg[k2] for k2 in cn_members[i] if k2 != k]
                if cfg.variant == "sagms":
                    gain = effective_gain(gamma, int(residual[i]), cfg.gain)
                elif cfg.variant == "sms":
                    gain = cfg.alpha
                else:
                    gain = 1.0
                new_cmsg[k] = cn_update(cfg.variant, incoming, int(s[i]), gain)
        cmsg = new_cmsg

        new_vmsg = {}
        for j in range(H.n):
            for k in vn_members[j]:
                others = [k2 for k2 in vn_members[j] if k2 != k]
                incoming = [cmsg[k2] for k2 in others]
                syms = [edges[k2][2] for k2 in others]
                new_vmsg[k] = vn_update(
                    cfg.vn_mode, prior, incoming, syms, edges[k][2]
                )
        vmsg = new_vmsg
        if record is not None:
            record.append(
                (
                    {(edges[k][0], edges[k][1]): v for k, v in vmsg.items()},
                    {(edges[k][0], edges[k][1]): v for k, v in cmsg.items()},
                )
            )

    # failure: the estimate is the hard decision made in the final iteration
    return False, e_hat, cfg.l_max, gamma_trace
