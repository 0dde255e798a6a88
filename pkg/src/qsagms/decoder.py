"""Scalarized GF(4) message-passing decoders: BP4, MS, SMS and SAGMS.

All four variants share one flooding-schedule skeleton; they differ only in
the check-node magnitude rule:

    bp4    phi^-1( sum of phi(|L|) over the extrinsic set ),
           phi(x) = -ln tanh(x/2)
    ms     minimum extrinsic magnitude
    sms    alpha * minimum (fixed scaling)
    sagms  alpha_eff * minimum, with alpha_eff recomputed per check and
           iteration from the residual-syndrome ratio

One scalar LLR flows per edge.  The sign of every check-node output is
(-1)^(s_i) times the product of the extrinsic message signs, where s_i is
the *observed* syndrome bit; the residual bit enters only the sagms gain
boost.  Each iteration runs: hard decision from the previous check-to-qubit
messages, residual syndrome, early exit on all-zero, syndrome ratio, gains,
check-node update, qubit-node update.

Two qubit-node scalarizations are provided.  ``marginal`` (the default)
keeps per-Pauli log-beliefs and emits the commute/anticommute LLR relative
to each edge's own symbol; it is exact on cycle-free graphs, propagates
joint beliefs over all four Paulis, and is the mode that reproduces the
published frame-error-rate anchors.  ``additive`` adds scalar messages to
the prior, ignoring per-edge symbol differences (the textbook shorthand;
noticeably weaker on quantum codes).  In marginal mode the initial
qubit-to-check message is the marginal of the bare prior (the same rule
applied to an empty incoming set); in additive mode it is the prior LLR
itself.

Numerical policy (identical across variants): message magnitudes of exactly
zero propagate zero with positive sign; phi is evaluated at max(|x|, 1e-12)
and phi-domain sums are clamped to [1e-12, 50]; every updated LLR is
saturated to [-64, 64].
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .channel import ChannelPrior
from .code import SparseCheckMatrix, TannerGraph
from .pauli import residual_syndrome as _residual_syndrome
from .pauli import trace_inner

VARIANTS = ("bp4", "ms", "sms", "sagms")
VN_MODES = ("marginal", "additive")

#: LLR saturation bound applied after every update.
LLR_CLIP = 64.0
#: phi-domain clamps: argument floor and sum range before inversion.
PHI_ARG_FLOOR = 1e-12
PHI_SUM_MIN = 1e-12
PHI_SUM_MAX = 50.0

_LN2 = math.log(2.0)


@dataclass(frozen=True)
class GainParams:
    """Adaptive-gain parameters: ramp endpoints and unsatisfied-check boost.

    The stability constraint alpha_max * eta_unsat <= 1 keeps the effective
    gain at or below plain min-sum.  ``eta_unsat = 1`` (no boost) is allowed
    so that the degenerate configuration reduces exactly to fixed scaling.
    """

    alpha_min: float
    alpha_max: float
    eta_unsat: float

    def __post_init__(self):
        if not 0.0 < self.alpha_min <= self.alpha_max <= 1.0:
            raise ValueError(
                f"need 0 < alpha_min <= alpha_max <= 1, got "
                f"({self.alpha_min}, {self.alpha_max})"
            )
        if self.eta_unsat < 1.0:
            raise ValueError(f"eta_unsat must be >= 1, got {self.eta_unsat}")
        if self.alpha_max * self.eta_unsat > 1.0:
            raise ValueError(
                f"stability constraint alpha_max*eta_unsat <= 1 violated: "
                f"{self.alpha_max}*{self.eta_unsat} = "
                f"{self.alpha_max * self.eta_unsat}"
            )


@dataclass(frozen=True)
class DecoderConfig:
    """Variant selection plus iteration budget and qubit-update mode."""

    variant: str
    l_max: int = 8
    alpha: float | None = None
    gain: GainParams | None = None
    vn_mode: str = "marginal"

    def __post_init__(self):
        if self.variant not in VARIANTS:
            raise ValueError(f"variant must be one of {VARIANTS}, got {self.variant!r}")
        if self.vn_mode not in VN_MODES:
            raise ValueError(f"vn_mode must be one of {VN_MODES}, got {self.vn_mode!r}")
        if self.l_max < 1:
            raise ValueError("l_max must be at least 1")
        if self.variant == "sms":
            if self.alpha is None or not 0.0 < self.alpha <= 1.0:
                raise ValueError(f"sms requires alpha in (0, 1], got {self.alpha}")
        if self.variant == "sagms" and self.gain is None:
            raise ValueError("sagms requires GainParams")


@dataclass
class EdgeMessageState:
    """Per-edge message snapshot (canonical row-major edge order)."""

    vn_to_cn: np.ndarray
    cn_to_vn: np.ndarray
    iteration: int


@dataclass
class DecodeResult:
    """Outcome of one decode: estimate, convergence and per-iteration ratios."""

    success: bool
    e_hat: np.ndarray
    iterations_used: int
    gamma_trace: np.ndarray
    message_trace: list[EdgeMessageState] | None = None


@dataclass
class BatchDecodeResult:
    """Per-frame arrays for a batch decode (see ``decode_batch``)."""

    success: np.ndarray
    e_hat: np.ndarray
    iterations: np.ndarray
    gamma_traces: list[np.ndarray] | None = None
    message_trace: list[EdgeMessageState] | None = None


def phi_llr(x):
    """Gallager phi on positive arguments: -ln tanh(x/2), self-inverse.

    Evaluated as log1p(2/expm1(x)), which stays accurate both for small x
    (where the naive form loses digits) and large x (where tanh rounds
    to 1).
    """
    x = np.asarray(x, dtype=np.float64)
    return np.log1p(2.0 / np.expm1(x))


def syndrome_ratio(residual) -> float:
    """Fraction of unsatisfied checks in a residual syndrome."""
    residual = np.asarray(residual)
    if residual.size < 1:
        raise ValueError("residual syndrome must have at least one bit")
    return float(np.count_nonzero(residual)) / residual.size


def effective_gain(gamma: float, s_tilde_bit: int, p: GainParams) -> float:
    """Per-check adaptive gain: linear ramp in gamma plus unsatisfied boost."""
    if not 0.0 <= gamma <= 1.0:
        raise ValueError(f"gamma must lie in [0, 1], got {gamma}")
    base = p.alpha_max - (p.alpha_max - p.alpha_min) * gamma
    return base * p.eta_unsat if s_tilde_bit else base


def cn_update(variant: str, incoming, s_bit: int, gain: float = 1.0) -> float:
    """One check-node output from the extrinsic incoming messages.

    ``incoming`` excludes the target edge.  ``gain`` is the fixed alpha for
    sms or the effective alpha for sagms; bp4 and ms ignore it.
    """
    if variant not in VARIANTS:
        raise ValueError(f"unknown variant {variant!r}")
    incoming = np.asarray(incoming, dtype=np.float64)
    if incoming.size == 0:
        raise ValueError("check-node update needs at least one incoming message")
    sign = -1.0 if s_bit else 1.0
    sign *= float(np.prod(np.where(incoming < 0.0, -1.0, 1.0)))
    mags = np.abs(incoming)
    if variant == "bp4":
        total = float(np.sum(phi_llr(np.maximum(mags, PHI_ARG_FLOOR))))
        total = min(max(total, PHI_SUM_MIN), PHI_SUM_MAX)
        mag = float(phi_llr(total))
    else:
        mag = float(np.min(mags))
        if variant in ("sms", "sagms"):
            mag *= gain
    return float(np.clip(sign * mag, -LLR_CLIP, LLR_CLIP))


def _marginal_message(prior_llr_value, incoming, incoming_symbols, out_symbol):
    """Commute/anticommute LLR of one qubit relative to ``out_symbol``.

    Builds per-Pauli log-beliefs b(e) = [e != I]*L0 + sum of anticommuting
    incoming messages, then returns
    ln( sum_{e commutes} exp(-b(e)) / sum_{e anticommutes} exp(-b(e)) ).
    """
    b = {0: 0.0, 1: prior_llr_value, 2: prior_llr_value, 3: prior_llr_value}
    for msg, sym in zip(incoming, incoming_symbols):
        for e in (1, 2, 3):
            if trace_inner(e, int(sym)):
                b[e] += float(msg)
    commute = [0, int(out_symbol)]
    anti = [e for e in (1, 2, 3) if e not in commute]
    num = np.logaddexp(-b[commute[0]], -b[commute[1]])
    den = np.logaddexp(-b[anti[0]], -b[anti[1]])
    return float(num - den)


def vn_update(
    mode: str,
    prior: ChannelPrior,
    incoming,
    incoming_symbols=None,
    out_symbol: int | None = None,
) -> float:
    """One qubit-node output toward an edge, from the extrinsic incoming set.

    ``additive`` sums scalar messages onto the prior.  ``marginal`` needs the
    symbols of the incoming edges and of the outgoing edge.
    """
    if mode not in VN_MODES:
        raise ValueError(f"unknown vn mode {mode!r}")
    incoming = np.asarray(incoming, dtype=np.float64)
    if mode == "additive":
        out = prior.llr + float(np.sum(incoming))
    else:
        if incoming_symbols is None or out_symbol is None:
            raise ValueError("marginal mode needs incoming and outgoing symbols")
        out = _marginal_message(prior.llr, incoming, incoming_symbols, out_symbol)
    return float(np.clip(out, -LLR_CLIP, LLR_CLIP))


def hard_decision(prior: ChannelPrior, incoming, incoming_symbols) -> int:
    """Most plausible Pauli at one qubit from all its incoming messages.

    Minimizes m(e) = [e != I]*L0 + sum of anticommuting messages over
    e in {I, X, Z, Y}; ties break toward the smaller code (I < X < Z < Y).
    """
    metrics = [0.0, prior.llr, prior.llr, prior.llr]
    for msg, sym in zip(np.asarray(incoming, dtype=np.float64), incoming_symbols):
        for e in (1, 2, 3):
            if trace_inner(e, int(sym)):
                metrics[e] += float(msg)
    return int(np.argmin(metrics))


def _marginal_init(prior_llr_value: float) -> float:
    """Initial qubit-to-check message in marginal mode.

    Equals the marginal rule applied to an empty incoming set; independent
    of the edge symbol because the commuting set is always {I, S}.
    """
    return math.log1p(math.exp(-prior_llr_value)) + prior_llr_value - _LN2


class _Kernel:
    """Vectorized batch decoder over one immutable Tanner graph.

    All message arrays are (frames, edges) with edges in the canonical
    row-major order; per-check and per-qubit reductions use ``reduceat``
    over contiguous segments, so every frame's arithmetic is independent of
    the batch composition and of any worker partitioning.
    """

    def __init__(self, graph: TannerGraph):
        if graph.edge_count == 0:
            raise ValueError("graph has no edges")
        if (graph.cn_degrees == 0).any() or (graph.vn_degrees == 0).any():
            raise ValueError("graph has isolated checks or qubits")
        self.g = graph
        sym = graph.edge_sym
        sx = (sym & 1).astype(np.float64)
        sz = (sym >> 1).astype(np.float64)
        # anticommutation masks of candidate errors X, Z, Y vs edge symbols
        self.anti = {1: sz, 2: sx, 3: np.abs(sx - sz)}
        vo = graph.vn_order
        self.anti_v = {e: self.anti[e][vo] for e in (1, 2, 3)}
        self.sym_v = sym[vo]
        self.vn_of_edge_v = graph.edge_vn[vo]
        self.cn_ix = graph.cn_ptr[:-1]
        self.vn_ix = graph.vn_ptr[:-1]
        self.edge_index = np.arange(graph.edge_count, dtype=np.int64)

    def hard_decisions(self, cmsg: np.ndarray, l0: float) -> np.ndarray:
        """(B, n) Pauli codes minimizing the per-qubit decision metric."""
        cv = cmsg[:, self.g.vn_order]
        metrics = np.empty((cv.shape[0], 4, self.g.n), dtype=np.float64)
        metrics[:, 0, :] = 0.0
        for e in (1, 2, 3):
            metrics[:, e, :] = l0 + np.add.reduceat(
                cv * self.anti_v[e], self.vn_ix, axis=1
            )
        return np.argmin(metrics, axis=1).astype(np.uint8)

    def syndromes_of(self, e_hat: np.ndarray) -> np.ndarray:
        """(B, m) syndrome bits of per-frame error patterns."""
        codes = e_hat[:, self.g.edge_vn]
        sym = self.g.edge_sym
        t = ((codes & 1) & (sym >> 1)) ^ ((codes >> 1) & (sym & 1))
        parity = np.add.reduceat(t.astype(np.int64), self.cn_ix, axis=1) & 1
        return parity.astype(np.uint8)

    def cn_step(self, vmsg, syn_sign, cfg, gains):
        """Check-node update; ``gains`` is (B, m) for sagms, ignored otherwise."""
        g = self.g
        sgn = np.where(vmsg < 0.0, -1.0, 1.0)
        sign_prod = np.multiply.reduceat(sgn, self.cn_ix, axis=1)
        ext_sign = (syn_sign * sign_prod)[:, g.edge_cn] * sgn
        mags = np.abs(vmsg)
        if cfg.variant == "bp4":
            ph = phi_llr(np.maximum(mags, PHI_ARG_FLOOR))
            total = np.add.reduceat(ph, self.cn_ix, axis=1)
            ext = total[:, g.edge_cn] - ph
            np.clip(ext, PHI_SUM_MIN, PHI_SUM_MAX, out=ext)
            mag = phi_llr(ext)
        else:
            min1 = np.minimum.reduceat(mags, self.cn_ix, axis=1)
            min1_e = min1[:, g.edge_cn]
            cand = np.where(mags == min1_e, self.edge_index, g.edge_count)
            first = np.minimum.reduceat(cand, self.cn_ix, axis=1)
            is_first = self.edge_index == first[:, g.edge_cn]
            min2 = np.minimum.reduceat(
                np.where(is_first, np.inf, mags), self.cn_ix, axis=1
            )
            mag = np.where(is_first, min2[:, g.edge_cn], min1_e)
            if cfg.variant == "sms":
                mag = cfg.alpha * mag
            elif cfg.variant == "sagms":
                mag = gains[:, g.edge_cn] * mag
        return np.clip(ext_sign * mag, -LLR_CLIP, LLR_CLIP)

    def vn_step(self, cmsg, l0, cfg):
        """Qubit-node update; returns messages in canonical edge order."""
        g = self.g
        cv = cmsg[:, g.vn_order]
        if cfg.vn_mode == "additive":
            tot = np.add.reduceat(cv, self.vn_ix, axis=1)
            out = l0 + (tot[:, self.vn_of_edge_v] - cv)
        else:
            b = {}
            for e in (1, 2, 3):
                tot = np.add.reduceat(cv * self.anti_v[e], self.vn_ix, axis=1)
                b[e] = l0 + (tot[:, self.vn_of_edge_v] - self.anti_v[e] * cv)
            m_x = self.sym_v == 1
            m_y = self.sym_v == 3
            b_self = np.where(m_x, b[1], np.where(m_y, b[3], b[2]))
            b_a1 = np.where(m_x, b[2], b[1])
            b_a2 = np.where(m_y, b[2], b[3])
            out = np.logaddexp(0.0, -b_self) - np.logaddexp(-b_a1, -b_a2)
        np.clip(out, -LLR_CLIP, LLR_CLIP, out=out)
        return out[:, g.vn_inverse]


_KERNEL_CACHE: dict[int, _Kernel] = {}


def _kernel_for(graph: TannerGraph) -> _Kernel:
    k = _KERNEL_CACHE.get(id(graph))
    if k is None or k.g is not graph:
        k = _Kernel(graph)
        _KERNEL_CACHE.clear()
        _KERNEL_CACHE[id(graph)] = k
    return k


def decode_batch(
    graph: TannerGraph,
    syndromes: np.ndarray,
    prior: ChannelPrior,
    cfg: DecoderConfig,
    *,
    early_stop: bool = True,
    collect_gamma: bool = False,
    capture_messages: bool = False,
) -> BatchDecodeResult:
    """Decode a batch of syndromes against one shared graph.

    Frames are mutually independent: results are bit-identical for any
    partitioning of the same frames into batches.  ``early_stop=False``
    keeps iterating converged frames to ``l_max`` (reported success,
    iteration count and estimate still reflect the first all-zero
    residual); it exists for fixed-point inspection and the cycle-free
    oracle tests.  ``capture_messages`` records per-iteration message
    snapshots, including the otherwise-skipped final update; it is limited
    to single-frame batches.
    """
    ker = _kernel_for(graph)
    syndromes = np.asarray(syndromes, dtype=np.uint8)
    if syndromes.ndim != 2 or syndromes.shape[1] != graph.m:
        raise ValueError(f"syndromes must have shape (B, {graph.m})")
    b_total = syndromes.shape[0]
    if capture_messages and b_total != 1:
        # compaction would silently remap row 0 to a different frame
        raise ValueError("capture_messages requires a single-frame batch")
    l0 = prior.llr

    v0 = _marginal_init(l0) if cfg.vn_mode == "marginal" else l0
    v0 = float(np.clip(v0, -LLR_CLIP, LLR_CLIP))
    vmsg = np.full((b_total, graph.edge_count), v0, dtype=np.float64)
    cmsg = np.zeros((b_total, graph.edge_count), dtype=np.float64)
    syn = syndromes.copy()
    syn_sign = 1.0 - 2.0 * syn.astype(np.float64)

    success = np.zeros(b_total, dtype=bool)
    iterations = np.full(b_total, cfg.l_max, dtype=np.int64)
    e_hat_out = np.zeros((b_total, graph.n), dtype=np.uint8)
    recorded = np.zeros(b_total, dtype=bool)
    gamma_traces: list[list[float]] | None = (
        [[] for _ in range(b_total)] if collect_gamma else None
    )
    trace: list[EdgeMessageState] | None = [] if capture_messages else None

    active = np.arange(b_total)
    for ell in range(1, cfg.l_max + 1):
        e_hat = ker.hard_decisions(cmsg, l0)
        residual = syn ^ ker.syndromes_of(e_hat)
        unsat = residual.sum(axis=1)
        gamma = unsat / graph.m

        if gamma_traces is not None:
            for row, idx in enumerate(active):
                gamma_traces[idx].append(float(gamma[row]))

        zero = unsat == 0
        newly = zero & ~recorded[active]
        if newly.any():
            idx = active[newly]
            success[idx] = True
            iterations[idx] = ell
            e_hat_out[idx] = e_hat[newly]
            recorded[idx] = True

        if early_stop and zero.any():
            keep = ~zero
            active = active[keep]
            if active.size == 0:
                break
            vmsg = vmsg[keep]
            cmsg = cmsg[keep]
            syn = syn[keep]
            syn_sign = syn_sign[keep]
            e_hat = e_hat[keep]
            residual = residual[keep]
            gamma = gamma[keep]

        if ell == cfg.l_max:
            # failure estimate is the hard decision of the final iteration
            pending = ~recorded[active]
            if pending.any():
                e_hat_out[active[pending]] = e_hat[pending]
            if not capture_messages:
                break

        if cfg.variant == "sagms":
            p = cfg.gain
            base = p.alpha_max - (p.alpha_max - p.alpha_min) * gamma
            gains = base[:, None] * np.where(residual == 1, p.eta_unsat, 1.0)
        else:
            gains = None
        cmsg = ker.cn_step(vmsg, syn_sign, cfg, gains)
        vmsg = ker.vn_step(cmsg, l0, cfg)
        if trace is not None:
            trace.append(
                EdgeMessageState(
                    vn_to_cn=vmsg[0].copy(), cn_to_vn=cmsg[0].copy(), iteration=ell
                )
            )

    return BatchDecodeResult(
        success=success,
        e_hat=e_hat_out,
        iterations=iterations,
        gamma_traces=(
            [np.array(t) for t in gamma_traces] if gamma_traces is not None else None
        ),
        message_trace=trace,
    )


def decode(
    H: SparseCheckMatrix,
    graph: TannerGraph,
    s,
    prior: ChannelPrior,
    cfg: DecoderConfig,
    *,
    early_stop: bool = True,
    capture_messages: bool = False,
    trace_sink=None,
) -> DecodeResult:
    """Run the decoder on one syndrome.

    Successful results are re-verified against ``H`` (a reported success
    with nonzero residual would be an engine bug).  ``trace_sink``, if
    given, receives one dict per executed iteration with the iteration
    number, the syndrome ratio, an effective-gain summary and a coarse
    message-magnitude histogram; suitable for line-delimited serialization.
    """
    s = np.asarray(s, dtype=np.uint8)
    if s.shape != (graph.m,):
        raise ValueError(f"syndrome must have length m={graph.m}")
    want_trace = capture_messages or trace_sink is not None
    batch = decode_batch(
        graph,
        s[None, :],
        prior,
        cfg,
        early_stop=early_stop,
        collect_gamma=True,
        capture_messages=want_trace,
    )
    gamma_trace = batch.gamma_traces[0]
    result = DecodeResult(
        success=bool(batch.success[0]),
        e_hat=batch.e_hat[0],
        iterations_used=int(batch.iterations[0]),
        gamma_trace=gamma_trace,
        message_trace=batch.message_trace if capture_messages else None,
    )
    if result.success and _residual_syndrome(s, H, result.e_hat).any():
        raise RuntimeError(
            "internal inconsistency: reported success with nonzero residual"
        )
    if trace_sink is not None and batch.message_trace:
        for state in batch.message_trace:
            ell = state.iteration
            gamma = float(gamma_trace[ell - 1]) if ell - 1 < len(gamma_trace) else 0.0
            if cfg.variant == "sagms":
                gain_summary = {
                    "min": effective_gain(gamma, 0, cfg.gain),
                    "max": effective_gain(gamma, 1, cfg.gain),
                }
            elif cfg.variant == "sms":
                gain_summary = {"min": cfg.alpha, "max": cfg.alpha}
            else:
                gain_summary = {"min": 1.0, "max": 1.0}
            counts, edges = np.histogram(
                np.abs(state.vn_to_cn), bins=16, range=(0.0, LLR_CLIP)
            )
            trace_sink(
                {
                    "iteration": ell,
                    "gamma": gamma,
                    "alpha_eff": gain_summary,
                    "magnitude_hist": {
                        "bin_edges": edges.tolist(),
                        "counts": counts.tolist(),
                    },
                }
            )
    return result
