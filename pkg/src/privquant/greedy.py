"""Greedy agglomerative quantization for the three privacy objectives.

Three procedures share one mechanic: start from the singleton quantization
and repeatedly fuse two clusters, steering by a Lagrangian that trades the
privacy objective against ``lambda`` times the utility:

* ``algorithm1_min_l0``        -- minimize maximal leakage L0. Each outer
  iteration takes every cluster whose conditional range is smallest and
  merges it with the partner that keeps utility highest, then accepts or
  rejects the whole round on the Lagrangian drop.
* ``algorithm2_min_istar``     -- minimize maximin information. Only pairs
  lying in different confusability components are candidates (merging
  inside a component cannot reduce the component count); each accepted
  merge fuses exactly two components.
* ``algorithm3_l0_zero_istar`` -- minimize L0 subject to zero maximin
  information: same component-driven scaffolding, but the pair minimizing
  the Lagrangian change is taken unconditionally until one component
  remains, so the output is always perfectly indistinguishable.

All reported Lagrangians and deltas are in bits, and runs are fully
deterministic: every argmin/argmax is tie-broken down to cluster ids.

Merge acceptance in ``algorithm2_min_istar`` weighs the component-count
drop on a decimal-log scale against the lambda-weighted utility loss.
Resolution utility is itself logarithmic, so the scale cancels and the test
is equivalent to a drop in the reported bit-valued Lagrangian; for the
linear max-distortion utility the decimal scale is the calibrated
acceptance threshold (accepted merges still strictly decrease the reported
Lagrangian, because the decimal test is the stricter of the two).
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Optional

from .core import JointRange, h0
from .errors import ConfigurationError
from .graph import Decomposition, UnionFind, build_graph, finest_decomposition
from .quantize import (
    CodewordPolicy,
    Quantization,
    UtilityChoice,
    UtilityKind,
    absolute_difference,
)

__all__ = [
    "Problem",
    "Termination",
    "LagrangianConfig",
    "TraceEntry",
    "GreedyResult",
    "lagrangian_l0",
    "algorithm1_min_l0",
    "algorithm2_min_istar",
    "algorithm3_l0_zero_istar",
    "run",
]

#: Bits-to-decimal-digits factor used by the component-merge acceptance test.
_DECIMAL_PER_BIT = math.log10(2.0)


class Problem(enum.Enum):
    MIN_L0 = "l0"
    MIN_ISTAR = "istar"
    MIN_L0_ZERO_ISTAR = "l0-zero-istar"


class Termination(enum.Enum):
    DELTA_L_NON_NEGATIVE = "delta-l-non-negative"
    FULLY_MERGED = "fully-merged"
    SINGLE_COMPONENT = "single-component"
    NO_ELIGIBLE_MERGE = "no-eligible-merge"


@dataclass(frozen=True)
class LagrangianConfig:
    """Multiplier, utility choice and codeword policy for one greedy run."""

    lam: float
    utility: UtilityChoice
    policy: CodewordPolicy = CodewordPolicy.CENTROID

    def __post_init__(self):
        if not (math.isfinite(self.lam) and self.lam >= 0.0):
            raise ConfigurationError("lambda must be a finite non-negative real")


@dataclass(frozen=True)
class TraceEntry:
    """State after outer iteration ``t`` (t = 0 is the singleton start).

    ``delta_l`` is the reported Lagrangian change that accepted this
    iteration (None at t = 0); accepted deltas of algorithms 1 and 2 are
    strictly negative. ``component_count`` is populated by the
    component-driven algorithms only.
    """

    t: int
    quantization: Quantization
    lagrangian: float
    delta_l: Optional[float]
    merged: tuple[tuple[int, int], ...]
    component_count: Optional[int]
    utility_value: float


@dataclass(frozen=True)
class GreedyResult:
    quantization: Quantization
    trace: tuple[TraceEntry, ...]
    decomposition: Optional[Decomposition]
    termination: Termination
    #: The non-negative decision value that stopped the run, when it was
    #: stopped by the acceptance test rather than by running out of merges.
    #: Equals the bit-valued Lagrangian change except for distortion-utility
    #: component merges, whose acceptance runs on the decimal-log scale.
    rejected_delta_l: Optional[float] = None


def lagrangian_l0(jr: JointRange, q, cfg: LagrangianConfig) -> float:
    """Leakage-form Lagrangian L0 - lambda * U, in bits.

    This is the privacy objective of the leakage-minimizing problems; it
    differs from minus the posterior-uncertainty form only by the constant
    h0(S), so it has the same minimizers. ``q`` may be a Quantization or a
    bare cluster list (codewords are then derived under ``cfg.policy``).
    """
    from .core import l0
    from .quantize import utility as _utility

    if not isinstance(q, Quantization):
        q = Quantization.from_clusters(jr, q, cfg.policy)
    return l0(jr, q) - cfg.lam * _utility(jr, q, cfg.utility)


# ---------------------------------------------------------------------------
# Mutable working state shared by the three algorithms
# ---------------------------------------------------------------------------


class _Cluster:
    __slots__ = ("cid", "members", "smask", "size", "total", "vmin", "vmax", "dbar")

    def __init__(self, cid, members, smask, size, total, vmin, vmax, dbar):
        self.cid = cid
        self.members = members  # sorted tuple of x indices
        self.smask = smask
        self.size = size
        self.total = total
        self.vmin = vmin
        self.vmax = vmax
        self.dbar = dbar


class _State:
    """Cluster bookkeeping with O(1) merged-distortion for the default metric."""

    def __init__(self, jr: JointRange, cfg: LagrangianConfig):
        self.jr = jr
        self.cfg = cfg
        self.needs_values = cfg.utility.kind is UtilityKind.U2_MAX_DISTORTION
        self.values = jr.x_values()
        if self.needs_values and any(v is None for v in self.values):
            raise ConfigurationError(
                "max-distortion utility needs numeric values on every X symbol"
            )
        self.fast = cfg.utility.distance is absolute_difference
        self.clusters: dict[int, _Cluster] = {}
        for x in range(jr.n_x):
            v = self.values[x]
            self.clusters[x] = _Cluster(
                x, (x,), jr.cond_mask_x(x), 1, v if v is not None else 0.0, v, v, 0.0
            )

    # -- distortion ----------------------------------------------------------

    def _dbar_of(self, members, total, vmin, vmax) -> float:
        policy = self.cfg.policy
        if policy is CodewordPolicy.CENTROID:
            cw = total / len(members)
        else:
            cw = self.values[members[0]]
        if self.fast:
            return max(cw - vmin, vmax - cw)
        dist = self.cfg.utility.distance
        return max(dist(self.values[x], cw) for x in members)

    def merged_dbar(self, a: int, b: int) -> float:
        ca, cb = self.clusters[a], self.clusters[b]
        total = ca.total + cb.total
        vmin = min(ca.vmin, cb.vmin)
        vmax = max(ca.vmax, cb.vmax)
        if self.fast:
            n = ca.size + cb.size
            if self.cfg.policy is CodewordPolicy.CENTROID:
                cw = total / n
            else:
                cw = self.values[min(ca.members[0], cb.members[0])]
            return max(cw - vmin, vmax - cw)
        members = tuple(sorted(ca.members + cb.members))
        return self._dbar_of(members, total, vmin, vmax)

    # -- mutation --------------------------------------------------------------

    def merge(self, a: int, b: int) -> int:
        ca = self.clusters.pop(a)
        cb = self.clusters.pop(b)
        members = tuple(sorted(ca.members + cb.members))
        total = ca.total + cb.total
        vmin = min(ca.vmin, cb.vmin) if self.needs_values else None
        vmax = max(ca.vmax, cb.vmax) if self.needs_values else None
        dbar = self._dbar_of(members, total, vmin, vmax) if self.needs_values else 0.0
        cid = members[0]
        self.clusters[cid] = _Cluster(
            cid, members, ca.smask | cb.smask, ca.size + cb.size, total, vmin, vmax, dbar
        )
        return cid

    # -- measures of the current state ------------------------------------------

    @property
    def n_clusters(self) -> int:
        return len(self.clusters)

    def utility_value(self) -> float:
        if self.cfg.utility.kind is UtilityKind.U1_RESOLUTION:
            largest = max(c.size for c in self.clusters.values())
            return h0(self.jr.n_x) - math.log2(largest)
        return -max(c.dbar for c in self.clusters.values())

    def min_range_bits(self) -> float:
        return math.log2(min(c.smask.bit_count() for c in self.clusters.values()))

    def leakage_l0(self) -> float:
        return h0(self.jr.n_s) - self.min_range_bits()

    def snapshot(self) -> Quantization:
        return Quantization.from_clusters(
            self.jr, [c.members for c in self.clusters.values()], self.cfg.policy
        )


# Exclusion maxima/minima: merging clusters a and b leaves every other
# cluster untouched, so "the extreme over the rest" only ever needs the three
# most extreme entries (at most two are excluded). Computing the top/bottom
# three once per scan keeps candidate evaluation O(1).


def _top3(state: _State, key) -> list[tuple[float, int]]:
    best: list[tuple[float, int]] = []
    for c in state.clusters.values():
        v = key(c)
        if len(best) < 3:
            best.append((v, c.cid))
            best.sort(reverse=True)
        elif v > best[-1][0]:
            best[-1] = (v, c.cid)
            best.sort(reverse=True)
    return best


def _bottom3(state: _State, key) -> list[tuple[float, int]]:
    best: list[tuple[float, int]] = []
    for c in state.clusters.values():
        v = key(c)
        if len(best) < 3:
            best.append((v, c.cid))
            best.sort()
        elif v < best[-1][0]:
            best[-1] = (v, c.cid)
            best.sort()
    return best


def _excluding(extremes: list[tuple[float, int]], a: int, b: int, default: float) -> float:
    for value, cid in extremes:
        if cid != a and cid != b:
            return value
    return default


def _size_top3(state: _State) -> list[tuple[float, int]]:
    return _top3(state, lambda c: c.size)


def _dbar_top3(state: _State) -> list[tuple[float, int]]:
    return _top3(state, lambda c: c.dbar)


def _range_bottom3(state: _State) -> list[tuple[float, int]]:
    return _bottom3(state, lambda c: c.smask.bit_count())


def _post_merge_utility(state: _State, a: int, b: int) -> float:
    """Utility of the quantization obtained by fusing clusters a and b."""
    if state.cfg.utility.kind is UtilityKind.U1_RESOLUTION:
        merged = state.clusters[a].size + state.clusters[b].size
        largest = max(merged, int(_excluding(_size_top3(state), a, b, 0)))
        return h0(state.jr.n_x) - math.log2(largest)
    worst = max(state.merged_dbar(a, b), _excluding(_dbar_top3(state), a, b, 0.0))
    return -worst


# ---------------------------------------------------------------------------
# Algorithm 1: minimize maximal leakage L0
# ---------------------------------------------------------------------------


def _best_partner_min_l0(state: _State, cid: int) -> Optional[int]:
    """Partner maximizing post-merge utility among clusters whose conditional
    range differs from ``cid``'s (merging equal ranges cannot raise the
    smallest range).

    Ties: smaller merged cluster, then smaller merged minimum index, then
    smaller partner id.
    """
    cx = state.clusters[cid]
    u1 = state.cfg.utility.kind is UtilityKind.U1_RESOLUTION
    size_tops = _size_top3(state) if u1 else None
    best_key = None
    best = None
    for other in state.clusters.values():
        if other.cid == cid or other.smask == cx.smask:
            continue
        merged_size = cx.size + other.size
        if u1:
            # Post-merge utility is decreasing in the largest cluster size.
            primary = max(merged_size, int(_excluding(size_tops, cid, other.cid, 0)))
        else:
            primary = state.merged_dbar(cid, other.cid)
        key = (primary, merged_size, min(cid, other.cid), other.cid)
        if best_key is None or key < best_key:
            best_key = key
            best = other.cid
    return best


def algorithm1_min_l0(jr: JointRange, cfg: LagrangianConfig) -> GreedyResult:
    """Greedy minimization of L0 - lambda * U by rounds of bulk merges.

    Each outer iteration merges every cluster currently achieving the
    smallest conditional range with its utility-maximizing partner, then
    the full round is accepted only if the Lagrangian strictly dropped;
    otherwise the previous quantization is returned.
    """
    state = _State(jr, cfg)
    lag = state.leakage_l0() - cfg.lam * state.utility_value()
    entries = [
        TraceEntry(0, state.snapshot(), lag, None, (), None, state.utility_value())
    ]
    t = 0
    while True:
        if state.n_clusters == 1:
            return GreedyResult(
                entries[-1].quantization, tuple(entries), None, Termination.FULLY_MERGED
            )
        smallest = min(c.smask.bit_count() for c in state.clusters.values())
        pi = sorted(
            c.cid for c in state.clusters.values() if c.smask.bit_count() == smallest
        )
        consumed: set[int] = set()
        merged_pairs: list[tuple[int, int]] = []
        for cid in pi:
            if cid in consumed:
                continue
            partner = _best_partner_min_l0(state, cid)
            if partner is None:
                continue
            consumed.add(cid)
            consumed.add(partner)
            state.merge(cid, partner)
            merged_pairs.append((cid, partner))
        if not merged_pairs:
            return GreedyResult(
                entries[-1].quantization,
                tuple(entries),
                None,
                Termination.NO_ELIGIBLE_MERGE,
            )
        t += 1
        u_val = state.utility_value()
        new_lag = state.leakage_l0() - cfg.lam * u_val
        delta = new_lag - lag
        if delta >= 0.0:
            return GreedyResult(
                entries[-1].quantization,
                tuple(entries),
                None,
                Termination.DELTA_L_NON_NEGATIVE,
                rejected_delta_l=delta,
            )
        lag = new_lag
        entries.append(
            TraceEntry(t, state.snapshot(), lag, delta, tuple(merged_pairs), None, u_val)
        )


# ---------------------------------------------------------------------------
# Algorithms 2 and 3: component-driven merging
# ---------------------------------------------------------------------------


class _Components:
    """Connected components of the evolving cluster graph.

    Seeded from the singleton confusability graph; fusing the components of
    two merged clusters keeps it equal to the finest decomposition of the
    current cluster graph (coarsening can only connect, never disconnect).
    """

    def __init__(self, jr: JointRange, state: _State):
        dec = finest_decomposition(build_graph(jr, [{x} for x in range(jr.n_x)]))
        block_of = dec.block_of()
        self.uf = UnionFind(len(dec.blocks))
        self.block_of_cluster: dict[int, int] = {
            cid: block_of[cid] for cid in state.clusters
        }
        self.x_count: dict[int, int] = {
            pos: len(block) for pos, block in enumerate(dec.blocks)
        }
        self.count = len(dec.blocks)

    def root(self, cid: int) -> int:
        return self.uf.find(self.block_of_cluster[cid])

    def size(self, cid: int) -> int:
        return self.x_count[self.root(cid)]

    def fuse(self, a: int, b: int, merged_cid: int) -> None:
        ra, rb = self.root(a), self.root(b)
        if ra == rb:
            raise AssertionError("candidate pair was not cross-component")
        self.uf.union(ra, rb)
        keep = self.uf.find(ra)
        self.x_count[keep] = self.x_count[ra] + self.x_count[rb]
        pos = self.block_of_cluster.pop(a)
        self.block_of_cluster.pop(b)
        self.block_of_cluster[merged_cid] = pos
        self.count -= 1

    def decomposition(self, state: _State) -> Decomposition:
        blocks: dict[int, set[int]] = {}
        for cid, cluster in state.clusters.items():
            blocks.setdefault(self.root(cid), set()).update(cluster.members)
        return Decomposition(
            tuple(frozenset(b) for b in sorted(blocks.values(), key=min))
        )


def _cross_component_pairs(state: _State, comps: _Components):
    cids = sorted(state.clusters)
    roots = {cid: comps.root(cid) for cid in cids}
    for i, a in enumerate(cids):
        for b in cids[i + 1 :]:
            if roots[a] != roots[b]:
                yield a, b


def _component_tie_key(comps: _Components, a: int, b: int) -> tuple:
    # Prefer pairs connecting the two largest components (larger first),
    # then the smallest cluster ids.
    sa, sb = comps.size(a), comps.size(b)
    hi, lo = (sa, sb) if sa >= sb else (sb, sa)
    return (-hi, -lo, a, b)


def _component_merge_decision(
    kind: UtilityKind, log_ratio_bits: float, lam: float, du: float
) -> float:
    """Decision value for a component-fusing merge; accept iff negative.

    ``log_ratio_bits`` is log2((P-1)/P) and ``du`` the utility change. The
    drop is weighed on a decimal-log scale; for log-valued utilities both
    sides scale together, so the sign agrees with the bit-valued change.
    """
    if kind is UtilityKind.U1_RESOLUTION:
        return log_ratio_bits - lam * du
    return log_ratio_bits * _DECIMAL_PER_BIT - lam * du


def algorithm2_min_istar(jr: JointRange, cfg: LagrangianConfig) -> GreedyResult:
    """Greedy minimization of maximin information log2 |components| - lambda * U.

    Candidates are cluster pairs in different components; the pair with the
    best post-merge utility is tried (for resolution utility that is the
    smallest combined size, ties resolved toward connecting the two largest
    components), and the run stops when the accepted drop would be
    non-negative or one component remains.
    """
    state = _State(jr, cfg)
    comps = _Components(jr, state)
    u_old = state.utility_value()
    lag = math.log2(comps.count) - cfg.lam * u_old
    entries = [
        TraceEntry(0, state.snapshot(), lag, None, (), comps.count, u_old)
    ]
    termination = Termination.SINGLE_COMPONENT
    rejected = None
    t = 0
    while comps.count > 1:
        u1 = cfg.utility.kind is UtilityKind.U1_RESOLUTION
        best_key = None
        best_pair = None
        for a, b in _cross_component_pairs(state, comps):
            if u1:
                primary = state.clusters[a].size + state.clusters[b].size
            else:
                primary = state.merged_dbar(a, b)
            key = (primary, *_component_tie_key(comps, a, b))
            if best_key is None or key < best_key:
                best_key = key
                best_pair = (a, b)
        a, b = best_pair
        u_new = _post_merge_utility(state, a, b)
        log_ratio = math.log2((comps.count - 1) / comps.count)
        delta = log_ratio - cfg.lam * (u_new - u_old)
        decision = _component_merge_decision(
            cfg.utility.kind, log_ratio, cfg.lam, u_new - u_old
        )
        if decision >= 0.0:
            termination = Termination.DELTA_L_NON_NEGATIVE
            rejected = decision
            break
        merged_cid = state.merge(a, b)
        comps.fuse(a, b, merged_cid)
        t += 1
        u_old = u_new
        lag = math.log2(comps.count) - cfg.lam * u_new
        entries.append(
            TraceEntry(t, state.snapshot(), lag, delta, ((a, b),), comps.count, u_new)
        )
    return GreedyResult(
        entries[-1].quantization,
        tuple(entries),
        comps.decomposition(state),
        termination,
        rejected_delta_l=rejected,
    )


def algorithm3_l0_zero_istar(jr: JointRange, cfg: LagrangianConfig) -> GreedyResult:
    """Minimize L0 under the hard constraint of zero maximin information.

    Component-driven like ``algorithm2_min_istar``, but every iteration
    takes the cross-component pair with the smallest Lagrangian change
    (ties: smallest summed conditional-range sizes, then largest components,
    then smallest ids) and keeps merging, accepted or not, until a single
    component remains. The result is always perfectly indistinguishable.
    """
    state = _State(jr, cfg)
    comps = _Components(jr, state)
    u_old = state.utility_value()
    lag = state.leakage_l0() - cfg.lam * u_old
    entries = [
        TraceEntry(0, state.snapshot(), lag, None, (), comps.count, u_old)
    ]
    t = 0
    while comps.count > 1:
        u1 = cfg.utility.kind is UtilityKind.U1_RESOLUTION
        min_range_bits = state.min_range_bits()
        range_bottoms = _range_bottom3(state)
        size_tops = _size_top3(state) if u1 else None
        dbar_tops = None if u1 else _dbar_top3(state)
        h0_x = h0(jr.n_x)
        best_key = None
        best = None
        for a, b in _cross_component_pairs(state, comps):
            ca, cb = state.clusters[a], state.clusters[b]
            merged_range = (ca.smask | cb.smask).bit_count()
            rest = _excluding(range_bottoms, a, b, math.inf)
            new_min = merged_range if rest == math.inf else min(merged_range, int(rest))
            if u1:
                largest = max(ca.size + cb.size, int(_excluding(size_tops, a, b, 0)))
                u_new = h0_x - math.log2(largest)
            else:
                u_new = -max(state.merged_dbar(a, b), _excluding(dbar_tops, a, b, 0.0))
            delta = (min_range_bits - math.log2(new_min)) + cfg.lam * (u_old - u_new)
            range_sum = ca.smask.bit_count() + cb.smask.bit_count()
            key = (delta, range_sum, *_component_tie_key(comps, a, b))
            if best_key is None or key < best_key:
                best_key = key
                best = (a, b, u_new, delta)
        a, b, u_new, delta = best
        merged_cid = state.merge(a, b)
        comps.fuse(a, b, merged_cid)
        t += 1
        u_old = u_new
        lag = state.leakage_l0() - cfg.lam * u_new
        entries.append(
            TraceEntry(t, state.snapshot(), lag, delta, ((a, b),), comps.count, u_new)
        )
    return GreedyResult(
        entries[-1].quantization,
        tuple(entries),
        comps.decomposition(state),
        Termination.SINGLE_COMPONENT,
    )


def run(jr: JointRange, problem: Problem, cfg: LagrangianConfig) -> GreedyResult:
    """Dispatch a greedy run for the given problem."""
    if problem is Problem.MIN_L0:
        return algorithm1_min_l0(jr, cfg)
    if problem is Problem.MIN_ISTAR:
        return algorithm2_min_istar(jr, cfg)
    return algorithm3_l0_zero_istar(jr, cfg)
