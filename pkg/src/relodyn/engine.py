"""Synchronized multiplicative-weights dynamics for all residents.

Every resident runs the classic multiplicative weights method over the
housing sites: weights start uniform, each site's weight is multiplied by
(1 - eps)^cost after every step, and actions are drawn from the
normalized weights. Weights live in log space with max-subtraction so
20000-step runs cannot underflow. The fixed step size sqrt(ln|H| / T)
gives every agent vanishing average regret against any fixed site, which
drives the time-averaged outcome distribution toward an approximate
coarse correlated equilibrium.

Each step has three phases: a read-only phase (sample actions, build the
shared per-step fields, evaluate every agent's cost vector), a
single-writer phase (ledgers and accumulators, in agent order), and an
independent per-agent update phase. All randomness is counter-based, so
results are bitwise reproducible for a given seed regardless of how the
phases are scheduled.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from . import rng
from .costs import ModelParams, build_step_fields, cost_matrix
from .graphs import (
    NormalizedDistances,
    RoadGraph,
    SitePartition,
    amenity_scores,
    compute_normalized_distances,
)
from .population import EndowmentProfile

STATE_MAGIC = "NRD1"


@dataclass(frozen=True)
class SpatialInstance:
    """Immutable per-graph precomputation shared by every run on it."""

    graph: RoadGraph
    partition: SitePartition
    distances: NormalizedDistances
    housing_ids: tuple[str, ...]
    amenity_ids: tuple[str, ...]
    dist_hh: np.ndarray
    prox_sq: np.ndarray
    amenity: np.ndarray

    @classmethod
    def from_graph(cls, graph: RoadGraph, partition: SitePartition) -> "SpatialInstance":
        dist = compute_normalized_distances(graph)
        housing_ids = tuple(sorted(partition.housing))
        amenity_ids = tuple(sorted(partition.amenities))
        rows = [dist.index_of(h) for h in housing_ids]
        dist_hh = dist.matrix[np.ix_(rows, rows)].copy()
        prox_sq = (1.0 - dist_hh) ** 2
        amenity = amenity_scores(dist, partition, housing_ids)
        for arr in (dist_hh, prox_sq, amenity):
            arr.flags.writeable = False
        return cls(graph, partition, dist, housing_ids, amenity_ids, dist_hh, prox_sq, amenity)

    @property
    def n_housing(self) -> int:
        return len(self.housing_ids)


@dataclass(frozen=True)
class EngineConfig:
    params: ModelParams
    horizon: int
    checkpoints: tuple[int, ...]
    seed: int
    cce_samples_per_step: int = 1

    def __post_init__(self):
        object.__setattr__(self, "checkpoints", tuple(int(t) for t in self.checkpoints))
        if self.horizon < 1:
            raise ValueError(f"horizon must be >= 1, got {self.horizon}")
        if not self.checkpoints:
            raise ValueError("checkpoint list must be nonempty")
        if any(b <= a for a, b in zip(self.checkpoints, self.checkpoints[1:])):
            raise ValueError(f"checkpoints must be strictly increasing: {self.checkpoints}")
        if self.checkpoints[-1] > self.horizon:
            raise ValueError(
                f"last checkpoint {self.checkpoints[-1]} exceeds horizon {self.horizon}"
            )
        if self.cce_samples_per_step < 0:
            raise ValueError("cce_samples_per_step must be >= 0")


@dataclass
class RegretLedger:
    """Cumulative realized cost per agent and cumulative cost per fixed
    action, the two sides of the hindsight-regret comparison."""

    realized_cum: np.ndarray
    action_cum: np.ndarray
    steps_done: int = 0


@dataclass
class EquilibriumAccumulator:
    """Running sums of expected per-site population and endowment mass
    under each step's mixed strategies, with frozen checkpoint averages."""

    pop_acc: np.ndarray
    wealth_acc: np.ndarray
    frozen: dict = field(default_factory=dict)

    def freeze(self, t: int) -> None:
        self.frozen[t] = (self.pop_acc / t, self.wealth_acc / t)


@dataclass(frozen=True)
class CceGapEstimate:
    """Monte Carlo estimate of the worst unilateral-deviation incentive.

    ``gap`` is clamped at zero (a violation cannot be negative);
    ``raw_gap`` keeps the signed maximum mean difference, which is the
    right quantity to compare against empirical regret, since regret can
    be negative when adaptive play beats every fixed action.
    """

    gap: float
    raw_gap: float
    std_error: float
    agent: int
    action: int
    samples: int


def mwu_step_size(n_actions: int, horizon: int) -> float:
    """Fixed step size sqrt(ln n / T). A single action makes the update a
    no-op on the simplex, so any valid value works; 0.5 is returned."""
    if n_actions < 1 or horizon < 1:
        raise ValueError("need at least one action and one step")
    if n_actions == 1:
        return 0.5
    eps = math.sqrt(math.log(n_actions) / horizon)
    if eps >= 1.0:
        raise ValueError(
            f"horizon {horizon} is too short for {n_actions} actions "
            f"(step size {eps:.3f} >= 1); raise the horizon"
        )
    return eps


def probabilities(logw: np.ndarray) -> np.ndarray:
    """Normalized strategy from log-weights (rows, if 2-D)."""
    shifted = logw - logw.max(axis=-1, keepdims=True)
    e = np.exp(shifted)
    return e / e.sum(axis=-1, keepdims=True)


def mwu_update(logw: np.ndarray, costs: np.ndarray, step_size: float) -> np.ndarray:
    """One multiplicative-weights update in log space.

    Each log-weight moves by cost * ln(1 - step_size); the vector is then
    renormalized by subtracting its max, which leaves the induced
    probabilities unchanged while keeping the values bounded.
    """
    if not 0.0 < step_size < 1.0:
        raise ValueError(f"step size must lie in (0, 1), got {step_size}")
    new = logw + costs * math.log1p(-step_size)
    return new - new.max(axis=-1, keepdims=True)


def sample_rows(p: np.ndarray, u: np.ndarray) -> np.ndarray:
    """Inverse-CDF draw per row: row j selects the first index where the
    running sum of p[j] exceeds u[j] (u rescaled by the row sum so
    float-level normalization slack cannot push a draw out of range)."""
    cp = np.cumsum(p, axis=1)
    scaled = u * cp[:, -1]
    return np.argmax(cp > scaled[:, None], axis=1)


class Engine:
    """State of one dynamics run; construct, then call ``step`` or ``run``."""

    def __init__(
        self,
        instance: SpatialInstance,
        endowments: EndowmentProfile,
        config: EngineConfig,
    ):
        self.instance = instance
        self.config = config
        self.w = np.asarray(endowments.w, dtype=float)
        self.n_agents = len(endowments)
        self.n_actions = instance.n_housing
        self.step_size = mwu_step_size(self.n_actions, config.horizon)
        self._log1m_eps = math.log1p(-self.step_size)
        self._key_action = rng.stream_key(config.seed, rng.ACTION_DRAW)
        self._key_cce = rng.stream_key(config.seed, rng.CCE_DRAW)
        self._checkpoint_set = set(config.checkpoints)
        self._agent_ix = np.arange(self.n_agents)

        self.t_done = 0
        self.logw = np.zeros((self.n_agents, self.n_actions))
        self.p = probabilities(self.logw)
        self.ledger = RegretLedger(
            realized_cum=np.zeros(self.n_agents),
            action_cum=np.zeros((self.n_agents, self.n_actions)),
        )
        self.accumulator = EquilibriumAccumulator(
            pop_acc=np.zeros(self.n_actions), wealth_acc=np.zeros(self.n_actions)
        )
        self.cce_n = 0
        self.cce_realized_cum = np.zeros(self.n_agents)
        self.cce_action_cum = np.zeros((self.n_agents, self.n_actions))
        self.cce_diff_cum = np.zeros((self.n_agents, self.n_actions))
        self.cce_diff_sq_cum = np.zeros((self.n_agents, self.n_actions))

    def _cost_matrix_for(self, actions: np.ndarray) -> np.ndarray:
        fields = build_step_fields(
            actions, self.w, self.instance.dist_hh, self.instance.amenity,
            sq=self.instance.prox_sq,
        )
        return cost_matrix(fields, self.config.params)

    def step(self) -> None:
        """Advance the dynamics by one synchronized step."""
        if self.t_done >= self.config.horizon:
            raise RuntimeError(f"horizon {self.config.horizon} already reached")
        t = self.t_done + 1
        p = self.p

        # Read-only phase: enact actions, score every agent against them.
        u = rng.uniforms(self._key_action, t, self.n_agents)
        actions = sample_rows(p, u)
        costs = self._cost_matrix_for(actions)

        # Single-writer phase: ledgers and outcome accumulators.
        self.ledger.realized_cum += costs[self._agent_ix, actions]
        self.ledger.action_cum += costs
        self.ledger.steps_done = t
        self.accumulator.pop_acc += p.sum(axis=0)
        self.accumulator.wealth_acc += self.w @ p

        for s in range(self.config.cce_samples_per_step):
            self._cce_sample(t, s, p)

        # Independent per-agent updates.
        self.logw += costs * self._log1m_eps
        self.logw -= self.logw.max(axis=1, keepdims=True)
        e = np.exp(self.logw)
        self.p = e / e.sum(axis=1, keepdims=True)

        self.t_done = t
        if t in self._checkpoint_set:
            self.accumulator.freeze(t)

    def _cce_sample(self, t: int, round_: int, p: np.ndarray) -> None:
        # One independent profile from this step's strategy product; the
        # per-deviation cost columns come from the same full-profile
        # semantics used for feedback.
        u = rng.uniforms(self._key_cce, t, self.n_agents, round_=round_)
        actions = sample_rows(p, u)
        costs = self._cost_matrix_for(actions)
        realized = costs[self._agent_ix, actions]
        diff = realized[:, None] - costs
        self.cce_realized_cum += realized
        self.cce_action_cum += costs
        self.cce_diff_cum += diff
        self.cce_diff_sq_cum += diff * diff
        self.cce_n += 1

    def run(self, until: int | None = None) -> None:
        stop = self.config.horizon if until is None else min(until, self.config.horizon)
        while self.t_done < stop:
            self.step()

    def empirical_regret(self, j: int) -> float:
        return empirical_regret(self.ledger, j)

    def regrets(self) -> np.ndarray:
        if self.ledger.steps_done < 1:
            raise ValueError("no steps taken yet")
        best = self.ledger.action_cum.min(axis=1)
        return (self.ledger.realized_cum - best) / self.ledger.steps_done

    def estimate_cce_gap(self) -> CceGapEstimate:
        """Worst estimated incentive to deviate to a fixed site, across all
        agents, clamped at zero; with the Monte Carlo standard error of the
        winning (agent, deviation) mean difference."""
        n = self.cce_n
        if n < 1:
            raise ValueError(
                "no equilibrium-gap samples were collected; "
                "configure cce_samples_per_step >= 1"
            )
        mean_diff = self.cce_diff_cum / n
        flat = int(np.argmax(mean_diff))
        agent, action = divmod(flat, self.n_actions)
        best = float(mean_diff[agent, action])
        if n >= 2:
            var = (self.cce_diff_sq_cum[agent, action] - n * best * best) / (n - 1)
            se = math.sqrt(max(var, 0.0) / n)
        else:
            se = float("inf")
        return CceGapEstimate(max(best, 0.0), best, se, int(agent), int(action), n)

    # -- persistence ----------------------------------------------------

    def save_state(self, path) -> None:
        """Write a resumable checkpoint (versioned, plain JSON)."""
        doc = {
            "magic": STATE_MAGIC,
            "t_done": self.t_done,
            "config": {
                "occupancy_cap": self.config.params.occupancy_cap,
                "amenity_weight": self.config.params.amenity_weight,
                "horizon": self.config.horizon,
                "checkpoints": list(self.config.checkpoints),
                "seed": self.config.seed,
                "cce_samples_per_step": self.config.cce_samples_per_step,
            },
            "n_agents": self.n_agents,
            "n_actions": self.n_actions,
            "logw": self.logw.tolist(),
            "realized_cum": self.ledger.realized_cum.tolist(),
            "action_cum": self.ledger.action_cum.tolist(),
            "pop_acc": self.accumulator.pop_acc.tolist(),
            "wealth_acc": self.accumulator.wealth_acc.tolist(),
            "frozen": {
                str(t): [pop.tolist(), wealth.tolist()]
                for t, (pop, wealth) in self.accumulator.frozen.items()
            },
            "cce_n": self.cce_n,
            "cce_realized_cum": self.cce_realized_cum.tolist(),
            "cce_action_cum": self.cce_action_cum.tolist(),
            "cce_diff_cum": self.cce_diff_cum.tolist(),
            "cce_diff_sq_cum": self.cce_diff_sq_cum.tolist(),
        }
        with open(path, "w", encoding="utf-8") as f:
            json.dump(doc, f)

    def load_state(self, path) -> None:
        """Restore a checkpoint written by ``save_state``. The engine must
        have been constructed with the same instance shape and config."""
        with open(path, encoding="utf-8") as f:
            doc = json.load(f)
        if doc.get("magic") != STATE_MAGIC:
            raise ValueError(f"{path}: not a {STATE_MAGIC} checkpoint file")
        if doc["n_agents"] != self.n_agents or doc["n_actions"] != self.n_actions:
            raise ValueError(f"{path}: checkpoint shape does not match this engine")
        cfg = doc["config"]
        if (
            cfg["seed"] != self.config.seed
            or cfg["horizon"] != self.config.horizon
            or cfg["occupancy_cap"] != self.config.params.occupancy_cap
            or cfg["amenity_weight"] != self.config.params.amenity_weight
        ):
            raise ValueError(f"{path}: checkpoint config does not match this engine")
        self.t_done = int(doc["t_done"])
        self.logw = np.array(doc["logw"], dtype=float)
        self.p = probabilities(self.logw)
        self.ledger = RegretLedger(
            realized_cum=np.array(doc["realized_cum"], dtype=float),
            action_cum=np.array(doc["action_cum"], dtype=float),
            steps_done=self.t_done,
        )
        self.accumulator = EquilibriumAccumulator(
            pop_acc=np.array(doc["pop_acc"], dtype=float),
            wealth_acc=np.array(doc["wealth_acc"], dtype=float),
            frozen={
                int(t): (np.array(pop, dtype=float), np.array(wealth, dtype=float))
                for t, (pop, wealth) in doc["frozen"].items()
            },
        )
        self.cce_n = int(doc["cce_n"])
        self.cce_realized_cum = np.array(doc["cce_realized_cum"], dtype=float)
        self.cce_action_cum = np.array(doc["cce_action_cum"], dtype=float)
        self.cce_diff_cum = np.array(doc["cce_diff_cum"], dtype=float)
        self.cce_diff_sq_cum = np.array(doc["cce_diff_sq_cum"], dtype=float)


def init_state(
    instance: SpatialInstance, endowments: EndowmentProfile, config: EngineConfig
) -> Engine:
    """Fresh dynamics state: uniform strategies, zeroed ledgers."""
    return Engine(instance, endowments, config)


def empirical_regret(ledger: RegretLedger, j: int) -> float:
    """Average excess of realized cost over the best fixed site in
    hindsight for agent j."""
    if ledger.steps_done < 1:
        raise ValueError("no steps taken yet")
    best = float(ledger.action_cum[j].min())
    return (float(ledger.realized_cum[j]) - best) / ledger.steps_done
