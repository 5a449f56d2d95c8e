"""Episodic control of maze topology to speed up the walker's escape.

The environment wraps one maze and one parameter set. An episode runs
the Lindblad dynamics from the entrance state; at K periodic instants
the agent may toggle a single grid-adjacent link (build or break a
wall) or do nothing, after which the generator is rebuilt with degrees
recomputed for the new topology. The reward for a step is the sink
population gained during its interval, so episode rewards telescope to
the final escape probability. After the K-th action the remaining time
up to the horizon is integrated and credited to the last step.

Dynamics are deterministic, so a fixed policy always reproduces the
same episode; all randomness lives in the ε-greedy exploration of
:func:`train`, seeded explicitly.
"""

import json
from dataclasses import dataclass

import numpy as np

from .dynamics import QSWParams, build_model, propagate
from .maze import MazeGraph, grid_links, toggle_link
from .states import DensityMatrix

POPULATION_FLOOR = -1e-8


@dataclass(frozen=True)
class Action:
    """Either a no-op or a toggle of one grid-adjacent link."""

    link: tuple[int, int] | None = None

    @classmethod
    def noop(cls) -> "Action":
        return cls(None)

    @classmethod
    def toggle(cls, i: int, j: int) -> "Action":
        if i == j:
            raise ValueError("toggle requires two distinct cells")
        return cls((min(i, j), max(i, j)))

    @property
    def is_noop(self) -> bool:
        return self.link is None

    @property
    def label(self) -> str:
        if self.link is None:
            return "noop"
        return f"toggle:{self.link[0]}-{self.link[1]}"

    @classmethod
    def from_label(cls, label: str) -> "Action":
        if label == "noop":
            return cls.noop()
        if label.startswith("toggle:"):
            i, j = label[len("toggle:"):].split("-")
            return cls.toggle(int(i), int(j))
        raise ValueError(f"unknown action label {label!r}")


@dataclass(frozen=True, eq=False)
class Observation:
    """What the agent sees: step count, populations, current topology."""

    step_index: int
    populations: np.ndarray
    adjacency_bits: tuple[tuple[int, int], ...]

    def __post_init__(self):
        pops = np.asarray(self.populations, dtype=float)
        if np.min(pops) < POPULATION_FLOOR:
            raise ValueError(f"negative population {np.min(pops)}")
        if pops.sum() > 1.0 + 1e-6:
            raise ValueError(f"populations sum to {pops.sum()} > 1")
        pops = pops.copy()
        pops.flags.writeable = False
        object.__setattr__(self, "populations", pops)


@dataclass(frozen=True, eq=False)
class EpisodeRecord:
    """Actions, per-step rewards, and the resulting escape probability."""

    actions: tuple[Action, ...]
    rewards: np.ndarray
    final_p_sink: float


class MazeEnv:
    """Gym-style environment over one maze and one parameter set."""

    def __init__(self, base_maze: MazeGraph, params: QSWParams, action_period: float, max_actions: int):
        if max_actions < 1:
            raise ValueError("max_actions must be >= 1")
        if action_period <= 0:
            raise ValueError("action_period must be positive")
        if max_actions * action_period > params.t_final + 1e-9:
            raise ValueError("max_actions * action_period must not exceed t_final")
        steps_per_interval = int(round(action_period / params.dt))
        if steps_per_interval < 1:
            raise ValueError("action_period must cover at least one integrator step")
        if max_actions * steps_per_interval > params.n_steps:
            raise ValueError("action intervals do not fit into the horizon")
        self.base_maze = base_maze
        self.params = params
        self.action_period = action_period
        self.max_actions = max_actions
        self.steps_per_interval = steps_per_interval
        self.action_space: tuple[Action, ...] = (Action.noop(),) + tuple(
            Action.toggle(i, j) for i, j in grid_links(base_maze.width, base_maze.height)
        )
        self._legal_links = frozenset(a.link for a in self.action_space if not a.is_noop)
        self._maze = None
        self._model = None
        self._rho = None
        self._step_index = 0
        self._steps_done = 0
        self._done = True

    def reset(self, seed: int | None = None) -> Observation:
        """Start a fresh episode; ``seed`` is accepted for interface
        symmetry but the environment itself is deterministic."""
        del seed
        self._maze = self.base_maze
        self._model = build_model(self._maze, self.params)
        rho0 = np.zeros((self._model.dim, self._model.dim), dtype=complex)
        rho0[self._model.entrance, self._model.entrance] = 1.0
        self._rho = rho0
        self._step_index = 0
        self._steps_done = 0
        self._done = False
        return self._observation()

    @property
    def done(self) -> bool:
        return self._done

    def state_key(self) -> tuple[int, tuple[tuple[int, int], ...]]:
        """(step index, current edge set): the tabular agent's state."""
        return (self._step_index, tuple(self._maze.edges()))

    def current_p_sink(self) -> float:
        return float(self._rho[self._model.sink, self._model.sink].real)

    def _observation(self) -> Observation:
        # Snapshot validation: the state must be a physical density matrix
        # after every step, across arbitrary topology changes.
        state = DensityMatrix(self._rho)
        return Observation(
            step_index=self._step_index,
            populations=state.populations(),
            adjacency_bits=tuple(self._maze.edges()),
        )

    def step(self, action: Action) -> tuple[Observation, float, bool]:
        """Apply one action, integrate one interval, return sink gain."""
        if self._done:
            raise ValueError("episode is over; call reset()")
        if not action.is_noop:
            if action.link not in self._legal_links:
                raise ValueError(f"illegal action {action.label}")
            self._maze = toggle_link(self._maze, *action.link)
            self._model = build_model(self._maze, self.params)
        before = self.current_p_sink()
        self._rho = propagate(self._rho, self._model, self.steps_per_interval, first_step=self._steps_done)
        self._steps_done += self.steps_per_interval
        self._step_index += 1
        if self._step_index == self.max_actions:
            remaining = self.params.n_steps - self._steps_done
            if remaining > 0:
                self._rho = propagate(self._rho, self._model, remaining, first_step=self._steps_done)
                self._steps_done += remaining
            self._done = True
        reward = self.current_p_sink() - before
        return self._observation(), reward, self._done


class Policy:
    """Greedy action table keyed by environment state; no-op by default."""

    def __init__(self, table: dict | None = None):
        self.table = dict(table or {})

    @classmethod
    def noop(cls) -> "Policy":
        return cls()

    def action_for(self, state_key) -> Action:
        return self.table.get(state_key, Action.noop())

    @staticmethod
    def _key_str(state_key) -> str:
        step, edges = state_key
        return f"{step}|" + "+".join(f"{i}-{j}" for i, j in edges)

    @staticmethod
    def _key_from_str(text: str):
        step, _, edges = text.partition("|")
        pairs = tuple(
            tuple(int(v) for v in pair.split("-")) for pair in edges.split("+") if pair
        )
        return (int(step), pairs)

    def to_json(self, config: dict | None = None) -> str:
        doc = {
            "config": {} if config is None else config,
            "policy": {self._key_str(k): a.label for k, a in self.table.items()},
        }
        return json.dumps(doc, sort_keys=True, indent=2) + "\n"

    @classmethod
    def from_json(cls, text: str) -> "Policy":
        doc = json.loads(text)
        table = {
            cls._key_from_str(key): Action.from_label(label)
            for key, label in doc["policy"].items()
        }
        return cls(table)


def run_episode(env: MazeEnv, policy: Policy) -> EpisodeRecord:
    """One exploration-free rollout of ``policy``."""
    env.reset()
    actions, rewards = [], []
    done = False
    while not done:
        action = policy.action_for(env.state_key())
        _, reward, done = env.step(action)
        actions.append(action)
        rewards.append(reward)
    return EpisodeRecord(
        actions=tuple(actions),
        rewards=np.array(rewards),
        final_p_sink=env.current_p_sink(),
    )


@dataclass(frozen=True)
class QLearningConfig:
    """Tabular Q-learning hyperparameters.

    ε decays linearly from ``epsilon_start`` to ``epsilon_end`` over the
    first half of training and stays constant afterwards. The horizon
    is finite, so an undiscounted return (discount = 1) is the default.
    """

    learning_rate: float = 0.1
    discount: float = 1.0
    epsilon_start: float = 1.0
    epsilon_end: float = 0.05


@dataclass(frozen=True, eq=False)
class LearningCurve:
    """Per-episode rewards and their trailing running average."""

    rewards: np.ndarray
    running_avg: np.ndarray
    window: int


def _running_average(values: np.ndarray, window: int) -> np.ndarray:
    out = np.empty_like(values)
    cumulative = np.concatenate([[0.0], np.cumsum(values)])
    for i in range(len(values)):
        lo = max(0, i - window + 1)
        out[i] = (cumulative[i + 1] - cumulative[lo]) / (i + 1 - lo)
    return out


def train(
    env: MazeEnv,
    config: QLearningConfig,
    episodes: int,
    seed: int,
) -> tuple[Policy, LearningCurve]:
    """ε-greedy tabular Q-learning, deterministic for a fixed seed.

    Greedy ties resolve to the first maximum in action-space order, so
    an untrained table always selects the no-op and the corresponding
    curve reproduces the plain-walker baseline.
    """
    if episodes < 1:
        raise ValueError("episodes must be >= 1")
    rng = np.random.default_rng(seed)
    actions = env.action_space
    n_actions = len(actions)
    q: dict = {}
    rewards = np.empty(episodes)
    half = max(1, episodes // 2)
    for episode in range(episodes):
        frac = min(1.0, episode / half)
        epsilon = config.epsilon_start + (config.epsilon_end - config.epsilon_start) * frac
        env.reset()
        state = env.state_key()
        total = 0.0
        done = False
        while not done:
            q_state = q.setdefault(state, np.zeros(n_actions))
            if epsilon > 0.0 and rng.random() < epsilon:
                idx = int(rng.integers(n_actions))
            else:
                idx = int(np.argmax(q_state))
            _, reward, done = env.step(actions[idx])
            next_state = env.state_key()
            future = 0.0
            if not done and next_state in q:
                future = float(np.max(q[next_state]))
            target = reward + config.discount * future
            q_state[idx] += config.learning_rate * (target - q_state[idx])
            state = next_state
            total += reward
        rewards[episode] = total
    policy = Policy({s: actions[int(np.argmax(qv))] for s, qv in q.items()})
    window = min(100, episodes)
    curve = LearningCurve(
        rewards=rewards,
        running_avg=_running_average(rewards, window),
        window=window,
    )
    return policy, curve


def evaluate(env: MazeEnv, policy: Policy, n_runs: int = 1) -> float:
    """Mean final escape probability over greedy rollouts.

    The environment is deterministic, so every rollout is identical and
    n_runs = 1 already gives the exact value.
    """
    if n_runs < 1:
        raise ValueError("n_runs must be >= 1")
    values = [run_episode(env, policy).final_p_sink for _ in range(n_runs)]
    return float(np.mean(values))


def write_curve_csv(curve: LearningCurve, path, config: dict | None = None) -> None:
    """Write `episode,reward,running_avg_100` rows."""
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        if config:
            pairs = " ".join(f"{k}={config[k]}" for k in sorted(config))
            fh.write(f"# config: {pairs}\n")
        fh.write("episode,reward,running_avg_100\n")
        for i, (r, avg) in enumerate(zip(curve.rewards, curve.running_avg)):
            fh.write(f"{i},{float(r)!r},{float(avg)!r}\n")
