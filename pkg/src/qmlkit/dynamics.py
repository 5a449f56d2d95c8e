"""Lindblad dynamics of a stochastic walker on a maze with an absorbing sink.

The walker's state is a density matrix over the maze cells plus one
extra basis state, the sink. The generator interpolates between a
coherent quantum walk (mixing parameter p = 0) and a classical random
walk (p = 1):

    drho/dt = -(1-p) i [H, rho] + p * D_walk(rho) + D_sink(rho)

with H the maze adjacency matrix (zero-padded for the sink), one jump
operator (A_ij / d_j) |i><j| per ordered linked pair for the classical
part, and an irreversible transfer from the exit node n into the sink S
at rate Gamma:

    D_sink(rho) = Gamma (2 |S><n| rho |n><S| - {|n><n|, rho}).

Because the sink is part of the state space the generator conserves
trace, and the escape probability is simply rho_SS(t). The equivalent
time-integral definition 2 Gamma * integral of rho_nn is kept as a
cross-check, see :func:`p_sink_from_integral`.

Integration is fixed-step RK4 for determinism; a step that drifts the
trace or produces non-finite values raises :class:`IntegrationError`
instead of renormalizing.
"""

import json
from dataclasses import dataclass, field

import numpy as np

from .maze import MazeGraph, degrees
from .states import DensityMatrix


class IntegrationError(RuntimeError):
    """Integration produced an invalid state (step size too large)."""

    def __init__(self, message: str, step: int | None = None):
        super().__init__(message)
        self.step = step


TRACE_DRIFT_LIMIT = 1e-6


@dataclass(frozen=True)
class QSWParams:
    """Walk and integration parameters.

    p:       classical/quantum mixing in [0, 1] (0 = coherent, 1 = classical)
    gamma:   sink transfer rate, > 0
    dt:      RK4 step
    t_final: integration horizon
    """

    p: float
    gamma: float = 1.0
    dt: float = 0.005
    t_final: float = 10.0

    def __post_init__(self):
        for name in ("p", "gamma", "dt", "t_final"):
            if not np.isfinite(getattr(self, name)):
                raise ValueError(f"{name} must be finite")
        if not 0.0 <= self.p <= 1.0:
            raise ValueError(f"p must lie in [0, 1], got {self.p}")
        if self.gamma <= 0.0:
            raise ValueError(f"gamma must be positive, got {self.gamma}")
        if not 0.0 < self.dt <= self.t_final:
            raise ValueError("dt must satisfy 0 < dt <= t_final")

    @property
    def n_steps(self) -> int:
        return int(round(self.t_final / self.dt))


@dataclass(frozen=True, eq=False)
class LindbladModel:
    """Generator data for one maze topology.

    The jump operator for an ordered linked pair (i, j) is the single-entry
    matrix (A_ij / d_j) |i><j| with d_j the degree of the source node j;
    the full matrices are available through :meth:`jump_ops`. ``sink_rate``
    is Gamma, except in the validation variant from :meth:`without_sink`
    where it is 0.
    """

    dim: int
    hamiltonian: np.ndarray
    jumps: tuple[tuple[int, int, float], ...]
    sink_exit: int
    entrance: int
    params: QSWParams
    sink_rate: float
    # Precomputed generator pieces, already scaled by the mixing parameter:
    # _h_eff = -i (1-p) H, _gain_p[i, j] = p * (squared jump coefficient
    # feeding population j -> i), _loss_half = p/2 * column sums of the
    # unscaled gain. None where the corresponding term vanishes.
    _gain: np.ndarray = field(repr=False, default=None)
    _loss: np.ndarray = field(repr=False, default=None)
    _h_eff: np.ndarray = field(repr=False, default=None)
    _gain_p: np.ndarray = field(repr=False, default=None)
    _loss_half: np.ndarray = field(repr=False, default=None)
    _idx: np.ndarray = field(repr=False, default=None)

    def __post_init__(self):
        gain = np.zeros((self.dim, self.dim))
        for i, j, coeff in self.jumps:
            gain[i, j] += coeff * coeff
        loss = gain.sum(axis=0)
        p = self.params.p
        h_eff = None if p == 1.0 else (-1j * (1.0 - p)) * self.hamiltonian
        gain_p = None if p == 0.0 else (p * gain).astype(complex)
        loss_half = None if p == 0.0 else 0.5 * p * loss
        for arr in (gain, loss, h_eff, gain_p, loss_half):
            if arr is not None:
                arr.flags.writeable = False
        object.__setattr__(self, "_gain", gain)
        object.__setattr__(self, "_loss", loss)
        object.__setattr__(self, "_h_eff", h_eff)
        object.__setattr__(self, "_gain_p", gain_p)
        object.__setattr__(self, "_loss_half", loss_half)
        object.__setattr__(self, "_idx", np.arange(self.dim))

    @property
    def sink(self) -> int:
        """Basis index of the sink state (last index)."""
        return self.dim - 1

    def jump_ops(self) -> list[np.ndarray]:
        """Dense jump operator matrices, one per ordered linked pair."""
        ops = []
        for i, j, coeff in self.jumps:
            op = np.zeros((self.dim, self.dim), dtype=complex)
            op[i, j] = coeff
            ops.append(op)
        return ops

    def without_sink(self) -> "LindbladModel":
        """Variant with the sink transfer switched off (validation mode)."""
        return LindbladModel(
            dim=self.dim,
            hamiltonian=self.hamiltonian,
            jumps=self.jumps,
            sink_exit=self.sink_exit,
            entrance=self.entrance,
            params=self.params,
            sink_rate=0.0,
        )


def build_model(maze: MazeGraph, params: QSWParams) -> LindbladModel:
    """Assemble the Lindblad model for the current maze topology.

    Degrees are recomputed from the adjacency as given, so the same call
    works for pristine perfect mazes and for topologies already edited
    by an agent; an isolated node simply contributes no jump operators.
    """
    n = maze.n_nodes
    dim = n + 1
    ham = np.zeros((dim, dim), dtype=complex)
    ham[:n, :n] = maze.adjacency
    ham.flags.writeable = False
    d = degrees(maze)
    jumps = []
    for i in range(n):
        for j in np.nonzero(maze.adjacency[i])[0]:
            jumps.append((i, int(j), 1.0 / d[j]))
    return LindbladModel(
        dim=dim,
        hamiltonian=ham,
        jumps=tuple(jumps),
        sink_exit=maze.exit,
        entrance=maze.entrance,
        params=params,
        sink_rate=params.gamma,
    )


def initial_state(model: LindbladModel) -> DensityMatrix:
    """All population at the entrance node: |entrance><entrance|."""
    return DensityMatrix.basis_state(model.dim, model.entrance)


def _rhs(rho: np.ndarray, model: LindbladModel) -> np.ndarray:
    """Generator applied to an arbitrary (not necessarily Hermitian) matrix."""
    h_eff = model._h_eff
    if h_eff is not None:
        out = h_eff @ rho
        out -= rho @ h_eff
    else:
        out = np.zeros_like(rho)
    gain_p = model._gain_p
    if gain_p is not None:
        idx = model._idx
        out[idx, idx] += gain_p @ rho.diagonal()
        loss_half = model._loss_half
        damp = loss_half[:, None] * rho
        damp += rho * loss_half[None, :]
        out -= damp
    sr = model.sink_rate
    if sr != 0.0:
        n, sink = model.sink_exit, model.sink
        out[sink, sink] += 2.0 * sr * rho[n, n]
        out[n, :] -= sr * rho[n, :]
        out[:, n] -= sr * rho[:, n]
    return out


def lindblad_rhs(rho, model: LindbladModel) -> np.ndarray:
    """drho/dt for a state of the model's dimension.

    Accepts a :class:`DensityMatrix` or a plain array. The output is
    Hermitian and traceless for Hermitian input: total population only
    moves between maze and sink, never leaves the state space.
    """
    mat = rho.matrix if isinstance(rho, DensityMatrix) else np.asarray(rho, dtype=complex)
    if mat.shape != (model.dim, model.dim):
        raise ValueError(f"state shape {mat.shape} does not match model dimension {model.dim}")
    return _rhs(mat, model)


def _rk4_step(rho: np.ndarray, dt: float, model: LindbladModel) -> np.ndarray:
    k1 = _rhs(rho, model)
    k2 = _rhs(rho + (0.5 * dt) * k1, model)
    k3 = _rhs(rho + (0.5 * dt) * k2, model)
    k4 = _rhs(rho + dt * k3, model)
    # rho + dt/6 * (k1 + 2 k2 + 2 k3 + k4), reusing the stage buffers
    k2 += k3
    k1 += k4
    k1 += 2.0 * k2
    k1 *= dt / 6.0
    k1 += rho
    return k1


def propagate(
    rho: np.ndarray,
    model: LindbladModel,
    n_steps: int,
    first_step: int = 0,
    exit_trace: np.ndarray | None = None,
) -> np.ndarray:
    """Advance a raw state matrix by n_steps RK4 steps.

    Checks trace conservation after every step; ``first_step`` only
    offsets the step index reported on failure. When ``exit_trace`` is
    given (length n_steps) it receives the exit-node occupation after
    each step.
    """
    dt = model.params.dt
    n = model.sink_exit
    for k in range(n_steps):
        rho = _rk4_step(rho, dt, model)
        tr = rho.trace().real
        if not np.isfinite(tr):
            raise IntegrationError(
                f"non-finite state at step {first_step + k + 1}", step=first_step + k + 1
            )
        if abs(tr - 1.0) > TRACE_DRIFT_LIMIT:
            raise IntegrationError(
                f"trace drifted to {tr} at step {first_step + k + 1} (dt too large?)",
                step=first_step + k + 1,
            )
        if exit_trace is not None:
            exit_trace[k] = rho[n, n].real
    return rho


@dataclass(frozen=True, eq=False)
class Trajectory:
    """Time evolution record.

    ``states`` holds validated snapshots at ``times``; ``sample_steps``
    maps each snapshot to its index on the dense per-step grid
    ``step_times``, where the exit-node occupation rho_nn is recorded at
    full resolution for the escape-probability integral.
    """

    times: np.ndarray
    states: tuple[DensityMatrix, ...]
    p_sink_series: np.ndarray
    step_times: np.ndarray
    exit_occupation: np.ndarray
    sample_steps: np.ndarray

    def final_p_sink(self) -> float:
        return float(self.p_sink_series[-1])


def evolve(rho0: DensityMatrix, model: LindbladModel, sample_every: int = 10) -> Trajectory:
    """Integrate from t = 0 to t_final, sampling every ``sample_every`` steps.

    Snapshots (including the initial and final state) are re-validated
    as density matrices; a failed invariant is reported as an
    :class:`IntegrationError`. The sink population series must come out
    non-decreasing, anything else is likewise an integration failure.
    """
    if rho0.dim != model.dim:
        raise ValueError(f"initial state dimension {rho0.dim} does not match model {model.dim}")
    if sample_every < 1:
        raise ValueError("sample_every must be >= 1")
    params = model.params
    n_steps = params.n_steps
    sink = model.sink
    n = model.sink_exit

    rho = rho0.matrix.astype(complex)
    exit_occ = np.empty(n_steps + 1)
    exit_occ[0] = rho[n, n].real
    snapshots = [rho0]
    sample_steps = [0]

    done = 0
    while done < n_steps:
        chunk = min(sample_every, n_steps - done)
        rho = propagate(rho, model, chunk, first_step=done, exit_trace=exit_occ[done + 1 : done + chunk + 1])
        done += chunk
        try:
            snapshots.append(DensityMatrix(rho))
        except ValueError as exc:
            raise IntegrationError(f"invalid state at step {done}: {exc}", step=done) from exc
        sample_steps.append(done)

    dt = params.dt
    sample_steps = np.array(sample_steps)
    p_sink = np.array([s.matrix[sink, sink].real for s in snapshots])
    if np.any(np.diff(p_sink) < -1e-9):
        raise IntegrationError("sink population series is not monotone (dt too large?)")
    if p_sink.min() < -1e-9 or p_sink.max() > 1.0 + 1e-8:
        raise IntegrationError(f"sink population outside [0, 1]: {p_sink.min()}..{p_sink.max()}")
    return Trajectory(
        times=sample_steps * dt,
        states=tuple(snapshots),
        p_sink_series=p_sink,
        step_times=np.arange(n_steps + 1) * dt,
        exit_occupation=exit_occ,
        sample_steps=sample_steps,
    )


def p_sink_from_integral(traj: Trajectory, model: LindbladModel) -> np.ndarray:
    """Escape probability as 2*Gamma * integral of rho_nn dt'.

    Trapezoidal rule on the dense per-step record, evaluated at the
    snapshot times of ``traj``. Agrees with the direct sink read-out
    ``p_sink_series`` up to quadrature error.
    """
    if traj.exit_occupation.size == 0:
        raise ValueError("trajectory has no stored exit-node samples")
    steps = np.diff(traj.step_times)
    increments = 0.5 * steps * (traj.exit_occupation[1:] + traj.exit_occupation[:-1])
    cumulative = np.concatenate([[0.0], np.cumsum(increments)])
    return 2.0 * model.sink_rate * cumulative[traj.sample_steps]


def write_trajectory_csv(traj: Trajectory, path, config: dict | None = None) -> None:
    """Write `t,p_sink,pop_0..pop_N` rows, one per snapshot."""
    n_pop = traj.states[0].dim
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for line in _config_header(config):
            fh.write(line)
        fh.write("t,p_sink," + ",".join(f"pop_{i}" for i in range(n_pop)) + "\n")
        for t, p_sink, state in zip(traj.times, traj.p_sink_series, traj.states):
            pops = ",".join(repr(float(v)) for v in state.populations())
            fh.write(f"{float(t)!r},{float(p_sink)!r},{pops}\n")


def write_states_json(traj: Trajectory, path, config: dict | None = None) -> None:
    """Full snapshots as nested arrays of [re, im] pairs."""
    doc = {
        "config": {} if config is None else config,
        "times": [float(t) for t in traj.times],
        "states": [
            [[[z.real, z.imag] for z in row] for row in state.matrix]
            for state in traj.states
        ],
    }
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(doc, fh, sort_keys=True)
        fh.write("\n")


def _config_header(config: dict | None) -> list[str]:
    if not config:
        return []
    pairs = " ".join(f"{k}={config[k]}" for k in sorted(config))
    return [f"# config: {pairs}\n"]
