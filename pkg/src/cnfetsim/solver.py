"""Modified nodal analysis: DC operating point and fixed-step transient.

Unknowns are node voltages plus one branch current per voltage source.
Nonlinear devices are linearized by Newton-Raphson; convergence demands
the KCL residual at every node fall below abstol + reltol * (largest
branch current incident on that node), with source/pin constraint rows
held to vtol.  A gmin conductance from every node to ground regularizes
the matrix (capacitive-input gates make nodes that are DC-floating);
DC non-convergence falls back to gmin stepping (relax x10 up to 1e-3 S,
then re-tighten).

Transient integration is fixed-step backward Euler or trapezoidal with
a single backward-Euler startup step, using capacitor companion models.
The linear solve is dense LU with partial pivoting; benchmark circuits
stay under a hundred nodes, so sparse machinery would be dead weight.

One run is single-threaded and deterministic.  Circuits are immutable,
so independent runs parallelize trivially if a caller wants that.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .devices import CnfetParams, _drain_current
from .netlist import GROUND, Circuit, Element, ElementKind, NetlistError

GMIN_STEP_CEILING = 1.0e-3


class Integration(Enum):
    BACKWARD_EULER = "backward_euler"
    TRAPEZOIDAL = "trapezoidal"


class ConvergenceError(Exception):
    """Newton iteration failed; carries the last residual and the timestamp."""

    def __init__(self, message: str, residual: float = math.nan, time: float | None = None):
        self.residual = residual
        self.time = time
        at = "" if time is None else f" at t={time:.6g}s"
        super().__init__(f"{message}{at} (last residual {residual:.3e} A)")


class IllConditionedDividerError(Exception):
    """A purely-capacitive node cluster has no driven boundary to share charge from."""


@dataclass
class SolverConfig:
    abstol: float = 1e-12
    reltol: float = 1e-4
    vtol: float = 1e-6
    max_newton_iters: int = 100
    gmin: float = 1e-12
    timestep: float = 1e-12
    integration: Integration = Integration.TRAPEZOIDAL
    use_initial_conditions: bool = False
    # Newton step clamp, applied only when nonlinear devices are present
    # (a linear circuit must converge in one full-length step).  Kept at
    # junction scale: larger moves overshoot whole square-law regions and
    # re-randomize the device states every iteration.
    max_voltage_step: float = 0.3

    def __post_init__(self) -> None:
        for name in ("abstol", "reltol", "vtol", "gmin", "timestep", "max_voltage_step"):
            if getattr(self, name) <= 0:
                raise ValueError(f"SolverConfig.{name} must be positive")
        if self.max_newton_iters < 1:
            raise ValueError("SolverConfig.max_newton_iters must be >= 1")


@dataclass
class TransientResult:
    """Time series of node voltages and source branch currents."""

    times: np.ndarray
    node_voltages: dict[str, np.ndarray]
    source_currents: dict[str, np.ndarray]

    def voltage(self, node: str) -> np.ndarray:
        return self.node_voltages[node]

    def current(self, source: str) -> np.ndarray:
        return self.source_currents[source]

    def to_csv(self) -> str:
        """CSV with header time,<node>...,<isource>..., 9 significant digits."""
        names = sorted(self.node_voltages)
        sources = list(self.source_currents)
        header = ",".join(["time", *names, *sources])
        cols = [self.times] + [self.node_voltages[n] for n in names]
        cols += [self.source_currents[s] for s in sources]
        lines = [header]
        for row in zip(*cols):
            lines.append(",".join(f"{v:.8e}" for v in row))
        return "\n".join(lines) + "\n"


class _Compiled:
    """Per-circuit index maps and constant stamps, built once per analysis."""

    def __init__(self, circuit: Circuit):
        if not circuit.is_flat:
            raise NetlistError("not-flat", "solver requires a flattened circuit")
        self.circuit = circuit
        self.node_names = sorted(circuit.nodes - {GROUND})
        self.node_index = {name: i for i, name in enumerate(self.node_names)}
        self.node_index[GROUND] = -1
        self.n_nodes = len(self.node_names)

        self.sources: list[Element] = [
            el for el in circuit.elements if el.kind is ElementKind.VSOURCE
        ]
        self.size = self.n_nodes + len(self.sources)

        # (i, j, conductance) with -1 for ground
        self.resistors: list[tuple[int, int, float]] = []
        # (i, j, capacitance)
        self.capacitors: list[tuple[int, int, float]] = []
        # (d, g, s, polarity_is_handled_inside, k, vth, lam)
        self.devices: list[tuple[int, int, int, object, float, float, float]] = []

        for el in circuit.elements:
            idx = [self.node_index[t] for t in el.terminals]
            if el.kind is ElementKind.RESISTOR:
                self.resistors.append((idx[0], idx[1], 1.0 / el.value))  # type: ignore[operator]
            elif el.kind is ElementKind.CAPACITOR:
                self.capacitors.append((idx[0], idx[1], el.value))  # type: ignore[arg-type]
            elif el.kind in (ElementKind.CNFET, ElementKind.MOSFET):
                card = circuit.models[el.model]  # validated at parse
                p = card.params
                if isinstance(p, CnfetParams):
                    k, vth, lam = p.transconductance, p.threshold, 0.0
                else:
                    k, vth, lam = p.transconductance, p.threshold, p.channel_length_modulation
                self.devices.append((idx[0], idx[1], idx[2], p.polarity, k, vth, lam))

        self.has_devices = bool(self.devices)
        self._build_arrays()

    def _build_arrays(self) -> None:
        """Index arrays for the vectorized residual/scale assembly.

        Ground (-1) is handled with a padded solution vector whose last
        entry is pinned to zero, so negative indices need no branches in
        the hot loop.
        """
        res_i = [i for i, _, _ in self.resistors]
        res_j = [j for _, j, _ in self.resistors]
        cap_i = [i for i, _, _ in self.capacitors]
        cap_j = [j for _, j, _ in self.capacitors]
        self.res_i = np.array(res_i, dtype=np.intp)
        self.res_j = np.array(res_j, dtype=np.intp)
        self.res_g = np.array([g for _, _, g in self.resistors])
        self.cap_i = np.array(cap_i, dtype=np.intp)
        self.cap_j = np.array(cap_j, dtype=np.intp)
        self.cap_c = np.array([c for _, _, c in self.capacitors])
        self.src_p = np.array(
            [self.node_index[el.terminals[0]] for el in self.sources], dtype=np.intp
        )
        self.src_m = np.array(
            [self.node_index[el.terminals[1]] for el in self.sources], dtype=np.intp
        )
        self.n_res = len(self.resistors)
        self.n_cap = len(self.capacitors)
        self.n_src = len(self.sources)
        # Branch-current vector layout: resistors, capacitors, sources.
        # scale_node[k] takes max(|current[scale_branch[k]]|).
        nodes: list[int] = []
        branches: list[int] = []
        for b, (i, j) in enumerate(zip(res_i + cap_i, res_j + cap_j)):
            for t in (i, j):
                if t >= 0:
                    nodes.append(t)
                    branches.append(b)
        for b, el in enumerate(self.sources):
            for t in el.terminals:
                t_idx = self.node_index[t]
                if t_idx >= 0:
                    nodes.append(t_idx)
                    branches.append(self.n_res + self.n_cap + b)
        self.scale_node = np.array(nodes, dtype=np.intp)
        self.scale_branch = np.array(branches, dtype=np.intp)

    def base_matrix(self, gmin: float, cap_geq: float | None) -> np.ndarray:
        """Constant part of the Jacobian: resistors, gmin, sources, companions.

        cap_geq is the companion conductance multiplier applied to each
        capacitance (1/h for backward Euler, 2/h for trapezoidal); None
        opens the capacitors (DC analysis).
        """
        g = np.zeros((self.size, self.size))
        for i in range(self.n_nodes):
            g[i, i] += gmin
        for i, j, cond in self.resistors:
            _stamp_conductance(g, i, j, cond)
        if cap_geq is not None:
            for i, j, c in self.capacitors:
                _stamp_conductance(g, i, j, cap_geq * c)
        for b, el in enumerate(self.sources):
            row = self.n_nodes + b
            p, m = self.node_index[el.terminals[0]], self.node_index[el.terminals[1]]
            if p >= 0:
                g[p, row] += 1.0
                g[row, p] += 1.0
            if m >= 0:
                g[m, row] -= 1.0
                g[row, m] -= 1.0
        return g


def _lin_solve(jac: np.ndarray, rhs: np.ndarray) -> np.ndarray:
    """Row-equilibrated LU solve with one round of iterative refinement.

    MNA rows span ~10 decades (gmin-only nodes against capacitor
    companions), which costs a naive LU six digits and leaves Newton
    chasing a residual floor it can never reach.  Scaling each row to
    unit max restores the lost accuracy; the refinement step mops up.
    """
    r = np.max(np.abs(jac), axis=1)
    r[r == 0.0] = 1.0
    scaled = jac / r[:, None]
    dx = np.linalg.solve(scaled, rhs / r)
    resid = rhs - jac @ dx
    dx += np.linalg.solve(scaled, resid / r)
    return dx


def _voltage_box(comp: _Compiled) -> tuple[float, float]:
    """Node-voltage bounds for Newton: the source range plus headroom.

    Every voltage in a source-driven RC/FET circuit lies between the
    extreme source levels; allowing half the swing (at least 1 V) of
    overshoot keeps iterates out of absurd square-law regions without
    ever binding at the solution.
    """
    levels = [0.0]
    for el in comp.sources:
        wf = el.waveform
        assert wf is not None
        if wf.kind == "dc":
            levels.append(wf.level)
        else:
            levels.extend(v for _, v in wf.points)
    lo, hi = min(levels), max(levels)
    slack = max(hi - lo, 1.0)
    return lo - 0.5 * slack, hi + 0.5 * slack


def _stamp_conductance(g: np.ndarray, i: int, j: int, cond: float) -> None:
    if i >= 0:
        g[i, i] += cond
    if j >= 0:
        g[j, j] += cond
    if i >= 0 and j >= 0:
        g[i, j] -= cond
        g[j, i] -= cond


class _Newton:
    """One Newton solve against a fixed base matrix and constant vector.

    The residual is F(x) = base @ x + const + device currents; `const`
    holds -V(t) in source rows and capacitor companion history currents
    in node rows.  Pinned rows replace a node's KCL equation with
    v_node = value (used by the floating-node initializer).
    """

    def __init__(self, comp: _Compiled, cfg: SolverConfig, base: np.ndarray,
                 pinned: list[tuple[int, float]] | None = None):
        self.comp = comp
        self.cfg = cfg
        self.base = base
        self.pinned = pinned or []
        self.pinned_rows = [row for row, _ in self.pinned]
        self.v_lo, self.v_hi = _voltage_box(comp)

    def _assemble(self, x: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        comp = self.comp
        nn = comp.n_nodes
        f = self.base @ x + self.const
        jac = self.base.copy()

        # Branch currents (resistors, capacitors, sources) feed the
        # per-node tolerance scale; x_pad[-1] stands in for ground.
        x_pad = np.append(x, 0.0)
        currents = np.empty(comp.n_res + comp.n_cap + comp.n_src)
        currents[: comp.n_res] = comp.res_g * (x_pad[comp.res_i] - x_pad[comp.res_j])
        geq, hist = self.cap_companion
        currents[comp.n_res: comp.n_res + comp.n_cap] = (
            geq * (x_pad[comp.cap_i] - x_pad[comp.cap_j]) + hist
        )
        currents[comp.n_res + comp.n_cap:] = x[nn:]
        scale = np.zeros(nn)
        np.maximum.at(scale, comp.scale_node, np.abs(currents[comp.scale_branch]))

        if comp.has_devices:
            xl = x.tolist()
            xl.append(0.0)  # ground sentinel at index -1
            for d, g_, s, pol, k, vth, lam in comp.devices:
                vs = xl[s]
                i_ds, gm, gds = _drain_current(pol, k, vth, lam, xl[g_] - vs, xl[d] - vs)
                a_i = abs(i_ds)
                if d >= 0:
                    f[d] += i_ds
                    jac[d, d] += gds
                    if g_ >= 0:
                        jac[d, g_] += gm
                    if s >= 0:
                        jac[d, s] -= gm + gds
                    if a_i > scale[d]:
                        scale[d] = a_i
                if s >= 0:
                    f[s] -= i_ds
                    jac[s, s] += gm + gds
                    if d >= 0:
                        jac[s, d] -= gds
                    if g_ >= 0:
                        jac[s, g_] -= gm
                    if a_i > scale[s]:
                        scale[s] = a_i

        for row, value in self.pinned:
            f[row] = x[row] - value
            jac[row, :] = 0.0
            jac[row, row] = 1.0
        return f, jac, scale

    def _converged(self, f: np.ndarray, scale: np.ndarray) -> bool:
        cfg = self.cfg
        n = self.comp.n_nodes
        node_tol = cfg.abstol + cfg.reltol * scale
        node_res = np.abs(f[:n])
        if self.pinned_rows:
            for row in self.pinned_rows:
                if abs(f[row]) > cfg.vtol:
                    return False
                node_res[row] = 0.0
        if np.any(node_res > node_tol):
            return False
        return bool(np.all(np.abs(f[n:]) <= cfg.vtol))

    def solve(self, x0: np.ndarray, const: np.ndarray,
              cap_companion: tuple[np.ndarray, np.ndarray], time: float | None = None
              ) -> tuple[np.ndarray, int]:
        """Returns (solution, iterations); iterations counts linear solves.

        Nonlinear steps are safeguarded by a per-component voltage clamp
        plus cumulative damping of direction-reversing components; a
        linear circuit takes the raw Newton step and lands exactly in
        one iteration.
        """
        self.const = const
        self.cap_companion = cap_companion
        cfg = self.cfg
        nn = self.comp.n_nodes
        x = x0.copy()
        prev_dx: np.ndarray | None = None
        damp = np.ones(self.comp.size)
        residual = math.inf
        for it in range(cfg.max_newton_iters + 1):
            f, jac, scale = self._assemble(x)
            residual = float(np.max(np.abs(f))) if len(f) else 0.0
            if self._converged(f, scale):
                return x, it
            if it == cfg.max_newton_iters:
                break
            try:
                dx = _lin_solve(jac, -f)
            except np.linalg.LinAlgError as exc:
                raise ConvergenceError(f"singular MNA matrix: {exc}", residual, time) from exc
            if self.comp.has_devices:
                # An inverter output on its vertical transfer segment (both
                # devices saturated, gmin-only diagonal) legitimately asks
                # for a kilovolt move; clamping per component lets that node
                # walk to its region in a few steps without squashing the
                # rest of the update.  Components that keep reversing
                # direction get a cumulative damping factor: that collapses
                # the period-2 orbits Newton falls into at the square law's
                # curvature kinks (the usual transmission-gate contention
                # jam), while monotone region walks keep full speed.
                np.clip(dx[:nn], -cfg.max_voltage_step, cfg.max_voltage_step, out=dx[:nn])
                if prev_dx is not None:
                    flipped = dx * prev_dx < 0.0
                    damp[flipped] = np.maximum(damp[flipped] * 0.5, 1.0 / 256.0)
                    damp[~flipped] = np.minimum(damp[~flipped] * 2.0, 1.0)
                prev_dx = dx.copy()
                x += damp * dx
                np.clip(x[:nn], self.v_lo, self.v_hi, out=x[:nn])
            else:
                x += dx
        raise ConvergenceError(
            f"Newton failed after {cfg.max_newton_iters} iterations", residual, time
        )


def _source_const(comp: _Compiled, values: list[float]) -> np.ndarray:
    const = np.zeros(comp.size)
    for b, v in enumerate(values):
        const[comp.n_nodes + b] = -v
    return const


def _solve_dc(comp: _Compiled, cfg: SolverConfig, t: float = 0.0,
              pinned: list[tuple[int, float]] | None = None,
              initial_guess: np.ndarray | None = None,
              src_overrides: dict[int, float] | None = None) -> tuple[np.ndarray, int]:
    """DC solve with gmin stepping fallback: relax x10 to 1e-3 S, re-tighten."""
    src_values = [el.waveform.value_at(t) for el in comp.sources]  # type: ignore[union-attr]
    if src_overrides:
        for b, v in src_overrides.items():
            src_values[b] = v
    const = _source_const(comp, src_values)
    no_caps = (np.zeros(comp.n_cap), np.zeros(comp.n_cap))
    x0 = initial_guess if initial_guess is not None else np.zeros(comp.size)

    def attempt(gmin: float, guess: np.ndarray) -> tuple[np.ndarray, int]:
        newton = _Newton(comp, cfg, comp.base_matrix(gmin, None), pinned)
        return newton.solve(guess, const, no_caps)

    try:
        return attempt(cfg.gmin, x0)
    except ConvergenceError as first_failure:
        # Walk gmin up until something converges, then walk back down.
        ladder: list[float] = []
        g = cfg.gmin * 10.0
        while g <= GMIN_STEP_CEILING:
            ladder.append(g)
            g *= 10.0
        x = None
        start = None
        for idx, g in enumerate(ladder):
            try:
                x, _ = attempt(g, x0)
                start = idx
                break
            except ConvergenceError:
                continue
        if x is None or start is None:
            raise first_failure
        for g in reversed(ladder[:start]):
            try:
                x, _ = attempt(g, x)
            except ConvergenceError as exc:
                raise ConvergenceError(
                    f"gmin stepping stalled while re-tightening at gmin={g:.1e} S",
                    exc.residual,
                ) from exc
        try:
            return attempt(cfg.gmin, x)
        except ConvergenceError as exc:
            raise ConvergenceError(
                "gmin stepping converged only with relaxed gmin", exc.residual
            ) from exc


def dc_operating_point(circuit: Circuit, cfg: SolverConfig | None = None,
                       initial_guess: dict[str, float] | None = None) -> dict[str, float]:
    """Newton-converged DC solution; capacitors open, gmin to ground everywhere.

    Returns node -> volts including ground, plus one "i(<source>)" entry
    per voltage source carrying its branch current (positive current
    flows from the + terminal through the source to the - terminal).
    """
    cfg = cfg or SolverConfig()
    comp = _Compiled(circuit)
    guess = None
    if initial_guess:
        guess = np.zeros(comp.size)
        for name, v in initial_guess.items():
            idx = comp.node_index.get(name, -1)
            if idx >= 0:
                guess[idx] = v
    x, _ = _solve_dc(comp, cfg, pinned=None, initial_guess=guess)
    return _solution_dict(comp, x)


def _solution_dict(comp: _Compiled, x: np.ndarray) -> dict[str, float]:
    out = {name: float(x[i]) for name, i in comp.node_index.items() if i >= 0}
    out[GROUND] = 0.0
    for b, el in enumerate(comp.sources):
        out[f"i({el.name})"] = float(x[comp.n_nodes + b])
    return out


# --- floating-node initialization --------------------------------------------


def _floating_nodes(comp: _Compiled) -> set[int]:
    """Nodes whose every current-carrying connection is a capacitor.

    Transistor gates draw no current in this model, so a gate terminal
    does not anchor a node; drain and source terminals do.
    """
    caps_at: dict[int, int] = {}
    anchored: set[int] = set()
    for i, j, _ in comp.capacitors:
        for t in (i, j):
            if t >= 0:
                caps_at[t] = caps_at.get(t, 0) + 1
    for i, j, _ in comp.resistors:
        anchored.update(t for t in (i, j) if t >= 0)
    for el in comp.sources:
        anchored.update(
            comp.node_index[t] for t in el.terminals if comp.node_index[t] >= 0
        )
    for d, _, s, *_ in comp.devices:
        anchored.update(t for t in (d, s) if t >= 0)
    return {n for n in caps_at if n not in anchored}


def _charge_share(comp: _Compiled, floating: set[int], known: dict[int, float]) -> dict[int, float]:
    """Zero-stored-charge solution of each floating cluster.

    A single floating node reduces to sum(C_i * V_i) / sum(C_i) over its
    capacitors' far-end driven voltages; clusters coupled through
    capacitors solve as one linear system.  A cluster with no driven
    boundary at all has no unique solution and raises.
    """
    order = sorted(floating)
    pos = {n: i for i, n in enumerate(order)}
    k = len(order)
    a = np.zeros((k, k))
    b = np.zeros(k)
    driven_touch = [False] * k
    for i, j, c in comp.capacitors:
        for this, other in ((i, j), (j, i)):
            if this not in pos:
                continue
            r = pos[this]
            a[r, r] += c
            if other in pos:
                a[r, pos[other]] -= c
            else:
                b[r] += c * (known[other] if other >= 0 else 0.0)
                driven_touch[r] = True

    # Every connected component must touch at least one driven node.
    adj: dict[int, set[int]] = {n: set() for n in order}
    for i, j, _ in comp.capacitors:
        if i in pos and j in pos:
            adj[i].add(j)
            adj[j].add(i)
    seen: set[int] = set()
    for start in order:
        if start in seen:
            continue
        comp_nodes = []
        stack = [start]
        while stack:
            n = stack.pop()
            if n in seen:
                continue
            seen.add(n)
            comp_nodes.append(n)
            stack.extend(adj[n] - seen)
        if not any(driven_touch[pos[n]] for n in comp_nodes):
            names = ", ".join(comp.node_names[n] for n in sorted(comp_nodes))
            raise IllConditionedDividerError(
                f"capacitive nodes coupled only to other capacitive nodes: {names}"
            )
    sol = np.linalg.solve(a, b)
    return {n: float(sol[pos[n]]) for n in order}


def initialize_floating_nodes(circuit: Circuit, input_levels: dict[str, float] | None = None,
                              cfg: SolverConfig | None = None) -> dict[str, float]:
    """Consistent initial node voltages with capacitive nodes charge-shared.

    Purely-capacitive nodes take the zero-stored-charge divider value of
    their far-end driven voltages; every other node comes from a DC
    operating point computed with those nodes pinned.  Because a divider
    may hang off a gate output that itself depends on another divider,
    the pin/solve cycle iterates to a fixed point (feed-forward ladders
    settle in one pass per stage; designs with capacitive feedback take
    a couple more).
    """
    cfg = cfg or SolverConfig()
    comp = _Compiled(circuit)
    # For a node already driven by a grounded source, an input level
    # overrides the source value; otherwise the node's KCL row is pinned.
    source_at: dict[int, int] = {}
    for b, el in enumerate(comp.sources):
        p, m = comp.node_index[el.terminals[0]], comp.node_index[el.terminals[1]]
        if p >= 0 and m == -1:
            source_at.setdefault(p, b)
    levels: dict[int, float] = {}
    src_overrides: dict[int, float] = {}
    if input_levels:
        for name, v in input_levels.items():
            idx = comp.node_index.get(name)
            if idx is None:
                raise KeyError(f"input level names unknown node {name!r}")
            if idx < 0:
                continue
            if idx in source_at:
                src_overrides[source_at[idx]] = float(v)
            else:
                levels[idx] = float(v)

    floating = _floating_nodes(comp)
    values: dict[int, float] = {}
    x = None
    for _ in range(len(floating) + 3):
        pins = [(idx, v) for idx, v in {**values, **levels}.items()]
        x, _ = _solve_dc(comp, cfg, pinned=pins, initial_guess=x, src_overrides=src_overrides)
        if not floating:
            break
        known = {i: float(x[i]) for i in range(comp.n_nodes)}
        known.update(levels)
        new_values = _charge_share(comp, floating, known)
        if values and max(abs(new_values[n] - values[n]) for n in floating) <= max(cfg.vtol, 1e-9):
            values = new_values
            break
        values = new_values
    else:
        raise ConvergenceError("floating-node initialization did not reach a fixed point")

    pins = [(idx, v) for idx, v in {**values, **levels}.items()]
    x, _ = _solve_dc(comp, cfg, pinned=pins, initial_guess=x, src_overrides=src_overrides)
    return _solution_dict(comp, x)


# --- transient ----------------------------------------------------------------


def _time_grid(tstop: float, dt: float) -> np.ndarray:
    if tstop <= 0:
        raise ValueError(f"tstop must be positive, got {tstop}")
    n = int(math.floor(tstop / dt + 1e-9))
    times = [k * dt for k in range(n + 1)]
    if times[-1] < tstop * (1.0 - 1e-12):
        times.append(tstop)
    return np.array(times)


def transient(circuit: Circuit, cfg: SolverConfig, tstop: float,
              initial_conditions: dict[str, float] | None = None) -> TransientResult:
    """Fixed-step implicit transient over [0, tstop].

    Starts from the DC operating point unless cfg.use_initial_conditions,
    in which case `initial_conditions` supplies the t=0 node voltages
    (missing nodes default to 0).  The first step is always backward
    Euler; later steps follow cfg.integration.  A non-converging step is
    retried once as two half steps before failing.
    """
    comp = _Compiled(circuit)
    times = _time_grid(tstop, cfg.timestep)
    nsteps = len(times) - 1

    x = np.zeros(comp.size)
    if cfg.use_initial_conditions:
        ics = initial_conditions or {}
        source_rows = {f"i({el.name})": comp.n_nodes + b for b, el in enumerate(comp.sources)}
        have_currents = False
        for name, v in ics.items():
            if name in source_rows:
                x[source_rows[name]] = float(v)
                have_currents = True
                continue
            idx = comp.node_index.get(name)
            if idx is None:
                raise KeyError(f"initial condition names unknown node {name!r}")
            if idx >= 0:
                x[idx] = float(v)
        if not have_currents:
            _settle_source_currents(comp, cfg, x, t=0.0)
    else:
        x, _ = _solve_dc(comp, cfg, pinned=None)

    x_pad = np.append(x, 0.0)
    cap_v = x_pad[comp.cap_i] - x_pad[comp.cap_j]
    cap_i_state = np.zeros(comp.n_cap)

    history = np.empty((nsteps + 1, comp.size))
    history[0] = x

    # Source values for the whole grid, up front (PWL is interpolation
    # with constant extrapolation, which is exactly np.interp).
    src_grid = np.empty((comp.n_src, len(times)))
    for b, el in enumerate(comp.sources):
        wf = el.waveform
        assert wf is not None
        if wf.kind == "dc":
            src_grid[b, :] = wf.level
        else:
            pts_t = np.array([t for t, _ in wf.points])
            pts_v = np.array([v for _, v in wf.points])
            src_grid[b, :] = np.interp(times, pts_t, pts_v)

    base_cache: dict[tuple[str, float], _Newton] = {}

    def newton_for(method: Integration, h: float) -> _Newton:
        key = (method.value, h)
        if key not in base_cache:
            geq_mult = (1.0 / h) if method is Integration.BACKWARD_EULER else (2.0 / h)
            base_cache[key] = _Newton(comp, cfg, comp.base_matrix(cfg.gmin, geq_mult))
        return base_cache[key]

    cap_i_valid = comp.cap_i >= 0
    cap_j_valid = comp.cap_j >= 0

    def step(x_in, v_state, i_state, src_vals, t_new, h, method):
        geq_mult = (1.0 / h) if method is Integration.BACKWARD_EULER else (2.0 / h)
        geq = geq_mult * comp.cap_c
        if method is Integration.BACKWARD_EULER:
            hist = -geq * v_state
        else:
            hist = -geq * v_state - i_state
        const = np.zeros(comp.size)
        const[comp.n_nodes:] = -src_vals
        np.add.at(const, comp.cap_i[cap_i_valid], hist[cap_i_valid])
        np.subtract.at(const, comp.cap_j[cap_j_valid], hist[cap_j_valid])
        x_new, _ = newton_for(method, h).solve(x_in, const, (geq, hist), time=t_new)
        xp = np.append(x_new, 0.0)
        v_new = xp[comp.cap_i] - xp[comp.cap_j]
        return x_new, v_new, geq * v_new + hist

    for k in range(nsteps):
        t0, t1 = times[k], times[k + 1]
        h = t1 - t0
        method = Integration.BACKWARD_EULER if k == 0 else cfg.integration
        try:
            x, cap_v, cap_i_state = step(x, cap_v, cap_i_state, src_grid[:, k + 1], t1, h, method)
        except ConvergenceError:
            # One rejection allowed: attempt the step as two half steps.
            src_mid = np.array([
                el.waveform.value_at(t0 + h / 2) for el in comp.sources  # type: ignore[union-attr]
            ])
            x_mid, v_mid, i_mid = step(x, cap_v, cap_i_state, src_mid, t0 + h / 2, h / 2, method)
            x, cap_v, cap_i_state = step(
                x_mid, v_mid, i_mid, src_grid[:, k + 1], t1, h / 2, cfg.integration
            )
        history[k + 1] = x

    node_voltages = {name: history[:, comp.node_index[name]].copy() for name in comp.node_names}
    source_currents = {
        el.name: history[:, comp.n_nodes + b].copy() for b, el in enumerate(comp.sources)
    }
    return TransientResult(times=times, node_voltages=node_voltages, source_currents=source_currents)


def _settle_source_currents(comp: _Compiled, cfg: SolverConfig, x: np.ndarray, t: float) -> None:
    """Back-fill source branch currents for a supplied-IC starting point.

    With node voltages fixed and capacitor currents taken as zero at
    t=0, each source current must absorb the static device/resistor
    current at its positive terminal (or negative, if + is ground).
    """
    src_values = [el.waveform.value_at(t) for el in comp.sources]  # type: ignore[union-attr]
    const = _source_const(comp, src_values)
    newton = _Newton(comp, cfg, comp.base_matrix(cfg.gmin, None))
    newton.const = const
    newton.cap_companion = (np.zeros(comp.n_cap), np.zeros(comp.n_cap))
    f, _, _ = newton._assemble(x)
    for b, el in enumerate(comp.sources):
        p = comp.node_index[el.terminals[0]]
        m = comp.node_index[el.terminals[1]]
        row = comp.n_nodes + b
        if p >= 0:
            delta = -f[p]
            x[row] += delta
            f[p] += delta
        elif m >= 0:
            delta = f[m]
            x[row] += delta
            f[m] -= delta
