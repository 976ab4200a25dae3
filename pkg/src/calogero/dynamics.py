"""Numeric cross-check: Cartesian trajectory integration and conservation drift.

In Cartesian coordinates the Hamiltonian is kinetic-plus-potential separable,

    H = (px^2 + py^2 + pz^2)/2 + V,      V = k / (r^2 sin^2(lam*psi + psi0)),

so explicit symplectic stepping applies (the polar kinetic term would couple
p_psi to r and break the splitting).  The z direction is free and is carried
along for the 3D integrals.  Polar momenta are reconstructed only when the
symbolic integrals are evaluated along the orbit:

    p_r = (x px + y py)/r,      p_psi = x py - y px.

Available steppers: position-Verlet leapfrog (order 2), a symmetric
triple-jump composition of leapfrog (order 4), and a classical RK4 reference
used only for cross-validation.  With k > 0 the inverse-square-sine barrier
is repulsive, so regular orbits never reach the singular rays; crossing below
|sin| = 1e-12 aborts the run with the offending step index.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from math import atan2, cos, hypot, sin

from .phasepoly import PhasePoly

__all__ = [
    "SingularityError",
    "SimConfig",
    "Trajectory",
    "DriftReport",
    "potential",
    "force",
    "integrate",
    "polar_state",
    "compile_float",
    "conserve_report",
    "random_initial_state",
    "write_csv",
    "summary_json",
    "CSV_HEADER",
]

INTEGRATORS = ("leapfrog", "composition4", "rk4-reference")
SIN_FLOOR = 1e-12

# symmetric 4th-order triple-jump composition weights
_W1 = 1.0 / (2.0 - 2.0 ** (1.0 / 3.0))
_W0 = 1.0 - 2.0 * _W1


class SingularityError(RuntimeError):
    """The orbit hit a singular ray sin(lam*psi + psi0) = 0."""

    def __init__(self, message: str, step: int | None = None):
        super().__init__(message)
        self.step = step


@dataclass(frozen=True)
class SimConfig:
    lam: int
    k: float
    state: tuple  # (x, y, z, px, py, pz)
    dt: float
    steps: int
    psi0: float = 0.0
    integrator: str = "composition4"
    seed: int = 0
    sample_every: int = 0  # 0 -> about 1000 samples

    def __post_init__(self):
        if self.lam < 1:
            raise ValueError("lam must be a positive integer")
        if self.k < 0:
            raise ValueError("attractive couplings (k < 0) are out of scope")
        if not (self.dt > 0 and math.isfinite(self.dt * self.steps)):
            raise ValueError("dt must be positive and dt*steps finite")
        if self.steps < 1:
            raise ValueError("steps must be >= 1")
        if self.integrator not in INTEGRATORS:
            raise ValueError(f"unknown integrator {self.integrator!r}")
        if len(self.state) != 6:
            raise ValueError("state must be (x, y, z, px, py, pz)")
        x, y = self.state[0], self.state[1]
        r = hypot(x, y)
        if r < 0.1:
            raise ValueError("initial radius must be >= 0.1")
        if self.k > 0 and abs(sin(self.lam * atan2(y, x) + self.psi0)) < 0.1:
            raise ValueError("initial |sin(lam*psi + psi0)| must be >= 0.1")
        if self.sample_every < 0:
            raise ValueError("sample_every must be non-negative")

    def effective_sample_every(self) -> int:
        return self.sample_every if self.sample_every else max(1, self.steps // 1000)


@dataclass
class Trajectory:
    config: SimConfig
    steps: list = field(default_factory=list)  # sampled step indices
    states: list = field(default_factory=list)  # sampled (x, y, z, px, py, pz)
    min_abs_sin: float = math.inf

    def times(self) -> list:
        return [i * self.config.dt for i in self.steps]


@dataclass
class DriftReport:
    names: tuple
    values: dict  # name -> list of sampled values
    series: dict  # name -> list of relative drifts, one per sample
    max_drift: dict  # name -> max of the series
    initial: dict  # name -> value at the first sample
    energy_drift: float
    steps: int

    def to_json(self) -> dict:
        return {
            "integrals": list(self.names),
            "max_drift": {n: self.max_drift[n] for n in self.names},
            "initial": {n: self.initial[n] for n in self.names},
            "energy_drift": self.energy_drift,
            "steps": self.steps,
        }


def potential(x: float, y: float, lam: int, k: float, psi0: float = 0.0) -> float:
    if k == 0.0:
        return 0.0
    r2 = x * x + y * y
    st = sin(lam * atan2(y, x) + psi0)
    return k / (r2 * st * st)


def force(x: float, y: float, lam: int, k: float, psi0: float = 0.0) -> tuple:
    """-grad V via the polar chain rule; raises SingularityError near sin = 0."""
    if k == 0.0:
        return (0.0, 0.0)
    r = hypot(x, y)
    psi = atan2(y, x)
    theta = lam * psi + psi0
    st = sin(theta)
    if abs(st) < SIN_FLOOR:
        raise SingularityError(f"orbit reached |sin(lam*psi+psi0)| = {abs(st):.3e}")
    ct = cos(theta)
    f_ang = k / (st * st)
    dv_dr = -2.0 * f_ang / r ** 3
    dv_dpsi = -2.0 * lam * k * ct / (st * st * st) / (r * r)
    cp = x / r
    sp = y / r
    dv_dx = cp * dv_dr - sp / r * dv_dpsi
    dv_dy = sp * dv_dr + cp / r * dv_dpsi
    return (-dv_dx, -dv_dy)


def integrate(config: SimConfig) -> Trajectory:
    """Run the configured stepper; deterministic given the config."""
    lam, k, psi0 = config.lam, config.k, config.psi0
    x, y, z, px, py, pz = map(float, config.state)
    dt = config.dt
    every = config.effective_sample_every()
    traj = Trajectory(config)

    def record(step: int):
        traj.steps.append(step)
        traj.states.append((x, y, z, px, py, pz))
        st = abs(sin(lam * atan2(y, x) + psi0))
        if st < traj.min_abs_sin:
            traj.min_abs_sin = st

    def leap(h: float):
        nonlocal x, y, z, px, py, pz
        half = 0.5 * h
        x += half * px
        y += half * py
        z += half * pz
        fx, fy = force(x, y, lam, k, psi0)
        px += h * fx
        py += h * fy
        x += half * px
        y += half * py
        z += half * pz

    def rk4(h: float):
        nonlocal x, y, z, px, py, pz
        fx1, fy1 = force(x, y, lam, k, psi0)
        k1 = (px, py, pz, fx1, fy1, 0.0)
        fx2, fy2 = force(x + 0.5 * h * k1[0], y + 0.5 * h * k1[1], lam, k, psi0)
        k2 = (px + 0.5 * h * k1[3], py + 0.5 * h * k1[4], pz, fx2, fy2, 0.0)
        fx3, fy3 = force(x + 0.5 * h * k2[0], y + 0.5 * h * k2[1], lam, k, psi0)
        k3 = (px + 0.5 * h * k2[3], py + 0.5 * h * k2[4], pz, fx3, fy3, 0.0)
        fx4, fy4 = force(x + h * k3[0], y + h * k3[1], lam, k, psi0)
        k4 = (px + h * k3[3], py + h * k3[4], pz, fx4, fy4, 0.0)
        x += h / 6.0 * (k1[0] + 2.0 * k2[0] + 2.0 * k3[0] + k4[0])
        y += h / 6.0 * (k1[1] + 2.0 * k2[1] + 2.0 * k3[1] + k4[1])
        z += h * pz
        px += h / 6.0 * (k1[3] + 2.0 * k2[3] + 2.0 * k3[3] + k4[3])
        py += h / 6.0 * (k1[4] + 2.0 * k2[4] + 2.0 * k3[4] + k4[4])

    record(0)
    for step in range(1, config.steps + 1):
        try:
            if config.integrator == "leapfrog":
                leap(dt)
            elif config.integrator == "composition4":
                leap(_W1 * dt)
                leap(_W0 * dt)
                leap(_W1 * dt)
            else:
                rk4(dt)
        except SingularityError as exc:
            raise SingularityError(f"{exc} at step {step}", step=step) from None
        if step % every == 0 or step == config.steps:
            record(step)
    return traj


def polar_state(x, y, z, px, py, pz) -> tuple:
    """(r, psi, z, p_r, p_psi, p_z) from the Cartesian state."""
    r = hypot(x, y)
    psi = atan2(y, x)
    pr = (x * px + y * py) / r
    ppsi = x * py - y * px
    return (r, psi, z, pr, ppsi, pz)


def compile_float(poly: PhasePoly):
    """Flatten a jet-free PhasePoly into a fast float evaluator."""
    data = []
    for key, coeff in poly.items():
        terms = []
        for t in coeff.terms:
            if t.jets:
                raise ValueError("cannot compile jet symbols; specialize first")
            terms.append((float(t.q), t.k_exp, t.r_exp, t.z_exp, t.s_exp, t.c_exp))
        data.append((key, terms))

    def evaluate(r, s, c, z, k, pr, ppsi, pz) -> float:
        total = 0.0
        for (ir, ipsi, iz), terms in data:
            acc = 0.0
            for q, ke, re, ze, se, ce in terms:
                val = q
                if ke:
                    val *= k ** ke
                if re:
                    val *= r ** re
                if ze:
                    val *= z ** ze
                if se:
                    val *= s ** se
                if ce:
                    val *= c ** ce
                acc += val
            if ir:
                acc *= pr ** ir
            if ipsi:
                acc *= ppsi ** ipsi
            if iz:
                acc *= pz ** iz
            total += acc
        return total

    return evaluate


def conserve_report(traj: Trajectory, integrals: dict, eps: float = 1e-12) -> DriftReport:
    """Relative drift |Q(t) - Q(0)| / max(|Q(0)|, eps) for each named integral."""
    cfg = traj.config
    lam, k, psi0 = cfg.lam, cfg.k, cfg.psi0
    names = tuple(integrals)
    evaluators = {n: compile_float(p) for n, p in integrals.items()}
    values = {n: [] for n in names}
    series = {n: [] for n in names}
    initial = {}
    energy0 = None
    energy_drift = 0.0
    for x, y, z, px, py, pz in traj.states:
        r, psi, zz, pr, ppsi, ppz = polar_state(x, y, z, px, py, pz)
        theta = lam * psi + psi0
        s = sin(theta)
        c = cos(theta)
        for n in names:
            val = evaluators[n](r, s, c, zz, k, pr, ppsi, ppz)
            values[n].append(val)
            if n not in initial:
                initial[n] = val
                series[n].append(0.0)
            else:
                series[n].append(abs(val - initial[n]) / max(abs(initial[n]), eps))
        energy = 0.5 * (px * px + py * py + pz * pz) + potential(x, y, lam, k, psi0)
        if energy0 is None:
            energy0 = energy
        else:
            energy_drift = max(
                energy_drift, abs(energy - energy0) / max(abs(energy0), eps)
            )
    return DriftReport(
        names=names,
        values=values,
        series=series,
        max_drift={n: max(series[n]) for n in names},
        initial=initial,
        energy_drift=energy_drift,
        steps=cfg.steps,
    )


def random_initial_state(
    seed: int, lam: int, psi0: float = 0.0, accept=None, three_d: bool = True
) -> tuple:
    """Deterministic safe initial condition, away from the singular rays.

    ``accept`` may reject states (e.g. to keep integral values away from
    zero); rejected draws are redrawn from the same stream.
    """
    rng = random.Random(seed)
    for _ in range(1000):
        r = rng.uniform(1.2, 1.8)
        theta = rng.uniform(math.asin(0.5), math.pi - math.asin(0.5))
        psi = (theta - psi0 + 2.0 * math.pi * rng.randrange(lam)) / lam
        pr = rng.uniform(-0.6, 0.6)
        ppsi = rng.choice((-1.0, 1.0)) * rng.uniform(0.7, 1.3)
        pz = rng.choice((-1.0, 1.0)) * rng.uniform(0.3, 0.8) if three_d else 0.0
        x = r * cos(psi)
        y = r * sin(psi)
        px = pr * cos(psi) - ppsi / r * sin(psi)
        py = pr * sin(psi) + ppsi / r * cos(psi)
        state = (x, y, 0.5 if three_d else 0.0, px, py, pz)
        if accept is None or accept(state):
            return state
    raise RuntimeError("could not find an acceptable initial state")


CSV_HEADER = "step,t,x,y,z,px,py,pz,H,L,I,driftH,driftL,driftI"


def write_csv(traj: Trajectory, report: DriftReport, path: str) -> None:
    """Plot-ready CSV with 17-significant-digit values; needs H, L, I in the report."""
    cfg = traj.config
    lines = [CSV_HEADER]
    for idx, (step, state) in enumerate(zip(traj.steps, traj.states)):
        t = step * cfg.dt
        row = [str(step)] + [_g17(v) for v in (t, *state)]
        row += [_g17(report.values[n][idx]) for n in ("H", "L", "I")]
        row += [_g17(report.series[n][idx]) for n in ("H", "L", "I")]
        lines.append(",".join(row))
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")


def _g17(v: float) -> str:
    return f"{v:.17g}"


def summary_json(traj: Trajectory, report: DriftReport) -> dict:
    cfg = traj.config
    return {
        "lambda": cfg.lam,
        "k": cfg.k,
        "psi0": cfg.psi0,
        "dt": cfg.dt,
        "steps": cfg.steps,
        "integrator": cfg.integrator,
        "seed": cfg.seed,
        "samples": len(traj.steps),
        "min_abs_sin": traj.min_abs_sin,
        "max_drift": {n: report.max_drift[n] for n in report.names},
        "energy_drift": report.energy_drift,
    }
