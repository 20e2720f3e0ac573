"""Network model and rectangular-coordinate power flow polynomials.

Buses are PQ, PV, or Slack; branches are Π-model lines with optional
off-nominal transformer taps.  ``build_pf_system`` converts a network
into the square degree-2 polynomial system in the real variables
(V_d, V_q) of every non-slack bus, with the slack voltage substituted
in as a constant.

Sign convention: injections are net (generation minus load), so loads
carry negative p_inject/q_inject.  All electrical quantities are per
unit on a 100 MVA base; branch phase shifts are degrees in files and
radians internally.
"""

from __future__ import annotations

import cmath
import enum
import json
import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from . import cliques, polysys
from .polysys import Monomial, PolynomialSystem

JSON_SCHEMA_VERSION = 1


class ModelError(ValueError):
    """A network violates the physical model's invariants."""


class BusKind(str, enum.Enum):
    PQ = "PQ"
    PV = "PV"
    SLACK = "Slack"


@dataclass(frozen=True)
class Bus:
    """One network bus.

    p_inject/q_inject are net injections (generation minus constant-power
    load); shunt_g/shunt_b hold the constant-impedance load component.
    """

    id: int
    kind: BusKind
    p_inject: float = 0.0
    q_inject: float = 0.0
    v_setpoint: float = 1.0
    shunt_g: float = 0.0
    shunt_b: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "kind", BusKind(self.kind))
        if self.id < 1:
            raise ModelError(f"bus id {self.id} is not positive")
        if self.kind in (BusKind.PV, BusKind.SLACK) and not self.v_setpoint > 0:
            raise ModelError(
                f"bus {self.id}: {self.kind.value} bus needs v_setpoint > 0")


@dataclass(frozen=True)
class Branch:
    """Π-model branch; tau/theta_deg describe an optional transformer."""

    from_bus: int
    to_bus: int
    r: float
    x: float
    b_shunt: float = 0.0
    tau: float = 1.0
    theta_deg: float = 0.0

    def __post_init__(self):
        if self.from_bus == self.to_bus:
            raise ModelError(f"branch {self.from_bus}-{self.to_bus} is a self-loop")
        if self.r < 0:
            raise ModelError(f"branch {self.from_bus}-{self.to_bus}: r < 0")
        if self.x == 0:
            raise ModelError(f"branch {self.from_bus}-{self.to_bus}: x = 0")
        if not self.tau > 0:
            raise ModelError(f"branch {self.from_bus}-{self.to_bus}: tau <= 0")


@dataclass(frozen=True)
class Network:
    buses: tuple[Bus, ...]
    branches: tuple[Branch, ...]
    name: str = ""
    seed: int | None = None
    generator: str | None = None

    def __post_init__(self):
        object.__setattr__(self, "buses", tuple(self.buses))
        object.__setattr__(self, "branches", tuple(self.branches))
        n = len(self.buses)
        ids = sorted(b.id for b in self.buses)
        if ids != list(range(1, n + 1)):
            raise ModelError(f"bus ids must be 1..{n} with no gaps, got {ids}")
        slacks = [b.id for b in self.buses if b.kind is BusKind.SLACK]
        if len(slacks) != 1:
            raise ModelError(f"need exactly one Slack bus, found {slacks}")
        known = set(ids)
        for br in self.branches:
            if br.from_bus not in known or br.to_bus not in known:
                raise ModelError(
                    f"branch {br.from_bus}-{br.to_bus} references unknown bus")
        if n > 1:
            adj = {i: set() for i in ids}
            for br in self.branches:
                adj[br.from_bus].add(br.to_bus)
                adj[br.to_bus].add(br.from_bus)
            seen = {1}
            stack = [1]
            while stack:
                for k in adj[stack.pop()]:
                    if k not in seen:
                        seen.add(k)
                        stack.append(k)
            if seen != known:
                raise ModelError("network is not connected")

    @property
    def num_buses(self) -> int:
        return len(self.buses)

    @property
    def slack(self) -> Bus:
        for b in self.buses:
            if b.kind is BusKind.SLACK:
                return b
        raise ModelError("no Slack bus")

    def bus(self, bus_id: int) -> Bus:
        for b in self.buses:
            if b.id == bus_id:
                return b
        raise ModelError(f"no bus with id {bus_id}")


@dataclass(frozen=True)
class AdmittanceMatrix:
    """Y = G + jB, stored as two real matrices."""

    g: np.ndarray
    b: np.ndarray

    @property
    def complex_matrix(self) -> np.ndarray:
        return self.g + 1j * self.b


@dataclass(frozen=True)
class BusPower:
    """Recovered complex power at one bus."""

    bus_id: int
    kind: BusKind
    p: float
    q: float


def build_admittance(net: Network) -> AdmittanceMatrix:
    """Assemble the bus admittance matrix (Π-model, from-side taps)."""
    n = net.num_buses
    y = np.zeros((n, n), dtype=np.complex128)
    for br in net.branches:
        f, t = br.from_bus - 1, br.to_bus - 1
        ys = 1.0 / complex(br.r, br.x)
        ysh = 0.5j * br.b_shunt
        tap = br.tau * cmath.exp(1j * math.radians(br.theta_deg))
        y[f, f] += (ys + ysh) / (br.tau * br.tau)
        y[t, t] += ys + ysh
        y[f, t] -= ys / tap.conjugate()
        y[t, f] -= ys / tap
    for bus in net.buses:
        y[bus.id - 1, bus.id - 1] += complex(bus.shunt_g, bus.shunt_b)
    g = np.ascontiguousarray(y.real)
    b = np.ascontiguousarray(y.imag)
    g.flags.writeable = False
    b.flags.writeable = False
    return AdmittanceMatrix(g, b)


def _variable_layout(net: Network):
    """Map non-slack bus id -> (vd index, vq index) in the variable vector."""
    layout = {}
    names = []
    for bus in net.buses:
        if bus.kind is BusKind.SLACK:
            continue
        layout[bus.id] = (len(names), len(names) + 1)
        names.append(f"Vd{bus.id}")
        names.append(f"Vq{bus.id}")
    return layout, tuple(names)


@lru_cache(maxsize=256)
def build_pf_system(net: Network) -> PolynomialSystem:
    """Power flow equations as a square degree-2 polynomial system.

    Variables are (V_di, V_qi) per non-slack bus i in id order.  Each PQ
    bus contributes its P and Q balance equations; each PV bus its P
    balance and squared-magnitude equation.  The slack voltage enters as
    the constants (v_setpoint, 0), giving 2n-2 equations in 2n-2
    variables and total degree 4^(n-1).
    """
    if net.num_buses < 2:
        raise ModelError("power flow needs at least 2 buses")
    ym = build_admittance(net)
    g, b = ym.g, ym.b
    layout, names = _variable_layout(net)
    nv = 2 * (net.num_buses - 1)
    slack = net.slack
    vs = slack.v_setpoint

    def unit(idx):
        e = [0] * nv
        e[idx] = 1
        return tuple(e)

    def pair(i, j):
        e = [0] * nv
        e[i] += 1
        e[j] += 1
        return tuple(e)

    zero = tuple([0] * nv)
    polys = []
    for bus in net.buses:
        if bus.kind is BusKind.SLACK:
            continue
        i = bus.id - 1
        di, qi = layout[bus.id]
        p_terms, q_terms = [], []
        for other in net.buses:
            k = other.id - 1
            gik, bik = g[i, k], b[i, k]
            if gik == 0.0 and bik == 0.0:
                continue
            if other.kind is BusKind.SLACK:
                # V_dk = vs, V_qk = 0: the k-term collapses to linear.
                p_terms.append(Monomial(gik * vs, unit(di)))
                p_terms.append(Monomial(bik * vs, unit(qi)))
                q_terms.append(Monomial(-bik * vs, unit(di)))
                q_terms.append(Monomial(gik * vs, unit(qi)))
            else:
                dk, qk = layout[other.id]
                p_terms.append(Monomial(gik, pair(di, dk)))
                p_terms.append(Monomial(-bik, pair(di, qk)))
                p_terms.append(Monomial(bik, pair(qi, dk)))
                p_terms.append(Monomial(gik, pair(qi, qk)))
                q_terms.append(Monomial(-bik, pair(di, dk)))
                q_terms.append(Monomial(-gik, pair(di, qk)))
                q_terms.append(Monomial(gik, pair(qi, dk)))
                q_terms.append(Monomial(-bik, pair(qi, qk)))
        if bus.p_inject != 0.0:
            p_terms.append(Monomial(-bus.p_inject, zero))
        polys.append(p_terms)
        if bus.kind is BusKind.PQ:
            if bus.q_inject != 0.0:
                q_terms.append(Monomial(-bus.q_inject, zero))
            polys.append(q_terms)
        else:
            polys.append([
                Monomial(1.0, pair(di, di)),
                Monomial(1.0, pair(qi, qi)),
                Monomial(-bus.v_setpoint ** 2, zero),
            ])
    return PolynomialSystem(polys, num_vars=nv, var_names=names)


def residual(net: Network, candidate) -> float:
    """∞-norm of the power flow equations at a candidate point."""
    system = build_pf_system(net)
    return float(np.max(np.abs(polysys.evaluate(system, candidate))))


def full_voltage(net: Network, solution) -> np.ndarray:
    """Complex bus voltage vector (length n) from a solution vector."""
    sol = np.asarray(solution, dtype=np.complex128)
    layout, _ = _variable_layout(net)
    v = np.empty(net.num_buses, dtype=np.complex128)
    for bus in net.buses:
        if bus.kind is BusKind.SLACK:
            v[bus.id - 1] = bus.v_setpoint
        else:
            di, qi = layout[bus.id]
            v[bus.id - 1] = sol[di] + 1j * sol[qi]
    return v


def recover_outputs(net: Network, solution) -> tuple[BusPower, ...]:
    """Per-bus (P, Q) evaluated from the balance sums at a real solution.

    Reports the slack bus's P and Q and each PV bus's Q, which the
    equations treat as outputs; PQ-bus rows reproduce their specified
    injections and serve as a balance check.
    """
    sol = np.asarray(solution, dtype=np.float64)
    if sol.shape != (2 * (net.num_buses - 1),):
        raise ValueError(
            f"solution of shape {sol.shape}, expected ({2 * (net.num_buses - 1)},)")
    ym = build_admittance(net)
    v = full_voltage(net, sol)
    vd, vq = v.real, v.imag
    a = ym.g @ vd - ym.b @ vq
    c = ym.b @ vd + ym.g @ vq
    p = vd * a + vq * c
    q = vq * a - vd * c
    return tuple(
        BusPower(bus.id, bus.kind, float(p[bus.id - 1]), float(q[bus.id - 1]))
        for bus in net.buses)


def to_graph(net: Network) -> "cliques.Graph":
    """Undirected simple graph of the network (parallel branches collapse)."""
    edges = {(min(br.from_bus, br.to_bus), max(br.from_bus, br.to_bus))
             for br in net.branches}
    return cliques.Graph(net.num_buses, frozenset(edges))


def network_to_dict(net: Network) -> dict:
    doc = {"version": JSON_SCHEMA_VERSION, "name": net.name}
    if net.seed is not None:
        doc["seed"] = net.seed
    if net.generator is not None:
        doc["generator"] = net.generator
    doc["buses"] = [
        {"id": b.id, "kind": b.kind.value, "p": b.p_inject, "q": b.q_inject,
         "vset": b.v_setpoint, "gs": b.shunt_g, "bs": b.shunt_b}
        for b in net.buses]
    doc["branches"] = [
        {"from": br.from_bus, "to": br.to_bus, "r": br.r, "x": br.x,
         "b": br.b_shunt, "tau": br.tau, "theta_deg": br.theta_deg}
        for br in net.branches]
    return doc


def network_to_json(net: Network) -> str:
    return json.dumps(network_to_dict(net), indent=2) + "\n"


def network_from_dict(doc: dict) -> Network:
    if doc.get("version") != JSON_SCHEMA_VERSION:
        raise ModelError(
            f"unsupported network schema version {doc.get('version')!r}")
    try:
        buses = tuple(
            Bus(id=d["id"], kind=BusKind(d["kind"]), p_inject=d.get("p", 0.0),
                q_inject=d.get("q", 0.0), v_setpoint=d.get("vset", 1.0),
                shunt_g=d.get("gs", 0.0), shunt_b=d.get("bs", 0.0))
            for d in doc["buses"])
        branches = tuple(
            Branch(from_bus=d["from"], to_bus=d["to"], r=d["r"], x=d["x"],
                   b_shunt=d.get("b", 0.0), tau=d.get("tau", 1.0),
                   theta_deg=d.get("theta_deg", 0.0))
            for d in doc["branches"])
    except (KeyError, TypeError, ValueError) as exc:
        if isinstance(exc, ModelError):
            raise
        raise ModelError(f"malformed network document: {exc}") from exc
    return Network(buses=buses, branches=branches, name=doc.get("name", ""),
                   seed=doc.get("seed"), generator=doc.get("generator"))


def network_from_json(text: str) -> Network:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ModelError(f"invalid network JSON: {exc}") from exc
    if not isinstance(doc, dict):
        raise ModelError("network JSON must be an object")
    return network_from_dict(doc)


def save_network(net: Network, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(network_to_json(net))


def load_network(path) -> Network:
    with open(path, "r", encoding="utf-8") as fh:
        return network_from_json(fh.read())
