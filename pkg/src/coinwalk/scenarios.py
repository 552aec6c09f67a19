"""Built-in scenarios and the deterministic CSV runner.

Every run writes one CSV per requested observable plus a manifest recording
the resolved-configuration hash, library version, and wall time.  Output
bytes are reproducible: fixed column order, '.' decimal separator, and 17
significant digits for reals.
"""

from __future__ import annotations

import hashlib
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np

from . import __version__
from .coins import CoinAngles, CoinSchedule
from .engines import DCA, DQW, SSDQW, ModifiedSSDQW, NeutrinoU6, evolve
from .state import Lattice, WalkState, make_basis_state, superpose

MEMORY_BUDGET_FLOATS = 2 ** 26  # ~0.5 GiB of recorded float64 history


def _fmt(value: float) -> str:
    return f"{value:.17g}"


def write_csv(path: Path, header: Sequence[str], rows) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(_fmt(v) if isinstance(v, float) else str(v)
                              for v in row) + "\n")


def write_manifest(path: Path, name: str, config_text: str,
                   wall_time_s: float, extra: Optional[Dict[str, str]] = None) -> None:
    digest = hashlib.sha256(config_text.encode("utf-8")).hexdigest()
    lines = [f"scenario = {name}",
             f"config_sha256 = {digest}",
             f"version = {__version__}",
             f"wall_time_s = {wall_time_s:.3f}"]
    for key, value in (extra or {}).items():
        lines.append(f"{key} = {value}")
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")


@dataclass
class Scenario:
    """A configured lattice run: engine, initial state, steps, observables."""

    name: str
    lattice: Lattice
    engine: object
    initial: WalkState
    n_steps: int
    observables: Tuple[str, ...] = ("probability",)
    check_boundary: bool = True
    description: str = ""
    config_text: str = ""

    def estimated_record_floats(self) -> int:
        per_step = {"probability": self.lattice.sites, "heatmap": self.lattice.sites,
                    "entropy": 1, "norm": 1}
        return (self.n_steps + 1) * sum(per_step.get(o, 1) for o in self.observables)

    def run(self, outdir: Path, steps_override: Optional[int] = None) -> List[Path]:
        n_steps = self.n_steps if steps_override is None else steps_override
        est = self.estimated_record_floats()
        if est > MEMORY_BUDGET_FLOATS:
            raise MemoryError(
                f"scenario would record ~{est} floats "
                f"({8 * est / 2 ** 20:.0f} MiB), over the "
                f"{8 * MEMORY_BUDGET_FLOATS / 2 ** 20:.0f} MiB budget")
        outdir = Path(outdir)
        outdir.mkdir(parents=True, exist_ok=True)
        start = time.perf_counter()
        record = []
        if "probability" in self.observables or "heatmap" in self.observables:
            record.append("position_prob")
        if "entropy" in self.observables:
            record.append("entropy")
        traj = evolve(self.initial, self.engine, n_steps, record,
                      check_boundary=self.check_boundary)
        xs = self.lattice.positions
        paths = []
        if "probability" in self.observables:
            final = traj.series["position_prob"][-1]
            path = outdir / "probability.csv"
            write_csv(path, ("step", "x", "prob"),
                      ((n_steps, float(x), float(p)) for x, p in zip(xs, final)))
            paths.append(path)
        if "heatmap" in self.observables:
            path = outdir / "heatmap.csv"
            history = traj.series["position_prob"]
            write_csv(path, ("step", "x", "prob"),
                      ((step, float(x), float(p))
                       for step in range(n_steps + 1)
                       for x, p in zip(xs, history[step])))
            paths.append(path)
        if "entropy" in self.observables:
            path = outdir / "entropy.csv"
            write_csv(path, ("step", "entropy"),
                      ((step, float(s))
                       for step, s in enumerate(traj.series["entropy"])))
            paths.append(path)
        manifest = outdir / "manifest.txt"
        write_manifest(manifest, self.name, self.config_text or self.name,
                       time.perf_counter() - start)
        paths.append(manifest)
        return paths


@dataclass
class ComparisonScenario:
    """Runs two engines from one initial state; one probability file each."""

    name: str
    lattice: Lattice
    engines: Dict[str, object]
    initial: WalkState
    n_steps: int
    description: str = ""

    def run(self, outdir: Path, steps_override: Optional[int] = None) -> List[Path]:
        n_steps = self.n_steps if steps_override is None else steps_override
        outdir = Path(outdir)
        outdir.mkdir(parents=True, exist_ok=True)
        start = time.perf_counter()
        xs = self.lattice.positions
        paths = []
        for tag, engine in self.engines.items():
            traj = evolve(self.initial, engine, n_steps, ("position_prob",))
            final = traj.series["position_prob"][-1]
            path = outdir / f"probability_{tag}.csv"
            write_csv(path, ("step", "x", "prob"),
                      ((n_steps, float(x), float(p)) for x, p in zip(xs, final)))
            paths.append(path)
        manifest = outdir / "manifest.txt"
        write_manifest(manifest, self.name, self.name,
                       time.perf_counter() - start)
        paths.append(manifest)
        return paths


@dataclass
class OscillationScenario:
    """Fixed-momentum three-flavor run writing oscillation.csv."""

    name: str
    n_steps: int
    description: str = ""

    def run(self, outdir: Path, steps_override: Optional[int] = None) -> List[Path]:
        from .neutrino import CALIBRATED, DEFAULT_PMNS, pmns_matrix, walk_oscillation_series

        n_steps = self.n_steps if steps_override is None else steps_override
        outdir = Path(outdir)
        outdir.mkdir(parents=True, exist_ok=True)
        start = time.perf_counter()
        series = walk_oscillation_series("e", CALIBRATED,
                                         pmns_matrix(DEFAULT_PMNS), n_steps)
        path = outdir / "oscillation.csv"
        write_csv(path, ("step", "t", "P_e", "P_mu", "P_tau"),
                  ((step, float(step), float(row[0]), float(row[1]), float(row[2]))
                   for step, row in enumerate(series)))
        manifest = outdir / "manifest.txt"
        write_manifest(manifest, self.name, self.name, time.perf_counter() - start)
        return [path, manifest]


def _plus_i_down_origin(lattice: Lattice) -> WalkState:
    up = make_basis_state(0, lattice.site_index(0), 2, lattice)
    down = make_basis_state(1, lattice.site_index(0), 2, lattice)
    return superpose([(1.0, up), (1j, down)])


def _delocalized_pair(lattice: Lattice) -> WalkState:
    terms = []
    for site in (lattice.site_index(-9), lattice.site_index(9)):
        terms.append((1.0, make_basis_state(0, site, 2, lattice)))
        terms.append((1j, make_basis_state(1, site, 2, lattice)))
    return superpose(terms)


def _const(value: float) -> Callable:
    return lambda x, t: np.full_like(np.asarray(x, dtype=float), value)


def flat_schedule() -> CoinSchedule:
    return CoinSchedule(vartheta={(2, 1): _const(0.04)})


def nonstatic_schedule(gauge: bool) -> CoinSchedule:
    theta = {(1, 1): lambda x, t: np.pi / 8 + 2.0 * x,
             (2, 1): lambda x, t: -np.pi / 4 - 4.0 * x}
    vartheta = {(1, 1): _const(-2.0),
                (2, 1): lambda x, t: np.full_like(np.asarray(x, dtype=float),
                                                  0.04 * t)}
    if gauge:
        theta[(1, 0)] = lambda x, t: -1000.0 * x * t
        vartheta[(1, 0)] = lambda x, t: -0.03 * np.asarray(x, dtype=float)
    return CoinSchedule(theta, vartheta)


def static_schedule(gauge: bool, offset_sites: int = 5,
                    spacing: float = 1.0 / 250.0) -> CoinSchedule:
    shift = offset_sites * spacing

    def arg(x):
        return np.asarray(x, dtype=float) + shift

    theta = {(1, 1): lambda x, t: 0.5 * np.arccos(arg(x)),
             (2, 1): lambda x, t: -np.arccos(arg(x))}
    vartheta = {(1, 1): lambda x, t: 0.5 / np.sqrt(1.0 - arg(x) ** 2),
                (2, 1): _const(0.04)}
    if gauge:
        theta[(1, 0)] = lambda x, t: -1000.0 * x * t
        vartheta[(1, 0)] = lambda x, t: -0.03 * np.asarray(x, dtype=float)
    return CoinSchedule(theta, vartheta)


def _curved(name, sites, scale, steps, schedule, initial, description):
    lattice = Lattice.from_scale(sites, scale)
    return Scenario(name=name, lattice=lattice,
                    engine=ModifiedSSDQW(schedule),
                    initial=initial(lattice), n_steps=steps,
                    observables=("heatmap", "probability"),
                    description=description)


def build_flat() -> Scenario:
    return _curved("flat", 400, 150.0, 200, flat_schedule(), _plus_i_down_origin,
                   "flat background, mass 0.04, no potentials")


def build_nonstatic() -> Scenario:
    return _curved("nonstatic", 400, 150.0, 200, nonstatic_schedule(False),
                   _plus_i_down_origin,
                   "time-dependent metric g00 = 1/t^2, no potentials")


def build_nonstatic_gauge() -> Scenario:
    return _curved("nonstatic_gauge", 400, 150.0, 200, nonstatic_schedule(True),
                   _plus_i_down_origin,
                   "time-dependent metric with linear abelian potential")


def build_static() -> Scenario:
    return _curved("static", 200, 250.0, 800,
                   static_schedule(False), _plus_i_down_origin,
                   "static metric g11 = -(x + 5a)^2: one-sided spreading")


def build_static_gauge() -> Scenario:
    return _curved("static_gauge", 200, 250.0, 800,
                   static_schedule(True), _plus_i_down_origin,
                   "static metric with linear abelian potential")


def build_static_x2_delocalized() -> Scenario:
    sched = static_schedule(False, offset_sites=0)
    return _curved("static_x2_delocalized", 200, 250.0, 600, sched,
                   _delocalized_pair,
                   "static metric g11 = -x^2, two-peak initial state")


def build_dca_vs_dqw() -> ComparisonScenario:
    lattice = Lattice(256, 1.0)
    up = make_basis_state(0, 0, 2, lattice)
    down = make_basis_state(1, 0, 2, lattice)
    initial = superpose([(1.0, up), (1.0, down)])
    theta = np.pi / 4
    return ComparisonScenario(
        name="dca_vs_dqw", lattice=lattice,
        engines={"dqw": DQW(CoinAngles(0.0, theta, 0.0, 0.0)),
                 "dca": DCA(np.cos(theta), np.sin(theta))},
        initial=initial, n_steps=100,
        description="ballistic profiles of the coined walk vs the automaton")


def build_neutrino_short() -> OscillationScenario:
    return OscillationScenario("neutrino_short", 450,
                               "short-range flavor oscillation, 450 steps")


def build_neutrino_long() -> OscillationScenario:
    return OscillationScenario("neutrino_long", 4500,
                               "long-range flavor oscillation, 4500 steps")


BUILTIN_SCENARIOS: Dict[str, Callable] = {
    "flat": build_flat,
    "nonstatic": build_nonstatic,
    "nonstatic_gauge": build_nonstatic_gauge,
    "static": build_static,
    "static_gauge": build_static_gauge,
    "static_x2_delocalized": build_static_x2_delocalized,
    "dca_vs_dqw": build_dca_vs_dqw,
    "neutrino_short": build_neutrino_short,
    "neutrino_long": build_neutrino_long,
}


def builtin_scenario(name: str):
    """Fully populated scenario for a built-in name; lists names on miss."""
    try:
        return BUILTIN_SCENARIOS[name]()
    except KeyError:
        raise ValueError(
            f"unknown scenario {name!r}; valid names: "
            + ", ".join(sorted(BUILTIN_SCENARIOS))) from None


def run_scenario(scenario, outdir, steps_override: Optional[int] = None) -> List[Path]:
    """Run any scenario object, returning the written file paths."""
    return scenario.run(Path(outdir), steps_override)
