"""Command-line scenario runner and CSV dumpers."""

from __future__ import annotations

import argparse
import sys
import time
from pathlib import Path

import numpy as np


def _add_out(sub):
    sub.add_argument("--out", default="out", help="output directory")
    sub.add_argument("--seedless", action="store_true",
                     help="assert the pipeline uses no randomness (always true)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="coinwalk",
        description="discrete-time quantum walk scenarios, spectra, and "
                    "coefficient dumps (deterministic CSV output)")
    sub = parser.add_subparsers(dest="command", required=True)

    sim = sub.add_parser("simulate", help="run a scenario from a config file "
                                          "or built-in name")
    sim.add_argument("config", help="path to a config file, or a built-in "
                                    "scenario name")
    sim.add_argument("--steps", type=int, default=None,
                     help="override the scenario's step count")
    _add_out(sim)

    spec = sub.add_parser("spectrum", help="dump k, E(k) and the mode "
                                           "Hamiltonian entries")
    spec.add_argument("--kind", choices=("dqw", "ssdqw", "dca"), default="dca")
    spec.add_argument("--sites", type=int, default=64)
    spec.add_argument("--theta1", type=float, default=np.pi / 4,
                      help="first-substep x-rotation angle (ssdqw only)")
    spec.add_argument("--theta2", type=float, default=np.pi / 4,
                      help="x-rotation angle (dqw: the coin; ssdqw/dca: mass)")
    _add_out(spec)

    neu = sub.add_parser("neutrino", help="flavor-oscillation or "
                                          "wavepacket-entropy series")
    neu.add_argument("--steps", type=int, default=450)
    neu.add_argument("--entropy", action="store_true",
                     help="evolve a Gaussian wavepacket and dump entropy.csv")
    neu.add_argument("--eps", type=float, default=0.25,
                     help="momentum window half-width (entropy mode)")
    _add_out(neu)

    cur = sub.add_parser("curved-coeffs", help="dump closed-form and numeric "
                                               "Hamiltonian coefficients")
    cur.add_argument("--scenario", default="static",
                     choices=("flat", "nonstatic", "nonstatic_gauge", "static",
                              "static_gauge", "static_x2_delocalized"))
    cur.add_argument("--time", type=float, default=0.5)
    cur.add_argument("--points", type=int, default=21)
    _add_out(cur)

    two = sub.add_parser("two-particle", help="dump two-walker Hamiltonian "
                                              "coefficient tables")
    two.add_argument("--coupling", type=float, default=0.3,
                     help="strength of the entangling theta^{11} rate field")
    two.add_argument("--points", type=int, default=5)
    _add_out(two)

    sub.add_parser("list-scenarios", help="list built-in scenario names")
    return parser


def _cmd_simulate(args) -> int:
    from .config import ConfigError, parse_config
    from .scenarios import BUILTIN_SCENARIOS, builtin_scenario, run_scenario

    if args.config in BUILTIN_SCENARIOS:
        scenario = builtin_scenario(args.config)
    else:
        path = Path(args.config)
        if not path.exists():
            print(f"error: {args.config!r} is neither a built-in scenario "
                  f"nor a config file", file=sys.stderr)
            return 2
        try:
            scenario = parse_config(path.read_text(encoding="utf-8"))
        except ConfigError as exc:
            print(f"error: {exc}", file=sys.stderr)
            return 2
    paths = run_scenario(scenario, args.out, args.steps)
    for p in paths:
        print(p)
    return 0


def _cmd_spectrum(args) -> int:
    from .coins import CoinAngles
    from .scenarios import write_csv, write_manifest
    from .spectral import hk_closed_form, momentum_grid
    from .state import Lattice

    lattice = Lattice(args.sites, 1.0)
    if args.kind == "dqw":
        params = CoinAngles(0.0, args.theta2, 0.0, 0.0)
    elif args.kind == "ssdqw":
        params = (CoinAngles(0.0, args.theta1, 0.0, 0.0),
                  CoinAngles(0.0, args.theta2, 0.0, 0.0))
    else:
        params = (np.cos(args.theta2), np.sin(args.theta2))
    outdir = Path(args.out)
    outdir.mkdir(parents=True, exist_ok=True)
    start = time.perf_counter()
    rows = []
    for k in momentum_grid(lattice):
        mode = hk_closed_form(args.kind, params, float(k))
        h = mode.hamiltonian
        rows.append((float(k), float(mode.energy),
                     float(h[0, 0].real), float(h[0, 0].imag),
                     float(h[0, 1].real), float(h[0, 1].imag),
                     float(h[1, 0].real), float(h[1, 0].imag),
                     float(h[1, 1].real), float(h[1, 1].imag)))
    path = outdir / "spectrum.csv"
    write_csv(path, ("k", "E", "H00_re", "H00_im", "H01_re", "H01_im",
                     "H10_re", "H10_im", "H11_re", "H11_im"), rows)
    write_manifest(outdir / "manifest.txt", f"spectrum_{args.kind}",
                   f"{args.kind}:{args.sites}:{args.theta1}:{args.theta2}",
                   time.perf_counter() - start)
    print(path)
    return 0


def _cmd_neutrino(args) -> int:
    from .neutrino import (CALIBRATED, DEFAULT_PMNS, gaussian_flavor_state,
                           lattice_for_mode_spacing, oscillation_entropy_series,
                           pmns_matrix)
    from .scenarios import OscillationScenario, write_csv, write_manifest

    outdir = Path(args.out)
    if not args.entropy:
        scenario = OscillationScenario("neutrino", args.steps)
        for p in scenario.run(outdir):
            print(p)
        return 0
    outdir.mkdir(parents=True, exist_ok=True)
    start = time.perf_counter()
    lattice = lattice_for_mode_spacing(0.001)
    state = gaussian_flavor_state("e", 0.01, 100.0, args.eps,
                                  pmns_matrix(DEFAULT_PMNS), CALIBRATED, lattice)
    series = oscillation_entropy_series(state, CALIBRATED, args.steps)
    path = outdir / "entropy.csv"
    write_csv(path, ("step", "entropy"),
              ((step, float(s)) for step, s in enumerate(series)))
    write_manifest(outdir / "manifest.txt", "neutrino_entropy",
                   f"entropy:{args.steps}:{args.eps}",
                   time.perf_counter() - start)
    print(path)
    return 0


def _cmd_curved(args) -> int:
    from .scenarios import builtin_scenario, write_csv, write_manifest
    from .curved import closed_form_coefficients, numeric_coefficients

    scenario = builtin_scenario(args.scenario)
    schedule = scenario.engine.schedule
    lattice = scenario.lattice
    outdir = Path(args.out)
    outdir.mkdir(parents=True, exist_ok=True)
    start = time.perf_counter()
    xs = np.linspace(-0.2, 0.2, args.points) * lattice.sites * lattice.spacing
    rows = []
    names = ("Theta1", "Theta2", "Theta3", "Xi0", "Xi1", "Xi2", "Xi3")
    for x in xs:
        closed = closed_form_coefficients(schedule, float(x), args.time)
        numeric = numeric_coefficients(schedule, float(x), args.time)
        for tag, co in (("closed", closed), ("numeric", numeric)):
            values = (co.theta1, co.theta2, co.theta3, *co.xi_vector)
            for name, val in zip(names, values):
                rows.append((float(x), float(args.time), f"{tag}_{name}",
                             float(np.real(val)), float(np.imag(val))))
    path = outdir / "coefficients.csv"
    write_csv(path, ("x", "t", "name", "re", "im"), rows)
    write_manifest(outdir / "manifest.txt", f"curved_coeffs_{args.scenario}",
                   f"{args.scenario}:{args.time}:{args.points}",
                   time.perf_counter() - start)
    print(path)
    return 0


def _cmd_two_particle(args) -> int:
    from .scenarios import write_csv, write_manifest
    from .twoparticle import TwoCoinField, two_effective_hamiltonian

    strength = args.coupling

    field = TwoCoinField(
        theta={(1, 1, 0): lambda x1, x2, t: 0.2 + 0.0 * x1 * x2,
               (2, 0, 1): lambda x1, x2, t: 0.1 + 0.0 * x1 * x2},
        vartheta={(1, 1, 1): lambda x1, x2, t:
                  strength * np.exp(-((x1 - x2) ** 2))})
    outdir = Path(args.out)
    outdir.mkdir(parents=True, exist_ok=True)
    start = time.perf_counter()
    xs = np.linspace(-0.5, 0.5, args.points)
    rows = []
    for x1 in xs:
        for x2 in xs:
            co = two_effective_hamiltonian(field, float(x1), float(x2), 0.0,
                                           check_pattern=False)
            for q in range(4):
                for r in range(4):
                    for name, table in (("Theta1", co.theta1),
                                        ("Theta2", co.theta2), ("Xi", co.xi)):
                        val = table[q, r]
                        if abs(val) > 1e-12:
                            rows.append((float(x1), float(x2), 0.0,
                                         f"{name}_{q}{r}",
                                         float(np.real(val)),
                                         float(np.imag(val))))
    path = outdir / "two_particle_coefficients.csv"
    write_csv(path, ("x1", "x2", "t", "component", "re", "im"), rows)
    write_manifest(outdir / "manifest.txt", "two_particle",
                   f"coupling:{strength}:{args.points}",
                   time.perf_counter() - start)
    print(path)
    return 0


def _cmd_list(_args) -> int:
    from .scenarios import BUILTIN_SCENARIOS

    for name in sorted(BUILTIN_SCENARIOS):
        scenario = BUILTIN_SCENARIOS[name]()
        print(f"{name:24s} {scenario.description}")
    return 0


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    handlers = {
        "simulate": _cmd_simulate,
        "spectrum": _cmd_spectrum,
        "neutrino": _cmd_neutrino,
        "curved-coeffs": _cmd_curved,
        "two-particle": _cmd_two_particle,
        "list-scenarios": _cmd_list,
    }
    return handlers[args.command](args)


if __name__ == "__main__":
    sys.exit(main())
