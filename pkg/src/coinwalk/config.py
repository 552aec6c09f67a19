"""Scenario configuration: INI-style sections with a small expression language.

Schedule fields are given as expression strings over the variables x and t
with constants pi, a (lattice spacing) and L (scale), arithmetic operators
+ - * / ^, parentheses, and the functions cos, sin, arccos, sqrt.  The
parser is deliberately tiny; configs stay reproducible without code.
"""

from __future__ import annotations

import configparser
import io
import re
from dataclasses import dataclass
from typing import Callable, Dict, List

import numpy as np

from .coins import CoinAngles, CoinSchedule
from .engines import DCA, DQW, SSDQW, ModifiedSSDQW, NeutrinoU6
from .state import Lattice, WalkState, make_basis_state, superpose


class ConfigError(ValueError):
    """Configuration rejected, with a location diagnostic."""


_TOKEN = re.compile(r"\s*(?:(\d+\.\d*(?:[eE][+-]?\d+)?|\.\d+(?:[eE][+-]?\d+)?"
                    r"|\d+(?:[eE][+-]?\d+)?)|([A-Za-z_][A-Za-z_0-9]*)|(\*\*|[()+\-*/^,]))")

_FUNCTIONS: Dict[str, Callable] = {
    "cos": np.cos,
    "sin": np.sin,
    "arccos": np.arccos,
    "sqrt": np.sqrt,
}


@dataclass
class _Token:
    kind: str  # number | name | op
    text: str
    column: int


def _tokenize(text: str, where: str) -> List[_Token]:
    tokens = []
    pos = 0
    while pos < len(text):
        match = _TOKEN.match(text, pos)
        if match is None:
            stripped = text[pos:].lstrip()
            if not stripped:
                break
            col = len(text) - len(stripped) + 1
            raise ConfigError(
                f"{where}: syntax error at column {col}: "
                f"unexpected character {stripped[0]!r}")
        number, name, op = match.groups()
        column = match.start(1 if number else 2 if name else 3) + 1
        if number:
            tokens.append(_Token("number", number, column))
        elif name:
            tokens.append(_Token("name", name, column))
        else:
            tokens.append(_Token("op", "^" if op == "**" else op, column))
        pos = match.end()
    return tokens


class _Parser:
    """Recursive-descent parser producing a closure f(x, t, consts)."""

    def __init__(self, tokens: List[_Token], where: str):
        self.tokens = tokens
        self.pos = 0
        self.where = where

    def fail(self, message: str):
        col = self.tokens[self.pos].column if self.pos < len(self.tokens) else -1
        at = f" at column {col}" if col > 0 else " at end of expression"
        raise ConfigError(f"{self.where}: {message}{at}")

    def peek(self):
        return self.tokens[self.pos] if self.pos < len(self.tokens) else None

    def take(self, text=None):
        tok = self.peek()
        if tok is None or (text is not None and tok.text != text):
            self.fail(f"expected {text!r}" if text else "unexpected end")
        self.pos += 1
        return tok

    def parse(self) -> Callable:
        fn = self.expr()
        if self.peek() is not None:
            self.fail(f"unexpected token {self.peek().text!r}")
        return fn

    def expr(self):
        node = self.term()
        while self.peek() and self.peek().text in "+-":
            op = self.take().text
            rhs = self.term()
            node = (lambda a, b: lambda env: a(env) + b(env))(node, rhs) \
                if op == "+" else (lambda a, b: lambda env: a(env) - b(env))(node, rhs)
        return node

    def term(self):
        node = self.unary()
        while self.peek() and self.peek().text in "*/":
            op = self.take().text
            rhs = self.unary()
            node = (lambda a, b: lambda env: a(env) * b(env))(node, rhs) \
                if op == "*" else (lambda a, b: lambda env: a(env) / b(env))(node, rhs)
        return node

    def unary(self):
        if self.peek() and self.peek().text == "-":
            self.take()
            inner = self.unary()
            return lambda env: -inner(env)
        return self.power()

    def power(self):
        base = self.atom()
        if self.peek() and self.peek().text == "^":
            self.take()
            exponent = self.unary()
            return lambda env: base(env) ** exponent(env)
        return base

    def atom(self):
        tok = self.peek()
        if tok is None:
            self.fail("unexpected end")
        if tok.kind == "number":
            self.take()
            value = float(tok.text)
            return lambda env: value
        if tok.kind == "name":
            self.take()
            name = tok.text
            if name in _FUNCTIONS:
                self.take("(")
                arg = self.expr()
                self.take(")")
                fn = _FUNCTIONS[name]
                return lambda env: fn(arg(env))
            if name in ("x", "t", "pi", "a", "L"):
                return lambda env: env[name]
            self.fail(f"unknown name {name!r} (variables: x, t; "
                      "constants: pi, a, L; functions: cos, sin, arccos, sqrt)")
        if tok.text == "(":
            self.take()
            inner = self.expr()
            self.take(")")
            return inner
        self.fail(f"unexpected token {tok.text!r}")


def compile_expression(text: str, where: str = "expression") -> Callable:
    """Compile an expression string to a field function f(x, t, a, scale)."""
    tokens = _tokenize(text, where)
    if not tokens:
        raise ConfigError(f"{where}: empty expression")
    node = _Parser(tokens, where).parse()

    def fn(x, t, a=1.0, scale=1.0):
        env = {"x": np.asarray(x, dtype=float), "t": t, "pi": np.pi,
               "a": a, "L": scale}
        out = node(env)
        return np.broadcast_to(np.asarray(out, dtype=float),
                               np.shape(env["x"])).copy()

    return fn


_SCENARIO_KEYS = {"name", "builtin", "engine", "steps", "observables"}
_LATTICE_KEYS = {"sites", "scale", "spacing"}
_INITIAL_KEYS = {"coin", "sites"}
_COIN_KEYS = {"theta0", "theta1", "theta2", "theta3", "eta1", "eta2",
              "theta_m1", "theta_m2", "theta_m3", "ktilde"}
_SCHEDULE_KEY = re.compile(r"^(var)?theta([01])_([12])$")
_OBSERVABLES = {"probability", "heatmap", "entropy"}


def _parse_complex(text: str, where: str) -> complex:
    try:
        return complex(text.replace(" ", "").replace("i", "j"))
    except ValueError:
        raise ConfigError(f"{where}: cannot parse complex number {text!r}") from None


def parse_config(text: str):
    """Validated scenario from an INI-style config string.

    Unknown sections or keys are rejected with their location; semantic
    violations name the broken invariant.
    """
    parser = configparser.ConfigParser(inline_comment_prefixes=("#",),
                                       interpolation=None)
    try:
        parser.read_file(io.StringIO(text))
    except configparser.Error as exc:
        raise ConfigError(f"config syntax error: {exc}") from None

    known_sections = {"scenario", "lattice", "initial", "coin", "schedule"}
    for section in parser.sections():
        if section not in known_sections:
            raise ConfigError(f"unknown section [{section}]")

    if not parser.has_section("scenario"):
        raise ConfigError("missing required section [scenario]")
    scen = parser["scenario"]
    for key in scen:
        if key not in _SCENARIO_KEYS:
            raise ConfigError(f"unknown key scenario.{key}")

    if "builtin" in scen:
        from .scenarios import builtin_scenario

        scenario = builtin_scenario(scen["builtin"])
        if "steps" in scen:
            scenario.n_steps = int(scen["steps"])
        scenario.config_text = text
        return scenario

    engine_kind = scen.get("engine")
    if engine_kind not in ("dqw", "ssdqw", "dca", "modified", "neutrino"):
        raise ConfigError(
            f"scenario.engine must be one of dqw, ssdqw, dca, modified, "
            f"neutrino; got {engine_kind!r}")
    steps = int(scen.get("steps", "0"))
    observables = tuple(s.strip() for s in
                        scen.get("observables", "probability").split(","))
    for obs in observables:
        if obs not in _OBSERVABLES:
            raise ConfigError(f"scenario.observables: unknown observable {obs!r}")

    if not parser.has_section("lattice"):
        raise ConfigError("missing required section [lattice]")
    lat = parser["lattice"]
    for key in lat:
        if key not in _LATTICE_KEYS:
            raise ConfigError(f"unknown key lattice.{key}")
    sites = int(lat.get("sites", "0"))
    if "scale" in lat:
        lattice = Lattice.from_scale(sites, float(lat["scale"]))
        scale = float(lat["scale"])
    else:
        lattice = Lattice(sites, float(lat.get("spacing", "1.0")))
        scale = 1.0 / lattice.spacing

    coin_dim = 6 if engine_kind == "neutrino" else 2
    init = parser["initial"] if parser.has_section("initial") else {}
    for key in init:
        if key not in _INITIAL_KEYS:
            raise ConfigError(f"unknown key initial.{key}")
    coin_txt = init.get("coin", "1, 0" if coin_dim == 2 else "1, 0, 0, 0, 0, 0")
    coin_amps = [_parse_complex(part, "initial.coin")
                 for part in coin_txt.split(",")]
    if len(coin_amps) != coin_dim:
        raise ConfigError(
            f"initial.coin needs {coin_dim} amplitudes, got {len(coin_amps)}")
    site_txt = init.get("sites", "0")
    site_offsets = [int(part) for part in site_txt.split(",")]
    terms = []
    for offset in site_offsets:
        for c, amp in enumerate(coin_amps):
            if amp != 0:
                terms.append((amp, make_basis_state(
                    c, lattice.site_index(offset), coin_dim, lattice)))
    initial = superpose(terms)

    coin = parser["coin"] if parser.has_section("coin") else {}
    for key in coin:
        if key not in _COIN_KEYS:
            raise ConfigError(f"unknown key coin.{key}")

    def coin_float(key, default=0.0):
        return float(coin.get(key, default))

    if engine_kind == "dqw":
        engine = DQW(CoinAngles(coin_float("theta0"), coin_float("theta1"),
                                coin_float("theta2"), coin_float("theta3")))
    elif engine_kind == "dca":
        eta1, eta2 = coin_float("eta1"), coin_float("eta2")
        if abs(eta1 ** 2 + eta2 ** 2 - 1.0) > 1e-12:
            raise ConfigError(
                "coin.eta1/eta2 violate the normalization invariant "
                "|eta1|^2 + |eta2|^2 = 1")
        engine = DCA(eta1, eta2)
    elif engine_kind == "neutrino":
        engine = NeutrinoU6((coin_float("theta_m1"), coin_float("theta_m2"),
                             coin_float("theta_m3")))
    else:
        schedule = _parse_schedule(parser, lattice.spacing, scale)
        engine = SSDQW(schedule) if engine_kind == "ssdqw" \
            else ModifiedSSDQW(schedule)

    from .scenarios import Scenario

    return Scenario(name=scen.get("name", engine_kind), lattice=lattice,
                    engine=engine, initial=initial, n_steps=steps,
                    observables=observables, config_text=text)


def _parse_schedule(parser: configparser.ConfigParser, spacing: float,
                    scale: float) -> CoinSchedule:
    theta = {}
    vartheta = {}
    if parser.has_section("schedule"):
        for key, value in parser["schedule"].items():
            match = _SCHEDULE_KEY.match(key)
            if match is None:
                raise ConfigError(
                    f"unknown key schedule.{key} (expected theta<q>_<j> or "
                    "vartheta<q>_<j> with q in 0..1, j in 1..2)")
            is_rate, q, j = match.group(1), int(match.group(2)), int(match.group(3))
            fn = compile_expression(value, f"schedule.{key}")
            bound = (lambda f: lambda x, t: f(x, t, spacing, scale))(fn)
            (vartheta if is_rate else theta)[(j, q)] = bound
    return CoinSchedule(theta, vartheta)
