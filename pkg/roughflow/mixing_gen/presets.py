"""
Named chains and suspensions.

Experiment configs refer to these by name. Each entry records constructor
arguments; ``chain_preset`` / ``suspension_preset`` build validated objects.
"""

from typing import Dict, Optional, Sequence

from roughflow.errors import ConfigError
from roughflow.mixing_gen.spec import MarkovMixingSpec, SuspensionSpec


def two_state(alpha: float, beta: float, g: Sequence = (1.0, -1.0), name: Optional[str] = None) -> MarkovMixingSpec:
    """Chain flipping 0 -> 1 with probability alpha and 1 -> 0 with beta."""
    return MarkovMixingSpec(
        states=2,
        P=[[1.0 - alpha, alpha], [beta, 1.0 - beta]],
        g=list(g),
        pi=[beta / (alpha + beta), alpha / (alpha + beta)],
        name=name,
    )


def iid_rows(pi: Sequence[float], g: Sequence, name: Optional[str] = None) -> MarkovMixingSpec:
    """Every row of P equals pi, giving an i.i.d. sequence."""
    pi = list(map(float, pi))
    return MarkovMixingSpec(states=len(pi), P=[pi] * len(pi), g=g, pi=pi, name=name)


def deterministic_swap(g: Sequence = (1.0, -1.0), name: Optional[str] = "swap") -> MarkovMixingSpec:
    """Two-state chain that always switches state: no mixing at all."""
    return MarkovMixingSpec(states=2, P=[[0.0, 1.0], [1.0, 0.0]], g=list(g), pi=[0.5, 0.5], name=name)


# Chain catalog
CHAIN_PRESETS: Dict[str, Dict] = {
    "two-state-0.3": {
        "description": "Symmetric two-state chain, alpha = beta = 0.3, g = (+1, -1)",
        "build": lambda: two_state(0.3, 0.3, name="two-state-0.3"),
    },
    "iid-rademacher": {
        "description": "i.i.d. fair signs",
        "build": lambda: iid_rows([0.5, 0.5], [1.0, -1.0], name="iid-rademacher"),
    },
    "iid-rademacher-2d": {
        "description": "Two independent fair sign coordinates",
        "build": lambda: iid_rows([0.25] * 4, [[1, 1], [1, -1], [-1, 1], [-1, -1]], name="iid-rademacher-2d"),
    },
    "swap": {
        "description": "Deterministic alternation; lagged covariances not summable",
        "build": lambda: deterministic_swap(name="swap"),
    },
    "asymmetric-two-state": {
        "description": "P = [[0.6, 0.4], [0.2, 0.8]], g = (+1, -1) before centering",
        "build": lambda: MarkovMixingSpec(states=2, P=[[0.6, 0.4], [0.2, 0.8]], g=[1.0, -1.0],
                                          pi=[1.0 / 3.0, 2.0 / 3.0], name="asymmetric-two-state"),
    },
    "three-state-cycle": {
        "description": "Lazy three-cycle with a 2-d observable; nonsymmetric Gamma",
        "build": lambda: MarkovMixingSpec(
            states=3,
            P=[[0.5, 0.4, 0.1], [0.1, 0.5, 0.4], [0.4, 0.1, 0.5]],
            g=[[1.0, 0.0], [-0.5, 0.8660254037844386], [-0.5, -0.8660254037844386]],
            pi=[1.0 / 3.0] * 3,
            name="three-state-cycle",
        ),
    },
}

# Suspension catalog
SUSPENSION_PRESETS: Dict[str, Dict] = {
    "two-state-roof": {
        "description": "asymmetric-two-state base with roofs (0.5, 1.5), constant fibers",
        "base": "asymmetric-two-state",
        "tau": [0.5, 1.5],
        "fiber_mode": "constant",
    },
    "unit-roof": {
        "description": "two-state-0.3 base with tau = 1; reduces to the discrete case",
        "base": "two-state-0.3",
        "tau": [1.0, 1.0],
        "fiber_mode": "constant",
    },
    "ramp-roof": {
        "description": "two-state-roof base with linear fiber ramps",
        "base": "asymmetric-two-state",
        "tau": [0.5, 1.5],
        "fiber_mode": "polynomial",
        "fiber_coefficients": [[[1.0, 2.0]], [[-1.0, 0.5]]],
    },
}


def chain_preset(name: str) -> MarkovMixingSpec:
    entry = CHAIN_PRESETS.get(name)
    if entry is None:
        raise ConfigError(f"Unknown chain preset: {name}", [{"loc": "chain", "msg": f"unknown preset {name!r}"}])
    return entry["build"]()


def suspension_preset(name: str) -> SuspensionSpec:
    entry = SUSPENSION_PRESETS.get(name)
    if entry is None:
        raise ConfigError(f"Unknown suspension preset: {name}",
                          [{"loc": "suspension", "msg": f"unknown preset {name!r}"}])
    fields = {k: v for k, v in entry.items() if k not in ("description", "base")}
    return SuspensionSpec(base=chain_preset(entry["base"]), name=name, **fields)
