"""Instance files: JSON descriptions of a root system, base point and order data.

Schema::

    {
      "type": "A2",                     # root system label
      "lambda0": ["1/5", "1/7"],        # base point, coroot coordinates
      "omega": [                         # explicit support (alternative: ddaha_h)
        {"root": {"alpha": [1, 0], "level": 0}, "value": 1},
        ...
      ],
      "ddaha_h": "1/2",                 # or {"<norm2>": "<value>"} per length class
      "gamma": ["-1", "-1"],            # optional override of the deep lift
      "ball": 8,                         # default sweep radius
      "degree": 2                        # default polynomial degree bound
    }

Exactly one of "omega" / "ddaha_h" must be present.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction

from .algebra import Algebra
from .bqha import BAlgebra
from .kz import GammaChoice, check_gamma, choose_gamma
from .orderfun import OrderFunction, from_ddaha_h, integral_b_order_function
from .rootsys import AffineRoot, affinise, vec
from .weyl import AffineWeylGroup


@dataclass
class InstanceSpec:
    label: str
    group: AffineWeylGroup
    omega: OrderFunction
    gamma_choice: GammaChoice
    ball: int = 8
    degree: int = 2
    ddaha_h: object | None = None

    def algebra(self, length_cap: int = 120) -> Algebra:
        return Algebra(self.omega, length_cap=length_cap)

    def b_algebra(self) -> BAlgebra:
        return BAlgebra(integral_b_order_function(self.omega, gamma=self.gamma_choice.gamma))

    def digest(self) -> dict:
        return {
            "type": self.label,
            "lambda0": [str(c) for c in self.omega.base_point],
            "support": [
                {"root": {"alpha": list(a.alpha), "level": a.level}, "value": v}
                for a, v in sorted(self.omega.support.items())
            ],
            "gamma": [str(c) for c in self.gamma_choice.gamma],
        }


def _parse_h(raw):
    if isinstance(raw, dict):
        return {Fraction(k): Fraction(v) for k, v in raw.items()}
    return Fraction(raw)


def instance_from_data(data: dict) -> InstanceSpec:
    label = data["type"]
    group = AffineWeylGroup(affinise(label))
    lam0 = vec([Fraction(c) for c in data["lambda0"]])
    has_omega = "omega" in data
    has_h = "ddaha_h" in data
    if has_omega == has_h:
        raise ValueError("an instance needs exactly one of 'omega' or 'ddaha_h'")
    ddaha_h = None
    if has_omega:
        support = {}
        for item in data["omega"]:
            root = item["root"]
            a = AffineRoot(tuple(int(c) for c in root["alpha"]), int(root["level"]))
            support[a] = int(item["value"])
        omega = OrderFunction(group, lam0, support)
    else:
        ddaha_h = _parse_h(data["ddaha_h"])
        omega = from_ddaha_h(group, ddaha_h, lam0, window=int(data.get("window", 12)))
    if "gamma" in data:
        gamma = vec([Fraction(c) for c in data["gamma"]])
        margin = omega.support_level_radius() + 1
        check_gamma(group, gamma, margin)
        gc = GammaChoice(gamma=gamma, margin=margin)
    else:
        gc = choose_gamma(omega)
    return InstanceSpec(
        label=label,
        group=group,
        omega=omega,
        gamma_choice=gc,
        ball=int(data.get("ball", 8)),
        degree=int(data.get("degree", 2)),
        ddaha_h=ddaha_h,
    )


def load_instance(path) -> InstanceSpec:
    with open(path) as fh:
        data = json.load(fh)
    return instance_from_data(data)


# ----- canned instances used by the test-suite and the worked example -----

def rank1_quarter() -> InstanceSpec:
    """Base point 1/4 in the rank-1 affinisation, order one on the affine basis."""
    return instance_from_data({
        "type": "A1",
        "lambda0": ["1/4"],
        "omega": [
            {"root": {"alpha": [1], "level": 0}, "value": 1},
            {"root": {"alpha": [-1], "level": 1}, "value": 1},
        ],
    })


def a2_generic() -> InstanceSpec:
    """A2 with a generic base point and order one on the affine basis."""
    return instance_from_data({
        "type": "A2",
        "lambda0": ["1/5", "1/7"],
        "omega": [
            {"root": {"alpha": [1, 0], "level": 0}, "value": 1},
            {"root": {"alpha": [0, 1], "level": 0}, "value": 1},
            {"root": {"alpha": [-1, -1], "level": 1}, "value": 1},
        ],
    })


def a2_wall() -> InstanceSpec:
    """A2 with the base point on the alpha_1 wall: order -1 there, 2 on the affine pair."""
    return instance_from_data({
        "type": "A2",
        "lambda0": ["1/7", "2/7"],
        "omega": [
            {"root": {"alpha": [1, 0], "level": 0}, "value": -1},
            {"root": {"alpha": [-1, 0], "level": 0}, "value": -1},
            {"root": {"alpha": [-1, -1], "level": 1}, "value": 2},
            {"root": {"alpha": [0, -1], "level": 1}, "value": 2},
        ],
    })


def c2_generic() -> InstanceSpec:
    return instance_from_data({
        "type": "C2",
        "lambda0": ["1/5", "1/7"],
        "omega": [
            {"root": {"alpha": [1, 0], "level": 0}, "value": 1},
            {"root": {"alpha": [0, 1], "level": 0}, "value": 1},
        ],
    })
