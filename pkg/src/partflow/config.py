"""Flat key/value run configuration.

Config files are diff-able text, one ``section.key = value`` pair per
line, '#' starts a comment. CLI --override KEY=VALUE entries win over
file values. The meta file written next to every artifact uses the same
syntax, so a meta file re-runs the exact configuration it records.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

__all__ = ["RunConfig", "parse_config_text", "write_meta"]

# paper-scale characteristic resolutions of the linear test cases
H_CHAR = 1.0 / 40.0
EPS_CHAR = H_CHAR / 10.0
DS_CHAR = 1.0 / 200.0


def parse_config_text(text: str) -> dict[str, str]:
    out: dict[str, str] = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"config line {lineno}: expected 'key = value', got {raw!r}")
        key, val = line.split("=", 1)
        out[key.strip()] = val.strip()
    return out


@dataclass
class RunConfig:
    """Typed view over the flat key/value mapping."""

    data: dict[str, str] = field(default_factory=dict)

    @classmethod
    def from_file(cls, path) -> "RunConfig":
        with open(path) as f:
            return cls(parse_config_text(f.read()))

    def override(self, pairs) -> None:
        for pair in pairs:
            if "=" not in pair:
                raise ValueError(f"override {pair!r} is not KEY=VALUE")
            key, val = pair.split("=", 1)
            self.data[key.strip()] = val.strip()

    def get(self, key: str, default=None) -> str | None:
        return self.data.get(key, default)

    def get_float(self, key: str, default: float | None = None) -> float | None:
        raw = self.data.get(key)
        if raw is None:
            return default
        return float(raw)

    def get_int(self, key: str, default: int | None = None) -> int | None:
        raw = self.data.get(key)
        if raw is None:
            return default
        return int(raw)

    def get_bool(self, key: str, default: bool = False) -> bool:
        raw = self.data.get(key)
        if raw is None:
            return default
        return raw.lower() in ("1", "true", "yes", "on")

    # case geometry and physics
    @property
    def case(self) -> str:
        return self.data.get("case", "flat")

    @property
    def Lx(self) -> float:
        return self.get_float("domain.Lx", 1.0)

    @property
    def Ly(self) -> float:
        return self.get_float("domain.Ly", 0.25)

    @property
    def theta(self) -> float:
        return math.radians(self.get_float("field.theta_deg", 39.0))

    @property
    def u0(self) -> float:
        return self.get_float("field.u0", 1e-3)

    @property
    def r(self) -> float:
        default = 1.0 / 20.0 if self.case == "flat_source" else 0.0
        return self.get_float("field.r", default)

    # solver resolution
    @property
    def h(self) -> float:
        return self.get_float("solver.h", H_CHAR)

    @property
    def eps(self) -> float:
        return self.get_float("solver.eps", self.h / 10.0)

    @property
    def ds(self) -> float:
        return self.get_float("solver.ds", DS_CHAR)

    @property
    def out_nx(self) -> int:
        return self.get_int("output.nx", 400)

    @property
    def out_ny(self) -> int:
        return self.get_int("output.ny", 100)

    @property
    def seed(self) -> int:
        return self.get_int("seed", 0)

    @property
    def threads(self) -> int:
        return self.get_int("threads", 1)


def write_meta(path, entries: dict) -> None:
    with open(path, "w") as f:
        for key, val in entries.items():
            f.write(f"{key} = {val}\n")
