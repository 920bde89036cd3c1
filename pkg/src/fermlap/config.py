"""Problem description and the flat ``key=value`` configuration format."""
from __future__ import annotations

from dataclasses import dataclass, fields
from pathlib import Path

__all__ = ["ProblemSpec", "ConfigError", "parse_config", "read_config", "CODE_NAMES", "MODES"]

CODE_NAMES = {"brgc-direct": "brgc", "binary+gray": "binary"}
MODES = ("inline", "gadget")
PLANS = ("auto", "published", "complete")


class ConfigError(ValueError):
    """Invalid or inconsistent configuration."""


@dataclass
class ProblemSpec:
    """Everything needed to synthesize one Hamiltonian.

    Parameters
    ----------
    A, n, D : int
        Fermion count, bits per axis, spatial dimension.
    mode : {"inline", "gadget"}
        ``inline`` multiplies permutations out on the base registers;
        ``gadget`` uses ancilla copies and penalties with bounded weight.
    code : {"brgc-direct", "binary+gray"}
        Base-register encoding.  Gadget mode requires ``binary+gray``.
    Q : float or None
        Penalty weight; ``None`` picks ``100 * (||T||_1 + ||V||_1)``.
    plan : {"auto", "published", "complete"}
        Rotation plan.  ``auto`` picks the first plan the oracle confirms.
    """

    A: int = 2
    n: int = 2
    D: int = 1
    mode: str = "inline"
    code: str | None = None
    Q: float | None = None
    kinetic_coefficient: float = 1.0
    include_diagonal: bool = False
    potential: str | None = None
    two_body: str = "all"
    comparator: str = "serial"
    plan: str = "auto"
    cap_qubits: int = 20
    cap_states: int = 200_000
    seed: int = 0

    def __post_init__(self):
        if self.code is None:
            self.code = "binary+gray" if self.mode == "gadget" else "brgc-direct"
        self.validate()

    def validate(self) -> None:
        if self.A < 1:
            raise ConfigError("A must be at least 1")
        if self.n < 1:
            raise ConfigError("n must be at least 1")
        if self.D not in (1, 2, 3):
            raise ConfigError("D must be 1, 2 or 3")
        if self.mode not in MODES:
            raise ConfigError(f"mode must be one of {MODES}")
        if self.code not in CODE_NAMES:
            raise ConfigError(f"code must be one of {tuple(CODE_NAMES)}")
        if self.mode == "gadget" and self.code != "binary+gray":
            raise ConfigError("gadget mode needs code=binary+gray")
        if self.A > 1 << (self.n * self.D):
            raise ConfigError(f"{self.A} fermions do not fit on {1 << (self.n * self.D)} sites")
        if self.plan not in PLANS:
            raise ConfigError(f"plan must be one of {PLANS}")
        if self.two_body not in ("all", "factored"):
            raise ConfigError("two_body must be 'all' or 'factored'")
        if self.comparator not in ("serial", "tree"):
            raise ConfigError("comparator must be 'serial' or 'tree'")
        if self.Q is not None and self.Q <= 0:
            raise ConfigError("Q must be positive")

    @property
    def layout_code(self) -> str:
        return CODE_NAMES[self.code]

    def items(self) -> list[tuple[str, object]]:
        return [(f.name, getattr(self, f.name)) for f in fields(self)]


_CASTS = {f.name: f.type for f in fields(ProblemSpec)}


def _convert(key: str, raw: str):
    raw = raw.strip()
    kind = str(_CASTS[key])
    if raw.lower() in ("none", "auto") and key in ("Q", "potential", "code"):
        return None
    if key in ("A", "n", "D") and (".." in raw or "," in raw):
        return raw  # a range, only meaningful for the audit
    if kind.startswith("int"):
        return int(raw)
    if kind.startswith("float"):
        return float(raw)
    if kind.startswith("bool"):
        if raw.lower() in ("1", "true", "yes", "on"):
            return True
        if raw.lower() in ("0", "false", "no", "off"):
            return False
        raise ValueError(raw)
    return raw


def parse_config(text: str) -> dict:
    """Parse ``key=value`` lines; ``#`` starts a comment.  Unknown keys are errors."""
    out = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected key=value")
        key, value = (s.strip() for s in line.split("=", 1))
        key = key.replace("-", "_")
        if key in ("out_dir", "sweep"):
            out[key] = value
            continue
        if key not in _CASTS:
            raise ConfigError(f"line {lineno}: unknown key {key!r}")
        try:
            out[key] = _convert(key, value)
        except ValueError as exc:
            raise ConfigError(f"line {lineno}: bad value for {key}: {value!r}") from exc
    return out


def read_config(path: str | Path) -> dict:
    path = Path(path)
    if not path.is_file():
        raise ConfigError(f"config file not found: {path}")
    return parse_config(path.read_text())
