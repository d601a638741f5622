"""Ablation configurations: which block representation, edges and aggregator to use.

File format is one ``key=value`` per line; blank lines and ``#`` comments
are ignored and omitted keys keep their defaults.
"""

from __future__ import annotations

from dataclasses import dataclass, fields
from pathlib import Path

from codegraph.errors import ConfigError

CHOICES = {
    "block_repr": ("ast", "bow"),
    "edges": ("both", "control", "dataflow"),
    "edge_typing": ("multi", "single"),
    "combine": ("sum", "concat"),
    "aggregator": ("agn4d", "gcn"),
}


@dataclass(frozen=True)
class AblationConfig:
    block_repr: str = "ast"
    edges: str = "both"
    edge_typing: str = "multi"
    combine: str = "sum"
    aggregator: str = "agn4d"

    def __post_init__(self):
        for f in fields(self):
            value = getattr(self, f.name)
            if value not in CHOICES[f.name]:
                raise ConfigError(f"{f.name}={value!r}: expected one of {', '.join(CHOICES[f.name])}")

    @property
    def short_name(self) -> str:
        """Row label in the comparison table, e.g. ``A+C+D+M``."""
        parts = ["A" if self.block_repr == "ast" else "B"]
        if self.edges in ("both", "control"):
            parts.append("C")
        if self.edges in ("both", "dataflow"):
            parts.append("D")
        parts.append("M" if self.edge_typing == "multi" else "S")
        name = "+".join(parts)
        if self.combine != "sum":
            name += "/concat"
        if self.aggregator != "agn4d":
            name += "/" + self.aggregator.upper()
        return name

    def to_text(self) -> str:
        return "".join(f"{f.name}={getattr(self, f.name)}\n" for f in fields(self))

    def as_dict(self) -> dict[str, str]:
        return {f.name: getattr(self, f.name) for f in fields(self)}


DEFAULT_CONFIG = AblationConfig()


def parse_config(text: str) -> AblationConfig:
    values: dict[str, str] = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = (s.strip() for s in line.partition("="))
        if not sep:
            raise ConfigError(f"line {lineno}: expected key=value, got {raw.strip()!r}")
        if key not in CHOICES:
            raise ConfigError(f"line {lineno}: unknown key {key!r}")
        if key in values:
            raise ConfigError(f"line {lineno}: duplicate key {key!r}")
        values[key] = value
    return AblationConfig(**values)


def load_config(path: str | Path) -> AblationConfig:
    return parse_config(Path(path).read_text(encoding="utf-8"))


# The comparison rows reported by the ablation driver.
TABLE_VARIANTS: dict[str, AblationConfig] = {
    "A+C+S": AblationConfig(edges="control", edge_typing="single"),
    "A+D+S": AblationConfig(edges="dataflow", edge_typing="single"),
    "A+C+M": AblationConfig(edges="control"),
    "B+C+D+M": AblationConfig(block_repr="bow"),
    "A+C+D+M": DEFAULT_CONFIG,
    "concatenation": AblationConfig(combine="concat"),
    "GCN": AblationConfig(aggregator="gcn"),
}
