"""Flat ``key = value`` run configuration.

One assignment per line, ``#`` starts a comment.  Unknown keys are rejected.
"""
from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path


class ConfigError(ValueError):
    pass


def _bits(text: str) -> str:
    bits = "".join(c for c in text if not c.isspace() and c not in ",[]")
    if not bits or any(c not in "01" for c in bits):
        raise ValueError(f"expected a bit string, got {text!r}")
    return bits


def _floats(text: str) -> tuple[float, ...]:
    parts = [p for p in text.replace(",", " ").split() if p]
    if not parts:
        raise ValueError("expected at least one number")
    return tuple(float(p) for p in parts)


def _variant(text: str) -> str:
    if text not in ("odd_chain", "even_chain"):
        raise ValueError(f"slide_variant must be odd_chain or even_chain, got {text!r}")
    return text


def _sign(text: str) -> int:
    v = int(text)
    if v not in (1, -1):
        raise ValueError("sign must be 1 or -1")
    return v


@dataclass(frozen=True)
class Key:
    parse: object
    default: object = None
    doc: str = ""


KEYS: dict[str, Key] = {
    "l_qs": Key(int, doc="slide sites (0 = no slide)"),
    "l_rw": Key(int, doc="runway sites, odd"),
    "j_mm_inv": Key(float, doc="runway coupling, mm^-1"),
    "slide_variant": Key(_variant, "odd_chain"),
    "tree_depth": Key(int, 1),
    "inputs": Key(_bits, None, "bit string; empty means no tree"),
    "z_max_mm": Key(float, 72.0),
    "z_step_mm": Key(float, 0.5),
    "sign": Key(_sign, -1),
    "packet_mu": Key(float, None),
    "packet_sigma": Key(float, None),
    "packet_gamma": Key(float, None),
    "velocity_window_mm": Key(_floats, (44.0, 54.0)),
    "profile_z_mm": Key(_floats, (15.0, 30.0, 45.0)),
    "pst_length": Key(int, 30),
    "l_half": Key(int, 250),
    "sigma_values": Key(_floats, (5.0, 10.0, 20.0, 30.0, 40.0, 45.0, 50.0, 60.0, 70.0, 80.0)),
    "energies": Key(_floats, (-0.01, -0.001, 0.0, 0.001, 0.01)),
    "workers": Key(int, 1),
}


def parse_text(text: str, source: str = "<config>") -> dict[str, object]:
    values: dict[str, object] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{source}:{lineno}: expected 'key = value', got {raw.strip()!r}")
        key, value = (p.strip() for p in line.split("=", 1))
        _assign(values, key, value, f"{source}:{lineno}")
    return values


def _assign(values: dict, key: str, value: str, where: str) -> None:
    if key not in KEYS:
        raise ConfigError(f"{where}: unknown key {key!r}")
    try:
        values[key] = KEYS[key].parse(value) if value != "" else None
    except ValueError as exc:
        raise ConfigError(f"{where}: bad value for {key!r}: {exc}") from None


def load(path: str | Path | None, overrides: list[str] = ()) -> dict[str, object]:
    """Read ``path`` (optional), apply ``key=value`` overrides, fill defaults."""
    values: dict[str, object] = {}
    if path is not None:
        p = Path(path)
        try:
            text = p.read_text(encoding="utf-8")
        except OSError as exc:
            raise ConfigError(f"cannot read config {p}: {exc.strerror}") from None
        values = parse_text(text, str(p))
    for i, item in enumerate(overrides, start=1):
        if "=" not in item:
            raise ConfigError(f"override {i}: expected key=value, got {item!r}")
        key, value = (s.strip() for s in item.split("=", 1))
        _assign(values, key, value, f"override {i}")
    resolved = {k: values.get(k, spec.default) for k, spec in KEYS.items()}
    return resolved


def require(cfg: dict, *keys: str) -> None:
    missing = [k for k in keys if cfg.get(k) is None]
    if missing:
        raise ConfigError(f"missing required key(s): {', '.join(missing)}")
