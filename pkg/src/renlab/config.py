"""Experiment configuration: TOML in, validated plain dicts out."""

import json
import math

import tomli

from .renarea import DEFAULT_LADDER

SECTIONS = {
    "model": None,  # validated by models.from_config
    "surface": {"base", "delta", "mode", "grid", "tol", "maxit", "load"},
    "ladder": {"epsilons", "order", "tol"},
    "expand": {"order", "ntheta", "ns", "h0", "halvings"},
    "flow": {"generator", "phi_m1_fourier", "T", "K", "mode", "delta", "second_variation"},
    "scan": {"n_samples", "s_values"},
    "output": {"directory", "formats"},
}

PROFILES = {
    "strict": {"grid": [16, 32], "solver_tol": 1e-10, "fit_tol": 1e-6},
    "fast": {"grid": [12, 24], "solver_tol": 1e-9, "fit_tol": 1e-5},
}

FORMATS = {"csv", "gnuplot"}


class ConfigError(ValueError):
    pass


def load(path, profile="strict"):
    try:
        with open(path, "rb") as fh:
            raw = tomli.load(fh)
    except OSError as exc:
        raise ConfigError("cannot read config: %s" % exc) from exc
    except tomli.TOMLDecodeError as exc:
        raise ConfigError("malformed config: %s" % exc) from exc
    return resolve(raw, profile)


def _number(sec, key, default, kind=float, positive=False):
    v = sec.get(key, default)
    try:
        v = kind(v)
    except (TypeError, ValueError) as exc:
        raise ConfigError("%s must be a number" % key) from exc
    if kind is float and not math.isfinite(v):
        raise ConfigError("%s must be finite" % key)
    if positive and v <= 0:
        raise ConfigError("%s must be positive" % key)
    return v


def resolve(raw, profile="strict"):
    """Fill defaults and reject unknown keys.  The result is JSON-serializable."""
    if profile not in PROFILES:
        raise ConfigError("unknown tolerance profile %r" % profile)
    prof = PROFILES[profile]
    unknown = set(raw) - set(SECTIONS)
    if unknown:
        raise ConfigError("unknown sections: %s" % ", ".join(sorted(unknown)))
    for name, keys in SECTIONS.items():
        sec = raw.get(name, {})
        if not isinstance(sec, dict):
            raise ConfigError("[%s] must be a table" % name)
        if keys is not None:
            bad = set(sec) - keys
            if bad:
                raise ConfigError("unknown keys in [%s]: %s" % (name, ", ".join(sorted(bad))))
    if "model" not in raw or "kind" not in raw["model"]:
        raise ConfigError("[model] with a kind is required")

    s = raw.get("surface", {})
    surface = {
        "base": _number(s, "base", math.pi / 2),
        "delta": _number(s, "delta", 0.0),
        "mode": _number(s, "mode", 0, int),
        "grid": [int(v) for v in s.get("grid", prof["grid"])],
        "tol": _number(s, "tol", prof["solver_tol"], positive=True),
        "maxit": _number(s, "maxit", 30, int, positive=True),
        "load": s.get("load"),
    }
    if len(surface["grid"]) != 2 or min(surface["grid"]) < 4:
        raise ConfigError("surface grid must be two sizes of at least 4")

    lad = raw.get("ladder", {})
    eps = [float(e) for e in lad.get("epsilons", DEFAULT_LADDER)]
    if len(eps) < 4 or min(eps) <= 0:
        raise ConfigError("ladder needs at least four positive cutoffs")
    ladder = {
        "epsilons": eps,
        "order": _number(lad, "order", 3, int, positive=True),
        "tol": _number(lad, "tol", prof["fit_tol"], positive=True),
    }

    e = raw.get("expand", {})
    expand = {
        "order": _number(e, "order", 4, int, positive=True),
        "ntheta": _number(e, "ntheta", 16, int, positive=True),
        "ns": _number(e, "ns", 16, int, positive=True),
        "h0": _number(e, "h0", 0.1, positive=True),
        "halvings": _number(e, "halvings", 3, int, positive=True),
    }

    f = raw.get("flow", {})
    flow = {
        "generator": f.get("generator", "static"),
        "phi_m1_fourier": [float(v) for v in f.get("phi_m1_fourier", [1.0])],
        "T": _number(f, "T", 0.04, positive=True),
        "K": _number(f, "K", 4, int, positive=True),
        "mode": f.get("mode", "geodesic"),
        "delta": _number(f, "delta", 1e-2, positive=True),
        "second_variation": bool(f.get("second_variation", True)),
    }
    if flow["generator"] not in ("static", "general"):
        raise ConfigError("flow generator must be static or general")
    if flow["mode"] not in ("geodesic", "renormalized"):
        raise ConfigError("flow mode must be geodesic or renormalized")

    sc = raw.get("scan", {})
    scan = {"n_samples": _number(sc, "n_samples", 16, int, positive=True), "s_values": sc.get("s_values")}
    if scan["s_values"] is not None:
        scan["s_values"] = [float(v) for v in scan["s_values"]]

    o = raw.get("output", {})
    formats = list(o.get("formats", sorted(FORMATS)))
    if set(formats) - FORMATS:
        raise ConfigError("unknown output formats: %s" % ", ".join(sorted(set(formats) - FORMATS)))
    output = {"directory": o.get("directory", "out"), "formats": formats}

    return {
        "model": dict(raw["model"]),
        "surface": surface,
        "ladder": ladder,
        "expand": expand,
        "flow": flow,
        "scan": scan,
        "output": output,
        "tolerance_profile": profile,
    }


def dumps(cfg):
    return json.dumps(cfg, sort_keys=True, indent=2) + "\n"
