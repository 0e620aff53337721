"""On-disk cache of enumerations, one JSON document per group spec."""
from __future__ import annotations

import json
import os
import random
import re
from pathlib import Path

from . import __version__
from .enumeration import Decoration, TsLattice, enumerate_all
from .lattice import Lattice, LatticeAction
from .transfer import _wrap, generate, minimal_generating_set, register_enumeration

ENV_VAR = "TRANSLAT_CACHE"


class CacheError(RuntimeError):
    pass


def default_cache_dir() -> Path:
    env = os.environ.get(ENV_VAR)
    if env:
        return Path(env)
    return Path.home() / ".cache" / "translat"


def resolve_cache_dir(cache_dir: str | Path | None) -> Path:
    return Path(cache_dir) if cache_dir else default_cache_dir()


def cache_path(cache_dir: str | Path, spec: str) -> Path:
    safe = re.sub(r"[^A-Za-z0-9_.-]+", "_", spec)
    return Path(cache_dir) / f"{safe}.json"


def _rows_from_edges(n: int, edges) -> list[int]:
    rows = [1 << x for x in range(n)]
    for k, h in edges:
        rows[k] |= 1 << h
    return rows


def dump(tsl: TsLattice, spec: str) -> dict:
    lat, act = tsl.lattice, tsl.action
    return {
        "spec": spec,
        "version": __version__,
        "lattice": f"{lat.digest}:{act.digest}",
        "count": len(tsl.systems),
        "systems": [[list(e) for e in t.edges()] for t in tsl.systems],
        "decorations": [[int(b) for b in d.as_tuple()] for d in tsl.decorations],
    }


def write(tsl: TsLattice, spec: str, cache_dir: str | Path) -> Path:
    path = cache_path(cache_dir, spec)
    path.parent.mkdir(parents=True, exist_ok=True)
    tmp = path.with_suffix(".tmp")
    tmp.write_text(json.dumps(dump(tsl, spec), separators=(",", ":")))
    tmp.replace(path)
    return path


def read(path: str | Path, lat: Lattice, act: LatticeAction, rng: random.Random | None = None) -> TsLattice:
    """Load a cached enumeration and spot-check one system by regenerating it."""
    try:
        doc = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise CacheError(f"unreadable cache file {path}: {exc}") from None
    if doc.get("version") != __version__:
        raise CacheError(f"cache {path} was written by version {doc.get('version')}")
    if doc.get("lattice") != f"{lat.digest}:{act.digest}":
        raise CacheError(f"cache {path} belongs to a different lattice")
    systems = [_wrap(lat, act, _rows_from_edges(lat.size, e)) for e in doc["systems"]]
    if len(systems) != doc.get("count") or len(set(systems)) != len(systems):
        raise CacheError(f"cache {path} is inconsistent")
    rng = rng or random.Random()
    probe = rng.choice(systems)
    if generate(lat, act, minimal_generating_set(probe)) != probe:
        raise CacheError(f"cache {path} holds a relation that is not a transfer system")
    decorations = [Decoration(*map(bool, d)) for d in doc["decorations"]]
    register_enumeration(systems[0].lattice_ref, len(systems))
    return TsLattice(lat, act, systems, decorations=decorations)


def load_or_enumerate(spec: str, lat: Lattice, act: LatticeAction, cache_dir: str | Path | None = None,
                      cached_only: bool = False, write_back: bool = True) -> TsLattice:
    """Cached enumeration when present and valid, otherwise enumerate (and store)."""
    path = cache_path(resolve_cache_dir(cache_dir), spec)
    if path.exists():
        try:
            return read(path, lat, act)
        except CacheError:
            if cached_only:
                raise
    elif cached_only:
        raise CacheError(f"no cached enumeration for {spec} at {path}")
    tsl = enumerate_all(lat, act)
    if write_back:
        write(tsl, spec, path.parent)
    return tsl
