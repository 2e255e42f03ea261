"""
On-disk cache for the mask, connection and moment tables.

Bundles are JSON documents. Rationals are stored as [numerator, denominator]
pairs, floats as JSON numbers (shortest repr, which round-trips exactly). A
SHA-256 over the canonical payload guards against corruption; the format
version is checked before anything else is interpreted.
"""

from __future__ import annotations

import hashlib
import json
import math
import os
import tempfile
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path

import numpy as np

from .connection import ConnectionTable, compute_connection
from .moments import MomentTable, compute_moments
from .scaling import RefinementMask, build_mask

FORMAT_VERSION = 1
CACHE_ENV = "DDGALERKIN_CACHE_DIR"


class CacheError(RuntimeError):
    pass


class CacheIntegrityError(CacheError):
    pass


class CacheVersionError(CacheError):
    pass


@dataclass(eq=False)
class TableBundle:
    mask: RefinementMask
    connection: ConnectionTable
    moments: MomentTable
    format_version: int = FORMAT_VERSION

    @property
    def N(self) -> int:
        return self.mask.N

    @property
    def m_max(self) -> int:
        return self.moments.m_max

    def __eq__(self, other) -> bool:
        if not isinstance(other, TableBundle):
            return NotImplemented
        return (
            self.format_version == other.format_version
            and self.mask.coeffs == other.mask.coeffs
            and self.connection.L == other.connection.L
            and self.moments.H.shape == other.moments.H.shape
            and bool(np.all(self.moments.H == other.moments.H))
        )


def build_bundle(N: int = 4, m_max: int = 10) -> TableBundle:
    mask = build_mask(N)
    return TableBundle(mask, compute_connection(mask), compute_moments(mask, m_max))


def _num(v):
    if isinstance(v, Fraction):
        return [v.numerator, v.denominator]
    v = float(v)
    if not math.isfinite(v):
        raise ValueError(f"cannot serialise non-finite value {v!r}")
    return v


def _unnum(v):
    if isinstance(v, list):
        return Fraction(int(v[0]), int(v[1]))
    return float(v)


def _payload(bundle: TableBundle) -> dict:
    return {
        "N": bundle.N,
        "m_max": bundle.m_max,
        "mask": {str(k): _num(v) for k, v in sorted(bundle.mask.coeffs.items())},
        "L": {str(k): _num(v) for k, v in sorted(bundle.connection.L.items())},
        "H": [[_num(v) for v in row] for row in bundle.moments.H],
    }


def _checksum(payload: dict) -> str:
    blob = json.dumps(payload, sort_keys=True, separators=(",", ":")).encode()
    return hashlib.sha256(blob).hexdigest()


def dumps(bundle: TableBundle) -> str:
    payload = _payload(bundle)
    doc = {"format_version": bundle.format_version, "checksum": _checksum(payload), "payload": payload}
    return json.dumps(doc, indent=1, sort_keys=True) + "\n"


def store(bundle: TableBundle, path: str | Path) -> Path:
    """Write ``bundle`` to ``path`` atomically (temporary file, then rename)."""
    path = Path(path)
    text = dumps(bundle)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=path.name, suffix=".tmp")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
    return path


def loads(text: str) -> TableBundle:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise CacheIntegrityError(f"table bundle is not valid JSON: {exc}") from exc
    version = doc.get("format_version")
    if version != FORMAT_VERSION:
        raise CacheVersionError(f"unsupported table bundle format_version {version!r} (expected {FORMAT_VERSION})")
    payload = doc.get("payload")
    if not isinstance(payload, dict) or _checksum(payload) != doc.get("checksum"):
        raise CacheIntegrityError("table bundle checksum mismatch")
    N = int(payload["N"])
    mask = RefinementMask(N, {int(k): _unnum(v) for k, v in payload["mask"].items()})
    L = ConnectionTable(N, {int(k): _unnum(v) for k, v in payload["L"].items()})
    H = np.array([[_unnum(v) for v in row] for row in payload["H"]], dtype=float)
    moments = MomentTable(N, int(payload["m_max"]), H)
    return TableBundle(mask, L, moments, version)


def load(path: str | Path) -> TableBundle:
    path = Path(path)
    if not path.is_file():
        raise FileNotFoundError(f"no table bundle at {path}")
    return loads(path.read_text())


def cache_dir(override: str | Path | None = None) -> Path:
    if override is not None:
        return Path(override)
    env = os.environ.get(CACHE_ENV)
    if env:
        return Path(env)
    return Path.home() / ".cache" / "ddgalerkin"


def bundle_path(N: int, m_max: int, directory: str | Path | None = None) -> Path:
    return cache_dir(directory) / f"tables_N{N}_m{m_max}.json"


def get_tables(N: int = 4, m_max: int = 10, directory: str | Path | None = None, use_cache: bool = True) -> TableBundle:
    """Load tables from the cache, computing and storing them on a miss.

    A corrupt or outdated cache file is rebuilt rather than trusted.
    """
    if not use_cache:
        return build_bundle(N, m_max)
    path = bundle_path(N, m_max, directory)
    try:
        return load(path)
    except (FileNotFoundError, CacheError):
        pass
    bundle = build_bundle(N, m_max)
    try:
        store(bundle, path)
    except OSError:
        pass  # read-only cache location: still return the fresh tables
    return bundle
