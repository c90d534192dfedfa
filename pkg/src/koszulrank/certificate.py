"""Certificate records: text serialization, factored integers, the append-only store.

A certificate is a flat list of ``key = value`` lines.  Determinant values
are written factored (``-2^20*3^4``) when they split completely over primes
below 1000, lists as bracketed space-separated values, and submatrix index
sets 1-based.
"""

from __future__ import annotations

import json
import os
import re
import threading
import time
from dataclasses import dataclass, field
from pathlib import Path

from sympy import primerange

from .errors import InvalidArgument

__all__ = [
    "VERDICTS",
    "Certificate",
    "render_int",
    "parse_int",
    "default_out_dir",
    "write_certificate",
    "read_certificate",
]

VERDICTS = ("PROVED", "PROVED-MOD-P", "PROBABILISTIC", "FAILED")
OUT_DIR_ENV = "KOSZULRANK_OUT_DIR"

_SMALL_PRIMES = tuple(primerange(2, 1000))


def render_int(v: int) -> str:
    """``v`` as a product of prime powers below 1000, or in decimal if it does not split."""
    v = int(v)
    if v in (0, 1, -1):
        return str(v)
    sign = "-" if v < 0 else ""
    rest = abs(v)
    parts = []
    for p in _SMALL_PRIMES:
        if p * p > rest and rest < 1000:
            break
        e = 0
        while rest % p == 0:
            rest //= p
            e += 1
        if e:
            parts.append(f"{p}^{e}" if e > 1 else str(p))
        if rest == 1:
            break
    if rest != 1:
        if rest < 1000:
            parts.append(str(rest))
        else:
            return str(v)
    return sign + "*".join(parts)


_FACTOR = re.compile(r"^(\d+)(?:\^(\d+))?$")


def parse_int(text: str) -> int:
    """Inverse of :func:`render_int` (also accepts plain decimals)."""
    text = text.strip()
    sign = 1
    if text.startswith("-"):
        sign, text = -1, text[1:]
    acc = 1
    for part in text.split("*"):
        m = _FACTOR.match(part.strip())
        if not m:
            raise InvalidArgument(f"not an integer: {text!r}")
        acc *= int(m.group(1)) ** int(m.group(2) or 1)
    return sign * acc


@dataclass
class Certificate:
    """Evidence for one theorem-level claim.

    ``fields`` holds everything else in insertion order: ``input.*`` keys
    for what is needed to replay, ``fact.*`` keys for computed results,
    ``submatrix.<name>.*`` for stored index sets.
    """

    tag: str
    verdict: str = "FAILED"
    fields: dict = field(default_factory=dict)
    runtime: float = 0.0

    def __post_init__(self):
        if self.verdict not in VERDICTS:
            raise InvalidArgument(f"unknown verdict {self.verdict!r}")

    def __getitem__(self, key: str):
        return self.fields[key]

    def __setitem__(self, key: str, value) -> None:
        self.fields[key] = value

    def get(self, key: str, default=None):
        return self.fields.get(key, default)

    @property
    def ok(self) -> bool:
        return self.verdict != "FAILED"

    def facts(self) -> dict:
        """Fields that a replay must reproduce (inputs and results, not timings)."""
        return {k: v for k, v in self.fields.items() if not k.startswith("note")}

    def add_submatrix(self, name: str, cert, **extra) -> None:
        base = f"submatrix.{name}"
        self.fields[f"{base}.size"] = cert.size
        self.fields[f"{base}.rows"] = [r + 1 for r in cert.rows]
        self.fields[f"{base}.cols"] = [c + 1 for c in cert.cols]
        self.fields[f"{base}.det"] = cert.det
        if cert.prime is not None:
            self.fields[f"{base}.prime"] = cert.prime
            self.fields[f"{base}.residue"] = cert.residue
        for k, v in extra.items():
            self.fields[f"{base}.{k}"] = v

    def submatrices(self) -> dict[str, dict]:
        out: dict[str, dict] = {}
        for k, v in self.fields.items():
            if k.startswith("submatrix."):
                _, name, attr = k.split(".", 2)
                out.setdefault(name, {})[attr] = v
        return out

    # -- text form --------------------------------------------------------

    def dumps(self) -> str:
        lines = ["# koszulrank certificate", f"tag = {self.tag}", f"verdict = {self.verdict}"]
        for k, v in self.fields.items():
            lines.append(f"{k} = {_render(v, _factored(k))}")
        lines.append(f"runtime = {self.runtime:.3f}")
        return "\n".join(lines) + "\n"

    @classmethod
    def loads(cls, text: str) -> Certificate:
        raw = {}
        for ln in text.splitlines():
            if not ln.strip() or ln.lstrip().startswith("#"):
                continue
            if " = " not in ln:
                raise InvalidArgument(f"bad certificate line: {ln!r}")
            k, v = ln.split(" = ", 1)
            raw[k.strip()] = v.strip()
        try:
            tag = raw.pop("tag")
            verdict = raw.pop("verdict")
        except KeyError as exc:
            raise InvalidArgument(f"certificate lacks {exc.args[0]!r}") from exc
        runtime = float(raw.pop("runtime", "0"))
        return cls(tag, verdict, {k: _parse(v) for k, v in raw.items()}, runtime)

    def to_json(self) -> str:
        return json.dumps({"tag": self.tag, "verdict": self.verdict, "runtime": self.runtime,
                           "fields": {k: (str(v) if isinstance(v, int) and abs(v) > 2**53 else v)
                                      for k, v in self.fields.items()}}, indent=1)


def _factored(key: str) -> bool:
    """Determinant-like values are shown factored; ranks, sizes and indices in decimal."""
    last = key.rsplit(".", 1)[-1]
    return "det" in last or last == "target"


def _render(v, factored: bool = False) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, int):
        return render_int(v) if factored else str(v)
    if isinstance(v, (list, tuple)):
        return "[" + " ".join(_render(x) for x in v) + "]"
    if isinstance(v, float):
        return repr(v)
    return str(v)


def _parse(s: str):
    if s == "true":
        return True
    if s == "false":
        return False
    if s.startswith("[") and s.endswith("]"):
        return [_parse(x) for x in s[1:-1].split()]
    try:
        return parse_int(s)
    except InvalidArgument:
        return s


def default_out_dir() -> Path:
    return Path(os.environ.get(OUT_DIR_ENV, "certificates"))


_WRITE_LOCK = threading.Lock()


def write_certificate(cert: Certificate, out_dir=None) -> Path:
    """Write ``cert`` to a new file; existing certificates are never overwritten."""
    out = Path(out_dir) if out_dir is not None else default_out_dir()
    with _WRITE_LOCK:
        out.mkdir(parents=True, exist_ok=True)
        stamp = time.strftime("%Y%m%d-%H%M%S")
        k = 0
        while True:
            path = out / f"{cert.tag}-{stamp}-{k:03d}.cert"
            try:
                with open(path, "x", encoding="utf-8") as fh:
                    fh.write(cert.dumps())
                return path
            except FileExistsError:
                k += 1


def read_certificate(path) -> Certificate:
    with open(path, encoding="utf-8") as fh:
        return Certificate.loads(fh.read())
