"""File formats: protograph/partition text and JSON, alist, sidecars, BER CSV.

Every writer accepts a ``manifest`` hash which is embedded in the file
(as a ``#`` comment line in text and CSV files, as a field in JSON) so
that each artifact names the run that produced it.
"""

from __future__ import annotations

import csv
import hashlib
import json
import platform
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np
import scipy.sparse as sp

from .protograph import X, PartitionMatrix, Protograph

__all__ = [
    "MatrixFile",
    "RunManifest",
    "format_matrix_text",
    "parse_matrix_text",
    "save_matrix",
    "load_matrix",
    "load_protograph",
    "load_partition",
    "write_alist",
    "read_alist",
    "write_json",
    "write_ber_csv",
    "read_ber_csv",
    "write_rows_csv",
    "BER_COLUMNS",
]

BER_COLUMNS = ("snr_db", "ber", "fer", "frames", "bit_errors", "frame_errors", "mode", "code_id")


@dataclass
class MatrixFile:
    """Parsed protograph or partition file."""

    entries: np.ndarray
    gamma_c: int
    gamma_l: int
    kind: str = "protograph"
    manifest: str | None = None

    def as_protograph(self) -> Protograph:
        return Protograph(self.entries, gamma_c=self.gamma_c, gamma_l=self.gamma_l)

    def as_partition(self) -> PartitionMatrix:
        return PartitionMatrix(self.entries, gamma_c=self.gamma_c, gamma_l=self.gamma_l)


def _token(v: int) -> str:
    return "X" if v == X else str(int(v))


def _kind_of(obj) -> str:
    return "partition" if isinstance(obj, PartitionMatrix) else "protograph"


def format_matrix_text(obj, manifest: str | None = None) -> str:
    """Render a Protograph or PartitionMatrix in the whitespace text format."""
    lines = []
    if manifest:
        lines.append(f"# manifest {manifest}")
    lines.append(f"# {_kind_of(obj)}")
    lines.append(f"gamma_c={obj.gamma_c} gamma_l={obj.gamma_l}")
    for row in obj.entries:
        lines.append(" ".join(_token(v) for v in row))
    return "\n".join(lines) + "\n"


def parse_matrix_text(text: str) -> MatrixFile:
    manifest = None
    kind = None
    header = None
    rows = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith("#"):
            words = line[1:].split()
            if len(words) == 2 and words[0] == "manifest":
                manifest = words[1]
            elif len(words) == 1 and words[0] in ("protograph", "partition"):
                kind = words[0]
            continue
        if header is None:
            try:
                header = dict(tok.split("=", 1) for tok in line.split())
                gc, gl = int(header["gamma_c"]), int(header["gamma_l"])
            except (ValueError, KeyError):
                raise ValueError(f"line {lineno}: expected header 'gamma_c=<n> gamma_l=<n>'") from None
            continue
        row = []
        for tok in line.split():
            if tok in ("X", "x"):
                row.append(X)
            elif tok in ("0", "1"):
                row.append(int(tok))
            else:
                raise ValueError(f"line {lineno}: bad token {tok!r}")
        rows.append(row)
    if header is None:
        raise ValueError("missing header line")
    if not rows or len({len(r) for r in rows}) != 1:
        raise ValueError("matrix rows are missing or ragged")
    entries = np.array(rows, dtype=np.int8)
    if kind is None:
        kind = "partition" if (entries == X).any() else "protograph"
    return MatrixFile(entries, gc, gl, kind, manifest)


def _matrix_json(obj, manifest: str | None) -> dict:
    return {"kind": _kind_of(obj), "gamma_c": obj.gamma_c, "gamma_l": obj.gamma_l,
            "rows": [[_token(v) for v in row] for row in obj.entries], "manifest": manifest}


def _parse_matrix_json(d: dict) -> MatrixFile:
    try:
        rows = [[X if t == "X" else int(t) for t in row] for row in d["rows"]]
        return MatrixFile(np.array(rows, dtype=np.int8), int(d["gamma_c"]), int(d["gamma_l"]),
                          d.get("kind", "protograph"), d.get("manifest"))
    except (KeyError, TypeError, ValueError) as exc:
        raise ValueError(f"malformed matrix JSON: {exc}") from None


def save_matrix(path, obj, manifest: str | None = None) -> Path:
    """Write ``obj`` as JSON when ``path`` ends in .json, else as text."""
    path = Path(path)
    if path.suffix == ".json":
        write_json(path, _matrix_json(obj, manifest))
    else:
        path.write_text(format_matrix_text(obj, manifest))
    return path


def load_matrix(path) -> MatrixFile:
    path = Path(path)
    text = path.read_text()
    if path.suffix == ".json":
        return _parse_matrix_json(json.loads(text))
    return parse_matrix_text(text)


def load_protograph(path) -> Protograph:
    return load_matrix(path).as_protograph()


def load_partition(path) -> PartitionMatrix:
    return load_matrix(path).as_partition()


def write_alist(path, h) -> Path:
    """MacKay alist: dims, max weights, weights, then 1-based neighbour lists."""
    h = sp.csr_matrix(h)
    h.eliminate_zeros()
    m, n = h.shape
    hc = h.tocsc()
    hc.sort_indices()
    h.sort_indices()
    cw = np.diff(hc.indptr)
    rw = np.diff(h.indptr)
    mc, mr = int(cw.max(initial=0)), int(rw.max(initial=0))
    out = [f"{n} {m}", f"{mc} {mr}", " ".join(map(str, cw)), " ".join(map(str, rw))]
    for j in range(n):
        nb = list(hc.indices[hc.indptr[j] : hc.indptr[j + 1]] + 1)
        out.append(" ".join(map(str, nb + [0] * (mc - len(nb)))))
    for i in range(m):
        nb = list(h.indices[h.indptr[i] : h.indptr[i + 1]] + 1)
        out.append(" ".join(map(str, nb + [0] * (mr - len(nb)))))
    path = Path(path)
    path.write_text("\n".join(out) + "\n")
    return path


def read_alist(path) -> sp.csr_matrix:
    nums = [int(t) for t in Path(path).read_text().split()]
    try:
        n, m, mc, mr = nums[:4]
    except ValueError:
        raise ValueError("alist file is truncated") from None
    pos = 4 + n + m
    cw = nums[4 : 4 + n]
    rows, cols = [], []
    for j in range(n):
        nb = nums[pos : pos + mc]
        pos += mc
        for i in nb[: cw[j]]:
            rows.append(i - 1)
            cols.append(j)
    if len(nums) < pos + m * mr:
        raise ValueError("alist file is truncated")
    h = sp.csr_matrix((np.ones(len(rows), dtype=np.int8), (rows, cols)), shape=(m, n))
    h.sort_indices()
    return h


def write_json(path, data) -> Path:
    path = Path(path)
    path.write_text(json.dumps(data, indent=2, sort_keys=True, default=_json_default) + "\n")
    return path


def _json_default(o):
    if isinstance(o, np.integer):
        return int(o)
    if isinstance(o, np.floating):
        return float(o)
    if isinstance(o, np.ndarray):
        return o.tolist()
    if isinstance(o, Path):
        return str(o)
    raise TypeError(f"not JSON serializable: {type(o).__name__}")


def write_rows_csv(path, rows, columns, manifest: str | None = None) -> Path:
    path = Path(path)
    with path.open("w", newline="") as fh:
        if manifest:
            fh.write(f"# manifest {manifest}\n")
        w = csv.DictWriter(fh, fieldnames=list(columns), extrasaction="ignore")
        w.writeheader()
        for r in rows:
            w.writerow(r)
    return path


def write_ber_csv(path, points, manifest: str | None = None) -> Path:
    return write_rows_csv(path, [p.as_row() for p in points], BER_COLUMNS, manifest)


def read_ber_csv(path) -> list[dict]:
    with Path(path).open(newline="") as fh:
        lines = [ln for ln in fh if not ln.startswith("#")]
    out = []
    for r in csv.DictReader(lines):
        out.append({"snr_db": float(r["snr_db"]), "ber": float(r["ber"]), "fer": float(r["fer"]),
                    "frames": int(r["frames"]), "bit_errors": int(r["bit_errors"]),
                    "frame_errors": int(r["frame_errors"]), "mode": r["mode"], "code_id": r["code_id"]})
    return out


@dataclass
class RunManifest:
    """Record of one CLI invocation.

    The hash covers command, inputs, parameters and version (not the
    outputs), so it is known before any output is written.
    """

    command: str
    params: dict
    inputs: list[str] = field(default_factory=list)
    outputs: list[str] = field(default_factory=list)
    version: str = ""
    python: str = field(default_factory=platform.python_version)

    @property
    def digest(self) -> str:
        payload = json.dumps({"command": self.command, "params": self.params,
                              "inputs": self.inputs, "version": self.version},
                             sort_keys=True, default=_json_default)
        return hashlib.sha256(payload.encode()).hexdigest()[:16]

    def as_dict(self) -> dict:
        d = asdict(self)
        d["hash"] = self.digest
        return d
