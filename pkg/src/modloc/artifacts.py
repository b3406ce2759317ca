"""Persistence: representation and state containers, reports, run configs.

Containers are a single JSON header line followed by the raw row-major
bytes of each array, in header order.  Everything that determines the
bytes is either in the header or in the producing config, so rebuilding
an artifact from the same config yields a byte-identical file.
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import asdict, dataclass, field

import numpy as np

from .errors import ConfigError, DecompositionFailure
from .gridop import GridSpec
from .laguerre import BasisSpec
from .localization import StateVector
from .spectral import GeneratorSet

__all__ = [
    "REP_MAGIC",
    "STATE_MAGIC",
    "RunConfig",
    "save_representation",
    "load_representation",
    "save_state",
    "load_state",
    "state_profile_rows",
    "write_state_csv",
    "report_rows",
    "write_report_csv",
    "write_report_json",
    "report_markdown",
    "write_curves_csv",
]

REP_MAGIC = "MODLOC-REP"
STATE_MAGIC = "MODLOC-STATE"
FORMAT_VERSION = 1


def _header_bytes(header: dict) -> bytes:
    # canonical serialization: sorted keys, fixed separators, so identical
    # content gives identical bytes
    return (json.dumps(header, sort_keys=True, separators=(",", ":"))
            + "\n").encode("utf-8")


def _read_header(blob: bytes, magic: str) -> tuple[dict, bytes]:
    nl = blob.find(b"\n")
    if nl < 0:
        raise DecompositionFailure("artifact has no header line")
    try:
        header = json.loads(blob[:nl].decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise DecompositionFailure(f"unreadable artifact header: {exc}") from exc
    if header.get("format") != magic:
        raise DecompositionFailure(
            f"expected {magic} artifact, got {header.get('format')!r}")
    if header.get("version") != FORMAT_VERSION:
        raise DecompositionFailure(
            f"unsupported {magic} version {header.get('version')!r}")
    return header, blob[nl + 1:]


def _pack_arrays(header: dict, arrays: dict) -> bytes:
    header = dict(header)
    header["arrays"] = [
        {"name": name, "dtype": str(arr.dtype), "shape": list(arr.shape)}
        for name, arr in arrays.items()
    ]
    chunks = [_header_bytes(header)]
    for arr in arrays.values():
        chunks.append(np.ascontiguousarray(arr).tobytes())
    return b"".join(chunks)


def _unpack_arrays(header: dict, payload: bytes) -> dict:
    arrays = {}
    offset = 0
    for entry in header["arrays"]:
        dtype = np.dtype(entry["dtype"])
        shape = tuple(entry["shape"])
        nbytes = dtype.itemsize * int(np.prod(shape, dtype=np.int64))
        chunk = payload[offset:offset + nbytes]
        if len(chunk) != nbytes:
            raise DecompositionFailure(
                f"artifact truncated in array {entry['name']!r}")
        arrays[entry["name"]] = np.frombuffer(chunk, dtype=dtype).reshape(shape).copy()
        offset += nbytes
    if offset != len(payload):
        raise DecompositionFailure("artifact has trailing bytes")
    return arrays


# ---------------------------------------------------------------------------
# representation artifacts

def save_representation(path, g: GeneratorSet, config: dict | None = None):
    """Persist a generator triple: header with build parameters, then the
    row-major bytes of H, D, C."""
    header = {
        "format": REP_MAGIC,
        "version": FORMAT_VERSION,
        "k": g.spec.k,
        "beta": g.spec.beta,
        "M": g.spec.M,
        "variant": g.variant,
        "build_asymmetry": {k2: v for k2, v in g.build_asymmetry.items()},
        "config": config or {},
    }
    blob = _pack_arrays(header, {"H": g.H, "D": g.D, "C": g.C})
    with open(path, "wb") as f:
        f.write(blob)


def load_representation(path) -> GeneratorSet:
    with open(path, "rb") as f:
        blob = f.read()
    header, payload = _read_header(blob, REP_MAGIC)
    arrays = _unpack_arrays(header, payload)
    spec = BasisSpec(k=header["k"], beta=header["beta"], M=header["M"])
    return GeneratorSet(H=arrays["H"], D=arrays["D"], C=arrays["C"],
                        spec=spec, variant=header["variant"],
                        build_asymmetry=dict(header["build_asymmetry"]))


# ---------------------------------------------------------------------------
# state artifacts

def save_state(path, sv: StateVector, config: dict | None = None):
    """Persist a localized state: representation tag, basis parameters,
    provenance, then the coefficient or sample array."""
    if sv.representation == "z-spectral":
        basis = {"kind": "basis", "k": sv.basis.k, "beta": sv.basis.beta,
                 "M": sv.basis.M}
    elif sv.representation == "e-grid":
        basis = {"kind": "grid", "N": sv.basis.N, "E_max": sv.basis.E_max}
    else:
        raise ConfigError(f"unknown representation {sv.representation!r}")
    header = {
        "format": STATE_MAGIC,
        "version": FORMAT_VERSION,
        "representation": sv.representation,
        "family": sv.family,
        "norm_sq": sv.norm_sq,
        "projection_residual": sv.projection_residual,
        "basis": basis,
        "provenance": sv.provenance,
        "config": config or {},
    }
    blob = _pack_arrays(header, {"data": np.asarray(sv.data, dtype=complex)})
    with open(path, "wb") as f:
        f.write(blob)


def load_state(path) -> StateVector:
    with open(path, "rb") as f:
        blob = f.read()
    header, payload = _read_header(blob, STATE_MAGIC)
    arrays = _unpack_arrays(header, payload)
    b = header["basis"]
    if b["kind"] == "basis":
        basis = BasisSpec(k=b["k"], beta=b["beta"], M=b["M"])
    else:
        basis = GridSpec(N=b["N"], E_max=b["E_max"])
    return StateVector(representation=header["representation"],
                       data=arrays["data"], basis=basis,
                       norm_sq=header["norm_sq"],
                       projection_residual=header["projection_residual"],
                       family=header["family"],
                       provenance=dict(header["provenance"]))


def state_profile_rows(sv: StateVector, n_points: int = 512):
    """(E, Re psi_plus_tilde, Im psi_plus_tilde) rows for plotting.

    Grid states report their own nodes; spectral states are reconstructed
    from the basis on a uniform mesh up to the basis resolution cap.
    """
    from .laguerre import basis_matrix

    if sv.representation == "e-grid":
        E = sv.basis.nodes
        vals = sv.data
    else:
        spec = sv.basis
        if sv.family == "Ztilde":
            cap = np.sqrt((2.0 * spec.M + 4.0) / (2.0 * spec.beta))
        else:
            cap = (2.0 * spec.M + 4.0) / (2.0 * spec.beta)
        E = np.linspace(cap / n_points, cap, n_points)
        vals = sv.data @ basis_matrix(spec, E, which=sv.family)
    return [(float(e), float(v.real), float(v.imag))
            for e, v in zip(E, vals)]


def write_state_csv(path, sv: StateVector, n_points: int = 512):
    with open(path, "w", newline="") as f:
        w = csv.writer(f)
        w.writerow(["E", "re_psi_plus", "im_psi_plus"])
        w.writerows(state_profile_rows(sv, n_points))


# ---------------------------------------------------------------------------
# report exports

def report_rows(suite) -> list:
    """Flatten a SuiteResult into one row per check."""
    rows = []
    for r in suite.reports:
        rows.append({
            "name": r.name,
            "passed": {True: "pass", False: "fail", None: "inconclusive"}[r.passed],
            "residual": "" if r.residual is None else f"{r.residual:.6e}",
            "tolerance": "" if r.tolerance is None else f"{r.tolerance:.3e}",
            "backend": r.backend,
            "error": r.error or "",
        })
    return rows


def write_report_csv(path, suite):
    rows = report_rows(suite)
    with open(path, "w", newline="") as f:
        w = csv.DictWriter(f, fieldnames=list(rows[0].keys()) if rows else
                           ["name", "passed", "residual", "tolerance",
                            "backend", "error"])
        w.writeheader()
        w.writerows(rows)


def write_report_json(path, suite):
    doc = suite.to_dict()
    doc["format"] = "MODLOC-REPORT"
    doc["version"] = FORMAT_VERSION
    with open(path, "w") as f:
        json.dump(doc, f, indent=2, sort_keys=True)
        f.write("\n")


def report_markdown(suite) -> str:
    """Human-readable summary table."""
    out = io.StringIO()
    out.write("| check | result | residual | tolerance |\n")
    out.write("|---|---|---|---|\n")
    for row in report_rows(suite):
        out.write(f"| {row['name']} | {row['passed']} | {row['residual']} "
                  f"| {row['tolerance']} |\n")
    out.write(f"\naggregate: {'pass' if suite.aggregate_pass else 'fail'} "
              f"({suite.elapsed:.1f} s)\n")
    return out.getvalue()


def write_curves_csv(path, report):
    """Export the curve data a check carries (F(alpha) profiles, r(M)
    ladders) as long-form CSV."""
    rows = []
    vals = report.values or {}
    for i, curve in enumerate(vals.get("curves", [])):
        for al, F in zip(curve["alphas"], curve["F"]):
            rows.append({"check": report.name, "series": i, "x": al, "y": F})
    if "r" in vals:
        ladder = report.params.get("ladder", range(len(vals["r"])))
        for m, r in zip(ladder, vals["r"]):
            rows.append({"check": report.name, "series": 0, "x": m, "y": r})
    if "errors" in vals:
        for n, e in zip(report.params.get("Ns", range(len(vals["errors"]))),
                        vals["errors"]):
            rows.append({"check": report.name, "series": 0, "x": n, "y": e})
    with open(path, "w", newline="") as f:
        w = csv.DictWriter(f, fieldnames=["check", "series", "x", "y"])
        w.writeheader()
        w.writerows(rows)


# ---------------------------------------------------------------------------
# run configuration

@dataclass
class RunConfig:
    """Everything a run needs, serializable and round-trippable.

    The schema is the flat JSON object produced by to_json: representation
    parameters (k, beta, M), grid parameters (grid_n, grid_emax,
    grid_emax_tilde), localization inputs (intervals, bump family, seed,
    n_bumps, fixture_M), suite controls (scope, tol_profile), and output
    controls (out, format).
    """

    k: float = 1.0
    beta: float = 1.0
    M: int = 256
    grid_n: int = 4096
    grid_emax: float = 40.0
    grid_emax_tilde: float = 10.0
    intervals: list = field(default_factory=lambda: [[1.0, 2.0], [0.5, 1.0],
                                                     [4.0, 8.0]])
    bump: str = "mollifier"
    n_bumps: int = 20
    fixture_M: int = 384
    weyl_M: int = 512
    scope: list | None = None
    tol_profile: str = "default"
    seed: int = 0
    out: str | None = None
    format: str = "json"

    def __post_init__(self):
        if self.k < 0.5:
            raise ConfigError(f"k must be >= 1/2, got {self.k}")
        if self.beta <= 0:
            raise ConfigError("beta must be positive")
        if self.M < 1 or self.grid_n < 16:
            raise ConfigError("truncation sizes out of range")
        if self.format not in ("json", "csv", "md"):
            raise ConfigError(f"unknown output format {self.format!r}")
        for iv in self.intervals:
            a, b = iv
            if not (0 < a < b):
                raise ConfigError(
                    f"interval must satisfy 0 < a < b, got [{a}, {b}]")

    def to_json(self) -> str:
        return json.dumps(asdict(self), sort_keys=True, indent=2) + "\n"

    @classmethod
    def from_json(cls, text: str) -> "RunConfig":
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config is not valid JSON: {exc}") from exc
        known = {f for f in cls.__dataclass_fields__}
        unknown = set(data) - known
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        return cls(**data)

    @classmethod
    def from_file(cls, path) -> "RunConfig":
        with open(path) as f:
            return cls.from_json(f.read())

    def content_config(self) -> dict:
        """The config fields that determine artifact content: everything
        except where and how the output is written."""
        data = asdict(self)
        data.pop("out")
        data.pop("format")
        return data

    def suite_config(self) -> dict:
        return {
            "k": self.k, "beta": self.beta, "M": self.M,
            "grid_n": self.grid_n, "grid_emax": self.grid_emax,
            "grid_emax_tilde": self.grid_emax_tilde,
            "weyl_M": self.weyl_M, "fixture_M": self.fixture_M,
            "n_bumps": self.n_bumps, "seed": self.seed,
            "intervals": [list(iv) for iv in self.intervals],
        }
