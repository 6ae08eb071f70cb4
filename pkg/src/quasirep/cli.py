"""Command-line front end: KD tables, representation audits, coherence reports.

Exit codes: 0 when every gating check passes, 1 when a property check fails,
2 on construction or parse errors.  All randomness is seeded, and identical
configurations produce byte-identical outputs.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from .complexify import monoidal_coherence
from .errors import QuasirepError
from .frames import DualPair, canonical_dual, frame_from_json
from .gpt import make_system, random_density
from .kirkwood_dirac import KdBases, kd_distribution, kd_frame_pair, preset_bases
from .linalg import cmat_from_json
from .structure import (
    DECOMPOSITION_ATOL,
    Representation,
    SystemSlot,
    audit_representation,
)

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_CONSTRUCTION = 2


def _fmt(x: float) -> str:
    """17 significant digits, '.' decimal: floats round-trip exactly."""
    return f"{x:.17g}"


def _load_json(path: str) -> dict:
    with open(path, "r", encoding="utf-8") as fh:
        return json.load(fh)


def _write_text(path: str | None, text: str) -> None:
    if path is None:
        sys.stdout.write(text)
    else:
        Path(path).write_text(text, encoding="utf-8")


def _merge_config(args: argparse.Namespace) -> dict:
    """Config file values with command-line overrides on top."""
    cfg = {}
    if getattr(args, "config", None):
        cfg.update(_load_json(args.config))
    for key, value in vars(args).items():
        if key in ("config", "func") or value is None:
            continue
        if key == "frame" and not value:
            continue  # absent store_true flag must not mask a config value
        cfg[key.replace("_", "-")] = value
    return cfg


def _build_bases(cfg: dict, dim: int) -> KdBases:
    if "bases-file" in cfg:
        data = _load_json(cfg["bases-file"])
        return KdBases(cmat_from_json(data["basis_a"]), cmat_from_json(data["basis_b"]))
    preset = cfg.get("bases", "fourier")
    return preset_bases(preset, dim)


def run_kd_table(cfg: dict) -> int:
    dim = int(cfg.get("dim", 2))
    kb = _build_bases(cfg, dim)
    dim = kb.dim

    if "state" in cfg:
        rho = cmat_from_json(_load_json(cfg["state"]))
    else:
        rng = np.random.default_rng(int(cfg.get("seed", 0)))
        rho = random_density(dim, rng)

    if cfg.get("frame"):
        # route through the frame pair: validates faithfulness
        pair = kd_frame_pair(kb)
        table = (pair.frame.vec_matrix.conj() @ rho.reshape(-1)).reshape(dim, dim)
    else:
        table = kd_distribution(kb, rho)

    lines = ["a_label,b_label,re,im"]
    for a in range(dim):
        for b in range(dim):
            entry = table[a, b]
            lines.append(f"{kb.a_labels[a]},{kb.b_labels[b]},{_fmt(entry.real)},{_fmt(entry.imag)}")
    total = complex(table.sum())
    lines.append(f"sum,,{_fmt(total.real)},{_fmt(total.imag)}")
    _write_text(cfg.get("out"), "\n".join(lines) + "\n")
    return EXIT_OK


def _parse_system_spec(spec: str):
    kind, _, dim = spec.partition(":")
    if kind not in ("quantum", "classical") or not dim.isdigit():
        raise ValueError(f"bad system spec {spec!r}; expected e.g. 'quantum:2'")
    return kind, int(dim)


def _audit_slot(entry: dict, sys) -> SystemSlot:
    """Slot for one audited system: a frame file or a bases preset."""
    if "frame-file" in entry:
        loaded = frame_from_json(_load_json(entry["frame-file"]))
        pair = loaded if isinstance(loaded, DualPair) else canonical_dual(loaded)
        if pair.dim != sys.dim:
            raise ValueError(f"frame dim {pair.dim} does not match system {sys.label!r}")
        return SystemSlot.from_pair(pair)
    if sys.is_quantum:
        kb = _build_bases(entry, sys.dim)
        return SystemSlot.from_pair(kd_frame_pair(kb))
    return SystemSlot.classical(sys.dim)


def run_audit(cfg: dict) -> int:
    seed = int(cfg.get("seed", 0))
    trials = int(cfg.get("trials", 20))
    if trials < 1:
        raise ValueError("trials must be >= 1")
    tol_value = float(cfg.get("tol", DECOMPOSITION_ATOL))

    entries = cfg.get("systems")
    if entries is None:
        spec = cfg.get("system", "quantum:2")
        entry = {k: v for k, v in cfg.items() if k in ("bases", "bases-file", "frame-file")}
        entry["system"] = spec
        entries = [entry]

    systems, slots = [], {}
    for entry in entries:
        kind, dim = _parse_system_spec(entry.get("system", "quantum:2"))
        sys_obj = make_system(kind, dim, seed=seed)
        systems.append(sys_obj)
        slots[sys_obj.label] = _audit_slot(entry, sys_obj)

    # lenient construction: broken pairs must surface in the report, not here
    rep = Representation(slots, validate=False)
    report = audit_representation(rep, systems, trials=trials, seed=seed)

    payload = report.to_json()
    payload["tol"] = tol_value
    _write_text(cfg.get("out"), json.dumps(payload, indent=2, sort_keys=True) + "\n")

    gate = (
        report.semifunctorial
        and report.empirically_adequate
        and report.linear
        and report.decomposition_residual <= tol_value
    )
    return EXIT_OK if gate else EXIT_CHECK_FAILED


def run_coherence(cfg: dict) -> int:
    dims = cfg.get("dims", "2,3,2")
    if isinstance(dims, str):
        dims = [int(x) for x in dims.split(",")]
    dims = (list(dims) + [2, 2, 2])[:3]
    report = monoidal_coherence(
        dims[0], dims[1], trials=int(cfg.get("trials", 50)),
        seed=int(cfg.get("seed", 0)), dim_z=dims[2],
    )
    _write_text(cfg.get("out"), json.dumps(report.to_json(), indent=2, sort_keys=True) + "\n")
    return EXIT_OK if report.all_pass else EXIT_CHECK_FAILED


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="quasirep",
        description="Quasiprobability tables, representation audits and coherence reports.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    kd = sub.add_parser("kd-table", help="write a Kirkwood-Dirac table as CSV")
    kd.add_argument("--config", help="JSON run configuration")
    kd.add_argument("--bases", choices=["computational", "hadamard", "fourier"])
    kd.add_argument("--bases-file", help="JSON file with basis_a/basis_b matrices")
    kd.add_argument("--state", help="JSON matrix file with the input state")
    kd.add_argument("--dim", type=int, help="dimension for generated states/presets")
    kd.add_argument("--seed", type=int, help="seed for random state generation")
    kd.add_argument("--frame", action="store_true",
                    help="route through the frame pair (requires faithful bases)")
    kd.add_argument("--out", help="output CSV path (default stdout)")
    kd.set_defaults(func=run_kd_table)

    audit = sub.add_parser("audit", help="audit a representation and emit a JSON report")
    audit.add_argument("--config", help="JSON run configuration")
    audit.add_argument("--system", help="system spec such as quantum:2")
    audit.add_argument("--bases", choices=["computational", "hadamard", "fourier"])
    audit.add_argument("--bases-file")
    audit.add_argument("--frame-file", help="JSON frame file (optional dual included)")
    audit.add_argument("--trials", type=int)
    audit.add_argument("--seed", type=int)
    audit.add_argument("--tol", type=float, help="decomposition residual gate")
    audit.add_argument("--out", help="output JSON path (default stdout)")
    audit.set_defaults(func=run_audit)

    coh = sub.add_parser("coherence", help="verify complexification coherence")
    coh.add_argument("--config", help="JSON run configuration")
    coh.add_argument("--dims", help="comma-separated dimensions, e.g. 2,3,2")
    coh.add_argument("--trials", type=int)
    coh.add_argument("--seed", type=int)
    coh.add_argument("--out", help="output JSON path (default stdout)")
    coh.set_defaults(func=run_coherence)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = _merge_config(args)
        return args.func(cfg)
    except (OSError, json.JSONDecodeError, ValueError, QuasirepError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONSTRUCTION


if __name__ == "__main__":
    sys.exit(main())
