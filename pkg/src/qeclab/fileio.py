"""On-disk formats: function tables, codewords, and error specifications.

Function tables are JSON with the sign bits base64-packed in little-endian
bit order by input index (bit set = value +1/2).  Codewords carry their
geometry and coefficients as [re, im] pairs in selector order.  Error
specs are small tagged objects consumed by the CLI.
"""
from __future__ import annotations

import base64
import json
from pathlib import Path

import numpy as np

from .boolfn import BooleanFunctionTable
from .codespace import CodewordCoeffs, make_params
from .noise import (
    AllSet,
    BlockSet,
    ControlledBitFlip,
    ControlledPhase,
    EmptySet,
    ExplicitSet,
    SeededSet,
    SetSpec,
    SingletonSet,
)


def function_table_to_dict(f: BooleanFunctionTable) -> dict:
    packed = np.packbits(f.signs, bitorder="little")
    return {"width": f.width, "signs": base64.b64encode(packed.tobytes()).decode()}


def function_table_from_dict(data: dict) -> BooleanFunctionTable:
    width = int(data["width"])
    raw = np.frombuffer(base64.b64decode(data["signs"]), dtype=np.uint8)
    signs = np.unpackbits(raw, bitorder="little", count=1 << width).astype(bool)
    return BooleanFunctionTable(width, signs)


def save_function_table(f: BooleanFunctionTable, path) -> None:
    Path(path).write_text(json.dumps(function_table_to_dict(f), sort_keys=True))


def load_function_table(path) -> BooleanFunctionTable:
    return function_table_from_dict(json.loads(Path(path).read_text()))


def codeword_to_dict(coeffs: CodewordCoeffs) -> dict:
    return {
        "n": coeffs.params.n,
        "B": coeffs.params.B,
        "alpha": [[a.real, a.imag] for a in coeffs.alpha],
    }


def codeword_from_dict(data: dict) -> CodewordCoeffs:
    params = make_params(int(data["n"]), int(data["B"]))
    alpha = np.array([complex(re, im) for re, im in data["alpha"]])
    return CodewordCoeffs(params, alpha)


def save_codeword(coeffs: CodewordCoeffs, path) -> None:
    Path(path).write_text(json.dumps(codeword_to_dict(coeffs), sort_keys=True))


def load_codeword(path) -> CodewordCoeffs:
    return codeword_from_dict(json.loads(Path(path).read_text()))


def set_spec_to_dict(spec: SetSpec) -> dict:
    if isinstance(spec, AllSet):
        return {"kind": "all"}
    if isinstance(spec, EmptySet):
        return {"kind": "empty"}
    if isinstance(spec, SingletonSet):
        return {"kind": "singleton", "value": spec.value}
    if isinstance(spec, ExplicitSet):
        packed = np.packbits(spec.members, bitorder="little")
        return {
            "kind": "explicit",
            "size": int(spec.members.shape[0]),
            "members": base64.b64encode(packed.tobytes()).decode(),
        }
    if isinstance(spec, SeededSet):
        return {"kind": "seeded", "density": spec.density, "seed": spec.seed}
    if isinstance(spec, BlockSet):
        packed = np.packbits(spec.members, bitorder="little")
        return {
            "kind": "block",
            "offset": spec.offset,
            "width": spec.width,
            "members": base64.b64encode(packed.tobytes()).decode(),
        }
    raise TypeError(f"unknown set spec {spec!r}")


def set_spec_from_dict(data: dict) -> SetSpec:
    kind = data["kind"]
    if kind == "all":
        return AllSet()
    if kind == "empty":
        return EmptySet()
    if kind == "singleton":
        return SingletonSet(int(data["value"]))
    if kind == "explicit":
        raw = np.frombuffer(base64.b64decode(data["members"]), dtype=np.uint8)
        members = np.unpackbits(raw, bitorder="little", count=int(data["size"]))
        return ExplicitSet(members.astype(bool))
    if kind == "seeded":
        return SeededSet(density=float(data["density"]), seed=int(data["seed"]))
    if kind == "block":
        width = int(data["width"])
        raw = np.frombuffer(base64.b64decode(data["members"]), dtype=np.uint8)
        members = np.unpackbits(raw, bitorder="little", count=1 << width)
        return BlockSet(offset=int(data["offset"]), width=width, members=members.astype(bool))
    raise ValueError(f"unknown set kind {kind!r}")


def error_to_dict(error) -> dict:
    if isinstance(error, ControlledBitFlip):
        return {
            "type": "bitflip",
            "i": error.target,
            "controls": set_spec_to_dict(error.controls),
        }
    if isinstance(error, ControlledPhase):
        return {
            "type": "phase",
            "theta": error.theta,
            "set": set_spec_to_dict(error.members),
        }
    raise TypeError(f"unserializable error operator {error!r}")


def error_from_dict(data: dict):
    if data["type"] == "bitflip":
        return ControlledBitFlip(
            target=int(data["i"]), controls=set_spec_from_dict(data["controls"])
        )
    if data["type"] == "phase":
        return ControlledPhase(
            members=set_spec_from_dict(data["set"]), theta=float(data["theta"])
        )
    raise ValueError(f"unknown error type {data['type']!r}")
