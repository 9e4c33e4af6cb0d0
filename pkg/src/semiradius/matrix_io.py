"""UTF-8 JSON matrix files with complex entries stored as [re, im] pairs, row-major."""
import json
from pathlib import Path
from typing import Dict, Optional

import numpy as np
from pydantic import ValidationError

from .errors import MatrixFileError
from .kernel import ComplexMatrix
from .types import MatrixFile


def encode_matrix(M) -> list:
    M = np.asarray(M, dtype=np.complex128)
    return [[[float(z.real), float(z.imag)] for z in row] for row in M]


def decode_matrix(rows, n, name="matrix") -> ComplexMatrix:
    try:
        arr = np.asarray(rows, dtype=np.float64)
    except (TypeError, ValueError):
        raise MatrixFileError(f"{name}: entries must be [re, im] number pairs") from None
    if arr.shape != (n, n, 2):
        raise MatrixFileError(f"{name}: expected {n}x{n} entries of [re, im], got array of shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise MatrixFileError(f"{name}: non-finite entry")
    return arr[..., 0] + 1j * arr[..., 1]


def parse_matrix_file(text: str) -> Dict[str, ComplexMatrix]:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as e:
        raise MatrixFileError(f"invalid JSON: {e}") from None
    if not isinstance(data, dict):
        raise MatrixFileError("matrix file must be a JSON object")
    try:
        mf = MatrixFile.model_validate(data)
    except ValidationError as e:
        raise MatrixFileError(f"invalid matrix file: {e.errors()[0]['msg']}") from None
    return {name: decode_matrix(mf.model_extra[name], mf.n, name) for name in mf.names()}


def read_matrix_file(path) -> Dict[str, ComplexMatrix]:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as e:
        raise MatrixFileError(f"cannot read {path}: {e.strerror}") from None
    return parse_matrix_file(text)


def dump_matrices(n: Optional[int] = None, **matrices) -> dict:
    if n is None:
        n = next(iter(matrices.values())).shape[0]
    out = {"n": int(n)}
    out.update({name: encode_matrix(M) for name, M in matrices.items()})
    return out


def write_matrix_file(path, n: Optional[int] = None, **matrices):
    Path(path).write_text(json.dumps(dump_matrices(n, **matrices), indent=2), encoding="utf-8")


def require(mats: Dict[str, ComplexMatrix], *names):
    missing = [k for k in names if k not in mats]
    if missing:
        raise MatrixFileError(f"matrix file lacks {', '.join(missing)}")
    return [mats[k] for k in names]
