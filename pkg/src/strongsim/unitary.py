"""Interferometer matrices: Haar sampling, validation and the JSON file format."""
from __future__ import annotations

import json
from pathlib import Path

import numpy as np

UNITARITY_TOL = 1e-8


class NotUnitaryError(ValueError):
    """The matrix deviates from unitarity by more than the tolerance."""


def haar_random_unitary(m: int, seed: int | None = None) -> np.ndarray:
    """Haar-distributed ``m x m`` unitary from the QR decomposition of a Ginibre matrix."""
    if m < 1:
        raise ValueError(f"need m >= 1, got {m}")
    rng = np.random.default_rng(seed)
    z = (rng.standard_normal((m, m)) + 1j * rng.standard_normal((m, m))) / np.sqrt(2.0)
    q, r = np.linalg.qr(z)
    d = np.diagonal(r)
    return q * (d / np.abs(d))


def unitarity_error(U: np.ndarray) -> float:
    U = np.asarray(U)
    return float(np.max(np.abs(U @ U.conj().T - np.eye(U.shape[0]))))


def as_unitary(U, check: bool = True, tol: float = UNITARITY_TOL) -> np.ndarray:
    """Validate shape (and unitarity unless ``check`` is False)."""
    a = np.ascontiguousarray(U, dtype=np.complex128)
    if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape[0] < 1:
        raise ValueError(f"interferometer matrix must be square, got shape {a.shape}")
    if check:
        err = unitarity_error(a)
        if err > tol:
            raise NotUnitaryError(f"||U U^dagger - I||_max = {err:.3g} exceeds {tol:g}")
    return a


def beamsplitter() -> np.ndarray:
    """Balanced 2-mode beamsplitter."""
    return np.array([[1, 1], [1, -1]], dtype=np.complex128) / np.sqrt(2.0)


def unitary_to_json(U: np.ndarray) -> str:
    U = np.asarray(U, dtype=np.complex128)
    return json.dumps(
        {
            "m": U.shape[0],
            "matrix": [[[float(z.real), float(z.imag)] for z in row] for row in U],
        }
    )


def unitary_from_json(text: str) -> np.ndarray:
    try:
        doc = json.loads(text)
        m = int(doc["m"])
        U = np.array(
            [[complex(float(re), float(im)) for re, im in row] for row in doc["matrix"]],
            dtype=np.complex128,
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise ValueError(f"malformed unitary file: {exc}") from exc
    if U.shape != (m, m):
        raise ValueError(f"unitary file declares m={m} but holds shape {U.shape}")
    return U


def load_unitary(path: str | Path) -> np.ndarray:
    return unitary_from_json(Path(path).read_text())


def save_unitary(path: str | Path, U: np.ndarray) -> None:
    Path(path).write_text(unitary_to_json(U))
