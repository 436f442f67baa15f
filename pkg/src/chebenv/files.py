"""JSON file formats for families and results, and atomic file output.

Family file::

    {"bidegree": [n1, n2],
     "x": [[...], ...], "y": [[...], ...], "w": [[...], ...],
     "domain": [[s_lo, s_hi], [t_lo, t_hi]]}

Coefficient matrices are in the tensor power basis, row ``i`` holding the
coefficients of ``s**i``.  Floats are written with ``repr`` so they read back
bit-exactly.
"""

from __future__ import annotations

import datetime as _dt
import hashlib
import json
import math
import os
import tempfile
from pathlib import Path

import numpy as np

from .bipoly import BiPoly
from .envelope import RationalFamily
from .errors import EnvelopeError
from .implicitize import ImplicitApproximation, ImplicitBasisSpec

RESULT_FORMAT = "chebenv-result/1"


class FileFormatError(EnvelopeError, ValueError):
    """Malformed family or result document."""


def atomic_write(path, text: str) -> None:
    """Write ``text`` to a temporary file next to ``path``, then rename it into place."""
    path = Path(path)
    directory = path.parent if str(path.parent) else Path(".")
    fd, tmp = tempfile.mkstemp(prefix=f".{path.name}.", dir=directory)
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        try:
            os.unlink(tmp)
        except FileNotFoundError:
            pass
        raise


def dumps(doc: dict) -> str:
    """JSON with one top-level key per line and compact values."""
    items = [f" {json.dumps(k)}: {json.dumps(v, separators=(', ', ': '))}" for k, v in doc.items()]
    return "{\n" + ",\n".join(items) + "\n}\n"


def _matrix(doc, key, shape):
    if key not in doc:
        raise FileFormatError(f"missing key {key!r}")
    try:
        m = np.array(doc[key], dtype=float)
    except (TypeError, ValueError) as exc:
        raise FileFormatError(f"{key!r} is not a numeric matrix") from exc
    if m.shape != shape:
        raise FileFormatError(f"{key!r} has shape {m.shape}, expected {shape} from bidegree")
    if not np.all(np.isfinite(m)):
        raise FileFormatError(f"{key!r} contains non-finite values")
    return m


def family_from_dict(doc) -> RationalFamily:
    if not isinstance(doc, dict):
        raise FileFormatError("family document must be a JSON object")
    try:
        n1, n2 = (int(v) for v in doc["bidegree"])
    except KeyError:
        raise FileFormatError("missing key 'bidegree'") from None
    except (TypeError, ValueError):
        raise FileFormatError("'bidegree' must be a pair of integers") from None
    if n1 < 0 or n2 < 0:
        raise FileFormatError("'bidegree' entries must be nonnegative")
    shape = (n1 + 1, n2 + 1)
    x, y, w = (_matrix(doc, k, shape) for k in ("x", "y", "w"))
    if "domain" not in doc:
        raise FileFormatError("missing key 'domain'")
    try:
        dom = np.array(doc["domain"], dtype=float)
    except (TypeError, ValueError):
        raise FileFormatError("'domain' must be [[s_lo, s_hi], [t_lo, t_hi]]") from None
    if dom.shape != (2, 2) or not np.all(np.isfinite(dom)):
        raise FileFormatError("'domain' must be [[s_lo, s_hi], [t_lo, t_hi]]")
    if not (dom[0, 1] > dom[0, 0] and dom[1, 1] > dom[1, 0]):
        raise FileFormatError("domain intervals must be ordered with positive length")
    domain = ((dom[0, 0], dom[0, 1]), (dom[1, 0], dom[1, 1]))
    return RationalFamily(BiPoly(x), BiPoly(y), BiPoly(w), domain)


def family_to_dict(f: RationalFamily) -> dict:
    n1 = max(p.deg_s for p in (f.x, f.y, f.w))
    n2 = max(p.deg_t for p in (f.x, f.y, f.w))
    return {
        "bidegree": [n1, n2],
        "x": f.x.padded(n1, n2).tolist(),
        "y": f.y.padded(n1, n2).tolist(),
        "w": f.w.padded(n1, n2).tolist(),
        "domain": [list(f.interval_s), list(f.interval_t)],
    }


def read_family(path) -> tuple[RationalFamily, str]:
    """Load a family file; returns the family and the SHA-256 of the file bytes."""
    try:
        raw = Path(path).read_bytes()
    except OSError as exc:
        raise FileFormatError(f"cannot read {path}: {exc}") from exc
    try:
        doc = json.loads(raw.decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise FileFormatError(f"{path}: not valid JSON ({exc})") from exc
    return family_from_dict(doc), hashlib.sha256(raw).hexdigest()


def write_family(path, f: RationalFamily) -> None:
    atomic_write(path, dumps(family_to_dict(f)))


def _float_out(v: float):
    return v if math.isfinite(v) else ("inf" if v > 0 else "-inf" if v < 0 else "nan")


def result_to_dict(a: ImplicitApproximation, f: RationalFamily, input_sha256: str,
                   version: str, timestamp: str | None = None) -> dict:
    if timestamp is None:
        timestamp = _dt.datetime.now(_dt.timezone.utc).isoformat(timespec="seconds")
    return {
        "format": RESULT_FORMAT,
        "degree": a.d,
        "triangle": a.spec.triangle.tolist(),
        "c_q": a.c_q.tolist(),
        "lambda_bidegree": list(a.spec.lambda_bidegree),
        "lambda_domain": [list(iv) for iv in a.spec.lambda_domain],
        "c_lambda": a.c_lambda.tolist(),
        "sigma_min": _float_out(a.sigma_min),
        "sigma_gap": _float_out(a.sigma_gap),
        "working_bidegree": list(a.spec.working_bidegree),
        "matrix_rows": a.matrix_shape[0],
        "matrix_cols": a.matrix_shape[1],
        "row_weighting": a.row_weighting,
        "input_sha256": input_sha256,
        "family_fingerprint": a.fingerprint,
        "family": family_to_dict(f),
        "version": version,
        "timestamp": timestamp,
    }


def result_from_dict(doc) -> tuple[ImplicitApproximation, RationalFamily]:
    try:
        f = family_from_dict(doc["family"])
        spec = ImplicitBasisSpec(
            d=int(doc["degree"]),
            triangle=np.array(doc["triangle"], dtype=float),
            lambda_bidegree=tuple(int(v) for v in doc["lambda_bidegree"]),
            lambda_domain=tuple(tuple(float(v) for v in iv) for iv in doc["lambda_domain"]),
            working_bidegree=tuple(int(v) for v in doc["working_bidegree"]),
        )
        c_q = np.array(doc["c_q"], dtype=float)
        c_lam = np.array(doc["c_lambda"], dtype=float)
        a = ImplicitApproximation(
            c_q=c_q, c_lambda=c_lam,
            sigma_min=float(doc["sigma_min"]), sigma_gap=float(doc["sigma_gap"]),
            spec=spec, fingerprint=str(doc.get("family_fingerprint", "")),
            domain=spec.lambda_domain,
            matrix_shape=(int(doc["matrix_rows"]), int(doc["matrix_cols"])),
            row_weighting=bool(doc.get("row_weighting", True)),
        )
    except FileFormatError:
        raise
    except (KeyError, TypeError, ValueError) as exc:
        raise FileFormatError(f"malformed result document: {exc!r}") from exc
    if c_q.shape != (spec.M,) or c_lam.shape != (spec.n_lambda,):
        raise FileFormatError("coefficient counts disagree with degree / lambda bidegree")
    return a, f


def write_result(path, a: ImplicitApproximation, f: RationalFamily, input_sha256: str,
                 version: str, timestamp: str | None = None) -> None:
    doc = result_to_dict(a, f, input_sha256, version, timestamp)
    atomic_write(path, dumps(doc))


def read_result(path) -> tuple[ImplicitApproximation, RationalFamily]:
    try:
        doc = json.loads(Path(path).read_text(encoding="utf-8"))
    except (OSError, UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise FileFormatError(f"cannot read result file {path}: {exc}") from exc
    if not isinstance(doc, dict):
        raise FileFormatError("result document must be a JSON object")
    return result_from_dict(doc)
