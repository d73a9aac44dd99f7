"""JSON documents for CBBAs and FCBBAs.

A CBBA document looks like::

    {"frame": ["e1", "e2"],
     "masses": [{"set": ["e1"], "re": 0.1, "im": -0.1}, ...]}

Product frames carry an extra ``"factors"`` entry holding the two component
label lists.  Floats are written with full precision so documents round-trip
bit for bit; any ``"meta"`` entry is ignored on input.
"""

from __future__ import annotations

import json
from pathlib import Path
from typing import Any

from .cbba import CBBA
from .errors import InvalidDocument
from .frame import Frame, product_frame
from .transforms import FCBBA


def frame_to_doc(frame: Frame) -> dict[str, Any]:
    doc: dict[str, Any] = {"frame": list(frame.labels)}
    if frame.factors is not None:
        doc["factors"] = [list(f.labels) for f in frame.factors]
    return doc


def frame_from_doc(doc: dict[str, Any]) -> Frame:
    labels = doc.get("frame")
    if not isinstance(labels, list) or not all(isinstance(x, str) for x in labels):
        raise InvalidDocument('"frame" must be a list of label strings')
    factors = doc.get("factors")
    if factors is None:
        return Frame(tuple(labels))
    if not (isinstance(factors, list) and len(factors) == 2):
        raise InvalidDocument('"factors" must hold exactly two label lists')
    frame = product_frame(Frame(tuple(factors[0])), Frame(tuple(factors[1])))
    if list(frame.labels) != labels:
        raise InvalidDocument('"frame" labels do not match the product of "factors"')
    return frame


def _masses_doc(frame: Frame, masses) -> list[dict[str, Any]]:
    return [
        {"set": frame.labels_of(bits), "re": z.real, "im": z.imag}
        for bits, z in sorted(masses.items())
    ]


def cbba_to_doc(c: CBBA, meta: dict[str, Any] | None = None) -> dict[str, Any]:
    doc = frame_to_doc(c.frame)
    doc["masses"] = _masses_doc(c.frame, c.masses)
    if meta:
        doc["meta"] = meta
    return doc


def fcbba_to_doc(f: FCBBA, meta: dict[str, Any] | None = None) -> dict[str, Any]:
    doc = frame_to_doc(f.frame)
    doc["masses"] = _masses_doc(f.frame, f.masses)
    if meta:
        doc["meta"] = meta
    return doc


def cbba_from_doc(doc: dict[str, Any], *, check: str = "full", tol: float | None = None) -> CBBA:
    """Parse a CBBA document.

    Unknown labels, duplicate sets and invariant violations are rejected;
    pass ``check="none"`` to load an invalid document for diagnosis.
    """
    if not isinstance(doc, dict):
        raise InvalidDocument("a CBBA document must be a JSON object")
    frame = frame_from_doc(doc)
    entries = doc.get("masses")
    if not isinstance(entries, list):
        raise InvalidDocument('"masses" must be a list')
    masses: dict[int, complex] = {}
    for entry in entries:
        if not isinstance(entry, dict) or "set" not in entry:
            raise InvalidDocument('each mass entry needs a "set"')
        labels = entry["set"]
        if not isinstance(labels, list):
            raise InvalidDocument('"set" must be a list of labels')
        if len(set(labels)) != len(labels):
            raise InvalidDocument(f"repeated label inside set {labels}")
        bits = frame.mask(labels)
        if bits in masses:
            raise InvalidDocument(f"duplicate set {sorted(labels)}")
        try:
            masses[bits] = complex(float(entry.get("re", 0.0)), float(entry.get("im", 0.0)))
        except (TypeError, ValueError):
            raise InvalidDocument(f"non-numeric mass for set {labels}") from None
    return CBBA(frame, masses, check=check, tol=tol)


def dumps(doc: dict[str, Any]) -> str:
    return json.dumps(doc, indent=2)


def read_cbba(path: str | Path, **kw) -> CBBA:
    try:
        doc = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise InvalidDocument(f"{path}: not valid JSON ({exc.msg})") from None
    return cbba_from_doc(doc, **kw)


def write_cbba(c: CBBA, path: str | Path, meta: dict[str, Any] | None = None) -> None:
    Path(path).write_text(dumps(cbba_to_doc(c, meta)) + "\n")
