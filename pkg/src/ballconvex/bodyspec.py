"""Body specifications as JSON documents."""
from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .ballpoly import BallPolyhedron
from .errors import InvalidInputError
from .geometry import Ellipsoid, make_ball, make_ellipsoid


def _vector(doc, key, required=True):
    if key not in doc:
        if required:
            raise InvalidInputError(f"body spec is missing {key!r}")
        return None
    try:
        v = np.asarray(doc[key], dtype=float)
    except (TypeError, ValueError) as exc:
        raise InvalidInputError(f"{key!r} must be numeric") from exc
    return v


def _positive(doc, key):
    try:
        r = float(doc[key])
    except KeyError as exc:
        raise InvalidInputError(f"body spec is missing {key!r}") from exc
    except (TypeError, ValueError) as exc:
        raise InvalidInputError(f"{key!r} must be a number") from exc
    if not r > 0:
        raise InvalidInputError(f"{key!r} must be positive")
    return r


def body_from_dict(doc: dict):
    """Build a body from ``{"type": "ball" | "ellipsoid" | "ball-polyhedron", ...}``."""
    if not isinstance(doc, dict) or "type" not in doc:
        raise InvalidInputError("body spec must be an object with a 'type' field")
    kind = doc["type"]
    if kind == "ball":
        return make_ball(_vector(doc, "center"), _positive(doc, "radius"))
    if kind == "ellipsoid":
        return make_ellipsoid(_vector(doc, "semiaxes"), _vector(doc, "center", required=False))
    if kind == "ball-polyhedron":
        centers = _vector(doc, "centers")
        if centers.ndim != 2:
            raise InvalidInputError("'centers' must be a list of points")
        return BallPolyhedron(_positive(doc, "radius"), centers)
    raise InvalidInputError(f"unknown body type {kind!r}")


def body_to_dict(body) -> dict:
    if isinstance(body, BallPolyhedron):
        return {"type": "ball-polyhedron", "radius": body.radius, "centers": body.centers.tolist()}
    if isinstance(body, Ellipsoid):
        if body.is_ball:
            return {"type": "ball", "center": body.center.tolist(), "radius": float(body.semiaxes[0])}
        return {"type": "ellipsoid", "semiaxes": body.semiaxes.tolist(), "center": body.center.tolist()}
    raise InvalidInputError(f"cannot serialise {type(body).__name__}")


def load_body(source):
    """Load a body from a JSON file path or an inline JSON string."""
    text = str(source)
    if not text.lstrip().startswith("{"):
        try:
            text = Path(source).read_text()
        except OSError as exc:
            raise InvalidInputError(f"cannot read body spec {source}: {exc.strerror}") from exc
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InvalidInputError(f"body spec is not valid JSON: {exc}") from exc
    return body_from_dict(doc)
