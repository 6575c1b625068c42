"""On-disk artifacts keyed by a hash of the config that produced them.

Every file carries the package version; a file written by another version is
treated as stale and ignored rather than trusted.
"""

from __future__ import annotations

import hashlib
import json
import os
from pathlib import Path

from .classgroup import ClassGroup, enumerate_class_group

ENV_VAR = "LINNIKSIEVE_CACHE"


def cache_dir(override: str | os.PathLike | None = None) -> Path:
    base = override or os.environ.get(ENV_VAR) or Path.home() / ".cache" / "linniksieve"
    return Path(base)


def content_key(config: dict) -> str:
    from . import __version__

    doc = json.dumps({**config, "version": __version__}, sort_keys=True)
    return hashlib.sha256(doc.encode()).hexdigest()[:16]


def class_group_path(D: int, directory=None) -> Path:
    return cache_dir(directory) / "classgroups" / f"D{D}-{content_key({'kind': 'classgroup', 'D': D})}.json"


def cached_class_group(D: int, directory=None) -> ClassGroup:
    """Class group of discriminant -D, stored as {D, h, forms, structure, generators}.

    Loading re-enumerates the forms and refuses a file that disagrees, so a
    corrupted cache cannot leak into results.
    """
    from . import __version__

    path = class_group_path(D, directory)
    if path.exists():
        doc = json.loads(path.read_text())
        if doc.get("version") == __version__:
            return ClassGroup.from_json(json.dumps(doc["group"]))
    G = enumerate_class_group(D)
    path.parent.mkdir(parents=True, exist_ok=True)
    tmp = path.with_suffix(".tmp")
    tmp.write_text(json.dumps({"version": __version__, "group": json.loads(G.to_json())}, sort_keys=True) + "\n")
    tmp.replace(path)
    return G
