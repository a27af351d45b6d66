"""Content-addressed on-disk cache for expensive, deterministic results.

Entries are JSON text with a SHA-256 checksum header.  A checksum mismatch
(or any unreadable entry) is treated as a miss and the value recomputed.
"""

import hashlib
import json
import os


def content_key(*parts):
    payload = json.dumps(parts, sort_keys=True, separators=(",", ":"), default=str)
    return hashlib.sha256(payload.encode()).hexdigest()


class Cache:
    def __init__(self, directory):
        self.directory = directory
        self.hits = 0
        self.misses = 0
        if directory:
            os.makedirs(directory, exist_ok=True)

    def _path(self, key):
        return os.path.join(self.directory, key + ".json")

    def get(self, key):
        if not self.directory:
            return None
        try:
            with open(self._path(key)) as fh:
                head, body = fh.read().split("\n", 1)
        except (OSError, ValueError):
            return None
        if hashlib.sha256(body.encode()).hexdigest() != head:
            return None
        return body

    def put(self, key, text):
        if not self.directory:
            return
        tmp = self._path(key) + ".tmp"
        with open(tmp, "w") as fh:
            fh.write(hashlib.sha256(text.encode()).hexdigest() + "\n" + text)
        os.replace(tmp, self._path(key))

    def fetch(self, key, producer, dump, load):
        """Value for key: cached text through ``load`` or a fresh ``producer()``."""
        text = self.get(key)
        if text is not None:
            self.hits += 1
            return load(text)
        self.misses += 1
        value = producer()
        self.put(key, dump(value))
        return value
