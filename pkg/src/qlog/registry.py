"""Deterministic interning of atoms and id-collections into dense integer feature ids.

The registry is the single source of feature identity for the whole toolkit:
an atom string, or a list/bag/set of previously assigned ids, maps to exactly
one integer id, assigned sequentially in first-seen order.  Bags are
canonicalized by sorting, sets by sorting and deduplicating, so logically
equal collections always resolve to the same id.  The four kinds live in
disjoint namespaces: a one-element list never collides with a one-element bag.
"""

from __future__ import annotations

import threading
from typing import Iterable

ATOM = "ATOM"
LIST = "LIST"
BAG = "BAG"
SET = "SET"

KINDS = (ATOM, LIST, BAG, SET)

#: Placeholder atom standing in for any constant value in a query skeleton.
PLACEHOLDER = "?"

_FORMAT_HEADER = "QLOGREG v1"


class RegistryError(Exception):
    """A digest was requested over ids the registry never assigned."""


class RegistryFormatError(RegistryError):
    """A persisted registry file is corrupt or has an unsupported version."""


def _escape(text: str) -> str:
    return (
        text.replace("\\", "\\\\")
        .replace("\t", "\\t")
        .replace("\n", "\\n")
        .replace("\r", "\\r")
    )


def _unescape(text: str) -> str:
    out = []
    i = 0
    while i < len(text):
        ch = text[i]
        if ch == "\\" and i + 1 < len(text):
            nxt = text[i + 1]
            out.append({"\\": "\\", "t": "\t", "n": "\n", "r": "\r"}.get(nxt, nxt))
            i += 2
        else:
            out.append(ch)
            i += 1
    return "".join(out)


class DigestRegistry:
    """Bijective table between canonicalized digest keys and dense integer ids.

    Ids 0..3 are reserved at construction: the constant placeholder atom and
    the three empty collections.  Insertion is guarded by a lock so concurrent
    interning of the same key always yields the same id (first writer wins).
    """

    def __init__(self) -> None:
        self._ids: dict[tuple, int] = {}
        self._keys: list[tuple] = []
        self._pruned: set[int] = set()
        self._lock = threading.Lock()
        self.placeholder_id = self.intern_atom(PLACEHOLDER)
        self.empty_list_id = self.digest_list([])
        self.empty_bag_id = self.digest_bag([])
        self.empty_set_id = self.digest_set([])

    def __len__(self) -> int:
        return len(self._keys)

    def _intern(self, key: tuple) -> int:
        fid = self._ids.get(key)
        if fid is not None:
            return fid
        with self._lock:
            fid = self._ids.get(key)
            if fid is None:
                fid = len(self._keys)
                self._keys.append(key)
                self._ids[key] = fid
            return fid

    def _check_elements(self, elems: Iterable[int]) -> tuple[int, ...]:
        out = tuple(elems)
        n = len(self._keys)
        for e in out:
            if not isinstance(e, int) or e < 0 or e >= n:
                raise RegistryError(f"unknown feature id {e!r} in digest input")
        return out

    def intern_atom(self, text: str) -> int:
        return self._intern((ATOM, text))

    def digest_list(self, elems: Iterable[int]) -> int:
        return self._intern((LIST,) + self._check_elements(elems))

    def digest_bag(self, elems: Iterable[int]) -> int:
        return self._intern((BAG,) + tuple(sorted(self._check_elements(elems))))

    def digest_set(self, elems: Iterable[int]) -> int:
        return self._intern((SET,) + tuple(sorted(set(self._check_elements(elems)))))

    def key_of(self, fid: int) -> tuple:
        """Return (kind, *elements) for an assigned id; inverse of digesting."""
        if not isinstance(fid, int) or fid < 0 or fid >= len(self._keys):
            raise RegistryError(f"unknown feature id {fid!r}")
        return self._keys[fid]

    def kind_of(self, fid: int) -> str:
        return self.key_of(fid)[0]

    def atom_text(self, fid: int) -> str:
        key = self.key_of(fid)
        if key[0] != ATOM:
            raise RegistryError(f"id {fid} is a {key[0]} digest, not an atom")
        return key[1]

    def has_atom(self, text: str) -> bool:
        return (ATOM, text) in self._ids

    def mark_pruned(self, fid: int) -> None:
        self.key_of(fid)  # validates
        self._pruned.add(fid)

    def is_pruned(self, fid: int) -> bool:
        return fid in self._pruned

    @property
    def pruned_ids(self) -> frozenset[int]:
        return frozenset(self._pruned)

    # -- persistence ------------------------------------------------------

    def save(self, path) -> None:
        """Write the table as line-oriented text: header, one record per id,
        then a trailing PRUNED section."""
        lines = [_FORMAT_HEADER]
        for fid, key in enumerate(self._keys):
            kind = key[0]
            if kind == ATOM:
                payload = _escape(key[1])
            else:
                payload = ",".join(str(e) for e in key[1:])
            lines.append(f"{fid}\t{kind}\t{payload}")
        lines.append("PRUNED\t" + ",".join(str(i) for i in sorted(self._pruned)))
        with open(path, "w", encoding="utf-8") as fh:
            fh.write("\n".join(lines) + "\n")

    @classmethod
    def load(cls, path) -> "DigestRegistry":
        with open(path, "r", encoding="utf-8") as fh:
            raw = fh.read()
        lines = raw.split("\n")
        if lines and lines[-1] == "":
            lines.pop()
        if not lines:
            raise RegistryFormatError("empty registry file")
        if lines[0] != _FORMAT_HEADER:
            if lines[0].startswith("QLOGREG"):
                raise RegistryFormatError(f"version mismatch: {lines[0]!r}")
            raise RegistryFormatError("not a registry file (bad header)")

        reg = cls.__new__(cls)
        reg._ids = {}
        reg._keys = []
        reg._pruned = set()
        reg._lock = threading.Lock()

        saw_pruned = False
        for line in lines[1:]:
            parts = line.split("\t")
            if parts[0] == "PRUNED":
                if len(parts) != 2:
                    raise RegistryFormatError("malformed PRUNED section")
                if parts[1]:
                    for tok in parts[1].split(","):
                        try:
                            reg._pruned.add(int(tok))
                        except ValueError:
                            raise RegistryFormatError(
                                f"bad pruned id {tok!r}"
                            ) from None
                saw_pruned = True
                break
            if len(parts) != 3:
                raise RegistryFormatError(f"malformed record: {line!r}")
            sid, kind, payload = parts
            try:
                fid = int(sid)
            except ValueError:
                raise RegistryFormatError(f"bad id {sid!r}") from None
            if fid != len(reg._keys):
                raise RegistryFormatError(f"non-dense id sequence at {fid}")
            if kind == ATOM:
                key: tuple = (ATOM, _unescape(payload))
            elif kind in (LIST, BAG, SET):
                try:
                    elems = (
                        tuple(int(t) for t in payload.split(",")) if payload else ()
                    )
                except ValueError:
                    raise RegistryFormatError(
                        f"bad element list {payload!r}"
                    ) from None
                if any(e < 0 or e >= fid for e in elems):
                    raise RegistryFormatError(f"record {fid} references unknown ids")
                key = (kind,) + elems
            else:
                raise RegistryFormatError(f"unknown kind {kind!r}")
            if key in reg._ids:
                raise RegistryFormatError(f"duplicate key at id {fid}")
            reg._ids[key] = fid
            reg._keys.append(key)
        if not saw_pruned:
            raise RegistryFormatError("truncated registry file (missing PRUNED)")
        if any(i >= len(reg._keys) for i in reg._pruned):
            raise RegistryFormatError("pruned section references unknown ids")

        # Reserved ids must be present exactly as a fresh registry assigns them.
        expected = [(ATOM, PLACEHOLDER), (LIST,), (BAG,), (SET,)]
        for fid, key in enumerate(expected):
            if len(reg._keys) <= fid or reg._keys[fid] != key:
                raise RegistryFormatError("reserved ids missing or reordered")
        reg.placeholder_id = 0
        reg.empty_list_id = 1
        reg.empty_bag_id = 2
        reg.empty_set_id = 3
        return reg
