"""Dispersal of fragments over independent storage sites.

Fragment j goes to site j mod c.  That single rule guarantees the two
separation properties the scheme's security rests on: the c-1 neighbor
fragments that feed a fragment's encoding never share its site, and the c
shares of any one permutation array land on c distinct sites.  Assignments
are validated before anything is written, and arbitrary (user-supplied)
assignments can be checked for the exact violating pairs.

A local-directory backend ships by default; anything with put/get/delete/
list_names can stand in for a real object store.  The manifest stays on the
client: placing it at any provider would hand that provider the layout.
"""

from __future__ import annotations

import hashlib
import json
import time
import uuid
from dataclasses import dataclass
from pathlib import Path

from .codec import FragmentSet
from .erasure import ParityFragment, ParityParams, rs_decode
from .errors import IntegrityError, ParameterError, StorageError, ThresholdError
from . import wire


class LocalDirectoryBackend:
    """Object store on a local directory; object names may contain slashes."""

    def __init__(self, root: str | Path):
        self.root = Path(root)

    def _path(self, name: str) -> Path:
        path = (self.root / name).resolve()
        if not path.is_relative_to(self.root.resolve()):
            raise StorageError(f"object name escapes the site root: {name!r}")
        return path

    def put(self, name: str, data: bytes) -> None:
        path = self._path(name)
        if path.exists():
            raise StorageError(f"object already exists: {name!r}")
        try:
            path.parent.mkdir(parents=True, exist_ok=True)
            path.write_bytes(data)
        except OSError as exc:
            raise StorageError(f"cannot write {name!r}: {exc}") from exc

    def get(self, name: str) -> bytes:
        path = self._path(name)
        if not path.exists():
            raise StorageError(f"object not found: {name!r}")
        return path.read_bytes()

    def delete(self, name: str) -> None:
        path = self._path(name)
        if path.exists():
            path.unlink()

    def list_names(self) -> list[str]:
        return sorted(
            str(p.relative_to(self.root)) for p in self.root.rglob("*") if p.is_file()
        )


@dataclass(frozen=True)
class StorageSite:
    index: int
    backend: LocalDirectoryBackend


@dataclass(frozen=True)
class SiteAssignment:
    """Fragment index -> site index."""

    sites: tuple[int, ...]

    def __getitem__(self, j: int) -> int:
        return self.sites[j]

    def __len__(self) -> int:
        return len(self.sites)


@dataclass(frozen=True)
class Violation:
    kind: str  # "neighbor" or "permutation-group"
    fragments: tuple[int, ...]
    site: int


def assign_sites(k: int, c: int) -> SiteAssignment:
    """The j mod c rule, checked against all separation invariants."""
    if c < 2 or k < c or k % c != 0:
        raise ParameterError(f"k must be a positive multiple of c >= 2, got k={k}, c={c}")
    assignment = SiteAssignment(tuple(j % c for j in range(k)))
    violations = validate_assignment(assignment, k, c)
    if violations:
        raise RuntimeError(f"internal error: rule produced violations {violations}")
    return assignment


def validate_assignment(assignment: SiteAssignment, k: int, c: int) -> list[Violation]:
    """Check neighbor separation and permutation-share separation.

    Violations are data, not errors: the list is empty for a good assignment
    and names the exact offending fragment groups otherwise.
    """
    if len(assignment) != k:
        raise ParameterError(f"assignment covers {len(assignment)} fragments, expected {k}")
    out: list[Violation] = []
    for j in range(k):
        for t in range(1, c):
            neighbor = (j + t) % k
            if neighbor != j and assignment[j] == assignment[neighbor]:
                pair = (min(j, neighbor), max(j, neighbor))
                v = Violation(kind="neighbor", fragments=pair, site=assignment[j])
                if v not in out:
                    out.append(v)
    for r in range(k // c):
        group = tuple(r * c + z for z in range(c))
        sites = [assignment[j] for j in group]
        if len(set(sites)) != c:
            dup = max(set(sites), key=sites.count)
            out.append(Violation(kind="permutation-group", fragments=group, site=dup))
    return out


@dataclass
class ManifestEntry:
    index: int
    site: int | None
    name: str
    sha256: str
    kind: str = "data"  # "data" or "parity"


@dataclass
class Manifest:
    scheme: str
    k: int
    c: int
    block_size: int
    n: int
    payload_length: int
    fragments: list[ManifestEntry]
    created: str
    run_id: str
    cipher: str | None = None
    digest: str | None = None

    def to_dict(self) -> dict:
        doc = {
            "scheme": self.scheme,
            "k": self.k,
            "c": self.c,
            "block_size": self.block_size,
            "n": self.n,
            "payload_length": self.payload_length,
            "created": self.created,
            "run_id": self.run_id,
            "fragments": [
                {
                    "index": e.index,
                    "site": e.site,
                    "name": e.name,
                    "sha256": e.sha256,
                    "kind": e.kind,
                }
                for e in self.fragments
            ],
        }
        if self.cipher:
            doc["cipher"] = self.cipher
        if self.digest:
            doc["digest"] = self.digest
        return doc

    @classmethod
    def from_dict(cls, doc: dict) -> "Manifest":
        return cls(
            scheme=doc["scheme"],
            k=doc["k"],
            c=doc["c"],
            block_size=doc["block_size"],
            n=doc["n"],
            payload_length=doc["payload_length"],
            fragments=[
                ManifestEntry(
                    index=e["index"],
                    site=e["site"],
                    name=e["name"],
                    sha256=e["sha256"],
                    kind=e.get("kind", "data"),
                )
                for e in doc["fragments"]
            ],
            created=doc["created"],
            run_id=doc["run_id"],
            cipher=doc.get("cipher"),
            digest=doc.get("digest"),
        )

    def save(self, path: str | Path) -> None:
        Path(path).write_text(json.dumps(self.to_dict(), indent=2))

    @classmethod
    def load(cls, path: str | Path) -> "Manifest":
        return cls.from_dict(json.loads(Path(path).read_text()))


def _sha256(data: bytes) -> str:
    return hashlib.sha256(data).hexdigest()


def store(
    fragset: FragmentSet,
    sites: list[StorageSite],
    parity: list[ParityFragment] | tuple = (),
    run_id: str | None = None,
) -> Manifest:
    """Write each fragment to its assigned site and return the manifest.

    Parity fragments, when present, all go to one dedicated extra site
    appended after the c primary sites.  On any backend failure the objects
    already written are removed and no manifest is produced.
    """
    params = fragset.params
    expected = params.c + (1 if parity else 0)
    if len(sites) != expected:
        raise ParameterError(f"expected {expected} sites, got {len(sites)}")
    if len({s.index for s in sites}) != len(sites):
        raise ParameterError("site indices must be distinct")
    assignment = assign_sites(params.k, params.c)
    run = run_id or uuid.uuid4().hex[:12]

    plan: list[tuple[StorageSite, str, bytes, ManifestEntry]] = []
    for frag in fragset:
        site = sites[assignment[frag.index]]
        name = f"{run}/f{frag.index}{wire.EXTENSIONS[wire.MAGIC_PROPOSED]}"
        blob = wire.dump_fragment(frag)
        plan.append(
            (site, name, blob,
             ManifestEntry(index=frag.index, site=site.index, name=name, sha256=_sha256(blob)))
        )
    for pf in parity:
        site = sites[-1]
        name = f"{run}/p{pf.row_index}{wire.EXTENSIONS[wire.MAGIC_PARITY]}"
        blob = wire.dump_parity_fragment(pf)
        plan.append(
            (site, name, blob,
             ManifestEntry(index=pf.index, site=site.index, name=name,
                           sha256=_sha256(blob), kind="parity"))
        )

    written: list[tuple[StorageSite, str]] = []
    for site, name, blob, _entry in plan:
        try:
            site.backend.put(name, blob)
        except StorageError as exc:
            for done_site, done_name in written:
                done_site.backend.delete(done_name)
            raise StorageError(
                f"store failed at site {site.index}: {exc}", site=site.index
            ) from exc
        written.append((site, name))
    entries = [entry for _, _, _, entry in plan]

    return Manifest(
        scheme="proposed",
        k=params.k,
        c=params.c,
        block_size=params.block_size,
        n=params.k + len(list(parity)),
        payload_length=fragset.payload_length,
        fragments=entries,
        created=time.strftime("%Y-%m-%dT%H:%M:%SZ", time.gmtime()),
        run_id=run,
    )


def fetch(
    manifest: Manifest, sites: list[StorageSite]
) -> tuple[FragmentSet, list[ParityFragment]]:
    """Read back, digest-verify, and deserialize every manifest entry.

    Lost data fragments are rebuilt from parity rows when enough of the n
    total rows survive; otherwise the threshold error lists what is gone.
    """
    by_index = {s.index: s for s in sites}
    blobs: dict[int, bytes] = {}
    parity: list[ParityFragment] = []
    digests: dict[int, str] = {}
    missing: list[int] = []
    for entry in manifest.fragments:
        site = by_index.get(entry.site)
        if site is None:
            raise ParameterError(f"manifest references unknown site {entry.site}")
        if entry.kind == "data":
            digests[entry.index] = entry.sha256
        try:
            blob = site.backend.get(entry.name)
        except StorageError:
            if entry.kind == "data":
                missing.append(entry.index)
            continue
        if _sha256(blob) != entry.sha256:
            raise IntegrityError(
                f"digest mismatch for {entry.name!r} at site {entry.site}"
            )
        if entry.kind == "parity":
            parity.append(wire.load_parity_fragment(blob))
        else:
            blobs[entry.index] = blob

    if missing:
        if len(blobs) + len(parity) < manifest.k:
            raise ThresholdError(
                f"k-of-k threshold not met: missing fragments {sorted(missing)}",
                missing=sorted(missing),
            )
        rows = [(i, b) for i, b in blobs.items()]
        rows += [(p.index, p.data) for p in parity]
        recovered = rs_decode(rows, ParityParams(k=manifest.k, n=manifest.n))
        for index in missing:
            blob = recovered[index]
            if _sha256(blob) != digests[index]:
                raise IntegrityError(f"digest mismatch for rebuilt fragment {index}")
            blobs[index] = blob

    frags = sorted((wire.load_fragment(b) for b in blobs.values()), key=lambda f: f.index)
    return FragmentSet(tuple(frags)), parity
