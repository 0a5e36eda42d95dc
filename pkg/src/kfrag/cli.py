"""Command-line interface.

Exit codes form the scripting contract: 0 success, 2 parameter errors,
3 I/O and backend errors, 4 threshold (missing fragments), 5 integrity
failures.  Data goes to stdout, diagnostics to stderr.  Setting
FRAG_RNG_SEED forces deterministic randomness (golden-file tests only).
"""

from __future__ import annotations

import functools
import hashlib
import sys
import time
import uuid
from pathlib import Path

import click

from . import analysis, baselines, bench, dispersal, wire
from .baselines import SchemeId
from .codec import CodecParams, Fragment, FragmentSet, decode_data, encode_data
from .erasure import ParityFragment, ParityParams, parity_fragments, rs_decode
from .errors import IntegrityError, ParameterError, StorageError, ThresholdError
from .rng import rng_from_env

SCHEMES = [s.value for s in SchemeId]

EXIT_PARAMETER = 2
EXIT_IO = 3
EXIT_THRESHOLD = 4
EXIT_INTEGRITY = 5


def _note(msg: str) -> None:
    click.echo(msg, err=True)


def _guard(fn):
    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except ParameterError as exc:
            _note(f"error: {exc}")
            sys.exit(EXIT_PARAMETER)
        except ThresholdError as exc:
            _note(f"error: {exc}")
            sys.exit(EXIT_THRESHOLD)
        except IntegrityError as exc:
            _note(f"error: {exc}")
            sys.exit(EXIT_INTEGRITY)
        except (StorageError, OSError) as exc:
            _note(f"error: {exc}")
            sys.exit(EXIT_IO)

    return wrapper


@click.group()
def main() -> None:
    """Fragment, disperse, analyze, and benchmark data protection schemes."""


# ---------------------------------------------------------------------------
# split
# ---------------------------------------------------------------------------


def _split_fragments(data: bytes, scheme: str, k: int, c: int, block_size: int, n: int):
    """Fragment in memory; returns (fragments, parity) for the chosen scheme."""
    rng = rng_from_env()
    if scheme == SchemeId.PROPOSED.value:
        if k % c != 0:
            raise ParameterError("--k must be a multiple of --c")
        fragset = encode_data(data, CodecParams(k=k, c=c, block_size=block_size), rng)
        parity: list[ParityFragment] = []
        if n > k:
            blobs = [wire.dump_fragment(f) for f in fragset]
            parity = parity_fragments(blobs, ParityParams(k=k, n=n))
        return list(fragset), parity
    if scheme == SchemeId.SSS.value:
        return baselines.sss_split(data, k, n, rng), []
    if scheme == SchemeId.IDA.value:
        return baselines.ida_split(data, k, n), []
    if scheme == SchemeId.SSMS.value:
        return baselines.ssms_split(data, k, n, rng), []
    if scheme == SchemeId.AONT_RS.value:
        return baselines.aont_rs_split(data, k, n, rng), []
    raise ParameterError(f"--scheme {scheme!r} is not supported")


@main.command("split")
@click.option("--in", "in_path", required=True, type=click.Path(path_type=Path))
@click.option("--k", default=4, show_default=True, help="Fragments needed for recovery.")
@click.option("--c", default=2, show_default=True, help="Independent storage sites.")
@click.option(
    "--block-size",
    default=250,
    show_default=True,
    help="Block size in bytes (proposed scheme only).",
)
@click.option("--scheme", default="proposed", type=click.Choice(SCHEMES), show_default=True)
@click.option("--n", default=None, type=int, help="Total fragments incl. redundancy.")
@click.option("--out", "out_dir", required=True, type=click.Path(path_type=Path))
@_guard
def cmd_split(in_path: Path, k: int, c: int, block_size: int, scheme: str, n: int | None, out_dir: Path):
    """Fragment a file into k (or n) fragment files plus a manifest."""
    if not in_path.is_file():
        raise StorageError(f"--in file not found: {in_path}")
    if k < 1:
        raise ParameterError("--k must be positive")
    n = k if n is None else n
    if n < k:
        raise ParameterError("--n must be at least --k")
    data = in_path.read_bytes()
    fragments, parity = _split_fragments(data, scheme, k, c, block_size, n)

    out_dir.mkdir(parents=True, exist_ok=True)
    entries = []
    for frag in fragments:
        blob = wire.dump_any(frag)
        name = f"f{frag.index}{wire.extension_for(frag)}"
        (out_dir / name).write_bytes(blob)
        entries.append(
            dispersal.ManifestEntry(
                index=frag.index, site=None, name=name,
                sha256=hashlib.sha256(blob).hexdigest(),
            )
        )
    for pf in parity:
        blob = wire.dump_parity_fragment(pf)
        name = f"p{pf.row_index}{wire.EXTENSIONS[wire.MAGIC_PARITY]}"
        (out_dir / name).write_bytes(blob)
        entries.append(
            dispersal.ManifestEntry(
                index=pf.index, site=None, name=name,
                sha256=hashlib.sha256(blob).hexdigest(), kind="parity",
            )
        )
    manifest = dispersal.Manifest(
        scheme=scheme,
        k=k,
        c=c if scheme == SchemeId.PROPOSED.value else 0,
        block_size=block_size if scheme == SchemeId.PROPOSED.value else 0,
        n=n,
        payload_length=len(data),
        fragments=entries,
        created=time.strftime("%Y-%m-%dT%H:%M:%SZ", time.gmtime()),
        run_id=uuid.uuid4().hex[:12],
        cipher="aes-128-ctr" if scheme in ("ssms", "aont-rs") else None,
        digest="sha-256" if scheme == "aont-rs" else None,
    )
    manifest_path = out_dir / "manifest.json"
    manifest.save(manifest_path)
    _note(f"wrote {len(entries)} fragment files to {out_dir}")
    click.echo(str(manifest_path))


# ---------------------------------------------------------------------------
# join
# ---------------------------------------------------------------------------


def _join_loaded(loaded: list) -> bytes:
    """Reconstruct from deserialized fragments of any single scheme."""
    frags = [f for f in loaded if isinstance(f, Fragment)]
    parity = [f for f in loaded if isinstance(f, ParityFragment)]
    rest = [f for f in loaded if not isinstance(f, (Fragment, ParityFragment))]
    if frags or parity:
        if rest:
            raise ParameterError("cannot mix schemes in one join")
        return _join_proposed(frags, parity)
    kinds = {type(f) for f in rest}
    if len(kinds) != 1:
        raise ParameterError("cannot mix schemes in one join")
    kind = kinds.pop()
    if kind is baselines.SssFragment:
        return baselines.sss_reconstruct(rest, rest[0].k)
    if kind is baselines.IdaFragment:
        return baselines.ida_reconstruct(rest)
    if kind is baselines.SsmsFragment:
        return baselines.ssms_reconstruct(rest)
    if kind is baselines.AontFragment:
        return baselines.aont_rs_reconstruct(rest)
    raise ParameterError(f"cannot join fragments of type {kind.__name__}")


def _join_proposed(frags: list[Fragment], parity: list[ParityFragment]) -> bytes:
    present = {f.index for f in frags}
    if frags:
        k = frags[0].params.k
    elif parity:
        k = parity[0].k
    else:
        raise ThresholdError("k-of-k threshold not met: no fragments", missing=())
    missing = sorted(set(range(k)) - present)
    if missing and parity:
        n = parity[0].n
        rows = [(f.index, wire.dump_fragment(f)) for f in frags]
        rows += [(p.index, p.data) for p in parity]
        if len(rows) >= k:
            recovered = rs_decode(rows, ParityParams(k=k, n=n))
            frags = [wire.load_fragment(blob) for blob in recovered]
            missing = []
    if missing:
        raise ThresholdError(
            f"k-of-k threshold not met: missing fragments {missing}", missing=missing
        )
    return decode_data(sorted(frags, key=lambda f: f.index))


@main.command("join")
@click.option("--manifest", "manifest_path", type=click.Path(path_type=Path))
@click.option("--frags", "first_frag", type=click.Path(path_type=Path))
@click.argument("more_frags", nargs=-1, type=click.Path(path_type=Path))
@click.option("--out", "out_path", required=True, type=click.Path(path_type=Path))
@_guard
def cmd_join(
    manifest_path: Path | None,
    first_frag: Path | None,
    more_frags: tuple[Path, ...],
    out_path: Path,
):
    """Reassemble the original file; prints its SHA-256 digest.

    Fragment files are given as ``--frags FILE [FILE ...]``.
    """
    frag_paths = ((first_frag,) if first_frag else ()) + tuple(more_frags)
    if manifest_path is None and not frag_paths:
        raise ParameterError("either --manifest or --frags is required")
    if manifest_path is not None and frag_paths:
        raise ParameterError("--manifest and --frags are mutually exclusive")

    loaded = []
    if manifest_path is not None:
        manifest = dispersal.Manifest.load(manifest_path)
        base = manifest_path.parent
        missing = []
        for entry in manifest.fragments:
            path = base / entry.name
            if not path.is_file():
                if entry.kind == "data":
                    missing.append(entry.index)
                continue
            blob = path.read_bytes()
            if hashlib.sha256(blob).hexdigest() != entry.sha256:
                raise IntegrityError(f"digest mismatch for {entry.name!r}")
            loaded.append(wire.load_any(blob))
        if missing and not any(isinstance(f, ParityFragment) for f in loaded):
            raise ThresholdError(
                f"k-of-k threshold not met: missing fragments {sorted(missing)}",
                missing=sorted(missing),
            )
    else:
        for path in frag_paths:
            if not path.is_file():
                raise StorageError(f"fragment file not found: {path}")
            loaded.append(wire.load_any(path.read_bytes()))

    data = _join_loaded(loaded)
    out_path.write_bytes(data)
    _note(f"wrote {len(data)} bytes to {out_path}")
    click.echo(hashlib.sha256(data).hexdigest())


# ---------------------------------------------------------------------------
# disperse / fetch
# ---------------------------------------------------------------------------


def _parse_sites(spec: str) -> list[dispersal.StorageSite]:
    dirs = [d for d in spec.split(",") if d]
    return [
        dispersal.StorageSite(index=i, backend=dispersal.LocalDirectoryBackend(Path(d)))
        for i, d in enumerate(dirs)
    ]


@main.command("disperse")
@click.option("--manifest", "manifest_path", required=True, type=click.Path(path_type=Path))
@click.option("--sites", "sites_spec", required=True, help="Comma-separated site directories.")
@click.option(
    "--manifest-out",
    "manifest_out",
    default=None,
    type=click.Path(path_type=Path),
    help="Where to write the dispersal manifest [default: dispersal.json beside --manifest].",
)
@_guard
def cmd_disperse(manifest_path: Path, sites_spec: str, manifest_out: Path | None):
    """Store split fragments onto their sites; prints the assignment table."""
    manifest = dispersal.Manifest.load(manifest_path)
    if manifest.scheme != SchemeId.PROPOSED.value:
        raise ParameterError(
            f"disperse applies the neighbor-separation rules of the proposed scheme; "
            f"manifest is for {manifest.scheme!r}"
        )
    sites = _parse_sites(sites_spec)
    has_parity = any(e.kind == "parity" for e in manifest.fragments)
    expected = manifest.c + (1 if has_parity else 0)
    if len(sites) != expected:
        raise ParameterError(
            f"--sites must name {expected} directories"
            f" ({manifest.c} sites{' plus one parity site' if has_parity else ''}),"
            f" got {len(sites)}"
        )
    for site in sites:
        site.backend.root.mkdir(parents=True, exist_ok=True)

    base = manifest_path.parent
    frags, parity = [], []
    for entry in manifest.fragments:
        blob = (base / entry.name).read_bytes()
        if hashlib.sha256(blob).hexdigest() != entry.sha256:
            raise IntegrityError(f"digest mismatch for {entry.name!r}")
        if entry.kind == "parity":
            parity.append(wire.load_parity_fragment(blob))
        else:
            frags.append(wire.load_fragment(blob))
    fragset = FragmentSet(tuple(sorted(frags, key=lambda f: f.index)))

    stored = dispersal.store(fragset, sites, parity=parity)
    out_path = manifest_out or (base / "dispersal.json")
    stored.save(out_path)
    _note(f"dispersal manifest written to {out_path}")
    click.echo("fragment\tsite")
    for entry in stored.fragments:
        label = f"p{entry.index - stored.k}" if entry.kind == "parity" else f"f{entry.index}"
        click.echo(f"{label}\t{entry.site}")


@main.command("fetch")
@click.option("--manifest", "manifest_path", required=True, type=click.Path(path_type=Path))
@click.option("--sites", "sites_spec", required=True, help="Comma-separated site directories.")
@click.option("--out", "out_dir", required=True, type=click.Path(path_type=Path))
@_guard
def cmd_fetch(manifest_path: Path, sites_spec: str, out_dir: Path):
    """Retrieve dispersed fragments back into a local directory."""
    manifest = dispersal.Manifest.load(manifest_path)
    sites = _parse_sites(sites_spec)
    has_parity = any(e.kind == "parity" for e in manifest.fragments)
    expected = manifest.c + (1 if has_parity else 0)
    if len(sites) != expected:
        raise ParameterError(f"--sites must name {expected} directories, got {len(sites)}")
    fragset, parity = dispersal.fetch(manifest, sites)

    out_dir.mkdir(parents=True, exist_ok=True)
    entries = []
    for frag in fragset:
        blob = wire.dump_fragment(frag)
        name = f"f{frag.index}{wire.EXTENSIONS[wire.MAGIC_PROPOSED]}"
        (out_dir / name).write_bytes(blob)
        entries.append(
            dispersal.ManifestEntry(
                index=frag.index, site=None, name=name,
                sha256=hashlib.sha256(blob).hexdigest(),
            )
        )
    local = dispersal.Manifest(
        scheme=manifest.scheme,
        k=manifest.k,
        c=manifest.c,
        block_size=manifest.block_size,
        n=manifest.n,
        payload_length=manifest.payload_length,
        fragments=entries,
        created=manifest.created,
        run_id=manifest.run_id,
    )
    local.save(out_dir / "manifest.json")
    _note(f"fetched {len(entries)} fragments into {out_dir}")
    click.echo(str(out_dir / "manifest.json"))


# ---------------------------------------------------------------------------
# analyze
# ---------------------------------------------------------------------------


@main.command("analyze")
@click.option("--in", "in_path", required=True, type=click.Path(path_type=Path))
@click.option("--scheme", default="proposed", type=click.Choice(SCHEMES), show_default=True)
@click.option("--k", default=4, show_default=True)
@click.option("--c", default=2, show_default=True)
@click.option("--block-size", default=250, show_default=True)
@click.option("--n", default=None, type=int)
@click.option("--report", "report_path", required=True, type=click.Path(path_type=Path))
@_guard
def cmd_analyze(in_path: Path, scheme: str, k: int, c: int, block_size: int, n: int | None, report_path: Path):
    """Fragment a file in memory and measure fragment statistics."""
    if not in_path.is_file():
        raise StorageError(f"--in file not found: {in_path}")
    data = in_path.read_bytes()
    n = k if n is None else n
    fragments, _ = _split_fragments(data, scheme, k, c, block_size, n)
    reports = analysis.analyze_fragments(fragments, data, include_recurrence=False)
    params = {"k": k, "c": c, "block_size": block_size, "n": n}
    analysis.write_report_json(report_path, scheme, params, reports)
    _note(f"report written to {report_path}")
    failed = 0
    for r in reports:
        verdict = "pass" if r.chi2_pass else "FAIL"
        failed += 0 if r.chi2_pass else 1
        click.echo(
            f"fragment {r.fragment_index}: entropy={r.entropy:.4f} "
            f"chi2={r.chi2:.1f} bit_diff={r.bit_difference:.4f} {verdict}"
        )
    click.echo(
        f"summary: {len(reports) - failed}/{len(reports)} fragments pass chi-squared"
    )


# ---------------------------------------------------------------------------
# bench
# ---------------------------------------------------------------------------


def _parse_grid(spec: str) -> list[tuple[int, int, int]]:
    grid = []
    for part in spec.split(";"):
        part = part.strip()
        if not part:
            continue
        pieces = part.split(",")
        if len(pieces) != 3:
            raise ParameterError(f"malformed grid entry {part!r}; expected k,c,block_size")
        try:
            grid.append((int(pieces[0]), int(pieces[1]), int(pieces[2])))
        except ValueError:
            raise ParameterError(f"malformed grid entry {part!r}; expected integers") from None
    if not grid:
        raise ParameterError("empty --grid")
    return grid


@main.command("bench")
@click.option("--grid", "grid_spec", default=None, help='Semicolon list of "k,c,block_size".')
@click.option("--schemes", "schemes_spec", default="proposed", show_default=True)
@click.option("--payload-mb", default=100, show_default=True)
@click.option("--reps", default=3, show_default=True)
@click.option("--warmup", default=1, show_default=True)
@click.option("--parallel-join", is_flag=True, help="Also exercise the threaded join path.")
@click.option("--out", "out_path", default=None, type=click.Path(path_type=Path))
@_guard
def cmd_bench(grid_spec, schemes_spec, payload_mb, reps, warmup, parallel_join, out_path):
    """Measure fragmentation/defragmentation throughput on random payloads."""
    try:
        schemes = [SchemeId(s.strip()) for s in schemes_spec.split(",") if s.strip()]
    except ValueError as exc:
        raise ParameterError(f"unknown scheme in --schemes: {exc}") from None
    cfg = bench.BenchConfig(
        schemes=schemes,
        payload_mb=payload_mb,
        repetitions=reps,
        warmup=warmup,
        grid=_parse_grid(grid_spec) if grid_spec else list(bench.DEFAULT_GRID),
        parallel_join_workers=2 if parallel_join else 1,
    )
    results = bench.run_bench(cfg)
    csv_text = bench.emit_results(
        results,
        csv_path=out_path,
        json_path=out_path.with_suffix(".json") if out_path else None,
    )
    if out_path:
        _note(f"results written to {out_path}")
    click.echo(csv_text, nl=False)


if __name__ == "__main__":
    main()
