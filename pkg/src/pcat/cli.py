"""Command-line front end.

Exit codes: 0 all conditions pass, 1 some condition fails, 2 usage or I/O
error, 3 some condition is inconclusive (and none fails).
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from . import category as cat
from .cache import ClosureCache
from .closure import ENGINE_VERSION, BudgetExceeded
from .config import ConfigError, RunConfig, resolve
from .lattice import (
    CUBE,
    INCONCLUSIVE,
    FAIL,
    PASS,
    Condition,
    PoolEntry,
    Report,
    classify_pool,
    parameters,
    slice_check,
    verify_cube,
)
from .partition import (
    BoundExceeded,
    PartitionError,
    classify_flags,
    enumerate_partitions,
    from_record,
    parse_partition,
    serialize,
)

log = logging.getLogger("pcat")

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_INCONCLUSIVE = 0, 1, 2, 3


class InputError(Exception):
    pass


# ------------------------------------------------------------------ loading


def _partition(item):
    return parse_partition(item) if isinstance(item, str) else from_record(item)


def load_subject(path: str, cfg: RunConfig, cache) -> cat.TruncatedCategory:
    """Read a generator file, a category file or a ``{"vertex": name}`` record.

    Generator files are JSON (a list of partitions, or an object with a
    ``generators`` list) or plain text with one partition per line.
    """
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror or exc}") from exc
    name = Path(path).stem
    try:
        data = json.loads(text)
    except ValueError:
        data = [ln.strip() for ln in text.splitlines() if ln.strip() and not ln.strip().startswith("#")]
    return subject_from_data(data, name, cfg, cache)


def subject_from_data(data, name: str, cfg: RunConfig, cache) -> cat.TruncatedCategory:
    if isinstance(data, dict):
        name = data.get("name") or name
        if "vertex" in data:
            return cat.named_category(data["vertex"], cfg.degree)
        if "members" in data:
            c = cat.from_record(data)
            if c.degree != cfg.degree:
                raise InputError(f"category file has degree {c.degree}, run uses {cfg.degree}")
            return c
        data = data.get("generators")
        if data is None:
            raise InputError("expected 'generators', 'members' or 'vertex'")
    if not isinstance(data, list):
        raise InputError("expected a list of partitions")
    gens = [_partition(x) for x in data]
    return cat.generate(gens, cfg.degree, cfg.effective_bound, budget=cfg.budget, cache=cache, name=name)


def _subject(args, cfg: RunConfig, cache) -> cat.TruncatedCategory:
    if getattr(args, "vertex", None):
        key = args.vertex
        vertex = next((v for v in CUBE if key in (v.name, v.category_name)), None)
        return cat.named_category(vertex.category_name if vertex else key, cfg.degree)
    path = getattr(args, "category", None) or getattr(args, "gen", None)
    if not path:
        raise InputError("give one of --gen, --category or --vertex")
    return load_subject(path, cfg, cache)


def load_pool(directory: str, cfg: RunConfig, cache) -> list[PoolEntry]:
    d = Path(directory)
    if not d.is_dir():
        raise InputError(f"pool directory {directory} does not exist")
    entries = []
    for path in sorted(d.glob("*.json")):
        try:
            data = json.loads(path.read_text(encoding="utf-8"))
        except ValueError as exc:
            raise InputError(f"{path}: {exc}") from exc
        label = data.get("name", path.stem) if isinstance(data, dict) else path.stem
        entries.append(PoolEntry(label, subject_from_data(data, label, cfg, cache)))
    return entries


# ----------------------------------------------------------------- commands


def _emit(report: Report, cfg: RunConfig, out) -> int:
    out.write(report.to_json() if cfg.format == "structured" else report.to_text())
    return report.exit_code()


def cmd_enumerate(args, cfg: RunConfig, cache, out) -> int:
    ps = enumerate_partitions(args.up, args.down, args.filter)
    ps.sort(key=lambda p: p.sort_key())
    if cfg.format == "structured":
        records = [{**serialize(p, "structured"), "flags": classify_flags(p)._asdict()} for p in ps]
        out.write(json.dumps(records, sort_keys=True, indent=2) + "\n")
    else:
        for p in ps:
            flags = [k for k, v in classify_flags(p)._asdict().items() if v]
            out.write(f"{serialize(p)}\t{','.join(flags) or '-'}\n")
    return EXIT_OK


def cmd_closure(args, cfg: RunConfig, cache, out) -> int:
    c = load_subject(args.generators, cfg, cache)
    record = c.to_record()
    record["engine"] = ENGINE_VERSION
    text = json.dumps(record, sort_keys=True, indent=2) + "\n"
    if args.output:
        Path(args.output).write_text(text, encoding="utf-8")
    else:
        out.write(text)
    status = "stable" if c.stable else "unstable"
    print(f"{len(c.members)} members at degree {c.degree}, bound {c.bound}: {status}", file=sys.stderr)
    return EXIT_OK if c.stable else EXIT_INCONCLUSIVE


def cmd_verify_cube(args, cfg: RunConfig, cache, out) -> int:
    return _emit(verify_cube(cfg.degree, cfg.effective_bound, cfg.budget, cache), cfg, out)


def cmd_slice(args, cfg: RunConfig, cache, out) -> int:
    c = _subject(args, cfg, cache)
    return _emit(slice_check(c, cfg.effective_bound, cfg.budget, cache), cfg, out)


def cmd_uniformity(args, cfg: RunConfig, cache, out) -> int:
    from .linreal import uniformity_check

    if cfg.ambient < 2:
        raise ConfigError("uniformity needs --ambient >= 2")
    c = _subject(args, cfg, cache)
    u = uniformity_check(c, cfg.ambient, cfg.degree, budget=cfg.budget)
    status = {"uniform": PASS, "not uniform": FAIL}.get(u.status, INCONCLUSIVE)
    report = Report(c.label(), parameters(cfg.degree, cfg.effective_bound, ambient=cfg.ambient, capped_bound=u.bound))
    report.conditions.append(Condition("uniformity", status, u.witness))
    return _emit(report.finalize(), cfg, out)


def cmd_classify(args, cfg: RunConfig, cache, out) -> int:
    pool = load_pool(args.pool, cfg, cache)
    report = classify_pool(
        pool,
        cfg.ambient,
        cfg.degree,
        cfg.effective_bound,
        uniformity_degree=args.uniformity_degree,
        budget=cfg.budget,
        cache=cache,
    )
    return _emit(report, cfg, out)


def cmd_hom_dim(args, cfg: RunConfig, cache, out) -> int:
    from .linreal import span_dim
    from .partition import word_pairs

    c = _subject(args, cfg, cache)
    if args.up is not None or args.down is not None:
        pairs = [(args.up or "", args.down or "")]
    else:
        pairs = word_pairs(cfg.degree)
    rows = []
    for up, down in pairs:
        ps = c.at(up, down)
        rows.append({"word_pair": [up, down], "dim": span_dim(ps, cfg.ambient) if ps else 0, "partitions": len(ps)})
    if cfg.format == "structured":
        payload = {"subject": c.label(), "parameters": parameters(cfg.degree, cfg.effective_bound, ambient=cfg.ambient), "dims": rows}
        out.write(json.dumps(payload, sort_keys=True, indent=2) + "\n")
    else:
        for r in rows:
            up, down = r["word_pair"]
            out.write(f"({up or '-'}, {down or '-'})\t{r['dim']}\t{r['partitions']}\n")
    return EXIT_OK


# ------------------------------------------------------------------- parser


def build_parser() -> argparse.ArgumentParser:
    # options may go before or after the subcommand; absent ones stay unset so
    # the subparser copy does not overwrite the top-level value
    common = argparse.ArgumentParser(add_help=False, argument_default=argparse.SUPPRESS)
    common.add_argument("--degree", type=int, help="maximal number of legs of a member (default 6)")
    common.add_argument("--bound", type=int, help="maximal legs of an intermediate (default degree+4)")
    common.add_argument("--ambient", type=int, help="ambient dimension N (default 3)")
    common.add_argument("--budget", type=int, help="work-item cap of one saturation")
    common.add_argument("--format", choices=("text", "structured"), help="output format")
    common.add_argument("--cache-dir", dest="cache_dir", help="on-disk closure cache (env PCAT_CACHE)")
    common.add_argument("--config", help="key=value configuration file")
    common.add_argument("-v", "--verbose", action="store_true")

    parser = argparse.ArgumentParser(prog="pcat", description=__doc__.splitlines()[0], parents=[common])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("enumerate", parents=[common], help="list partitions of a word pair")
    p.add_argument("--up", default="")
    p.add_argument("--down", default="")
    p.add_argument("--filter", help="vertex name or flags joined by '-', e.g. nc-pairing")
    p.set_defaults(func=cmd_enumerate)

    p = sub.add_parser("closure", parents=[common], help="saturate a generator file")
    p.add_argument("generators")
    p.add_argument("-o", "--output", help="write the category file here instead of stdout")
    p.set_defaults(func=cmd_closure)

    p = sub.add_parser("verify-cube", parents=[common], help="check the six faces of the cube")
    p.set_defaults(func=cmd_verify_cube)

    for name, func, helptext in (
        ("slice", cmd_slice, "midpoint, preslicing, slicing and small-square checks"),
        ("uniformity", cmd_uniformity, "compare the e1-capped family with level N-1"),
        ("hom-dim", cmd_hom_dim, "dimensions of the spans at each word pair"),
    ):
        p = sub.add_parser(name, parents=[common], help=helptext)
        src = p.add_mutually_exclusive_group()
        src.add_argument("--gen", help="generator file")
        src.add_argument("--category", help="category file")
        src.add_argument("--vertex", help="vertex name (HN ... UN+) or category name (Peven ... CNC2)")
        if name == "hom-dim":
            p.add_argument("--up")
            p.add_argument("--down")
        p.set_defaults(func=func)

    p = sub.add_parser("classify", parents=[common], help="run the classification harness on a pool")
    p.add_argument("--pool", required=True, help="directory of category / generator JSON files")
    p.add_argument("--uniformity-degree", type=int, help="degree of the uniformity comparison (default: degree)")
    p.set_defaults(func=cmd_classify)
    return parser


def main(argv=None, out=None) -> int:
    out = sys.stdout if out is None else out
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    logging.basicConfig(level=logging.DEBUG if getattr(args, "verbose", False) else logging.WARNING, format="%(levelname)s %(name)s: %(message)s")
    flags = {k: getattr(args, k, None) for k in ("degree", "bound", "ambient", "budget", "format", "cache_dir")}
    try:
        cfg = resolve(flags, getattr(args, "config", None))
        cache = ClosureCache(cfg.cache_dir) if cfg.cache_dir else None
        return args.func(args, cfg, cache, out)
    except BudgetExceeded as exc:
        print(f"pcat: {exc}", file=sys.stderr)
        return EXIT_INCONCLUSIVE
    except (InputError, ConfigError, PartitionError, BoundExceeded, cat.CategoryError, OSError, ValueError) as exc:
        print(f"pcat: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
