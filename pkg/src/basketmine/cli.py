"""``basketmine`` command line.

Subcommands: profile, mine, rules, validate, graph, synth.  Settings come
from flags, optionally seeded by a ``key = value`` file passed with
``--config``; flags win.  Exit status is 0 on success, 1 for usage or
configuration problems and 2 for data problems.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from pathlib import Path

from . import __version__
from .dataset import (
    PROFILE_ATTRIBUTES,
    PosParseError,
    VirtualItemSpec,
    build_catalog,
    categorical_profile,
    derive_virtual_items,
    frequency_table,
    group_into_baskets,
    read_pos_csv,
)
from .evaluation import (
    DegenerateSplitError,
    PatternFormatError,
    SplitSpec,
    TriageThresholds,
    parse_annotations,
    parse_patterns,
    split_baskets,
    triage,
    triage_to_csv,
    validate_rules,
)
from .mining import MiningParams, apriori, brute_force_frequent, build_index
from .multiweb import WEIGHT_METRICS, build_multiweb, classify_edges, edges_to_csv, export_dot
from .rules import MEASURES, SUPPORT_MODES, RuleGenParams, generate_rules, rank_rules, rules_to_csv
from .synth import SynthSpec, write_corpus

log = logging.getLogger("basketmine")

EXIT_OK, EXIT_USAGE, EXIT_DATA = 0, 1, 2

VIRTUAL_ALIASES = {
    "gender": "gender",
    "dow": "day_of_week",
    "day_of_week": "day_of_week",
    "age": "age_band",
    "age_band": "age_band",
}

# flag name -> (converter, default); None default means "not set"
SETTINGS = {
    "input": (None, None),
    "out_dir": (str, "."),
    "min_support": ("support", 0.01),
    "max_len": (int, 3),
    "min_confidence": (float, 0.5),
    "support_mode": (str, "antecedent"),
    "virtual": (str, ""),
    "holdout": (float, 0.3),
    "seed": (int, None),
    "threads": (int, 1),
    "oracle": ("bool", False),
    "top_k": (int, 20),
    "max_rules": (int, None),
    "delta": (float, 0.1),
    "epsilon": (float, 0.1),
    "floor_instances": (int, 5),
    "known": (str, None),
    "annotations": (str, None),
    "min_pair_count": (int, 1),
    "weight_metric": (str, "lift"),
    "t_weak": (float, None),
    "t_strong": (float, None),
    "spec": (str, None),
}


class UsageError(Exception):
    pass


class DataError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def parse_support(text):
    text = str(text).strip()
    try:
        if any(c in text for c in ".eE"):
            return float(text)
        return int(text)
    except ValueError:
        raise UsageError(f"--min-support must be a count or a fraction, got {text!r}") from None


def _convert(name, conv, raw):
    if conv is None:
        return raw
    try:
        if conv == "support":
            return parse_support(raw)
        if conv == "bool":
            if isinstance(raw, bool):
                return raw
            return str(raw).strip().lower() in ("1", "true", "yes", "on")
        return conv(raw)
    except ValueError:
        raise UsageError(f"bad value for {name}: {raw!r}") from None


def read_config(path):
    """Plain ``key = value`` lines; ``#`` starts a comment."""
    out = {}
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise UsageError(f"cannot read config {path}: {exc.strerror}") from None
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise UsageError(f"{path}:{lineno}: expected 'key = value'")
        key, value = (s.strip() for s in line.split("=", 1))
        key = key.replace("-", "_")
        if key not in SETTINGS:
            raise UsageError(f"{path}:{lineno}: unknown setting {key!r}")
        out[key] = value
    return out


def resolve(args):
    """Merge defaults, config file and flags into one settings namespace."""
    file_values = read_config(args.config) if args.config else {}
    merged = {}
    for name, (conv, default) in SETTINGS.items():
        flag = getattr(args, name, None)
        if flag is not None and flag is not False:
            value = flag
        elif name in file_values:
            value = file_values[name]
        else:
            value = default
        if name == "input" and isinstance(value, str):
            value = [p.strip() for p in value.split(",") if p.strip()]
        merged[name] = value if value is None else _convert(name, conv, value)
    return argparse.Namespace(command=args.command, **merged)


def _virtual_spec(text):
    attrs = set()
    for token in (t.strip() for t in text.split(",")):
        if not token:
            continue
        if token not in VIRTUAL_ALIASES:
            raise UsageError(f"unknown virtual attribute {token!r}; use gender, dow, age")
        attrs.add(VIRTUAL_ALIASES[token])
    return VirtualItemSpec(frozenset(attrs))


def _mining_params(cfg):
    try:
        return MiningParams(cfg.min_support, cfg.max_len)
    except (TypeError, ValueError) as exc:
        raise UsageError(str(exc)) from None


def _rule_params(cfg):
    try:
        return RuleGenParams(cfg.min_confidence, cfg.support_mode, True, cfg.max_rules)
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def _load(cfg, with_virtual=True):
    if not cfg.input:
        raise UsageError("no --input given")
    records = []
    for path in cfg.input:
        if not os.path.isfile(path):
            raise UsageError(f"input file not found: {path}")
        try:
            records.extend(read_pos_csv(path))
        except PosParseError as exc:
            raise DataError(f"{path}: {exc}") from None
    diagnostics = []
    baskets = group_into_baskets(records, diagnostics)
    for msg in diagnostics:
        print(f"rejected {msg}", file=sys.stderr)
    if not baskets:
        raise DataError("no baskets")
    spec = _virtual_spec(cfg.virtual)
    if with_virtual and spec.enabled_attributes:
        baskets = [derive_virtual_items(b, spec) for b in baskets]
    return records, baskets


def _out(cfg):
    out = Path(cfg.out_dir)
    try:
        out.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise UsageError(f"cannot create output directory {out}: {exc.strerror}") from None
    return out


def _write(path, text):
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(text)
    print(f"wrote {path}")


def cmd_profile(cfg):
    records, baskets = _load(cfg, with_virtual=False)
    out = _out(cfg)
    catalog = build_catalog(records)
    lines = ["item;name;count;percent"]
    for row in frequency_table(baskets):
        lines.append(f"{row.item};{catalog.name(row.item)};{row.count};{row.percent}")
    _write(out / "frequency.csv", "\n".join(lines) + "\n")
    for attr in PROFILE_ATTRIBUTES:
        rows = categorical_profile(baskets, attr, catalog)
        text = "value;count;percent\n" + "".join(f"{r.value};{r.count};{r.percent}\n" for r in rows)
        _write(out / f"profile_{attr}.csv", text)
    print(f"{len(baskets)} baskets, {len(catalog)} items")


def _mine(cfg, baskets):
    params = _mining_params(cfg)
    index = build_index(baskets)
    if cfg.oracle:
        try:
            table = brute_force_frequent(baskets, params)
        except ValueError as exc:
            raise DataError(str(exc)) from None
    else:
        table = apriori(index, params, threads=cfg.threads)
    return index, table


def cmd_mine(cfg):
    _, baskets = _load(cfg)
    out = _out(cfg)
    _, table = _mine(cfg, baskets)
    _write(out / "itemsets.csv", table.to_csv())
    print(f"{len(table)} frequent itemsets (min count {table.min_count})")


def cmd_rules(cfg):
    rule_params = _rule_params(cfg)
    _, baskets = _load(cfg)
    out = _out(cfg)
    index, table = _mine(cfg, baskets)
    rules = generate_rules(table, index, rule_params)
    _write(out / "rules.csv", rules_to_csv(rules))
    for measure in MEASURES:
        _write(out / f"rules_top_{measure}.csv", rules_to_csv(rank_rules(rules, measure, cfg.top_k)))
    print(f"{len(rules)} rules")


def _read_text(path, what):
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise UsageError(f"cannot read {what} {path}: {exc.strerror}") from None


def cmd_validate(cfg):
    rule_params = _rule_params(cfg)
    try:
        split = SplitSpec(cfg.holdout, cfg.seed or 0)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    known = overrides = ()
    try:
        if cfg.known:
            known = parse_patterns(_read_text(cfg.known, "known associations"))
        if cfg.annotations:
            overrides = parse_annotations(_read_text(cfg.annotations, "annotations"))
    except PatternFormatError as exc:
        raise DataError(str(exc)) from None
    _, baskets = _load(cfg)
    out = _out(cfg)
    try:
        train, holdout = split_baskets(baskets, split)
    except DegenerateSplitError as exc:
        raise DataError(f"empty holdout or train side: {exc}") from None
    index, table = _mine(cfg, train)
    rules = generate_rules(table, index, rule_params)
    report = validate_rules(rules, holdout, cfg.delta)
    _write(out / "validation.csv", report.to_csv())
    labelled = triage(rules, known, TriageThresholds(cfg.epsilon, cfg.floor_instances), overrides)
    _write(out / "triage.csv", triage_to_csv(labelled))
    s = report.summary()
    print(f"train {len(train)} / holdout {len(holdout)} baskets; "
          f"{s['stable']} stable, {s['unstable']} unstable, {s['unsupported']} unsupported")


def cmd_graph(cfg):
    if cfg.weight_metric not in WEIGHT_METRICS:
        raise UsageError(f"--weight-metric must be one of {WEIGHT_METRICS}")
    records, baskets = _load(cfg)
    out = _out(cfg)
    try:
        graph = build_multiweb(build_index(baskets), cfg.min_pair_count, cfg.weight_metric,
                               names=build_catalog(records))
        graph = classify_edges(graph, cfg.t_weak, cfg.t_strong)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    _write(out / "multiweb.dot", export_dot(graph))
    _write(out / "multiweb_edges.csv", edges_to_csv(graph))
    print(f"{len(graph.nodes)} nodes, {len(graph.edges)} edges")


def cmd_synth(cfg):
    if not cfg.spec:
        raise UsageError("synth needs --spec FILE (JSON)")
    try:
        data = json.loads(_read_text(cfg.spec, "spec"))
        if cfg.seed is not None:
            data["seed"] = cfg.seed
        spec = SynthSpec.from_dict(data)
    except (ValueError, TypeError) as exc:
        raise UsageError(f"bad synth spec: {exc}") from None
    out = _out(cfg)
    records, truth = write_corpus(spec, out / "corpus.csv", out / "ground_truth.csv")
    print(f"wrote {out / 'corpus.csv'} ({spec.n_baskets} baskets, {len(records)} lines)")
    print(f"wrote {out / 'ground_truth.csv'} ({len(truth)} planted rules)")


HELP = {
    "profile": "item frequency table and categorical profiles",
    "mine": "frequent itemsets (Apriori, or brute force with --oracle)",
    "rules": "association rules, ranked per measure",
    "validate": "holdout validation and rule triage",
    "graph": "co-occurrence graph as DOT plus edge CSV",
    "synth": "synthetic corpus with planted rules",
}

COMMANDS = {
    "profile": cmd_profile,
    "mine": cmd_mine,
    "rules": cmd_rules,
    "validate": cmd_validate,
    "graph": cmd_graph,
    "synth": cmd_synth,
}


def build_parser():
    shared = argparse.ArgumentParser(add_help=False)
    shared.add_argument("--config", help="key = value settings file (flags override it)")
    shared.add_argument("--input", action="append", help="POS CSV file (repeatable)")
    shared.add_argument("--out-dir", dest="out_dir")
    shared.add_argument("--min-support", dest="min_support",
                        help="absolute count (e.g. 50) or fraction (e.g. 0.005)")
    shared.add_argument("--max-len", dest="max_len", type=int)
    shared.add_argument("--min-confidence", dest="min_confidence", type=float)
    shared.add_argument("--support-mode", dest="support_mode", choices=SUPPORT_MODES)
    shared.add_argument("--virtual", help="comma list of gender,dow,age")
    shared.add_argument("--holdout", type=float, help="holdout fraction")
    shared.add_argument("--seed", type=int)
    shared.add_argument("--threads", type=int)
    shared.add_argument("--oracle", action="store_true", help="mine by brute-force enumeration")
    shared.add_argument("--top-k", dest="top_k", type=int)
    shared.add_argument("--max-rules", dest="max_rules", type=int,
                        help="keep only the best N rules by J-measure")
    shared.add_argument("--delta", type=float, help="max confidence drop for a stable rule")
    shared.add_argument("--epsilon", type=float, help="lift band around 1 labelled trivial")
    shared.add_argument("--floor-instances", dest="floor_instances", type=int)
    shared.add_argument("--known", help="known-association pattern file")
    shared.add_argument("--annotations", help="analyst label overrides")
    shared.add_argument("--min-pair-count", dest="min_pair_count", type=int)
    shared.add_argument("--weight-metric", dest="weight_metric", choices=WEIGHT_METRICS)
    shared.add_argument("--t-weak", dest="t_weak", type=float)
    shared.add_argument("--t-strong", dest="t_strong", type=float)
    shared.add_argument("--spec", help="synth spec (JSON)")
    shared.add_argument("-v", "--verbose", action="store_true")

    parser = _Parser(prog="basketmine", description="Market basket mining toolkit.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    for name in COMMANDS:
        sub.add_parser(name, parents=[shared], help=HELP[name])
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        cfg = resolve(args)
        if cfg.threads < 1:
            raise UsageError("--threads must be >= 1")
        COMMANDS[args.command](cfg)
    except UsageError as exc:
        print(f"basketmine {args.command}: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except DataError as exc:
        print(f"basketmine {args.command}: {exc}", file=sys.stderr)
        return EXIT_DATA
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
