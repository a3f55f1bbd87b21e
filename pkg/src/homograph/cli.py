"""Command-line interface: ``homograph <subcommand> ...``.

Settings resolve as built-in defaults, then the ``--config`` JSON file, then
explicit flags.  The digest of the resolved settings is printed on stderr and
embedded, together with the tool version, in every file written.
Exit codes: 0 success, 1 usage or configuration error, 2 data or model error.
"""
import argparse
import hashlib
import json
import logging
import sys
from dataclasses import asdict, dataclass, field

from . import __version__, evaluation, learners
from .datagen import (LabeledSample, Label, Origin, decode_domain, generate_corpus,
                      load_brands, load_confusables, load_corpus, prune_indistinguishable,
                      save_corpus)
from .errors import ConfigError, DataError, HomographError, SchemaMismatch
from .features import FeatureMode, FeatureSchema, featurize_matrix, make_schema, \
    write_feature_csv
from .glyphs import RenderConfig, bundled_font, get_renderer
from .similarity import SsimParams, domain_ssim

log = logging.getLogger("homograph")

MODES = ("ssim", "unigram", "combined")


@dataclass
class RunConfig:
    fonts: list | None = None          # None = bundled DejaVu Sans
    bitmap_side: int = 64
    bits_per_pixel: int = 8
    padding_fraction: float = 0.125
    k1: float = 0.01
    k2: float = 0.03
    # corpus generation
    brands: str | None = None
    confusables: str | None = None
    per_brand: int = 20
    neg_ratio: float = 2.0
    max_substitutions: int = 4
    length_change_fraction: float = 0.25
    prune: bool = True
    # learning and evaluation
    mode: str = "combined"
    modes: list = field(default_factory=lambda: list(MODES))
    algorithm: str = "bagging"
    approach_algorithms: dict = field(default_factory=dict)
    n_estimators: int = 100
    k_neighbors: int = 5
    max_depth: int | None = None
    learning_rate: float = 0.1
    learner_seed: int = 0
    k: int = 5
    seed: int = 0
    format: str = "table"

    @classmethod
    def resolve(cls, overrides, config_path=None):
        values = asdict(cls())
        known = set(values)
        if config_path:
            try:
                with open(config_path, encoding="utf-8") as fh:
                    loaded = json.load(fh)
            except OSError as exc:
                raise ConfigError(f"{config_path}: {exc.strerror}") from None
            except json.JSONDecodeError as exc:
                raise ConfigError(f"{config_path}: line {exc.lineno}: {exc.msg}") from None
            if not isinstance(loaded, dict):
                raise ConfigError(f"{config_path}: expected a JSON object")
            unknown = sorted(set(loaded) - known)
            if unknown:
                raise ConfigError(f"{config_path}: unknown setting(s) {', '.join(unknown)}")
            values.update(loaded)
        values.update({k: v for k, v in overrides.items() if k in known})
        cfg = cls(**values)
        cfg.check()
        return cfg

    def check(self):
        for m in [self.mode, *self.modes, *self.approach_algorithms]:
            if m not in MODES:
                raise ConfigError(f"unknown feature mode {m!r}")
        if self.format not in ("json", "table"):
            raise ConfigError(f"unknown format {self.format!r}")
        for a in [self.algorithm, *self.approach_algorithms.values()]:
            learners.Algorithm.parse(a)
        self.render_config()
        self.ssim_params()
        self.learner_spec()

    def digest(self):
        blob = json.dumps(asdict(self), sort_keys=True).encode()
        return hashlib.sha256(blob).hexdigest()[:16]

    def provenance(self):
        return {"tool": "homograph", "tool_version": __version__,
                "config_digest": self.digest()}

    def render_config(self):
        fonts = tuple(self.fonts) if self.fonts else (bundled_font(),)
        return RenderConfig(bitmap_side=self.bitmap_side, bits_per_pixel=self.bits_per_pixel,
                            font_sources=fonts, padding_fraction=self.padding_fraction)

    def ssim_params(self):
        return SsimParams.for_bits(self.bits_per_pixel, self.k1, self.k2)

    def learner_spec(self, algorithm=None):
        return learners.LearnerSpec(algorithm or self.algorithm, self.n_estimators,
                                    self.k_neighbors, self.max_depth, self.learning_rate,
                                    self.learner_seed)


class _Parser(argparse.ArgumentParser):
    """ArgumentParser whose usage errors exit with status 1."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _csv_list(text):
    return [t.strip() for t in text.split(",") if t.strip()]


def _mode_algo(text):
    mode, sep, algo = text.partition("=")
    if not sep:
        raise argparse.ArgumentTypeError("expected MODE=ALGORITHM")
    return mode.strip(), algo.strip()


def build_parser():
    common = _Parser(add_help=False, argument_default=argparse.SUPPRESS)
    g = common.add_argument_group("rendering and output")
    g.add_argument("--config", help="JSON file of settings (flags override it)")
    g.add_argument("--font", dest="fonts", action="append", metavar="PATH",
                   help="font file; repeat to build an ordered fallback stack")
    g.add_argument("--bitmap-side", dest="bitmap_side", type=int)
    g.add_argument("--bits-per-pixel", dest="bits_per_pixel", type=int, choices=(8, 16))
    g.add_argument("--padding", dest="padding_fraction", type=float)
    g.add_argument("--format", choices=("json", "table"))

    learner = _Parser(add_help=False, argument_default=argparse.SUPPRESS)
    g = learner.add_argument_group("learner")
    g.add_argument("--algo", dest="algorithm", help="e.g. bagging, random_forest, knn")
    g.add_argument("--n-estimators", dest="n_estimators", type=int)
    g.add_argument("--k-neighbors", dest="k_neighbors", type=int)
    g.add_argument("--max-depth", dest="max_depth", type=int)
    g.add_argument("--learning-rate", dest="learning_rate", type=float)
    g.add_argument("--learner-seed", dest="learner_seed", type=int)

    parser = _Parser(prog="homograph", description="Visual homograph detection toolkit.")
    parser.add_argument("--version", action="version", version=f"homograph {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def add(name, help_, parents=(common,)):
        return sub.add_parser(name, help=help_, parents=list(parents),
                              argument_default=argparse.SUPPRESS)

    p = add("generate", "generate a labeled corpus (JSONL)")
    p.add_argument("--brands", help="brand list, one domain per line (default: bundled)")
    p.add_argument("--confusables", help="confusables table (default: bundled)")
    p.add_argument("--per-brand", dest="per_brand", type=int)
    p.add_argument("--neg-ratio", dest="neg_ratio", type=float)
    p.add_argument("--max-substitutions", dest="max_substitutions", type=int)
    p.add_argument("--length-change-fraction", dest="length_change_fraction", type=float)
    p.add_argument("--no-prune", dest="prune", action="store_false",
                   help="keep confusable pairs that render identically")
    p.add_argument("--seed", type=int)
    p.add_argument("--out", required=True)

    p = add("featurize", "write the feature matrix of a corpus as CSV")
    p.add_argument("--corpus", required=True)
    p.add_argument("--mode", choices=MODES)
    p.add_argument("--out", help="output CSV (default: stdout)")

    p = add("train", "fit a learner on a whole corpus", (common, learner))
    p.add_argument("--corpus", required=True)
    p.add_argument("--mode", choices=MODES)
    p.add_argument("--out", required=True, help="model file (.npz)")

    p = add("predict", "classify candidate/brand pairs with a saved model")
    p.add_argument("--model", required=True)
    p.add_argument("--mode", choices=MODES, help="expected feature mode of the model")
    p.add_argument("--pair", nargs=2, action="append", metavar=("CANDIDATE", "BRAND"))
    p.add_argument("--corpus", help="JSONL corpus whose pairs are classified")

    p = add("evaluate", "k-fold cross-validation of one or more feature modes",
            (common, learner))
    p.add_argument("--corpus", required=True)
    p.add_argument("--modes", type=_csv_list, help="comma list of ssim,unigram,combined")
    p.add_argument("-k", dest="k", type=int, help="number of folds")
    p.add_argument("--seed", type=int, help="fold shuffling seed")
    p.add_argument("--out", help="also write the JSON report here")

    p = add("analyze", "SSIM-binned error analysis of the three approaches",
            (common, learner))
    p.add_argument("--corpus", required=True)
    p.add_argument("--approach-algo", dest="approach_algorithms", type=_mode_algo,
                   action="append", metavar="MODE=ALGO",
                   help="learner override for one approach (repeatable)")
    p.add_argument("-k", dest="k", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--out", help="also write the JSON report here")
    p.add_argument("--figure-csv", dest="figure_csv",
                   help="per-bin accuracy CSV (equal-count bins)")

    p = add("ssim", "per-character and mean SSIM of two domains")
    p.add_argument("candidate")
    p.add_argument("brand")
    return parser


# ------------------------------------------------------------ subcommands

def _renderer(cfg):
    return get_renderer(cfg.render_config())


def _load_corpus(path):
    samples = load_corpus(path)
    if not samples:
        raise DataError(f"{path}: corpus is empty")
    return samples


def _write_json(path, obj):
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(evaluation.to_json(obj) + "\n")


def cmd_generate(cfg, args):
    renderer = _renderer(cfg)
    table = load_confusables(cfg.confusables)
    if cfg.prune:
        table = prune_indistinguishable(table, renderer, cfg.ssim_params())
    brands = load_brands(cfg.brands)
    samples = generate_corpus(brands, table, cfg.per_brand, cfg.neg_ratio, cfg.seed,
                              cfg.max_substitutions, cfg.length_change_fraction)
    save_corpus(samples, args.out, meta=cfg.provenance())
    n_pos = sum(1 for s in samples if s.label == Label.HOMOGRAPH)
    print(f"wrote {len(samples)} samples ({n_pos} homographs, "
          f"{len(samples) - n_pos} non-homographs) to {args.out}")


def cmd_featurize(cfg, args):
    samples = _load_corpus(args.corpus)
    renderer = _renderer(cfg)
    schema = make_schema(cfg.mode, samples, renderer, cfg.ssim_params())
    X = featurize_matrix(samples, schema, renderer)
    header = (f"# homograph {__version__} config {cfg.digest()} "
              f"schema {schema.digest()}\n")
    if args.__dict__.get("out"):
        with open(args.out, "w", encoding="utf-8", newline="") as fh:
            fh.write(header)
            write_feature_csv(fh, samples, schema, X)
        print(f"wrote {X.shape[0]} x {X.shape[1]} features to {args.out}", file=sys.stderr)
    else:
        sys.stdout.write(header)
        write_feature_csv(sys.stdout, samples, schema, X)


def cmd_train(cfg, args):
    samples = _load_corpus(args.corpus)
    renderer = _renderer(cfg)
    schema = make_schema(cfg.mode, samples, renderer, cfg.ssim_params())
    X = featurize_matrix(samples, schema, renderer)
    y = evaluation.labels_of(samples)
    model = learners.fit(cfg.learner_spec(), X, y, schema)
    model.info["provenance"] = cfg.provenance()
    learners.save_model(model, args.out)
    print(f"trained {model.spec.algorithm.value} on {X.shape[0]} samples, "
          f"{X.shape[1]} features ({schema.mode.value}); schema {schema.digest()}; "
          f"saved to {args.out}")


def cmd_predict(cfg, args, explicit):
    model = learners.load_model(args.model)
    if model.schema is None:
        raise SchemaMismatch(f"{args.model}: model carries no feature schema")
    schema = FeatureSchema.from_dict(model.schema)
    if schema.digest() != model.schema_digest:
        raise SchemaMismatch(f"{args.model}: embedded schema does not match its digest")
    if "mode" in explicit and FeatureMode.parse(cfg.mode) is not schema.mode:
        raise SchemaMismatch(f"{args.model}: model was trained on {schema.mode.value} "
                             f"features, {cfg.mode} requested")
    pairs = [tuple(p) for p in args.__dict__.get("pair") or []]
    if args.__dict__.get("corpus"):
        pairs += [(s.candidate, s.brand) for s in load_corpus(args.corpus)]
    if not pairs:
        raise ConfigError("nothing to classify: give --pair or --corpus")
    samples = []
    for cand, brand in pairs:
        cand, brand = decode_domain(cand), decode_domain(brand)
        if cand == brand:
            raise DataError(f"{cand}: candidate equals its brand")
        samples.append(LabeledSample(cand, brand, Label.NON_HOMOGRAPH, Origin.EXTERNAL))
    renderer = _renderer(cfg) if schema.mode.uses_ssim else None
    X = featurize_matrix(samples, schema, renderer)
    scores = learners.predict_score(model, X)
    prov = cfg.provenance()
    for s, score in zip(samples, scores):
        label = Label.HOMOGRAPH if score > 0.5 else Label.NON_HOMOGRAPH
        print(json.dumps({"candidate": s.candidate, "brand": s.brand, "label": label.text,
                          "score": float(score), **prov}, ensure_ascii=False,
                         sort_keys=True))


def cmd_evaluate(cfg, args):
    samples = _load_corpus(args.corpus)
    renderer = _renderer(cfg)
    params = cfg.ssim_params()
    results = evaluation.compare_approaches(samples, cfg.learner_spec(), cfg.k, cfg.seed,
                                            renderer, params, modes=cfg.modes)
    report = {**cfg.provenance(), "config": asdict(cfg), "n_samples": len(samples),
              "results": [r.to_dict() for r in results.values()]}
    if args.__dict__.get("out"):
        _write_json(args.out, report)
    if cfg.format == "json":
        print(evaluation.to_json(report))
    else:
        print(f"{len(samples)} samples, {cfg.k}-fold CV, seed {cfg.seed}")
        print(evaluation.format_metrics_table(results.values()))


def cmd_analyze(cfg, args):
    samples = _load_corpus(args.corpus)
    renderer = _renderer(cfg)
    specs = {FeatureMode.parse(m): cfg.learner_spec(cfg.approach_algorithms.get(m))
             for m in MODES}
    rep = evaluation.analyze(samples, specs, cfg.k, cfg.seed, renderer, cfg.ssim_params())
    report = {**cfg.provenance(), "config": asdict(cfg), "n_samples": len(samples),
              **rep.to_dict()}
    if args.__dict__.get("out"):
        _write_json(args.out, report)
    if args.__dict__.get("figure_csv"):
        with open(args.figure_csv, "w", encoding="utf-8") as fh:
            fh.write(f"# homograph {__version__} config {cfg.digest()}\n")
            fh.write(evaluation.figure_csv(rep.equal_count))
    if cfg.format == "json":
        print(evaluation.to_json(report))
        return
    print(evaluation.format_metrics_table(rep.cv.values()))
    print()
    print(evaluation.format_bin_table(rep.equal_range))
    print()
    print(evaluation.format_bin_table(rep.equal_count))
    print()
    print(evaluation.format_group_table(rep.groups))


def cmd_ssim(cfg, args):
    cand, brand = decode_domain(args.candidate), decode_domain(args.brand)
    sim = domain_ssim(cand, brand, _renderer(cfg), cfg.ssim_params())
    out = {**sim.to_dict(), **cfg.provenance()}
    if cfg.format == "table" and "format" in vars(args):
        print(f"{cand} vs {brand}: mean SSIM {sim.mean_ssim:.6f}")
        for i, (a, b, v) in enumerate(zip(cand, brand, sim.per_char_ssim)):
            print(f"{i:>3}  {a} {b}  {v:.6f}")
    else:
        print(json.dumps(out, ensure_ascii=False, sort_keys=True))


COMMANDS = {"generate": cmd_generate, "featurize": cmd_featurize, "train": cmd_train,
            "predict": cmd_predict, "evaluate": cmd_evaluate, "analyze": cmd_analyze,
            "ssim": cmd_ssim}


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s: %(message)s")
    explicit = {k for k in vars(args) if k not in ("command", "verbose", "config")}
    overrides = {k: v for k, v in vars(args).items() if k in explicit}
    if "approach_algorithms" in overrides:
        overrides["approach_algorithms"] = dict(overrides["approach_algorithms"])
    try:
        cfg = RunConfig.resolve(overrides, vars(args).get("config"))
        print(f"config digest: {cfg.digest()}", file=sys.stderr)
        if args.command == "predict":
            cmd_predict(cfg, args, explicit)
        else:
            COMMANDS[args.command](cfg, args)
    except ConfigError as exc:
        print(f"homograph {args.command}: error: {exc}", file=sys.stderr)
        return 1
    except DataError as exc:
        print(f"homograph {args.command}: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2
    except HomographError as exc:
        print(f"homograph {args.command}: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        where = f"{exc.filename}: " if exc.filename else ""
        print(f"homograph {args.command}: {where}{exc.strerror or exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
