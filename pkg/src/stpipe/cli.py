"""``stpipe`` command line.

Every subcommand accepts ``--config FILE`` (flat ``key = value``; flags
win) and ``--out FILE`` (written atomically; stdout when omitted). Exit
status: 0 ok, 1 validation/input error, 2 usage error.
"""

import argparse
import json
import os
import sys

from . import __version__, audio, augment, corpusops, fusion, metrics, segmenter, textnorm
from .config import PipelineConfig, atomic_write, derive_seed
from .errors import StpipeError


class Resolver:
    """Flag value if given, else config ``stage.key``/``key``, else default."""

    def __init__(self, args, stage):
        self.args = args
        self.stage = stage
        self.cfg = PipelineConfig.load(getattr(args, "config", None))

    def get(self, name, default=None, kind=str):
        value = getattr(self.args, name, None)
        if value is not None:
            return value
        raw = self.cfg.lookup(self.stage, name)
        if raw is None:
            return default
        try:
            if kind is bool:
                return raw.lower() in ("1", "true", "yes", "on")
            return kind(raw)
        except ValueError:
            raise StpipeError(f"config {self.stage}.{name}: cannot parse {raw!r}") from None

    def require(self, name, kind=str):
        value = self.get(name, kind=kind)
        if value is None:
            raise StpipeError(f"{self.stage}: missing required setting --{name.replace('_', '-')}")
        return value

    def seed(self):
        return derive_seed(self.get("seed", 0, int), self.stage)


def _read_text(path):
    if path in (None, "-"):
        return sys.stdin.read()
    with open(path, encoding="utf-8") as fh:
        return fh.read()


def _read_lines(path):
    return _read_text(path).splitlines()


def _read_bytes(path):
    with open(path, "rb") as fh:
        return fh.read()


def _emit(args, data, binary=False):
    out = getattr(args, "out", None)
    if out and out != "-":
        atomic_write(out, data, binary=binary)
    elif binary:
        sys.stdout.buffer.write(data)
    else:
        sys.stdout.write(data)


# ---------------------------------------------------------------------------
# audio
# ---------------------------------------------------------------------------

def cmd_wav_info(args, r):
    sig = audio.parse_wav(_read_bytes(args.input))
    rms = audio.signal_power(sig.samples) ** 0.5
    _emit(args, f"sample_rate = {sig.sample_rate}\nsamples = {len(sig)}\n"
                f"duration_s = {sig.duration:.3f}\nrms = {rms:.6f}\n")


def cmd_perturb(args, r):
    sig = audio.parse_wav(_read_bytes(args.input))
    speed = r.get("speed", 1.0, float)
    sig = audio.speed_perturb(sig, speed)
    snr = r.get("snr_db", None, float)
    if snr is not None:
        sig = audio.add_noise(sig, snr, r.seed())
    _emit(args, audio.write_wav(sig), binary=True)


def cmd_vad(args, r):
    sig = audio.parse_wav(_read_bytes(args.input))
    frags = audio.energy_vad(sig, r.get("frame_ms", 25.0, float), r.get("threshold", 1e-4, float),
                             r.get("min_gap_frames", 1, int))
    _emit(args, audio.format_fragments(frags))


def cmd_splice(args, r):
    frags = audio.parse_fragments(_read_lines(args.input))
    groups = audio.splice_min_duration(frags, r.get("min_s", 10.0, float))
    _emit(args, "\n".join(audio.format_fragments(g) for g in groups))
    wav = r.get("wav")
    if wav:
        out_dir = r.require("out_dir")
        sig = audio.parse_wav(_read_bytes(wav))
        os.makedirs(out_dir, exist_ok=True)
        for i, g in enumerate(groups):
            atomic_write(os.path.join(out_dir, f"group{i:04d}.wav"),
                         audio.write_wav(audio.splice_audio(sig, g)), binary=True)


# ---------------------------------------------------------------------------
# text
# ---------------------------------------------------------------------------

def cmd_normalize(args, r):
    lines = _read_lines(args.input)
    _emit(args, "".join(" ".join(textnorm.normalize_written_to_spoken(x)) + "\n" for x in lines))


def cmd_num2words(args, r):
    _emit(args, "".join(textnorm.number_to_words(n) + "\n" for n in args.numerals))


def _corruption(r):
    table_path = r.get("homophones")
    table = augment.HomophoneTable.from_lines(_read_lines(table_path)) if table_path else augment.HomophoneTable()
    vocab_path = r.get("vocab")
    vocab = [t for line in _read_lines(vocab_path) for t in line.split()] if vocab_path else []
    config = augment.CorruptionConfig(
        homophone_rate=r.get("homophone_rate", 0.0, float),
        sub_rate=r.get("sub_rate", 0.0, float),
        del_rate=r.get("del_rate", 0.0, float),
        ins_rate=r.get("ins_rate", 0.0, float),
        vocab=vocab,
        seed=r.seed(),
    )
    return table, config


def cmd_corrupt(args, r):
    table, config = _corruption(r)
    out = []
    for i, line in enumerate(_read_lines(args.input)):
        tokens = line.split()
        if not textnorm.is_spoken_form(tokens):
            raise StpipeError(f"line {i + 1} is not spoken form; run 'normalize' first")
        out.append(" ".join(augment.corrupt(tokens, table, config, augment.pair_rng(config.seed, i))) + "\n")
    _emit(args, "".join(out))


def cmd_augment(args, r):
    table, config = _corruption(r)
    pairs = corpusops.read_bitext(_read_lines(args.input))
    result = augment.augment_bitext(pairs, table, config, workers=r.get("workers", 1, int))
    _emit(args, corpusops.write_bitext(result))


# ---------------------------------------------------------------------------
# segmenter
# ---------------------------------------------------------------------------

def cmd_seg_train(args, r):
    paragraphs = [x for x in _read_lines(args.input) if x.strip()]
    examples = segmenter.extract_training_examples(paragraphs, r.get("window", 2, int))
    model = segmenter.train_boundary_model(examples, r.get("epochs", 10, int),
                                           r.get("lr", 0.5, float), r.seed())
    _emit(args, model.to_lines())


def cmd_seg_apply(args, r):
    with open(r.require("model"), encoding="utf-8") as fh:
        model = segmenter.BoundaryModel.from_lines(fh)
    tokens = _read_text(args.input).split()
    segs = segmenter.segment(tokens, model, r.get("min_len", 1, int), r.get("max_len", 50, int))
    _emit(args, "".join(" ".join(s) + "\n" for s in segs))


# ---------------------------------------------------------------------------
# corpus
# ---------------------------------------------------------------------------

def _load_lexicon(path):
    if not path:
        return None
    with open(path, encoding="utf-8") as fh:
        return corpusops.LexiconModel.from_lines(fh)


def cmd_filter(args, r):
    scores = r.get("scores")
    if scores:
        items = []
        for lineno, line in enumerate(_read_lines(scores), 1):
            if not line.strip():
                continue
            parts = line.split("\t")
            if len(parts) != 2:
                raise StpipeError(f"score line {lineno}: expected id<TAB>score")
            try:
                items.append((parts[0], float(parts[1])))
            except ValueError:
                raise StpipeError(f"score line {lineno}: {parts[1]!r} is not a number") from None
        kept = corpusops.filter_outlier_scores(items, r.get("z", 3.0, float))
        _emit(args, "".join(k + "\n" for k in kept))
        return
    pairs = corpusops.read_bitext(_read_lines(args.input))
    pairs = corpusops.filter_length(pairs, r.get("max_words", 100, int))
    if not r.get("keep_duplicates", False, bool):
        pairs = corpusops.dedup(pairs)
    lex = _load_lexicon(r.get("lexicon"))
    if lex is not None:
        pairs = corpusops.filter_similarity(pairs, lex, r.get("threshold", 0.0, float),
                                            _load_lexicon(r.get("reverse_lexicon")))
    _emit(args, corpusops.write_bitext(pairs))


def cmd_lexicon_train(args, r):
    pairs = corpusops.read_bitext(_read_lines(args.input))
    model = corpusops.train_lexicon(pairs, r.get("iterations", 5, int), reverse=r.get("reverse", False, bool))
    _emit(args, model.to_lines())


def cmd_similarity(args, r):
    lex = _load_lexicon(r.require("lexicon"))
    rev = _load_lexicon(r.get("reverse_lexicon"))
    pairs = corpusops.read_bitext(_read_lines(args.input))
    _emit(args, "".join(f"{corpusops.similarity(p, lex, rev):.6f}\n" for p in pairs))


# ---------------------------------------------------------------------------
# evaluation
# ---------------------------------------------------------------------------

def _references(r):
    path = r.require("ref")
    lines = _read_lines(path)
    if r.get("ref_format", "lines") == "ctm":
        return list(metrics.parse_ctm(lines).values())
    return [x.split() for x in lines]


def cmd_score(args, r):
    refs = _references(r)
    hyp = _read_text(r.require("hyp")).split()
    report = metrics.score_speech_translation(hyp, refs, case_sensitive=not r.get("ignore_case", False, bool))
    if r.get("json", False, bool):
        _emit(args, json.dumps(report.to_dict(), sort_keys=False) + "\n")
    else:
        _emit(args, report.to_text())


def cmd_resegment(args, r):
    refs = _references(r)
    hyp = _read_text(r.require("hyp")).split()
    segs, _ = metrics.mwer_resegment(hyp, refs)
    _emit(args, "".join(" ".join(s) + "\n" for s in segs))


# ---------------------------------------------------------------------------
# fusion
# ---------------------------------------------------------------------------

def cmd_nbest_merge(args, r):
    groups = [fusion.parse_nbest(_read_lines(p)) for p in args.inputs]
    merged = fusion.merge_all(groups, r.get("policy", fusion.IMPUTE_WORST))
    _emit(args, fusion.format_nbest(merged))


def _weights(r):
    with open(r.require("weights"), encoding="utf-8") as fh:
        return fusion.WeightVector.from_lines(fh)


def cmd_rescore(args, r):
    lists = fusion.parse_nbest(_read_lines(args.input))
    w = _weights(r)
    if r.get("top1", False, bool):
        _emit(args, "".join(" ".join(fusion.top1(nb, w)) + "\n" for nb in lists))
    else:
        _emit(args, fusion.format_nbest(fusion.rescore(nb, w) for nb in lists))


def _parse_floats(text, what):
    try:
        return [float(v) for v in text.replace(",", " ").split()]
    except ValueError:
        raise StpipeError(f"{what}: {text!r} is not a list of numbers") from None


def cmd_tune(args, r):
    lists = fusion.parse_nbest(_read_lines(args.input))
    refs = [x.split() for x in _read_lines(r.require("ref"))]
    grid = {}
    for model, values in r.cfg.section("tune.grid").items():
        grid[model] = _parse_floats(values, f"grid {model}")
    for entry in args.grid or []:
        model, eq, values = entry.partition("=")
        if not eq:
            raise StpipeError(f"--grid {entry!r}: expected model=v1,v2,...")
        grid[model.strip()] = _parse_floats(values, f"grid {model}")
    alphas = _parse_floats(r.get("alphas", "0"), "alphas")
    w = fusion.tune_weights_grid(lists, refs, grid, alphas, workers=r.get("workers", 1, int))
    _emit(args, w.to_lines())


# ---------------------------------------------------------------------------

COMMANDS = {}


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="flat key = value config file")
    common.add_argument("--out", help="output file (default stdout)")
    common.add_argument("--seed", type=int)
    common.add_argument("--version", action="version", version=f"stpipe {__version__}")

    parser = argparse.ArgumentParser(prog="stpipe", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"stpipe {__version__}")
    sub = parser.add_subparsers(dest="command", metavar="COMMAND")
    sub.required = True

    def add(name, func, helptext):
        p = sub.add_parser(name, parents=[common], help=helptext, description=helptext)
        p.set_defaults(func=func, stage=name)
        return p

    p = add("wav-info", cmd_wav_info, "print WAV header facts")
    p.add_argument("input")
    p = add("perturb", cmd_perturb, "speed and/or noise perturbation of a WAV")
    p.add_argument("input")
    p.add_argument("--speed", type=float)
    p.add_argument("--snr-db", dest="snr_db", type=float)
    p = add("vad", cmd_vad, "energy VAD; prints start<TAB>end per fragment")
    p.add_argument("input")
    p.add_argument("--frame-ms", dest="frame_ms", type=float)
    p.add_argument("--threshold", type=float)
    p.add_argument("--min-gap-frames", dest="min_gap_frames", type=int)
    p = add("splice", cmd_splice, "group fragments to a minimum duration; groups separated by blank lines")
    p.add_argument("input", nargs="?")
    p.add_argument("--min-s", dest="min_s", type=float)
    p.add_argument("--wav", help="also write spliced audio from this WAV")
    p.add_argument("--out-dir", dest="out_dir")

    p = add("normalize", cmd_normalize, "written text to spoken form, one sentence per line")
    p.add_argument("input", nargs="?")
    p = add("num2words", cmd_num2words, "spell out numerals")
    p.add_argument("numerals", nargs="+")
    for name, func, helptext in (("corrupt", cmd_corrupt, "simulate ASR errors on spoken-form lines"),
                                 ("augment", cmd_augment, "normalize + corrupt bitext sources")):
        p = add(name, func, helptext)
        p.add_argument("input", nargs="?")
        p.add_argument("--homophones")
        p.add_argument("--vocab")
        p.add_argument("--homophone-rate", dest="homophone_rate", type=float)
        p.add_argument("--sub-rate", dest="sub_rate", type=float)
        p.add_argument("--del-rate", dest="del_rate", type=float)
        p.add_argument("--ins-rate", dest="ins_rate", type=float)
        if name == "augment":
            p.add_argument("--workers", type=int)

    p = add("seg-train", cmd_seg_train, "train the boundary model from punctuated paragraphs")
    p.add_argument("input", nargs="?")
    p.add_argument("--window", type=int)
    p.add_argument("--epochs", type=int)
    p.add_argument("--lr", type=float)
    p = add("seg-apply", cmd_seg_apply, "re-segment a token stream, one sentence per line")
    p.add_argument("input", nargs="?")
    p.add_argument("--model")
    p.add_argument("--min-len", dest="min_len", type=int)
    p.add_argument("--max-len", dest="max_len", type=int)

    p = add("filter", cmd_filter, "length/dedup/similarity bitext filter, or score-outlier filter")
    p.add_argument("input", nargs="?")
    p.add_argument("--max-words", dest="max_words", type=int)
    p.add_argument("--keep-duplicates", dest="keep_duplicates", action="store_const", const=True)
    p.add_argument("--lexicon")
    p.add_argument("--reverse-lexicon", dest="reverse_lexicon")
    p.add_argument("--threshold", type=float)
    p.add_argument("--scores", help="id<TAB>score list; switches to outlier mode")
    p.add_argument("--z", type=float)
    p = add("lexicon-train", cmd_lexicon_train, "EM word-translation lexicon from bitext")
    p.add_argument("input", nargs="?")
    p.add_argument("--iterations", type=int)
    p.add_argument("--reverse", action="store_const", const=True)
    p = add("similarity", cmd_similarity, "cross-lingual similarity per bitext line")
    p.add_argument("input", nargs="?")
    p.add_argument("--lexicon")
    p.add_argument("--reverse-lexicon", dest="reverse_lexicon")

    for name, func, helptext in (("score", cmd_score, "mWER-realigned BLEU report"),
                                 ("resegment", cmd_resegment, "realign a hypothesis stream to reference segments")):
        p = add(name, func, helptext)
        p.add_argument("--ref")
        p.add_argument("--hyp")
        p.add_argument("--ref-format", dest="ref_format", choices=["lines", "ctm"])
        if name == "score":
            p.add_argument("--ignore-case", dest="ignore_case", action="store_const", const=True)
            p.add_argument("--json", action="store_const", const=True)

    p = add("nbest-merge", cmd_nbest_merge, "merge n-best files sentence by sentence")
    p.add_argument("inputs", nargs="+")
    p.add_argument("--policy", choices=[fusion.IMPUTE_WORST, fusion.DROP])
    p = add("rescore", cmd_rescore, "rank n-best lists by weighted log-linear score")
    p.add_argument("input", nargs="?")
    p.add_argument("--weights")
    p.add_argument("--top1", action="store_const", const=True)
    p = add("tune", cmd_tune, "grid-search fusion weights for dev BLEU")
    p.add_argument("input", nargs="?")
    p.add_argument("--ref")
    p.add_argument("--grid", action="append", help="model=v1,v2,... (repeatable)")
    p.add_argument("--alphas")
    p.add_argument("--workers", type=int)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        args.func(args, Resolver(args, args.stage))
    except (StpipeError, OSError, UnicodeDecodeError) as exc:
        msg = str(exc).replace("\n", " ")
        print(f"stpipe {args.stage}: error: {msg}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
