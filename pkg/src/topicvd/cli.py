"""Command-line entry point wiring the pipeline stages together.

Each subcommand wraps one module; ``pipeline`` runs the full sequence from a
config file. Errors print one line to stderr and exit nonzero.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import replace
from pathlib import Path

from . import __version__, assembly, clips, context, corpus, fusion, metrics, scoring, srt
from .config import load_config, parse_config_text
from .errors import TopicVDError
from .pipeline import run_pipeline


def _load_rules(config_path: str | None) -> assembly.AssemblyRules:
    if not config_path:
        return assembly.AssemblyRules()
    values = parse_config_text(
        Path(config_path).read_text(encoding="utf-8"), config_path
    )
    marks = dict(assembly.DEFAULT_TERMINAL_MARKS)
    if "terminal_marks_source" in values:
        marks[srt.SOURCE] = values["terminal_marks_source"]
    if "terminal_marks_target" in values:
        marks[srt.TARGET] = values["terminal_marks_target"]
    return assembly.AssemblyRules(
        terminal_marks=marks,
        max_gap_ms=int(values.get("max_gap_ms", 5000)),
        max_cues=int(values.get("max_cues", 8)),
    )


def _read_track(path: str, strict: bool) -> srt.SubtitleTrack:
    with open(path, "rb") as handle:
        return srt.parse_srt(handle.read(), strict=strict, source_path=path)


def _cmd_parse(args) -> int:
    track = _read_track(args.file, args.strict)
    for warning in track.warnings:
        print(f"warning: {warning}", file=sys.stderr)
    for cue in track.cues:
        if args.json:
            record = {
                "index": cue.index,
                "start": str(cue.start),
                "end": str(cue.end),
                "language": srt.detect_language(cue.lines),
                "text": cue.text,
            }
            print(json.dumps(record, ensure_ascii=False))
        else:
            print(
                f"{cue.index}\t{cue.start}\t{cue.end}"
                f"\t{srt.detect_language(cue.lines)}\t{cue.text}"
            )
    return 0


def _clean_track(track: srt.SubtitleTrack) -> srt.SubtitleTrack:
    cues = tuple(c for c in (srt.strip_markup(cue) for cue in track.cues) if c.lines)
    return replace(track, cues=cues)


def _cmd_assemble(args) -> int:
    rules = _load_rules(args.config)
    source = _clean_track(_read_track(args.source, strict=False))
    target = _clean_track(_read_track(args.target, strict=False))
    documentary = args.documentary or Path(args.source).stem
    pairing = assembly.pair_bilingual(
        assembly.assemble_sentences(source, rules),
        assembly.assemble_sentences(target, rules),
        documentary=documentary,
        topic=args.topic,
    )
    assembly.write_pairs_jsonl(list(pairing.pairs), args.out)
    print(
        f"{len(pairing.pairs)} pairs, {len(pairing.unmatched_source)} unmatched source, "
        f"{len(pairing.unmatched_target)} unmatched target -> {args.out}"
    )
    return 0


def _cmd_score(args) -> int:
    pairs = assembly.read_pairs_jsonl(args.pairs)
    store = scoring.read_vector_file(args.vectors)
    for warning in store.warnings:
        print(f"warning: {warning}", file=sys.stderr)
    scored, missing = scoring.score_pairs(pairs, store)
    for record in missing:
        print(
            f"missing vector: {record.documentary}/{record.position}/{record.language}",
            file=sys.stderr,
        )
    if args.threshold is not None:
        kept, dropped = scoring.filter_by_score(
            [p for p in scored if p.score is not None], args.threshold
        )
        print(f"threshold {args.threshold}: kept {len(kept)}, dropped {len(dropped)}")
        scored = kept
    assembly.write_pairs_jsonl(scored, args.out)
    return 0


def _cmd_manifest(args) -> int:
    pairs = assembly.read_pairs_jsonl(args.pairs)
    records = clips.build_manifest(pairs)
    clips.write_manifest(records, args.out)
    if args.cut_plan:
        Path(args.cut_plan).write_text(clips.emit_cut_plan(records), encoding="utf-8")
    print(f"{len(records)} clip records -> {args.out}")
    return 0


def _cmd_split(args) -> int:
    manifest = corpus.CorpusManifest(tuple(clips.read_manifest(args.manifest)))
    split = corpus.build_split(manifest, seed=args.seed)
    for warning in split.warnings:
        print(f"warning: {warning}", file=sys.stderr)
    corpus.write_split(split, args.out)
    if args.table:
        print(corpus.render_split_table(corpus.split_table(manifest, split)), end="")
    return 0


def _cmd_scenario(args) -> int:
    manifest = corpus.CorpusManifest(tuple(clips.read_manifest(args.manifest)))
    split = corpus.read_split(args.split, seed=args.seed)
    extra = None
    if args.extra:
        extra = corpus.CorpusManifest(tuple(clips.read_manifest(args.extra)))
    spec = corpus.ScenarioSpec(kind=args.kind, test_topic=args.topic, seed=args.seed)
    records = corpus.build_scenario(manifest, split, spec, extra=extra)
    corpus.write_scenario(records, args.out)
    print(f"{len(records)} records -> {args.out}")
    return 0


def _cmd_stats(args) -> int:
    manifest = corpus.CorpusManifest(tuple(clips.read_manifest(args.manifest)))
    print(corpus.stats(manifest).render(), end="")
    return 0


def _cmd_context(args) -> int:
    records = clips.read_manifest(args.manifest)
    store = scoring.read_vector_file(args.vectors) if args.vectors else None
    result = context.retrieve_context(
        records,
        documentary=args.doc,
        position=args.position,
        k=args.k,
        language=args.language,
        store=store,
        before_only=args.before_only,
    )
    for match in result.matches:
        print(
            json.dumps(
                {
                    "documentary": result.documentary,
                    "query_position": result.position,
                    "position": match.position,
                    "similarity": round(match.similarity, 6),
                    "text": match.text,
                },
                ensure_ascii=False,
            )
        )
    return 0


def _cmd_fuse(args) -> int:
    text = fusion.read_matrix(args.text)
    video = fusion.read_matrix(args.video)
    out_dir = Path(args.out_dir or ".")
    out_dir.mkdir(parents=True, exist_ok=True)
    if args.op == "selattn":
        fusion.write_matrix(fusion.selective_attention(text, video), out_dir / "fused.txt")
        print(f"selective attention -> {out_dir / 'fused.txt'}")
    elif args.op == "biattn":
        out = fusion.bi_attention(text, video)
        fusion.write_matrix(out.text_enhanced, out_dir / "fused_text.txt")
        fusion.write_matrix(out.video_enhanced, out_dir / "fused_video.txt")
        print(f"bi-attention -> {out_dir / 'fused_text.txt'}, {out_dir / 'fused_video.txt'}")
    else:
        fusion.write_matrix(
            fusion.alignment_scores(text, video, g=args.g), out_dir / "alignment.txt"
        )
        print(f"alignment scores -> {out_dir / 'alignment.txt'}")
    return 0


def _cmd_bleu(args) -> int:
    hyp_lines = Path(args.hyp).read_text(encoding="utf-8").splitlines()
    ref_lines = Path(args.ref).read_text(encoding="utf-8").splitlines()
    hyps = [metrics.tokenize(line, lang=args.lang) for line in hyp_lines]
    refs = [metrics.tokenize(line, lang=args.lang) for line in ref_lines]
    report = metrics.bleu4(hyps, refs, smooth_eps=args.smooth_eps)
    precisions = " ".join(f"{p:.4f}" for p in report.precisions)
    print(
        f"BLEU = {report.percent:.2f} (precisions {precisions}, "
        f"bp {report.brevity_penalty:.4f}, hyp_len {report.hyp_len}, ref_len {report.ref_len})"
    )
    return 0


def _cmd_verify(args) -> int:
    pairs = assembly.read_pairs_jsonl(args.pairs)
    transcript = clips.read_transcript(args.transcript)
    results = clips.verify_transcript(pairs, transcript, threshold=args.threshold)
    flagged = 0
    for record in results:
        if record.flagged:
            flagged += 1
            distance = "-" if record.distance is None else f"{record.distance:.3f}"
            print(f"{record.documentary}\t{record.position}\t{distance}\t{record.reason}")
    print(f"{flagged}/{len(results)} pairs flagged")
    return 0 if flagged == 0 else 1


def _cmd_pipeline(args) -> int:
    config = load_config(args.config)
    out_dir = run_pipeline(config)
    print(f"pipeline complete -> {out_dir}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="topicvd", description=__doc__)
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("parse", help="parse an SRT file and list its cues")
    p.add_argument("file")
    p.add_argument("--strict", action="store_true")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=_cmd_parse)

    p = sub.add_parser("assemble", help="assemble sentences and pair two subtitle tracks")
    p.add_argument("source")
    p.add_argument("target")
    p.add_argument("--out", required=True)
    p.add_argument("--config")
    p.add_argument("--documentary", default="")
    p.add_argument("--topic", default="Nature")
    p.set_defaults(func=_cmd_assemble)

    p = sub.add_parser("score", help="attach embedding-based quality scores to pairs")
    p.add_argument("--pairs", required=True)
    p.add_argument("--vectors", required=True)
    p.add_argument("--threshold", type=float)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_score)

    p = sub.add_parser("manifest", help="build the clip manifest from pairs")
    p.add_argument("--pairs", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--cut-plan", dest="cut_plan")
    p.set_defaults(func=_cmd_manifest)

    p = sub.add_parser("split", help="assign documentaries to train/valid/test")
    p.add_argument("--manifest", required=True)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--table", action="store_true")
    p.set_defaults(func=_cmd_split)

    p = sub.add_parser("scenario", help="materialize one training scenario")
    p.add_argument("--manifest", required=True)
    p.add_argument("--split", required=True)
    p.add_argument("--kind", required=True, choices=corpus.SCENARIO_KINDS)
    p.add_argument("--topic", required=True)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--extra")
    p.set_defaults(func=_cmd_scenario)

    p = sub.add_parser("stats", help="corpus statistics per topic")
    p.add_argument("--manifest", required=True)
    p.set_defaults(func=_cmd_stats)

    p = sub.add_parser("context", help="retrieve similar sentences within a documentary")
    p.add_argument("--manifest", required=True)
    p.add_argument("--doc", required=True)
    p.add_argument("--position", type=int, required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--language", default="source", choices=("source", "target"))
    p.add_argument("--vectors")
    p.add_argument("--before-only", dest="before_only", action="store_true")
    p.set_defaults(func=_cmd_context)

    p = sub.add_parser("fuse", help="run a cross-modal fusion kernel on matrix files")
    p.add_argument("--op", required=True, choices=("selattn", "biattn", "align"))
    p.add_argument("--text", required=True)
    p.add_argument("--video", required=True)
    p.add_argument("--g", default="identity", choices=sorted(fusion.GATE_FUNCTIONS))
    p.add_argument("--out-dir", dest="out_dir")
    p.set_defaults(func=_cmd_fuse)

    p = sub.add_parser("bleu", help="corpus BLEU-4 between two line-aligned files")
    p.add_argument("--hyp", required=True)
    p.add_argument("--ref", required=True)
    p.add_argument("--lang", default="en", choices=("en", "zh"))
    p.add_argument("--smooth-eps", dest="smooth_eps", type=float, default=0.0)
    p.set_defaults(func=_cmd_bleu)

    p = sub.add_parser("verify", help="check pairs against a reference transcript")
    p.add_argument("--pairs", required=True)
    p.add_argument("--transcript", required=True)
    p.add_argument("--threshold", type=float, default=0.3)
    p.set_defaults(func=_cmd_verify)

    p = sub.add_parser("pipeline", help="run all stages from a config file")
    p.add_argument("--config", required=True)
    p.set_defaults(func=_cmd_pipeline)

    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except TopicVDError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
