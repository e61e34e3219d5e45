"""Sequential pipeline: parse, assemble, score, manifest, split, stats.

Every run writes its artifacts plus a machine-readable ``report.json`` under
the output directory. The report carries per-stage counts and warnings and
is written even when a stage fails, with no wall-clock content, so reruns
over identical inputs and seed produce byte-identical output trees.
"""

from __future__ import annotations

import json
from dataclasses import replace
from pathlib import Path

from . import assembly, clips, corpus, scoring, srt
from .config import PipelineConfig
from .errors import StageError, TopicVDError

STAGES = ("parse", "assemble", "score", "manifest", "split", "stats")


def _parse_track(path: str, config: PipelineConfig) -> srt.SubtitleTrack:
    with open(path, "rb") as handle:
        track = srt.parse_srt(handle.read(), strict=config.strict_parse, source_path=path)
    cues = tuple(
        cue
        for cue in (srt.strip_markup(c, symbols=config.symbol_blacklist) for c in track.cues)
        if cue.lines
    )
    return replace(track, cues=cues)


def run_pipeline(config: PipelineConfig) -> Path:
    """Run all stages, returning the artifact directory.

    Raises StageError naming the first failing stage; the report still lists
    every stage with its status at that point.
    """
    out_dir = Path(config.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    report: dict = {"seed": config.seed, "stages": {}, "status": "ok"}
    rules = assembly.AssemblyRules(
        terminal_marks={
            srt.SOURCE: config.terminal_marks_source,
            srt.TARGET: config.terminal_marks_target,
        },
        max_gap_ms=config.max_gap_ms,
        max_cues=config.max_cues,
    )

    def fail(stage: str, exc: Exception):
        report["stages"].setdefault(stage, {})["status"] = "failed"
        report["stages"][stage]["error"] = str(exc)
        report["status"] = f"failed: {stage}"
        raise StageError(stage, exc) from exc

    try:
        # parse
        try:
            source_track = _parse_track(config.source_srt, config)
            target_track = _parse_track(config.target_srt, config)
        except (TopicVDError, OSError) as exc:
            fail("parse", exc)
        report["stages"]["parse"] = {
            "status": "ok",
            "source_cues": len(source_track.cues),
            "target_cues": len(target_track.cues),
            "warnings": list(source_track.warnings) + list(target_track.warnings),
        }

        # assemble
        try:
            # A single bilingual file (one line per language) may stand in for
            # both inputs; the split result is used only when the target file
            # itself supplied no cues.
            split_src, split_tgt = assembly.split_mixed_track(source_track)
            if split_tgt.cues and not target_track.cues:
                source_track, target_track = split_src, split_tgt
            source_sentences = assembly.assemble_sentences(source_track, rules)
            target_sentences = assembly.assemble_sentences(target_track, rules)
            pairing = assembly.pair_bilingual(
                source_sentences,
                target_sentences,
                documentary=config.documentary,
                topic=config.topic,
            )
            pairs = list(pairing.pairs)
            assembly.write_pairs_jsonl(pairs, out_dir / "pairs.jsonl")
        except (TopicVDError, ValueError, OSError) as exc:
            fail("assemble", exc)
        report["stages"]["assemble"] = {
            "status": "ok",
            "source_sentences": len(source_sentences),
            "target_sentences": len(target_sentences),
            "pairs": len(pairs),
            "unmatched_source": len(pairing.unmatched_source),
            "unmatched_target": len(pairing.unmatched_target),
        }

        # score (opt-in: runs only when a vector file is configured)
        if config.vectors:
            try:
                store = scoring.read_vector_file(config.vectors)
                pairs, missing = scoring.score_pairs(pairs, store)
                dropped = []
                if config.score_threshold is not None:
                    scored = [p for p in pairs if p.score is not None]
                    unscored = [p for p in pairs if p.score is None]
                    kept, dropped = scoring.filter_by_score(scored, config.score_threshold)
                    pairs = sorted(kept + unscored, key=lambda p: p.position)
                assembly.write_pairs_jsonl(pairs, out_dir / "pairs.jsonl")
            except (TopicVDError, OSError) as exc:
                fail("score", exc)
            report["stages"]["score"] = {
                "status": "ok",
                "scored": sum(1 for p in pairs if p.score is not None),
                "missing_vectors": [
                    f"{m.documentary}/{m.position}/{m.language}" for m in missing
                ],
                "dropped_below_threshold": len(dropped),
            }
        else:
            report["stages"]["score"] = {"status": "skipped"}

        # manifest
        try:
            records = clips.build_manifest(pairs)
            clips.write_manifest(records, out_dir / "manifest.tsv")
            (out_dir / "cut_plan.tsv").write_text(
                clips.emit_cut_plan(records), encoding="utf-8"
            )
        except (TopicVDError, OSError) as exc:
            fail("manifest", exc)
        report["stages"]["manifest"] = {"status": "ok", "records": len(records)}

        # split
        try:
            corpus_manifest = corpus.CorpusManifest(tuple(records))
            split = corpus.build_split(corpus_manifest, seed=config.seed)
            corpus.write_split(split, out_dir / "split.tsv")
            table = corpus.render_split_table(corpus.split_table(corpus_manifest, split))
            (out_dir / "split_table.txt").write_text(table, encoding="utf-8")
        except (TopicVDError, OSError) as exc:
            fail("split", exc)
        report["stages"]["split"] = {
            "status": "ok",
            "documentaries": len(split.assignment),
            "warnings": list(split.warnings),
        }

        # stats
        try:
            stats_report = corpus.stats(corpus_manifest)
            (out_dir / "stats.txt").write_text(stats_report.render(), encoding="utf-8")
        except (TopicVDError, OSError) as exc:
            fail("stats", exc)
        report["stages"]["stats"] = {
            "status": "ok",
            "total_pairs": stats_report.total_pairs,
            "total_docs": stats_report.total_docs,
        }
    finally:
        (out_dir / "report.json").write_text(
            json.dumps(report, indent=2, sort_keys=True, ensure_ascii=False) + "\n",
            encoding="utf-8",
        )
    return out_dir
