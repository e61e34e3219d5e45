"""Reassemble split subtitle cues into sentences and pair them bilingually.

Subtitle authors split sentences across cues for display; this module undoes
that using terminal punctuation and inter-cue gaps as boundary cues, merging
time segments so each sentence still points at its span of the video. Paired
source/target sentences become the corpus row type carrying documentary,
topic, position, and (later) a QE score.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field, replace

from .srt import MIXED, SOURCE, TARGET, SubtitleCue, SubtitleTrack, Timecode, detect_language

# Closing quotes/brackets that may trail a terminal mark without hiding it.
CLOSING_TRAILERS = "\"')]}’”»›》」』】）"

DEFAULT_TERMINAL_MARKS = {
    SOURCE: ".!?…",
    TARGET: "。！？…",
}


@dataclass(frozen=True)
class AssemblyRules:
    """Sentence boundary rules.

    A boundary is placed after a cue iff its text ends with a terminal mark
    for its language (closing quotes/brackets ignored), the silence gap to
    the next cue exceeds ``max_gap_ms``, or the sentence already spans
    ``max_cues`` cues.
    """

    terminal_marks: dict[str, str] = field(default_factory=lambda: dict(DEFAULT_TERMINAL_MARKS))
    max_gap_ms: int = 5000
    max_cues: int = 8

    def marks_for(self, language: str) -> str:
        if language in self.terminal_marks:
            return self.terminal_marks[language]
        return "".join(self.terminal_marks.values())


@dataclass(frozen=True)
class Sentence:
    text: str
    start: Timecode
    end: Timecode
    member_cues: tuple[int, ...]
    language: str = SOURCE

    def __post_init__(self):
        object.__setattr__(self, "member_cues", tuple(self.member_cues))


@dataclass(frozen=True)
class SentencePair:
    source: Sentence
    target: Sentence
    documentary: str = ""
    topic: str = ""
    position: int = 0
    score: float | None = None
    cosine: float | None = None


@dataclass(frozen=True)
class PairingResult:
    pairs: tuple[SentencePair, ...]
    unmatched_source: tuple[Sentence, ...]
    unmatched_target: tuple[Sentence, ...]


def join_fragments(fragments: list[str], language: str) -> str:
    """CJK text concatenates without separators; everything else with spaces."""
    joiner = "" if language == TARGET else " "
    return joiner.join(f for f in fragments if f)


def ends_sentence(text: str, marks: str) -> bool:
    trimmed = text.rstrip()
    while trimmed and trimmed[-1] in CLOSING_TRAILERS:
        trimmed = trimmed[:-1].rstrip()
    return bool(trimmed) and trimmed[-1] in marks


def split_mixed_track(track: SubtitleTrack) -> tuple[SubtitleTrack, SubtitleTrack]:
    """Split a bilingual-in-one-file track into source and target tracks.

    Mixed cues (one line per language) contribute their lines to both
    outputs; single-language cues land in the matching output only. Cue
    indices and time fields are preserved.
    """
    source_cues: list[SubtitleCue] = []
    target_cues: list[SubtitleCue] = []
    for cue in track.cues:
        if cue.language == MIXED:
            src_lines = tuple(line for line in cue.lines if detect_language([line]) == SOURCE)
            tgt_lines = tuple(line for line in cue.lines if detect_language([line]) != SOURCE)
            if src_lines:
                source_cues.append(replace(cue, lines=src_lines, language=SOURCE))
            if tgt_lines:
                target_cues.append(replace(cue, lines=tgt_lines, language=TARGET))
        elif cue.language == TARGET:
            target_cues.append(cue)
        else:
            source_cues.append(cue)
    return (
        SubtitleTrack(tuple(source_cues), source_path=track.source_path),
        SubtitleTrack(tuple(target_cues), source_path=track.source_path),
    )


def assemble_sentences(track: SubtitleTrack, rules: AssemblyRules | None = None) -> list[Sentence]:
    """Group consecutive cues into sentences per the boundary rules.

    Every cue belongs to exactly one sentence, in track order; a sentence's
    interval is the union of its members' intervals.
    """
    rules = rules or AssemblyRules()
    sentences: list[Sentence] = []
    group: list[SubtitleCue] = []

    def close():
        if not group:
            return
        language = group[0].language
        if any(c.language != language for c in group):
            language = MIXED
        text = join_fragments(
            [join_fragments(list(c.lines), c.language) for c in group], language
        )
        sentences.append(
            Sentence(
                text=text,
                start=min(c.start for c in group),
                end=max(c.end for c in group),
                member_cues=tuple(c.index for c in group),
                language=language,
            )
        )
        group.clear()

    cues = track.cues
    for i, cue in enumerate(cues):
        group.append(cue)
        if ends_sentence(cue.text, rules.marks_for(cue.language)):
            close()
        elif len(group) >= rules.max_cues:
            close()
        elif i + 1 < len(cues) and cues[i + 1].start.millis - cue.end.millis > rules.max_gap_ms:
            close()
    close()
    return sentences


def _overlap_ms(a: Sentence, b: Sentence) -> int:
    return min(a.end.millis, b.end.millis) - max(a.start.millis, b.start.millis)


def pair_bilingual(
    source: list[Sentence],
    target: list[Sentence],
    documentary: str = "",
    topic: str = "",
) -> PairingResult:
    """Greedily pair sentences by maximal temporal overlap.

    Both inputs must be sorted by start time. Candidates with positive
    overlap are matched best-first (ties prefer the earlier target, then the
    earlier source); leftovers are reported, never dropped silently. Pairs
    come back sorted by source start time with positions 1..K.
    """
    for name, sentences in (("source", source), ("target", target)):
        for a, b in zip(sentences, sentences[1:]):
            if b.start < a.start:
                raise ValueError(f"{name} sentences not sorted by start time")

    candidates = []
    for i, s in enumerate(source):
        for j, t in enumerate(target):
            ov = _overlap_ms(s, t)
            if ov > 0:
                candidates.append((-ov, t.start.millis, s.start.millis, j, i))
    candidates.sort()

    matched: list[tuple[int, int]] = []
    src_free = [True] * len(source)
    tgt_free = [True] * len(target)
    for _, _, _, j, i in candidates:
        if src_free[i] and tgt_free[j]:
            src_free[i] = False
            tgt_free[j] = False
            matched.append((i, j))

    matched.sort(key=lambda ij: (source[ij[0]].start.millis, ij[0]))
    pairs = tuple(
        SentencePair(
            source=source[i],
            target=target[j],
            documentary=documentary,
            topic=topic,
            position=position,
        )
        for position, (i, j) in enumerate(matched, 1)
    )
    unmatched_src = tuple(s for i, s in enumerate(source) if src_free[i])
    unmatched_tgt = tuple(t for j, t in enumerate(target) if tgt_free[j])
    return PairingResult(pairs, unmatched_src, unmatched_tgt)


def _sentence_to_dict(sentence: Sentence) -> dict:
    return {
        "text": sentence.text,
        "start": str(sentence.start),
        "end": str(sentence.end),
        "member_cues": list(sentence.member_cues),
        "language": sentence.language,
    }


def _sentence_from_dict(data: dict) -> Sentence:
    return Sentence(
        text=data["text"],
        start=Timecode.parse(data["start"]),
        end=Timecode.parse(data["end"]),
        member_cues=tuple(data["member_cues"]),
        language=data["language"],
    )


def write_pairs_jsonl(pairs: list[SentencePair], path):
    """One JSON object per line, the pairing stage's exchange format."""
    with open(path, "w", encoding="utf-8") as handle:
        for pair in pairs:
            record = {
                "documentary": pair.documentary,
                "topic": pair.topic,
                "position": pair.position,
                "score": pair.score,
                "cosine": pair.cosine,
                "source": _sentence_to_dict(pair.source),
                "target": _sentence_to_dict(pair.target),
            }
            handle.write(json.dumps(record, ensure_ascii=False) + "\n")


def read_pairs_jsonl(path) -> list[SentencePair]:
    pairs = []
    with open(path, encoding="utf-8") as handle:
        for line_no, line in enumerate(handle, 1):
            if not line.strip():
                continue
            try:
                data = json.loads(line)
                pair = SentencePair(
                    source=_sentence_from_dict(data["source"]),
                    target=_sentence_from_dict(data["target"]),
                    documentary=data["documentary"],
                    topic=data["topic"],
                    position=data["position"],
                    score=data.get("score"),
                    cosine=data.get("cosine"),
                )
            except (KeyError, TypeError, ValueError) as exc:
                raise ValueError(f"{path}:{line_no}: bad pair record: {exc}") from None
            pairs.append(pair)
    return pairs
