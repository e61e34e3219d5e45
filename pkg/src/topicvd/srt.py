"""SRT subtitle parsing, markup stripping, and canonical serialization.

The parser is format-level only: it validates cue structure and timecodes,
tags each cue with a script-based language label, and leaves all sentence
logic to the assembly module. Serialization is canonical (``\\n`` endings,
``,`` millisecond separator, one blank line between cues) so that
``parse(serialize(track)) == track`` for every valid track.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field, replace

from .errors import SrtParseError

SOURCE = "source"
TARGET = "target"
MIXED = "mixed"

# Symbols that typically appear in only one language's track and break
# cross-language correspondence. Configurable, not a contract.
DEFAULT_SYMBOL_BLACKLIST = "♪♫♬♩☆★"

_TIMECODE_RE = re.compile(r"^(\d{2,}):([0-5]\d):([0-5]\d)[,.](\d{3})$")
_TIMECODE_LINE_RE = re.compile(r"^(\S+)\s+-->\s+(\S+)\s*$")
_TAG_RE = re.compile(r"<[^<>]*>")
_OVERRIDE_RE = re.compile(r"\{[^{}]*\}")
_SPEAKER_DASH_RE = re.compile(r"^[-–—]+\s*")
_CJK_RE = re.compile(r"[㐀-䶿一-鿿豈-﫿　-〿！-～]")
_LATIN_RE = re.compile(r"[A-Za-z\u00c0-\u00d6\u00d8-\u00f6\u00f8-\u00ff]")


@dataclass(frozen=True, order=True)
class Timecode:
    """Millisecond offset from file start; textual form is ``HH:MM:SS,mmm``."""

    millis: int

    def __post_init__(self):
        if not isinstance(self.millis, int) or self.millis < 0:
            raise ValueError(f"timecode must be a non-negative integer, got {self.millis!r}")

    @classmethod
    def parse(cls, text: str) -> "Timecode":
        m = _TIMECODE_RE.match(text)
        if m is None:
            raise ValueError(f"bad timecode {text!r}")
        h, mi, s, ms = (int(g) for g in m.groups())
        return cls(((h * 60 + mi) * 60 + s) * 1000 + ms)

    def __str__(self) -> str:
        s, ms = divmod(self.millis, 1000)
        mi, s = divmod(s, 60)
        h, mi = divmod(mi, 60)
        return f"{h:02d}:{mi:02d}:{s:02d},{ms:03d}"


def detect_language(lines: tuple[str, ...] | list[str]) -> str:
    """Tag cue text by script: CJK lines -> target, others -> source.

    The corpus is English/Chinese, so script is a reliable proxy. A cue
    holding both scripts (one line per language) is ``mixed`` and gets
    split downstream.
    """
    has_cjk = has_latin = False
    for line in lines:
        if _CJK_RE.search(line):
            has_cjk = True
        if _LATIN_RE.search(line):
            has_latin = True
    if has_cjk and has_latin:
        return MIXED
    return TARGET if has_cjk else SOURCE


@dataclass(frozen=True)
class SubtitleCue:
    index: int
    start: Timecode
    end: Timecode
    lines: tuple[str, ...]
    language: str = SOURCE

    def __post_init__(self):
        if self.index <= 0:
            raise ValueError(f"cue index must be positive, got {self.index}")
        if not self.start < self.end:
            raise ValueError(f"cue {self.index}: start {self.start} must precede end {self.end}")
        body = tuple(self.lines)
        for line in body:
            # blank or multi-line content would not survive canonical serialization
            if "\n" in line or "\r" in line or not line.strip():
                raise ValueError(f"cue {self.index}: line {line!r} is blank or spans lines")
        object.__setattr__(self, "lines", body)

    @property
    def text(self) -> str:
        return " ".join(line for line in self.lines if line)


@dataclass(frozen=True)
class SubtitleTrack:
    cues: tuple[SubtitleCue, ...]
    source_path: str = ""
    warnings: tuple[str, ...] = field(default=(), compare=False)

    def __post_init__(self):
        object.__setattr__(self, "cues", tuple(self.cues))
        object.__setattr__(self, "warnings", tuple(self.warnings))


def parse_srt(raw: bytes | str, strict: bool = False, source_path: str = "") -> SubtitleTrack:
    """Parse SRT text into a track, preserving file cue indices and order.

    Accepts a UTF-8 byte stream (an optional BOM is dropped) or an already
    decoded string. In strict mode any malformed block or a regression in
    cue start times raises :class:`SrtParseError` with the offending line
    number; in lenient mode bad blocks are skipped and recorded as warnings
    on the returned track.
    """
    if isinstance(raw, bytes):
        text = raw.decode("utf-8")
    else:
        text = raw
    if text.startswith("﻿"):
        text = text[1:]

    cues: list[SubtitleCue] = []
    warnings: list[str] = []

    def fail(message: str, line_no: int):
        if strict:
            raise SrtParseError(message, line=line_no)
        warnings.append(f"line {line_no}: {message} (cue skipped)")

    lines = text.split("\n")
    block: list[tuple[int, str]] = []  # (line number, content)

    def flush(block: list[tuple[int, str]]):
        if not block:
            return
        first_no, first = block[0]
        try:
            index = int(first.strip())
            if index <= 0:
                raise ValueError
        except ValueError:
            fail(f"expected positive cue index, got {first!r}", first_no)
            return
        if len(block) < 2:
            fail("cue block truncated before timecode line", first_no)
            return
        tc_no, tc_line = block[1]
        m = _TIMECODE_LINE_RE.match(tc_line.strip())
        if m is None:
            fail(f"malformed timecode line {tc_line!r}", tc_no)
            return
        try:
            start = Timecode.parse(m.group(1))
            end = Timecode.parse(m.group(2))
        except ValueError as exc:
            fail(str(exc), tc_no)
            return
        body = tuple(content for _, content in block[2:])
        if not body:
            fail("cue has no text lines", first_no)
            return
        if not start < end:
            fail(f"cue start {start} not before end {end}", tc_no)
            return
        try:
            cues.append(SubtitleCue(index, start, end, body, detect_language(body)))
        except ValueError as exc:
            fail(str(exc), first_no)

    for line_no, line in enumerate(lines, 1):
        stripped = line.rstrip("\r")
        if stripped.strip() == "":
            flush(block)
            block = []
        else:
            block.append((line_no, stripped))
    flush(block)

    for prev, cur in zip(cues, cues[1:]):
        if cur.start < prev.start:
            message = f"cue {cur.index} starts at {cur.start}, before cue {prev.index} at {prev.start}"
            if strict:
                raise SrtParseError(message)
            warnings.append(message)

    return SubtitleTrack(tuple(cues), source_path=source_path, warnings=tuple(warnings))


def strip_markup(cue: SubtitleCue, symbols: str = DEFAULT_SYMBOL_BLACKLIST,
                 drop_speaker_dash: bool = True) -> SubtitleCue:
    """Remove display markup and blacklisted symbols from a cue's text.

    Strips ``<...>`` tags, ``{...}`` override blocks, the configured symbol
    blacklist, and (optionally) leading speaker dashes, then collapses
    whitespace. Idempotent; time fields are untouched. Lines that become
    empty are dropped, so a fully decorative cue may end up with no lines.
    """
    cleaned = []
    for line in cue.lines:
        line = _TAG_RE.sub(" ", line)
        line = _OVERRIDE_RE.sub(" ", line)
        if symbols:
            line = line.translate({ord(ch): " " for ch in symbols})
        if drop_speaker_dash:
            line = _SPEAKER_DASH_RE.sub("", line.lstrip())
        line = " ".join(line.split())
        if line:
            cleaned.append(line)
    body = tuple(cleaned)
    return replace(cue, lines=body, language=detect_language(body))


def serialize_srt(track: SubtitleTrack) -> bytes:
    """Render a track in canonical SRT form (UTF-8, ``\\n``, ``,`` separator)."""
    blocks = []
    for cue in track.cues:
        header = f"{cue.index}\n{cue.start} --> {cue.end}"
        blocks.append(header + "\n" + "\n".join(cue.lines))
    if not blocks:
        return b""
    return ("\n\n".join(blocks) + "\n").encode("utf-8")
