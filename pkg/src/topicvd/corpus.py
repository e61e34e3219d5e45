"""Corpus assembly, deterministic splits, experiment scenarios, statistics.

Splits are by whole documentary so test material never shares a video with
training material. All randomized choices flow from an explicit integer seed
through PCG64 (stable across platforms and numpy versions), with per-topic
and per-documentary child seeds derived via ``SeedSequence`` spawn keys, so
the same seed always reproduces the same corpus byte for byte.
"""

from __future__ import annotations

import hashlib
from collections import OrderedDict
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .clips import ClipRecord
from .errors import CorpusError, ManifestError

TOPICS = ("Economy", "Food", "History", "Figure", "Military", "Nature", "Social", "Technology")

TRAIN, VALID, TEST = "train", "valid", "test"

SCENARIO_KINDS = (
    "full",
    "in_domain",
    "out_of_domain_full",
    "out_of_domain_sampled",
    "in_domain_augmented",
    "out_of_domain_augmented",
)


@dataclass(frozen=True)
class CorpusManifest:
    records: tuple[ClipRecord, ...]
    topics: tuple[str, ...] = TOPICS

    def __post_init__(self):
        object.__setattr__(self, "records", tuple(self.records))
        seen = set()
        for rec in self.records:
            if rec.topic not in self.topics:
                raise ManifestError(f"unknown topic {rec.topic!r} for {rec.documentary!r}")
            key = (rec.documentary, rec.position)
            if key in seen:
                raise ManifestError(f"duplicate (documentary, position) {key}")
            seen.add(key)

    def documentaries(self) -> "OrderedDict[str, list[ClipRecord]]":
        groups: OrderedDict[str, list[ClipRecord]] = OrderedDict()
        for rec in self.records:
            groups.setdefault(rec.documentary, []).append(rec)
        return groups

    def topic_of(self, documentary: str) -> str:
        for rec in self.records:
            if rec.documentary == documentary:
                return rec.topic
        raise KeyError(documentary)


@dataclass(frozen=True)
class SplitSpec:
    assignment: dict[str, str]
    seed: int
    warnings: tuple[str, ...] = field(default=(), compare=False)


@dataclass(frozen=True)
class ScenarioSpec:
    kind: str
    test_topic: str
    seed: int

    def __post_init__(self):
        if self.kind not in SCENARIO_KINDS:
            raise CorpusError(f"unknown scenario kind {self.kind!r}")
        if self.test_topic not in TOPICS:
            raise CorpusError(f"unknown topic {self.test_topic!r}")


def _child_rng(seed: int, *scope: str) -> np.random.Generator:
    # Stable per-scope stream: spawn keys derived from a content hash of the
    # scope labels, so adding topics or documentaries never shifts others.
    digest = hashlib.sha256("\x1f".join(scope).encode("utf-8")).digest()
    key = int.from_bytes(digest[:8], "big")
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed, spawn_key=(key,))))


def build_split(manifest: CorpusManifest, seed: int) -> SplitSpec:
    """Assign whole documentaries to train/valid/test, 1-2 each per topic.

    Topics with at least five documentaries may give two to valid and two
    to test (seed-determined); topics with three or four give exactly one
    each; topics with fewer than three keep everything in train and are
    reported in the split warnings.
    """
    by_topic: dict[str, list[str]] = {}
    for doc, recs in manifest.documentaries().items():
        by_topic.setdefault(recs[0].topic, []).append(doc)

    assignment: dict[str, str] = {}
    warnings: list[str] = []
    for topic in manifest.topics:
        docs = sorted(by_topic.get(topic, []))
        if not docs:
            continue
        if len(docs) < 3:
            for doc in docs:
                assignment[doc] = TRAIN
            warnings.append(
                f"topic {topic}: only {len(docs)} documentaries, valid/test left empty"
            )
            continue
        rng = _child_rng(seed, "split", topic)
        order = [docs[i] for i in rng.permutation(len(docs))]
        n_valid = 1 + (int(rng.integers(0, 2)) if len(docs) >= 5 else 0)
        n_test = 1 + (int(rng.integers(0, 2)) if len(docs) >= 5 else 0)
        for doc in order[:n_valid]:
            assignment[doc] = VALID
        for doc in order[n_valid : n_valid + n_test]:
            assignment[doc] = TEST
        for doc in order[n_valid + n_test :]:
            assignment[doc] = TRAIN
    return SplitSpec(assignment=assignment, seed=seed, warnings=tuple(warnings))


@dataclass(frozen=True)
class SplitRow:
    topic: str
    pairs: dict[str, int]  # split name -> pair count
    docs: dict[str, int]  # split name -> documentary count

    @property
    def total_pairs(self) -> int:
        return sum(self.pairs.values())

    @property
    def total_docs(self) -> int:
        return sum(self.docs.values())


def split_table(manifest: CorpusManifest, split: SplitSpec) -> list[SplitRow]:
    """Per-topic pair/documentary counts by split, plus a Total row."""
    rows = []
    total_pairs = {name: 0 for name in (TRAIN, VALID, TEST)}
    total_docs = {name: 0 for name in (TRAIN, VALID, TEST)}
    docs = manifest.documentaries()
    for topic in manifest.topics:
        pairs = {name: 0 for name in (TRAIN, VALID, TEST)}
        doc_counts = {name: 0 for name in (TRAIN, VALID, TEST)}
        for doc, recs in docs.items():
            if recs[0].topic != topic:
                continue
            part = split.assignment.get(doc)
            if part is None:
                raise CorpusError(f"documentary {doc!r} missing from split assignment")
            pairs[part] += len(recs)
            doc_counts[part] += 1
        if sum(doc_counts.values()) == 0:
            continue
        rows.append(SplitRow(topic, pairs, doc_counts))
        for name in (TRAIN, VALID, TEST):
            total_pairs[name] += pairs[name]
            total_docs[name] += doc_counts[name]
    rows.append(SplitRow("Total", total_pairs, total_docs))
    return rows


def render_split_table(rows: list[SplitRow]) -> str:
    lines = [f"{'Topic':<12}{'Train':>16}{'Valid':>16}{'Test':>16}{'Total':>16}"]
    for row in rows:
        cells = [
            f"{row.pairs[name]:,} / {row.docs[name]}" for name in (TRAIN, VALID, TEST)
        ]
        cells.append(f"{row.total_pairs:,} / {row.total_docs}")
        lines.append(f"{row.topic:<12}" + "".join(f"{c:>16}" for c in cells))
    return "\n".join(lines) + "\n"


def _train_records(manifest: CorpusManifest, split: SplitSpec) -> list[ClipRecord]:
    return [rec for rec in manifest.records if split.assignment.get(rec.documentary) == TRAIN]


def _stratified_sample(
    pool: list[ClipRecord], target: int, seed: int, scope: str
) -> list[ClipRecord]:
    """Documentary-proportional sample of exactly ``target`` records.

    Quotas are allocated by largest remainder over documentaries (sorted by
    name), then filled uniformly without replacement inside each documentary.
    """
    if target > len(pool):
        raise CorpusError(f"sample of {target} exceeds available {len(pool)} records")
    groups: dict[str, list[ClipRecord]] = {}
    for rec in pool:
        groups.setdefault(rec.documentary, []).append(rec)
    names = sorted(groups)
    total = len(pool)

    quotas = {}
    remainders = []
    allocated = 0
    for name in names:
        exact = target * len(groups[name]) / total
        quotas[name] = int(exact)
        allocated += quotas[name]
        remainders.append((-(exact - int(exact)), name))
    remainders.sort()
    for _, name in remainders[: target - allocated]:
        quotas[name] += 1

    sample: list[ClipRecord] = []
    for name in names:
        quota = quotas[name]
        if quota == 0:
            continue
        rng = _child_rng(seed, scope, name)
        chosen = sorted(rng.choice(len(groups[name]), size=quota, replace=False).tolist())
        sample.extend(groups[name][i] for i in chosen)
    return sample


def build_scenario(
    manifest: CorpusManifest,
    split: SplitSpec,
    spec: ScenarioSpec,
    extra: CorpusManifest | None = None,
) -> list[ClipRecord]:
    """Materialize one training-scenario record list.

    ``full`` is every training record; ``in_domain`` restricts to the test
    topic; ``out_of_domain_full`` takes the other seven topics;
    ``out_of_domain_sampled`` draws a documentary-stratified sample of the
    other topics sized exactly like the in-domain set. The ``*_augmented``
    kinds additionally use ``extra`` (wholly treated as training material):
    in-domain gains the extra records of the test topic, and the
    out-of-domain sample is enlarged to the augmented in-domain size.
    """
    train = _train_records(manifest, split)
    in_domain = [rec for rec in train if rec.topic == spec.test_topic]
    out_of_domain = [rec for rec in train if rec.topic != spec.test_topic]

    if spec.kind == "full":
        return train
    if spec.kind == "in_domain":
        return in_domain
    if spec.kind == "out_of_domain_full":
        return out_of_domain
    if spec.kind == "out_of_domain_sampled":
        return _stratified_sample(out_of_domain, len(in_domain), spec.seed, "scenario")

    if extra is None:
        raise CorpusError(f"scenario kind {spec.kind!r} requires an augmentation manifest")
    extra_in_domain = [rec for rec in extra.records if rec.topic == spec.test_topic]
    if spec.kind == "in_domain_augmented":
        return in_domain + extra_in_domain
    # out_of_domain_augmented: same volume growth as the in-domain augmentation
    target = len(in_domain) + len(extra_in_domain)
    return _stratified_sample(out_of_domain, target, spec.seed, "scenario")


@dataclass(frozen=True)
class AugmentReport:
    """Per-topic pair deltas from an augmentation merge."""

    base: dict[str, int]
    added: dict[str, int]
    merged: dict[str, int]

    def check_expected(self, expected: dict[str, int]) -> list[str]:
        """Flag topics whose computed totals disagree with stated totals."""
        flags = []
        for topic, value in sorted(expected.items()):
            computed = self.merged.get(topic, 0)
            if computed != value:
                flags.append(
                    f"FLAG: topic {topic} computed {computed} pairs, stated total is "
                    f"{value} (discrepancy {value - computed:+d})"
                )
        return flags

    def render(self, expected: dict[str, int] | None = None) -> str:
        lines = ["topic\tbase\tadded\tmerged"]
        for topic in sorted(self.merged):
            lines.append(
                f"{topic}\t{self.base.get(topic, 0)}\t{self.added.get(topic, 0)}"
                f"\t{self.merged[topic]}"
            )
        if expected:
            lines.extend(self.check_expected(expected))
        return "\n".join(lines) + "\n"


def _topic_counts(records: tuple[ClipRecord, ...] | list[ClipRecord]) -> dict[str, int]:
    counts: dict[str, int] = {}
    for rec in records:
        counts[rec.topic] = counts.get(rec.topic, 0) + 1
    return counts


def augment(manifest: CorpusManifest, extra: CorpusManifest) -> tuple[CorpusManifest, AugmentReport]:
    """Merge disjoint documentaries into the corpus, reporting per-topic deltas."""
    existing = set(manifest.documentaries())
    for doc in extra.documentaries():
        if doc in existing:
            raise CorpusError(f"augmentation documentary {doc!r} already in corpus")
    merged = CorpusManifest(manifest.records + extra.records, topics=manifest.topics)
    report = AugmentReport(
        base=_topic_counts(manifest.records),
        added=_topic_counts(extra.records),
        merged=_topic_counts(merged.records),
    )
    return merged, report


@dataclass(frozen=True)
class StatsReport:
    pair_counts: dict[str, int]
    doc_counts: dict[str, int]
    total_pairs: int
    total_docs: int
    mean_duration_s: float
    mean_source_tokens: float
    mean_target_chars: float

    def render(self) -> str:
        lines = [f"{'Topic':<12}{'Pairs':>10}{'Docs':>8}"]
        for topic in sorted(self.pair_counts):
            lines.append(f"{topic:<12}{self.pair_counts[topic]:>10,}{self.doc_counts[topic]:>8}")
        lines.append(f"{'Total':<12}{self.total_pairs:>10,}{self.total_docs:>8}")
        lines.append(f"mean clip duration: {self.mean_duration_s:.1f} s")
        lines.append(f"mean source length: {self.mean_source_tokens:.1f} tokens")
        lines.append(f"mean target length: {self.mean_target_chars:.1f} chars")
        return "\n".join(lines) + "\n"


def stats(manifest: CorpusManifest) -> StatsReport:
    """Pair/documentary counts per topic plus duration and length means."""
    pair_counts = _topic_counts(manifest.records)
    doc_counts: dict[str, int] = {}
    for doc, recs in manifest.documentaries().items():
        topic = recs[0].topic
        doc_counts[topic] = doc_counts.get(topic, 0) + 1
    n = len(manifest.records)
    durations = sum((rec.end.millis - rec.start.millis) / 1000.0 for rec in manifest.records)
    source_tokens = sum(len(rec.source_text.split()) for rec in manifest.records)
    target_chars = sum(
        sum(1 for ch in rec.target_text if not ch.isspace()) for rec in manifest.records
    )
    return StatsReport(
        pair_counts=pair_counts,
        doc_counts=doc_counts,
        total_pairs=n,
        total_docs=len(manifest.documentaries()),
        mean_duration_s=durations / n if n else 0.0,
        mean_source_tokens=source_tokens / n if n else 0.0,
        mean_target_chars=target_chars / n if n else 0.0,
    )


def write_split(split: SplitSpec, path: str | Path):
    lines = [f"{doc}\t{part}" for doc, part in sorted(split.assignment.items())]
    Path(path).write_text("\n".join(lines) + "\n" if lines else "", encoding="utf-8")


def read_split(path: str | Path, seed: int = 0) -> SplitSpec:
    assignment = {}
    for line_no, line in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
        if not line.strip():
            continue
        parts = line.split("\t")
        if len(parts) != 2 or parts[1] not in (TRAIN, VALID, TEST):
            raise CorpusError(f"{path}:{line_no}: expected 'documentary TAB train|valid|test'")
        assignment[parts[0]] = parts[1]
    return SplitSpec(assignment=assignment, seed=seed)


def write_scenario(records: list[ClipRecord], path: str | Path):
    """Record-id list: documentary TAB position, one per line."""
    lines = [f"{rec.documentary}\t{rec.position}" for rec in records]
    Path(path).write_text("\n".join(lines) + "\n" if lines else "", encoding="utf-8")
