"""Hand-built pair records in the exchange JSONL format."""

import json
from pathlib import Path

import pytest


def write_pairs(path, rows, topic="Nature"):
    """Write rows of (documentary, position, source_text, target_text)."""
    lines = []
    for documentary, position, source_text, target_text in rows:
        record = {
            "documentary": documentary,
            "topic": topic,
            "position": position,
            "score": None,
            "cosine": None,
            "source": {
                "text": source_text,
                "start": "00:00:01,000",
                "end": "00:00:03,000",
                "member_cues": [1],
                "language": "source",
            },
            "target": {
                "text": target_text,
                "start": "00:00:01,200",
                "end": "00:00:02,800",
                "member_cues": [1],
                "language": "target",
            },
        }
        lines.append(json.dumps(record, ensure_ascii=False))
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


TEN_ROWS = (
    ("Rivers.mp4", 1, "The river starts as a trickle of meltwater.", "河流始于一滴融水。"),
    ("Rivers.mp4", 2, "Within a mile it has carved a channel.", "不到一英里它已冲出河道。"),
    ("Rivers.mp4", 3, "Salmon return here every autumn.", "鲑鱼每年秋天回到这里。"),
    ("Rivers.mp4", 4, "The delta spreads across fifty miles.", "三角洲绵延五十英里。"),
    ("Rivers.mp4", 5, "Nothing here is wasted.", "这里没有什么被浪费。"),
    ("Glaciers.mp4", 1, "Ice this old holds trapped air.", "这么古老的冰封存着空气。"),
    ("Glaciers.mp4", 2, "Each bubble is a sample of an ancient sky.", "每个气泡都是远古天空的样本。"),
    ("Glaciers.mp4", 3, "The glacier moves a metre a day.", "冰川每天移动一米。"),
    ("Glaciers.mp4", 4, "At the terminus, bergs calve into the fjord.", "在末端冰山崩入峡湾。"),
    ("Glaciers.mp4", 5, "The sound carries for kilometres.", "声音传出数公里。"),
)


@pytest.fixture
def ten_pair_file(tmp_path):
    path = tmp_path / "pairs.jsonl"
    write_pairs(path, TEN_ROWS)
    return path
