"""Subhāṣita corpus ingestion and access.

The corpus lives in a UTF-8 CSV file with header ``sanskrit,marathi,english,
tags`` (RFC-4180 quoting). The tags cell holds one or more ``;``-separated
theme labels. Verse ids are assigned from row order at load time and stay
dense 0..n-1.
"""

from __future__ import annotations

import csv
import hashlib
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

from .errors import PragyaError
from .transliteration import is_devanagari_ratio

EXPECTED_HEADER = ("sanskrit", "marathi", "english", "tags")
TAG_DELIMITER = ";"
DEVANAGARI_MIN_RATIO = 0.5


class CorpusError(PragyaError):
    code = "corpus_error"


class MissingFile(CorpusError):
    code = "missing_file"


class MalformedHeader(CorpusError):
    code = "malformed_header"


class EmptyCorpus(CorpusError):
    code = "empty_corpus"


class RowError(CorpusError):
    """Raised on the first invalid data row; ingestion does not continue."""

    code = "row_error"

    def __init__(self, line: int, reason: str):
        super().__init__(f"line {line}: {reason}")
        self.line = line
        self.reason = reason


class UnknownVerseId(CorpusError):
    code = "unknown_verse"

    def __init__(self, verse_id: int):
        super().__init__(f"no verse with id {verse_id}")
        self.verse_id = verse_id


@dataclass(frozen=True)
class VerseRecord:
    """One Subhāṣita: Devanagari text, two translations, and theme tags."""

    id: int
    devanagari: str
    marathi: str
    english: str
    tags: tuple[str, ...]


@dataclass(frozen=True)
class Chunk:
    """One embeddable text unit, tied back to its verse."""

    verse_id: int
    text: str


@dataclass(frozen=True)
class Corpus:
    verses: tuple[VerseRecord, ...]
    tag_counts: dict[str, int] = field(compare=False)

    def __len__(self) -> int:
        return len(self.verses)

    def verse(self, verse_id: int) -> VerseRecord:
        if 0 <= verse_id < len(self.verses):
            return self.verses[verse_id]
        raise UnknownVerseId(verse_id)

    def has_verse(self, verse_id: int) -> bool:
        return 0 <= verse_id < len(self.verses)

    @classmethod
    def from_verses(cls, verses: Sequence[VerseRecord]) -> "Corpus":
        for position, verse in enumerate(verses):
            if verse.id != position:
                raise ValueError(
                    f"verse ids must be dense 0..n-1 in list order; "
                    f"got id {verse.id} at position {position}"
                )
        counts = Counter(tag for verse in verses for tag in verse.tags)
        return cls(verses=tuple(verses), tag_counts=dict(counts))


def _parse_tags(cell: str) -> tuple[str, ...]:
    seen: dict[str, None] = {}
    for raw in cell.split(TAG_DELIMITER):
        tag = raw.strip().lower()
        if tag:
            seen.setdefault(tag, None)
    return tuple(seen)


def load_corpus(path: str | Path) -> Corpus:
    """Load and validate a corpus CSV.

    Aborts on the first bad row, reporting its line number. Raises
    MissingFile, MalformedHeader, EmptyCorpus, or RowError.
    """
    path = Path(path)
    if not path.is_file():
        raise MissingFile(f"corpus file not found: {path}")

    verses: list[VerseRecord] = []
    with path.open(newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise MalformedHeader("file is empty, expected header row") from None
        if tuple(cell.strip() for cell in header) != EXPECTED_HEADER:
            raise MalformedHeader(
                f"expected header {','.join(EXPECTED_HEADER)!r}, got {','.join(header)!r}"
            )

        for row in reader:
            line = reader.line_num
            if not row or all(not cell.strip() for cell in row):
                continue  # blank line
            if len(row) != len(EXPECTED_HEADER):
                raise RowError(line, f"expected {len(EXPECTED_HEADER)} fields, got {len(row)}")
            sanskrit, marathi, english, tags_cell = (cell.strip() for cell in row)
            if not sanskrit:
                raise RowError(line, "empty sanskrit field")
            ratio = is_devanagari_ratio(sanskrit)
            if ratio < DEVANAGARI_MIN_RATIO:
                raise RowError(
                    line,
                    f"sanskrit field is not Devanagari "
                    f"({ratio:.0%} of codepoints in block, need >={DEVANAGARI_MIN_RATIO:.0%})",
                )
            if not english:
                raise RowError(line, "empty english field")
            tags = _parse_tags(tags_cell)
            if not tags:
                raise RowError(line, "empty tags field")
            verses.append(
                VerseRecord(
                    id=len(verses),
                    devanagari=sanskrit,
                    marathi=marathi,
                    english=english,
                    tags=tags,
                )
            )

    if not verses:
        raise EmptyCorpus(f"no data rows in {path}")
    return Corpus.from_verses(verses)


def save_corpus(corpus: Corpus, path: str | Path) -> None:
    """Write a corpus back to CSV; load_corpus(save_corpus(c)) round-trips."""
    path = Path(path)
    with path.open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(EXPECTED_HEADER)
        for verse in corpus.verses:
            writer.writerow(
                [verse.devanagari, verse.marathi, verse.english,
                 TAG_DELIMITER.join(verse.tags)]
            )


def chunk_text(verse: VerseRecord) -> list[Chunk]:
    """Split a verse into embeddable chunks.

    Verses are short aphorisms, so the policy is one chunk per verse: the
    English translation plus a theme suffix. Queries arrive in English or
    Marathi, so embedding the translation (not the Devanagari) keeps query
    and document in the same script; the tags inject the thematic signal.
    """
    text = f"{verse.english}. themes: {', '.join(verse.tags)}"
    return [Chunk(verse_id=verse.id, text=text)]


def verses_by_tag(corpus: Corpus, tag: str) -> list[VerseRecord]:
    """All verses carrying ``tag``, in id order."""
    return [verse for verse in corpus.verses if tag in verse.tags]


def corpus_digest(corpus: Corpus) -> str:
    """Stable content hash of a corpus, for index/corpus match checks."""
    hasher = hashlib.sha256()
    for verse in corpus.verses:
        for part in (verse.devanagari, verse.marathi, verse.english, *verse.tags):
            hasher.update(part.encode("utf-8"))
            hasher.update(b"\x1f")
        hasher.update(b"\x1e")
    return hasher.hexdigest()


def iter_chunks(corpus: Corpus) -> Iterable[Chunk]:
    for verse in corpus.verses:
        yield from chunk_text(verse)
