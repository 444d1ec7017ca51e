"""Corpus ingestion for dpne.

Reads per-user text (JSON lines) or per-user token sequences (one line per
user, MSNBC style) into an immutable Corpus with interned tokens.
"""

import json
from dataclasses import dataclass
from enum import Enum
from pathlib import Path
from typing import Dict, Iterator, List, Sequence, Set, Tuple

from ..common.errors import CorpusFormatError
from ..common.logger import get_logger
from .tokens import NGram, TokenId, TokenTable, tokenize, union_kgrams

# MSNBC .seq files list category names above this line.
SEQUENCES_MARKER = "% sequences"


class CorpusFormat(Enum):
    """Supported corpus file formats."""

    JSONL_TEXT = "jsonl_text"
    SEQUENCE_LINES = "sequence_lines"


@dataclass(frozen=True)
class UserRecord:
    """One user's private data: one or more token sequences."""

    user_id: str
    sequences: Tuple[Tuple[TokenId, ...], ...]

    def kgrams(self, k: int) -> Set[NGram]:
        """G_k over all of the user's sequences."""
        return union_kgrams(self.sequences, k)

    @property
    def token_count(self) -> int:
        return sum(len(s) for s in self.sequences)


@dataclass(frozen=True)
class Corpus:
    """Users plus the token table their sequences are interned into."""

    users: Tuple[UserRecord, ...]
    tokens: TokenTable

    def __len__(self) -> int:
        return len(self.users)

    def __iter__(self) -> Iterator[UserRecord]:
        return iter(self.users)

    def without_user(self, user_id: str) -> "Corpus":
        """Adjacent corpus with one user removed."""
        return Corpus(
            users=tuple(u for u in self.users if u.user_id != user_id),
            tokens=self.tokens,
        )

    def kgram_universe(self, k: int) -> Set[NGram]:
        """Union of G_k over all users."""
        grams: Set[NGram] = set()
        for user in self.users:
            grams |= user.kgrams(k)
        return grams


def build_corpus(
    users: Sequence[Tuple[str, Sequence[str]]], lowercase: bool = True
) -> Corpus:
    """Build a corpus from (user_id, texts) pairs.

    Raises:
        CorpusFormatError: If a user_id repeats
    """
    table = TokenTable()
    records: List[UserRecord] = []
    seen: Set[str] = set()
    for index, (user_id, texts) in enumerate(users, start=1):
        if user_id in seen:
            raise CorpusFormatError(f"duplicate user_id {user_id!r}", index)
        seen.add(user_id)
        sequences = tuple(tuple(tokenize(t, table, lowercase)) for t in texts)
        records.append(UserRecord(user_id=user_id, sequences=sequences))
    return Corpus(users=tuple(records), tokens=table)


class CorpusLoader:
    """Reader for corpus files."""

    def __init__(self, lowercase: bool = True):
        """Initialize corpus loader.

        Args:
            lowercase: Lowercase tokens while interning
        """
        self.lowercase = lowercase
        self.logger = get_logger("corpus")

    def load(self, path: str, fmt: CorpusFormat = CorpusFormat.JSONL_TEXT) -> Corpus:
        """Load a corpus file.

        Args:
            path: Corpus file path
            fmt: File format

        Returns:
            Corpus with one UserRecord per input user

        Raises:
            FileNotFoundError: If the file does not exist
            CorpusFormatError: On a malformed line or a duplicate user_id
        """
        corpus_file = Path(path)
        if not corpus_file.exists():
            raise FileNotFoundError(f"Corpus file not found: {path}")

        self.logger.info(f"Loading {fmt.value} corpus from {corpus_file}")
        with corpus_file.open("r", encoding="utf-8") as f:
            if fmt is CorpusFormat.JSONL_TEXT:
                corpus = self._read_jsonl(f)
            else:
                corpus = self._read_sequence_lines(f)

        self.logger.info(
            f"Loaded {len(corpus)} users, {len(corpus.tokens)} distinct tokens"
        )
        return corpus

    def _read_jsonl(self, lines: Iterator[str]) -> Corpus:
        table = TokenTable()
        records: List[UserRecord] = []
        seen: Dict[str, int] = {}

        for line_number, line in enumerate(lines, start=1):
            if not line.strip():
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as e:
                raise CorpusFormatError(f"invalid JSON ({e.msg})", line_number) from e

            user_id, texts = self._validate_record(obj, line_number)
            if user_id in seen:
                raise CorpusFormatError(
                    f"duplicate user_id {user_id!r} (first seen on line {seen[user_id]})",
                    line_number,
                )
            seen[user_id] = line_number
            sequences = tuple(
                tuple(tokenize(text, table, self.lowercase)) for text in texts
            )
            records.append(UserRecord(user_id=user_id, sequences=sequences))

        return Corpus(users=tuple(records), tokens=table)

    def _validate_record(self, obj: object, line_number: int) -> Tuple[str, List[str]]:
        if not isinstance(obj, dict):
            raise CorpusFormatError("expected a JSON object", line_number)
        user_id = obj.get("user_id")
        texts = obj.get("texts")
        if not isinstance(user_id, str):
            raise CorpusFormatError("field 'user_id' must be a string", line_number)
        if not isinstance(texts, list) or not all(isinstance(t, str) for t in texts):
            raise CorpusFormatError(
                "field 'texts' must be an array of strings", line_number
            )
        return user_id, texts

    def _read_sequence_lines(self, lines: Iterator[str]) -> Corpus:
        kept: List[str] = []
        for line in lines:
            stripped = line.strip()
            # Everything above the MSNBC sequences marker is preamble,
            # including the un-prefixed line of category names.
            if stripped.lower().startswith(SEQUENCES_MARKER):
                kept = []
                continue
            if not stripped or stripped.startswith("%"):
                continue
            kept.append(stripped)

        table = TokenTable()
        records: List[UserRecord] = []
        for stripped in kept:
            tokens = tuple(tokenize(stripped, table, self.lowercase))
            user_id = str(len(records) + 1)
            records.append(UserRecord(user_id=user_id, sequences=(tokens,)))

        return Corpus(users=tuple(records), tokens=table)


def load_corpus(
    path: str,
    fmt: CorpusFormat = CorpusFormat.JSONL_TEXT,
    lowercase: bool = True,
) -> Corpus:
    """Load a corpus file with a default CorpusLoader."""
    return CorpusLoader(lowercase=lowercase).load(path, fmt)


def write_corpus(corpus: Corpus, path: Path) -> None:
    """Write a corpus as jsonl_text, one user per line, sequences as texts.

    Args:
        corpus: Corpus to write
        path: Destination file
    """
    logger = get_logger("corpus")
    try:
        with path.open("w", encoding="utf-8") as f:
            for user in corpus:
                texts = [
                    " ".join(corpus.tokens.words(seq)) for seq in user.sequences
                ]
                f.write(
                    json.dumps({"user_id": user.user_id, "texts": texts}, ensure_ascii=False)
                )
                f.write("\n")
        logger.info(f"Wrote {len(corpus)} users to {path}")
    except OSError:
        logger.exception("Failed to write corpus")
        raise
