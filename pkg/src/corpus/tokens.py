"""Token interning and contiguous k-gram extraction."""

import threading
from typing import Dict, Iterable, List, Sequence, Set, Tuple

TokenId = int
NGram = Tuple[TokenId, ...]

# Unknown tokens resolve to this id; no corpus gram can contain it.
UNKNOWN_TOKEN = -1


class TokenTable:
    """Bidirectional mapping between token strings and dense integer ids.

    Ids are assigned in first-seen order. Interning is lock-protected so
    ingestion may run from several threads.
    """

    def __init__(self) -> None:
        self._ids: Dict[str, TokenId] = {}
        self._tokens: List[str] = []
        self._lock = threading.Lock()

    def __len__(self) -> int:
        return len(self._tokens)

    def __contains__(self, token: str) -> bool:
        return token in self._ids

    def intern(self, token: str) -> TokenId:
        token_id = self._ids.get(token)
        if token_id is not None:
            return token_id
        with self._lock:
            token_id = self._ids.get(token)
            if token_id is None:
                token_id = len(self._tokens)
                self._tokens.append(token)
                self._ids[token] = token_id
            return token_id

    def lookup(self, token: str) -> TokenId:
        """Id of a known token, or UNKNOWN_TOKEN."""
        return self._ids.get(token, UNKNOWN_TOKEN)

    def token(self, token_id: TokenId) -> str:
        if token_id == UNKNOWN_TOKEN:
            raise KeyError("unknown token id")
        return self._tokens[token_id]

    def words(self, gram: NGram) -> Tuple[str, ...]:
        """Token strings of a gram."""
        return tuple(self._tokens[t] for t in gram)

    def sort_key(self, gram: NGram) -> Tuple[str, ...]:
        """Ordering key that does not depend on interning order."""
        return tuple(self._tokens[t] for t in gram)

    def render(self, gram: NGram, sep: str = "\t") -> str:
        return sep.join(self.words(gram))

    def encode(self, words: Sequence[str]) -> NGram:
        """Gram for a sequence of token strings, without interning."""
        return tuple(self.lookup(w) for w in words)


def tokenize(text: str, table: TokenTable, lowercase: bool = True) -> List[TokenId]:
    """Split text on Unicode whitespace and intern the tokens.

    Args:
        text: Raw text
        table: Table receiving the tokens
        lowercase: Lowercase before interning

    Returns:
        Token ids in text order; empty for empty or blank text
    """
    if lowercase:
        text = text.lower()
    return [table.intern(token) for token in text.split()]


def extract_kgrams(tokens: Sequence[TokenId], k: int) -> Set[NGram]:
    """Distinct contiguous windows of length k.

    Args:
        tokens: One token sequence
        k: Window length, >= 1

    Returns:
        The set G_k of the sequence; empty when the sequence is shorter than k
    """
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    tokens = tuple(tokens)
    return {tokens[i : i + k] for i in range(len(tokens) - k + 1)}


def union_kgrams(sequences: Iterable[Sequence[TokenId]], k: int) -> Set[NGram]:
    """G_k of a user holding several sequences; no window spans two sequences."""
    grams: Set[NGram] = set()
    for tokens in sequences:
        grams |= extract_kgrams(tokens, k)
    return grams
