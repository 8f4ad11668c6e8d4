"""Vector store plus parsers/serializers for word2vec text, word2vec binary, and contextual NDJSON."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import IO, Iterable, Iterator, Mapping, Sequence

import numpy as np

FLOAT_BYTES = 4  # little-endian IEEE-754 float32 records
TEXT_FLOAT_FORMAT = ".9g"  # >= 9 significant digits: enough to round-trip float32 exactly

SOURCE_STATIC = "static"
SOURCE_CONTEXTUAL = "contextual"

POOLING_MODES = ("term_tokens_mean", "sentence_mean")


class VectorFormatError(ValueError):
    """A vector file violates its format grammar.

    The message names the offending file and, where meaningful, the
    line number or token so the bad record can be located directly.
    """


class VectorStore:
    """Immutable token -> fixed-dimension vector map with provenance.

    Tokens are stored case-sensitively; ``get`` falls back to a lowercase
    lookup on miss because medical lexicons are mixed-case while typical
    word2vec vocabularies are lowercase.
    """

    def __init__(
        self,
        entries: Iterable[tuple[str, Sequence[float]]],
        source_kind: str = SOURCE_STATIC,
        metadata: Mapping[str, str] | None = None,
    ):
        if source_kind not in (SOURCE_STATIC, SOURCE_CONTEXTUAL):
            raise ValueError(f"unknown source_kind {source_kind!r}")
        self._vectors: dict[str, np.ndarray] = {}
        dim: int | None = None
        for token, vec in entries:
            arr = np.asarray(vec, dtype=np.float64)
            if arr.ndim != 1:
                raise ValueError(f"vector for token {token!r} is not 1-D")
            if dim is None:
                dim = int(arr.shape[0])
                if dim < 1:
                    raise ValueError("vector dimension must be >= 1")
            elif arr.shape[0] != dim:
                raise ValueError(
                    f"vector for token {token!r} has length {arr.shape[0]}, expected {dim}"
                )
            if not np.all(np.isfinite(arr)):
                raise ValueError(f"vector for token {token!r} contains non-finite values")
            if token in self._vectors:
                raise ValueError(f"duplicate token {token!r}")
            arr.flags.writeable = False
            self._vectors[token] = arr
        if dim is None:
            raise ValueError("a vector store must hold at least one entry")
        self._dimension = dim
        self._source_kind = source_kind
        self._metadata = dict(metadata or {})
        self._folded = {}
        for token in self._vectors:
            self._folded.setdefault(token.lower(), token)

    @property
    def dimension(self) -> int:
        return self._dimension

    @property
    def source_kind(self) -> str:
        return self._source_kind

    @property
    def metadata(self) -> dict[str, str]:
        return dict(self._metadata)

    def __len__(self) -> int:
        return len(self._vectors)

    def __contains__(self, token: str) -> bool:
        return token in self._vectors

    def tokens(self) -> list[str]:
        return list(self._vectors)

    def items(self) -> Iterator[tuple[str, np.ndarray]]:
        return iter(self._vectors.items())

    def get(self, token: str, fold_case: bool = True) -> np.ndarray | None:
        """Vector for ``token``, or the lowercase-folded match on miss, or None."""
        hit = self._vectors.get(token)
        if hit is not None or not fold_case:
            return hit
        folded = self._folded.get(token.lower())
        return self._vectors.get(folded) if folded is not None else None

    def __getitem__(self, token: str) -> np.ndarray:
        vec = self.get(token)
        if vec is None:
            raise KeyError(token)
        return vec

    def scaled(self, factor: float) -> "VectorStore":
        """Copy of the store with every vector multiplied by ``factor`` (test helper)."""
        return VectorStore(
            ((t, v * factor) for t, v in self.items()),
            source_kind=self._source_kind,
            metadata=self._metadata,
        )


@dataclass(frozen=True)
class ContextualVectorRecord:
    """One extractor output row: a term's vector under a given template."""

    term: str
    category: str
    template_id: str
    vector: tuple[float, ...]
    pooling: str

    def __post_init__(self):
        if not self.term:
            raise ValueError("contextual record has an empty term")
        if self.pooling not in POOLING_MODES:
            raise ValueError(f"unknown pooling mode {self.pooling!r}")


def _parse_header(line: str, path: Path) -> tuple[int, int]:
    parts = line.split()
    if len(parts) != 2:
        raise VectorFormatError(f"{path}: malformed header {line.strip()!r}, expected '<count> <dimension>'")
    try:
        count, dim = int(parts[0]), int(parts[1])
    except ValueError:
        raise VectorFormatError(f"{path}: malformed header {line.strip()!r}, expected two integers") from None
    if count < 1 or dim < 1:
        raise VectorFormatError(f"{path}: header declares count={count}, dimension={dim}; both must be >= 1")
    return count, dim


def load_word2vec_text(path: str | Path) -> VectorStore:
    """Parse a word2vec text file: '<count> <dim>' header then one token + floats per line."""
    path = Path(path)
    entries: list[tuple[str, np.ndarray]] = []
    seen: set[str] = set()
    with path.open("r", encoding="utf-8") as fin:
        header = fin.readline()
        if not header:
            raise VectorFormatError(f"{path}: empty file")
        count, dim = _parse_header(header, path)
        blank_at: int | None = None
        for lineno, line in enumerate(fin, start=2):
            if line.strip() == "":
                # tolerated only as trailing padding; remembered in case data follows
                if blank_at is None:
                    blank_at = lineno
                continue
            if blank_at is not None:
                raise VectorFormatError(f"{path}:{blank_at}: blank line inside vector block")
            parts = line.rstrip("\r\n").split(" ")
            if len(parts) != dim + 1:
                raise VectorFormatError(
                    f"{path}:{lineno}: line arity mismatch, expected token + {dim} floats, got {len(parts)} fields"
                )
            token = parts[0]
            if token in seen:
                raise VectorFormatError(f"{path}:{lineno}: duplicate token {token!r}")
            seen.add(token)
            try:
                vec = np.array(parts[1:], dtype=np.float64)
            except ValueError:
                raise VectorFormatError(f"{path}:{lineno}: unparseable float") from None
            if not np.all(np.isfinite(vec)):
                raise VectorFormatError(f"{path}:{lineno}: non-finite float for token {token!r}")
            entries.append((token, vec))
    if len(entries) != count:
        raise VectorFormatError(f"{path}: header declares {count} entries but file holds {len(entries)}")
    return VectorStore(entries, source_kind=SOURCE_STATIC, metadata={"format": "w2v-text", "path": str(path)})


def _read_binary_token(fin: IO[bytes], path: Path, record_no: int) -> str | None:
    """Token bytes up to a space/newline terminator; None at clean EOF."""
    chunks = []
    while True:
        ch = fin.read(1)
        if ch == b"":
            if chunks:
                raise VectorFormatError(
                    f"{path}: truncated record #{record_no} (EOF inside token {b''.join(chunks)!r})"
                )
            return None
        if ch in (b" ", b"\n"):
            if not chunks and ch == b"\n":
                continue  # newline padding between records
            break
        chunks.append(ch)
    try:
        return b"".join(chunks).decode("utf-8")
    except UnicodeDecodeError:
        raise VectorFormatError(f"{path}: record #{record_no} token is not valid UTF-8") from None


def load_word2vec_binary(path: str | Path) -> VectorStore:
    """Parse a word2vec binary file, streaming record by record.

    Records are a token terminated by a space (or newline), followed by
    ``dimension`` little-endian float32 values, optionally newline-terminated.
    """
    path = Path(path)
    entries: list[tuple[str, np.ndarray]] = []
    seen: set[str] = set()
    with path.open("rb") as fin:
        header = fin.readline()
        if not header:
            raise VectorFormatError(f"{path}: empty file")
        try:
            header_text = header.decode("utf-8")
        except UnicodeDecodeError:
            raise VectorFormatError(f"{path}: header is not valid UTF-8 text") from None
        count, dim = _parse_header(header_text, path)
        vec_bytes = dim * FLOAT_BYTES
        for record_no in range(1, count + 1):
            token = _read_binary_token(fin, path, record_no)
            if token is None:
                raise VectorFormatError(f"{path}: expected {count} records, file ended after {record_no - 1}")
            if token in seen:
                raise VectorFormatError(f"{path}: duplicate token {token!r} at record #{record_no}")
            seen.add(token)
            raw = fin.read(vec_bytes)
            if len(raw) != vec_bytes:
                raise VectorFormatError(
                    f"{path}: truncated record for token {token!r} ({len(raw)} of {vec_bytes} vector bytes)"
                )
            vec = np.frombuffer(raw, dtype="<f4").astype(np.float64)
            if not np.all(np.isfinite(vec)):
                raise VectorFormatError(f"{path}: non-finite float in vector for token {token!r}")
            entries.append((token, vec))
        trailer = fin.read()
        if trailer.strip(b"\n\r "):
            raise VectorFormatError(f"{path}: {len(trailer)} unexpected bytes beyond declared {count} records")
    return VectorStore(entries, source_kind=SOURCE_STATIC, metadata={"format": "w2v-bin", "path": str(path)})


def write_word2vec_text(store: VectorStore, path: str | Path) -> None:
    """Serialize to word2vec text; floats carry >= 9 significant digits."""
    if len(store) < 1:
        raise ValueError("refusing to write an empty vector store")
    path = Path(path)
    with path.open("w", encoding="utf-8", newline="\n") as fout:
        fout.write(f"{len(store)} {store.dimension}\n")
        for token, vec in store.items():
            comps = " ".join(format(x, TEXT_FLOAT_FORMAT) for x in vec)
            fout.write(f"{token} {comps}\n")


def write_word2vec_binary(store: VectorStore, path: str | Path) -> None:
    """Serialize to word2vec binary (little-endian float32, newline-terminated records)."""
    if len(store) < 1:
        raise ValueError("refusing to write an empty vector store")
    path = Path(path)
    with path.open("wb") as fout:
        fout.write(f"{len(store)} {store.dimension}\n".encode("utf-8"))
        for token, vec in store.items():
            fout.write(token.encode("utf-8"))
            fout.write(b" ")
            fout.write(np.asarray(vec, dtype="<f4").tobytes())
            fout.write(b"\n")


_NDJSON_REQUIRED = {"term": str, "category": str, "template_id": str, "pooling": str}


def parse_contextual_record(obj: object, where: str) -> ContextualVectorRecord:
    """Validate one NDJSON object against the contextual record schema."""
    if not isinstance(obj, dict):
        raise VectorFormatError(f"{where}: record is not a JSON object")
    for key, typ in _NDJSON_REQUIRED.items():
        if key not in obj:
            raise VectorFormatError(f"{where}: missing field {key!r}")
        if not isinstance(obj[key], typ):
            raise VectorFormatError(f"{where}: field {key!r} must be a string")
    vec = obj.get("vector")
    if not isinstance(vec, list) or not vec:
        raise VectorFormatError(f"{where}: field 'vector' must be a nonempty array of numbers")
    values = []
    for x in vec:
        if isinstance(x, bool) or not isinstance(x, (int, float)):
            raise VectorFormatError(f"{where}: field 'vector' must contain only numbers")
        values.append(float(x))
    if not all(np.isfinite(values)):
        raise VectorFormatError(f"{where}: non-finite value in 'vector'")
    if obj["pooling"] not in POOLING_MODES:
        raise VectorFormatError(f"{where}: unknown pooling {obj['pooling']!r}")
    if not obj["term"]:
        raise VectorFormatError(f"{where}: empty term")
    return ContextualVectorRecord(
        term=obj["term"],
        category=obj["category"],
        template_id=obj["template_id"],
        vector=tuple(values),
        pooling=obj["pooling"],
    )


def read_contextual_records(path: str | Path) -> list[ContextualVectorRecord]:
    """Read and validate every record of a contextual NDJSON file."""
    path = Path(path)
    records: list[ContextualVectorRecord] = []
    with path.open("r", encoding="utf-8") as fin:
        for lineno, line in enumerate(fin, start=1):
            if line.strip() == "":
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                raise VectorFormatError(f"{path}:{lineno}: invalid JSON ({exc.msg})") from None
            records.append(parse_contextual_record(obj, f"{path}:{lineno}"))
    if not records:
        raise VectorFormatError(f"{path}: no records")
    return records


def load_contextual_ndjson(path: str | Path) -> VectorStore:
    """Load extractor NDJSON output into a contextual VectorStore keyed by term."""
    path = Path(path)
    records = read_contextual_records(path)
    dim = len(records[0].vector)
    entries: list[tuple[str, tuple[float, ...]]] = []
    seen: dict[tuple[str, str], int] = {}
    seen_terms: dict[str, str] = {}
    poolings: list[str] = []
    templates: list[str] = []
    for i, rec in enumerate(records, start=1):
        if len(rec.vector) != dim:
            raise VectorFormatError(
                f"{path}: record #{i} has vector length {len(rec.vector)}, expected {dim}"
            )
        key = (rec.term, rec.template_id)
        if key in seen:
            raise VectorFormatError(
                f"{path}: duplicate (term, template_id) = ({rec.term!r}, {rec.template_id!r}) "
                f"at records #{seen[key]} and #{i}"
            )
        seen[key] = i
        if rec.term in seen_terms:
            raise VectorFormatError(
                f"{path}: term {rec.term!r} appears under templates "
                f"{seen_terms[rec.term]!r} and {rec.template_id!r}; tokens must be unique in a store"
            )
        seen_terms[rec.term] = rec.template_id
        entries.append((rec.term, rec.vector))
        if rec.pooling not in poolings:
            poolings.append(rec.pooling)
        if rec.template_id not in templates:
            templates.append(rec.template_id)
    metadata = {
        "format": "ndjson",
        "path": str(path),
        "poolings": ",".join(poolings),
        "templates": ",".join(templates),
    }
    return VectorStore(entries, source_kind=SOURCE_CONTEXTUAL, metadata=metadata)


def write_contextual_ndjson(records: Iterable[ContextualVectorRecord], path: str | Path) -> None:
    """One JSON object per line, UTF-8, fields in schema order."""
    path = Path(path)
    with path.open("w", encoding="utf-8", newline="\n") as fout:
        for rec in records:
            fout.write(
                json.dumps(
                    {
                        "term": rec.term,
                        "category": rec.category,
                        "template_id": rec.template_id,
                        "vector": list(rec.vector),
                        "pooling": rec.pooling,
                    },
                    ensure_ascii=False,
                )
            )
            fout.write("\n")
