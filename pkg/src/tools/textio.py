"""
Text formats for matrices, codes, point sets and distributions.

Matrix files start with a header ``# q=<q> m=<m> n=<n> [poly=c0,c1,...]``
followed by matrices of m lines of n element indices, one blank line
between matrices. Distribution files put a weight line ``w <num>/<den>``
at the top of every matrix block. Codes get a JSON sidecar next to the
matrix file.
"""

from fractions import Fraction
from pathlib import Path
from typing import Iterable, List, Optional, Sequence, Tuple, Union
import json
import logging
import re

from src.algebra.gf import FieldSpec, field_from_order
from src.algebra.matrix import Mat
from src.codes.distributions import MatrixDistribution
from src.codes.rank_metric import MatrixCode, is_mrd
from src.errors import FormatError, MrdLabError

logger = logging.getLogger(__name__)

PathLike = Union[str, Path]

HEADER_RE = re.compile(r"^#\s*q=(\d+)\s+m=(\d+)\s+n=(\d+)(?:\s+poly=([\d,]+))?\s*$")
WEIGHT_RE = re.compile(r"^w\s+(\d+)(?:/(\d+))?\s*$")


def header(field: FieldSpec, m: int, n: int) -> str:
    line = f"# q={field.q} m={m} n={n}"
    if not field.is_prime_field:
        line += f" poly={field.poly_string()}"
    return line


def _parse_header(line: str) -> Tuple[FieldSpec, int, int]:
    match = HEADER_RE.match(line.strip())
    if not match:
        raise FormatError(f"line 1: expected '# q=<q> m=<m> n=<n> [poly=...]', got {line.strip()!r}")
    q, m, n, poly = match.groups()
    modulus = [int(c) for c in poly.split(",")] if poly else None
    try:
        field = field_from_order(int(q), modulus)
    except MrdLabError as e:
        raise FormatError(f"line 1: {e.message}") from e
    return field, int(m), int(n)


def _blocks(lines: List[str]) -> Iterable[Tuple[int, List[str]]]:
    """(first line number, lines) of every blank-line separated block after the header."""
    block: List[str] = []
    start = 0
    for number, line in enumerate(lines[1:], start=2):
        if line.strip():
            if not block:
                start = number
            block.append(line)
        elif block:
            yield start, block
            block = []
    if block:
        yield start, block


def _parse_matrix(rows: List[str], first_line: int, field: FieldSpec, m: int, n: int) -> Mat:
    if len(rows) != m:
        raise FormatError(f"line {first_line}: matrix has {len(rows)} rows, expected {m}")
    entries = []
    for offset, row in enumerate(rows):
        tokens = row.split()
        if len(tokens) != n or not all(t.isdigit() for t in tokens):
            raise FormatError(f"line {first_line + offset}: expected {n} element indices, got {row.strip()!r}")
        values = [int(t) for t in tokens]
        if any(v >= field.q for v in values):
            raise FormatError(f"line {first_line + offset}: element outside GF({field.q})")
        entries.extend(values)
    return Mat(field, m, n, tuple(entries))


def _format_matrix(X: Mat) -> str:
    return "\n".join(" ".join(str(x) for x in row) for row in X.rows())


# Matrices

def dumps_matrices(matrices: Iterable[Mat], field: Optional[FieldSpec] = None, shape: Optional[Tuple[int, int]] = None) -> str:
    mats = list(matrices)
    if mats:
        field, (m, n) = mats[0].field, mats[0].shape
    elif field is None or shape is None:
        raise FormatError("an empty matrix file needs an explicit field and shape")
    else:
        m, n = shape
    parts = [header(field, m, n)]
    body = "\n\n".join(_format_matrix(X) for X in mats)
    if body:
        parts.append(body)
    return "\n".join(parts) + "\n"


def loads_matrices(text: str) -> Tuple[FieldSpec, int, int, List[Mat]]:
    lines = text.splitlines()
    if not lines:
        raise FormatError("empty matrix file")
    field, m, n = _parse_header(lines[0])
    matrices = [_parse_matrix(rows, start, field, m, n) for start, rows in _blocks(lines)]
    return field, m, n, matrices


def write_matrices(path: PathLike, matrices: Iterable[Mat]) -> Path:
    path = Path(path)
    path.write_text(dumps_matrices(matrices), encoding="ascii", newline="\n")
    logger.debug(f"Wrote matrices to {path}")
    return path


def read_matrices(path: PathLike) -> Tuple[FieldSpec, int, int, List[Mat]]:
    path = Path(path)
    try:
        text = path.read_text(encoding="ascii")
    except (OSError, UnicodeDecodeError) as e:
        raise FormatError(f"cannot read {path}: {e}") from e
    return loads_matrices(text)


# Codes

def code_sidecar(code: MatrixCode, k: Optional[int] = None) -> dict:
    first = code.codewords[0]
    sidecar = {
        "m": first.m,
        "n": first.n,
        "q": first.field.q,
        "k": k,
        "size": len(code),
        "rank_distance": code.rank_distance if len(code) > 1 else None,
        "linear": code.is_linear,
        "is_mrd": None,
    }
    if k is not None:
        sidecar["is_mrd"] = bool(is_mrd(code, k))
    return sidecar


def write_code(path: PathLike, code: MatrixCode, k: Optional[int] = None) -> Tuple[Path, Path]:
    """Write the matrix file and ``<path>.json`` beside it."""
    path = write_matrices(path, code.codewords)
    sidecar_path = path.with_name(path.name + ".json")
    sidecar_path.write_text(json.dumps(code_sidecar(code, k), indent=2) + "\n", encoding="ascii")
    logger.info(f"Code of size {len(code)} saved to {path}")
    return path, sidecar_path


def read_code(path: PathLike) -> MatrixCode:
    _, _, _, matrices = read_matrices(path)
    if not matrices:
        raise FormatError(f"{path}: no codewords")
    return MatrixCode(matrices)


# Distributions

def dumps_distribution(D: MatrixDistribution) -> str:
    blocks = [f"w {w.numerator}/{w.denominator}\n{_format_matrix(X)}" for X, w in D.items()]
    return header(D.field, D.m, D.n) + "\n" + "\n\n".join(blocks) + "\n"


def loads_distribution(text: str) -> MatrixDistribution:
    lines = text.splitlines()
    if not lines:
        raise FormatError("empty distribution file")
    field, m, n = _parse_header(lines[0])
    weights = {}
    for start, rows in _blocks(lines):
        match = WEIGHT_RE.match(rows[0].strip())
        if not match:
            raise FormatError(f"line {start}: expected a weight line 'w <num>/<den>'")
        num, den = match.groups()
        if den is not None and int(den) == 0:
            raise FormatError(f"line {start}: zero denominator")
        X = _parse_matrix(rows[1:], start + 1, field, m, n)
        if X in weights:
            raise FormatError(f"line {start + 1}: matrix listed twice")
        weights[X] = Fraction(int(num), int(den or 1))
    try:
        return MatrixDistribution(weights)
    except MrdLabError as e:
        raise FormatError(f"invalid distribution: {e.message}") from e


def write_distribution(path: PathLike, D: MatrixDistribution) -> Path:
    path = Path(path)
    path.write_text(dumps_distribution(D), encoding="ascii", newline="\n")
    return path


def read_distribution(path: PathLike) -> MatrixDistribution:
    path = Path(path)
    try:
        text = path.read_text(encoding="ascii")
    except (OSError, UnicodeDecodeError) as e:
        raise FormatError(f"cannot read {path}: {e}") from e
    return loads_distribution(text)


# Vectors

def loads_vectors(text: str, q: int) -> List[Tuple[int, ...]]:
    """One vector per non-blank, non-comment line of element indices."""
    vectors = []
    length = None
    for number, line in enumerate(text.splitlines(), start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        tokens = stripped.split()
        if not all(t.isdigit() for t in tokens):
            raise FormatError(f"line {number}: expected element indices, got {stripped!r}")
        v = tuple(int(t) for t in tokens)
        if any(x >= q for x in v):
            raise FormatError(f"line {number}: element outside GF({q})")
        if length is not None and len(v) != length:
            raise FormatError(f"line {number}: vector of length {len(v)}, expected {length}")
        length = len(v)
        vectors.append(v)
    return vectors


def read_vectors(path: PathLike, q: int) -> List[Tuple[int, ...]]:
    path = Path(path)
    try:
        text = path.read_text(encoding="ascii")
    except (OSError, UnicodeDecodeError) as e:
        raise FormatError(f"cannot read {path}: {e}") from e
    return loads_vectors(text, q)


def dumps_vectors(vectors: Iterable[Sequence[int]]) -> str:
    return "".join(" ".join(str(x) for x in v) + "\n" for v in vectors)
