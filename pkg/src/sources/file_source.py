"""
Lattice files.

UTF-8 JSON with fields name, rank and gram; Gram entries are decimal
strings "p" or "p/q" so no value passes through a float:

    {"name": "A2", "rank": 2, "gram": [["2", "1"], ["1", "2"]]}

Diagnostics give 1-based row and column positions.
"""
import json
import logging
from fractions import Fraction
from pathlib import Path
from typing import Any, Dict, List, Optional, Union

from src.core.rational import format_matrix
from src.lattice.gram import GramLattice, make_lattice
from src.utils.errors import ParseError
from .base_source import BaseLatticeSource, LatticeEntry

logger = logging.getLogger(__name__)

PathLike = Union[str, Path]


def _entry(value: Any, row: int, col: int) -> Fraction:
    if isinstance(value, bool) or isinstance(value, float):
        raise ParseError(f"Gram entry {value!r} must be an integer or a \"p/q\" string", row, col)
    if isinstance(value, int):
        return Fraction(value)
    if not isinstance(value, str):
        raise ParseError(f"Gram entry {value!r} is not a rational", row, col)
    try:
        return Fraction(value.strip())
    except (ValueError, ZeroDivisionError):
        raise ParseError(f"malformed rational {value!r}", row, col) from None


def lattice_from_dict(data: Any) -> GramLattice:
    """
    Validate a decoded lattice document.

    Raises:
        ParseError: missing fields, wrong shape, malformed or asymmetric entries
        DefinitenessError: the Gram matrix is not positive definite
    """
    if not isinstance(data, dict):
        raise ParseError("lattice document must be a JSON object")
    rows = data.get("gram")
    if not isinstance(rows, list) or not rows:
        raise ParseError("field 'gram' must be a non-empty list of rows")
    n = len(rows)
    rank = data.get("rank", n)
    if not isinstance(rank, int) or isinstance(rank, bool) or rank != n:
        raise ParseError(f"field 'rank' is {rank!r} but the Gram matrix has {n} rows")

    gram: List[List[Fraction]] = []
    for i, row in enumerate(rows, start=1):
        if not isinstance(row, list) or len(row) != n:
            raise ParseError(f"Gram row must have {n} entries", row=i)
        gram.append([_entry(x, i, j) for j, x in enumerate(row, start=1)])

    for i in range(n):
        for j in range(i + 1, n):
            if gram[i][j] != gram[j][i]:
                raise ParseError(
                    f"Gram matrix is not symmetric: {gram[i][j]} vs {gram[j][i]}", row=i + 1, col=j + 1
                )

    name = data.get("name")
    if name is not None and not isinstance(name, str):
        raise ParseError("field 'name' must be a string")
    return make_lattice(gram, name)


def lattice_to_dict(lattice: GramLattice, name: Optional[str] = None) -> Dict[str, Any]:
    return {
        "name": name or lattice.label or "lattice",
        "rank": lattice.rank,
        "gram": format_matrix(lattice.gram),
    }


def parse_lattice(text: str) -> GramLattice:
    """
    Parse a lattice file.

    Raises:
        ParseError: invalid JSON or an invalid document
        DefinitenessError: the Gram matrix is not positive definite
    """
    try:
        data = json.loads(text)
    except json.JSONDecodeError as e:
        raise ParseError(f"invalid JSON at line {e.lineno}, column {e.colno}: {e.msg}") from None
    return lattice_from_dict(data)


def emit_lattice(lattice: GramLattice, name: Optional[str] = None) -> str:
    """Serialize so that parse_lattice gives back the same Gram matrix exactly."""
    return json.dumps(lattice_to_dict(lattice, name), indent=2) + "\n"


def read_lattice_file(path: PathLike) -> GramLattice:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as e:
        raise ParseError(f"cannot read {path}: {e.strerror}") from None
    lattice = parse_lattice(text)
    return lattice if lattice.label else lattice.named(path.stem)


def write_lattice_file(path: PathLike, lattice: GramLattice, name: Optional[str] = None) -> None:
    Path(path).write_text(emit_lattice(lattice, name), encoding="utf-8")
    logger.info(f"Wrote lattice to {path}")


class FileSource(BaseLatticeSource):
    """Lattice files below a directory."""

    def __init__(self, root: PathLike = "."):
        self.root = Path(root)

    def get_source_name(self) -> str:
        return "file"

    def available(self) -> List[str]:
        if not self.root.is_dir():
            return []
        return sorted(str(p.relative_to(self.root)) for p in self.root.glob("*.json"))

    def fetch(self, reference: str) -> LatticeEntry:
        path = Path(reference)
        if not path.is_absolute():
            path = self.root / path
        lattice = read_lattice_file(path)
        return LatticeEntry(lattice.label, lattice, str(path), self.get_source_name())
