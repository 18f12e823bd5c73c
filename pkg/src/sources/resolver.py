"""
Resolve lattice references against every source.

A reference naming an existing file is read from disk; anything else is
looked up in the catalog.
"""
from pathlib import Path
from typing import Dict, List, Optional
import logging

from src.lattice.gram import GramLattice
from .base_source import BaseLatticeSource, LatticeEntry
from .catalog import get_catalog
from .file_source import FileSource

logger = logging.getLogger(__name__)


class LatticeResolver:
    """Catalog names and lattice files behind one lookup."""

    def __init__(self, root: str = "."):
        self.sources: Dict[str, BaseLatticeSource] = {
            "catalog": get_catalog(),
            "file": FileSource(root),
        }

    def get_available_sources(self) -> List[str]:
        return list(self.sources.keys())

    def source_for(self, reference: str) -> BaseLatticeSource:
        file_source = self.sources["file"]
        candidate = Path(reference)
        if not candidate.is_absolute():
            candidate = file_source.root / candidate
        if candidate.is_file() or reference.endswith(".json"):
            return file_source
        return self.sources["catalog"]

    def fetch(self, reference: str) -> LatticeEntry:
        """
        Raises:
            UnknownCatalogEntry: neither a file nor a catalog name
            ParseError: an invalid lattice file
        """
        source = self.source_for(reference)
        entry = source.fetch(reference)
        logger.debug(f"Resolved {reference!r} via {source.get_source_name()}")
        return entry


_resolver: Optional[LatticeResolver] = None


def resolve_lattice(reference: str) -> GramLattice:
    """Catalog name or path to a lattice file."""
    global _resolver
    if _resolver is None:
        _resolver = LatticeResolver()
    return _resolver.fetch(reference).lattice
