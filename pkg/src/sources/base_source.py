"""
Base abstract class for lattice sources.

A source turns a reference (a catalog name, a file path) into a GramLattice
together with a short description of where it came from.
"""
from abc import ABC, abstractmethod
from dataclasses import dataclass
from typing import Any, Dict, List
import logging

from src.core.rational import format_matrix
from src.lattice.gram import GramLattice

logger = logging.getLogger(__name__)


@dataclass
class LatticeEntry:
    """A lattice with provenance."""
    name: str
    lattice: GramLattice
    description: str = ""
    source: str = ""  # catalog, file

    def to_dict(self) -> Dict[str, Any]:
        return {
            "name": self.name,
            "rank": self.lattice.rank,
            "det": str(self.lattice.det),
            "description": self.description,
            "source": self.source,
            "gram": format_matrix(self.lattice.gram),
        }


class BaseLatticeSource(ABC):
    """Abstract base class for lattice sources."""

    @abstractmethod
    def available(self) -> List[str]:
        """
        Names this source can resolve without further input.

        Returns:
            Sorted list of names (may be empty)
        """
        pass

    @abstractmethod
    def fetch(self, reference: str) -> LatticeEntry:
        """
        Resolve a reference.

        Args:
            reference: Source-specific reference

        Returns:
            LatticeEntry
        """
        pass

    @abstractmethod
    def get_source_name(self) -> str:
        """
        Returns:
            Source name ("catalog", "file")
        """
        pass

    def load(self, reference: str) -> GramLattice:
        """Resolve a reference to its lattice, labelled by the entry name."""
        entry = self.fetch(reference)
        logger.debug(f"{self.get_source_name()}: loaded {entry.name} (rank {entry.lattice.rank})")
        return entry.lattice

    def describe(self, reference: str) -> str:
        entry = self.fetch(reference)
        lattice = entry.lattice
        text = f"{entry.name}: rank {lattice.rank}, det {lattice.det}"
        if entry.description:
            text += f" ({entry.description})"
        return text
