"""Lattice sources, file formats, reports, batch runs and polygon output."""
from .base_source import BaseLatticeSource, LatticeEntry
from .catalog import CatalogSource, catalog, catalog_entries
from .file_source import FileSource, emit_lattice, parse_lattice, read_lattice_file, write_lattice_file
from .resolver import LatticeResolver, resolve_lattice
from .reports import ReportDocument, ReportWriter, reload_and_reverify

__all__ = [
    "BaseLatticeSource",
    "LatticeEntry",
    "CatalogSource",
    "catalog",
    "catalog_entries",
    "FileSource",
    "emit_lattice",
    "parse_lattice",
    "read_lattice_file",
    "write_lattice_file",
    "LatticeResolver",
    "resolve_lattice",
    "ReportDocument",
    "ReportWriter",
    "reload_and_reverify",
]
