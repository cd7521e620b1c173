"""
FixCert - common fixed point certification toolkit

Executable machinery for Jungck-type iterations on ordered metric spaces:
locating coincidence and common fixed points, certifying theorem hypotheses
on concrete spaces, and checking implicit-contraction conditions.

Architecture:
- api/: REST route handlers (thin layer over services)
- services/: checks, solver, certifier, config ingestion, rendering
- repositories/: built-in implicit-contraction catalog
- models/: immutable domain types (spaces, mappings, contractions)
- schemas/: Pydantic documents (config blocks, reports, traces)
- core/: shared infrastructure (config, exceptions, logging, expressions)
"""

__version__ = "1.0.0"
__author__ = "FixCert Team"
