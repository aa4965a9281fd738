"""Stability certification for 1-D PDE/ODE interconnections.

The C++ extension carries the pipeline; this package re-exports it.
"""

try:
    from ._pistab import (  # noqa: F401
        ParseError,
        SolverError,
        ValidationError,
        analyze_file,
        assemble_file,
        simulate_file,
        sweep_file,
        validate_file,
        __version__,
    )
except ImportError:  # running against a build tree with the extension on sys.path
    from _pistab import (  # noqa: F401
        ParseError,
        SolverError,
        ValidationError,
        analyze_file,
        assemble_file,
        simulate_file,
        sweep_file,
        validate_file,
        __version__,
    )

__all__ = [
    "ParseError",
    "SolverError",
    "ValidationError",
    "analyze_file",
    "assemble_file",
    "simulate_file",
    "sweep_file",
    "validate_file",
    "__version__",
]
