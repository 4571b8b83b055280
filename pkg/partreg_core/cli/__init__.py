"""
CLI: Command-line interface for partreg-core.
"""

__all__ = ["main"]


def __getattr__(name):
    # __main__ loads on first use; `python -m partreg_core.cli` must find it unimported
    if name == "main":
        from partreg_core.cli.__main__ import main

        return main
    raise AttributeError(f"module {__name__!r} has no attribute {name!r}")
