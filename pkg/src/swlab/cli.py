"""CLI module; the argument handling lives in the top-level ``swlab_cli``
shim so thread caps can be applied before numpy loads.  Importable here for
``python -m swlab.cli`` and for tests.
"""

from swlab_cli import (EXIT_CONFIG_ERROR, EXIT_PASS, EXIT_RUNTIME_ERROR,
                       EXIT_THRESHOLD_FAIL, build_parser, dispatch, main)

__all__ = ["main", "dispatch", "build_parser", "EXIT_PASS",
           "EXIT_THRESHOLD_FAIL", "EXIT_CONFIG_ERROR", "EXIT_RUNTIME_ERROR"]

if __name__ == "__main__":
    raise SystemExit(main())
