import sys
from pathlib import Path

try:
    import ringsr  # noqa: F401
except ImportError:  # run straight from a checkout without installing
    sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "src"))
