import pathlib
import sys

# Allow running the tests from a source checkout without installing; an
# in-place extension build (setup.py build_ext --inplace) is picked up too.
_src = pathlib.Path(__file__).resolve().parent / "src"
if str(_src) not in sys.path:
    sys.path.insert(0, str(_src))
