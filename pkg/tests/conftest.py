import shutil
import sys
from pathlib import Path

import pytest

HERE = Path(__file__).parent
CORPUS = HERE / "corpus"
sys.path.insert(0, str(HERE))


def corpus_text(kind: str, name: str) -> str:
    return (CORPUS / kind / f"{name}.loc").read_text(encoding="utf-8")


needs_solver = pytest.mark.skipif(shutil.which("z3") is None, reason="z3 not on PATH")


@pytest.fixture
def copy_problem(tmp_path):
    """Copy a corpus file into a scratch directory so .smt2 output lands there."""
    def _copy(kind: str, name: str) -> Path:
        dst = tmp_path / f"{name}.loc"
        dst.write_text(corpus_text(kind, name), encoding="utf-8")
        return dst
    return _copy
