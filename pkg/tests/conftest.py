"""Pytest configuration and shared fixtures."""

import json
import shutil
import tempfile
from collections.abc import Callable, Generator, Iterable
from pathlib import Path

import pytest

from homclosure.core.signature import Signature
from homclosure.core.structure import Structure

DigraphFactory = Callable[[int, Iterable[tuple[int, int]]], Structure]


@pytest.fixture
def temp_dir() -> Generator[Path, None, None]:
    """Create temporary directory for input files."""
    temp = tempfile.mkdtemp()
    yield Path(temp)
    shutil.rmtree(temp)


@pytest.fixture
def write_file(temp_dir: Path) -> Callable[[str, str], Path]:
    """Factory writing text into the temporary directory."""

    def _write(name: str, content: str) -> Path:
        path = temp_dir / name
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(content, encoding="utf-8")
        return path

    return _write


# Signatures and structures


@pytest.fixture
def digraph_sig() -> Signature:
    """Signature with a single binary predicate P."""
    return Signature.build({"P": 2})


@pytest.fixture
def digraph(digraph_sig: Signature) -> DigraphFactory:
    """Factory for directed graphs over P."""

    def _make(size: int, edges: Iterable[tuple[int, int]]) -> Structure:
        return Structure.build(digraph_sig, size, relations={"P": list(edges)})

    return _make


@pytest.fixture
def loop(digraph: DigraphFactory) -> Structure:
    """One element with a P-loop."""
    return digraph(1, [(0, 0)])


@pytest.fixture
def two_cycle(digraph: DigraphFactory) -> Structure:
    """Directed 2-cycle."""
    return digraph(2, [(0, 1), (1, 0)])


@pytest.fixture
def two_path(digraph: DigraphFactory) -> Structure:
    """Single directed edge."""
    return digraph(2, [(0, 1)])


@pytest.fixture
def isolated_points(digraph: DigraphFactory) -> Structure:
    """Two elements without edges."""
    return digraph(2, [])


@pytest.fixture
def edge_sig() -> Signature:
    """Signature of undirected graphs."""
    return Signature.build({"E": 2})


@pytest.fixture
def clique(edge_sig: Signature) -> Callable[[int], Structure]:
    """Factory for complete loop-free graphs K_n."""

    def _make(n: int) -> Structure:
        edges = [(i, j) for i in range(n) for j in range(n) if i != j]
        return Structure.build(edge_sig, n, relations={"E": edges})

    return _make


@pytest.fixture
def cycle(edge_sig: Signature) -> Callable[[int], Structure]:
    """Factory for undirected cycles C_n."""

    def _make(n: int) -> Structure:
        edges = [(i, (i + 1) % n) for i in range(n)]
        edges += [(b, a) for a, b in edges]
        return Structure.build(edge_sig, n, relations={"E": edges})

    return _make


# Sentences


@pytest.fixture
def phi_infinity() -> str:
    """Every element has a P-successor."""
    return "sig { P/2; } forall x. exists y. P(x, y)"


@pytest.fixture
def two_elements() -> str:
    """The domain has at least two elements."""
    return "sig { P/2; } exists x y. x != y"


@pytest.fixture
def cul_de_sac() -> str:
    """Some element lies outside the least fixpoint of dead ends."""
    return (
        "sig { P/2; } exists x. !(lfp Cds(z) := forall y. (P(z, y) -> Cds(y)) in Cds(x))"
    )


@pytest.fixture
def phi_exists_p() -> str:
    """Some element is in the unary predicate P."""
    return "sig { P/1; } exists x. P(x)"


# Domino systems


@pytest.fixture
def loop_dominoes() -> dict[str, object]:
    """One tile allowed everywhere."""
    return {"tiles": ["a"], "B": ["a"], "L": ["a"], "H": [["a", "a"]], "V": [["a", "a"]]}


@pytest.fixture
def stuck_dominoes() -> dict[str, object]:
    """One tile that never has a right neighbor."""
    return {"tiles": ["a"], "B": ["a"], "L": ["a"], "H": [], "V": [["a", "a"]]}


@pytest.fixture
def dominoes_file(
    write_file: Callable[[str, str], Path], loop_dominoes: dict[str, object]
) -> Path:
    """Domino record for the single-tile system."""
    return write_file("dominoes.json", json.dumps(loop_dominoes) + "\n")


@pytest.fixture
def settings_yaml() -> str:
    """Return a valid settings file."""
    return """max_so_cells: 16
default_max_size: 2
log_level: INFO
"""


@pytest.fixture
def checker_dominoes() -> dict[str, object]:
    """Two tiles alternating in both directions, both allowed in the corner."""
    return {
        "tiles": ["a", "b"],
        "B": ["a", "b"],
        "L": ["a", "b"],
        "H": [["a", "b"], ["b", "a"]],
        "V": [["a", "b"], ["b", "a"]],
    }


@pytest.fixture
def fixtures_dir() -> Path:
    """Directory of sentence, structure, domino and clause files."""
    return Path(__file__).parent / "fixtures"
