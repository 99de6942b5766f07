"""Built-in example systems, loadable as ``corpus:<name>``."""

from __future__ import annotations

from importlib import resources

from ..errors import ForestlabError
from ..spec.parser import parse_system
from ..spec.system import ComptonSystem

# corpus name -> (tree-class expression used for the forest checks)
TREE_CLASSES = {
    "alltrees": "All",
    "linear": "Lin",
    "height1": "H1",
    "binary": "Bin",
    "evenchains": "Even",
    "bamboo": "Bamboo",
}

NAMES = tuple(TREE_CLASSES)


def source(name: str) -> str:
    if name not in TREE_CLASSES:
        raise ForestlabError(f"no corpus system named '{name}'")
    return resources.files(__package__).joinpath(f"{name}.fst").read_text(encoding="utf-8")


def load(name: str) -> ComptonSystem:
    return parse_system(source(name))


def load_all() -> dict[str, ComptonSystem]:
    return {name: load(name) for name in NAMES}
