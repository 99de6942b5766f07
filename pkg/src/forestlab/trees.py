"""Canonical unordered rooted trees, forests and tree modules.

This module is the brute-force side of every counting check: it enumerates
trees explicitly and decides class membership by direct matching, sharing no
code with the generating-function evaluators.

Trees are canonical: children are kept sorted by ``(size, encoding)`` where the
encoding is the balanced-parenthesis string, ``()`` for the one-node tree.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from functools import reduce
from typing import Iterable, Iterator, Sequence

from .errors import ParseError, ResourceBoundError
from .spec.system import ComptonSystem, Multiset, NodeClass, Ref, RootAppend, Sum, Union

DEFAULT_MAX_SIZE = 16


class RootedTree:
    __slots__ = ("children", "encoding", "size")

    def __init__(self, children: Iterable["RootedTree"] = ()):
        kids = tuple(sorted(children, key=_sort_key))
        self.children = kids
        self.encoding = "(" + "".join(c.encoding for c in kids) + ")"
        self.size = 1 + sum(c.size for c in kids)

    def __eq__(self, other) -> bool:
        return isinstance(other, RootedTree) and self.encoding == other.encoding

    def __hash__(self) -> int:
        return hash(self.encoding)

    def __lt__(self, other: "RootedTree") -> bool:
        return _sort_key(self) < _sort_key(other)

    def __repr__(self) -> str:
        return f"RootedTree({self.encoding!r})"

    def __str__(self) -> str:
        return self.encoding

    @property
    def is_leaf(self) -> bool:
        return not self.children

    def height(self) -> int:
        return 0 if not self.children else 1 + max(c.height() for c in self.children)


def _sort_key(t: RootedTree):
    return (t.size, t.encoding)


NODE = RootedTree()


def chain(n: int) -> RootedTree:
    """The linear tree with ``n`` nodes."""
    if n < 1:
        raise ValueError("a chain needs at least one node")
    t = NODE
    for _ in range(n - 1):
        t = RootedTree([t])
    return t


def _parse_raw(text: str):
    """Nested lists in literal order; raises ParseError."""
    text = "".join(text.split())
    stack: list[list] = []
    root = None
    for pos, ch in enumerate(text):
        if ch == "(":
            node: list = []
            if stack:
                stack[-1].append(node)
            elif root is not None:
                raise ParseError("more than one tree in literal", 1, pos + 1)
            else:
                root = node
            stack.append(node)
        elif ch == ")":
            if not stack:
                raise ParseError("unbalanced ')'", 1, pos + 1)
            stack.pop()
        else:
            raise ParseError(f"unexpected character {ch!r} in tree literal", 1, pos + 1)
    if stack or root is None:
        raise ParseError("unbalanced or empty tree literal", 1, len(text) + 1)
    return root


def _from_raw(raw) -> RootedTree:
    return RootedTree(_from_raw(c) for c in raw)


def parse_tree(text: str) -> RootedTree:
    """Parse a literal like ``(()())``; child order in the literal is irrelevant."""
    return _from_raw(_parse_raw(text))


@dataclass(frozen=True)
class Forest:
    trees: tuple[RootedTree, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "trees", tuple(sorted(self.trees, key=_sort_key)))

    @property
    def size(self) -> int:
        return sum(t.size for t in self.trees)

    def __len__(self) -> int:
        return len(self.trees)

    def __str__(self) -> str:
        return "".join(t.encoding for t in self.trees)


def root_append(forest: Forest | Iterable[RootedTree]) -> RootedTree:
    """``• / F``: a new root above every component of ``F``."""
    trees = forest.trees if isinstance(forest, Forest) else tuple(forest)
    return RootedTree(trees)


def _check_path(t: RootedTree, path: Sequence[int]) -> None:
    node = t
    for i in path:
        if not 0 <= i < len(node.children):
            raise ValueError(f"invalid path {tuple(path)} in {t.encoding}")
        node = node.children[i]


def full_subtree(t: RootedTree, path: Sequence[int]) -> RootedTree:
    """``T[v]`` for the node ``v`` reached by following child indices."""
    _check_path(t, path)
    for i in path:
        t = t.children[i]
    return t


def _graft(t: RootedTree, path: Sequence[int], s: RootedTree, inner: tuple) -> tuple[RootedTree, tuple]:
    """Replace ``T[path]`` by ``s``; return the new tree and the canonical path to ``s``'s marked node."""
    if not path:
        return s, inner
    i = path[0]
    child, sub = _graft(t.children[i], path[1:], s, inner)
    kids = list(t.children)
    kids[i] = child
    new = RootedTree(kids)
    return new, (new.children.index(child),) + sub


def replace_subtree(t: RootedTree, path: Sequence[int], s: RootedTree) -> RootedTree:
    """``T[v / S]``, re-canonicalised."""
    _check_path(t, path)
    return _graft(t, tuple(path), s, ())[0]


# modules -------------------------------------------------------------------


def _canonical_path(t: RootedTree, path: Sequence[int]) -> tuple[int, ...]:
    out = []
    for i in path:
        child = t.children[i]
        out.append(t.children.index(child))
        t = child
    return tuple(out)


@dataclass(frozen=True)
class TreeModule:
    """A tree with a designated leaf; ``|M| = |T| - 1``.

    Among isomorphic siblings the path always takes the first, so equal
    modules compare equal.
    """

    tree: RootedTree
    leaf_path: tuple[int, ...] = ()

    def __post_init__(self):
        path = tuple(self.leaf_path)
        _check_path(self.tree, path)
        if not full_subtree(self.tree, path).is_leaf:
            raise ValueError(f"path {path} does not address a leaf of {self.tree.encoding}")
        object.__setattr__(self, "leaf_path", _canonical_path(self.tree, path))

    @property
    def size(self) -> int:
        return self.tree.size - 1

    def __str__(self) -> str:
        return f"{self.tree.encoding}@{'.'.join(map(str, self.leaf_path))}"


IDENTITY = TreeModule(NODE, ())


def parse_module(text: str) -> TreeModule:
    """Parse ``<tree literal>@i.j.k``; indices refer to the literal's child order."""
    if "@" not in text:
        raise ParseError("module literal needs '@'", 1, len(text) + 1)
    tree_text, path_text = text.split("@", 1)
    raw = _parse_raw(tree_text)
    try:
        path = tuple(int(p) for p in path_text.split(".")) if path_text.strip() else ()
    except ValueError:
        raise ParseError(f"bad leaf path {path_text!r}", 1, len(tree_text) + 2) from None

    def build(node, rest):
        if not rest:
            return _from_raw(node), ()
        i = rest[0]
        if not 0 <= i < len(node):
            raise ValueError(f"invalid path {path} in {tree_text}")
        marked, sub = build(node[i], rest[1:])
        kids = [marked if k == i else _from_raw(c) for k, c in enumerate(node)]
        new = RootedTree(kids)
        return new, (new.children.index(marked),) + sub

    tree, canon_path = build(raw, path)
    return TreeModule(tree, canon_path)


def stack_compose(m1: TreeModule, m2: TreeModule) -> TreeModule:
    """``M1 ∘ M2 = (T1[λ1/T2], λ2)``."""
    tree, path = _graft(m1.tree, m1.leaf_path, m2.tree, m2.leaf_path)
    return TreeModule(tree, path)


def stack_apply(m: TreeModule, t: RootedTree) -> RootedTree:
    """``M ∘ T = T1[λ/T]``."""
    return _graft(m.tree, m.leaf_path, t, ())[0]


def compose_all(modules: Iterable[TreeModule]) -> TreeModule:
    return reduce(stack_compose, modules, IDENTITY)


def module_power(m: TreeModule, n: int) -> TreeModule:
    return compose_all([m] * n)


def _indecomposable(node: RootedTree, i: int) -> TreeModule:
    others = [c for k, c in enumerate(node.children) if k != i]
    tree = RootedTree(others + [NODE])
    return TreeModule(tree, (tree.children.index(NODE),))


def factor_module(m: TreeModule) -> list[TreeModule]:
    """Unique factorisation into indecomposables (leaf directly below the root)."""
    out = []
    node = m.tree
    for i in m.leaf_path:
        out.append(_indecomposable(node, i))
        node = node.children[i]
    return out


def stack_decomposition(t: RootedTree, path: Sequence[int]) -> tuple[list[TreeModule], RootedTree]:
    """Split ``t`` along the chain to ``path``: ``t = M_0 ∘ ... ∘ M_{k-1} ∘ T[path]``."""
    _check_path(t, path)
    modules = []
    node = t
    for i in path:
        modules.append(_indecomposable(node, i))
        node = node.children[i]
    return modules, node


# enumeration ---------------------------------------------------------------


class _TreeCache:
    def __init__(self):
        self.by_size: dict[int, list[RootedTree]] = {1: [NODE]}

    def trees(self, n: int) -> list[RootedTree]:
        if n not in self.by_size:
            ordered = [t for k in range(1, n) for t in self.trees(k)]
            out = [RootedTree(f) for f in _multisets(ordered, n - 1, 0)]
            out.sort(key=_sort_key)
            self.by_size[n] = out
        return self.by_size[n]


def _multisets(ordered: list[RootedTree], total: int, start: int) -> Iterator[list[RootedTree]]:
    """Nondecreasing sequences from ``ordered[start:]`` with sizes summing to ``total``."""
    if total == 0:
        yield []
        return
    for idx in range(start, len(ordered)):
        t = ordered[idx]
        if t.size > total:
            break
        for rest in _multisets(ordered, total - t.size, idx):
            yield [t] + rest


_CACHE = _TreeCache()


def _check_size(n: int, max_size: int) -> None:
    if n > max_size:
        raise ResourceBoundError(f"size {n} exceeds the enumeration bound {max_size}")


def enumerate_trees(n: int, max_size: int = DEFAULT_MAX_SIZE) -> list[RootedTree]:
    """All rooted unlabelled trees with ``n`` nodes, canonical order, no duplicates."""
    if n < 1:
        raise ValueError("tree size must be >= 1")
    _check_size(n, max_size)
    return list(_CACHE.trees(n))


def enumerate_forests(n: int, max_size: int = DEFAULT_MAX_SIZE) -> list[Forest]:
    """All forests with ``n`` nodes (the empty forest for ``n = 0``)."""
    if n < 0:
        raise ValueError("forest size must be >= 0")
    _check_size(n, max_size)
    ordered = [t for k in range(1, n + 1) for t in _CACHE.trees(k)]
    return [Forest(tuple(f)) for f in _multisets(ordered, n, 0)]


# class membership ----------------------------------------------------------


class Classifier:
    """Least-fixed-point class membership, memoised by subtree."""

    def __init__(self, system: ComptonSystem, max_steps: int = 1_000_000):
        self.system = system
        self.memo: dict[str, frozenset[int]] = {}
        self.max_steps = max_steps
        self.steps = 0

    def classes(self, t: RootedTree) -> frozenset[int]:
        hit = self.memo.get(t.encoding)
        if hit is not None:
            return hit
        groups = [(self.classes(c), k) for c, k in Counter(t.children).items()]
        found = set()
        if t.is_leaf:
            found.add(0)
        for i in range(1, self.system.size):
            if any(self._matches(groups, gamma) for gamma in self.system.productions[i]):
                found.add(i)
        result = frozenset(found)
        self.memo[t.encoding] = result
        return result

    def _matches(self, groups, gamma) -> bool:
        counts = [0] * len(gamma)

        def place(g: int) -> bool:
            self.steps += 1
            if self.steps > self.max_steps:
                raise ResourceBoundError("class membership backtracking exceeded its step bound")
            if g == len(groups):
                return all(b.admits(c) for b, c in zip(gamma, counts))
            options, mult = groups[g]
            usable = [
                j for j in sorted(options) if not gamma[j].is_zero
            ]
            return spread(g, usable, 0, mult)

        def spread(g: int, usable: list[int], pos: int, left: int) -> bool:
            if pos == len(usable):
                return left == 0 and place(g + 1)
            j = usable[pos]
            b = gamma[j]
            cap = left if b.at_least else min(left, b.m - counts[j])
            for take in range(cap, -1, -1):
                counts[j] += take
                ok = spread(g, usable, pos + 1, left - take)
                counts[j] -= take
                if ok:
                    return True
            return False

        return place(0)


def classify_tree(t: RootedTree, system: ComptonSystem, classifier: Classifier | None = None) -> frozenset[int]:
    """Indices of every class containing ``t``."""
    return (classifier or Classifier(system)).classes(t)


class _Membership:
    def __init__(self, system: ComptonSystem):
        self.system = system
        self.classifier = Classifier(system)

    def tree_in(self, expr, t: RootedTree) -> bool:
        if isinstance(expr, NodeClass):
            return t.is_leaf
        if isinstance(expr, Ref):
            if self.system.is_class(expr.name):
                return self.system.index(expr.name) in self.classifier.classes(t)
            return self.tree_in(self.system.resolve(expr.name), t)
        if isinstance(expr, Union):
            return any(self.tree_in(e, t) for e in expr.items)
        if isinstance(expr, RootAppend):
            return self.forest_in(expr.arg, t.children)
        return False  # forest-valued expressions hold no bare trees

    def forest_in(self, expr, comps: tuple[RootedTree, ...]) -> bool:
        if isinstance(expr, Ref) and not self.system.is_class(expr.name):
            return self.forest_in(self.system.resolve(expr.name), comps)
        if isinstance(expr, Union):
            return any(self.forest_in(e, comps) for e in expr.items)
        if isinstance(expr, Multiset):
            return expr.bound.admits(len(comps)) and all(self.tree_in(expr.arg, c) for c in comps)
        if isinstance(expr, Sum):
            return self._split(expr.items, Counter(comps))
        return len(comps) == 1 and self.tree_in(expr, comps[0])

    def _split(self, items, pool: Counter) -> bool:
        if not items:
            return sum(pool.values()) == 0
        head, rest = items[0], items[1:]
        if not rest:
            return self.forest_in(head, tuple(sorted(pool.elements(), key=_sort_key)))
        for part in _sub_multisets(pool):
            if self.forest_in(head, tuple(sorted(part.elements(), key=_sort_key))):
                remaining = pool - part
                if self._split(rest, remaining):
                    return True
        return False


def _sub_multisets(pool: Counter) -> Iterator[Counter]:
    keys = list(pool)

    def rec(k: int, acc: dict):
        if k == len(keys):
            yield Counter({key: v for key, v in acc.items() if v})
            return
        for c in range(pool[keys[k]] + 1):
            acc[keys[k]] = c
            yield from rec(k + 1, acc)

    yield from rec(0, {})


def count_by_enumeration(system: ComptonSystem, expr, n: int, max_size: int = DEFAULT_MAX_SIZE) -> int:
    """Number of trees (or forests, for forest-valued ``expr``) of size ``n`` in the class."""
    if isinstance(expr, str):
        expr = system.resolve(expr)
    member = _Membership(system)
    if system.kind(expr) == "tree":
        if n < 1:
            return 0
        return sum(1 for t in enumerate_trees(n, max_size) if member.tree_in(expr, t))
    return sum(1 for f in enumerate_forests(n, max_size) if member.forest_in(expr, f.trees))
