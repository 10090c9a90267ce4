"""Union-Find (disjoint set union) over hashable items."""

from typing import Dict, Generic, Hashable, Iterable, List, TypeVar

T = TypeVar("T", bound=Hashable)


class UnionFind(Generic[T]):
    """Union-Find with path compression and union by rank."""

    def __init__(self, items: Iterable[T] = ()):
        self.parent: Dict[T, T] = {}
        self.rank: Dict[T, int] = {}
        for item in items:
            self.add(item)

    def add(self, item: T) -> None:
        if item not in self.parent:
            self.parent[item] = item
            self.rank[item] = 0

    def find(self, item: T) -> T:
        root = item
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[item] != root:
            self.parent[item], item = root, self.parent[item]
        return root

    def union(self, x: T, y: T) -> None:
        px, py = self.find(x), self.find(y)
        if px == py:
            return
        if self.rank[px] < self.rank[py]:
            px, py = py, px
        self.parent[py] = px
        if self.rank[px] == self.rank[py]:
            self.rank[px] += 1

    def groups(self) -> List[List[T]]:
        """Members of every set, each list in insertion order."""
        result: Dict[T, List[T]] = {}
        for item in self.parent:
            result.setdefault(self.find(item), []).append(item)
        return list(result.values())
