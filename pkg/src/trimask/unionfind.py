class DisjointSet:
    """Union-find over arbitrary hashable items, union by rank + path compression."""

    def __init__(self, items=()):
        self.parent = {}
        self.rank = {}
        for x in items:
            self.add(x)

    def add(self, x):
        if x not in self.parent:
            self.parent[x] = x
            self.rank[x] = 0

    def find(self, x):
        root = x
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[x] != root:
            self.parent[x], x = root, self.parent[x]
        return root

    def same(self, x, y):
        return self.find(x) == self.find(y)

    def union(self, x, y):
        rx, ry = self.find(x), self.find(y)
        if rx == ry:
            return False
        if self.rank[rx] < self.rank[ry]:
            rx, ry = ry, rx
        self.parent[ry] = rx
        if self.rank[rx] == self.rank[ry]:
            self.rank[rx] += 1
        return True

    def groups(self):
        """Partition as {root: sorted members}, roots in sorted order."""
        out = {}
        for x in self.parent:
            out.setdefault(self.find(x), []).append(x)
        return {r: sorted(out[r]) for r in sorted(out)}
