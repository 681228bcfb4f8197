"""
Pósa 旋转
路径以顶点列表 + 位置索引表示，旋转时原地反转后缀并同步更新索引
"""

from typing import Dict, Iterable, List, Sequence

from models import LiftVertex
from .errors import RotationError
from .lift import LiftState


class RotationPath:
    """
    提升图中的路径 v0 … vm

    路径只读取 LiftState，从不揭示新边；rotate/reverse 原地修改并返回自身
    """

    __slots__ = ("verts", "_pos")

    def __init__(self, verts: Iterable[LiftVertex]):
        self.verts: List[LiftVertex] = list(verts)
        self._pos: Dict[LiftVertex, int] = {v: i for i, v in enumerate(self.verts)}
        if len(self._pos) != len(self.verts):
            raise RotationError("路径顶点必须互不相同")

    def __len__(self) -> int:
        return len(self.verts)

    def __contains__(self, v: LiftVertex) -> bool:
        return v in self._pos

    def __iter__(self):
        return iter(self.verts)

    def __repr__(self) -> str:
        if len(self.verts) <= 8:
            body = " ".join(map(str, self.verts))
        else:
            body = " ".join(map(str, self.verts[:3])) + " … " + " ".join(map(str, self.verts[-3:]))
        return f"RotationPath[{len(self.verts)}]({body})"

    @property
    def start(self) -> LiftVertex:
        return self.verts[0]

    @property
    def end(self) -> LiftVertex:
        return self.verts[-1]

    def position(self, v: LiftVertex) -> int:
        return self._pos[v]

    def copy(self) -> "RotationPath":
        clone = RotationPath.__new__(RotationPath)
        clone.verts = list(self.verts)
        clone._pos = dict(self._pos)
        return clone

    def rotate(self, i: int, lift: LiftState) -> "RotationPath":
        """
        以 vi 为枢轴旋转：v0…vi vm vm−1…vi+1

        Args:
            i: 枢轴位置，1 <= i <= m−2
            lift: 用于检查旋转边 {vm, vi} 是否已揭示

        Returns:
            RotationPath: 自身，新端点为原来的 vi+1
        """
        m = len(self.verts) - 1
        if not 1 <= i <= m - 2:
            raise RotationError(f"枢轴位置 {i} 越界 (m = {m})")
        if not lift.is_edge_revealed(self.verts[m], self.verts[i]):
            raise RotationError(f"旋转边 {{{self.verts[m]}, {self.verts[i]}}} 未揭示")
        self._reverse_suffix(i + 1)
        return self

    def _reverse_suffix(self, start: int) -> None:
        suffix = self.verts[start:]
        suffix.reverse()
        self.verts[start:] = suffix
        self._pos.update(zip(suffix, range(start, len(self.verts))))

    def rotate_at(self, pivot: LiftVertex, lift: LiftState) -> "RotationPath":
        return self.rotate(self._pos[pivot], lift)

    def replay(self, pivots: Sequence[LiftVertex], lift: LiftState) -> "RotationPath":
        """按记录的枢轴顶点依次旋转"""
        for pivot in pivots:
            self.rotate_at(pivot, lift)
        return self

    def reverse(self) -> "RotationPath":
        self._reverse_suffix(0)
        return self

    def rotation_candidates(self, lift: LiftState) -> List[int]:
        """
        可用的枢轴位置：{vm, vi} 已揭示、新端点 vi+1 活跃、vi 与失活集合距离至少 2

        Returns:
            List[int]: 升序的枢轴位置
        """
        m = len(self.verts) - 1
        end = self.verts[m]
        result = []
        for w in lift.revealed_neighbors(end):
            i = self._pos.get(w)
            if i is None or not 1 <= i <= m - 2:
                continue
            if lift.is_active(self.verts[i + 1]) and lift.distance2_clear(w, exclude=end):
                result.append(i)
        result.sort()
        return result

    def close_cycle(self, lift: LiftState) -> List[LiftVertex]:
        """首尾边已揭示时闭合成圈"""
        if len(self.verts) < 3 or not lift.is_edge_revealed(self.start, self.end):
            raise RotationError("闭合边不存在")
        return list(self.verts)

    def is_valid(self, lift: LiftState) -> bool:
        """顶点互不相同、相邻顶点之间的边均已揭示、索引一致"""
        if len(self._pos) != len(self.verts):
            return False
        if any(self._pos.get(v) != i for i, v in enumerate(self.verts)):
            return False
        return all(lift.is_edge_revealed(a, b) for a, b in zip(self.verts, self.verts[1:]))
