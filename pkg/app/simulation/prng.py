"""
SplitMix64 - platformdan bağımsız, tamsayı tabanlı tohumlanmış üreteç
"""

MASK64 = (1 << 64) - 1
GOLDEN_GAMMA = 0x9E3779B97F4A7C15


class SplitMix64:
    def __init__(self, seed: int):
        self.state = seed & MASK64

    def next(self) -> int:
        self.state = (self.state + GOLDEN_GAMMA) & MASK64
        z = self.state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
        return z ^ (z >> 31)

    def below(self, bound: int) -> int:
        """[0, bound) aralığında tamsayı"""
        if bound <= 0:
            raise ValueError("bound pozitif olmalı")
        return self.next() % bound

    def chance(self, permille: int) -> bool:
        return self.below(1000) < permille
