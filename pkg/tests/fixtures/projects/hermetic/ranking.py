class Ranking:
    def compare(self, other: int) -> bool:
        return other > 0
