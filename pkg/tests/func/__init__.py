from typing import Iterator

from globtherm.simulate import RngStream


def seeded_streams(count: int, base: int = 1) -> Iterator[RngStream]:
    """Yield 'count' independent streams with seeds base, base + 1, ..."""
    root = RngStream(base)
    for index in range(count):
        yield root.spawn(index)
