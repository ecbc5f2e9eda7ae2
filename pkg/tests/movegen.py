"""Random legal out-split / amalgamation sequences with their generator maps."""
import random

from graphcanon.extnat import is_omega
from graphcanon.graph import ContractError, OutOfScope
from graphcanon.moves import generator_map, out_amalgamate, out_split


def random_partition(rng: random.Random, out: dict) -> list:
    """Split the edge units of a vertex into nonempty cells; omega edges share one cell."""
    units = []
    inf = {}
    for d, k in sorted(out.items()):
        if is_omega(k):
            inf[d] = k
        else:
            units += [d] * k
    ncells = rng.randint(1, max(1, len(units) + (1 if inf else 0)))
    cells = [dict() for _ in range(ncells)]
    if inf:
        cells[0].update(inf)
    rng.shuffle(units)
    order = list(range(ncells)) if not inf else list(range(1, ncells))
    for c, d in zip(order, units):
        cells[c][d] = cells[c].get(d, 0) + 1
    for d in units[len(order):]:
        c = rng.randrange(ncells)
        cells[c][d] = cells[c].get(d, 0) + 1
    return [c for c in cells if c]


def random_move(rng: random.Random, g, history: list):
    """One legal move on g: amalgamate earlier copies, blow up an exit, or split a vertex."""
    if history and rng.random() < .3:
        new, name = history[-1]
        if all(x in g.vertices for x in new) and name not in g.vertices:
            try:
                h, mv = out_amalgamate(g, new, name)
                history.pop()
                return h, mv
            except ContractError:
                pass
    vs = [v for v in g.vertices if g.out(v)]
    if not vs:
        raise ContractError("no vertex to split")
    v = rng.choice(vs)
    out = g.out(v)
    if rng.random() < .3 and sum(1 for k in out.values()) > 1:
        d = rng.choice(sorted(d for d, k in out.items() if not is_omega(k)) or [None])
        if d is not None:
            rest = dict(out)
            rest[d] = rest[d] - 1 if not is_omega(rest[d]) else rest[d]
            part = [{d: 1}, {x: k for x, k in rest.items() if k != 0}]
            h, mv = out_split(g, v, part)
            history.append((mv.params["new"], v))
            return h, mv
    h, mv = out_split(g, v, random_partition(rng, out))
    history.append((mv.params["new"], v))
    return h, mv


def random_sequence(rng: random.Random, g, length: int):
    """Yield (source, target, move, generator map) along a random legal sequence."""
    history = []
    for _ in range(length):
        try:
            h, mv = random_move(rng, g, history)
        except (ContractError, OutOfScope):
            continue
        yield g, h, mv, generator_map(g, mv)
        g = h
