"""Write the named example graphs and the mixed 30-graph corpus as Graph JSON files."""
import argparse
import json
import random
from dataclasses import dataclass
from pathlib import Path

from graphcanon import corpus


@dataclass
class CorpusConfig:
    out: Path = Path("corpus")
    extra_random: int = 0
    seed: int = 0
    max_vertices: int = 8


def named() -> list:
    out = list(corpus.mixed_corpus())
    out += [(f"cut_{k}", g) for k, g in corpus.cut_spines().items()]
    out += [("layered", corpus.layered_example()), ("connecting", corpus.connecting_example()),
            ("double_emitter", corpus.double_emitter()), ("figure_eight", corpus.figure_eight())]
    for i, (g, h) in enumerate(corpus.breaking_pairs()):
        out += [(f"breaking{i}", g), (f"breaking{i}_free", h)]
    return out


def main(cfg: CorpusConfig) -> None:
    cfg.out.mkdir(parents=True, exist_ok=True)
    graphs = named()
    rng = random.Random(cfg.seed)
    graphs += [(f"extra{i}", corpus.random_sne(rng, cfg.max_vertices)) for i in range(cfg.extra_random)]
    for name, g in graphs:
        safe = name.replace("'", "p")
        (cfg.out / f"{safe}.json").write_text(json.dumps(g.to_json(), indent=1) + "\n")
    print(f"wrote {len(graphs)} graphs to {cfg.out}")


if __name__ == "__main__":
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", type=Path, default=CorpusConfig.out)
    ap.add_argument("--extra-random", type=int, default=0)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--max-vertices", type=int, default=8)
    a = ap.parse_args()
    main(CorpusConfig(a.out, a.extra_random, a.seed, a.max_vertices))
