"""Regenerate the instance files shipped in src/degnet/data (used by `degnet verify`).

Run from the repository root: python3 demos/build_bundled_instances.py
"""
import random
from fractions import Fraction
from pathlib import Path

from degnet.generators import random_label_tree, random_snd_instance, random_tw2_gst
from degnet.graph import Graph, Requirements
from degnet.gst import GSTProblem, TreeDecomposition
from degnet.instances import (Instance, decomposition_to_dict, instance_to_dict, labeling_to_dict,
                              write_json)
from degnet.treelabel import LabelTreeInstance

DATA = Path(__file__).resolve().parent.parent / "src" / "degnet" / "data"


def snd_instances():
    tri = Graph([0, 1, 2], [(0, 0, 1), (1, 1, 2), (2, 0, 2)], {0: 1, 1: 1, 2: 1})
    yield "snd_01_triangle", Instance(tri, Requirements.uniform(tri.vertices, 1), p=1, budget=Fraction(4))
    rng = random.Random(2024)
    for k, (n, m, p, mode) in enumerate([(6, 10, 1, "snd"), (7, 12, 2, "snd"), (6, 11, 3, "snd"),
                                         (6, 10, 2, "mst")], start=2):
        while True:  # keep only instances whose relaxation is fractional, so rounding has work to do
            inst, sol = random_snd_instance(rng, n, m, p, mode=mode)
            if any(0 < v < 1 for v in sol.x.values()):
                break
        tag = f"random_p{p}" if mode == "snd" else f"spanning_tree_p{p}"
        yield f"snd_{k:02d}_{tag}", inst


def tl_instances():
    inst = LabelTreeInstance(
        "r", {"r": ("a", "b"), "a": ("c", "d")},
        {"r": ["1", "2"], "a": ["4", "5"], "b": ["6", "7"], "c": ["9", "10"], "d": ["11", "12"]},
        {"r": [("1", "4", "6"), ("1", "5", "6"), ("1", "5", "7"), ("2", "4", "7")],
         "a": [("5", "9", "11"), ("5", "9", "12"), ("5", "10", "11"), ("4", "10", "12")]},
        [{"7", "12"}, {"9", "6"}],
        [{"1": Fraction(1, 2), "5": Fraction(1, 2), "2": Fraction(1, 3), "10": Fraction(1, 2), "12": Fraction(1, 3)}])
    yield "tl_01_small", inst
    rng = random.Random(77)
    for k, depth in enumerate((3, 4), start=2):
        inst, _ = random_label_tree(rng, depth, labels=2, density=0.5, groups=2, cost_types=2)
        yield f"tl_{k:02d}_depth{depth}", inst


def gst_instances():
    g = Graph(range(5), [(0, 0, 1), (1, 0, 2), (2, 1, 2), (3, 1, 3), (4, 2, 3), (5, 2, 4), (6, 3, 4)],
              {0: 2, 1: 3, 2: 1, 3: 2, 4: 4, 5: 1, 6: 2})
    td = TreeDecomposition({0: {0, 1, 2}, 1: {1, 2, 3}, 2: {2, 3, 4}}, {0: None, 1: 0, 2: 1}, 0)
    yield "gst_01_three_bags", GSTProblem(g, 0, [[3], [4]], {v: 2 for v in range(5)}), td
    rng = random.Random(5)
    for k, n in enumerate((8, 10), start=2):
        prob, td = random_tw2_gst(rng, n, groups=2, group_size=2)
        yield f"gst_{k:02d}_random_n{n}", prob, td


def main():
    DATA.mkdir(parents=True, exist_ok=True)
    for name, inst in snd_instances():
        write_json(DATA / f"{name}.json", instance_to_dict(inst))
    for name, inst in tl_instances():
        write_json(DATA / f"{name}.json", labeling_to_dict(inst))
    for name, prob, td in gst_instances():
        inst = Instance(prob.graph, Requirements(), degree_bounds=prob.degree_bounds,
                        groups=[sorted(s) for s in prob.groups], root=prob.root)
        write_json(DATA / f"{name}.json", instance_to_dict(inst))
        write_json(DATA / f"{name}_td.json", decomposition_to_dict(td))
    print("wrote", len(list(DATA.glob("*.json"))), "files to", DATA)


if __name__ == "__main__":
    main()
