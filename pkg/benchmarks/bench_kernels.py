"""Time the compiled kernels against the pure-Python fallback.

Each backend runs in its own interpreter because the choice is made at import
time from ``LEGALNET_DISABLE_NUMBA``.  Usage::

    python3 benchmarks/bench_kernels.py [--runs 50] [--repeat 3]
"""
import argparse
import json
import os
import subprocess
import sys

WORKLOAD = r"""
import json, random, sys, time
import networkx as nx
from legalnet import kernels
from legalnet.mesoclust import consensus_cluster, jaro_winkler
from legalnet.microstars import extract_stars
from legalnet.macrostats import rocket
from builders import legal_graph

runs, repeat = int(sys.argv[1]), int(sys.argv[2])
sbm = nx.stochastic_block_model([50] * 4, [[0.15 if i == j else 0.005 for j in range(4)] for i in range(4)],
                                seed=0, directed=True)
nx.set_edge_attributes(sbm, 1, "weight")
rng = random.Random(0)
n = 2000
edges = [(rng.randrange(n), rng.randrange(n)) for _ in range(6000)]
edges += [(0, v) for v in range(1, 400)] + [(v, 1) for v in range(2, 300)]
big = legal_graph([e for e in edges if e[0] != e[1]], nodes=range(n))
words = "shall any person under such provided that each within days notice authority".split()
texts = [" ".join(rng.choice(words) for _ in range(40)) for _ in range(200)]

def consensus():
    consensus_cluster(sbm, runs=runs, agreement=0.95, preferred_modules=4, master_seed=1)

def strings():
    for a, b in zip(texts, texts[1:]):
        jaro_winkler(a, b)

def stars():
    extract_stars(big)

def bowtie():
    rocket(big)

out = {"numba": kernels.USE_NUMBA}
for name, fn in [("consensus", consensus), ("jaro_winkler", strings), ("stars", stars), ("rocket", bowtie)]:
    fn()  # warm-up, includes compilation
    timings = []
    for _ in range(repeat):
        t0 = time.perf_counter(); fn(); timings.append(time.perf_counter() - t0)
    out[name] = min(timings)
print(json.dumps(out))
"""


def measure(disable, runs, repeat):
    here = os.path.dirname(os.path.abspath(__file__))
    env = dict(os.environ, LEGALNET_DISABLE_NUMBA="1" if disable else "0",
               PYTHONPATH=os.path.join(here, "..", "tests"))
    proc = subprocess.run([sys.executable, "-c", WORKLOAD, str(runs), str(repeat)],
                          env=env, capture_output=True, text=True, check=True)
    return json.loads(proc.stdout.strip().splitlines()[-1])


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--runs", type=int, default=50, help="consensus runs per timing")
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()
    fast = measure(False, args.runs, args.repeat)
    slow = measure(True, args.runs, args.repeat)
    if not fast["numba"]:
        print("numba unavailable: both columns use the fallback")
    print(f"{'workload':<14}{'numba s':>10}{'python s':>10}{'speedup':>9}")
    for name in ("consensus", "jaro_winkler", "stars", "rocket"):
        print(f"{name:<14}{fast[name]:>10.3f}{slow[name]:>10.3f}{slow[name] / fast[name]:>8.1f}x")


if __name__ == "__main__":
    main()
