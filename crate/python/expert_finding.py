"""Rank Java experts on a question/answer forum.

An edge goes from the user who asked a question to the user whose answer
was accepted; PageRank on that graph scores answerers.

    python python/expert_finding.py [posts.tsv] [--top N]
"""

import argparse
import pathlib
import time

from _locate import load

tg = load()

SCHEMA = [
    ("PostId", "int"),
    ("Type", "str"),
    ("Tag", "str"),
    ("UserId", "int"),
    ("AnswerId", "int"),
]
FIXTURE = pathlib.Path(__file__).resolve().parent / "data" / "posts.tsv"


def experts(path, tag="Java"):
    P = tg.LoadTableTSV(SCHEMA, str(path))
    JP = tg.Select(P, f"Tag = {tag}")
    Q = tg.Select(JP, "Type = question")
    A = tg.Select(JP, "Type = answer")
    QA = tg.Join(Q, A, "AnswerId", "PostId")
    G = tg.ToGraph(QA, "UserId-1", "UserId-2")
    PR = tg.GetPageRank(G)
    S = tg.TableFromHashMap(PR, "User", "Scr")
    return G, PR, S


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("posts", nargs="?", default=FIXTURE)
    parser.add_argument("--tag", default="Java")
    parser.add_argument("--top", type=int, default=10)
    args = parser.parse_args()

    start = time.perf_counter()
    G, PR, S = experts(args.posts, args.tag)
    elapsed = time.perf_counter() - start

    print(f"{G!r}, scores in {S!r}, {elapsed:.3f}s")
    for rank, (user, score) in enumerate(PR.top(args.top), 1):
        print(f"{rank:3d}  user {user:6d}  {score:.6f}")


if __name__ == "__main__":
    main()
