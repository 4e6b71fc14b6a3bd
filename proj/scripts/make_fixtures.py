#!/usr/bin/env python3
"""Regenerates the deterministic fixture files under fixtures/.

card.txt       100,000 "<domain>\t<prob>" rows whose domain marginals are
               46555/35461/9357/8354/273 and whose probability histogram is
               131 x 0.90, 51629 x 0.70, 47879 x 0.50, 161 x 0.30, 200 x 0.10.
judgments.txt  3,000 pairwise rows: per task, model A wins 421/398/413 of 1000.

The pairing of domain and probability within card.txt is shuffled with a
fixed seed; only the marginals matter to consumers.
"""

import random
from pathlib import Path

FIXTURES = Path(__file__).resolve().parent.parent / "fixtures"

DOMAINS = [
    ("homemade", 46555),
    ("restaurant", 35461),
    ("raw", 9357),
    ("packaged", 8354),
    ("other", 273),
]

PROBS = [
    ("0.90", 131),
    ("0.70", 51629),
    ("0.50", 47879),
    ("0.30", 161),
    ("0.10", 200),
]

TASKS = [
    ("dish_name", 421),
    ("ingredients", 398),
    ("cooking_method", 413),
]


def write_card() -> None:
    domains = [token for token, count in DOMAINS for _ in range(count)]
    probs = [value for value, count in PROBS for _ in range(count)]
    assert len(domains) == len(probs) == 100_000
    rng = random.Random(20240823)
    rng.shuffle(probs)
    lines = ["# synthetic corpus card: <domain>\t<camera_or_phone_prob>"]
    lines += [f"{d}\t{p}" for d, p in zip(domains, probs)]
    (FIXTURES / "card.txt").write_text("\n".join(lines) + "\n")


def write_judgments() -> None:
    lines = ["# pairwise judgments: <record_id>\t<task>\t<winner a|b>"]
    n = 0
    for task, a_wins in TASKS:
        for i in range(1000):
            n += 1
            winner = "a" if i < a_wins else "b"
            lines.append(f"j-{n:04d}\t{task}\t{winner}")
    (FIXTURES / "judgments.txt").write_text("\n".join(lines) + "\n")


def main() -> None:
    FIXTURES.mkdir(exist_ok=True)
    write_card()
    write_judgments()
    print(f"wrote {FIXTURES / 'card.txt'} and {FIXTURES / 'judgments.txt'}")


if __name__ == "__main__":
    main()
