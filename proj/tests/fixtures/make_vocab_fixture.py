"""Writes two rater files and a consensus sheet for nine participants whose
resolved totals are 17.5, 9, 13, 13, 9, 17, 18, 6 and 18.5 out of 20.

Usage: python3 make_vocab_fixture.py <out_dir>
"""
import random
import sys

TOTALS = [17.5, 9, 13, 13, 9, 17, 18, 6, 18.5]
WORDS = ["reluctantly", "cave", "lantern", "whisper", "harbor", "ancient", "glimmer", "stumble", "wary", "ledge",
         "tide", "brittle", "vow", "hollow", "scarce", "drift", "cling", "dusk", "thorn", "beckon"]
SCORE = {"correct": 1.0, "partial": 0.5, "incorrect": 0.0}


def rows_for(pid, total, rng):
    halves = int(total * 2) % 2
    full = int(total)
    calls = ["correct"] * full + ["partial"] * halves
    rest = 20 - len(calls)
    calls += [rng.choice(["incorrect", "no"]) for _ in range(rest)]
    rng.shuffle(calls)
    out = []
    for word, call in zip(WORDS, calls):
        if call == "no":
            out.append([pid, word, "no", "", ""])
        else:
            out.append([pid, word, "yes", f"meaning of {word}", call])
    return out


def main():
    rng = random.Random(2024)
    a, b, consensus = [], [], []
    for i, total in enumerate(TOTALS, start=1):
        for row in rows_for(f"P{i}", total, rng):
            a.append(row)
            other = list(row)
            # Rater b disagrees on a few "yes" answers; consensus restores rater a's call.
            if row[2] == "yes" and rng.random() < 0.15:
                other[4] = "partial" if row[4] != "partial" else "correct"
                consensus.append([row[0], row[1], SCORE[row[4]]])
            b.append(other)
    header = "participant_id\titem\tclaimed_known\ttyped_meaning\tjudgment\n"
    for name, rows in (("vocab_rater_a.tsv", a), ("vocab_rater_b.tsv", b)):
        with open(f"{sys.argv[1]}/{name}", "w") as f:
            f.write(header + "".join("\t".join(r) + "\n" for r in rows))
    with open(f"{sys.argv[1]}/vocab_consensus.tsv", "w") as f:
        f.write("participant_id\titem\tresolved\n")
        for pid, item, score in consensus:
            f.write(f"{pid}\t{item}\t{score:g}\n")


if __name__ == "__main__":
    main()
