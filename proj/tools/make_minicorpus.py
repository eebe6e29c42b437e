#!/usr/bin/env python3
"""Generate the bundled synthetic mini-corpus (data/minicorpus.tsv).

Each document draws a handful of words from the pool of each of its categories,
plus neutral business filler and stop words. Pools are disjoint, so the
categories are close to separable. Output is deterministic for a given seed.
"""

import argparse
import random

POOLS = {
    "crude": "barrel barrels opec refinery pipeline petroleum crude drilling rig brent gasoline "
             "refiners offshore wells tanker distillate kerosene heating diesel reservoir",
    "grain": "wheat corn maize sorghum barley harvest bushel bushels acreage soybean soybeans "
             "planting farmers crop crops silo elevator millers flour oats",
    "interest": "rate rates interest lending bund treasury yield yields discount fed "
                "monetary inflation bond bonds repo liquidity central basis tightening easing",
    "merger": "acquire acquisition merger takeover tender bid bidder stake shareholder "
              "shareholders buyout acquired suitor hostile antitrust divest subsidiary "
              "holding definitive",
}

NEUTRAL = (
    "company companies market markets said year quarter month week report reported statement "
    "official officials analyst analysts group board executive chairman president director "
    "price prices level levels total figure figures sales revenue earnings profit loss net "
    "billion million percent pct share shares dlrs exchange trade trading traders dealer dealers "
    "government ministry minister agency policy plan plans program talks meeting agreement "
    "industry sector business economy economic growth demand supply output production "
    "international national foreign domestic local regional world country countries region "
    "january february march april june july august september october november december "
    "monday tuesday wednesday thursday friday today yesterday tomorrow recent recently "
    "higher lower rise fall rose fell increase decrease gain gains drop dropped steady firm "
    "expected expect estimate estimates forecast outlook view announcement comment sources "
    "london york tokyo paris washington chicago houston frankfurt ottawa sydney "
    "period end beginning current previous next early late long short term terms"
).split()

STOP = "the of and to in a for is on that by with it as at from be was has have will said its but".split()


def make_document(rng, labels):
    words = []
    for cat in labels:
        pool = POOLS[cat].split()
        words += rng.sample(pool, rng.randint(4, 7))
    words += rng.sample(NEUTRAL, rng.randint(10, 18))
    words += [rng.choice(STOP) for _ in range(rng.randint(6, 12))]
    rng.shuffle(words)
    text = " ".join(words)
    return text[0].upper() + text[1:] + "."


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--seed", type=int, default=20160)
    ap.add_argument("--docs", type=int, default=200)
    ap.add_argument("--multi", type=float, default=0.1, help="fraction of two-label documents")
    ap.add_argument("--out", default="data/minicorpus.tsv")
    args = ap.parse_args()

    rng = random.Random(args.seed)
    cats = sorted(POOLS)
    with open(args.out, "w", newline="\n") as f:
        f.write("# synthetic mini-corpus: id <TAB> labels <TAB> text\n")
        for i in range(args.docs):
            labels = [cats[i % len(cats)]]
            if rng.random() < args.multi:
                labels.append(rng.choice([c for c in cats if c != labels[0]]))
            labels.sort()
            f.write(f"doc{i + 1:04d}\t{','.join(labels)}\t{make_document(rng, labels)}\n")


if __name__ == "__main__":
    main()
