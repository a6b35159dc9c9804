#!/usr/bin/env python3
# Copyright 2026 The trmeval Authors.
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#      http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

"""Independent textbook evaluations used to freeze expected values in tests.

Nothing here imports or calls the C++ library. Run it and copy the printed
values into the unit tests when a fixture changes.
"""

import itertools
import math
from collections import Counter


def ngrams(tokens, k):
    return Counter(tuple(tokens[i:i + k]) for i in range(len(tokens) - k + 1))


def sentence_bleu(cand, refs, max_n=4, eps=1e-9):
    order = min(max_n, len(cand))
    logs = []
    for k in range(1, order + 1):
        c = ngrams(cand, k)
        best = Counter()
        for r in refs:
            for g, v in ngrams(r, k).items():
                best[g] = max(best[g], v)
        matched = sum(min(v, best[g]) for g, v in c.items())
        total = sum(c.values())
        logs.append(math.log(max(matched, eps) / total))
    closest = min((abs(len(r) - len(cand)), len(r)) for r in refs)[1]
    bp = 1.0 if len(cand) > closest else math.exp(1 - closest / len(cand))
    return bp * math.exp(sum(logs) / order)


def lcs(a, b):
    t = [[0] * (len(b) + 1) for _ in range(len(a) + 1)]
    for i in range(len(a)):
        for j in range(len(b)):
            t[i + 1][j + 1] = t[i][j] + 1 if a[i] == b[j] else max(t[i][j + 1], t[i + 1][j])
    return t[-1][-1]


def rouge_l(c, r, beta=1.2):
    l = lcs(c, r)
    if l == 0:
        return 0.0
    p, rec = l / len(c), l / len(r)
    return (1 + beta ** 2) * p * rec / (rec + beta ** 2 * p)


def meteor_formula(matches, chunks, len_c, len_r, alpha=0.9, beta=3.0, gamma=0.5):
    p, r = matches / len_c, matches / len_r
    fmean = p * r / (alpha * p + (1 - alpha) * r)
    return fmean * (1 - gamma * (chunks / matches) ** beta)


def build_idf(ref_sets, max_n=4):
    docs = len(ref_sets)
    df = [Counter() for _ in range(max_n)]
    for refs in ref_sets:
        for k in range(1, max_n + 1):
            seen = set()
            for r in refs:
                seen |= set(ngrams(r, k))
            for g in seen:
                df[k - 1][g] += 1
    return docs, df


def cider_d(cand, refs, docs, df, max_n=4, sigma=6.0):
    def vec(tokens, k):
        return {g: v * (math.log(docs) - math.log(max(1, df[k - 1].get(g, 0))))
                for g, v in ngrams(tokens, k).items()}

    total = 0.0
    for r in refs:
        acc = 0.0
        for k in range(1, max_n + 1):
            vc, vr = vec(cand, k), vec(r, k)
            nc = math.sqrt(sum(x * x for x in vc.values()))
            nr = math.sqrt(sum(x * x for x in vr.values()))
            if nc == 0 or nr == 0:
                continue
            dot = sum(min(vc[g], vr.get(g, 0.0)) * vr.get(g, 0.0) for g in vc)
            acc += dot / (nc * nr) * math.exp(-((len(cand) - len(r)) ** 2) / (2 * sigma ** 2))
        total += acc / max_n
    return 10.0 * total / len(refs)


def main():
    print("bleu [a man runs fast] vs [a man runs]:",
          repr(sentence_bleu("a man runs fast".split(), ["a man runs".split()])))
    print("bleu [the cat sat on the mat] vs two refs:",
          repr(sentence_bleu("the cat sat on the mat".split(),
                             ["the cat is on the mat".split(), "there is a cat on the mat".split()])))
    print("rouge_l [a b c d] vs [a c d]:", repr(rouge_l("a b c d".split(), "a c d".split())))
    print("meteor matches=3 chunks=1 len 3/3:", repr(meteor_formula(3, 1, 3, 3)))
    print("meteor matches=2 chunks=2 len 3/4:", repr(meteor_formula(2, 2, 3, 4)))

    ref_sets = [["a man is running".split(), "a man runs fast".split()],
                ["a dog is barking".split()]]
    docs, df = build_idf(ref_sets)
    print("idf docs:", docs)
    for k in range(4):
        for g in sorted(df[k]):
            print("  ", k + 1, " ".join(g), repr(math.log(docs / df[k][g])))

    ref_sets3 = [["a man is running".split(), "a man runs fast".split()],
                 ["a dog is barking".split()],
                 ["the cat sleeps on a mat".split()]]
    docs3, df3 = build_idf(ref_sets3)
    print("cider [a man is walking] vs inst0 refs:",
          repr(cider_d("a man is walking".split(), ref_sets3[0], docs3, df3)))
    print("cider [a man is running fast] vs inst0 refs:",
          repr(cider_d("a man is running fast".split(), ref_sets3[0], docs3, df3)))

    # Frechet / MMD closed forms.
    print("frechet 1d:", (1 - 2) ** 2 + (math.sqrt(4) - math.sqrt(1)) ** 2)
    a, b = [1.0, 4.0, 0.25], [9.0, 1.0, 0.25]
    mu = [0.5, -1.0, 2.0], [0.0, 1.0, 2.0]
    print("frechet diag:", repr(sum((x - y) ** 2 for x, y in zip(*mu))
                                + sum((math.sqrt(x) - math.sqrt(y)) ** 2 for x, y in zip(a, b))))
    print("hmp {0.01,1}:", repr(2 / (1 / 0.01 + 1)))

    # Planted 4 points on a line with pairwise distances {1,2,3,4,5,6}? A
    # Golomb ruler of length 6 on 4 marks: 0,1,4,6 gives {1,4,6,3,5,2}.
    pts = [0, 1, 4, 6]
    d = sorted(abs(x - y) for x, y in itertools.combinations(pts, 2))
    print("golomb distances:", d, "median/2:", (d[2] + d[3]) / 2 / 2)


if __name__ == "__main__":
    main()
