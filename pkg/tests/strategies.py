"""Random generators shared by the property tests."""

import random

from mccarthy.graphs import FilteredGraph, UTRep
from mccarthy.words import ALPHABET, FreeAutomorphism, Word, compose, free_reduce, invert_letters


def random_word(rng, rank, max_len):
    n = rng.randint(0, max_len)
    out = []
    while len(out) < n:
        x = rng.choice([1, -1]) * rng.randint(1, rank)
        if out and out[-1] == -x:
            continue
        out.append(x)
    return Word(rank, out)


def _product(rng, pool, count):
    acc = ()
    for _ in range(count):
        p = rng.choice(pool)
        if rng.random() < 0.5:
            p = invert_letters(p)
        acc = free_reduce(acc + p)
    return acc


def random_linear_utrep(rng, rank, p_fixed=0.4):
    """A linearly growing UT representative on the rose of the given rank.

    Suffixes are built from loops that are already Nielsen: fixed edges,
    and ``E eta E-bar`` for lower linear edges.
    """
    names = list(ALPHABET[:rank])
    rng.shuffle(names)
    labels = {n: Word(rank, (ALPHABET.index(n) + 1,)) for n in names}
    graph = FilteredGraph.rose(names, rank, labels)
    pool = []
    sufs = []
    for i in range(1, rank + 1):
        u = ()
        if pool and rng.random() > p_fixed:
            w = _product(rng, pool, rng.randint(1, 2))
            if w:
                k = rng.choice([1, 1, 2, -1, -2])
                if rng.random() < 0.4:
                    c = _product(rng, pool, 1)
                    w = free_reduce(c + w + invert_letters(c))
                u = free_reduce(w * k) if k > 0 else free_reduce(invert_letters(w) * -k)
        sufs.append(u)
        if u:
            pool.append(free_reduce((i,) + w + (-i,)))
        else:
            pool.append((i,))
    return UTRep(graph, sufs)


def random_rep_seq(seed, count, max_rank=4, min_rank=2):
    rng = random.Random(seed)
    out = []
    while len(out) < count:
        rep = random_linear_utrep(rng, rng.randint(min_rank, max_rank))
        if not rep.is_trivial():
            out.append(rep)
    return out


def random_automorphism(rng, rank, moves=6):
    """Product of random elementary Nielsen moves."""
    phi = FreeAutomorphism.identity(rank)
    for _ in range(moves):
        i = rng.randint(1, rank)
        images = [Word.generator(rank, k) for k in range(1, rank + 1)]
        if rank > 1 and rng.random() < 0.8:
            j = rng.choice([k for k in range(1, rank + 1) if k != i])
            y = Word.generator(rank, j)
            if rng.random() < 0.5:
                y = y.inverse()
            images[i - 1] = images[i - 1] * y if rng.random() < 0.5 else y * images[i - 1]
        else:
            images[i - 1] = images[i - 1].inverse()
        phi = compose(phi, FreeAutomorphism(rank, images, _trusted=True))
    return phi
