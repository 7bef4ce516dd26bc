"""Free group words, cyclic words and automorphisms of F_r.

Letters are signed integers: ``i`` is the i-th basis element and ``-i`` its
inverse, for ``1 <= i <= r``.  The ASCII form writes ``a, b, c, ...`` for the
generators and the upper-case letter for the inverse; whitespace is ignored
and ``1`` denotes the identity.

Automorphisms act on the left: ``apply(phi, w)`` substitutes the image of each
letter of ``w``.
"""

from __future__ import annotations

from functools import reduce as _fold
from itertools import product

from .errors import InputError, NotAnAutomorphism

ALPHABET = "abcdefghijklmnopqrstuvwxyz"
MAX_RANK = len(ALPHABET)


def letter_key(x):
    """Sort key for letters: a < A < b < B < ..."""
    return (abs(x), x < 0)


def free_reduce(seq):
    """Freely reduce a sequence of signed letters (stack based)."""
    out = []
    for x in seq:
        if out and out[-1] == -x:
            out.pop()
        else:
            out.append(x)
    return tuple(out)


def invert_letters(seq):
    return tuple(-x for x in reversed(seq))


def cancellation(u, v):
    """Number of letters cancelled in the product of reduced ``u`` and ``v``."""
    n = 0
    m = min(len(u), len(v))
    while n < m and u[len(u) - 1 - n] == -v[n]:
        n += 1
    return n


def letter_str(x):
    c = ALPHABET[abs(x) - 1]
    return c if x > 0 else c.upper()


def letters_str(seq, sep=""):
    if not seq:
        return "1"
    return sep.join(letter_str(x) for x in seq)


def parse_letters(text, rank=None):
    """Parse ASCII word syntax into a raw (unreduced) letter tuple."""
    out = []
    for col, ch in enumerate(text, start=1):
        if ch.isspace() or ch in "·*.":
            continue
        if ch == "1":
            continue
        lo = ch.lower()
        if lo not in ALPHABET or not ch.isascii():
            raise InputError(f"unexpected character {ch!r} in word", column=col)
        i = ALPHABET.index(lo) + 1
        if rank is not None and i > rank:
            raise InputError(f"letter {ch!r} exceeds rank {rank}", column=col)
        out.append(i if ch.islower() else -i)
    return tuple(out)


class Word:
    """A freely reduced word in F_rank. Immutable."""

    __slots__ = ("rank", "letters", "_hash")

    def __init__(self, rank, letters=()):
        if not isinstance(rank, int) or rank < 1:
            raise InputError(f"rank must be a positive integer, got {rank!r}")
        letters = tuple(letters)
        for x in letters:
            if not isinstance(x, int) or x == 0 or abs(x) > rank:
                raise InputError(f"letter {x!r} out of range for rank {rank}")
        self.rank = rank
        self.letters = free_reduce(letters)
        self._hash = None

    @classmethod
    def _raw(cls, rank, letters):
        # internal constructor for letter tuples already known to be reduced
        w = cls.__new__(cls)
        w.rank = rank
        w.letters = letters
        w._hash = None
        return w

    @classmethod
    def parse(cls, text, rank):
        return cls(rank, parse_letters(text, rank))

    @classmethod
    def identity(cls, rank):
        return cls._raw(rank, ())

    @classmethod
    def generator(cls, rank, i):
        return cls(rank, (i,))

    def __len__(self):
        return len(self.letters)

    def __iter__(self):
        return iter(self.letters)

    def __getitem__(self, item):
        if isinstance(item, slice):
            return Word._raw(self.rank, self.letters[item])
        return self.letters[item]

    def __bool__(self):
        return bool(self.letters)

    def __eq__(self, other):
        if isinstance(other, Word):
            return self.rank == other.rank and self.letters == other.letters
        return NotImplemented

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.rank, self.letters))
        return self._hash

    def _check(self, other):
        if not isinstance(other, Word):
            raise TypeError(f"expected Word, got {type(other).__name__}")
        if other.rank != self.rank:
            raise InputError(f"rank mismatch: {self.rank} vs {other.rank}")

    def __mul__(self, other):
        self._check(other)
        u, v = self.letters, other.letters
        k = cancellation(u, v)
        return Word._raw(self.rank, u[: len(u) - k] + v[k:])

    def inverse(self):
        return Word._raw(self.rank, invert_letters(self.letters))

    def __pow__(self, n):
        if n < 0:
            return self.inverse() ** (-n)
        result = Word.identity(self.rank)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def conjugate(self, by):
        """Return ``by * self * by^-1``."""
        return by * self * by.inverse()

    def is_cyclically_reduced(self):
        u = self.letters
        return len(u) < 2 or u[0] != -u[-1]

    def exponent_sums(self):
        sums = [0] * self.rank
        for x in self.letters:
            sums[abs(x) - 1] += 1 if x > 0 else -1
        return sums

    def __str__(self):
        return letters_str(self.letters)

    def spaced(self):
        return letters_str(self.letters, " ")

    def __repr__(self):
        return f"Word({self.rank}, {letters_str(self.letters)!r})"


def reduce(letters, rank):
    """Free reduction of a raw letter sequence into a Word."""
    return Word(rank, letters)


def _canonical_rotation(seq):
    if not seq:
        return 0
    keys = [letter_key(x) for x in seq]
    n = len(seq)
    doubled = keys + keys
    best = 0
    for s in range(1, n):
        if doubled[s : s + n] < doubled[best : best + n]:
            best = s
    return best


class CyclicWord:
    """A cyclically reduced word stored in its least rotation.

    Two cyclic words are equal iff the words they come from are conjugate.
    """

    __slots__ = ("rank", "letters")

    def __init__(self, rank, letters):
        letters = tuple(letters)
        w = Word(rank, letters)
        if w.letters != letters or not w.is_cyclically_reduced():
            raise InputError("cyclic word must be cyclically reduced")
        s = _canonical_rotation(letters)
        self.rank = rank
        self.letters = letters[s:] + letters[:s]

    @classmethod
    def of(cls, w):
        return cyclic_reduce(w)[0]

    def word(self):
        return Word._raw(self.rank, self.letters)

    def __len__(self):
        return len(self.letters)

    def __eq__(self, other):
        if isinstance(other, CyclicWord):
            return self.rank == other.rank and self.letters == other.letters
        return NotImplemented

    def __hash__(self):
        return hash(("cyc", self.rank, self.letters))

    def __lt__(self, other):
        return (len(self), [letter_key(x) for x in self.letters]) < (
            len(other),
            [letter_key(x) for x in other.letters],
        )

    def __str__(self):
        return letters_str(self.letters)

    def __repr__(self):
        return f"CyclicWord({self.rank}, {str(self)!r})"


def _core(w):
    """Split ``w = p c p^-1`` with ``c`` cyclically reduced (unrotated)."""
    u = w.letters
    i, j = 0, len(u) - 1
    while i < j and u[i] == -u[j]:
        i += 1
        j -= 1
    return u[:i], u[i : j + 1]


def cyclic_reduce(w):
    """Return ``(c, conj)`` with ``w = conj * c * conj^-1`` and ``c`` canonical."""
    p, core = _core(w)
    s = _canonical_rotation(core)
    conj = Word._raw(w.rank, p) * Word._raw(w.rank, core[:s])
    c = CyclicWord.__new__(CyclicWord)
    c.rank = w.rank
    c.letters = core[s:] + core[:s]
    return c, conj


def cyclic_ball(rank, radius):
    """One cyclically reduced representative per conjugacy class, lengths 1..radius."""
    out = []
    letters = [x for i in range(1, rank + 1) for x in (i, -i)]
    frontier = [()]
    for _ in range(radius):
        frontier = [w + (x,) for w in frontier for x in letters if not (w and w[-1] == -x)]
        for w in frontier:
            if len(w) > 1 and w[0] == -w[-1]:
                continue
            if _canonical_rotation(w) == 0:
                out.append(Word._raw(rank, w))
    return out


def least_period(seq):
    n = len(seq)
    for d in range(1, n + 1):
        if n % d == 0 and seq[:d] * (n // d) == seq:
            return d
    return n


def primitive_root(c):
    """``(root, k)`` with ``root^k = c`` as cyclic words and root not a proper power."""
    if len(c) == 0:
        raise InputError("primitive root of the empty word is undefined")
    d = least_period(c.letters)
    root = CyclicWord(c.rank, c.letters[:d])
    return root, len(c) // d


def word_root(w):
    """``(rho, k)`` with ``w = rho^k`` (k >= 1) and ``rho`` not a proper power."""
    if not w:
        raise InputError("root of the identity is undefined")
    p, core = _core(w)
    d = least_period(core)
    pw = Word._raw(w.rank, p)
    rho = pw * Word._raw(w.rank, core[:d]) * pw.inverse()
    return rho, len(core) // d


def power_exponent(g, rho):
    """Return ``j`` with ``g = rho^j`` or ``None``; ``rho`` must be nontrivial."""
    if not g:
        return 0
    p, core = _core(rho)
    cl = len(core)
    n = len(g) - 2 * len(p)
    if n <= 0 or n % cl:
        return None
    j = n // cl
    if rho ** j == g:
        return j
    if rho ** (-j) == g:
        return -j
    return None


def are_conjugate(u, v):
    """A word ``w`` with ``w u w^-1 = v``, or ``None``."""
    if u.rank != v.rank:
        raise InputError("rank mismatch")
    cu, pu = cyclic_reduce(u)
    cv, pv = cyclic_reduce(v)
    if cu != cv:
        return None
    # u = pu c pu^-1 and v = pv c pv^-1
    return pv * pu.inverse()


class FreeAutomorphism:
    """An automorphism of F_rank given by the images of the basis letters."""

    __slots__ = ("rank", "images", "name", "_inverse")

    def __init__(self, rank, images, name=None, _trusted=False):
        images = tuple(images)
        if len(images) != rank:
            raise InputError(f"expected {rank} images, got {len(images)}")
        for im in images:
            if not isinstance(im, Word) or im.rank != rank:
                raise InputError("images must be Words of the automorphism's rank")
        self.rank = rank
        self.images = images
        self.name = name
        self._inverse = None
        if not _trusted:
            self._inverse = _nielsen_invert(self)

    @classmethod
    def parse_images(cls, rank, texts, name=None):
        return cls(rank, [Word.parse(t, rank) for t in texts], name=name)

    @classmethod
    def identity(cls, rank):
        return cls(rank, [Word.generator(rank, i) for i in range(1, rank + 1)], _trusted=True)

    @classmethod
    def inner(cls, w):
        """The inner automorphism ``x -> w x w^-1``."""
        r = w.rank
        return cls(r, [Word.generator(r, i).conjugate(w) for i in range(1, r + 1)], _trusted=True)

    def __call__(self, w):
        return apply(self, w)

    def image(self, i):
        return self.images[i - 1]

    def __eq__(self, other):
        if isinstance(other, FreeAutomorphism):
            return self.rank == other.rank and self.images == other.images
        return NotImplemented

    def __hash__(self):
        return hash((self.rank, self.images))

    def __mul__(self, other):
        return compose(self, other)

    def __pow__(self, n):
        return power(self, n)

    def is_identity(self):
        return all(im.letters == (i,) for i, im in enumerate(self.images, start=1))

    def max_image_length(self):
        return max(len(im) for im in self.images)

    def __str__(self):
        body = "; ".join(
            f"{ALPHABET[i]} -> {im.spaced()}" for i, im in enumerate(self.images)
        )
        return f"{self.name}: {body}" if self.name else body

    def __repr__(self):
        return f"FreeAutomorphism({str(self)!r})"


def apply(phi, w):
    if w.rank != phi.rank:
        raise InputError(f"rank mismatch: automorphism {phi.rank}, word {w.rank}")
    images = phi.images
    inv = {}
    out = []
    for x in w.letters:
        if x > 0:
            seg = images[x - 1].letters
        else:
            seg = inv.get(x)
            if seg is None:
                seg = invert_letters(images[-x - 1].letters)
                inv[x] = seg
        for y in seg:
            if out and out[-1] == -y:
                out.pop()
            else:
                out.append(y)
    return Word._raw(phi.rank, tuple(out))


def compose(phi, psi):
    """``phi o psi``: first ``psi``, then ``phi``."""
    if phi.rank != psi.rank:
        raise InputError(f"rank mismatch: {phi.rank} vs {psi.rank}")
    return FreeAutomorphism(phi.rank, [apply(phi, im) for im in psi.images], _trusted=True)


def invert(phi):
    if phi._inverse is None:
        phi._inverse = _nielsen_invert(phi)
    return phi._inverse


def power(phi, n):
    if n < 0:
        return power(invert(phi), -n)
    result = FreeAutomorphism.identity(phi.rank)
    base = phi
    while n:
        if n & 1:
            result = compose(result, base)
        n >>= 1
        if n:
            base = compose(base, base)
    return result


def _nielsen_invert(phi):
    """Invert by Nielsen reduction of the image tuple.

    Keeps ``U[i] = phi(V[i])`` while applying length-reducing elementary moves
    ``U[i] <- U[i] U[j]^e`` or ``U[j]^e U[i]``; the move with the largest
    decrease wins, ties going to the first in (i, j, side, sign) order.
    """
    r = phi.rank
    U = [im.letters for im in phi.images]
    V = [(i,) for i in range(1, r + 1)]
    if any(not u for u in U):
        raise NotAnAutomorphism("an image is trivial")
    total = sum(len(u) for u in U)
    while total > r:
        best = None
        for i in range(r):
            for j in range(r):
                if i == j:
                    continue
                for side in (1, 0):
                    for e in (1, -1):
                        uj = U[j] if e == 1 else invert_letters(U[j])
                        if side:
                            k = cancellation(U[i], uj)
                        else:
                            k = cancellation(uj, U[i])
                        gain = 2 * k - len(uj)
                        if gain > 0 and (best is None or gain > best[0]):
                            best = (gain, i, j, side, e)
        if best is None:
            return _stallings_invert(phi)
        _, i, j, side, e = best
        uj = U[j] if e == 1 else invert_letters(U[j])
        vj = V[j] if e == 1 else invert_letters(V[j])
        if side:
            U[i] = free_reduce(U[i] + uj)
            V[i] = free_reduce(V[i] + vj)
        else:
            U[i] = free_reduce(uj + U[i])
            V[i] = free_reduce(vj + V[i])
        if not U[i]:
            raise NotAnAutomorphism("images are not a basis: an image reduced to 1")
        total = sum(len(u) for u in U)
    inv = [None] * r
    for u, v in zip(U, V):
        if len(u) != 1:
            raise NotAnAutomorphism("images are not a basis")
        x = u[0]
        if inv[abs(x) - 1] is not None:
            raise NotAnAutomorphism("images are not a basis: repeated generator")
        inv[abs(x) - 1] = v if x > 0 else invert_letters(v)
    result = FreeAutomorphism(r, [Word._raw(r, v) for v in inv], _trusted=True)
    result._inverse = phi
    return result


def _stallings_invert(phi):
    # complete fallback: express each basis letter in the images by folding
    from .stallings import SubgroupGraph

    r = phi.rank
    graph = SubgroupGraph(r, phi.images)
    if not graph.is_whole_group():
        raise NotAnAutomorphism("images do not generate the free group")
    inv = []
    for i in range(1, r + 1):
        inv.append(Word(r, graph.express(Word.generator(r, i))))
    result = FreeAutomorphism(r, inv, _trusted=True)
    if not compose(phi, result).is_identity():
        raise NotAnAutomorphism("images are not a basis")
    result._inverse = phi
    return result


def is_inner(phi):
    """Conjugator ``w`` with ``phi(x) = w x w^-1`` for all basis letters, or None."""
    r = phi.rank
    x1 = Word.generator(r, 1)
    w0 = are_conjugate(x1, phi.images[0])
    if w0 is None:
        return None
    bound = phi.max_image_length()
    kmax = bound + len(w0) + 1
    # all solutions of w x1 w^-1 = phi(x1) form the coset w0 <x1>
    candidates = sorted(
        (w0 * x1 ** k for k in range(-kmax, kmax + 1)),
        key=lambda w: (len(w), [letter_key(y) for y in w.letters]),
    )
    for w in candidates:
        if len(w) > bound and r > 1:
            break
        if all(
            phi.images[i - 1] == Word.generator(r, i).conjugate(w) for i in range(1, r + 1)
        ):
            return w
    return None


def inner_conjugator_check(phi, w):
    """Pointwise verification that ``phi`` is conjugation by ``w``."""
    r = phi.rank
    return all(phi.images[i - 1] == Word.generator(r, i).conjugate(w) for i in range(1, r + 1))


class Mod3Matrix:
    """Square matrix over Z/3.

    Column ``j`` holds the exponent sums of the image of generator ``j``, so
    that composition of automorphisms corresponds to matrix multiplication.
    """

    __slots__ = ("n", "entries")

    def __init__(self, entries):
        rows = tuple(tuple(int(x) % 3 for x in row) for row in entries)
        if any(len(row) != len(rows) for row in rows):
            raise InputError("matrix must be square")
        self.n = len(rows)
        self.entries = rows

    @classmethod
    def identity(cls, n):
        return cls([[int(i == j) for j in range(n)] for i in range(n)])

    def __mul__(self, other):
        n = self.n
        a, b = self.entries, other.entries
        return Mod3Matrix(
            [[sum(a[i][k] * b[k][j] for k in range(n)) for j in range(n)] for i in range(n)]
        )

    def __eq__(self, other):
        return isinstance(other, Mod3Matrix) and self.entries == other.entries

    def __hash__(self):
        return hash(self.entries)

    def is_identity(self):
        return self == Mod3Matrix.identity(self.n)

    def determinant(self):
        return _det(self.entries) % 3

    def order(self, limit=None):
        """Least k >= 1 with M^k = I."""
        if self.determinant() == 0:
            raise InputError("matrix is singular mod 3")
        if limit is None:
            limit = gl_order(self.n, 3)
        ident = Mod3Matrix.identity(self.n)
        m = self
        for k in range(1, limit + 1):
            if m == ident:
                return k
            m = m * self
        raise InputError("matrix order exceeds group order")  # unreachable for invertible input

    def tolist(self):
        return [list(row) for row in self.entries]

    def __repr__(self):
        return f"Mod3Matrix({self.tolist()})"


def _det(m):
    n = len(m)
    if n == 1:
        return m[0][0]
    return sum(
        (-1) ** j * m[0][j] * _det([row[:j] + row[j + 1 :] for row in m[1:]]) for j in range(n)
    )


def gl_order(n, q):
    return _fold(lambda acc, k: acc * (q ** n - q ** k), range(n), 1)


def mod3_matrix(phi):
    cols = [im.exponent_sums() for im in phi.images]
    return Mod3Matrix([[cols[j][i] for j in range(phi.rank)] for i in range(phi.rank)])


def unipotent_power(phi):
    return mod3_matrix(phi).order()


def all_mod3_matrices(n):
    """Every n x n matrix over Z/3 (for brute-force checks at small n)."""
    for flat in product(range(3), repeat=n * n):
        yield Mod3Matrix([flat[i * n : (i + 1) * n] for i in range(n)])
