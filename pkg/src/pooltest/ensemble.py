"""Sparse regular pooling graphs and the tests they induce.

A system places n objects on the left, m = n*l/r pooled tests on the
right, and wires them through sockets: object i owns left sockets
[i*l, (i+1)*l), test j owns right sockets [j*r, (j+1)*r), and a graph
is a bijection from left sockets onto right sockets.  Drawing that
bijection uniformly at random defines the ensemble; parallel edges are
allowed and contribute multiplicity.

Besides sampling and the forward test maps, this module can enumerate
the whole ensemble at toy sizes and compute exact event fractions over
it, which the rest of the package uses as ground truth.
"""

from __future__ import annotations

import itertools
import json
import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterator, Mapping, Sequence

from .errors import ConfigurationError, GuardError, InputError

# enumerate_ensemble walks (n*l)! wirings; 10 sockets = 3628800 graphs is the ceiling
ENUMERATION_SOCKET_LIMIT = 10


@dataclass(frozen=True)
class SystemParams:
    """Degrees, sizes and source/noise probabilities of one test system.

    l: tests per object, r: objects per test (with multiplicity),
    n: number of objects, p: prior defect probability per object,
    q: probability that a test outcome is flipped.
    """

    l: int
    r: int
    n: int
    p: float = 0.0
    q: float = 0.0

    def __post_init__(self) -> None:
        if self.l < 1 or self.r < 1 or self.n < 1:
            raise ConfigurationError("l, r and n must be positive integers")
        if (self.n * self.l) % self.r != 0:
            raise ConfigurationError(
                f"r={self.r} must divide n*l={self.n * self.l} to give a whole number of tests"
            )
        if not 0 <= self.p <= 1:
            raise ConfigurationError(f"p={self.p} outside [0, 1]")
        if not 0 <= self.q <= 1:
            raise ConfigurationError(f"q={self.q} outside [0, 1]")

    @property
    def m(self) -> int:
        """Number of pooled tests."""
        return (self.n * self.l) // self.r

    @property
    def num_sockets(self) -> int:
        return self.n * self.l


@dataclass(frozen=True, init=False, eq=False)
class PoolingGraph:
    """A wired system: wiring[k] is the right socket fed by left socket k."""

    params: SystemParams
    wiring: tuple[int, ...]

    def __init__(self, params: SystemParams, wiring: Sequence[int], check: bool = True):
        object.__setattr__(self, "params", params)
        object.__setattr__(self, "wiring", tuple(wiring))
        if check:
            nl = params.num_sockets
            if len(self.wiring) != nl or sorted(self.wiring) != list(range(nl)):
                raise InputError("wiring must be a permutation of range(n*l)")

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, PoolingGraph):
            return NotImplemented
        return self.params == other.params and self.wiring == other.wiring

    def __hash__(self) -> int:
        return hash((self.params, self.wiring))

    def object_tests(self) -> list[tuple[int, ...]]:
        """For each object, the tests it feeds (repeats kept for parallel edges)."""
        l, r = self.params.l, self.params.r
        return [
            tuple(self.wiring[k] // r for k in range(i * l, (i + 1) * l))
            for i in range(self.params.n)
        ]

    def test_pools(self) -> list[list[int]]:
        """For each test, the objects pooled into it (repeats kept)."""
        l, r = self.params.l, self.params.r
        pools: list[list[int]] = [[] for _ in range(self.params.m)]
        for k, rk in enumerate(self.wiring):
            pools[rk // r].append(k // l)
        return pools


def sample_graph(params: SystemParams, seed: int) -> PoolingGraph:
    """Draw a uniformly random graph; the same seed always gives the same wiring."""
    rng = random.Random(seed)
    wiring = list(range(params.num_sockets))
    rng.shuffle(wiring)
    return PoolingGraph(params, wiring, check=False)


def enumerate_ensemble(params: SystemParams) -> Iterator[PoolingGraph]:
    """Yield every wiring exactly once, in lexicographic order.

    Refuses systems with more than ENUMERATION_SOCKET_LIMIT sockets; the
    count is (n*l)! and grows out of reach immediately after that.
    """
    nl = params.num_sockets
    if nl > ENUMERATION_SOCKET_LIMIT:
        raise GuardError(
            f"enumeration over {nl}! wirings refused (limit {ENUMERATION_SOCKET_LIMIT} sockets)"
        )
    for perm in itertools.permutations(range(nl)):
        yield PoolingGraph(params, perm, check=False)


# ---------------------------------------------------------------------------
# forward maps
# ---------------------------------------------------------------------------


def forward_or(graph: PoolingGraph, x: Sequence[int]) -> tuple[int, ...]:
    """Noiseless outcome of every pooled OR test for defect indicator vector x."""
    params = graph.params
    if len(x) != params.n:
        raise InputError(f"x has length {len(x)}, expected n={params.n}")
    for v in x:
        if v not in (0, 1):
            raise InputError("x must be a 0/1 vector")
    l, r = params.l, params.r
    y = [0] * params.m
    for k, rk in enumerate(graph.wiring):
        if x[k // l]:
            y[rk // r] = 1
    return tuple(y)


@dataclass(frozen=True)
class TypeVector:
    """Occurrence counts of each alphabet symbol among one test's inputs."""

    counts: tuple[int, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "counts", tuple(self.counts))
        if any(c < 0 for c in self.counts):
            raise InputError("type counts must be nonnegative")

    @property
    def length(self) -> int:
        return sum(self.counts)

    @classmethod
    def of(cls, values: Sequence, alphabet: Sequence) -> "TypeVector":
        idx = {a: i for i, a in enumerate(alphabet)}
        counts = [0] * len(alphabet)
        for v in values:
            if v not in idx:
                raise InputError(f"symbol {v!r} not in alphabet {tuple(alphabet)}")
            counts[idx[v]] += 1
        return cls(tuple(counts))


@dataclass(frozen=True)
class TestFunction:
    """A symmetric per-test map, tabulated by input type.

    The value of a test depends only on how many pooled inputs carry
    each alphabet symbol, so the table keys are type-count tuples over
    the input alphabet and the values index into the output alphabet.
    """

    input_alphabet: tuple
    output_alphabet: tuple
    arity: int
    table: Mapping[tuple[int, ...], int]

    def __post_init__(self) -> None:
        object.__setattr__(self, "input_alphabet", tuple(self.input_alphabet))
        object.__setattr__(self, "output_alphabet", tuple(self.output_alphabet))
        object.__setattr__(self, "table", dict(self.table))
        if len(set(self.input_alphabet)) != len(self.input_alphabet):
            raise ConfigurationError("input alphabet symbols must be distinct")
        if len(set(self.output_alphabet)) != len(self.output_alphabet):
            raise ConfigurationError("output alphabet symbols must be distinct")
        if self.arity < 1:
            raise ConfigurationError("arity must be positive")
        u, v = len(self.input_alphabet), len(self.output_alphabet)
        expected = set(compositions(self.arity, u))
        seen = set()
        for i, (t, k) in enumerate(self.table.items()):
            if tuple(t) not in expected:
                raise ConfigurationError(
                    f"table entry {i}: type {t} is not a length-{u} type of arity {self.arity}"
                )
            if not 0 <= k < v:
                raise ConfigurationError(
                    f"table entry {i}: output index {k} outside [0, {v})"
                )
            seen.add(tuple(t))
        missing = expected - seen
        if missing:
            raise ConfigurationError(f"table is missing type {sorted(missing)[0]}")

    @property
    def num_inputs(self) -> int:
        return len(self.input_alphabet)

    @property
    def num_outputs(self) -> int:
        return len(self.output_alphabet)

    def output_index(self, counts: Sequence[int]) -> int:
        return self.table[tuple(counts)]

    def value_for_type(self, counts: Sequence[int]):
        return self.output_alphabet[self.table[tuple(counts)]]

    @classmethod
    def from_callable(
        cls,
        fn: Callable[[tuple], object],
        input_alphabet: Sequence,
        output_alphabet: Sequence,
        arity: int,
    ) -> "TestFunction":
        """Tabulate fn, which receives a sorted tuple of the pooled symbols."""
        input_alphabet = tuple(input_alphabet)
        out_index = {b: k for k, b in enumerate(output_alphabet)}
        table = {}
        for counts in compositions(arity, len(input_alphabet)):
            values = []
            for sym, c in zip(input_alphabet, counts):
                values.extend([sym] * c)
            b = fn(tuple(values))
            if b not in out_index:
                raise ConfigurationError(f"fn returned {b!r}, not in output alphabet")
            table[counts] = out_index[b]
        return cls(input_alphabet, tuple(output_alphabet), arity, table)

    def to_json_dict(self) -> dict:
        return {
            "input_alphabet": list(self.input_alphabet),
            "output_alphabet": list(self.output_alphabet),
            "arity": self.arity,
            "table": [
                {"type": list(t), "output": k} for t, k in sorted(self.table.items())
            ],
        }

    @classmethod
    def from_json_dict(cls, data: Mapping) -> "TestFunction":
        for key in ("input_alphabet", "output_alphabet", "arity", "table"):
            if key not in data:
                raise ConfigurationError(f"test function file is missing key {key!r}")
        entries = data["table"]
        table = {}
        for i, entry in enumerate(entries):
            if "type" not in entry or "output" not in entry:
                raise ConfigurationError(
                    f"table entry {i}: needs 'type' and 'output' fields"
                )
            table[tuple(entry["type"])] = entry["output"]
        if len(table) != len(entries):
            raise ConfigurationError("table contains a duplicate type")
        return cls(
            tuple(data["input_alphabet"]),
            tuple(data["output_alphabet"]),
            int(data["arity"]),
            table,
        )


def compositions(total: int, parts: int) -> Iterator[tuple[int, ...]]:
    """All tuples of `parts` nonnegative integers summing to `total`."""
    if parts == 1:
        yield (total,)
        return
    for first in range(total + 1):
        for rest in compositions(total - first, parts - 1):
            yield (first,) + rest


def or_function(r: int) -> TestFunction:
    """Pooled OR: fires iff at least one pooled object is defective."""
    table = {(r - w, w): (1 if w > 0 else 0) for w in range(r + 1)}
    return TestFunction((0, 1), (0, 1), r, table)


def threshold_function(r: int, threshold: int) -> TestFunction:
    """Fires iff at least `threshold` pooled objects are defective."""
    table = {(r - w, w): (1 if w >= threshold else 0) for w in range(r + 1)}
    return TestFunction((0, 1), (0, 1), r, table)


def count_function(r: int) -> TestFunction:
    """Reports the exact number of defective objects in the pool."""
    table = {(r - w, w): w for w in range(r + 1)}
    return TestFunction((0, 1), tuple(range(r + 1)), r, table)


def parity_function(r: int) -> TestFunction:
    """Reports the parity of the number of defective objects in the pool."""
    table = {(r - w, w): w % 2 for w in range(r + 1)}
    return TestFunction((0, 1), (0, 1), r, table)


def forward_general(graph: PoolingGraph, f: TestFunction, x: Sequence) -> tuple:
    """Outcome of every pooled test under an arbitrary symmetric test function."""
    params = graph.params
    if f.arity != params.r:
        raise InputError(f"test function arity {f.arity} != r={params.r}")
    if len(x) != params.n:
        raise InputError(f"x has length {len(x)}, expected n={params.n}")
    idx = {a: i for i, a in enumerate(f.input_alphabet)}
    try:
        xi = [idx[v] for v in x]
    except KeyError as e:
        raise InputError(f"symbol {e.args[0]!r} not in input alphabet") from None
    l, r = params.l, params.r
    u = f.num_inputs
    counts = [[0] * u for _ in range(params.m)]
    for k, rk in enumerate(graph.wiring):
        counts[rk // r][xi[k // l]] += 1
    return tuple(f.value_for_type(tuple(c)) for c in counts)


# ---------------------------------------------------------------------------
# canonical representatives and serialization
# ---------------------------------------------------------------------------


def weight_vector(n: int, w: int) -> tuple[int, ...]:
    """The canonical 0/1 vector of length n and weight w (ones first)."""
    if not 0 <= w <= n:
        raise InputError(f"weight {w} outside [0, {n}]")
    return (1,) * w + (0,) * (n - w)


def type_vector_representative(alphabet: Sequence, counts: Sequence[int]) -> tuple:
    """The canonical vector with the given symbol counts, in alphabet order."""
    if len(counts) != len(alphabet):
        raise InputError("counts length must match alphabet size")
    out: list = []
    for sym, c in zip(alphabet, counts):
        if c < 0:
            raise InputError("counts must be nonnegative")
        out.extend([sym] * c)
    return tuple(out)


def graph_to_json(graph: PoolingGraph) -> str:
    p = graph.params
    return json.dumps(
        {"l": p.l, "r": p.r, "n": p.n, "wiring": list(graph.wiring)}
    )


def graph_from_json(text: str) -> PoolingGraph:
    data = json.loads(text)
    for key in ("l", "r", "n", "wiring"):
        if key not in data:
            raise InputError(f"graph JSON is missing key {key!r}")
    params = SystemParams(l=data["l"], r=data["r"], n=data["n"])
    return PoolingGraph(params, tuple(data["wiring"]))


# ---------------------------------------------------------------------------
# exact event fractions over the full ensemble (ground-truth oracles)
# ---------------------------------------------------------------------------


def enumeration_fraction_noiseless(params: SystemParams, w: int, s: int) -> Fraction:
    """Exact fraction of wirings with F_G(x) = y for canonical x of weight w,
    y of weight s, under pooled OR tests."""
    x = weight_vector(params.n, w)
    y = weight_vector(params.m, s)
    hits = 0
    total = 0
    for graph in enumerate_ensemble(params):
        total += 1
        if forward_or(graph, x) == y:
            hits += 1
    return Fraction(hits, total)


def enumeration_fraction_noisy(params: SystemParams, w: int, s: int) -> Fraction:
    """Exact probability that the flipped outcome F_G(x) xor e equals canonical y,
    averaged over wirings and over e ~ Bernoulli(q)^m, as a rational number."""
    q = Fraction(params.q)  # exact for Fraction and for any float's binary value
    x = weight_vector(params.n, w)
    y = weight_vector(params.m, s)
    m = params.m
    prob = Fraction(0)
    total = 0
    for graph in enumerate_ensemble(params):
        total += 1
        base = forward_or(graph, x)
        flips = sum(1 for a, b in zip(base, y) if a != b)
        prob += q**flips * (1 - q) ** (m - flips)
    return prob / total


def enumeration_fraction_general(
    params: SystemParams,
    f: TestFunction,
    input_counts: Sequence[int],
    output_counts: Sequence[int],
) -> Fraction:
    """Exact fraction of wirings with F_G(x) = y for canonical representatives
    of the given input/output type-count vectors."""
    if sum(input_counts) != params.n:
        raise InputError(f"input counts must sum to n={params.n}")
    if sum(output_counts) != params.m:
        raise InputError(f"output counts must sum to m={params.m}")
    x = type_vector_representative(f.input_alphabet, input_counts)
    y = type_vector_representative(f.output_alphabet, output_counts)
    hits = 0
    total = 0
    for graph in enumerate_ensemble(params):
        total += 1
        if forward_general(graph, f, x) == y:
            hits += 1
    return Fraction(hits, total)
