"""Hubbard ring Hamiltonians and splitting terms across a mode partition.

A Hamiltonian is stored as coefficient dictionaries for one-body terms
``t[p, q] c^dag_p c_q`` and two-body terms
``v[p, q, r, s] c^dag_p c^dag_q c_r c_s``.  ``split`` factors every
term into a product of operators on a chosen mode set A times operators
on the complement B, tracking the fermionic transposition sign in the
coefficient and whether the B factor count is odd (in which case a
bracket over the A configuration picks up an extra (-1)**N_A).
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .fock import OperatorString, mode_index

GROUP_KEYS = ("a", "b", "t", "v1", "v2", "v3")


@dataclass(frozen=True)
class HubbardParams:
    """Single-band Hubbard ring with a fixed particle sector.

    Parameters
    ----------
    sites : int
        Number of lattice sites L; modes 0..L-1 are spin up and
        L..2L-1 spin down.
    hopping : float
        Hopping amplitude t multiplying the kinetic term.
    onsite : float
        On-site repulsion U between opposite spins.
    chem_potential : float
        Uniform single-particle energy added for every occupied mode.
    n_up, n_down : int
        Particle numbers of the sector to solve in.
    periodic : bool
        Ring boundary; a periodic two-site ring picks up both bond
        orientations and hence a doubled effective hopping.
    """

    sites: int
    hopping: float
    onsite: float
    chem_potential: float = 0.0
    n_up: int = 0
    n_down: int = 0
    periodic: bool = True

    def __post_init__(self) -> None:
        if self.sites < 1:
            raise ValueError(f"sites must be positive, got {self.sites}")
        if 2 * self.sites > 63:
            raise ValueError(f"{self.sites} sites exceed the 63-mode limit")
        for label, n in (("n_up", self.n_up), ("n_down", self.n_down)):
            if not 0 <= n <= self.sites:
                raise ValueError(f"{label}={n} out of range for {self.sites} sites")

    @property
    def mode_count(self) -> int:
        return 2 * self.sites

    def bonds(self) -> list[tuple[int, int]]:
        """Directed nearest-neighbour bonds (i, i+1), wrapping if periodic."""
        pairs = [(i, i + 1) for i in range(self.sites - 1)]
        if self.periodic and self.sites > 1:
            pairs.append((self.sites - 1, 0))
        return pairs


@dataclass
class FermionHamiltonian:
    """Coefficient tables for a quartic fermionic Hamiltonian."""

    mode_count: int
    one_body: dict[tuple[int, int], complex] = field(default_factory=dict)
    two_body: dict[tuple[int, int, int, int], complex] = field(default_factory=dict)

    def add_one_body(self, p: int, q: int, value: complex) -> None:
        key = (p, q)
        self.one_body[key] = self.one_body.get(key, 0.0) + value

    def add_two_body(self, p: int, q: int, r: int, s: int, value: complex) -> None:
        key = (p, q, r, s)
        self.two_body[key] = self.two_body.get(key, 0.0) + value

    def strings(self) -> list[OperatorString]:
        """Every term as an operator string, one-body first."""
        out = [
            OperatorString(((True, p), (False, q)), t)
            for (p, q), t in self.one_body.items()
        ]
        out.extend(
            OperatorString(((True, p), (True, q), (False, r), (False, s)), v)
            for (p, q, r, s), v in self.two_body.items()
        )
        return out

    def is_hermitian(self, tol: float = 1e-12) -> bool:
        for (p, q), t in self.one_body.items():
            if abs(t - complex(self.one_body.get((q, p), 0.0)).conjugate()) > tol:
                return False
        for (p, q, r, s), v in self.two_body.items():
            if abs(v - complex(self.two_body.get((s, r, q, p), 0.0)).conjugate()) > tol:
                return False
        return True


def build_hubbard(params: HubbardParams) -> FermionHamiltonian:
    """Hubbard Hamiltonian eps*N + t*T + U*sum_i n_iu n_id in flattened modes."""
    h = FermionHamiltonian(params.mode_count)
    for mu in range(params.mode_count):
        if params.chem_potential != 0.0:
            h.add_one_body(mu, mu, params.chem_potential)
    if params.hopping != 0.0:
        for spin in (0, 1):
            for i, j in params.bonds():
                p = mode_index(i, spin, params.sites)
                q = mode_index(j, spin, params.sites)
                h.add_one_body(p, q, params.hopping)
                h.add_one_body(q, p, params.hopping)
    if params.onsite != 0.0:
        for i in range(params.sites):
            p = mode_index(i, 0, params.sites)
            q = mode_index(i, 1, params.sites)
            h.add_two_body(p, q, q, p, params.onsite)
    return h


@dataclass(frozen=True)
class SplitTerm:
    """One Hamiltonian term factored across the A/B mode partition.

    ``a_ops`` and ``b_ops`` keep global mode labels and their original
    relative order; the transposition sign from commuting B factors
    left past A factors is folded into ``coefficient``.  When
    ``parity_sign`` is set (odd number of B factors), evaluating the
    term against a block with N_A particles in A multiplies the bracket
    by (-1)**N_A.
    """

    a_ops: tuple[tuple[bool, int], ...]
    b_ops: tuple[tuple[bool, int], ...]
    coefficient: complex
    parity_sign: bool


@dataclass
class SplitHamiltonian:
    """All terms of a Hamiltonian grouped by their B-factor count.

    Groups: "a" purely on A, "b" purely on B, "t" one-body terms with
    one factor on each side, and "v1"/"v2"/"v3" two-body terms with
    one, two or three B factors.
    """

    mode_count: int
    set_a: tuple[int, ...]
    set_b: tuple[int, ...]
    groups: dict[str, tuple[SplitTerm, ...]]

    def all_terms(self) -> list[SplitTerm]:
        return [term for key in GROUP_KEYS for term in self.groups[key]]


def _split_string(string: OperatorString, in_a: set[int]) -> SplitTerm:
    a_ops: list[tuple[bool, int]] = []
    b_ops: list[tuple[bool, int]] = []
    sign = 1
    for dagger, mode in string.ops:
        if mode in in_a:
            # moving this A factor left past every B factor seen so far
            if len(b_ops) & 1:
                sign = -sign
            a_ops.append((dagger, mode))
        else:
            b_ops.append((dagger, mode))
    return SplitTerm(
        tuple(a_ops), tuple(b_ops), sign * string.coefficient, bool(len(b_ops) & 1)
    )


def split(h: FermionHamiltonian, set_a) -> SplitHamiltonian:
    """Factor every Hamiltonian term across the partition (set_a, complement)."""
    in_a = set(set_a)
    if not all(0 <= mu < h.mode_count for mu in in_a):
        raise ValueError("set_a contains modes outside the register")
    groups: dict[str, list[SplitTerm]] = {key: [] for key in GROUP_KEYS}
    for string in h.strings():
        term = _split_string(string, in_a)
        n_b = len(term.b_ops)
        if n_b == 0:
            key = "a"
        elif n_b == len(string.ops):
            key = "b"
        elif len(string.ops) == 2:
            key = "t"
        else:
            key = f"v{n_b}"
        groups[key].append(term)
    set_b = tuple(mu for mu in range(h.mode_count) if mu not in in_a)
    return SplitHamiltonian(
        h.mode_count,
        tuple(sorted(in_a)),
        set_b,
        {key: tuple(terms) for key, terms in groups.items()},
    )
