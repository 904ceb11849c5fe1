"""Tensor calculus for quantum Lie algebra data {sigma, C, phi}.

A braid matrix sigma^{kl}_{ij} is stored as a rank-4 Tensor with index
order (k, l, i, j): upper pair first, then lower pair.  Structure
constants C^k_{ij} are rank 3 with index order (k, i, j).

All the defining identities and the proof identities are products of
operators written left to right, acting on row vectors (in the algebra the
ghost coefficients multiply from the left).  We therefore realize every
operator as a sparse matrix indexed [input multi-index, output multi-index]
over the flattened space {0..N-1}^k, and multiply matrices in the written
order of the identity.  A braid matrix becomes M[(i1,i2), (k1,k2)] =
sigma^{k1 k2}_{i1 i2}.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

from .linalg import solve
from .scalars import RF_ONE, RF_ZERO, RationalFunction


def _rf(x):
    if isinstance(x, RationalFunction):
        return x
    return RationalFunction.const(x)


class Tensor:
    """Sparse tensor with all index ranges equal to n."""

    def __init__(self, rank: int, n: int, entries: dict):
        self.rank = rank
        self.n = n
        self.entries = {}
        for idx, val in entries.items():
            val = _rf(val)
            if not val.is_zero:
                if len(idx) != rank or any(not (0 <= i < n) for i in idx):
                    raise ValueError(f"bad index {idx} for rank {rank}, n {n}")
                self.entries[idx] = val

    def get(self, idx) -> RationalFunction:
        return self.entries.get(tuple(idx), RF_ZERO)

    def is_zero(self) -> bool:
        return not self.entries

    def __eq__(self, other):
        return (isinstance(other, Tensor) and self.rank == other.rank
                and self.n == other.n and self.entries == other.entries)

    def items(self):
        return self.entries.items()

    def __repr__(self):
        return f"Tensor(rank={self.rank}, n={self.n}, nnz={len(self.entries)})"


class Mat:
    """Sparse matrix over RationalFunction, rows = input multi-indices."""

    __slots__ = ("rows", "nrows", "ncols")

    def __init__(self, nrows, ncols, rows=None):
        self.nrows = nrows
        self.ncols = ncols
        self.rows = rows if rows is not None else {}

    @staticmethod
    def identity(n):
        return Mat(n, n, {i: {i: RF_ONE} for i in range(n)})

    def set(self, r, c, val):
        val = _rf(val)
        if val.is_zero:
            self.rows.get(r, {}).pop(c, None)
        else:
            self.rows.setdefault(r, {})[c] = val

    def get(self, r, c):
        return self.rows.get(r, {}).get(c, RF_ZERO)

    def __matmul__(self, other: "Mat") -> "Mat":
        assert self.ncols == other.nrows
        out = {}
        for r, row in self.rows.items():
            acc = {}
            for k, v in row.items():
                orow = other.rows.get(k)
                if not orow:
                    continue
                for c, w in orow.items():
                    prod = v * w
                    if prod.is_zero:
                        continue
                    cur = acc.get(c)
                    acc[c] = prod if cur is None else cur + prod
            acc = {c: v for c, v in acc.items() if not v.is_zero}
            if acc:
                out[r] = acc
        return Mat(self.nrows, other.ncols, out)

    def __add__(self, other: "Mat") -> "Mat":
        out = {r: dict(row) for r, row in self.rows.items()}
        for r, row in other.rows.items():
            dst = out.setdefault(r, {})
            for c, v in row.items():
                s = dst.get(c, RF_ZERO) + v
                if s.is_zero:
                    dst.pop(c, None)
                else:
                    dst[c] = s
        return Mat(self.nrows, self.ncols, {r: row for r, row in out.items() if row})

    def __sub__(self, other):
        return self + other.scaled(-1)

    def scaled(self, k) -> "Mat":
        k = _rf(k)
        if k.is_zero:
            return Mat(self.nrows, self.ncols)
        return Mat(self.nrows, self.ncols,
                   {r: {c: v * k for c, v in row.items()}
                    for r, row in self.rows.items()})

    def is_zero(self):
        return not self.rows

    def __eq__(self, other):
        return (isinstance(other, Mat) and (self - other).is_zero())

    def transpose(self) -> "Mat":
        out = {}
        for r, row in self.rows.items():
            for c, v in row.items():
                out.setdefault(c, {})[r] = v
        return Mat(self.ncols, self.nrows, out)

    def inverse(self) -> "Mat":
        """Dense Gaussian inverse; raises on singular input."""
        assert self.nrows == self.ncols
        n = self.nrows
        a = [[self.get(r, c) for c in range(n)] for r in range(n)]
        inv = [[RF_ONE if r == c else RF_ZERO for c in range(n)] for r in range(n)]
        for col in range(n):
            piv = next((r for r in range(col, n) if not a[r][col].is_zero), None)
            if piv is None:
                raise ZeroDivisionError("singular matrix")
            a[col], a[piv] = a[piv], a[col]
            inv[col], inv[piv] = inv[piv], inv[col]
            p = a[col][col]
            a[col] = [x / p for x in a[col]]
            inv[col] = [x / p for x in inv[col]]
            for r in range(n):
                if r != col and not a[r][col].is_zero:
                    f = a[r][col]
                    a[r] = [x - f * y for x, y in zip(a[r], a[col])]
                    inv[r] = [x - f * y for x, y in zip(inv[r], inv[col])]
        out = Mat(n, n)
        for r in range(n):
            for c in range(n):
                out.set(r, c, inv[r][c])
        return out

    def nonzero_entries(self, limit=None):
        out = []
        for r in sorted(self.rows):
            for c in sorted(self.rows[r]):
                out.append((r, c, self.rows[r][c]))
                if limit and len(out) >= limit:
                    return out
        return out


def flatten(idx, n) -> int:
    out = 0
    for i in idx:
        out = out * n + i
    return out


def unflatten(x, n, k):
    out = []
    for _ in range(k):
        out.append(x % n)
        x //= n
    return tuple(reversed(out))


def braid_mat(t: Tensor) -> Mat:
    """Row-convention matrix of a rank-4 tensor on the two-factor space."""
    n = t.n
    m = Mat(n * n, n * n)
    for (k1, k2, i1, i2), v in t.items():
        m.set(flatten((i1, i2), n), flatten((k1, k2), n), v)
    return m


def mat_to_rank4(m: Mat, n: int) -> Tensor:
    entries = {}
    for r, row in m.rows.items():
        i1, i2 = unflatten(r, n, 2)
        for c, v in row.items():
            k1, k2 = unflatten(c, n, 2)
            entries[(k1, k2, i1, i2)] = v
    return Tensor(4, n, entries)


def embed(m2: Mat, n: int, total: int, pos: int) -> Mat:
    """id^{pos} (x) m2 (x) id^{total-pos-2} on the total-factor space."""
    left = total - pos - 2
    out = Mat(n ** total, n ** total)
    spect_a = list(itertools.product(range(n), repeat=pos))
    spect_b = list(itertools.product(range(n), repeat=left))
    for r, row in m2.rows.items():
        i1, i2 = unflatten(r, n, 2)
        for c, v in row.items():
            k1, k2 = unflatten(c, n, 2)
            for a in spect_a:
                for b in spect_b:
                    out.set(flatten(a + (i1, i2) + b, n),
                            flatten(a + (k1, k2) + b, n), v)
    return out


def cmat(c: Tensor, total: int, pos: int) -> Mat:
    """The operator contracting factors (pos, pos+1) into one via C^k_{ij}.

    Row convention: entry [input multi-index, output multi-index]; the
    remaining factors pass through unchanged (this realizes the delta
    insertions of the proof identities).
    """
    n = c.n
    out = Mat(n ** total, n ** (total - 1))
    spect_a = list(itertools.product(range(n), repeat=pos))
    spect_b = list(itertools.product(range(n), repeat=total - pos - 2))
    for (k, i, j), v in c.items():
        for a in spect_a:
            for b in spect_b:
                out.set(flatten(a + (i, j) + b, n), flatten(a + (k,) + b, n), v)
    return out


# -- constructors ----------------------------------------------------------


def super_permutation(parities) -> Tensor:
    """sigma^{k1 k2}_{i1 i2} = (-1)^{(i1)(i2)} delta^{k1}_{i2} delta^{k2}_{i1}."""
    n = len(parities)
    entries = {}
    for i1 in range(n):
        for i2 in range(n):
            sign = -1 if parities[i1] and parities[i2] else 1
            entries[(i2, i1, i1, i2)] = sign
    return Tensor(4, n, entries)


def lie_super_twist(parities):
    """The Lie-superalgebra ghost twist: (phi, sigma_tilde) of the
    alternative (non-canonical) ghost sector.

    phi^{kl}_{mn} = (-1)^{(n)((m)+1)} delta^k_n delta^l_m and
    sigma_tilde^{kl}_{mn} = (-1)^{(m)(n)+(m)+(n)} delta^k_n delta^l_m.
    """
    n = len(parities)
    phi_e, st_e = {}, {}
    for m in range(n):
        for nn in range(n):
            pm, pn = parities[m], parities[nn]
            phi_e[(nn, m, m, nn)] = -1 if (pn * (pm + 1)) % 2 else 1
            st_e[(nn, m, m, nn)] = -1 if (pm * pn + pm + pn) % 2 else 1
    return Tensor(4, n, phi_e), Tensor(4, n, st_e)


def sigma_tilde(sigma: Tensor, phi: Tensor) -> Tensor:
    """Twist conjugation sigma_tilde = phi sigma phi^{-1} (written order)."""
    n = sigma.n
    p = braid_mat(phi)
    s = braid_mat(sigma)
    return mat_to_rank4(p @ s @ p.inverse(), n)


# -- data bundles ----------------------------------------------------------


@dataclass
class QlaData:
    n: int
    parities: tuple
    sigma: Tensor
    c: Tensor

    @staticmethod
    def from_structure_constants(n, parities, c_entries, sigma=None):
        sigma = sigma if sigma is not None else super_permutation(parities)
        return QlaData(n, tuple(parities), sigma, Tensor(3, n, c_entries))


@dataclass
class TwistData:
    phi: Tensor
    phi_inverse: Tensor


def twist_from_phi(phi: Tensor) -> TwistData:
    inv = mat_to_rank4(braid_mat(phi).inverse(), phi.n)
    return TwistData(phi, inv)


@dataclass
class AxiomReport:
    """Named residuals; an empty residual list means the check passed."""

    residuals: dict = field(default_factory=dict)
    extras: dict = field(default_factory=dict)

    def record(self, name: str, residual_entries):
        self.residuals[name] = list(residual_entries)

    def record_mat(self, name: str, m: Mat, limit=8):
        self.residuals[name] = m.nonzero_entries(limit)

    def passed(self, name: str) -> bool:
        return not self.residuals[name]

    @property
    def all_pass(self) -> bool:
        return all(not v for v in self.residuals.values())

    @property
    def failures(self):
        return sorted(name for name, v in self.residuals.items() if v)


# -- axiom checks ----------------------------------------------------------


def check_qla_axioms(d: QlaData) -> AxiomReport:
    """Residuals of the unitarity, braid, Jacobi and sigma-C compatibility
    equations, plus solvability of C = (1 - sigma) t with a witness."""
    n = d.n
    rep = AxiomReport()
    s = braid_mat(d.sigma)
    ident2 = Mat.identity(n * n)
    rep.record_mat("sigma_unitary", s @ s - ident2)

    s12 = embed(s, n, 3, 0)
    s23 = embed(s, n, 3, 1)
    rep.record_mat("braid", s12 @ s23 @ s12 - s23 @ s12 @ s23)

    sig = d.sigma.get
    cc = d.c.get
    cnz = list(d.c.items())

    # Jacobi: C^{p}_{n1 n2} C^{k}_{p n3}
    #   = sigma^{p2 p3}_{n2 n3} C^{k1}_{n1 p2} C^{k}_{k1 p3} + C^{p3}_{n2 n3} C^{k}_{n1 p3}
    jac = []
    for n1, n2, n3, k4 in itertools.product(range(n), repeat=4):
        lhs = RF_ZERO
        for p1 in range(n):
            lhs = lhs + cc((p1, n1, n2)) * cc((k4, p1, n3))
        rhs = RF_ZERO
        for p2, p3 in itertools.product(range(n), repeat=2):
            sv = sig((p2, p3, n2, n3))
            if sv.is_zero:
                continue
            inner = RF_ZERO
            for k1 in range(n):
                inner = inner + cc((k1, n1, p2)) * cc((k4, k1, p3))
            rhs = rhs + sv * inner
        for p3 in range(n):
            rhs = rhs + cc((p3, n2, n3)) * cc((k4, n1, p3))
        r = lhs - rhs
        if not r.is_zero:
            jac.append(((k4, n1, n2, n3), r))
    rep.record("jacobi", jac[:8])

    # C^{p1}_{n1 n2} sigma^{k1 k3}_{p1 n3} = sigma^{p2 p3}_{n2 n3} sigma^{k1 j2}_{n1 p2} C^{k3}_{j2 p3}
    cs1 = []
    for k1, k3, n1, n2, n3 in itertools.product(range(n), repeat=5):
        lhs = RF_ZERO
        for p1 in range(n):
            lhs = lhs + cc((p1, n1, n2)) * sig((k1, k3, p1, n3))
        rhs = RF_ZERO
        for p2, p3 in itertools.product(range(n), repeat=2):
            sv = sig((p2, p3, n2, n3))
            if sv.is_zero:
                continue
            inner = RF_ZERO
            for j2 in range(n):
                inner = inner + sig((k1, j2, n1, p2)) * cc((k3, j2, p3))
            rhs = rhs + sv * inner
        r = lhs - rhs
        if not r.is_zero:
            cs1.append(((k1, k3, n1, n2, n3), r))
    rep.record("sigma_c_compat_1", cs1[:8])

    # (sigma^{j2 p3}_{n2 n3} C^{p1}_{n1 j2} + delta^{p1}_{n1} C^{p3}_{n2 n3}) sigma^{k1 k3}_{p1 p3}
    #   = sigma^{p1 p2}_{n1 n2} (sigma^{j2 k3}_{p2 n3} C^{k1}_{p1 j2} + delta^{k1}_{p1} C^{k3}_{p2 n3})
    cs2 = []
    for k1, k3, n1, n2, n3 in itertools.product(range(n), repeat=5):
        lhs = RF_ZERO
        for p1, p3 in itertools.product(range(n), repeat=2):
            sv = sig((k1, k3, p1, p3))
            if sv.is_zero:
                continue
            term = RF_ZERO
            for j2 in range(n):
                term = term + sig((j2, p3, n2, n3)) * cc((p1, n1, j2))
            if p1 == n1:
                term = term + cc((p3, n2, n3))
            lhs = lhs + term * sv
        rhs = RF_ZERO
        for p1, p2 in itertools.product(range(n), repeat=2):
            sv = sig((p1, p2, n1, n2))
            if sv.is_zero:
                continue
            term = RF_ZERO
            for j2 in range(n):
                term = term + sig((j2, k3, p2, n3)) * cc((k1, p1, j2))
            if k1 == p1:
                term = term + cc((k3, p2, n3))
            rhs = rhs + sv * term
        r = lhs - rhs
        if not r.is_zero:
            cs2.append(((k1, k3, n1, n2, n3), r))
    rep.record("sigma_c_compat_2", cs2[:8])

    # (1 + sigma_12) C = 0 : C^k_{ij} + sigma^{lm}_{ij} C^k_{lm}
    asym = []
    for k, i, j in itertools.product(range(n), repeat=3):
        r = cc((k, i, j))
        for l, m in itertools.product(range(n), repeat=2):
            r = r + sig((l, m, i, j)) * cc((k, l, m))
        if not r.is_zero:
            asym.append(((k, i, j), r))
    rep.record("c_antisymmetry", asym[:8])

    # existence of t with C^i_{jk} = (delta - sigma)^{lm}_{jk} t^i_{lm}
    witness = {}
    ok = True
    for i in range(n):
        matrix = []
        rhs = []
        for j, k in itertools.product(range(n), repeat=2):
            row = []
            for l, m in itertools.product(range(n), repeat=2):
                v = RF_ONE if (l, m) == (j, k) else RF_ZERO
                row.append(v - sig((l, m, j, k)))
            matrix.append(row)
            rhs.append(cc((i, j, k)))
        x = solve(matrix, rhs, RF_ZERO, RF_ONE)
        if x is None:
            ok = False
            break
        for (l, m), v in zip(itertools.product(range(n), repeat=2), x):
            if not v.is_zero:
                witness[(i, l, m)] = v
    if ok:
        rep.record("t_exists", [])
        rep.extras["t_witness"] = Tensor(3, n, witness)
    else:
        rep.record("t_exists", [("no solution of C = (1 - sigma) t",)])
    return rep


def check_twist_axioms(sigma: Tensor, phi: Tensor, c: Tensor = None) -> AxiomReport:
    """Residuals of the twist-pair compatibility equations."""
    n = sigma.n
    rep = AxiomReport()
    s = braid_mat(sigma)
    p = braid_mat(phi)
    pinv = p.inverse()
    st = p @ s @ pinv

    s12, s23 = embed(s, n, 3, 0), embed(s, n, 3, 1)
    p12, p23 = embed(p, n, 3, 0), embed(p, n, 3, 1)
    st12, st23 = embed(st, n, 3, 0), embed(st, n, 3, 1)

    rep.record_mat("twist_sigma_phiphi", s12 @ p23 @ p12 - p23 @ p12 @ s23)
    rep.record_mat("twist_phiphi_sigma", p12 @ p23 @ s12 - s23 @ p12 @ p23)
    rep.record_mat("phi_braid", p12 @ p23 @ p12 - p23 @ p12 @ p23)
    rep.record_mat("twist_sigmatilde_phiphi", st12 @ p23 @ p12 - p23 @ p12 @ st23)
    if not (s @ s - Mat.identity(n * n)).is_zero():
        rep.record("sigmatilde_unitary", [("sigma itself is not unitary",)])
    else:
        rep.record_mat("sigmatilde_unitary", st @ st - Mat.identity(n * n))
    if c is not None:
        lhs = p12 @ p23 @ cmat(c, 3, 0)
        rhs = cmat(c, 3, 1) @ p
        rep.record_mat("phi_c_compat", lhs - rhs)
    return rep


# -- antisymmetrizers and proof identities ---------------------------------


def antisymmetrizer_mats(braid: Mat, n: int, kmax: int) -> dict:
    """A_1..A_kmax for a unitary braid matrix, via the recurrence
    A_{k+1} = (1/k!)(1 - s_k + s_{k-1} s_k - ... + (-1)^k s_1..s_k) A_k."""
    from fractions import Fraction
    mats = {1: Mat.identity(n)}
    for k in range(1, kmax):
        total = k + 1
        s_emb = [embed(braid, n, total, j) for j in range(k)]  # s_1..s_k
        acc = Mat.identity(n ** total)
        chain = None
        sign = -1
        # terms: -s_k, +s_{k-1} s_k, ..., (-1)^k s_1...s_k
        for j in range(k - 1, -1, -1):
            chain = s_emb[j] if chain is None else s_emb[j] @ chain
            acc = acc + chain.scaled(sign)
            sign = -sign
        prev = _promote(mats[k], n, k, total)
        from math import factorial
        mats[total] = acc.scaled(Fraction(1, factorial(k))) @ prev
    return mats


def _promote(m: Mat, n: int, k: int, total: int) -> Mat:
    """m acting on the first k of total factors (identity on the rest)."""
    if k == total:
        return m
    rest = n ** (total - k)
    out = Mat(n ** total, n ** total)
    for r, row in m.rows.items():
        for c, v in row.items():
            for t in range(rest):
                out.set(r * rest + t, c * rest + t, v)
    return out


def quasi_idempotent_rescale(m: Mat, label="antisymmetrizer") -> Mat:
    """Rescale m with m @ m = lambda m (lambda a nonzero constant) to a
    projector; the recurrence eigenvalue depends on the braid data."""
    from fractions import Fraction
    if m.is_zero():
        return m
    sq = m @ m
    lam = None
    for r, row in m.rows.items():
        for c, v in row.items():
            if not v.is_zero:
                lam = sq.get(r, c) / v
                break
        if lam is not None:
            break
    if lam.is_zero or not lam.is_constant:
        raise ValueError(f"{label} is not quasi-idempotent")
    out = m.scaled(Fraction(1) / lam.constant_value())
    if not (out @ out - out).is_zero():
        raise ValueError(f"{label} is not quasi-idempotent")
    return out


def antisymmetrizer(sigma: Tensor, k: int, check=True) -> Mat:
    """The rank-k antisymmetrizing projector for a unitary braid matrix."""
    n = sigma.n
    s = braid_mat(sigma)
    if check:
        if not (s @ s - Mat.identity(n * n)).is_zero():
            raise ValueError("antisymmetrizer needs a unitary braid matrix")
        s12, s23 = embed(s, n, 3, 0), embed(s, n, 3, 1)
        if not (s12 @ s23 @ s12 - s23 @ s12 @ s23).is_zero():
            raise ValueError("antisymmetrizer needs the braid relation")
    return quasi_idempotent_rescale(antisymmetrizer_mats(s, n, k)[k],
                                    f"rank-{k} antisymmetrizer")


def higher_phi_mat(phi: Tensor, m: int) -> Mat:
    """phi_{1..m} = (phi_1 .. phi_{m-1})(phi_1 .. phi_{m-2}) ... phi_1."""
    n = phi.n
    p = braid_mat(phi)
    emb = [embed(p, n, m, j) for j in range(m - 1)]
    out = Mat.identity(n ** m)
    for top in range(m - 1, 0, -1):
        for j in range(top):
            out = out @ emb[j]
    return out


def higher_phi(phi: Tensor, i: int, j: int) -> Mat:
    """phi_{i,...,j} on the (j - i + 1)-factor space (1-based labels)."""
    if j <= i:
        raise ValueError("need j > i")
    return higher_phi_mat(phi, j - i + 1)


def check_proof_identities(sigma: Tensor, c: Tensor, phi: Tensor) -> AxiomReport:
    """The higher-twist, antisymmetrizer and structure-constant identities
    used in the nilpotency proof, on up to four tensor factors."""
    n = sigma.n
    rep = AxiomReport()
    s = braid_mat(sigma)
    p = braid_mat(phi)
    st = p @ s @ p.inverse()

    # phi_{1..m} sigma_{1+k} = sigmatilde_{m-k-1} phi_{1..m}
    for m in (2, 3, 4):
        big = higher_phi_mat(phi, m)
        for k in range(m - 1):
            lhs = big @ embed(s, n, m, k)
            rhs = embed(st, n, m, m - k - 2) @ big
            rep.record_mat(f"higher_twist_m{m}_k{k}", lhs - rhs)

    # A_k^{(st)} st_j = -A_k^{(st)} for j < k <= 4
    ast = antisymmetrizer_mats(st, n, 4)
    for k in (2, 3, 4):
        a = ast[k]
        for j in range(k - 1):
            lhs = a @ embed(st, n, k, j)
            rep.record_mat(f"antisym_absorb_k{k}_j{j + 1}", lhs + a)

    asig = antisymmetrizer_mats(s, n, 4)
    # A_4 C_{34} C_{12}delta (1 - sigma_1) = 0
    lhs = asig[4] @ cmat(c, 4, 2) @ cmat(c, 3, 0) @ (
        Mat.identity(n * n) - s)
    rep.record_mat("ccdelta_identity_1", lhs)
    # A_3 C_{12}delta C_{12} = 0
    rep.record_mat("ccdelta_identity_2", asig[3] @ cmat(c, 3, 0) @ cmat(c, 2, 0))

    # A_3^{(st)} phi_{123} (1 - sigma_23 sigma_12) = 0
    s12, s23 = embed(s, n, 3, 0), embed(s, n, 3, 1)
    big3 = higher_phi_mat(phi, 3)
    lhs = ast[3] @ big3 @ (Mat.identity(n ** 3) - s23 @ s12)
    rep.record_mat("cubic_obstruction", lhs)
    return rep
