"""Symmetry reduction of SDPs under a finite unitary group representation.

If every data matrix commutes with the action (invariance), an optimal
solution can be chosen inside the commutant algebra.  The commutant is
computed by Reynolds-averaging matrix units; a Hermitian orthonormal basis
of it turns the cone condition into positive semidefiniteness of the left
multiplication operator, which is a faithful *-representation, so nothing
is lost while the variable shrinks to the commutant dimension.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

import numpy as np

from .sdpmodel import (
    Block, LinearConstraint, SDPModel, HermitianModel, ModelError,
    realify, realify_matrix,
)
from . import ipm

UNITARY_TOL = 1e-8
RANK_TOL = 1e-9


class GroupError(Exception):
    pass


class InvarianceError(Exception):
    def __init__(self, message, element=None, residual=None):
        super().__init__(message)
        self.element = element
        self.residual = residual


@dataclass
class GroupRep:
    """Finite collection of unitaries closed under multiplication."""

    elements: list[np.ndarray]
    tol: float = UNITARY_TOL

    def __post_init__(self):
        if not self.elements:
            raise GroupError("empty representation")
        mats = [np.asarray(U, dtype=complex) for U in self.elements]
        d = mats[0].shape[0]
        for k, U in enumerate(mats):
            if U.shape != (d, d):
                raise GroupError(f"element {k} is not {d}x{d}")
            if np.linalg.norm(U @ U.conj().T - np.eye(d)) > self.tol:
                raise GroupError(f"element {k} is not unitary")
        if not any(np.linalg.norm(U - np.eye(d)) <= self.tol for U in mats):
            raise GroupError("representation does not contain the identity")
        for a, Ua in enumerate(mats):
            for b, Ub in enumerate(mats):
                P = Ua @ Ub
                if not any(np.linalg.norm(P - U) <= self.tol for U in mats):
                    raise GroupError(
                        f"product of elements {a} and {b} leaves the set; "
                        "representation is not closed")
        self.elements = mats

    @property
    def dim(self) -> int:
        return self.elements[0].shape[0]

    def __len__(self) -> int:
        return len(self.elements)

    def average(self, M: np.ndarray) -> np.ndarray:
        """Reynolds projection onto the commutant."""
        M = np.asarray(M, dtype=complex)
        return sum(U @ M @ U.conj().T for U in self.elements) / len(self.elements)

    def invariance_residual(self, M: np.ndarray) -> tuple[float, int]:
        worst, arg = 0.0, 0
        for k, U in enumerate(self.elements):
            r = float(np.linalg.norm(U @ M @ U.conj().T - M))
            if r > worst:
                worst, arg = r, k
        return worst, arg


@dataclass
class InvariantBasis:
    rep: GroupRep
    mats: list[np.ndarray]             # HS-orthonormal commutant basis
    structure: np.ndarray = field(init=False)  # lambda[i, j, k]

    def __post_init__(self):
        m = len(self.mats)
        lam = np.zeros((m, m, m), dtype=complex)
        for i in range(m):
            for j in range(m):
                P = self.mats[i] @ self.mats[j]
                for k in range(m):
                    lam[i, j, k] = np.trace(self.mats[k].conj().T @ P)
        self.structure = lam

    @property
    def dim(self) -> int:
        return len(self.mats)

    def left_mult(self, k: int) -> np.ndarray:
        """Matrix of x -> B_k x in the basis, entries lambda[k, j, i]."""
        m = self.dim
        L = np.empty((m, m), dtype=complex)
        for i in range(m):
            for j in range(m):
                L[i, j] = self.structure[k, j, i]
        return L

    def reconstruction_residual(self) -> float:
        worst = 0.0
        m = self.dim
        for i in range(m):
            for j in range(m):
                approx = sum(self.structure[i, j, k] * self.mats[k]
                             for k in range(m))
                worst = max(worst, float(np.linalg.norm(
                    self.mats[i] @ self.mats[j] - approx)))
        return worst


def invariant_basis(rep: GroupRep, rank_tol: float = RANK_TOL) -> InvariantBasis:
    """HS-orthonormal basis of the commutant via averaged matrix units."""
    d = rep.dim
    basis: list[np.ndarray] = []
    for k in range(d):
        for l in range(d):
            E = np.zeros((d, d), dtype=complex)
            E[k, l] = 1.0
            M = rep.average(E)
            for B in basis:
                M = M - np.trace(B.conj().T @ M) * B
            nrm = float(np.linalg.norm(M))
            if nrm > rank_tol:
                basis.append(M / nrm)
    return InvariantBasis(rep, basis)


def _hermitian_commutant_basis(inv: InvariantBasis) -> list[np.ndarray]:
    """Real-orthonormal Hermitian basis spanning the commutant over R."""
    cands = []
    for B in inv.mats:
        cands.append((B + B.conj().T) / 2)
        cands.append((B - B.conj().T) / (2j))
    out: list[np.ndarray] = []
    for M in cands:
        for S in out:
            M = M - np.real(np.trace(S.conj().T @ M)) * S
        nrm = float(np.linalg.norm(M))
        if nrm > RANK_TOL:
            out.append(M / nrm)
    return out


@dataclass
class ReducedSDP:
    original: SDPModel
    rep: GroupRep
    herm_basis: list[np.ndarray]       # S_j, hermitian, real-orthonormal
    left_mats: list[np.ndarray]        # T_j = left multiplication by S_j
    dual_frame: list[np.ndarray]       # W_j with tr(W_j T_k) = delta_jk
    model: SDPModel                    # solver-ready reduced model
    hermitian: HermitianModel | None
    real_mode: bool
    commutant_dim: int = 0             # complex dimension of the commutant

    @property
    def reduced_dim(self) -> int:
        return len(self.herm_basis)

    def coefficients_from(self, sol: ipm.Solution) -> np.ndarray:
        Y = sol.X[0]
        if not self.real_mode:
            n = Y.shape[0] // 2
            Y = (Y[:n, :n] + Y[n:, n:]) / 2 + 1j * (Y[n:, :n] - Y[:n, n:]) / 2
            Y = (Y + Y.conj().T) / 2
        u = np.empty(len(self.left_mats))
        for j, W in enumerate(self.dual_frame):
            u[j] = float(np.real(np.trace(W.conj().T @ Y)))
        return u

    def expand(self, sol: ipm.Solution) -> np.ndarray:
        """Optimal matrix of the original SDP from a reduced solution.

        The real part is returned: the original data is real, so the real
        part of a Hermitian feasible point is feasible with equal value.
        """
        u = self.coefficients_from(sol)
        X = sum(uj * Sj for uj, Sj in zip(u, self.herm_basis))
        return np.real((X + X.conj().T) / 2)


def reduce_sdp(model: SDPModel, rep: GroupRep, tol: float = UNITARY_TOL) -> ReducedSDP:
    model.validate()
    if len(model.blocks) != 1 or model.blocks[0].diagonal:
        raise ModelError("symmetry reduction expects a single dense block")
    d = model.blocks[0].size
    if rep.dim != d:
        raise ModelError(
            f"representation dimension {rep.dim} does not match block size {d}")

    data = [("objective", model.cost[0])]
    data += [(f"constraint {k + 1}", con.matrices[0])
             for k, con in enumerate(model.constraints)]
    for name, M in data:
        r, g = rep.invariance_residual(M)
        if r > tol:
            raise InvarianceError(
                f"{name} is not invariant: residual {r:.3e} "
                f"under group element {g}", element=g, residual=r)

    inv = invariant_basis(rep)
    rep_real = max(float(np.max(np.abs(np.imag(U)))) for U in rep.elements) < 1e-12

    if rep_real:
        # averaging real matrix units keeps them real, so the same basis
        # spans the real commutant algebra; the variable lives in its
        # symmetric part and everything stays over the reals
        B = [np.real(Bi) for Bi in inv.mats]
        S = []
        for Bi in B:
            M = (Bi + Bi.T) / 2
            for Sj in S:
                M = M - np.trace(Sj.T @ M) * Sj
            nrm = float(np.linalg.norm(M))
            if nrm > RANK_TOL:
                S.append(M / nrm)
        n_red = len(B)
        T = []
        for Sj in S:
            Tj = np.empty((n_red, n_red))
            for a in range(n_red):
                for b in range(n_red):
                    Tj[a, b] = np.trace(B[a].T @ Sj @ B[b])
            T.append((Tj + Tj.T) / 2)
    else:
        S = _hermitian_commutant_basis(inv)
        n_red = len(S)
        T = []
        for Sj in S:
            Tj = np.empty((n_red, n_red), dtype=complex)
            for k in range(n_red):
                for l in range(n_red):
                    Tj[k, l] = np.trace(S[k] @ Sj @ S[l])
            T.append((Tj + Tj.conj().T) / 2)

    m = len(S)
    real_mode = rep_real or \
        max(float(np.max(np.abs(np.imag(Tj)))) for Tj in T) < 1e-12
    if real_mode:
        T = [np.real(Tj) for Tj in T]

    G = np.empty((m, m))
    for j in range(m):
        for k in range(m):
            G[j, k] = float(np.real(np.trace(np.conj(T[j]).T @ T[k])))
    Ginv = np.linalg.inv(G)
    W = [sum(Ginv[j, k] * T[k] for k in range(m)) for j in range(m)]

    # span rows: Y must stay inside span{T_j}
    iu = np.triu_indices(n_red, 1)

    def to_vec(M: np.ndarray) -> np.ndarray:
        parts = [np.real(np.diag(M)), np.sqrt(2.0) * np.real(M[iu])]
        if not real_mode:
            parts.append(np.sqrt(2.0) * np.imag(M[iu]))
        return np.concatenate(parts)

    def from_vec(v: np.ndarray) -> np.ndarray:
        M = np.zeros((n_red, n_red), dtype=complex if not real_mode else float)
        M[np.diag_indices(n_red)] = v[:n_red]
        off = n_red + len(iu[0])
        M[iu] += v[n_red:off] / np.sqrt(2.0)
        if not real_mode:
            M[iu] += 1j * v[off:] / np.sqrt(2.0)
        M[(iu[1], iu[0])] = np.conj(M[iu])
        return M

    V = np.stack([to_vec(Tj) for Tj in T])
    _, sing, Vt = np.linalg.svd(V, full_matrices=True)
    null_rows = Vt[len([s for s in sing if s > 1e-10]):]

    def functional_matrix(M_orig: np.ndarray) -> np.ndarray:
        # tr(M X) with X = sum u_j S_j becomes tr(H Y) on the reduced block
        coeffs = [float(np.real(np.trace(M_orig @ Sj))) for Sj in S]
        H = sum(c * Wj for c, Wj in zip(coeffs, W))
        return (H + H.conj().T) / 2

    cost_r = functional_matrix(model.cost[0])
    rows: list[tuple[np.ndarray, str, float]] = []
    for con in model.constraints:
        rows.append((functional_matrix(con.matrices[0]), con.sense, con.rhs))
    for v in null_rows:
        rows.append((from_vec(v), "==", 0.0))

    if real_mode:
        reduced = SDPModel(
            [Block(n_red)], [np.real(cost_r)],
            [LinearConstraint([np.real(M)], sense, rhs) for M, sense, rhs in rows])
        hermitian = None
    else:
        hermitian = HermitianModel(
            [n_red], [cost_r],
            [LinearConstraint([M], sense, rhs) for M, sense, rhs in rows])
        reduced = realify(hermitian)
    reduced.validate()
    return ReducedSDP(
        original=model, rep=rep, herm_basis=S, left_mats=T, dual_frame=W,
        model=reduced, hermitian=hermitian, real_mode=real_mode,
        commutant_dim=inv.dim)


_GROUP_TOKEN = re.compile(r"[^\s,]+")


def _parse_entry(tok: str, line_no: int) -> complex:
    t = tok.replace("i", "j").replace("I", "j")
    try:
        return complex(t)
    except ValueError:
        raise GroupError(f"line {line_no}: bad matrix entry {tok!r}") from None


def parse_group_file(path: str) -> GroupRep:
    """Representation file: a 'dim N' line, then 'element' stanzas each
    followed by N rows of N entries (complex entries like 0.5+0.5i work)."""
    with open(path, "r", encoding="utf-8") as fh:
        lines = fh.read().splitlines()
    dim = None
    elements: list[np.ndarray] = []
    current: list[list[complex]] = []

    def flush(line_no):
        nonlocal current
        if current:
            if len(current) != dim:
                raise GroupError(
                    f"line {line_no}: element has {len(current)} rows, expected {dim}")
            elements.append(np.array(current, dtype=complex))
            current = []

    for no, raw in enumerate(lines, start=1):
        s = raw.strip()
        if not s or s.startswith("#") or s.startswith("*"):
            continue
        low = s.lower()
        if low.startswith("dim"):
            if dim is not None:
                raise GroupError(f"line {no}: duplicate dim line")
            try:
                dim = int(s.split()[1])
            except (IndexError, ValueError):
                raise GroupError(f"line {no}: malformed dim line") from None
            continue
        if low == "element":
            if dim is None:
                raise GroupError(f"line {no}: element before dim")
            flush(no)
            continue
        if dim is None:
            raise GroupError(f"line {no}: expected 'dim N' first")
        row = [_parse_entry(t, no) for t in _GROUP_TOKEN.findall(s)]
        if len(row) != dim:
            raise GroupError(f"line {no}: row has {len(row)} entries, expected {dim}")
        current.append(row)
    flush(len(lines))
    if not elements:
        raise GroupError("no group elements in file")
    return GroupRep(elements)
