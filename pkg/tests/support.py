"""Shared fixtures: permutation groups and random invariant SDP instances."""

import numpy as np

from starsdp.sdpmodel import LinearConstraint, SDPModel, Block
from starsdp.symmetry import GroupRep


def perm_matrix(perm):
    d = len(perm)
    P = np.zeros((d, d))
    for i, j in enumerate(perm):
        P[j, i] = 1.0
    return P


def cyclic_rep(perm):
    d = len(perm)
    P = perm_matrix(perm)
    mats, M = [np.eye(d)], P.copy()
    while np.linalg.norm(M - np.eye(d)) > 1e-12:
        mats.append(M.copy())
        M = M @ P
    return GroupRep(mats)


def c3_rep():
    """(123)(456) acting on 6 coordinates: two regular copies of a 3-cycle."""
    return cyclic_rep([1, 2, 0, 4, 5, 3])


def invariant_instance(rep, n_cons, rng):
    """Random bounded-feasible SDP with all data averaged into invariance.

    The strictly feasible point is normalized to unit trace so objective
    values stay O(1) and absolute comparisons line up with relative solver
    tolerances.
    """
    d = rep.dim
    C = rep.average(rng.standard_normal((d, d)))
    C = np.real(C + C.conj().T) / 2 + 3.0 * np.eye(d)
    X0 = rng.standard_normal((d, d))
    X0 = X0 @ X0.T + np.eye(d)
    X0 /= np.trace(X0)
    cons = [LinearConstraint([np.eye(d)], "==", 1.0)]
    for _ in range(n_cons):
        A = rep.average(rng.standard_normal((d, d)))
        A = np.real(A + A.conj().T) / 2
        cons.append(LinearConstraint([A], "==", float(np.trace(A @ X0))))
    return SDPModel([Block(d)], [C], cons)


def write_group_file(path, rep):
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(f"dim {rep.dim}\n")
        for U in rep.elements:
            fh.write("element\n")
            for row in U:
                if np.max(np.abs(np.imag(U))) > 1e-15:
                    fh.write(" ".join(
                        f"{v.real:.17g}{v.imag:+.17g}i" for v in row) + "\n")
                else:
                    fh.write(" ".join(f"{v.real:.17g}" for v in row) + "\n")
