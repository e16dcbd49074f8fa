"""Reference eigensolver used to check the iterative methods.

Eigenvalues come from a Householder reduction to upper Hessenberg form
followed by implicit double-shift (Francis) QR sweeps, written out here so
that nothing is shared with the code path under test. Eigenvectors are read
off as null vectors of ``M - lambda I``.

Ordering follows the convention used throughout the package: descending
modulus, with near-equal moduli broken by descending real part and then
descending imaginary part.
"""

from dataclasses import dataclass

import numpy as np

from .errors import EigFailed, ShapeError
from .linalg import as_matrix

__all__ = ["Spectrum", "general_eig", "hessenberg", "TIE_RTOL"]

TIE_RTOL = 1e-9
_MAX_N = 64
_EPS = np.finfo(float).eps


def _house(x):
    v = np.array(x, dtype=float)
    alpha = np.linalg.norm(v)
    if alpha == 0.0:
        return v, 0.0
    v[0] += np.copysign(alpha, v[0])
    return v, 2.0 / (v @ v)


def hessenberg(M):
    """Upper Hessenberg matrix orthogonally similar to ``M`` (Householder)."""
    H = np.array(as_matrix(M), dtype=float)
    n = H.shape[0]
    for k in range(n - 2):
        v, beta = _house(H[k + 1:, k])
        if beta == 0.0:
            continue
        H[k + 1:, k:] -= beta * np.outer(v, v @ H[k + 1:, k:])
        H[:, k + 1:] -= beta * np.outer(H[:, k + 1:] @ v, v)
        H[k + 2:, k] = 0.0
    return H


def _francis_step(H, s, t):
    # in-place double-shift bulge chase on an unreduced Hessenberg block
    p = H.shape[0]
    x = H[0, 0] * H[0, 0] + H[0, 1] * H[1, 0] - s * H[0, 0] + t
    y = H[1, 0] * (H[0, 0] + H[1, 1] - s)
    z = H[1, 0] * H[2, 1]
    for k in range(p - 2):
        v, beta = _house([x, y, z])
        q = max(0, k - 1)
        H[k:k + 3, q:] -= beta * np.outer(v, v @ H[k:k + 3, q:])
        r = min(k + 4, p)
        H[:r, k:k + 3] -= beta * np.outer(H[:r, k:k + 3] @ v, v)
        x = H[k + 1, k]
        y = H[k + 2, k]
        if k < p - 3:
            z = H[k + 3, k]
    v, beta = _house([x, y])
    H[p - 2:, p - 3:] -= beta * np.outer(v, v @ H[p - 2:, p - 3:])
    H[:, p - 2:] -= beta * np.outer(H[:, p - 2:] @ v, v)


def _eig2(B):
    """Eigenvalues of a real 2x2 block; complex pairs come out exactly conjugate."""
    y, b = B[0, 0], B[0, 1]
    c, x = B[1, 0], B[1, 1]
    w = b * c
    p = 0.5 * (y - x)
    q = p * p + w
    z = np.sqrt(abs(q))
    if q >= 0.0:
        z = p + np.copysign(z, p)
        lam1 = x + z
        lam2 = x - w / z if z != 0.0 else lam1
        return [complex(lam1), complex(lam2)]
    mid = x + p
    return [complex(mid, z), complex(mid, -z)]


def _qr_eigenvalues(M, max_sweeps_per_eig=40):
    H = hessenberg(M)
    n = H.shape[0]
    norm = np.abs(H).sum()
    out = []
    hi = n - 1
    its = 0
    while hi >= 0:
        l = hi
        while l > 0:
            tiny = abs(H[l - 1, l - 1]) + abs(H[l, l])
            if tiny == 0.0:
                tiny = norm
            if abs(H[l, l - 1]) <= _EPS * tiny:
                H[l, l - 1] = 0.0
                break
            l -= 1
        if l == hi:
            out.append(complex(H[hi, hi]))
            hi -= 1
            its = 0
        elif l == hi - 1:
            out.extend(_eig2(H[hi - 1:hi + 1, hi - 1:hi + 1]))
            hi -= 2
            its = 0
        else:
            its += 1
            if its > max_sweeps_per_eig:
                raise EigFailed(f"QR iteration stalled on active block [{l}, {hi}]")
            block = H[l:hi + 1, l:hi + 1]
            if its % 10 == 0:
                # exceptional shift to break cycles
                w = abs(block[-1, -2]) + abs(block[-2, -3])
                s, t = 1.5 * w, w * w
            else:
                s = block[-2, -2] + block[-1, -1]
                t = block[-2, -2] * block[-1, -1] - block[-2, -1] * block[-1, -2]
            _francis_step(block, s, t)
    return np.array(out, dtype=complex)


def _sort_order(lams, rtol=TIE_RTOL):
    order = sorted(range(len(lams)), key=lambda i: -abs(lams[i]))
    groups = [[order[0]]]
    for i in order[1:]:
        prev = abs(lams[groups[-1][-1]])
        if prev - abs(lams[i]) <= rtol * max(prev, np.finfo(float).tiny):
            groups[-1].append(i)
        else:
            groups.append([i])
    out = []
    for g in groups:
        out.extend(sorted(g, key=lambda i: (-lams[i].real, -lams[i].imag)))
    return out


def _fix_phase(v):
    v = v / np.linalg.norm(v)
    mags = np.abs(v)
    j = int(np.argmax(mags >= mags.max() * (1 - 1e-12)))
    return v * (abs(v[j]) / v[j])


def _null_basis(M, lam, k, scale):
    n = M.shape[0]
    K = M.astype(complex) - lam * np.eye(n)
    _, _, Vh = np.linalg.svd(K)
    basis = Vh[n - k:].conj().T
    if k > 1 and np.linalg.norm(K @ basis) > 1e-7 * scale:
        # defective cluster: fall back to the generalized eigenspace
        _, _, Vh = np.linalg.svd(np.linalg.matrix_power(K, k))
        basis = Vh[n - k:].conj().T
    return basis


@dataclass(frozen=True)
class Spectrum:
    """Eigenvalues and unit eigenvectors of a real square matrix.

    Attributes
    ----------
    eigenvalues : ndarray of complex, shape (n,)
        Sorted by descending modulus (ties: real part, then imaginary part, descending).
    vectors : ndarray of complex, shape (n, n)
        Column ``i`` is the unit-norm (generalized) eigenvector for ``eigenvalues[i]``.
    ties : tuple of int
        Indices ``i`` such that ``|lambda_i|`` and ``|lambda_{i+1}|`` agree within
        :data:`TIE_RTOL` relative (0-based).
    """

    eigenvalues: np.ndarray
    vectors: np.ndarray
    ties: tuple

    @property
    def moduli(self):
        return np.abs(self.eigenvalues)

    def has_gap(self, m):
        """True when ``|lambda_m| > |lambda_{m+1}|`` strictly (1-based ``m``)."""
        if not 1 <= m < len(self.eigenvalues):
            return False
        return (m - 1) not in self.ties

    def gap_ratio(self, m):
        """``|lambda_{m+1}| / |lambda_m|``, the asymptotic contraction factor at cut ``m``."""
        mod = self.moduli
        return float(mod[m] / mod[m - 1])

    def dominant_basis(self, m):
        """Real orthonormal basis of the span of the first ``m`` eigenvectors.

        Raises ``ValueError`` when the cut splits a complex conjugate pair, in
        which case no real ``m``-dimensional invariant subspace exists there.
        """
        lead = self.eigenvalues[:m]
        for lam in lead:
            if lam.imag != 0.0 and not np.any(np.isclose(lead, np.conj(lam), rtol=0, atol=1e-12 * max(1.0, abs(lam)))):
                raise ValueError(f"cut at m={m} splits a complex conjugate pair")
        P = self.vectors[:, :m]
        real_span = np.hstack([P.real, P.imag])
        U, s, _ = np.linalg.svd(real_span, full_matrices=False)
        return U[:, :m]

    def dominant_projector(self, m):
        Ub = self.dominant_basis(m)
        return Ub @ Ub.T


def general_eig(M):
    """Eigen-decomposition of a real square matrix up to 64 x 64.

    Returns
    -------
    Spectrum

    Raises
    ------
    EigFailed
        If the QR sweeps fail to deflate.
    """
    M = as_matrix(M)
    n = M.shape[0]
    if M.shape[1] != n:
        raise ShapeError(f"general_eig needs a square matrix, got {M.shape}")
    if n > _MAX_N:
        raise ShapeError(f"general_eig is limited to n <= {_MAX_N}, got {n}")

    lams = _qr_eigenvalues(M)
    order = _sort_order(lams)
    lams = lams[order]

    scale = max(np.linalg.norm(M, 1), np.finfo(float).tiny)
    vecs = np.zeros((n, n), dtype=complex)
    i = 0
    while i < n:
        j = i + 1
        while j < n and abs(lams[j] - lams[i]) <= 1e-8 * scale:
            j += 1
        k = j - i
        lam = lams[i:j].mean()
        partner = None
        if lam.imag < 0:
            hits = [p for p in range(i) if abs(lams[p] - np.conj(lam)) <= 1e-8 * scale]
            if len(hits) == k:
                partner = hits
        if partner is not None:
            block = vecs[:, partner].conj()
        else:
            block = _null_basis(M, lam, k, scale)
            block = np.column_stack([_fix_phase(block[:, c]) for c in range(k)])
            if lam.imag == 0.0:
                block = block.real.astype(complex)
        vecs[:, i:j] = block
        lams[i:j] = lam
        i = j

    mod = np.abs(lams)
    ties = tuple(
        i for i in range(n - 1)
        if mod[i] - mod[i + 1] <= TIE_RTOL * max(mod[i], np.finfo(float).tiny)
    )
    lams.setflags(write=False)
    vecs.setflags(write=False)
    return Spectrum(lams, vecs, ties)
