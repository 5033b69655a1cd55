"""Brute-force dense reference implementation used as a test oracle.

Everything is assembled with explicit Python loops and solved with a dense
LAPACK solve; eigenvalues come from numpy.  Nothing here touches the package's
assembly, factorization or eigen code.
"""
import numpy as np


def local_gradients(p):
    """Gradients of the three P1 hat functions on triangle ``p`` (3x2 coordinates)."""
    M = np.array([[1.0, p[0, 0], p[0, 1]], [1.0, p[1, 0], p[1, 1]], [1.0, p[2, 0], p[2, 1]]])
    C = np.linalg.inv(M)
    area = 0.5 * abs(np.linalg.det(M))
    return C[1:, :].T, area


def dense_R(mesh, sigma, z):
    sigma = np.broadcast_to(np.asarray(sigma, float), (mesh.n_triangles,))
    z = np.broadcast_to(np.asarray(z, float), (mesh.n_electrodes,))
    n, L = mesh.n_nodes, mesh.n_electrodes
    N = n + L
    A = np.zeros((N, N))
    for t, tri in enumerate(mesh.triangles):
        g, area = local_gradients(mesh.nodes[tri])
        for a in range(3):
            for b in range(3):
                A[tri[a], tri[b]] += sigma[t] * area * (g[a] @ g[b])
    for (i, j), l in zip(mesh.boundary_edges, mesh.edge_electrode):
        if l < 0:
            continue
        h = np.linalg.norm(mesh.nodes[i] - mesh.nodes[j])
        k = 1.0 / z[l]
        # (v - V)^2 integrated exactly along the edge
        A[i, i] += k * h / 3
        A[j, j] += k * h / 3
        A[i, j] += k * h / 6
        A[j, i] += k * h / 6
        for p in (i, j):
            A[p, n + l] -= k * h / 2
            A[n + l, p] -= k * h / 2
        A[n + l, n + l] += k * h
    keep = np.arange(N - 1)  # ground the last electrode
    A = A[np.ix_(keep, keep)]
    rhs = np.zeros((N - 1, L - 1))
    rhs[n:, :] = np.eye(L - 1)
    X = np.linalg.solve(A, rhs)
    R = X[n:, :]
    return 0.5 * (R + R.T)


def dense_gram(mesh, sigma, z, region):
    """Sum over ``region`` of area * grad u_i . grad u_j via a per-triangle loop."""
    sigma = np.broadcast_to(np.asarray(sigma, float), (mesh.n_triangles,))
    z = np.broadcast_to(np.asarray(z, float), (mesh.n_electrodes,))
    n, L = mesh.n_nodes, mesh.n_electrodes
    # potentials from the same dense system
    N = n + L
    A = np.zeros((N, N))
    for t, tri in enumerate(mesh.triangles):
        g, area = local_gradients(mesh.nodes[tri])
        A[np.ix_(tri, tri)] += sigma[t] * area * (g @ g.T)
    for (i, j), l in zip(mesh.boundary_edges, mesh.edge_electrode):
        if l < 0:
            continue
        h = np.linalg.norm(mesh.nodes[i] - mesh.nodes[j])
        k = 1.0 / z[l]
        A[np.ix_([i, j], [i, j])] += k * h * np.array([[1 / 3, 1 / 6], [1 / 6, 1 / 3]])
        A[[i, j], n + l] -= k * h / 2
        A[n + l, [i, j]] -= k * h / 2
        A[n + l, n + l] += k * h
    A = A[: N - 1, : N - 1]
    rhs = np.zeros((N - 1, L - 1))
    rhs[n:, :] = np.eye(L - 1)
    U = np.linalg.solve(A, rhs)[:n]
    G = np.zeros((L - 1, L - 1))
    for t in region:
        tri = mesh.triangles[t]
        g, area = local_gradients(mesh.nodes[tri])
        grad = g.T @ U[tri]  # 2 x (L-1)
        G += area * grad.T @ grad
    return G


def dense_mu(mesh, elements, sigma0, contrast, z0):
    """Worst-case margin for conductive, nonlinearized verification with exact priors."""
    C = dense_R(mesh, sigma0, z0)
    margins = []
    for elem in elements:
        tau = np.full(mesh.n_triangles, sigma0)
        tau[list(elem)] = sigma0 + contrast
        margins.append(np.linalg.eigvalsh(dense_R(mesh, tau, z0) - C)[0])
    return max(margins), np.array(margins)
