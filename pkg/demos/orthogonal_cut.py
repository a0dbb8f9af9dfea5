"""Orthogonal-Cut relaxation on the Stiefel product manifold.

The decision blocks are d x k frames with orthonormal columns instead of
unit vectors; the same solver runs with blockwise polar retraction.  The
certified bound holds with the effective rank k_d = 2k/(d+1).
"""

import numpy as np

import lowranksdp as lr


def main():
    n, d = 120, 3
    m = n // d
    A = lr.goe(n, seed=0).with_block_dim(d)
    print(f"GOE({n}) viewed as {m} blocks of size {d}\n")

    est = lr.estimate_sdp(A, seed=1, manifold="stiefel", pga_iters=2500)
    print(f"high-rank estimate (rank {est.rank_used}): SDP_o ~ {est.value_plus:.2f}, "
          f"range rg ~ {est.rg:.2f}\n")

    print(f"{'k':>3} {'k_d':>5} {'f':>9} {'gap':>8} {'cert':>8} {'bound holds':>12}")
    for k in (4, 6, 9, 12):
        sigma0 = lr.oc_random_config(m, d, k, seed=k)
        warm = lr.projected_gradient_ascent(A, sigma0, step=1 / (4 * A.l1_norm()),
                                            iters=2000, grad_tol=1e-3)
        rep = lr.solve(A, lr.SolverOptions(k=k, seed=2, manifold="stiefel",
                                           max_iters=300, max_power_iters=2000),
                       sigma0=warm.sigma)
        holds, slack = lr.oc_grothendieck_check(A, rep.sigma, rep.epsilon, est)
        k_d = 2 * k / (d + 1)
        print(f"{k:3d} {k_d:5.1f} {rep.objective:9.2f} "
              f"{est.value_plus - rep.objective:8.2f} {rep.curvature_cert:8.3f} "
              f"{str(holds):>12}")

    print("\nwith d = 1 the Stiefel product is the product of spheres; the two")
    print("pipelines agree exactly:")
    A1 = lr.goe(60, seed=3).with_block_dim(1)
    rs = lr.solve(A1, lr.SolverOptions(k=3, seed=5, max_iters=4000))
    ro = lr.solve(A1, lr.SolverOptions(k=3, seed=5, manifold="stiefel",
                                       max_iters=4000))
    same = np.array_equal(rs.sigma.rows, ro.sigma.rows)
    print(f"  identical final configurations: {same}")


if __name__ == "__main__":
    main()
