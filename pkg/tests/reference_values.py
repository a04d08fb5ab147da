"""Frozen oracle outputs for the two canonical toy instances.

Each value was produced by an independent long-run reference computation,
noted next to the constant, and is pinned here so regressions show up as
plain numeric drift rather than silent re-baselining.
"""

# Canonical toy instances (m=4 ring, n=3, d=5, seed 7, scale 1.0).
TOY_M, TOY_N, TOY_D = 4, 3, 5
TOY_SEED = 7
TOY_P2_THETA = 0.5
TOY_P1_THETA = 3.0

# sha256 over the header and raw array bytes of the generated instances.
CHECKSUM_P2 = "fa66d067a98d6d1ee58593ceac2d6d593eac246c6ed6b72947ee36981e665d9f"
CHECKSUM_P1 = "160e5cdaf786c606c4c7267c99e12cc94d4cf263338cfaf5345176eaf452b6b5"

# Unnormalized Laplacian spectrum of the 4-cycle.
RING4_EIGS = (0.0, 2.0, 2.0, 4.0)

# Optimal value of the hard-constrained dual on the p=1 toy.  Reference:
# 100k iterations of the accelerated solver, cross-checked by a 50k-iteration
# randomized coordinate run; the two agree to 6e-8 and the lower of the two
# is recorded.
DUAL_OPT_P1_BOX = 17.320888892851283
DUAL_OPT_P1_TOL = 5e-7

# Optimal value of the penalty-regularized dual on the p=2 toy at the
# default weight nu = 5e-5.  Reference: 400k accelerated iterations with a
# tail decrement below 2e-9 per thousand iterations.
PENALIZED_DUAL_OPT_P2 = -2.596532388289077
PENALIZED_DUAL_OPT_P2_TOL = 1e-6

# Primal optimum of the p=2 toy, single-simplex form.  Two independent
# references agree to 1.2e-11: a 1e6-iteration projected subgradient run
# (-0.681608174073316) and recovery from a ball-constrained dual solve
# (-0.681608174085027).
PRIMAL_OPT_P2 = -0.6816081741
PRIMAL_OPT_P2_TOL = 1e-8

# Primal optimum of the p=1 toy.  Reference: negated dual optimum divided
# by m (strong duality), -4.330222223212821; a 2e5-iteration projected
# subgradient run lands within 5e-6 of it.
PRIMAL_OPT_P1 = -4.330222223212821
PRIMAL_OPT_P1_TOL = 2e-5
