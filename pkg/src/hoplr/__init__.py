"""Higher order polynomial lattice rules for quasi-Monte Carlo integration.

Component-by-component construction (naive and FFT-accelerated), worst-case
errors in weighted Walsh spaces, and digital-net point generation.
"""

from .cbc import (
    BudgetExceeded,
    CbcState,
    LatticeRule,
    cbc_fast,
    cbc_naive,
    load_rule,
    save_rule,
)
from .convolve import ConvPlan, circ_convolve, fft_arbitrary_length, make_plan
from .gfpoly import (
    ExpTable,
    Modulus,
    PolyGF,
    PrimeBase,
    find_generator,
    find_irreducible,
    is_irreducible,
    poly_add,
    poly_divmod,
    poly_mul,
    poly_mulmod,
    poly_powmod,
    v_n_map,
)
from .pointgen import (
    GenMatrix,
    PointSet,
    digitalnet_points,
    interlace,
    lattice_matrices,
    lattice_points,
    points_to_csv,
    read_matrix_file,
    read_points_bin,
    rule_points,
    write_matrix_file,
    write_points_bin,
)
from .reference import REFERENCE_RULES, ReferenceRule, audit_construction, evaluate_errors
from .walsh_kernel import (
    DigitRational,
    KernelTable,
    Smoothness,
    build_kernel_table,
    omega_at_zero,
    omega_base2,
    omega_digits,
    omega_nonzero_digits,
    omega_series_oracle,
    r_alpha,
    triangular_sum,
    triangular_sum_all,
    wal_k,
)
from .wce import (
    WeightSequence,
    c_walsh,
    prefix_wce_products,
    wce_bound,
    wce_dual_bruteforce,
    wce_product,
)

__version__ = "0.1.0"
