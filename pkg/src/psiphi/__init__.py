"""Fixed points and fractal attractors of generalized (psi, phi)-contractions."""

from .estimators import (CoupledIFSAttractor, CoupledPicardSolver, ExtendedPicardSolver,
                         IFSAttractor, PicardSolver)
from .fractal import (IFS, AttractorReport, CompactSet, CoupledIFS, apply_coupled_ifs,
                      apply_ifs, apply_map_set, attractor_solve, coupled_attractor_solve,
                      directed_distance, fractal_contraction_check, hausdorff)
from .maps import CoupledMapSpec, ExtendedPairSpec, SelfMapSpec
from .piecewise import (ConditionReport, DomainError, PiecewiseFn, check_popescu,
                        check_proinov, evaluate, is_nondecreasing, max_combine, right_limit,
                        strictly_dominates)
from .solver import (SolveReport, VerifyReport, coupled_solve, extended_solve, picard_iterate,
                     picard_solve, verify_contraction)
from .spaces import ProductSpace, Space, dist, product_dist

__all__ = [
    "AttractorReport", "CompactSet", "ConditionReport", "CoupledIFS", "CoupledIFSAttractor",
    "CoupledMapSpec", "CoupledPicardSolver", "DomainError", "ExtendedPairSpec",
    "ExtendedPicardSolver", "IFS", "IFSAttractor", "PicardSolver", "PiecewiseFn",
    "ProductSpace", "SelfMapSpec", "SolveReport", "Space", "VerifyReport", "apply_coupled_ifs",
    "apply_ifs", "apply_map_set", "attractor_solve", "check_popescu", "check_proinov",
    "coupled_attractor_solve", "coupled_solve", "directed_distance", "dist", "evaluate",
    "extended_solve", "fractal_contraction_check", "hausdorff", "is_nondecreasing",
    "max_combine", "picard_iterate", "picard_solve", "product_dist", "right_limit",
    "strictly_dominates", "verify_contraction",
]
