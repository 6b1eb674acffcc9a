"""Isometry conditions for finite quantum symmetries of metric spaces.

Exact optimal transport with duality certificates, coupling feasibility
(the marriage theorem at measure level), magic-unitary coactions of finite
quantum groups, decision procedures for the diagonal and Wasserstein
isometry conditions, and the largest isometrically-acting quotient.
"""

from .metric import (FiniteMetricSpace, PairSet, ball, level_set,
                     lipschitz_constant, random_metric_space, sublevel_set,
                     validate_metric)
from .transport import (Coupling, DualPotentials, ProbVector, TransportResult,
                        enumerate_boxed_dual_vertices,
                        enumerate_lipschitz_vertices, feasible_coupling_on,
                        kantorovich_w1, prob_vector, solve_transport,
                        wasserstein_inf, wasserstein_p)
from .hall import (HallInstance, HallVerdict, decide_hall, hall_condition,
                   neighborhood, perfect_matching)
from .algebra import (AlgElement, FinDimCStarAlgebra, StateFunctional,
                      extreme_state, random_state)
from .quantum_group import (QuantumGroup, haar_state, verify_quantum_group)
from .coaction import (CoAction, a_element, act_on_function, act_on_point,
                       orbits, verify_coaction)
from .isometry import (IsometryVerdict, check_D, check_D_commutant,
                       check_injectivity, check_lip1_universal,
                       check_lip_p_state, check_lip_p_universal,
                       check_orthogonality, check_theorem_main,
                       check_winf_universal)
from .envelope import (BlockIdeal, EnvelopeResult, annihilator_convolution_check,
                       envelope, generated_ideal, hopf_saturate,
                       verify_universal_property)

__version__ = "0.1.0"
