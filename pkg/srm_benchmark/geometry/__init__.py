from srm_benchmark.geometry.constraints import (ConstraintSet, build_constraints, d_max_star, feasibility_check,
                                                heuristic_interior_point, interior_point)
from srm_benchmark.geometry.projection import (ProjectionTape, backward_C_wrt_d, backward_D_wrt_C,
                                               backward_D_wrt_phat, backward_E_wrt_D, epsilon_star,
                                               project_forward, projection_backward)
from srm_benchmark.geometry.rates import grad_neg_sum_rate, sinr, sinr_vjp, sum_rate
from srm_benchmark.geometry.batch import BatchTape, ConstraintBatch, backward_batch, project_batch
from srm_benchmark.geometry.qp import l2_projection, solve_l2_projection
