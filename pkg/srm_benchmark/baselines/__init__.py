from srm_benchmark.baselines.trivial import baseline_p0
from srm_benchmark.baselines.penalty import (PenaltyOutput, infer_penalty_net, penalty_loss, search_penalty_weight,
                                             train_penalty_net)
from srm_benchmark.baselines.ensemble import ensemble_select, train_ensemble
from srm_benchmark.baselines.local_opt import LocalOptResult, multistart_local_opt
