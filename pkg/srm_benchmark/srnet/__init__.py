from srm_benchmark.srnet.model import VARIANTS, MlpModel, init_model
from srm_benchmark.srnet.features import FeatureStats, compute_stats, featurize
from srm_benchmark.srnet.network import backward, forward, loss
from srm_benchmark.srnet.optim import AdamState, adam_step
from srm_benchmark.srnet.train import infer, train
from srm_benchmark.srnet.checkpoint import load_model, save_model
