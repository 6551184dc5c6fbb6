from srm_benchmark.spaces.space import Space
from srm_benchmark.spaces.choice import ChoiceSpace
from srm_benchmark.spaces.box import BoxSpace
