"""
A fully connected network written directly in numpy: affine -> batch norm -> ReLU per hidden
layer and an affine output head. The head is read by the caller, srnet turns it into the raw
powers and distances fed to the projection block, the penalty networks only into powers.
"""
import numpy as np

from srm_benchmark.errors import InvalidArgumentError

VARIANTS = ("srnet", "srnet-heu", "penalty-add", "penalty-mul")


def output_size(variant, cell_count):
    if variant not in VARIANTS:
        raise InvalidArgumentError(f"unknown variant {variant!r}, expected one of {VARIANTS}")
    return 2 * cell_count if variant == "srnet" else cell_count


class MlpModel:
    """
    Parameters:
        layer_sizes(int[]): input width, hidden widths and output width
        variant(str): one of VARIANTS
        cell_count(int): K
        momentum(float): running statistics momentum of the batch norm layers
        epsilon(float): batch norm variance offset
    """
    def __init__(self, layer_sizes, variant, cell_count, momentum=0.99, epsilon=1e-5):
        layer_sizes = [int(s) for s in layer_sizes]
        if len(layer_sizes) < 2 or min(layer_sizes) < 1:
            raise InvalidArgumentError(f"bad layer sizes {layer_sizes}")
        if layer_sizes[0] != cell_count * cell_count + cell_count:
            raise InvalidArgumentError(f"input width has to be K^2+K = {cell_count * cell_count + cell_count}")
        if layer_sizes[-1] != output_size(variant, cell_count):
            raise InvalidArgumentError(f"output width of {variant} has to be {output_size(variant, cell_count)}")
        self.layer_sizes = layer_sizes
        self.variant = variant
        self.cell_count = cell_count
        self.momentum = momentum
        self.epsilon = epsilon
        self.params = {}
        self.running = {}
        self.feature_stats = None
        self.training = True
        for i, (fan_in, fan_out) in enumerate(zip(layer_sizes[:-2], layer_sizes[1:-1])):
            self.params[f"W{i}"] = np.zeros((fan_in, fan_out))
            self.params[f"b{i}"] = np.zeros(fan_out)
            self.params[f"gamma{i}"] = np.ones(fan_out)
            self.params[f"beta{i}"] = np.zeros(fan_out)
            self.running[f"mean{i}"] = np.zeros(fan_out)
            self.running[f"var{i}"] = np.ones(fan_out)
        self.params["W_out"] = np.zeros(tuple(layer_sizes[-2:]))
        self.params["b_out"] = np.zeros(layer_sizes[-1])

    @property
    def hidden_count(self):
        return len(self.layer_sizes) - 2

    @property
    def heuristic(self):
        return self.variant == "srnet-heu"

    def train(self):
        self.training = True
        return self

    def eval(self):
        self.training = False
        return self

    def copy(self):
        other = MlpModel(self.layer_sizes, self.variant, self.cell_count, self.momentum, self.epsilon)
        other.params = {k: v.copy() for k, v in self.params.items()}
        other.running = {k: v.copy() for k, v in self.running.items()}
        other.feature_stats = self.feature_stats
        other.training = self.training
        return other

    def forward(self, x, update_stats=True):
        """
        Run the body and the output head.

        Parameters:
            x(float[][]): (M, K^2+K) features
            update_stats(bool): fold the batch statistics into the running ones in train mode

        Returns:
            float[][]: (M, output width) pre-activation outputs
            list: the activations backward needs
        """
        x = np.asarray(x, dtype=float)
        if x.ndim != 2 or x.shape[1] != self.layer_sizes[0]:
            raise InvalidArgumentError(f"expected (M, {self.layer_sizes[0]}) features, got {x.shape}")
        if self.training and x.shape[0] < 2:
            raise InvalidArgumentError("batch norm needs at least 2 samples per batch in train mode")
        cache = []
        h = x
        for i in range(self.hidden_count):
            z = h @ self.params[f"W{i}"] + self.params[f"b{i}"]
            if self.training:
                mean, var = z.mean(axis=0), z.var(axis=0)
                if update_stats:
                    self.running[f"mean{i}"] = self.momentum * self.running[f"mean{i}"] + (1 - self.momentum) * mean
                    self.running[f"var{i}"] = self.momentum * self.running[f"var{i}"] + (1 - self.momentum) * var
            else:
                mean, var = self.running[f"mean{i}"], self.running[f"var{i}"]
            inv_std = 1.0 / np.sqrt(var + self.epsilon)
            z_hat = (z - mean) * inv_std
            y = self.params[f"gamma{i}"] * z_hat + self.params[f"beta{i}"]
            cache.append((h, z_hat, inv_std, y))
            h = np.maximum(y, 0.0)
        cache.append(h)
        return h @ self.params["W_out"] + self.params["b_out"], cache

    def backward(self, cache, d_out):
        """Gradients of every parameter given dLoss/d(output) from the matching forward."""
        d_out = np.asarray(d_out, dtype=float)
        h = cache[-1]
        if d_out.shape != (h.shape[0], self.layer_sizes[-1]):
            raise InvalidArgumentError(f"upstream shape {d_out.shape} doesn't match the forward batch")
        grads = {"W_out": h.T @ d_out, "b_out": d_out.sum(axis=0)}
        dh = d_out @ self.params["W_out"].T
        for i in reversed(range(self.hidden_count)):
            h_in, z_hat, inv_std, y = cache[i]
            dy = dh * (y > 0)
            grads[f"gamma{i}"] = (dy * z_hat).sum(axis=0)
            grads[f"beta{i}"] = dy.sum(axis=0)
            dz_hat = dy * self.params[f"gamma{i}"]
            if self.training:
                count = dz_hat.shape[0]
                dz = inv_std / count * (count * dz_hat - dz_hat.sum(axis=0) - z_hat * (dz_hat * z_hat).sum(axis=0))
            else:
                dz = dz_hat * inv_std
            grads[f"W{i}"] = h_in.T @ dz
            grads[f"b{i}"] = dz.sum(axis=0)
            dh = dz @ self.params[f"W{i}"].T
        return grads


def init_model(config, cell_count, variant="srnet", rng=None):
    """
    Xavier-uniform weights, zero biases, unit batch norm scale and zero shift.

    Parameters:
        config(TrainConfig): hidden sizes and batch norm constants
        cell_count(int): K
        variant(str): one of VARIANTS
        rng(np.random.Generator): defaults to a generator seeded with config.seed

    Returns:
        MlpModel: the initialised model in train mode
    """
    rng = np.random.default_rng(config.seed) if rng is None else rng
    sizes = [cell_count * cell_count + cell_count, *config.hidden, output_size(variant, cell_count)]
    model = MlpModel(sizes, variant, cell_count, config.bn_momentum, config.bn_epsilon)
    names = [f"W{i}" for i in range(model.hidden_count)] + ["W_out"]
    for name in names:
        fan_in, fan_out = model.params[name].shape
        limit = np.sqrt(6.0 / (fan_in + fan_out))
        model.params[name] = rng.uniform(-limit, limit, (fan_in, fan_out))
    model.feature_stats = config.feature_stats
    return model
