"""
Plain-text model checkpoints::

    srm-checkpoint 1
    variant srnet
    cell_count 3
    layers 12 128 64 6
    bn 0.99 1e-05
    stats mean 9
    <values>
    stats std 9
    <values>
    param W0 12 128
    <one line per row>
    ...
    running mean0 128
    <values>
    end

Every array block is a keyed line with its shape followed by the rows, written and read with
numpy's text routines at 17 significant digits so a save/load round trip is exact.
"""
import numpy as np

from srm_benchmark.errors import CheckpointError
from srm_benchmark.srnet.features import FeatureStats
from srm_benchmark.srnet.model import MlpModel

MAGIC = "srm-checkpoint"
VERSION = 1
FLOAT_FORMAT = "%.17g"
BLOCKS = ("stats", "param", "running")


def _block(fh, key, name, value):
    value = np.asarray(value, dtype=float)
    fh.write(f"{key} {name} " + " ".join(str(s) for s in value.shape) + "\n")
    np.savetxt(fh, np.atleast_2d(value), fmt=FLOAT_FORMAT)


def save_model(model, path):
    with open(path, "w") as fh:
        fh.write(f"{MAGIC} {VERSION}\nvariant {model.variant}\ncell_count {model.cell_count}\n")
        fh.write("layers " + " ".join(str(s) for s in model.layer_sizes) + "\n")
        fh.write(f"bn {float(model.momentum):.17g} {float(model.epsilon):.17g}\n")
        if model.feature_stats is not None:
            _block(fh, "stats", "mean", model.feature_stats.mean)
            _block(fh, "stats", "std", model.feature_stats.std)
        for name, value in model.params.items():
            _block(fh, "param", name, value)
        for name, value in model.running.items():
            _block(fh, "running", name, value)
        fh.write("end\n")


class _Reader:
    def __init__(self, lines):
        self._lines = lines
        self.number = 0

    def next(self):
        if self.number >= len(self._lines):
            raise CheckpointError("unexpected end of checkpoint", line=self.number)
        self.number += 1
        return self._lines[self.number - 1].split()

    def keyed(self, key):
        fields = self.next()
        if not fields or fields[0] != key:
            raise CheckpointError(f"expected {key!r}", line=self.number)
        return fields[1:]

    def block(self, shape):
        """The rows following a block line, reshaped to the announced shape."""
        rows = shape[0] if len(shape) == 2 else 1
        lines = self._lines[self.number:self.number + rows]
        if len(lines) < rows:
            raise CheckpointError("unexpected end of checkpoint", line=len(self._lines))
        try:
            values = np.loadtxt(lines, dtype=float, ndmin=2)
        except ValueError as e:
            raise CheckpointError(f"bad block: {e}", line=self.number + 1) from e
        if values.shape != (rows, shape[-1]):
            raise CheckpointError(f"expected {rows}x{shape[-1]} values, got {values.shape}", line=self.number + 1)
        self.number += rows
        return values.reshape(shape)


def load_model(path):
    """Read a checkpoint written by save_model, the model comes back in eval mode."""
    try:
        with open(path, "r") as fh:
            reader = _Reader(fh.read().splitlines())
    except OSError as e:
        raise CheckpointError(f"can't read checkpoint {path}: {e}") from e
    header = reader.next()
    if header != [MAGIC, str(VERSION)]:
        raise CheckpointError(f"not a version {VERSION} checkpoint", line=1)
    try:
        variant = reader.keyed("variant")[0]
        cell_count = int(reader.keyed("cell_count")[0])
        sizes = [int(s) for s in reader.keyed("layers")]
        momentum, epsilon = (float(v) for v in reader.keyed("bn"))
        model = MlpModel(sizes, variant, cell_count, momentum, epsilon)
    except (ValueError, IndexError) as e:
        raise CheckpointError(f"bad header: {e}", line=reader.number) from e
    stats = {}
    loaded = set()
    fields = reader.next()
    while fields and fields[0] in BLOCKS:
        key = fields[0]
        try:
            name, shape = fields[1], tuple(int(s) for s in fields[2:])
        except (ValueError, IndexError) as e:
            raise CheckpointError(f"bad block line: {e}", line=reader.number) from e
        if key == "stats":
            if name not in ("mean", "std") or shape != (cell_count * cell_count,):
                raise CheckpointError(f"unexpected statistics {name} {shape}", line=reader.number)
            stats[name] = reader.block(shape)
        elif key == "param":
            if name not in model.params or model.params[name].shape != shape:
                raise CheckpointError(f"unexpected parameter {name} {shape}", line=reader.number)
            model.params[name] = reader.block(shape)
            loaded.add(name)
        else:
            if name not in model.running or model.running[name].shape != shape:
                raise CheckpointError(f"unexpected running statistic {name} {shape}", line=reader.number)
            model.running[name] = reader.block(shape)
        fields = reader.next()
    if fields != ["end"]:
        raise CheckpointError("expected 'end'", line=reader.number)
    missing = sorted(set(model.params) - loaded)
    if missing:
        raise CheckpointError(f"missing parameters {', '.join(missing)}")
    if stats:
        if set(stats) != {"mean", "std"}:
            raise CheckpointError("feature statistics need both mean and std")
        model.feature_stats = FeatureStats(mean=stats["mean"], std=stats["std"])
    return model.eval()
