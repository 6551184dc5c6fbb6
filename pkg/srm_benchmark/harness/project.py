"""
Projection debug dump: every intermediate point of the block for one instance and one
(p_hat, d) pair, with all Jacobian factors and their finite-difference residuals.
"""
import numpy as np

from srm_benchmark.errors import InfeasibleInstanceError, InvalidArgumentError
from srm_benchmark.geometry.checks import factor_residuals
from srm_benchmark.geometry.constraints import ConstraintSet, build_constraints
from srm_benchmark.geometry.projection import (backward_C_wrt_d, backward_D_wrt_C, backward_D_wrt_phat,
                                               backward_E_wrt_D, project_forward)
from srm_benchmark.geometry.rates import grad_neg_sum_rate
from srm_benchmark.scenarios.channel import ChannelRealization
from srm_benchmark.scenarios.dataset import load_dataset


def parse_vector(text):
    try:
        return np.array([float(v) for v in text.replace(" ", "").split(",") if v])
    except ValueError as e:
        raise InvalidArgumentError(f"bad vector {text!r}") from e


def parse_matrix(text):
    """Rows separated by ';', entries by ','."""
    rows = [parse_vector(row) for row in text.split(";") if row.strip()]
    if not rows or any(len(r) != len(rows[0]) for r in rows):
        raise InvalidArgumentError(f"bad matrix {text!r}")
    return np.stack(rows)


def load_instance(instance=None, gains=None, gamma=None, B=None, q=None, p_max=1.0, noise=1.0):
    """
    One of: instance='file.csv:index', gains+gamma (with noise and p_max) or B+q (with p_max).

    Returns:
        ChannelRealization|None: the channel, None when only B and q are known
        ConstraintSet: its constraint set
    """
    if instance is not None:
        path, _, index = instance.rpartition(":")
        if not path:
            raise InvalidArgumentError("--instance has to look like FILE:INDEX")
        dataset = load_dataset(path)
        try:
            index = int(index)
            return dataset.samples[index], dataset.constraints[index]
        except (ValueError, IndexError) as e:
            raise InvalidArgumentError(f"no sample {index!r} in {path} ({len(dataset)} samples)") from e
    if gains is not None:
        if gamma is None:
            raise InvalidArgumentError("--gains needs --gamma")
        ch = ChannelRealization(gains=parse_matrix(gains), gamma_min=parse_vector(gamma), noise_power=noise, p_max=p_max)
        return ch, build_constraints(ch)
    if B is not None and q is not None:
        return None, ConstraintSet.from_matrices(parse_matrix(B), parse_vector(q), p_max)
    raise InvalidArgumentError("give --instance, --gains/--gamma or --B/--q")


def _format(value):
    value = np.asarray(value, dtype=float)
    if value.ndim == 0:
        return f"{float(value):.10g}"
    if value.ndim == 1:
        return "[" + ", ".join(f"{v:.10g}" for v in value) + "]"
    return "\n".join("    " + _format(row) for row in value)


def dump(ch, cs, p_hat, d=None, heuristic=False):
    """
    Returns:
        list[str]: the printable dump
    Raises:
        InfeasibleInstanceError: when the instance has no feasible allocation
    """
    if not cs.feasible:
        raise InfeasibleInstanceError(f"infeasible instance, p0 = {_format(cs.p0)}", p0=cs.p0)
    if d is None and not heuristic:
        raise InvalidArgumentError("--d is needed unless --heuristic is set")
    tape = project_forward(cs, p_hat, d, heuristic=heuristic)
    lines = [
        f"p0          = {_format(cs.p0)}",
        f"d_max_star  = {_format(cs.d_max_star)}",
        f"p_hat       = {_format(tape.p_hat)}",
        f"d           = {_format(tape.d)}",
        f"p_C         = {_format(tape.p_C)}",
    ]
    if tape.feasible_input:
        lines.append("p_hat meets every rate requirement, eps_star = 0 and p_D = p_hat")
    else:
        lines.append(f"active set  = {list(tape.active_set)}")
        lines.append(f"eps_star    = {_format(tape.eps_star)} (row {tape.k_eps})")
    lines += [f"p_D         = {_format(tape.p_D)}", f"p_E         = {_format(tape.p_E)} (k_max {tape.k_max})"]
    factors = {"dp_E/dp_D": backward_E_wrt_D(tape), "dp_D/dp_hat": backward_D_wrt_phat(tape, cs),
               "dp_D/dp_C": backward_D_wrt_C(tape, cs), "dp_C/dd": backward_C_wrt_d(cs)}
    if ch is not None:
        factors["dJ/dp_E"] = grad_neg_sum_rate(ch, tape.p_E)
    residuals = factor_residuals(ch, cs, tape)
    for name, value in factors.items():
        lines.append(f"{name} (finite-difference residual {residuals[name]:.3e}):")
        lines.append(_format(value) if np.ndim(value) == 2 else "    " + _format(value))
    for name in ("dJ/dp_hat", "dJ/dd"):
        if name in residuals:
            lines.append(f"{name} chain residual {residuals[name]:.3e}")
    return lines
