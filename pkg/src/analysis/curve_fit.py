"""Exponential trend fitting with Levenberg-Marquardt.

Two families are supported: ``a * exp(-b N)`` (decay) and
``1 - a * exp(-b N)`` (approach to one). Parameters are initialised by a
log-linear least-squares fit of the transformed data and refined by damped
Gauss-Newton steps on the unweighted residuals.
"""

from collections.abc import Sequence

import numpy as np
import numpy.typing as npt

from src.constants import LM_MAX_DAMPING, MIN_FIT_POINTS
from src.errors import DegenerateInputError
from src.models.config import FittingConfig
from src.models.results import FitForm, FitModel
from src.utils.logging import get_logger

logger = get_logger(__name__)

type FloatArray = npt.NDArray[np.float64]


def fit(
    points: Sequence[tuple[float, float]],
    form: FitForm,
    config: FittingConfig | None = None,
) -> FitModel:
    """
    Fit ``points`` of (N, probability) to ``form``.

    Args:
        points: At least three (N, p) pairs with two or more distinct N
        form: Decay or OneMinusDecay
        config: Damping schedule and stopping rule

    Returns:
        FitModel; ``converged`` is False when the iteration cap or the
            damping limit was hit before the step tolerance

    Raises:
        DegenerateInputError: Too few points, or a transformed value is undefined
    """
    config = config or FittingConfig()
    x, y = _validate(points, form)

    params, initial_sse = _log_linear_start(x, y, form)
    sse = initial_sse
    damping = config.initial_damping
    converged = False
    iterations = 0

    while iterations < config.max_iterations:
        iterations += 1
        residual = y - _model(x, params, form)
        jacobian = _jacobian(x, params, form)
        normal = jacobian.T @ jacobian
        gradient = jacobian.T @ residual

        try:
            step = np.linalg.solve(normal + damping * np.diag(np.diag(normal)), gradient)
        except np.linalg.LinAlgError:
            damping *= config.damping_factor
            continue

        candidate = params + step
        candidate_sse = _sse(x, y, candidate, form)
        relative_change = float(np.max(np.abs(step) / np.maximum(np.abs(params), 1e-300)))

        if candidate_sse < sse:
            params, sse = candidate, candidate_sse
            damping /= config.damping_factor
        else:
            damping *= config.damping_factor

        if relative_change < config.tolerance:
            converged = True
            break
        if damping > LM_MAX_DAMPING:
            logger.warning("Damping limit reached before the step tolerance", damping=damping)
            break

    if not converged:
        logger.warning(
            "Fit did not converge, reporting best parameters so far",
            form=form.value,
            iterations=iterations,
            sse=sse,
        )

    result = FitModel(
        form=form,
        a=float(params[0]),
        b=float(params[1]),
        sse=sse,
        initial_sse=initial_sse,
        iterations=iterations,
        converged=converged,
        points=len(x),
    )
    logger.debug("Fit finished", equation=result.equation(), sse=sse, iterations=iterations)
    return result


def _validate(
    points: Sequence[tuple[float, float]], form: FitForm
) -> tuple[FloatArray, FloatArray]:
    if len(points) < MIN_FIT_POINTS:
        raise DegenerateInputError(
            f"Need at least {MIN_FIT_POINTS} points to fit, got {len(points)}"
        )
    x = np.array([float(n) for n, _ in points])
    y = np.array([float(p) for _, p in points])

    if len(np.unique(x)) < 2:
        raise DegenerateInputError("Need at least two distinct N values")
    if form is FitForm.DECAY and np.any(y <= 0.0):
        raise DegenerateInputError("Decay fit needs every probability > 0")
    if form is FitForm.ONE_MINUS_DECAY and np.any(y >= 1.0):
        raise DegenerateInputError("One-minus-decay fit needs every probability < 1")
    return x, y


def _log_linear_start(x: FloatArray, y: FloatArray, form: FitForm) -> tuple[FloatArray, float]:
    transformed = np.log(y) if form is FitForm.DECAY else np.log1p(-y)
    slope, intercept = np.polyfit(x, transformed, 1)
    params = np.array([np.exp(intercept), -slope])
    return params, _sse(x, y, params, form)


def _model(x: FloatArray, params: FloatArray, form: FitForm) -> FloatArray:
    decay = params[0] * np.exp(-params[1] * x)
    return decay if form is FitForm.DECAY else 1.0 - decay


def _jacobian(x: FloatArray, params: FloatArray, form: FitForm) -> FloatArray:
    a, b = params
    exp_term = np.exp(-b * x)
    columns = np.column_stack((exp_term, -a * x * exp_term))
    return columns if form is FitForm.DECAY else -columns


def _sse(x: FloatArray, y: FloatArray, params: FloatArray, form: FitForm) -> float:
    residual = y - _model(x, params, form)
    return float(residual @ residual)
