import logging
import math
from typing import Optional

import numpy as np

from riemopt.core.rng import make_generator
from riemopt.models.manifold import Euclidean, Manifold, Point
from riemopt.models.objective import (
    CompositeObjective,
    NonsmoothTerm,
    SmoothTerm,
    least_squares_l1
)
from riemopt.schemas.check import CheckReport
from riemopt.schemas.run import RunResult
from riemopt.schemas.solver import (
    Algorithm,
    SolverConfig,
    TrustRegionParams
)
from riemopt.services.algorithms import rmpgm_run, tr_rmpgm_run

logger = logging.getLogger(__name__)

FD_STEP = 1e-6
RETRACTION_STEPS = (1e-3, 1e-4, 1e-5)
RETRACTION_FLOOR = 1e-9
TRANSPORT_SCALES = (1e-1, 1e-2, 1e-3)
GENERIC_SOLVE_LIMIT = 64
DESCENT_ALGORITHMS = (Algorithm.RMPGM, Algorithm.INEXACT, Algorithm.TR)


def _report(
        name: str,
        worst: float,
        samples: int,
        tolerance: float
) -> CheckReport:
    report = CheckReport.evaluate(name, worst, samples, tolerance)
    logger.info(report.as_line())
    return report


def fd_gradient_check(
        term: SmoothTerm,
        manifold: Manifold,
        n_samples: int,
        tol: float = 1e-6,
        seed: int = 0
) -> CheckReport:
    """
    Сравнивает <grad f(x), d> с центральной разностью
    (f(R_x(td)) - f(R_x(-td))) / 2t, t = 1e-6, в случайных точках.
    Относительная ошибка делится на max(1, |<grad f, d>|).
    """
    rng = make_generator(seed)
    worst = 0.0
    for _ in range(n_samples):
        x = manifold.random_point(rng)
        direction = manifold.random_tangent(x, rng)
        analytic = manifold.project_tangent(
            x, term.ambient_grad(x.coords)
        ).inner(direction)
        forward = term.value(
            manifold.retract(x, FD_STEP * direction).coords
        )
        backward = term.value(
            manifold.retract(x, -FD_STEP * direction).coords
        )
        numeric = (forward - backward) / (2.0 * FD_STEP)
        worst = max(
            worst, abs(analytic - numeric) / max(1.0, abs(analytic))
        )
    return _report('fd_gradient', worst, n_samples, tol)


def subgradient_check(
        term: NonsmoothTerm,
        dim: int,
        n_samples: int,
        tol: float = 1e-10,
        seed: int = 0
) -> CheckReport:
    """
    Выборочная проверка выпуклости g, неравенства субградиента и
    согласованности prox: (v - prox_τg(v)) / τ ∈ ∂g(prox_τg(v)).
    Половина координат точек обнуляется, чтобы попадать в изломы.
    """
    rng = make_generator(seed)
    worst = 0.0
    for _ in range(n_samples):
        v, w = rng.standard_normal((2, dim))
        v[rng.random(dim) < 0.5] = 0.0
        tau = rng.uniform(0.1, 2.0)
        midpoint = term.value(0.5 * (v + w)) - 0.5 * (
            term.value(v) + term.value(w)
        )
        selection = term.subgradient(v)
        inequality = term.value(v) + selection @ (w - v) - term.value(w)
        moved = term.prox(v, tau)
        implied = (v - moved) / tau
        prox_inequality = (
            term.value(moved) + implied @ (w - moved) - term.value(w)
        )
        worst = max(worst, midpoint, inequality, prox_inequality)
    return _report('subgradient', max(worst, 0.0), n_samples, tol)


def retraction_check(
        manifold: Manifold,
        n_samples: int,
        seed: int = 0
) -> CheckReport:
    """
    Аксиомы ретракции: R_x(0) = x точно и сверхлинейное убывание
    ‖R_x(tζ) - x - tζ‖ / t: при уменьшении t в 10 раз отношение должно
    падать хотя бы вдвое.
    """
    rng = make_generator(seed)
    worst = 0.0
    for _ in range(n_samples):
        x = manifold.random_point(rng)
        zeta = manifold.random_tangent(x, rng)
        origin = manifold.retract(x, manifold.zero(x))
        worst = max(worst, float(np.abs(origin.coords - x.coords).max()))
        ratios = [
            np.linalg.norm(
                manifold.retract(x, step * zeta).coords - x.coords -
                step * zeta.vec
            ) / step
            for step in RETRACTION_STEPS
        ]
        for larger, smaller in zip(ratios, ratios[1:]):
            worst = max(
                worst, smaller - max(0.5 * larger, RETRACTION_FLOOR)
            )
    return _report('retraction', worst, n_samples, 0.0)


def _field_transport_violation(
        manifold: Manifold,
        x: Point,
        rng: np.random.Generator
) -> float:
    field = rng.standard_normal(manifold.dim)
    direction = manifold.random_tangent(x, rng)
    source = manifold.project_tangent(x, field)
    errors = []
    for scale in TRANSPORT_SCALES:
        eta = scale * direction
        y = manifold.retract(x, eta)
        errors.append((
            manifold.project_tangent(y, field) -
            manifold.d_retract_adjoint_inverse(x, eta, source, y=y)
        ).norm())
    return max(
        0.0, *(smaller - larger for larger, smaller in zip(errors, errors[1:]))
    )


def transport_check(
        manifold: Manifold,
        n_samples: int,
        tol: float = 1e-9,
        seed: int = 0
) -> CheckReport:
    """
    Тождество сопряжённости <DR[ζ], ξ> = <ζ, DR^*[ξ]>, обращение
    сопряжённого и дифференциала, касание результатов и совпадение
    замкнутой формулы обратного сопряжённого с решением линейной системы.
    Дополнительно для поля ξ(p) = P_p(a) ошибка
    ‖ξ(y) - (DR_x(η)^*)^{-1} ξ(x)‖ должна убывать при ‖η‖ -> 0.
    """
    rng = make_generator(seed)
    worst = 0.0
    for _ in range(n_samples):
        x = manifold.random_point(rng)
        eta = manifold.random_tangent(x, rng, scale=rng.uniform(0.0, 1.0))
        y = manifold.retract(x, eta)
        zeta = manifold.random_tangent(x, rng)
        xi = manifold.random_tangent(y, rng)
        moved = manifold.d_retract(x, eta, zeta, y=y)
        pulled = manifold.d_retract_adjoint(x, eta, xi, y=y)
        pairing = abs(moved.inner(xi) - zeta.inner(pulled))
        inverse_adjoint = manifold.d_retract_adjoint_inverse(
            x, eta, zeta, y=y
        )
        round_trip = (
            manifold.d_retract_adjoint(x, eta, inverse_adjoint, y=y) - zeta
        ).norm()
        inverse = manifold.d_retract_inverse(x, eta, xi, y=y)
        inverse_trip = (manifold.d_retract(x, eta, inverse, y=y) - xi).norm()
        tangency = max(
            (moved - manifold.project_tangent(y, moved.vec)).norm(),
            (pulled - manifold.project_tangent(x, pulled.vec)).norm(),
        )
        generic = 0.0
        if manifold.dim <= GENERIC_SOLVE_LIMIT:
            generic = (
                manifold.solve_adjoint_inverse(x, eta, zeta, y=y) -
                inverse_adjoint
            ).norm()
        worst = max(
            worst, pairing, round_trip, inverse_trip, tangency, generic,
            _field_transport_violation(manifold, x, rng)
        )
    return _report('transport', worst, n_samples, tol)


def descent_trace_check(
        result: RunResult,
        tol: float = 1e-10
) -> CheckReport:
    """
    Сертифицированный спуск F_i(x_k) - F_i(x_{k+1}) >= β_k‖η_k‖² на каждом
    принятом шаге и монотонность всех F_i по следу. Для RMSD проверка
    неприменима.
    """
    if result.algorithm not in DESCENT_ALGORITHMS:
        return CheckReport.skip('descent_trace')
    worst = 0.0
    samples = 0
    values = result.values
    for index, record in enumerate(result.trace[:-1]):
        drop = values[index] - values[index + 1]
        worst = max(worst, float(-drop.min()))
        if record.accepted and record.beta is not None:
            worst = max(worst, float(
                (record.beta * record.eta_norm ** 2 - drop).max()
            ))
        samples += 1
    return _report('descent_trace', max(worst, 0.0), samples, tol)


def _certified_beta(result: RunResult) -> Optional[float]:
    betas = [
        record.beta for record in result.trace
        if record.accepted and record.beta is not None
    ]
    return min(betas) if betas else None


def summability_check(
        result: RunResult,
        tol: float = 1e-10
) -> CheckReport:
    """
    Частичные суммы Σ‖η_k‖² по принятым шагам не превосходят
    min_i (F_i(x₀) - F_i(x_K)) / β с наименьшим сертифицированным β.
    """
    beta = _certified_beta(result)
    if beta is None:
        return CheckReport.skip('summability')
    values = result.values
    budget = float((values[0] - values[-1]).min()) / beta
    partial = 0.0
    worst = 0.0
    steps = 0
    for record in result.trace:
        if record.accepted and record.beta is not None:
            partial += record.eta_norm ** 2
            worst = max(worst, partial - budget)
            steps += 1
    return _report('summability', worst, steps, tol)


def iteration_bound_check(
        result: RunResult,
        epsilon: float
) -> CheckReport:
    """
    Первое k с ‖η_k‖ <= ε не больше min_i (F_i(x₀) - F_i(x_K)) / (βε²).
    """
    if result.algorithm not in (Algorithm.RMPGM, Algorithm.INEXACT):
        return CheckReport.skip('iteration_bound')
    beta = _certified_beta(result)
    hits = [
        record.k for record in result.trace if record.eta_norm <= epsilon
    ]
    if beta is None or not hits:
        return CheckReport.skip('iteration_bound')
    values = result.values
    bound = float((values[0] - values[-1]).min()) / (beta * epsilon ** 2)
    return _report(
        'iteration_bound', max(0.0, hits[0] - bound), len(result.trace), 0.0
    )


def tr_trace_check(
        result: RunResult,
        params: TrustRegionParams,
        smoothness_bound: float,
        tol: float = 1e-10
) -> CheckReport:
    """
    Три утверждения о следе метода доверительной области:
    σ_k <= σ_max = max(σ₀, τ₃L/(1 - s₂)); длина серии неудач подряд не
    больше ⌈log_{τ₂}(σ_max/σ_min)⌉; ρ_k >= s₂ при σ_k >= L/(1 - s₂).
    Константа L задаётся извне.
    """
    if result.algorithm is not Algorithm.TR or not result.trace:
        return CheckReport.skip('tr_trace')
    sigma0 = result.trace[0].param
    threshold = smoothness_bound / (1.0 - params.s2)
    sigma_max = max(sigma0, params.tau3 * threshold)
    run_limit = params.max_unsuccessful_run(sigma_max)
    worst = 0.0
    run = longest = 0
    for record in result.trace:
        worst = max(worst, record.param - sigma_max)
        if record.rho is None and record is result.trace[-1]:
            continue
        if record.accepted:
            run = 0
        else:
            run += 1
            longest = max(longest, run)
        if record.param >= threshold:
            rho = -math.inf if record.rho is None else record.rho
            worst = max(worst, params.s2 - rho)
    worst = max(worst, float(longest - run_limit))
    return _report('tr_trace', max(worst, 0.0), len(result.trace), tol)


def quadratic_model(dim: int, seed: int) -> tuple[CompositeObjective, float]:
    """
    Евклидова двухцелевая задача ½‖A_i x - b_i‖² + 0.05‖x‖₁ с точной
    константой гладкости L = max_i ‖A_i‖².
    """
    rng = make_generator(seed, dim)
    matrices = [rng.standard_normal((dim + 2, dim)) for _ in range(2)]
    targets = [rng.standard_normal(dim + 2) for _ in range(2)]
    obj = least_squares_l1(Euclidean(dim), matrices, targets, [0.05, 0.05])
    return obj, obj.lipschitz_hint


def run_check_suite(
        obj: CompositeObjective,
        seed: int = 0,
        n_samples: int = 50,
        config: Optional[SolverConfig] = None
) -> list[CheckReport]:
    """
    Набор проверок экземпляра: производные гладких слагаемых, оракулы
    негладких, геометрия многообразия, спуск и суммируемость на прогоне
    RMPGM и утверждения о методе доверительной области на евклидовой
    квадратичной задаче с точной константой.
    """
    config = config or SolverConfig(seed=seed)
    manifold = obj.manifold
    reports = [
        fd_gradient_check(term, manifold, n_samples, seed=seed)
        for term in obj.smooth
    ]
    reports.extend(
        subgradient_check(term, manifold.dim, n_samples, seed=seed)
        for term in obj.nonsmooth
    )
    reports.append(retraction_check(manifold, n_samples, seed=seed))
    reports.append(transport_check(manifold, n_samples, seed=seed))
    start = manifold.random_point(make_generator(seed, 1))
    run = rmpgm_run(obj, start, config)
    reports.append(descent_trace_check(run))
    reports.append(summability_check(run))
    reports.append(iteration_bound_check(run, config.tol))
    model, smoothness = quadratic_model(8, seed)
    tr_run = tr_rmpgm_run(
        model,
        model.manifold.random_point(make_generator(seed, 2)),
        config,
    )
    reports.append(tr_trace_check(tr_run, config.tr, smoothness))
    return reports
