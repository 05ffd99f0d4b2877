import math
import logging
from dataclasses import dataclass, asdict, fields
from typing import Any, Dict, List, Mapping, Optional

from lattice_model.core.exceptions import ConditionViolated, InvalidParameters

logger = logging.getLogger(__name__)

PARAM_FIELDS = ("d", "s", "p", "ell", "alpha", "c", "C_tilde", "eps")


@dataclass(frozen=True)
class ModelParams:
    """Scalar parameters of the fiber lattice model.

    Attributes:
        d: spatial dimension.
        s: fractional order of the long-range kernel.
        p: growth exponent of the pair potential.
        ell: weight exponent, shifts mass between connection probability and strength.
        alpha: sparsity exponent, thins connections by eps**alpha.
        c: fiber stiffness.
        C_tilde: probability prefactor.
        eps: grid size.

    Construction does not validate; use `validate_params` for untrusted input.
    """
    d: int
    s: float
    p: float
    ell: float
    alpha: float
    c: float
    C_tilde: float
    eps: float

    @property
    def c_bar(self) -> float:
        """Effective stiffness of the homogenized long-range term."""
        return self.c * self.C_tilde

    @property
    def kernel_exponent(self) -> float:
        """Exponent d + p*s of the singular kernel |x-y|^-(d+ps)."""
        return self.d + self.p * self.s

    @property
    def probability_exponent(self) -> float:
        return -self.d - self.p * self.s + self.ell

    def with_eps(self, eps: float) -> "ModelParams":
        return ModelParams(**{**asdict(self), "eps": eps})

    def derived_exponents(self) -> Dict[str, float]:
        """Exponents that follow from the parameters: the pair probability decays like
        |xi|**probability, a present connection carries weight c*eps**connection_weight
        * |x-y|**-ell, the expected number of summands grows like eps**expected_summands
        and the coefficient average fluctuates like eps**fluctuation."""
        ps = self.p * self.s
        return {
            "probability": -self.d - ps + self.ell,
            "connection_weight": -self.d - ps - self.alpha + self.ell,
            "expected_summands": -self.d + self.alpha + ps - self.ell,
            "fluctuation": self.d - ps + self.ell - self.alpha,
            "c_bar": self.c_bar,
        }

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)


def _read(raw: Any, name: str):
    if isinstance(raw, Mapping):
        return raw.get(name)
    return getattr(raw, name, None)


def max_pair_probability(params: ModelParams, max_offset: Optional[float] = None) -> float:
    """Largest pair probability over lattice offsets 1 <= |xi| <= max_offset. Returns
    inf when the probability grows with distance and no bound on |xi| is given."""
    exponent = params.probability_exponent
    base = params.C_tilde * params.eps ** params.alpha
    if exponent <= 0:
        return base
    if max_offset is None:
        return math.inf if base > 0 else 0.0
    return base * max(max_offset, 1.0) ** exponent


def check_params(raw: Any, max_offset: Optional[float] = None) -> List[ConditionViolated]:
    """Check a raw parameter record (mapping or attribute object) and return every
    violated condition. An empty list means the record is admissible.

    Args:
        - raw: record with fields d, s, p, ell, alpha, c, C_tilde, eps.
        - max_offset (float, optional): largest lattice distance |xi| that will be
            sampled; only used for the probability bound when it grows with distance.

    Returns:
        List[ConditionViolated]: the violated conditions, in a fixed order.
    """
    violations = []
    values = {}
    for name in PARAM_FIELDS:
        value = _read(raw, name)
        if value is None:
            violations.append(ConditionViolated("missing_field", f"{name} is required"))
            continue
        try:
            value = float(value)
        except (TypeError, ValueError):
            violations.append(ConditionViolated("non_finite", f"{name} must be a real number",
                                                f"{name}={value!r}"))
            continue
        if not math.isfinite(value):
            violations.append(ConditionViolated("non_finite", f"{name} must be finite",
                                                f"{name}={value}"))
            continue
        values[name] = value
    if violations:
        return violations

    d, s, p, ell = values["d"], values["s"], values["p"], values["ell"]
    alpha, c, C_tilde, eps = values["alpha"], values["c"], values["C_tilde"], values["eps"]
    ps = p * s

    if d != int(d) or d < 2:
        violations.append(ConditionViolated("dimension", "d is an integer >= 2", f"d={d:g}"))
    if not 0 < s < 1:
        violations.append(ConditionViolated("fractional_order", "0 < s < 1", f"s={s:g}"))
    if p < 1:
        violations.append(ConditionViolated("growth_exponent", "p >= 1", f"p={p:g}"))
    elif d > 2 and p >= 2 * d / (d - 2):
        violations.append(ConditionViolated(
            "growth_exponent", "p < 2d/(d-2) for d > 2", f"p={p:g}, 2d/(d-2)={2 * d / (d - 2):g}"))
    if alpha < 0:
        violations.append(ConditionViolated("sparsity_exponent", "alpha >= 0", f"alpha={alpha:g}"))
    if c <= 0:
        violations.append(ConditionViolated("stiffness", "c > 0", f"c={c:g}"))
    if not 0 <= C_tilde <= 1:
        violations.append(ConditionViolated("probability_prefactor", "0 <= C_tilde <= 1",
                                            f"C_tilde={C_tilde:g}"))
    if not 0 < eps < 1:
        violations.append(ConditionViolated("grid_size", "0 < eps < 1", f"eps={eps:g}"))
    if not d > ps - ell + alpha:
        violations.append(ConditionViolated(
            "summand_growth", "d > p*s - ell + alpha",
            f"{d:g} <= {ps - ell + alpha:g}"))
    if not ell < d + ps:
        violations.append(ConditionViolated(
            "weight_exponent", "ell < d + p*s", f"ell={ell:g} >= {d + ps:g}"))

    if 0 <= C_tilde <= 1 and 0 < eps < 1 and alpha >= 0:
        params = ModelParams(d=int(d), s=s, p=p, ell=ell, alpha=alpha, c=c,
                             C_tilde=C_tilde, eps=eps)
        p_max = max_pair_probability(params, max_offset)
        if p_max > 1:
            violations.append(ConditionViolated(
                "probability_bound", "pair probabilities lie in [0, 1]",
                f"max probability {p_max:g}"))
    return violations


def validate_params(raw: Any, max_offset: Optional[float] = None) -> ModelParams:
    """Validate a raw parameter record and build a ModelParams.

    Raises:
        InvalidParameters: listing every violated condition.
    """
    if isinstance(raw, ModelParams):
        raw = raw.to_dict()
    violations = check_params(raw, max_offset=max_offset)
    if violations:
        logger.debug(f"Parameter validation failed: {[v.name for v in violations]}")
        raise InvalidParameters(violations)
    kwargs = {f.name: float(_read(raw, f.name)) for f in fields(ModelParams)}
    kwargs["d"] = int(kwargs["d"])
    return ModelParams(**kwargs)
