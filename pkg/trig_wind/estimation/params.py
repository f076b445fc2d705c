"""
Full model parameter set and its unconstrained parameterisation.

The optimiser works on a real vector u; `ParameterLayout.unpack` maps it onto a
`ModelParams` that satisfies every invariant, `ParameterLayout.pack` is the
exact inverse.
"""
from enum import Enum
from typing import Dict, List, Sequence, Tuple

import numpy as np
from pydantic import validator
from scipy.special import expit, logit

from trig_wind.aparch import AparchParams, SkewTParams
from trig_wind.arfima import ArfimaParams, coefs_to_pacf, pacf_to_coefs
from trig_wind.models import ConfigError, FrozenModel
from trig_wind.seasonal import SeasonalSpec, column_labels

P_FLOOR = 0.05


class ModelKind(str, Enum):
    """fourier fixes every exponent at 2, pgen estimates them."""

    fourier = "fourier"
    pgen = "pgen"


class Orders(FrozenModel):
    j: int = 2
    q: int = 1
    Q: int = 1
    P: int = 2

    @validator("j", "q", "Q", "P")
    def _non_negative(cls, value):
        if value < 0:
            raise ValueError("orders must be non-negative")
        return value

    @validator("Q")
    def _arch_term(cls, value):
        if value < 1:
            raise ValueError("at least one APARCH alpha term is required")
        return value

    @classmethod
    def from_tuple(cls, values: Sequence[int]) -> "Orders":
        if len(values) != 4:
            raise ConfigError(
                error_type="invalid_orders", message=f"expected j,q,Q,P, got {values}"
            )
        return cls(**dict(zip(("j", "q", "Q", "P"), map(int, values))))

    def as_tuple(self) -> Tuple[int, int, int, int]:
        return self.j, self.q, self.Q, self.P

    def __str__(self) -> str:
        return ",".join(map(str, self.as_tuple()))


class ModelParams(FrozenModel):
    theta: np.ndarray
    p_exponents: Dict[str, float] = {}
    arfima: ArfimaParams = ArfimaParams()
    aparch: AparchParams = AparchParams()
    skewt: SkewTParams = SkewTParams()

    @validator("theta", pre=True)
    def _vector(cls, value):
        theta = np.array(value, dtype=float)
        if theta.ndim != 1 or not np.all(np.isfinite(theta)):
            raise ValueError("theta must be a finite vector")
        theta.setflags(write=False)
        return theta

    @property
    def orders(self) -> Orders:
        j, q = self.arfima.orders
        big_q, big_p = self.aparch.orders
        return Orders(j=j, q=q, Q=big_q, P=big_p)

    def seasonal(self, spec: SeasonalSpec) -> SeasonalSpec:
        """`spec` carrying these exponents."""
        if not self.p_exponents:
            return spec
        return spec.with_exponents(self.p_exponents)

    def check_against(self, spec: SeasonalSpec) -> None:
        expected = len(column_labels(spec))
        if self.theta.size != expected:
            raise ConfigError(
                error_type="dimension_mismatch",
                message=f"{self.theta.size} regression coefficients for {expected} columns",
            )


def _atanh(x):
    return np.arctanh(np.asarray(x, dtype=float))


class ParameterLayout:
    """
    Ordering and transforms of the free parameters of one model:

        theta, [p exponents], d, phi_1..j, theta_1..q,
        alpha_0, alpha_1..Q, gamma_1..Q, beta_1..P, delta, xi, nu
    """

    def __init__(
        self,
        spec: SeasonalSpec,
        orders: Orders,
        kind: ModelKind = ModelKind.fourier,
        truncation: int = 1000,
    ):
        self.spec = spec
        self.orders = orders
        self.kind = ModelKind(kind)
        self.truncation = truncation
        self.labels = column_labels(spec)
        self.exponent_names = (
            spec.free_exponent_names() if self.kind == ModelKind.pgen else []
        )
        self.p_ceiling = spec.p_bound

        blocks = [
            ("theta", list(self.labels)),
            ("p", list(self.exponent_names)),
            ("d", ["d"]),
            ("ar", [f"phi_{i}" for i in range(1, orders.j + 1)]),
            ("ma", [f"theta_ma_{i}" for i in range(1, orders.q + 1)]),
            ("alpha0", ["alpha_0"]),
            ("alpha", [f"alpha_{i}" for i in range(1, orders.Q + 1)]),
            ("gamma", [f"gamma_{i}" for i in range(1, orders.Q + 1)]),
            ("beta", [f"beta_{i}" for i in range(1, orders.P + 1)]),
            ("delta", ["delta"]),
            ("xi", ["xi"]),
            ("nu", ["nu"]),
        ]
        self._slices: Dict[str, slice] = {}
        self.names: List[str] = []
        for block, names in blocks:
            self._slices[block] = slice(len(self.names), len(self.names) + len(names))
            self.names.extend(names)

    def __len__(self) -> int:
        return len(self.names)

    def block(self, vector: np.ndarray, name: str) -> np.ndarray:
        return vector[self._slices[name]]

    def null_values(self) -> np.ndarray:
        """Hypothesised value of each parameter in significance tests."""
        nulls = np.zeros(len(self))
        nulls[self._slices["p"]] = 2.0
        nulls[self._slices["xi"]] = 1.0
        return nulls

    def _p_to_free(self, p):
        span = self.p_ceiling - P_FLOOR
        return logit((np.asarray(p, dtype=float) - P_FLOOR) / span)

    def _p_from_free(self, u):
        return P_FLOOR + (self.p_ceiling - P_FLOOR) * expit(u)

    def natural(self, params: ModelParams) -> np.ndarray:
        """Parameters on their natural scale, ordered as `names`."""
        exponents = [
            params.p_exponents.get(name, 2.0) for name in self.exponent_names
        ]
        return np.concatenate(
            (
                params.theta,
                exponents,
                [params.arfima.d],
                params.arfima.ar,
                params.arfima.ma,
                [params.aparch.alpha0],
                params.aparch.alpha,
                params.aparch.gamma,
                params.aparch.beta,
                [params.aparch.delta, params.skewt.xi, params.skewt.nu],
            )
        ).astype(float)

    def pack(self, params: ModelParams) -> np.ndarray:
        exponents = [
            params.p_exponents.get(name, 2.0) for name in self.exponent_names
        ]
        return np.concatenate(
            (
                params.theta,
                self._p_to_free(exponents) if exponents else [],
                [np.arctanh(2.0 * params.arfima.d)],
                _atanh(coefs_to_pacf(params.arfima.ar)),
                _atanh(coefs_to_pacf(-np.asarray(params.arfima.ma))),
                np.log([params.aparch.alpha0]),
                np.log(params.aparch.alpha),
                _atanh(params.aparch.gamma),
                np.log(params.aparch.beta) if params.aparch.beta else [],
                np.log([params.aparch.delta, params.skewt.xi, params.skewt.nu - 2.0]),
            )
        ).astype(float)

    def unpack(self, u) -> ModelParams:
        u = np.asarray(u, dtype=float)
        block = lambda name: self.block(u, name)  # noqa: E731
        exponents = (
            dict(zip(self.exponent_names, map(float, self._p_from_free(block("p")))))
            if self.exponent_names
            else {}
        )
        delta, xi, nu = np.exp(block("delta")), np.exp(block("xi")), np.exp(block("nu"))
        return ModelParams(
            theta=block("theta"),
            p_exponents=exponents,
            arfima=ArfimaParams(
                d=float(0.5 * np.tanh(block("d")[0])),
                ar=tuple(pacf_to_coefs(np.tanh(block("ar")))),
                ma=tuple(-pacf_to_coefs(np.tanh(block("ma")))),
                truncation=self.truncation,
            ),
            aparch=AparchParams(
                alpha0=float(np.exp(block("alpha0")[0])),
                alpha=tuple(np.exp(block("alpha"))),
                gamma=tuple(np.tanh(block("gamma"))),
                beta=tuple(np.exp(block("beta"))),
                delta=float(delta[0]),
            ),
            skewt=SkewTParams(xi=float(xi[0]), nu=float(2.0 + nu[0])),
        )

    def natural_from_free(self, u) -> np.ndarray:
        return self.natural(self.unpack(u))

    def at_p_bound(self, params: ModelParams, tolerance: float = 1e-6) -> List[str]:
        return [
            name
            for name in self.exponent_names
            if params.p_exponents.get(name, 2.0) >= self.p_ceiling - tolerance
            or params.p_exponents.get(name, 2.0) <= P_FLOOR + tolerance
        ]
