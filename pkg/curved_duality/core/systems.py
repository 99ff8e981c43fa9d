"""
Hamiltonians, symmetry generators, invariants and Poisson structures of the
oscillator and Coulomb systems on the (pseudo)sphere.

Observables are sympy expressions in the phase-space variables z, z̄, π, π̄
(treated as independent) and the model parameters; their Wirtinger
derivatives are taken symbolically and compiled with ``sympy.lambdify``, so
every bracket of the catalogue is evaluated from closed-form gradients.

Conventions: the canonical bracket is {π, z} = 1 and a quantity evolves as
ḟ = {H, f}.  Real coordinates are (x, y, px, py) with z = x + iy and
π = (px - i py) / 2.
"""
from dataclasses import dataclass, field
from enum import Enum
from functools import lru_cache
from typing import Callable, Dict, Iterable, List, Tuple, Union

import numpy as np
import sympy as sp

from curved_duality.core.errors import (
    BoundaryError,
    CurvedDualityError,
    SingularityError,
)
from curved_duality.core.geometry import (
    BOUNDARY_MARGIN,
    CurvatureSign,
    check_operative,
    metric_factor,
)

Z, ZB, P, PB = sp.symbols("z zb p pb")
EPS = sp.Symbol("eps", real=True)
R0 = sp.Symbol("R0", positive=True)
ALPHA = sp.Symbol("alpha", real=True)
B0 = sp.Symbol("B0", real=True)
C = sp.Symbol("c", real=True)
SMALL_R0 = sp.Symbol("r0", positive=True)
GAMMA = sp.Symbol("gamma", real=True)

PHASE_SYMBOLS = (Z, ZB, P, PB)
PARAMETER_SYMBOLS = (EPS, R0, ALPHA, B0, C, SMALL_R0, GAMMA)
DEFAULT_PARAMETERS: Dict[str, float] = {
    "eps": 1.0,
    "R0": 1.0,
    "alpha": 0.0,
    "B0": 0.0,
    "c": 4.0,
    "r0": 1.0,
    "gamma": 0.0,
}

# Sign in front of the canonical block, validated by bracket_self_test.
BRACKET_SIGN = 1.0
PRINTED_SHIFT_COEFFICIENT = 4.0
FD_STEP = 1e-5


def conjugate(expr: sp.Expr) -> sp.Expr:
    """
    Return the complex conjugate of an expression in z, z̄, π, π̄.

    The parameters are real, so conjugation swaps the barred and unbarred
    variables and flips the imaginary unit.
    """
    return expr.xreplace({Z: ZB, ZB: Z, P: PB, PB: P, sp.I: -sp.I})


@dataclass(frozen=True)
class PhasePoint:
    """
    A point (z, π) of the four-dimensional phase space.
    """

    z: complex
    pi: complex

    def to_real(self) -> np.ndarray:
        """
        Return the real coordinates (x, y, px, py).
        """
        return np.array(
            [self.z.real, self.z.imag, 2.0 * self.pi.real, -2.0 * self.pi.imag]
        )

    @classmethod
    def from_real(cls, xi: np.ndarray) -> "PhasePoint":
        """
        Return the point with the real coordinates (x, y, px, py).
        """
        return cls(
            complex(xi[0], xi[1]), complex(0.5 * xi[2], -0.5 * xi[3])
        )


@dataclass(frozen=True)
class GeneratorSet:
    """
    The rotation generators 𝐉 = (iJ1 - J2)/2 and J = εJ3/2.
    """

    Jc: complex
    J: float


@dataclass(frozen=True)
class SymplecticForm:
    """
    The matrix Ω of ω = ½ Ω_ij dξ^i ∧ dξ^j in real coordinates
    (x, y, px, py).
    """

    matrix: np.ndarray

    @property
    def poisson(self) -> np.ndarray:
        """
        The Poisson tensor P with {f, g} = ∇f · P ∇g.
        """
        return -BRACKET_SIGN * np.linalg.inv(self.matrix)

    @property
    def determinant(self) -> float:
        """
        Return det Ω.
        """
        return float(np.linalg.det(self.matrix))


class SystemKind(Enum):
    """
    The physical systems a CurvedModel can describe.
    """

    FREE_PARTICLE = "free"
    OSCILLATOR = "oscillator"
    COULOMB = "coulomb"


def _compile(expr: sp.Expr) -> Tuple[Callable, Callable]:
    return _compile_cached(sp.sympify(expr))


@lru_cache(maxsize=None)
def _compile_cached(expr: sp.Expr) -> Tuple[Callable, Callable]:
    args = PHASE_SYMBOLS + PARAMETER_SYMBOLS
    value = sp.lambdify(args, expr, modules="numpy", cse=True)
    partials = [sp.diff(expr, var) for var in PHASE_SYMBOLS]
    gradient = sp.lambdify(args, partials, modules="numpy", cse=True)
    return value, gradient


def wirtinger_to_real(partials: np.ndarray) -> np.ndarray:
    """
    Convert (∂z, ∂z̄, ∂π, ∂π̄) derivatives to the real gradient over
    (x, y, px, py).
    """
    f_z, f_zb, f_p, f_pb = partials
    return np.array(
        [
            f_z + f_zb,
            1j * (f_z - f_zb),
            0.5 * (f_p + f_pb),
            0.5j * (f_pb - f_p),
        ],
        dtype=complex,
    )


@dataclass(frozen=True)
class Observable:
    """
    A phase-space function given by a sympy expression.

    :param name: A short name used in logs and reports.
    :param expr: The expression in z, zb, p, pb and the parameters.
    :param real: Whether the observable is real valued.
    """

    name: str
    expr: sp.Expr
    real: bool = False

    def conjugate(self) -> "Observable":
        return Observable(f"{self.name}̄", conjugate(self.expr), self.real)

    def bind(self, **parameters: float) -> "BoundObservable":
        """
        Fix the model parameters.

        :param parameters: Values by name ("eps", "R0", "alpha", "B0", "c",
                           "r0", "gamma"); missing ones take defaults.
        """
        values = dict(DEFAULT_PARAMETERS)
        values.update(parameters)
        ordered = tuple(
            float(values[str(symbol)]) for symbol in PARAMETER_SYMBOLS
        )
        value, gradient = _compile(self.expr)
        return BoundObservable(self.name, value, gradient, ordered, self.real)


@dataclass(frozen=True)
class BoundObservable:
    """
    An observable with numeric parameters, evaluated at phase points.
    """

    name: str
    _value: Callable = field(repr=False)
    _gradient: Callable = field(repr=False)
    parameters: Tuple[float, ...]
    real: bool = False

    def __call__(self, pt: PhasePoint) -> complex:
        val = complex(
            self._value(
                pt.z, pt.z.conjugate(), pt.pi, pt.pi.conjugate(), *self.parameters
            )
        )
        return complex(val.real, 0.0) if self.real else val

    def on_grid(self, z: np.ndarray, pi: complex = 0j) -> np.ndarray:
        """
        Evaluate on an array of positions at a fixed momentum.
        """
        values = self._value(z, np.conj(z), pi, np.conj(pi), *self.parameters)
        values = np.broadcast_to(np.asarray(values), np.shape(z))
        return values.real if self.real else values

    def wirtinger(self, pt: PhasePoint) -> np.ndarray:
        """
        Return (∂f/∂z, ∂f/∂z̄, ∂f/∂π, ∂f/∂π̄).
        """
        return np.asarray(
            self._gradient(
                pt.z, pt.z.conjugate(), pt.pi, pt.pi.conjugate(), *self.parameters
            ),
            dtype=complex,
        )

    def gradient(self, pt: PhasePoint) -> np.ndarray:
        """
        Return the gradient over (x, y, px, py).
        """
        grad = wirtinger_to_real(self.wirtinger(pt))
        return grad.real.astype(complex) if self.real else grad


ObservableLike = Union[BoundObservable, Callable[[PhasePoint], complex]]


# The catalogue.  Everything below is written for general ε except the
# Coulomb side, which lives on the pseudosphere.


def _u() -> sp.Expr:
    return EPS * Z * ZB


def ambient_x_expr() -> sp.Expr:
    return 2 * R0 * Z / (1 + _u())


def ambient_x3_expr() -> sp.Expr:
    return R0 * (1 - _u()) / (1 + _u())


def generator_exprs() -> Tuple[sp.Expr, sp.Expr]:
    """
    Return (𝐉, J) shifted by the magnetic field with coefficient c.
    """
    jc = P + EPS * ZB**2 * PB
    j = sp.I * (Z * P - ZB * PB)
    jc_shifted = jc - sp.I * C / 2 * R0 * B0 * conjugate(ambient_x_expr())
    j_shifted = j - EPS * C / 2 * R0 * B0 * ambient_x3_expr()
    return jc_shifted, j_shifted


def free_hamiltonian_expr() -> sp.Expr:
    return (1 + _u()) ** 2 * P * PB / (2 * R0**2)


def oscillator_potential_expr() -> sp.Expr:
    return 2 * ALPHA**2 * R0**2 * Z * ZB / (1 - _u()) ** 2


def hidden_invariant_expr() -> sp.Expr:
    jc = P + EPS * ZB**2 * PB
    xb = conjugate(ambient_x_expr())
    x3 = ambient_x3_expr()
    return jc**2 / (2 * R0**2) + ALPHA**2 * R0**2 / 2 * xb**2 / x3**2


def coulomb_potential_expr() -> sp.Expr:
    return -(GAMMA / SMALL_R0) * (1 + Z * ZB) / (2 * sp.sqrt(Z * ZB))


def coulomb_hamiltonian_expr() -> sp.Expr:
    kinetic = (1 - Z * ZB) ** 2 * P * PB / (2 * SMALL_R0**2)
    return kinetic + coulomb_potential_expr()


def coulomb_generator_exprs() -> Tuple[sp.Expr, sp.Expr]:
    return P - ZB**2 * PB, sp.I * (Z * P - ZB * PB)


def runge_lenz_expr() -> sp.Expr:
    jc, j = coulomb_generator_exprs()
    return -sp.I * j * jc / SMALL_R0 + GAMMA * ZB / sp.sqrt(Z * ZB)


class Catalogue:
    """
    Named observables of the curved systems.
    """

    X = Observable("x", ambient_x_expr())
    XBAR = X.conjugate()
    X3 = Observable("x3", ambient_x3_expr(), real=True)
    JC = Observable("Jc", generator_exprs()[0])
    JCBAR = JC.conjugate()
    J = Observable("J", generator_exprs()[1], real=True)
    H_FREE = Observable("H", free_hamiltonian_expr(), real=True)
    V_OSC = Observable("V", oscillator_potential_expr(), real=True)
    H_OSC = Observable(
        "H", free_hamiltonian_expr() + oscillator_potential_expr(), real=True
    )
    I = Observable("I", hidden_invariant_expr())
    IBAR = I.conjugate()
    V_COULOMB = Observable("V", coulomb_potential_expr(), real=True)
    H_COULOMB = Observable("H", coulomb_hamiltonian_expr(), real=True)
    JC_COULOMB = Observable("Jc", coulomb_generator_exprs()[0])
    J_COULOMB = Observable("J", coulomb_generator_exprs()[1], real=True)
    A = Observable("A", runge_lenz_expr())


@dataclass(frozen=True)
class CurvedModel:
    """
    One physical system on the sphere or the pseudosphere.

    :param eps: Curvature sign.
    :param R0: The radius.
    :param alpha: Oscillator coupling.
    :param B0: Constant magnetic field.
    :param kind: Free particle, oscillator or Coulomb system.
    :param gamma: Coulomb coupling (used with kind COULOMB only).
    :param shift_coefficient: The coefficient c of the magnetic shift of the
                              rotation generators.
    """

    eps: CurvatureSign
    R0: float
    alpha: float = 0.0
    B0: float = 0.0
    kind: SystemKind = SystemKind.OSCILLATOR
    gamma: float = 0.0
    shift_coefficient: float = PRINTED_SHIFT_COEFFICIENT

    def __post_init__(self) -> None:
        if self.R0 <= 0:
            raise CurvedDualityError(f"R0 must be positive, got {self.R0}.")
        if self.alpha < 0:
            raise CurvedDualityError(
                f"alpha must be non-negative, got {self.alpha}."
            )
        if (
            self.kind is SystemKind.COULOMB
            and self.eps != CurvatureSign.PSEUDOSPHERE
        ):
            raise CurvedDualityError(
                "The Coulomb system lives on the pseudosphere (eps=-1)."
            )

    def parameters(self) -> Dict[str, float]:
        """
        Return the values of the catalogue symbols for this model.

        :returns: Values by symbol name, r0 and R0 alike.
        """
        return {
            "eps": float(self.eps),
            "R0": self.R0,
            "alpha": self.alpha,
            "B0": self.B0,
            "c": self.shift_coefficient,
            "r0": self.R0,
            "gamma": self.gamma,
        }

    def check_point(self, pt: PhasePoint) -> None:
        """
        Check that a phase point is in the operative domain.

        :param pt: The point.
        :raise DomainError: Outside the domain or at the Coulomb centre.
        """
        check_operative(pt.z, self.eps)
        if self.kind is SystemKind.COULOMB and abs(pt.z) < BOUNDARY_MARGIN:
            raise SingularityError("w=0 is the Coulomb centre.")

    def hamiltonian(self) -> BoundObservable:
        expr = {
            SystemKind.FREE_PARTICLE: Catalogue.H_FREE,
            SystemKind.OSCILLATOR: Catalogue.H_OSC,
            SystemKind.COULOMB: Catalogue.H_COULOMB,
        }[self.kind]
        return expr.bind(**self.parameters())

    def invariants(self) -> Dict[str, BoundObservable]:
        """
        Return the conserved quantities logged along trajectories.
        """
        params = self.parameters()
        if self.kind is SystemKind.COULOMB:
            return {
                "H": self.hamiltonian(),
                "J": Catalogue.J_COULOMB.bind(**params),
                "A": Catalogue.A.bind(**params),
            }
        logs = {"H": self.hamiltonian(), "J": Catalogue.J.bind(**params)}
        if self.B0 == 0.0:
            logs["I"] = Catalogue.I.bind(**params)
        return logs

    def form(self, pt: PhasePoint) -> SymplecticForm:
        return symplectic_form(pt, self.eps, self.R0, self.B0)


@dataclass(frozen=True)
class CoulombModel:
    """
    The Coulomb system on the pseudosphere, possibly with a vortex.

    :param r0: The "radius" of the pseudosphere.
    :param gamma: Coulomb coupling.
    :param sigma: Vortex charge, 0 or 1/2.
    """

    r0: float
    gamma: float
    sigma: float = 0.0

    def __post_init__(self) -> None:
        if self.r0 <= 0:
            raise CurvedDualityError(f"r0 must be positive, got {self.r0}.")
        if self.sigma not in (0.0, 0.5):
            raise CurvedDualityError(
                f"sigma must be 0 or 1/2, got {self.sigma}."
            )

    def parameters(self) -> Dict[str, float]:
        """
        Return the values of the catalogue symbols for this model.
        """
        return {"eps": -1.0, "R0": self.r0, "r0": self.r0, "gamma": self.gamma}

    def check_point(self, pt: PhasePoint) -> None:
        """
        :raise DomainError: Off the disk or at the Coulomb centre.
        """
        check_operative(pt.z, CurvatureSign.PSEUDOSPHERE)
        if abs(pt.z) < BOUNDARY_MARGIN:
            raise SingularityError("w=0 is the Coulomb centre.")

    def hamiltonian(self) -> BoundObservable:
        return Catalogue.H_COULOMB.bind(**self.parameters())

    def invariants(self) -> Dict[str, BoundObservable]:
        params = self.parameters()
        return {
            "H": self.hamiltonian(),
            "J": Catalogue.J_COULOMB.bind(**params),
            "A": Catalogue.A.bind(**params),
        }

    def form(self, pt: PhasePoint) -> SymplecticForm:
        return symplectic_form(pt, CurvatureSign.PSEUDOSPHERE, self.r0, 0.0)


def _check_coulomb_point(w: complex) -> None:
    if abs(w) < BOUNDARY_MARGIN:
        raise SingularityError("w=0 is the Coulomb centre.")
    check_operative(w, CurvatureSign.PSEUDOSPHERE)


def potential_osc(z: complex, model: CurvedModel) -> float:
    """
    Return the oscillator potential 2α²R0²|z|² / (1 - ε|z|²)².

    :raise BoundaryError: On the equator (sphere) or the disk boundary.
    """
    check_operative(z, model.eps)
    if abs(1.0 - model.eps * abs(z) ** 2) < BOUNDARY_MARGIN:
        raise BoundaryError(f"z={z} is a pole of the oscillator potential.")
    return Catalogue.V_OSC.bind(**model.parameters())(PhasePoint(z, 0j)).real


def potential_coulomb(w: complex, model: CoulombModel) -> float:
    """
    Return the Coulomb potential -(γ/r0)(1 + |w|²)/(2|w|).

    :raise SingularityError: At the Coulomb centre w = 0.
    """
    _check_coulomb_point(w)
    return Catalogue.V_COULOMB.bind(**model.parameters())(
        PhasePoint(w, 0j)
    ).real


def hamiltonian_free(pt: PhasePoint, R0: float, eps: int) -> float:
    """
    Return the free Hamiltonian (1 + ε|z|²)² |π|² / (2R0²).
    """
    check_operative(pt.z, eps)
    return Catalogue.H_FREE.bind(eps=eps, R0=R0)(pt).real


def hamiltonian_osc(pt: PhasePoint, model: CurvedModel) -> float:
    """
    Return the oscillator Hamiltonian, free part plus potential.
    """
    return hamiltonian_free(pt, model.R0, model.eps) + potential_osc(
        pt.z, model
    )


def hamiltonian_coulomb(pt: PhasePoint, model: CoulombModel) -> float:
    """
    Return the Coulomb Hamiltonian at (w, p).
    """
    _check_coulomb_point(pt.z)
    return model.hamiltonian()(pt).real


def generator_set(
    pt: PhasePoint,
    eps: int,
    B0: float,
    R0: float,
    c: float = PRINTED_SHIFT_COEFFICIENT,
) -> GeneratorSet:
    """
    Return the rotation generators at a phase point.

    Without field, 𝐉 = π + εz̄²π̄ and J = i(zπ - z̄π̄).  A field shifts them
    by c·R0·B0 times the ambient coordinates: 𝐉 → 𝐉 - (ic/2)R0B0x̄ and
    J → J - (εc/2)R0B0x3.
    """
    check_operative(pt.z, eps)
    params = {"eps": eps, "R0": R0, "B0": B0, "c": c}
    return GeneratorSet(
        Jc=Catalogue.JC.bind(**params)(pt),
        J=Catalogue.J.bind(**params)(pt).real,
    )


def hidden_invariant(pt: PhasePoint, model: CurvedModel) -> complex:
    """
    Return the hidden invariant 𝐈 = 𝐉²/(2R0²) + (α²R0²/2) x̄²/x3².

    :raise BoundaryError: On the equator, where x3 = 0.
    """
    check_operative(pt.z, model.eps)
    if abs(1.0 - model.eps * abs(pt.z) ** 2) < BOUNDARY_MARGIN:
        raise BoundaryError(f"z={pt.z} lies on the equator.")
    return Catalogue.I.bind(**model.parameters())(pt)


def runge_lenz(pt: PhasePoint, model: CoulombModel) -> complex:
    """
    Return the Runge-Lenz vector 𝐀 = -iJ_C𝐉_C/r0 + γ x̄_C/|x_C|.
    """
    _check_coulomb_point(pt.z)
    return Catalogue.A.bind(**model.parameters())(pt)


def symplectic_form(
    pt: PhasePoint, eps: int, R0: float, B0: float
) -> SymplecticForm:
    """
    Return the symplectic form at a point.

    The canonical part dπ∧dz + dπ̄∧dz̄ equals dpx∧dx + dpy∧dy.  A field adds
    iB0·4R0²/(1+ε|z|²)² dz∧dz̄ = 2B0λ(z) dx∧dy.
    """
    matrix = np.zeros((4, 4))
    matrix[2, 0] = matrix[3, 1] = 1.0
    matrix[0, 2] = matrix[1, 3] = -1.0
    if B0 != 0.0:
        entry = 2.0 * B0 * metric_factor(pt.z, R0, eps)
        matrix[0, 1] = entry
        matrix[1, 0] = -entry
    form = SymplecticForm(matrix)
    assert abs(form.determinant) > 1e-12, "degenerate symplectic form"
    return form


def finite_difference_gradient(
    func: Callable[[PhasePoint], complex], pt: PhasePoint, h: float = FD_STEP
) -> np.ndarray:
    """
    Return the gradient over (x, y, px, py) by central differences with one
    level of Richardson extrapolation.
    """
    base = pt.to_real()
    grad = np.zeros(4, dtype=complex)
    for k in range(4):
        step = np.zeros(4)

        def central(width: float) -> complex:
            step[k] = width
            upper = func(PhasePoint.from_real(base + step))
            lower = func(PhasePoint.from_real(base - step))
            return (upper - lower) / (2.0 * width)

        coarse = central(h)
        fine = central(h / 2.0)
        grad[k] = (4.0 * fine - coarse) / 3.0
    return grad


def _gradient(func: ObservableLike, pt: PhasePoint) -> np.ndarray:
    if isinstance(func, BoundObservable):
        return func.gradient(pt)
    return finite_difference_gradient(func, pt)


def poisson_bracket(
    f: ObservableLike, g: ObservableLike, pt: PhasePoint, form: SymplecticForm
) -> complex:
    """
    Return {f, g} = ∇f · P ∇g, with P the inverse of the symplectic matrix.

    Observables from the catalogue use their closed-form gradients; plain
    callables are differentiated numerically.
    """
    if f is g:
        return 0j
    return complex(_gradient(f, pt) @ form.poisson @ _gradient(g, pt))


def bracket_self_test(eps: int = 1, R0: float = 1.3) -> float:
    """
    Return the residual of {𝐉, x3} = -εx̄ at a fixed point.

    A residual of order one means BRACKET_SIGN has the wrong sign.
    """
    pt = PhasePoint(0.31 - 0.22j, 0.7 + 0.4j)
    form = symplectic_form(pt, eps, R0, 0.0)
    params = {"eps": eps, "R0": R0}
    lhs = poisson_bracket(
        Catalogue.JC.bind(**params), Catalogue.X3.bind(**params), pt, form
    )
    return abs(lhs + eps * Catalogue.XBAR.bind(**params)(pt))


def random_phase_points(
    rng: np.random.Generator,
    count: int,
    radius: float = 0.8,
    momentum_scale: float = 1.0,
) -> List[PhasePoint]:
    """
    Return points with |z| < radius and normally distributed momenta.
    """
    moduli = radius * np.sqrt(rng.uniform(0.0, 1.0, count))
    angles = rng.uniform(0.0, 2.0 * np.pi, count)
    momenta = momentum_scale * (
        rng.normal(size=count) + 1j * rng.normal(size=count)
    )
    return [
        PhasePoint(complex(m * np.exp(1j * a)), complex(p))
        for m, a, p in zip(moduli, angles, momenta)
    ]


def _relative(residual: complex, reference: complex) -> float:
    return abs(residual) / max(1.0, abs(reference))


def algebra_residuals(
    model: CurvedModel, points: Iterable[PhasePoint]
) -> Dict[str, float]:
    """
    Return the largest residual of every relation of the motion algebra and
    of the cubic algebra over the given points.

    The model's field is ignored: these are the relations of the canonical
    structure.
    """
    params = dict(model.parameters(), B0=0.0)
    jc = Catalogue.JC.bind(**params)
    jcbar = Catalogue.JCBAR.bind(**params)
    j = Catalogue.J.bind(**params)
    x = Catalogue.X.bind(**params)
    xbar = Catalogue.XBAR.bind(**params)
    x3 = Catalogue.X3.bind(**params)
    inv = Catalogue.I.bind(**params)
    invbar = Catalogue.IBAR.bind(**params)
    ham = Catalogue.H_OSC.bind(**params)
    eps, radius, alpha = model.eps, model.R0, model.alpha

    worst: Dict[str, float] = {}

    def record(name: str, value: float) -> None:
        worst[name] = max(worst.get(name, 0.0), value)

    for pt in points:
        form = symplectic_form(pt, eps, radius, 0.0)

        def br(f: BoundObservable, g: BoundObservable) -> complex:
            return poisson_bracket(f, g, pt, form)  # pylint: disable=cell-var-from-loop

        j_val = j(pt).real
        h_val = ham(pt).real
        record("{Jc,x}=2x3", _relative(br(jc, x) - 2 * x3(pt), x3(pt)))
        record(
            "{Jc,x3}=-eps*xbar",
            _relative(br(jc, x3) + eps * xbar(pt), xbar(pt)),
        )
        record("{J,x}=i*x", _relative(br(j, x) - 1j * x(pt), x(pt)))
        record(
            "{Jc,Jcbar}=-2i*eps*J",
            _relative(br(jc, jcbar) + 2j * eps * j_val, j_val),
        )
        record("{Jc,J}=i*Jc", _relative(br(jc, j) - 1j * jc(pt), jc(pt)))
        record("{J,H}=0", _relative(br(j, ham), h_val))
        record("{I,J}=2i*I", _relative(br(inv, j) - 2j * inv(pt), inv(pt)))
        cubic = 4j * (
            alpha**2 * j_val
            + eps * j_val * h_val / radius**2
            - j_val**3 / (2 * radius**4)
        )
        record("{Ibar,I}=cubic", _relative(br(invbar, inv) - cubic, cubic))
    return worst


def _magnetic_closure_vector(
    model: CurvedModel, points: List[PhasePoint], c: float
) -> np.ndarray:
    params = dict(model.parameters(), c=c)
    jc = Catalogue.JC.bind(**params)
    jcbar = Catalogue.JCBAR.bind(**params)
    j = Catalogue.J.bind(**params)
    residuals: List[complex] = []
    for pt in points:
        form = model.form(pt)
        residuals.append(
            poisson_bracket(jc, jcbar, pt, form) + 2j * model.eps * j(pt)
        )
        residuals.append(poisson_bracket(jc, j, pt, form) - 1j * jc(pt))
    vec = np.asarray(residuals)
    return np.concatenate([vec.real, vec.imag])


@dataclass(frozen=True)
class ShiftCalibration:
    """
    The outcome of fitting the magnetic shift coefficient.
    """

    fitted: float
    residual_fitted: float
    residual_printed: float

    @property
    def printed_fits_best(self) -> bool:
        return abs(self.fitted - PRINTED_SHIFT_COEFFICIENT) < 1e-6


def calibrate_shift_coefficient(
    model: CurvedModel, points: List[PhasePoint]
) -> ShiftCalibration:
    """
    Find the coefficient c closing the algebra of the shifted generators
    under the magnetic bracket.

    The closure residuals are affine in c, so the best c is a one-column
    least-squares fit.
    """
    if model.B0 == 0.0:
        raise CurvedDualityError("Calibration needs a nonzero field B0.")
    at_zero = _magnetic_closure_vector(model, points, 0.0)
    slope = _magnetic_closure_vector(model, points, 1.0) - at_zero
    fitted = float(np.linalg.lstsq(slope[:, None], -at_zero, rcond=None)[0][0])

    def worst(c: float) -> float:
        return float(np.max(np.abs(at_zero + c * slope)))

    return ShiftCalibration(
        fitted, worst(fitted), worst(PRINTED_SHIFT_COEFFICIENT)
    )


def magnetic_energy_shift(model: CurvedModel) -> float:
    """
    Return the constant by which (𝐉'𝐉̄' + εJ'²)/(2R0²) exceeds H0 for the
    shifted generators, εc²R0²B0²/8.
    """
    return model.eps * (model.shift_coefficient * model.R0 * model.B0) ** 2 / 8


def printed_magnetic_shift(B0: float) -> float:
    """
    Return the constant (4B0)² quoted for the shift of the Hamiltonian.
    """
    return (4.0 * B0) ** 2


def magnetic_shift_residual(
    model: CurvedModel, points: Iterable[PhasePoint]
) -> float:
    """
    Return the largest |(𝐉'𝐉̄' + εJ'²)/(2R0²) - H0 - magnetic_energy_shift|
    over the points, for the shifted generators of the model.
    """
    params = model.parameters()
    jc = Catalogue.JC.bind(**params)
    j = Catalogue.J.bind(**params)
    free = Catalogue.H_FREE.bind(**params)
    shift = magnetic_energy_shift(model)
    worst = 0.0
    for pt in points:
        bilinear = (abs(jc(pt)) ** 2 + model.eps * j(pt).real ** 2) / (
            2.0 * model.R0**2
        )
        worst = max(worst, abs(bilinear - free(pt).real - shift))
    return worst
