from collections.abc import Sequence
from dataclasses import dataclass, field, replace

import numpy as np

from claims_reserving.ssm.constants import PSD_TOLERANCE
from claims_reserving.utils import to_jsonable


@dataclass(frozen=True, eq=False)
class ComponentDef:
    """A named linear combination of the state vector, e.g. a level or a pattern."""

    name: str
    selection: np.ndarray

    def __post_init__(self):
        selection = np.atleast_2d(np.array(self.selection, dtype=float))
        selection.setflags(write=False)
        object.__setattr__(self, "selection", selection)


@dataclass(frozen=True, eq=False)
class SsmSpec:
    """Linear Gaussian state space model with time-varying system matrices.

    For times s = 0..n-1:

        y_s     = Z_s a_s + X_s beta + eps_s,         eps_s ~ N(0, diag(H_s))
        a_s     = T_s a_(s-1) + W_s gamma + eta_s,     eta_s ~ N(0, Q_s)
        a_(-1)  ~ N(a0, Q0) with the `diffuse` elements given infinite variance.

    beta and gamma are unknown constants. Every per-time field is a tuple with
    one array per time point.
    """

    design: tuple[np.ndarray, ...]
    obs_variance: tuple[np.ndarray, ...]
    transition: tuple[np.ndarray, ...]
    state_cov: tuple[np.ndarray, ...]
    initial_mean: np.ndarray
    initial_cov: np.ndarray
    diffuse: np.ndarray
    obs_regression: tuple[np.ndarray, ...] | None = None
    state_regression: tuple[np.ndarray, ...] | None = None
    components: tuple[ComponentDef, ...] = ()
    beta_index: tuple[int, ...] = ()
    gamma_index: tuple[int, ...] = ()
    state_names: tuple[str, ...] = field(default=())

    def __post_init__(self):
        _freeze = self._freeze
        object.__setattr__(self, "design", tuple(_freeze(np.atleast_2d(z)) for z in self.design))
        object.__setattr__(self, "obs_variance", tuple(_freeze(np.atleast_1d(h)) for h in self.obs_variance))
        object.__setattr__(self, "transition", tuple(_freeze(np.atleast_2d(t)) for t in self.transition))
        object.__setattr__(self, "state_cov", tuple(_freeze(np.atleast_2d(q)) for q in self.state_cov))
        object.__setattr__(self, "initial_mean", _freeze(np.atleast_1d(self.initial_mean)))
        object.__setattr__(self, "initial_cov", _freeze(np.atleast_2d(self.initial_cov)))
        object.__setattr__(self, "diffuse", _freeze(np.atleast_1d(self.diffuse), dtype=bool))
        if self.obs_regression is not None:
            object.__setattr__(self, "obs_regression", tuple(_freeze(np.atleast_2d(x)) for x in self.obs_regression))
        if self.state_regression is not None:
            object.__setattr__(
                self, "state_regression", tuple(_freeze(np.atleast_2d(w)) for w in self.state_regression)
            )
        object.__setattr__(self, "components", tuple(self.components))

    @staticmethod
    def _freeze(array, dtype=float) -> np.ndarray:
        array = np.array(array, dtype=dtype)
        array.setflags(write=False)
        return array

    @classmethod
    def time_invariant(
        cls,
        n_times: int,
        design,
        obs_variance,
        transition,
        state_cov,
        initial_mean,
        initial_cov,
        diffuse,
        obs_regression=None,
        state_regression=None,
        components: Sequence[ComponentDef] = (),
        state_names: Sequence[str] = (),
    ) -> "SsmSpec":
        """Repeat one set of system matrices over `n_times` time points."""
        design = np.atleast_2d(np.array(design, dtype=float))
        obs_variance = np.atleast_1d(np.array(obs_variance, dtype=float))
        transition = np.atleast_2d(np.array(transition, dtype=float))
        state_cov = np.atleast_2d(np.array(state_cov, dtype=float))
        return cls(
            design=(design,) * n_times,
            obs_variance=(obs_variance,) * n_times,
            transition=(transition,) * n_times,
            state_cov=(state_cov,) * n_times,
            initial_mean=initial_mean,
            initial_cov=initial_cov,
            diffuse=diffuse,
            obs_regression=None if obs_regression is None else (np.atleast_2d(obs_regression),) * n_times,
            state_regression=None if state_regression is None else (np.atleast_2d(state_regression),) * n_times,
            components=tuple(components),
            state_names=tuple(state_names),
        )

    @property
    def n_times(self) -> int:
        return len(self.design)

    @property
    def n_states(self) -> int:
        return len(self.initial_mean)

    @property
    def dims(self) -> tuple[int, ...]:
        return tuple(z.shape[0] for z in self.design)

    @property
    def n_regression(self) -> int:
        if not self.obs_regression:
            return 0
        return self.obs_regression[0].shape[1]

    @property
    def n_state_regression(self) -> int:
        if not self.state_regression:
            return 0
        return self.state_regression[0].shape[1]

    @property
    def n_diffuse(self) -> int:
        return int(self.diffuse.sum())

    def replace(self, **changes) -> "SsmSpec":
        return replace(self, **changes)


@dataclass
class SpecReport:
    issues: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.issues

    def add(self, message: str):
        self.issues.append(message)


def validate(spec: SsmSpec) -> SpecReport:
    """Collect every dimension, covariance and variance problem of `spec`.

    Never raises.
    """
    report = SpecReport()
    k = spec.n_states
    n = spec.n_times
    r = spec.n_regression
    g = spec.n_state_regression

    per_time = {
        "obs_variance": spec.obs_variance,
        "transition": spec.transition,
        "state_cov": spec.state_cov,
    }
    if spec.obs_regression is not None:
        per_time["obs_regression"] = spec.obs_regression
    if spec.state_regression is not None:
        per_time["state_regression"] = spec.state_regression
    for name, values in per_time.items():
        if len(values) != n:
            report.add(f"{name} covers {len(values)} time points, design covers {n}")
    if report.issues:
        return report

    if spec.initial_cov.shape != (k, k):
        report.add(f"initial_cov has shape {spec.initial_cov.shape}, expected {(k, k)}")
    else:
        _check_psd(report, spec.initial_cov, "initial_cov")
        diffuse_rows = spec.initial_cov[spec.diffuse] if len(spec.diffuse) == k else None
        if diffuse_rows is not None and np.any(diffuse_rows != 0):
            report.add("initial_cov must be zero in the rows and columns of diffuse elements")
    if spec.diffuse.shape != (k,):
        report.add(f"diffuse flags have length {len(spec.diffuse)}, expected {k}")

    for t in range(n):
        z = spec.design[t]
        p = z.shape[0]
        if z.shape[1] != k:
            report.add(f"t={t}: design has {z.shape[1]} columns, expected {k}")
        h = spec.obs_variance[t]
        if h.shape != (p,):
            report.add(f"t={t}: obs_variance has {h.size} entries, expected {p}")
        elif np.any(~np.isfinite(h)) or np.any(h < 0):
            report.add(f"t={t}: obs_variance has negative or non-finite entries")
        if spec.transition[t].shape != (k, k):
            report.add(f"t={t}: transition has shape {spec.transition[t].shape}, expected {(k, k)}")
        q = spec.state_cov[t]
        if q.shape != (k, k):
            report.add(f"t={t}: state_cov has shape {q.shape}, expected {(k, k)}")
        else:
            _check_psd(report, q, f"t={t}: state_cov")
        if spec.obs_regression is not None and spec.obs_regression[t].shape != (p, r):
            report.add(f"t={t}: obs_regression has shape {spec.obs_regression[t].shape}, expected {(p, r)}")
        if spec.state_regression is not None and spec.state_regression[t].shape != (k, g):
            report.add(f"t={t}: state_regression has shape {spec.state_regression[t].shape}, expected {(k, g)}")

    for component in spec.components:
        if component.selection.shape[1] != k:
            report.add(f"component {component.name} selects {component.selection.shape[1]} states, expected {k}")

    return report


def augment_regression(spec: SsmSpec) -> SsmSpec:
    """Move beta and gamma into the state vector as constant diffuse states.

    The state becomes (a, beta, gamma); Z gains the X columns and the
    transition carries W as a block acting on gamma. Returns `spec` itself
    when there is nothing to move.
    """
    r = spec.n_regression
    g = spec.n_state_regression
    if r == 0 and g == 0:
        return spec

    k = spec.n_states
    k_aug = k + r + g
    identity = np.eye(r + g)

    design = []
    for t, z in enumerate(spec.design):
        x = spec.obs_regression[t] if r else np.zeros((z.shape[0], 0))
        design.append(np.hstack([z, x, np.zeros((z.shape[0], g))]))

    transition = []
    state_cov = []
    for t, tt in enumerate(spec.transition):
        block = np.zeros((k_aug, k_aug))
        block[:k, :k] = tt
        if g:
            block[:k, k + r :] = spec.state_regression[t]
        block[k:, k:] = identity
        transition.append(block)

        q = np.zeros((k_aug, k_aug))
        q[:k, :k] = spec.state_cov[t]
        state_cov.append(q)

    initial_cov = np.zeros((k_aug, k_aug))
    initial_cov[:k, :k] = spec.initial_cov
    components = tuple(
        ComponentDef(c.name, np.hstack([c.selection, np.zeros((c.selection.shape[0], r + g))]))
        for c in spec.components
    )
    names = spec.state_names or tuple(f"state_{i}" for i in range(k))

    return SsmSpec(
        design=tuple(design),
        obs_variance=spec.obs_variance,
        transition=tuple(transition),
        state_cov=tuple(state_cov),
        initial_mean=np.concatenate([spec.initial_mean, np.zeros(r + g)]),
        initial_cov=initial_cov,
        diffuse=np.concatenate([spec.diffuse, np.ones(r + g, dtype=bool)]),
        components=components,
        beta_index=tuple(range(k, k + r)),
        gamma_index=tuple(range(k + r, k_aug)),
        state_names=names + tuple(f"beta_{i}" for i in range(r)) + tuple(f"gamma_{i}" for i in range(g)),
    )


def spec_to_json(spec: SsmSpec) -> dict:
    """Plain JSON description of a materialized spec."""
    return to_jsonable(
        {
            "n_times": spec.n_times,
            "n_states": spec.n_states,
            "dims": spec.dims,
            "state_names": spec.state_names,
            "design": spec.design,
            "obs_regression": spec.obs_regression,
            "obs_variance": spec.obs_variance,
            "transition": spec.transition,
            "state_regression": spec.state_regression,
            "state_cov": spec.state_cov,
            "initial_mean": spec.initial_mean,
            "initial_cov": spec.initial_cov,
            "diffuse": spec.diffuse,
            "beta_index": spec.beta_index,
            "gamma_index": spec.gamma_index,
            "components": [{"name": c.name, "selection": c.selection} for c in spec.components],
        }
    )


def _check_psd(report: SpecReport, matrix: np.ndarray, name: str):
    if not np.all(np.isfinite(matrix)):
        report.add(f"{name} has non-finite entries")
        return
    if not np.allclose(matrix, matrix.T, rtol=0, atol=PSD_TOLERANCE * max(1.0, np.abs(matrix).max())):
        report.add(f"{name} is not symmetric")
        return
    scale = max(1.0, float(np.abs(matrix).max()))
    min_eig = float(np.linalg.eigvalsh((matrix + matrix.T) / 2).min())
    if min_eig < -PSD_TOLERANCE * scale:
        report.add(f"{name} is not positive semidefinite (minimum eigenvalue {min_eig:.3g})")
