"""Device parameter sets used for the a-priori comparison plots."""

from __future__ import annotations

from dataclasses import dataclass, replace


@dataclass(frozen=True)
class PhotonCounterParams:
    """Photon-counter platforms (BB84 in all flavours, and COW)."""

    V_pm: float       # visibility, prepare-and-measure
    V_eb: float       # visibility, entanglement-based
    t_B: float        # transmission inside Bob's device
    eta: float        # detector efficiency
    p_d: float        # dark counts per gate
    eps_cow: float    # COW bit error, independent of the visibility
    zeta: float       # EB: fraction of multi-pair events open to PNS
    f_EC: float       # error-correction inefficiency


@dataclass(frozen=True)
class HomodyneParams:
    """Continuous-variable platform (Gaussian modulation, homodyne detection)."""

    epsilon: float    # optical excess noise (SNU)
    eta: float        # detector efficiency
    v_el: float       # electronic noise (SNU)
    beta: float       # reconciliation efficiency


@dataclass(frozen=True)
class ParameterSet:
    name: str
    dv: PhotonCounterParams
    cv: HomodyneParams
    alpha_db_per_km: float = 0.2
    # coincidence window of the cw pair source; the EB rate is quoted per window
    eb_window_s: float = 1e-9

    def with_dv(self, **changes) -> "ParameterSet":
        return replace(self, dv=replace(self.dv, **changes))

    def with_cv(self, **changes) -> "ParameterSet":
        return replace(self, cv=replace(self.cv, **changes))


SET1 = ParameterSet(
    name="set1",
    dv=PhotonCounterParams(V_pm=0.99, V_eb=0.96, t_B=1.0, eta=0.1, p_d=1e-5,
                           eps_cow=0.03, zeta=0.0, f_EC=1.2),
    cv=HomodyneParams(epsilon=0.005, eta=0.6, v_el=0.01, beta=0.9),
)

SET2 = ParameterSet(
    name="set2",
    dv=PhotonCounterParams(V_pm=0.99, V_eb=0.99, t_B=1.0, eta=0.2, p_d=1e-6,
                           eps_cow=0.01, zeta=0.0, f_EC=1.0),
    cv=HomodyneParams(epsilon=0.001, eta=0.85, v_el=0.0, beta=0.9),
)

PRESETS = {"set1": SET1, "set2": SET2}


def get_preset(name) -> ParameterSet:
    """Accepts 'set1', 'set2', 1 or 2."""
    key = f"set{name}" if str(name) in ("1", "2") else str(name)
    try:
        return PRESETS[key]
    except KeyError:
        raise ValueError(f"unknown parameter set {name!r}") from None
