"""Convenience assembly of the full computation stack for one parameter point."""
from __future__ import annotations

from dataclasses import dataclass, field

from .dressed import (DressedBasis, TransitionTable, default_level_cut,
                      diagonalize, emission_channel_names, standard_channels,
                      transition_table)
from .dynamics import BathSpec, Liouvillian, build_liouvillian, rates
from .models import (MultiTlsParams, RabiParams, TwoModeParams, build_multi_tls,
                     build_rabi, build_two_mode, parity_operator)
from .thermal import ThermalState, g2_zero, photon_flux, thermal_state

ModelParams = RabiParams | MultiTlsParams | TwoModeParams

_BUILDERS = {
    "rabi": build_rabi,
    "multi-tls": build_multi_tls,
    "two-mode": build_two_mode,
}


def model_kind(params: ModelParams) -> str:
    if isinstance(params, RabiParams):
        return "rabi"
    if isinstance(params, MultiTlsParams):
        return "multi-tls"
    if isinstance(params, TwoModeParams):
        return "two-mode"
    raise TypeError(f"unknown model parameter type {type(params).__name__}")


def diagonalize_model(params: ModelParams) -> tuple[DressedBasis, TransitionTable]:
    """Build, diagonalize and tabulate transitions for any supported model."""
    kind = model_kind(params)
    h = _BUILDERS[kind](params)
    basis = diagonalize(h, parity_operator(params.space, kind))
    table = transition_table(basis, standard_channels(params.space, kind),
                             emission_channel_names(params.space, kind))
    return basis, table


@dataclass(frozen=True, eq=False)
class System:
    """One assembled parameter point (possibly level-truncated)."""

    params: ModelParams
    temperature: float
    basis: DressedBasis          # truncated to level_cut
    table: TransitionTable
    state: ThermalState
    bath: BathSpec | None = None
    liouvillian: Liouvillian | None = None
    metadata: dict = field(default_factory=dict)

    @property
    def level_cut(self) -> int:
        return self.basis.n_levels

    def flux(self) -> float:
        return photon_flux(self.basis, self.table, self.state)

    def g2_zero(self) -> float:
        return g2_zero(self.basis, self.table, self.state)


def assemble(params: ModelParams, temperature: float,
             bath: BathSpec | None = None,
             level_cut: int | None = None) -> System:
    """Diagonalize, truncate to the thermal window and (optionally) build
    the master-equation generator for the given bath."""
    full_basis, full_table = diagonalize_model(params)
    cut = default_level_cut(full_basis, temperature) if level_cut is None \
        else min(level_cut, full_basis.n_levels)
    basis = full_basis.truncate(cut)
    table = full_table.truncate(cut)
    state = thermal_state(basis, temperature)

    liouvillian = None
    if bath is not None:
        tables = [rates(basis, table, bath, ch) for ch in table.coeffs]
        liouvillian = build_liouvillian(basis.energies, tables)

    meta = {"level_cut": cut, "temperature": temperature,
            "model": model_kind(params)}
    if bath is not None:
        meta.update(gamma_a=bath.gamma_a, gamma_x=bath.gamma_x)
    return System(params, temperature, basis, table, state,
                  bath, liouvillian, meta)
