"""Link configuration shared by the analytic and Monte Carlo paths."""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass, field

from .errors import ConfigError, UnsupportedConfiguration
from .jitter import JitterSpec

CODINGS = ("coded", "uncoded")
SYNCS = ("symbol", "chip")


@dataclass(frozen=True)
class SystemConfig:
    """All link-level parameters of one time-hopping IR-UWB scenario.

    ``interferer_energies`` holds E_2..E_Nu, so its length is ``num_users - 1``.
    """

    total_gain: int
    frames_per_symbol: int
    chips_per_frame: int
    num_users: int = 1
    desired_energy: float = 1.0
    interferer_energies: tuple[float, ...] = ()
    noise_psd: float = 0.1
    coding: str = "coded"
    sync: str = "symbol"
    tx_jitter: JitterSpec = field(default_factory=JitterSpec.none)

    def __post_init__(self):
        object.__setattr__(self, "interferer_energies", tuple(float(e) for e in self.interferer_energies))
        for name in ("total_gain", "frames_per_symbol", "chips_per_frame", "num_users"):
            value = getattr(self, name)
            if int(value) != value or value < 1:
                raise ConfigError(f"{name} must be a positive integer, got {value!r}")
        if self.frames_per_symbol * self.chips_per_frame != self.total_gain:
            raise ConfigError(
                f"N = N_f * N_c violated: {self.frames_per_symbol} * {self.chips_per_frame} "
                f"!= {self.total_gain}"
            )
        if len(self.interferer_energies) != self.num_users - 1:
            raise ConfigError(
                f"interferer_energies must list num_users - 1 = {self.num_users - 1} values, "
                f"got {len(self.interferer_energies)}"
            )
        if self.desired_energy < 0 or any(e < 0 for e in self.interferer_energies):
            raise ConfigError("energies must be >= 0")
        if self.noise_psd < 0:
            raise ConfigError("noise_psd must be >= 0")
        if self.coding not in CODINGS:
            raise ConfigError(f"coding must be one of {CODINGS}, got {self.coding!r}")
        if self.sync not in SYNCS:
            raise ConfigError(f"sync must be one of {SYNCS}, got {self.sync!r}")

    @classmethod
    def equal_interferers(cls, total_gain: int, frames_per_symbol: int, num_users: int,
                          desired_energy: float = 1.0, interferer_energy: float = 1.0,
                          **kwargs) -> "SystemConfig":
        if frames_per_symbol < 1 or total_gain % frames_per_symbol:
            raise ConfigError(
                f"N = N_f * N_c violated: N_f = {frames_per_symbol} does not divide N = {total_gain}"
            )
        return cls(
            total_gain=total_gain,
            frames_per_symbol=frames_per_symbol,
            chips_per_frame=total_gain // frames_per_symbol,
            num_users=num_users,
            desired_energy=desired_energy,
            interferer_energies=(interferer_energy,) * (num_users - 1),
            **kwargs,
        )

    @property
    def energies(self) -> tuple[float, ...]:
        """E_1..E_Nu."""
        return (self.desired_energy,) + self.interferer_energies

    def with_split(self, frames_per_symbol: int) -> "SystemConfig":
        """Same link with N redistributed as (N_f, N / N_f)."""
        if frames_per_symbol < 1 or self.total_gain % frames_per_symbol:
            raise ConfigError(
                f"N = N_f * N_c violated: N_f = {frames_per_symbol} does not divide "
                f"N = {self.total_gain}"
            )
        return dataclasses.replace(
            self,
            frames_per_symbol=frames_per_symbol,
            chips_per_frame=self.total_gain // frames_per_symbol,
        )

    def replace(self, **changes) -> "SystemConfig":
        return dataclasses.replace(self, **changes)

    def common_interferer_energy(self) -> float:
        """E for the equal-energy multiuser formulas; raises if energies differ."""
        if not self.interferer_energies:
            return 0.0
        first = self.interferer_energies[0]
        if any(e != first for e in self.interferer_energies):
            raise UnsupportedConfiguration(
                "multiuser uncoded closed forms require equal interferer energies; "
                "use the two-user form or Monte Carlo"
            )
        return first
