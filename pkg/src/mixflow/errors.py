"""Exception types shared across the package."""


class ConfigError(ValueError):
    """Invalid or malformed experiment configuration.

    The message names the offending key path so the CLI can surface it.
    """


class SingularFrequencyError(ArithmeticError):
    """A transfer-function denominator vanished on the imaginary axis.

    This signals a characteristic root at the probed frequency and is
    reported rather than silently patched.
    """

    def __init__(self, omega: float):
        self.omega = float(omega)
        super().__init__(f"transfer function singular at omega={self.omega!r} rad/s")


class SimulationFault(RuntimeError):
    """Integration produced a non-finite state."""

    def __init__(self, time: float, vehicle: int):
        self.time = float(time)
        self.vehicle = int(vehicle)
        super().__init__(f"non-finite state at t={self.time:.6g} s, vehicle {self.vehicle}")


class InfeasibleGridError(ValueError):
    """Every cell of a gain grid violates the stability or sign constraints."""

    def __init__(self, n_negative: int, n_unstable: int):
        self.n_negative = int(n_negative)
        self.n_unstable = int(n_unstable)
        super().__init__(
            "no feasible cell in gain grid "
            f"({self.n_negative} cells with negative gains, "
            f"{self.n_unstable} cells violating the string-stability constraint)"
        )
