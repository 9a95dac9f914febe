"""Exception types shared across the simulator."""


class RampMergeError(Exception):
    """Base class for all simulator errors."""


# geometry
class DegeneratePath(RampMergeError):
    """Consecutive waypoints coincide (zero-length segment)."""


class MergePointOffPath(RampMergeError):
    """Declared merge point does not lie on the waypoint polyline."""


class OffPath(RampMergeError):
    """Position is farther from the polyline than the lateral tolerance."""


class OutOfRange(RampMergeError):
    """Station outside the path's arc-length span."""


# dynamics
class NonFiniteCommand(RampMergeError):
    """Acceleration command is NaN or infinite."""


# infrastructure
class DuplicateRegistration(RampMergeError):
    """Vehicle is already registered with the infrastructure."""


class UnknownVehicle(RampMergeError):
    """Vehicle id has no record in the registry."""


# sequencing
class InvalidSpeeds(RampMergeError):
    """Target speed below start speed where acceleration is assumed."""


class NonPositiveSpeed(RampMergeError):
    """Speed must be strictly positive for this estimate."""


# control
class NonFiniteInput(RampMergeError):
    """Controller input is NaN or infinite."""


class ZeroGap(RampMergeError):
    """Bumper gap is zero or negative: vehicles are in contact."""


class MissingPredecessor(RampMergeError):
    """Assigned predecessor has left the infrastructure's records."""


class ControllerPanic(RampMergeError):
    """A controller raised; carries the vehicle id and tick time."""

    def __init__(self, vehicle_id: str, t: float, cause: Exception):
        super().__init__(f"{vehicle_id} at t={t:.3f}s: {cause!r}")
        self.vehicle_id = vehicle_id
        self.t = t


# engine / scenario
class ScenarioParseError(RampMergeError):
    """Scenario document is not well-formed."""


class ScenarioValidationError(RampMergeError):
    """Scenario document failed validation; message carries the field path."""

    def __init__(self, field: str, message: str):
        super().__init__(f"{field}: {message}")
        self.field = field


class InfeasibleSpawn(RampMergeError):
    """Drawn spacing cannot host a vehicle without overlap."""


class SafetyViolation(RampMergeError):
    """Bumper-to-bumper contact occurred; the run halts."""

    def __init__(self, t: float, rear_id: str, front_id: str, gap: float):
        super().__init__(
            f"t={t:.3f}s: gap {gap:.3f} m between {rear_id} and {front_id}"
        )
        self.t = t
        self.rear_id = rear_id
        self.front_id = front_id
        self.gap = gap


# metrics
class IncompleteTraversal(RampMergeError):
    """Vehicle did not cover the full measurement window in the log."""


class RosterMismatch(RampMergeError):
    """Record sets do not cover the same vehicle roster."""
