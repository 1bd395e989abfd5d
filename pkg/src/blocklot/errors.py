"""Exception hierarchy shared by every blocklot module.

Each error maps to one rejection reason; the HTTP service and the CLI
translate them into status codes and exit codes without inspecting
messages.
"""


class BlockLotError(Exception):
    """Base class for all blocklot failures."""


class InvalidParameter(BlockLotError):
    """A caller-supplied value violates a precondition."""


class AlreadyDrawn(BlockLotError):
    """The event has left the REGISTERED state."""


class PastDeadline(BlockLotError):
    """Subscription attempted at or after the announcement date."""


class DuplicateMember(BlockLotError):
    """An identical participant digest is already registered."""


class TooManyWinners(BlockLotError):
    """num_winners exceeds the number of participants."""


class EmptyEvent(BlockLotError):
    """A draw was requested with no participants."""


class NotDrawn(BlockLotError):
    """The operation requires a DRAWN event."""


class BadToken(BlockLotError):
    """The organizer token digest does not match the registered one."""


class MalformedEvent(BlockLotError):
    """An event byte string does not follow the canonical format."""


class TooEarly(BlockLotError):
    """Draw requested before the date or the confirmed target block."""


class BeaconUnavailable(BlockLotError):
    """The block source could not be reached."""


class MalformedResponse(BlockLotError):
    """The block source returned data that cannot be used."""


class BlockNotYetPublished(BlockLotError):
    """The requested height is above the chain tip."""


class ReplicationFailure(BlockLotError):
    """Fewer than a majority of peers can acknowledge a write."""


class KeyNotFound(BlockLotError):
    """No ledger entry exists for the requested key."""


class NoMajority(BlockLotError):
    """No single value was reported by a strict majority of peers."""


class InsufficientRuns(BlockLotError):
    """A fairness trial needs at least MIN_FAIRNESS_RUNS executions."""
