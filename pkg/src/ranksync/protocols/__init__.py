"""Transmitter/receiver protocol pairs and their reference bounds."""

from .block import block_receiver, block_transmitter, sync_block_deletion
from .bounds import BoundKind, bound, bound_variance
from .common import ProtocolError, SyncOutcome
from .deletions import (
    insertion_receiver,
    insertion_transmitter,
    interactive_receiver,
    interactive_transmitter,
    limited_receiver,
    limited_transmitter,
    sync_deletions_interactive,
    sync_deletions_limited_feedback,
    sync_insertions_oneway,
)
from .translocation import sync_translocation, translocation_receiver, translocation_transmitter
from .transposition import (
    anchor_transposition_rounds,
    sync_transposition_oneway,
    transposition_receiver,
    transposition_transmitter,
)

# name -> (transmitter factory, receiver factory); both take (sequence, d)
PARTIES = {
    "p1": (interactive_transmitter, interactive_receiver),
    "p2": (limited_transmitter, limited_receiver),
    "insertions": (insertion_transmitter, insertion_receiver),
    "block": (block_transmitter, block_receiver),
    "translocation": (translocation_transmitter, translocation_receiver),
    "transposition": (transposition_transmitter, transposition_receiver),
}

__all__ = [
    "PARTIES",
    "BoundKind",
    "ProtocolError",
    "SyncOutcome",
    "anchor_transposition_rounds",
    "bound",
    "bound_variance",
    "sync_block_deletion",
    "sync_deletions_interactive",
    "sync_deletions_limited_feedback",
    "sync_insertions_oneway",
    "sync_translocation",
    "sync_transposition_oneway",
]
