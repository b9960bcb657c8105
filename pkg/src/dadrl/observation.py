"""Observation containers shared by the simulator, encoder, and replay buffer."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

# per-sample feature tuples; histories are stored newest-first
VEHICLE_FEATURES = 5   # x_rel, y_rel, heading_rel, speed, lane_index
EGO_ODO_FEATURES = 5   # steering, yaw_rate, speed, accel, jerk


@dataclass
class ObservationBundle:
    """One step's observation: surrounding histories, ego histories, maps.

    hist: (n, K, 5) surrounding-vehicle histories in the current ego frame.
    mask: (n,) additive presence mask, 0.0 present / -inf absent.
    e1:   (K, 5) ego kinematic history in the current ego frame.
    e2:   (K, 5) ego odometric history (steering, yaw rate, speed, accel, jerk).
    maps: (2, H, W) binary drivable-area and waypoint maps, ego-centered.
    """

    hist: np.ndarray
    mask: np.ndarray
    e1: np.ndarray
    e2: np.ndarray
    maps: np.ndarray

    @property
    def n_slots(self):
        return self.hist.shape[0]

    def ego_now(self):
        """Current-time ego feature vector: E1[k=0] then E2[k=0]."""
        return np.concatenate([self.e1[0], self.e2[0]])


@dataclass
class ObservationBatch:
    """Stacked observations ready for a batched encoder pass."""

    hist: np.ndarray   # (B, n, K, 5)
    mask: np.ndarray   # (B, n)
    e1: np.ndarray     # (B, K, 5)
    e2: np.ndarray     # (B, K, 5)
    maps: np.ndarray   # (B, 2, H, W)

    def __len__(self):
        return self.hist.shape[0]


def batch_observations(bundles):
    return ObservationBatch(
        hist=np.stack([b.hist for b in bundles]),
        mask=np.stack([b.mask for b in bundles]),
        e1=np.stack([b.e1 for b in bundles]),
        e2=np.stack([b.e2 for b in bundles]),
        maps=np.stack([b.maps for b in bundles]),
    )


def pack_maps(maps):
    """Bit-pack binary maps for compact replay storage (exact for {0,1})."""
    return np.packbits(maps.astype(np.uint8)), maps.shape


def unpack_maps(packed, shape):
    total = int(np.prod(shape))
    bits = np.unpackbits(packed, count=total)
    return bits.reshape(shape).astype(np.float64)
