"""Uniform replay buffer with bit-packed context maps."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..observation import ObservationBatch, ObservationBundle, pack_maps, unpack_maps


class BufferNotReady(RuntimeError):
    """Raised when sampling is requested before the warmup fill."""


@dataclass
class Transition:
    obs: ObservationBundle
    action: np.ndarray        # raw (u_speed, u_lane), strictly inside (-1,1)
    next_obs: ObservationBundle
    reward: float
    done: bool

    def __post_init__(self):
        a = np.asarray(self.action, dtype=np.float64)
        if not np.all(np.abs(a) < 1.0):
            raise ValueError(f"raw action {a} not strictly inside (-1,1)^2")
        self.action = a


class _Stored:
    __slots__ = ("hist", "mask", "e1", "e2", "maps", "map_shape",
                 "next_hist", "next_mask", "next_e1", "next_e2", "next_maps",
                 "action", "reward", "done")

    def __init__(self, tr: Transition):
        o, n = tr.obs, tr.next_obs
        self.hist, self.mask, self.e1, self.e2 = o.hist, o.mask, o.e1, o.e2
        self.maps, self.map_shape = pack_maps(o.maps)
        self.next_hist, self.next_mask = n.hist, n.mask
        self.next_e1, self.next_e2 = n.e1, n.e2
        self.next_maps, _ = pack_maps(n.maps)
        self.action = tr.action
        self.reward = tr.reward
        self.done = tr.done


class ReplayBuffer:
    """Ring buffer; uniform sampling without replacement within a batch."""

    def __init__(self, capacity, warmup=0, seed=0):
        if capacity < 1:
            raise ValueError("capacity must be >= 1")
        self.capacity = int(capacity)
        self.warmup = int(warmup)
        self._rng = np.random.default_rng(seed)
        self._items: list[_Stored] = []
        self._write = 0

    def __len__(self):
        return len(self._items)

    @property
    def ready(self):
        return len(self._items) >= self.warmup

    def push(self, transition: Transition):
        stored = _Stored(transition)
        if len(self._items) < self.capacity:
            self._items.append(stored)
        else:
            self._items[self._write] = stored  # evict oldest
            self._write = (self._write + 1) % self.capacity

    def sample(self, batch_size, seed=None):
        """(obs batch, actions, next-obs batch, rewards, dones).

        ``seed`` overrides the internal stream for reproducible draws from a
        frozen buffer.
        """
        if not self.ready or len(self._items) < batch_size:
            raise BufferNotReady(
                f"buffer has {len(self._items)} transitions; needs "
                f">= max(warmup={self.warmup}, batch={batch_size})")
        rng = np.random.default_rng(seed) if seed is not None else self._rng
        idx = rng.choice(len(self._items), size=batch_size, replace=False)
        rows = [self._items[i] for i in idx]
        obs = ObservationBatch(
            hist=np.stack([r.hist for r in rows]),
            mask=np.stack([r.mask for r in rows]),
            e1=np.stack([r.e1 for r in rows]),
            e2=np.stack([r.e2 for r in rows]),
            maps=np.stack([unpack_maps(r.maps, r.map_shape) for r in rows]),
        )
        next_obs = ObservationBatch(
            hist=np.stack([r.next_hist for r in rows]),
            mask=np.stack([r.next_mask for r in rows]),
            e1=np.stack([r.next_e1 for r in rows]),
            e2=np.stack([r.next_e2 for r in rows]),
            maps=np.stack([unpack_maps(r.next_maps, r.map_shape) for r in rows]),
        )
        rewards = np.array([r.reward for r in rows], dtype=np.float64)
        dones = np.array([float(r.done) for r in rows], dtype=np.float64)
        actions = np.stack([r.action for r in rows])
        return obs, actions, next_obs, rewards, dones
