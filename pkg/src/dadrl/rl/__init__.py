from .actions import LANE_BOUNDARY, MIN_TARGET_SPEED, map_action
from .buffer import BufferNotReady, ReplayBuffer, Transition
from .networks import ACTION_CLIP, CriticPair, MLP, PolicyHead
from .reward import RewardConfig, compute_reward
from .sac import SACAgent, SACConfig
