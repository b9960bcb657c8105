from .context import encode_context
from .params import EGO_NOW_DIM, VARIANTS, EncoderConfig, EncoderParams
from .state_encoder import StateEncoder
from .stae import attend_ego, encode_temporal, fuse_state
