from .adam import Adam, AdamState, adam_step
from .checkpoint import CheckpointError, load_checkpoint, save_checkpoint
from .gradcheck import GradCheckReport, grad_check
from .tensor import (
    AllMaskedError,
    ContractViolation,
    ShapeError,
    Tape,
    Tensor,
    active_tape,
    add,
    backward,
    bmm,
    clamp,
    concat,
    constant,
    conv2d,
    div,
    exp,
    getitem,
    layer_norm,
    log,
    masked_softmax,
    matmul,
    mean_,
    minimum,
    mul,
    neg,
    parameter,
    relu,
    reshape,
    set_finite_checks,
    sigmoid,
    softplus,
    sqrt,
    square,
    sub,
    sum_,
    tanh,
    transpose,
)
