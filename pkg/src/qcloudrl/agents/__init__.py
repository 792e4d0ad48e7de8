"""Decision policies and their training/evaluation loops."""

from .evaluate import EvalEpisode, EvalResult, evaluate
from .greedy import GreedyAgent, greedy_select
from .mlp import DEFAULT_SIZES, MlpModel, init_mlp, mlp_backward, mlp_forward, mlp_forward_batch
from .models import MlpPolicyModel, MlpQModel, PqcPolicyModel, PqcQModel
from .replay import EpsilonSchedule, ReplayBuffer
from .training import EpisodeLog, RolloutStep, TrainConfig, train_dqn, train_reinforce

__all__ = [
    "EvalEpisode",
    "EvalResult",
    "evaluate",
    "GreedyAgent",
    "greedy_select",
    "DEFAULT_SIZES",
    "MlpModel",
    "init_mlp",
    "mlp_backward",
    "mlp_forward",
    "mlp_forward_batch",
    "MlpPolicyModel",
    "MlpQModel",
    "PqcPolicyModel",
    "PqcQModel",
    "EpsilonSchedule",
    "ReplayBuffer",
    "EpisodeLog",
    "RolloutStep",
    "TrainConfig",
    "train_dqn",
    "train_reinforce",
]
