from .ablate import run_ablation
from .builders import build_agent, build_encoder, build_sim, random_raw_actions
from .config import AppConfig, ConfigError, config_from_dict, load_config
from .evaluate import evaluate, run_episode
from .gradcheck_cmd import build_composite, run_gradcheck
from .metrics import (
    CSV_HEADER,
    EpisodeRecord,
    compute_overall_score,
    humanness_error,
    summarize,
    write_metrics_csv,
    write_summary_json,
)
from .replay import ReplayRefused, ReplayReport, TrajectoryLogger, record_rollout, replay_log
from .train import Trainer
