"""Imitation-learning policy with touch dreaming, plus locomotion reward kernels.

The package has three layers:

* data: schemas, synthetic demonstration generation, normalization, storage
  (`schema`, `data`, `synthetic`, `storage`).
* policy: the per-region tactile encoder with its EMA teacher, the
  encoder-decoder policy trunk with action and dream experts, the composite
  loss, the training loop, and dream-vs-recorded evaluation
  (`tactile`, `policy`, `losses`, `training`, `evaluation`).
* locomotion: pure-numpy observation assembly, reward table, samplers, and
  tracking metrics for the lower-body controller (`lbc`, `rotations`).

`cli` ties these into the `touchdream` command.
"""

from .schema import ActionSchema, ModalitySchema, SchemaError, TACTILE_DIM
from .data import (
    Dataset,
    Episode,
    EpisodeMeta,
    NormalizationStats,
    sample_training_batch,
    valid_start_indices,
)
from .synthetic import SyntheticConfig, generate_episode, generate_synthetic_dataset
from .storage import StorageError, read_dataset, write_dataset
from .tactile import (
    RegionLayout,
    TactileEncoder,
    decompose_hand_tactile,
    default_region_layout,
    ema_update,
    make_teacher,
    reassemble_hand_tactile,
    teacher_encode,
)
from .policy import PolicyConfig, PolicyOutput, TouchDreamPolicy, VARIANT_NAMES
from .losses import LossBreakdown, bc_loss, force_loss, huber, tactile_dream_loss
from .training import (
    TrainState,
    TrainingConfig,
    TrainingError,
    init_train_state,
    load_checkpoint,
    save_checkpoint,
    total_loss,
    train,
    train_step,
)
from .evaluation import (
    DreamTrace,
    ablation_report,
    contact_latent_separation,
    export_latent_heatmap,
    force_mae,
    rollout_dream_trace,
    write_trace_csv,
)
from .lbc import (
    Command,
    LBCError,
    RewardConfig,
    RobotState,
    assemble_proprio,
    assemble_student_obs,
    dagger_loss,
    default_robot_state,
    reward_breakdown,
    run_case_file,
    sample_command,
    sample_domain_randomization,
    tracking_errors,
)

__version__ = "0.1.0"

__all__ = [
    "ActionSchema",
    "Command",
    "Dataset",
    "DreamTrace",
    "Episode",
    "EpisodeMeta",
    "LBCError",
    "LossBreakdown",
    "ModalitySchema",
    "NormalizationStats",
    "PolicyConfig",
    "PolicyOutput",
    "RegionLayout",
    "RewardConfig",
    "RobotState",
    "SchemaError",
    "StorageError",
    "SyntheticConfig",
    "TACTILE_DIM",
    "TactileEncoder",
    "TouchDreamPolicy",
    "TrainState",
    "TrainingConfig",
    "TrainingError",
    "VARIANT_NAMES",
    "ablation_report",
    "assemble_proprio",
    "assemble_student_obs",
    "bc_loss",
    "contact_latent_separation",
    "dagger_loss",
    "decompose_hand_tactile",
    "default_region_layout",
    "default_robot_state",
    "ema_update",
    "export_latent_heatmap",
    "force_loss",
    "force_mae",
    "generate_episode",
    "generate_synthetic_dataset",
    "huber",
    "init_train_state",
    "load_checkpoint",
    "make_teacher",
    "read_dataset",
    "reassemble_hand_tactile",
    "reward_breakdown",
    "rollout_dream_trace",
    "run_case_file",
    "sample_command",
    "sample_domain_randomization",
    "sample_training_batch",
    "save_checkpoint",
    "tactile_dream_loss",
    "teacher_encode",
    "total_loss",
    "tracking_errors",
    "train",
    "train_step",
    "valid_start_indices",
    "write_dataset",
    "write_trace_csv",
]
