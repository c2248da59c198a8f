from .adam import Adam
from .loop import (
    TrainConfig,
    TrainLog,
    load_train_state,
    save_train_state,
    train,
)
from .losses import mse_loss, training_loss

__all__ = [
    "Adam",
    "TrainConfig",
    "TrainLog",
    "train",
    "save_train_state",
    "load_train_state",
    "mse_loss",
    "training_loss",
]
