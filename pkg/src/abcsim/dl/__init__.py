from .detector import TrainConfig, generate_dataset, load_checkpoint, predict_frame, save_checkpoint, train
from .features import PilotDegeneracyError, featurize, pilot_covariances, sample_covariance, whiten
from .lstm import LstmModel, init_model, lstm_backward, lstm_forward
from .optim import AdamState, adam_step

__all__ = [
    "AdamState", "LstmModel", "PilotDegeneracyError", "TrainConfig", "adam_step", "featurize",
    "generate_dataset", "init_model", "load_checkpoint", "lstm_backward", "lstm_forward",
    "pilot_covariances", "predict_frame", "sample_covariance", "save_checkpoint", "train", "whiten",
]
