"""Settings of the training loop"""
from pydantic import BaseModel, ConfigDict, Field


class Adam_Config(BaseModel):
    """
        Adam hyperparameters with the optimiser's customary defaults
    """
    model_config = ConfigDict(frozen=True)

    lr: float = Field(1e-3, ge=0.0, description="learning rate")
    beta1: float = Field(0.9, ge=0.0, lt=1.0)
    beta2: float = Field(0.999, ge=0.0, lt=1.0)
    eps: float = Field(1e-8, gt=0.0)


class Train_Config(BaseModel):
    """
        Epochs, batching, segmentation, validation schedule and seed of a training run
    """
    model_config = ConfigDict(frozen=True)

    epochs: int = Field(200, gt=0)
    batch_size: int = Field(8, gt=0, description="segments per optimiser step")
    segment_ms: float = Field(1.0, gt=0.0, description="length of a teacher-forced segment in milliseconds")
    validation_period: int = Field(5, gt=0, description="validate every this many epochs, and after the last")
    full_rollout_validation: bool = Field(True, description="also report the free-running validation loss")
    seed: int = Field(0, ge=0)
    hidden_size: int = Field(200, gt=0, description="hidden dimension H of the gradient network")
    neg_slope: float = Field(0.01, gt=0.0, description="negative slope of the leaky ReLU")
    adam: Adam_Config = Field(default_factory=Adam_Config)
