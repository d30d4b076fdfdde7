"""Thin fine-tuning and inference adapter around sequence models.

Consumes the pair files written by ``corefmark split`` and produces
prediction files in the schema ``corefmark score`` expects.  The prediction
file is the only coupling to the scoring toolkit; no metric logic lives
here.
"""

from corefmark_harness.config import TrainConfig, load_config, save_config

__version__ = "0.1.0"

__all__ = ["TrainConfig", "load_config", "save_config", "__version__"]
