"""Monte-Carlo laboratory for ambient backscatter under a reactive jammer."""
from .config import SystemConfig, db_to_linear

__all__ = ["SystemConfig", "db_to_linear"]
__version__ = "0.1.0"
