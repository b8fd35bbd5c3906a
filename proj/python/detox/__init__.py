"""Russian text detoxification: baselines, condBERT-style rewriting, prompted generation and evaluation."""

from ._detox import *  # noqa: F401,F403
from ._detox import __doc__  # noqa: F401
