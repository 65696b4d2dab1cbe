from ._smaflow import *  # noqa: F401,F403
