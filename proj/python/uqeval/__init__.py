from ._uqeval import *  # noqa: F401,F403
