"""Python access to the packbench packing environment."""

from ._core import Env, EpisodeFinished, InvalidAction, __version__, replay

__all__ = ["Env", "EpisodeFinished", "InvalidAction", "__version__", "replay"]
