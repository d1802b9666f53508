"""pipeforge: dataset + natural-language goal -> validated, executed pipeline."""

__version__ = "0.1.0"
