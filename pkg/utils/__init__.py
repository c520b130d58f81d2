"""Utility modules."""

from .parallel import ordered_map, resolve_threads, task_seed

__all__ = ["ordered_map", "resolve_threads", "task_seed"]
