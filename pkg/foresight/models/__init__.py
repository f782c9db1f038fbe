from .runs import ExperimentRun, FoldRecord


__all__ = [
    "ExperimentRun",
    "FoldRecord",
]
