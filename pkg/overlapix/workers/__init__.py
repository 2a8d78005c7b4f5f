"""Trial execution."""

from overlapix.workers.trial_pool import TrialPool, TrialSummary

__all__ = ["TrialPool", "TrialSummary"]
