"""Preference-driven task transfer engine.

Transfers a policy from a basic task to a target task using only
episode-by-episode keep/drop selections over trajectories, alternating
rejection-sampling-style selection with adversarial maximum-entropy
cost learning.
"""

__version__ = "0.1.0"
