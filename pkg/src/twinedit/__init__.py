"""twinedit: digital-twin driven reasoning video editing toolkit.

Subpackages: twin (scene representation), twinql (sandboxed query
language), rollout (reasoner protocol), rewards, grpo (training math),
metrics, bench (evaluation harness), pipeline + cli (orchestration).
"""

__version__ = "0.1.0"
