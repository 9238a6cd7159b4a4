"""Rule-based condition labeling for head-CT radiology reports.

Pipeline: de-identification -> keyword/assertion extraction -> sentence-level
false-positive reduction -> seeded spot-check sampling -> finite-population
t confidence intervals, plus a small HTTP service for human arbitration.
"""

__version__ = "0.1.0"
