"""
Balanced contrastive-loss HPO toolkit.

Reparameterized coordinate-descent search over (Λp, Λe, b), contrastive loss
term decomposition, retrieval metrics and a multi-trajectory comparison harness.
"""

__version__ = "0.1.0"
