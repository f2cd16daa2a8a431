"""composition_miner: mine subtype/part/material knowledge about common
physical objects from a chat LLM, store it as a hierarchical knowledge
base, and score the result against reference datasets and crowd judgments.
"""

__version__ = "0.1.0"

from . import curation, evaluation, kbmodel, kbstore, llmclient, miner

__all__ = [
    "__version__",
    "curation",
    "evaluation",
    "kbmodel",
    "kbstore",
    "llmclient",
    "miner",
]
