"""taxograft: attach new words to a hypernymy taxonomy.

The pipeline builds query datasets by diffing taxonomy releases, embeds
the taxonomy graph, optionally fuses several embedding sources, scores
candidate attachment points with a logistic ranker, and evaluates ranked
predictions with a component-aware MAP.  An HTTP service exposes the
ranked candidates to a human annotator.
"""

from .errors import TaxograftError
from .taxonomy import (Synset, Taxonomy, attach, build_taxonomy,
                       load_taxonomy, save_taxonomy)
from .vectors import VectorStore, load_vectors, save_vectors

__version__ = "0.1.0"

__all__ = [
    "Synset",
    "Taxonomy",
    "TaxograftError",
    "VectorStore",
    "attach",
    "build_taxonomy",
    "load_taxonomy",
    "load_vectors",
    "save_taxonomy",
    "save_vectors",
    "__version__",
]
