"""Node embedding trainers for the taxonomy graph."""

from .base import (GcnConfig, HopeConfig, Node2VecConfig, NodeEmbeddings,
                   PoincareConfig, TadwConfig, load_embeddings,
                   save_embeddings)
from .gcn import GcnModel, train_gcn
from .hope import train_hope
from .node2vec import train_node2vec
from .oov import project_oov
from .poincare import einstein_midpoint, poincare_distance, train_poincare
from .tadw import train_tadw

__all__ = [
    "GcnConfig", "GcnModel", "HopeConfig", "Node2VecConfig",
    "NodeEmbeddings", "PoincareConfig", "TadwConfig", "einstein_midpoint",
    "load_embeddings", "poincare_distance", "project_oov", "save_embeddings",
    "train_gcn", "train_hope", "train_node2vec", "train_poincare",
    "train_tadw",
]
