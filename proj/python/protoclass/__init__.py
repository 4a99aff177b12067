"""Prototype and nearest-neighbor classification over precomputed embeddings.

The heavy lifting lives in the compiled ``_core`` module; this package adds
thin wrappers that turn report JSON into Python dictionaries.
"""

import json

from ._core import (
    EmbeddingSet,
    Error,
    PcaModel,
    PrototypeBank,
    build_caption_prototypes,
    build_text_prototypes,
    build_visual_prototypes,
    classify,
    classify_knn,
    cosine_sim,
    euclidean_dist,
    expand_templates,
    fuse_concat,
    generate_synthetic,
    l2_normalize,
    mean_vector,
    pca_fit,
    read_set,
    sample_per_class,
    softmax_scores,
    top1_accuracy,
    write_set,
)
from . import _core

__all__ = [
    "EmbeddingSet",
    "Error",
    "PcaModel",
    "PrototypeBank",
    "build_caption_prototypes",
    "build_text_prototypes",
    "build_visual_prototypes",
    "classify",
    "classify_knn",
    "cosine_sim",
    "crossval_2fold",
    "euclidean_dist",
    "expand_templates",
    "fuse_concat",
    "generate_synthetic",
    "l2_normalize",
    "mean_vector",
    "pca_fit",
    "read_set",
    "sample_per_class",
    "softmax_scores",
    "sweep_k",
    "sweep_samples",
    "top1_accuracy",
    "write_set",
]


def crossval_2fold(train, test, **kwargs):
    """Both cross-validation directions of one pipeline, as a report dict."""
    return json.loads(_core.crossval_2fold_json(train, test, **kwargs))


def sweep_k(train, test, ks=(1, 3, 5, 7, 11), parallel=0):
    """Nearest-prototype row plus one k-NN row per k, both directions."""
    return json.loads(_core.sweep_k_json(train, test, list(ks), parallel))


def sweep_samples(train, test, sizes=(50, 25, 20, 15, 10), seeds=(0, 1, 2, 3, 4), parallel=0):
    """Nearest-prototype accuracy with seeded per-class samples, averaged over seeds."""
    return json.loads(_core.sweep_samples_json(train, test, list(sizes), list(seeds), parallel))
