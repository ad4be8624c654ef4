"""Python bindings for the mmsarc library."""

from ._mmsarc import (
    Error,
    FusionNet,
    Post,
    SvmModel,
    filter_post,
    fleiss_kappa,
    load_corpus,
    matching_percent,
    parse_post,
    run_cli,
    run_experiment,
    svm_train,
    synth_write,
    tokenize,
)

__all__ = [
    "Error",
    "FusionNet",
    "Post",
    "SvmModel",
    "filter_post",
    "fleiss_kappa",
    "load_corpus",
    "matching_percent",
    "parse_post",
    "run_cli",
    "run_experiment",
    "svm_train",
    "synth_write",
    "tokenize",
]
