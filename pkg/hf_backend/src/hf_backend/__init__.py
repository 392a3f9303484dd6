"""Transformer fine-tuning adapter for the dialect identification pipeline.

Fine-tunes a pretrained sequence-classification model on a labeled TSV corpus
and writes prediction files in the pipeline's file protocol. The adapter is a
standalone sidecar: the primary package never imports it, and it talks to the
primary only through corpus/prediction files and the `dialectid` CLI.
"""

__version__ = "0.1.0"

from .finetune import AdapterError, FetchError, FinetuneSpec, LabelSpaceError, finetune_and_predict

__all__ = [
    "AdapterError",
    "FetchError",
    "FinetuneSpec",
    "LabelSpaceError",
    "finetune_and_predict",
]
