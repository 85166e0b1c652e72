"""Labelled datasets and training files."""

from .build import (
    LabeledInstance,
    build_dataset,
    label_instance,
    optimal_label_records,
    read_instances,
)
from .emit import EMIT_FILES, SFT_MODES, emit_dpo, emit_sft, write_dataset
