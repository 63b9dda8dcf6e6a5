"""
Dataset generation, the QDS1 container, splitting and tensor conversion.
"""

from .generation import DatasetGenerator, cell_table, generate_dataset
from .qds import QDSFormatError, decode_qds, encode_qds, read_qds, record_size, write_qds
from .split import split_train_test, stratified_split
from .tensors import channels_to_dm, dm_to_channels

__all__ = [
    "DatasetGenerator",
    "cell_table",
    "generate_dataset",
    "QDSFormatError",
    "decode_qds",
    "encode_qds",
    "read_qds",
    "record_size",
    "write_qds",
    "split_train_test",
    "stratified_split",
    "channels_to_dm",
    "dm_to_channels",
]
