from .check import requires_pandas
from .utils import (
    _get_test_fname,
    file_digest,
    logger,
    read_json,
    read_jsonl,
    set_log_level,
    to_pandas,
    write_json,
    write_jsonl,
)
