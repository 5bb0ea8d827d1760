﻿from .output_writer import (
    boundary_records,
    write_boundary_csv,
    write_csv_table,
    write_json_report,
    write_markdown_report,
)

__all__ = [
    "boundary_records",
    "write_boundary_csv",
    "write_csv_table",
    "write_json_report",
    "write_markdown_report",
]
