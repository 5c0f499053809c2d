from math import ceil
from typing import Dict, List, Sequence
from warnings import filterwarnings

import torch
from omegaconf import DictConfig

from utils.errors import DegenerateMap, NonConstantD

# report keys
COMMAND = "command"
VERSION = "version"
INPUT_DIGEST = "input_digest"
PAYLOAD = "payload"
TOLERANCES = "tolerances"
WALL_TIME = "wall_time"

# configuration keys echoed back in every report
TOLERANCE_KEYS = [
    "tol",
    "dt",
    "grid",
    "radius",
    "seed",
    "angular_tol",
    "limit_tol",
    "involutivity_tol",
    "hysteresis",
    "fd_step",
    "state_grid",
    "control_grid",
    "radius_schedule",
    "n_directions",
    "residual_grid",
    "residual_samples",
    "T",
    "flow_dt",
    "l",
    "probe_times",
    "orbit_depth",
    "orbit_tol",
    "eps",
    "kernel_width",
    "feedback_nodes",
    "check_density",
]


def make_generator(seed: int) -> torch.Generator:
    generator = torch.Generator()
    generator.manual_seed(seed)
    return generator


def filter_warnings():
    # sampling caveats are recorded in the reports themselves
    filterwarnings("ignore", category=DegenerateMap)
    filterwarnings("ignore", category=NonConstantD)


def format_vector(values: Sequence[float], precision: int = 6) -> str:
    return "(" + ", ".join(f"{float(v):.{precision}g}" for v in values) + ")"


def print_table(data: Dict[str, List[str]]):
    row_lens = [max(len(header), max([len(s) for s in values], default=0)) for header, values in data.items()]
    row_template = " | ".join(["{:<" + str(i) + "}" for i in row_lens])
    headers = [key for key in data.keys()]
    max_data_per_col = max([len(v) for v in data.values()])
    row_data = []
    for i in range(max_data_per_col):
        row_data.append([v[i] if len(v) > i else "" for k, v in data.items()])

    header_line = row_template.format(*headers)
    delimiter_line = "-" * len(header_line)
    row_lines = [row_template.format(*row) for row in row_data]
    print("", header_line, delimiter_line, *row_lines, sep="\n")


def print_key_values(data: Dict[str, object]):
    print_table({"key": list(data.keys()), "value": [str(v) for v in data.values()]})


def print_config(config: DictConfig, ignore_keys: List[str] = None, n_cols: int = 4):
    if ignore_keys is None:
        ignore_keys = []
    parameters = [f"{k}: {v}" for k, v in config.items() if k not in ignore_keys]
    table_data = {}
    items_per_col = int(ceil(len(parameters) / n_cols))
    for col in range(n_cols):
        table_data[f"Parameters #{col + 1}"] = parameters[items_per_col * col : items_per_col * (col + 1)]
    print_table(table_data)
