import hashlib
import json
import time
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Sequence, Union

import torch
from omegaconf import DictConfig, OmegaConf

from utils.common import COMMAND, INPUT_DIGEST, PAYLOAD, TOLERANCE_KEYS, TOLERANCES, VERSION, WALL_TIME

TOOL_VERSION = "0.1.0"


def input_digest(inputs: Sequence[Union[str, bytes]]) -> str:
    """sha256 over the input file contents and literal arguments, in order."""
    digest = hashlib.sha256()
    for item in inputs:
        data = item.encode("utf-8") if isinstance(item, str) else item
        digest.update(len(data).to_bytes(8, "little"))
        digest.update(data)
    return digest.hexdigest()


def to_plain(value: Any) -> Any:
    """Tensors and configs to lists, dicts and numbers that ``json`` understands."""
    if isinstance(value, torch.Tensor):
        return value.tolist()
    if isinstance(value, DictConfig):
        return OmegaConf.to_container(value, resolve=True)
    if isinstance(value, dict):
        return {str(k): to_plain(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [to_plain(v) for v in value]
    if hasattr(value, "to_dict"):
        return to_plain(value.to_dict())
    return value


@dataclass
class Report:
    command: List[str]
    digest: str
    payload: Dict[str, Any]
    tolerances: Dict[str, Any] = field(default_factory=dict)
    started: float = field(default_factory=time.perf_counter)
    wall_time: Optional[float] = None

    @staticmethod
    def tolerances_of(config: DictConfig) -> Dict[str, Any]:
        return {key: to_plain(config[key]) for key in TOLERANCE_KEYS if key in config}

    def finish(self) -> "Report":
        self.wall_time = time.perf_counter() - self.started
        return self

    def to_dict(self) -> Dict[str, Any]:
        return {
            COMMAND: list(self.command),
            VERSION: TOOL_VERSION,
            INPUT_DIGEST: self.digest,
            PAYLOAD: to_plain(self.payload),
            TOLERANCES: to_plain(self.tolerances),
            WALL_TIME: self.wall_time,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True, allow_nan=True)

    def write(self, path: str):
        with open(path, "w", encoding="utf-8") as report_file:
            report_file.write(self.to_json())
            report_file.write("\n")
