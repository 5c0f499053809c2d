import csv
from dataclasses import dataclass
from typing import Dict, List, Sequence

import torch


@dataclass
class Trajectory:
    times: torch.Tensor  # [N + 1]
    states: torch.Tensor  # [N + 1; n]
    controls: torch.Tensor  # [N + 1; m]
    state_names: Sequence[str]
    control_names: Sequence[str]
    exited: bool = False

    @property
    def final_state(self) -> torch.Tensor:
        return self.states[-1]

    @property
    def dt(self) -> float:
        if len(self.times) < 2:
            return 0.0
        return (self.times[1] - self.times[0]).item()

    def __len__(self) -> int:
        return len(self.times)

    def header(self) -> List[str]:
        return ["t", *self.state_names, *self.control_names]

    def rows(self) -> List[List[float]]:
        return torch.cat([self.times.unsqueeze(1), self.states, self.controls], dim=1).tolist()

    def to_csv(self, path: str):
        with open(path, "w", newline="") as out_file:
            writer = csv.writer(out_file)
            writer.writerow(self.header())
            writer.writerows(self.rows())

    def summary(self) -> Dict:
        return {
            "samples": len(self),
            "dt": self.dt,
            "t_final": self.times[-1].item(),
            "final_state": self.final_state.tolist(),
            "exited": self.exited,
        }
