from models.linear_pair import BrunovskyResult, KroneckerData, LinearPair
from models.control_system import ControlSystem
from models.trajectory import Trajectory

__all__ = ["BrunovskyResult", "ControlSystem", "KroneckerData", "LinearPair", "Trajectory"]
