# This file makes the directory a Python package
from typing import Any, Dict

from ..core.exceptions import BadParams
from ..utils.bounds import realizable_sample_size
from .base_learner import BaseLearner, FixedLearner
from .compression import CompressionLearner
from .eta_grid import EtaGridLearner, eta_grid_reduce
from .finite_class import FiniteClassLearner
from .private import CoverSelectLearner, DpQgLearner
from .realizable_qg import RealizableQgLearner, realizable_qg_learn
from .robust import RobustLearner, SplitPlan, additive_split_plan, robustify

LEARNER_NAMES = (
    "REALIZABLE_QG", "ROBUSTIFY", "ETA_GRID", "FINITE_CLASS",
    "QG_COMPRESSION", "DP_QG", "COVER_SELECT", "FIXED",
)


def get_learner(learner_name: str, parameters: Dict[str, Any] = None) -> BaseLearner:
    """Factory function to create learner instances"""
    parameters = parameters or {}
    name = learner_name.upper()

    if name == "REALIZABLE_QG":
        return RealizableQgLearner(parameters["growth"])
    elif name == "ROBUSTIFY":
        return RobustLearner(
            inner=parameters["inner"],
            eps=parameters["eps"],
            delta=parameters["delta"],
            plan=parameters.get("plan"),
            scale=parameters.get("scale", 1),
            inner_kind=parameters.get("inner_kind", "realizable"),
            alpha=parameters.get("alpha"),
        )
    elif name == "ETA_GRID":
        return EtaGridLearner(
            parameters["level_learners"],
            parameters["alpha"],
            parameters["eps"],
            parameters["delta"],
            scale=parameters.get("scale", 1),
        )
    elif name == "FINITE_CLASS":
        return FiniteClassLearner(
            parameters["members"], parameters["eps"], parameters["delta"], parameters.get("labels"),
        )
    elif name == "QG_COMPRESSION":
        return CompressionLearner(parameters["growth"])
    elif name == "DP_QG":
        return DpQgLearner(parameters["growth"], parameters["alpha"], parameters["beta"], parameters["params"])
    elif name == "COVER_SELECT":
        return CoverSelectLearner(
            parameters["members"], parameters["alpha"], parameters["beta"], parameters.get("labels"),
        )
    elif name == "FIXED":
        return FixedLearner(parameters["output"], parameters.get("label", "fixed"), parameters.get("size", 0))
    else:
        raise BadParams(f"Unknown learner: {learner_name}")


__all__ = [
    'BaseLearner', 'FixedLearner', 'RealizableQgLearner', 'RobustLearner', 'EtaGridLearner',
    'FiniteClassLearner', 'CompressionLearner', 'DpQgLearner', 'CoverSelectLearner',
    'SplitPlan', 'additive_split_plan', 'robustify', 'eta_grid_reduce', 'realizable_qg_learn',
    'realizable_sample_size', 'get_learner', 'LEARNER_NAMES',
]
