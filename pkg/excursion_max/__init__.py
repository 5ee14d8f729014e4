from excursion_max.eval_conf import EvalControl, StepLaw, WalkConfig
from excursion_max.path_engine import McEstimate, estimate_pc_n, local_score_stats, sample_continuous_event
from excursion_max.pc_routes import PcReport, build_report, pc_closed_form
from excursion_max.reports import TOOL_VERSION as __version__
from excursion_max.reports import ReportDocument

__all__ = [
    "EvalControl",
    "StepLaw",
    "WalkConfig",
    "McEstimate",
    "estimate_pc_n",
    "local_score_stats",
    "sample_continuous_event",
    "PcReport",
    "build_report",
    "pc_closed_form",
    "ReportDocument",
    "__version__",
]
