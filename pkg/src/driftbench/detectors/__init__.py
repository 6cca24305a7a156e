"""Online change detectors and the name registry used by the CLI."""

from __future__ import annotations

from driftbench.detectors.adwin import ADWIN
from driftbench.detectors.base import DriftDetector, Status
from driftbench.detectors.ddm import DDM, EDDM, RDDM
from driftbench.detectors.ecdd import ECDD, control_limit
from driftbench.detectors.hddm import HDDM
from driftbench.detectors.kswin import KSWIN, ks_statistic
from driftbench.detectors.page_hinkley import PageHinkley
from driftbench.detectors.stepd import STEPD, proportion_test

REGISTRY: dict[str, type[DriftDetector]] = {
    cls.name: cls for cls in (ADWIN, DDM, EDDM, HDDM, RDDM, ECDD, PageHinkley, KSWIN, STEPD)
}


def make_detector(name: str, **params) -> DriftDetector:
    try:
        cls = REGISTRY[name.lower()]
    except KeyError:
        raise KeyError(f"unknown detector {name!r}; choose from {', '.join(REGISTRY)}") from None
    return cls(**params)


__all__ = [
    "ADWIN", "DDM", "ECDD", "EDDM", "HDDM", "KSWIN", "PageHinkley", "RDDM", "REGISTRY",
    "STEPD", "DriftDetector", "Status", "control_limit", "ks_statistic", "make_detector",
    "proportion_test",
]
