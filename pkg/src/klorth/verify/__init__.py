"""Numerical verification of the identity catalogue."""

from .core import (ALL, MANDATORY, Category, CheckResult, IdentityCheck, Report, SkipPoint,
                   Status, Tolerance, UnknownCheck, default_workers, registry, run_check,
                   run_suite)

__all__ = ["ALL", "MANDATORY", "Category", "CheckResult", "IdentityCheck", "Report", "SkipPoint",
           "Status", "Tolerance", "UnknownCheck", "default_workers", "registry", "run_check",
           "run_suite"]
