"""Certified constants, skipped-sum bounds and growth certificates."""

from .certfile import dumps, loads, read_certificate, write_certificate
from .constants import ConstantsReport, constants_of
from .growth import (Block, Budget, CertificateFactory, FillerFactory, GrowthCertificate,
                     VerifyReport, build_growth_certificate, iterate_growth, verify_certificate)
from .skipped import SampleReport, SkippedDecomposition, check_skipped, skipped_sum_bound

__all__ = [
    "Block", "Budget", "CertificateFactory", "ConstantsReport", "FillerFactory",
    "GrowthCertificate", "SampleReport", "SkippedDecomposition", "VerifyReport",
    "build_growth_certificate", "check_skipped", "constants_of", "dumps", "iterate_growth",
    "loads", "read_certificate", "skipped_sum_bound", "verify_certificate", "write_certificate",
]
