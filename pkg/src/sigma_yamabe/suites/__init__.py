"""
Verification suites driven by the command-line front end.
"""

from sigma_yamabe.suites.base import (
    BaseSuite,
    SuiteResult,
    check_row,
    refinement_row,
    suite_orders,
)
from sigma_yamabe.suites.identities import IdentitiesSuite
from sigma_yamabe.suites.curvature import CurvatureSuite
from sigma_yamabe.suites.gaussbonnet import GaussBonnetSuite
from sigma_yamabe.suites.variation import VariationSuite
from sigma_yamabe.suites.solve import SolveSuite

SUITES = {
    suite.name: suite
    for suite in (IdentitiesSuite, CurvatureSuite, GaussBonnetSuite, VariationSuite, SolveSuite)
}

__all__ = [
    'BaseSuite', 'SuiteResult', 'check_row', 'refinement_row', 'suite_orders',
    'IdentitiesSuite', 'CurvatureSuite', 'GaussBonnetSuite', 'VariationSuite', 'SolveSuite',
    'SUITES',
]
