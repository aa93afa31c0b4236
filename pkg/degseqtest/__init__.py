import importlib.resources
import logging

import intake

import degseqtest
from degseqtest.altcycle import (
    AlternatingCycle,
    find_alternating_cycle,
    has_alternating_cycle,
    log_peel_order,
)
from degseqtest.degreeseq import (
    DegreeStatistic,
    delta_approximates,
    expand_statistic,
    is_graphic,
    multiset_l1,
    realize,
)
from degseqtest.deltamath import loglog_slope, nanptp, nan_linregress
from degseqtest.estimator import derive_params, estimate_statistic, whole_graph_statistic
from degseqtest.graphcore import ColoredGraph, Graph, colored_symmetric_difference
from degseqtest.oracle import AdjacencyOracle, GraphOracle
from degseqtest.repair import RepairResult, check_edit_bound, discrepancy, repair
from degseqtest.tester import (
    DegreeSequenceProperty,
    ProximityConfig,
    property_from_spec,
    run_tester,
)

__version__: str = "0.1.0"

# Loads the experiment grids and result files intake catalog
_catalog_path = importlib.resources.path(
    package=degseqtest, resource="experiments_catalog.yaml"
)
with _catalog_path as uri:
    logging.info(f"Loading intake catalog from {uri}")
    catalog: intake.catalog.local.YAMLFileCatalog = intake.open_catalog(uri=str(uri))
