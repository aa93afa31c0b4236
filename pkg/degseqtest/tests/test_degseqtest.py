import intake

from degseqtest import __version__, catalog


def test_version():
    assert __version__ == "0.1.0"


def test_degseqtest_catalog():
    """
    Test that the intake experiments catalog can be loaded via both
    `degseqtest.catalog` and `intake.cat.degseq_cat`
    """
    catalog_entries = ["exp_scaling", "exp_estimator", "exp_tester"]
    assert list(catalog) == catalog_entries
    assert list(intake.cat.degseq_cat) == catalog_entries


def test_catalog_default_grids():
    """
    Test that every experiment entry carries a default grid and its CSV schema id
    """
    grid = catalog.exp_scaling.metadata["grid"]
    assert grid["deltas"] == [0.02, 0.05, 0.1, 0.2]
    assert grid["n"] == [1000]
    assert catalog.exp_estimator.metadata["grid"]["deltas"] == [0.5]
    assert catalog.exp_tester.metadata["schema"] == "degseqtest.exp_tester.v1"
