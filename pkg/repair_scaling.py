# ---
# jupyter:
#   jupytext:
#     formats: ipynb,py:hydrogen
#     text_representation:
#       extension: .py
#       format_name: hydrogen
#       format_version: '1.3'
#       jupytext_version: 1.5.0
#   kernelspec:
#     display_name: degseqtest
#     language: python
#     name: degseqtest
# ---

# %% [markdown]
# # **Repairing degree sequences and testing degree-sequence properties**
#
# This Jupyter notebook runs the three Monte-Carlo experiments of the
# `degseqtest` package at desk scale:
#
# 1. Edit distance of repaired graphs vs degree discrepancy
#   - Generate (graph, target sequence) pairs with a prescribed discrepancy
#   - Repair each graph by swapping alternating cycles
#   - Fit the log-log slope of edit distance against discrepancy
#     using the `degseqtest.loglog_slope` function
# 2. Concentration of the sampled degree statistic
# 3. Completeness and soundness of the property tester
#
# Results are written to `results/` where the intake catalog picks them up.

# %%
import os

import numpy as np
import pandas as pd
import xarray as xr

import degseqtest
from degseqtest.harness import (
    ExperimentSpec,
    calibrate_c,
    exp_estimator,
    exp_scaling,
    exp_tester,
    write_table,
)

# %%
# Set DEGSEQTEST_NUM_WORKERS before starting the kernel to run trials in parallel
os.makedirs("results", exist_ok=True)

# %% [markdown]
# # Edit distance scaling

# %%
# Default grid from the intake catalog, with a smaller n to keep runtimes short
spec: ExperimentSpec = ExperimentSpec.from_catalog("exp_scaling", n=(200, 400), seed=42)
spec.cells()

# %%
# %%time
trials, summary = exp_scaling(spec=spec)
write_table(df=trials, path="results/exp_scaling.csv")
write_table(df=summary, path="results/exp_scaling_summary.csv")

# %%
# Log-log slope of |F|/n^2 against delta, per family and graph size
summary

# %%
# Ratio |F| / (sqrt(delta) n^2) should stay flat across the delta grid
cube: xr.Dataset = trials.set_index(["family", "n", "target_delta", "trial"]).to_xarray()
cube.ratio.mean(dim="trial").to_dataframe().unstack("target_delta")

# %%
c_const: float = calibrate_c(trials=trials)
print(f"Calibrated edit-distance constant C = {c_const:.3f}")

# %% [markdown]
# # Estimator concentration

# %%
# %%time
estimator_df: pd.DataFrame = exp_estimator(
    spec=ExperimentSpec.from_catalog("exp_estimator", seed=42)
)
write_table(df=estimator_df, path="results/exp_estimator.csv")
estimator_df

# %% [markdown]
# # Tester completeness and soundness

# %%
# %%time
tester_df: pd.DataFrame = exp_tester(spec=ExperimentSpec.from_catalog("exp_tester", seed=42))
write_table(df=tester_df, path="results/exp_tester.csv")
tester_df

# %%
# Every row should have a success rate of at least 2/3
assert np.all(tester_df.rate >= 0.6)

# %%
# Reload the results through the intake catalog
degseqtest.catalog.exp_tester(results_dir="results").read()
