"""This module contains classes for handling decision and sampling results."""

from collections import defaultdict
import os
from typing import Any
import pandas as pd
from components.verdict import Verdict
from simulation.constants import CSV_FLOAT_FORMAT
from simulation.reachability import ReachSample

NICE_LABELS: dict[str, str] = {
    "name": "Config",
    "group": "Group class",
    "larc": "LARC",
    "ad_rank": "Ad-rank",
    "delta_dim": "dim Delta",
    "g0_dim": "dim g0",
    "controllable": "Controllable",
    "clause": "Clause",
    "certificate": "Certificate",
    "occupancy": "Occupancy",
    "visited_cells": "Visited cells",
    "blown_up": "Blown up"}


def verdict_record(config: dict[str, Any], verdict: Verdict) -> dict[str, Any]:
    """
    The structured record emitted for a decision: the config echo
    followed by the verdict fields.
    """
    return {"config": config, **verdict.to_dict()}


class ResultsManager():
    """
    Collects verdicts and reachability samples of several configs
    and creates pandas DataFrame objects for tabular export.
    """
    def __init__(self) -> None:
        self.rows: dict[str, list[dict[str, Any]]] = defaultdict(list)

    def add_verdict(self, name: str, group: str, verdict: Verdict) -> None:
        record = verdict.to_dict()
        certificate = record["certificate"]
        self.rows["verdicts"].append({
            "name": name,
            "group": group,
            "larc": record["larc"],
            "ad_rank": record["ad_rank"],
            "delta_dim": record["delta_dim"],
            "g0_dim": record["g0_dim"],
            "controllable": record["controllable"],
            "clause": record["clause"],
            "certificate": "" if certificate is None else certificate["kind"]})

    def add_reach(self, name: str, sample: ReachSample) -> None:
        row = {"name": name}
        row.update({key: value for key, value in sample.to_dict().items() if key != "grid"})
        self.rows["reachability"].append(row)

    def get_df(self, kind: str) -> pd.DataFrame:
        """
        Returns the DataFrame of one kind of result
        (`verdicts` or `reachability`).
        """
        return pd.DataFrame(self.rows.get(kind, []))

    def save_csv(self, folder: str) -> list[str]:
        """
        Saves each non-empty DataFrame to `<folder>/<kind>.csv`.
        """
        os.makedirs(folder, exist_ok=True)
        written = []
        for kind in self.rows:
            df = self.get_df(kind)
            if df.empty:
                continue
            df = df.rename(columns={col: NICE_LABELS.get(col, col) for col in df.columns})
            path = os.path.join(folder, f"{kind}.csv")
            df.to_csv(path, index=False, float_format=CSV_FLOAT_FORMAT)
            written.append(path)
        return written
